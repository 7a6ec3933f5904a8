use odeinv_core::cohomology::spencer::*;
use odeinv_core::liealg::build_g;
use odeinv_core::qlinalg::{QMatrix, Subspace};
use num::rational::BigRational;
use num::Zero;
use std::collections::BTreeMap;

fn main() {
    for (k, m) in [(3usize, 2usize), (3, 3), (4, 2), (5, 2), (4, 3)] {
        let g = build_g(k, m);
        let setup = SpencerSetup::new(&g);
        let hom2 = setup.hom_v_v(2);
        let sop1 = setup.sop_matrix(1);
        let x_act = setup.x_action_hom_v(2);
        let alpha = setup.alpha_matrix();
        // {c : x.c = 0 and alpha(c) = 0}
        let stacked = {
            let mut rows = Vec::new();
            for i in 0..x_act.rows { rows.push((0..x_act.cols).map(|j| x_act[(i,j)].clone()).collect::<Vec<_>>()); }
            for i in 0..alpha.rows { rows.push((0..alpha.cols).map(|j| alpha[(i,j)].clone()).collect::<Vec<_>>()); }
            QMatrix::from_rows(rows)
        };
        let vecs = stacked.kernel_basis();
        let mut by_deg: BTreeMap<i64, Vec<Vec<BigRational>>> = BTreeMap::new();
        for v in &vecs {
            let mut parts: BTreeMap<i64, Vec<BigRational>> = BTreeMap::new();
            for (i, c) in v.iter().enumerate() {
                if c.is_zero() { continue; }
                let d = hom2.degrees[i];
                parts.entry(d).or_insert_with(|| vec![BigRational::zero(); v.len()])[i] = c.clone();
            }
            for (d, part) in parts {
                if d >= 1 { by_deg.entry(d).or_default().push(part); }
            }
        }
        let dom_a = setup.hom_v_a(1);
        let mut dims: BTreeMap<i64, usize> = BTreeMap::new();
        for (d, vv) in by_deg {
            let s_cols = dom_a.block(d);
            let s_vecs: Vec<Vec<BigRational>> = s_cols.iter().map(|&ci| sop1.column(ci)).collect();
            let s_space = Subspace::from_spanning(hom2.len(), s_vecs);
            let e = Subspace::from_spanning(hom2.len(), vv);
            let dim = e.dim_mod(&s_space);
            if dim > 0 { dims.insert(d, dim); }
        }
        println!("(k,m)=({k},{m}): kerX ∩ ker alpha mod imSop1 = {dims:?} (expect {{2: {}}})", m*m*(m+1)/2);
    }
}
