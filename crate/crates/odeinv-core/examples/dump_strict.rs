use odeinv_core::cohomology::spencer::*;
use odeinv_core::liealg::build_g;
use odeinv_core::qlinalg::{preimage_of_column_space, QMatrix, Subspace};
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
        let delta = setup.delta_matrix(1);
        // strict: {c : x.c = 0 and alpha(c) in im delta}, mod im Sop^1
        let strict_inv = x_act.kernel_basis();
        let b = QMatrix::from_columns(&strict_inv);
        let alpha_on_inv = alpha.mul(&b);
        let dmat = {
            let cols: Vec<Vec<BigRational>> = (0..delta.cols).map(|j| delta.column(j)).collect();
            if cols.is_empty() { QMatrix::zeros(delta.rows, 0) } else { QMatrix::from_columns(&cols) }
        };
        let y = preimage_of_column_space(&alpha_on_inv, &dmat);
        let vecs: Vec<Vec<BigRational>> = y.gens().iter().map(|v| b.mul_vec(v)).collect();
        // split by degree and mod im Sop^1 per degree
        let mut by_deg: BTreeMap<i64, Vec<Vec<BigRational>>> = BTreeMap::new();
        for v in &vecs {
            // each strict-invariant basis vector may mix degrees; split it
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
        let mut dims: BTreeMap<i64, usize> = BTreeMap::new();
        let dom_a = setup.hom_v_a(1);
        for (d, vecs) in by_deg {
            let s_cols = dom_a.block(d);
            let s_vecs: Vec<Vec<BigRational>> = s_cols.iter().map(|&ci| sop1.column(ci)).collect();
            let s_space = Subspace::from_spanning(hom2.len(), s_vecs);
            let e = Subspace::from_spanning(hom2.len(), vecs);
            let dim = e.dim_mod(&s_space);
            if dim > 0 { dims.insert(d, dim); }
        }
        println!("(k,m)=({k},{m}): strict effective dims = {dims:?} (expect {{2: {}}})", m*m*(m+1)/2);
    }
}
