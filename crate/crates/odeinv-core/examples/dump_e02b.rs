use odeinv_core::cohomology::{v_complex, spencer::SpencerSetup};
use odeinv_core::liealg::{build_g, BasisElt};
use odeinv_core::qlinalg::{qi, QMatrix, Subspace, preimage_of_column_space};
use num::rational::BigRational;
use num::Zero;
use std::collections::BTreeMap;

fn main() {
    let g = build_g(3, 2);
    let vx = v_complex(&g, 3).unwrap();
    let setup = SpencerSetup::new(&g);
    let c2 = &vx.bases[2];
    let n_g = g.dim();
    let x_full = g.ad_matrix(g.idx(BasisElt::X));

    // x-action on C^2(V,g), full-size
    let mut x_act = QMatrix::zeros(c2.len(), c2.len());
    for (s_idx, s_set) in c2.subsets.iter().enumerate() {
        for tgt in 0..n_g {
            let col = c2.index(s_idx, tgt);
            for r in 0..n_g {
                let c = &x_full[(r, tgt)];
                if !c.is_zero() {
                    x_act[(c2.index(s_idx, r), col)] += c.clone();
                }
            }
            for (i, &p) in s_set.iter().enumerate() {
                let a = setup_v_level(&g, p);
                if a == 0 { continue; }
                let lowered = (a - 1) * g.m + setup_v_comp(&g, p);
                if s_set.contains(&lowered) { continue; }
                let mut merged = s_set.clone();
                merged.remove(i);
                let at = merged.partition_point(|&x| x < lowered);
                merged.insert(at, lowered);
                let Some(&m_idx) = c2.subset_of.get(&merged) else { continue; };
                let swaps = i.abs_diff(at);
                let sign = if swaps % 2 == 0 { -1i64 } else { 1 };
                x_act[(c2.index(m_idx, tgt), col)] += qi(sign);
            }
        }
    }
    // check: does X map Z^2_5 into Z^2_4 and B^2_5 into B^2_4?
    let rp = 5i64;
    let here = c2.block(rp);
    let lower = c2.block(rp - 1);
    let here_map: BTreeMap<usize,usize> = here.iter().enumerate().map(|(p,&i)|(i,p)).collect();
    let lower_map: BTreeMap<usize,usize> = lower.iter().enumerate().map(|(p,&i)|(i,p)).collect();
    let mut xb = QMatrix::zeros(lower.len(), here.len());
    for (&ci,&cp) in &here_map { for (&ri,&rp2) in &lower_map { xb[(rp2,cp)] = x_act[(ri,ci)].clone(); } }

    let z5 = vx.diff_block(2, rp).kernel_basis();
    let d2_lower = vx.diff_block(2, rp - 1);
    // X z must be a cocycle:
    let mut all_cocycle = true;
    for z in &z5 {
        let xz = xb.mul_vec(z);
        let dxz = d2_lower.mul_vec(&xz);
        if !dxz.iter().all(Zero::is_zero) { all_cocycle = false; }
    }
    println!("X(Z^2_5) consists of cocycles: {all_cocycle}");

    let d1l = vx.diff_block(1, rp - 1);
    let bl: Vec<Vec<BigRational>> = (0..d1l.cols).map(|ci| {
        let mut e = vec![BigRational::zero(); d1l.cols]; e[ci] = qi(1); d1l.mul_vec(&e)
    }).collect();
    let bl_mat = if bl.is_empty() { QMatrix::zeros(lower.len(), 0) } else { QMatrix::from_columns(&bl) };
    let z_mat = QMatrix::from_columns(&z5);
    let x_on_z = xb.mul(&z_mat);
    let y_space = preimage_of_column_space(&x_on_z, &bl_mat);
    let inv_vecs: Vec<Vec<BigRational>> = y_space.gens().iter().map(|y| z_mat.mul_vec(y)).collect();
    let d1 = vx.diff_block(1, rp);
    let b5: Vec<Vec<BigRational>> = (0..d1.cols).map(|ci| {
        let mut e = vec![BigRational::zero(); d1.cols]; e[ci] = qi(1); d1.mul_vec(&e)
    }).collect();
    let inv_dim = Subspace::from_spanning(here.len(), inv_vecs).dim_mod(&Subspace::from_spanning(here.len(), b5));
    println!("preimage route: Inv_x H^2_5 = {inv_dim}");

    // rank route: ker xbar = dim H2_5 - rank(xbar)
    let b4 = Subspace::from_spanning(lower.len(), bl.clone());
    let xz_vecs: Vec<Vec<BigRational>> = z5.iter().map(|z| xb.mul_vec(z)).collect();
    let rank = Subspace::from_spanning(lower.len(), xz_vecs).dim_mod(&b4);
    println!("rank route: 19 - {rank} = {}", 19 - rank);
}

fn setup_v_level(g: &odeinv_core::liealg::GradedLieAlgebra, p: usize) -> usize {
    match g.basis()[g.v_indices()[p]] { BasisElt::V { a, .. } => a, _ => unreachable!() }
}
fn setup_v_comp(g: &odeinv_core::liealg::GradedLieAlgebra, p: usize) -> usize {
    match g.basis()[g.v_indices()[p]] { BasisElt::V { i, .. } => i, _ => unreachable!() }
}
