use odeinv_core::cohomology::spencer::*;
use odeinv_core::liealg::{build_g, BasisElt};
use odeinv_core::qlinalg::Subspace;
use num::Zero;

fn main() {
    let g = build_g(4, 2);
    let setup = SpencerSetup::new(&g);
    let eff = effective_e02(&g);
    let hom2 = setup.hom_v_v(2);
    let v_idx = g.v_indices();
    let alpha = setup.alpha_matrix();
    let delta = setup.delta_matrix(1);
    let hom_fw = setup.hom_f_w(2);
    let f_names: Vec<String> = (0..)
        .zip(v_idx.iter())
        .filter_map(|(_, &vi)| match g.basis()[vi] {
            BasisElt::V { a, i } if a >= 1 => Some(format!("v^{}*e_{}", a, i + 1)),
            _ => None,
        })
        .collect();
    for rep in eff.representatives.get(&3).cloned().unwrap_or_default() {
        println!("== degree-3 representative:");
        for (i, c) in rep.iter().enumerate() {
            if !c.is_zero() {
                let sub = i / hom2.n_target;
                let tgt = i % hom2.n_target;
                let s = &hom2.subsets[sub];
                let names: Vec<String> = s.iter().map(|&p| format!("{}", g.basis()[v_idx[p]])).collect();
                println!("  c({}) -> {} : {}", names.join(" ^ "), g.basis()[v_idx[tgt]], c);
            }
        }
        let a = alpha.mul_vec(&rep);
        println!("  alpha(c) components:");
        for (i, c) in a.iter().enumerate() {
            if !c.is_zero() {
                let sub = i / hom_fw.n_target;
                let tgt = i % hom_fw.n_target;
                let s = &hom_fw.subsets[sub];
                let names: Vec<String> = s.iter().map(|&p| f_names[p].clone()).collect();
                println!("    a({}) -> e_{} : {}", names.join(" ^ "), tgt + 1, c);
            }
        }
        // membership check
        let d_cols: Vec<Vec<_>> = (0..delta.cols).map(|j| delta.column(j)).collect();
        let im = Subspace::from_spanning(delta.rows, d_cols);
        println!("  alpha(c) in im delta: {}", im.contains(&a));
    }
}
