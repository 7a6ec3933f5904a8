// scratch: decode the degree-3 effective classes for (k,m) = (3,2)
use odeinv_core::cohomology::spencer::*;
use odeinv_core::liealg::{build_g, BasisElt};

fn main() {
    let g = build_g(3, 2);
    let eff = effective_e02(&g);
    println!("dims: {:?}", eff.dims);
    let setup = SpencerSetup::new(&g);
    let hom2 = setup.hom_v_v(2);
    let v_idx = g.v_indices();
    for (deg, reps) in &eff.representatives {
        println!("== degree {deg}: {} reps", reps.len());
        for rep in reps {
            for (i, c) in rep.iter().enumerate() {
                if !num::Zero::is_zero(c) {
                    let sub = i / hom2.n_target;
                    let tgt = i % hom2.n_target;
                    let s = &hom2.subsets[sub];
                    let names: Vec<String> = s.iter().map(|&p| format!("{}", g.basis()[v_idx[p]])).collect();
                    let tname = format!("{}", g.basis()[v_idx[tgt]]);
                    println!("  c({}) -> {} : {}", names.join(","), tname, c);
                }
            }
            println!("  ----");
        }
    }
    let _ = BasisElt::X;
}
