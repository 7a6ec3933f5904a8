use odeinv_core::cohomology::spencer::*;
use odeinv_core::liealg::build_g;

fn main() {
    for (k, m) in [(3usize, 2usize), (3, 3), (4, 2), (5, 2), (4, 3)] {
        let g = build_g(k, m);
        let eff = effective_e02(&g);
        println!("(k,m)=({k},{m}): effective dims = {:?} (expect {{2: {}}})", eff.dims, m*m*(m+1)/2);
    }
}
