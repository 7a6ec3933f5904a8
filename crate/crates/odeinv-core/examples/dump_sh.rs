use odeinv_core::cohomology::{negative_complex, spencer};
use odeinv_core::liealg::build_g;

fn main() {
    for (k, m) in [(4usize, 2usize)] {
        let g = build_g(k, m);
        let cx = negative_complex(&g, 3).unwrap();
        println!("(k,m) = ({k},{m})");
        println!("H^2 dims: {:?}", cx.h_dims(2).unwrap());
        println!("E02 dims: {:?}", spencer::e02_dims(&g).unwrap());
        println!("E11 dims: {:?}", spencer::e11_dims(&g).unwrap());
        let eff = spencer::effective_e02(&g);
        println!("effective dims: {:?}", eff.dims);
        let setup = spencer::SpencerSetup::new(&g);
        println!("ker Sop^2 by degree: {:?}", setup.sop_kernel_dims(2));
    }
}
