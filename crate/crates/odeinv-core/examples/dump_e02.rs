use odeinv_core::cohomology::v_complex;
use odeinv_core::liealg::build_g;
use odeinv_core::qlinalg::{qi, QMatrix, Subspace, preimage_of_column_space};
use num::rational::BigRational;
use num::Zero;

fn main() {
    let g = build_g(3, 2);
    let vx = v_complex(&g, 3).unwrap();
    for rp in [4i64, 5] {
        let c2 = &vx.bases[2];
        let here = c2.block(rp);
        let z = vx.diff_block(2, rp).kernel_basis();
        let d1 = vx.diff_block(1, rp);
        let b: Vec<Vec<BigRational>> = (0..d1.cols).map(|ci| {
            let mut e = vec![BigRational::zero(); d1.cols];
            e[ci] = qi(1);
            d1.mul_vec(&e)
        }).collect();
        let b_dim = Subspace::from_spanning(here.len(), b.clone()).dim();
        println!("deg {rp}: dim C2 = {}, dim Z2 = {}, dim B2 = {}, H2(V,g) = {}",
            here.len(), z.len(), b_dim, z.len() - b_dim);
        // count x-invariant classes
        let lower = c2.block(rp - 1);
        let d1l = vx.diff_block(1, rp - 1);
        let bl: Vec<Vec<BigRational>> = (0..d1l.cols).map(|ci| {
            let mut e = vec![BigRational::zero(); d1l.cols];
            e[ci] = qi(1);
            d1l.mul_vec(&e)
        }).collect();
        let bl_mat = if bl.is_empty() { QMatrix::zeros(lower.len(), 0) } else { QMatrix::from_columns(&bl) };
        println!("  lower block size {}, B2 lower dim {}", lower.len(), Subspace::from_spanning(lower.len(), bl).dim());
        let _ = (bl_mat, preimage_of_column_space as fn(&QMatrix,&QMatrix)->Subspace);
    }
}
