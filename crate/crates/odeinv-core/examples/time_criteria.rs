use odeinv_core::convention::Convention;
use odeinv_core::selftest;
use std::time::Instant;

fn main() {
    let conv = Convention::default();
    let which: Vec<usize> = std::env::args().skip(1).map(|s| s.parse().unwrap()).collect();
    for id in which {
        let t = Instant::now();
        let r = match id {
            1 => selftest::criterion_1_cohomology_dims(),
            2 => selftest::criterion_2_structural(),
            3 => selftest::criterion_3_oracles(7, &conv),
            4 => selftest::criterion_4_invariance(&conv),
            5 => selftest::criterion_5_detection(&conv),
            6 => selftest::criterion_6_theta_expansion(7),
            7 => selftest::criterion_7_diagram(),
            8 => selftest::criterion_8_rho_cancellation(7, &conv),
            _ => continue,
        };
        println!("criterion {id}: passed={} in {:?}", r.passed, t.elapsed());
        for d in r.details.iter().filter(|d| d.starts_with("FAIL")) {
            println!("   {d}");
        }
    }
}
