//! Re-derives `DEFAULT_C_FIT`: prints the success frequency of the
//! coordinate JL embedding on the normalized basis of `L_2^128` at
//! `ε = 0.25` over seeds `0..200` for each grid value of `C`.

use coordproj_core::rotation::{jl_success_frequency, pilot_fit_c};

fn main() {
    let (n, eps, seeds) = (128, 0.25, 0..200);
    for step in 1..=10 {
        let c = step as f64 / 10.0;
        let freq = jl_success_frequency(n, eps, c, seeds.clone()).expect("pilot run");
        println!("C = {c:.1}  success = {freq:.3}");
    }
    println!("fitted C = {:?}", pilot_fit_c(n, eps, seeds).expect("pilot run"));
}
