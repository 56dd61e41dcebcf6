//! A dependent Artin-Schreier defect extension: B = -1 < 0 and I_1 empty.
//!
//!     cargo run --example as_dependent

use valdef::fixtures;
use valdef::run::classify_config;

fn main() -> valdef::Result<()> {
    let cfg = fixtures::load(fixtures::AS_DEPENDENT)?;
    println!("a = {}", cfg.a.as_deref().unwrap_or("?"));
    let (res, report) = classify_config(&cfg)?;
    let pl = &report.plateaus[0];
    for r in pl.rhos.iter().take(5) {
        println!("rho {}: gamma = {}, nu(a_i) = {:?}, J = {:?}", r.rho, r.gamma, r.nu_coeffs, r.j);
    }
    println!("B = {}, Bbar = {}, B_1 = {:?}", pl.stats.b, pl.stats.bbar, pl.b_n);
    println!("F_(empty) = {}", pl.f_reduced);
    println!("{}: distance route {}, key polynomial route {}", res.verdict.as_str(), res.distance_route.as_str(), res.key_poly_route.as_str());
    Ok(())
}
