//! x^p - x = t^(-1) for p = 2, 3, 5: one plateau, values -1/p^(N+1), B = 0.
//!
//!     cargo run --example as_independent

use valdef::fixtures;
use valdef::run::classify_config;

fn main() -> valdef::Result<()> {
    for text in [fixtures::AS_INDEPENDENT_P2, fixtures::AS_INDEPENDENT_P3, fixtures::AS_INDEPENDENT_P5] {
        let cfg = fixtures::load(text)?;
        let (res, report) = classify_config(&cfg)?;
        let pl = &report.plateaus[0];
        let first: Vec<String> = res.gammas.iter().take(4).map(|g| g.to_string()).collect();
        println!("p = {}: gamma_N = {} ...", report.p, first.join(", "));
        println!("  B = {}, D = {}, B_1 = {:?}, I_1 = {:?}", pl.stats.b, pl.stats.defect_degree, pl.b_n, res.i1);
        println!("  reduced limit key polynomial {}", pl.f_reduced);
        println!("  {} (dist = {})", res.verdict.as_str(), res.gamma);
    }
    Ok(())
}
