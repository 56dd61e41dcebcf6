//! g = (x^2 + x)^2 + (x^2 + x) + t^(-1) = x^4 + x + t^(-1) over F_2.
//!
//! As one degree-1 plateau with D = 4 the run succeeds with defect 4. The
//! staged configuration (plateaus at degrees 1 and 2, stage 1 from the
//! stepper for y^2 + y = t^(-1)) is rejected: those approximants do not
//! approach the root of g.
//!
//!     cargo run --example tower

use valdef::fixtures;
use valdef::run::analyze_config;

fn main() -> valdef::Result<()> {
    let report = analyze_config(&fixtures::load(fixtures::TOWER)?)?;
    let pl = &report.plateaus[0];
    println!("single stage: D = {}, d = {}, defect {}", pl.stats.defect_degree, report.d, report.defect);
    println!("B_1 = {:?}, I_1 = {:?}, F_reduced = {}", pl.b_n, pl.i_set, pl.f_reduced);
    for r in &pl.rhos[pl.rhos.len() - 3..] {
        println!("  rho {}: gamma = {}, deg_Q(g) = {}", r.rho, r.gamma, r.deg_q);
    }
    match analyze_config(&fixtures::load(fixtures::TOWER_STAGED)?) {
        Ok(r) => println!("staged: d = {}", r.d),
        Err(e) => println!("staged: {e}"),
    }
    Ok(())
}
