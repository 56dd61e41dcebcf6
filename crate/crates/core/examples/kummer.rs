//! Mixed characteristic: x^2 = a over Q_2-like series, gamma_N -> alpha = 1.
//!
//!     cargo run --example kummer

use valdef::fixtures;
use valdef::run::classify_config;

fn main() -> valdef::Result<()> {
    let cfg = fixtures::load(fixtures::KUMMER_P2)?;
    let (res, _) = classify_config(&cfg)?;
    for (n, g) in res.gammas.iter().enumerate().take(6) {
        println!("gamma_{n} = {g}");
    }
    println!("alpha = {}", res.alpha.as_ref().map_or("-".into(), |a| a.to_string()));
    println!("delta = {} = p * gamma", res.delta);
    println!("I_1 = {:?}: {}", res.i1, res.verdict.as_str());
    Ok(())
}
