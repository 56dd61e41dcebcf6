//! Q-expansion of g = x^2 + x + t^(-1) in Q = x + t^(-1/2) and the
//! truncation nu_Q(g).
//!
//!     cargo run --example q_expansion

use valdef::series::parse::{parse_poly, parse_series};
use valdef::valuation::{deg_q, nu_trunc, NuOracle};
use valdef::{FpElem, Poly, PrimeChar};

fn main() -> valdef::Result<()> {
    let p = PrimeChar::new(2)?;
    let g: Poly<FpElem> = parse_poly("x^2 + x + t^(-1)", p)?;
    let q: Poly<FpElem> = parse_poly("x + t^(-1/2)", p)?;
    let e = g.q_expansion(&q)?;
    for (i, a) in e.coeffs.iter().enumerate() {
        println!("a_{i} = {a}");
    }
    println!("L_Q(g) = {:?}", e.support);

    // nu(f) = v(f(eta)) for the root eta = sum of t^(-1/2^k)
    let oracle = NuOracle::root_eval(g.clone(), parse_series("geom(0, 2, 1)", p)?);
    let gamma = oracle.nu(&q)?;
    let (v, argmin) = nu_trunc(&g, &q, &gamma, &oracle)?;
    println!("nu(Q) = {gamma}, nu_Q(g) = {v}, attained at {argmin:?}, deg_Q(g) = {}", deg_q(&g, &q, &gamma, &oracle)?);
    Ok(())
}
