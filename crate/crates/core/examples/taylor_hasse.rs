//! Hasse derivatives and the Taylor expansion of F = L(Q) around Q_rho.
//!
//!     cargo run --example taylor_hasse

use valdef::poly::taylor_expand;
use valdef::series::parse::parse_poly;
use valdef::{FpElem, Poly, PrimeChar};

fn main() -> valdef::Result<()> {
    let p = PrimeChar::new(2)?;
    let poly = |s: &str| parse_poly::<FpElem>(s, p);
    let g = poly("x^2 + x + t^(-1)")?;

    let l = g.q_expansion(&poly("x")?)?.as_xpoly();
    for (i, d) in l.hasse_all().iter().enumerate() {
        let cs: Vec<String> = d.coeffs.iter().map(|c| c.to_string()).collect();
        println!("d_{i} L = [{}]", cs.join(", "));
    }

    // g in powers of Q_rho = x + t^(-1/2), with h_rho = t^(-1/2)
    let q_rho = poly("x + t^(-1/2)")?;
    let h: Poly<FpElem> = poly("t^(-1/2)")?;
    let terms = taylor_expand(&g, &q_rho, &h, 16)?;
    let shown: Vec<String> = terms.iter().map(Poly::to_string).collect();
    println!("g = sum d_iL(h) Q_rho^i with coefficients [{}]", shown.join(", "));
    Ok(())
}
