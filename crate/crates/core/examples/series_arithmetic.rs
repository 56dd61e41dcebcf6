//! Exact and lazy series in both backends.
//!
//!     cargo run --example series_arithmetic

use valdef::plateau::as_root_lazy;
use valdef::series::parse::parse_series;
use valdef::{CycElem, FpElem, PrimeChar, Rat, Series};

fn main() -> valdef::Result<()> {
    let p2 = PrimeChar::new(2)?;
    let a = parse_series::<FpElem>("t^(-1)", p2)?;
    let b = parse_series::<FpElem>("t^(-1) + t^(1/2)", p2)?;
    println!("({a}) + ({b}) = {}", &a + &b);
    let c = parse_series::<FpElem>("1 + t", p2)?;
    println!("({c})^2 = {}", &c * &c);

    // the root of x^2 - x = t^(-1), computed on demand
    let eta = Series::Lazy(as_root_lazy(&a)?);
    println!("v(eta) = {}", eta.val()?);
    for c in [Rat::frac(-1, 3), Rat::frac(-1, 9)] {
        let tr = eta.truncate(&c, 64)?;
        let rest = (&eta - &Series::Exact(tr.clone())).val()?;
        println!("eta below t^({c}): {tr}   v(eta - that) = {rest}");
    }

    let p3 = PrimeChar::new(3)?;
    let m = parse_series::<CycElem>("3*p^(1/2)", p3)?;
    let u = parse_series::<CycElem>("1 - z", p3)?;
    println!("v(3 p^(1/2)) = {}, v(1 - zeta_3) = {}, v(product) = {}", m.val()?, u.val()?, (&m * &u).val()?);
    Ok(())
}
