//! Newton polygon of g with respect to Q and the line pi, as text and SVG.
//!
//!     cargo run --example newton_polygon > polygon.svg

use valdef::figure::PolygonFigure;
use valdef::series::parse::{parse_poly, parse_series};
use valdef::valuation::{newton_polygon, pi_member, NuOracle, PiLine};
use valdef::{FpElem, PrimeChar, Rat};

fn main() -> valdef::Result<()> {
    let p = PrimeChar::new(2)?;
    let g = parse_poly::<FpElem>("x^2 + x + t^(-1)", p)?;
    let q = parse_poly::<FpElem>("x + t^(-1/2) + t^(-1/4)", p)?;
    let oracle = NuOracle::root_eval(g.clone(), parse_series("geom(0, 2, 1)", p)?);
    let np = newton_polygon(&g, &q, &oracle)?;
    eprintln!("points {:?}", np.points);
    eprintln!("vertices {:?}", np.vertices);

    let line = PiLine::new(2, Rat::zero());
    eprintln!("(1, 0) on pi: {}", pi_member(1, &np.points[1].1, &line));

    let fig = PolygonFigure::new("x^2 + x + t^(-1)", np.points.clone(), 2, Rat::zero(), oracle.nu(&q)?);
    eprint!("{}", fig.to_ascii());
    print!("{}", fig.to_svg(80)?);
    Ok(())
}
