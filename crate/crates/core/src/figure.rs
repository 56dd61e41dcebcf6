//! Newton-polygon figures: the points `(i, ν(a_i))` and their lower hull in
//! blue, the line π in red, as SVG or as a character plot.

use std::fmt::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Rat, Val};
use crate::valuation::{NewtonPolygon, PiLine};

/// Everything drawn in one figure; values stay exact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolygonFigure {
    pub title: String,
    pub polygon: NewtonPolygon,
    pub pi: PiLine,
    /// `ν(Q_ρ)`
    pub gamma: Val,
}

impl PolygonFigure {
    pub fn new(title: impl Into<String>, points: Vec<(usize, Val)>, d: usize, b: Rat, gamma: Val) -> Self {
        PolygonFigure {
            title: title.into(),
            polygon: NewtonPolygon::from_points(points),
            pi: PiLine::new(d as u64, b),
            gamma,
        }
    }

    /// The labelled points `(0, Dν(Q))`, `(D, 0)` and `(0, DB)`.
    pub fn endpoints(&self) -> Result<[(usize, Val); 3]> {
        let d = self.pi.defect_degree as usize;
        Ok([(0, self.gamma.scale(d as i64)?), (d, Val::zero()), (0, Val::Fin(self.pi.bbar.clone()))])
    }

    fn y_range(&self) -> (f64, f64) {
        let mut ys: Vec<f64> = self.polygon.vertices.iter().map(|(_, y)| y.to_f64()).collect();
        ys.extend(self.polygon.points.iter().filter_map(|(_, v)| v.finite().map(Rat::to_f64)));
        ys.push(self.pi.bbar.to_f64());
        ys.push(0.0);
        if let Some(g) = self.gamma.finite() {
            ys.push(g.to_f64() * self.pi.defect_degree as f64);
        }
        let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo < 1e-9 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    }

    pub fn to_svg(&self, pixels_per_unit: u32) -> Result<String> {
        if pixels_per_unit == 0 {
            return Err(Error::Config("pixels_per_unit must be positive".into()));
        }
        let ppu = pixels_per_unit as f64;
        let d = self.pi.defect_degree as f64;
        let (lo, hi) = self.y_range();
        let margin = 60.0;
        let (w, h) = (d * ppu + 2.0 * margin, (hi - lo) * ppu + 2.0 * margin);
        let px = |x: f64| margin + x * ppu;
        let py = |y: f64| margin + (hi - y) * ppu;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            num(w),
            num(h),
            num(w),
            num(h)
        );
        let _ = writeln!(s, r#"<title>{}</title>"#, escape(&self.title));
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        // axes
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1"/>"#,
            num(px(0.0)),
            num(py(0.0)),
            num(px(d)),
            num(py(0.0))
        );
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1"/>"#,
            num(px(0.0)),
            num(py(lo)),
            num(px(0.0)),
            num(py(hi))
        );
        // π
        let _ = writeln!(
            s,
            r#"<line class="pi" x1="{}" y1="{}" x2="{}" y2="{}" stroke="red" stroke-width="2"/>"#,
            num(px(0.0)),
            num(py(self.pi.bbar.to_f64())),
            num(px(d)),
            num(py(0.0))
        );
        // hull
        let pts: Vec<String> = self
            .polygon
            .vertices
            .iter()
            .map(|(x, y)| format!("{},{}", num(px(*x as f64)), num(py(y.to_f64()))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="hull" points="{}" fill="none" stroke="blue" stroke-width="2"/>"#,
            pts.join(" ")
        );
        for (i, v) in &self.polygon.points {
            if let Val::Fin(y) = v {
                let _ = writeln!(
                    s,
                    r#"<circle class="point" cx="{}" cy="{}" r="4" fill="blue"><title>({i}, {y:?})</title></circle>"#,
                    num(px(*i as f64)),
                    num(py(y.to_f64()))
                );
            }
        }
        for (x, v) in self.endpoints()? {
            if let Val::Fin(y) = v {
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{}" font-size="12" font-family="monospace">({x}, {})</text>"#,
                    num(px(x as f64) + 6.0),
                    num(py(y.to_f64()) - 6.0),
                    escape(&format!("{y:?}"))
                );
            }
        }
        s.push_str("</svg>\n");
        Ok(s)
    }

    /// A character plot: `o` points, `*` the line π, `@` both.
    pub fn to_ascii(&self) -> String {
        let d = self.pi.defect_degree as usize;
        let (lo, hi) = self.y_range();
        let (cols_per_unit, rows) = (8usize, 17usize);
        let width = d * cols_per_unit + 1;
        let mut grid = vec![vec![' '; width]; rows];
        let row_of = |y: f64| (((hi - y) / (hi - lo)) * (rows - 1) as f64).round() as usize;
        for c in 0..width {
            let x = c as f64 / cols_per_unit as f64;
            let y = self.pi.bbar.to_f64() * (1.0 - x / d as f64);
            grid[row_of(y).min(rows - 1)][c] = '*';
        }
        for (i, v) in &self.polygon.points {
            if let Val::Fin(y) = v {
                let cell = &mut grid[row_of(y.to_f64()).min(rows - 1)][i * cols_per_unit];
                *cell = if *cell == '*' { '@' } else { 'o' };
            }
        }
        let mut out = format!("{}\n", self.title);
        for (r, line) in grid.iter().enumerate() {
            let y = hi - (hi - lo) * r as f64 / (rows - 1) as f64;
            let _ = writeln!(out, "{:>10} |{}", num(y), line.iter().collect::<String>().trim_end());
        }
        let _ = writeln!(out, "{:>10} +{}", "", "-".repeat(width));
        for (i, v) in &self.polygon.points {
            let _ = writeln!(out, "  ({i}, {v:?})");
        }
        out
    }
}

/// 12 significant digits, trailing zeros dropped.
fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (11 - mag).clamp(0, 20) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indep() -> PolygonFigure {
        PolygonFigure::new("as p=2", vec![(0, Val::frac(-1, 4)), (1, Val::zero()), (2, Val::zero())], 2, Rat::zero(), Val::frac(-1, 8))
    }

    #[test]
    fn significant_digits() {
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(-2.5), "-2.5");
        assert_eq!(num(120.0), "120");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn svg_is_deterministic_and_coloured() {
        let f = indep();
        let a = f.to_svg(80).unwrap();
        assert_eq!(a, f.to_svg(80).unwrap());
        assert!(a.contains(r#"stroke="red""#) && a.contains(r#"stroke="blue""#));
        assert_eq!(a.matches("<circle").count(), 3);
        assert!(a.contains("(0, -1/4)"));
    }

    #[test]
    fn endpoints() {
        let e = indep().endpoints().unwrap();
        assert_eq!(e[0], (0, Val::frac(-1, 4)));
        assert_eq!(e[1], (2, Val::zero()));
        assert_eq!(e[2], (0, Val::zero()));
    }

    #[test]
    fn ascii_marks_points() {
        let a = indep().to_ascii();
        assert!(a.contains('o') || a.contains('@'));
        assert!(a.contains("(1, 0)"));
    }
}
