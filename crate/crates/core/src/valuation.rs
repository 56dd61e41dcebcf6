//! The valuation `ν(f) = v(f(η))` on `K[x]`, its truncations `ν_Q`, the
//! degree `deg_Q`, Newton polygons and the π line.

use serde::{Deserialize, Serialize};

use crate::coeffs::Coeff;
use crate::error::{Error, Result};
use crate::exact::{Rat, Val};
use crate::poly::{Poly, QExpansion};
use crate::series::{Series, DEFAULT_BUDGET};

/// The two degree-p situations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// `g = x^p - x - a`.
    ArtinSchreier,
    /// `g = x^p - a`, mixed characteristic with `v(a) = 0`.
    Kummer,
}

impl Case {
    pub fn as_str(self) -> &'static str {
        match self {
            Case::ArtinSchreier => "artin_schreier",
            Case::Kummer => "kummer",
        }
    }
}

#[derive(Clone, Debug)]
pub enum OracleMode<C: Coeff> {
    /// Evaluate at a certified approximation of the root `η`.
    RootEval { eta: Series<C> },
    /// `ν(x - b) = v(g(b))/p`, valid only inside the radius of the case.
    Shortcut { case: Case },
}

/// Computes `ν` on `K[x]` relative to the minimal polynomial `g` of `η`.
#[derive(Clone, Debug)]
pub struct NuOracle<C: Coeff> {
    pub g: Poly<C>,
    pub mode: OracleMode<C>,
    pub budget: usize,
}

impl<C: Coeff> NuOracle<C> {
    pub fn root_eval(g: Poly<C>, eta: Series<C>) -> Self {
        NuOracle { g, mode: OracleMode::RootEval { eta }, budget: DEFAULT_BUDGET }
    }

    pub fn shortcut(g: Poly<C>, case: Case) -> Self {
        NuOracle { g, mode: OracleMode::Shortcut { case }, budget: DEFAULT_BUDGET }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    /// `ν(f)`; multiples of `g` get `∞` without evaluation.
    pub fn nu(&self, f: &Poly<C>) -> Result<Val> {
        let r = if f.deg() >= self.g.deg() && !f.is_zero() { f.rem(&self.g)? } else { f.clone() };
        if r.is_zero() {
            return Ok(Val::Inf);
        }
        if let Some(c) = r.as_constant() {
            return c.val_with(self.budget);
        }
        match &self.mode {
            OracleMode::RootEval { eta } => r.eval(eta).val_with(self.budget),
            OracleMode::Shortcut { case } => {
                if r.deg() != 1 {
                    return Err(Error::ShortcutUnsupported(r.to_string()));
                }
                // r = c (x - b)
                let c = r.coeff(1);
                let lead = c.val_with(self.budget)?;
                let b = match c.as_exact() {
                    Some(s) if s.is_one() => -&r.coeff(0),
                    _ => &(-&r.coeff(0)) * &c.inv()?,
                };
                Ok(lead + nu_xb_via_g(&b, &self.g, *case, self.budget)?)
            }
        }
    }
}

/// `ν(x - b) = v(g(b))/p` for monic `g` of degree `p`. The computed value
/// must stay below 0 (Artin-Schreier) or below `α = v(p)/(p-1)` (Kummer,
/// which also needs `v(b) = 0`).
pub fn nu_xb_via_g<C: Coeff>(b: &Series<C>, g: &Poly<C>, case: Case, budget: usize) -> Result<Val> {
    let p = g.prime().get();
    if g.deg() as u64 != p || !g.is_monic() {
        return Err(Error::ShortcutUnsupported(format!("g = {g} is not monic of degree p")));
    }
    let v = g.eval(b).val_with(budget)?.div_int(p);
    let bound = match case {
        Case::ArtinSchreier => Val::zero(),
        Case::Kummer => {
            let vb = b.val_with(budget)?;
            if vb != Val::zero() {
                return Err(Error::ShortcutRadius { value: format!("v(b) = {vb}"), bound: "v(b) = 0".into() });
            }
            Val::Fin(Rat::frac(1, p as i64 - 1))
        }
    };
    if v >= bound {
        return Err(Error::ShortcutRadius { value: v.to_string(), bound: bound.to_string() });
    }
    Ok(v)
}

/// The per-index values `ν(a_i) + i·γ_Q` of a Q-expansion (`∞` off the support).
pub fn expansion_values<C: Coeff>(
    exp: &QExpansion<C>,
    gamma_q: &Val,
    oracle: &NuOracle<C>,
) -> Result<Vec<(Val, Val)>> {
    exp.coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let na = oracle.nu(a)?;
            let total = na.clone() + gamma_q.scale(i as i64).unwrap_or(Val::zero());
            Ok((na, total))
        })
        .collect()
}

/// `ν_Q(f) = min_i ν(a_i Q^i)` and the indices attaining it.
pub fn nu_trunc<C: Coeff>(
    f: &Poly<C>,
    q: &Poly<C>,
    gamma_q: &Val,
    oracle: &NuOracle<C>,
) -> Result<(Val, Vec<usize>)> {
    let exp = f.q_expansion(q)?;
    Ok(min_argmin(&expansion_values(&exp, gamma_q, oracle)?))
}

pub(crate) fn min_argmin(vals: &[(Val, Val)]) -> (Val, Vec<usize>) {
    let m = vals.iter().map(|(_, t)| t.clone()).min().unwrap_or(Val::Inf);
    let arg = vals.iter().enumerate().filter(|(_, (_, t))| *t == m && !m.is_inf()).map(|(i, _)| i).collect();
    (m, arg)
}

/// The largest index attaining `ν_Q(f)`.
pub fn deg_q<C: Coeff>(f: &Poly<C>, q: &Poly<C>, gamma_q: &Val, oracle: &NuOracle<C>) -> Result<usize> {
    let (_, arg) = nu_trunc(f, q, gamma_q, oracle)?;
    Ok(arg.last().copied().unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub points: Vec<(usize, Val)>,
    /// Lower convex hull of the finite points, sorted by index.
    pub vertices: Vec<(usize, Rat)>,
}

impl NewtonPolygon {
    pub fn from_points(points: Vec<(usize, Val)>) -> Self {
        let vertices = lower_hull(&points);
        NewtonPolygon { points, vertices }
    }

    /// Height of the hull over `x`, if `x` lies within its span.
    pub fn height_at(&self, x: usize) -> Option<Rat> {
        let xr = Rat::int(x as i64);
        for w in self.vertices.windows(2) {
            let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
            if *x0 <= x && x <= *x1 {
                let t = &(&xr - &Rat::int(*x0 as i64)) / &Rat::int((*x1 - *x0) as i64);
                return Some(y0 + &(&t * &(y1 - y0)));
            }
        }
        match self.vertices.as_slice() {
            [(x0, y0)] if *x0 == x => Some(y0.clone()),
            _ => None,
        }
    }
}

fn lower_hull(points: &[(usize, Val)]) -> Vec<(usize, Rat)> {
    let mut pts: Vec<(usize, Rat)> =
        points.iter().filter_map(|(i, v)| v.finite().map(|r| (*i, r.clone()))).collect();
    pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    pts.dedup_by(|b, a| a.0 == b.0);
    let mut hull: Vec<(usize, Rat)> = Vec::new();
    for pt in pts {
        while hull.len() >= 2 {
            let (o, a) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
            // remove `a` unless it lies strictly below the chord o→pt
            let cross = &(&Rat::int(a.0 as i64 - o.0 as i64) * &(&pt.1 - &o.1))
                - &(&(&a.1 - &o.1) * &Rat::int(pt.0 as i64 - o.0 as i64));
            if cross <= Rat::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

/// Newton polygon of `f` with respect to `Q`: points `(i, ν(a_i))`.
pub fn newton_polygon<C: Coeff>(f: &Poly<C>, q: &Poly<C>, oracle: &NuOracle<C>) -> Result<NewtonPolygon> {
    let exp = f.q_expansion(q)?;
    let points = exp
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| Ok((i, oracle.nu(a)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NewtonPolygon::from_points(points))
}

/// The line `π(y) = -B·y + B̄` through `(D, 0)` and `(0, B̄)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiLine {
    pub defect_degree: u64,
    pub b: Rat,
    pub bbar: Rat,
}

impl PiLine {
    pub fn new(defect_degree: u64, b: Rat) -> Self {
        let bbar = &b * &Rat::int(defect_degree as i64);
        PiLine { defect_degree, b, bbar }
    }

    pub fn at(&self, k: usize) -> Rat {
        &self.bbar - &(&self.b * &Rat::int(k as i64))
    }
}

/// `(k, β_k)` lies on π.
pub fn pi_member(k: usize, beta_k: &Val, line: &PiLine) -> bool {
    beta_k.finite().is_some_and(|b| *b == line.at(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{FpElem, PrimeChar};
    use crate::series::parse::{parse_poly, parse_series};

    fn p2() -> PrimeChar {
        PrimeChar::new(2).unwrap()
    }

    fn poly(s: &str) -> Poly<FpElem> {
        parse_poly(s, p2()).unwrap()
    }

    fn g() -> Poly<FpElem> {
        poly("x^2 + x + t^(-1)")
    }

    fn eta() -> Series<FpElem> {
        parse_series("geom(0, 2, 1)", p2()).unwrap()
    }

    #[test]
    fn nu_root_eval_examples() {
        let o = NuOracle::root_eval(g(), eta());
        assert_eq!(o.nu(&poly("x")).unwrap(), Val::frac(-1, 2));
        assert_eq!(o.nu(&poly("t^(3)")).unwrap(), Val::frac(3, 1));
        assert_eq!(o.nu(&g()).unwrap(), Val::Inf);
        assert_eq!(o.nu(&(&g() * &poly("x + 1"))).unwrap(), Val::Inf);
    }

    #[test]
    fn shortcut_examples() {
        let b = parse_series::<FpElem>("t^(-1/2)", p2()).unwrap();
        assert_eq!(nu_xb_via_g(&b, &g(), Case::ArtinSchreier, 8).unwrap(), Val::frac(-1, 4));
        let zero = Series::zero(p2());
        assert_eq!(nu_xb_via_g(&zero, &g(), Case::ArtinSchreier, 8).unwrap(), Val::frac(-1, 2));
        // x^2 + x + t: the root has positive value, outside the radius
        let h = poly("x^2 + x + t");
        assert!(matches!(
            nu_xb_via_g(&zero, &h, Case::ArtinSchreier, 8),
            Err(Error::ShortcutRadius { .. })
        ));
    }

    #[test]
    fn shortcut_agrees_with_root_eval() {
        let root = NuOracle::root_eval(g(), eta());
        let short = NuOracle::shortcut(g(), Case::ArtinSchreier);
        for b in ["0", "t^(-1/2)", "t^(-1/2) + t^(-1/4)", "t^(-1/2) + t^(-1/4) + t^(-1/8)", "t^(-1/4)"] {
            let f = poly(&format!("x + {b}"));
            assert_eq!(root.nu(&f).unwrap(), short.nu(&f).unwrap(), "b = {b}");
        }
    }

    #[test]
    fn nu_trunc_and_deg_examples() {
        let o = NuOracle::root_eval(g(), eta());
        let q = poly("x + t^(-1/2)");
        let gq = Val::frac(-1, 4);
        let (v, arg) = nu_trunc(&g(), &q, &gq, &o).unwrap();
        assert_eq!(v, Val::frac(-1, 2));
        assert_eq!(arg, vec![0, 2]);
        assert_eq!(deg_q(&g(), &q, &gq, &o).unwrap(), 2);
        assert_eq!(nu_trunc(&q, &q, &gq, &o).unwrap(), (gq.clone(), vec![1]));
        assert_eq!(deg_q(&q.pow(3), &q, &gq, &o).unwrap(), 3);
        assert_eq!(nu_trunc(&poly("t^(2)"), &q, &gq, &o).unwrap(), (Val::frac(2, 1), vec![0]));
    }

    #[test]
    fn newton_polygon_examples() {
        let o = NuOracle::root_eval(g(), eta());
        let q = poly("x + t^(-1/2)");
        let np = newton_polygon(&g(), &q, &o).unwrap();
        assert_eq!(np.points, vec![(0, Val::frac(-1, 2)), (1, Val::zero()), (2, Val::zero())]);
        assert_eq!(np.vertices, vec![(0, Rat::frac(-1, 2)), (2, Rat::zero())]);
        assert_eq!(np.height_at(1), Some(Rat::frac(-1, 4)));
        let np = newton_polygon(&q.pow(2), &q, &o).unwrap();
        assert_eq!(np.vertices, vec![(2, Rat::zero())]);
    }

    #[test]
    fn pi_member_examples() {
        assert!(pi_member(1, &Val::zero(), &PiLine::new(2, Rat::zero())));
        let dep = PiLine::new(2, Rat::int(-1));
        assert_eq!(dep.bbar, Rat::int(-2));
        assert!(!pi_member(1, &Val::zero(), &dep));
        assert!(!pi_member(1, &Val::Inf, &dep));
    }

    fn small_poly() -> impl proptest::strategy::Strategy<Value = Poly<FpElem>> {
        use proptest::prelude::*;
        proptest::collection::vec(proptest::collection::vec((-3i64..3, 1i64..3), 0..3), 1..4).prop_map(|cs| {
            let coeffs = cs
                .into_iter()
                .map(|ts| {
                    let terms = ts.into_iter().map(|(n, d)| (Rat::frac(n, d), FpElem::new(1, p2()))).collect();
                    crate::series::FiniteSum::from_terms(terms, p2())
                })
                .collect();
            crate::poly::exact_poly(coeffs, p2())
        })
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn truncation_is_a_valuation_below_nu(f in small_poly(), h in small_poly(), k in 0usize..4) {
            let o = NuOracle::root_eval(g(), eta());
            let b: Vec<String> = (1..=k).map(|j| format!("t^(-1/{})", 1u64 << j)).collect();
            let q = poly(&format!("x + {}", if b.is_empty() { "0".to_string() } else { b.join(" + ") }));
            let gq = o.nu(&q).unwrap();
            let nq = |f: &Poly<FpElem>| nu_trunc(f, &q, &gq, &o).unwrap().0;
            proptest::prop_assert!(nq(&f) <= o.nu(&f).unwrap());
            if f.deg() < q.deg() {
                proptest::prop_assert_eq!(nq(&f), o.nu(&f).unwrap());
            }
            proptest::prop_assert_eq!(nq(&(&f * &h)), nq(&f) + nq(&h));
            proptest::prop_assert!(nq(&(&f + &h)) >= nq(&f).min(nq(&h)));
        }
    }
}
