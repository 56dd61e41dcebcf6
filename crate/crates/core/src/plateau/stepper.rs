//! Approximant generators for degree-p extensions: the Artin-Schreier
//! leading-term stepper and a Newton-Puiseux stepper on `g(b + X)`.

use std::sync::{Arc, Mutex};

use crate::coeffs::Coeff;
use crate::error::{Error, Result};
use crate::exact::{Rat, Val};
use crate::poly::Poly;
use crate::series::{Approx, FiniteSum, LazyElem, Series, DEFAULT_BUDGET};
use crate::valuation::{nu_xb_via_g, Case};

/// Output of a stepper run: approximants `b_0..b_R`, the values
/// `e_k = v(g(b_k))` and `γ_k = ν(x - b_k) = e_k/p`.
#[derive(Clone, Debug)]
pub struct StepperRun<C: Coeff> {
    pub bs: Vec<FiniteSum<C>>,
    pub residual_vals: Vec<Val>,
    pub gammas: Vec<Val>,
    /// Accumulation point of `e_k`, when the pattern was recognised.
    pub residual_limit: Option<Rat>,
    /// `e_k = power · γ_k`.
    pub power: u64,
}

impl<C: Coeff> StepperRun<C> {
    /// `sup γ_k`, from the recognised pattern.
    pub fn sup_hint(&self) -> Option<Val> {
        self.residual_limit.as_ref().map(|l| Val::Fin(l / &Rat::int(self.power as i64)))
    }
}

/// Recognises `e_{k+1} - L = (e_k - L)/q` on the last three values and
/// returns `L`.
pub fn detect_limit(vals: &[Val], q: u64) -> Option<Rat> {
    if vals.len() < 3 {
        return None;
    }
    let tail: Vec<&Rat> = vals[vals.len() - 3..].iter().map(Val::finite).collect::<Option<_>>()?;
    let pr = Rat::int(q as i64);
    let den = Rat::int(q as i64 - 1);
    let lim = |a: &Rat, b: &Rat| &(&(&pr * b) - a) / &den;
    let (l1, l2) = (lim(tail[0], tail[1]), lim(tail[1], tail[2]));
    (l1 == l2 && tail[0] < tail[1] && tail[1] < tail[2] && *tail[2] < l1).then_some(l1)
}

// Incremental state of the Artin-Schreier stepper for x^q - x = a. The
// residual is a - (b^q - b), split into the (possibly lazy) `a` and an exact
// correction so that lazy nesting stays shallow.
struct AsState<C: Coeff> {
    a: Series<C>,
    correction: FiniteSum<C>,
    bs: Vec<FiniteSum<C>>,
    vals: Vec<Val>,
    lead: Option<(Rat, C)>,
    power: u64,
    budget: usize,
}

impl<C: Coeff> AsState<C> {
    fn new(a: &Series<C>, power: u64, budget: usize) -> Result<Self> {
        if !C::CHAR_P {
            return Err(Error::Backend("the Artin-Schreier stepper needs equal characteristic".into()));
        }
        let p = a.prime();
        if p.log_exact(power).is_none_or(|e| e == 0) {
            return Err(Error::Config(format!("stepper power {power} is not a positive power of {p}")));
        }
        let mut st = AsState {
            a: a.clone(),
            correction: FiniteSum::zero(p),
            bs: vec![FiniteSum::zero(p)],
            vals: Vec::new(),
            lead: None,
            power,
            budget,
        };
        st.measure()?;
        Ok(st)
    }

    fn measure(&mut self) -> Result<()> {
        let k = self.bs.len() - 1;
        let residual = &self.a + &Series::Exact(self.correction.clone());
        let Some((v, q, c)) = residual.leading_with(self.budget)? else {
            return Err(Error::RootFound(k));
        };
        if v > Val::zero() {
            return Err(Error::NotDefect(format!("residual of positive value {v} at step {k}: root in K")));
        }
        if v == Val::zero() {
            // z^q - z = c_0 has no solution in F_p for c_0 != 0
            return Err(Error::ResidueUnsolvable(k));
        }
        self.vals.push(v);
        self.lead = Some((q, c));
        Ok(())
    }

    fn step(&mut self) -> Result<()> {
        let (q, c) = self.lead.clone().expect("measured");
        let root = c.residue_pth_root().ok_or(Error::ResidueUnsolvable(self.bs.len() - 1))?;
        let s = FiniteSum::monomial(&q / &Rat::int(self.power as i64), root);
        let b = self.bs.last().unwrap() + &s;
        self.correction = &(&self.correction - &s.pow(self.power as u32)) + &s;
        self.bs.push(b);
        self.measure()
    }

    fn extend_to(&mut self, k: usize) -> Result<()> {
        while self.bs.len() <= k {
            self.step()?;
        }
        Ok(())
    }

    fn gamma(&self, k: usize) -> Val {
        self.vals[k].div_int(self.power)
    }
}

/// Runs the stepper for `x^q - x = a` (`q` a power of p) for `steps` steps
/// (members `0..=steps`, with `b_0 = 0`). Each step adds `s = c^{1/q} t^{v/q}`
/// for the leading term `c t^v` of the residual.
pub fn as_root_stepper<C: Coeff>(a: &Series<C>, power: u64, steps: usize, budget: usize) -> Result<StepperRun<C>> {
    let mut st = AsState::new(a, power, budget)?;
    st.extend_to(steps)?;
    let gammas = (0..=steps).map(|k| st.gamma(k)).collect();
    Ok(StepperRun {
        residual_limit: detect_limit(&st.vals, power),
        power,
        bs: st.bs,
        residual_vals: st.vals,
        gammas,
    })
}

/// The root of `x^p - x = a` as a lazy element: step `N` is `b_{N+1}` with
/// error `γ_{N+1}`.
pub fn as_root_lazy<C: Coeff>(a: &Series<C>) -> Result<LazyElem<C>> {
    let mut st = AsState::new(a, a.prime().get(), DEFAULT_BUDGET)?;
    // a few steps to recognise the supremum, if the pattern is regular
    let hint = match st.extend_to(4) {
        Ok(()) => detect_limit(&st.vals, a.prime().get()).map(|l| Val::Fin(&l / &Rat::int(a.prime().as_i64()))),
        Err(_) => None,
    };
    let p = a.prime();
    let state = Arc::new(Mutex::new(st));
    Ok(LazyElem::new(p, format!("as_root({a})"), hint, move |n| {
        let mut st = state.lock().unwrap();
        st.extend_to(n + 1)?;
        Ok(Approx { approx: st.bs[n + 1].clone(), error: st.gamma(n + 1) })
    }))
}

/// Newton-Puiseux stepper for a monic degree-p `g` from `b0`. The edge of
/// the Newton polygon of `g(b + X)` from `(0, v(g(b)))` to `(p, 0)` must
/// carry no other point; the step solves `s^p = -lead(g(b))` at the
/// residue level. Members are `0..=steps`.
pub fn newton_stepper<C: Coeff>(
    g: &Poly<C>,
    case: Case,
    b0: &FiniteSum<C>,
    steps: usize,
    budget: usize,
) -> Result<StepperRun<C>> {
    let p = g.prime();
    if g.deg() as u64 != p.get() || !g.is_monic() {
        return Err(Error::ShortcutUnsupported(format!("g = {g} is not monic of degree p")));
    }
    let pr = Rat::int(p.as_i64());
    let mut bs = vec![b0.clone()];
    let mut vals = Vec::new();
    let mut gammas: Vec<Val> = Vec::new();
    for k in 0..=steps {
        let b = Series::Exact(bs[k].clone());
        let gb = g.eval(&b);
        if gb.is_exact_zero() {
            return Err(Error::RootFound(k));
        }
        let gamma = nu_xb_via_g(&b, g, case, budget)?;
        if let Some(prev) = gammas.last() {
            if gamma <= *prev {
                return Err(Error::Stalled { step: k, value: gamma.to_string() });
            }
        }
        let (v, q, c) = gb.leading_with(budget)?.ok_or(Error::RootFound(k))?;
        vals.push(v.clone());
        gammas.push(gamma);
        if k == steps {
            break;
        }
        // the points (i, v(∂_i g(b))) for 0 < i < p must lie strictly above the edge
        let Val::Fin(v0) = &v else { unreachable!() };
        let shifted = g.q_expansion(&Poly::linear(&b))?;
        for i in 1..p.get() as usize {
            let vi = shifted.coeff(i).coeff(0).val_with(budget)?;
            let edge = v0 * &Rat::frac(p.as_i64() - i as i64, p.as_i64());
            if vi <= Val::Fin(edge) {
                return Err(Error::ResidueUnsolvable(k));
            }
        }
        let root = (-c).residue_pth_root().ok_or(Error::ResidueUnsolvable(k))?;
        let s = FiniteSum::monomial(&q / &pr, root);
        bs.push(&bs[k] + &s);
    }
    Ok(StepperRun { residual_limit: detect_limit(&vals, p.get()), power: p.get(), bs, residual_vals: vals, gammas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{CycElem, FpElem, PrimeChar};
    use crate::series::parse::{parse_poly, parse_series};

    fn pc(p: u64) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    #[test]
    fn independent_p2() {
        let a = parse_series::<FpElem>("t^(-1)", pc(2)).unwrap();
        let run = as_root_stepper(&a, 2, 6, 64).unwrap();
        assert_eq!(run.bs[1].to_string(), "t^(-1/2)");
        assert_eq!(run.bs[2].to_string(), "t^(-1/2) + t^(-1/4)");
        for (k, g) in run.gammas.iter().enumerate() {
            assert_eq!(*g, Val::frac(-1, 2i64.pow(k as u32 + 1)));
        }
        assert_eq!(run.sup_hint(), Some(Val::zero()));
    }

    #[test]
    fn independent_p3() {
        let a = parse_series::<FpElem>("t^(-1)", pc(3)).unwrap();
        let run = as_root_stepper(&a, 3, 3, 64).unwrap();
        assert_eq!(run.bs[1].to_string(), "t^(-1/3)");
        assert_eq!(run.gammas[1], Val::frac(-1, 9));
    }

    #[test]
    fn residual_extension_is_rejected() {
        let a = parse_series::<FpElem>("1", pc(2)).unwrap();
        assert_eq!(as_root_stepper(&a, 2, 3, 64).unwrap_err(), Error::ResidueUnsolvable(0));
    }

    #[test]
    fn positive_value_is_not_defect() {
        let a = parse_series::<FpElem>("t", pc(2)).unwrap();
        assert!(matches!(as_root_stepper(&a, 2, 3, 64), Err(Error::NotDefect(_))));
    }

    #[test]
    fn lazy_root_truncation() {
        let eta = as_root_lazy(&parse_series::<FpElem>("t^(-1)", pc(2)).unwrap()).unwrap();
        assert_eq!(eta.sup_hint(), Some(&Val::zero()));
        let eta = Series::Lazy(eta);
        assert_eq!(eta.val().unwrap(), Val::frac(-1, 2));
        for (c, expect) in [((-1, 3), -4i64), ((-1, 5), -8), ((-1, 9), -16), ((-1, 17), -32)] {
            let c = Rat::frac(c.0, c.1);
            let tr = eta.truncate(&c, 64).unwrap();
            let rest = (&eta - &Series::Exact(tr)).val().unwrap();
            assert_eq!(rest, Val::frac(1, expect));
            assert!(rest >= Val::Fin(c));
        }
    }

    #[test]
    fn lazy_root_plus_exact() {
        let eta = Series::Lazy(as_root_lazy(&parse_series::<FpElem>("t^(-1)", pc(2)).unwrap()).unwrap());
        let s = &eta + &parse_series("t^(-1/2)", pc(2)).unwrap();
        assert_eq!(s.approx(1).unwrap().approx.to_string(), "t^(-1/4)");
        assert_eq!(s.val().unwrap(), Val::frac(-1, 4));
    }

    #[test]
    fn pattern_detection() {
        let v = |xs: &[(i64, i64)]| xs.iter().map(|&(n, d)| Val::frac(n, d)).collect::<Vec<_>>();
        assert_eq!(detect_limit(&v(&[(-1, 2), (-1, 4), (-1, 8)]), 2), Some(Rat::zero()));
        assert_eq!(detect_limit(&v(&[(-5, 2), (-9, 4), (-17, 8)]), 2), Some(Rat::int(-2)));
        assert_eq!(detect_limit(&v(&[(-1, 2), (-1, 3), (-1, 8)]), 2), None);
        assert_eq!(detect_limit(&v(&[(-1, 2), (-1, 4)]), 2), None);
    }

    #[test]
    fn newton_kummer_p2() {
        let p = pc(2);
        let g = parse_poly::<CycElem>("x^2 - square(1 + geom(1, 2, 1))", p).unwrap();
        let run = newton_stepper(&g, Case::Kummer, &FiniteSum::one(p), 6, 64).unwrap();
        for (k, gamma) in run.gammas.iter().enumerate() {
            let d = 2i64.pow(k as u32 + 1);
            assert_eq!(*gamma, Val::frac(d - 1, d), "k = {k}");
        }
        assert_eq!(run.bs[2].to_string(), "1 + p^(1/2) + p^(3/4)");
        assert_eq!(run.sup_hint(), Some(Val::frac(1, 1)));
    }

    #[test]
    fn newton_exact_root_halts() {
        let p = pc(2);
        let g = parse_poly::<CycElem>("x^2 - 4", p).unwrap();
        let b0 = parse_series::<CycElem>("2", p).unwrap().as_exact().unwrap().clone();
        assert_eq!(newton_stepper(&g, Case::Kummer, &b0, 3, 64).unwrap_err(), Error::RootFound(0));
    }

    #[test]
    fn newton_matches_as_stepper_in_equal_char() {
        let p = pc(3);
        let g = parse_poly::<FpElem>("x^3 - x - t^(-1)", p).unwrap();
        let a = parse_series("t^(-1)", p).unwrap();
        let n = newton_stepper(&g, Case::ArtinSchreier, &FiniteSum::zero(p), 5, 64).unwrap();
        let s = as_root_stepper(&a, 3, 5, 64).unwrap();
        assert_eq!(n.gammas, s.gammas);
        assert_eq!(n.bs, s.bs);
    }
}
