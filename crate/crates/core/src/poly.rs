//! Polynomials over the base field, Q-expansions, Hasse derivatives and
//! Taylor expansions about key polynomials.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::coeffs::{binomial, binomial_mod_p, Coeff, PrimeChar};
use crate::error::{Error, Result};
use crate::exact::Rat;
use crate::series::{FiniteSum, Series};

/// Dense polynomial in `x`. Only exact zeros are trimmed from the top, so a
/// lazy leading coefficient counts as nonzero.
#[derive(Clone, Debug)]
pub struct Poly<C: Coeff> {
    coeffs: Vec<Series<C>>,
    p: PrimeChar,
}

impl<C: Coeff> Poly<C> {
    pub fn from_coeffs(mut coeffs: Vec<Series<C>>, p: PrimeChar) -> Self {
        while coeffs.last().is_some_and(Series::is_exact_zero) {
            coeffs.pop();
        }
        Poly { coeffs, p }
    }

    pub fn zero(p: PrimeChar) -> Self {
        Poly { coeffs: Vec::new(), p }
    }

    pub fn one(p: PrimeChar) -> Self {
        Self::constant(Series::one(p))
    }

    pub fn constant(c: Series<C>) -> Self {
        let p = c.prime();
        Self::from_coeffs(vec![c], p)
    }

    /// `x`.
    pub fn x(p: PrimeChar) -> Self {
        Self::monomial(Series::one(p), 1)
    }

    pub fn monomial(c: Series<C>, k: usize) -> Self {
        let p = c.prime();
        let mut coeffs = vec![Series::zero(p); k];
        coeffs.push(c);
        Self::from_coeffs(coeffs, p)
    }

    /// `x - b`.
    pub fn linear(b: &Series<C>) -> Self {
        Self::from_coeffs(vec![-b, Series::one(b.prime())], b.prime())
    }

    pub fn prime(&self) -> PrimeChar {
        self.p
    }

    pub fn coeffs(&self) -> &[Series<C>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Series<C> {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Series::zero(self.p))
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(Series::is_exact_one)
    }

    /// All coefficients are exact finite sums.
    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(|c| c.as_exact().is_some())
    }

    /// The constant term when the polynomial has degree at most 0.
    pub fn as_constant(&self) -> Option<Series<C>> {
        (self.coeffs.len() <= 1).then(|| self.coeff(0))
    }

    /// Structural equality, available only for exact polynomials.
    pub fn exact_eq(&self, o: &Poly<C>) -> Option<bool> {
        if !self.is_exact() || !o.is_exact() {
            return None;
        }
        Some(
            self.coeffs.len() == o.coeffs.len()
                && self.coeffs.iter().zip(&o.coeffs).all(|(a, b)| a.as_exact() == b.as_exact()),
        )
    }

    pub fn scale(&self, c: &Series<C>) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect(), self.p)
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Series::zero(self.p); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs, p: self.p }
    }

    /// `Σ c_i^p x^{ip}`, which is `self^p` in characteristic p.
    fn frobenius(&self) -> Self {
        let p = self.p.get() as usize;
        let mut coeffs = vec![Series::zero(self.p); (self.coeffs.len().max(1) - 1) * p + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * p] = c.pow(p as u32);
        }
        Self::from_coeffs(coeffs, self.p)
    }

    pub fn pow(&self, n: u32) -> Self {
        let p = self.p.get() as u32;
        let (mut acc, mut cur, mut e) = (Self::one(self.p), self.clone(), n);
        while e > 0 {
            let d = if C::CHAR_P { e % p } else { e };
            for _ in 0..d {
                acc = &acc * &cur;
            }
            if !C::CHAR_P {
                break;
            }
            e /= p;
            if e > 0 {
                cur = cur.frobenius();
            }
        }
        acc
    }

    /// Euclidean division by a monic `q` of positive degree.
    pub fn divmod(&self, q: &Poly<C>) -> Result<(Poly<C>, Poly<C>)> {
        let dq = match q.degree() {
            Some(d) if d >= 1 && q.is_monic() => d,
            _ => return Err(Error::NonMonic),
        };
        let mut r = self.coeffs.clone();
        if r.len() <= dq {
            return Ok((Self::zero(self.p), self.clone()));
        }
        let mut quot = vec![Series::zero(self.p); r.len() - dq];
        for i in (dq..r.len()).rev() {
            let c = std::mem::replace(&mut r[i], Series::zero(self.p));
            if c.is_exact_zero() {
                continue;
            }
            for j in 0..dq {
                let qc = &q.coeffs[j];
                if !qc.is_exact_zero() {
                    r[i - dq + j] = &r[i - dq + j] - &(&c * qc);
                }
            }
            quot[i - dq] = c;
        }
        r.truncate(dq);
        Ok((Self::from_coeffs(quot, self.p), Self::from_coeffs(r, self.p)))
    }

    pub fn rem(&self, q: &Poly<C>) -> Result<Poly<C>> {
        Ok(self.divmod(q)?.1)
    }

    /// The expansion `f = Σ a_i Q^i` with `deg a_i < deg Q`.
    pub fn q_expansion(&self, q: &Poly<C>) -> Result<QExpansion<C>> {
        if q.deg() == 1 && q.is_monic() && q.is_exact() {
            return Ok(self.taylor_shift(q));
        }
        let mut coeffs = Vec::new();
        let mut rest = self.clone();
        loop {
            let (quot, r) = rest.divmod(q)?;
            coeffs.push(r);
            if quot.is_zero() {
                break;
            }
            rest = quot;
        }
        while coeffs.len() > 1 && coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        let support = coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(i, _)| i).collect();
        Ok(QExpansion { base: q.clone(), coeffs, support })
    }

    // Q = x - b: a_i = Σ_k C(k, i) f_k b^{k-i}
    fn taylor_shift(&self, q: &Poly<C>) -> QExpansion<C> {
        let b = -&q.coeffs[0];
        let mut pows: Vec<Option<Series<C>>> = vec![None; self.coeffs.len()];
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for i in 0..self.coeffs.len() {
            let mut a = Series::zero(self.p);
            for k in i..self.coeffs.len() {
                let (fk, bin) = (&self.coeffs[k], binom_series::<C>(k, i, self.p));
                if fk.is_exact_zero() || bin.is_exact_zero() {
                    continue;
                }
                let bk = pows[k - i].get_or_insert_with(|| b.pow((k - i) as u32));
                a = &a + &(&bin * &(fk * bk));
            }
            coeffs.push(Poly::constant(a));
        }
        while coeffs.len() > 1 && coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        let support = coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(i, _)| i).collect();
        QExpansion { base: q.clone(), coeffs, support }
    }

    /// Evaluation at an element of the base field: Horner for exact `a`,
    /// otherwise `Σ c_i a^i` so each power keeps its own error bound.
    pub fn eval(&self, a: &Series<C>) -> Series<C> {
        if let Series::Lazy(_) = a {
            let mut acc = Series::zero(self.p);
            for (i, c) in self.coeffs.iter().enumerate() {
                if !c.is_exact_zero() {
                    acc = &acc + &(c * &a.pow(i as u32));
                }
            }
            return acc;
        }
        let mut acc = Series::zero(self.p);
        if C::CHAR_P {
            for (i, c) in self.coeffs.iter().enumerate() {
                if !c.is_exact_zero() {
                    acc = &acc + &(c * &a.pow(i as u32));
                }
            }
            return acc;
        }
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * a) + c;
        }
        acc
    }

    /// `f(g(x))`.
    pub fn compose(&self, g: &Poly<C>) -> Poly<C> {
        let mut acc = Self::zero(self.p);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &Self::constant(c.clone());
        }
        acc
    }

    /// Every coefficient is zero, or a lazy element whose refinements never
    /// certify a finite value within `budget` steps.
    pub fn consistent_with_zero(&self, budget: usize) -> Result<bool> {
        for c in &self.coeffs {
            match c {
                Series::Exact(s) if s.is_zero() => {}
                Series::Exact(_) => return Ok(false),
                Series::Lazy(l) => match l.certified_val(budget) {
                    Ok(_) => return Ok(false),
                    Err(Error::PrecisionExhausted(_)) => {}
                    Err(e) => return Err(e),
                },
            }
        }
        Ok(true)
    }
}

impl<C: Coeff> fmt::Display for Poly<C> {
    /// Parseable text, highest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_exact_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let ct = c.to_string();
            let simple = c.as_exact().is_some_and(|s| s.terms().len() == 1) && !ct.starts_with('-');
            let xs = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            match (i, c.is_exact_one()) {
                (0, _) if simple => write!(f, "{ct}")?,
                (0, _) => write!(f, "({ct})")?,
                (_, true) => write!(f, "{xs}")?,
                _ if simple => write!(f, "{ct}*{xs}")?,
                _ => write!(f, "({ct})*{xs}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<C: Coeff> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, o: &Poly<C>) -> Poly<C> {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect();
        Poly::from_coeffs(coeffs, self.p)
    }
}

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect(), p: self.p }
    }
}

impl<C: Coeff> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, o: &Poly<C>) -> Poly<C> {
        self + &(-o)
    }
}

impl<C: Coeff> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, o: &Poly<C>) -> Poly<C> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(self.p);
        }
        let mut coeffs = vec![Series::zero(self.p); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_exact_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        Poly::from_coeffs(coeffs, self.p)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<C: Coeff> $tr for Poly<C> {
            type Output = Poly<C>;
            fn $m(self, o: Poly<C>) -> Poly<C> {
                (&self).$m(&o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

/// `f = Σ coeffs[i] · base^i`; `support` lists the indices whose coefficient
/// is not exactly zero.
#[derive(Clone, Debug)]
pub struct QExpansion<C: Coeff> {
    pub base: Poly<C>,
    pub coeffs: Vec<Poly<C>>,
    pub support: Vec<usize>,
}

impl<C: Coeff> QExpansion<C> {
    pub fn reconstruct(&self) -> Poly<C> {
        XPoly { coeffs: self.coeffs.clone(), p: self.base.p }.eval(&self.base)
    }

    pub fn coeff(&self, i: usize) -> Poly<C> {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Poly::zero(self.base.p))
    }

    /// The expansion read as a polynomial `L(X)` over `K[x]`.
    pub fn as_xpoly(&self) -> XPoly<C> {
        XPoly { coeffs: self.coeffs.clone(), p: self.base.p }
    }
}

/// A polynomial `L(X) = Σ L_n X^n` with coefficients in `K[x]`.
#[derive(Clone, Debug)]
pub struct XPoly<C: Coeff> {
    pub coeffs: Vec<Poly<C>>,
    pub p: PrimeChar,
}

/// `C(n, k)` in the prime field of the backend (Lucas in characteristic p).
pub fn binom_series<C: Coeff>(n: usize, k: usize, p: PrimeChar) -> Series<C> {
    let c = if C::CHAR_P {
        C::from_int(&binomial_mod_p(n as u64, k as u64, p.get()).into(), p)
    } else {
        C::from_int(&binomial(n as u64, k as u64), p)
    };
    Series::monomial(Rat::zero(), c)
}

impl<C: Coeff> XPoly<C> {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// The `i`-th Hasse derivative with respect to `X`.
    pub fn hasse(&self, i: usize) -> XPoly<C> {
        let coeffs = (i..self.coeffs.len())
            .map(|n| self.coeffs[n].scale(&binom_series::<C>(n, i, self.p)))
            .collect();
        XPoly { coeffs, p: self.p }
    }

    /// `∂_0 L, …, ∂_deg L`.
    pub fn hasse_all(&self) -> Vec<XPoly<C>> {
        (0..self.coeffs.len()).map(|i| self.hasse(i)).collect()
    }

    /// `L(h)` for `h ∈ K[x]`.
    pub fn eval(&self, h: &Poly<C>) -> Poly<C> {
        let mut acc = Poly::zero(self.p);
        if C::CHAR_P {
            for (i, c) in self.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    acc = &acc + &(c * &h.pow(i as u32));
                }
            }
            return acc;
        }
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * h) + c;
        }
        acc
    }
}

/// With `Q = q_rho + h_rho` and `L` the Q-expansion of `f`, returns
/// `[L(h), ∂_1 L(h), …, ∂_D L(h)]`, the coefficients of `f` in powers of
/// `q_rho`. The reconstruction is checked before returning.
pub fn taylor_expand<C: Coeff>(
    f: &Poly<C>,
    q_rho: &Poly<C>,
    h_rho: &Poly<C>,
    budget: usize,
) -> Result<Vec<Poly<C>>> {
    let q = q_rho + h_rho;
    let l = f.q_expansion(&q)?.as_xpoly();
    let terms: Vec<Poly<C>> = l.hasse_all().iter().map(|d| d.eval(h_rho)).collect();
    let back = XPoly { coeffs: terms.clone(), p: f.p }.eval(q_rho);
    if !(&back - f).consistent_with_zero(budget)? {
        return Err(Error::VerificationFailed("Taylor reconstruction mismatch".into()));
    }
    Ok(terms)
}

/// Convenience: a polynomial with exact finite-sum coefficients.
pub fn exact_poly<C: Coeff>(coeffs: Vec<FiniteSum<C>>, p: PrimeChar) -> Poly<C> {
    Poly::from_coeffs(coeffs.into_iter().map(Series::Exact).collect(), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{CycElem, FpElem};
    use crate::series::parse::{parse_poly, parse_series};
    use proptest::prelude::*;

    fn pc(p: u64) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    fn f2(text: &str) -> Poly<FpElem> {
        parse_poly(text, pc(2)).unwrap()
    }

    fn same<C: Coeff>(a: &Poly<C>, b: &Poly<C>) -> bool {
        a.exact_eq(b).expect("exact polynomials")
    }

    #[test]
    fn divmod_examples() {
        let (q, r) = f2("x^2 + t*x + t^3").divmod(&f2("x + t")).unwrap();
        assert!(same(&q, &f2("x")) && same(&r, &f2("t^3")));
        let f = f2("x^3 + t^(-1)*x + 1");
        let (q, r) = f.divmod(&f).unwrap();
        assert!(same(&q, &f2("1")) && r.is_zero());
        let (q, r) = f2("x + t").divmod(&f2("x^2")).unwrap();
        assert!(q.is_zero() && same(&r, &f2("x + t")));
        assert!(f2("x").divmod(&f2("t*x + 1")).is_err());
    }

    #[test]
    fn q_expansion_examples() {
        let e = f2("x^2 + t*x + t^3").q_expansion(&f2("x + t")).unwrap();
        assert_eq!(e.support, vec![0, 1, 2]);
        for (i, want) in ["t^3", "t", "1"].iter().enumerate() {
            assert!(same(&e.coeff(i), &f2(want)));
        }
        let e = f2("x^2 + x + t^(-1)").q_expansion(&f2("x + t^(-1/2)")).unwrap();
        for (i, want) in ["t^(-1/2)", "1", "1"].iter().enumerate() {
            assert!(same(&e.coeff(i), &f2(want)));
        }
        let e = f2("t*x + 1").q_expansion(&f2("x^2 + 1")).unwrap();
        assert_eq!(e.support, vec![0]);
    }

    fn xpoly(cs: &[&str]) -> XPoly<FpElem> {
        XPoly { coeffs: cs.iter().map(|c| f2(c)).collect(), p: pc(2) }
    }

    #[test]
    fn hasse_examples() {
        let l = xpoly(&["t", "1", "1"]);
        let d1 = l.hasse(1);
        assert!(same(&d1.coeffs[0], &f2("1")) && d1.coeffs[1].is_zero());
        let d2 = xpoly(&["0", "0", "1"]).hasse(2);
        assert!(same(&d2.coeffs[0], &f2("1")));
        let d0 = l.hasse(0);
        assert!(d0.coeffs.iter().zip(&l.coeffs).all(|(a, b)| same(a, b)));
    }

    #[test]
    fn taylor_examples() {
        let b = f2("t^(-1/2)");
        let terms = taylor_expand(&f2("x^2 + x + t^(-1)"), &f2("x + t^(-1/2)"), &b, 8).unwrap();
        let want = ["t^(-1/2)", "1", "1"];
        assert!(terms.iter().zip(want).all(|(a, w)| same(a, &f2(w))));
        let (q_rho, h) = (f2("x + t"), f2("t^2 + 1"));
        let q = &q_rho + &h;
        let terms = taylor_expand(&q, &q_rho, &h, 8).unwrap();
        assert!(same(&terms[0], &h) && same(&terms[1], &f2("1")));
        let terms = taylor_expand(&q.pow(2), &q_rho, &h, 8).unwrap();
        assert!(same(&terms[0], &h.pow(2)) && terms[1].is_zero() && same(&terms[2], &f2("1")));
    }

    #[test]
    fn eval_examples() {
        let g = f2("x^2 + x + t^(-1)");
        let b = parse_series::<FpElem>("t^(-1/2)", pc(2)).unwrap();
        assert_eq!(g.eval(&b).as_exact(), parse_series("t^(-1/2)", pc(2)).unwrap().as_exact());
        assert_eq!(f2("x").eval(&b).as_exact(), b.as_exact());
        assert_eq!(g.eval(&Series::zero(pc(2))).as_exact(), parse_series("t^(-1)", pc(2)).unwrap().as_exact());
    }

    #[test]
    fn mixed_char_taylor_shift_matches_division() {
        let p = pc(3);
        let f: Poly<CycElem> = parse_poly("x^3 - 3*x + p^(1/2)", p).unwrap();
        let q: Poly<CycElem> = parse_poly("x + 1 - z", p).unwrap();
        let e = f.q_expansion(&q).unwrap();
        assert!((&e.reconstruct() - &f).is_zero());
    }

    fn sum(p: u64) -> impl Strategy<Value = FiniteSum<FpElem>> {
        proptest::collection::vec((-4i64..4, 1i64..3, 1i64..p as i64), 0..3).prop_map(move |v| {
            let p = pc(p);
            FiniteSum::from_terms(v.into_iter().map(|(n, d, c)| (Rat::frac(n, d), FpElem::new(c, p))).collect(), p)
        })
    }

    fn poly(p: u64, max_deg: usize) -> impl Strategy<Value = Poly<FpElem>> {
        proptest::collection::vec(sum(p), 0..=max_deg + 1).prop_map(move |cs| exact_poly(cs, pc(p)))
    }

    fn monic(p: u64, max_deg: usize) -> impl Strategy<Value = Poly<FpElem>> {
        poly(p, max_deg.saturating_sub(1)).prop_flat_map(move |low| {
            (1..=max_deg).prop_map(move |d| {
                let low = if low.coeffs().len() > d { Poly::from_coeffs(low.coeffs()[..d].to_vec(), pc(p)) } else { low.clone() };
                &low + &Poly::monomial(Series::one(pc(p)), d)
            })
        })
    }

    fn xpoly_in(p: u64) -> impl Strategy<Value = XPoly<FpElem>> {
        proptest::collection::vec(poly(p, 1), 1..5).prop_map(move |coeffs| XPoly { coeffs, p: pc(p) })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn q_expansion_round_trip(f in poly(3, 5), q in monic(3, 2)) {
            let e = f.q_expansion(&q).unwrap();
            prop_assert!(same(&e.reconstruct(), &f));
            prop_assert!(e.coeffs.iter().all(|c| c.is_zero() || c.deg() < q.deg()));
        }

        #[test]
        fn taylor_identity(l in xpoly_in(2), a in poly(2, 1), b in poly(2, 1)) {
            let diff = &b - &a;
            let mut rhs = l.eval(&a);
            for i in 1..l.coeffs.len() {
                rhs = &rhs + &(&l.hasse(i).eval(&a) * &diff.pow(i as u32));
            }
            prop_assert!(same(&l.eval(&b), &rhs));
        }

        #[test]
        fn hasse_composition(l in xpoly_in(3), i in 0usize..3, j in 0usize..3) {
            let lhs = l.hasse(j).hasse(i);
            let c = binom_series::<FpElem>(i + j, i, pc(3));
            let rhs = l.hasse(i + j);
            for k in 0..lhs.coeffs.len().max(rhs.coeffs.len()) {
                let a = lhs.coeffs.get(k).cloned().unwrap_or_else(|| Poly::zero(pc(3)));
                let b = rhs.coeffs.get(k).map(|r| r.scale(&c)).unwrap_or_else(|| Poly::zero(pc(3)));
                prop_assert!((&a - &b).is_zero());
            }
        }

        #[test]
        fn frobenius_is_additive(f in poly(3, 3), g in poly(3, 3)) {
            prop_assert!(same(&(&f + &g).pow(3), &(&f.pow(3) + &g.pow(3))));
            prop_assert!(same(&f.pow(3), &(&(&f * &f) * &f)));
        }
    }
}
