use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::coeffs::{binomial, Coeff, PrimeChar};
use crate::error::{Error, Result};
use crate::exact::{Rat, Val};

use super::{FiniteSum, Series};

/// One refinement of a lazy element: `v(exact - approx) >= error`.
#[derive(Clone, Debug)]
pub struct Approx<C> {
    pub approx: FiniteSum<C>,
    pub error: Val,
}

pub type GenFn<C> = dyn Fn(usize) -> Result<Approx<C>> + Send + Sync;

/// An element known through a pure generator `N ↦ (approx_N, error_N)` with
/// `error_N` strictly increasing. Outputs are memoised per `N`.
#[derive(Clone)]
pub struct LazyElem<C> {
    gen: Arc<GenFn<C>>,
    memo: Arc<Mutex<HashMap<usize, Approx<C>>>>,
    sup_hint: Option<Val>,
    label: Arc<str>,
    p: PrimeChar,
}

impl<C> fmt::Debug for LazyElem<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyElem").field("label", &self.label).field("sup_hint", &self.sup_hint).finish()
    }
}

impl<C: Coeff> LazyElem<C> {
    pub fn new(
        p: PrimeChar,
        label: impl Into<String>,
        sup_hint: Option<Val>,
        gen: impl Fn(usize) -> Result<Approx<C>> + Send + Sync + 'static,
    ) -> Self {
        LazyElem {
            gen: Arc::new(gen),
            memo: Arc::default(),
            sup_hint,
            label: short(label.into()).into(),
            p,
        }
    }

    pub fn prime(&self) -> PrimeChar {
        self.p
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sup_hint(&self) -> Option<&Val> {
        self.sup_hint.as_ref()
    }

    pub fn with_sup_hint(mut self, hint: Option<Val>) -> Self {
        self.sup_hint = hint;
        self
    }

    pub fn approx(&self, n: usize) -> Result<Approx<C>> {
        if let Some(a) = self.memo.lock().unwrap().get(&n) {
            return Ok(a.clone());
        }
        let a = (self.gen)(n)?;
        self.memo.lock().unwrap().insert(n, a.clone());
        Ok(a)
    }

    /// The valuation, certified once the approximation's value sits strictly
    /// below its error bound.
    pub fn certified_val(&self, budget: usize) -> Result<Val> {
        for n in 0..=budget {
            let a = self.approx(n)?;
            let m = a.approx.val()?;
            if m < a.error {
                return Ok(m);
            }
        }
        Err(Error::PrecisionExhausted(budget))
    }

    /// Clones of one element (not merely equal values).
    pub fn same_as(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.gen, &o.gen)
    }

    pub fn neg(&self) -> Self {
        let this = self.clone();
        LazyElem::new(self.p, format!("-({})", self.label), self.sup_hint.clone(), move |n| {
            let a = this.approx(n)?;
            Ok(Approx { approx: -&a.approx, error: a.error })
        })
    }

    /// Squaring with the sharper bound `min(v(2A) + e, 2e)`, since
    /// `(A + E)^2 - A^2 = 2AE + E^2`.
    pub fn square(&self) -> Self {
        let this = self.clone();
        let p = self.p;
        LazyElem::new(p, format!("square({})", self.label), None, move |n| {
            let a = this.approx(n)?;
            let two = FiniteSum::from_int(2, p);
            let cross = (&two * &a.approx).val_lb() + a.error.clone();
            let err = cross.min(a.error.scale(2)?);
            let sq = &a.approx * &a.approx;
            Ok(Approx { approx: truncate_val(&sq, &err), error: err })
        })
    }
}

/// `A^n` with the bound `min_i v(C(n,i)) + (n-i)·v(A) + i·e` over the
/// nonzero binomials, from `(A + E)^n - A^n = Σ_{i≥1} C(n,i) A^{n-i} E^i`.
pub(super) fn pow<C: Coeff>(a: &LazyElem<C>, n: u32) -> LazyElem<C> {
    let this = a.clone();
    let p = a.p;
    let binoms: Vec<(i64, Val)> = (1..=n as u64)
        .map(|i| (i as i64, C::from_rat(&Rat::int(binomial(n as u64, i)), p).map_or(Val::Inf, |c| c.val())))
        .filter(|(_, v)| !v.is_inf())
        .collect();
    LazyElem::new(p, format!("({})^{n}", a.label), None, move |k| {
        let x = this.approx(k)?;
        let vlb = x.approx.val_lb();
        let mut err = Val::Inf;
        for (i, vb) in &binoms {
            let rest = if *i == n as i64 { Val::zero() } else { vlb.scale(n as i64 - i)? };
            err = err.min(vb + &(&rest + &x.error.scale(*i)?));
        }
        let pw = x.approx.pow(n);
        Ok(Approx { approx: truncate_val(&pw, &err), error: err })
    })
}

fn short(mut s: String) -> String {
    if s.len() > 160 {
        let mut cut = 150;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        s.truncate(cut);
        s.push_str("...");
    }
    s
}

// Dropping terms at or above the error bound keeps sizes in check without
// weakening the certificate.
fn truncate_val<C: Coeff>(s: &FiniteSum<C>, err: &Val) -> FiniteSum<C> {
    match err {
        Val::Fin(c) => s.truncate(c),
        Val::Inf => s.clone(),
    }
}

/// Views any element as lazy (exact ones have infinite error at every `N`).
pub fn as_lazy<C: Coeff>(s: &Series<C>) -> LazyElem<C> {
    match s {
        Series::Lazy(l) => l.clone(),
        Series::Exact(e) => {
            let e = e.clone();
            LazyElem::new(e.prime(), e.to_string(), Some(Val::Inf), move |_| {
                Ok(Approx { approx: e.clone(), error: Val::Inf })
            })
        }
    }
}

pub(super) fn add<C: Coeff>(a: &Series<C>, b: &Series<C>) -> LazyElem<C> {
    let hint = match (a.sup_hint(), b.sup_hint()) {
        (Some(x), Some(y)) => Some(x.min(y)),
        _ => None,
    };
    let (a, b) = (a.clone(), b.clone());
    LazyElem::new(a.prime(), format!("({a} + {b})"), hint, move |n| {
        let (x, y) = (a.approx(n)?, b.approx(n)?);
        Ok(Approx { approx: &x.approx + &y.approx, error: x.error.min(y.error) })
    })
}

pub(super) fn mul<C: Coeff>(a: &Series<C>, b: &Series<C>) -> LazyElem<C> {
    let (a, b) = (a.clone(), b.clone());
    LazyElem::new(a.prime(), format!("({a})*({b})"), None, move |n| {
        let (x, y) = (a.approx(n)?, b.approx(n)?);
        let err = (x.approx.val_lb() + y.error.clone())
            .min(y.approx.val_lb() + x.error.clone())
            .min(x.error + y.error);
        let prod = &x.approx * &y.approx;
        Ok(Approx { approx: truncate_val(&prod, &err), error: err })
    })
}

/// `Σ_{k >= start} m^{offset - 1/ratio^k}`; step `N` holds the terms
/// `k = start..=start+N`.
pub fn geom<C: Coeff>(offset: Rat, ratio: u64, start: u32, p: PrimeChar) -> Result<LazyElem<C>> {
    if ratio < 2 {
        return Err(Error::Config(format!("geom ratio must be at least 2, got {ratio}")));
    }
    let r = Rat::int(ratio as i64);
    let label = format!("geom({offset:?}, {ratio}, {start})");
    let offset_val = Val::Fin(offset.clone());
    let exp = move |k: u32| -> Rat { &offset - &r.pow(-(k as i32)) };
    Ok(LazyElem::new(p, label, Some(offset_val), move |n| {
        let hi = start + n as u32;
        let terms = (start..=hi).map(|k| (exp(k), C::one(p))).collect();
        Ok(Approx { approx: FiniteSum::from_terms(terms, p), error: Val::Fin(exp(hi + 1)) })
    }))
}
