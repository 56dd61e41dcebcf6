//! Exact rationals, the value set Γ ∪ {∞}, and rank-one cuts.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number in lowest terms with positive denominator.
///
/// Values whose numerator and denominator fit in `i64` are stored inline;
/// the representation is canonical, so equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rat(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64, i64),
    Big(BigRational),
}

impl Default for Rat {
    fn default() -> Rat {
        Rat::zero()
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rat {
    fn from_big(r: BigRational) -> Rat {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(r)),
        }
    }

    /// `n/d` from wide integers, `d != 0`.
    fn wide(n: i128, d: i128) -> Rat {
        let g = gcd_u128(n.unsigned_abs(), d.unsigned_abs()) as i128;
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            (n, d) = (-n, -d);
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(BigRational::new(n.into(), d.into()))),
        }
    }

    fn big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw((*n).into(), (*d).into()),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Rat> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::Arithmetic("zero denominator".into()));
        }
        Ok(Rat::from_big(BigRational::new(num.into(), den)))
    }

    /// `num/den`; panics on a zero denominator. Meant for literals.
    pub fn frac(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat::wide(num.into(), den.into())
    }

    pub fn int(n: impl Into<BigInt>) -> Rat {
        Rat::from_big(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Rat {
        Rat(Repr::Small(0, 1))
    }

    pub fn one() -> Rat {
        Rat(Repr::Small(1, 1))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => (*n).into(),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => (*d).into(),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn floor(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => n.div_euclid(*d).into(),
            Repr::Big(r) => r.floor().to_integer(),
        }
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => Rat(Repr::Small(n.rem_euclid(*d), *d)),
            Repr::Big(r) => Rat::from_big(r - r.floor()),
        }
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Rat> {
        if self.is_zero() {
            return Err(Error::Arithmetic("reciprocal of zero".into()));
        }
        Ok(match &self.0 {
            Repr::Small(n, d) => Rat::wide((*d).into(), (*n).into()),
            Repr::Big(r) => Rat::from_big(r.recip()),
        })
    }

    pub fn pow(&self, e: i32) -> Rat {
        Rat::from_big(num_traits::Pow::pow(&self.big(), e))
    }

    /// Exponent of `p` in this rational (`None` for zero).
    pub fn padic_val(&self, p: u64) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(int_padic_val(&self.numer(), p) as i64 - int_padic_val(&self.denom(), p) as i64)
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl Ord for Rat {
    fn cmp(&self, o: &Rat) -> Ordering {
        match (&self.0, &o.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.big().cmp(&o.big()),
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, o: &Rat) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

pub(crate) fn int_padic_val(n: &BigInt, p: u64) -> u64 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0;
    while !n.is_zero() {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        n = q;
        k += 1;
    }
    k
}

impl fmt::Display for Rat {
    /// Always `num/den`, including integers (`3/1`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rat> {
        let bad = || Error::Parse { pos: 0, msg: format!("invalid rational `{s}`") };
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if !d.is_positive() {
                    return Err(bad());
                }
                Rat::new(n, d)
            }
            None => Ok(Rat::int(s.parse::<BigInt>().map_err(|_| bad())?)),
        }
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::int(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Rat {
        Rat::int(n)
    }
}

fn add_rat(a: &Rat, b: &Rat) -> Rat {
    if let (Repr::Small(n1, d1), Repr::Small(n2, d2)) = (&a.0, &b.0) {
        let (n1, d1, n2, d2) = (*n1 as i128, *d1 as i128, *n2 as i128, *d2 as i128);
        if d1 == d2 {
            return Rat::wide(n1 + n2, d1);
        }
        if let Some(n) = (n1 * d2).checked_add(n2 * d1) {
            if let Some(d) = d1.checked_mul(d2) {
                return Rat::wide(n, d);
            }
        }
    }
    Rat::from_big(a.big() + b.big())
}

fn mul_rat(a: &Rat, b: &Rat) -> Rat {
    if let (Repr::Small(n1, d1), Repr::Small(n2, d2)) = (&a.0, &b.0) {
        return Rat::wide(*n1 as i128 * *n2 as i128, *d1 as i128 * *d2 as i128);
    }
    Rat::from_big(a.big() * b.big())
}

impl Add<&Rat> for &Rat {
    type Output = Rat;
    fn add(self, o: &Rat) -> Rat {
        add_rat(self, o)
    }
}

impl Sub<&Rat> for &Rat {
    type Output = Rat;
    fn sub(self, o: &Rat) -> Rat {
        add_rat(self, &-o)
    }
}

impl Mul<&Rat> for &Rat {
    type Output = Rat;
    fn mul(self, o: &Rat) -> Rat {
        mul_rat(self, o)
    }
}

macro_rules! rat_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                (&self).$m(&o)
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                (&self).$m(o)
            }
        }
    };
}
rat_owned!(Add, add);
rat_owned!(Sub, sub);
rat_owned!(Mul, mul);

impl Div<&Rat> for &Rat {
    type Output = Rat;
    /// Panics on division by zero, like the integer types.
    fn div(self, o: &Rat) -> Rat {
        self * &o.recip().expect("rational division by zero")
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) if *n != i64::MIN => Rat(Repr::Small(-n, *d)),
            _ => Rat::from_big(-self.big()),
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An element of Γ ∪ {∞}. `Inf` is the maximum of the total order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Val {
    Fin(Rat),
    Inf,
}

impl Val {
    pub fn fin(r: Rat) -> Val {
        Val::Fin(r)
    }

    pub fn frac(n: i64, d: i64) -> Val {
        Val::Fin(Rat::frac(n, d))
    }

    pub fn zero() -> Val {
        Val::Fin(Rat::zero())
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Val::Inf)
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Val::Fin(r) => Some(r),
            Val::Inf => None,
        }
    }

    /// `n · a`. `0 · ∞` is undefined and rejected.
    pub fn scale(&self, n: i64) -> Result<Val> {
        match self {
            Val::Fin(r) => Ok(Val::Fin(r * &Rat::int(n))),
            Val::Inf if n >= 1 => Ok(Val::Inf),
            Val::Inf => Err(Error::Arithmetic(format!("{n} · ∞ is undefined"))),
        }
    }

    /// Exact division by a positive integer (∞ stays ∞).
    pub fn div_int(&self, n: u64) -> Val {
        match self {
            Val::Fin(r) => Val::Fin(r / &Rat::int(n)),
            Val::Inf => Val::Inf,
        }
    }
}

impl Add for Val {
    type Output = Val;
    fn add(self, o: Val) -> Val {
        match (self, o) {
            (Val::Fin(a), Val::Fin(b)) => Val::Fin(a + b),
            _ => Val::Inf,
        }
    }
}

impl Add<&Val> for &Val {
    type Output = Val;
    fn add(self, o: &Val) -> Val {
        match (self, o) {
            (Val::Fin(a), Val::Fin(b)) => Val::Fin(a + b),
            _ => Val::Inf,
        }
    }
}

impl From<Rat> for Val {
    fn from(r: Rat) -> Val {
        Val::Fin(r)
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(r) => write!(f, "{r}"),
            Val::Inf => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(r) => write!(f, "{r:?}"),
            Val::Inf => f.write_str("∞"),
        }
    }
}

impl FromStr for Val {
    type Err = Error;
    fn from_str(s: &str) -> Result<Val> {
        if s.trim() == "inf" {
            Ok(Val::Inf)
        } else {
            Ok(Val::Fin(s.parse()?))
        }
    }
}

impl Serialize for Val {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Val {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Val, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn val_add(a: &Val, b: &Val) -> Val {
    a + b
}

pub fn val_scale(n: i64, a: &Val) -> Result<Val> {
    a.scale(n)
}

/// A principal cut of a rank-one value group.
///
/// `(γ, false)` is γ⁻ (lower set `{x < γ}`), `(γ, true)` is γ̄ (lower set
/// `{x ≤ γ}`), and `(∞, false)` is ∞⁻.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Cut {
    pub bound: Val,
    pub attained: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CutSide {
    Below,
    InsideLowerSet,
}

impl Cut {
    pub fn minus(bound: Val) -> Cut {
        Cut { bound, attained: false }
    }

    pub fn closed(bound: Val) -> Cut {
        Cut { bound, attained: true }
    }

    /// Which side of the cut `v` falls on. "Below" here means the value is
    /// not in the lower cut set, following the naming of the operation.
    pub fn compare(&self, v: &Val) -> CutSide {
        match v.cmp(&self.bound) {
            Ordering::Less => CutSide::InsideLowerSet,
            Ordering::Equal if self.attained => CutSide::InsideLowerSet,
            _ => CutSide::Below,
        }
    }
}

pub fn cut_compare(c: &Cut, v: &Val) -> CutSide {
    c.compare(v)
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.attained {
            write!(f, "closed({})", self.bound)
        } else {
            write!(f, "{}^-", self.bound)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rat {
        Rat::frac(n, d)
    }

    #[test]
    fn val_add_examples() {
        assert_eq!(Val::frac(-1, 2) + Val::frac(-1, 2), Val::frac(-1, 1));
        assert_eq!(Val::frac(3, 4) + Val::Inf, Val::Inf);
        let a = Val::Fin(q(-1, 1) - q(1, 4));
        assert_eq!(a.clone() + a, Val::frac(-5, 2));
    }

    #[test]
    fn val_scale_examples() {
        assert_eq!(val_scale(2, &Val::frac(-1, 4)).unwrap(), Val::frac(-1, 2));
        assert_eq!(val_scale(3, &Val::Inf).unwrap(), Val::Inf);
        assert_eq!(val_scale(4, &Val::Fin(q(1, 1) - q(1, 8))).unwrap(), Val::frac(7, 2));
        assert!(val_scale(0, &Val::Inf).is_err());
    }

    #[test]
    fn cut_compare_examples() {
        let c = Cut::minus(Val::zero());
        assert_eq!(c.compare(&Val::frac(-1, 8)), CutSide::InsideLowerSet);
        assert_eq!(c.compare(&Val::zero()), CutSide::Below);
        assert_eq!(Cut::closed(Val::zero()).compare(&Val::zero()), CutSide::InsideLowerSet);
        let inf = Cut::minus(Val::Inf);
        assert_eq!(inf.compare(&Val::frac(1_000_000, 1)), CutSide::InsideLowerSet);
        assert_eq!(inf.compare(&Val::Inf), CutSide::Below);
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(q(-3, 6).to_string(), "-1/2");
        assert_eq!(Rat::int(3).to_string(), "3/1");
        assert_eq!("-1/2".parse::<Rat>().unwrap(), q(-1, 2));
        assert_eq!("7".parse::<Rat>().unwrap(), Rat::int(7));
        assert!("1/0".parse::<Rat>().is_err());
        assert_eq!("inf".parse::<Val>().unwrap(), Val::Inf);
        assert_eq!(serde_json::to_string(&Val::frac(6, 4)).unwrap(), "\"3/2\"");
    }

    #[test]
    fn padic_val() {
        assert_eq!(q(12, 5).padic_val(2), Some(2));
        assert_eq!(q(3, 8).padic_val(2), Some(-3));
        assert_eq!(Rat::zero().padic_val(2), None);
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-50i64..50, 1i64..30).prop_map(|(n, d)| Rat::frac(n, d))
    }

    fn small_val() -> impl Strategy<Value = Val> {
        prop_oneof![9 => small_rat().prop_map(Val::Fin), 1 => Just(Val::Inf)]
    }

    proptest! {
        #[test]
        fn rat_field_laws(a in small_rat(), b in small_rat(), c in small_rat()) {
            prop_assert_eq!((&a + &b) + c.clone(), &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!((&a * &b) * c.clone(), &a * &(&b * &c));
        }

        #[test]
        fn fast_path_agrees_with_bigrational(
            an in prop_oneof![-50i64..50, Just(i64::MAX), Just(i64::MIN + 1), (i64::MAX / 3)..i64::MAX],
            ad in prop_oneof![1i64..30, Just(i64::MAX)],
            bn in prop_oneof![-50i64..50, Just(i64::MAX - 1), (i64::MIN / 2)..(i64::MIN / 3)],
            bd in prop_oneof![1i64..30, (i64::MAX / 5)..i64::MAX],
        ) {
            let (a, b) = (Rat::frac(an, ad), Rat::frac(bn, bd));
            let big = |r: &Rat| BigRational::new(r.numer(), r.denom());
            let (x, y) = (BigRational::new(an.into(), ad.into()), BigRational::new(bn.into(), bd.into()));
            prop_assert_eq!(big(&(&a + &b)), &x + &y);
            prop_assert_eq!(big(&(&a - &b)), &x - &y);
            prop_assert_eq!(big(&(&a * &b)), &x * &y);
            if !b.is_zero() {
                prop_assert_eq!(big(&(&a / &b)), &x / &y);
            }
            prop_assert_eq!(a.cmp(&b), x.cmp(&y));
            // canonical: a value built through the big path equals the small one
            prop_assert_eq!(&Rat::from(x.numer().clone()) / &Rat::from(x.denom().clone()), a);
        }

        #[test]
        fn val_total_order(a in small_val(), b in small_val()) {
            let n = [a < b, a == b, a > b].iter().filter(|x| **x).count();
            prop_assert_eq!(n, 1);
            prop_assert!(a <= Val::Inf);
        }

        #[test]
        fn cut_minus_is_strict(g in small_rat(), v in small_rat()) {
            let side = Cut::minus(Val::Fin(g.clone())).compare(&Val::Fin(v.clone()));
            prop_assert_eq!(side == CutSide::InsideLowerSet, v < g);
        }
    }
}
