//! Truncated p-adic numbers with relative-precision tracking.
//!
//! A nonzero approximate value is stored as `p^val * unit + O(p^(val + prec))`
//! with `0 <= unit < p^prec` and `p ∤ unit`. An approximate zero is
//! `O(p^val)` with `prec = 0`. Exact rationals form a separate variant with
//! infinite precision; they carry no prime and adopt the prime and precision
//! of whatever approximate value they meet.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use super::{EllPoly, Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("logarithm needs a unit, got valuation {0}")]
    NotAUnit(i64),
    #[error("logarithm of zero")]
    ZeroArgument,
    #[error("exact value {0} carries no prime; lift it with Padic::approx first")]
    NoPrime(String),
    #[error("invalid p-adic digits: {0}")]
    InvalidDigits(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
}

#[derive(Clone, Debug)]
enum Repr {
    Exact(Rational),
    Approx(Approx),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Approx {
    p: u64,
    val: i64,
    prec: u32,
    unit: BigInt,
}

/// An element of `Q_p`, either exact or known to finite relative precision.
#[derive(Clone, Debug)]
pub struct Padic(Repr);

fn p_pow(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// Splits off the largest power of `p` dividing a nonzero integer.
fn split_p(x: &BigInt, p: u64) -> (i64, BigInt) {
    let pb = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0i64;
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            return (v, x);
        }
        x = q;
        v += 1;
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Approx {
    fn zero(p: u64, val: i64) -> Self {
        Approx {
            p,
            val,
            prec: 0,
            unit: BigInt::zero(),
        }
    }

    fn abs_prec(&self) -> i64 {
        self.val + self.prec as i64
    }

    /// `p^val * x + O(p^abs)` for an arbitrary integer `x`.
    fn from_int(p: u64, val: i64, abs: i64, x: BigInt) -> Self {
        if val >= abs || x.is_zero() {
            return Approx::zero(p, abs);
        }
        let (shift, rest) = split_p(&x, p);
        let val = val + shift;
        if val >= abs {
            return Approx::zero(p, abs);
        }
        let prec = (abs - val) as u32;
        let unit = rest.mod_floor(&p_pow(p, prec));
        Approx { p, val, prec, unit }
    }

    /// Rational `r != 0` approximated to relative precision `prec`.
    fn from_rational_rel(r: &Rational, p: u64, prec: u32) -> Self {
        let (vn, n) = split_p(r.numer(), p);
        let (vd, d) = split_p(r.denom(), p);
        let val = vn - vd;
        if prec == 0 {
            return Approx::zero(p, val);
        }
        let m = p_pow(p, prec);
        let unit = (n.mod_floor(&m) * mod_inverse(&d, &m)).mod_floor(&m);
        Approx { p, val, prec, unit }
    }

    /// Rational approximated so that the absolute precision is `abs`.
    fn from_rational_abs(r: &Rational, p: u64, abs: i64) -> Self {
        if Zero::is_zero(r) {
            return Approx::zero(p, abs);
        }
        let (vn, _) = split_p(r.numer(), p);
        let (vd, _) = split_p(r.denom(), p);
        let v = vn - vd;
        if v >= abs {
            return Approx::zero(p, abs);
        }
        Approx::from_rational_rel(r, p, (abs - v) as u32)
    }

    fn check_prime(&self, other: &Approx) {
        assert_eq!(
            self.p, other.p,
            "p-adic arithmetic across different primes ({} vs {})",
            self.p, other.p
        );
    }

    fn add(&self, other: &Approx) -> Approx {
        self.check_prime(other);
        let abs = self.abs_prec().min(other.abs_prec());
        let v = self.val.min(other.val);
        let lift = |a: &Approx| -> BigInt {
            if a.prec == 0 {
                BigInt::zero()
            } else {
                &a.unit * p_pow(a.p, (a.val - v) as u32)
            }
        };
        Approx::from_int(self.p, v, abs, lift(self) + lift(other))
    }

    fn neg(&self) -> Approx {
        if self.prec == 0 {
            return self.clone();
        }
        let m = p_pow(self.p, self.prec);
        Approx {
            unit: (m - &self.unit).mod_floor(&p_pow(self.p, self.prec)),
            ..self.clone()
        }
    }

    fn mul(&self, other: &Approx) -> Approx {
        self.check_prime(other);
        let val = self.val + other.val;
        if self.prec == 0 || other.prec == 0 {
            return Approx::zero(self.p, val);
        }
        let prec = self.prec.min(other.prec);
        let unit = (&self.unit * &other.unit).mod_floor(&p_pow(self.p, prec));
        Approx {
            p: self.p,
            val,
            prec,
            unit,
        }
    }

    fn inverse(&self) -> Option<Approx> {
        if self.prec == 0 {
            return None;
        }
        let m = p_pow(self.p, self.prec);
        Some(Approx {
            p: self.p,
            val: -self.val,
            prec: self.prec,
            unit: mod_inverse(&self.unit, &m),
        })
    }
}

impl Padic {
    /// An exact rational, with infinite precision.
    pub fn exact(r: Rational) -> Self {
        Padic(Repr::Exact(r))
    }

    /// Approximates `r` in `Q_p` to `prec` significant digits. Zero becomes
    /// `O(p^prec)`.
    pub fn approx(r: &Rational, p: u64, prec: u32) -> Result<Self, PadicError> {
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        if Zero::is_zero(r) {
            return Ok(Padic(Repr::Approx(Approx::zero(p, prec as i64))));
        }
        Ok(Padic(Repr::Approx(Approx::from_rational_rel(r, p, prec))))
    }

    /// Builds `p^val * (d_0 + d_1 p + ...) + O(p^(val + prec))`.
    ///
    /// Leading zero digits are absorbed into the valuation; digits past
    /// `prec` are rejected.
    pub fn from_digits(p: u64, val: i64, digits: &[u64], prec: u32) -> Result<Self, PadicError> {
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        if digits.len() > prec as usize {
            return Err(PadicError::InvalidDigits(format!(
                "{} digits exceed precision {}",
                digits.len(),
                prec
            )));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return Err(PadicError::InvalidDigits(format!("digit {d} not below {p}")));
        }
        let x = digits
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, &d| acc * BigInt::from(p) + BigInt::from(d));
        Ok(Padic(Repr::Approx(Approx::from_int(
            p,
            val,
            val + prec as i64,
            x,
        ))))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.0, Repr::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match &self.0 {
            Repr::Exact(r) => Some(r),
            Repr::Approx(_) => None,
        }
    }

    /// The prime of an approximate value; `None` for exact rationals.
    pub fn prime(&self) -> Option<u64> {
        match &self.0 {
            Repr::Exact(_) => None,
            Repr::Approx(a) => Some(a.p),
        }
    }

    /// Valuation of a nonzero approximate value. For an approximate zero this
    /// is the lower bound `k` in `O(p^k)`.
    pub fn valuation(&self) -> Option<i64> {
        match &self.0 {
            Repr::Exact(_) => None,
            Repr::Approx(a) => Some(a.val),
        }
    }

    /// Valuation with respect to `p`, for exact values as well. `None` for zero.
    pub fn valuation_at(&self, p: u64) -> Option<i64> {
        match &self.0 {
            Repr::Exact(r) if Zero::is_zero(r) => None,
            Repr::Exact(r) => Some(split_p(r.numer(), p).0 - split_p(r.denom(), p).0),
            Repr::Approx(a) if a.prec == 0 => None,
            Repr::Approx(a) => Some(a.val),
        }
    }

    /// Relative precision; `None` for exact values.
    pub fn precision(&self) -> Option<u32> {
        match &self.0 {
            Repr::Exact(_) => None,
            Repr::Approx(a) => Some(a.prec),
        }
    }

    /// Base-`p` digits of the unit part, exactly `precision()` of them.
    pub fn digits(&self) -> Option<Vec<u64>> {
        let Repr::Approx(a) = &self.0 else {
            return None;
        };
        let pb = BigInt::from(a.p);
        let mut x = a.unit.clone();
        let mut out = Vec::with_capacity(a.prec as usize);
        for _ in 0..a.prec {
            let (q, r) = x.div_rem(&pb);
            out.push(r.to_u64().expect("digit below p"));
            x = q;
        }
        Some(out)
    }

    /// The same value with valuation stripped: `x / p^val(x)`.
    pub fn unit_part(&self) -> Option<Padic> {
        match &self.0 {
            Repr::Approx(a) if a.prec > 0 => Some(Padic(Repr::Approx(Approx {
                val: 0,
                ..a.clone()
            }))),
            _ => None,
        }
    }

    fn as_approx_like(&self, template: &Approx, for_mul: bool) -> Approx {
        match &self.0 {
            Repr::Approx(a) => a.clone(),
            Repr::Exact(r) => {
                if for_mul {
                    // exact zeros never reach here; mul_ref short-circuits them
                    Approx::from_rational_rel(r, template.p, template.prec)
                } else {
                    Approx::from_rational_abs(r, template.p, template.abs_prec())
                }
            }
        }
    }

    fn binary(
        &self,
        other: &Padic,
        exact: impl Fn(&Rational, &Rational) -> Rational,
        approx: impl Fn(&Approx, &Approx) -> Approx,
        for_mul: bool,
    ) -> Padic {
        match (&self.0, &other.0) {
            (Repr::Exact(a), Repr::Exact(b)) => Padic(Repr::Exact(exact(a, b))),
            (Repr::Approx(a), _) => Padic(Repr::Approx(approx(a, &other.as_approx_like(a, for_mul)))),
            (_, Repr::Approx(b)) => Padic(Repr::Approx(approx(&self.as_approx_like(b, for_mul), b))),
        }
    }
}

impl Scalar for Padic {
    fn zero() -> Self {
        Padic::exact(<Rational as Zero>::zero())
    }
    fn one() -> Self {
        Padic::exact(<Rational as One>::one())
    }
    fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Exact(r) => Zero::is_zero(r),
            Repr::Approx(a) => a.prec == 0,
        }
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a + b, Approx::add, false)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }
    fn mul_ref(&self, other: &Self) -> Self {
        // exact zero annihilates regardless of precision
        let exact_zero = |x: &Padic| matches!(&x.0, Repr::Exact(r) if Zero::is_zero(r));
        if exact_zero(self) || exact_zero(other) {
            return Padic::zero();
        }
        self.binary(other, |a, b| a * b, Approx::mul, true)
    }
    fn neg_ref(&self) -> Self {
        match &self.0 {
            Repr::Exact(r) => Padic(Repr::Exact(-r)),
            Repr::Approx(a) => Padic(Repr::Approx(a.neg())),
        }
    }
    fn inverse(&self) -> Option<Self> {
        match &self.0 {
            Repr::Exact(r) => {
                if Zero::is_zero(r) {
                    None
                } else {
                    Some(Padic(Repr::Exact(r.recip())))
                }
            }
            Repr::Approx(a) => a.inverse().map(|a| Padic(Repr::Approx(a))),
        }
    }
    fn from_rational(r: &Rational) -> Self {
        Padic::exact(r.clone())
    }
}

impl PartialEq for Padic {
    /// Agreement to the jointly known precision.
    fn eq(&self, other: &Self) -> bool {
        self.sub_ref(other).is_zero()
    }
}

impl From<Rational> for Padic {
    fn from(r: Rational) -> Self {
        Padic::exact(r)
    }
}

macro_rules! forward_ops {
    ($($tr:ident $m:ident $f:ident),*) => {$(
        impl $tr for Padic {
            type Output = Padic;
            fn $m(self, rhs: Padic) -> Padic { self.$f(&rhs) }
        }
        impl<'a> $tr<&'a Padic> for &'a Padic {
            type Output = Padic;
            fn $m(self, rhs: &'a Padic) -> Padic { self.$f(rhs) }
        }
    )*};
}
forward_ops!(Add add add_ref, Sub sub sub_ref, Mul mul mul_ref);

impl Neg for Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_ref()
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Exact(r) => write!(f, "{r}"),
            Repr::Approx(a) if a.prec == 0 => write!(f, "O({}^{})", a.p, a.val),
            Repr::Approx(a) => write!(
                f,
                "{}^{} * {} + O({}^{})",
                a.p,
                a.val,
                a.unit,
                a.p,
                a.abs_prec()
            ),
        }
    }
}

/// Logarithm of a p-adic unit, normalised so that roots of unity map to 0.
///
/// Computes `log(u^(p-1)) / (p-1)` with the series `log(1+t) = Σ (-1)^(k+1) t^k / k`,
/// summed until every remaining term lies below the absolute precision of `u`.
pub fn padic_log(u: &Padic) -> Result<Padic, PadicError> {
    let a = match &u.0 {
        Repr::Exact(r) if One::is_one(r) => return Ok(Padic::zero()),
        Repr::Exact(r) if Zero::is_zero(r) => return Err(PadicError::ZeroArgument),
        Repr::Exact(r) => return Err(PadicError::NoPrime(r.to_string())),
        Repr::Approx(a) => a,
    };
    if a.prec == 0 {
        return Err(PadicError::ZeroArgument);
    }
    if a.val != 0 {
        return Err(PadicError::NotAUnit(a.val));
    }
    let p = a.p;
    let target = a.prec;
    let modulus = p_pow(p, target);
    let w = a.unit.modpow(&BigInt::from(p - 1), &modulus);
    let t = (&w - BigInt::one()).mod_floor(&modulus);
    if t.is_zero() {
        return Ok(Padic(Repr::Approx(Approx::zero(p, target as i64))));
    }
    let (s, tau) = split_p(&t, p);
    let s = s as u64;
    let mut sum = BigInt::zero();
    let mut tau_pow = BigInt::one();
    let mut k: u64 = 1;
    // v(t^k / k) >= k*s - log_p(k); stop once that bound reaches the target
    while (k * s) as i64 - ilog(k, p) < target as i64 {
        tau_pow = (&tau_pow * &tau).mod_floor(&modulus);
        let (vk, k_unit) = split_p(&BigInt::from(k), p);
        let e = (k * s) as i64 - vk;
        if e < target as i64 {
            let term = p_pow(p, e as u32) * &tau_pow * mod_inverse(&k_unit, &modulus);
            if k % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
            sum = sum.mod_floor(&modulus);
        }
        k += 1;
    }
    let sum = (sum * mod_inverse(&BigInt::from(p - 1), &modulus)).mod_floor(&modulus);
    Ok(Padic(Repr::Approx(Approx::from_int(p, 0, target as i64, sum))))
}

fn ilog(k: u64, p: u64) -> i64 {
    let mut e = 0;
    let mut x = k;
    while x >= p {
        x /= p;
        e += 1;
    }
    e
}

/// The branch of the p-adic logarithm with `Log(p) = ℓ`:
/// `Log(x) = val(x)·ℓ + log(x / p^val(x))`.
pub fn branch_log(x: &Padic) -> Result<EllPoly<Padic>, PadicError> {
    match &x.0 {
        Repr::Exact(r) if Zero::is_zero(r) => Err(PadicError::ZeroArgument),
        Repr::Exact(r) if One::is_one(r) => Ok(EllPoly::zero()),
        Repr::Exact(r) => Err(PadicError::NoPrime(r.to_string())),
        Repr::Approx(a) if a.prec == 0 => Err(PadicError::ZeroArgument),
        Repr::Approx(a) => {
            let unit = x.unit_part().expect("nonzero");
            let log_unit = padic_log(&unit)?;
            let v = Padic::exact(Rational::from_integer(BigInt::from(a.val)));
            Ok(EllPoly::new(vec![log_unit, v]))
        }
    }
}

impl Padic {
    /// Sign-free integer representative of the unit, for tests and encoders.
    pub fn unit_integer(&self) -> Option<BigInt> {
        match &self.0 {
            Repr::Approx(a) if a.prec > 0 => Some(a.unit.clone()),
            _ => None,
        }
    }

    /// Reduces an approximate value with nonnegative valuation to an integer
    /// modulo `p^abs`, if the value is known that far.
    pub fn residue_mod(&self, p: u64, abs: u32) -> Option<BigInt> {
        let m = p_pow(p, abs);
        match &self.0 {
            Repr::Exact(r) => {
                let a = Approx::from_rational_abs(r, p, abs as i64);
                if a.val < 0 {
                    return None;
                }
                Some(if a.prec == 0 {
                    BigInt::zero()
                } else {
                    (a.unit * p_pow(p, a.val as u32)).mod_floor(&m)
                })
            }
            Repr::Approx(a) => {
                if a.abs_prec() < abs as i64 || a.val < 0 {
                    return None;
                }
                if a.prec == 0 {
                    return Some(BigInt::zero());
                }
                Some((&a.unit * p_pow(p, a.val as u32)).mod_floor(&m))
            }
        }
    }
}
