//! Exact scalar tower: arbitrary-precision rationals, truncated p-adic
//! numbers, and polynomials in the branch indeterminate `ℓ` over either.
//!
//! Every algebraic structure in the crate (tensors, group-algebra
//! coefficients, period tables) is generic over [`Scalar`]. No floating
//! point appears anywhere.

mod ellpoly;
mod padic;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use ellpoly::EllPoly;
pub use padic::{branch_log, padic_log, Padic, PadicError};

/// Arbitrary-precision rational number in lowest terms with positive denominator.
pub type Rational = BigRational;

/// A commutative ring with exact (or precision-tracked) arithmetic.
///
/// Constants are context free: `zero()` and `one()` never need a prime or a
/// precision. `PartialEq` is the ring's notion of equality, which for p-adic
/// values means agreement to the jointly known precision.
pub trait Scalar: Clone + fmt::Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    /// Multiplicative inverse, when one exists in the ring.
    fn inverse(&self) -> Option<Self>;
    fn from_rational(r: &Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    fn is_one(&self) -> bool {
        self.sub_ref(&Self::one()).is_zero()
    }

    fn scale_rational(&self, r: &Rational) -> Self {
        self.mul_ref(&Self::from_rational(r))
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
}

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num / den`; panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `1 / k!` as an exact rational.
pub fn inv_factorial(k: usize) -> Rational {
    let mut f = BigInt::one();
    for i in 2..=k {
        f *= BigInt::from(i);
    }
    Rational::new(BigInt::one(), f)
}

/// `k!` as an exact rational.
pub fn factorial(k: usize) -> Rational {
    inv_factorial(k).recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_scalar_basics() {
        let a = ratio(1, 3);
        let b = ratio(-2, 3);
        assert_eq!(a.add_ref(&b), ratio(-1, 3));
        assert_eq!(a.mul_ref(&b), ratio(-2, 9));
        assert_eq!(b.inverse().unwrap(), ratio(-3, 2));
        assert!(<Rational as Scalar>::zero().inverse().is_none());
        assert!(Scalar::is_one(&ratio(3, 3)));
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), rat(1));
        assert_eq!(factorial(5), rat(120));
        assert_eq!(inv_factorial(4), ratio(1, 24));
    }
}
