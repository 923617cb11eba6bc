//! Polynomials in the indeterminate `ℓ` standing for `Log(p)`.

use std::fmt;

use super::{Rational, Scalar};

/// `c_0 + c_1 ℓ + ... + c_d ℓ^d`, with trailing zero coefficients stripped.
#[derive(Clone, Debug)]
pub struct EllPoly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> EllPoly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        EllPoly { coeffs }
    }

    pub fn constant(c: S) -> Self {
        EllPoly::new(vec![c])
    }

    /// The indeterminate `ℓ` itself.
    pub fn ell() -> Self {
        EllPoly::new(vec![S::zero(), S::one()])
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `ℓ^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Evaluation at `ℓ = 0`.
    pub fn constant_term(&self) -> S {
        self.coeff(0)
    }

    pub fn eval(&self, at: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc.mul_ref(at).add_ref(c))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> EllPoly<T> {
        EllPoly::new(self.coeffs.iter().map(f).collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        EllPoly::new((0..n).map(|k| f(&self.coeff(k), &other.coeff(k))).collect())
    }
}

impl<S: Scalar> Scalar for EllPoly<S> {
    fn zero() -> Self {
        EllPoly { coeffs: Vec::new() }
    }
    fn one() -> Self {
        EllPoly::constant(S::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.zip_with(other, S::add_ref)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.zip_with(other, S::sub_ref)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        EllPoly::new(out)
    }
    fn neg_ref(&self) -> Self {
        EllPoly::new(self.coeffs.iter().map(S::neg_ref).collect())
    }
    /// Only nonzero constants are units of `S[ℓ]`.
    fn inverse(&self) -> Option<Self> {
        match self.degree() {
            Some(0) => self.coeffs[0].inverse().map(EllPoly::constant),
            _ => None,
        }
    }
    fn from_rational(r: &Rational) -> Self {
        EllPoly::constant(S::from_rational(r))
    }
    fn scale_rational(&self, r: &Rational) -> Self {
        EllPoly::new(self.coeffs.iter().map(|c| c.scale_rational(r)).collect())
    }
}

impl<S: Scalar> PartialEq for EllPoly<S> {
    fn eq(&self, other: &Self) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|k| self.coeff(k) == other.coeff(k))
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for EllPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})ℓ")?,
                _ => write!(f, "({c})ℓ^{k}")?,
            }
        }
        Ok(())
    }
}
