//! Truncated tensor algebra `T_n(V)` on a finite alphabet.
//!
//! Coefficients are stored densely, level by level; inside level `k` a word
//! `(i_1, ..., i_k)` over `{0, ..., d-1}` sits at its mixed-radix code
//! `i_1 d^(k-1) + ... + i_k`. A product is then a double loop over the split
//! point of each output word.

use thiserror::Error;

use crate::coeffs::{inv_factorial, EllPoly, Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("alphabet sizes differ: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("truncation levels differ: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("empty-word coefficient is not invertible")]
    NonUnitAugmentation,
    #[error("exponential needs a zero empty-word coefficient")]
    NotNilpotent,
    #[error("word {0:?} is invalid for alphabet size {1} and level {2}")]
    InvalidWord(Vec<usize>, usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedTensor<S> {
    dim: usize,
    level: usize,
    offsets: Vec<usize>,
    coeffs: Vec<S>,
}

fn level_offsets(dim: usize, level: usize) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(level + 2);
    let mut acc = 0;
    let mut width = 1;
    for _ in 0..=level {
        offsets.push(acc);
        acc += width;
        width *= dim;
    }
    offsets.push(acc);
    offsets
}

impl<S: Scalar> TruncatedTensor<S> {
    pub fn zero(dim: usize, level: usize) -> Self {
        let offsets = level_offsets(dim, level);
        let len = offsets[level + 1];
        TruncatedTensor {
            dim,
            level,
            offsets,
            coeffs: vec![S::zero(); len],
        }
    }

    /// The empty word with coefficient 1.
    pub fn one(dim: usize, level: usize) -> Self {
        let mut t = Self::zero(dim, level);
        t.coeffs[0] = S::one();
        t
    }

    /// `c` times a single word.
    pub fn monomial(dim: usize, level: usize, word: &[usize], c: S) -> Result<Self, TensorError> {
        let mut t = Self::zero(dim, level);
        t.set(word, c)?;
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    fn width(&self, k: usize) -> usize {
        self.offsets[k + 1] - self.offsets[k]
    }

    fn index(&self, word: &[usize]) -> Result<usize, TensorError> {
        if word.len() > self.level || word.iter().any(|&i| i >= self.dim) {
            return Err(TensorError::InvalidWord(word.to_vec(), self.dim, self.level));
        }
        let code = word.iter().fold(0, |acc, &i| acc * self.dim + i);
        Ok(self.offsets[word.len()] + code)
    }

    fn word_at(&self, k: usize, mut code: usize) -> Vec<usize> {
        let mut w = vec![0; k];
        for slot in w.iter_mut().rev() {
            *slot = code % self.dim;
            code /= self.dim;
        }
        w
    }

    /// Coefficient of a word (0-based letters).
    pub fn get(&self, word: &[usize]) -> Result<&S, TensorError> {
        Ok(&self.coeffs[self.index(word)?])
    }

    /// Coefficient of a word, panicking on an invalid word.
    pub fn coeff(&self, word: &[usize]) -> &S {
        self.get(word).expect("valid word")
    }

    pub fn set(&mut self, word: &[usize], c: S) -> Result<(), TensorError> {
        let i = self.index(word)?;
        self.coeffs[i] = c;
        Ok(())
    }

    /// Coefficient of the empty word.
    pub fn augmentation(&self) -> &S {
        &self.coeffs[0]
    }

    /// The coefficients of level `k`, in word-code order.
    pub fn level_slice(&self, k: usize) -> &[S] {
        &self.coeffs[self.offsets[k]..self.offsets[k + 1]]
    }

    /// All `(word, coefficient)` pairs in shortlex order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &S)> + '_ {
        (0..=self.level).flat_map(move |k| {
            self.level_slice(k)
                .iter()
                .enumerate()
                .map(move |(code, c)| (self.word_at(k, code), c))
        })
    }

    /// Words of length `0..=level` in shortlex order.
    pub fn words(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..=self.level).flat_map(move |k| (0..self.width(k)).map(move |c| self.word_at(k, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(S::is_zero)
    }

    /// Whether `self - 1` vanishes.
    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(S::is_zero)
    }

    fn check(&self, other: &Self) -> Result<(), TensorError> {
        if self.dim != other.dim {
            return Err(TensorError::AlphabetMismatch(self.dim, other.dim));
        }
        if self.level != other.level {
            return Err(TensorError::LevelMismatch(self.level, other.level));
        }
        Ok(())
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self, TensorError> {
        self.check(other)?;
        Ok(TruncatedTensor {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
            ..self.clone()
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.zip(other, S::add_ref)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.zip(other, S::sub_ref)
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.mul_ref(c))
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        self.map(|x| x.scale_rational(c))
    }

    pub fn neg(&self) -> Self {
        self.map(S::neg_ref)
    }

    fn map(&self, f: impl Fn(&S) -> S) -> Self {
        TruncatedTensor {
            coeffs: self.coeffs.iter().map(f).collect(),
            ..self.clone()
        }
    }

    /// Changes the scalar ring coefficientwise.
    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TruncatedTensor<T> {
        TruncatedTensor {
            dim: self.dim,
            level: self.level,
            offsets: self.offsets.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Drops every word longer than `level`.
    pub fn truncate(&self, level: usize) -> Self {
        let level = level.min(self.level);
        let offsets = level_offsets(self.dim, level);
        TruncatedTensor {
            dim: self.dim,
            level,
            coeffs: self.coeffs[..offsets[level + 1]].to_vec(),
            offsets,
        }
    }

    /// Concatenation product, truncated at the common level.
    pub fn concat_mul(&self, other: &Self) -> Result<Self, TensorError> {
        self.check(other)?;
        let mut out = Self::zero(self.dim, self.level);
        for a in 0..=self.level {
            for (u, x) in self.level_slice(a).iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for b in 0..=self.level - a {
                    let base = self.offsets[a + b] + u * self.width(b);
                    for (v, y) in other.level_slice(b).iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        let slot = &mut out.coeffs[base + v];
                        *slot = slot.add_ref(&x.mul_ref(y));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Two-sided inverse for concatenation, through the geometric series
    /// `1 - y + y^2 - ...` in `y = x/x_∅ - 1`, which is nilpotent of order
    /// `level + 1`.
    pub fn invert(&self) -> Result<Self, TensorError> {
        let a0_inv = self
            .coeffs[0]
            .inverse()
            .ok_or(TensorError::NonUnitAugmentation)?;
        let one = Self::one(self.dim, self.level);
        let minus_y = one.sub(&self.scale(&a0_inv))?;
        let mut term = one.clone();
        let mut sum = one;
        for _ in 0..self.level {
            term = term.concat_mul(&minus_y)?;
            sum = sum.add(&term)?;
        }
        Ok(sum.scale(&a0_inv))
    }

    /// `Σ_{k≤n} x^k / k!` for `x` with zero empty-word coefficient.
    pub fn exp(&self) -> Result<Self, TensorError> {
        if !self.coeffs[0].is_zero() {
            return Err(TensorError::NotNilpotent);
        }
        let mut term = Self::one(self.dim, self.level);
        let mut sum = term.clone();
        for k in 1..=self.level {
            term = term.concat_mul(self)?;
            sum = sum.add(&term.scale_rational(&inv_factorial(k)))?;
        }
        Ok(sum)
    }

    /// Shuffle product.
    pub fn shuffle_mul(&self, other: &Self) -> Result<Self, TensorError> {
        self.check(other)?;
        let mut out = Self::zero(self.dim, self.level);
        for a in 0..=self.level {
            for b in 0..=self.level - a {
                for (u, x) in self.level_slice(a).iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let uw = self.word_at(a, u);
                    for (v, y) in other.level_slice(b).iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        let vw = self.word_at(b, v);
                        let xy = x.mul_ref(y);
                        for_each_shuffle(&uw, &vw, self.dim, &mut |code| {
                            let slot = &mut out.coeffs[self.offsets[a + b] + code];
                            *slot = slot.add_ref(&xy);
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Whether the empty-word coefficient is 1 and
    /// `⟨x, u⟩⟨x, v⟩ = ⟨x, u ⧢ v⟩` for every pair with `|u| + |v| ≤ level`.
    pub fn is_grouplike(&self) -> bool {
        if !self.coeffs[0].is_one() {
            return false;
        }
        for a in 1..=self.level / 2 {
            for b in a..=self.level - a {
                for u in 0..self.width(a) {
                    let v_start = if a == b { u } else { 0 };
                    for v in v_start..self.width(b) {
                        let uw = self.word_at(a, u);
                        let vw = self.word_at(b, v);
                        let lhs = self.level_slice(a)[u].mul_ref(&self.level_slice(b)[v]);
                        let mut rhs = S::zero();
                        for_each_shuffle(&uw, &vw, self.dim, &mut |code| {
                            rhs = rhs.add_ref(&self.coeffs[self.offsets[a + b] + code]);
                        });
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

impl<S: Scalar> TruncatedTensor<S> {
    /// Lifts a tensor into `S[ℓ]` coefficients.
    pub fn to_ell(&self) -> TruncatedTensor<EllPoly<S>> {
        self.map_scalars(|c| EllPoly::constant(c.clone()))
    }
}

impl TruncatedTensor<Rational> {
    /// Reinterprets rational coefficients in any scalar ring.
    pub fn convert<T: Scalar>(&self) -> TruncatedTensor<T> {
        self.map_scalars(T::from_rational)
    }
}

/// Calls `f` with the level-local code of every shuffle of `u` and `v`,
/// with multiplicity.
pub(crate) fn for_each_shuffle(u: &[usize], v: &[usize], dim: usize, f: &mut impl FnMut(usize)) {
    fn go(u: &[usize], v: &[usize], dim: usize, acc: usize, f: &mut impl FnMut(usize)) {
        match (u.split_first(), v.split_first()) {
            (None, None) => f(acc),
            (Some((&a, ur)), None) => go(ur, v, dim, acc * dim + a, f),
            (None, Some((&b, vr))) => go(u, vr, dim, acc * dim + b, f),
            (Some((&a, ur)), Some((&b, vr))) => {
                go(ur, v, dim, acc * dim + a, f);
                go(u, vr, dim, acc * dim + b, f);
            }
        }
    }
    go(u, v, dim, 0, f);
}
