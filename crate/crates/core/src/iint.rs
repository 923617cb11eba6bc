//! Combinatorial iterated integrals along graph paths, the signature map
//! into the truncated tensor algebra, matrix-valued integrals, and the
//! canonical correction of a path.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coeffs::{factorial, inv_factorial, Rational, Scalar};
use crate::forms::{dual_bases, DualBases, FormError, TropicalOneForm};
use crate::graph::{DirEdge, Graph, GraphError, GroupAlgebraElement, PathWord};
use crate::linalg::Matrix;
use crate::tensor::TruncatedTensor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IintError {
    #[error("multiform shapes do not chain at position {0}")]
    ShapeMismatch(usize),
    #[error("form matrix has {got} entries, expected {want}")]
    RaggedFormMatrix { got: usize, want: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// `∏ η_k(d) / (b - a)!` over the letters `a..b` of `word`.
fn edge_block(d: DirEdge, word: &[&TropicalOneForm]) -> Rational {
    word.iter().fold(inv_factorial(word.len()), |acc, f| acc * f.value(d))
}

/// `∫_p η_1 ⋯ η_n`, by splitting `p` into edges and applying the
/// concatenation rule one edge at a time.
pub fn cint(p: &PathWord, word: &[&TropicalOneForm]) -> Rational {
    let n = word.len();
    // f[i] = integral of the first i letters along the edges seen so far
    let mut f = vec![Rational::zero(); n + 1];
    f[0] = Rational::one();
    for &d in p.edges() {
        for i in (1..=n).rev() {
            let mut acc = Rational::zero();
            for t in 0..=i {
                if !Scalar::is_zero(&f[t]) {
                    acc += &f[t] * edge_block(d, &word[t..i]);
                }
            }
            f[i] = acc;
        }
    }
    f.swap_remove(n)
}

/// Linear extension of [`cint`] to the path algebra.
pub fn cint_element(x: &GroupAlgebraElement, word: &[&TropicalOneForm]) -> Rational {
    x.terms().fold(Rational::zero(), |acc, (p, c)| acc + c * cint(&p, word))
}

/// `exp(Σ_i η_i(d) X_i)` truncated at `level`.
fn edge_signature(d: DirEdge, forms: &[TropicalOneForm], level: usize) -> TruncatedTensor<Rational> {
    let dim = forms.len();
    let mut x = TruncatedTensor::zero(dim, level);
    if level > 0 {
        for (i, f) in forms.iter().enumerate() {
            x.set(&[i], f.value(d)).expect("letter in range");
        }
    }
    x.exp().expect("zero augmentation")
}

/// The tensor whose coefficient at `(i_1..i_k)` is `∫_p η_{i_1}⋯η_{i_k}`.
pub fn signature(p: &PathWord, forms: &[TropicalOneForm], level: usize) -> TruncatedTensor<Rational> {
    p.edges().iter().fold(TruncatedTensor::one(forms.len(), level), |acc, &d| {
        acc.concat_mul(&edge_signature(d, forms, level)).expect("same shape")
    })
}

pub fn signature_element(x: &GroupAlgebraElement, forms: &[TropicalOneForm], level: usize) -> TruncatedTensor<Rational> {
    x.terms().fold(TruncatedTensor::zero(forms.len(), level), |acc, (p, c)| {
        acc.add(&signature(&p, forms, level).scale(c)).expect("same shape")
    })
}

/// An `rows × cols` matrix of forms; `None` entries are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Option<TropicalOneForm>>,
}

impl FormMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Option<TropicalOneForm>>) -> Result<Self, IintError> {
        if entries.len() != rows * cols {
            return Err(IintError::RaggedFormMatrix {
                got: entries.len(),
                want: rows * cols,
            });
        }
        Ok(FormMatrix { rows, cols, entries })
    }

    pub fn scalar(form: TropicalOneForm) -> Self {
        FormMatrix {
            rows: 1,
            cols: 1,
            entries: vec![Some(form)],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entry(&self, r: usize, c: usize) -> Option<&TropicalOneForm> {
        self.entries[r * self.cols + c].as_ref()
    }

    /// The residue matrix on a directed edge.
    pub fn at(&self, d: DirEdge) -> Matrix<Rational> {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if let Some(f) = self.entry(r, c) {
                    m.set(r, c, f.value(d));
                }
            }
        }
        m
    }
}

/// `η_1, …, η_k` with `η_i` of shape `n_{i+1} × n_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalMultiform {
    layers: Vec<FormMatrix>,
}

impl TropicalMultiform {
    pub fn new(layers: Vec<FormMatrix>) -> Result<Self, IintError> {
        for (i, w) in layers.windows(2).enumerate() {
            if w[1].cols != w[0].rows {
                return Err(IintError::ShapeMismatch(i + 1));
            }
        }
        Ok(TropicalMultiform { layers })
    }

    pub fn layers(&self) -> &[FormMatrix] {
        &self.layers
    }

    /// `(n_k, n_0)`; `None` for the empty multiform.
    pub fn shape(&self) -> Option<(usize, usize)> {
        Some((self.layers.last()?.rows, self.layers.first()?.cols))
    }
}

/// Product `M_b ⋯ M_{a+1}` of residues on one edge, over `(b-a)!`.
fn matrix_block(d: DirEdge, layers: &[FormMatrix]) -> Matrix<Rational> {
    let first = &layers[0];
    let mut acc = first.at(d);
    for l in &layers[1..] {
        acc = l.at(d).mul(&acc);
    }
    acc.scale(&inv_factorial(layers.len()))
}

/// Matrix-valued iterated integral: later forms compose on the left, and
/// edges later along the path contribute on the left.
pub fn cint_matrix(p: &PathWord, mf: &TropicalMultiform) -> Matrix<Rational> {
    let layers = &mf.layers;
    let n = layers.len();
    let Some((_, n0)) = mf.shape() else {
        return Matrix::identity(1);
    };
    // f[i] : n_i × n_0
    let width = |i: usize| if i == 0 { n0 } else { layers[i - 1].rows };
    let mut f: Vec<Matrix<Rational>> = (0..=n).map(|i| Matrix::zeros(width(i), n0)).collect();
    f[0] = Matrix::identity(n0);
    for &d in p.edges() {
        for i in (1..=n).rev() {
            let mut acc = f[i].clone();
            for t in 0..i {
                if !f[t].is_zero() {
                    acc = acc.add(&matrix_block(d, &layers[t..i]).mul(&f[t]));
                }
            }
            f[i] = acc;
        }
    }
    f.swap_remove(n)
}

/// `n! · cint_matrix(p, mf)`: the combinatorial value of the `n`-th power of
/// the monodromy operator.
pub fn monodromy_power(p: &PathWord, mf: &TropicalMultiform) -> Matrix<Rational> {
    cint_matrix(p, mf).scale(&factorial(mf.layers.len()))
}

/// All words of length `k` over `0..dim`, lexicographically.
pub fn words_of_length(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..dim).map(move |i| {
                    let mut w = w.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}

/// `q = Σ_w c_w (γ_{w_1} − 1)⋯(γ_{w_k} − 1)` over words of length `≤ level`,
/// with loops `γ_i` based at the start of the corrected path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalCorrection {
    pub base: usize,
    pub loops: Vec<PathWord>,
    pub level: usize,
    /// Nonzero coefficients, keyed by loop-index words.
    pub coeffs: BTreeMap<Vec<usize>, Rational>,
}

impl CanonicalCorrection {
    /// Multiplies out the monomials into a combination of reduced loops.
    pub fn expand(&self) -> GroupAlgebraElement {
        let minus_one: Vec<GroupAlgebraElement> = self
            .loops
            .iter()
            .map(|l| GroupAlgebraElement::loop_minus_one(l).expect("loops are closed"))
            .collect();
        let mut q = GroupAlgebraElement::zero(self.base, self.base);
        for (w, c) in &self.coeffs {
            let mono = w
                .iter()
                .try_fold(GroupAlgebraElement::one(self.base), |acc, &i| acc.mul(&minus_one[i]))
                .expect("loops share a base");
            q = q.add(&mono.scale(c)).expect("same endpoints");
        }
        q
    }

    pub fn coefficient(&self, w: &[usize]) -> Rational {
        self.coeffs.get(w).cloned().unwrap_or_else(Rational::zero)
    }
}

/// Signatures of the monomials `(γ_{w_1}−1)⋯(γ_{w_k}−1)`.
pub(crate) fn monomial_signature(minus_one: &[TruncatedTensor<Rational>], w: &[usize], dim: usize, level: usize) -> TruncatedTensor<Rational> {
    w.iter().fold(TruncatedTensor::one(dim, level), |acc, &i| {
        acc.concat_mul(&minus_one[i]).expect("same shape")
    })
}

/// The element `q` with `C(q·p) = 1` through degree `level`, using the
/// fundamental loops at the start of `p` and their dual forms.
pub fn canonical_correction(g: &Graph, p: &PathWord, level: usize) -> CanonicalCorrection {
    canonical_correction_with(&dual_bases(g, p.start()), p, level)
}

/// As [`canonical_correction`] with explicit dual bases, whose loops must
/// be based at the start of `p`.
pub fn canonical_correction_with(db: &DualBases, p: &PathWord, level: usize) -> CanonicalCorrection {
    let dim = db.forms.len();
    let loops: Vec<PathWord> = db.loops.iter().map(|l| l.path.clone()).collect();
    let minus_one: Vec<_> = loops
        .iter()
        .map(|l| signature(l, &db.forms, level).sub(&TruncatedTensor::one(dim, level)).expect("same shape"))
        .collect();
    // C(M_w) = X_w + higher terms, so coefficients are read off level by level
    let mut residual = signature(p, &db.forms, level).invert().expect("unit augmentation");
    let mut coeffs = BTreeMap::new();
    for k in 0..=level {
        for w in words_of_length(dim, k) {
            let c = residual.coeff(&w).clone();
            if Scalar::is_zero(&c) {
                continue;
            }
            let m = monomial_signature(&minus_one, &w, dim, level);
            residual = residual.sub(&m.scale(&c)).expect("same shape");
            coeffs.insert(w, c);
        }
    }
    debug_assert!(residual.is_zero());
    CanonicalCorrection {
        base: p.start(),
        loops,
        level,
        coeffs,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::coeffs::{rat, ratio};
    use crate::forms::forms_basis;
    use crate::graph::tests::{cycle, petal, spec, theta};

    pub(crate) fn form(g: &Graph, vals: &[Rational]) -> TropicalOneForm {
        TropicalOneForm::new(g, vals.to_vec()).unwrap()
    }

    /// Direct recursion: the empty path integrates only the empty word, and
    /// `∫_{p e} = Σ_i ∫_p(first i) · ∫_e(rest)`.
    fn recursive(p: &[DirEdge], word: &[&TropicalOneForm]) -> Rational {
        match p.split_last() {
            None => {
                if word.is_empty() {
                    rat(1)
                } else {
                    rat(0)
                }
            }
            Some((&e, rest)) => (0..=word.len())
                .map(|i| recursive(rest, &word[..i]) * edge_block(e, &word[i..]))
                .fold(rat(0), |a, b| a + b),
        }
    }

    #[test]
    fn edge_rules() {
        let p = petal();
        let eta = form(&p, &[rat(3)]);
        let l = p.parse_path(None, &["l"]).unwrap();
        assert_eq!(cint(&l, &[&eta]), rat(3));
        for k in 0..6 {
            let word = vec![&eta; k];
            assert_eq!(cint(&l, &word), Rational::from_int(3i64.pow(k as u32)) * inv_factorial(k));
        }
        assert_eq!(cint(&PathWord::constant(0), &[]), rat(1));
        assert_eq!(cint(&PathWord::constant(0), &[&eta]), rat(0));
    }

    #[test]
    fn two_petals_order_matters() {
        let g = Graph::build(&spec(&["v"], &[("l1", "v", "v"), ("l2", "v", "v")], &[])).unwrap();
        let e1 = form(&g, &[rat(1), rat(0)]);
        let e2 = form(&g, &[rat(0), rat(1)]);
        let p = g.parse_path(None, &["l1", "l2"]).unwrap();
        assert_eq!(cint(&p, &[&e1, &e2]), rat(1));
        assert_eq!(cint(&p, &[&e2, &e1]), rat(0));
    }

    #[test]
    fn theta_worked_example() {
        let t = theta();
        let b = forms_basis(&t);
        let p = t.parse_path(None, &["e1", "-e2"]).unwrap();
        let v = cint(&p, &[&b[0], &b[1]]);
        assert_eq!(v, recursive(p.edges(), &[&b[0], &b[1]]));
        // basis forms are (-1,1,0) and (-1,0,1): e1 then -e2 gives
        // (1/2)(-1)(-1) + (-1)(-1)·0 + (−1)(0)/2 = 1/2
        assert_eq!(v, ratio(1, 2));
    }

    #[test]
    fn homotopy_invariance_and_signature() {
        let t = theta();
        let b = forms_basis(&t);
        let p = t.parse_path(None, &["e1", "-e2", "e2", "-e3", "e3", "-e3"]).unwrap();
        let r = p.reduced();
        let sig = signature(&p, &b, 4);
        assert_eq!(sig, signature(&r, &b, 4));
        for w in sig.words().collect::<Vec<_>>() {
            let word: Vec<&TropicalOneForm> = w.iter().map(|&i| &b[i]).collect();
            assert_eq!(sig.coeff(&w), &cint(&p, &word));
            assert_eq!(cint(&p, &word), recursive(p.edges(), &word));
        }
        assert!(sig.is_grouplike());
    }

    #[test]
    fn cycle_loop_signature() {
        for m in 1..5 {
            let c = cycle(m);
            let eta = form(&c, &vec![rat(1); m]);
            let toks: Vec<String> = (1..=m).map(|i| format!("e{i}")).collect();
            let gamma = c.parse_path(Some("v0"), &toks).unwrap();
            let sig = signature(&gamma, &[eta], 4);
            for k in 0..=4 {
                assert_eq!(sig.coeff(&vec![0; k]), &(Rational::from_int((m as i64).pow(k as u32)) * inv_factorial(k)));
            }
        }
    }

    #[test]
    fn matrix_scalar_case_and_linear_case() {
        let t = theta();
        let b = forms_basis(&t);
        let p = t.parse_path(None, &["e1", "-e2", "e3"]).unwrap();
        let mf = TropicalMultiform::new(vec![FormMatrix::scalar(b[0].clone()), FormMatrix::scalar(b[1].clone())]).unwrap();
        assert_eq!(cint_matrix(&p, &mf).get(0, 0), &cint(&p, &[&b[0], &b[1]]));
        assert_eq!(monodromy_power(&p, &mf).get(0, 0), &(cint(&p, &[&b[0], &b[1]]) * rat(2)));
        let lin = TropicalMultiform::new(vec![FormMatrix::new(
            2,
            2,
            vec![Some(b[0].clone()), None, Some(b[1].clone()), Some(b[0].clone())],
        )
        .unwrap()])
        .unwrap();
        let m = cint_matrix(&p, &lin);
        let s0 = cint(&p, &[&b[0]]);
        let s1 = cint(&p, &[&b[1]]);
        assert_eq!(m.to_rows(), vec![vec![s0.clone(), rat(0)], vec![s1, s0]]);
        assert!(TropicalMultiform::new(vec![lin.layers[0].clone(), FormMatrix::scalar(b[0].clone())]).is_err());
    }

    #[test]
    fn monodromy_examples() {
        for m in 1..5 {
            let c = cycle(m);
            let eta = form(&c, &vec![rat(1); m]);
            let toks: Vec<String> = (1..=m).map(|i| format!("e{i}")).collect();
            let gamma = c.parse_path(Some("v0"), &toks).unwrap();
            let mf = TropicalMultiform::new(vec![FormMatrix::scalar(eta.clone())]).unwrap();
            assert_eq!(monodromy_power(&gamma, &mf).get(0, 0), &Rational::from_int(m as i64));
            let mf2 = TropicalMultiform::new(vec![FormMatrix::scalar(eta.clone()); 2]).unwrap();
            assert!(monodromy_power(&PathWord::constant(0), &mf2).is_zero());
            let e = c.parse_path(Some("v0"), &["e1"]).unwrap();
            let eta3 = form(&c, &vec![rat(3); m]);
            let mf3 = TropicalMultiform::new(vec![FormMatrix::scalar(eta3); 3]).unwrap();
            assert_eq!(monodromy_power(&e, &mf3).get(0, 0), &rat(27));
        }
    }

    #[test]
    fn canonical_examples() {
        let c3 = cycle(3);
        let q = canonical_correction(&c3, &PathWord::constant(0), 3);
        assert_eq!(q.coeffs.len(), 1);
        assert_eq!(q.coefficient(&[]), rat(1));

        for m in 1..5usize {
            let c = cycle(m);
            for k in 0..=m {
                let toks: Vec<String> = (1..=k).map(|i| format!("e{i}")).collect();
                let p = c.parse_path(Some("v0"), &toks).unwrap();
                let q = canonical_correction(&c, &p, 1);
                assert_eq!(q.coefficient(&[]), rat(1));
                assert_eq!(q.coefficient(&[0]), ratio(-(k as i64), m as i64));
            }
        }

        let p = c3.parse_path(Some("v0"), &["e1", "e2"]).unwrap();
        let q = canonical_correction(&c3, &p, 2);
        assert_eq!(q.coefficient(&[]), rat(1));
        assert_eq!(q.coefficient(&[0]), ratio(-2, 3));
        assert_eq!(q.coefficient(&[0, 0]), ratio(5, 9));
    }

    #[test]
    fn canonical_annihilates() {
        let t = theta();
        let db = dual_bases(&t, 0);
        let p = t.parse_path(None, &["e1", "-e2", "e3"]).unwrap();
        for n in 0..4 {
            let q = canonical_correction(&t, &p, n);
            let qp = q.expand().mul(&GroupAlgebraElement::from_path(&p)).unwrap();
            assert!(signature_element(&qp, &db.forms, n).is_one());
        }
    }
}
