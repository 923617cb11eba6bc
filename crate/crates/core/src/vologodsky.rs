//! Vologodsky iterated integrals from Berkovich–Coleman period data.
//!
//! The engine never sees analytic forms, only their labels and the period
//! tensors of the fundamental loops and of one base path. The canonical
//! correction `q` of the base path is solved combinatorially and pushed
//! through the period homomorphism: `V = BC(q) · BC(p̄)`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coeffs::{EllPoly, Rational, Scalar};
use crate::forms::{dual_bases, path_chain, single_cint};
use crate::graph::{Graph, GraphError, PathWord};
use crate::iint::{canonical_correction_with, CanonicalCorrection};
use crate::tensor::TruncatedTensor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VolError {
    #[error("table level {table} is below the requested level {requested}")]
    LevelMismatch { table: usize, requested: usize },
    #[error("entry `{entry}` has alphabet size {got}, expected {want}")]
    AlphabetMismatch { entry: String, got: usize, want: usize },
    #[error("entry `{entry}` has level {got}, expected {want}")]
    EntryLevel { entry: String, got: usize, want: usize },
    #[error("entry `{0}` does not have empty-word coefficient 1")]
    NonUnitEntry(String),
    #[error("entry `{entry}` has ℓ-degree {degree} above the cap {cap}")]
    EllDegree { entry: String, degree: usize, cap: usize },
    #[error("no period data for generator `{0}`")]
    UnknownGenerator(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

type Periods<S> = TruncatedTensor<EllPoly<S>>;

/// The base path: its endpoints and edge word in the graph, plus its period
/// tensor. Consistency of the two is the caller's contract.
#[derive(Clone, Debug)]
pub struct BasePath<S> {
    pub from: String,
    pub to: String,
    pub edges: Vec<String>,
    pub periods: Periods<S>,
}

/// Period tensors of the fundamental loops (keyed by loop id) and of a
/// base path, over the analytic-form alphabet `forms`.
#[derive(Clone, Debug)]
pub struct PeriodTable<S> {
    level: usize,
    forms: Vec<String>,
    loops: BTreeMap<String, Periods<S>>,
    path: BasePath<S>,
}

impl<S: Scalar> PartialEq for BasePath<S> {
    fn eq(&self, other: &Self) -> bool {
        self.from == other.from && self.to == other.to && self.edges == other.edges && self.periods == other.periods
    }
}

impl<S: Scalar> PartialEq for PeriodTable<S> {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.forms == other.forms && self.loops == other.loops && self.path == other.path
    }
}

impl<S: Scalar> PeriodTable<S> {
    /// Checks a uniform alphabet and level, unit augmentation, and that no
    /// coefficient has ℓ-degree above `level`.
    pub fn new(level: usize, forms: Vec<String>, loops: BTreeMap<String, Periods<S>>, path: BasePath<S>) -> Result<Self, VolError> {
        let entries = loops
            .iter()
            .map(|(id, t)| (id.as_str(), t))
            .chain(std::iter::once(("path", &path.periods)));
        for (id, t) in entries {
            if t.dim() != forms.len() {
                return Err(VolError::AlphabetMismatch {
                    entry: id.into(),
                    got: t.dim(),
                    want: forms.len(),
                });
            }
            if t.level() != level {
                return Err(VolError::EntryLevel {
                    entry: id.into(),
                    got: t.level(),
                    want: level,
                });
            }
            if !t.augmentation().is_one() {
                return Err(VolError::NonUnitEntry(id.into()));
            }
            if let Some(degree) = t.iter().filter_map(|(_, c)| c.degree()).max() {
                if degree > level {
                    return Err(VolError::EllDegree {
                        entry: id.into(),
                        degree,
                        cap: level,
                    });
                }
            }
        }
        Ok(PeriodTable { level, forms, loops, path })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn forms(&self) -> &[String] {
        &self.forms
    }

    pub fn loops(&self) -> &BTreeMap<String, Periods<S>> {
        &self.loops
    }

    pub fn path(&self) -> &BasePath<S> {
        &self.path
    }

    /// Whether every entry satisfies the shuffle relations.
    pub fn is_grouplike(&self) -> bool {
        self.loops.values().all(TruncatedTensor::is_grouplike) && self.path.periods.is_grouplike()
    }

    fn loop_periods(&self, id: &str) -> Result<&Periods<S>, VolError> {
        self.loops.get(id).ok_or_else(|| VolError::UnknownGenerator(id.into()))
    }

    fn base_path(&self, g: &Graph) -> Result<PathWord, VolError> {
        let p = g.parse_path(Some(&self.path.from), &self.path.edges)?;
        let to = g.vertex(&self.path.to)?;
        if p.end() != to {
            return Err(GraphError::EndpointMismatch(format!(
                "base path ends at `{}`, not `{}`",
                g.vertex_id(p.end()),
                self.path.to
            ))
            .into());
        }
        Ok(p)
    }
}

/// A generator of the symbolic path algebra.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Loop { id: String, inverse: bool },
    BasePath,
}

/// Rational combination of words in loop generators and the base path.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymbolicElement {
    terms: BTreeMap<Vec<Letter>, Rational>,
}

impl SymbolicElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::word(Vec::new())
    }

    pub fn word(w: Vec<Letter>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(reduce_letters(w), Rational::one());
        SymbolicElement { terms }
    }

    pub fn loop_gen(id: &str) -> Self {
        Self::word(vec![Letter::Loop {
            id: id.into(),
            inverse: false,
        }])
    }

    pub fn base_path() -> Self {
        Self::word(vec![Letter::BasePath])
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Letter>, Rational> {
        &self.terms
    }

    fn insert(&mut self, w: Vec<Letter>, c: Rational) {
        let e = self.terms.entry(w).or_insert_with(Rational::zero);
        *e += c;
        if Scalar::is_zero(e) {
            self.terms.retain(|_, c| !Scalar::is_zero(c));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.insert(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (w, d) in &self.terms {
            out.insert(w.clone(), d * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let mut w = u.clone();
                w.extend(v.iter().cloned());
                out.insert(reduce_letters(w), a * b);
            }
        }
        out
    }
}

/// Cancels adjacent `γ γ⁻¹` pairs.
fn reduce_letters(w: Vec<Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for l in w {
        match (out.last(), &l) {
            (Some(Letter::Loop { id: a, inverse: x }), Letter::Loop { id: b, inverse: y }) if a == b && x != y => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    out
}

/// `Σ_w c_w (γ_{w_1} − 1)⋯(γ_{w_k} − 1)` as a symbolic element.
pub fn correction_symbolic(q: &CanonicalCorrection, loop_ids: &[String]) -> SymbolicElement {
    let minus_one: Vec<SymbolicElement> = loop_ids
        .iter()
        .map(|id| SymbolicElement::loop_gen(id).sub(&SymbolicElement::one()))
        .collect();
    q.coeffs.iter().fold(SymbolicElement::zero(), |acc, (w, c)| {
        let mono = w.iter().fold(SymbolicElement::one(), |m, &i| m.mul(&minus_one[i]));
        acc.add(&mono.scale(c))
    })
}

/// Linear extension of the period homomorphism to symbolic elements.
pub fn bc_evaluate<S: Scalar>(t: &PeriodTable<S>, x: &SymbolicElement) -> Result<Periods<S>, VolError> {
    let dim = t.forms.len();
    let mut acc = TruncatedTensor::zero(dim, t.level);
    for (w, c) in &x.terms {
        let mut prod = TruncatedTensor::one(dim, t.level);
        for l in w {
            let factor = match l {
                Letter::BasePath => t.path.periods.clone(),
                Letter::Loop { id, inverse: false } => t.loop_periods(id)?.clone(),
                Letter::Loop { id, inverse: true } => t.loop_periods(id)?.invert().expect("unit augmentation"),
            };
            prod = prod.concat_mul(&factor).expect("uniform table");
        }
        acc = acc.add(&prod.scale_rational(c)).expect("uniform table");
    }
    Ok(acc)
}

/// The canonical correction of the table's base path, with the loop ids it
/// is expressed in.
pub fn base_correction<S: Scalar>(g: &Graph, t: &PeriodTable<S>, level: usize) -> Result<(CanonicalCorrection, Vec<String>), VolError> {
    let p = t.base_path(g)?;
    let db = dual_bases(g, p.start());
    let ids = db.loops.iter().map(|l| l.id.clone()).collect();
    Ok((canonical_correction_with(&db, &p, level), ids))
}

/// `V_a^b` truncated at `level`: the period homomorphism applied to the
/// canonical element `q · p̄`.
pub fn vologodsky<S: Scalar>(g: &Graph, t: &PeriodTable<S>, level: usize) -> Result<Periods<S>, VolError> {
    if t.level < level {
        return Err(VolError::LevelMismatch {
            table: t.level,
            requested: level,
        });
    }
    let (q, ids) = base_correction(g, t, level)?;
    let dim = t.forms.len();
    let one = TruncatedTensor::one(dim, level);
    let minus_one = ids
        .iter()
        .map(|id| Ok(t.loop_periods(id)?.truncate(level).sub(&one).expect("uniform table")))
        .collect::<Result<Vec<_>, VolError>>()?;
    let mut bc_q = TruncatedTensor::zero(dim, level);
    for (w, c) in &q.coeffs {
        let mono = w
            .iter()
            .fold(one.clone(), |acc, &i| acc.concat_mul(&minus_one[i]).expect("uniform table"));
        bc_q = bc_q.add(&mono.scale_rational(c)).expect("uniform table");
    }
    Ok(bc_q.concat_mul(&t.path.periods.truncate(level)).expect("uniform table"))
}

/// Single integrals `V∫ω_j = BC∫_p̄ ω_j − Σ_i BC∫_{γ_i} ω_j · ∫_p̄ η_i`,
/// one per analytic form.
pub fn vologodsky_single<S: Scalar>(g: &Graph, t: &PeriodTable<S>) -> Result<Vec<EllPoly<S>>, VolError> {
    if t.level < 1 {
        return Err(VolError::LevelMismatch {
            table: t.level,
            requested: 1,
        });
    }
    let p = t.base_path(g)?;
    let db = dual_bases(g, p.start());
    let chain = path_chain(&p);
    let pairings: Vec<Rational> = db
        .forms
        .iter()
        .map(|f| single_cint(g, &chain, f).expect("paths avoid half-open edges"))
        .collect();
    (0..t.forms.len())
        .map(|j| {
            let mut v = t.path.periods.coeff(&[j]).clone();
            for (l, c) in db.loops.iter().zip(&pairings) {
                let bc = t.loop_periods(&l.id)?.coeff(&[j]);
                v = v.sub_ref(&bc.scale_rational(c));
            }
            Ok(v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{rat, ratio};
    use crate::graph::tests::{cycle, spec, theta};

    type T = Periods<Rational>;

    fn ell(c0: Rational, c1: Rational) -> EllPoly<Rational> {
        EllPoly::new(vec![c0, c1])
    }

    /// `exp(Σ a_i X_i)` with ℓ-linear coefficients.
    fn grouplike(dim: usize, level: usize, lin: &[EllPoly<Rational>]) -> T {
        let mut x = TruncatedTensor::zero(dim, level);
        for (i, a) in lin.iter().enumerate() {
            x.set(&[i], a.clone()).unwrap();
        }
        x.exp().unwrap()
    }

    fn table(level: usize, forms: usize, loops: Vec<(&str, T)>, from: &str, to: &str, edges: &[&str], periods: T) -> PeriodTable<Rational> {
        PeriodTable::new(
            level,
            (0..forms).map(|i| format!("w{i}")).collect(),
            loops.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            BasePath {
                from: from.into(),
                to: to.into(),
                edges: edges.iter().map(|s| s.to_string()).collect(),
                periods,
            },
        )
        .unwrap()
    }

    #[test]
    fn constant_path_returns_periods() {
        let c = cycle(3);
        let bp = grouplike(2, 3, &[ell(rat(1), rat(2)), ell(ratio(1, 2), rat(0))]);
        let t = table(3, 2, vec![("e2", grouplike(2, 3, &[ell(rat(5), rat(1)), ell(rat(1), rat(1))]))], "v0", "v0", &[], bp.clone());
        assert_eq!(vologodsky(&c, &t, 3).unwrap(), bp);
    }

    #[test]
    fn cycle_single_integral() {
        let m = 3;
        let c = cycle(m);
        let bp = grouplike(1, 1, &[ell(rat(7), rat(0))]);
        let gamma = grouplike(1, 1, &[ell(rat(0), rat(m as i64))]);
        let t = table(1, 1, vec![("e2", gamma)], "v0", "v2", &["e1", "e2"], bp);
        let single = vologodsky_single(&c, &t).unwrap();
        // 7 − (2/3)·3ℓ
        assert_eq!(single[0], ell(rat(7), rat(-2)));
        assert_eq!(vologodsky(&c, &t, 1).unwrap().coeff(&[0]), &single[0]);
    }

    #[test]
    fn tree_has_no_correction() {
        let g = Graph::build(&spec(&["a", "b"], &[("e", "a", "b")], &[])).unwrap();
        let bp = grouplike(2, 2, &[ell(rat(1), rat(1)), ell(rat(3), rat(0))]);
        let t = table(2, 2, vec![], "a", "b", &["e"], bp.clone());
        assert_eq!(vologodsky(&g, &t, 2).unwrap(), bp);
        let single = vologodsky_single(&g, &t).unwrap();
        assert_eq!(single, vec![bp.coeff(&[0]).clone(), bp.coeff(&[1]).clone()]);
    }

    #[test]
    fn symbolic_matches_direct() {
        let t3 = theta();
        let lin = |a: i64, b: i64| vec![ell(rat(a), rat(b)), ell(rat(b), rat(-a))];
        let t = table(
            3,
            2,
            vec![("e2", grouplike(2, 3, &lin(1, 2))), ("e3", grouplike(2, 3, &lin(-1, 3)))],
            "u",
            "v",
            &["e1"],
            grouplike(2, 3, &lin(2, 5)),
        );
        let (q, ids) = base_correction(&t3, &t, 3).unwrap();
        let sym = correction_symbolic(&q, &ids).mul(&SymbolicElement::base_path());
        let direct = vologodsky(&t3, &t, 3).unwrap();
        assert_eq!(bc_evaluate(&t, &sym).unwrap(), direct);
        assert!(direct.is_grouplike());
        assert_eq!(direct.augmentation(), &EllPoly::one());
    }

    #[test]
    fn bc_evaluate_examples() {
        let c = cycle(1);
        let gamma = grouplike(1, 2, &[ell(rat(0), rat(1))]);
        let bp = grouplike(1, 2, &[ell(rat(3), rat(0))]);
        let t = table(2, 1, vec![("e1", gamma.clone())], "v0", "v0", &[], bp.clone());
        let _ = c;
        assert!(bc_evaluate(&t, &SymbolicElement::one()).unwrap().is_one());
        let g2 = SymbolicElement::loop_gen("e1").mul(&SymbolicElement::loop_gen("e1"));
        assert_eq!(bc_evaluate(&t, &g2).unwrap(), gamma.concat_mul(&gamma).unwrap());
        let x = SymbolicElement::loop_gen("e1").sub(&SymbolicElement::one()).mul(&SymbolicElement::base_path());
        let v = bc_evaluate(&t, &x).unwrap();
        assert!(v.augmentation().is_zero());
        assert_eq!(v, gamma.concat_mul(&bp).unwrap().sub(&bp).unwrap());
        let inv = SymbolicElement::word(vec![
            Letter::Loop { id: "e1".into(), inverse: false },
            Letter::Loop { id: "e1".into(), inverse: true },
        ]);
        assert_eq!(inv, SymbolicElement::one());
        assert_eq!(
            bc_evaluate(&t, &SymbolicElement::loop_gen("zz")),
            Err(VolError::UnknownGenerator("zz".into()))
        );
    }

    #[test]
    fn table_validation() {
        let bad = grouplike(1, 1, &[EllPoly::new(vec![rat(0), rat(0), rat(1)])]);
        let r = PeriodTable::new(
            1,
            vec!["w".into()],
            BTreeMap::new(),
            BasePath {
                from: "v0".into(),
                to: "v0".into(),
                edges: vec![],
                periods: bad,
            },
        );
        assert!(matches!(r, Err(VolError::EllDegree { .. })));
        let c = cycle(2);
        let t = table(1, 1, vec![], "v0", "v1", &["e1"], grouplike(1, 1, &[ell(rat(1), rat(0))]));
        assert!(matches!(vologodsky(&c, &t, 2), Err(VolError::LevelMismatch { .. })));
        assert_eq!(vologodsky(&c, &t, 1), Err(VolError::UnknownGenerator("e2".into())));
        let t = table(1, 1, vec![], "v0", "v0", &["e1"], grouplike(1, 1, &[ell(rat(1), rat(0))]));
        assert!(matches!(vologodsky(&c, &t, 1), Err(VolError::Graph(_))));
    }
}
