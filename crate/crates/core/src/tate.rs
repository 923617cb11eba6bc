//! Exact period data for Tate curves `C_p^* / p^{mZ}` and the closed-form
//! Vologodsky integrals they must produce.
//!
//! The dual graph is an `m`-cycle with vertex `v_i` at `i ∈ R/mZ` and edge
//! `e_{i+1}` from `v_i` to `v_{i+1}`. A point `x` reduces to the vertex
//! indexed by `val(x) mod m`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coeffs::{branch_log, EllPoly, Padic, PadicError, Rational, Scalar};
use crate::graph::{ClosedEdgeSpec, Graph, GraphSpec};
use crate::tensor::TruncatedTensor;
use crate::vologodsky::{BasePath, PeriodTable, VolError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TateError {
    #[error("points must be nonzero")]
    ZeroPoint,
    #[error("component count must be at least 1")]
    NoComponents,
    #[error("point is given over p = {got}, expected {want}")]
    PrimeMismatch { got: u64, want: u64 },
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Table(#[from] VolError),
}

/// A Tate curve with Tate parameter `p^m`, two points, and a truncation level.
#[derive(Clone, Debug, PartialEq)]
pub struct TateCurveSpec {
    pub p: u64,
    pub m: usize,
    pub prec: u32,
    pub a: Padic,
    pub b: Padic,
    pub level: usize,
}

impl TateCurveSpec {
    /// Points given as rationals are approximated to `prec` digits.
    pub fn from_rationals(p: u64, m: usize, prec: u32, a: &Rational, b: &Rational, level: usize) -> Result<Self, TateError> {
        Self::new(p, m, prec, Padic::exact(a.clone()), Padic::exact(b.clone()), level)
    }

    pub fn new(p: u64, m: usize, prec: u32, a: Padic, b: Padic, level: usize) -> Result<Self, TateError> {
        if m == 0 {
            return Err(TateError::NoComponents);
        }
        let norm = |x: Padic| -> Result<Padic, TateError> {
            let x = match x.as_exact() {
                Some(r) => Padic::approx(r, p, prec)?,
                None => x,
            };
            match x.prime() {
                Some(q) if q != p => Err(TateError::PrimeMismatch { got: q, want: p }),
                _ if x.valuation_at(p).is_none() => Err(TateError::ZeroPoint),
                _ => Ok(x),
            }
        };
        Ok(TateCurveSpec {
            p,
            m,
            prec,
            a: norm(a)?,
            b: norm(b)?,
            level,
        })
    }

    /// Integer lifts `ā = val(a)`, `b̄ = val(b)` of the reductions.
    pub fn lifts(&self) -> (i64, i64) {
        let v = |x: &Padic| x.valuation_at(self.p).expect("nonzero point");
        (v(&self.a), v(&self.b))
    }
}

fn vertex(i: i64, m: usize) -> String {
    format!("v{}", i.rem_euclid(m as i64))
}

/// The `m`-cycle; for `m = 1` a single vertex with a loop.
pub fn tate_graph(m: usize) -> Graph {
    let spec = GraphSpec {
        vertices: (0..m).map(|i| format!("v{i}")).collect(),
        closed_edges: (0..m)
            .map(|i| ClosedEdgeSpec {
                id: format!("e{}", i + 1),
                from: format!("v{i}"),
                to: vertex(i as i64 + 1, m),
            })
            .collect(),
        half_open_edges: Vec::new(),
    };
    Graph::build(&spec).expect("cycle graphs are valid")
}

/// The edge word from `ā` to `b̄` walking `R/mZ` in the direction of
/// `b̄ − ā`.
pub fn tate_path(m: usize, from: i64, to: i64) -> Vec<String> {
    let mm = m as i64;
    if to >= from {
        (from..to).map(|i| format!("e{}", i.rem_euclid(mm) + 1)).collect()
    } else {
        (to..from)
            .rev()
            .map(|i| format!("-e{}", i.rem_euclid(mm) + 1))
            .collect()
    }
}

/// `exp(x · X)` on a one-letter alphabet.
fn exp_line(x: EllPoly<Padic>, level: usize) -> TruncatedTensor<EllPoly<Padic>> {
    let mut t = TruncatedTensor::zero(1, level);
    if level > 0 {
        t.set(&[0], x).expect("letter 0");
    }
    t.exp().expect("zero augmentation")
}

fn log_difference(spec: &TateCurveSpec) -> Result<EllPoly<Padic>, TateError> {
    Ok(branch_log(&spec.b)?.sub_ref(&branch_log(&spec.a)?))
}

/// Period table with one analytic form `ν`: the loop has periods
/// `(mℓ)^k/k!`, the base path `(Log b − Log a)^k/k!`.
pub fn tate_periods(spec: &TateCurveSpec) -> Result<PeriodTable<Padic>, TateError> {
    let g = tate_graph(spec.m);
    let (a, b) = spec.lifts();
    let base = g.vertex(&vertex(a, spec.m)).expect("vertex exists");
    let m_ell = EllPoly::new(vec![Padic::zero(), Padic::from_int(spec.m as i64)]);
    let loops: BTreeMap<_, _> = g
        .cycle_basis(base)
        .into_iter()
        .map(|l| (l.id, exp_line(m_ell.clone(), spec.level)))
        .collect();
    let path = BasePath {
        from: vertex(a, spec.m),
        to: vertex(b, spec.m),
        edges: tate_path(spec.m, a, b),
        periods: exp_line(log_difference(spec)?, spec.level),
    };
    Ok(PeriodTable::new(spec.level, vec!["nu".into()], loops, path)?)
}

/// `Δ = Log b − Log a − ℓ(b̄ − ā)`.
pub fn tate_delta(spec: &TateCurveSpec) -> Result<EllPoly<Padic>, TateError> {
    let (a, b) = spec.lifts();
    let shift = EllPoly::new(vec![Padic::zero(), Padic::from_int(b - a)]);
    Ok(log_difference(spec)?.sub_ref(&shift))
}

/// The expected Vologodsky tensor, with coefficient `Δ^k/k!` on `ν^k`.
pub fn tate_expected(spec: &TateCurveSpec) -> Result<TruncatedTensor<EllPoly<Padic>>, TateError> {
    Ok(exp_line(tate_delta(spec)?, spec.level))
}
