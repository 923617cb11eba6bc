//! Tropical 1-forms: antisymmetric, harmonic edge functions.
//!
//! A form stores one value per edge record, on the stored orientation;
//! `η(ē) = -η(e)` holds by construction. Single combinatorial integration
//! pairs formal sums of closed edges with forms, and dual bases against
//! fundamental cycles are found by exact linear solves.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coeffs::{Rational, Scalar};
use crate::graph::{DirEdge, Endpoint, FundamentalLoop, Graph, PathWord};
use crate::linalg;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("form has {got} values but the graph has {want} edges")]
    WrongLength { got: usize, want: usize },
    #[error("harmonicity fails at vertex `{0}`")]
    NotHarmonic(String),
    #[error("half-open edge `{0}` in a chain")]
    HalfOpenEdgeInChain(String),
    #[error("pullback is not harmonic at vertex `{0}`")]
    NotHarmonicAfterPullback(String),
    #[error("invalid weak embedding: {0}")]
    InvalidEmbedding(String),
    #[error("loops do not form a basis of H_1 of the core")]
    NotABasis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalOneForm {
    values: Vec<Rational>,
}

impl TropicalOneForm {
    /// Builds a form from per-edge values on the stored orientations and
    /// checks harmonicity.
    pub fn new(g: &Graph, values: Vec<Rational>) -> Result<Self, FormError> {
        if values.len() != g.edge_count() {
            return Err(FormError::WrongLength {
                got: values.len(),
                want: g.edge_count(),
            });
        }
        let form = TropicalOneForm { values };
        if let Some(v) = form.harmonicity_defect(g) {
            return Err(FormError::NotHarmonic(g.vertex_id(v).to_string()));
        }
        Ok(form)
    }

    pub fn zero(g: &Graph) -> Self {
        TropicalOneForm {
            values: vec![Rational::zero(); g.edge_count()],
        }
    }

    /// `η(d)`, with the sign flipped on reversed edges.
    pub fn value(&self, d: DirEdge) -> Rational {
        let v = &self.values[d.edge];
        if d.reversed {
            -v
        } else {
            v.clone()
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// First vertex where `Σ_{i(e)=v} η(e) ≠ 0`, if any.
    fn harmonicity_defect(&self, g: &Graph) -> Option<usize> {
        (0..g.vertex_count()).find(|&v| {
            let s = g
                .star(v)
                .into_iter()
                .fold(Rational::zero(), |acc, d| acc + self.value(d));
            !Scalar::is_zero(&s)
        })
    }

    pub fn is_harmonic(&self, g: &Graph) -> bool {
        self.harmonicity_defect(g).is_none()
    }

    pub fn add(&self, other: &Self) -> Self {
        TropicalOneForm {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TropicalOneForm {
            values: self.values.iter().map(|a| a * c).collect(),
        }
    }

    /// The associated log-homology representative `Σ_e η(e) e`, as
    /// `(edge, coefficient)` on stored orientations, zero terms omitted.
    pub fn to_cycle(&self) -> Vec<(usize, Rational)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, c)| !Scalar::is_zero(*c))
            .map(|(e, c)| (e, c.clone()))
            .collect()
    }
}

/// Vertex-by-edge matrix of the harmonicity conditions.
fn harmonicity_matrix(g: &Graph) -> Vec<Vec<Rational>> {
    (0..g.vertex_count())
        .map(|v| {
            let mut row = vec![Rational::zero(); g.edge_count()];
            for d in g.star(v) {
                row[d.edge] += Rational::from_int(d.sign());
            }
            row
        })
        .collect()
}

/// A basis of `Ω¹(Γ)`, from the reduced row echelon nullspace of the
/// harmonicity system (one basis form per free edge, in edge order).
pub fn forms_basis(g: &Graph) -> Vec<TropicalOneForm> {
    linalg::nullspace(&harmonicity_matrix(g), g.edge_count())
        .into_iter()
        .map(|values| TropicalOneForm { values })
        .collect()
}

/// A formal sum of closed directed edges.
pub type Chain = Vec<(DirEdge, Rational)>;

/// The chain `e_1 + ... + e_k` carried by a path.
pub fn path_chain(p: &PathWord) -> Chain {
    p.edges().iter().map(|&d| (d, Rational::one())).collect()
}

/// Single combinatorial integration: the linear extension of `e ↦ η(e)`.
pub fn single_cint(g: &Graph, chain: &[(DirEdge, Rational)], form: &TropicalOneForm) -> Result<Rational, FormError> {
    let mut acc = Rational::zero();
    for (d, c) in chain {
        if !g.is_closed(d.edge) {
            return Err(FormError::HalfOpenEdgeInChain(g.edge_id(d.edge).to_string()));
        }
        acc += c * form.value(*d);
    }
    Ok(acc)
}

/// Loops `C_1..C_h` and forms `η_1..η_h` with `∫_{C_j} η_i = δ_ij`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualBases {
    pub loops: Vec<FundamentalLoop>,
    pub forms: Vec<TropicalOneForm>,
}

/// Dual bases based at `base`: the fundamental cycles of the core and the
/// unique forms of the core dual to them, extended by zero to half-open
/// edges.
pub fn dual_bases(g: &Graph, base: usize) -> DualBases {
    let loops = g.cycle_basis(base);
    let paths: Vec<PathWord> = loops.iter().map(|l| l.path.clone()).collect();
    let forms = dual_forms(g, &paths).expect("fundamental cycles form a basis");
    DualBases { loops, forms }
}

/// Forms supported on closed edges, dual to the given loops. The loops
/// must represent a basis of `H_1` of the core.
pub fn dual_forms(g: &Graph, loops: &[PathWord]) -> Result<Vec<TropicalOneForm>, FormError> {
    let h = g.betti();
    if loops.len() != h {
        return Err(FormError::NotABasis);
    }
    let closed = g.closed_edge_count();
    let core = g.core();
    let mut system = harmonicity_matrix(&core);
    let mut periods = vec![vec![Rational::zero(); closed]; h];
    for (row, l) in periods.iter_mut().zip(loops) {
        for &d in l.edges() {
            row[d.edge] += Rational::from_int(d.sign());
        }
    }
    system.extend(periods);
    (0..h)
        .map(|i| {
            let mut rhs = vec![Rational::zero(); core.vertex_count()];
            rhs.extend((0..h).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            let mut values = linalg::solve(&system, &rhs).ok_or(FormError::NotABasis)?;
            values.resize(g.edge_count(), Rational::zero());
            Ok(TropicalOneForm { values })
        })
        .collect::<Result<Vec<_>, _>>()
        .and_then(|forms| {
            // the solve fixes free variables at zero; a non-basis shows up as
            // a failed duality check rather than an inconsistency
            for (i, f) in forms.iter().enumerate() {
                for (j, l) in loops.iter().enumerate() {
                    let v = single_cint(g, &path_chain(l), f)?;
                    let want = if i == j { Rational::one() } else { Rational::zero() };
                    if v != want {
                        return Err(FormError::NotABasis);
                    }
                }
            }
            Ok(forms)
        })
}

/// Image of a half-open edge under a weak embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfOpenImage {
    /// Collapsed onto the image of its vertex.
    Contracted,
    /// Onto a half-open edge, oriented away from the image vertex.
    HalfOpen(DirEdge),
    /// Onto a closed edge leaving the image vertex whose far end lies
    /// outside the image.
    Closed(DirEdge),
}

/// A weak embedding `Γ → Γ'`: injective on vertices and closed directed
/// edges, with one of three dispositions per half-open edge, and surjective
/// from each star onto the star of the image vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakEmbedding {
    vertex_map: Vec<usize>,
    closed_map: Vec<DirEdge>,
    half_open_map: Vec<HalfOpenImage>,
}

fn invalid(msg: impl Into<String>) -> FormError {
    FormError::InvalidEmbedding(msg.into())
}

impl WeakEmbedding {
    /// `closed_map[e]` is the image of the stored orientation of closed edge
    /// `e`; `half_open_map[k]` is the image of the `k`-th half-open edge,
    /// oriented away from its vertex.
    pub fn new(
        source: &Graph,
        target: &Graph,
        vertex_map: Vec<usize>,
        closed_map: Vec<DirEdge>,
        half_open_map: Vec<HalfOpenImage>,
    ) -> Result<Self, FormError> {
        if vertex_map.len() != source.vertex_count()
            || closed_map.len() != source.closed_edge_count()
            || half_open_map.len() != source.half_open_edge_count()
        {
            return Err(invalid("map sizes do not match the source graph"));
        }
        let mut seen = vec![false; target.vertex_count()];
        for &w in &vertex_map {
            if w >= target.vertex_count() || std::mem::replace(&mut seen[w], true) {
                return Err(invalid("vertex map is not injective"));
            }
        }
        let f = WeakEmbedding {
            vertex_map,
            closed_map,
            half_open_map,
        };
        let mut edge_seen = vec![false; target.edge_count()];
        for e in source.closed_edges() {
            let d = DirEdge::forward(e);
            let img = f.closed_map[e];
            if img.edge >= target.edge_count() || !target.is_closed(img.edge) {
                return Err(invalid(format!("closed edge `{}` must map to a closed edge", source.edge_id(e))));
            }
            if std::mem::replace(&mut edge_seen[img.edge], true) {
                return Err(invalid("closed edge map is not injective"));
            }
            if target.initial(img) != f.map_endpoint(source.initial(d))
                || target.terminal(img) != f.map_endpoint(source.terminal(d))
            {
                return Err(invalid(format!("edge `{}` does not respect endpoints", source.edge_id(e))));
            }
        }
        for (k, e) in source.half_open_edges().enumerate() {
            let from = f.map_endpoint(source.initial(DirEdge::forward(e)));
            match f.half_open_map[k] {
                HalfOpenImage::Contracted => {}
                HalfOpenImage::HalfOpen(img) => {
                    if img.edge >= target.edge_count()
                        || target.is_closed(img.edge)
                        || target.initial(img) != from
                        || target.terminal(img) != Endpoint::Open
                    {
                        return Err(invalid(format!("half-open edge `{}` has a bad half-open image", source.edge_id(e))));
                    }
                }
                HalfOpenImage::Closed(img) => {
                    let far_in_image = match target.terminal(img) {
                        Endpoint::Vertex(w) => f.vertex_map.contains(&w),
                        Endpoint::Open => true,
                    };
                    if img.edge >= target.edge_count()
                        || !target.is_closed(img.edge)
                        || target.initial(img) != from
                        || far_in_image
                    {
                        return Err(invalid(format!("half-open edge `{}` has a bad closed image", source.edge_id(e))));
                    }
                }
            }
        }
        for v in 0..source.vertex_count() {
            let images: Vec<DirEdge> = source
                .star(v)
                .into_iter()
                .filter_map(|d| f.map_dir_edge(source, d))
                .collect();
            if target
                .star(f.vertex_map[v])
                .into_iter()
                .any(|d| !images.contains(&d))
            {
                return Err(invalid(format!(
                    "star of `{}` does not surject onto its image star",
                    source.vertex_id(v)
                )));
            }
        }
        Ok(f)
    }

    /// The inclusion of the core, `Γ̄ → Γ`.
    pub fn core_inclusion(g: &Graph) -> Self {
        WeakEmbedding {
            vertex_map: (0..g.vertex_count()).collect(),
            closed_map: g.closed_edges().map(DirEdge::forward).collect(),
            half_open_map: Vec::new(),
        }
    }

    pub fn identity(g: &Graph) -> Self {
        WeakEmbedding {
            vertex_map: (0..g.vertex_count()).collect(),
            closed_map: g.closed_edges().map(DirEdge::forward).collect(),
            half_open_map: g
                .half_open_edges()
                .map(|e| HalfOpenImage::HalfOpen(DirEdge::forward(e)))
                .collect(),
        }
    }

    pub fn vertex(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    fn map_endpoint(&self, p: Endpoint) -> Endpoint {
        match p {
            Endpoint::Vertex(v) => Endpoint::Vertex(self.vertex_map[v]),
            Endpoint::Open => Endpoint::Open,
        }
    }

    /// Image of a directed edge; `None` when it is contracted. Half-open
    /// edges pointing into `∘`-less direction map to the reverse image.
    pub fn map_dir_edge(&self, source: &Graph, d: DirEdge) -> Option<DirEdge> {
        let img = if source.is_closed(d.edge) {
            self.closed_map[d.edge]
        } else {
            match self.half_open_map[d.edge - source.closed_edge_count()] {
                HalfOpenImage::Contracted => return None,
                HalfOpenImage::HalfOpen(i) | HalfOpenImage::Closed(i) => i,
            }
        };
        Some(if d.reversed { img.bar() } else { img })
    }

    /// Image of a path of closed edges.
    pub fn map_path(&self, source: &Graph, target: &Graph, p: &PathWord) -> PathWord {
        let edges = p
            .edges()
            .iter()
            .map(|&d| self.map_dir_edge(source, d).expect("closed edges are never contracted"))
            .collect();
        PathWord::new(target, self.vertex_map[p.start()], edges).expect("embeddings preserve composability")
    }

    /// Pullback `ι^*η'`. Contracted half-open edges take the value forced by
    /// harmonicity at their vertex (the first one at a vertex absorbs the
    /// defect, later ones get zero).
    pub fn pullback(&self, source: &Graph, target: &Graph, form: &TropicalOneForm) -> Result<TropicalOneForm, FormError> {
        if form.values.len() != target.edge_count() {
            return Err(FormError::WrongLength {
                got: form.values.len(),
                want: target.edge_count(),
            });
        }
        let mut values = vec![Rational::zero(); source.edge_count()];
        let mut contracted = Vec::new();
        for (e, slot) in values.iter_mut().enumerate() {
            match self.map_dir_edge(source, DirEdge::forward(e)) {
                Some(img) => *slot = form.value(img),
                None => contracted.push(e),
            }
        }
        let pulled = TropicalOneForm { values };
        let mut values = pulled.values.clone();
        let mut absorbed = vec![false; source.vertex_count()];
        for e in contracted {
            let Endpoint::Vertex(v) = source.initial(DirEdge::forward(e)) else {
                unreachable!("half-open edges start at a vertex")
            };
            if std::mem::replace(&mut absorbed[v], true) {
                continue;
            }
            let defect = source
                .star(v)
                .into_iter()
                .fold(Rational::zero(), |acc, d| acc + pulled.value(d));
            values[e] = -defect;
        }
        let out = TropicalOneForm { values };
        match out.harmonicity_defect(source) {
            Some(v) => Err(FormError::NotHarmonicAfterPullback(source.vertex_id(v).to_string())),
            None => Ok(out),
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, mid: &Graph, next: &WeakEmbedding) -> WeakEmbedding {
        WeakEmbedding {
            vertex_map: self.vertex_map.iter().map(|&v| next.vertex_map[v]).collect(),
            closed_map: self
                .closed_map
                .iter()
                .map(|&d| next.map_dir_edge(mid, d).expect("closed edges are never contracted"))
                .collect(),
            half_open_map: self
                .half_open_map
                .iter()
                .map(|&img| match img {
                    HalfOpenImage::Contracted => HalfOpenImage::Contracted,
                    HalfOpenImage::Closed(d) => HalfOpenImage::Closed(
                        next.map_dir_edge(mid, d).expect("closed edges are never contracted"),
                    ),
                    HalfOpenImage::HalfOpen(d) => {
                        match next.half_open_map[d.edge - mid.closed_edge_count()] {
                            HalfOpenImage::Contracted => HalfOpenImage::Contracted,
                            other => other,
                        }
                    }
                })
                .collect(),
        }
    }
}

/// Form values keyed by edge id, on stored orientations.
pub fn form_by_id(g: &Graph, form: &TropicalOneForm) -> BTreeMap<String, Rational> {
    (0..g.edge_count())
        .map(|e| (g.edge_id(e).to_string(), form.values[e].clone()))
        .collect()
}
