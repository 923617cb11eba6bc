//! Graphs with closed and half-open edges, path words, and the path group
//! algebra.
//!
//! A graph carries one record per undirected edge. A closed edge joins two
//! vertices (possibly the same one); a half-open edge has a single vertex and
//! a missing far end `∘`. Directed edges are a record index plus an
//! orientation flag, so the involution `e ↦ ē` is a bit flip and never has
//! fixed points.
//!
//! Closed edges are always indexed before half-open ones. Discarding the
//! half-open edges therefore keeps every closed-edge index, and path words
//! are valid in both a graph and its core.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffs::{Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` references undeclared vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
    #[error("invalid id `{0}`")]
    InvalidId(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("path is not composable at position {0}")]
    NotComposable(usize),
    #[error("half-open edge `{0}` cannot occur in a path")]
    HalfOpenInPath(String),
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
}

/// A directed edge: an edge record together with an orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirEdge {
    pub edge: usize,
    pub reversed: bool,
}

impl DirEdge {
    pub fn forward(edge: usize) -> Self {
        DirEdge {
            edge,
            reversed: false,
        }
    }

    pub fn backward(edge: usize) -> Self {
        DirEdge {
            edge,
            reversed: true,
        }
    }

    /// The involution `ē`.
    pub fn bar(self) -> Self {
        DirEdge {
            edge: self.edge,
            reversed: !self.reversed,
        }
    }

    /// `+1` for the stored orientation, `-1` for its reverse.
    pub fn sign(self) -> i64 {
        if self.reversed {
            -1
        } else {
            1
        }
    }
}

/// Initial point of a directed edge: a vertex or the missing point `∘`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Vertex(usize),
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedEdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfOpenEdgeSpec {
    pub id: String,
    pub from: String,
}

/// Wire form of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub closed_edges: Vec<ClosedEdgeSpec>,
    #[serde(default)]
    pub half_open_edges: Vec<HalfOpenEdgeSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct EdgeRecord {
    id: String,
    from: usize,
    to: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<EdgeRecord>,
    closed_count: usize,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && !id.starts_with('-') && !id.contains(',') && id.trim() == id
}

impl Graph {
    /// Validates and builds a graph. Closed edges keep their given order and
    /// are followed by the half-open ones.
    pub fn build(spec: &GraphSpec) -> Result<Graph, GraphError> {
        if spec.vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut vertex_index = HashMap::new();
        for (i, v) in spec.vertices.iter().enumerate() {
            if !valid_id(v) {
                return Err(GraphError::InvalidId(v.clone()));
            }
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateId(v.clone()));
            }
        }
        let lookup = |edge: &str, v: &str| {
            vertex_index
                .get(v)
                .copied()
                .ok_or_else(|| GraphError::DanglingEndpoint {
                    edge: edge.to_string(),
                    vertex: v.to_string(),
                })
        };
        let mut edges = Vec::new();
        for e in &spec.closed_edges {
            edges.push(EdgeRecord {
                id: e.id.clone(),
                from: lookup(&e.id, &e.from)?,
                to: Some(lookup(&e.id, &e.to)?),
            });
        }
        for e in &spec.half_open_edges {
            edges.push(EdgeRecord {
                id: e.id.clone(),
                from: lookup(&e.id, &e.from)?,
                to: None,
            });
        }
        let mut edge_index = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if !valid_id(&e.id) {
                return Err(GraphError::InvalidId(e.id.clone()));
            }
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateId(e.id.clone()));
            }
        }
        let g = Graph {
            vertices: spec.vertices.clone(),
            edges,
            closed_count: spec.closed_edges.len(),
            vertex_index,
            edge_index,
        };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.vertices.clone(),
            closed_edges: self
                .closed_edges()
                .map(|e| ClosedEdgeSpec {
                    id: self.edges[e].id.clone(),
                    from: self.vertices[self.edges[e].from].clone(),
                    to: self.vertices[self.edges[e].to.expect("closed")].clone(),
                })
                .collect(),
            half_open_edges: self
                .half_open_edges()
                .map(|e| HalfOpenEdgeSpec {
                    id: self.edges[e].id.clone(),
                    from: self.vertices[self.edges[e].from].clone(),
                })
                .collect(),
        }
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for d in self.star(v) {
                if let Endpoint::Vertex(w) = self.terminal(d) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn closed_edge_count(&self) -> usize {
        self.closed_count
    }

    pub fn half_open_edge_count(&self) -> usize {
        self.edges.len() - self.closed_count
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn edge_id(&self, e: usize) -> &str {
        &self.edges[e].id
    }

    pub fn vertex(&self, id: &str) -> Result<usize, GraphError> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(id.to_string()))
    }

    pub fn edge(&self, id: &str) -> Result<usize, GraphError> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownEdge(id.to_string()))
    }

    pub fn closed_edges(&self) -> impl Iterator<Item = usize> {
        0..self.closed_count
    }

    pub fn half_open_edges(&self) -> impl Iterator<Item = usize> {
        self.closed_count..self.edges.len()
    }

    pub fn is_closed(&self, e: usize) -> bool {
        e < self.closed_count
    }

    pub fn is_proper(&self) -> bool {
        self.closed_count == self.edges.len()
    }

    /// `i(d)`.
    pub fn initial(&self, d: DirEdge) -> Endpoint {
        let rec = &self.edges[d.edge];
        if d.reversed {
            rec.to.map_or(Endpoint::Open, Endpoint::Vertex)
        } else {
            Endpoint::Vertex(rec.from)
        }
    }

    /// `i(d̄)`.
    pub fn terminal(&self, d: DirEdge) -> Endpoint {
        self.initial(d.bar())
    }

    /// Directed edges starting at `v`, in edge order.
    pub fn star(&self, v: usize) -> Vec<DirEdge> {
        let mut out = Vec::new();
        for (e, rec) in self.edges.iter().enumerate() {
            if rec.from == v {
                out.push(DirEdge::forward(e));
            }
            if rec.to == Some(v) {
                out.push(DirEdge::backward(e));
            }
        }
        out
    }

    /// First Betti number of the core: `|closed E| - |V| + 1`.
    pub fn betti(&self) -> usize {
        self.closed_count + 1 - self.vertices.len()
    }

    /// The proper core: the same vertices with half-open edges discarded.
    pub fn core(&self) -> Graph {
        let edges: Vec<EdgeRecord> = self.edges[..self.closed_count].to_vec();
        let edge_index = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), i))
            .collect();
        Graph {
            vertices: self.vertices.clone(),
            edges,
            closed_count: self.closed_count,
            vertex_index: self.vertex_index.clone(),
            edge_index,
        }
    }

    /// Parses `"e"` or `"-e"`.
    pub fn parse_dir_edge(&self, token: &str) -> Result<DirEdge, GraphError> {
        let token = token.trim();
        match token.strip_prefix('-') {
            Some(id) => Ok(DirEdge::backward(self.edge(id)?)),
            None => Ok(DirEdge::forward(self.edge(token)?)),
        }
    }

    pub fn format_dir_edge(&self, d: DirEdge) -> String {
        if d.reversed {
            format!("-{}", self.edges[d.edge].id)
        } else {
            self.edges[d.edge].id.clone()
        }
    }

    /// Parses a path from edge tokens. `start` is required for the empty path
    /// and otherwise checked against the first edge.
    pub fn parse_path<S: AsRef<str>>(
        &self,
        start: Option<&str>,
        tokens: &[S],
    ) -> Result<PathWord, GraphError> {
        let edges = tokens
            .iter()
            .map(|t| self.parse_dir_edge(t.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        let start = match (start, edges.first()) {
            (Some(s), _) => self.vertex(s)?,
            (None, Some(&d)) => match self.initial(d) {
                Endpoint::Vertex(v) => v,
                Endpoint::Open => return Err(GraphError::HalfOpenInPath(self.edge_id(d.edge).into())),
            },
            (None, None) => {
                return Err(GraphError::EndpointMismatch(
                    "empty path needs a start vertex".into(),
                ))
            }
        };
        PathWord::new(self, start, edges)
    }

    /// Deterministic breadth-first spanning tree of the core, rooted at the
    /// lexicographically smallest vertex id. Returns, per vertex, the
    /// directed edge from its parent (`None` at the root).
    pub fn spanning_tree(&self) -> (usize, Vec<Option<DirEdge>>) {
        let root = (0..self.vertices.len())
            .min_by(|&a, &b| self.vertices[a].cmp(&self.vertices[b]))
            .expect("non-empty");
        let mut parent = vec![None; self.vertices.len()];
        let mut seen = vec![false; self.vertices.len()];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for d in self.star(v) {
                if !self.is_closed(d.edge) {
                    continue;
                }
                if let Endpoint::Vertex(w) = self.terminal(d) {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some(d);
                        queue.push_back(w);
                    }
                }
            }
        }
        (root, parent)
    }

    fn root_path(&self, parent: &[Option<DirEdge>], v: usize) -> Vec<DirEdge> {
        let mut out = Vec::new();
        let mut cur = v;
        while let Some(d) = parent[cur] {
            out.push(d);
            cur = match self.initial(d) {
                Endpoint::Vertex(u) => u,
                Endpoint::Open => unreachable!("tree edges are closed"),
            };
        }
        out.reverse();
        out
    }

    /// Path through the spanning tree from `a` to `b`, reduced.
    pub fn tree_path(&self, a: usize, b: usize) -> PathWord {
        let (_, parent) = self.spanning_tree();
        self.tree_path_with(&parent, a, b)
    }

    fn tree_path_with(&self, parent: &[Option<DirEdge>], a: usize, b: usize) -> PathWord {
        let mut edges: Vec<DirEdge> = self
            .root_path(parent, a)
            .into_iter()
            .rev()
            .map(DirEdge::bar)
            .collect();
        edges.extend(self.root_path(parent, b));
        PathWord::new(self, a, edges)
            .expect("tree paths compose")
            .reduced()
    }

    /// Fundamental cycles of the spanning tree, based at `base`.
    ///
    /// One loop per non-tree closed edge `e`, in edge order: the tree path to
    /// `i(e)`, then `e`, then the tree path back. Their homology classes form
    /// a basis of `H_1` of the core.
    pub fn cycle_basis(&self, base: usize) -> Vec<FundamentalLoop> {
        let (_, parent) = self.spanning_tree();
        let tree: Vec<usize> = parent.iter().flatten().map(|d| d.edge).collect();
        self.closed_edges()
            .filter(|e| !tree.contains(e))
            .map(|e| {
                let d = DirEdge::forward(e);
                let (Endpoint::Vertex(s), Endpoint::Vertex(t)) = (self.initial(d), self.terminal(d))
                else {
                    unreachable!("closed edge")
                };
                let mut edges = self.tree_path_with(&parent, base, s).edges;
                edges.push(d);
                edges.extend(self.tree_path_with(&parent, t, base).edges);
                FundamentalLoop {
                    id: self.edges[e].id.clone(),
                    path: PathWord::new(self, base, edges)
                        .expect("fundamental cycle composes")
                        .reduced(),
                }
            })
            .collect()
    }
}

/// A generator loop of `π_1`, named by the non-tree edge it crosses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalLoop {
    pub id: String,
    pub path: PathWord,
}

/// A composable word of closed directed edges from `start` to `end`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathWord {
    start: usize,
    end: usize,
    edges: Vec<DirEdge>,
}

impl PathWord {
    pub fn new(g: &Graph, start: usize, edges: Vec<DirEdge>) -> Result<PathWord, GraphError> {
        if start >= g.vertex_count() {
            return Err(GraphError::UnknownVertex(start.to_string()));
        }
        let mut at = start;
        for (pos, &d) in edges.iter().enumerate() {
            if d.edge >= g.edge_count() {
                return Err(GraphError::UnknownEdge(d.edge.to_string()));
            }
            if !g.is_closed(d.edge) {
                return Err(GraphError::HalfOpenInPath(g.edge_id(d.edge).to_string()));
            }
            if g.initial(d) != Endpoint::Vertex(at) {
                return Err(GraphError::NotComposable(pos));
            }
            at = match g.terminal(d) {
                Endpoint::Vertex(w) => w,
                Endpoint::Open => unreachable!("closed edge"),
            };
        }
        Ok(PathWord {
            start,
            end: at,
            edges,
        })
    }

    pub fn constant(v: usize) -> PathWord {
        PathWord {
            start: v,
            end: v,
            edges: Vec::new(),
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn edges(&self) -> &[DirEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_loop(&self) -> bool {
        self.start == self.end
    }

    /// Free reduction: cancels adjacent `e ē` pairs until none remain.
    pub fn reduced(&self) -> PathWord {
        let mut stack: Vec<DirEdge> = Vec::with_capacity(self.edges.len());
        for &d in &self.edges {
            if stack.last() == Some(&d.bar()) {
                stack.pop();
            } else {
                stack.push(d);
            }
        }
        PathWord {
            start: self.start,
            end: self.end,
            edges: stack,
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.edges.windows(2).all(|w| w[1] != w[0].bar())
    }

    /// Path composition `self` then `other`, without reduction.
    pub fn concat(&self, other: &PathWord) -> Result<PathWord, GraphError> {
        if self.end != other.start {
            return Err(GraphError::EndpointMismatch(format!(
                "path ends at vertex {} but next starts at {}",
                self.end, other.start
            )));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(PathWord {
            start: self.start,
            end: other.end,
            edges,
        })
    }

    /// The reverse path, `ē_k ... ē_1`.
    pub fn inverse(&self) -> PathWord {
        PathWord {
            start: self.end,
            end: self.start,
            edges: self.edges.iter().rev().map(|d| d.bar()).collect(),
        }
    }

    pub fn format(&self, g: &Graph) -> Vec<String> {
        self.edges.iter().map(|&d| g.format_dir_edge(d)).collect()
    }
}

/// Reduces a raw edge word, validating composability.
pub fn reduce(g: &Graph, start: usize, edges: Vec<DirEdge>) -> Result<PathWord, GraphError> {
    Ok(PathWord::new(g, start, edges)?.reduced())
}

/// A finite rational combination of homotopy classes of paths with common
/// endpoints. Keys are reduced edge words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    start: usize,
    end: usize,
    terms: BTreeMap<Vec<DirEdge>, Rational>,
}

impl GroupAlgebraElement {
    pub fn zero(start: usize, end: usize) -> Self {
        GroupAlgebraElement {
            start,
            end,
            terms: BTreeMap::new(),
        }
    }

    /// The constant path at `v`, the unit of `K[π_1(Γ, v)]`.
    pub fn one(v: usize) -> Self {
        Self::from_path(&PathWord::constant(v))
    }

    pub fn from_path(p: &PathWord) -> Self {
        let r = p.reduced();
        let mut terms = BTreeMap::new();
        terms.insert(r.edges, Rational::one());
        GroupAlgebraElement {
            start: p.start,
            end: p.end,
            terms,
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    /// Nonzero terms as `(reduced path, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (PathWord, &Rational)> + '_ {
        self.terms.iter().map(move |(w, c)| {
            (
                PathWord {
                    start: self.start,
                    end: self.end,
                    edges: w.clone(),
                },
                c,
            )
        })
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, p: &PathWord) -> Rational {
        self.terms
            .get(&p.reduced().edges)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Sum of coefficients.
    pub fn augmentation(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |a, c| a + c)
    }

    fn insert(&mut self, word: Vec<DirEdge>, c: Rational) {
        if Scalar::is_zero(&c) {
            return;
        }
        match self.terms.entry(word) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if Scalar::is_zero(o.get()) {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    fn check_same_ends(&self, other: &Self) -> Result<(), GraphError> {
        if self.start != other.start || self.end != other.end {
            return Err(GraphError::EndpointMismatch(
                "group algebra elements have different endpoints".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, GraphError> {
        self.check_same_ends(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.insert(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GraphError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.start, self.end);
        for (w, x) in &self.terms {
            out.insert(w.clone(), x * c);
        }
        out
    }

    /// Composition: `self` from `a` to `b`, then `other` from `b` to `c`.
    pub fn mul(&self, other: &Self) -> Result<Self, GraphError> {
        if self.end != other.start {
            return Err(GraphError::EndpointMismatch(
                "group algebra product of non-composable elements".into(),
            ));
        }
        let mut out = Self::zero(self.start, other.end);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let mut w = u.clone();
                for &d in v {
                    if w.last() == Some(&d.bar()) {
                        w.pop();
                    } else {
                        w.push(d);
                    }
                }
                out.insert(w, a * b);
            }
        }
        Ok(out)
    }

    /// `γ - 1` for a loop `γ`.
    pub fn loop_minus_one(gamma: &PathWord) -> Result<Self, GraphError> {
        if !gamma.is_loop() {
            return Err(GraphError::EndpointMismatch("not a loop".into()));
        }
        Self::from_path(gamma).sub(&Self::one(gamma.start))
    }
}

impl fmt::Display for PathWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}→{} [", self.start, self.end)?;
        for (i, d) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", if d.reversed { "-" } else { "" }, d.edge)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::coeffs::rat;
    use proptest::prelude::*;

    pub fn spec(vs: &[&str], closed: &[(&str, &str, &str)], open: &[(&str, &str)]) -> GraphSpec {
        GraphSpec {
            vertices: vs.iter().map(|s| s.to_string()).collect(),
            closed_edges: closed
                .iter()
                .map(|(id, a, b)| ClosedEdgeSpec {
                    id: id.to_string(),
                    from: a.to_string(),
                    to: b.to_string(),
                })
                .collect(),
            half_open_edges: open
                .iter()
                .map(|(id, a)| HalfOpenEdgeSpec {
                    id: id.to_string(),
                    from: a.to_string(),
                })
                .collect(),
        }
    }

    pub fn petal() -> Graph {
        Graph::build(&spec(&["v"], &[("l", "v", "v")], &[])).unwrap()
    }

    pub fn theta() -> Graph {
        Graph::build(&spec(
            &["u", "v"],
            &[("e1", "u", "v"), ("e2", "u", "v"), ("e3", "u", "v")],
            &[],
        ))
        .unwrap()
    }

    pub fn cycle(m: usize) -> Graph {
        let vs: Vec<String> = (0..m).map(|i| format!("v{i}")).collect();
        let es: Vec<(String, String, String)> = (0..m)
            .map(|i| (format!("e{}", i + 1), vs[i].clone(), vs[(i + 1) % m].clone()))
            .collect();
        Graph::build(&GraphSpec {
            vertices: vs,
            closed_edges: es
                .into_iter()
                .map(|(id, from, to)| ClosedEdgeSpec { id, from, to })
                .collect(),
            half_open_edges: vec![],
        })
        .unwrap()
    }

    /// Rank of the vertex-edge boundary matrix over Q, for an independent
    /// Betti number count.
    fn boundary_rank(g: &Graph) -> usize {
        let mut rows: Vec<Vec<Rational>> = g
            .closed_edges()
            .map(|e| {
                let mut row = vec![rat(0); g.vertex_count()];
                let d = DirEdge::forward(e);
                if let (Endpoint::Vertex(a), Endpoint::Vertex(b)) = (g.initial(d), g.terminal(d)) {
                    row[a] -= rat(1);
                    row[b] += rat(1);
                }
                row
            })
            .collect();
        crate::linalg::rank(&mut rows)
    }

    #[test]
    fn petal_is_valid() {
        let g = petal();
        assert_eq!(g.betti(), 1);
        assert_eq!(g.star(0).len(), 2);
    }

    #[test]
    fn theta_betti_matches_boundary_rank() {
        let g = theta();
        assert_eq!(g.betti(), 2);
        assert_eq!(g.closed_edge_count() - boundary_rank(&g), 2);
    }

    #[test]
    fn stub_graph_and_core() {
        let g = Graph::build(&spec(&["v"], &[], &[("h", "v")])).unwrap();
        assert!(!g.is_proper());
        assert_eq!(g.initial(DirEdge::backward(0)), Endpoint::Open);
        let c = g.core();
        assert_eq!(c.edge_count(), 0);
        assert_eq!(c.vertex_count(), 1);
        assert_eq!(theta().core(), theta());
    }

    #[test]
    fn cycle_with_stubs_core_is_cycle() {
        let m = 4;
        let base = cycle(m).to_spec();
        let mut s = base.clone();
        for i in 0..m {
            s.half_open_edges.push(HalfOpenEdgeSpec {
                id: format!("h{i}"),
                from: format!("v{i}"),
            });
        }
        let g = Graph::build(&s).unwrap();
        assert_eq!(g.edge_count(), 2 * m);
        let c = g.core();
        assert_eq!(c.edge_count(), m);
        assert_eq!(c.to_spec(), base);
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            Graph::build(&spec(&["v", "v"], &[], &[])),
            Err(GraphError::DuplicateId("v".into()))
        );
        assert_eq!(
            Graph::build(&spec(&["v"], &[("e", "v", "w")], &[])),
            Err(GraphError::DanglingEndpoint {
                edge: "e".into(),
                vertex: "w".into()
            })
        );
        assert_eq!(
            Graph::build(&spec(&["a", "b"], &[], &[("h", "a")])),
            Err(GraphError::Disconnected)
        );
        assert_eq!(
            Graph::build(&spec(&["a"], &[("e", "a", "a")], &[("e", "a")])),
            Err(GraphError::DuplicateId("e".into()))
        );
        assert_eq!(Graph::build(&spec(&[], &[], &[])), Err(GraphError::Empty));
        assert!(matches!(
            Graph::build(&spec(&["a"], &[("-e", "a", "a")], &[])),
            Err(GraphError::InvalidId(_))
        ));
    }

    #[test]
    fn reduction_examples() {
        let g = cycle(4);
        let p = g.parse_path(None, &["e1", "-e1"]).unwrap();
        let r = p.reduced();
        assert!(r.is_empty());
        assert_eq!((r.start(), r.end()), (0, 0));
        let g = Graph::build(&spec(
            &["a", "b", "c"],
            &[("e1", "a", "b"), ("e2", "c", "b"), ("e3", "b", "c")],
            &[],
        ))
        .unwrap();
        let p = g.parse_path(None, &["e1", "-e2", "e2", "e3"]).unwrap();
        assert_eq!(p.reduced().format(&g), vec!["e1", "e3"]);
    }

    #[test]
    fn half_open_edges_rejected_in_paths() {
        let g = Graph::build(&spec(&["v"], &[("l", "v", "v")], &[("h", "v")])).unwrap();
        assert!(matches!(
            g.parse_path(None, &["h"]),
            Err(GraphError::HalfOpenInPath(_))
        ));
        assert!(matches!(
            g.parse_path(None, &["l", "-h"]),
            Err(GraphError::HalfOpenInPath(_))
        ));
    }

    #[test]
    fn not_composable() {
        let g = cycle(3);
        assert_eq!(
            g.parse_path(None, &["e1", "e3"]),
            Err(GraphError::NotComposable(1))
        );
    }

    #[test]
    fn cycle_basis_examples() {
        assert_eq!(petal().cycle_basis(0).len(), 1);
        let t = theta();
        let loops = t.cycle_basis(0);
        assert_eq!(loops.len(), 2);
        assert_eq!(loops[0].path.format(&t), vec!["e2", "-e1"]);
        assert_eq!(loops[1].path.format(&t), vec!["e3", "-e1"]);
        let c = cycle(5);
        for base in 0..5 {
            let loops = c.cycle_basis(base);
            assert_eq!(loops.len(), 1);
            let l = &loops[0].path;
            assert_eq!(l.len(), 5);
            assert!(l.edges().iter().all(|d| !d.reversed), "positive orientation");
            assert_eq!((l.start(), l.end()), (base, base));
        }
    }

    #[test]
    fn group_algebra_augmentation() {
        let g = cycle(3);
        let gamma = &g.cycle_basis(0)[0].path;
        let x = GroupAlgebraElement::loop_minus_one(gamma).unwrap();
        assert_eq!(x.augmentation(), rat(0));
        let sq = x.mul(&x).unwrap();
        assert_eq!(sq.augmentation(), rat(0));
        assert_eq!(sq.term_count(), 3);
        let inv = GroupAlgebraElement::from_path(&gamma.inverse());
        let prod = GroupAlgebraElement::from_path(gamma).mul(&inv).unwrap();
        assert_eq!(prod, GroupAlgebraElement::one(0));
    }

    /// Brute-force reduction: cancel one adjacent backtrack at a time.
    fn reduce_oracle(mut w: Vec<DirEdge>) -> Vec<DirEdge> {
        loop {
            match (1..w.len()).find(|&i| w[i] == w[i - 1].bar()) {
                Some(i) => {
                    w.drain(i - 1..=i);
                }
                None => return w,
            }
        }
    }

    /// Random walk of closed edges on a fixed test graph.
    fn walk(g: &Graph, start: usize, choices: &[usize]) -> PathWord {
        let mut at = start;
        let mut edges = Vec::new();
        for &c in choices {
            let star: Vec<DirEdge> = g
                .star(at)
                .into_iter()
                .filter(|d| g.is_closed(d.edge))
                .collect();
            let d = star[c % star.len()];
            edges.push(d);
            if let Endpoint::Vertex(w) = g.terminal(d) {
                at = w;
            }
        }
        PathWord::new(g, start, edges).unwrap()
    }

    proptest! {
        #[test]
        fn reduce_matches_oracle(choices in prop::collection::vec(0usize..6, 0..24)) {
            let g = theta();
            let p = walk(&g, 0, &choices);
            let r = p.reduced();
            prop_assert_eq!(r.edges().to_vec(), reduce_oracle(p.edges().to_vec()));
            prop_assert!(r.is_reduced());
            prop_assert_eq!(r.reduced(), r.clone());
            prop_assert_eq!((r.start(), r.end()), (p.start(), p.end()));
        }

        #[test]
        fn reduce_is_a_congruence(a in prop::collection::vec(0usize..6, 0..12),
                                  b in prop::collection::vec(0usize..6, 0..12)) {
            let g = theta();
            let u = walk(&g, 0, &a);
            let v = walk(&g, u.end(), &b);
            let lhs = u.concat(&v).unwrap().reduced();
            let rhs = u.reduced().concat(&v.reduced()).unwrap().reduced();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
