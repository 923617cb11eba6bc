//! Random generators and slow reference implementations shared by the
//! integration tests. Nothing here calls the library's integration code;
//! the oracles are written from the defining rules directly.

#![allow(dead_code)]

use combint::coeffs::{factorial, Scalar};
use combint::graph::{ClosedEdgeSpec, GraphSpec, HalfOpenEdgeSpec};
use combint::linalg::Matrix;
use combint::{forms_basis, DirEdge, EllPoly, Graph, PathWord, Rational, TropicalOneForm, TruncatedTensor};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng8 {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn rational(rng: &mut Rng8) -> Rational {
    Rational::new(rng.gen_range(-6i64..=6).into(), rng.gen_range(1i64..=4).into())
}

/// Connected graph: a random spanning tree plus extra closed edges (loops
/// and multi-edges allowed) and some half-open edges, at most `max_edges`
/// edges in total.
pub fn random_graph(rng: &mut Rng8, max_vertices: usize, max_edges: usize, min_extra: usize, max_half_open: usize) -> Graph {
    let nv = rng.gen_range(1..=max_vertices);
    let mut ids: Vec<String> = (0..nv).map(|i| format!("x{i}")).collect();
    ids.shuffle(rng);
    let mut tree = Vec::new();
    for i in 1..nv {
        tree.push((i, rng.gen_range(0..i)));
    }
    let room = max_edges.saturating_sub(nv - 1);
    let extra = rng.gen_range(min_extra.min(room)..=room.min(min_extra + 4));
    let mut pairs = tree;
    for _ in 0..extra {
        pairs.push((rng.gen_range(0..nv), rng.gen_range(0..nv)));
    }
    pairs.shuffle(rng);
    let mut closed = Vec::new();
    for (a, b) in pairs {
        let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        closed.push(ClosedEdgeSpec {
            id: format!("e{}", closed.len() + 1),
            from: ids[a].clone(),
            to: ids[b].clone(),
        });
    }
    let room = max_edges - closed.len();
    let nh = rng.gen_range(0..=max_half_open.min(room));
    let half_open = (0..nh)
        .map(|i| HalfOpenEdgeSpec {
            id: format!("h{}", i + 1),
            from: ids[rng.gen_range(0..nv)].clone(),
        })
        .collect();
    Graph::build(&GraphSpec {
        vertices: ids,
        closed_edges: closed,
        half_open_edges: half_open,
    })
    .expect("generated graphs are valid")
}

/// Closed directed edges leaving `v`.
pub fn closed_star(g: &Graph, v: usize) -> Vec<DirEdge> {
    g.star(v).into_iter().filter(|d| g.is_closed(d.edge)).collect()
}

fn end_of(g: &Graph, d: DirEdge) -> usize {
    match g.terminal(d) {
        combint::graph::Endpoint::Vertex(w) => w,
        combint::graph::Endpoint::Open => unreachable!("closed edge"),
    }
}

/// A non-backtracking walk of length at most `len` from `start`.
pub fn random_reduced_path(rng: &mut Rng8, g: &Graph, start: usize, len: usize) -> PathWord {
    let mut at = start;
    let mut edges: Vec<DirEdge> = Vec::new();
    for _ in 0..len {
        let choices: Vec<DirEdge> = closed_star(g, at)
            .into_iter()
            .filter(|d| edges.last().is_none_or(|l| *d != l.bar()))
            .collect();
        let Some(&d) = choices.choose(rng) else { break };
        edges.push(d);
        at = end_of(g, d);
    }
    PathWord::new(g, start, edges).expect("walks compose")
}

/// A walk that may backtrack.
pub fn random_walk(rng: &mut Rng8, g: &Graph, start: usize, len: usize) -> PathWord {
    let mut at = start;
    let mut edges = Vec::new();
    for _ in 0..len {
        let Some(&d) = closed_star(g, at).choose(rng) else { break };
        edges.push(d);
        at = end_of(g, d);
    }
    PathWord::new(g, start, edges).expect("walks compose")
}

/// A reduced loop at `base`: a walk, closed up by a walk back along a
/// breadth-first path.
pub fn random_loop(rng: &mut Rng8, g: &Graph, base: usize, len: usize) -> PathWord {
    let p = random_walk(rng, g, base, len);
    let back = bfs_path(g, p.end(), base);
    p.concat(&back).expect("ends meet").reduced()
}

/// Shortest path by breadth-first search, written independently of the
/// library's spanning tree.
pub fn bfs_path(g: &Graph, from: usize, to: usize) -> PathWord {
    let mut prev: Vec<Option<DirEdge>> = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    seen[from] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for d in closed_star(g, v) {
            let w = end_of(g, d);
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some(d);
                queue.push_back(w);
            }
        }
    }
    let mut edges = Vec::new();
    let mut at = to;
    while at != from {
        let d = prev[at].expect("connected");
        edges.push(d);
        at = match g.initial(d) {
            combint::graph::Endpoint::Vertex(v) => v,
            combint::graph::Endpoint::Open => unreachable!(),
        };
    }
    edges.reverse();
    PathWord::new(g, from, edges).expect("bfs path composes")
}

/// A random element of `Ω¹(Γ)`.
pub fn random_form(rng: &mut Rng8, g: &Graph) -> TropicalOneForm {
    forms_basis(g)
        .iter()
        .fold(TropicalOneForm::zero(g), |acc, b| acc.add(&b.scale(&rational(rng))))
}

/// Sum over ways of cutting the word into consecutive blocks, one per
/// edge (blocks may be empty): each edge contributes `∏ η(e) / |block|!`.
pub fn cint_oracle(p: &PathWord, word: &[&TropicalOneForm]) -> Rational {
    fn go(edges: &[DirEdge], word: &[&TropicalOneForm]) -> Rational {
        match edges.split_first() {
            None => {
                if word.is_empty() {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            Some((&e, rest)) => (0..=word.len())
                .map(|k| {
                    let block = word[..k].iter().fold(Rational::one(), |a, f| a * f.value(e)) / factorial(k);
                    block * go(rest, &word[k..])
                })
                .fold(Rational::zero(), |a, b| a + b),
        }
    }
    go(p.edges(), word)
}

/// Matrix analogue of [`cint_oracle`]: blocks multiply in letter order
/// (later letters on the left) and edges compose with later edges on the
/// left.
pub fn cint_matrix_oracle(p: &PathWord, layers: &[Vec<Vec<Option<TropicalOneForm>>>], n0: usize) -> Matrix<Rational> {
    fn at(layer: &[Vec<Option<TropicalOneForm>>], d: DirEdge) -> Matrix<Rational> {
        Matrix::from_rows(
            layer
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|f| f.as_ref().map_or_else(Rational::zero, |f| f.value(d)))
                        .collect()
                })
                .collect(),
        )
    }
    fn go(edges: &[DirEdge], layers: &[Vec<Vec<Option<TropicalOneForm>>>], done: usize, acc: Matrix<Rational>) -> Matrix<Rational> {
        match edges.split_first() {
            None => {
                if done == layers.len() {
                    acc
                } else {
                    Matrix::zeros(layers.last().unwrap().len(), acc.cols())
                }
            }
            Some((&e, rest)) => {
                let mut total: Option<Matrix<Rational>> = None;
                let mut block = acc.clone();
                for k in 0..=(layers.len() - done) {
                    if k > 0 {
                        block = at(&layers[done + k - 1], e).mul(&block);
                    }
                    let term = go(rest, layers, done + k, block.scale(&(Rational::one() / factorial(k))));
                    total = Some(match total {
                        None => term,
                        Some(t) => t.add(&term),
                    });
                }
                total.unwrap()
            }
        }
    }
    let out_rows = layers.last().map_or(n0, |l| l.len());
    if p.is_empty() && !layers.is_empty() {
        return Matrix::zeros(out_rows, n0);
    }
    go(p.edges(), layers, 0, Matrix::identity(n0))
}

/// All interleavings of `u` and `v`, with multiplicity, by choosing which
/// positions of the merged word come from `u`.
pub fn shuffles(u: &[usize], v: &[usize]) -> Vec<Vec<usize>> {
    let n = u.len() + v.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != u.len() {
            continue;
        }
        let (mut i, mut j) = (0, 0);
        let w = (0..n)
            .map(|k| {
                if mask & (1 << k) != 0 {
                    i += 1;
                    u[i - 1]
                } else {
                    j += 1;
                    v[j - 1]
                }
            })
            .collect();
        out.push(w);
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// `exp(x)` for a primitive `x` built from random ℓ-linear level-1
/// coefficients and random commutators at level 2.
pub fn random_grouplike(rng: &mut Rng8, dim: usize, level: usize) -> TruncatedTensor<EllPoly<Rational>> {
    let mut x = TruncatedTensor::zero(dim, level);
    if level >= 1 {
        for i in 0..dim {
            let c = EllPoly::new(vec![rational(rng), if rng.gen_bool(0.5) { rational(rng) } else { Rational::zero() }]);
            x.set(&[i], c).unwrap();
        }
    }
    if level >= 2 {
        for i in 0..dim {
            for j in (i + 1)..dim {
                let c = EllPoly::constant(rational(rng));
                let prev = x.coeff(&[i, j]).clone();
                x.set(&[i, j], prev.add_ref(&c)).unwrap();
                let prev = x.coeff(&[j, i]).clone();
                x.set(&[j, i], prev.sub_ref(&c)).unwrap();
            }
        }
    }
    x.exp().unwrap()
}

/// A period homomorphism: one grouplike tensor per closed edge, extended
/// multiplicatively along paths.
pub struct EdgePeriods {
    pub per_edge: Vec<TruncatedTensor<EllPoly<Rational>>>,
}

impl EdgePeriods {
    pub fn random(rng: &mut Rng8, g: &Graph, dim: usize, level: usize) -> Self {
        EdgePeriods {
            per_edge: (0..g.edge_count()).map(|_| random_grouplike(rng, dim, level)).collect(),
        }
    }

    pub fn of_path(&self, p: &PathWord, dim: usize, level: usize) -> TruncatedTensor<EllPoly<Rational>> {
        p.edges().iter().fold(TruncatedTensor::one(dim, level), |acc, d| {
            let t = &self.per_edge[d.edge];
            let t = if d.reversed { t.invert().unwrap() } else { t.clone() };
            acc.concat_mul(&t).unwrap()
        })
    }
}
