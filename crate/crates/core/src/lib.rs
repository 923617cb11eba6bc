//! Exact combinatorial iterated integration on dual graphs of semistable
//! curves, the combinatorial canonical path, and Vologodsky integrals
//! assembled from Berkovich–Coleman period data.
//!
//! Everything is exact: rationals, precision-tracked p-adics, and
//! polynomials in the branch indeterminate `ℓ = Log(p)`.

pub mod coeffs;
pub mod forms;
pub mod graph;
pub mod iint;
pub mod linalg;
pub mod tate;
pub mod tensor;
pub mod vologodsky;
pub mod wire;

pub use coeffs::{branch_log, padic_log, EllPoly, Padic, PadicError, Rational, Scalar};
pub use forms::{dual_bases, dual_forms, forms_basis, single_cint, DualBases, FormError, HalfOpenImage, TropicalOneForm, WeakEmbedding};
pub use graph::{DirEdge, Graph, GraphError, GraphSpec, GroupAlgebraElement, PathWord};
pub use iint::{canonical_correction, cint, cint_matrix, monodromy_power, signature, CanonicalCorrection, FormMatrix, IintError, TropicalMultiform};
pub use tate::{tate_expected, tate_graph, tate_periods, TateCurveSpec, TateError};
pub use tensor::{TensorError, TruncatedTensor};
pub use vologodsky::{bc_evaluate, vologodsky, vologodsky_single, PeriodTable, SymbolicElement, VolError};
pub use wire::Error;
