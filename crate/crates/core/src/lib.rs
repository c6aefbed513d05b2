//! 2D complex Hermite polynomials H_{m,n}(z1, z2) and the identities built
//! on them: Kibble–Slepian multilinear generating functions, moment and
//! circle integral representations, Laguerre and Charlier reductions, and
//! their q-analogues.

// `!(x > tol)` is used on purpose so NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod harness;
pub mod integral;
pub mod ks;
pub mod linalg;
pub mod multi_index;
pub mod poly;
pub mod qseries;
pub mod quad;
pub mod sum;

pub use error::{Error, Result};
pub use ks::{SeriesResult, TruncationPolicy};
pub use linalg::{ComplexSquareMatrix, ComplexVector};
pub use multi_index::{derived_sums, enumerate_shell, DerivedSums, MultiIndexMatrix};
pub use poly::{ComplexScalar, PolarPoint, PolyIndex};
