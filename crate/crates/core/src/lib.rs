//! Exact classification of multilinear differential operators on weighted
//! densities that are invariant under vector fields on the line, and of their
//! conformally invariant analogues in higher dimension.
//!
//! Everything is exact: scalars are rationals or elements of Q(√21), and
//! every dimension is the rank of an exact linear system.

pub mod catalog;
pub mod conformal;
pub mod densities;
pub mod error;
pub mod invariance;
pub mod linalg;
pub mod opcore;
pub mod report;
pub mod scalars;

pub use densities::{apply_op, defect, lie_derivative, VectorField1D, WeightedDensity};
pub use error::{Error, Result};
pub use invariance::{classify, Classification, KernelBasis};
pub use opcore::{DensityOp, MultiIndex, Permutation3};
pub use report::{report_tables, Report};
pub use scalars::{q, QuadExt, Rational, Scalar};
