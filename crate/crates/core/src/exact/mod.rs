//! Exact rational arithmetic, sparse linear algebra and graded splittings.

pub mod graded;
pub mod lin;
pub mod matrix;
pub mod rational;

pub use lin::Lin;
pub use graded::{split_differential, GradedMap, GradedSpace, PieceSplit, SplitError};
pub use matrix::{kernel_basis, solve, SVec, SolveError, SparseMatrix};
pub use rational::{q, Rational};
