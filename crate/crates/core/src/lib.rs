//! Duality-diagram multivariate analyses for sequences of paired tables.
//!
//! The crate is organized around the *statistical triplet* `(X, Dp, Dn)`: a
//! numeric table, a diagonal metric on its columns and a weighting of its
//! rows. [`eigen::gpca`] decomposes a triplet; [`coinertia`] couples two
//! triplets over shared rows; [`ktable`] analyzes a sequence of triplets by
//! partial triadic analysis; and [`coupling`] combines these building blocks
//! into Between-Group Analysis, BGCOIA, STATICO and COSTATIS.
//!
//! All values are immutable after construction and every analysis is a pure
//! function, so everything can be shared freely across threads. Permutation
//! tests derive each draw from `(seed, index)` and are reproducible
//! regardless of thread count.

pub mod coinertia;
pub mod coupling;
pub mod eigen;
pub mod error;
pub mod ktable;
pub mod tabular;

pub use error::{AnalysisError, Warning};
