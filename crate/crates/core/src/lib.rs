//! Morrey spaces `M^p_q` and their predual block spaces on finite grids.
//!
//! Both norms are computed with certificates: the Morrey norm reports the
//! cube that attains it, and the block norm reports a feasible block
//! decomposition (an upper bound) together with a Morrey-unit-ball witness
//! whose pairing with the input is a lower bound. One-dimensional step
//! functions get an exact engine in [`gallery`], which also rebuilds the
//! classical counterexamples around these spaces.

// Guards of the form `!(tol > 0.0)` are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocks;
pub mod duality;
pub mod error;
pub mod gallery;
pub mod grid;
pub mod hausdorff;
pub mod morrey;
pub mod numeric;
pub mod propcheck;
pub mod rational;

pub use blocks::{block_norm, BlockNormCertificate, Decomposition, SolverOptions};
pub use error::{Error, Result};
pub use grid::{CellSet, Cube, CubeFamily, ExponentPair, GridDomain, GridFunction, Region};
pub use morrey::{morrey_norm, MorreyResult};
