//! Bi-parameter dyadic Hardy spaces at finite resolution.
//!
//! The crate represents functions on the unit square through their
//! anisotropic Haar expansions, computes square functions and `H^p`
//! quasi-norms exactly on a dyadic grid, and builds the atomic
//! decomposition `(f_n, R_n)` of a function. On top of that it constructs
//! explicit Pietsch weights for the Haar multiplication operator
//! `M_f : l^inf -> H^p`, and the lattice factorization `|f| = |x|^(1-θ) |y|^θ`
//! that those weights induce.
//!
//! Every inequality that carries no unknown constant is checked exactly and
//! reported as an [`Error::Violation`] when it fails. Quantities governed by
//! existential constants are estimated and reported, never asserted.

pub mod atomic;
pub mod dyadic;
pub mod error;
pub mod factorize;
pub mod haar;
pub mod harness;
pub mod io;
pub mod numeric;
pub mod pietsch;
pub mod search;

pub use atomic::{classify, AtomicDecomposition};
pub use dyadic::{CellSet, DyadicInterval, DyadicRectangle, GridFunction};
pub use error::{Error, Result};
pub use haar::{hp_norm, HaarExpansion, MultiplierSequence};
pub use pietsch::{pietsch_weights, Normalization, PietschWeights};
