//! Finite-dimensional JB*-triples and triple derivations.
//!
//! A [`TripleSystem`] stores the structure tensor of a complex triple product
//! `{x, y, z}` (linear in the outer slots, conjugate-linear in the middle one).
//! On top of it the crate provides the operators `L(a, b)` and `Q(a)`, Peirce
//! projections relative to tripotents, the odd-power functional calculus,
//! a brute-force solver for the real Lie algebra of triple derivations, and
//! randomized batteries that test whether a linear map is a derivation through
//! several equivalent conditions (Leibniz rule, locality, weak locality, and
//! the orthogonality / Peirce-2 pair `(h1)`/`(h2)`).
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the command
//! line front end live in the `jtriple` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod derivation;
mod eigen;
mod error;
pub mod locality;
pub mod operator;
pub mod peirce;
pub mod report;
pub mod rng;
pub mod spectral;
pub mod svd;
pub mod system;

pub use crate::derivation::DerivationBasis;
pub use crate::error::{Error, Result};
pub use crate::locality::{BatteryEntry, BatteryMix, Classification, CommutatorMap, MapFamily};
pub use crate::operator::{ComplexLinearMap, RealLinearOperator};
pub use crate::peirce::{PeirceDecomposition, PeirceSpace};
pub use crate::report::{CheckReport, Witness};
pub use crate::spectral::{SpectralDecomposition, SpectralPair};
pub use crate::system::{Element, SystemKind, TripleSystem};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;

pub use nalgebra;

/// Default relative tolerance for identity residuals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative singular-value threshold for rank and null-space decisions.
pub const RANK_TOL: f64 = 1e-8;

/// Relative gap below which two singular values are considered one cluster.
pub const CLUSTER_GAP: f64 = 1e-8;
