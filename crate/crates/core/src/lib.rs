//! Siegel theta functions, the Schottky-Igusa form and its gradient quadric,
//! even unimodular lattice theta series, and numerical solvers for the
//! genus-4 Jacobian locus: Newton projection onto {F_4 = 0}, singular points
//! of the theta divisor, the Klein ratio (det S_4)^2 / chi_68, and
//! hyperelliptic period matrices.
//!
//! All numerics are generic over the real scalar type (see [`scalar::Real`]);
//! `f64` is the default, and the aliases below pin the concrete types the CLI
//! and the verification suites use.

pub mod config;
pub mod error;
pub mod forms;
pub mod hyperelliptic;
pub mod lattice;
pub mod linalg;
pub mod locus;
pub mod multilinear;
pub mod report;
pub mod scalar;
pub mod siegel;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

/// Concrete scalar used by the CLI and verification suites.
pub type R64 = f64;
/// Concrete complex scalar.
pub type C64 = Cx<f64>;
/// Siegel point over `f64`.
pub type SiegelPoint64 = siegel::SiegelPoint<f64>;
/// Complex symmetric matrix over `f64`.
pub type SymMatrix64 = linalg::SymMatrix<f64>;
/// Theta jet over `f64`.
pub type ThetaJet64 = theta::ThetaJet<f64>;

/// Crate version string embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
