//! Numerical verification library for twisted summation identities of rank-two and
//! rank-three Hecke coefficient families.
//!
//! The crate is organized bottom-up:
//!
//! * [`special`]: principal-branch log-gamma, normalized gamma factors, and the signed
//!   gamma-ratio factors `G_delta` that drive every kernel and functional equation here.
//! * [`arithmetic`]: exact exponential sums over residue classes (Kloosterman, Ramanujan,
//!   Gauss) and Dirichlet character tables built from exact roots of unity.
//! * [`coefficients`]: Hecke coefficient tables for the rank-three family, including the
//!   symmetric-square lift of the discriminant cusp form, with multiplicative structure.
//! * [`kernels`]: Mellin-Barnes contour transforms of Gaussian-type test functions, the
//!   kernel side of the summation identities.
//! * [`summation`]: both sides of the rank-two and rank-three summation identities and
//!   the Kloosterman-weighted variant.
//! * [`lfunctions`]: smoothed evaluation of twisted L-series and functional-equation
//!   residuals.
//! * [`presets`]: the two shipped data presets and the search that validates the
//!   rank-three one.

pub mod arithmetic;
pub mod coefficients;
pub mod error;
pub mod kernels;
pub mod lfunctions;
pub mod presets;
pub mod special;
pub mod summation;
pub mod util;

pub use error::{Error, Result};

/// Shorthand used across the crate.
pub type C64 = num_complex::Complex64;
