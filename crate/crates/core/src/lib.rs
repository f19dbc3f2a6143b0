//! Reconstruction of shallow periodic PEC surfaces from near-field data
//! measured above a (possibly negative-index) slab.
//!
//! The crate has two halves. The analytic half evaluates the closed-form
//! first-order field expansion: wavenumbers, interface determinants, the
//! zeroth-order field and the per-mode scaling factor that turns measured
//! Fourier coefficients into profile coefficients. The numerical half is an
//! independent finite-difference solver of the full transformed Helmholtz
//! problem, used to produce synthetic measurements without an inverse crime.
//!
//! ```
//! use superlens::{analytic, SceneParameters};
//!
//! let p = SceneParameters::superlens();
//! let ups = analytic::scaling_factor(3, &p).unwrap();
//! assert!((ups.norm() - 1.0 / (2.0 * p.wavenumber())).abs() < 1e-12);
//! ```

pub mod analytic;
pub mod error;
pub mod experiment;
pub mod forward;
pub mod linalg;
pub mod measurement;
pub mod reconstruction;
pub mod spectral;
pub mod validation;

pub use error::{Result, SuperlensError};
pub use spectral::{branch_sqrt, ModeCoefficients, SceneParameters, C64};
