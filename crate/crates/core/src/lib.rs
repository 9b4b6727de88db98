//! Periodic-box pseudo-spectral Navier–Stokes laboratory for studying the
//! direction of vorticity: spectral operators, an integrating-factor RK4
//! solver, vorticity-direction and enstrophy-balance diagnostics, and an
//! exact-rational calculus over the Lebesgue exponents of the regularity
//! estimates.

pub mod diagnostics;
pub mod error;
pub mod exponents;
pub mod fields;
pub mod io;
pub mod riesz;
pub mod solver;
pub mod spectral;
pub mod synthetic;

pub use error::{Error, Result};
pub use fields::{linf_norm, lp_norm, GridSpec, ScalarField, VectorField};
pub use riesz::{riesz_potential, RieszBackend};
pub use spectral::{Spectral, SpectralField};
