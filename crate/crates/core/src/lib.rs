//! Spectral numerics for the generalized derivative nonlinear Schrödinger
//! equation
//!
//! ```text
//! i u_t + u_xx + i |u|^{2 sigma} u_x = 0,   x in R (truncated to a periodic box)
//! ```
//!
//! The crate provides the explicit two-parameter solitary-wave family and
//! its norm identities, an integrating-factor RK4 pseudo-spectral solver
//! (also for the cubic DNLS form reached by the sigma = 1 gauge map),
//! scattering diagnostics built on the free propagator, the seven-term
//! working-space norm, and empirical probes of the linear dispersive
//! estimates.

pub mod error;
pub mod evolution;
pub mod gauge;
pub mod integration;
pub mod probes;
pub mod scattering;
pub mod soliton;
pub mod spectral;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;
pub use spectral::{ComplexField, GridSpec, Trajectory};
