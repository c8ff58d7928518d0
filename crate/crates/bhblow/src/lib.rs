//! Numerical laboratory for shock formation in the Burgers-Hilbert equation
//!
//! ```text
//!     u_t + u u_x = H[u]
//! ```
//!
//! on a periodic domain.  Smooth data of amplitude ~ sqrt(epsilon) built
//! around the self-similar Burgers profile develops a gradient blowup in
//! finite time; near the singularity the solution is asymptotically
//! self-similar with a universal cusp shape.  The crate provides:
//!
//! - a pseudo-spectral solver with adaptive RK4 stepping ([`evolve`]),
//! - the explicit Cardano-form blowup profile and its bounds ([`profile`]),
//! - the Hilbert transform as a Fourier multiplier, cross-checked by
//!   principal-value quadrature ([`hilbert`]),
//! - profile-shaped initial data with audit checks ([`initial_data`]),
//! - self-similar frame extraction, modulation tracking, cusp and
//!   Lagrangian diagnostics ([`selfsim`]),
//! - the bootstrap-inequality ledger and analytic sanity checks
//!   ([`verify`]),
//! - experiment presets, run artifacts, and an amplitude sweep
//!   ([`experiment`], [`config`], [`io`]).

pub mod config;
pub mod error;
pub mod evolve;
pub mod experiment;
pub mod grid;
pub mod hilbert;
pub mod initial_data;
pub mod io;
pub mod profile;
pub mod selfsim;
pub mod verify;

pub use error::{BhError, Result};
