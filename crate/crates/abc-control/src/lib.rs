//! Fractional calculus with the nonsingular Mittag-Leffler kernel.
//!
//! The crate evaluates the two- and three-parameter Mittag-Leffler
//! functions on the real axis, provides the discrete Atangana-Baleanu
//! operators (Caputo-type and Riemann-Liouville-type derivatives, the
//! AB integral), solves the time-fractional diffusion problem on the
//! interval by spectral decomposition, and solves the quadratic
//! tracking control problem through the adjoint system.
//!
//! Layers, bottom up:
//!
//! - [`mlf`] — special function kernel: `E_{α,β}(z)`, the generalized
//!   (Prabhakar) variant, empirical decay-bound constants;
//! - [`frac_ops`] — discrete fractional operators on uniform time grids;
//! - [`spectral`] — Dirichlet sine basis on `(0, L)`, transforms, norms;
//! - [`forward_solver`] — per-mode Mittag-Leffler representation of the
//!   diffusion solution plus a priori estimate checks;
//! - [`adjoint_control`] — cost functional, adjoint solve by time
//!   reversal, conjugate-gradient optimizer, optimality verification;
//! - [`cli`] — scenario configs, CSV emission, verification suites.

mod bigfix;
mod dd;
mod gamma;
mod par;

pub mod adjoint_control;
pub mod cli;
pub mod error;
pub mod forward_solver;
pub mod frac_ops;
pub mod mlf;
pub mod spectral;

pub use error::{Error, Result};
