//! Pseudospectral laboratory for first-order symmetric hyperbolic systems
//! `u_t = A^j(u) ∂_j u` on the periodic torus `[0, 2π)^n`, `n ∈ {1, 2}`.
//!
//! The crate is organized bottom-up:
//!
//! * [`spectral`]: grids, transforms, derivatives, dealiased products,
//!   Littlewood-Paley projectors.
//! * [`norms`]: Sobolev norms and the control parameters `A = ‖u‖_∞`,
//!   `B = ‖∇u‖_∞`.
//! * [`paraproduct`]: Bony paraproducts, high-high remainders, commutators.
//! * [`model`]: hyperbolic systems and their full, linearized,
//!   paradifferential and perturbative right-hand sides.
//! * [`solver`]: regularize-then-Euler, paradifferential iteration,
//!   parabolic and Galerkin reference schemes.
//! * [`envelope`]: frequency envelopes.
//! * [`harness`]: experiments that measure the quantitative bounds.

pub mod envelope;
pub mod error;
pub mod harness;
pub mod model;
pub mod norms;
pub mod paraproduct;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{Field, GridSpec, Profile, SpectralField};
