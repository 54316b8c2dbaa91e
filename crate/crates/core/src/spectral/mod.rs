//! Periodic grids, transforms, spectral derivatives, dealiased products and
//! Littlewood-Paley projectors.

mod fft;
mod field;
mod grid;
mod lp;
mod ops;

pub use field::{Field, SpectralField};
pub use grid::{GridSpec, Profile};
pub use lp::{
    below_shell, below_symbol, block_symbol, low_pass, lowpass_symbol, lp_decompose, lp_project,
    shell_symbol, LpProjection,
};
pub use ops::{
    apply_radial, compose, dealiased_product, derivative, gradient, inverse_transform,
    radial_multiplier, transform,
};

pub(crate) use ops::Padding;
