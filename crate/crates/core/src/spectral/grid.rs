use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, 2π)^dim` with the same power-of-two number
/// of points along every axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    n: usize,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 16;

    pub fn new(dim: usize, points_per_axis: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if points_per_axis < Self::MIN_POINTS || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= {}, got {points_per_axis}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { dim, n: points_per_axis })
    }

    pub fn one_d(points: usize) -> Result<Self> {
        Self::new(1, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Volume element of the quadrature rule, `(2π/N)^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Size of the 3/2-padded grid used for alias-free products.
    pub fn padded_points(&self) -> usize {
        3 * self.n / 2
    }

    /// Index of the last dyadic shell, `log2(Nyquist) - 1`. The top shell
    /// collects every mode at or above `2^top_shell`.
    pub fn top_shell(&self) -> usize {
        self.nyquist().trailing_zeros() as usize - 1
    }

    pub fn shell_count(&self) -> usize {
        self.top_shell() + 1
    }

    /// Signed wave number of an index along one axis. The Nyquist index is
    /// reported as `+N/2`.
    pub fn wavenumber(&self, index: usize) -> i64 {
        let n = self.n as i64;
        let i = index as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn is_nyquist_index(&self, index: usize) -> bool {
        index == self.n / 2
    }

    /// Per-axis indices of a flat index. Axis 0 varies fastest.
    pub fn axis_indices(&self, flat: usize) -> [usize; 2] {
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat % self.n, flat / self.n]
        }
    }

    /// Euclidean norm `|ξ|` of the wave vector at a flat index.
    pub fn wave_norm(&self, flat: usize) -> f64 {
        let idx = self.axis_indices(flat);
        let mut sq = 0.0;
        for axis in 0..self.dim {
            let k = self.wavenumber(idx[axis]) as f64;
            sq += k * k;
        }
        sq.sqrt()
    }

    /// Wave norms for every flat index, in transform order.
    pub fn wave_norms(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.wave_norm(i)).collect()
    }

    /// Coordinates of a flat index.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let idx = self.axis_indices(flat);
        let h = self.spacing();
        [idx[0] as f64 * h, idx[1] as f64 * h]
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch { left: *self, right: *other });
        }
        Ok(())
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 1 {
            write!(f, "{}", self.n)
        } else {
            write!(f, "{}x{}", self.n, self.n)
        }
    }
}

/// Shape of the Littlewood-Paley cutoff symbols.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Indicator functions of balls and annuli.
    #[default]
    Sharp,
    /// Cubic ramp `3t^2 - 2t^3` across one octave.
    Smooth,
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Sharp => "sharp",
            Profile::Smooth => "smooth",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sharp" => Ok(Profile::Sharp),
            "smooth" => Ok(Profile::Smooth),
            other => Err(Error::Config(format!("unknown cutoff profile '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec::new(1, 8).is_err());
        assert!(GridSpec::new(1, 48).is_err());
        assert!(GridSpec::new(3, 16).is_err());
        assert!(GridSpec::new(2, 16).is_ok());
    }

    #[test]
    fn shells_and_wavenumbers() {
        let g = GridSpec::one_d(256).unwrap();
        assert_eq!(g.nyquist(), 128);
        assert_eq!(g.top_shell(), 6);
        assert_eq!(g.wavenumber(1), 1);
        assert_eq!(g.wavenumber(128), 128);
        assert_eq!(g.wavenumber(255), -1);
        let g16 = GridSpec::one_d(16).unwrap();
        assert_eq!(g16.top_shell(), 2);
    }

    #[test]
    fn wave_norm_two_d() {
        let g = GridSpec::new(2, 16).unwrap();
        // (kx, ky) = (3, -4)
        let flat = 3 + 12 * 16;
        assert!((g.wave_norm(flat) - 5.0).abs() < 1e-15);
    }
}
