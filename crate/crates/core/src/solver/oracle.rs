use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{Field, GridSpec};

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;
const SLOPE_SAMPLES: usize = 1 << 16;

type Profile1d = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Exact solution of scalar Burgers `u_t = u u_x` before the shock, from
/// the characteristics `u(t, x) = u0(x0)` with `x = x0 - t u0(x0)`.
#[derive(Clone)]
pub struct CharacteristicsOracle {
    u0: Profile1d,
    du0: Profile1d,
    amplitude: f64,
    max_slope: f64,
}

impl CharacteristicsOracle {
    /// Builds the oracle from `u0` and its derivative; amplitude and steepest
    /// slope are found by dense sampling of the period.
    pub fn new(
        u0: impl Fn(f64) -> f64 + Send + Sync + 'static,
        du0: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let h = 2.0 * std::f64::consts::PI / SLOPE_SAMPLES as f64;
        let (mut amplitude, mut max_slope) = (0.0f64, f64::NEG_INFINITY);
        for i in 0..SLOPE_SAMPLES {
            let x = i as f64 * h;
            amplitude = amplitude.max(u0(x).abs());
            max_slope = max_slope.max(du0(x));
        }
        Self { u0: Arc::new(u0), du0: Arc::new(du0), amplitude, max_slope }
    }

    /// `u0 = a sin x`, with exact shock time `1/a`.
    pub fn sine(a: f64) -> Self {
        let mut o = Self::new(move |x| a * x.sin(), move |x| a * x.cos());
        o.max_slope = a.abs();
        o.amplitude = a.abs();
        o
    }

    /// `u0 = Σ a_i sin(k_i x)`.
    pub fn sine_modes(modes: &[(f64, f64)]) -> Self {
        let m1 = modes.to_vec();
        let m2 = modes.to_vec();
        Self::new(
            move |x| m1.iter().map(|(a, k)| a * (k * x).sin()).sum(),
            move |x| m2.iter().map(|(a, k)| a * k * (k * x).cos()).sum(),
        )
    }

    /// `T* = 1 / max u0'`, infinite when `u0` never increases.
    pub fn shock_time(&self) -> f64 {
        if self.max_slope > 0.0 {
            1.0 / self.max_slope
        } else {
            f64::INFINITY
        }
    }

    pub fn initial(&self, x: f64) -> f64 {
        (self.u0)(x)
    }

    /// `u(t, x)` for `0 <= t < T*`.
    pub fn value(&self, t: f64, x: f64) -> Result<f64> {
        if t < 0.0 || t >= self.shock_time() {
            return Err(Error::Config(format!(
                "characteristics cross at T* = {}; cannot evaluate at t = {t}",
                self.shock_time()
            )));
        }
        // g(x0) = x0 - t u0(x0) - x is increasing for t < T*
        let g = |x0: f64| x0 - t * (self.u0)(x0) - x;
        let mut x0 = x + t * (self.u0)(x);
        for _ in 0..NEWTON_MAX_ITER {
            let step = g(x0) / (1.0 - t * (self.du0)(x0));
            x0 -= step;
            if !x0.is_finite() {
                break;
            }
            if step.abs() <= NEWTON_TOL {
                if g(x0).abs() <= NEWTON_TOL {
                    return Ok((self.u0)(x0));
                }
                break;
            }
        }
        let reach = t * self.amplitude + 1e-9;
        let (mut lo, mut hi) = (x - reach, x + reach);
        while hi - lo > 1e-15 * hi.abs().max(1.0) {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((self.u0)(0.5 * (lo + hi)))
    }

    /// The exact solution sampled on a 1D grid.
    pub fn field(&self, grid: GridSpec, t: f64) -> Result<Field> {
        if grid.dim() != 1 {
            return Err(Error::Config("the characteristics oracle is one-dimensional".into()));
        }
        let mut data = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            data.push(self.value(t, grid.point(i)[0])?);
        }
        Field::new(grid, 1, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_time_reproduces_data() {
        let o = CharacteristicsOracle::sine(1.0);
        for x in [0.0, 0.3, 2.0, 5.9] {
            assert!((o.value(0.0, x).unwrap() - x.sin()).abs() < 1e-15);
        }
        assert_eq!(o.shock_time(), 1.0);
        assert!(o.value(1.0, 0.5).is_err());
    }

    #[test]
    fn implicit_relation_holds() {
        let o = CharacteristicsOracle::sine(1.0);
        let t = 0.9;
        for x in [0.01, 1.0, 3.0, 6.2] {
            let u = o.value(t, x).unwrap();
            // u = sin(x0) with x0 = x + t u
            assert!((u - (x + t * u).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_shock_time_of_modes() {
        let o = CharacteristicsOracle::sine_modes(&[(1.0, 1.0), (0.05, 17.0), (0.01, 53.0)]);
        // every mode peaks at x = 0: 1 + 0.85 + 0.53
        assert!((o.shock_time() - 1.0 / 2.38).abs() < 1e-6);
    }
}
