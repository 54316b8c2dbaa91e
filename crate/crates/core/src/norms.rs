//! Sobolev and Lebesgue norms, and the control parameters `A` and `B`.
//!
//! `L^∞` quantities are grid maxima, so they bound the true supremum from
//! below; the gap closes spectrally fast for smooth fields.

use serde::{Deserialize, Serialize};

use crate::spectral::{compose, gradient, shell_symbol, transform, Field, Profile, SpectralField};

/// Sobolev indices are clamped to this range.
pub const SOBOLEV_INDEX_LIMIT: f64 = 10.0;

fn bracket_weight(r: f64, s: f64) -> f64 {
    (1.0 + r * r).powf(s)
}

/// `(Σ_ξ ⟨ξ⟩^{2s} |f̂(ξ)|²)^{1/2}`, summed over components. With the unitary
/// transform normalization `s = 0` reproduces the `L²` norm.
pub fn sobolev_norm(f: &Field, s: f64) -> f64 {
    spectral_sobolev_norm(&transform(f), s)
}

pub fn spectral_sobolev_norm(fh: &SpectralField, s: f64) -> f64 {
    let s = s.clamp(-SOBOLEV_INDEX_LIMIT, SOBOLEV_INDEX_LIMIT);
    let weights: Vec<f64> = fh.grid().wave_norms().into_iter().map(|r| bracket_weight(r, s)).collect();
    let mut sum = 0.0;
    for c in 0..fh.components() {
        for (z, w) in fh.component(c).iter().zip(&weights) {
            sum += w * z.norm_sqr();
        }
    }
    sum.sqrt()
}

/// Dyadic shell norms `‖P_k f‖_{H^s}` for `k = 0..=K`.
pub fn shell_norms(f: &Field, s: f64, profile: Profile) -> Vec<f64> {
    let fh = transform(f);
    let grid = f.grid();
    let s = s.clamp(-SOBOLEV_INDEX_LIMIT, SOBOLEV_INDEX_LIMIT);
    let radii = grid.wave_norms();
    (0..grid.shell_count())
        .map(|k| {
            let mut sum = 0.0;
            for c in 0..fh.components() {
                for (z, &r) in fh.component(c).iter().zip(&radii) {
                    let p = shell_symbol(&grid, profile, k, r);
                    if p != 0.0 {
                        sum += bracket_weight(r, s) * p * p * z.norm_sqr();
                    }
                }
            }
            sum.sqrt()
        })
        .collect()
}

/// The control parameters `A = ‖u‖_{L^∞}` and `B = ‖∇u‖_{L^∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlPair {
    pub a: f64,
    pub b: f64,
}

/// `A` is the grid maximum of the pointwise Euclidean norm across
/// components; `B` the grid maximum of the Euclidean norm of all first
/// spectral derivatives.
pub fn control_params(f: &Field) -> ControlPair {
    let a = f.linf_norm();
    let grads = gradient(f);
    let npts = f.grid().len();
    let mut b: f64 = 0.0;
    for i in 0..npts {
        let mut sq = 0.0;
        for g in &grads {
            for c in 0..f.components() {
                sq += g.component(c)[i].powi(2);
            }
        }
        b = b.max(sq.sqrt());
    }
    ControlPair { a, b }
}

/// Outcome of one Moser-type measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoserReport {
    /// `‖F(f)‖_{H^s} / ‖f‖_{H^s}`
    pub ratio: f64,
    /// `‖f‖_{L^∞}`
    pub linf: f64,
}

/// Applies the scalar map `map` (with `map(0) = 0`) componentwise, composed
/// on the padded grid, and reports the Sobolev ratio.
pub fn moser_check(map: impl Fn(f64) -> f64, f: &Field, s: f64) -> MoserReport {
    let m = f.components();
    let image = compose(f, m, |u, out| {
        for (o, &v) in out.iter_mut().zip(u) {
            *o = map(v);
        }
    });
    let denom = sobolev_norm(f, s);
    let ratio = if denom == 0.0 { 0.0 } else { sobolev_norm(&image, s) / denom };
    MoserReport { ratio, linf: f.linf_norm() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;
    use std::f64::consts::PI;

    fn g1(n: usize) -> GridSpec {
        GridSpec::one_d(n).unwrap()
    }

    #[test]
    fn constant_norm_is_independent_of_s() {
        let f = Field::constant(g1(32), &[-2.0]);
        for s in [-1.0, 0.0, 1.5, 4.0] {
            assert!((sobolev_norm(&f, s) - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-12);
        }
        let g2 = GridSpec::new(2, 16).unwrap();
        let f2 = Field::constant(g2, &[1.0]);
        assert!((sobolev_norm(&f2, 2.0) - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn single_mode_weight() {
        let f = Field::from_fn(g1(64), 1, |_, x| x[0].cos());
        let l2 = f.l2_norm();
        assert!((l2 - PI.sqrt()).abs() < 1e-12);
        assert!((sobolev_norm(&f, 0.0) - l2).abs() < 1e-12 * l2);
        assert!((sobolev_norm(&f, 1.0) - 2f64.sqrt() * l2).abs() < 1e-12);
    }

    #[test]
    fn control_params_of_harmonics() {
        let f = Field::from_fn(g1(64), 1, |_, x| x[0].sin());
        let cp = control_params(&f);
        assert!((cp.a - 1.0).abs() < 1e-3);
        assert!((cp.b - 1.0).abs() < 1e-3);
        let c = control_params(&Field::constant(g1(64), &[5.0]));
        assert!((c.a - 5.0).abs() < 1e-15);
        assert!(c.b < 1e-12);
        let a = -0.7;
        let h = Field::from_fn(g1(128), 1, |_, x| a * (3.0 * x[0]).sin());
        let cp = control_params(&h);
        assert!((cp.a - a.abs()).abs() < 1e-3);
        assert!((cp.b - 3.0 * a.abs()).abs() < 1e-3);
    }

    #[test]
    fn moser_identity_and_square() {
        let f = Field::from_fn(g1(64), 1, |_, x| x[0].cos());
        assert!((moser_check(|v| v, &f, 2.0).ratio - 1.0).abs() < 1e-12);
        // ‖cos²‖_{L²} = (3π/4)^{1/2}, ‖cos‖_{L²} = π^{1/2}
        let want = (3.0 * PI / 4.0).sqrt() / PI.sqrt();
        assert!((moser_check(|v| v * v, &f, 0.0).ratio - want).abs() < 1e-12);
    }

    #[test]
    fn sharp_shell_norms_are_orthogonal() {
        let f = Field::from_fn(g1(128), 1, |_, x| (x[0].sin() * 3.0).exp());
        let shells = shell_norms(&f, 1.5, Profile::Sharp);
        let total: f64 = shells.iter().map(|v| v * v).sum();
        let hs = sobolev_norm(&f, 1.5);
        assert!((total.sqrt() - hs).abs() < 1e-12 * hs);
    }
}
