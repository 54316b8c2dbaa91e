//! Littlewood-Paley calculus on the torus.
//!
//! Shell `k >= 1` of the sharp profile is the annulus `2^k <= |ξ| < 2^{k+1}`;
//! shell 0 is the ball `|ξ| < 2`, so the zero mode and every `|ξ| <= 1` sit in
//! the low block. The smooth profile replaces each ball indicator
//! `1{|ξ| < λ}` by a cubic ramp from 1 at `λ/2` to 0 at `λ`. The top shell
//! `K = grid.top_shell()` collects everything at or above `2^K`, including
//! the Nyquist mode and the corners of a 2D lattice, so the shells always sum
//! to the identity.

use super::field::Field;
use super::grid::{GridSpec, Profile};
use super::ops::{inverse_transform, transform};

/// Symbol of the low-pass `P_{<λ}` at radius `r`.
pub fn lowpass_symbol(profile: Profile, cutoff: f64, r: f64) -> f64 {
    match profile {
        Profile::Sharp => {
            if r < cutoff {
                1.0
            } else {
                0.0
            }
        }
        Profile::Smooth => {
            let lo = 0.5 * cutoff;
            if r <= lo {
                1.0
            } else if r >= cutoff {
                0.0
            } else {
                let t = (r - lo) / lo;
                1.0 - t * t * (3.0 - 2.0 * t)
            }
        }
    }
}

/// Symbol of `P_{<=k}`, the sum of shells `0..=k`.
pub fn block_symbol(grid: &GridSpec, profile: Profile, k: i64, r: f64) -> f64 {
    if k < 0 {
        0.0
    } else if k as usize >= grid.top_shell() {
        1.0
    } else {
        lowpass_symbol(profile, (1u64 << (k + 1)) as f64, r)
    }
}

/// Symbol of the shell projector `P_k`.
pub fn shell_symbol(grid: &GridSpec, profile: Profile, k: usize, r: f64) -> f64 {
    let k = k as i64;
    block_symbol(grid, profile, k, r) - block_symbol(grid, profile, k - 1, r)
}

/// Symbol of `P_{<j}`: every shell strictly below `j` (zero for `j <= 0`).
pub fn below_symbol(grid: &GridSpec, profile: Profile, j: i64, r: f64) -> f64 {
    block_symbol(grid, profile, j - 1, r)
}

/// Result of a shell projection.
#[derive(Clone, Debug)]
pub struct LpProjection {
    pub field: Field,
    /// Set when the requested shell lies beyond the resolved range; the field
    /// is then identically zero.
    pub beyond_nyquist: bool,
}

/// Littlewood-Paley projection `P_k f`.
pub fn lp_project(f: &Field, k: usize, profile: Profile) -> LpProjection {
    let grid = f.grid();
    if k > grid.top_shell() {
        return LpProjection { field: Field::zeros(grid, f.components()), beyond_nyquist: true };
    }
    let mut fh = transform(f);
    super::ops::apply_radial(&mut fh, |r| shell_symbol(&grid, profile, k, r));
    LpProjection { field: inverse_transform(&fh), beyond_nyquist: false }
}

/// All shells `P_0 f, ..., P_K f` from a single forward transform.
pub fn lp_decompose(f: &Field, profile: Profile) -> Vec<Field> {
    let grid = f.grid();
    let fh = transform(f);
    (0..grid.shell_count())
        .map(|k| {
            let mut shell = fh.clone();
            super::ops::apply_radial(&mut shell, |r| shell_symbol(&grid, profile, k, r));
            inverse_transform(&shell)
        })
        .collect()
}

/// Low-pass `P_{<λ}`; a cutoff above the Nyquist frequency is the identity.
pub fn low_pass(f: &Field, cutoff: f64, profile: Profile) -> Field {
    let grid = f.grid();
    if cutoff > grid.nyquist() as f64 {
        return f.clone();
    }
    let mut fh = transform(f);
    super::ops::apply_radial(&mut fh, |r| lowpass_symbol(profile, cutoff, r));
    inverse_transform(&fh)
}

/// `P_{<j} f` in shell-index form.
pub fn below_shell(f: &Field, j: i64, profile: Profile) -> Field {
    let grid = f.grid();
    let mut fh = transform(f);
    super::ops::apply_radial(&mut fh, |r| below_symbol(&grid, profile, j, r));
    inverse_transform(&fh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    #[test]
    fn single_harmonic_lives_in_one_shell() {
        let g = GridSpec::one_d(64).unwrap();
        let f = Field::from_fn(g, 1, |_, x| (4.0 * x[0]).cos());
        for k in 0..g.shell_count() {
            let p = lp_project(&f, k, Profile::Sharp);
            assert!(!p.beyond_nyquist);
            let err = if k == 2 { (&p.field - &f).l2_norm() } else { p.field.l2_norm() };
            assert!(err < 1e-12, "shell {k}: {err}");
        }
    }

    #[test]
    fn constant_sits_in_low_block() {
        let g = GridSpec::one_d(32).unwrap();
        let f = Field::constant(g, &[2.0]);
        for profile in [Profile::Sharp, Profile::Smooth] {
            let shells = lp_decompose(&f, profile);
            assert!((&shells[0] - &f).l2_norm() < 1e-12);
            for s in &shells[1..] {
                assert!(s.l2_norm() < 1e-12);
            }
        }
    }

    #[test]
    fn shell_beyond_nyquist_is_flagged() {
        let g = GridSpec::one_d(32).unwrap();
        let f = Field::from_fn(g, 1, |_, x| x[0].sin());
        let p = lp_project(&f, 9, Profile::Sharp);
        assert!(p.beyond_nyquist);
        assert_eq!(p.field.l2_norm(), 0.0);
    }

    #[test]
    fn low_pass_selects_modes() {
        let g = GridSpec::one_d(128).unwrap();
        let f = Field::from_fn(g, 1, |_, x| (4.0 * x[0]).cos() + (32.0 * x[0]).cos());
        let lp = low_pass(&f, 8.0, Profile::Sharp);
        let want = Field::from_fn(g, 1, |_, x| (4.0 * x[0]).cos());
        assert!((&lp - &want).l2_norm() < 1e-12);
        assert_eq!(low_pass(&f, 100.0, Profile::Sharp), f);
        // sharp low-pass is idempotent
        let twice = low_pass(&lp, 8.0, Profile::Sharp);
        assert!((&twice - &lp).l2_norm() < 1e-13);
    }

    #[test]
    fn smooth_ramp_endpoints() {
        assert_eq!(lowpass_symbol(Profile::Smooth, 8.0, 4.0), 1.0);
        assert_eq!(lowpass_symbol(Profile::Smooth, 8.0, 8.0), 0.0);
        assert!((lowpass_symbol(Profile::Smooth, 8.0, 6.0) - 0.5).abs() < 1e-15);
    }
}
