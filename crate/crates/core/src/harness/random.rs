//! Seeded random test fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::spectral::{inverse_transform, Field, GridSpec, SpectralField};

/// SplitMix64 finalizer applied to `seed + stream`, giving independent
/// generator seeds for parallel trials.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real field with Fourier coefficients of modulus `|ξ|^{-decay}` and
/// uniform random phases, zero mean, no Nyquist content, scaled to unit
/// sup norm.
pub fn random_field(grid: GridSpec, components: usize, decay: f64, rng: &mut impl Rng) -> Field {
    let n = grid.points_per_axis() as i64;
    let mut fh = SpectralField::zeros(grid, components);
    for c in 0..components {
        let coeffs = fh.component_mut(c);
        for flat in 0..grid.len() {
            if grid.is_nyquist_index(flat) {
                continue;
            }
            let [i, j] = grid.axis_indices(flat);
            let (kx, ky) = (grid.wavenumber(i), if grid.dim() == 2 { grid.wavenumber(j) } else { 0 });
            if !(ky > 0 || (ky == 0 && kx > 0)) {
                continue;
            }
            let phase = rng.gen::<f64>() * std::f64::consts::TAU;
            let z = Complex64::from_polar(grid.wave_norm(flat).powf(-decay), phase);
            let wrap = |k: i64| k.rem_euclid(n) as usize;
            let mirror = if grid.dim() == 2 { wrap(-kx) + grid.points_per_axis() * wrap(-ky) } else { wrap(-kx) };
            coeffs[flat] = z;
            coeffs[mirror] = z.conj();
        }
    }
    let f = inverse_transform(&fh);
    let sup = f.linf_norm();
    if sup > 0.0 {
        f.scaled(1.0 / sup)
    } else {
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::transform;

    #[test]
    fn fields_are_real_normalized_and_reproducible() {
        for g in [GridSpec::one_d(64).unwrap(), GridSpec::new(2, 16).unwrap()] {
            let f = random_field(g, 2, 1.5, &mut seeded_rng(7));
            let h = random_field(g, 2, 1.5, &mut seeded_rng(7));
            assert_eq!(f, h);
            assert!((f.linf_norm() - 1.0).abs() < 1e-15);
            let fh = transform(&f);
            assert!(fh.coeffs()[0].norm() < 1e-12);
            for (flat, z) in fh.component(0).iter().enumerate() {
                if g.is_nyquist_index(flat) {
                    assert!(z.norm() < 1e-12);
                }
            }
        }
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
    }
}
