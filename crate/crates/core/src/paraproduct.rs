//! Bony paraproducts on the torus.
//!
//! `T_f g = Σ_k (P_{<k-gap} f)(P_k g)` with every summand dealiased. The
//! high-high remainder is the exact complement
//! `Π(f, g) = fg - T_f g - T_g f`, so the trichotomy holds to round-off for
//! every profile and gap.

use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    below_symbol, dealiased_product, gradient, lp_project, shell_symbol, transform, Field,
    GridSpec, Padding, Profile, SpectralField,
};

/// Which of the three paradifferential quantizations of `T_{A(u)}` to use
/// at frequency `2^k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantization {
    /// `A(u)_{<k-gap} ∂w_k`
    #[serde(rename = "coeff-lowpass")]
    CoeffLowpass,
    /// `A(u_{<k-gap}) ∂w_k`
    #[default]
    #[serde(rename = "arg-lowpass")]
    ArgLowpass,
    /// `[A(u_{<k-gap})]_{<k-gap/2} ∂w_k`
    #[serde(rename = "double-lowpass")]
    DoubleLowpass,
}

impl Quantization {
    pub const ALL: [Quantization; 3] =
        [Quantization::CoeffLowpass, Quantization::ArgLowpass, Quantization::DoubleLowpass];

    pub fn name(&self) -> &'static str {
        match self {
            Quantization::CoeffLowpass => "coeff-lowpass",
            Quantization::ArgLowpass => "arg-lowpass",
            Quantization::DoubleLowpass => "double-lowpass",
        }
    }
}

impl fmt::Display for Quantization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantization::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown quantization '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParaConfig {
    /// Frequency gap (in dyadic shells) between coefficient and argument.
    pub gap: usize,
    pub quantization: Quantization,
    pub profile: Profile,
}

impl Default for ParaConfig {
    fn default() -> Self {
        Self { gap: 8, quantization: Quantization::default(), profile: Profile::default() }
    }
}

impl ParaConfig {
    pub fn with_gap(gap: usize) -> Self {
        Self { gap, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gap < 2 {
            return Err(Error::Config(format!("paraproduct gap must be >= 2, got {}", self.gap)));
        }
        Ok(())
    }

    /// Outer cutoff offset of the double-lowpass quantization.
    pub fn outer_gap(&self) -> usize {
        (self.gap / 2).max(1)
    }
}

/// Multiplies a spectral component by `P_{<j}`.
pub(crate) fn below(grid: &GridSpec, profile: Profile, radii: &[f64], c: &[Complex64], j: i64) -> Vec<Complex64> {
    c.iter().zip(radii).map(|(z, &r)| z * below_symbol(grid, profile, j, r)).collect()
}

fn shell(grid: &GridSpec, profile: Profile, radii: &[f64], c: &[Complex64], k: usize) -> Vec<Complex64> {
    c.iter().zip(radii).map(|(z, &r)| z * shell_symbol(grid, profile, k, r)).collect()
}

/// Padded-grid coefficient samples per shell: `None` where the coefficient
/// vanishes, otherwise one vector per coefficient component.
pub(crate) type ShellCoefficients = Vec<Option<Vec<Vec<f64>>>>;

/// `Σ_k coef_k · P_k high`, accumulated on the padded grid and truncated.
///
/// `pairs` lists `(coefficient component, high component, output component)`
/// triples.
pub(crate) fn shellwise_sum(
    high: &SpectralField,
    profile: Profile,
    n_out: usize,
    pairs: &[(usize, usize, usize)],
    coefs: &ShellCoefficients,
) -> Field {
    let grid = high.grid();
    let pad = Padding::for_grid(grid);
    let radii = grid.wave_norms();
    let len = pad.padded_len();
    let mut acc = vec![vec![0.0; len]; n_out];
    for (k, coef) in coefs.iter().enumerate() {
        let Some(coef) = coef else { continue };
        let mut high_k: Vec<Option<Vec<f64>>> = vec![None; high.components()];
        for &(ci, hi, oi) in pairs {
            if high_k[hi].is_none() {
                let s = shell(&grid, profile, &radii, high.component(hi), k);
                high_k[hi] = Some(pad.to_physical(&s));
            }
            let h = high_k[hi].as_ref().expect("filled above");
            for ((o, a), b) in acc[oi].iter_mut().zip(&coef[ci]).zip(h) {
                *o += a * b;
            }
        }
    }
    pad.physical_to_field(&acc)
}

/// Padded samples of `P_{<k-gap} f` for every shell `k`.
pub(crate) fn lowpassed_coefficients(fh: &SpectralField, profile: Profile, gap: usize) -> ShellCoefficients {
    let grid = fh.grid();
    let pad = Padding::for_grid(grid);
    let radii = grid.wave_norms();
    (0..grid.shell_count())
        .map(|k| {
            let j = k as i64 - gap as i64;
            (j > 0).then(|| {
                (0..fh.components())
                    .map(|c| pad.to_physical(&below(&grid, profile, &radii, fh.component(c), j)))
                    .collect()
            })
        })
        .collect()
}

fn broadcast_pairs(fc: usize, gc: usize) -> Result<(usize, Vec<(usize, usize, usize)>)> {
    let n = match (fc, gc) {
        (a, b) if a == b => a,
        (1, b) => b,
        (a, 1) => a,
        (a, b) => return Err(Error::ComponentMismatch { expected: a, found: b }),
    };
    let pairs = (0..n)
        .map(|c| (if fc == 1 { 0 } else { c }, if gc == 1 { 0 } else { c }, c))
        .collect();
    Ok((n, pairs))
}

/// Low-high paraproduct `T_f g` (componentwise, one-component factors
/// broadcast).
pub fn para_lowhigh(f: &Field, g: &Field, cfg: &ParaConfig) -> Result<Field> {
    f.grid().ensure_same(&g.grid())?;
    let (n, pairs) = broadcast_pairs(f.components(), g.components())?;
    let fh = transform(f);
    let gh = transform(g);
    Ok(shellwise_sum(&gh, cfg.profile, n, &pairs, &lowpassed_coefficients(&fh, cfg.profile, cfg.gap)))
}

/// High-high remainder `Π(f, g) = fg - T_f g - T_g f`.
pub fn para_highhigh(f: &Field, g: &Field, cfg: &ParaConfig) -> Result<Field> {
    Ok(para_decompose(f, g, cfg)?.high_high)
}

/// The three parts of the Littlewood-Paley trichotomy of `fg`.
#[derive(Clone, Debug)]
pub struct Trichotomy {
    /// `T_f g`
    pub low_high: Field,
    /// `T_g f`
    pub high_low: Field,
    /// `Π(f, g)`
    pub high_high: Field,
}

impl Trichotomy {
    pub fn sum(&self) -> Field {
        let mut s = &self.low_high + &self.high_low;
        s.axpy(1.0, &self.high_high);
        s
    }
}

pub fn para_decompose(f: &Field, g: &Field, cfg: &ParaConfig) -> Result<Trichotomy> {
    let low_high = para_lowhigh(f, g, cfg)?;
    let high_low = para_lowhigh(g, f, cfg)?;
    let mut high_high = dealiased_product(f, g)?;
    high_high.axpy(-1.0, &low_high);
    high_high.axpy(-1.0, &high_low);
    Ok(Trichotomy { low_high, high_low, high_high })
}

/// Matrix paraproduct `(T_A v)_a = Σ_b T_{A_ab} v_b`; `a` holds `m*m`
/// components in row-major order.
pub fn para_matvec(a: &Field, v: &Field, cfg: &ParaConfig) -> Result<Field> {
    let m = v.components();
    check_matrix(a, v)?;
    let ah = transform(a);
    let vh = transform(v);
    Ok(shellwise_sum(&vh, cfg.profile, m, &matvec_pairs(m), &lowpassed_coefficients(&ah, cfg.profile, cfg.gap)))
}

/// `(T_v A)_a = Σ_b T_{v_b} A_ab`: the vector supplies the low frequencies.
pub fn para_vec_coeff(v: &Field, a: &Field, cfg: &ParaConfig) -> Result<Field> {
    let m = v.components();
    check_matrix(a, v)?;
    let ah = transform(a);
    let vh = transform(v);
    let pairs: Vec<(usize, usize, usize)> =
        (0..m).flat_map(|r| (0..m).map(move |b| (b, r * m + b, r))).collect();
    Ok(shellwise_sum(&ah, cfg.profile, m, &pairs, &lowpassed_coefficients(&vh, cfg.profile, cfg.gap)))
}

/// Dealiased matrix-vector product `(Av)_a = Σ_b A_ab v_b`.
pub fn product_matvec(a: &Field, v: &Field) -> Result<Field> {
    let m = v.components();
    check_matrix(a, v)?;
    let pad = Padding::for_grid(v.grid());
    let ap = pad.field_to_physical(a);
    let vp = pad.field_to_physical(v);
    let len = pad.padded_len();
    let mut out = vec![vec![0.0; len]; m];
    for (r, o) in out.iter_mut().enumerate() {
        for b in 0..m {
            for ((x, y), z) in o.iter_mut().zip(&ap[r * m + b]).zip(&vp[b]) {
                *x += y * z;
            }
        }
    }
    Ok(pad.physical_to_field(&out))
}

/// Matrix high-high remainder `Π(A, v) = Av - T_A v - T_v A`.
pub fn para_highhigh_matvec(a: &Field, v: &Field, cfg: &ParaConfig) -> Result<Field> {
    let mut out = product_matvec(a, v)?;
    out.axpy(-1.0, &para_matvec(a, v, cfg)?);
    out.axpy(-1.0, &para_vec_coeff(v, a, cfg)?);
    Ok(out)
}

pub(crate) fn matvec_pairs(m: usize) -> Vec<(usize, usize, usize)> {
    (0..m).flat_map(|r| (0..m).map(move |b| (r * m + b, b, r))).collect()
}

fn check_matrix(a: &Field, v: &Field) -> Result<()> {
    a.grid().ensure_same(&v.grid())?;
    let m = v.components();
    if a.components() != m * m {
        return Err(Error::ComponentMismatch { expected: m * m, found: a.components() });
    }
    Ok(())
}

/// Commutator measurement `2^k ‖[P_k, f] g‖_{L²} / (‖∇f‖_{L^∞} ‖g‖_{L²})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub shell: usize,
    /// `‖P_k(fg) - f P_k g‖_{L²}`
    pub commutator_norm: f64,
    pub ratio: f64,
}

pub fn commutator_check(f: &Field, g: &Field, k: usize, profile: Profile) -> Result<CommutatorReport> {
    f.grid().ensure_same(&g.grid())?;
    let fg = dealiased_product(f, g)?;
    let pk_fg = lp_project(&fg, k, profile).field;
    let f_pk_g = dealiased_product(f, &lp_project(g, k, profile).field)?;
    let commutator_norm = (&pk_fg - &f_pk_g).l2_norm();
    let grads = gradient(f);
    let npts = f.grid().len();
    let mut grad_sup: f64 = 0.0;
    for i in 0..npts {
        let mut sq = 0.0;
        for d in &grads {
            for c in 0..f.components() {
                sq += d.component(c)[i].powi(2);
            }
        }
        grad_sup = grad_sup.max(sq.sqrt());
    }
    let denom = grad_sup * g.l2_norm();
    let ratio = if commutator_norm == 0.0 {
        0.0
    } else if denom == 0.0 {
        f64::INFINITY
    } else {
        2f64.powi(k as i32) * commutator_norm / denom
    };
    Ok(CommutatorReport { shell: k, commutator_norm, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::below_shell;

    fn g1(n: usize) -> GridSpec {
        GridSpec::one_d(n).unwrap()
    }

    #[test]
    fn constant_coefficient_multiplies_shells_above_the_gap() {
        let g = g1(256);
        let cfg = ParaConfig::with_gap(2);
        let c = Field::constant(g, &[1.5]);
        let h = Field::from_fn(g, 1, |_, x| (x[0].sin() * 2.0).exp() + (40.0 * x[0]).cos());
        let t = para_lowhigh(&c, &h, &cfg).unwrap();
        // shells k <= gap see an empty coefficient; everything above sees c
        let want = (&h - &below_shell(&h, cfg.gap as i64 + 1, cfg.profile)).scaled(1.5);
        assert!((&t - &want).l2_norm() < 1e-12 * want.l2_norm());
    }

    #[test]
    fn no_truncation_when_bands_are_separated() {
        let g = g1(256);
        let cfg = ParaConfig::with_gap(2);
        let f = Field::from_fn(g, 1, |_, x| 0.3 * x[0].cos() + 0.1 * (2.0 * x[0]).sin());
        let h = Field::from_fn(g, 1, |_, x| (32.0 * x[0]).cos());
        let t = para_lowhigh(&f, &h, &cfg).unwrap();
        let fg = dealiased_product(&f, &h).unwrap();
        assert!((&t - &fg).l2_norm() < 1e-12 * fg.l2_norm());
        let tri = para_decompose(&f, &h, &cfg).unwrap();
        assert!(tri.high_high.l2_norm() < 1e-12 * fg.l2_norm());
    }

    #[test]
    fn high_high_produces_low_output() {
        let g = g1(128);
        let cfg = ParaConfig::with_gap(2);
        let f = Field::from_fn(g, 1, |_, x| (16.0 * x[0]).cos());
        let pi = para_highhigh(&f, &f, &cfg).unwrap();
        let want = Field::from_fn(g, 1, |_, x| 0.5 + 0.5 * (32.0 * x[0]).cos());
        assert!((&pi - &want).l2_norm() < 1e-12);
    }

    #[test]
    fn symmetric_decomposition() {
        let g = g1(64);
        let f = Field::from_fn(g, 1, |_, x| (x[0].cos()).exp() * (5.0 * x[0]).sin());
        let tri = para_decompose(&f, &f, &ParaConfig::with_gap(2)).unwrap();
        assert_eq!(tri.low_high, tri.high_low);
    }

    #[test]
    fn commutator_vanishes_for_constants() {
        let g = g1(128);
        let c = Field::constant(g, &[2.0]);
        let h = Field::from_fn(g, 1, |_, x| (x[0].sin()).exp());
        let rep = commutator_check(&c, &h, 3, Profile::Sharp).unwrap();
        assert!(rep.commutator_norm < 1e-12);
    }

    #[test]
    fn quantization_round_trips_through_strings() {
        for q in Quantization::ALL {
            assert_eq!(q.name().parse::<Quantization>().unwrap(), q);
        }
        assert!(ParaConfig::with_gap(1).validate().is_err());
    }
}
