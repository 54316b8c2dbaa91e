use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;

use rustfft::num_complex::Complex64;

use super::fft;
use super::field::{Field, SpectralField};
use super::grid::GridSpec;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn torus_factor(dim: usize) -> f64 {
    (2.0 * PI).powf(dim as f64 / 2.0)
}

/// Forward transform with the unitary-in-`L²(T^n)` normalization
/// `f̂(ξ) = (2π)^{n/2} N^{-n} Σ_x f(x) e^{-iξ·x}`.
pub fn transform(f: &Field) -> SpectralField {
    let grid = f.grid();
    let npts = grid.len();
    let scale = torus_factor(grid.dim()) / npts as f64;
    let mut coeffs = Vec::with_capacity(npts * f.components());
    let mut buf = vec![ZERO; npts];
    for c in 0..f.components() {
        for (b, &v) in buf.iter_mut().zip(f.component(c)) {
            *b = Complex64::new(v, 0.0);
        }
        fft::forward(&mut buf, grid.points_per_axis(), grid.dim());
        coeffs.extend(buf.iter().map(|z| z * scale));
    }
    SpectralField::new(grid, f.components(), coeffs).expect("shape preserved")
}

/// Inverse of [`transform`]; the imaginary residue is discarded.
pub fn inverse_transform(fh: &SpectralField) -> Field {
    let grid = fh.grid();
    let npts = grid.len();
    let scale = 1.0 / torus_factor(grid.dim());
    let mut data = Vec::with_capacity(npts * fh.components());
    let mut buf = vec![ZERO; npts];
    for c in 0..fh.components() {
        buf.copy_from_slice(fh.component(c));
        fft::inverse(&mut buf, grid.points_per_axis(), grid.dim());
        data.extend(buf.iter().map(|z| z.re * scale));
    }
    Field::new(grid, fh.components(), data).expect("shape preserved")
}

/// Multiplies every component by a real radial symbol `m(|ξ|)`.
pub fn apply_radial(fh: &mut SpectralField, symbol: impl Fn(f64) -> f64) {
    let grid = fh.grid();
    let weights: Vec<f64> = grid.wave_norms().into_iter().map(symbol).collect();
    for c in 0..fh.components() {
        for (z, w) in fh.component_mut(c).iter_mut().zip(&weights) {
            *z *= *w;
        }
    }
}

/// Applies a radial Fourier multiplier to a field.
pub fn radial_multiplier(f: &Field, symbol: impl Fn(f64) -> f64) -> Field {
    let mut fh = transform(f);
    apply_radial(&mut fh, symbol);
    inverse_transform(&fh)
}

/// Spectral derivative along `axis`; the Nyquist mode of that axis is
/// unresolved and dropped.
pub fn derivative(f: &Field, axis: usize) -> Result<Field> {
    let grid = f.grid();
    if axis >= grid.dim() {
        return Err(Error::AxisOutOfRange { axis, dim: grid.dim() });
    }
    let mut fh = transform(f);
    differentiate_spectrum(&mut fh, axis);
    Ok(inverse_transform(&fh))
}

pub(crate) fn differentiate_spectrum(fh: &mut SpectralField, axis: usize) {
    let grid = fh.grid();
    let npts = grid.len();
    for c in 0..fh.components() {
        let block = fh.component_mut(c);
        for (flat, z) in block.iter_mut().enumerate().take(npts) {
            let idx = grid.axis_indices(flat)[axis];
            if grid.is_nyquist_index(idx) {
                *z = ZERO;
            } else {
                let k = grid.wavenumber(idx) as f64;
                *z = Complex64::new(-k * z.im, k * z.re);
            }
        }
    }
}

/// All first derivatives, `[∂_0 f, ∂_1 f, ...]`.
pub fn gradient(f: &Field) -> Vec<Field> {
    let fh = transform(f);
    (0..f.grid().dim())
        .map(|axis| {
            let mut d = fh.clone();
            differentiate_spectrum(&mut d, axis);
            inverse_transform(&d)
        })
        .collect()
}

/// Index map between the coarse spectrum and the 3/2-padded spectrum.
pub(crate) struct Padding {
    grid: GridSpec,
    side: usize,
    map: Vec<(usize, usize)>,
}

thread_local! {
    static PADDINGS: RefCell<HashMap<GridSpec, Rc<Padding>>> = RefCell::new(HashMap::new());
}

impl Padding {
    pub(crate) fn for_grid(grid: GridSpec) -> Rc<Padding> {
        PADDINGS.with(|cache| {
            cache
                .borrow_mut()
                .entry(grid)
                .or_insert_with(|| Rc::new(Padding::build(grid)))
                .clone()
        })
    }

    fn build(grid: GridSpec) -> Padding {
        let side = grid.padded_points();
        let n = grid.points_per_axis();
        let mut map = Vec::with_capacity(grid.len());
        for flat in 0..grid.len() {
            let idx = grid.axis_indices(flat);
            if (0..grid.dim()).any(|a| grid.is_nyquist_index(idx[a])) {
                continue;
            }
            let mut padded = 0usize;
            let mut stride = 1usize;
            for a in 0..grid.dim() {
                let k = grid.wavenumber(idx[a]);
                let p = k.rem_euclid(side as i64) as usize;
                padded += p * stride;
                stride *= side;
            }
            map.push((flat, padded));
        }
        debug_assert!(n >= 16);
        Padding { grid, side, map }
    }

    pub(crate) fn padded_len(&self) -> usize {
        self.side.pow(self.grid.dim() as u32)
    }

    /// Values of one spectral component sampled on the padded grid.
    pub(crate) fn to_physical(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = vec![ZERO; self.padded_len()];
        let scale = 1.0 / torus_factor(self.grid.dim());
        for &(coarse, padded) in &self.map {
            buf[padded] = coeffs[coarse] * scale;
        }
        fft::inverse(&mut buf, self.side, self.grid.dim());
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Spectrum of padded-grid samples truncated to the resolved coarse
    /// modes (Nyquist excluded).
    pub(crate) fn to_spectrum(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&mut buf, self.side, self.grid.dim());
        let scale = torus_factor(self.grid.dim()) / self.padded_len() as f64;
        let mut out = vec![ZERO; self.grid.len()];
        for &(coarse, padded) in &self.map {
            out[coarse] = buf[padded] * scale;
        }
        out
    }

    /// Samples of a whole field on the padded grid, one vector per component.
    pub(crate) fn field_to_physical(&self, f: &Field) -> Vec<Vec<f64>> {
        let fh = transform(f);
        (0..f.components()).map(|c| self.to_physical(fh.component(c))).collect()
    }

    /// Truncated field from padded samples, one vector per component.
    pub(crate) fn physical_to_field(&self, values: &[Vec<f64>]) -> Field {
        let comps = values.len();
        let mut coeffs = Vec::with_capacity(comps * self.grid.len());
        for v in values {
            coeffs.extend(self.to_spectrum(v));
        }
        let fh = SpectralField::new(self.grid, comps, coeffs).expect("shape preserved");
        inverse_transform(&fh)
    }
}

/// Alias-free pointwise product via 3/2 zero padding (equivalently the 2/3
/// rule). Componentwise, with a one-component factor broadcast against the
/// other. The result is the truncation of `fg` to the resolved modes.
pub fn dealiased_product(f: &Field, g: &Field) -> Result<Field> {
    f.grid().ensure_same(&g.grid())?;
    let comps = match (f.components(), g.components()) {
        (a, b) if a == b => a,
        (1, b) => b,
        (a, 1) => a,
        (a, b) => return Err(Error::ComponentMismatch { expected: a, found: b }),
    };
    let pad = Padding::for_grid(f.grid());
    let fp = pad.field_to_physical(f);
    let gp = pad.field_to_physical(g);
    let out: Vec<Vec<f64>> = (0..comps)
        .map(|c| {
            let a = &fp[if fp.len() == 1 { 0 } else { c }];
            let b = &gp[if gp.len() == 1 { 0 } else { c }];
            a.iter().zip(b).map(|(x, y)| x * y).collect()
        })
        .collect();
    Ok(pad.physical_to_field(&out))
}

/// Pointwise composition `G(f)` evaluated on the padded grid and truncated.
/// `G` maps the state vector at a point to `out_components` values.
pub fn compose(
    f: &Field,
    out_components: usize,
    g: impl Fn(&[f64], &mut [f64]),
) -> Field {
    let pad = Padding::for_grid(f.grid());
    let fp = pad.field_to_physical(f);
    let len = pad.padded_len();
    let mut out = vec![vec![0.0; len]; out_components];
    let mut state = vec![0.0; f.components()];
    let mut value = vec![0.0; out_components];
    for i in 0..len {
        for (s, comp) in state.iter_mut().zip(&fp) {
            *s = comp[i];
        }
        g(&state, &mut value);
        for (o, v) in out.iter_mut().zip(&value) {
            o[i] = *v;
        }
    }
    pad.physical_to_field(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> GridSpec {
        GridSpec::one_d(n).unwrap()
    }

    #[test]
    fn constant_has_only_zero_mode() {
        let f = Field::constant(grid(32), &[3.0]);
        let fh = transform(&f);
        for (i, z) in fh.coeffs().iter().enumerate() {
            if i == 0 {
                assert!((z.re - 3.0 * (2.0 * PI).sqrt()).abs() < 1e-12);
            } else {
                assert!(z.norm() < 1e-13);
            }
        }
    }

    #[test]
    fn cosine_has_two_modes() {
        let g = grid(64);
        let f = Field::from_fn(g, 1, |_, x| (4.0 * x[0]).cos());
        let fh = transform(&f);
        for (i, z) in fh.coeffs().iter().enumerate() {
            let k = g.wavenumber(i).abs();
            if k == 4 {
                assert!((z.re - (PI / 2.0).sqrt()).abs() < 1e-12);
            } else {
                assert!(z.norm() < 1e-13, "mode {i}");
            }
        }
    }

    #[test]
    fn derivative_of_harmonics() {
        let g = grid(64);
        let f = Field::from_fn(g, 1, |_, x| (3.0 * x[0]).sin());
        let d = derivative(&f, 0).unwrap();
        let want = Field::from_fn(g, 1, |_, x| 3.0 * (3.0 * x[0]).cos());
        assert!((&d - &want).linf_norm() < 1e-12);
        let c = Field::constant(g, &[2.5]);
        assert!(derivative(&c, 0).unwrap().linf_norm() < 1e-13);
        assert!(matches!(derivative(&f, 1), Err(Error::AxisOutOfRange { .. })));
    }

    #[test]
    fn derivative_two_d() {
        let g = GridSpec::new(2, 32).unwrap();
        let f = Field::from_fn(g, 1, |_, x| (2.0 * x[0]).sin() * (3.0 * x[1]).cos());
        let dy = derivative(&f, 1).unwrap();
        let want = Field::from_fn(g, 1, |_, x| -3.0 * (2.0 * x[0]).sin() * (3.0 * x[1]).sin());
        assert!((&dy - &want).linf_norm() < 1e-12);
    }

    #[test]
    fn product_to_sum() {
        let g = grid(64);
        let f = Field::from_fn(g, 1, |_, x| x[0].cos());
        let p = dealiased_product(&f, &f).unwrap();
        let want = Field::from_fn(g, 1, |_, x| 0.5 + 0.5 * (2.0 * x[0]).cos());
        assert!((&p - &want).linf_norm() < 1e-12);
        let one = Field::constant(g, &[1.0]);
        assert!((&dealiased_product(&one, &f).unwrap() - &f).linf_norm() < 1e-13);
    }

    #[test]
    fn product_is_alias_free_at_one_third_bandwidth() {
        let n = 96usize.next_power_of_two();
        let g = grid(n);
        let k = (n / 3) as f64;
        let f = Field::from_fn(g, 1, |_, x| (k * x[0]).cos());
        let p = dealiased_product(&f, &f).unwrap();
        // cos² = ½ + ½cos(2kx); 2k is beyond the resolved band, so only ½ remains
        let want = Field::constant(g, &[0.5]);
        assert!((&p - &want).linf_norm() < 1e-12);
    }

    #[test]
    fn hermitian_symmetry_of_real_fields() {
        let g = GridSpec::new(2, 16).unwrap();
        let f = Field::from_fn(g, 2, |c, x| (x[0] + 2.0 * x[1] + c as f64).sin().exp());
        assert!(transform(&f).hermitian_defect() < 1e-12);
    }
}
