use std::ops::{Add, Mul, Neg, Sub};

use rustfft::num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Real multi-component samples on a periodic grid, stored component-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: GridSpec,
    components: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn new(grid: GridSpec, components: usize, data: Vec<f64>) -> Result<Self> {
        if components == 0 {
            return Err(Error::ShapeMismatch("a field needs at least one component".into()));
        }
        if data.len() != components * grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} samples for {components} components on a {grid} grid, got {}",
                components * grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, components, data })
    }

    pub fn zeros(grid: GridSpec, components: usize) -> Self {
        Self { grid, components, data: vec![0.0; components * grid.len()] }
    }

    pub fn constant(grid: GridSpec, values: &[f64]) -> Self {
        let npts = grid.len();
        let mut data = Vec::with_capacity(values.len() * npts);
        for &v in values {
            data.extend(std::iter::repeat_n(v, npts));
        }
        Self { grid, components: values.len(), data }
    }

    /// Samples `f(component, x)` at every grid point.
    pub fn from_fn(grid: GridSpec, components: usize, f: impl Fn(usize, [f64; 2]) -> f64) -> Self {
        let npts = grid.len();
        let mut data = Vec::with_capacity(components * npts);
        for c in 0..components {
            for i in 0..npts {
                data.push(f(c, grid.point(i)));
            }
        }
        Self { grid, components, data }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// State vector at one grid point.
    pub fn point_value(&self, flat: usize, out: &mut [f64]) {
        let n = self.grid.len();
        for (c, o) in out.iter_mut().enumerate().take(self.components) {
            *o = self.data[c * n + flat];
        }
    }

    pub fn ensure_compatible(&self, other: &Field) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        if self.components != other.components {
            return Err(Error::ComponentMismatch {
                expected: self.components,
                found: other.components,
            });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Non-finite samples are reported as a blowup at time `t`.
    pub fn ensure_finite(&self, t: f64) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::BlowupDetected { time: t, reason: "non-finite samples".into() })
        }
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Field) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * y;
        }
    }

    pub fn scaled(&self, a: f64) -> Field {
        Field {
            grid: self.grid,
            components: self.components,
            data: self.data.iter().map(|v| a * v).collect(),
        }
    }

    /// Quadrature `L²` norm over the torus, `(Σ_c Σ_x |f_c(x)|² · h^dim)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.data.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    /// Grid maximum of the pointwise Euclidean norm across components.
    pub fn linf_norm(&self) -> f64 {
        let n = self.grid.len();
        (0..n)
            .map(|i| {
                (0..self.components)
                    .map(|c| self.data[c * n + i].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Circular shift by `shift` points along axis 0.
    pub fn shifted(&self, shift: usize) -> Field {
        let n = self.grid.points_per_axis();
        let npts = self.grid.len();
        let mut out = Field::zeros(self.grid, self.components);
        for c in 0..self.components {
            for flat in 0..npts {
                let [ix, iy] = self.grid.axis_indices(flat);
                let src = iy * n + (ix + n - shift % n) % n;
                out.data[c * npts + flat] = self.data[c * npts + src];
            }
        }
        out
    }

    /// Selects one component as a scalar field.
    pub fn extract(&self, c: usize) -> Field {
        Field { grid: self.grid, components: 1, data: self.component(c).to_vec() }
    }

    /// Copies `count` consecutive components starting at `start`.
    pub fn slice_components(&self, start: usize, count: usize) -> Field {
        let n = self.grid.len();
        Field {
            grid: self.grid,
            components: count,
            data: self.data[start * n..(start + count) * n].to_vec(),
        }
    }

    /// Stacks scalar fields into a multi-component field.
    pub fn stack(parts: &[Field]) -> Result<Field> {
        let grid = parts
            .first()
            .ok_or_else(|| Error::ShapeMismatch("cannot stack zero fields".into()))?
            .grid;
        let mut data = Vec::new();
        let mut components = 0;
        for p in parts {
            grid.ensure_same(&p.grid)?;
            data.extend_from_slice(&p.data);
            components += p.components;
        }
        Ok(Field { grid, components, data })
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.scaled(rhs)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scaled(-1.0)
    }
}

/// Fourier coefficients of a [`Field`] in transform order, normalized so
/// that `Σ_ξ |f̂(ξ)|²` equals the squared `L²(T^n)` norm.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: GridSpec, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 || coeffs.len() != components * grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                components * grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, components, coeffs })
    }

    pub fn zeros(grid: GridSpec, components: usize) -> Self {
        Self { grid, components, coeffs: vec![Complex64::new(0.0, 0.0); components * grid.len()] }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.len();
        &mut self.coeffs[c * n..(c + 1) * n]
    }

    /// Largest violation of conjugate symmetry `f̂(-ξ) = conj f̂(ξ)`,
    /// relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.points_per_axis();
        let npts = self.grid.len();
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for c in 0..self.components {
            let block = self.component(c);
            for flat in 0..npts {
                let [ix, iy] = self.grid.axis_indices(flat);
                let mirror = if self.grid.dim() == 1 {
                    (n - ix) % n
                } else {
                    ((n - iy) % n) * n + (n - ix) % n
                };
                worst = worst.max((block[flat] - block[mirror].conj()).norm());
            }
        }
        worst / scale
    }

    /// `Σ |f̂|²`
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}
