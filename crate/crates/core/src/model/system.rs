use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A first-order system `u_t = A^j(u) ∂_j u` with symmetric coefficients.
///
/// Matrices are flattened as `[j][a][b]`, so `coeff` fills `dim * m * m`
/// entries with `A^j_{ab}` at `j*m*m + a*m + b`.
pub trait HyperbolicSystem: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn components(&self) -> usize;
    /// `A^j(u)` for every direction `j`.
    fn coeff(&self, u: &[f64], out: &mut [f64]);
    /// `DA^j(u) · dir`, the derivative of `A^j` at `u` along `dir`.
    fn coeff_jacobian(&self, u: &[f64], dir: &[f64], out: &mut [f64]);
}

const VALIDATION_STATES: usize = 1000;
const VALIDATION_SEED: u64 = 0x05ee_da11;
const FD_STEP: f64 = 1e-5;
const FD_TOLERANCE: f64 = 1e-6;

/// A validated, cheaply clonable handle to a [`HyperbolicSystem`].
#[derive(Clone)]
pub struct System {
    inner: Arc<dyn HyperbolicSystem>,
}

impl fmt::Debug for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("System")
            .field("name", &self.name())
            .field("dim", &self.dim())
            .field("components", &self.components())
            .finish()
    }
}

impl System {
    /// Wraps `sys` after checking symmetry and the Jacobian on random states.
    pub fn new(sys: impl HyperbolicSystem + 'static) -> Result<Self> {
        let s = System { inner: Arc::new(sys) };
        s.validate()?;
        Ok(s)
    }

    pub fn name(&self) -> &str {
        self.inner.name()
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn components(&self) -> usize {
        self.inner.components()
    }

    /// Number of coefficient entries, `dim * m * m`.
    pub fn coeff_len(&self) -> usize {
        self.dim() * self.components() * self.components()
    }

    pub fn coeff(&self, u: &[f64], out: &mut [f64]) {
        self.inner.coeff(u, out)
    }

    pub fn coeff_jacobian(&self, u: &[f64], dir: &[f64], out: &mut [f64]) {
        self.inner.coeff_jacobian(u, dir, out)
    }

    /// Largest entry of `|A^j - (A^j)^T|` in a flattened coefficient block.
    pub fn asymmetry(&self, coeffs: &[f64]) -> f64 {
        let m = self.components();
        let mut worst: f64 = 0.0;
        for block in coeffs.chunks(m * m) {
            for a in 0..m {
                for b in (a + 1)..m {
                    worst = worst.max((block[a * m + b] - block[b * m + a]).abs());
                }
            }
        }
        worst
    }

    fn validate(&self) -> Result<()> {
        let (n, m) = (self.dim(), self.components());
        if !(1..=2).contains(&n) || m == 0 {
            return Err(Error::InvalidSystem(format!(
                "{}: dim must be 1 or 2 and components positive (got dim {n}, m {m})",
                self.name()
            )));
        }
        let len = self.coeff_len();
        let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
        let mut u = vec![0.0; m];
        let mut dir = vec![0.0; m];
        let mut a = vec![0.0; len];
        let (mut plus, mut minus, mut jac) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
        for trial in 0..VALIDATION_STATES {
            u.iter_mut().for_each(|x| *x = rng.gen_range(-2.0..2.0));
            dir.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
            self.coeff(&u, &mut a);
            if a.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSystem(format!("{}: non-finite coefficient at {u:?}", self.name())));
            }
            let asym = self.asymmetry(&a);
            if asym != 0.0 {
                return Err(Error::InvalidSystem(format!(
                    "{}: coefficient matrix not symmetric at {u:?} (defect {asym:e})",
                    self.name()
                )));
            }
            if trial % 10 != 0 {
                continue;
            }
            let up: Vec<f64> = u.iter().zip(&dir).map(|(x, d)| x + FD_STEP * d).collect();
            let um: Vec<f64> = u.iter().zip(&dir).map(|(x, d)| x - FD_STEP * d).collect();
            self.coeff(&up, &mut plus);
            self.coeff(&um, &mut minus);
            self.coeff_jacobian(&u, &dir, &mut jac);
            let mut err = 0.0;
            let mut scale = 0.0;
            for i in 0..len {
                let fd = (plus[i] - minus[i]) / (2.0 * FD_STEP);
                err += (fd - jac[i]).powi(2);
                scale += jac[i] * jac[i];
            }
            let rel = err.sqrt() / scale.sqrt().max(1.0);
            if rel > FD_TOLERANCE {
                return Err(Error::InvalidSystem(format!(
                    "{}: coefficient Jacobian disagrees with finite differences at {u:?} (relative error {rel:e})",
                    self.name()
                )));
            }
        }
        Ok(())
    }
}

/// Scalar Burgers, `A(u) = u`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Burgers;

impl HyperbolicSystem for Burgers {
    fn name(&self) -> &str {
        "burgers"
    }
    fn dim(&self) -> usize {
        1
    }
    fn components(&self) -> usize {
        1
    }
    fn coeff(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }
    fn coeff_jacobian(&self, _u: &[f64], dir: &[f64], out: &mut [f64]) {
        out[0] = dir[0];
    }
}

/// Coupled two-component system `A(u) = [[u1, u2], [u2, -u1]]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sym2;

impl HyperbolicSystem for Sym2 {
    fn name(&self) -> &str {
        "sym2"
    }
    fn dim(&self) -> usize {
        1
    }
    fn components(&self) -> usize {
        2
    }
    fn coeff(&self, u: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&[u[0], u[1], u[1], -u[0]]);
    }
    fn coeff_jacobian(&self, _u: &[f64], v: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&[v[0], v[1], v[1], -v[0]]);
    }
}

/// Two-dimensional scalar Burgers, `A^1(u) = u`, `A^2(u) = u/2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Burgers2d;

impl HyperbolicSystem for Burgers2d {
    fn name(&self) -> &str {
        "burgers2d"
    }
    fn dim(&self) -> usize {
        2
    }
    fn components(&self) -> usize {
        1
    }
    fn coeff(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
        out[1] = 0.5 * u[0];
    }
    fn coeff_jacobian(&self, _u: &[f64], dir: &[f64], out: &mut [f64]) {
        out[0] = dir[0];
        out[1] = 0.5 * dir[0];
    }
}

/// State-independent coefficients; `A ≡ 0` gives the zero system.
#[derive(Clone, Debug)]
pub struct ConstantSystem {
    name: String,
    dim: usize,
    components: usize,
    matrices: Vec<f64>,
}

impl ConstantSystem {
    pub fn new(name: &str, dim: usize, components: usize, matrices: Vec<f64>) -> Result<Self> {
        if matrices.len() != dim * components * components {
            return Err(Error::InvalidSystem(format!(
                "{name}: expected {} coefficient entries, got {}",
                dim * components * components,
                matrices.len()
            )));
        }
        Ok(Self { name: name.to_string(), dim, components, matrices })
    }

    pub fn zero(dim: usize, components: usize) -> Self {
        Self { name: "zero".into(), dim, components, matrices: vec![0.0; dim * components * components] }
    }
}

impl HyperbolicSystem for ConstantSystem {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn components(&self) -> usize {
        self.components
    }
    fn coeff(&self, _u: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.matrices);
    }
    fn coeff_jacobian(&self, _u: &[f64], _dir: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
    }
}

pub type CoeffFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync>;

/// A system defined by user callbacks.
#[derive(Clone)]
pub struct CallbackSystem {
    pub name: String,
    pub dim: usize,
    pub components: usize,
    pub coeff: CoeffFn,
    pub jacobian: JacobianFn,
}

impl HyperbolicSystem for CallbackSystem {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn components(&self) -> usize {
        self.components
    }
    fn coeff(&self, u: &[f64], out: &mut [f64]) {
        (self.coeff)(u, out)
    }
    fn coeff_jacobian(&self, u: &[f64], dir: &[f64], out: &mut [f64]) {
        (self.jacobian)(u, dir, out)
    }
}
