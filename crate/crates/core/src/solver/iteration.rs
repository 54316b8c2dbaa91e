//! Paradifferential fixed-point iteration
//! `∂_t u^{n+1} = T(u^n) u^{n+1} + F(u^n)`, `u^{n+1}(0) = u0`, where
//! `T(u)` is the paradifferential operator and `F(u) = N(u) - T(u) u`.

use serde::{Deserialize, Serialize};

use super::config::SolveConfig;
use super::trajectory::{Monitor, Trajectory};
use super::{check_cfl, inner_steps};
use crate::error::{Error, Result};
use crate::model::{apply_n, ParadiffOperator, System};
use crate::spectral::Field;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    /// `d_n = max_t ‖u^{n+1}(t) - u^n(t)‖_{L²}`, starting from `u^0 ≡ u0`.
    pub distances: Vec<f64>,
    /// `d_n / d_{n-1}` for `n >= 2`.
    pub ratios: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub inner_dt: f64,
}

impl ContractionReport {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

/// `u^n` frozen at one time: `rhs(w) = T(ū)(w - ū) + N(ū)`.
struct Frozen {
    op: ParadiffOperator,
    ubar: Field,
    n_ubar: Field,
}

impl Frozen {
    fn new(sys: &System, ubar: Field, cfg: &SolveConfig) -> Result<Self> {
        let op = ParadiffOperator::new(sys, &ubar, &cfg.para, !cfg.drop_zeroth_order)?;
        let n_ubar = apply_n(sys, &ubar)?;
        Ok(Self { op, ubar, n_ubar })
    }

    fn rhs(&self, w: &Field) -> Result<Field> {
        let mut out = self.op.apply(&(w - &self.ubar))?;
        out.axpy(1.0, &self.n_ubar);
        Ok(out)
    }
}

/// Cubic Hermite value at the midpoint of a step.
fn hermite_mid(y0: &Field, y1: &Field, d0: &Field, d1: &Field, h: f64) -> Field {
    let mut out = y0 + y1;
    out = out.scaled(0.5);
    out.axpy(h / 8.0, d0);
    out.axpy(-h / 8.0, d1);
    out
}

/// One linear solve with `u^n` given by samples and time derivatives.
fn sweep(
    sys: &System,
    cfg: &SolveConfig,
    u0: &Field,
    prev: &[Field],
    prev_d: &[Field],
    dt: f64,
) -> Result<(Vec<Field>, Vec<Field>)> {
    let steps = prev.len() - 1;
    let mut states = Vec::with_capacity(steps + 1);
    let mut derivs = Vec::with_capacity(steps + 1);
    let mut y = u0.clone();
    states.push(y.clone());
    let mut start = Frozen::new(sys, prev[0].clone(), cfg)?;
    for i in 0..steps {
        check_cfl(sys, &prev[i], dt)?;
        let mid = Frozen::new(sys, hermite_mid(&prev[i], &prev[i + 1], &prev_d[i], &prev_d[i + 1], dt), cfg)?;
        let end = Frozen::new(sys, prev[i + 1].clone(), cfg)?;
        let k1 = start.rhs(&y)?;
        let mut z = y.clone();
        z.axpy(dt / 2.0, &k1);
        let k2 = mid.rhs(&z)?;
        let mut z = y.clone();
        z.axpy(dt / 2.0, &k2);
        let k3 = mid.rhs(&z)?;
        let mut z = y.clone();
        z.axpy(dt, &k3);
        let k4 = end.rhs(&z)?;
        y.axpy(dt / 6.0, &k1);
        y.axpy(dt / 3.0, &k2);
        y.axpy(dt / 3.0, &k3);
        y.axpy(dt / 6.0, &k4);
        if !y.is_finite() {
            return Err(Error::BlowupDetected { time: (i + 1) as f64 * dt, reason: "non-finite iterate".into() });
        }
        derivs.push(k1);
        states.push(y.clone());
        start = end;
    }
    derivs.push(start.rhs(&y)?);
    Ok((states, derivs))
}

/// Runs the iteration on `[0, T]` until `d_n <= tol · ‖u0‖_{L²}` or the
/// iteration budget is spent. Two consecutive ratios `d_n/d_{n-1} >= 1`
/// abort with [`Error::NonContraction`].
pub fn iteration_solve(sys: &System, u0: &Field, cfg: &SolveConfig) -> Result<(Trajectory, ContractionReport)> {
    let (dt, steps) = inner_steps(sys, u0, cfg)?;
    let mut prev = vec![u0.clone(); steps + 1];
    let mut prev_d = vec![Field::zeros(u0.grid(), u0.components()); steps + 1];
    let target = cfg.iteration_tol * u0.l2_norm();
    let mut report =
        ContractionReport { distances: Vec::new(), ratios: Vec::new(), iterations: 0, converged: false, inner_dt: dt };
    for n in 1..=cfg.max_iterations {
        let (states, derivs) = sweep(sys, cfg, u0, &prev, &prev_d, dt)?;
        let d = states.iter().zip(&prev).map(|(a, b)| (a - b).l2_norm()).fold(0.0, f64::max);
        if let Some(&last) = report.distances.last() {
            let ratio = d / last;
            report.ratios.push(ratio);
            let k = report.ratios.len();
            if k >= 2 && report.ratios[k - 1] >= 1.0 && report.ratios[k - 2] >= 1.0 {
                return Err(Error::NonContraction { iteration: n, ratio });
            }
        }
        report.distances.push(d);
        report.iterations = n;
        prev = states;
        prev_d = derivs;
        if d <= target {
            report.converged = true;
            break;
        }
    }
    let mut monitor = Monitor::new(sys.name(), cfg, u0)?;
    for (i, state) in prev.iter().enumerate().skip(1) {
        let t = if i == steps { cfg.horizon } else { i as f64 * dt };
        if !monitor.observe(t, state, i == steps)? {
            break;
        }
    }
    Ok((monitor.finish(), report))
}
