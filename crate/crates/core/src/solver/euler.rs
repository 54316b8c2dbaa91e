use serde::{Deserialize, Serialize};

use super::config::SolveConfig;
use super::trajectory::{Monitor, StepAudit, Trajectory};
use crate::error::{Error, Result};
use crate::model::{apply_n, System};
use crate::norms::sobolev_norm;
use crate::spectral::{low_pass, Field, Profile};

/// Audits of a single regularize-then-Euler step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    /// `‖ũ‖_{H^{s+1}} / (ε^{-1/2} ‖u‖_{H^s})`
    pub regularization_ratio: f64,
    /// `‖ũ‖_{H^s} / ‖u‖_{H^s}`
    pub energy_ratio: f64,
    /// `‖ũ - u‖_{L²}`
    pub approximation_l2: f64,
    /// `‖u‖_{H^s}` of the data
    pub data_hs: f64,
    /// `‖u_next‖_{H^s} / ‖u‖_{H^s}`
    pub step_energy_ratio: f64,
    /// `‖u_next - u - εN(u)‖_{L²}`
    pub defect_l2: f64,
}

/// `P_{<ε^{-1/2}} u`. A cutoff above the Nyquist frequency cannot be
/// represented and is rejected.
pub fn regularize(u: &Field, epsilon: f64, profile: Profile) -> Result<Field> {
    let cutoff = epsilon.powf(-0.5);
    let nyquist = u.grid().nyquist() as f64;
    if cutoff > nyquist {
        return Err(Error::GridTooCoarse { cutoff, nyquist });
    }
    Ok(low_pass(u, cutoff, profile))
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// One step `u_next = ũ + εN(ũ)` with `ũ = P_{<ε^{-1/2}} u`.
pub fn euler_reg_step(sys: &System, u: &Field, epsilon: f64, cfg: &SolveConfig) -> Result<(Field, StepReport)> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Config(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    let reg = regularize(u, epsilon, cfg.para.profile)?;
    let mut next = reg.clone();
    next.axpy(epsilon, &apply_n(sys, &reg)?);
    let data_hs = sobolev_norm(u, cfg.s);
    let mut defect = &next - u;
    defect.axpy(-epsilon, &apply_n(sys, u)?);
    let report = StepReport {
        regularization_ratio: ratio(sobolev_norm(&reg, cfg.s + 1.0), epsilon.powf(-0.5) * data_hs),
        energy_ratio: ratio(sobolev_norm(&reg, cfg.s), data_hs),
        approximation_l2: (&reg - u).l2_norm(),
        data_hs,
        step_energy_ratio: ratio(sobolev_norm(&next, cfg.s), data_hs),
        defect_l2: defect.l2_norm(),
    };
    Ok((next, report))
}

/// Number of Euler steps to reach `T`; the last sample may overshoot by
/// less than one step.
pub fn euler_steps(cfg: &SolveConfig) -> usize {
    ((cfg.horizon / cfg.epsilon) - 1e-9).ceil().max(1.0) as usize
}

pub(crate) fn euler_solve(sys: &System, u0: &Field, cfg: &SolveConfig) -> Result<Trajectory> {
    let eps = cfg.epsilon;
    regularize(u0, eps, cfg.para.profile)?;
    let steps = euler_steps(cfg);
    let mut monitor = Monitor::new(sys.name(), cfg, u0)?;
    let mut audit = StepAudit::default();
    let mut u = u0.clone();
    for j in 1..=steps {
        let t = j as f64 * eps;
        let next = if cfg.audit_steps {
            match euler_reg_step(sys, &u, eps, cfg) {
                Ok((next, r)) => {
                    audit.defect_over_eps2 = audit.defect_over_eps2.max(r.defect_l2 / (eps * eps));
                    audit.growth_over_eps = audit.growth_over_eps.max((r.step_energy_ratio - 1.0) / eps);
                    audit.regularization_ratio = audit.regularization_ratio.max(r.regularization_ratio);
                    Ok(next)
                }
                Err(e) => Err(e),
            }
        } else {
            let reg = regularize(&u, eps, cfg.para.profile)?;
            apply_n(sys, &reg).map(|n| {
                let mut next = reg;
                next.axpy(eps, &n);
                next
            })
        };
        let next = match next {
            Ok(f) => f,
            Err(Error::BlowupDetected { reason, .. }) => {
                monitor.terminate(t, reason, f64::INFINITY);
                break;
            }
            Err(e) => return Err(e),
        };
        if !monitor.observe(t, &next, j == steps)? {
            break;
        }
        u = next;
    }
    if cfg.audit_steps {
        monitor.set_step_audit(audit);
    }
    Ok(monitor.finish())
}
