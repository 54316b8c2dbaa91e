//! Time integration.
//!
//! * `euler_reg`: regularize to `|ξ| < ε^{-1/2}`, then one explicit Euler
//!   step of size `ε`.
//! * `iteration`: paradifferential fixed-point iteration, each iterate
//!   solved with classical RK4.
//! * `parabolic`: `u_t = N(u) - ν(-Δ)^p u` with an integrating factor.
//! * `galerkin`: `u_t = P_{<2^h} N(P_{<2^h} u)` with RK4.
//!
//! Runs stop early when the state stops being finite, when `‖u‖_{H^s}`
//! exceeds `blowup_factor` times its initial value, or (optionally) when the
//! steepest gradient is no longer resolved. The returned trajectory then
//! carries a [`Blowup`] terminator instead of an error, so the samples up to
//! that time remain available.

mod config;
mod euler;
mod iteration;
mod oracle;
mod reference;
mod trajectory;

pub use config::{Scheme, SolveConfig, AUTO_CFL, CFL_LIMIT};
pub use euler::{euler_reg_step, euler_steps, regularize, StepReport};
pub use iteration::{iteration_solve, ContractionReport};
pub use oracle::CharacteristicsOracle;
pub use reference::galerkin_cutoff;
pub use trajectory::{
    write_state_dump, Blowup, Diagnostics, StateDump, StepAudit, Trajectory, NORMALIZATION_NOTE,
    STATE_MAGIC, STATE_VERSION,
};

use crate::error::{Error, Result};
use crate::model::System;
use crate::spectral::Field;

/// `max_x (Σ_j ‖A^j(u(x))‖_F²)^{1/2}` over grid points.
pub fn max_coefficient_norm(sys: &System, u: &Field) -> f64 {
    let mut state = vec![0.0; sys.components()];
    let mut a = vec![0.0; sys.coeff_len()];
    let mut worst: f64 = 0.0;
    for i in 0..u.grid().len() {
        u.point_value(i, &mut state);
        sys.coeff(&state, &mut a);
        worst = worst.max(a.iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    worst
}

/// `dt · N · max|A|`.
pub fn cfl_number(sys: &System, u: &Field, dt: f64) -> f64 {
    dt * u.grid().points_per_axis() as f64 * max_coefficient_norm(sys, u)
}

pub(crate) fn check_cfl(sys: &System, u: &Field, dt: f64) -> Result<()> {
    let number = cfl_number(sys, u, dt);
    if number > CFL_LIMIT {
        return Err(Error::CflViolation { number, limit: CFL_LIMIT });
    }
    Ok(())
}

/// Inner step and step count; the step divides `T` exactly.
pub(crate) fn inner_steps(sys: &System, u0: &Field, cfg: &SolveConfig) -> Result<(f64, usize)> {
    let t = cfg.horizon;
    let requested = match cfg.inner_dt {
        Some(dt) => dt,
        None => {
            let amax = max_coefficient_norm(sys, u0);
            let courant = if amax > 0.0 {
                AUTO_CFL / (u0.grid().points_per_axis() as f64 * amax)
            } else {
                f64::INFINITY
            };
            courant.min(t / 10.0)
        }
    };
    let steps = (t / requested - 1e-9).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    check_cfl(sys, u0, dt)?;
    Ok((dt, steps))
}

fn check_data(sys: &System, u0: &Field) -> Result<()> {
    if u0.components() != sys.components() {
        return Err(Error::ComponentMismatch { expected: sys.components(), found: u0.components() });
    }
    if u0.grid().dim() != sys.dim() {
        return Err(Error::ShapeMismatch(format!(
            "system '{}' is {}-dimensional but the grid is {}",
            sys.name(),
            sys.dim(),
            u0.grid()
        )));
    }
    Ok(())
}

/// Advances `u0` to `T` with the configured scheme.
pub fn solve(sys: &System, u0: &Field, cfg: &SolveConfig) -> Result<Trajectory> {
    cfg.validate()?;
    check_data(sys, u0)?;
    match cfg.scheme {
        Scheme::EulerReg => euler::euler_solve(sys, u0, cfg),
        Scheme::Iteration => Ok(iteration_solve(sys, u0, cfg)?.0),
        Scheme::Parabolic => reference::parabolic_solve(sys, u0, cfg),
        Scheme::Galerkin => reference::galerkin_solve(sys, u0, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin, ConstantSystem};
    use crate::paraproduct::ParaConfig;
    use crate::spectral::GridSpec;

    #[test]
    fn constant_data_is_stationary_for_every_scheme() {
        let g = GridSpec::one_d(64).unwrap();
        let sys = builtin("burgers").unwrap();
        let u0 = Field::constant(g, &[0.3]);
        for scheme in Scheme::ALL {
            let cfg = SolveConfig {
                scheme,
                horizon: 0.05,
                epsilon: 2f64.powi(-8),
                para: ParaConfig::with_gap(2),
                ..Default::default()
            };
            let traj = solve(&sys, &u0, &cfg).unwrap();
            assert!(traj.terminator.is_none());
            for s in traj.states() {
                assert_eq!(s, &u0, "{scheme}");
            }
        }
    }

    #[test]
    fn heat_multiplier_is_exact() {
        let g = GridSpec::one_d(64).unwrap();
        let sys = System::new(ConstantSystem::zero(1, 1)).unwrap();
        let u0 = Field::from_fn(g, 1, |_, x| x[0].sin() + 0.5 * (3.0 * x[0]).cos());
        let nu = 0.1;
        let cfg = SolveConfig { scheme: Scheme::Parabolic, nu, horizon: 0.2, ..Default::default() };
        let traj = solve(&sys, &u0, &cfg).unwrap();
        let want = Field::from_fn(g, 1, |_, x| {
            (-nu * 0.2f64).exp() * x[0].sin() + 0.5 * (-9.0 * nu * 0.2f64).exp() * (3.0 * x[0]).cos()
        });
        assert!((traj.final_state() - &want).linf_norm() < 1e-12);
        let l2: Vec<f64> = traj.diagnostics().iter().map(|d| d.l2).collect();
        assert!(l2.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn too_fine_regularization_is_rejected() {
        let g = GridSpec::one_d(32).unwrap();
        let sys = builtin("burgers").unwrap();
        let u0 = Field::from_fn(g, 1, |_, x| x[0].sin());
        let cfg = SolveConfig { epsilon: 2f64.powi(-10), ..Default::default() };
        assert!(matches!(solve(&sys, &u0, &cfg), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn explicit_cfl_violation() {
        let g = GridSpec::one_d(64).unwrap();
        let sys = builtin("burgers").unwrap();
        let u0 = Field::from_fn(g, 1, |_, x| x[0].sin());
        let cfg = SolveConfig { scheme: Scheme::Galerkin, inner_dt: Some(0.05), ..Default::default() };
        assert!(matches!(solve(&sys, &u0, &cfg), Err(Error::CflViolation { .. })));
    }

    #[test]
    fn euler_matches_oracle_early() {
        let g = GridSpec::one_d(128).unwrap();
        let sys = builtin("burgers").unwrap();
        let u0 = Field::from_fn(g, 1, |_, x| x[0].sin());
        let cfg = SolveConfig { epsilon: 2f64.powi(-10), horizon: 0.25, ..Default::default() };
        let traj = solve(&sys, &u0, &cfg).unwrap();
        let exact = CharacteristicsOracle::sine(1.0).field(g, 0.25).unwrap();
        let err = (&traj.state_at(0.25).unwrap() - &exact).l2_norm();
        assert!(err < 5e-3, "{err}");
    }
}
