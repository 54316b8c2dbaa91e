//! Reference schemes: parabolic regularization and Galerkin truncation.

use super::config::SolveConfig;
use super::trajectory::{Monitor, Trajectory};
use super::{check_cfl, inner_steps};
use crate::error::{Error, Result};
use crate::model::{apply_n, System};
use crate::spectral::{low_pass, radial_multiplier, Field};

/// Integrating-factor fourth-order Runge-Kutta for
/// `u_t = N(u) - ν(-Δ)^p u`. The dissipative multiplier is applied exactly,
/// so the zero system reproduces `e^{-νt|ξ|^{2p}} u0` to round-off.
pub(crate) fn parabolic_solve(sys: &System, u0: &Field, cfg: &SolveConfig) -> Result<Trajectory> {
    let (dt, steps) = inner_steps(sys, u0, cfg)?;
    let p = 2 * cfg.dissipation_order as i32;
    let nu = cfg.nu;
    let half = |f: &Field| radial_multiplier(f, |r| (-nu * r.powi(p) * dt / 2.0).exp());
    let mut monitor = Monitor::new(sys.name(), cfg, u0)?;
    let mut u = u0.clone();
    for i in 1..=steps {
        let t = i as f64 * dt;
        let step = (|| -> Result<Field> {
            check_cfl(sys, &u, dt)?;
            let k1 = apply_n(sys, &u)?.scaled(dt);
            let eu = half(&u);
            let ek1 = half(&k1);
            let mut y2 = eu.clone();
            y2.axpy(0.5, &ek1);
            let k2 = apply_n(sys, &y2)?.scaled(dt);
            let mut y3 = eu.clone();
            y3.axpy(0.5, &k2);
            let k3 = apply_n(sys, &y3)?.scaled(dt);
            let e2u = half(&eu);
            let mut y4 = e2u.clone();
            y4.axpy(1.0, &half(&k3));
            let k4 = apply_n(sys, &y4)?.scaled(dt);
            let mut mid = &k2 + &k3;
            mid = half(&mid);
            let mut out = e2u;
            out.axpy(1.0 / 6.0, &half(&ek1));
            out.axpy(2.0 / 6.0, &mid);
            out.axpy(1.0 / 6.0, &k4);
            Ok(out)
        })();
        let next = match step {
            Ok(f) => f,
            Err(Error::BlowupDetected { reason, .. }) => {
                monitor.terminate(t, reason, f64::INFINITY);
                break;
            }
            Err(e) => return Err(e),
        };
        if !monitor.observe(t, &next, i == steps)? {
            break;
        }
        u = next;
    }
    Ok(monitor.finish())
}

/// Galerkin cutoff `2^h`; `h` defaults to the Nyquist shell.
pub fn galerkin_cutoff(u0: &Field, cfg: &SolveConfig) -> Result<f64> {
    let nyquist = u0.grid().nyquist();
    let top = nyquist.trailing_zeros() as usize;
    let h = cfg.h_cut.unwrap_or(top);
    let cutoff = 2f64.powi(h as i32);
    if h > top {
        return Err(Error::GridTooCoarse { cutoff, nyquist: nyquist as f64 });
    }
    Ok(cutoff)
}

/// Classical fourth-order Runge-Kutta on `u_t = P_{<2^h} N(P_{<2^h} u)`.
/// Modes at or above the cutoff never change.
pub(crate) fn galerkin_solve(sys: &System, u0: &Field, cfg: &SolveConfig) -> Result<Trajectory> {
    let cutoff = galerkin_cutoff(u0, cfg)?;
    let (dt, steps) = inner_steps(sys, u0, cfg)?;
    let profile = cfg.para.profile;
    let rhs = |u: &Field| -> Result<Field> {
        Ok(low_pass(&apply_n(sys, &low_pass(u, cutoff, profile))?, cutoff, profile))
    };
    let mut monitor = Monitor::new(sys.name(), cfg, u0)?;
    let mut u = u0.clone();
    for i in 1..=steps {
        let t = i as f64 * dt;
        let step = (|| -> Result<Field> {
            check_cfl(sys, &u, dt)?;
            let k1 = rhs(&u)?;
            let mut y = u.clone();
            y.axpy(dt / 2.0, &k1);
            let k2 = rhs(&y)?;
            let mut y = u.clone();
            y.axpy(dt / 2.0, &k2);
            let k3 = rhs(&y)?;
            let mut y = u.clone();
            y.axpy(dt, &k3);
            let k4 = rhs(&y)?;
            let mut out = u.clone();
            out.axpy(dt / 6.0, &k1);
            out.axpy(dt / 3.0, &k2);
            out.axpy(dt / 3.0, &k3);
            out.axpy(dt / 6.0, &k4);
            Ok(out)
        })();
        let next = match step {
            Ok(f) => f,
            Err(Error::BlowupDetected { reason, .. }) => {
                monitor.terminate(t, reason, f64::INFINITY);
                break;
            }
            Err(e) => return Err(e),
        };
        if !monitor.observe(t, &next, i == steps)? {
            break;
        }
        u = next;
    }
    Ok(monitor.finish())
}
