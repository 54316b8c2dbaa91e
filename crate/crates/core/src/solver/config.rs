use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paraproduct::ParaConfig;
use crate::spectral::GridSpec;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Regularize to `|ξ| < ε^{-1/2}`, then one explicit Euler step of size `ε`.
    #[default]
    EulerReg,
    /// Paradifferential fixed-point iteration on `[0, T]`.
    Iteration,
    /// Parabolic regularization `u_t = N(u) - ν(-Δ)^p u`.
    Parabolic,
    /// Galerkin truncation `u_t = P_{<2^h} N(P_{<2^h} u)`.
    Galerkin,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::EulerReg, Scheme::Iteration, Scheme::Parabolic, Scheme::Galerkin];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::EulerReg => "euler_reg",
            Scheme::Iteration => "iteration",
            Scheme::Parabolic => "parabolic",
            Scheme::Galerkin => "galerkin",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme '{s}'")))
    }
}

/// Courant limit for the explicit inner integrators, `dt · N · max|A| <= 0.5`.
pub const CFL_LIMIT: f64 = 0.5;

/// Default `dt · N · max|A|` when the inner step is chosen automatically.
pub const AUTO_CFL: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    pub scheme: Scheme,
    /// Euler step size, also fixing the regularization scale `ε^{-1/2}`.
    pub epsilon: f64,
    /// Final time.
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Working Sobolev index.
    pub s: f64,
    /// Inner step for the iteration, parabolic and Galerkin schemes; chosen
    /// from the Courant limit when absent.
    pub inner_dt: Option<f64>,
    /// Parabolic viscosity.
    pub nu: f64,
    /// Power `p` of `(-Δ)^p` in the parabolic scheme, 1 or 2.
    pub dissipation_order: u32,
    /// Galerkin cutoff shell `h`, projecting onto `|ξ| < 2^h`. Defaults to the
    /// Nyquist shell, where the projector keeps every resolved mode.
    pub h_cut: Option<usize>,
    pub para: ParaConfig,
    /// Drops `T_{DA(u)∂u}` from the paradifferential flow.
    pub drop_zeroth_order: bool,
    /// Record a trajectory sample every this many steps.
    pub monitor_every: usize,
    /// A run stops once `‖u‖_{H^s}` exceeds this multiple of its initial value.
    pub blowup_factor: f64,
    /// When set, a run also stops once `B · h >= κ · A` for grid spacing
    /// `h`: the state then changes by a fraction `κ` of its amplitude across
    /// a single cell, so the steepest gradient is no longer resolved.
    pub gradient_resolution: Option<f64>,
    /// When set, each sample carries a frequency envelope with this slack.
    pub envelope_delta: Option<f64>,
    /// Track per-step defects and growth for the Euler scheme.
    pub audit_steps: bool,
    pub max_iterations: usize,
    /// Iteration stops once `d_n <= tol · ‖u0‖_{L²}`.
    pub iteration_tol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::EulerReg,
            epsilon: 2f64.powi(-10),
            horizon: 0.5,
            s: 3.0,
            inner_dt: None,
            nu: 1e-4,
            dissipation_order: 1,
            h_cut: None,
            para: ParaConfig::default(),
            drop_zeroth_order: false,
            monitor_every: 1,
            blowup_factor: 1e6,
            gradient_resolution: None,
            envelope_delta: None,
            audit_steps: false,
            max_iterations: 12,
            iteration_tol: 1e-10,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("T must be positive, got {}", self.horizon));
        }
        if self.scheme == Scheme::EulerReg && !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return bad(format!("epsilon must lie in (0, 1/2), got {}", self.epsilon));
        }
        if let Some(dt) = self.inner_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("inner_dt must be positive, got {dt}"));
            }
        }
        if self.scheme == Scheme::Parabolic && !(self.nu > 0.0) {
            return bad(format!("nu must be positive, got {}", self.nu));
        }
        if !matches!(self.dissipation_order, 1 | 2) {
            return bad(format!("dissipation_order must be 1 or 2, got {}", self.dissipation_order));
        }
        if self.monitor_every == 0 {
            return bad("monitor_every must be at least 1".into());
        }
        if !(self.blowup_factor > 1.0) {
            return bad(format!("blowup_factor must exceed 1, got {}", self.blowup_factor));
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1".into());
        }
        self.para.validate()
    }

    /// Warns when `s` is at or below the well-posedness threshold `n/2 + 1`.
    pub fn threshold_warning(&self, grid: &GridSpec) -> Option<String> {
        let threshold = grid.dim() as f64 / 2.0 + 1.0;
        (self.s <= threshold).then(|| {
            format!("s = {} is not above n/2 + 1 = {threshold}; bounds may not hold", self.s)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("rk4".parse::<Scheme>().is_err());
    }

    #[test]
    fn validation() {
        assert!(SolveConfig::default().validate().is_ok());
        let cfg = SolveConfig { epsilon: 0.7, ..Default::default() };
        assert!(cfg.validate().is_err());
        let g = GridSpec::one_d(64).unwrap();
        assert!(SolveConfig::default().threshold_warning(&g).is_none());
        assert!(SolveConfig { s: 1.2, ..Default::default() }.threshold_warning(&g).is_some());
    }
}
