//! Frequency envelopes: slowly varying sequences `c_k` dominating the dyadic
//! shell norms `‖P_k u‖_{H^s}`.
//!
//! The envelope is `c_k = max_j 2^{-d(j,k)} a_j` with `a_j = ‖P_j u‖_{H^s}`.
//! In the symmetric mode `d(j,k) = δ|j-k|`; in the asymmetric mode
//! `d(j,k) = δ_hi (k-j)_+ + δ_lo (j-k)_+`, which lets the envelope fall off
//! quickly towards high frequencies while still rising slowly. Either way
//! `d` obeys the triangle inequality, so `c_j <= 2^{d(j,k)} c_k` for all
//! `j, k` and `a_k <= c_k`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{shell_norms, spectral_sobolev_norm};
use crate::solver::Trajectory;
use crate::spectral::{transform, Field, Profile};

/// Relative slack allowed when checking slow variation in floating point.
pub const SLOW_VARIATION_SLACK: f64 = 1e-9;

/// Default audit exponent for high-frequency decay in propagation audits.
pub const DEFAULT_DECAY_EXPONENT: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Slack {
    Symmetric { delta: f64 },
    Asymmetric { lo: f64, hi: f64 },
}

impl Slack {
    pub fn symmetric(delta: f64) -> Self {
        Slack::Symmetric { delta }
    }

    /// The `(0.25, 2)` unbalanced slack.
    pub fn default_asymmetric() -> Self {
        Slack::Asymmetric { lo: 0.25, hi: 2.0 }
    }

    /// Exponent `d(j, k)` bounding how much `c_k` may fall below `c_j`.
    pub fn distance(&self, j: usize, k: usize) -> f64 {
        let (j, k) = (j as f64, k as f64);
        match *self {
            Slack::Symmetric { delta } => delta * (j - k).abs(),
            Slack::Asymmetric { lo, hi } => hi * (k - j).max(0.0) + lo * (j - k).max(0.0),
        }
    }

    /// `Σ_m 2^{-2d(0,m)}` over all integers `m`, the bound on
    /// `Σ c_k² / ‖u‖²_{H^s}`.
    pub fn young_constant(&self) -> f64 {
        match *self {
            Slack::Symmetric { delta } => {
                let q = 2f64.powf(-2.0 * delta);
                (1.0 + q) / (1.0 - q)
            }
            Slack::Asymmetric { lo, hi } => {
                let (qlo, qhi) = (2f64.powf(-2.0 * lo), 2f64.powf(-2.0 * hi));
                1.0 / (1.0 - qhi) + qlo / (1.0 - qlo)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Slack::Symmetric { delta } => delta > 0.0 && delta < 1.0,
            Slack::Asymmetric { lo, hi } => lo > 0.0 && lo < 1.0 && hi >= lo,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid envelope slack {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEnvelope {
    pub s: f64,
    pub slack: Slack,
    /// `a_k = ‖P_k u‖_{H^s}` for `k = 0..=K`.
    pub shell_norms: Vec<f64>,
    /// The envelope `c_k`.
    pub c: Vec<f64>,
    /// `H^s` mass at or above the Nyquist radius. It is folded into the top
    /// shell but reported here so callers can see it.
    pub unresolved: f64,
}

/// Symmetric envelope with slack `delta ∈ (0, 1)`.
pub fn sharp_envelope(u: &Field, s: f64, delta: f64) -> Result<FrequencyEnvelope> {
    envelope_with(u, s, Slack::symmetric(delta))
}

pub fn envelope_with(u: &Field, s: f64, slack: Slack) -> Result<FrequencyEnvelope> {
    let mut env = FrequencyEnvelope::from_shell_norms(shell_norms(u, s, Profile::Sharp), s, slack)?;
    let grid = u.grid();
    let mut fh = transform(u);
    let nyq = grid.nyquist() as f64;
    crate::spectral::apply_radial(&mut fh, |r| if r >= nyq { 1.0 } else { 0.0 });
    env.unresolved = spectral_sobolev_norm(&fh, s);
    Ok(env)
}

impl FrequencyEnvelope {
    pub fn from_shell_norms(shell_norms: Vec<f64>, s: f64, slack: Slack) -> Result<Self> {
        slack.validate()?;
        let c = (0..shell_norms.len())
            .map(|k| {
                shell_norms
                    .iter()
                    .enumerate()
                    .map(|(j, &a)| 2f64.powf(-slack.distance(j, k)) * a)
                    .fold(0.0, f64::max)
            })
            .collect();
        Ok(Self { s, slack, shell_norms, c, unresolved: 0.0 })
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// Largest shell index `k_max`.
    pub fn k_max(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn has_unresolved_mass(&self) -> bool {
        self.unresolved > 0.0
    }

    /// `(Σ_{m>=h} c_m²)^{1/2}`, zero when `h > k_max`.
    pub fn tail(&self, h: usize) -> f64 {
        self.c.iter().skip(h).map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.tail(0)
    }

    /// `a_k <= c_k` for every shell.
    pub fn dominates(&self, shell_norms: &[f64]) -> bool {
        shell_norms.len() == self.c.len() && shell_norms.iter().zip(&self.c).all(|(a, c)| a <= c)
    }

    /// `c_j <= 2^{d(j,k)} c_k (1 + slack)` for all `j, k`.
    pub fn is_slowly_varying(&self) -> bool {
        self.slow_variation_defect() <= 1.0 + SLOW_VARIATION_SLACK
    }

    /// `max_{j,k} c_j / (2^{d(j,k)} c_k)`; 1 or less for a valid envelope.
    pub fn slow_variation_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, &cj) in self.c.iter().enumerate() {
            for (k, &ck) in self.c.iter().enumerate() {
                if cj == 0.0 {
                    continue;
                }
                let bound = 2f64.powf(self.slack.distance(j, k)) * ck;
                worst = worst.max(if bound == 0.0 { f64::INFINITY } else { cj / bound });
            }
        }
        worst
    }

    /// `Σ c_k² / Σ a_k²`, between 1 and the Young constant.
    pub fn sharpness(&self) -> f64 {
        let a2: f64 = self.shell_norms.iter().map(|v| v * v).sum();
        if a2 == 0.0 {
            0.0
        } else {
            self.l2_norm().powi(2) / a2
        }
    }

    /// Envelope CSV: `k,a_k,c_k`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "# s={} slack={:?} unresolved_hs={:e}", self.s, self.slack, self.unresolved)?;
        writeln!(w, "k,a_k,c_k")?;
        for (k, (a, c)) in self.shell_norms.iter().zip(&self.c).enumerate() {
            writeln!(w, "{k},{a:e},{c:e}")?;
        }
        Ok(())
    }
}

/// `ℓ²` distance between two envelopes of the same shape.
pub fn envelope_l2_distance(a: &FrequencyEnvelope, b: &FrequencyEnvelope) -> Result<f64> {
    if a.c.len() != b.c.len() || a.s != b.s || a.slack != b.slack {
        return Err(Error::ShapeMismatch(format!(
            "envelopes differ in shape: {} vs {} shells, s {} vs {}",
            a.c.len(),
            b.c.len(),
            a.s,
            b.s
        )));
    }
    Ok(a.c.iter().zip(&b.c).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationReport {
    pub decay_exponent: f64,
    pub h: Option<usize>,
    /// Per sample, `max_k ‖P_k u(t)‖_{H^s} / (c_k 2^{-N(k-h)_+})`.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

/// Measures `‖P_k u(t)‖_{H^s} <= C c_k 2^{-N(k-h)_+}` along a trajectory.
pub fn propagation_audit(
    traj: &Trajectory,
    env0: &FrequencyEnvelope,
    h: Option<usize>,
    decay_exponent: f64,
) -> Result<PropagationReport> {
    let mut ratios = Vec::with_capacity(traj.len());
    for state in traj.states() {
        let a = shell_norms(state, env0.s, Profile::Sharp);
        if a.len() != env0.c.len() {
            return Err(Error::ShapeMismatch("trajectory grid differs from the envelope's".into()));
        }
        let mut worst: f64 = 0.0;
        for (k, (&ak, &ck)) in a.iter().zip(&env0.c).enumerate() {
            let excess = h.map_or(0.0, |h| k.saturating_sub(h) as f64);
            let bound = ck * 2f64.powf(-decay_exponent * excess);
            let r = if ak == 0.0 {
                0.0
            } else if bound == 0.0 {
                f64::INFINITY
            } else {
                ak / bound
            };
            worst = worst.max(r);
        }
        ratios.push(worst);
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(PropagationReport { decay_exponent, h, ratios, max_ratio })
}
