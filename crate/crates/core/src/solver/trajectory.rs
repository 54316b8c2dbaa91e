use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::config::{Scheme, SolveConfig};
use crate::envelope::{sharp_envelope, FrequencyEnvelope};
use crate::error::{Error, Result};
use crate::norms::{control_params, sobolev_norm};
use crate::spectral::{Field, GridSpec};

/// Per-sample measurements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    pub hs: f64,
    pub l2: f64,
    pub component_l2: Vec<f64>,
    /// `A = ‖u‖_{L^∞}`
    pub a: f64,
    /// `B = ‖∇u‖_{L^∞}`
    pub b: f64,
    /// `∫_0^t B`, trapezoidal over every step.
    pub int_b: f64,
    pub envelope: Option<FrequencyEnvelope>,
}

/// Why and when a run stopped early.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Blowup {
    pub time: f64,
    pub reason: String,
    /// `∫_0^t B` up to the detection time.
    pub int_b: f64,
    /// `‖u‖_{H^s}` at detection (infinite for non-finite states).
    pub hs: f64,
}

/// Per-step audit of the Euler scheme, maxima over the run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepAudit {
    /// `max_j ‖u_{j+1} - u_j - εN(u_j)‖_{L²} / ε²`
    pub defect_over_eps2: f64,
    /// `max_j (‖u_{j+1}‖_{H^s} / ‖u_j‖_{H^s} - 1) / ε`
    pub growth_over_eps: f64,
    /// `max_j ‖ũ_j‖_{H^{s+1}} / (ε^{-1/2} ‖u_j‖_{H^s})`
    pub regularization_ratio: f64,
}

/// Sampled solution `u(t)` with diagnostics, stopped early by an explicit
/// terminator when a blowup criterion fired.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub system: String,
    pub scheme: Scheme,
    pub s: f64,
    grid: GridSpec,
    components: usize,
    times: Vec<f64>,
    states: Vec<Field>,
    diagnostics: Vec<Diagnostics>,
    pub terminator: Option<Blowup>,
    pub step_audit: Option<StepAudit>,
}

impl Trajectory {
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Field] {
        &self.states
    }

    pub fn diagnostics(&self) -> &[Diagnostics] {
        &self.diagnostics
    }

    pub fn initial(&self) -> &Field {
        &self.states[0]
    }

    pub fn final_state(&self) -> &Field {
        self.states.last().expect("a trajectory holds its initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("a trajectory holds its initial time")
    }

    pub fn blowup(&self) -> Option<&Blowup> {
        self.terminator.as_ref()
    }

    /// Converts an early stop into [`Error::BlowupDetected`].
    pub fn into_result(self) -> Result<Self> {
        match self.terminator {
            Some(b) => Err(Error::BlowupDetected { time: b.time, reason: b.reason }),
            None => Ok(self),
        }
    }

    /// State at time `t`, linearly interpolated between samples.
    pub fn state_at(&self, t: f64) -> Result<Field> {
        let (first, last) = (self.times[0], self.final_time());
        let tol = 1e-12 * last.abs().max(1.0);
        if t < first - tol || t > last + tol {
            return Err(Error::Config(format!("time {t} outside the trajectory range [{first}, {last}]")));
        }
        let i = self.times.partition_point(|&s| s <= t);
        if i == 0 {
            return Ok(self.states[0].clone());
        }
        if i >= self.times.len() {
            return Ok(self.final_state().clone());
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        let mut out = self.states[i - 1].scaled(1.0 - w);
        out.axpy(w, &self.states[i]);
        Ok(out)
    }

    /// `max_t norm(u(t))` over the samples.
    pub fn sup_norm(&self, norm: impl Fn(&Field) -> f64) -> f64 {
        self.states.iter().map(norm).fold(0.0, f64::max)
    }

    /// `max_t norm(u(t) - v(t))` over common sample times.
    pub fn sup_distance(&self, other: &Trajectory, norm: impl Fn(&Field) -> f64) -> Result<f64> {
        let n = self.len().min(other.len());
        let mut worst: f64 = 0.0;
        for i in 0..n {
            if (self.times[i] - other.times[i]).abs() > 1e-12 * self.times[i].abs().max(1.0) {
                return Err(Error::ShapeMismatch(format!(
                    "sample times differ at index {i}: {} vs {}",
                    self.times[i], other.times[i]
                )));
            }
            worst = worst.max(norm(&(&self.states[i] - &other.states[i])));
        }
        Ok(worst)
    }

    /// Trajectory CSV with a header comment pinning the conventions.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(
            w,
            "# system={} scheme={} grid={} s={}",
            self.system, self.scheme, self.grid, self.s
        )?;
        writeln!(w, "# {NORMALIZATION_NOTE}")?;
        writeln!(
            w,
            "# columns: t (time), hs (H^s norm), l2 (L2 norm), l2_c* (per-component L2), A (sup |u|), B (sup |grad u|), int_B (time integral of B)"
        )?;
        if let Some(b) = &self.terminator {
            writeln!(w, "# terminated at t={:e}: {}", b.time, b.reason)?;
        }
        let comps: Vec<String> = (0..self.components).map(|c| format!("l2_c{c}")).collect();
        writeln!(w, "t,hs,l2,{},A,B,int_B", comps.join(","))?;
        for d in &self.diagnostics {
            let cl: Vec<String> = d.component_l2.iter().map(|v| format!("{v:e}")).collect();
            writeln!(
                w,
                "{:e},{:e},{:e},{},{:e},{:e},{:e}",
                d.t,
                d.hs,
                d.l2,
                cl.join(","),
                d.a,
                d.b,
                d.int_b
            )?;
        }
        Ok(())
    }

    pub fn write_state_dump(&self, w: impl Write) -> Result<()> {
        write_state_dump(w, &self.times, &self.states)
    }
}

/// Conventions shared by every emitted CSV.
pub const NORMALIZATION_NOTE: &str = "DFT normalization: fhat(xi) = (2 pi)^(n/2) N^(-n) sum_x f(x) exp(-i xi.x), unitary on L2 of the torus [0, 2 pi)^n; H^s norm = (sum_xi <xi>^(2s) |fhat(xi)|^2)^(1/2)";

pub const STATE_MAGIC: &[u8; 8] = b"PHYPSTAT";
pub const STATE_VERSION: u32 = 1;

/// Binary state dump.
///
/// Layout (little-endian): magic `PHYPSTAT`, `u32` version, `u32` dim,
/// `u32` points per axis, `u32` components, `u64` sample count, then per
/// sample an `f64` time followed by `components * N^dim` `f64` values,
/// component-major with axis 0 varying fastest.
pub fn write_state_dump(mut w: impl Write, times: &[f64], states: &[Field]) -> Result<()> {
    let first = states.first().ok_or_else(|| Error::Format("no states to dump".into()))?;
    let grid = first.grid();
    w.write_all(STATE_MAGIC)?;
    for v in [STATE_VERSION, grid.dim() as u32, grid.points_per_axis() as u32, first.components() as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&(states.len() as u64).to_le_bytes())?;
    for (t, s) in times.iter().zip(states) {
        first.ensure_compatible(s)?;
        w.write_all(&t.to_le_bytes())?;
        for v in s.data() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Contents of a binary state dump.
#[derive(Clone, Debug, PartialEq)]
pub struct StateDump {
    pub times: Vec<f64>,
    pub states: Vec<Field>,
}

impl StateDump {
    pub fn read(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != STATE_MAGIC {
            return Err(Error::Format("not a state dump (bad magic)".into()));
        }
        let mut u32s = [0u32; 4];
        for v in &mut u32s {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            *v = u32::from_le_bytes(b);
        }
        let [version, dim, n, comps] = u32s;
        if version != STATE_VERSION {
            return Err(Error::Format(format!("unsupported state dump version {version}")));
        }
        let grid = GridSpec::new(dim as usize, n as usize)
            .map_err(|e| Error::Format(format!("bad grid in state dump: {e}")))?;
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8) as usize;
        let per = comps as usize * grid.len();
        let mut times = Vec::with_capacity(count);
        let mut states = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut b8)?;
            times.push(f64::from_le_bytes(b8));
            let mut data = Vec::with_capacity(per);
            for _ in 0..per {
                r.read_exact(&mut b8)?;
                data.push(f64::from_le_bytes(b8));
            }
            states.push(Field::new(grid, comps as usize, data)?);
        }
        Ok(Self { times, states })
    }
}

/// Records samples, accumulates `∫B` and applies the blowup rules.
pub(crate) struct Monitor<'a> {
    cfg: &'a SolveConfig,
    traj: Trajectory,
    hs0: f64,
    int_b: f64,
    last: (f64, f64),
    steps: usize,
}

impl<'a> Monitor<'a> {
    pub(crate) fn new(system: &str, cfg: &'a SolveConfig, u0: &Field) -> Result<Self> {
        let traj = Trajectory {
            system: system.to_string(),
            scheme: cfg.scheme,
            s: cfg.s,
            grid: u0.grid(),
            components: u0.components(),
            times: Vec::new(),
            states: Vec::new(),
            diagnostics: Vec::new(),
            terminator: None,
            step_audit: None,
        };
        let mut m = Monitor { cfg, traj, hs0: 0.0, int_b: 0.0, last: (0.0, 0.0), steps: 0 };
        if !u0.is_finite() {
            return Err(Error::BlowupDetected { time: 0.0, reason: "non-finite initial data".into() });
        }
        let d = m.measure(0.0, u0)?;
        m.hs0 = d.hs;
        m.last = (0.0, d.b);
        m.push(0.0, u0.clone(), d);
        Ok(m)
    }

    fn measure(&self, t: f64, u: &Field) -> Result<Diagnostics> {
        let cp = control_params(u);
        let envelope = match self.cfg.envelope_delta {
            Some(delta) => Some(sharp_envelope(u, self.cfg.s, delta)?),
            None => None,
        };
        Ok(Diagnostics {
            t,
            hs: sobolev_norm(u, self.cfg.s),
            l2: u.l2_norm(),
            component_l2: (0..u.components()).map(|c| u.extract(c).l2_norm()).collect(),
            a: cp.a,
            b: cp.b,
            int_b: 0.0,
            envelope,
        })
    }

    fn push(&mut self, t: f64, u: Field, mut d: Diagnostics) {
        d.int_b = self.int_b;
        self.traj.times.push(t);
        self.traj.states.push(u);
        self.traj.diagnostics.push(d);
    }

    /// Observes the state after a completed step. Returns `false` once a
    /// blowup rule has fired; the offending state is not recorded.
    pub(crate) fn observe(&mut self, t: f64, u: &Field, force_record: bool) -> Result<bool> {
        self.steps += 1;
        if !u.is_finite() {
            self.terminate(t, "non-finite state".into(), f64::INFINITY);
            return Ok(false);
        }
        let d = self.measure(t, u)?;
        let (t0, b0) = self.last;
        self.int_b += 0.5 * (b0 + d.b) * (t - t0);
        self.last = (t, d.b);
        if self.hs0 > 0.0 && d.hs > self.cfg.blowup_factor * self.hs0 {
            let reason = format!("H^s norm exceeded {:e} times its initial value", self.cfg.blowup_factor);
            self.terminate(t, reason, d.hs);
            return Ok(false);
        }
        if let Some(kappa) = self.cfg.gradient_resolution {
            let bh = d.b * u.grid().spacing();
            if d.a > 0.0 && bh >= kappa * d.a {
                let reason = format!("gradient unresolved: B * h = {bh:e} >= {kappa} * A");
                self.terminate(t, reason, d.hs);
                return Ok(false);
            }
        }
        if force_record || self.steps.is_multiple_of(self.cfg.monitor_every) {
            self.push(t, u.clone(), d);
        }
        Ok(true)
    }

    pub(crate) fn terminate(&mut self, time: f64, reason: String, hs: f64) {
        self.traj.terminator = Some(Blowup { time, reason, int_b: self.int_b, hs });
    }

    pub(crate) fn set_step_audit(&mut self, audit: StepAudit) {
        self.traj.step_audit = Some(audit);
    }

    pub(crate) fn finish(self) -> Trajectory {
        self.traj
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_dump_round_trip() {
        let g = GridSpec::new(2, 16).unwrap();
        let a = Field::from_fn(g, 2, |c, x| (x[0] + c as f64 * x[1]).sin());
        let b = a.scaled(-0.5);
        let mut buf = Vec::new();
        write_state_dump(&mut buf, &[0.0, 0.25], &[a.clone(), b.clone()]).unwrap();
        assert_eq!(&buf[..8], STATE_MAGIC);
        assert_eq!(buf.len(), 8 + 16 + 8 + 2 * (8 + 8 * 2 * 256));
        let dump = StateDump::read(buf.as_slice()).unwrap();
        assert_eq!(dump.times, vec![0.0, 0.25]);
        assert_eq!(dump.states, vec![a, b]);
    }

    #[test]
    fn bad_magic_is_rejected() {
        let buf = b"NOTASTATEDUMP...........".to_vec();
        assert!(matches!(StateDump::read(buf.as_slice()), Err(Error::Format(_))));
    }
}
