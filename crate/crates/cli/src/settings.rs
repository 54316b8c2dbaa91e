//! Resolved command line settings and the `key = value` config format.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use parahyp::harness::{random_field, seeded_rng, ExperimentConfig};
use parahyp::paraproduct::{ParaConfig, Quantization};
use parahyp::solver::{Scheme, SolveConfig};
use parahyp::{Field, GridSpec, Profile};

/// Initial data for `solve`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Datum {
    /// `sin(x + y + c)` in component `c`.
    Sine,
    /// `sin x + 0.05 sin 17x + 0.01 sin 53x` in every component.
    ThreeMode,
    /// Seeded random field with `|ξ|^{-(s+1)}` spectrum and unit sup norm.
    Random,
}

impl Datum {
    fn name(self) -> &'static str {
        match self {
            Datum::Sine => "sine",
            Datum::ThreeMode => "three-mode",
            Datum::Random => "random",
        }
    }
}

impl FromStr for Datum {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sine" => Ok(Datum::Sine),
            "three-mode" => Ok(Datum::ThreeMode),
            "random" => Ok(Datum::Random),
            _ => Err(format!("unknown datum '{s}'; expected sine, three-mode or random")),
        }
    }
}

/// `None` leaves the choice to the subcommand: the system's own dimension,
/// each experiment's horizon and trial count, and the gap default of the
/// solver (8) or the experiments (2).
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub system: String,
    pub n: usize,
    pub dim: Option<usize>,
    pub scheme: Scheme,
    pub epsilon: f64,
    pub horizon: Option<f64>,
    pub s: f64,
    pub delta: f64,
    pub gap: Option<usize>,
    pub profile: Profile,
    pub quantization: Quantization,
    pub seed: u64,
    pub datum: Datum,
    pub trials: Option<usize>,
    pub nu: f64,
    pub monitor_every: usize,
    pub out: PathBuf,
}

impl Default for Settings {
    fn default() -> Self {
        let solve = SolveConfig::default();
        let exp = ExperimentConfig::default();
        Self {
            system: exp.system,
            n: exp.n,
            dim: None,
            scheme: solve.scheme,
            epsilon: solve.epsilon,
            horizon: None,
            s: exp.s,
            delta: exp.delta,
            gap: None,
            profile: Profile::default(),
            quantization: Quantization::default(),
            seed: exp.seed,
            datum: Datum::Sine,
            trials: None,
            nu: solve.nu,
            monitor_every: solve.monitor_every,
            out: PathBuf::from("."),
        }
    }
}

fn parse<T: FromStr>(value: &str, what: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("expected {what}, got '{value}'"))
}

fn positive_int(value: &str) -> Result<usize, String> {
    match parse::<usize>(value, "a positive integer")? {
        0 => Err("expected a positive integer, got 0".into()),
        v => Ok(v),
    }
}

fn finite(value: &str) -> Result<f64, String> {
    let v: f64 = parse(value, "a number")?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite number, got '{value}'"))
    }
}

impl Settings {
    pub const KEYS: [&'static str; 17] = [
        "system",
        "n",
        "dim",
        "scheme",
        "epsilon",
        "T",
        "s",
        "delta",
        "gap",
        "profile",
        "quantization",
        "seed",
        "datum",
        "trials",
        "nu",
        "monitor_every",
        "out",
    ];

    /// Sets one field from text. Range checks beyond the type are left to
    /// the library validators.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key {
            "system" => self.system = value.to_string(),
            "n" => self.n = positive_int(value)?,
            "dim" => self.dim = Some(positive_int(value)?),
            "scheme" => self.scheme = value.parse().map_err(|e: parahyp::Error| e.to_string())?,
            "epsilon" => self.epsilon = finite(value)?,
            "T" => self.horizon = Some(finite(value)?),
            "s" => self.s = finite(value)?,
            "delta" => self.delta = finite(value)?,
            "gap" => self.gap = Some(parse(value, "a non-negative integer")?),
            "profile" => self.profile = value.parse().map_err(|e: parahyp::Error| e.to_string())?,
            "quantization" => {
                self.quantization = value.parse().map_err(|e: parahyp::Error| e.to_string())?
            }
            "seed" => self.seed = parse(value, "an unsigned 64-bit integer")?,
            "datum" => self.datum = value.parse()?,
            "trials" => self.trials = Some(positive_int(value)?),
            "nu" => self.nu = finite(value)?,
            "monitor_every" => self.monitor_every = positive_int(value)?,
            "out" => {
                if value.is_empty() {
                    return Err("expected a directory".into());
                }
                self.out = PathBuf::from(value)
            }
            _ => return Err(format!("unknown key '{key}'; expected one of {}", Self::KEYS.join(", "))),
        }
        Ok(())
    }

    /// Applies a config file. Errors read `line L: field 'k': message`.
    pub fn apply_file(&mut self, text: &str) -> Result<(), String> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value', got '{line}'", i + 1))?;
            let key = key.trim();
            self.set(key, value).map_err(|e| format!("line {}: field '{key}': {e}", i + 1))?;
        }
        Ok(())
    }

    /// Config-file rendering; unset optional fields are left as comments.
    pub fn render(&self) -> String {
        let mut out = String::from("# resolved parahyp settings\n");
        let values: [(&str, Option<String>); 17] = [
            ("system", Some(self.system.clone())),
            ("n", Some(self.n.to_string())),
            ("dim", self.dim.map(|v| v.to_string())),
            ("scheme", Some(self.scheme.to_string())),
            ("epsilon", Some(format!("{:e}", self.epsilon))),
            ("T", self.horizon.map(|v| format!("{v:e}"))),
            ("s", Some(format!("{:e}", self.s))),
            ("delta", Some(format!("{:e}", self.delta))),
            ("gap", self.gap.map(|v| v.to_string())),
            ("profile", Some(self.profile.to_string())),
            ("quantization", Some(self.quantization.to_string())),
            ("seed", Some(self.seed.to_string())),
            ("datum", Some(self.datum.name().to_string())),
            ("trials", self.trials.map(|v| v.to_string())),
            ("nu", Some(format!("{:e}", self.nu))),
            ("monitor_every", Some(self.monitor_every.to_string())),
            ("out", Some(self.out.display().to_string())),
        ];
        for (key, value) in values {
            let _ = match value {
                Some(v) => writeln!(out, "{key} = {v}"),
                None => writeln!(out, "# {key} = (subcommand default)"),
            };
        }
        out
    }

    fn para(&self, default_gap: usize) -> ParaConfig {
        ParaConfig {
            gap: self.gap.unwrap_or(default_gap),
            quantization: self.quantization,
            profile: self.profile,
        }
    }

    pub fn solve_config(&self) -> SolveConfig {
        let base = SolveConfig::default();
        SolveConfig {
            scheme: self.scheme,
            epsilon: self.epsilon,
            horizon: self.horizon.unwrap_or(base.horizon),
            s: self.s,
            nu: self.nu,
            para: self.para(base.para.gap),
            monitor_every: self.monitor_every,
            ..base
        }
    }

    pub fn experiment_config(&self) -> ExperimentConfig {
        let base = ExperimentConfig::default();
        ExperimentConfig {
            system: self.system.clone(),
            n: self.n,
            s: self.s,
            epsilon: self.epsilon,
            horizon: self.horizon,
            delta: self.delta,
            para: self.para(base.para.gap),
            seed: self.seed,
            trials: self.trials,
        }
    }

    pub fn datum_field(&self, grid: GridSpec, components: usize) -> Field {
        match self.datum {
            Datum::Sine => Field::from_fn(grid, components, |c, x| (x[0] + x[1] + c as f64).sin()),
            Datum::ThreeMode => Field::from_fn(grid, components, |_, x| {
                x[0].sin() + 0.05 * (17.0 * x[0]).sin() + 0.01 * (53.0 * x[0]).sin()
            }),
            Datum::Random => random_field(grid, components, self.s + 1.0, &mut seeded_rng(self.seed)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_round_trips() {
        let mut st = Settings::default();
        st.set("T", "0.3").unwrap();
        st.set("gap", "4").unwrap();
        st.set("datum", "three-mode").unwrap();
        st.set("scheme", "galerkin").unwrap();
        let mut back = Settings::default();
        back.apply_file(&st.render()).unwrap();
        assert_eq!(back, st);
    }

    #[test]
    fn file_errors_name_line_and_field() {
        let mut st = Settings::default();
        let err = st.apply_file("# header\nn = 256\n\ns = abc\n").unwrap_err();
        assert!(err.starts_with("line 4: field 's'"), "{err}");
        let err = st.apply_file("bogus = 1").unwrap_err();
        assert!(err.contains("unknown key 'bogus'"), "{err}");
        assert!(st.apply_file("n 256").unwrap_err().starts_with("line 1"));
    }

    #[test]
    fn comments_and_whitespace() {
        let mut st = Settings::default();
        st.apply_file("  system = sym2   # two components\nn=64\n").unwrap();
        assert_eq!(st.system, "sym2");
        assert_eq!(st.n, 64);
    }
}
