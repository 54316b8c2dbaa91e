//! `parahyp`: command line front end.
//!
//! Settings come from built-in defaults, then an optional `--config` file of
//! `key = value` lines, then flags. The resolved settings are echoed to
//! `<out>/resolved.conf`, which is itself a valid `--config` file.
//!
//! Exit codes: 0 success, 1 failed run or failed check, 2 bad configuration.

mod settings;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use parahyp::envelope::sharp_envelope;
use parahyp::harness::{self, write_atomic};
use parahyp::model::builtin;
use parahyp::solver::{self, CharacteristicsOracle, StateDump};
use parahyp::Error;

use settings::{Datum, Settings};

#[derive(Parser)]
#[command(name = "parahyp", version, about = "Pseudospectral laboratory for symmetric hyperbolic systems on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one system and write the trajectory CSV and a state dump.
    Solve(Common),
    /// Run one named experiment.
    Experiment {
        /// Experiment name; `suite --list` prints them.
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run the experiment suite.
    Suite {
        /// Run every experiment (the only mode; kept for explicitness).
        #[arg(long)]
        all: bool,
        /// Print the experiment names and exit.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Frequency envelope of one sample of a state dump.
    Envelope {
        #[arg(long)]
        input: PathBuf,
        /// Sample index; defaults to the last sample.
        #[arg(long)]
        sample: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

/// Flags shared by every subcommand. Values are kept as text and parsed by
/// [`Settings::set`], so flags and config files report errors alike.
#[derive(Args, Default)]
struct Common {
    /// File of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    /// euler_reg, iteration, parabolic or galerkin.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    /// Final time.
    #[arg(long = "T")]
    t: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    gap: Option<String>,
    /// sharp or smooth.
    #[arg(long)]
    profile: Option<String>,
    /// coeff-lowpass, arg-lowpass or double-lowpass.
    #[arg(long)]
    quantization: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// sine, three-mode or random.
    #[arg(long)]
    datum: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    nu: Option<String>,
    #[arg(long)]
    monitor_every: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Also write a gnuplot script per CSV.
    #[arg(long)]
    emit_plotscript: bool,
}

impl Common {
    fn flags(&self) -> Vec<(&'static str, &str)> {
        let pairs: [(&'static str, &Option<String>); 17] = [
            ("system", &self.system),
            ("n", &self.n),
            ("dim", &self.dim),
            ("scheme", &self.scheme),
            ("epsilon", &self.epsilon),
            ("T", &self.t),
            ("s", &self.s),
            ("delta", &self.delta),
            ("gap", &self.gap),
            ("profile", &self.profile),
            ("quantization", &self.quantization),
            ("seed", &self.seed),
            ("datum", &self.datum),
            ("trials", &self.trials),
            ("nu", &self.nu),
            ("monitor_every", &self.monitor_every),
            ("out", &self.out),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.as_deref().map(|v| (k, v))).collect()
    }

    fn resolve(&self) -> Result<Settings, Failure> {
        let mut st = Settings::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            st.apply_file(&text).map_err(|e| Failure::Config(format!("{}:{e}", path.display())))?;
        }
        for (key, value) in self.flags() {
            st.set(key, value).map_err(|e| Failure::Config(format!("flag --{key}: {e}")))?;
        }
        Ok(st)
    }
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::UnknownSystem(_)
            | Error::InvalidSystem(_)
            | Error::InvalidGrid(_)
            | Error::GridTooCoarse { .. }
            | Error::CflViolation { .. } => Failure::Config(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Run(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every check passed.
fn run(command: Command) -> Result<bool, Failure> {
    match command {
        Command::Solve(common) => solve(&common),
        Command::Experiment { name, common } => experiment(&name, &common),
        Command::Suite { list: true, .. } => {
            for name in harness::EXPERIMENTS {
                println!("{name}");
            }
            Ok(true)
        }
        Command::Suite { common, .. } => suite(&common),
        Command::Envelope { input, sample, common } => envelope(&input, sample, &common),
    }
}

fn prepare_out(st: &Settings) -> Result<(), Failure> {
    fs::create_dir_all(&st.out).map_err(|e| io_failure(&st.out, e))?;
    let path = st.out.join("resolved.conf");
    write_atomic(&path, st.render().as_bytes())?;
    Ok(())
}

fn solve(common: &Common) -> Result<bool, Failure> {
    let mut st = common.resolve()?;
    let sys = builtin(&st.system)?;
    let dim = *st.dim.get_or_insert(sys.dim());
    if dim != sys.dim() {
        return Err(Failure::Config(format!(
            "system '{}' is {}-dimensional, but dim = {dim}",
            sys.name(),
            sys.dim()
        )));
    }
    let cfg = st.solve_config();
    cfg.validate()?;
    st.horizon = Some(cfg.horizon);
    st.gap = Some(cfg.para.gap);
    let grid = parahyp::GridSpec::new(dim, st.n)?;
    let u0 = st.datum_field(grid, sys.components());
    if let Some(w) = cfg.threshold_warning(&grid) {
        eprintln!("warning: {w}");
    }
    prepare_out(&st)?;
    let traj = solver::solve(&sys, &u0, &cfg)?;

    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    write_atomic(&st.out.join("trajectory.csv"), &csv)?;
    let mut dump = Vec::new();
    traj.write_state_dump(&mut dump)?;
    write_atomic(&st.out.join("state.bin"), &dump)?;
    if common.emit_plotscript {
        write_atomic(&st.out.join("trajectory.gp"), TRAJECTORY_PLOT.as_bytes())?;
    }

    let last = traj.diagnostics().last().expect("a trajectory holds its initial sample");
    println!(
        "solve: system={} scheme={} grid={} samples={} t={} hs={:e} A={:e} B={:e}",
        st.system,
        cfg.scheme,
        grid,
        traj.len(),
        traj.final_time(),
        last.hs,
        last.a,
        last.b
    );
    if st.system == "burgers" && st.datum == Datum::Sine {
        let oracle = CharacteristicsOracle::sine(1.0);
        let t = traj.final_time();
        if t < oracle.shock_time() {
            let exact = oracle.field(grid, t)?;
            println!("oracle: L2 error at t={t} is {:e}", (traj.final_state() - &exact).l2_norm());
        }
    }
    match traj.blowup() {
        Some(b) => {
            eprintln!("run stopped at t={}: {}", b.time, b.reason);
            Ok(false)
        }
        None => Ok(true),
    }
}

const TRAJECTORY_PLOT: &str = "set datafile separator ','
set key outside
set logscale y
set xlabel 't'
plot 'trajectory.csv' every ::1 using 1:2 with lines title 'H^s', \\
     '' every ::1 using 1:3 with lines title 'L2'
pause -1
";

fn experiment(name: &str, common: &Common) -> Result<bool, Failure> {
    let mut st = common.resolve()?;
    if !harness::EXPERIMENTS.contains(&name) {
        return Err(Failure::Config(format!(
            "unknown experiment '{name}'; expected one of {}",
            harness::EXPERIMENTS.join(", ")
        )));
    }
    let cfg = st.experiment_config();
    cfg.validate()?;
    st.gap = Some(cfg.para.gap);
    prepare_out(&st)?;
    let res = harness::run_experiment(name, &cfg)?;
    res.write(&st.out, common.emit_plotscript)?;
    println!("{}", res.summary_line());
    Ok(res.pass)
}

fn suite(common: &Common) -> Result<bool, Failure> {
    let mut st = common.resolve()?;
    let cfg = st.experiment_config();
    cfg.validate()?;
    st.gap = Some(cfg.para.gap);
    st.gap = Some(cfg.para.gap);
    prepare_out(&st)?;
    let results = harness::run_suite(&cfg)?;
    let mut all = true;
    for res in &results {
        res.write(&st.out, common.emit_plotscript)?;
        println!("{}", res.summary_line());
        all &= res.pass;
    }
    println!("suite: {} of {} experiments pass", results.iter().filter(|r| r.pass).count(), results.len());
    Ok(all)
}

fn envelope(input: &Path, sample: Option<usize>, common: &Common) -> Result<bool, Failure> {
    let st = common.resolve()?;
    if !(st.delta > 0.0 && st.delta < 1.0) {
        return Err(Failure::Config(format!("delta must lie in (0, 1), got {}", st.delta)));
    }
    let file = fs::File::open(input).map_err(|e| io_failure(input, e))?;
    let dump = StateDump::read(std::io::BufReader::new(file))?;
    let index = sample.unwrap_or(dump.states.len().saturating_sub(1));
    let u = dump.states.get(index).ok_or_else(|| {
        Failure::Config(format!("sample {index} out of range; the dump holds {}", dump.states.len()))
    })?;
    prepare_out(&st)?;
    let env = sharp_envelope(u, st.s, st.delta)?;
    let mut csv = Vec::new();
    env.write_csv(&mut csv)?;
    write_atomic(&st.out.join("envelope.csv"), &csv)?;
    let dominates = env.dominates(&env.shell_norms);
    let slow = env.is_slowly_varying();
    println!(
        "envelope: t={} shells={} dominates={dominates} slowly_varying={slow} sharpness={:.6} (bound {:.6})",
        dump.times[index],
        env.len(),
        env.sharpness(),
        env.slack.young_constant()
    );
    Ok(dominates && slow)
}
