//! Command-line front end.
//!
//! Every run resolves a [`SweepConfig`] from experiment defaults, an optional
//! `key=value` file, and flags (flags win), echoes it to stderr in the same
//! file format, then writes results to `--out` or stdout.
//!
//! Exit codes: 0 success, 1 other failure, 2 configuration error,
//! 3 numerical non-convergence.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::warn;

use crate::analytic::{self, PhysicalUnits};
use crate::error::{Error, Result};
use crate::propagator::PropagatorConfig;
use crate::schedule::RampConvention;
use crate::sweep::{self, Experiment, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

/// Default upper end of the ramp-time grid built by `--points`.
pub const DEFAULT_TAU_MAX: f64 = 0.15;

#[derive(Debug, Parser)]
#[command(name = "latticeshuttle", version, about = "Directed atom transport and entangling protocol simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Walk one atom from site 1 to site N; writes the density trajectory.
    Transport(RunArgs),
    /// Entangle atoms starting at sites 1 and N; one CSV row per (N, tau).
    Entangle(RunArgs),
    /// Sweep the ramp time at fixed N.
    SweepTau(RunArgs),
    /// Sweep the chain length at fixed ramp time.
    SweepN(RunArgs),
    /// Check the witness on product states, the ideal output and a simulated run.
    WitnessCheck(RunArgs),
    /// Compare two-site simulation with the closed-form amplitudes.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args, Default, Clone)]
pub struct RunArgs {
    /// Chain lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sites: Option<Vec<usize>>,
    /// Interaction strength in units of J.
    #[arg(long = "u-over-j")]
    pub u_over_j: Option<f64>,
    /// Ramp times as fractions of the hop time, comma separated.
    #[arg(long = "tau-over-th", value_delimiter = ',')]
    pub tau_over_th: Option<Vec<f64>>,
    /// Propagator tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Evenly spaced ramp-time grid from 0 to max(--tau-over-th) (default 0.15).
    #[arg(long)]
    pub points: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value configuration file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Estimate the witness from this many simulated measurement shots.
    #[arg(long)]
    pub shots: Option<usize>,
    /// Tunneling J/h in kHz for reporting t_T in milliseconds (default 1.5).
    #[arg(long = "j-over-h-khz")]
    pub j_over_h_khz: Option<f64>,
    /// Seed for randomized checks and shot sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Ramp placement: centered (ramps take time from adjacent holds) or append.
    #[arg(long = "ramp-convention")]
    pub ramp_convention: Option<String>,
}

#[derive(Debug, Args, Clone)]
pub struct OracleArgs {
    /// Number of random (t, U/J) samples.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Propagator tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "experiment",
    "sites",
    "u_over_j",
    "tau_over_th",
    "tol",
    "points",
    "threads",
    "out",
    "shots",
    "j_over_h_khz",
    "seed",
    "ramp_convention",
];

fn parse_list<T: std::str::FromStr>(v: &str) -> std::result::Result<Vec<T>, String> {
    v.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| format!("cannot parse '{}'", s.trim())))
        .collect()
}

fn parse_value<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
    v.trim().parse::<T>().map_err(|_| format!("cannot parse '{}'", v.trim()))
}

fn parse_convention(v: &str) -> std::result::Result<RampConvention, String> {
    match v.trim() {
        "centered" => Ok(RampConvention::Centered),
        "append" => Ok(RampConvention::Append),
        other => Err(format!("unknown ramp convention '{other}' (centered|append)")),
    }
}

fn convention_name(c: RampConvention) -> &'static str {
    match c {
        RampConvention::Centered => "centered",
        RampConvention::Append => "append",
    }
}

/// Splits config text into `(line number, key, value)`, rejecting unknown
/// keys and lines without `=`.
fn tokenize(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::ConfigLine {
            line: line_no,
            message: format!("expected key=value, got '{line}'"),
        })?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(Error::ConfigLine {
                line: line_no,
                message: format!("unknown key '{k}'"),
            });
        }
        out.push((line_no, k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Applies tokenized config lines on top of `cfg`. Returns the `points`
/// value if present (it is expanded after flags are merged).
fn apply_lines(cfg: &mut SweepConfig, lines: &[(usize, String, String)]) -> Result<Option<usize>> {
    let mut points = None;
    for (line, k, v) in lines {
        let err = |message: String| Error::ConfigLine { line: *line, message };
        match k.as_str() {
            "experiment" => {
                cfg.experiment = v.parse().map_err(|e: Error| err(e.to_string()))?;
            }
            "sites" => cfg.sites = parse_list(v).map_err(err)?,
            "u_over_j" => cfg.u_over_j = parse_value(v).map_err(err)?,
            "tau_over_th" => cfg.tau_over_th = parse_list(v).map_err(err)?,
            "tol" => cfg.tolerance = parse_value(v).map_err(err)?,
            "points" => points = Some(parse_value(v).map_err(err)?),
            "threads" => cfg.threads = parse_value(v).map_err(err)?,
            "out" => cfg.output_path = Some(PathBuf::from(v)),
            "shots" => cfg.shots = Some(parse_value(v).map_err(err)?),
            "j_over_h_khz" => cfg.j_over_h_khz = Some(parse_value(v).map_err(err)?),
            "seed" => cfg.seed = parse_value(v).map_err(err)?,
            "ramp_convention" => cfg.ramp_convention = parse_convention(v).map_err(err)?,
            _ => unreachable!("keys checked in tokenize"),
        }
    }
    Ok(points)
}

fn experiment_in(lines: &[(usize, String, String)]) -> Result<Option<Experiment>> {
    match lines.iter().rev().find(|(_, k, _)| k == "experiment") {
        Some((line, _, v)) => Ok(Some(v.parse().map_err(|e: Error| Error::ConfigLine {
            line: *line,
            message: e.to_string(),
        })?)),
        None => Ok(None),
    }
}

fn expand_points(cfg: &mut SweepConfig, points: Option<usize>) -> Result<()> {
    if let Some(p) = points {
        if p == 0 {
            return Err(Error::Config("points must be positive".into()));
        }
        let max = cfg
            .tau_over_th
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let max = if max > 0.0 { max } else { DEFAULT_TAU_MAX };
        cfg.tau_over_th = sweep::tau_grid(p, max);
    }
    Ok(())
}

/// Parses config text. `experiment=` in the text picks the defaults,
/// otherwise `fallback` does.
pub fn parse_config_str(text: &str, fallback: Experiment) -> Result<SweepConfig> {
    let lines = tokenize(text)?;
    let experiment = experiment_in(&lines)?.unwrap_or(fallback);
    let mut cfg = SweepConfig::defaults(experiment);
    let points = apply_lines(&mut cfg, &lines)?;
    expand_points(&mut cfg, points)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads a `key=value` file (`#` starts a comment). Unknown keys and
/// malformed lines are errors that carry the line number.
pub fn parse_config(path: &Path) -> Result<SweepConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text, Experiment::Entangle)
}

/// Defaults for `experiment`, then the `--config` file, then flags.
pub fn resolve(experiment: Experiment, args: &RunArgs) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::defaults(experiment);
    let mut points = None;
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let lines = tokenize(&text)?;
        if let Some(e) = experiment_in(&lines)? {
            if e != experiment {
                warn!("config file experiment={e} ignored for subcommand {experiment}");
            }
        }
        points = apply_lines(&mut cfg, &lines)?;
        cfg.experiment = experiment;
    }
    if let Some(v) = &args.sites {
        cfg.sites = v.clone();
    }
    if let Some(v) = args.u_over_j {
        cfg.u_over_j = v;
    }
    if let Some(v) = &args.tau_over_th {
        cfg.tau_over_th = v.clone();
    }
    if let Some(v) = args.tol {
        cfg.tolerance = v;
    }
    if args.points.is_some() {
        points = args.points;
    }
    if let Some(v) = args.threads {
        cfg.threads = v;
    }
    if let Some(v) = &args.out {
        cfg.output_path = Some(v.clone());
    }
    if let Some(v) = args.shots {
        cfg.shots = Some(v);
    }
    if let Some(v) = args.j_over_h_khz {
        cfg.j_over_h_khz = Some(v);
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = &args.ramp_convention {
        cfg.ramp_convention = parse_convention(v).map_err(Error::Config)?;
    }
    expand_points(&mut cfg, points)?;
    cfg.validate()?;
    Ok(cfg)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// The resolved config in `key=value` form; parses back to an equal config.
pub fn echo_config(cfg: &SweepConfig) -> String {
    let mut s = String::new();
    s.push_str(&format!("experiment={}\n", cfg.experiment));
    s.push_str(&format!("sites={}\n", join(&cfg.sites)));
    s.push_str(&format!("u_over_j={}\n", cfg.u_over_j));
    s.push_str(&format!("tau_over_th={}\n", join(&cfg.tau_over_th)));
    s.push_str(&format!("tol={}\n", cfg.tolerance));
    s.push_str(&format!("threads={}\n", cfg.threads));
    s.push_str(&format!("seed={}\n", cfg.seed));
    s.push_str(&format!("ramp_convention={}\n", convention_name(cfg.ramp_convention)));
    if let Some(p) = &cfg.output_path {
        s.push_str(&format!("out={}\n", p.display()));
    }
    if let Some(n) = cfg.shots {
        s.push_str(&format!("shots={n}\n"));
    }
    if let Some(k) = cfg.j_over_h_khz {
        s.push_str(&format!("j_over_h_khz={k}\n"));
    }
    s
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence(_) => EXIT_NONCONVERGENCE,
        Error::Config(_) | Error::ConfigLine { .. } | Error::UnknownConfig(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn report_timing(cfg: &SweepConfig, err: &mut dyn Write) -> Result<()> {
    let Some(khz) = cfg.j_over_h_khz else {
        return Ok(());
    };
    let units = PhysicalUnits::from_khz(khz)?;
    for &n in &cfg.sites {
        let t = analytic::total_time(n, 1.0, cfg.u_over_j)?;
        writeln!(
            err,
            "# t_T(N={n}, U/J={}, J/h={khz} kHz) = {:.3} ms",
            cfg.u_over_j,
            1e3 * units.to_physical(t)
        )?;
    }
    Ok(())
}

fn run_experiment(cfg: &SweepConfig, err: &mut dyn Write) -> Result<()> {
    write!(err, "# resolved config\n{}", echo_config(cfg))?;
    if cfg.experiment != Experiment::Transport {
        report_timing(cfg, err)?;
    }
    let mut out = open_output(cfg.output_path.as_ref())?;
    match cfg.experiment {
        Experiment::Transport => {
            if cfg.sites.len() != 1 || cfg.tau_over_th.len() != 1 {
                return Err(Error::Config("transport takes one chain length and one ramp time".into()));
            }
            let reports = sweep::run_transport(cfg)?;
            let r = &reports[0];
            writeln!(
                err,
                "# arrival probability at site {}: {:.12} after t = {}",
                r.target_site, r.arrival_probability, r.total_time
            )?;
            sweep::write_trajectory_csv(&mut out, cfg, &r.trajectory)?;
        }
        Experiment::Entangle => {
            let records = sweep::run_grid(cfg)?;
            sweep::write_records_csv(&mut out, cfg, &records)?;
        }
        Experiment::SweepTau => {
            let records = sweep::run_sweep_tau(cfg)?;
            sweep::write_records_csv(&mut out, cfg, &records)?;
        }
        Experiment::SweepN => {
            let records = sweep::run_sweep_n(cfg)?;
            sweep::write_records_csv(&mut out, cfg, &records)?;
        }
        Experiment::Witness => {
            let r = sweep::run_witness_check(10_000, cfg.seed, Some((cfg, cfg.sites[0])))?;
            writeln!(out, "product_samples={}", r.product_samples)?;
            writeln!(out, "product_min={}", r.product_min)?;
            writeln!(out, "ideal_output={}", r.ideal_value)?;
            writeln!(out, "reconstruction_error={:e}", r.reconstruction_error)?;
            writeln!(out, "spectrum={}", join(&r.spectrum))?;
            if let Some((exact, sampled)) = r.simulated {
                writeln!(out, "simulated_N={}", cfg.sites[0])?;
                writeln!(out, "simulated_exact={exact}")?;
                if let Some(s) = sampled {
                    writeln!(out, "simulated_sampled={s}")?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn run_oracle(args: &OracleArgs) -> Result<bool> {
    let cfg = PropagatorConfig {
        tolerance: args.tol,
        ..PropagatorConfig::default()
    };
    let r = sweep::run_oracle_check(args.samples, args.seed, &cfg)?;
    let mut out = open_output(args.out.as_ref())?;
    writeln!(out, "samples={}", r.samples)?;
    writeln!(out, "single_atom_max_error={:e}", r.single_atom)?;
    writeln!(out, "same_spin_max_error={:e}", r.same_spin)?;
    writeln!(out, "opposite_spin_max_error={:e}", r.opposite_spin)?;
    writeln!(out, "max_error={:e}", r.max_error())?;
    out.flush()?;
    Ok(r.max_error() < 1e-8)
}

/// Runs the command line `argv` (including the program name) and returns
/// the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stderr = io::stderr();
    let mut err = stderr.lock();
    let (experiment, args) = match &cli.command {
        Command::Transport(a) => (Experiment::Transport, a),
        Command::Entangle(a) => (Experiment::Entangle, a),
        Command::SweepTau(a) => (Experiment::SweepTau, a),
        Command::SweepN(a) => (Experiment::SweepN, a),
        Command::WitnessCheck(a) => (Experiment::Witness, a),
        Command::OracleCheck(a) => {
            return match run_oracle(a) {
                Ok(true) => EXIT_OK,
                Ok(false) => {
                    let _ = writeln!(err, "error: oracle deviation above 1e-8");
                    EXIT_FAILURE
                }
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    exit_code(&e)
                }
            };
        }
    };
    let result = resolve(experiment, args).and_then(|cfg| run_experiment(&cfg, &mut err));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_with_defaults_elsewhere() {
        let cfg = parse_config_str("sites=100\nu_over_j=25\n", Experiment::Entangle).unwrap();
        assert_eq!(cfg.sites, vec![100]);
        assert_eq!(cfg.u_over_j, 25.0);
        assert_eq!(cfg.tau_over_th, SweepConfig::defaults(Experiment::Entangle).tau_over_th);
    }

    #[test]
    fn malformed_value_cites_line() {
        match parse_config_str("sites=abc", Experiment::Entangle) {
            Err(Error::ConfigLine { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match parse_config_str("# header\n\nsites=4\nbogus=1", Experiment::Entangle) {
            Err(Error::ConfigLine { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_config_str("sites 4", Experiment::Entangle),
            Err(Error::ConfigLine { line: 1, .. })
        ));
    }

    #[test]
    fn comments_and_whitespace() {
        let cfg = parse_config_str(
            "  # full comment\nsites = 6 # trailing\n tau_over_th=0.05 , 0.1\n",
            Experiment::Entangle,
        )
        .unwrap();
        assert_eq!(cfg.sites, vec![6]);
        assert_eq!(cfg.tau_over_th, vec![0.05, 0.1]);
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("latticeshuttle-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "sites=100\nu_over_j=30\n").unwrap();
        let args = RunArgs {
            sites: Some(vec![40]),
            config: Some(path),
            ..RunArgs::default()
        };
        let cfg = resolve(Experiment::Entangle, &args).unwrap();
        assert_eq!(cfg.sites, vec![40]);
        assert_eq!(cfg.u_over_j, 30.0);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn points_expand_grid() {
        let args = RunArgs {
            points: Some(16),
            ..RunArgs::default()
        };
        let cfg = resolve(Experiment::SweepTau, &args).unwrap();
        assert_eq!(cfg.tau_over_th, sweep::tau_grid(16, 0.15));
        let args = RunArgs {
            points: Some(3),
            tau_over_th: Some(vec![0.2]),
            ..RunArgs::default()
        };
        let cfg = resolve(Experiment::SweepTau, &args).unwrap();
        assert_eq!(cfg.tau_over_th, vec![0.0, 0.1, 0.2]);
    }

    #[test]
    fn echo_round_trips() {
        for e in [
            Experiment::Transport,
            Experiment::Entangle,
            Experiment::SweepTau,
            Experiment::SweepN,
            Experiment::Witness,
        ] {
            let mut cfg = SweepConfig::defaults(e);
            cfg.shots = Some(500);
            cfg.output_path = Some(PathBuf::from("out.csv"));
            cfg.tolerance = 3.3e-11;
            let text = echo_config(&cfg);
            assert_eq!(parse_config_str(&text, Experiment::Entangle).unwrap(), cfg, "{text}");
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["latticeshuttle", "entangle", "--sites", "abc"]), EXIT_CONFIG);
        assert_eq!(run(["latticeshuttle", "entangle", "--bogus"]), EXIT_CONFIG);
        assert_eq!(run(["latticeshuttle", "entangle", "--sites", "5"]), EXIT_CONFIG);
        assert_eq!(run(["latticeshuttle", "--help"]), EXIT_OK);
        assert_eq!(exit_code(&Error::NonConvergence("x".into())), EXIT_NONCONVERGENCE);
    }

    #[test]
    fn help_lists_flags() {
        use clap::CommandFactory;
        let mut cmd = Cli::command();
        let help = cmd
            .find_subcommand_mut("sweep-tau")
            .unwrap()
            .render_long_help()
            .to_string();
        for flag in [
            "--sites",
            "--u-over-j",
            "--tau-over-th",
            "--tol",
            "--points",
            "--threads",
            "--out",
            "--config",
            "--shots",
            "--j-over-h-khz",
        ] {
            assert!(help.contains(flag), "{flag} missing");
        }
    }
}
