//! Experiment runners: single-atom transport, the entangling round trip,
//! sweeps over ramp time and chain length, witness and oracle checks.
//!
//! All runs use `J = 1`; ramp times are given as fractions of the hop time.
//! Sweep points are independent and run on a rayon pool; results are sorted
//! by the independent variable, so the output does not depend on the thread
//! count.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use log::{info, warn};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::{self, TwoQubitAmplitudes};
use crate::basis::{FockBasis, FockConfig, SpinLabel};
use crate::error::{Error, Result};
use crate::hamiltonian::{CouplingProfile, SparseHamiltonian};
use crate::observables::{self, OccupationProfile, TwoQubitOutcome};
use crate::propagator::{Diagnostics, Observer, Propagator, PropagatorConfig};
use crate::schedule::{self, Direction, RampConvention};
use crate::state::{self, StateVector};

const J: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Transport,
    Entangle,
    SweepTau,
    SweepN,
    Witness,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Transport => "transport",
            Experiment::Entangle => "entangle",
            Experiment::SweepTau => "sweep_tau",
            Experiment::SweepN => "sweep_n",
            Experiment::Witness => "witness",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "transport" => Ok(Experiment::Transport),
            "entangle" => Ok(Experiment::Entangle),
            "sweep_tau" => Ok(Experiment::SweepTau),
            "sweep_n" => Ok(Experiment::SweepN),
            "witness" | "witness_check" => Ok(Experiment::Witness),
            other => Err(Error::Config(format!("unknown experiment '{other}'"))),
        }
    }
}

/// `tau / t_h` grid of `points` values from 0 to `max`, inclusive.
pub fn tau_grid(points: usize, max: f64) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|k| {
                // round to 12 digits so 0.15 * 3/15 prints as 0.03
                let x = max * k as f64 / (points - 1) as f64;
                (x * 1e12).round() / 1e12
            })
            .collect(),
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub experiment: Experiment,
    pub sites: Vec<usize>,
    pub u_over_j: f64,
    pub tau_over_th: Vec<f64>,
    pub tolerance: f64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    /// 0 means one worker per core.
    pub threads: usize,
    /// Finite-shot witness sampling when set.
    pub shots: Option<usize>,
    pub j_over_h_khz: Option<f64>,
    pub ramp_convention: RampConvention,
}

impl SweepConfig {
    /// Defaults for `experiment`: N = 100, U = 25 J, J/h = 1.5 kHz and
    /// instantaneous switching, except the sweeps (16 ramp times up to
    /// 0.15 t_h; N = 20..140 at 0.1 t_h) and the transport and witness runs
    /// (N = 20).
    pub fn defaults(experiment: Experiment) -> Self {
        let (sites, tau) = match experiment {
            Experiment::Transport => (vec![20], vec![0.0]),
            Experiment::Entangle => (vec![100], vec![0.0]),
            Experiment::SweepTau => (vec![100], tau_grid(16, 0.15)),
            Experiment::SweepN => ((1..=7).map(|k| 20 * k).collect(), vec![0.1]),
            Experiment::Witness => (vec![20], vec![0.0]),
        };
        SweepConfig {
            experiment,
            sites,
            u_over_j: 25.0,
            tau_over_th: tau,
            tolerance: 1e-9,
            seed: 0,
            output_path: None,
            threads: 0,
            shots: None,
            j_over_h_khz: Some(1.5),
            ramp_convention: RampConvention::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites.is_empty() {
            return Err(Error::Config("sites must not be empty".into()));
        }
        if self.tau_over_th.is_empty() {
            return Err(Error::Config("tau_over_th must not be empty".into()));
        }
        if !(self.u_over_j > 0.0) || !self.u_over_j.is_finite() {
            return Err(Error::Config(format!("u_over_j must be > 0, got {}", self.u_over_j)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tol must be > 0".into()));
        }
        if let Some(t) = self.tau_over_th.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
            return Err(Error::Config(format!("tau_over_th must be >= 0, got {t}")));
        }
        if let Some(&n) = self.sites.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("sites must be >= 2, got {n}")));
        }
        if matches!(self.experiment, Experiment::Entangle | Experiment::SweepTau | Experiment::SweepN)
        {
            if let Some(&n) = self.sites.iter().find(|&&n| n % 2 != 0) {
                return Err(Error::Config(format!(
                    "entangling runs need an even number of sites, got {n}"
                )));
            }
        }
        if self.shots == Some(0) {
            return Err(Error::Config("shots must be positive".into()));
        }
        if let Some(k) = self.j_over_h_khz {
            if !(k > 0.0) {
                return Err(Error::Config("j_over_h_khz must be > 0".into()));
            }
        }
        Ok(())
    }

    pub fn propagator_config(&self) -> PropagatorConfig {
        PropagatorConfig {
            tolerance: self.tolerance,
            ..PropagatorConfig::default()
        }
    }
}

/// One point of an entangling experiment.
#[derive(Debug, Clone)]
pub struct EntangleOutcome {
    pub n_sites: usize,
    pub tau_over_th: f64,
    pub outcome: TwoQubitOutcome,
    pub p_1n: f64,
    pub c_1n: Option<f64>,
    pub witness: Option<f64>,
    pub final_state: StateVector,
    pub total_time: f64,
    pub diagnostics: Diagnostics,
}

/// `|+>` at site 1 and `|+>` at site N, as a two-atom Fock state.
pub fn plus_plus_state(basis: Arc<FockBasis>) -> Result<StateVector> {
    let n = basis.n_sites();
    StateVector::two_atom_product(basis, 1, state::spin_plus(), n, state::spin_plus())
}

/// Runs the full round trip for atoms at sites 1 and N and projects the
/// final state back onto those sites.
pub fn run_entangle_point(
    n_sites: usize,
    u_over_j: f64,
    tau_over_th: f64,
    prop_cfg: &PropagatorConfig,
    convention: RampConvention,
) -> Result<EntangleOutcome> {
    let tau = tau_over_th * schedule::hop_time(J);
    let sched = schedule::compile_entangle_with(n_sites, tau, J, u_over_j * J, convention)?;
    let basis = Arc::new(FockBasis::enumerate(n_sites, 2)?);
    let psi0 = plus_plus_state(basis)?;
    let mut prop = Propagator::new(*prop_cfg)?;
    let psi = prop.evolve_schedule(&psi0, &sched, None)?;
    let outcome = observables::project_two_sites(&psi, 1, n_sites)?;
    let (c_1n, witness) = if outcome.normalized {
        (
            Some(observables::concurrence(&outcome)?),
            Some(observables::witness_expectation(&outcome)?),
        )
    } else {
        (None, None)
    };
    Ok(EntangleOutcome {
        n_sites,
        tau_over_th,
        p_1n: outcome.p_project,
        outcome,
        c_1n,
        witness,
        final_state: psi,
        total_time: sched.total_duration(),
        diagnostics: prop.diagnostics(),
    })
}

/// One CSV row. `None` fields are points that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub n_sites: usize,
    pub tau_over_th: f64,
    pub p_1n: Option<f64>,
    pub c_1n: Option<f64>,
    pub witness: Option<f64>,
    pub wall_time: f64,
}

/// Witness eigenvalue range, checked once per sweep: every recorded
/// expectation must lie inside it.
pub fn witness_range() -> Result<(f64, f64)> {
    let ev = observables::witness_spectrum();
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if (lo + 1.0).abs() > 1e-6 || (hi - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidState(format!(
            "witness spectrum [{lo}, {hi}] differs from [-1, 1]"
        )));
    }
    Ok((lo, hi))
}

fn run_points(cfg: &SweepConfig, points: Vec<(usize, f64)>) -> Result<Vec<ResultRecord>> {
    let (w_lo, w_hi) = witness_range()?;
    let prop_cfg = cfg.propagator_config();
    let convention = cfg.ramp_convention;
    let u = cfg.u_over_j;
    let work = |&(n, tau): &(usize, f64)| {
        let started = Instant::now();
        let res = run_entangle_point(n, u, tau, &prop_cfg, convention);
        let wall_time = started.elapsed().as_secs_f64();
        match res {
            Ok(o) => {
                info!(
                    "N={n} tau/t_h={tau}: P={:.6} C={:?} ({wall_time:.2} s)",
                    o.p_1n, o.c_1n
                );
                ResultRecord {
                    n_sites: n,
                    tau_over_th: tau,
                    p_1n: Some(o.p_1n),
                    c_1n: o.c_1n,
                    witness: o.witness,
                    wall_time,
                }
            }
            Err(e) => {
                warn!("N={n} tau/t_h={tau} failed: {e}");
                ResultRecord {
                    n_sites: n,
                    tau_over_th: tau,
                    p_1n: None,
                    c_1n: None,
                    witness: None,
                    wall_time,
                }
            }
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut records: Vec<ResultRecord> = pool.install(|| points.par_iter().map(work).collect());
    records.sort_by(|a, b| {
        a.n_sites
            .cmp(&b.n_sites)
            .then(a.tau_over_th.partial_cmp(&b.tau_over_th).unwrap())
    });
    for r in &records {
        if let Some(w) = r.witness {
            if w < w_lo - 1e-9 || w > w_hi + 1e-9 {
                return Err(Error::InvalidState(format!(
                    "witness {w} outside its spectrum [{w_lo}, {w_hi}]"
                )));
            }
        }
    }
    Ok(records)
}

/// Ramp-time sweep at one even chain length.
pub fn run_sweep_tau(cfg: &SweepConfig) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    if cfg.sites.len() != 1 {
        return Err(Error::Config("sweep_tau takes exactly one chain length".into()));
    }
    let n = cfg.sites[0];
    run_points(cfg, cfg.tau_over_th.iter().map(|&t| (n, t)).collect())
}

/// Chain-length sweep at one ramp time.
pub fn run_sweep_n(cfg: &SweepConfig) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    if cfg.tau_over_th.len() != 1 {
        return Err(Error::Config("sweep_n takes exactly one ramp time".into()));
    }
    let tau = cfg.tau_over_th[0];
    run_points(cfg, cfg.sites.iter().map(|&n| (n, tau)).collect())
}

/// Every combination of `sites` and `tau_over_th`.
pub fn run_grid(cfg: &SweepConfig) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    let points = cfg
        .sites
        .iter()
        .flat_map(|&n| cfg.tau_over_th.iter().map(move |&t| (n, t)))
        .collect();
    run_points(cfg, points)
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v}"),
        _ => "NaN".to_string(),
    }
}

fn join_sites(sites: &[usize]) -> String {
    sites.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
}

/// `# latticeshuttle v<version> experiment=<name> N=<...> U_over_J=<...>`.
pub fn csv_header(cfg: &SweepConfig) -> String {
    format!(
        "# latticeshuttle v{} experiment={} N={} U_over_J={}",
        crate::VERSION,
        cfg.experiment,
        join_sites(&cfg.sites),
        cfg.u_over_j
    )
}

pub const RECORD_COLUMNS: &str = "tau_over_th,N,p_1n,c_1n,witness_ext,wall_time_s";

pub fn write_records_csv<W: Write>(mut w: W, cfg: &SweepConfig, records: &[ResultRecord]) -> Result<()> {
    writeln!(w, "{}", csv_header(cfg))?;
    writeln!(w, "# witness_ext is an extension column: witness expectation on the projected state")?;
    writeln!(w, "{RECORD_COLUMNS}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{:.3}",
            r.tau_over_th,
            r.n_sites,
            fmt_opt(r.p_1n),
            fmt_opt(r.c_1n),
            fmt_opt(r.witness),
            r.wall_time
        )?;
    }
    Ok(())
}

/// Samples of a single-atom transport run.
#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub t: f64,
    pub occupation: Vec<f64>,
    pub norm: f64,
}

/// Observer collecting densities at segment ends and optional intervals.
#[derive(Debug, Default)]
pub struct TrajectoryRecorder {
    pub interval: Option<f64>,
    pub samples: Vec<TrajectorySample>,
}

impl Observer for TrajectoryRecorder {
    fn interval(&self) -> Option<f64> {
        self.interval
    }

    fn observe(&mut self, t: f64, state: &StateVector) {
        self.samples.push(TrajectorySample {
            t,
            occupation: observables::occupation_profile(state).totals(),
            norm: state.norm(),
        });
    }
}

pub fn write_trajectory_csv<W: Write>(
    mut w: W,
    cfg: &SweepConfig,
    samples: &[TrajectorySample],
) -> Result<()> {
    writeln!(w, "{}", csv_header(cfg))?;
    let n = samples.first().map_or(0, |s| s.occupation.len());
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|i| format!("occ_{i}")));
    cols.push("norm".into());
    writeln!(w, "{}", cols.join(","))?;
    for s in samples {
        let mut row = vec![format!("{}", s.t)];
        row.extend(s.occupation.iter().map(|x| format!("{x}")));
        row.push(format!("{}", s.norm));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct TransportReport {
    pub n_sites: usize,
    pub tau_over_th: f64,
    pub start_site: usize,
    pub target_site: usize,
    pub arrival_probability: f64,
    pub total_time: f64,
    pub final_occupation: OccupationProfile,
    pub trajectory: Vec<TrajectorySample>,
    pub diagnostics: Diagnostics,
}

/// One atom, spin up, walked from `start_site` to the chain end.
pub fn run_transport_from(
    n_sites: usize,
    start_site: usize,
    direction: Direction,
    tau_over_th: f64,
    prop_cfg: &PropagatorConfig,
    convention: RampConvention,
    sample_interval: Option<f64>,
) -> Result<TransportReport> {
    let tau = tau_over_th * schedule::hop_time(J);
    let hops = match direction {
        Direction::Right => n_sites.saturating_sub(start_site),
        Direction::Left => start_site.saturating_sub(1),
    };
    let sched =
        schedule::compile_transport_hops(n_sites, start_site, direction, hops, tau, J, convention)?;
    let target_site = sched.track_atoms(&[start_site])[0];
    let basis = Arc::new(FockBasis::enumerate(n_sites, 1)?);
    let psi0 = StateVector::single_atom(basis, start_site, state::spin_up())?;
    let mut recorder = TrajectoryRecorder {
        interval: sample_interval,
        samples: Vec::new(),
    };
    let mut prop = Propagator::new(*prop_cfg)?;
    let psi = prop.evolve_schedule(&psi0, &sched, Some(&mut recorder))?;
    let occ = observables::occupation_profile(&psi);
    Ok(TransportReport {
        n_sites,
        tau_over_th,
        start_site,
        target_site,
        arrival_probability: occ.total(target_site),
        total_time: sched.total_duration(),
        final_occupation: occ,
        trajectory: recorder.samples,
        diagnostics: prop.diagnostics(),
    })
}

/// Transport from site 1 to site N for every configured chain length and
/// ramp time; returns one report per combination.
pub fn run_transport(cfg: &SweepConfig) -> Result<Vec<TransportReport>> {
    cfg.validate()?;
    let prop_cfg = cfg.propagator_config();
    let mut out = Vec::new();
    for &n in &cfg.sites {
        for &tau in &cfg.tau_over_th {
            out.push(run_transport_from(
                n,
                1,
                Direction::Right,
                tau,
                &prop_cfg,
                cfg.ramp_convention,
                None,
            )?);
        }
    }
    Ok(out)
}

/// Witness checks independent of any simulation, plus optional evaluation on
/// a simulated entangling run.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub product_samples: usize,
    pub product_min: f64,
    pub ideal_value: f64,
    pub reconstruction_error: f64,
    pub spectrum: Vec<f64>,
    pub simulated: Option<(f64, Option<f64>)>,
}

fn random_spin<R: Rng>(rng: &mut R) -> [Complex64; 2] {
    // uniform on the Bloch sphere
    let z: f64 = 2.0 * rng.gen::<f64>() - 1.0;
    let phi: f64 = 2.0 * PI * rng.gen::<f64>();
    let theta = z.acos();
    [
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]
}

pub fn ideal_protocol_output() -> TwoQubitAmplitudes {
    let plus = [Complex64::new(0.5, 0.0); 4];
    let jx = analytic::j_ex(1.0, 25.0).expect("U > 0");
    analytic::effective_gate_state(&plus, jx, PI / (2.0 * jx))
}

pub fn run_witness_check(
    product_samples: usize,
    seed: u64,
    simulate: Option<(&SweepConfig, usize)>,
) -> Result<WitnessReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut product_min = f64::INFINITY;
    for _ in 0..product_samples {
        let a = random_spin(&mut rng);
        let b = random_spin(&mut rng);
        let o = TwoQubitOutcome::from_amplitudes([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])?;
        product_min = product_min.min(observables::witness_expectation(&o)?);
    }
    let ideal = TwoQubitOutcome::from_amplitudes(ideal_protocol_output())?;
    let ideal_value = observables::witness_expectation(&ideal)?;
    let reconstruction_error = (observables::reconstruct_witness(&observables::witness_settings())
        - observables::witness_matrix())
    .iter()
    .map(|z| z.norm())
    .fold(0.0, f64::max);
    let simulated = match simulate {
        None => None,
        Some((cfg, n)) => {
            let o = run_entangle_point(
                n,
                cfg.u_over_j,
                cfg.tau_over_th[0],
                &cfg.propagator_config(),
                cfg.ramp_convention,
            )?;
            let exact = o.witness.ok_or_else(|| {
                Error::InvalidState("projection onto sites (1, N) is empty".into())
            })?;
            let sampled = match cfg.shots {
                Some(shots) => Some(observables::sample_witness(&o.outcome, shots, &mut rng)?),
                None => None,
            };
            Some((exact, sampled))
        }
    };
    Ok(WitnessReport {
        product_samples,
        product_min,
        ideal_value,
        reconstruction_error,
        spectrum: observables::witness_spectrum(),
        simulated,
    })
}

/// Largest simulator-vs-closed-form deviations on a two-site lattice.
#[derive(Debug, Clone, Copy)]
pub struct OracleReport {
    pub samples: usize,
    pub single_atom: f64,
    pub same_spin: f64,
    pub opposite_spin: f64,
}

impl OracleReport {
    pub fn max_error(&self) -> f64 {
        self.single_atom.max(self.same_spin).max(self.opposite_spin)
    }
}

fn two_site_vector(
    basis: &Arc<FockBasis>,
    entries: &[(&[(usize, SpinLabel)], Complex64)],
) -> Result<StateVector> {
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for (atoms, amp) in entries {
        amps[basis.index_of(&FockConfig::from_atoms(2, atoms)?)?] += amp;
    }
    Ok(StateVector::from_raw(Arc::clone(basis), amps))
}

/// Compares simulated two-site evolution with the closed forms for `samples`
/// random `(t, U/J)` draws, `U/J` in `[5, 200]` and `t` in `[0, 4 t_I]`.
/// Errors are phase-aligned distances, one global phase per channel.
pub fn run_oracle_check(samples: usize, seed: u64, cfg: &PropagatorConfig) -> Result<OracleReport> {
    use SpinLabel::{Down, Up};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b1 = Arc::new(FockBasis::enumerate(2, 1)?);
    let b2 = Arc::new(FockBasis::enumerate(2, 2)?);
    let mut report = OracleReport {
        samples,
        single_atom: 0.0,
        same_spin: 0.0,
        opposite_spin: 0.0,
    };
    let mut prop = Propagator::new(*cfg)?;
    for _ in 0..samples {
        let u = 5.0 + 195.0 * rng.gen::<f64>();
        let t = 4.0 * analytic::interaction_time(J, u)? * rng.gen::<f64>();

        let h1 = SparseHamiltonian::build(Arc::clone(&b1), CouplingProfile::odd_active(J, u))?;
        let start = StateVector::single_atom(Arc::clone(&b1), 1, state::spin_up())?;
        let sim = prop.evolve_hold(&start, &h1, t)?;
        let (stay, hop) = analytic::single_atom_amplitudes(J, t);
        let exact = two_site_vector(&b1, &[(&[(1, Up)], stay), (&[(2, Up)], hop)])?;
        report.single_atom = report.single_atom.max(sim.phase_aligned_distance(&exact)?);

        let h2 = SparseHamiltonian::build(Arc::clone(&b2), CouplingProfile::odd_active(J, u))?;
        let k = analytic::two_atom_coefficients(J, u, t)?;

        let start = StateVector::basis_state(
            Arc::clone(&b2),
            &FockConfig::from_atoms(2, &[(1, Up), (2, Up)])?,
        )?;
        let sim = prop.evolve_hold(&start, &h2, t)?;
        let exact = two_site_vector(
            &b2,
            &[
                (&[(1, Up), (2, Up)], k.a_same),
                (&[(1, Up), (1, Up)], k.c_same),
                (&[(2, Up), (2, Up)], k.c_same),
            ],
        )?;
        report.same_spin = report.same_spin.max(sim.phase_aligned_distance(&exact)?);

        let start = StateVector::basis_state(
            Arc::clone(&b2),
            &FockConfig::from_atoms(2, &[(1, Up), (2, Down)])?,
        )?;
        let sim = prop.evolve_hold(&start, &h2, t)?;
        let exact = two_site_vector(
            &b2,
            &[
                (&[(1, Up), (2, Down)], k.a_diff),
                (&[(1, Down), (2, Up)], k.b_diff),
                (&[(1, Up), (1, Down)], k.c_diff),
                (&[(2, Up), (2, Down)], k.c_diff),
            ],
        )?;
        report.opposite_spin = report.opposite_spin.max(sim.phase_aligned_distance(&exact)?);
    }
    Ok(report)
}
