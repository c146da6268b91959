//! Time evolution under holds, linear ramps and whole schedules.

pub mod dense;
mod krylov;

use std::f64::consts::PI;
use std::sync::Arc;

use log::{debug, warn};
use num_complex::Complex64;

pub use krylov::KrylovStats;

use crate::error::{Error, Result};
use crate::hamiltonian::{CouplingProfile, RampPair, SparseHamiltonian};
use crate::schedule::{Schedule, SegmentKind};
use crate::state::{norm_of, StateVector};
use krylov::Lanczos;

/// How a linear ramp is split into constant-Hamiltonian exponentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RampScheme {
    /// One exponential per substep, sampled at the substep midpoint. Second order.
    Midpoint,
    /// Two half-length exponentials per substep at fractions 1/6 and 5/6.
    /// This is the fourth-order commutator-free Magnus pair, which collapses
    /// to two samples because the ramp is linear in time.
    CommutatorFree4,
}

impl RampScheme {
    pub fn order(self) -> u32 {
        match self {
            RampScheme::Midpoint => 2,
            RampScheme::CommutatorFree4 => 4,
        }
    }

    fn richardson_divisor(self) -> f64 {
        (2f64.powi(self.order() as i32)) - 1.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PropagatorConfig {
    /// Error target per public call, in state-vector norm.
    pub tolerance: f64,
    /// Longest ramp substep before self-convergence doubling starts.
    pub max_substep: f64,
    /// Largest Krylov basis; smaller bases are used when they suffice.
    pub krylov_dim: usize,
    pub ramp_scheme: RampScheme,
    /// Cap on substep-count doublings during a ramp.
    pub max_ramp_doublings: usize,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        PropagatorConfig {
            tolerance: 1e-9,
            // t_h / 64 with J = 1
            max_substep: PI / 2.0 / 64.0,
            krylov_dim: 16,
            ramp_scheme: RampScheme::CommutatorFree4,
            max_ramp_doublings: 14,
        }
    }
}

impl PropagatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !(self.max_substep > 0.0) {
            return Err(Error::Config("max_substep must be positive".into()));
        }
        if self.krylov_dim < 3 {
            return Err(Error::Config("krylov_dim must be at least 3".into()));
        }
        Ok(())
    }
}

/// Counters collected across every call on one [`Propagator`].
#[derive(Debug, Default, Clone, Copy)]
pub struct Diagnostics {
    /// Largest `| ||psi|| - 1 |` seen before renormalization.
    pub max_norm_drift: f64,
    pub krylov: KrylovStats,
    pub ramp_substeps: usize,
    /// Largest `|<H>_after - <H>_before|` over holds, relative to
    /// `max(|<H>|, ||H||)` so that states with zero energy stay well defined.
    pub max_hold_energy_drift: f64,
}

/// Receives `(t, state)` during [`Propagator::evolve_schedule`].
pub trait Observer {
    /// Sampling interval inside segments; segment ends are always reported.
    fn interval(&self) -> Option<f64>;
    fn observe(&mut self, t: f64, state: &StateVector);
}

/// Stateful propagator: owns Krylov workspace and diagnostics.
pub struct Propagator {
    cfg: PropagatorConfig,
    lanczos: Lanczos,
    diagnostics: Diagnostics,
}

impl Propagator {
    pub fn new(cfg: PropagatorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Propagator {
            cfg,
            lanczos: Lanczos::new(cfg.krylov_dim, 0),
            diagnostics: Diagnostics::default(),
        })
    }

    pub fn config(&self) -> &PropagatorConfig {
        &self.cfg
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let mut d = self.diagnostics;
        d.krylov = self.lanczos.stats;
        d
    }

    fn finish(&mut self, basis: &Arc<crate::basis::FockBasis>, amps: Vec<Complex64>) -> StateVector {
        let mut out = StateVector::from_raw(Arc::clone(basis), amps);
        let n = out.renormalize();
        let drift = (n - 1.0).abs();
        if drift > self.diagnostics.max_norm_drift {
            self.diagnostics.max_norm_drift = drift;
        }
        if drift > self.cfg.tolerance {
            warn!("norm drift {drift:.3e} exceeds tolerance {:.1e}", self.cfg.tolerance);
        } else if drift > 1e-12 {
            debug!("norm drift {drift:.3e} renormalized");
        }
        out
    }

    fn raw_hold(
        &mut self,
        amps: &mut [Complex64],
        h: &SparseHamiltonian,
        duration: f64,
        tol: f64,
    ) -> Result<()> {
        self.lanczos.evolve(h, amps, duration, tol)
    }

    /// `exp(-i duration H) |state>`.
    pub fn evolve_hold(
        &mut self,
        state: &StateVector,
        h: &SparseHamiltonian,
        duration: f64,
    ) -> Result<StateVector> {
        h.check_basis(state.basis())?;
        if !(duration >= 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "hold duration must be non-negative, got {duration}"
            )));
        }
        if duration == 0.0 {
            return Ok(state.clone());
        }
        let mut amps = state.amplitudes().to_vec();
        let tol = self.cfg.tolerance;
        let e0 = h.expectation_slice(&amps)?.re;
        self.raw_hold(&mut amps, h, duration, tol)?;
        let out = self.finish(state.basis(), amps);
        let e1 = h.expectation_slice(out.amplitudes())?.re;
        let drift = (e1 - e0).abs() / e0.abs().max(h.norm_bound()).max(f64::MIN_POSITIVE);
        self.diagnostics.max_hold_energy_drift = self.diagnostics.max_hold_energy_drift.max(drift);
        Ok(out)
    }

    /// `exp(+i duration H) |state>`, computed as the complex conjugate of a
    /// forward evolution of the conjugated state (valid because `H` is real).
    pub fn evolve_hold_backward(
        &mut self,
        state: &StateVector,
        h: &SparseHamiltonian,
        duration: f64,
    ) -> Result<StateVector> {
        Ok(self.evolve_hold(&state.conj(), h, duration)?.conj())
    }

    fn ramp_pass(
        &mut self,
        amps: &mut [Complex64],
        h_start: &SparseHamiltonian,
        h_end: &SparseHamiltonian,
        duration: f64,
        substeps: usize,
    ) -> Result<()> {
        let dt = duration / substeps as f64;
        let samples: &[(f64, f64)] = match self.cfg.ramp_scheme {
            RampScheme::Midpoint => &[(0.5, 1.0)],
            RampScheme::CommutatorFree4 => &[(1.0 / 6.0, 0.5), (5.0 / 6.0, 0.5)],
        };
        let n_exp = substeps * samples.len();
        let tol = 0.1 * self.cfg.tolerance / n_exp as f64;
        let mut pair = RampPair::new(h_start, h_end)?;
        for k in 0..substeps {
            for &(node, weight) in samples {
                let f = (k as f64 + node) / substeps as f64;
                self.lanczos.evolve(pair.at(f), amps, weight * dt, tol)?;
            }
        }
        self.diagnostics.ramp_substeps += substeps;
        Ok(())
    }

    /// Time-ordered evolution under `H(t) = (1 - t/T) h_start + (t/T) h_end`.
    ///
    /// The substep count starts at `ceil(T / max_substep)` and doubles until
    /// the error estimate of the finer result, `||fine - coarse|| / (2^p - 1)`
    /// for a scheme of order `p`, is below the tolerance.
    pub fn evolve_ramp(
        &mut self,
        state: &StateVector,
        h_start: &SparseHamiltonian,
        h_end: &SparseHamiltonian,
        duration: f64,
    ) -> Result<StateVector> {
        h_start.check_basis(state.basis())?;
        h_end.check_basis(state.basis())?;
        if !(duration >= 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "ramp duration must be non-negative, got {duration}"
            )));
        }
        if duration == 0.0 {
            return Ok(state.clone());
        }
        let mut n = ((duration / self.cfg.max_substep).ceil() as usize).max(1);
        let mut prev = state.amplitudes().to_vec();
        self.ramp_pass(&mut prev, h_start, h_end, duration, n)?;
        for _ in 0..self.cfg.max_ramp_doublings {
            n *= 2;
            let mut cur = state.amplitudes().to_vec();
            self.ramp_pass(&mut cur, h_start, h_end, duration, n)?;
            let diff = norm_of(
                &cur.iter()
                    .zip(&prev)
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>(),
            );
            if diff / self.cfg.ramp_scheme.richardson_divisor() < self.cfg.tolerance {
                return Ok(self.finish(state.basis(), cur));
            }
            prev = cur;
        }
        Err(Error::NonConvergence(format!(
            "ramp of duration {duration} not converged with {n} substeps"
        )))
    }

    /// Runs every segment of `schedule` in order.
    pub fn evolve_schedule(
        &mut self,
        state: &StateVector,
        schedule: &Schedule,
        mut observer: Option<&mut dyn Observer>,
    ) -> Result<StateVector> {
        if schedule.n_sites() != state.basis().n_sites() {
            return Err(Error::BasisMismatch {
                expected: format!("chain of {} sites", schedule.n_sites()),
                got: state.basis().describe(),
            });
        }
        let basis = Arc::clone(state.basis());
        let mut cache: Vec<(CouplingProfile, Arc<SparseHamiltonian>)> = Vec::new();
        let mut hamiltonian = |p: &CouplingProfile| -> Result<Arc<SparseHamiltonian>> {
            if let Some((_, h)) = cache.iter().find(|(q, _)| q == p) {
                return Ok(Arc::clone(h));
            }
            let h = Arc::new(SparseHamiltonian::build(Arc::clone(&basis), *p)?);
            cache.push((*p, Arc::clone(&h)));
            Ok(h)
        };

        let interval = observer.as_ref().and_then(|o| o.interval());
        if let Some(interval) = interval {
            if !(interval > 0.0) {
                return Err(Error::Config("observer interval must be positive".into()));
            }
        }
        let mut psi = state.clone();
        let mut t = 0.0;
        if let Some(o) = observer.as_mut() {
            o.observe(t, &psi);
        }
        let mut next_sample = interval.unwrap_or(f64::INFINITY);

        for seg in schedule.segments() {
            let seg_start = t;
            let seg_end = t + seg.duration;
            let mut cuts = Vec::new();
            while next_sample < seg_end - 1e-12 {
                if next_sample > seg_start + 1e-12 {
                    cuts.push(next_sample);
                }
                next_sample += interval.unwrap_or(f64::INFINITY);
            }
            cuts.push(seg_end);

            let h_start = hamiltonian(&seg.start)?;
            let h_end = match seg.kind {
                SegmentKind::Hold => Arc::clone(&h_start),
                SegmentKind::Ramp => hamiltonian(&seg.end)?,
            };
            let mut a = seg_start;
            for &b in &cuts {
                psi = match seg.kind {
                    SegmentKind::Hold => self.evolve_hold(&psi, &h_start, b - a)?,
                    SegmentKind::Ramp => {
                        let fa = (a - seg_start) / seg.duration;
                        let fb = (b - seg_start) / seg.duration;
                        let ha = SparseHamiltonian::interpolate(&h_start, &h_end, fa)?;
                        let hb = SparseHamiltonian::interpolate(&h_start, &h_end, fb.min(1.0))?;
                        self.evolve_ramp(&psi, &ha, &hb, b - a)?
                    }
                };
                a = b;
                if let Some(o) = observer.as_mut() {
                    o.observe(b, &psi);
                }
            }
            t = seg_end;
        }
        Ok(psi)
    }
}

/// One-shot [`Propagator::evolve_hold`].
pub fn evolve_hold(
    state: &StateVector,
    h: &SparseHamiltonian,
    duration: f64,
    cfg: &PropagatorConfig,
) -> Result<StateVector> {
    Propagator::new(*cfg)?.evolve_hold(state, h, duration)
}

/// One-shot [`Propagator::evolve_ramp`].
pub fn evolve_ramp(
    state: &StateVector,
    h_start: &SparseHamiltonian,
    h_end: &SparseHamiltonian,
    duration: f64,
    cfg: &PropagatorConfig,
) -> Result<StateVector> {
    Propagator::new(*cfg)?.evolve_ramp(state, h_start, h_end, duration)
}

/// One-shot [`Propagator::evolve_schedule`].
pub fn evolve_schedule(
    state: &StateVector,
    schedule: &Schedule,
    cfg: &PropagatorConfig,
    observer: Option<&mut dyn Observer>,
) -> Result<StateVector> {
    Propagator::new(*cfg)?.evolve_schedule(state, schedule, observer)
}
