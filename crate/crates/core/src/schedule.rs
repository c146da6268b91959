//! Compiles the phase-shift protocol into a list of timed segments.
//!
//! A *hold* keeps one coupling family on for a fixed time; a *ramp* crossfades
//! linearly from one family to the other (odd links fall `J -> 0` while even
//! links rise `0 -> J`, or the reverse). With `tau = 0` no ramps are emitted
//! and the switch between holds is instantaneous.

use std::f64::consts::PI;
use std::fmt;

use crate::analytic;
use crate::error::{Error, Result};
use crate::hamiltonian::CouplingProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    fn step(self) -> isize {
        match self {
            Direction::Left => -1,
            Direction::Right => 1,
        }
    }
}

/// Where ramp time comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RampConvention {
    /// Holds keep their full ideal length and ramps are inserted between them.
    Append,
    /// Ramps are centred on the ideal switching instant: every hold loses
    /// `tau / 2` per adjacent ramp, so the total time is unchanged and each
    /// link's time-integrated coupling matches the ideal protocol.
    #[default]
    Centered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Hold,
    Ramp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentLabel {
    Hop(usize),
    Ramp(usize),
    Interact,
}

impl fmt::Display for SegmentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SegmentLabel::Hop(k) => write!(f, "hop-{k}"),
            SegmentLabel::Ramp(k) => write!(f, "ramp-{k}"),
            SegmentLabel::Interact => write!(f, "interact"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub label: SegmentLabel,
    pub kind: SegmentKind,
    pub duration: f64,
    pub start: CouplingProfile,
    /// Equal to `start` for holds.
    pub end: CouplingProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    n_sites: usize,
    segments: Vec<Segment>,
}

/// Hop time `pi / (2 J)`.
pub fn hop_time(j: f64) -> f64 {
    PI / (2.0 * j)
}

struct PlannedHold {
    label: SegmentLabel,
    profile: CouplingProfile,
    ideal: f64,
}

fn assemble(
    n_sites: usize,
    holds: Vec<PlannedHold>,
    tau: f64,
    convention: RampConvention,
) -> Result<Schedule> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidSchedule(format!("ramp time must be >= 0, got {tau}")));
    }
    let count = holds.len();
    let mut segments = Vec::with_capacity(2 * count);
    let mut ramp_no = 0;
    for (k, hold) in holds.iter().enumerate() {
        let ramp_before = k > 0 && tau > 0.0 && holds[k - 1].profile != hold.profile;
        let ramp_after = k + 1 < count && tau > 0.0 && holds[k + 1].profile != hold.profile;
        if ramp_before {
            ramp_no += 1;
            segments.push(Segment {
                label: SegmentLabel::Ramp(ramp_no),
                kind: SegmentKind::Ramp,
                duration: tau,
                start: holds[k - 1].profile,
                end: hold.profile,
            });
        }
        let duration = match convention {
            RampConvention::Append => hold.ideal,
            RampConvention::Centered => {
                let adjacent = ramp_before as usize + ramp_after as usize;
                let d = hold.ideal - 0.5 * tau * adjacent as f64;
                if d < 0.0 {
                    return Err(Error::InvalidSchedule(format!(
                        "ramp time {tau} too long for centred ramps around a hold of {}",
                        hold.ideal
                    )));
                }
                d
            }
        };
        segments.push(Segment {
            label: hold.label,
            kind: SegmentKind::Hold,
            duration,
            start: hold.profile,
            end: hold.profile,
        });
    }
    Ok(Schedule { n_sites, segments })
}

fn check_coupling(j: f64) -> Result<()> {
    if !(j > 0.0) || !j.is_finite() {
        return Err(Error::InvalidSchedule(format!("tunneling J must be positive, got {j}")));
    }
    Ok(())
}

/// Moves one atom from `start_site` to the chain end in `direction`.
pub fn compile_transport(
    n_sites: usize,
    start_site: usize,
    direction: Direction,
    tau: f64,
    j: f64,
) -> Result<Schedule> {
    let hops = match direction {
        Direction::Right => n_sites.saturating_sub(start_site),
        Direction::Left => start_site.saturating_sub(1),
    };
    compile_transport_hops(
        n_sites,
        start_site,
        direction,
        hops,
        tau,
        j,
        RampConvention::default(),
    )
}

/// Moves one atom `hops` sites from `start_site`.
pub fn compile_transport_hops(
    n_sites: usize,
    start_site: usize,
    direction: Direction,
    hops: usize,
    tau: f64,
    j: f64,
    convention: RampConvention,
) -> Result<Schedule> {
    check_coupling(j)?;
    if n_sites < 2 || start_site == 0 || start_site > n_sites {
        return Err(Error::InvalidSchedule(format!(
            "start site {start_site} outside chain 1..={n_sites}"
        )));
    }
    let end = start_site as isize + direction.step() * hops as isize;
    if hops == 0 || end < 1 || end > n_sites as isize {
        return Err(Error::InvalidSchedule(format!(
            "{hops} hops {direction:?} from site {start_site} leave the chain 1..={n_sites}"
        )));
    }
    let th = hop_time(j);
    let holds = (1..=hops)
        .map(|k| {
            let link = match direction {
                Direction::Right => start_site + k - 1,
                Direction::Left => start_site - k,
            };
            PlannedHold {
                label: SegmentLabel::Hop(k),
                profile: CouplingProfile::for_link(link, j, 0.0),
                ideal: th,
            }
        })
        .collect();
    assemble(n_sites, holds, tau, convention)
}

/// Brings atoms at sites 1 and N together, lets them interact for `t_I`,
/// and returns them.
pub fn compile_entangle(n_sites: usize, tau: f64, j: f64, u: f64) -> Result<Schedule> {
    compile_entangle_with(n_sites, tau, j, u, RampConvention::default())
}

pub fn compile_entangle_with(
    n_sites: usize,
    tau: f64,
    j: f64,
    u: f64,
    convention: RampConvention,
) -> Result<Schedule> {
    check_coupling(j)?;
    if n_sites < 2 || n_sites % 2 != 0 {
        return Err(Error::InvalidSchedule(format!(
            "entangling needs an even chain length (atoms on opposite-parity ends), got {n_sites}"
        )));
    }
    let t_i = analytic::interaction_time(j, u)?;
    let th = hop_time(j);
    let inward = (n_sites - 2) / 2;
    let mut holds = Vec::with_capacity(2 * inward + 1);
    // hop k of the left atom uses link k; the right atom mirrors it on link
    // N - k, which has the same parity because N is even
    for k in 1..=inward {
        holds.push(PlannedHold {
            label: SegmentLabel::Hop(k),
            profile: CouplingProfile::for_link(k, j, u),
            ideal: th,
        });
    }
    holds.push(PlannedHold {
        label: SegmentLabel::Interact,
        profile: CouplingProfile::for_link(n_sites / 2, j, u),
        ideal: t_i,
    });
    for k in (1..=inward).rev() {
        holds.push(PlannedHold {
            label: SegmentLabel::Hop(2 * inward + 1 - k),
            profile: CouplingProfile::for_link(k, j, u),
            ideal: th,
        });
    }
    assemble(n_sites, holds, tau, convention)
}

impl Schedule {
    /// Schedule with no segments.
    pub fn empty(n_sites: usize) -> Self {
        Schedule {
            n_sites,
            segments: Vec::new(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn durations(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.duration).collect()
    }

    /// Start time of every segment followed by the total duration.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut t = 0.0;
        out.push(t);
        for s in &self.segments {
            t += s.duration;
            out.push(t);
        }
        out
    }

    /// Replaces the onsite energy in every profile.
    pub fn with_interaction(mut self, u: f64) -> Self {
        for s in &mut self.segments {
            s.start.u = u;
            s.end.u = u;
        }
        self
    }

    /// Coupling profile at time `t`; the later segment wins on a boundary.
    pub fn profile_at(&self, t: f64) -> Result<CouplingProfile> {
        let total = self.total_duration();
        let slack = 1e-12 * total.max(1.0);
        if !(t >= -slack && t <= total + slack) || self.segments.is_empty() {
            return Err(Error::TimeOutOfRange { t, total });
        }
        let mut start = 0.0;
        for (k, s) in self.segments.iter().enumerate() {
            let end = start + s.duration;
            let last = k + 1 == self.segments.len();
            if t < end || last {
                return Ok(match s.kind {
                    SegmentKind::Hold => s.start,
                    SegmentKind::Ramp => {
                        let f = ((t - start) / s.duration).clamp(0.0, 1.0);
                        s.start.lerp(&s.end, f)
                    }
                });
            }
            start = end;
        }
        unreachable!()
    }

    /// Mirror symmetry of durations and profiles (ramps reversed).
    pub fn is_time_symmetric(&self) -> bool {
        let n = self.segments.len();
        (0..n).all(|k| {
            let a = &self.segments[k];
            let b = &self.segments[n - 1 - k];
            a.kind == b.kind
                && (a.duration - b.duration).abs() <= 1e-12 * a.duration.max(1.0)
                && a.start == b.end
                && a.end == b.start
        })
    }

    /// Follows localized atoms through the hop holds combinatorially: an
    /// atom on an active link moves to its partner site; interaction holds
    /// and ramps move nothing.
    pub fn track_atoms(&self, initial: &[usize]) -> Vec<usize> {
        let mut pos = initial.to_vec();
        for s in &self.segments {
            if s.kind != SegmentKind::Hold || !matches!(s.label, SegmentLabel::Hop(_)) {
                continue;
            }
            for p in pos.iter_mut() {
                let right_link = *p;
                let left_link = p.wrapping_sub(1);
                if right_link < self.n_sites && s.start.link_coupling(right_link) > 0.0 {
                    *p += 1;
                } else if left_link >= 1 && s.start.link_coupling(left_link) > 0.0 {
                    *p -= 1;
                }
            }
        }
        pos
    }
}

impl fmt::Display for Schedule {
    /// One `label kind duration j_odd_start j_even_start j_odd_end j_even_end`
    /// line per segment.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.segments {
            let kind = match s.kind {
                SegmentKind::Hold => "hold",
                SegmentKind::Ramp => "ramp",
            };
            writeln!(
                f,
                "{} {} {:.12} {} {} {} {}",
                s.label, kind, s.duration, s.start.j_odd, s.start.j_even, s.end.j_odd, s.end.j_even
            )?;
        }
        Ok(())
    }
}
