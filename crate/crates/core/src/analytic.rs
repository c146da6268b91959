//! Closed-form double-well dynamics, the effective exchange gate, and the
//! protocol's timing formulas. Everything here is independent of the sparse
//! simulator and serves as its reference.
//!
//! Natural units: `hbar = 1`, energies are angular frequencies, times are in
//! `1/J` when `J = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Two-qubit amplitudes ordered `[up up, up down, down up, down down]`,
/// first label for the left atom.
pub type TwoQubitAmplitudes = [Complex64; 4];

/// Single atom in an isolated double well: `(stay, hop)` amplitudes.
pub fn single_atom_amplitudes(j: f64, t: f64) -> (Complex64, Complex64) {
    let phase = j * t;
    (Complex64::new(phase.cos(), 0.0), I * phase.sin())
}

/// Coefficients of two atoms in one double well.
///
/// Same spin: `|s,s> -> a_same |s,s> + c_same (|ss,0> + |0,ss>)`.
/// Opposite spin: `|s,s'> -> a_diff |s,s'> + b_diff |s',s> + c_diff (|ss',0> + |0,ss'>)`.
/// Each channel is exact up to its own global phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoAtomCoefficients {
    pub a_same: Complex64,
    pub c_same: Complex64,
    pub a_diff: Complex64,
    pub b_diff: Complex64,
    pub c_diff: Complex64,
    pub s: f64,
    pub s_prime: f64,
}

/// `sqrt(1 + 16 J^2 / U^2)`.
pub fn s_factor(j: f64, u: f64) -> f64 {
    (1.0 + 16.0 * j * j / (u * u)).sqrt()
}

/// `sqrt(1 + 64 J^2 / U^2)`.
pub fn s_prime_factor(j: f64, u: f64) -> f64 {
    (1.0 + 64.0 * j * j / (u * u)).sqrt()
}

fn require_positive_u(u: f64) -> Result<()> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::Singular(format!(
            "closed forms need U > 0, got {u}; simulate U = 0 directly"
        )));
    }
    Ok(())
}

pub fn two_atom_coefficients(j: f64, u: f64, t: f64) -> Result<TwoAtomCoefficients> {
    require_positive_u(u)?;
    let s = s_factor(j, u);
    let sp = s_prime_factor(j, u);
    let x = s * u * t / 2.0;
    let y = sp * u * t / 4.0;
    let a_same = Complex64::new(x.cos(), x.sin() / s);
    let c_same = I * (2.0 * 2f64.sqrt() * j / (s * u)) * x.sin();
    let half_phase = Complex64::from_polar(0.5, u * t / 4.0);
    let osc = Complex64::new(y.cos(), y.sin() / sp) * 0.5;
    Ok(TwoAtomCoefficients {
        a_same,
        c_same,
        a_diff: half_phase + osc,
        b_diff: -half_phase + osc,
        c_diff: I * (4.0 * j / (sp * u)) * y.sin(),
        s,
        s_prime: sp,
    })
}

impl TwoAtomCoefficients {
    /// `|a_same|^2 + 2|c_same|^2`; equals 1.
    pub fn same_spin_norm(&self) -> f64 {
        self.a_same.norm_sqr() + 2.0 * self.c_same.norm_sqr()
    }

    /// `|a_diff|^2 + |b_diff|^2 + 2|c_diff|^2`; equals 1.
    pub fn opposite_spin_norm(&self) -> f64 {
        self.a_diff.norm_sqr() + self.b_diff.norm_sqr() + 2.0 * self.c_diff.norm_sqr()
    }

    /// Double-occupancy weight for a `|++>` input, as the mean of the four
    /// channel `|C|^2` values.
    pub fn p_doub(&self) -> f64 {
        (2.0 * self.c_same.norm_sqr() + 2.0 * self.c_diff.norm_sqr()) / 4.0
    }
}

/// Superexchange coupling `4 J^2 / U`.
pub fn j_ex(j: f64, u: f64) -> Result<f64> {
    require_positive_u(u)?;
    Ok(4.0 * j * j / u)
}

/// Hop time `pi / (2 J)`.
pub fn hop_time(j: f64) -> f64 {
    PI / (2.0 * j)
}

/// Interaction time `pi / (2 J_ex) = pi U / (8 J^2)`.
pub fn interaction_time(j: f64, u: f64) -> Result<f64> {
    let jx = j_ex(j, u)?;
    if jx == 0.0 {
        return Err(Error::Singular("J_ex = 0: no exchange interaction".into()));
    }
    Ok(PI / (2.0 * jx))
}

/// Total protocol time for atoms at distance `N`: `(N - 2) t_h + t_I`.
pub fn total_time(n_sites: usize, j: f64, u: f64) -> Result<f64> {
    if n_sites < 2 {
        return Err(Error::InvalidSchedule(format!("need N >= 2, got {n_sites}")));
    }
    Ok((n_sites - 2) as f64 * hop_time(j) + interaction_time(j, u)?)
}

/// Physical scale: the tunneling as an ordinary frequency `J/h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalUnits {
    pub j_over_h_hz: f64,
}

impl PhysicalUnits {
    pub fn new(j_over_h_hz: f64) -> Result<Self> {
        if !(j_over_h_hz > 0.0) || !j_over_h_hz.is_finite() {
            return Err(Error::Config(format!(
                "J/h must be a positive frequency, got {j_over_h_hz}"
            )));
        }
        Ok(PhysicalUnits { j_over_h_hz })
    }

    pub fn from_khz(khz: f64) -> Result<Self> {
        Self::new(khz * 1e3)
    }

    /// Angular frequency `2 pi J/h`, i.e. `J/hbar`.
    pub fn omega_j(&self) -> f64 {
        2.0 * PI * self.j_over_h_hz
    }

    /// Converts a time in units of `1/J` to seconds.
    pub fn to_physical(&self, t: f64) -> f64 {
        t / self.omega_j()
    }

    /// Converts an energy in units of `J` to an ordinary frequency in Hz.
    pub fn energy_to_hz(&self, e: f64) -> f64 {
        e * self.j_over_h_hz
    }
}

/// The `J << U` exchange gate: `|ss> -> |ss>`,
/// `|ss'> -> cos(J_ex t)|ss'> + i sin(J_ex t)|s's>`.
pub fn effective_gate_state(input: &TwoQubitAmplitudes, j_ex: f64, t: f64) -> TwoQubitAmplitudes {
    let c = Complex64::new((j_ex * t).cos(), 0.0);
    let s = I * (j_ex * t).sin();
    [
        input[0],
        c * input[1] + s * input[2],
        c * input[2] + s * input[1],
        input[3],
    ]
}

/// Largest double-occupancy weight over one interaction window `[0, t_I]`.
pub fn max_p_doub(j: f64, u: f64) -> Result<f64> {
    let t_i = interaction_time(j, u)?;
    let p = |t: f64| two_atom_coefficients(j, u, t).map(|c| c.p_doub());
    // the fast oscillation has period 4 pi / (s U); sample well below it
    let period = 4.0 * PI / (s_factor(j, u) * u);
    let samples = ((t_i / period) * 64.0).ceil().max(256.0) as usize;
    let dt = t_i / samples as f64;
    let mut best = (0.0, p(0.0)?);
    for k in 1..=samples {
        let t = k as f64 * dt;
        let v = p(t)?;
        if v > best.1 {
            best = (t, v);
        }
    }
    // golden-section refinement around the best sample
    let (mut a, mut b) = ((best.0 - dt).max(0.0), (best.0 + dt).min(t_i));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if p(c)? > p(d)? {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(best.1.max(p(0.5 * (a + b))?))
}

/// Sum of the separate channel maxima,
/// `(16 J^2/(U^2+16J^2) + 32 J^2/(U^2+64J^2)) / 4`; bounds [`max_p_doub`].
pub fn p_doub_bound(j: f64, u: f64) -> Result<f64> {
    require_positive_u(u)?;
    let j2 = j * j;
    let same = 8.0 * j2 / (u * u + 16.0 * j2);
    let diff = 16.0 * j2 / (u * u + 64.0 * j2);
    Ok((2.0 * same + 2.0 * diff) / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_atom_complete_hop() {
        let (stay, hop) = single_atom_amplitudes(1.0, PI / 2.0);
        assert!(stay.norm() < 1e-15);
        assert!((hop - I).norm() < 1e-15);
        let (stay, hop) = single_atom_amplitudes(1.0, 0.0);
        assert_eq!((stay, hop), (c(1.0, 0.0), c(0.0, 0.0)));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let t = rng.gen::<f64>() * 50.0;
            let (a, b) = single_atom_amplitudes(1.0, t);
            assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn coefficients_at_zero() {
        let k = two_atom_coefficients(1.0, 25.0, 0.0).unwrap();
        assert_eq!(k.a_same, c(1.0, 0.0));
        assert_eq!(k.c_same.norm(), 0.0);
        assert!((k.a_diff - c(1.0, 0.0)).norm() < 1e-15);
        assert!(k.b_diff.norm() < 1e-15);
        assert_eq!(k.c_diff.norm(), 0.0);
    }

    #[test]
    fn normalization_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let u = 1.0 + rng.gen::<f64>() * 200.0;
            let t = rng.gen::<f64>() * 100.0;
            let k = two_atom_coefficients(1.0, u, t).unwrap();
            assert!((k.same_spin_norm() - 1.0).abs() < 1e-12);
            assert!((k.opposite_spin_norm() - 1.0).abs() < 1e-12);
        }
        let k = two_atom_coefficients(1.0, 25.0, 3.3).unwrap();
        assert!((k.s - (1.0f64 + 16.0 / 625.0).sqrt()).abs() < 1e-15);
        assert!((k.s_prime - (1.0f64 + 64.0 / 625.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn singular_interaction_rejected() {
        assert!(two_atom_coefficients(1.0, 0.0, 1.0).is_err());
        assert!(j_ex(1.0, 0.0).is_err());
        assert!(interaction_time(0.0, 25.0).is_err());
    }

    #[test]
    fn exchange_coupling_values() {
        assert!((j_ex(1.0, 25.0).unwrap() - 0.16).abs() < 1e-15);
        assert_eq!(j_ex(0.0, 25.0).unwrap(), 0.0);
        let units = PhysicalUnits::from_khz(1.5).unwrap();
        let hz = units.energy_to_hz(j_ex(1.0, 25.0).unwrap());
        assert!((hz - 240.0).abs() < 1e-9);
        assert!((hz - 250.0).abs() / 250.0 < 0.05);
    }

    #[test]
    fn timing_formulas() {
        let units = PhysicalUnits::from_khz(1.5).unwrap();
        let t = total_time(100, 1.0, 25.0).unwrap();
        assert!((t - (98.0 * PI / 2.0 + PI * 25.0 / 8.0)).abs() < 1e-12);
        let ms = units.to_physical(t) * 1e3;
        assert!((ms - 17.375).abs() < 1e-3, "{ms}");
        assert_eq!(total_time(2, 1.0, 25.0).unwrap(), interaction_time(1.0, 25.0).unwrap());
        let th_us = units.to_physical(hop_time(1.0)) * 1e6;
        assert!((th_us - 1e6 / 6000.0).abs() < 1e-9);
        assert!(total_time(1, 1.0, 25.0).is_err());
        assert!(PhysicalUnits::new(0.0).is_err());
    }

    #[test]
    fn effective_gate_makes_maximally_entangled_output() {
        let plus = [c(0.5, 0.0); 4];
        let jx = 0.16;
        let out = effective_gate_state(&plus, jx, PI / (2.0 * jx));
        let expected = [c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(0.5, 0.0)];
        for k in 0..4 {
            assert!((out[k] - expected[k]).norm() < 1e-15);
        }
        // Wootters concurrence of a pure state
        let conc = 2.0 * (out[0] * out[3] - out[1] * out[2]).norm();
        assert!((conc - 1.0).abs() < 1e-14);
        assert_eq!(effective_gate_state(&plus, jx, 0.0), plus);
    }

    #[test]
    fn double_occupancy_is_small_at_u25() {
        let bound = p_doub_bound(1.0, 25.0).unwrap();
        assert!((bound - 0.017851280).abs() < 1e-8);
        let m = max_p_doub(1.0, 25.0).unwrap();
        assert!(m <= bound + 1e-15);
        assert!(m > 0.0178 && m < 0.02, "{m}");
    }

    #[test]
    fn large_u_matches_effective_gate() {
        let (j, u) = (1.0, 200.0);
        let jx = j_ex(j, u).unwrap();
        let t_i = interaction_time(j, u).unwrap();
        for k in 0..=200 {
            let t = t_i * k as f64 / 200.0;
            let co = two_atom_coefficients(j, u, t).unwrap();
            let norm = (co.a_diff.norm_sqr() + co.b_diff.norm_sqr()).sqrt();
            let ideal = [(jx * t).cos(), (jx * t).sin()];
            let overlap = (co.a_diff * ideal[0] + co.b_diff * (-I) * ideal[1]).norm() / norm;
            assert!(overlap >= 0.999, "t={t}: {overlap}");
        }
    }
}
