//! Measurements on simulated states: site densities, projection onto one
//! atom at each of two sites, pure-state concurrence and the witness
//!
//! ```text
//! W = (I - Z Y - Y Z - X X) / 2
//! ```
//!
//! Conventions: `|up> = |0>`, `Z|up> = |up>`, `Y|up> = i|down>`,
//! `Y|down> = -i|up>`. Two-qubit amplitudes are ordered
//! `[up up, up down, down up, down down]` with the first label on `site_a`.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::analytic::TwoQubitAmplitudes;
use crate::basis::{FockConfig, SpinLabel};
use crate::error::{Error, Result};
use crate::state::StateVector;

/// Default probability below which a projection is flagged unusable.
pub const DEFAULT_PROJECTION_FLOOR: f64 = 1e-12;

const NORMALIZED_TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Per-site spin-resolved densities `<n_{i,s}>`, sites `1..=N` stored at `i - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationProfile {
    pub up: Vec<f64>,
    pub down: Vec<f64>,
}

impl OccupationProfile {
    pub fn n_sites(&self) -> usize {
        self.up.len()
    }

    /// Total density at `site` (1-based).
    pub fn total(&self, site: usize) -> f64 {
        self.up[site - 1] + self.down[site - 1]
    }

    pub fn totals(&self) -> Vec<f64> {
        self.up.iter().zip(&self.down).map(|(a, b)| a + b).collect()
    }

    pub fn particle_number(&self) -> f64 {
        self.up.iter().sum::<f64>() + self.down.iter().sum::<f64>()
    }
}

pub fn occupation_profile(state: &StateVector) -> OccupationProfile {
    let basis = state.basis();
    let n = basis.n_sites();
    let mut up = vec![0.0; n];
    let mut down = vec![0.0; n];
    for (k, amp) in state.amplitudes().iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for &m in basis.mode_set(k).as_slice() {
            let m = m as usize;
            if m % 2 == 0 {
                up[m / 2] += p;
            } else {
                down[m / 2] += p;
            }
        }
    }
    OccupationProfile { up, down }
}

/// Two-qubit pure state obtained by projecting onto one atom at each site.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitOutcome {
    pub site_a: usize,
    pub site_b: usize,
    /// Renormalized when `normalized`, otherwise the raw projected amplitudes.
    pub amplitudes: TwoQubitAmplitudes,
    /// Probability of finding exactly one atom at each of the two sites.
    pub p_project: f64,
    pub normalized: bool,
}

impl TwoQubitOutcome {
    /// Wraps an explicit two-qubit state (renormalized).
    pub fn from_amplitudes(amplitudes: TwoQubitAmplitudes) -> Result<Self> {
        let n = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0) {
            return Err(Error::InvalidState("zero two-qubit state".into()));
        }
        Ok(TwoQubitOutcome {
            site_a: 0,
            site_b: 0,
            amplitudes: amplitudes.map(|z| z / n),
            p_project: 1.0,
            normalized: true,
        })
    }

    fn require_normalized(&self) -> Result<()> {
        let n = self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if !self.normalized || (n - 1.0).abs() > NORMALIZED_TOL {
            return Err(Error::InvalidState(format!(
                "two-qubit outcome is not normalized (p_project = {:e})",
                self.p_project
            )));
        }
        Ok(())
    }
}

pub fn project_two_sites(state: &StateVector, site_a: usize, site_b: usize) -> Result<TwoQubitOutcome> {
    project_two_sites_with_floor(state, site_a, site_b, DEFAULT_PROJECTION_FLOOR)
}

pub fn project_two_sites_with_floor(
    state: &StateVector,
    site_a: usize,
    site_b: usize,
    floor: f64,
) -> Result<TwoQubitOutcome> {
    let basis = state.basis();
    if basis.n_particles() != 2 {
        return Err(Error::InvalidState("projection needs a two-atom state".into()));
    }
    let n = basis.n_sites();
    if site_a == site_b || site_a == 0 || site_b == 0 || site_a > n || site_b > n {
        return Err(Error::InvalidState(format!(
            "projection sites ({site_a}, {site_b}) must be distinct and inside 1..={n}"
        )));
    }
    let mut raw = [c(0.0, 0.0); 4];
    for (k, sa) in SpinLabel::ALL.iter().enumerate() {
        for (l, sb) in SpinLabel::ALL.iter().enumerate() {
            let cfg = FockConfig::from_atoms(n, &[(site_a, *sa), (site_b, *sb)])?;
            raw[2 * k + l] = state.amplitude(&cfg)?;
        }
    }
    let p: f64 = raw.iter().map(|z| z.norm_sqr()).sum();
    let usable = p >= floor && p > 0.0;
    let amplitudes = if usable {
        let s = p.sqrt();
        raw.map(|z| z / s)
    } else {
        raw
    };
    Ok(TwoQubitOutcome {
        site_a,
        site_b,
        amplitudes,
        p_project: p,
        normalized: usable,
    })
}

/// Pure-state concurrence `2 |a00 a11 - a01 a10|`.
pub fn concurrence(outcome: &TwoQubitOutcome) -> Result<f64> {
    outcome.require_normalized()?;
    let a = &outcome.amplitudes;
    Ok((2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Matrix2<Complex64> {
        match self {
            Pauli::I => Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
            Pauli::X => Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
            Pauli::Y => Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
            Pauli::Z => Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
        }
    }

    /// Local rotation `R` with `R Z R^dagger` equal to this Pauli:
    /// `h = (X + Z)/sqrt 2` for X and `exp(i pi/4 X)` for Y.
    pub fn pre_rotation(self) -> Matrix2<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Pauli::I | Pauli::Z => Pauli::I.matrix(),
            Pauli::X => (Pauli::X.matrix() + Pauli::Z.matrix()) * c(s, 0.0),
            Pauli::Y => Matrix2::new(c(s, 0.0), c(0.0, s), c(0.0, s), c(s, 0.0)),
        }
    }
}

pub fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// The witness operator as a 4x4 matrix, assembled from its definition.
pub fn witness_matrix() -> Matrix4<Complex64> {
    let (i, x, y, z) = (
        Pauli::I.matrix(),
        Pauli::X.matrix(),
        Pauli::Y.matrix(),
        Pauli::Z.matrix(),
    );
    (kron(&i, &i) - kron(&z, &y) - kron(&y, &z) - kron(&x, &x)) * c(0.5, 0.0)
}

/// Sorted eigenvalues of [`witness_matrix`].
pub fn witness_spectrum() -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(witness_matrix())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// One measurable term of the witness.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessTerm {
    pub label: &'static str,
    pub paulis: (Pauli, Pauli),
    pub weight: f64,
    /// `(R_a, R_b)` with `R Z R^dagger` the target Pauli on each qubit. The
    /// state is rotated by `R_a^dagger (x) R_b^dagger` and then read out in Z.
    pub pre_rotations: (Matrix2<Complex64>, Matrix2<Complex64>),
}

impl WitnessTerm {
    /// Observable actually measured: `(R_a Z R_a^dag) (x) (R_b Z R_b^dag)`,
    /// or the identity for the constant term.
    pub fn reconstructed(&self) -> Matrix4<Complex64> {
        if self.paulis == (Pauli::I, Pauli::I) {
            return Matrix4::identity();
        }
        let z = Pauli::Z.matrix();
        let (ra, rb) = &self.pre_rotations;
        let a = ra * z * ra.adjoint();
        let b = rb * z * rb.adjoint();
        kron(&a, &b)
    }
}

pub fn witness_settings() -> Vec<WitnessTerm> {
    let term = |label, pa: Pauli, pb: Pauli, weight| WitnessTerm {
        label,
        paulis: (pa, pb),
        weight,
        pre_rotations: (pa.pre_rotation(), pb.pre_rotation()),
    };
    vec![
        term("I", Pauli::I, Pauli::I, 0.5),
        term("ZY", Pauli::Z, Pauli::Y, -0.5),
        term("YZ", Pauli::Y, Pauli::Z, -0.5),
        term("XX", Pauli::X, Pauli::X, -0.5),
    ]
}

/// `sum_k weight_k * observable_k` over the measurement settings.
pub fn reconstruct_witness(terms: &[WitnessTerm]) -> Matrix4<Complex64> {
    terms
        .iter()
        .fold(Matrix4::zeros(), |acc, t| acc + t.reconstructed() * c(t.weight, 0.0))
}

fn as_vector(a: &TwoQubitAmplitudes) -> nalgebra::Vector4<Complex64> {
    nalgebra::Vector4::new(a[0], a[1], a[2], a[3])
}

/// `<psi| op |psi>` (real part).
pub fn expectation(op: &Matrix4<Complex64>, amps: &TwoQubitAmplitudes) -> f64 {
    let v = as_vector(amps);
    (v.adjoint() * op * v)[(0, 0)].re
}

pub fn witness_expectation(outcome: &TwoQubitOutcome) -> Result<f64> {
    outcome.require_normalized()?;
    Ok(expectation(&witness_matrix(), &outcome.amplitudes))
}

/// Applies `u (x) v` to a two-qubit state.
pub fn apply_local(
    u: &Matrix2<Complex64>,
    v: &Matrix2<Complex64>,
    amps: &TwoQubitAmplitudes,
) -> TwoQubitAmplitudes {
    let out = kron(u, v) * as_vector(amps);
    [out[0], out[1], out[2], out[3]]
}

/// Finite-shot estimate of the witness: each non-trivial term is measured
/// `shots` times in the Z basis after its pre-rotation.
pub fn sample_witness<R: Rng>(outcome: &TwoQubitOutcome, shots: usize, rng: &mut R) -> Result<f64> {
    outcome.require_normalized()?;
    if shots == 0 {
        return Err(Error::Config("shot count must be positive".into()));
    }
    let mut total = 0.0;
    for term in witness_settings() {
        if term.paulis == (Pauli::I, Pauli::I) {
            total += term.weight;
            continue;
        }
        let (ra, rb) = &term.pre_rotations;
        let rotated = apply_local(&ra.adjoint(), &rb.adjoint(), &outcome.amplitudes);
        let probs: Vec<f64> = rotated.iter().map(|z| z.norm_sqr()).collect();
        let parity = [1.0, -1.0, -1.0, 1.0];
        let mut sum = 0.0;
        for _ in 0..shots {
            let r: f64 = rng.gen::<f64>() * probs.iter().sum::<f64>();
            let mut acc = 0.0;
            let mut k = 3;
            for (idx, p) in probs.iter().enumerate() {
                acc += p;
                if r < acc {
                    k = idx;
                    break;
                }
            }
            sum += parity[k];
        }
        total += term.weight * sum / shots as f64;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::FockBasis;
    use crate::state::{spin_down, spin_up};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn ideal_output() -> TwoQubitAmplitudes {
        [c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(0.5, 0.0)]
    }

    fn bell() -> TwoQubitAmplitudes {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]
    }

    fn random_qubit<R: Rng>(rng: &mut R) -> [Complex64; 2] {
        let v: Vec<Complex64> = (0..2)
            .map(|_| {
                let (a, b): (f64, f64) = (rng.gen(), rng.gen());
                // Box-Muller pairs give Haar-random directions after normalization
                let r = (-2.0 * (1.0 - a).ln()).sqrt();
                c(r * (2.0 * std::f64::consts::PI * b).cos(), r * (2.0 * std::f64::consts::PI * b).sin())
            })
            .collect();
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    }

    fn random_unitary<R: Rng>(rng: &mut R) -> Matrix2<Complex64> {
        let a = random_qubit(rng);
        let phase = Complex64::from_polar(1.0, rng.gen::<f64>() * 6.0);
        Matrix2::new(a[0], -a[1].conj() * phase, a[1], a[0].conj() * phase)
    }

    #[test]
    fn occupation_of_localized_atom() {
        let b = Arc::new(FockBasis::enumerate(5, 1).unwrap());
        let s = StateVector::single_atom(b, 1, spin_up()).unwrap();
        let occ = occupation_profile(&s);
        assert_eq!(occ.totals(), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(occ.up[0], 1.0);
        assert_eq!(occ.particle_number(), 1.0);
    }

    #[test]
    fn projection_of_localized_product() {
        let b = Arc::new(FockBasis::enumerate(6, 2).unwrap());
        let s = StateVector::two_atom_product(b.clone(), 1, spin_up(), 6, spin_down()).unwrap();
        let o = project_two_sites(&s, 1, 6).unwrap();
        assert!((o.p_project - 1.0).abs() < 1e-15);
        assert!(o.normalized);
        assert_eq!(o.amplitudes[1], c(1.0, 0.0));
        assert_eq!(occupation_profile(&s).particle_number(), 2.0);

        let cfg = FockConfig::from_atoms(6, &[(3, SpinLabel::Up), (3, SpinLabel::Down)]).unwrap();
        let d = StateVector::basis_state(b, &cfg).unwrap();
        let o = project_two_sites(&d, 1, 6).unwrap();
        assert_eq!(o.p_project, 0.0);
        assert!(!o.normalized);
        assert!(concurrence(&o).is_err());
        assert!(witness_expectation(&o).is_err());
        assert!(project_two_sites(&d, 2, 2).is_err());
    }

    #[test]
    fn concurrence_examples() {
        let o = TwoQubitOutcome::from_amplitudes(bell()).unwrap();
        assert!((concurrence(&o).unwrap() - 1.0).abs() < 1e-15);
        let plus = TwoQubitOutcome::from_amplitudes([c(0.5, 0.0); 4]).unwrap();
        assert!(concurrence(&plus).unwrap().abs() < 1e-15);
        let ideal = TwoQubitOutcome::from_amplitudes(ideal_output()).unwrap();
        assert!((concurrence(&ideal).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn witness_examples() {
        let ideal = TwoQubitOutcome::from_amplitudes(ideal_output()).unwrap();
        assert!((witness_expectation(&ideal).unwrap() + 1.0).abs() < 1e-15);
        let b = TwoQubitOutcome::from_amplitudes(bell()).unwrap();
        assert!(witness_expectation(&b).unwrap().abs() < 1e-15);
    }

    #[test]
    fn witness_nonnegative_on_product_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let a = random_qubit(&mut rng);
            let b = random_qubit(&mut rng);
            let amps = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
            let o = TwoQubitOutcome::from_amplitudes(amps).unwrap();
            assert!(witness_expectation(&o).unwrap() >= -1e-12);
            assert!(concurrence(&o).unwrap() < 1e-7);
        }
    }

    #[test]
    fn negative_witness_implies_entanglement() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5000 {
            let v: Vec<Complex64> = (0..4).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            let o = TwoQubitOutcome::from_amplitudes([v[0], v[1], v[2], v[3]]).unwrap();
            let w = witness_expectation(&o).unwrap();
            if w < -1e-9 {
                assert!(concurrence(&o).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn concurrence_is_local_unitary_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let v: Vec<Complex64> = (0..4).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            let o = TwoQubitOutcome::from_amplitudes([v[0], v[1], v[2], v[3]]).unwrap();
            let u = random_unitary(&mut rng);
            let w = random_unitary(&mut rng);
            let moved = TwoQubitOutcome::from_amplitudes(apply_local(&u, &w, &o.amplitudes)).unwrap();
            assert!((concurrence(&o).unwrap() - concurrence(&moved).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn rotations_reduce_paulis_to_z() {
        let z = Pauli::Z.matrix();
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let r = p.pre_rotation();
            let got = r * z * r.adjoint();
            assert!((got - p.matrix()).norm() < 1e-15, "{p:?}");
            assert!((r * r.adjoint() - Matrix2::identity()).norm() < 1e-15);
        }
        let h = Pauli::X.pre_rotation();
        assert!((h * z * h - Pauli::X.matrix()).norm() < 1e-15);
    }

    #[test]
    fn settings_rebuild_the_witness() {
        let terms = witness_settings();
        assert_eq!(terms.len(), 4);
        let xx = terms.iter().find(|t| t.label == "XX").unwrap();
        assert_eq!(xx.pre_rotations.0, Pauli::X.pre_rotation());
        assert_eq!(xx.pre_rotations.1, Pauli::X.pre_rotation());
        let zy = terms.iter().find(|t| t.label == "ZY").unwrap();
        assert_eq!(zy.pre_rotations.0, Matrix2::identity());
        let diff = (reconstruct_witness(&terms) - witness_matrix()).norm();
        assert!(diff < 1e-15, "{diff}");
        let weight: f64 = terms.iter().map(|t| t.weight).sum();
        assert_eq!(weight, -1.0);
    }

    #[test]
    fn witness_spectrum_is_minus_one_then_ones() {
        let ev = witness_spectrum();
        let expected = [-1.0, 1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn sampled_witness_converges() {
        let ideal = TwoQubitOutcome::from_amplitudes(ideal_output()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        // eigenstate of every term: sampling is exact
        assert_eq!(sample_witness(&ideal, 100, &mut rng).unwrap(), -1.0);
        let plus = TwoQubitOutcome::from_amplitudes([c(0.5, 0.0); 4]).unwrap();
        let exact = witness_expectation(&plus).unwrap();
        let est = sample_witness(&plus, 20_000, &mut rng).unwrap();
        assert!((est - exact).abs() < 0.03, "{est} vs {exact}");
        assert!(sample_witness(&plus, 0, &mut rng).is_err());
    }
}
