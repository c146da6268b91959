//! Two-component Bose-Hubbard Hamiltonian on a superlattice chain.
//!
//! ```text
//! H = - sum_{i,sigma} J_i (a+_{i,s} a_{i+1,s} + h.c.)
//!     + U/2 sum_{i,s} n_{i,s}(n_{i,s} - 1)
//!     + U/2 sum_i n_{i,up} n_{i,down}
//!     + tilt sum_i i (n_{i,up} + n_{i,down})
//! ```
//!
//! Link `i` joins sites `i` and `i+1` (1-based). Odd links carry `j_odd` and
//! even links carry `j_even`. Note the opposite-spin term carries `U/2`, not
//! `U`; the closed-form double-well amplitudes in [`crate::analytic`] depend
//! on it.
//!
//! All matrix elements are real, so the operator is stored as a real
//! symmetric CSR matrix and applied to complex vectors.

use std::io::Write;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{mode_site_spin, FockBasis, ModeSet};
use crate::error::{Error, Result};

/// Coupling values for one instant of the protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingProfile {
    pub j_odd: f64,
    pub j_even: f64,
    pub u: f64,
    pub tilt_slope: f64,
}

impl CouplingProfile {
    pub fn new(j_odd: f64, j_even: f64, u: f64) -> Result<Self> {
        let p = CouplingProfile {
            j_odd,
            j_even,
            u,
            tilt_slope: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Odd links at `j`, even links off (lattice phase 0).
    pub fn odd_active(j: f64, u: f64) -> Self {
        CouplingProfile {
            j_odd: j,
            j_even: 0.0,
            u,
            tilt_slope: 0.0,
        }
    }

    /// Even links at `j`, odd links off (lattice phase pi/2).
    pub fn even_active(j: f64, u: f64) -> Self {
        CouplingProfile {
            j_odd: 0.0,
            j_even: j,
            u,
            tilt_slope: 0.0,
        }
    }

    /// Profile activating the family that link `link` belongs to.
    pub fn for_link(link: usize, j: f64, u: f64) -> Self {
        if link % 2 == 1 {
            Self::odd_active(j, u)
        } else {
            Self::even_active(j, u)
        }
    }

    pub fn with_tilt(mut self, tilt_slope: f64) -> Self {
        self.tilt_slope = tilt_slope;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.j_odd, self.j_even, self.u, self.tilt_slope]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidProfile(format!("non-finite value in {self:?}")));
        }
        if self.j_odd < 0.0 || self.j_even < 0.0 {
            return Err(Error::InvalidProfile(format!(
                "couplings must be non-negative: {self:?}"
            )));
        }
        if self.u < 0.0 {
            return Err(Error::InvalidProfile(format!(
                "onsite energy must be non-negative: {self:?}"
            )));
        }
        Ok(())
    }

    /// Coupling carried by link `link` (joins sites `link` and `link + 1`).
    pub fn link_coupling(&self, link: usize) -> f64 {
        if link % 2 == 1 {
            self.j_odd
        } else {
            self.j_even
        }
    }

    /// Pointwise `(1 - fraction) * self + fraction * other`.
    pub fn lerp(&self, other: &CouplingProfile, fraction: f64) -> CouplingProfile {
        let mix = |a: f64, b: f64| {
            if fraction == 0.0 {
                a
            } else if fraction == 1.0 {
                b
            } else {
                (1.0 - fraction) * a + fraction * b
            }
        };
        CouplingProfile {
            j_odd: mix(self.j_odd, other.j_odd),
            j_even: mix(self.j_even, other.j_even),
            u: mix(self.u, other.u),
            tilt_slope: mix(self.tilt_slope, other.tilt_slope),
        }
    }

    /// Largest componentwise difference.
    pub fn distance(&self, other: &CouplingProfile) -> f64 {
        [
            self.j_odd - other.j_odd,
            self.j_even - other.j_even,
            self.u - other.u,
            self.tilt_slope - other.tilt_slope,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Sparse Hermitian Hamiltonian over a fixed-number Fock basis.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    basis: Arc<FockBasis>,
    profile: CouplingProfile,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    /// Upper bound on the spectral radius.
    norm: f64,
}

fn row_sum_bound(row_ptr: &[usize], vals: &[f64]) -> f64 {
    row_ptr
        .windows(2)
        .map(|w| vals[w[0]..w[1]].iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Union of two sparsity patterns with each operand's values on it.
fn merge_patterns(
    h_a: &SparseHamiltonian,
    h_b: &SparseHamiltonian,
) -> (Vec<usize>, Vec<u32>, Vec<f64>, Vec<f64>) {
    let dim = h_a.dim();
    let cap = h_a.nnz().max(h_b.nnz());
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::with_capacity(cap);
    let mut va = Vec::with_capacity(cap);
    let mut vb = Vec::with_capacity(cap);
    row_ptr.push(0);
    for r in 0..dim {
        let (mut i, ie) = (h_a.row_ptr[r], h_a.row_ptr[r + 1]);
        let (mut k, ke) = (h_b.row_ptr[r], h_b.row_ptr[r + 1]);
        while i < ie || k < ke {
            let ca = if i < ie { h_a.cols[i] } else { u32::MAX };
            let cb = if k < ke { h_b.cols[k] } else { u32::MAX };
            if ca == cb {
                cols.push(ca);
                va.push(h_a.vals[i]);
                vb.push(h_b.vals[k]);
                i += 1;
                k += 1;
            } else if ca < cb {
                cols.push(ca);
                va.push(h_a.vals[i]);
                vb.push(0.0);
                i += 1;
            } else {
                cols.push(cb);
                va.push(0.0);
                vb.push(h_b.vals[k]);
                k += 1;
            }
        }
        row_ptr.push(cols.len());
    }
    (row_ptr, cols, va, vb)
}

/// Both ends of a linear ramp on one shared pattern; [`RampPair::at`]
/// rewrites the values in place, so sampling a ramp allocates nothing.
pub(crate) struct RampPair {
    current: SparseHamiltonian,
    start: Vec<f64>,
    end: Vec<f64>,
    profiles: (CouplingProfile, CouplingProfile),
    norms: (f64, f64),
}

impl RampPair {
    pub(crate) fn new(h_a: &SparseHamiltonian, h_b: &SparseHamiltonian) -> Result<Self> {
        h_a.check_basis(&h_b.basis)?;
        let (row_ptr, cols, start, end) = merge_patterns(h_a, h_b);
        Ok(RampPair {
            current: SparseHamiltonian {
                basis: Arc::clone(&h_a.basis),
                profile: h_a.profile,
                row_ptr,
                cols,
                vals: start.clone(),
                norm: h_a.norm,
            },
            start,
            end,
            profiles: (h_a.profile, h_b.profile),
            norms: (h_a.norm, h_b.norm),
        })
    }

    /// The Hamiltonian at ramp fraction `f` in `[0, 1]`.
    pub(crate) fn at(&mut self, f: f64) -> &SparseHamiltonian {
        let (wa, wb) = (1.0 - f, f);
        for ((v, a), b) in self.current.vals.iter_mut().zip(&self.start).zip(&self.end) {
            *v = wa * a + wb * b;
        }
        self.current.profile = self.profiles.0.lerp(&self.profiles.1, f);
        // triangle inequality; exact norms are not needed here
        self.current.norm = wa * self.norms.0 + wb * self.norms.1;
        &self.current
    }
}

fn diagonal_energy(set: &ModeSet, profile: &CouplingProfile) -> f64 {
    let modes = set.as_slice();
    let mut e = 0.0;
    for &m in modes {
        let (site, _) = mode_site_spin(m as usize);
        e += profile.tilt_slope * site as f64;
    }
    if modes.len() == 2 {
        let (a, b) = (modes[0] as usize, modes[1] as usize);
        if a == b {
            // n = 2 in one mode: U/2 * n(n-1) = U
            e += profile.u;
        } else if a / 2 == b / 2 {
            // one up and one down on the same site: U/2 * n_up * n_down
            e += 0.5 * profile.u;
        }
    }
    e
}

impl SparseHamiltonian {
    /// Assembles the Hamiltonian for `profile` on `basis`.
    pub fn build(basis: Arc<FockBasis>, profile: CouplingProfile) -> Result<Self> {
        profile.validate()?;
        let dim = basis.dim();
        let n_sites = basis.n_sites();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(dim * 5);
        let mut vals = Vec::with_capacity(dim * 5);
        let mut row: Vec<(u32, f64)> = Vec::with_capacity(16);
        row_ptr.push(0);

        for r in 0..dim {
            row.clear();
            let set = *basis.mode_set(r);
            let diag = diagonal_energy(&set, &profile);
            if diag != 0.0 {
                row.push((r as u32, diag));
            }
            let modes = set.as_slice();
            for (k, &m) in modes.iter().enumerate() {
                // a particle from a multiply occupied mode is the same move twice
                if k > 0 && modes[k - 1] == m {
                    continue;
                }
                let m = m as usize;
                let n_from = modes.iter().filter(|&&x| x as usize == m).count() as f64;
                let (site, _) = mode_site_spin(m);
                let moves = [(site.wrapping_sub(1), site.wrapping_sub(1)), (site + 1, site)];
                for (target_site, link) in moves {
                    if target_site == 0 || target_site > n_sites {
                        continue;
                    }
                    let j = profile.link_coupling(link);
                    if j == 0.0 {
                        continue;
                    }
                    let target_mode = if target_site > site { m + 2 } else { m - 2 };
                    let new_set = match modes.len() {
                        1 => ModeSet::single(target_mode),
                        _ => {
                            let other = if k == 0 { modes[1] } else { modes[0] } as usize;
                            ModeSet::pair(target_mode, other)
                        }
                    };
                    let n_to = modes.iter().filter(|&&x| x as usize == target_mode).count() as f64;
                    let amp = -j * (n_from * (n_to + 1.0)).sqrt();
                    row.push((basis.index_of_modes(&new_set) as u32, amp));
                }
            }
            row.sort_by_key(|&(c, _)| c);
            let mut last: Option<u32> = None;
            for &(c, v) in row.iter() {
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }

        let norm = row_sum_bound(&row_ptr, &vals);
        Ok(SparseHamiltonian {
            basis,
            profile,
            row_ptr,
            cols,
            vals,
            norm,
        })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn profile(&self) -> &CouplingProfile {
        &self.profile
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub(crate) fn check_basis(&self, other: &FockBasis) -> Result<()> {
        if *self.basis != *other {
            return Err(Error::BasisMismatch {
                expected: self.basis.describe(),
                got: other.describe(),
            });
        }
        Ok(())
    }

    /// Entry `(r, c)`, zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
        match self.cols[lo..hi].binary_search(&(c as u32)) {
            Ok(k) => self.vals[lo + k],
            Err(_) => 0.0,
        }
    }

    /// Stored entries of row `r` as `(column, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.cols[lo..hi]
            .iter()
            .zip(&self.vals[lo..hi])
            .map(|(&c, &v)| (c as usize, v))
    }

    /// `out = H x` on raw amplitude slices.
    pub(crate) fn matvec_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in lo..hi {
                acc += x[self.cols[k] as usize] * self.vals[k];
            }
            *o = acc;
        }
    }

    /// Exact sparse matrix-vector product on raw amplitudes.
    pub fn apply_slice(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim() {
            return Err(Error::BasisMismatch {
                expected: self.basis.describe(),
                got: format!("vector of length {}", x.len()),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); x.len()];
        self.matvec_into(x, &mut out);
        Ok(out)
    }

    /// `<x|H|x>`.
    pub fn expectation_slice(&self, x: &[Complex64]) -> Result<Complex64> {
        let hx = self.apply_slice(x)?;
        Ok(x.iter().zip(&hx).map(|(a, b)| a.conj() * b).sum())
    }

    /// Entrywise `(1 - fraction) h_a + fraction h_b` over the union pattern.
    pub fn interpolate(
        h_a: &SparseHamiltonian,
        h_b: &SparseHamiltonian,
        fraction: f64,
    ) -> Result<SparseHamiltonian> {
        h_a.check_basis(&h_b.basis)?;
        if !(0.0..=1.0).contains(&fraction) || fraction.is_nan() {
            return Err(Error::InvalidProfile(format!(
                "interpolation fraction {fraction} outside [0, 1]"
            )));
        }
        if fraction == 0.0 {
            return Ok(h_a.clone());
        }
        if fraction == 1.0 {
            return Ok(h_b.clone());
        }
        let (row_ptr, cols, va, vb) = merge_patterns(h_a, h_b);
        let vals: Vec<f64> = va
            .iter()
            .zip(&vb)
            .map(|(a, b)| (1.0 - fraction) * a + fraction * b)
            .collect();
        let norm = row_sum_bound(&row_ptr, &vals);
        Ok(SparseHamiltonian {
            basis: Arc::clone(&h_a.basis),
            profile: h_a.profile.lerp(&h_b.profile, fraction),
            row_ptr,
            cols,
            vals,
            norm,
        })
    }

    /// Largest `|H_rc - conj(H_cr)|` over stored entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim() {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    /// Max absolute row sum; bounds the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.norm
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Coordinate-format dump, one `row col re im` line per stored entry.
    pub fn write_coo<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in 0..self.dim() {
            for (c, v) in self.row(r) {
                writeln!(w, "{r} {c} {v:.17e} {:.17e}", 0.0)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{FockConfig, SpinLabel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn basis(n: usize, p: usize) -> Arc<FockBasis> {
        Arc::new(FockBasis::enumerate(n, p).unwrap())
    }

    fn idx(b: &FockBasis, atoms: &[(usize, SpinLabel)]) -> usize {
        b.index_of(&FockConfig::from_atoms(b.n_sites(), atoms).unwrap())
            .unwrap()
    }

    use SpinLabel::{Down, Up};

    #[test]
    fn single_atom_double_well() {
        let b = basis(2, 1);
        let h = SparseHamiltonian::build(b.clone(), CouplingProfile::odd_active(1.3, 7.0)).unwrap();
        for spin in [Up, Down] {
            let l = idx(&b, &[(1, spin)]);
            let r = idx(&b, &[(2, spin)]);
            assert_eq!(h.get(l, l), 0.0);
            assert_eq!(h.get(r, r), 0.0);
            assert_eq!(h.get(l, r), -1.3);
            assert_eq!(h.get(r, l), -1.3);
        }
        // no spin flips
        assert_eq!(h.get(idx(&b, &[(1, Up)]), idx(&b, &[(2, Down)])), 0.0);
    }

    #[test]
    fn same_spin_sector_matches_hand_matrix() {
        let b = basis(2, 2);
        let (j, u) = (1.0, 25.0);
        let h = SparseHamiltonian::build(b.clone(), CouplingProfile::odd_active(j, u)).unwrap();
        let s = [
            idx(&b, &[(1, Up), (2, Up)]),
            idx(&b, &[(1, Up), (1, Up)]),
            idx(&b, &[(2, Up), (2, Up)]),
        ];
        let r2 = 2f64.sqrt();
        let expected = [
            [0.0, -r2 * j, -r2 * j],
            [-r2 * j, u, 0.0],
            [-r2 * j, 0.0, u],
        ];
        for (a, row) in expected.iter().enumerate() {
            for (c, &e) in row.iter().enumerate() {
                assert!((h.get(s[a], s[c]) - e).abs() < 1e-15, "({a},{c})");
            }
        }
    }

    #[test]
    fn opposite_spin_double_occupancy_costs_half_u() {
        let b = basis(2, 2);
        let h = SparseHamiltonian::build(b.clone(), CouplingProfile::odd_active(1.0, 25.0)).unwrap();
        let d = idx(&b, &[(1, Up), (1, Down)]);
        assert_eq!(h.get(d, d), 12.5);
        let s = idx(&b, &[(1, Up), (2, Down)]);
        assert_eq!(h.get(s, d), -1.0);
    }

    #[test]
    fn tilt_adds_site_weighted_energy() {
        let b = basis(3, 2);
        let p = CouplingProfile::odd_active(1.0, 0.0).with_tilt(0.5);
        let h = SparseHamiltonian::build(b.clone(), p).unwrap();
        let i = idx(&b, &[(1, Up), (3, Down)]);
        assert!((h.get(i, i) - 0.5 * 4.0).abs() < 1e-15);
    }

    #[test]
    fn assembly_is_hermitian() {
        for (n, p) in [(2, 1), (5, 1), (4, 2), (7, 2)] {
            let h = SparseHamiltonian::build(
                basis(n, p),
                CouplingProfile::new(0.7, 0.3, 4.0).unwrap(),
            )
            .unwrap();
            assert!(h.hermiticity_defect() < 1e-14);
        }
    }

    #[test]
    fn hopping_entries_are_nonpositive() {
        let h = SparseHamiltonian::build(basis(5, 2), CouplingProfile::new(1.0, 0.4, 3.0).unwrap())
            .unwrap();
        for r in 0..h.dim() {
            for (c, v) in h.row(r) {
                if c != r {
                    assert!(v < 0.0);
                }
            }
        }
    }

    #[test]
    fn eigenvector_of_double_well() {
        let b = basis(2, 1);
        let h = SparseHamiltonian::build(b.clone(), CouplingProfile::odd_active(1.0, 0.0)).unwrap();
        let l = idx(&b, &[(1, Up)]);
        let r = idx(&b, &[(2, Up)]);
        let s = 0.5f64.sqrt();
        let mut v = vec![Complex64::new(0.0, 0.0); 4];
        v[l] = Complex64::new(s, 0.0);
        v[r] = Complex64::new(s, 0.0);
        let hv = h.apply_slice(&v).unwrap();
        for k in 0..4 {
            assert!((hv[k] - v[k] * -1.0).norm() < 1e-15);
        }
        v[r] = Complex64::new(-s, 0.0);
        let hv = h.apply_slice(&v).unwrap();
        for k in 0..4 {
            assert!((hv[k] - v[k]).norm() < 1e-15);
        }
        let zero = vec![Complex64::new(0.0, 0.0); 4];
        assert!(h.apply_slice(&zero).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn expectation_is_real_for_random_states() {
        let h = SparseHamiltonian::build(basis(6, 2), CouplingProfile::new(1.0, 0.5, 25.0).unwrap())
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let mut v: Vec<Complex64> = (0..h.dim())
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= n);
            let e = h.expectation_slice(&v).unwrap();
            assert!(e.im.abs() < 1e-13 * e.re.abs().max(1.0));
        }
    }

    #[test]
    fn apply_rejects_wrong_length() {
        let h = SparseHamiltonian::build(basis(3, 1), CouplingProfile::odd_active(1.0, 0.0)).unwrap();
        assert!(h.apply_slice(&[Complex64::new(1.0, 0.0); 5]).is_err());
    }

    #[test]
    fn interpolation_endpoints_and_midpoint() {
        let b = basis(4, 2);
        let ha = SparseHamiltonian::build(b.clone(), CouplingProfile::odd_active(1.0, 25.0)).unwrap();
        let hb = SparseHamiltonian::build(b.clone(), CouplingProfile::even_active(1.0, 25.0)).unwrap();
        let h0 = SparseHamiltonian::interpolate(&ha, &hb, 0.0).unwrap();
        let h1 = SparseHamiltonian::interpolate(&ha, &hb, 1.0).unwrap();
        assert_eq!(h0.to_dense(), ha.to_dense());
        assert_eq!(h1.to_dense(), hb.to_dense());
        let hm = SparseHamiltonian::interpolate(&ha, &hb, 0.5).unwrap();
        let b1 = basis(4, 1);
        let hm1 = SparseHamiltonian::interpolate(
            &SparseHamiltonian::build(b1.clone(), CouplingProfile::odd_active(1.0, 0.0)).unwrap(),
            &SparseHamiltonian::build(b1.clone(), CouplingProfile::even_active(1.0, 0.0)).unwrap(),
            0.5,
        )
        .unwrap();
        for site in 1..4 {
            let a = idx(&b1, &[(site, Up)]);
            let c = idx(&b1, &[(site + 1, Up)]);
            assert_eq!(hm1.get(a, c), -0.5);
        }
        assert_eq!(hm.profile().j_odd, 0.5);
        assert_eq!(hm.profile().j_even, 0.5);
    }

    #[test]
    fn interpolation_equals_build_of_interpolated_profile() {
        let b = basis(5, 2);
        let pa = CouplingProfile::new(1.0, 0.1, 25.0).unwrap();
        let pb = CouplingProfile::new(0.2, 0.9, 25.0).unwrap();
        let ha = SparseHamiltonian::build(b.clone(), pa).unwrap();
        let hb = SparseHamiltonian::build(b.clone(), pb).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let f: f64 = rng.gen();
            let hi = SparseHamiltonian::interpolate(&ha, &hb, f).unwrap();
            let hd = SparseHamiltonian::build(b.clone(), pa.lerp(&pb, f)).unwrap();
            let diff = (hi.to_dense() - hd.to_dense()).abs().max();
            assert!(diff < 1e-14, "fraction {f}: {diff}");
        }
    }

    #[test]
    fn interpolation_rejects_mismatch() {
        let ha = SparseHamiltonian::build(basis(4, 2), CouplingProfile::odd_active(1.0, 1.0)).unwrap();
        let hb = SparseHamiltonian::build(basis(5, 2), CouplingProfile::odd_active(1.0, 1.0)).unwrap();
        assert!(matches!(
            SparseHamiltonian::interpolate(&ha, &hb, 0.3),
            Err(Error::BasisMismatch { .. })
        ));
        assert!(SparseHamiltonian::interpolate(&ha, &ha, 1.5).is_err());
    }

    /// Union-find over the sparsity pattern.
    fn components(h: &SparseHamiltonian) -> Vec<usize> {
        let n = h.dim();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for r in 0..n {
            for (c, _) in h.row(r) {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                parent[a] = b;
            }
        }
        (0..n).map(|x| find(&mut parent, x)).collect()
    }

    #[test]
    fn decoupled_double_wells() {
        let b = basis(8, 1);
        let h = SparseHamiltonian::build(b.clone(), CouplingProfile::odd_active(1.0, 0.0)).unwrap();
        let comp = components(&h);
        let mut distinct = comp.clone();
        distinct.sort();
        distinct.dedup();
        // 4 double wells x 2 spins
        assert_eq!(distinct.len(), 8);
        for spin in [Up, Down] {
            for well in 0..4 {
                let a = idx(&b, &[(2 * well + 1, spin)]);
                let c = idx(&b, &[(2 * well + 2, spin)]);
                assert_eq!(comp[a], comp[c]);
            }
        }
        let h = SparseHamiltonian::build(b.clone(), CouplingProfile::even_active(1.0, 0.0)).unwrap();
        let comp = components(&h);
        // ends are isolated: sites 1 and 8
        assert_ne!(comp[idx(&b, &[(1, Up)])], comp[idx(&b, &[(2, Up)])]);
        assert_eq!(comp[idx(&b, &[(2, Up)])], comp[idx(&b, &[(3, Up)])]);
    }

    #[test]
    fn coo_dump_lists_every_entry() {
        let h = SparseHamiltonian::build(basis(2, 1), CouplingProfile::odd_active(1.0, 0.0)).unwrap();
        let mut buf = Vec::new();
        h.write_coo(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), h.nnz());
        let first: Vec<&str> = text.lines().next().unwrap().split_whitespace().collect();
        assert_eq!(first.len(), 4);
    }

    #[test]
    fn rejects_negative_couplings() {
        assert!(CouplingProfile::new(-1.0, 0.0, 1.0).is_err());
        assert!(CouplingProfile::new(1.0, 0.0, -1.0).is_err());
        assert!(CouplingProfile::new(f64::NAN, 0.0, 1.0).is_err());
    }
}
