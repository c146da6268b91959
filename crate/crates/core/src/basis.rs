//! Occupation-number basis for one or two spinful bosons on an open chain.
//!
//! Sites are numbered `1..=N`. Each site carries two modes, one per spin, and
//! modes are flattened site-major, spin-minor: mode `2(i-1)` is `(i, up)` and
//! mode `2(i-1)+1` is `(i, down)`.
//!
//! Configurations are ordered lexicographically by their flattened occupation
//! tuple, largest tuple first. The first configuration therefore puts every
//! atom into mode `(1, up)`. For two atoms this is the same as listing the
//! sorted mode pairs `(m1 <= m2)` in ascending order, which lets `index_of`
//! be computed arithmetically.

use std::fmt;

use crate::error::{Error, Result};

/// Internal spin state of an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinLabel {
    Up,
    Down,
}

impl SpinLabel {
    pub const ALL: [SpinLabel; 2] = [SpinLabel::Up, SpinLabel::Down];

    pub fn offset(self) -> usize {
        match self {
            SpinLabel::Up => 0,
            SpinLabel::Down => 1,
        }
    }

    pub fn flipped(self) -> SpinLabel {
        match self {
            SpinLabel::Up => SpinLabel::Down,
            SpinLabel::Down => SpinLabel::Up,
        }
    }
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpinLabel::Up => write!(f, "up"),
            SpinLabel::Down => write!(f, "down"),
        }
    }
}

/// Flattened mode index of `(site, spin)`, sites 1-based.
pub fn mode_index(site: usize, spin: SpinLabel) -> usize {
    2 * (site - 1) + spin.offset()
}

/// Inverse of [`mode_index`].
pub fn mode_site_spin(mode: usize) -> (usize, SpinLabel) {
    let spin = if mode % 2 == 0 {
        SpinLabel::Up
    } else {
        SpinLabel::Down
    };
    (mode / 2 + 1, spin)
}

/// A Fock configuration: occupation count per `(site, spin)` mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockConfig {
    n_sites: usize,
    occupations: Vec<u8>,
}

impl FockConfig {
    /// Builds a configuration from a flattened occupation tuple of length `2N`.
    pub fn from_occupations(n_sites: usize, occupations: Vec<u8>) -> Result<Self> {
        if occupations.len() != 2 * n_sites {
            return Err(Error::InvalidBasis(format!(
                "expected {} occupation entries for {} sites, got {}",
                2 * n_sites,
                n_sites,
                occupations.len()
            )));
        }
        Ok(FockConfig {
            n_sites,
            occupations,
        })
    }

    /// Builds a configuration holding one atom per listed `(site, spin)`.
    pub fn from_atoms(n_sites: usize, atoms: &[(usize, SpinLabel)]) -> Result<Self> {
        let mut occupations = vec![0u8; 2 * n_sites];
        for &(site, spin) in atoms {
            if site == 0 || site > n_sites {
                return Err(Error::InvalidBasis(format!(
                    "site {site} outside chain 1..={n_sites}"
                )));
            }
            occupations[mode_index(site, spin)] += 1;
        }
        Ok(FockConfig {
            n_sites,
            occupations,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn occupations(&self) -> &[u8] {
        &self.occupations
    }

    pub fn occupation(&self, site: usize, spin: SpinLabel) -> u8 {
        self.occupations[mode_index(site, spin)]
    }

    pub fn site_occupation(&self, site: usize) -> u8 {
        self.occupation(site, SpinLabel::Up) + self.occupation(site, SpinLabel::Down)
    }

    pub fn n_particles(&self) -> usize {
        self.occupations.iter().map(|&n| n as usize).sum()
    }

    /// Occupied modes with multiplicity, ascending.
    pub fn modes(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(2);
        for (m, &n) in self.occupations.iter().enumerate() {
            for _ in 0..n {
                out.push(m);
            }
        }
        out
    }
}

impl fmt::Display for FockConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for site in 1..=self.n_sites {
            if site > 1 {
                write!(f, ",")?;
            }
            let up = self.occupation(site, SpinLabel::Up);
            let down = self.occupation(site, SpinLabel::Down);
            if up == 0 && down == 0 {
                write!(f, "0")?;
            }
            for _ in 0..up {
                write!(f, "u")?;
            }
            for _ in 0..down {
                write!(f, "d")?;
            }
        }
        write!(f, ">")
    }
}

/// Compact representation of a basis state: ascending occupied modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct ModeSet {
    modes: [u32; 2],
    len: u8,
}

impl ModeSet {
    pub(crate) fn single(m: usize) -> Self {
        ModeSet {
            modes: [m as u32, 0],
            len: 1,
        }
    }

    pub(crate) fn pair(a: usize, b: usize) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        ModeSet {
            modes: [a as u32, b as u32],
            len: 2,
        }
    }

    pub(crate) fn as_slice(&self) -> &[u32] {
        &self.modes[..self.len as usize]
    }
}

/// Ordered basis of all configurations with a fixed number of atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    n_sites: usize,
    n_particles: usize,
    configs: Vec<ModeSet>,
}

/// Number of two-atom configurations over `n_modes` modes before mode `a`
/// becomes the lowest occupied one.
fn pair_offset(n_modes: usize, a: usize) -> usize {
    a * n_modes - a * a.saturating_sub(1) / 2
}

impl FockBasis {
    /// Enumerates the basis for `n_particles` atoms (1 or 2) on `n_sites >= 2` sites.
    pub fn enumerate(n_sites: usize, n_particles: usize) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidBasis(format!(
                "need at least 2 sites, got {n_sites}"
            )));
        }
        if !(1..=2).contains(&n_particles) {
            return Err(Error::InvalidBasis(format!(
                "particle number must be 1 or 2, got {n_particles}"
            )));
        }
        let n_modes = 2 * n_sites;
        let configs = match n_particles {
            1 => (0..n_modes).map(ModeSet::single).collect(),
            _ => {
                let mut v = Vec::with_capacity(n_modes * (n_modes + 1) / 2);
                for a in 0..n_modes {
                    for b in a..n_modes {
                        v.push(ModeSet::pair(a, b));
                    }
                }
                v
            }
        };
        Ok(FockBasis {
            n_sites,
            n_particles,
            configs,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn n_modes(&self) -> usize {
        2 * self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub(crate) fn mode_set(&self, ordinal: usize) -> &ModeSet {
        &self.configs[ordinal]
    }

    pub(crate) fn index_of_modes(&self, modes: &ModeSet) -> usize {
        let s = modes.as_slice();
        match s.len() {
            1 => s[0] as usize,
            _ => {
                let (a, b) = (s[0] as usize, s[1] as usize);
                pair_offset(self.n_modes(), a) + (b - a)
            }
        }
    }

    /// Ordinal of `config` in the documented ordering.
    pub fn index_of(&self, config: &FockConfig) -> Result<usize> {
        if config.n_sites() != self.n_sites || config.n_particles() != self.n_particles {
            return Err(Error::UnknownConfig(config.to_string()));
        }
        let modes = config.modes();
        let set = match modes.len() {
            1 => ModeSet::single(modes[0]),
            _ => ModeSet::pair(modes[0], modes[1]),
        };
        Ok(self.index_of_modes(&set))
    }

    /// Configuration stored at `ordinal`.
    pub fn config_of(&self, ordinal: usize) -> Result<FockConfig> {
        let set = self.configs.get(ordinal).ok_or(Error::OrdinalOutOfRange {
            ordinal,
            dim: self.dim(),
        })?;
        let mut occupations = vec![0u8; self.n_modes()];
        for &m in set.as_slice() {
            occupations[m as usize] += 1;
        }
        Ok(FockConfig {
            n_sites: self.n_sites,
            occupations,
        })
    }

    /// Iterates over all configurations in order.
    pub fn configs(&self) -> impl Iterator<Item = FockConfig> + '_ {
        (0..self.dim()).map(move |i| self.config_of(i).expect("ordinal in range"))
    }

    /// Short description used in mismatch diagnostics.
    pub fn describe(&self) -> String {
        format!(
            "basis(N={}, particles={}, dim={})",
            self.n_sites,
            self.n_particles,
            self.dim()
        )
    }
}

/// Multiset coefficient C(n_modes + k - 1, k): closed-form basis dimension.
pub fn expected_dim(n_sites: usize, n_particles: usize) -> usize {
    let m = 2 * n_sites;
    match n_particles {
        0 => 1,
        1 => m,
        2 => m * (m + 1) / 2,
        _ => panic!("particle numbers above 2 are not supported"),
    }
}
