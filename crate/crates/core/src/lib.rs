//! Simulator and analytic toolkit for coherent directed transport of neutral
//! atoms in an optical superlattice.
//!
//! Atoms hop across isolated double wells; swapping the odd and even
//! tunnelings after every complete hop walks them along the chain. Two atoms
//! brought into one double well interact through superexchange, which
//! entangles their spins before they are walked back.
//!
//! The crate is organized bottom-up:
//!
//! - [`basis`]: one- and two-atom Fock bases with index maps
//! - [`hamiltonian`]: sparse two-component Bose-Hubbard operator
//! - [`schedule`]: hop / ramp / interaction segment lists
//! - [`propagator`]: Krylov time evolution, ramp integration, dense reference
//! - [`analytic`]: closed-form double-well dynamics and timing
//! - [`observables`]: densities, two-site projection, concurrence, witness
//! - [`sweep`]: experiment runners and CSV output
//! - [`cli`]: the `latticeshuttle` command line

pub mod analytic;
pub mod basis;
pub mod cli;
pub mod error;
pub mod hamiltonian;
pub mod observables;
pub mod propagator;
pub mod schedule;
pub mod state;
pub mod sweep;

pub use basis::{FockBasis, FockConfig, SpinLabel};
pub use error::{Error, Result};
pub use hamiltonian::{CouplingProfile, SparseHamiltonian};
pub use propagator::{Propagator, PropagatorConfig, RampScheme};
pub use schedule::{Direction, RampConvention, Schedule};
pub use state::StateVector;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
