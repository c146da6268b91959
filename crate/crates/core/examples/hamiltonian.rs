//! Builds the two-atom Hamiltonian on a short chain, reports its size and
//! writes the nonzero entries in coordinate form.
//!
//! ```text
//! cargo run --example hamiltonian [sites] > h.coo
//! ```

use std::sync::Arc;

use latticeshuttle::{CouplingProfile, FockBasis, SparseHamiltonian};

fn main() -> latticeshuttle::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(4, |s| s.parse().expect("sites"));
    let basis = Arc::new(FockBasis::enumerate(n, 2)?);
    let h = SparseHamiltonian::build(Arc::clone(&basis), CouplingProfile::odd_active(1.0, 25.0))?;
    eprintln!("{}", basis.describe());
    eprintln!(
        "dim {}, nnz {}, |H| <= {:.3}, hermiticity defect {:.1e}",
        h.dim(),
        h.nnz(),
        h.norm_bound(),
        h.hermiticity_defect()
    );
    h.write_coo(std::io::stdout().lock())?;
    Ok(())
}
