//! Compares a two-site simulation with the effective exchange gate
//! exp(-i J_ex t SWAP) as the interaction grows from U = 5J to U = 200J.

use std::sync::Arc;

use num_complex::Complex64;

use latticeshuttle::analytic;
use latticeshuttle::observables::{self, TwoQubitOutcome};
use latticeshuttle::state::spin_plus;
use latticeshuttle::{CouplingProfile, FockBasis, Propagator, PropagatorConfig, SparseHamiltonian, StateVector};

fn main() -> latticeshuttle::Result<()> {
    let basis = Arc::new(FockBasis::enumerate(2, 2)?);
    let psi0 = StateVector::two_atom_product(Arc::clone(&basis), 1, spin_plus(), 2, spin_plus())?;
    let plus = [Complex64::new(0.5, 0.0); 4];
    let mut prop = Propagator::new(PropagatorConfig::default())?;

    println!("{:>6} {:>10} {:>10} {:>12}", "U/J", "J_ex", "t_I", "min overlap");
    for u in [5.0, 10.0, 25.0, 50.0, 100.0, 200.0] {
        let h = SparseHamiltonian::build(Arc::clone(&basis), CouplingProfile::odd_active(1.0, u))?;
        let j_ex = analytic::j_ex(1.0, u)?;
        let t_i = analytic::interaction_time(1.0, u)?;
        let steps = 100;
        let mut psi = psi0.clone();
        let mut worst: f64 = 1.0;
        for k in 1..=steps {
            psi = prop.evolve_hold(&psi, &h, t_i / steps as f64)?;
            let sim = observables::project_two_sites(&psi, 1, 2)?;
            let gate = analytic::effective_gate_state(&plus, j_ex, t_i * k as f64 / steps as f64);
            let ideal = TwoQubitOutcome::from_amplitudes(gate)?;
            let ov: Complex64 = sim.amplitudes.iter().zip(&ideal.amplitudes).map(|(a, b)| a.conj() * b).sum();
            worst = worst.min(ov.norm_sqr());
        }
        println!("{u:>6} {j_ex:>10.5} {t_i:>10.4} {worst:>12.6}");
    }
    Ok(())
}
