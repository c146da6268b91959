//! Checks the Krylov propagator against the closed-form two-site amplitudes
//! for random interaction strengths and times.

use latticeshuttle::sweep;
use latticeshuttle::PropagatorConfig;

fn main() -> latticeshuttle::Result<()> {
    let r = sweep::run_oracle_check(50, 3, &PropagatorConfig::default())?;
    println!("{} samples", r.samples);
    println!("single atom    {:.2e}", r.single_atom);
    println!("same spin      {:.2e}", r.same_spin);
    println!("opposite spin  {:.2e}", r.opposite_spin);
    Ok(())
}
