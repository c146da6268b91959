//! Walks a single spin-up atom from site 1 to the far end of a 20-site chain
//! and prints the density profile after every hop.
//!
//! ```text
//! cargo run --release --example transport [tau_over_th]
//! ```

use latticeshuttle::schedule::Direction;
use latticeshuttle::sweep;
use latticeshuttle::{PropagatorConfig, RampConvention};

fn main() -> latticeshuttle::Result<()> {
    let tau: f64 = std::env::args().nth(1).map_or(0.0, |s| s.parse().expect("tau_over_th"));
    let n = 20;
    let report = sweep::run_transport_from(
        n,
        1,
        Direction::Right,
        tau,
        &PropagatorConfig::default(),
        RampConvention::default(),
        None,
    )?;

    for s in &report.trajectory {
        let bars: String = s
            .occupation
            .iter()
            .map(|&p| match p {
                p if p > 0.9 => '#',
                p if p > 0.1 => '+',
                p if p > 1e-3 => '.',
                _ => ' ',
            })
            .collect();
        println!("t = {:8.4}  |{bars}|", s.t);
    }
    println!(
        "arrival at site {}: {:.12} after t = {:.6} / J",
        report.target_site, report.arrival_probability, report.total_time
    );
    println!("max norm drift {:.1e}", report.diagnostics.max_norm_drift);
    Ok(())
}
