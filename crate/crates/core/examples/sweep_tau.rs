//! Ramp-time sweep on a short chain, written as CSV to stdout.
//!
//! ```text
//! cargo run --release --example sweep_tau > sweep_tau.csv
//! ```

use latticeshuttle::sweep::{self, Experiment, SweepConfig};

fn main() -> latticeshuttle::Result<()> {
    let mut cfg = SweepConfig::defaults(Experiment::SweepTau);
    cfg.sites = vec![12];
    cfg.tau_over_th = sweep::tau_grid(6, 0.15);
    let records = sweep::run_sweep_tau(&cfg)?;
    sweep::write_records_csv(std::io::stdout().lock(), &cfg, &records)
}
