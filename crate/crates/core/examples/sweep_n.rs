//! Chain-length sweep at fixed ramp time, written as CSV to stdout.

use latticeshuttle::sweep::{self, Experiment, SweepConfig};

fn main() -> latticeshuttle::Result<()> {
    let mut cfg = SweepConfig::defaults(Experiment::SweepN);
    cfg.sites = vec![4, 8, 12, 16, 20];
    let records = sweep::run_sweep_n(&cfg)?;
    sweep::write_records_csv(std::io::stdout().lock(), &cfg, &records)
}
