//! Closed-form protocol timing and double occupancy for a range of chain
//! lengths and interaction strengths.

use latticeshuttle::analytic::{self, PhysicalUnits};

fn main() -> latticeshuttle::Result<()> {
    let units = PhysicalUnits::from_khz(1.5)?;
    println!("J/h = 1.5 kHz, t_h = {:.4} ms", 1e3 * units.to_physical(analytic::hop_time(1.0)));
    println!();
    println!("{:>6} {:>8} {:>10} {:>10}", "U/J", "J_ex", "t_I [ms]", "max P_doub");
    for u in [10.0, 25.0, 50.0, 100.0] {
        println!(
            "{u:>6} {:>8.4} {:>10.4} {:>10.5}",
            analytic::j_ex(1.0, u)?,
            1e3 * units.to_physical(analytic::interaction_time(1.0, u)?),
            analytic::max_p_doub(1.0, u)?
        );
    }
    println!();
    println!("{:>6} {:>10}", "N", "t_T [ms]");
    for n in [20, 40, 60, 80, 100, 120, 140] {
        let t = analytic::total_time(n, 1.0, 25.0)?;
        println!("{n:>6} {:>10.3}", 1e3 * units.to_physical(t));
    }
    Ok(())
}
