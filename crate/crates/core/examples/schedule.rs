//! Prints the segment list of a six-site entangling run under both ramp
//! conventions.

use latticeshuttle::schedule;
use latticeshuttle::RampConvention;

fn main() -> latticeshuttle::Result<()> {
    let tau = 0.1 * schedule::hop_time(1.0);
    for conv in [RampConvention::Centered, RampConvention::Append] {
        let s = schedule::compile_entangle_with(6, tau, 1.0, 25.0, conv)?;
        println!("{conv:?}: {} segments, total {:.5} / J", s.segments().len(), s.total_duration());
        let mut t = 0.0;
        for seg in s.segments() {
            let links: Vec<String> = (1..6).map(|l| format!("{:.2}", seg.start.link_coupling(l))).collect();
            println!("  {t:8.4}  {:<9} {:>8.5}  J = [{}]", seg.label.to_string(), seg.duration, links.join(" "));
            t += seg.duration;
        }
        println!();
    }
    Ok(())
}
