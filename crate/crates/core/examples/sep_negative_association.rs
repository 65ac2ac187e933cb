//! Evolve a product measure under the symmetric exclusion process and check
//! stability of the partition function and negative association over time.

use stablekit::sep::{stability_transport_suite, CubeDistribution, SepGenerator};

fn main() -> stablekit::Result<()> {
    let phi = CubeDistribution::product(&[0.9, 0.1, 0.7, 0.2])?;
    let gen = SepGenerator::path(4, 1.0)?.edge(0, 3, 0.4)?;
    let times = [0.0, 0.1, 0.5, 2.0, 10.0];
    let rep = stability_transport_suite(&phi, &gen, &times, 400, 3)?;
    println!("initial {}  admitted {}", rep.initial.label(), rep.admitted);
    for e in &rep.entries {
        let na = e.na.as_ref().map(|n| format!("{:+.3e}", n.worst_margin)).unwrap_or_default();
        println!(
            "t = {:>5}: {:<13} NC margin {:+.3e}  NA margin {na}  P(0101) = {:.4}",
            e.t,
            e.verdict.label(),
            e.nc.worst_margin,
            e.probs[0b0101]
        );
    }
    println!("all pass: {}", rep.all_pass());
    Ok(())
}
