//! With unequal hop rates the two-site semigroup no longer preserves
//! stability. Search for a stable input whose image has a zero in H^m.

use stablekit::sep::asymmetry_counterexample;
use stablekit::stability::Witness;

fn main() -> stablekit::Result<()> {
    for beta in [0.9, 0.7, 0.55] {
        match asymmetry_counterexample(beta, 1.0, 5000, 1)? {
            Some(w) => {
                println!("beta = {beta}: found after {} trials", w.trials);
                println!("  Z coefficients {:?}", w.z.coeffs().iter().map(|c| c.re).collect::<Vec<_>>());
                if let Witness::Point { point, residual, .. } = &w.witness {
                    println!("  zero of the image at {point:?} (residual {residual:.1e})");
                }
            }
            None => println!("beta = {beta}: nothing within the budget"),
        }
    }
    match asymmetry_counterexample(0.5, 1.0, 10, 1) {
        Err(e) => println!("beta = 0.5: {e}"),
        Ok(_) => println!("beta = 0.5: unexpected search"),
    }
    Ok(())
}
