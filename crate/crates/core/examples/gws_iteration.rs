//! Polarize a real-rooted cubic and recover the same polarization by
//! repeated partial symmetrization of the product of its linear factors.

use stablekit::polarize::{depolarize, gws_iterate, polarize_uni, GwsOptions};
use stablekit::poly::DensePoly;

fn main() -> stablekit::Result<()> {
    // (x - 1)(x + 2)(x + 3)
    let f = DensePoly::univariate_real(&[-6.0, 1.0, 4.0, 1.0])?;
    let m = 4;
    let target = polarize_uni(&f, m)?;
    println!("polarization coefficients by subset:");
    for s in 0..1usize << m {
        println!("  {s:04b}  {:.6}", target.coeff(s).re);
    }

    let run = gws_iterate(&f, m, &GwsOptions { tol: Some(1e-12), ..Default::default() })?;
    println!("\n{} steps, worst contraction {:.4}", run.pairs.len(), run.worst_ratio());
    for (k, v) in run.trace.iter().enumerate().step_by((run.trace.len() / 8).max(1)) {
        println!("  step {k:>4}  imbalance {v:.3e}");
    }
    println!("deviation from the polarization: {:.2e}", run.deviation);

    let back = depolarize(&run.result, &[m])?;
    println!("diagonal restores f: {}", back.approx_eq(&f, 1e-9));
    Ok(())
}
