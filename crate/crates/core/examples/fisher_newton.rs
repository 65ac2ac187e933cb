//! Normalized Fisher products of a positive definite matrix and the Newton,
//! monotonicity and Maclaurin chains they satisfy.

use stablekit::detpoly::{newton_maclaurin_check, HermitianMatrix};

fn main() -> stablekit::Result<()> {
    let a = HermitianMatrix::from_real_rows(&[
        vec![4.0, 1.0, 0.5, 0.0],
        vec![1.0, 3.0, 0.2, 0.1],
        vec![0.5, 0.2, 2.0, 0.3],
        vec![0.0, 0.1, 0.3, 1.0],
    ])?;
    let rep = newton_maclaurin_check(&a)?;
    for group in [("newton", &rep.newton), ("monotone", &rep.monotone)] {
        println!("{}:", group.0);
        for q in group.1 {
            println!("  {:<24} {:>12.6} >= {:<12.6} margin {:+.3e}", q.label, q.lhs, q.rhs, q.margin);
        }
    }
    if let Some(mac) = &rep.maclaurin {
        println!("maclaurin:");
        for q in mac {
            println!("  {:<24} {:>12.6} >= {:<12.6} margin {:+.3e}", q.label, q.lhs, q.rhs, q.margin);
        }
    }
    println!("all hold: {}", rep.all_hold());
    Ok(())
}
