//! Real-rootedness, interlacing and inertia of Det(xA, -B) for a positive
//! definite A and a Hermitian B.

use nalgebra::DMatrix;
use num_complex::Complex64;
use stablekit::detpoly::{johnson_suite, HermitianMatrix};
use stablekit::roots::roots;

fn main() -> stablekit::Result<()> {
    let a = HermitianMatrix::from_real_rows(&[vec![2.0, 0.5, 0.0], vec![0.5, 1.0, 0.2], vec![0.0, 0.2, 3.0]])?;
    let b = HermitianMatrix::new(DMatrix::from_row_slice(
        3,
        3,
        &[
            Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.3, 0.0),
            Complex64::new(0.0, -1.0), Complex64::new(-2.0, 0.0), Complex64::new(0.0, 0.0),
            Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0),
        ],
    ))?;
    let rep = johnson_suite(&a, &b)?;
    println!("Det(xA, -B) coefficients: {:?}", rep.p.univariate_coeffs()?.iter().map(|z| z.re).collect::<Vec<_>>());
    println!("roots: {:?}", roots(&rep.p)?.real_roots());
    println!("real rooted: {}", rep.real_rooted);
    for (j, v) in &rep.interlacing {
        println!("  minor {j}: {v:?}");
    }
    println!("inertia of p {:?}, of B {:?}", rep.inertia_p, rep.inertia_b);
    println!("all hold: {}", rep.all_hold());
    Ok(())
}
