//! Lee-Yang polynomials of Hermitian contractions have their diagonal roots
//! on the unit circle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use stablekit::combi::lee_yang;
use stablekit::detpoly::HermitianMatrix;

fn main() -> stablekit::Result<()> {
    let m = 5;
    let a = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            Complex64::new(0.0, 0.0)
        } else {
            let d = (i as f64 - j as f64).abs();
            Complex64::from_polar(0.9 / d, 0.3 * (j as f64 - i as f64))
        }
    });
    let ly = lee_yang(&HermitianMatrix::new(a)?)?;
    println!("palindromic: {}", ly.palindromic);
    for z in &ly.roots {
        println!("  root {:+.6} {:+.6}i   |z| = {:.12}", z.re, z.im, z.norm());
    }
    println!("max deviation from |z| = 1: {:.2e}", ly.max_circle_deviation);
    Ok(())
}
