//! Mixed discriminants of doubly stochastic PSD tuples.

use stablekit::capacity::{bapat_suite, diagonal_lift, mixed_discriminant, permanent};
use stablekit::detpoly::HermitianMatrix;
use nalgebra::DMatrix;

fn main() -> stablekit::Result<()> {
    // I/m for every part reaches the bound exactly
    let m = 3;
    let parts: Vec<HermitianMatrix> = (0..m).map(|_| HermitianMatrix::diag(&vec![1.0 / m as f64; m])).collect();
    let rep = bapat_suite(&parts)?;
    println!("I/3 tuple: Disc = {:.9}  bound = {:.9}  equality {}", rep.disc, rep.bound, rep.equality);

    // diagonal parts reduce to the permanent of a doubly stochastic matrix
    let b = DMatrix::from_row_slice(3, 3, &[0.5, 0.3, 0.2, 0.2, 0.5, 0.3, 0.3, 0.2, 0.5]);
    let lifted = diagonal_lift(&b);
    println!("Disc(diag lift) = {:.9}, per = {:.9}", mixed_discriminant(&lifted)?, permanent(&b)?);
    let rep = bapat_suite(&lifted)?;
    println!("slack {:.3e}  cap {:.9}  holds {}", rep.slack, rep.cap.cap_estimate, rep.all_hold());

    // rank one parts u_i u_i^T from the rows of an orthogonal matrix
    let rows = [[1.0, 2.0, 2.0], [2.0, 1.0, -2.0], [2.0, -2.0, 1.0]].map(|u| u.map(|v: f64| v / 3.0));
    let parts: Vec<HermitianMatrix> = rows
        .iter()
        .map(|u| HermitianMatrix::from_real_rows(&(0..3).map(|i| (0..3).map(|j| u[i] * u[j]).collect()).collect::<Vec<_>>()))
        .collect::<stablekit::Result<_>>()?;
    let rep = bapat_suite(&parts)?;
    println!("rank one tuple: Disc = {:.6}  bound = {:.6}  holds {}", rep.disc, rep.bound, rep.all_hold());
    Ok(())
}
