//! Interlacing, proper position and the Hermite-Biehler test for pairs of
//! real-rooted polynomials.

use stablekit::poly::DensePoly;
use stablekit::roots::{hb_check, interlaces, proper_position};

fn from_roots(r: &[f64]) -> stablekit::Result<DensePoly> {
    r.iter().try_fold(DensePoly::univariate_real(&[1.0])?, |p, &x| p.mul(&DensePoly::univariate_real(&[-x, 1.0])?))
}

fn main() -> stablekit::Result<()> {
    let f = from_roots(&[-2.0, 0.0, 3.0])?;
    let g = from_roots(&[-1.0, 1.0, 4.0])?;
    let h = from_roots(&[-3.0, 0.5, 0.7])?;
    for (name, a, b) in [("f, g", &f, &g), ("g, f", &g, &f), ("f, h", &f, &h)] {
        println!(
            "{name}: interlace {}  position {:?}  g + i f stable {}",
            interlaces(a, b)?,
            proper_position(a, b)?,
            hb_check(a, b)?
        );
    }
    Ok(())
}
