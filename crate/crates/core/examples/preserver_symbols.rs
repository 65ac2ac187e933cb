//! Classify linear operators on a degree box by the stability of their
//! symbol T((x + y)^kappa).

use num_complex::Complex64;
use stablekit::stability::{classify_preserver, symbol, LinOpSpec, SymbolSign};

fn main() -> stablekit::Result<()> {
    let kappa = vec![2, 2];
    let ops = [
        ("identity", LinOpSpec::identity(kappa.clone())?),
        ("d/dx1", LinOpSpec::derivative(kappa.clone(), 0)?),
        ("falling (1, 2)", LinOpSpec::falling_factorial_multiplier(kappa.clone(), &[1, 2])?),
        // x^a -> (-1)^|a| x^a keeps every image but flips the half-plane
        ("sign flip", LinOpSpec::multiplier(kappa.clone(), |a| Complex64::new(if a.iter().sum::<usize>() % 2 == 0 { 1.0 } else { -1.0 }, 0.0))?),
    ];
    for (name, op) in &ops {
        let s = symbol(op, SymbolSign::Plus)?;
        println!("{name:<16} symbol has {} terms, class {:?}", s.terms().len(), classify_preserver(op, 200, 5)?);
    }
    Ok(())
}
