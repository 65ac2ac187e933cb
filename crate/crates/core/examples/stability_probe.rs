//! Probe a few polynomials for zeros in the upper half-plane, the unit disc
//! and the right half-plane, and build one that is stable by construction.

use num_complex::Complex64;
use stablekit::poly::{ClosureOp, DensePoly};
use stablekit::stability::{certify, probe_stable, Construction, Generator, LinearFactor, RegionSpec, StabilityVerdict};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn show(name: &str, v: &StabilityVerdict) {
    match v {
        StabilityVerdict::Falsified { witness } => println!("{name:<28} falsified  {witness:?}"),
        other => println!("{name:<28} {}", other.label()),
    }
}

fn main() -> stablekit::Result<()> {
    let seed = 7;
    // x1 + x2 is stable; x1 x2 + 1 vanishes at (i, i)
    let sum = DensePoly::from_terms(2, &[(vec![1, 0], c(1.0, 0.0)), (vec![0, 1], c(1.0, 0.0))])?;
    let bad = DensePoly::from_terms(2, &[(vec![1, 1], c(1.0, 0.0)), (vec![0, 0], c(1.0, 0.0))])?;
    show("x1 + x2", &probe_stable(&sum, 200, seed, &RegionSpec::UpperHalfPlane)?);
    show("x1 x2 + 1", &probe_stable(&bad, 200, seed, &RegionSpec::UpperHalfPlane)?);

    let schur = DensePoly::univariate_real(&[2.0, 1.0])?;
    let not_schur = DensePoly::univariate_real(&[0.5, 1.0])?;
    show("x + 2 on the disc", &probe_stable(&schur, 200, seed, &RegionSpec::UnitDisc)?);
    show("x + 1/2 on the disc", &probe_stable(&not_schur, 200, seed, &RegionSpec::UnitDisc)?);

    let hurwitz = DensePoly::univariate_real(&[2.0, 3.0, 1.0])?;
    show("(x+1)(x+2) on Re > 0", &probe_stable(&hurwitz, 200, seed, &RegionSpec::RightHalfPlane)?);

    // (x1 + 2 x2 + i)(3 x1 + x2), then d/dx1
    let factors = vec![
        LinearFactor { a: vec![1.0, 2.0], b: c(0.0, 1.0) },
        LinearFactor { a: vec![3.0, 1.0], b: c(0.0, 0.0) },
    ];
    let tree = Construction::leaf(Generator::LinearProduct { arity: 2, factors }).op(ClosureOp::Differentiate { i: 0 });
    let (p, verdict) = certify(&tree)?;
    println!("\nconstructed: {:?}", p.terms());
    show("constructed", &verdict);
    if let StabilityVerdict::Certified { derivation } = verdict {
        for step in derivation {
            println!("  {step}");
        }
    }
    Ok(())
}
