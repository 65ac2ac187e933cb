//! Supports of stable polynomials form jump systems; real stable multiaffine
//! polynomials with nonnegative coefficients are log-submodular.

use stablekit::combi::{jump_system_check, log_submodular_check, SupportSet};
use stablekit::poly::MultiAffinePoly;

fn main() -> stablekit::Result<()> {
    let e2 = MultiAffinePoly::elementary_symmetric(4, 2)?;
    let rep = jump_system_check(&SupportSet::of_multiaffine(&e2))?;
    println!("e2 in 4 variables: jump {} delta-matroid {} matroid {}", rep.is_jump, rep.is_delta_matroid, rep.is_matroid_basis);
    let ls = log_submodular_check(&e2)?;
    println!("  log-submodular {} worst {:?}", ls.holds, ls.worst);

    // {000, 111} skips the middle levels
    let gap = SupportSet::new(3, vec![vec![0, 0, 0], vec![1, 1, 1]])?;
    let rep = jump_system_check(&gap)?;
    println!("{{000, 111}}: jump {}  violation {:?}", rep.is_jump, rep.violation);

    // x1 x2 + x3 x4 + 1 is not stable; its coefficients fail submodularity
    let f = MultiAffinePoly::from_fn(4, |s| match s {
        0b0000 | 0b0011 | 0b1100 => num_complex::Complex64::new(1.0, 0.0),
        _ => num_complex::Complex64::new(0.0, 0.0),
    })?;
    let ls = log_submodular_check(&f)?;
    println!("x1x2 + x3x4 + 1: log-submodular {}  convex support {}", ls.holds, ls.convex_support);
    Ok(())
}
