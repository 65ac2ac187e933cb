//! Permanent lower bound for doubly stochastic matrices, through Sinkhorn
//! scaling and the capacity of the product of linear forms.

use nalgebra::DMatrix;
use stablekit::capacity::{bound_chain, linear_product_poly, vdw_suite};
use stablekit::rng::rng;
use rand::Rng;

fn main() -> stablekit::Result<()> {
    let mut r = rng(11);
    for n in [3, 5, 8] {
        let b = DMatrix::from_fn(n, n, |_, _| r.random_range(0.01..1.0));
        let rep = vdw_suite(&b, true)?;
        println!(
            "n = {n}: per = {:.6e}  n!/n^n = {:.6e}  slack {:.3e}  cap {:.9}  ({} sweeps)",
            rep.permanent, rep.bound, rep.slack, rep.cap.cap_estimate, rep.sinkhorn_sweeps
        );
    }

    let uniform = DMatrix::from_element(4, 4, 0.25);
    let rep = vdw_suite(&uniform, false)?;
    println!("\nJ/4: per = {:.9} bound = {:.9} equality = {}", rep.permanent, rep.bound, rep.equality);

    // the coefficient chain behind the bound
    let chain = bound_chain(&linear_product_poly(&uniform)?)?;
    println!("coeff {:.6}  cap {:.6}  G factors {:?}", chain.coeff, chain.cap.cap_estimate, chain.g_factors);
    println!("bound {:.6}  weak bound {:.6}  slack {:.3e}", chain.bound, chain.weak_bound, chain.slack);
    Ok(())
}
