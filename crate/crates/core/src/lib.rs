//! Construct, transform and test multivariate stable polynomials.
//!
//! A polynomial in `m` complex variables is *stable* when it has no zero
//! with every coordinate in the open upper half-plane. The crate offers the
//! algebra ([`poly`]), univariate root tools ([`roots`]), stability
//! verdicts ([`stability`]) and the applications built on them.

pub mod capacity;
pub mod cli;
pub mod combi;
pub mod detpoly;
pub mod error;
pub mod poly;
pub mod polarize;
pub mod rng;
pub mod roots;
pub mod sep;
pub mod stability;

pub use error::{Error, Result};
