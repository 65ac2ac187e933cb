//! Stability verdicts: certified constructions, probe-based falsification,
//! and symbol tests for linear preservers.

mod certify;
pub(crate) mod delta;
mod linop;
mod probe;
mod region;

pub use certify::{certify, certify_claim, lieb_sokal, Construction, Generator, LinearFactor};
pub use delta::{delta_real_stable, DeltaOptions};
pub use linop::{classify_preserver, symbol, LinOpSpec, PreserverClass, SymbolSign};
pub use probe::{probe_lines, probe_stable, probe_stable_ma, validate_witness, DEFAULT_PROBES};
pub use region::{moebius_conjugate, RegionSpec};

use crate::poly::Scalar;
use serde::Serialize;

/// Evidence that a polynomial is not stable.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// `point` is a zero in the queried region; `upper` is its preimage in
    /// the upper half-plane; `residual = |f(point)| / sum |c_a| |point|^a`.
    Point { point: Vec<Scalar>, upper: Vec<Scalar>, residual: f64 },
    /// `Delta_ij f(at) = value < 0` for a real multiaffine `f`.
    DeltaNegative { i: usize, j: usize, at: Vec<f64>, value: f64 },
}

/// Outcome of a stability query. `ProbePassed` is evidence, not proof.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StabilityVerdict {
    Certified { derivation: Vec<String> },
    Falsified { witness: Witness },
    ProbePassed { probes: usize, seed: u64 },
}

impl StabilityVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, StabilityVerdict::Certified { .. })
    }

    pub fn is_falsified(&self) -> bool {
        matches!(self, StabilityVerdict::Falsified { .. })
    }

    pub fn is_probe_passed(&self) -> bool {
        matches!(self, StabilityVerdict::ProbePassed { .. })
    }

    /// Not falsified.
    pub fn is_consistent_with_stable(&self) -> bool {
        !self.is_falsified()
    }

    pub fn label(&self) -> &'static str {
        match self {
            StabilityVerdict::Certified { .. } => "certified",
            StabilityVerdict::Falsified { .. } => "falsified",
            StabilityVerdict::ProbePassed { .. } => "probe_passed",
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            StabilityVerdict::Falsified { witness } => Some(witness),
            _ => None,
        }
    }
}
