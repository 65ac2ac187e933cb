use crate::stability::StabilityVerdict;
use serde::Serialize;
use std::collections::BTreeMap;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    pub fn check(name: impl Into<String>, ok: bool) -> Self {
        Verdict { name: name.into(), outcome: if ok { Outcome::Pass } else { Outcome::Fail }, detail: None }
    }

    /// `ProbePassed` is only a pass when certification is not required.
    pub fn stability(name: impl Into<String>, v: &StabilityVerdict, require_certified: bool) -> Self {
        let outcome = match v {
            StabilityVerdict::Certified { .. } => Outcome::Pass,
            StabilityVerdict::Falsified { .. } => Outcome::Fail,
            StabilityVerdict::ProbePassed { .. } if require_certified => Outcome::Inconclusive,
            StabilityVerdict::ProbePassed { .. } => Outcome::Pass,
        };
        Verdict { name: name.into(), outcome, detail: Some(v.label().into()) }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub version: String,
    pub inputs_digest: String,
    pub seed: u64,
    pub verdicts: Vec<Verdict>,
    pub result: serde_json::Value,
    /// wall-clock milliseconds; the only field that varies between identical runs
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn outcome(&self) -> Outcome {
        if self.verdicts.iter().any(|v| v.outcome == Outcome::Fail) {
            Outcome::Fail
        } else if self.verdicts.iter().any(|v| v.outcome == Outcome::Inconclusive) {
            Outcome::Inconclusive
        } else {
            Outcome::Pass
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.outcome() {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(v: Vec<Verdict>) -> RunReport {
        RunReport {
            schema: SCHEMA,
            command: "x".into(),
            version: "0".into(),
            inputs_digest: String::new(),
            seed: 0,
            verdicts: v,
            result: serde_json::Value::Null,
            timings: BTreeMap::new(),
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(report(vec![]).exit_code(), 0);
        let probe = StabilityVerdict::ProbePassed { probes: 1, seed: 0 };
        assert_eq!(report(vec![Verdict::stability("s", &probe, false)]).exit_code(), 0);
        assert_eq!(report(vec![Verdict::stability("s", &probe, true)]).exit_code(), 2);
        assert_eq!(report(vec![Verdict::stability("s", &probe, true), Verdict::check("c", false)]).exit_code(), 1);
    }
}
