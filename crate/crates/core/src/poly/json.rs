use super::{DensePoly, MultiAffinePoly};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub exp: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Wire format for polynomials. Omitted terms are zero.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolyJson {
    pub arity: usize,
    pub kind: String,
    pub terms: Vec<TermJson>,
}

impl PolyJson {
    pub fn parse(s: &str) -> Result<PolyJson> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn from_dense(p: &DensePoly) -> PolyJson {
        let terms = p
            .terms()
            .into_iter()
            .map(|(exp, c)| TermJson { exp, re: c.re, im: c.im })
            .collect();
        PolyJson { arity: p.arity(), kind: "dense".into(), terms }
    }

    pub fn from_multiaffine(p: &MultiAffinePoly) -> PolyJson {
        let m = p.arity();
        let terms = (0..p.coeffs().len())
            .filter(|&s| p.coeff(s).norm() > 0.0)
            .map(|s| {
                let c = p.coeff(s);
                TermJson { exp: (0..m).map(|i| (s >> i) & 1).collect(), re: c.re, im: c.im }
            })
            .collect();
        PolyJson { arity: m, kind: "multiaffine".into(), terms }
    }

    fn check(&self) -> Result<()> {
        match self.kind.as_str() {
            "dense" | "multiaffine" => {}
            k => return Err(Error::Parse(format!("unknown kind {k:?}"))),
        }
        for t in &self.terms {
            if t.exp.len() != self.arity {
                return Err(Error::Parse(format!("term {:?} has wrong length", t.exp)));
            }
            if self.kind == "multiaffine" && t.exp.iter().any(|&e| e > 1) {
                return Err(Error::Parse(format!("term {:?} is not multiaffine", t.exp)));
            }
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(())
    }

    pub fn to_dense(&self) -> Result<DensePoly> {
        self.check()?;
        let terms: Vec<_> = self.terms.iter().map(|t| (t.exp.clone(), Complex64::new(t.re, t.im))).collect();
        let mut p = DensePoly::from_terms(self.arity, &terms)?;
        if self.kind == "multiaffine" {
            p = p.with_bounds(&vec![1; self.arity])?;
        }
        Ok(p)
    }

    pub fn to_multiaffine(&self) -> Result<MultiAffinePoly> {
        self.to_dense()?.to_multiaffine()
    }
}
