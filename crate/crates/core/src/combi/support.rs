use crate::poly::{DensePoly, MultiAffinePoly, EPS_ZERO};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;

pub const MAX_SUPPORT_POINTS: usize = 10_000;
pub const MAX_LOGSUB_ARITY: usize = 12;

/// Exponent vectors of the coefficients above `EPS_ZERO` in modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportSet {
    pub arity: usize,
    pub points: Vec<Vec<i64>>,
}

impl SupportSet {
    pub fn new(arity: usize, mut points: Vec<Vec<i64>>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.len() != arity) {
            return Err(Error::ArityMismatch { expected: arity, got: p.len() });
        }
        points.sort();
        points.dedup();
        Ok(SupportSet { arity, points })
    }

    pub fn of_dense(f: &DensePoly) -> Self {
        let points = f.terms().into_iter().filter(|(_, c)| c.norm() > EPS_ZERO).map(|(e, _)| e.iter().map(|&v| v as i64).collect()).collect();
        SupportSet::new(f.arity(), points).expect("arity from f")
    }

    pub fn of_multiaffine(f: &MultiAffinePoly) -> Self {
        let m = f.arity();
        let points = f.support(EPS_ZERO).into_iter().map(|s| (0..m).map(|i| (s >> i & 1) as i64).collect()).collect();
        SupportSet::new(m, points).expect("arity from f")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `(alpha, beta, step)` breaking the two-step axiom: `alpha + step` moves
/// towards `beta`, is not in the set, and no second step towards `beta`
/// lands in the set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JumpViolation {
    pub alpha: Vec<i64>,
    pub beta: Vec<i64>,
    pub step: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JumpReport {
    pub is_jump: bool,
    pub violation: Option<JumpViolation>,
    /// jump system inside `{0,1}^m`
    pub is_delta_matroid: bool,
    /// delta-matroid of constant size
    pub is_matroid_basis: bool,
}

/// Coordinates `i` and signs `e` with `alpha + e delta_i` closer to `beta`.
fn steps_towards<'a>(alpha: &'a [i64], beta: &'a [i64]) -> impl Iterator<Item = (usize, i64)> + 'a {
    alpha.iter().zip(beta).enumerate().filter(|(_, (a, b))| a != b).map(|(i, (a, b))| (i, (b - a).signum()))
}

fn violation_from(alpha: &[i64], beta: &[i64], set: &HashSet<&[i64]>) -> Option<JumpViolation> {
    let mut first = alpha.to_vec();
    for (i, e) in steps_towards(alpha, beta) {
        first[i] += e;
        let ok = set.contains(first.as_slice()) || {
            let mut second = first.clone();
            steps_towards(&first, beta).any(|(j, f)| {
                second[j] += f;
                let hit = set.contains(second.as_slice());
                second[j] -= f;
                hit
            })
        };
        if !ok {
            let step = first.iter().zip(alpha).map(|(a, b)| a - b).collect();
            return Some(JumpViolation { alpha: alpha.to_vec(), beta: beta.to_vec(), step });
        }
        first[i] -= e;
    }
    None
}

/// Brute-force two-step axiom over all ordered pairs, then the
/// delta-matroid and matroid refinements.
pub fn jump_system_check(s: &SupportSet) -> Result<JumpReport> {
    if s.len() > MAX_SUPPORT_POINTS {
        return Err(Error::CapExceeded { what: "support points", needed: s.len() as u128, cap: MAX_SUPPORT_POINTS as u128 });
    }
    let set: HashSet<&[i64]> = s.points.iter().map(|p| p.as_slice()).collect();
    let violation = s
        .points
        .par_iter()
        .map(|a| s.points.iter().find_map(|b| violation_from(a, b, &set)))
        .find_map_first(|v| v);
    let is_jump = violation.is_none();
    let binary = s.points.iter().all(|p| p.iter().all(|&v| v == 0 || v == 1));
    let is_delta_matroid = is_jump && binary;
    let sizes: HashSet<i64> = s.points.iter().map(|p| p.iter().sum()).collect();
    Ok(JumpReport { is_jump, violation, is_delta_matroid, is_matroid_basis: is_delta_matroid && sizes.len() <= 1 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogSubmodularReport {
    pub holds: bool,
    /// `(A, B, c(A & B) c(A | B) - c(A) c(B))` with the largest margin
    pub worst: Option<(usize, usize, f64)>,
    /// `A, B` in the support and `A <= C <= B` put `C` in the support
    pub convex_support: bool,
    pub delta_matroid: bool,
}

/// Exhaustive `c(A & B) c(A | B) <= c(A) c(B)` over incomparable pairs
/// (comparable pairs give equality), plus the support conditions.
pub fn log_submodular_check(f: &MultiAffinePoly) -> Result<LogSubmodularReport> {
    let m = f.arity();
    if m > MAX_LOGSUB_ARITY {
        return Err(Error::CapExceeded { what: "arity", needed: m as u128, cap: MAX_LOGSUB_ARITY as u128 });
    }
    if !f.is_real() {
        return Err(Error::NotReal);
    }
    let c: Vec<f64> = f.coeffs().iter().map(|z| z.re).collect();
    let scale = c.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if let Some(v) = c.iter().find(|v| **v < -1e-12 * scale.max(1.0)) {
        return Err(Error::NegativeCoefficient { value: *v });
    }
    let n = c.len();
    let worst = (0..n)
        .into_par_iter()
        .map(|a| {
            (a + 1..n)
                .filter(|&b| a & b != a && a & b != b)
                .map(|b| (a, b, c[a & b] * c[a | b] - c[a] * c[b]))
                .fold(None, |acc: Option<(usize, usize, f64)>, x| match acc {
                    Some(y) if y.2 >= x.2 => Some(y),
                    _ => Some(x),
                })
        })
        .reduce(|| None, |x, y| match (x, y) {
            (Some(p), Some(q)) => Some(if q.2 > p.2 || (q.2 == p.2 && (q.0, q.1) < (p.0, p.1)) { q } else { p }),
            (p, None) => p,
            (None, q) => q,
        });
    let holds = worst.is_none_or(|w| w.2 <= 1e-12 * scale * scale);
    let nonzero: Vec<bool> = c.iter().map(|v| v.abs() > EPS_ZERO).collect();
    let supp: Vec<usize> = (0..n).filter(|&s| nonzero[s]).collect();
    let convex_support = supp.iter().all(|&a| {
        supp.iter().filter(|&&b| a & b == a).all(|&b| {
            // every C with a <= C <= b
            let free = b & !a;
            let mut sub = free;
            loop {
                if !nonzero[a | sub] {
                    break false;
                }
                if sub == 0 {
                    break true;
                }
                sub = (sub - 1) & free;
            }
        })
    });
    let delta_matroid = jump_system_check(&SupportSet::of_multiaffine(f))?.is_jump;
    Ok(LogSubmodularReport { holds, worst, convex_support, delta_matroid })
}
