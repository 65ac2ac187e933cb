//! Symmetric exclusion processes on `{0,1}^m`: exact evolution of
//! distributions and checks of negative dependence along the way.

mod events;
mod suite;

pub use events::{
    check_na, check_nc, feder_mihail, monotone_families, na_exhaustive, rayleigh_check, FederMihailReport, MonotoneEvent, NaReport,
    NcReport,
};
pub use suite::{
    asymmetric_image, asymmetry_counterexample, asymmetry_search, stability_transport_suite, AsymmetryWitness, TransportEntry, TransportReport,
    ASYMMETRY_PROBES,
};

use crate::poly::MultiAffinePoly;
use crate::rng::rng;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

pub const MAX_SITES: usize = 12;
const POISSON_TAIL: f64 = 1e-12;
const DRIFT_TOL: f64 = 1e-10;

/// A probability distribution on occupation states; state `S` is a bitmask.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CubeDistribution {
    m: usize,
    probs: Vec<f64>,
}

impl CubeDistribution {
    pub fn new(m: usize, probs: Vec<f64>) -> Result<Self> {
        if m > MAX_SITES {
            return Err(Error::CapExceeded { what: "sites", needed: m as u128, cap: MAX_SITES as u128 });
        }
        if probs.len() != 1 << m {
            return Err(Error::InvalidArgument(format!("{} sites need {} probabilities", m, 1usize << m)));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::NegativeCoefficient { value: *p });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > DRIFT_TOL {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
        }
        Ok(CubeDistribution { m, probs })
    }

    /// Concentrated on one state.
    pub fn delta(m: usize, state: usize) -> Result<Self> {
        if state >> m != 0 {
            return Err(Error::IndexOutOfRange { index: state, arity: m });
        }
        let mut probs = vec![0.0; 1 << m];
        probs[state] = 1.0;
        CubeDistribution::new(m, probs)
    }

    /// From occupation flags, site 0 first.
    pub fn from_occupation(occ: &[bool]) -> Result<Self> {
        let state = occ.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| 1 << i).sum();
        CubeDistribution::delta(occ.len(), state)
    }

    /// Independent sites with `Pr[i occupied] = p_i`.
    pub fn product(p: &[f64]) -> Result<Self> {
        let m = p.len();
        let probs = (0..1usize << m)
            .map(|s| (0..m).map(|i| if s >> i & 1 == 1 { p[i] } else { 1.0 - p[i] }).product())
            .collect();
        CubeDistribution::new(m, probs)
    }

    /// Normalizes a nonnegative nonzero partition function.
    pub fn from_partition_function(z: &MultiAffinePoly) -> Result<Self> {
        if !z.is_real() {
            return Err(Error::NotReal);
        }
        let w: Vec<f64> = z.coeffs().iter().map(|c| c.re).collect();
        if let Some(v) = w.iter().find(|v| **v < 0.0) {
            return Err(Error::NegativeCoefficient { value: *v });
        }
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroPolynomial);
        }
        CubeDistribution::new(z.arity(), w.iter().map(|v| v / total).collect())
    }

    pub fn sites(&self) -> usize {
        self.m
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, state: usize) -> f64 {
        self.probs[state]
    }

    /// `Z(phi; x) = sum_S phi(S) x^S`.
    pub fn partition_function(&self) -> MultiAffinePoly {
        MultiAffinePoly::from_fn(self.m, |s| Complex64::new(self.probs[s], 0.0)).expect("m <= 12")
    }

    /// `phi^a(S) = phi(S) a^S / Z(phi; a)`.
    pub fn reweight(&self, a: &[f64]) -> Result<Self> {
        if a.len() != self.m {
            return Err(Error::ArityMismatch { expected: self.m, got: a.len() });
        }
        if a.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidArgument("reweighting needs a > 0".into()));
        }
        let w: Vec<f64> = self
            .probs
            .iter()
            .enumerate()
            .map(|(s, p)| p * (0..self.m).filter(|i| s >> i & 1 == 1).map(|i| a[i]).product::<f64>())
            .collect();
        let total: f64 = w.iter().sum();
        CubeDistribution::new(self.m, w.iter().map(|v| v / total).collect())
    }

    pub fn total_variation(&self, other: &CubeDistribution) -> f64 {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
    }

    /// Pushforward under an endofunction of the state space.
    pub fn push(&self, mv: Move) -> Result<Self> {
        mv.check(self.m)?;
        let mut out = vec![0.0; self.probs.len()];
        for (s, p) in self.probs.iter().enumerate() {
            out[mv.apply(s)] += p;
        }
        Ok(CubeDistribution { m: self.m, probs: out })
    }
}

/// Endofunctions of `{0,1}^m` used by exclusion dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum Move {
    /// exchange the contents of sites `i` and `j`
    Swap { i: usize, j: usize },
    /// a particle at `from` jumps to an empty `to`
    Hop { from: usize, to: usize },
    Create { i: usize },
    Annihilate { i: usize },
}

impl Move {
    fn check(&self, m: usize) -> Result<()> {
        let (a, b) = match *self {
            Move::Swap { i, j } => (i, j),
            Move::Hop { from, to } => (from, to),
            Move::Create { i } | Move::Annihilate { i } => (i, i),
        };
        for k in [a, b] {
            if k >= m {
                return Err(Error::IndexOutOfRange { index: k, arity: m });
            }
        }
        if matches!(self, Move::Swap { .. } | Move::Hop { .. }) && a == b {
            return Err(Error::IndicesNotDistinct);
        }
        Ok(())
    }

    pub fn apply(&self, s: usize) -> usize {
        match *self {
            Move::Swap { i, j } => {
                if (s >> i & 1) != (s >> j & 1) {
                    s ^ (1 << i) ^ (1 << j)
                } else {
                    s
                }
            }
            Move::Hop { from, to } => {
                if s >> from & 1 == 1 && s >> to & 1 == 0 {
                    s ^ (1 << from) ^ (1 << to)
                } else {
                    s
                }
            }
            Move::Create { i } => s | 1 << i,
            Move::Annihilate { i } => s & !(1 << i),
        }
    }

    /// `F^2 = I` for swaps, `F^2 = F` otherwise; either way `exp(r (F - I))`
    /// has a two-term closed form `w0 I + w1 F`.
    fn exp_weights(&self, r: f64) -> (f64, f64) {
        match self {
            Move::Swap { .. } => ((1.0 + (-2.0 * r).exp()) / 2.0, (1.0 - (-2.0 * r).exp()) / 2.0),
            _ => ((-r).exp(), 1.0 - (-r).exp()),
        }
    }

    /// The same endofunction acting on partition functions, built from
    /// polynomial operations rather than from the state map.
    pub fn act_on_polynomial(&self, z: &MultiAffinePoly) -> Result<MultiAffinePoly> {
        self.check(z.arity())?;
        match *self {
            Move::Swap { i, j } => z.swap(i, j),
            Move::Annihilate { i } => z.without(i)?.add(&z.with(i)?),
            Move::Create { i } => {
                let rest = z.without(i)?.add(&z.with(i)?)?;
                let xi = MultiAffinePoly::from_real_terms(z.arity(), &[(1 << i, 1.0)])?;
                xi.mul(&rest)
            }
            Move::Hop { from, to } => {
                // A + x_f B + x_t C + x_f x_t D  ->  A + x_t (B + C) + x_f x_t D
                let a = z.without(from)?.without(to)?;
                let b = z.with(from)?.without(to)?;
                let c = z.without(from)?.with(to)?;
                let d = z.with(from)?.with(to)?;
                let xt = MultiAffinePoly::from_real_terms(z.arity(), &[(1 << to, 1.0)])?;
                let xft = MultiAffinePoly::from_real_terms(z.arity(), &[((1 << to) | (1 << from), 1.0)])?;
                a.add(&xt.mul(&b.add(&c)?)?)?.add(&xft.mul(&d)?)
            }
        }
    }
}

/// Pushforward together with a check of `Z(F phi) = F Z(phi)`.
pub fn apply_move(phi: &CubeDistribution, mv: Move) -> Result<CubeDistribution> {
    let out = phi.push(mv)?;
    let via_poly = mv.act_on_polynomial(&phi.partition_function())?;
    if !via_poly.approx_eq(&out.partition_function(), 1e-14) {
        return Err(Error::Internal(format!("partition function identity fails for {mv:?}")));
    }
    Ok(out)
}

/// Generator `L = sum_r rate_r (F_r - I)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SepGenerator {
    m: usize,
    terms: Vec<(Move, f64)>,
}

impl SepGenerator {
    pub fn new(m: usize) -> Self {
        SepGenerator { m, terms: Vec::new() }
    }

    fn push(mut self, mv: Move, rate: f64) -> Result<Self> {
        mv.check(self.m)?;
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::InvalidArgument(format!("rate {rate} must be finite and nonnegative")));
        }
        if rate > 0.0 {
            self.terms.push((mv, rate));
        }
        Ok(self)
    }

    /// Symmetric exchange across `{i, j}`.
    pub fn edge(self, i: usize, j: usize, rate: f64) -> Result<Self> {
        self.push(Move::Swap { i, j }, rate)
    }

    /// Directed hop `from -> to`.
    pub fn hop(self, from: usize, to: usize, rate: f64) -> Result<Self> {
        self.push(Move::Hop { from, to }, rate)
    }

    pub fn create(self, i: usize, rate: f64) -> Result<Self> {
        self.push(Move::Create { i }, rate)
    }

    pub fn annihilate(self, i: usize, rate: f64) -> Result<Self> {
        self.push(Move::Annihilate { i }, rate)
    }

    pub fn path(m: usize, rate: f64) -> Result<Self> {
        (1..m).try_fold(SepGenerator::new(m), |g, i| g.edge(i - 1, i, rate))
    }

    pub fn star(m: usize, rate: f64) -> Result<Self> {
        (1..m).try_fold(SepGenerator::new(m), |g, i| g.edge(0, i, rate))
    }

    pub fn sites(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &[(Move, f64)] {
        &self.terms
    }

    /// No directed hops.
    pub fn is_symmetric(&self) -> bool {
        !self.terms.iter().any(|(mv, _)| matches!(mv, Move::Hop { .. }))
    }

    pub fn total_rate(&self) -> f64 {
        self.terms.iter().map(|(_, r)| r).sum()
    }

    /// `P = sum_r (rate_r / K) F_r` applied to `v`.
    fn jump(&self, v: &[f64], k: f64) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (mv, rate) in &self.terms {
            let w = rate / k;
            for (s, p) in v.iter().enumerate() {
                out[mv.apply(s)] += w * p;
            }
        }
        out
    }
}

/// `(1 + e^{-2 rate t}) / 2` and `(1 - e^{-2 rate t}) / 2`: staying and
/// swapped weights of a single exchange edge.
pub fn single_edge_closed_form(rate: f64, t: f64) -> (f64, f64) {
    Move::Swap { i: 0, j: 1 }.exp_weights(rate * t)
}

/// `exp(t L) phi` by uniformization, in time slices with `K dt <= 32`.
pub fn evolve(phi: &CubeDistribution, gen: &SepGenerator, t: f64) -> Result<CubeDistribution> {
    if gen.m != phi.m {
        return Err(Error::ArityMismatch { expected: gen.m, got: phi.m });
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} must be finite and nonnegative")));
    }
    let k = gen.total_rate();
    if k == 0.0 || t == 0.0 {
        return Ok(phi.clone());
    }
    let slices = (k * t / 32.0).ceil().max(1.0) as usize;
    let dt = t / slices as f64;
    let mut v = phi.probs.clone();
    for _ in 0..slices {
        let lam = k * dt;
        let mut weight = (-lam).exp();
        let mut used = weight;
        let mut term = v.clone();
        let mut acc: Vec<f64> = term.iter().map(|p| weight * p).collect();
        let mut n = 0usize;
        while 1.0 - used > POISSON_TAIL {
            n += 1;
            term = gen.jump(&term, k);
            weight *= lam / n as f64;
            used += weight;
            acc.iter_mut().zip(&term).for_each(|(a, p)| *a += weight * p);
            if n > 10_000 {
                return Err(Error::NoConvergence("poisson series".into()));
            }
        }
        v = acc;
    }
    renormalize(phi.m, v)
}

fn renormalize(m: usize, v: Vec<f64>) -> Result<CubeDistribution> {
    let total: f64 = v.iter().sum();
    if (total - 1.0).abs() > DRIFT_TOL {
        return Err(Error::Internal(format!("probability drifted to {total}")));
    }
    Ok(CubeDistribution { m, probs: v.iter().map(|p| p.max(0.0) / total).collect() })
}

/// Product of per-term exact semigroups over `steps` equal time slices.
pub fn trotter_evolve(phi: &CubeDistribution, gen: &SepGenerator, t: f64, steps: usize) -> Result<CubeDistribution> {
    if gen.m != phi.m {
        return Err(Error::ArityMismatch { expected: gen.m, got: phi.m });
    }
    if steps == 0 || !(t >= 0.0) {
        return Err(Error::InvalidArgument("need steps >= 1 and t >= 0".into()));
    }
    let dt = t / steps as f64;
    let mut v = phi.probs.clone();
    for _ in 0..steps {
        for (mv, rate) in &gen.terms {
            let (w0, w1) = mv.exp_weights(rate * dt);
            let mut out: Vec<f64> = v.iter().map(|p| w0 * p).collect();
            for (s, p) in v.iter().enumerate() {
                out[mv.apply(s)] += w1 * p;
            }
            v = out;
        }
    }
    renormalize(phi.m, v)
}

/// Empirical distribution at time `t` from `samples` Gillespie trajectories.
pub fn gillespie(phi: &CubeDistribution, gen: &SepGenerator, t: f64, samples: usize, seed: u64) -> Result<CubeDistribution> {
    if gen.m != phi.m {
        return Err(Error::ArityMismatch { expected: gen.m, got: phi.m });
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let mut r = rng(seed);
    let k = gen.total_rate();
    let mut counts = vec![0usize; phi.probs.len()];
    for _ in 0..samples {
        let u: f64 = r.random();
        let mut acc = 0.0;
        let mut s = phi.probs.len() - 1;
        for (state, p) in phi.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                s = state;
                break;
            }
        }
        let mut clock = 0.0;
        while k > 0.0 {
            let e: f64 = r.random::<f64>();
            clock += -(1.0 - e).ln() / k;
            if clock > t {
                break;
            }
            let mut pick = r.random::<f64>() * k;
            for (mv, rate) in &gen.terms {
                if pick < *rate {
                    s = mv.apply(s);
                    break;
                }
                pick -= rate;
            }
        }
        counts[s] += 1;
    }
    CubeDistribution::new(phi.m, counts.iter().map(|&c| c as f64 / samples as f64).collect())
}

/// Every state within `z` binomial standard deviations (plus one count).
pub fn within_sigma(exact: &CubeDistribution, empirical: &CubeDistribution, samples: usize, z: f64) -> bool {
    let n = samples as f64;
    exact.probs.iter().zip(&empirical.probs).all(|(p, q)| (p - q).abs() <= z * (p * (1.0 - p) / n).sqrt() + 1.0 / n)
}
