//! Capacity `cap(f) = inf_{c > 0} f(c) / (c_1 .. c_m)` and the lower bounds
//! on mixed partial derivatives built from it.

mod mixed;
mod permanent;

pub use mixed::{bapat_suite, diagonal_lift, mixed_discriminant, operator_sinkhorn, BapatReport};
pub use permanent::{linear_product_poly, permanent, sinkhorn, vdw_suite, Sinkhorn, VdwReport};

use crate::detpoly::HermitianMatrix;
use crate::poly::{DensePoly, EPS_ZERO};
use crate::roots::roots;
use crate::rng::DEFAULT_SEED;
use crate::stability::{probe_stable, RegionSpec, StabilityVerdict, DEFAULT_PROBES};
use crate::{Error, Result};
use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use serde::Serialize;

/// `G(d) = (1 - 1/d)^(d-1)`, with `G(0) = 1`.
pub fn g_factor(d: usize) -> f64 {
    if d <= 1 {
        return 1.0;
    }
    let d = d as f64;
    (1.0 - 1.0 / d).powf(d - 1.0)
}

/// `m! / m^m`.
pub fn vdw_bound(m: usize) -> f64 {
    (1..=m).map(|k| k as f64 / m as f64).product()
}

pub const CAP_GRAD_TOL: f64 = 1e-8;
pub const CAP_DIVERGENCE: f64 = 1e3;
const CAP_MAX_ITERS: usize = 100_000;

/// `y -> log f(e^y)` and its gradient, for some `f` with nonnegative coefficients.
pub trait LogObjective {
    fn arity(&self) -> usize;
    fn log_value(&self, y: &[f64]) -> f64;
    fn log_grad(&self, y: &[f64]) -> Vec<f64>;
}

/// A polynomial given by its positive terms; log-sum-exp evaluation.
pub struct PositiveTerms {
    arity: usize,
    terms: Vec<(f64, Vec<f64>)>,
}

impl PositiveTerms {
    /// Coefficients must be real and at least `-1e-12 * max|c|`; small negatives are dropped.
    pub fn new(f: &DensePoly) -> Result<Self> {
        let scale = f.max_abs_coeff().max(1.0);
        let mut terms = Vec::new();
        for (alpha, c) in f.terms() {
            if c.im.abs() > EPS_ZERO * scale {
                return Err(Error::NotReal);
            }
            if c.re < -1e-12 * scale {
                return Err(Error::NegativeCoefficient { value: c.re });
            }
            if c.re > 0.0 {
                terms.push((c.re.ln(), alpha.iter().map(|&a| a as f64).collect()));
            }
        }
        if terms.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(PositiveTerms { arity: f.arity(), terms })
    }

    fn exponents(&self, y: &[f64]) -> Vec<f64> {
        self.terms.iter().map(|(lc, a)| lc + a.iter().zip(y).map(|(a, y)| a * y).sum::<f64>()).collect()
    }
}

impl LogObjective for PositiveTerms {
    fn arity(&self) -> usize {
        self.arity
    }

    fn log_value(&self, y: &[f64]) -> f64 {
        let e = self.exponents(y);
        let top = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        top + e.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
    }

    fn log_grad(&self, y: &[f64]) -> Vec<f64> {
        let e = self.exponents(y);
        let top = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = e.iter().map(|v| (v - top).exp()).collect();
        let total: f64 = w.iter().sum();
        let mut g = vec![0.0; self.arity];
        for ((_, a), w) in self.terms.iter().zip(&w) {
            for (gi, ai) in g.iter_mut().zip(a) {
                *gi += w * ai;
            }
        }
        g.iter_mut().for_each(|v| *v /= total);
        g
    }
}

/// `f_B(x) = prod_j (sum_i b_ij x_i)` without expanding it.
pub struct LinearForms {
    b: DMatrix<f64>,
}

impl LinearForms {
    pub fn new(b: DMatrix<f64>) -> Result<Self> {
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(v) = b.iter().find(|&&v| v < 0.0) {
            return Err(Error::NegativeCoefficient { value: *v });
        }
        Ok(LinearForms { b })
    }

    fn forms(&self, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let c: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        let s = (0..self.b.ncols()).map(|j| (0..self.b.nrows()).map(|i| self.b[(i, j)] * c[i]).sum()).collect();
        (c, s)
    }
}

impl LogObjective for LinearForms {
    fn arity(&self) -> usize {
        self.b.nrows()
    }

    fn log_value(&self, y: &[f64]) -> f64 {
        self.forms(y).1.iter().map(|s| s.ln()).sum()
    }

    fn log_grad(&self, y: &[f64]) -> Vec<f64> {
        let (c, s) = self.forms(y);
        (0..self.b.nrows()).map(|i| (0..self.b.ncols()).map(|j| self.b[(i, j)] * c[i] / s[j]).sum()).collect()
    }
}

/// `det(sum_i x_i A_i)` for PSD `A_i`, through a Cholesky factorization.
pub struct PencilLogDet {
    mats: Vec<DMatrix<Complex64>>,
}

impl PencilLogDet {
    pub fn new(mats: &[HermitianMatrix]) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::InvalidArgument("no matrices".into()));
        }
        if mats.iter().any(|a| !a.is_psd()) {
            return Err(Error::MatrixCondition("positive semidefinite"));
        }
        Ok(PencilLogDet { mats: mats.iter().map(|a| a.matrix().clone()).collect() })
    }

    fn at(&self, y: &[f64]) -> DMatrix<Complex64> {
        let n = self.mats[0].nrows();
        let mut m = DMatrix::zeros(n, n);
        for (a, y) in self.mats.iter().zip(y) {
            m += a * Complex64::new(y.exp(), 0.0);
        }
        m
    }
}

impl LogObjective for PencilLogDet {
    fn arity(&self) -> usize {
        self.mats.len()
    }

    fn log_value(&self, y: &[f64]) -> f64 {
        match Cholesky::new(self.at(y)) {
            Some(ch) => 2.0 * ch.l_dirty().diagonal().iter().map(|d| d.re.ln()).sum::<f64>(),
            None => f64::NEG_INFINITY,
        }
    }

    fn log_grad(&self, y: &[f64]) -> Vec<f64> {
        let Some(ch) = Cholesky::new(self.at(y)) else {
            return vec![f64::NAN; self.mats.len()];
        };
        self.mats.iter().zip(y).map(|(a, y)| y.exp() * ch.solve(a).trace().re).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityReport {
    pub cap_estimate: f64,
    /// `c* = e^y*`
    pub minimizer: Vec<f64>,
    pub gradient_norm: f64,
    pub diverged: bool,
    pub iterations: usize,
    /// `F(y) = log f(e^y) - sum y` never increased along accepted steps, up to rounding
    pub monotone: bool,
}

/// Gradient descent on the convex `F(y) = log f(e^y) - sum y` with
/// Barzilai-Borwein step guesses and backtracking.
pub fn minimize_log_ratio(obj: &dyn LogObjective) -> Result<CapacityReport> {
    let m = obj.arity();
    let value = |y: &[f64]| obj.log_value(y) - y.iter().sum::<f64>();
    let grad = |y: &[f64]| -> Vec<f64> { obj.log_grad(y).into_iter().map(|g| g - 1.0).collect() };
    let inf_norm = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));

    let mut y = vec![0.0; m];
    let mut fy = value(&y);
    let mut g = grad(&y);
    if !fy.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut step = 1.0 / inf_norm(&g).max(1.0);
    let mut monotone = true;
    let mut diverged = false;
    let mut iterations = 0;
    while inf_norm(&g) > CAP_GRAD_TOL {
        if inf_norm(&y) > CAP_DIVERGENCE {
            diverged = true;
            break;
        }
        if iterations == CAP_MAX_ITERS {
            return Err(Error::NoConvergence(format!("capacity descent stalled at |grad| = {:.3e}", inf_norm(&g))));
        }
        iterations += 1;
        let gg: f64 = g.iter().map(|v| v * v).sum();
        let mut alpha = step;
        let mut accepted = None;
        for _ in 0..80 {
            let cand: Vec<f64> = y.iter().zip(&g).map(|(y, g)| y - alpha * g).collect();
            let fc = value(&cand);
            if fc.is_finite() {
                let armijo = fc <= fy - 1e-4 * alpha * gg;
                // near the optimum the decrease is below rounding in F
                let flat = fc <= fy + 4.0 * f64::EPSILON * fy.abs().max(1.0);
                if armijo || flat {
                    let gc = grad(&cand);
                    if armijo || inf_norm(&gc) < inf_norm(&g) {
                        accepted = Some((cand, fc, gc));
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        let Some((ny, nf, ng)) = accepted else {
            return Err(Error::NoConvergence(format!("line search failed at |grad| = {:.3e}", inf_norm(&g))));
        };
        if nf > fy + 4.0 * f64::EPSILON * fy.abs().max(1.0) {
            monotone = false;
        }
        let s: Vec<f64> = ny.iter().zip(&y).map(|(a, b)| a - b).collect();
        let d: Vec<f64> = ng.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sd: f64 = s.iter().zip(&d).map(|(a, b)| a * b).sum();
        let ss: f64 = s.iter().map(|v| v * v).sum();
        step = if sd > 0.0 { (ss / sd).clamp(1e-10, 1e6) } else { (alpha * 2.0).min(1e6) };
        y = ny;
        fy = nf;
        g = ng;
    }
    Ok(CapacityReport {
        cap_estimate: fy.exp(),
        minimizer: y.iter().map(|v| v.exp()).collect(),
        gradient_norm: inf_norm(&g),
        diverged,
        iterations,
        monotone,
    })
}

/// `cap(f)` for a homogeneous `f` with nonnegative real coefficients.
pub fn cap(f: &DensePoly) -> Result<CapacityReport> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.homogeneous_degree().is_none() {
        return Err(Error::NotHomogeneous);
    }
    minimize_log_ratio(&PositiveTerms::new(f)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundChain {
    /// coefficient of `x_1 .. x_m`
    pub coeff: f64,
    pub cap: CapacityReport,
    pub degrees: Vec<usize>,
    /// `G(min(i, d_i))` for `i = 2..m` (1-based)
    pub g_factors: Vec<f64>,
    pub bound: f64,
    /// `m!/m^m * cap`
    pub weak_bound: f64,
    pub slack: f64,
    pub stability: StabilityVerdict,
}

impl BoundChain {
    pub fn holds(&self) -> bool {
        self.slack >= -1e-9
    }
}

/// `coeff(x_1..x_m) >= cap(f) prod_{i>=2} G(min(i, deg_i f))` for a stable
/// `f` with nonnegative coefficients, homogeneous of degree `m`.
pub fn bound_chain(f: &DensePoly) -> Result<BoundChain> {
    let m = f.arity();
    match f.homogeneous_degree() {
        None => return Err(Error::NotHomogeneous),
        Some(d) if d != m => return Err(Error::DegreeBound(format!("degree {d} differs from arity {m}"))),
        _ => {}
    }
    let stability = probe_stable(f, DEFAULT_PROBES, DEFAULT_SEED, &RegionSpec::UpperHalfPlane)?;
    if stability.is_falsified() {
        return Err(Error::InvalidArgument("input is not stable".into()));
    }
    let cap = cap(f)?;
    let degrees = f.degrees();
    let g_factors: Vec<f64> = (2..=m).map(|i| g_factor(i.min(degrees[i - 1]))).collect();
    let bound = cap.cap_estimate * g_factors.iter().product::<f64>();
    let weak_bound = vdw_bound(m) * cap.cap_estimate;
    if bound < weak_bound * (1.0 - 1e-12) {
        return Err(Error::Internal(format!("bound {bound} below m!/m^m bound {weak_bound}")));
    }
    let coeff = f.coeff(&vec![1; m]).re;
    Ok(BoundChain { coeff, slack: coeff - bound, cap, degrees, g_factors, bound, weak_bound, stability })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EqualityCase {
    pub is_power_of_linear: bool,
    pub a: Option<Vec<f64>>,
}

/// Is `f = (a_1 x_1 + .. + a_m x_m)^m` with `a >= 0`?
pub fn equality_case(f: &DensePoly) -> Result<EqualityCase> {
    let m = f.arity();
    let no = EqualityCase { is_power_of_linear: false, a: None };
    if f.homogeneous_degree() != Some(m) || !f.is_real() {
        return Ok(no);
    }
    let mut a = Vec::with_capacity(m);
    for i in 0..m {
        let mut e = vec![0; m];
        e[i] = m;
        let c = f.coeff(&e).re;
        if c < 0.0 {
            return Ok(no);
        }
        a.push(c.powf(1.0 / m as f64));
    }
    let terms: Vec<(Vec<usize>, f64)> = a
        .iter()
        .enumerate()
        .map(|(i, &ai)| {
            let mut e = vec![0; m];
            e[i] = 1;
            (e, ai)
        })
        .collect();
    let candidate = DensePoly::from_real_terms(m, &terms)?.pow(m)?;
    let tol = 1e-8 * f.max_abs_coeff().max(candidate.max_abs_coeff());
    if candidate.approx_eq(f, tol) {
        Ok(EqualityCase { is_power_of_linear: true, a: Some(a) })
    } else {
        Ok(no)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootBound {
    pub degree: usize,
    /// `f'(0)`
    pub b1: f64,
    /// `inf_{c > 0} f(c) / c`
    pub cap: f64,
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
    /// `xi` when `f = b_d (x + xi)^d`
    pub equality_form: Option<f64>,
}

/// `f'(0) >= G(d) inf_{c>0} f(c)/c` for real-rooted `f` with nonnegative coefficients.
pub fn cap_root_bound(f: &DensePoly) -> Result<RootBound> {
    let f = f.trim();
    let cs: Vec<f64> = f.univariate_coeffs()?.iter().map(|c| c.re).collect();
    if !f.is_real() {
        return Err(Error::NotReal);
    }
    let scale = f.max_abs_coeff();
    if scale == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    if let Some(v) = cs.iter().find(|&&v| v < -1e-12 * scale) {
        return Err(Error::NegativeCoefficient { value: *v });
    }
    let d = cs.len() - 1;
    if d > 0 && !roots(&f)?.is_real() {
        return Err(Error::NotRealRooted);
    }
    let b1 = cs.get(1).copied().unwrap_or(0.0);
    let cap = if d == 0 {
        0.0
    } else if cs[0] <= 0.0 || d == 1 {
        // f(c)/c decreases (d = 1) or increases (b_0 = 0) towards b_1
        b1
    } else {
        let ratio = |t: f64| cs.iter().rev().fold(0.0, |acc, c| acc * t.exp() + c) / t.exp();
        golden_min(ratio, -60.0, 60.0)
    };
    let bound = g_factor(d) * cap;
    let slack = b1 - bound;
    let equality_form = if d >= 1 {
        let xi = cs[d - 1] / (d as f64 * cs[d]);
        let p = DensePoly::univariate_real(&[xi, 1.0])?.pow(d)?.scale(Complex64::new(cs[d], 0.0));
        p.approx_eq(&f, 1e-8 * scale).then_some(xi)
    } else {
        None
    };
    Ok(RootBound { degree: d, b1, cap, bound, slack, holds: slack >= -1e-9 * scale, equality_form })
}

/// Minimum of a unimodal function on `[lo, hi]`: coarse grid, then golden sections.
fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let n: usize = 240;
    let h = (hi - lo) / n as f64;
    let best = (0..=n).min_by(|&a, &b| f(lo + h * a as f64).total_cmp(&f(lo + h * b as f64))).unwrap_or(0);
    let (mut a, mut b) = (lo + h * best.saturating_sub(1) as f64, lo + h * (best + 1).min(n) as f64);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    for _ in 0..200 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    f((a + b) / 2.0)
}
