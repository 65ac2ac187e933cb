//! Polarization, partial symmetrization and the symmetrizing iteration that
//! carries a product of linear factors to the polarization of a univariate
//! polynomial.

use crate::poly::{binomial, DensePoly, MultiAffinePoly, Scalar, MAX_MULTIAFFINE_ARITY};
use crate::roots::{roots_of_coeffs, trimmed_coeffs};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// `m`-th polarization: `x^j -> e_j(x_1..x_m) / C(m, j)`.
pub fn polarize_uni(f: &DensePoly, m: usize) -> Result<MultiAffinePoly> {
    let c = f.univariate_coeffs()?;
    let d = f.deg(0)?;
    if d > m {
        return Err(Error::DegreeBound(format!("degree {d} exceeds m = {m}")));
    }
    MultiAffinePoly::from_fn(m, |s| {
        let j = s.count_ones() as usize;
        if j <= d {
            c[j] / binomial(m, j)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn block_offsets(kappa: &[usize]) -> Vec<usize> {
    let mut off = Vec::with_capacity(kappa.len() + 1);
    let mut acc = 0;
    off.push(0);
    for &k in kappa {
        acc += k;
        off.push(acc);
    }
    off
}

fn block_counts(s: usize, off: &[usize]) -> Vec<usize> {
    off.windows(2)
        .map(|w| {
            let width = w[1] - w[0];
            let mask = if width == 0 { 0 } else { ((1usize << width) - 1) << w[0] };
            (s & mask).count_ones() as usize
        })
        .collect()
}

/// Multivariate polarization over `I(kappa)`: variable `x_i` becomes the block
/// `u_{i,1}..u_{i,kappa(i)}`, stored consecutively with block `i` before `i+1`.
pub fn polarize_multi(f: &DensePoly, kappa: &[usize]) -> Result<MultiAffinePoly> {
    if kappa.len() != f.arity() {
        return Err(Error::ArityMismatch { expected: f.arity(), got: kappa.len() });
    }
    for (i, (&d, &k)) in f.degrees().iter().zip(kappa).enumerate() {
        if d > k {
            return Err(Error::DegreeBound(format!("deg_{i} f = {d} exceeds {k}")));
        }
    }
    let n: usize = kappa.iter().sum();
    if n > MAX_MULTIAFFINE_ARITY {
        return Err(Error::CapExceeded { what: "polarized variables", needed: n as u128, cap: MAX_MULTIAFFINE_ARITY as u128 });
    }
    let off = block_offsets(kappa);
    MultiAffinePoly::from_fn(n, |s| {
        let alpha = block_counts(s, &off);
        let w: f64 = alpha.iter().zip(kappa).map(|(&a, &k)| binomial(k, a)).product();
        f.coeff(&alpha) / w
    })
}

/// Inverse of [`polarize_multi`] on the diagonal: set every `u_{i,k} = x_i`.
pub fn depolarize(g: &MultiAffinePoly, kappa: &[usize]) -> Result<DensePoly> {
    let n: usize = kappa.iter().sum();
    if n != g.arity() {
        return Err(Error::ArityMismatch { expected: n, got: g.arity() });
    }
    let off = block_offsets(kappa);
    let mut out = DensePoly::zeros(kappa.to_vec())?;
    for s in g.support(0.0) {
        let alpha = block_counts(s, &off);
        let old = out.coeff(&alpha);
        out.set_coeff(&alpha, old + g.coeff(s))?;
    }
    Ok(out)
}

/// `(1 - lambda) f + lambda f o tau_ij`. The flag reports whether `lambda`
/// lies in `[0, 1]`, the range where stability is preserved.
pub fn partial_symmetrize(f: &MultiAffinePoly, i: usize, j: usize, lambda: f64) -> Result<(MultiAffinePoly, bool)> {
    if !lambda.is_finite() {
        return Err(Error::NonFinite);
    }
    let swapped = f.swap(i, j)?;
    let g = f.scale(Complex64::new(1.0 - lambda, 0.0)).add(&swapped.scale(Complex64::new(lambda, 0.0)))?;
    Ok((g, (0.0..=1.0).contains(&lambda)))
}

#[derive(Clone, Debug, Serialize)]
pub struct ImbalanceReport {
    /// `((i, j), omega_ij)` for `i < j` in lexicographic order.
    pub pairwise: Vec<((usize, usize), f64)>,
    pub total: f64,
}

impl ImbalanceReport {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let key = (i.min(j), i.max(j));
        self.pairwise.iter().find(|(p, _)| *p == key).map(|x| x.1)
    }
}

/// `omega_ij = sum_S |c(S) - c(tau_ij S)|`.
pub fn omega(f: &MultiAffinePoly, i: usize, j: usize) -> f64 {
    let bi = 1 << i;
    let bj = 1 << j;
    let mut acc = 0.0;
    for s in 0..f.coeffs().len() {
        // only sets separating i and j move under the swap
        if (s & bi == 0) != (s & bj == 0) {
            let t = s ^ bi ^ bj;
            acc += (f.coeff(s) - f.coeff(t)).norm();
        }
    }
    acc
}

pub fn imbalance(f: &MultiAffinePoly) -> ImbalanceReport {
    let m = f.arity();
    let mut pairwise = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            pairwise.push(((i, j), omega(f, i, j)));
        }
    }
    let total = pairwise.iter().map(|x| x.1).sum();
    ImbalanceReport { pairwise, total }
}

#[derive(Clone, Debug)]
pub struct GwsOptions {
    /// Stop once the total imbalance is at most this; `None` means `1e-10 * ||F_0||`.
    pub tol: Option<f64>,
    pub max_iters: usize,
    pub lambda: f64,
}

impl Default for GwsOptions {
    fn default() -> Self {
        GwsOptions { tol: None, max_iters: 100_000, lambda: 0.5 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GwsRun {
    pub start: MultiAffinePoly,
    pub result: MultiAffinePoly,
    /// `||F_k||` for `k = 0, 1, ..`
    pub trace: Vec<f64>,
    /// pair symmetrized at each step
    pub pairs: Vec<(usize, usize)>,
    pub tol: f64,
    /// largest coefficient gap between `result` and [`polarize_uni`]
    pub deviation: f64,
    pub roots: Vec<Scalar>,
}

impl GwsRun {
    /// Largest observed `||F_{k+1}|| / ||F_k||` (0 when fewer than two entries).
    pub fn worst_ratio(&self) -> f64 {
        self.trace
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .fold(0.0, f64::max)
    }
}

/// `F_0 = c (x_1 - r_1) .. (x_n - r_n)` padded to `m` variables.
pub fn product_of_roots(lead: Scalar, roots: &[Scalar], m: usize) -> Result<MultiAffinePoly> {
    if roots.len() > m {
        return Err(Error::DegreeBound(format!("{} roots for {m} variables", roots.len())));
    }
    let mut f = MultiAffinePoly::zeros(m)?;
    f.set(0, lead)?;
    for (k, &r) in roots.iter().enumerate() {
        let mut lin = MultiAffinePoly::zeros(m)?;
        lin.set(1 << k, Complex64::new(1.0, 0.0))?;
        lin.set(0, -r)?;
        f = f.mul(&lin)?;
    }
    Ok(f)
}

/// Greedy symmetrization: start from the product of linear factors, repeatedly
/// apply `T_ij^(lambda)` to a pair of maximal imbalance (first such pair in
/// lexicographic order) until the total imbalance is at most `tol`.
pub fn gws_iterate(f: &DensePoly, m: usize, opts: &GwsOptions) -> Result<GwsRun> {
    let c = trimmed_coeffs(f)?.ok_or(Error::ZeroPolynomial)?;
    let n = c.len() - 1;
    if n > m {
        return Err(Error::DegreeBound(format!("degree {n} exceeds m = {m}")));
    }
    let roots = if n == 0 { vec![] } else { roots_of_coeffs(&c)?.roots };
    let start = product_of_roots(c[n], &roots, m)?;
    let mut cur = start.clone();
    let mut norm = imbalance(&cur).total;
    let tol = opts.tol.unwrap_or(1e-10 * norm);
    let mut trace = vec![norm];
    let mut pairs = Vec::new();
    while norm > tol {
        if pairs.len() >= opts.max_iters {
            return Err(Error::Internal(format!("no convergence after {} steps, imbalance {norm:e}", opts.max_iters)));
        }
        let rep = imbalance(&cur);
        let mut best = rep.pairwise[0];
        for &p in &rep.pairwise[1..] {
            if p.1 > best.1 {
                best = p;
            }
        }
        let (i, j) = best.0;
        cur = partial_symmetrize(&cur, i, j, opts.lambda)?.0;
        pairs.push((i, j));
        norm = imbalance(&cur).total;
        trace.push(norm);
    }
    let pol = polarize_uni(&DensePoly::univariate(&c)?, m)?;
    let deviation = cur.coeffs().iter().zip(pol.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let allowed = (tol * m as f64).max(1e-9 * (1.0 + pol.max_abs_coeff()));
    if deviation > allowed {
        return Err(Error::Internal(format!("iteration landed {deviation:e} away from the polarization")));
    }
    Ok(GwsRun { start, result: cur, trace, pairs, tol, deviation, roots })
}

/// `f_sh(x, y) = sum_S c(S) x^S e_{m-|S|}(y) / C(m, |S|)`, with `x` in
/// variables `0..m` and `y` in `m..2m`.
pub fn symmetric_homogenize(f: &MultiAffinePoly) -> Result<MultiAffinePoly> {
    let m = f.arity();
    let lo = (1usize << m) - 1;
    MultiAffinePoly::from_fn(2 * m, |mask| {
        let s = mask & lo;
        let t = mask >> m;
        let k = s.count_ones() as usize;
        if t.count_ones() as usize == m - k {
            f.coeff(s) / binomial(m, k)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ClosureOp;

    fn u(c: &[f64]) -> DensePoly {
        DensePoly::univariate_real(c).unwrap()
    }

    fn ma(m: usize, t: &[(usize, f64)]) -> MultiAffinePoly {
        MultiAffinePoly::from_real_terms(m, t).unwrap()
    }

    /// Diagonal restriction `x_1 = .. = x_m = x` by repeated diagonalization.
    fn diag(f: &MultiAffinePoly) -> DensePoly {
        let mut d = f.to_dense();
        for i in 1..f.arity() {
            d = ClosureOp::Diagonalize { i, j: 0 }.apply(&d).unwrap();
        }
        let mut p = d;
        for _ in 1..f.arity() {
            p = p.drop_variable(1).unwrap();
        }
        p
    }

    #[test]
    fn polarize_uni_examples() {
        let p = polarize_uni(&u(&[-1.0, 0.0, 1.0]), 2).unwrap();
        assert!(p.approx_eq(&ma(2, &[(0b11, 1.0), (0, -1.0)]), 1e-15));
        let p = polarize_uni(&u(&[0.0, 1.0]), 2).unwrap();
        assert!(p.approx_eq(&ma(2, &[(0b01, 0.5), (0b10, 0.5)]), 1e-15));
        let f = u(&[1.0, 0.0, 10.0, 0.0, 0.0, 1.0]);
        let p = polarize_uni(&f, 5).unwrap();
        assert!((p.coeff(0b00011).re - 1.0).abs() < 1e-14);
        assert!(diag(&p).approx_eq(&f, 1e-12));
        assert!(polarize_uni(&f, 4).is_err());
    }

    #[test]
    fn polarize_multi_examples() {
        let f = DensePoly::from_real_terms(2, &[(vec![1, 1], 1.0)]).unwrap();
        assert!(polarize_multi(&f, &[1, 1]).unwrap().approx_eq(&ma(2, &[(0b11, 1.0)]), 0.0));
        let f = DensePoly::from_real_terms(1, &[(vec![2], 1.0)]).unwrap();
        assert!(polarize_multi(&f, &[2]).unwrap().approx_eq(&ma(2, &[(0b11, 1.0)]), 0.0));
        let f = DensePoly::from_real_terms(2, &[(vec![2, 1], 1.0)]).unwrap();
        let p = polarize_multi(&f, &[2, 1]).unwrap();
        assert!(p.approx_eq(&ma(3, &[(0b111, 1.0)]), 0.0));
        let g = DensePoly::from_real_terms(2, &[(vec![2, 1], 3.0), (vec![1, 0], -1.0), (vec![0, 1], 2.0)]).unwrap();
        let back = depolarize(&polarize_multi(&g, &[3, 2]).unwrap(), &[3, 2]).unwrap();
        assert!(back.approx_eq(&g, 1e-14));
    }

    #[test]
    fn partial_symmetrize_examples() {
        let (g, ok) = partial_symmetrize(&ma(2, &[(0b01, 1.0)]), 0, 1, 0.5).unwrap();
        assert!(ok && g.approx_eq(&ma(2, &[(0b01, 0.5), (0b10, 0.5)]), 1e-15));
        let f = ma(2, &[(0b11, 1.0), (0b01, -2.0), (0b10, -1.0), (0, 2.0)]);
        let (g, _) = partial_symmetrize(&f, 0, 1, 0.5).unwrap();
        assert!(g.approx_eq(&ma(2, &[(0b11, 1.0), (0b01, -1.5), (0b10, -1.5), (0, 2.0)]), 1e-15));
        let (_, ok) = partial_symmetrize(&f, 0, 1, 1.5).unwrap();
        assert!(!ok);
    }

    #[test]
    fn imbalance_examples() {
        let f = ma(2, &[(0b11, 1.0), (0b01, -2.0), (0b10, -1.0), (0, 2.0)]);
        let r = imbalance(&f);
        assert_eq!(r.get(0, 1), Some(2.0));
        assert_eq!(r.total, 2.0);
        assert_eq!(imbalance(&ma(2, &[(0b01, 1.0)])).total, 2.0);
        assert_eq!(imbalance(&MultiAffinePoly::elementary_symmetric(4, 2).unwrap()).total, 0.0);
    }

    #[test]
    fn gws_examples() {
        let run = gws_iterate(&u(&[2.0, -3.0, 1.0]), 2, &GwsOptions::default()).unwrap();
        assert_eq!(run.pairs.len(), 1);
        assert!(run.result.approx_eq(&ma(2, &[(0b11, 1.0), (0b01, -1.5), (0b10, -1.5), (0, 2.0)]), 1e-12));
        let run = gws_iterate(&u(&[0.0, 1.0]), 1, &GwsOptions::default()).unwrap();
        assert_eq!(run.trace, vec![0.0]);
        let run = gws_iterate(&u(&[1.0, 0.0, 10.0, 0.0, 0.0, 1.0]), 5, &GwsOptions::default()).unwrap();
        assert!(run.worst_ratio() <= 0.9 + 1e-12);
        assert!(run.deviation < 1e-8);
    }

    #[test]
    fn homogenize_examples() {
        let h = symmetric_homogenize(&ma(1, &[(0, 1.0)])).unwrap();
        assert!(h.approx_eq(&ma(2, &[(0b10, 1.0)]), 0.0));
        let h = symmetric_homogenize(&ma(1, &[(1, 1.0)])).unwrap();
        assert!(h.approx_eq(&ma(2, &[(0b01, 1.0)]), 0.0));
        let h = symmetric_homogenize(&ma(2, &[(0, 1.0), (0b11, 1.0)])).unwrap();
        assert!(h.approx_eq(&ma(4, &[(0b1100, 1.0), (0b0011, 1.0)]), 0.0));
        let f = ma(3, &[(0, 2.0), (0b101, -1.0), (0b010, 3.0)]);
        let h = symmetric_homogenize(&f).unwrap();
        assert_eq!(h.homogeneous_degree(), Some(3));
        let z = [Complex64::new(0.3, 0.1), Complex64::new(-2.0, 0.0), Complex64::new(1.0, 1.0)];
        let mut w = z.to_vec();
        w.extend([Complex64::new(1.0, 0.0); 3]);
        assert!((h.evaluate(&w).unwrap() - f.evaluate(&z).unwrap()).norm() < 1e-12);
    }
}
