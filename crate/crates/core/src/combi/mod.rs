//! Circular-region conjugation, Schur-Hadamard products, Lee-Yang
//! polynomials, phase normalization, and support combinatorics.

mod support;

pub use support::{jump_system_check, log_submodular_check, JumpReport, LogSubmodularReport, SupportSet};

use crate::detpoly::HermitianMatrix;
use crate::poly::{binomial, DensePoly, MultiAffinePoly, Scalar, EPS_ZERO};
use crate::roots::roots;
use crate::stability::{moebius_conjugate, probe_stable, LinOpSpec, RegionSpec, StabilityVerdict};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

/// `z -> (d z - b) / (-c z + a)`.
pub fn inverse_map(m: [Scalar; 4]) -> [Scalar; 4] {
    [m[3], -m[1], -m[2], m[0]]
}

/// Conjugation by one Moebius map per coordinate.
pub fn conjugate(f: &DensePoly, maps: &[[Scalar; 4]]) -> Result<DensePoly> {
    if maps.len() != f.arity() {
        return Err(Error::ArityMismatch { expected: f.arity(), got: maps.len() });
    }
    moebius_conjugate(f, &RegionSpec::Moebius(maps.to_vec()))
}

/// Coefficientwise product `sum_S a(S) b(S) x^S`.
pub fn schur_hadamard(f: &MultiAffinePoly, g: &MultiAffinePoly) -> Result<MultiAffinePoly> {
    if f.arity() != g.arity() {
        return Err(Error::ArityMismatch { expected: f.arity(), got: g.arity() });
    }
    MultiAffinePoly::from_fn(f.arity(), |s| f.coeff(s) * g.coeff(s))
}

/// `T_g(f) = f . g` as a linear map on multiaffine polynomials.
pub fn schur_hadamard_operator(g: &MultiAffinePoly) -> Result<LinOpSpec> {
    let m = g.arity();
    LinOpSpec::multiplier(vec![1; m], |a| {
        let s: usize = a.iter().enumerate().map(|(i, &e)| e << i).sum();
        g.coeff(s)
    })
}

/// `T((1 + x y)^kappa) = sum_a C(kappa, a) T(x^a) y^a`, `y` after `x`; the
/// symbol whose Schur stability decides whether `T` preserves it.
pub fn disc_symbol(t: &LinOpSpec) -> Result<DensePoly> {
    let m = t.arity();
    let n = t.out_arity();
    let shape = DensePoly::zeros(t.kappa().to_vec())?;
    let mut terms: Vec<(Vec<usize>, Scalar)> = Vec::new();
    for idx in 0..shape.volume() {
        let a = shape.exps_of(idx);
        let w: f64 = t.kappa().iter().zip(&a).map(|(&k, &e)| binomial(k, e)).product();
        for (e, c) in t.image(&a).expect("in box").terms() {
            let mut exps = e.clone();
            exps.extend_from_slice(&a);
            terms.push((exps, c * w));
        }
    }
    if terms.is_empty() {
        return Ok(DensePoly::constant(n + m, Complex64::new(0.0, 0.0)));
    }
    DensePoly::from_terms(n + m, &terms)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchurHadamardReport {
    pub product: MultiAffinePoly,
    pub f: StabilityVerdict,
    pub g: StabilityVerdict,
    pub product_verdict: StabilityVerdict,
}

impl SchurHadamardReport {
    /// Schur stable inputs must give a Schur stable product.
    pub fn consistent(&self) -> bool {
        !(self.f.is_consistent_with_stable() && self.g.is_consistent_with_stable()) || self.product_verdict.is_consistent_with_stable()
    }
}

/// Probes both factors and the product on the unit polydisc.
pub fn schur_hadamard_suite(f: &MultiAffinePoly, g: &MultiAffinePoly, n_probes: usize, seed: u64) -> Result<SchurHadamardReport> {
    let product = schur_hadamard(f, g)?;
    let d = RegionSpec::UnitDisc;
    Ok(SchurHadamardReport {
        f: probe_stable(&f.to_dense(), n_probes, seed, &d)?,
        g: probe_stable(&g.to_dense(), n_probes, seed, &d)?,
        product_verdict: probe_stable(&product.to_dense(), n_probes, seed, &d)?,
        product,
    })
}

pub const UNIT_CIRCLE_TOL: f64 = 1e-7;
pub const MAX_LEE_YANG_SITES: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeeYang {
    pub f: MultiAffinePoly,
    /// `g(x) = f(x, .., x)`
    pub g: DensePoly,
    /// `c(S^c) = conj c(S)` for every `S` and `g_{m-k} = conj g_k`, compared bit for bit
    pub palindromic: bool,
    pub roots: Vec<Scalar>,
    pub max_circle_deviation: f64,
    pub unit_circle: bool,
}

/// Sum of a multiset of complex numbers that does not depend on its order:
/// real parts ascending, imaginary parts as sorted positive minus sorted
/// negative magnitudes. Conjugating every term conjugates the sum exactly.
fn canonical_sum(values: &[Scalar]) -> Scalar {
    let sorted_sum = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v.iter().sum::<f64>()
    };
    let re = sorted_sum(values.iter().map(|z| z.re).collect());
    let pos = sorted_sum(values.iter().map(|z| z.im).filter(|v| *v > 0.0).collect());
    let neg = sorted_sum(values.iter().map(|z| -z.im).filter(|v| *v > 0.0).collect());
    Complex64::new(re, pos - neg)
}

/// `f(x) = sum_S x^S prod_{i in S, j not in S} a_ij` and its diagonal.
pub fn lee_yang(a: &HermitianMatrix) -> Result<LeeYang> {
    let m = a.n();
    if m > MAX_LEE_YANG_SITES {
        return Err(Error::CapExceeded { what: "sites", needed: m as u128, cap: MAX_LEE_YANG_SITES as u128 });
    }
    let mat = a.matrix();
    if let Some(z) = mat.iter().find(|z| z.norm() > 1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("entry of modulus {} exceeds 1", z.norm())));
    }
    // pairs p < q in a fixed order; factor a_pq if p in S, else a_qp
    let f = MultiAffinePoly::from_fn(m, |s| {
        let mut c = Complex64::new(1.0, 0.0);
        for p in 0..m {
            for q in p + 1..m {
                match (s >> p & 1, s >> q & 1) {
                    (1, 0) => c *= mat[(p, q)],
                    (0, 1) => c *= mat[(p, q)].conj(),
                    _ => {}
                }
            }
        }
        c
    })?;
    let full = (1usize << m) - 1;
    let mut by_degree: Vec<Vec<Scalar>> = vec![Vec::new(); m + 1];
    for s in 0..=full {
        by_degree[s.count_ones() as usize].push(f.coeff(s));
    }
    let gc: Vec<Scalar> = by_degree.iter().map(|v| canonical_sum(v)).collect();
    let palindromic =
        (0..=full).all(|s| f.coeff(full ^ s) == f.coeff(s).conj()) && (0..=m).all(|k| gc[m - k] == gc[k].conj());
    let g = DensePoly::univariate(&gc)?;
    let rl = roots(&g)?;
    let max_circle_deviation = rl.roots.iter().map(|r| (r.norm() - 1.0).abs()).fold(0.0, f64::max);
    Ok(LeeYang {
        f,
        g,
        palindromic,
        unit_circle: max_circle_deviation <= UNIT_CIRCLE_TOL,
        roots: rl.roots,
        max_circle_deviation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseNormalization {
    /// in `[0, 2 pi)`
    pub theta: f64,
    /// `e^{-i theta} f`
    pub normalized: DensePoly,
    pub hurwitz: StabilityVerdict,
}

/// `theta` is the argument of the lexicographically first nonzero
/// coefficient; other choices differ only when the check below fails.
pub fn phase_normalize(f: &DensePoly, n_probes: usize, seed: u64) -> Result<PhaseNormalization> {
    let mut terms: Vec<(Vec<usize>, Scalar)> = f.terms().into_iter().filter(|(_, c)| c.norm() > EPS_ZERO).collect();
    if terms.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    let parity = |e: &[usize]| e.iter().sum::<usize>() % 2;
    let p0 = parity(&terms[0].0);
    if terms.iter().any(|(e, _)| parity(e) != p0) {
        return Err(Error::InvalidArgument("terms of both parities".into()));
    }
    let hurwitz = probe_stable(f, n_probes, seed, &RegionSpec::RightHalfPlane)?;
    if hurwitz.is_falsified() {
        return Err(Error::NotCertifiable("input has a zero in the open right half-plane".into()));
    }
    let theta = terms[0].1.arg().rem_euclid(TAU);
    let rot = Complex64::from_polar(1.0, -theta);
    let normalized = f.scale(rot);
    let tol = 1e-9 * f.max_abs_coeff().max(1.0);
    if let Some(c) = normalized.coeffs().iter().find(|c| c.im.abs() > tol || c.re < -tol) {
        return Err(Error::NotCertifiable(format!("rotated coefficient {c} is not real nonnegative; input is not Hurwitz stable")));
    }
    Ok(PhaseNormalization { theta, normalized: normalized.map_coeffs(|c| Complex64::new(c.re, 0.0)), hurwitz })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng;
    use rand::Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Scalar {
        Complex64::new(re, im)
    }

    #[test]
    fn conjugation_examples() {
        let f = DensePoly::from_real_terms(2, &[(vec![1, 1], 1.0), (vec![0, 0], 2.0), (vec![1, 0], -3.0)]).unwrap();
        let id = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(conjugate(&f, &[id, id]).unwrap().approx_eq(&f, 0.0));
        let inv = [c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let g = conjugate(&f, &[inv, id]).unwrap();
        assert!(g.approx_eq(&f.invert(0).unwrap(), 1e-15));
        // round trip gives f times (ad - bc)^deg
        let m = [c(2.0, 1.0), c(0.5, 0.0), c(-1.0, 0.3), c(1.0, -2.0)];
        let back = conjugate(&conjugate(&f, &[m, m]).unwrap(), &[inverse_map(m), inverse_map(m)]).unwrap();
        let det = m[0] * m[3] - m[1] * m[2];
        assert!(back.approx_eq(&f.scale(det * det), 1e-12));
    }

    #[test]
    fn half_plane_to_disc() {
        // x + i vanishes only at -i; pulled to the disc it has no roots inside
        let f = DensePoly::univariate(&[c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        let cayley_inv = inverse_map(RegionSpec::UnitDisc.map_for(0).unwrap());
        let g = conjugate(&f, &[cayley_inv]).unwrap();
        assert!(roots(&g).unwrap().roots.iter().all(|r| r.norm() >= 1.0 - 1e-12));
        assert!(probe_stable(&g, 100, 0, &RegionSpec::UnitDisc).unwrap().is_consistent_with_stable());
        // x - i has its root at i, which lands at the centre of the disc
        let f = DensePoly::univariate(&[c(0.0, -1.0), c(1.0, 0.0)]).unwrap();
        let g = conjugate(&f, &[cayley_inv]).unwrap();
        assert!(roots(&g).unwrap().roots[0].norm() < 1e-12);
        assert!(probe_stable(&g, 100, 0, &RegionSpec::UnitDisc).unwrap().is_falsified());
    }

    #[test]
    fn schur_hadamard_examples() {
        let f = MultiAffinePoly::from_real_terms(1, &[(0, 1.0), (1, 1.0)]).unwrap();
        assert!(schur_hadamard(&f, &f).unwrap().approx_eq(&f, 0.0));
        let ones = MultiAffinePoly::from_fn(3, |_| c(1.0, 0.0)).unwrap();
        let g = MultiAffinePoly::from_fn(3, |s| c(s as f64, -(s as f64) / 2.0)).unwrap();
        assert!(schur_hadamard(&g, &ones).unwrap().approx_eq(&g, 0.0));
        let mut r = rng(2);
        let mut prod = |m: usize| {
            (0..m).fold(MultiAffinePoly::from_real_terms(m, &[(0, 1.0)]).unwrap(), |acc, i| {
                let a = Complex64::from_polar(r.random_range(0.0..1.0), r.random_range(0.0..TAU));
                acc.mul(&MultiAffinePoly::from_fn(m, |s| if s == 0 { c(1.0, 0.0) } else if s == 1 << i { a } else { c(0.0, 0.0) }).unwrap())
                    .unwrap()
            })
        };
        let (f, g) = (prod(3), prod(3));
        let rep = schur_hadamard_suite(&f, &g, 100, 4).unwrap();
        assert!(rep.f.is_probe_passed() && rep.g.is_probe_passed() && rep.product_verdict.is_probe_passed());
    }

    #[test]
    fn hinkkanen_identity() {
        let g = MultiAffinePoly::from_fn(2, |s| c(1.0 + s as f64, 0.5 * s as f64)).unwrap();
        let sym = disc_symbol(&schur_hadamard_operator(&g).unwrap()).unwrap();
        // g(x1 y1, x2 y2): x^S y^S carries g(S)
        for s in 0..4usize {
            let e = [s & 1, s >> 1 & 1, s & 1, s >> 1 & 1];
            assert_eq!(sym.coeff(&e), g.coeff(s));
        }
        assert_eq!(sym.terms().iter().filter(|(_, v)| v.norm() > 0.0).count(), 4);
    }

    #[test]
    fn lee_yang_examples() {
        let one = lee_yang(&HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()).unwrap();
        assert_eq!(one.g.univariate_coeffs().unwrap(), &[c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        assert!(one.palindromic && one.unit_circle);
        assert!(one.roots.iter().all(|r| (r - c(-1.0, 0.0)).norm() < 1e-6));

        let m = nalgebra::DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]);
        let ly = lee_yang(&HermitianMatrix::new(m).unwrap()).unwrap();
        assert_eq!(ly.f.coeff(0b01), c(0.0, 1.0));
        assert_eq!(ly.f.coeff(0b10), c(0.0, -1.0));
        assert_eq!(ly.g.univariate_coeffs().unwrap(), &[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(ly.palindromic && ly.unit_circle);

        let single = lee_yang(&HermitianMatrix::from_real_rows(&[vec![0.3]]).unwrap()).unwrap();
        assert!((single.roots[0] + 1.0).norm() < 1e-12);
        assert!(lee_yang(&HermitianMatrix::from_real_rows(&[vec![0.0, 1.5], vec![1.5, 0.0]]).unwrap()).is_err());
    }

    #[test]
    fn phase_examples() {
        let base = DensePoly::from_real_terms(2, &[(vec![1, 1], 1.0), (vec![0, 0], 1.0)]).unwrap();
        let p = phase_normalize(&base.scale(c(0.0, 1.0)), 100, 0).unwrap();
        assert!((p.theta - PI / 2.0).abs() < 1e-15);
        assert!(p.normalized.approx_eq(&base, 1e-15));
        assert_eq!(phase_normalize(&base, 100, 0).unwrap().theta, 0.0);
        let lin = DensePoly::from_real_terms(2, &[(vec![1, 0], 1.0), (vec![0, 1], 1.0)]).unwrap();
        let p = phase_normalize(&lin.scale(Complex64::from_polar(1.0, PI / 3.0)), 100, 0).unwrap();
        assert!((p.theta - PI / 3.0).abs() < 1e-15);
        let mixed = DensePoly::from_real_terms(1, &[(vec![1], 1.0), (vec![0], 1.0)]).unwrap();
        assert!(phase_normalize(&mixed, 100, 0).is_err());
        // x1 x2 - 4 vanishes at (2, 2)
        let bad = DensePoly::from_real_terms(2, &[(vec![1, 1], 1.0), (vec![0, 0], -4.0)]).unwrap();
        assert!(matches!(phase_normalize(&bad, 100, 0), Err(Error::NotCertifiable(_))));
    }
}
