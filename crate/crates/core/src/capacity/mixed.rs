use super::{equality_case, minimize_log_ratio, vdw_bound, CapacityReport, EqualityCase, PencilLogDet};
use crate::detpoly::{det, pencil_poly, HermitianMatrix, MatrixPencil};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

pub const MAX_DISCRIMINANT_N: usize = 8;
pub const MAX_BAPAT_N: usize = 6;
const OMEGA_TOL: f64 = 1e-10;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// `Disc(A_1..A_n)`, the coefficient of `x_1 .. x_n` in `det(sum x_i A_i)`:
/// sum over permutations `s` of `det[A_s(1) e_1 | .. | A_s(n) e_n]`.
pub fn mixed_discriminant(mats: &[HermitianMatrix]) -> Result<f64> {
    let n = mats.len();
    if n == 0 {
        return Ok(1.0);
    }
    if mats.iter().any(|a| a.n() != n) {
        return Err(Error::MatrixCondition("n matrices of size n x n"));
    }
    if n > MAX_DISCRIMINANT_N {
        return Err(Error::CapExceeded { what: "mixed discriminant size", needed: n as u128, cap: MAX_DISCRIMINANT_N as u128 });
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut m = DMatrix::zeros(n, n);
    for s in permutations(n) {
        for (col, &k) in s.iter().enumerate() {
            m.set_column(col, &mats[k].matrix().column(col));
        }
        total += det(&m);
    }
    let scale = mats.iter().map(|a| a.scale()).fold(1.0, f64::max).powi(n as i32);
    if total.im.abs() > 1e-9 * scale {
        return Err(Error::Internal(format!("mixed discriminant has imaginary part {}", total.im)));
    }
    Ok(total.re)
}

/// `A_i = diag(b_i1, .., b_in)`, so that `det(sum x_i A_i) = f_B`.
pub fn diagonal_lift(b: &DMatrix<f64>) -> Vec<HermitianMatrix> {
    b.row_iter().map(|r| HermitianMatrix::diag(&r.iter().cloned().collect::<Vec<_>>())).collect()
}

fn sum(mats: &[HermitianMatrix]) -> DMatrix<Complex64> {
    let n = mats[0].n();
    mats.iter().fold(DMatrix::zeros(n, n), |acc, a| acc + a.matrix())
}

fn omega_deviation(mats: &[HermitianMatrix]) -> (f64, f64) {
    let n = mats[0].n();
    let tr = mats.iter().map(|a| (a.matrix().trace().re - 1.0).abs()).fold(0.0, f64::max);
    let s = sum(mats) - DMatrix::<Complex64>::identity(n, n);
    (tr, s.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Alternately normalize traces to 1 and congruence-scale `sum A_i` to `I`.
pub fn operator_sinkhorn(mats: &[HermitianMatrix]) -> Result<(Vec<HermitianMatrix>, usize)> {
    let n = mats.first().map(|a| a.n()).ok_or_else(|| Error::InvalidArgument("no matrices".into()))?;
    if mats.len() != n || mats.iter().any(|a| a.n() != n) {
        return Err(Error::MatrixCondition("n matrices of size n x n"));
    }
    if mats.iter().any(|a| !a.is_psd()) {
        return Err(Error::MatrixCondition("positive semidefinite"));
    }
    let mut cur = mats.to_vec();
    for sweep in 0..100_000 {
        let (t, s) = omega_deviation(&cur);
        if t <= OMEGA_TOL && s <= OMEGA_TOL {
            return Ok((cur, sweep));
        }
        let mut next = Vec::with_capacity(n);
        for a in &cur {
            let tr = a.matrix().trace().re;
            if tr <= 0.0 {
                return Err(Error::MatrixCondition("nonzero trace"));
            }
            next.push(a.matrix() / Complex64::new(tr, 0.0));
        }
        let total = next.iter().fold(DMatrix::zeros(n, n), |acc, a| acc + a);
        let eig = total.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l <= 1e-300) {
            return Err(Error::MatrixCondition("sum of the tuple is singular"));
        }
        let inv_sqrt = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(1.0 / l.sqrt(), 0.0)))
            * eig.eigenvectors.adjoint();
        cur = next.iter().map(|a| HermitianMatrix::new(&inv_sqrt * a * &inv_sqrt)).collect::<Result<_>>()?;
    }
    Err(Error::NoConvergence("operator scaling".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BapatReport {
    pub m: usize,
    pub disc: f64,
    /// `m! / m^m`
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
    pub cap: CapacityReport,
    pub cap_ok: bool,
    /// `|Disc - m!/m^m| <= 1e-10`
    pub equality: bool,
    /// power-of-linear-form test on the expanded `det(sum x_i A_i)`
    pub equality_case: EqualityCase,
}

impl BapatReport {
    pub fn all_hold(&self) -> bool {
        self.holds && self.cap_ok && self.equality == self.equality_case.is_power_of_linear
    }
}

/// `Disc(A) >= m!/m^m` for PSD `A_1..A_m` (`m = n`) with unit traces summing to `I`.
pub fn bapat_suite(mats: &[HermitianMatrix]) -> Result<BapatReport> {
    let m = mats.len();
    if m == 0 || mats.iter().any(|a| a.n() != m) {
        return Err(Error::MatrixCondition("m matrices of size m x m"));
    }
    if m > MAX_BAPAT_N {
        return Err(Error::CapExceeded { what: "tuple size", needed: m as u128, cap: MAX_BAPAT_N as u128 });
    }
    if mats.iter().any(|a| !a.is_psd()) {
        return Err(Error::MatrixCondition("positive semidefinite"));
    }
    let (t, s) = omega_deviation(mats);
    if t > OMEGA_TOL || s > OMEGA_TOL {
        return Err(Error::InvalidArgument(format!("not doubly stochastic: trace deviation {t:.3e}, sum deviation {s:.3e}")));
    }
    let disc = mixed_discriminant(mats)?;
    let bound = vdw_bound(m);
    let cap = minimize_log_ratio(&PencilLogDet::new(mats)?)?;
    let pencil = MatrixPencil::new(mats.to_vec(), HermitianMatrix::zeros(m))?;
    let f = pencil_poly(&pencil)?.poly;
    Ok(BapatReport {
        m,
        disc,
        bound,
        slack: disc - bound,
        holds: disc >= bound - 1e-9,
        cap_ok: (cap.cap_estimate - 1.0).abs() <= 1e-6,
        cap,
        equality: (disc - bound).abs() <= 1e-10,
        equality_case: equality_case(&f)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::permanent;
    use crate::rng::rng;
    use rand::Rng;

    #[test]
    fn discriminant_examples() {
        let id = HermitianMatrix::identity(2);
        assert!((mixed_discriminant(&[id.clone(), id]).unwrap() - 2.0).abs() < 1e-14);
        let mut r = rng(3);
        for _ in 0..5 {
            let b = DMatrix::from_fn(3, 3, |_, _| r.random_range(0.0..1.0));
            let d = mixed_discriminant(&diagonal_lift(&b)).unwrap();
            assert!((d - permanent(&b).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn discriminant_matches_pencil_coefficient() {
        let mut r = rng(8);
        let mats: Vec<HermitianMatrix> = (0..3)
            .map(|_| HermitianMatrix::gram(&DMatrix::from_fn(3, 3, |_, _| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))))
            .collect();
        let f = pencil_poly(&MatrixPencil::new(mats.clone(), HermitianMatrix::zeros(3)).unwrap()).unwrap().poly;
        assert!((f.coeff(&[1, 1, 1]).re - mixed_discriminant(&mats).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn bapat_equality_and_random() {
        for m in 2..=4 {
            let j = DMatrix::from_element(m, m, 1.0 / m as f64);
            let rep = bapat_suite(&diagonal_lift(&j)).unwrap();
            assert!(rep.equality && rep.equality_case.is_power_of_linear && rep.all_hold(), "{rep:?}");
        }
        let mut r = rng(21);
        let raw: Vec<HermitianMatrix> = (0..3)
            .map(|_| HermitianMatrix::gram(&DMatrix::from_fn(3, 2, |_, _| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))))
            .collect();
        let (scaled, _) = operator_sinkhorn(&raw).unwrap();
        let rep = bapat_suite(&scaled).unwrap();
        assert!(rep.all_hold() && !rep.equality && rep.slack > 0.0, "{rep:?}");
        assert!(bapat_suite(&raw).is_err());
    }
}
