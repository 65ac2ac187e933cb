use super::{mixed_det_pair, HermitianMatrix};
use crate::poly::DensePoly;
use crate::roots::{interlaces, roots};
use crate::{Error, Result};
use serde::Serialize;

/// Numbers of negative, zero and positive roots (or eigenvalues).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub neg: usize,
    pub zero: usize,
    pub pos: usize,
}

fn count(values: &[f64], tol: f64) -> Inertia {
    let mut i = Inertia { neg: 0, zero: 0, pos: 0 };
    for &v in values {
        if v.abs() <= tol {
            i.zero += 1;
        } else if v < 0.0 {
            i.neg += 1;
        } else {
            i.pos += 1;
        }
    }
    i
}

/// Inertia of a real-rooted polynomial; `|root| <= 1e-7 * root-scale` counts as zero.
pub fn inertia_of_poly(p: &DensePoly) -> Result<Inertia> {
    let rl = roots(p)?;
    if !rl.is_real() {
        return Err(Error::NotRealRooted);
    }
    Ok(count(&rl.real_roots(), 1e-7 * rl.scale()))
}

/// Inertia of `det(xI - B)`, read from the eigenvalues of `B` with the same zero rule.
pub fn inertia_of_matrix(b: &HermitianMatrix) -> Inertia {
    let e = b.eigenvalues();
    let scale = e.iter().map(|x| x.abs()).fold(1.0, f64::max);
    count(&e, 1e-7 * scale)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InterlaceVerdict {
    Interlaces,
    DoesNotInterlace,
    /// roots collide within the collision tolerance
    Degenerate,
    NotRealRooted,
}

#[derive(Clone, Debug, Serialize)]
pub struct JohnsonReport {
    /// `Det(xA, -B)`
    pub p: DensePoly,
    pub real_rooted: bool,
    /// `(j, verdict)` comparing `Det(xA(j), -B(j))` against `p`
    pub interlacing: Vec<(usize, InterlaceVerdict)>,
    pub inertia_p: Option<Inertia>,
    pub inertia_b: Inertia,
    pub inertia_match: bool,
}

impl JohnsonReport {
    pub fn all_hold(&self) -> bool {
        self.real_rooted && self.inertia_match && self.interlacing.iter().all(|x| x.1 == InterlaceVerdict::Interlaces)
    }
}

/// Build `Det(xA, -B)` and its minors and test real-rootedness, interlacing
/// with every `Det(xA(j), -B(j))`, and inertia against `det(xI - B)`.
pub fn johnson_suite(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<JohnsonReport> {
    if !a.is_pd() {
        return Err(Error::MatrixCondition("positive definite"));
    }
    if a.n() != b.n() {
        return Err(Error::MatrixCondition("of matching dimension"));
    }
    if a.n() > 8 {
        return Err(Error::CapExceeded { what: "Johnson suite dimension", needed: a.n() as u128, cap: 8 });
    }
    let p = mixed_det_pair(a.matrix(), b.matrix())?.map_coeffs(|z| num_complex::Complex64::new(z.re, 0.0));
    let real_rooted = roots(&p)?.is_real();
    let mut interlacing = Vec::new();
    for j in 0..a.n() {
        let q = mixed_det_pair(a.minor(j)?.matrix(), b.minor(j)?.matrix())?.map_coeffs(|z| num_complex::Complex64::new(z.re, 0.0));
        let v = match interlaces(&q, &p) {
            Ok(true) => InterlaceVerdict::Interlaces,
            Ok(false) => InterlaceVerdict::DoesNotInterlace,
            Err(Error::DegenerateRoots { .. }) => InterlaceVerdict::Degenerate,
            Err(Error::NotRealRooted) => InterlaceVerdict::NotRealRooted,
            Err(e) => return Err(e),
        };
        interlacing.push((j, v));
    }
    let inertia_p = if real_rooted { Some(inertia_of_poly(&p)?) } else { None };
    let inertia_b = inertia_of_matrix(b);
    Ok(JohnsonReport { inertia_match: inertia_p == Some(inertia_b), p, real_rooted, interlacing, inertia_p, inertia_b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_b() {
        let rep = johnson_suite(&HermitianMatrix::identity(2), &HermitianMatrix::diag(&[1.0, -1.0])).unwrap();
        assert!(rep.p.approx_eq(&DensePoly::univariate_real(&[-1.0, 0.0, 1.0]).unwrap(), 1e-14));
        assert_eq!(rep.inertia_p, Some(Inertia { neg: 1, zero: 0, pos: 1 }));
        assert!(rep.inertia_match && rep.real_rooted);
    }

    #[test]
    fn zero_b() {
        let rep = johnson_suite(&HermitianMatrix::identity(3), &HermitianMatrix::zeros(3)).unwrap();
        assert_eq!(rep.inertia_p, Some(Inertia { neg: 0, zero: 3, pos: 0 }));
        assert!(rep.inertia_match);
        // x^3 against x^2 collides at 0
        assert!(rep.interlacing.iter().all(|x| x.1 == InterlaceVerdict::Degenerate));
    }

    #[test]
    fn requires_pd() {
        let e = johnson_suite(&HermitianMatrix::diag(&[1.0, 0.0]), &HermitianMatrix::zeros(2)).unwrap_err();
        assert_eq!(e, Error::MatrixCondition("positive definite"));
    }

    #[test]
    fn two_by_two_general() {
        let a = HermitianMatrix::from_real_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let b = HermitianMatrix::from_real_rows(&[vec![0.3, -1.2], vec![-1.2, 0.7]]).unwrap();
        assert!(johnson_suite(&a, &b).unwrap().all_hold());
    }
}
