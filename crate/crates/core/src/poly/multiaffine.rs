use super::{check_finite, DensePoly, Scalar, EPS_ZERO, MAX_MULTIAFFINE_ARITY};
use crate::{Error, Result};
use num_complex::Complex64;

/// Multiaffine polynomial `sum_S c(S) x^S`, one coefficient per subset.
/// Subset `S` is a bitmask with bit `i` standing for variable `i`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct MultiAffinePoly {
    arity: usize,
    coeffs: Vec<Scalar>,
}

impl MultiAffinePoly {
    pub fn zeros(arity: usize) -> Result<Self> {
        if arity > MAX_MULTIAFFINE_ARITY {
            return Err(Error::CapExceeded {
                what: "multiaffine arity",
                needed: arity as u128,
                cap: MAX_MULTIAFFINE_ARITY as u128,
            });
        }
        Ok(MultiAffinePoly { arity, coeffs: vec![Complex64::new(0.0, 0.0); 1 << arity] })
    }

    pub fn from_coeffs(arity: usize, coeffs: Vec<Scalar>) -> Result<Self> {
        let z = MultiAffinePoly::zeros(arity)?;
        if coeffs.len() != z.coeffs.len() {
            return Err(Error::InvalidArgument(format!(
                "arity {arity} needs {} coefficients, got {}",
                z.coeffs.len(),
                coeffs.len()
            )));
        }
        for &c in &coeffs {
            check_finite(c)?;
        }
        Ok(MultiAffinePoly { arity, coeffs })
    }

    pub fn from_fn(arity: usize, f: impl Fn(usize) -> Scalar) -> Result<Self> {
        let mut p = MultiAffinePoly::zeros(arity)?;
        for (s, c) in p.coeffs.iter_mut().enumerate() {
            *c = check_finite(f(s))?;
        }
        Ok(p)
    }

    /// Real coefficients given as `(mask, value)`; repeated masks add up.
    pub fn from_real_terms(arity: usize, terms: &[(usize, f64)]) -> Result<Self> {
        let mut p = MultiAffinePoly::zeros(arity)?;
        for &(s, v) in terms {
            if s >> arity != 0 {
                return Err(Error::IndexOutOfRange { index: usize::BITS as usize - s.leading_zeros() as usize - 1, arity });
            }
            p.coeffs[s] += check_finite(Complex64::new(v, 0.0))?;
        }
        Ok(p)
    }

    /// `e_k(x_0..x_{m-1})`.
    pub fn elementary_symmetric(arity: usize, k: usize) -> Result<Self> {
        MultiAffinePoly::from_fn(arity, |s| {
            Complex64::new(if s.count_ones() as usize == k { 1.0 } else { 0.0 }, 0.0)
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, s: usize) -> Scalar {
        self.coeffs.get(s).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, s: usize, c: Scalar) -> Result<()> {
        check_finite(c)?;
        match self.coeffs.get_mut(s) {
            Some(x) => {
                *x = c;
                Ok(())
            }
            None => Err(Error::IndexOutOfRange { index: s, arity: self.arity }),
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.arity {
            return Err(Error::IndexOutOfRange { index: i, arity: self.arity });
        }
        Ok(())
    }

    pub fn evaluate(&self, z: &[Scalar]) -> Result<Scalar> {
        if z.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: z.len() });
        }
        for &x in z {
            check_finite(x)?;
        }
        let mut data = self.coeffs.clone();
        for i in (0..self.arity).rev() {
            let half = data.len() / 2;
            let (lo, hi) = data.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a += z[i] * b;
            }
            data.truncate(half);
        }
        Ok(data[0])
    }

    pub fn evaluate_real(&self, x: &[f64]) -> Result<Scalar> {
        let z: Vec<Scalar> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.evaluate(&z)
    }

    /// `f^i`: the part not containing `x_i` (equivalently `f` at `x_i = 0`).
    pub fn without(&self, i: usize) -> Result<MultiAffinePoly> {
        self.check_index(i)?;
        let bit = 1 << i;
        let mut out = self.clone();
        for (s, c) in out.coeffs.iter_mut().enumerate() {
            if s & bit != 0 {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        Ok(out)
    }

    /// `f_i = d f / d x_i`, so that `f = f^i + x_i f_i`.
    pub fn with(&self, i: usize) -> Result<MultiAffinePoly> {
        self.check_index(i)?;
        let bit = 1 << i;
        let mut out = MultiAffinePoly::zeros(self.arity)?;
        for s in 0..self.coeffs.len() {
            if s & bit != 0 {
                out.coeffs[s ^ bit] = self.coeffs[s];
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> DensePoly {
        DensePoly::from_coeffs(vec![1; self.arity], self.coeffs.clone()).expect("2^m <= dense cap")
    }

    pub fn map_coeffs(&self, f: impl Fn(Scalar) -> Scalar) -> MultiAffinePoly {
        MultiAffinePoly { arity: self.arity, coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    fn check_arity(&self, other: &MultiAffinePoly) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: other.arity });
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiAffinePoly) -> Result<MultiAffinePoly> {
        self.check_arity(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(MultiAffinePoly { arity: self.arity, coeffs })
    }

    pub fn sub(&self, other: &MultiAffinePoly) -> Result<MultiAffinePoly> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Scalar) -> MultiAffinePoly {
        self.map_coeffs(|c| c * s)
    }

    /// Product; stays multiaffine only when the factors share no variable.
    pub fn mul(&self, other: &MultiAffinePoly) -> Result<MultiAffinePoly> {
        self.check_arity(other)?;
        let (ua, ub) = (self.used_vars(), other.used_vars());
        if ua & ub != 0 {
            return Err(Error::NotMultiaffine);
        }
        let mut out = MultiAffinePoly::zeros(self.arity)?;
        for (s, &a) in self.coeffs.iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            for (t, &b) in other.coeffs.iter().enumerate() {
                if b.norm() != 0.0 && s & t == 0 {
                    out.coeffs[s | t] += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Bitmask of variables carrying a coefficient above EPS_ZERO.
    pub fn used_vars(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > EPS_ZERO)
            .fold(0, |m, (s, _)| m | s)
    }

    /// Subsets with a coefficient above `tol` in modulus.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&s| self.coeffs[s].norm() > tol).collect()
    }

    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut deg = None;
        for s in self.support(EPS_ZERO) {
            let d = s.count_ones() as usize;
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => return None,
                _ => {}
            }
        }
        deg
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() <= EPS_ZERO)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im.abs() <= EPS_ZERO)
    }

    pub fn approx_eq(&self, other: &MultiAffinePoly, tol: f64) -> bool {
        self.arity == other.arity && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Swap variables `i` and `j`.
    pub fn swap(&self, i: usize, j: usize) -> Result<MultiAffinePoly> {
        self.check_index(i)?;
        self.check_index(j)?;
        let mut out = self.clone();
        for s in 0..self.coeffs.len() {
            out.coeffs[swap_bits(s, i, j)] = self.coeffs[s];
        }
        Ok(out)
    }

    /// Embed into `arity + extra` variables.
    pub fn extend_arity(&self, extra: usize) -> Result<MultiAffinePoly> {
        let mut out = MultiAffinePoly::zeros(self.arity + extra)?;
        out.coeffs[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        Ok(out)
    }
}

pub(crate) fn swap_bits(s: usize, i: usize, j: usize) -> usize {
    let bi = (s >> i) & 1;
    let bj = (s >> j) & 1;
    if bi == bj {
        s
    } else {
        s ^ (1 << i) ^ (1 << j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{c, r};

    #[test]
    fn evaluate_matches_dense() {
        let f = MultiAffinePoly::from_real_terms(3, &[(0b011, 1.0), (0b100, -2.0), (0, 0.5)]).unwrap();
        let z = [c(0.3, 1.0), c(-1.0, 0.2), c(2.0, -0.7)];
        let a = f.evaluate(&z).unwrap();
        let b = f.to_dense().evaluate(&z).unwrap();
        assert!((a - b).norm() < 1e-13);
        let expect = z[0] * z[1] - z[2] * 2.0 + r(0.5);
        assert!((a - expect).norm() < 1e-13);
    }

    #[test]
    fn decomposition() {
        let f = MultiAffinePoly::from_real_terms(2, &[(0b11, 1.0), (0b01, 1.0), (0b10, 1.0)]).unwrap();
        let fi = f.with(0).unwrap();
        let fni = f.without(0).unwrap();
        // f = f^0 + x0 f_0
        let x0 = MultiAffinePoly::from_real_terms(2, &[(0b01, 1.0)]).unwrap();
        assert!(fni.add(&x0.mul(&fi).unwrap()).unwrap().approx_eq(&f, 1e-15));
        assert!(f.mul(&f).is_err());
    }

    #[test]
    fn arity_cap() {
        assert!(matches!(MultiAffinePoly::zeros(25), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn swap_and_support() {
        let f = MultiAffinePoly::from_real_terms(3, &[(0b001, 2.0), (0b110, 1.0)]).unwrap();
        let g = f.swap(0, 2).unwrap();
        assert_eq!(g.coeff(0b100), r(2.0));
        assert_eq!(g.coeff(0b011), r(1.0));
        assert_eq!(g.support(0.0), vec![0b011, 0b100]);
        assert_eq!(MultiAffinePoly::elementary_symmetric(4, 2).unwrap().homogeneous_degree(), Some(2));
    }
}
