use super::{check_finite, MultiAffinePoly, Scalar, EPS_ZERO, MAX_BOX_VOLUME};
use crate::{Error, Result};
use num_complex::Complex64;

/// Polynomial with per-variable degree bounds `kappa`, coefficients stored
/// on the whole box `0 <= alpha <= kappa` in mixed radix, first variable fastest.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct DensePoly {
    bounds: Vec<usize>,
    coeffs: Vec<Scalar>,
}

pub(crate) fn box_volume(bounds: &[usize]) -> Result<usize> {
    let mut v: u128 = 1;
    for &k in bounds {
        v = v.saturating_mul(k as u128 + 1);
        if v > MAX_BOX_VOLUME as u128 {
            // finish the product for the message
            let needed = bounds.iter().fold(1u128, |a, &k| a.saturating_mul(k as u128 + 1));
            return Err(Error::CapExceeded { what: "dense box", needed, cap: MAX_BOX_VOLUME as u128 });
        }
    }
    Ok(v as usize)
}

fn strides_of(bounds: &[usize]) -> Vec<usize> {
    let mut s = Vec::with_capacity(bounds.len());
    let mut acc = 1;
    for &k in bounds {
        s.push(acc);
        acc *= k + 1;
    }
    s
}

impl DensePoly {
    pub fn zeros(bounds: Vec<usize>) -> Result<Self> {
        let n = box_volume(&bounds)?;
        Ok(DensePoly { bounds, coeffs: vec![Complex64::new(0.0, 0.0); n] })
    }

    pub fn from_coeffs(bounds: Vec<usize>, coeffs: Vec<Scalar>) -> Result<Self> {
        let n = box_volume(&bounds)?;
        if n != coeffs.len() {
            return Err(Error::InvalidArgument(format!(
                "box needs {n} coefficients, got {}",
                coeffs.len()
            )));
        }
        for &z in &coeffs {
            check_finite(z)?;
        }
        Ok(DensePoly { bounds, coeffs })
    }

    pub fn constant(arity: usize, c: Scalar) -> Self {
        DensePoly { bounds: vec![0; arity], coeffs: vec![c] }
    }

    pub fn monomial(exps: &[usize], c: Scalar) -> Result<Self> {
        check_finite(c)?;
        let mut p = DensePoly::zeros(exps.to_vec())?;
        let last = p.coeffs.len() - 1;
        p.coeffs[last] = c;
        Ok(p)
    }

    /// The polynomial `x_i` in `arity` variables.
    pub fn variable(arity: usize, i: usize) -> Result<Self> {
        if i >= arity {
            return Err(Error::IndexOutOfRange { index: i, arity });
        }
        let mut e = vec![0; arity];
        e[i] = 1;
        DensePoly::monomial(&e, Complex64::new(1.0, 0.0))
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn univariate(coeffs: &[Scalar]) -> Result<Self> {
        if coeffs.is_empty() {
            return Ok(DensePoly::constant(1, Complex64::new(0.0, 0.0)));
        }
        DensePoly::from_coeffs(vec![coeffs.len() - 1], coeffs.to_vec())
    }

    pub fn univariate_real(coeffs: &[f64]) -> Result<Self> {
        let c: Vec<Scalar> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        DensePoly::univariate(&c)
    }

    /// Build from a term list; the box is the smallest one holding every term.
    pub fn from_terms(arity: usize, terms: &[(Vec<usize>, Scalar)]) -> Result<Self> {
        let mut bounds = vec![0; arity];
        for (e, _) in terms {
            if e.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, got: e.len() });
            }
            for (b, &x) in bounds.iter_mut().zip(e) {
                *b = (*b).max(x);
            }
        }
        let mut p = DensePoly::zeros(bounds)?;
        for (e, c) in terms {
            let idx = p.index_of(e).expect("inside box");
            p.coeffs[idx] += check_finite(*c)?;
        }
        Ok(p)
    }

    /// Same as [`from_terms`](Self::from_terms) with real coefficients.
    pub fn from_real_terms(arity: usize, terms: &[(Vec<usize>, f64)]) -> Result<Self> {
        let t: Vec<_> = terms.iter().map(|(e, c)| (e.clone(), Complex64::new(*c, 0.0))).collect();
        DensePoly::from_terms(arity, &t)
    }

    pub fn arity(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn volume(&self) -> usize {
        self.coeffs.len()
    }

    pub fn strides(&self) -> Vec<usize> {
        strides_of(&self.bounds)
    }

    pub fn index_of(&self, alpha: &[usize]) -> Option<usize> {
        if alpha.len() != self.arity() {
            return None;
        }
        let mut idx = 0;
        let mut stride = 1;
        for (&a, &k) in alpha.iter().zip(&self.bounds) {
            if a > k {
                return None;
            }
            idx += a * stride;
            stride *= k + 1;
        }
        Some(idx)
    }

    pub fn exps_of(&self, mut idx: usize) -> Vec<usize> {
        self.bounds
            .iter()
            .map(|&k| {
                let e = idx % (k + 1);
                idx /= k + 1;
                e
            })
            .collect()
    }

    /// Coefficient of `x^alpha`; zero outside the box.
    pub fn coeff(&self, alpha: &[usize]) -> Scalar {
        self.index_of(alpha).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn set_coeff(&mut self, alpha: &[usize], c: Scalar) -> Result<()> {
        check_finite(c)?;
        match self.index_of(alpha) {
            Some(i) => {
                self.coeffs[i] = c;
                Ok(())
            }
            None => Err(Error::DegreeBound(format!("{alpha:?} outside box {:?}", self.bounds))),
        }
    }

    /// Nonzero terms as `(alpha, c)` pairs, in storage order.
    pub fn terms(&self) -> Vec<(Vec<usize>, Scalar)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(i, &c)| (self.exps_of(i), c))
            .collect()
    }

    fn check_point(&self, len: usize) -> Result<()> {
        if len != self.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), got: len });
        }
        Ok(())
    }

    /// Nested Horner evaluation, last variable folded first.
    pub fn evaluate(&self, z: &[Scalar]) -> Result<Scalar> {
        self.check_point(z.len())?;
        for &x in z {
            check_finite(x)?;
        }
        let mut data = self.coeffs.clone();
        for axis in (0..self.arity()).rev() {
            let k = self.bounds[axis] + 1;
            let inner = data.len() / k;
            let x = z[axis];
            let mut out = vec![Complex64::new(0.0, 0.0); inner];
            for (r, o) in out.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for e in (0..k).rev() {
                    acc = acc * x + data[r + e * inner];
                }
                *o = acc;
            }
            data = out;
        }
        Ok(data[0])
    }

    pub fn evaluate_real(&self, x: &[f64]) -> Result<Scalar> {
        let z: Vec<Scalar> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.evaluate(&z)
    }

    /// `sum |c_alpha| |z|^alpha`, the natural scale for relative zero tests.
    pub fn abs_scale(&self, z: &[Scalar]) -> Result<f64> {
        let a = self.map_coeffs(|c| Complex64::new(c.norm(), 0.0));
        let za: Vec<Scalar> = z.iter().map(|x| Complex64::new(x.norm(), 0.0)).collect();
        Ok(a.evaluate(&za)?.re)
    }

    /// Univariate restriction `t -> f(a + b t)`.
    pub fn restrict_line(&self, a: &[f64], b: &[f64]) -> Result<DensePoly> {
        let ac: Vec<Scalar> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let bc: Vec<Scalar> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.restrict_line_c(&ac, &bc)
    }

    /// Complex version of [`restrict_line`](Self::restrict_line).
    pub fn restrict_line_c(&self, a: &[Scalar], b: &[Scalar]) -> Result<DensePoly> {
        self.check_point(a.len())?;
        self.check_point(b.len())?;
        let mut data: Vec<Vec<Scalar>> = self.coeffs.iter().map(|&c| vec![c]).collect();
        for axis in (0..self.arity()).rev() {
            let k = self.bounds[axis] + 1;
            let inner = data.len() / k;
            let (x0, x1) = (a[axis], b[axis]);
            let mut out = Vec::with_capacity(inner);
            for r in 0..inner {
                let mut acc: Vec<Scalar> = Vec::new();
                for e in (0..k).rev() {
                    // acc <- acc * (x0 + x1 t) + data
                    let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
                    for (d, &v) in acc.iter().enumerate() {
                        next[d] += v * x0;
                        next[d + 1] += v * x1;
                    }
                    let add = &data[r + e * inner];
                    if next.len() < add.len() {
                        next.resize(add.len(), Complex64::new(0.0, 0.0));
                    }
                    for (d, &v) in add.iter().enumerate() {
                        next[d] += v;
                    }
                    acc = next;
                }
                out.push(acc);
            }
            data = out;
        }
        let mut u = std::mem::take(&mut data[0]);
        if u.is_empty() {
            u.push(Complex64::new(0.0, 0.0));
        }
        DensePoly::univariate(&u)
    }

    /// Degree in variable `i` after trimming coefficients with modulus <= EPS_ZERO.
    pub fn deg(&self, i: usize) -> Result<usize> {
        if i >= self.arity() {
            return Err(Error::IndexOutOfRange { index: i, arity: self.arity() });
        }
        Ok(self.degrees()[i])
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.arity()];
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.norm() > EPS_ZERO {
                for (di, e) in d.iter_mut().zip(self.exps_of(idx)) {
                    *di = (*di).max(e);
                }
            }
        }
        d
    }

    /// Largest `|alpha|` over coefficients above EPS_ZERO; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > EPS_ZERO)
            .map(|(i, _)| self.exps_of(i).iter().sum())
            .max()
    }

    /// Explicit bound reduction to the trimmed degrees.
    pub fn trim(&self) -> DensePoly {
        let d = self.degrees();
        self.with_bounds(&d).expect("shrinking to trimmed degrees")
    }

    /// Re-box into `bounds`: growing pads with zeros, shrinking drops
    /// entries, which must be below EPS_ZERO.
    pub fn with_bounds(&self, bounds: &[usize]) -> Result<DensePoly> {
        if bounds.len() != self.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), got: bounds.len() });
        }
        let mut out = DensePoly::zeros(bounds.to_vec())?;
        let ostr = out.strides();
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let e = self.exps_of(idx);
            if e.iter().zip(bounds).any(|(a, b)| a > b) {
                if c.norm() > EPS_ZERO {
                    return Err(Error::DegreeBound(format!("term {e:?} outside {bounds:?}")));
                }
                continue;
            }
            let j: usize = e.iter().zip(&ostr).map(|(a, s)| a * s).sum();
            out.coeffs[j] = c;
        }
        Ok(out)
    }

    pub fn map_coeffs(&self, f: impl Fn(Scalar) -> Scalar) -> DensePoly {
        DensePoly { bounds: self.bounds.clone(), coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    fn check_arity(&self, other: &DensePoly) -> Result<()> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), got: other.arity() });
        }
        Ok(())
    }

    pub fn add(&self, other: &DensePoly) -> Result<DensePoly> {
        self.check_arity(other)?;
        let b: Vec<usize> = self.bounds.iter().zip(&other.bounds).map(|(x, y)| *x.max(y)).collect();
        let mut out = self.with_bounds(&b)?;
        let o = other.with_bounds(&b)?;
        for (x, y) in out.coeffs.iter_mut().zip(o.coeffs) {
            *x += y;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DensePoly) -> Result<DensePoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DensePoly {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, s: Scalar) -> DensePoly {
        self.map_coeffs(|c| c * s)
    }

    /// Exact convolution over the product box.
    pub fn mul(&self, other: &DensePoly) -> Result<DensePoly> {
        self.check_arity(other)?;
        let b: Vec<usize> = self.bounds.iter().zip(&other.bounds).map(|(x, y)| x + y).collect();
        let mut out = DensePoly::zeros(b)?;
        let ostr = out.strides();
        let offsets = |p: &DensePoly| -> Vec<(usize, Scalar)> {
            p.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm() > 0.0)
                .map(|(i, &c)| (p.exps_of(i).iter().zip(&ostr).map(|(a, s)| a * s).sum(), c))
                .collect()
        };
        let lhs = offsets(self);
        let rhs = offsets(other);
        for &(i, a) in &lhs {
            for &(j, b) in &rhs {
                out.coeffs[i + j] += a * b;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: usize) -> Result<DensePoly> {
        let mut acc = DensePoly::constant(self.arity(), Complex64::new(1.0, 0.0));
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Partial derivative in variable `i`; the bound in `i` drops by one (floor 0).
    pub fn derivative(&self, i: usize) -> Result<DensePoly> {
        if i >= self.arity() {
            return Err(Error::IndexOutOfRange { index: i, arity: self.arity() });
        }
        let mut b = self.bounds.clone();
        b[i] = b[i].saturating_sub(1);
        let mut out = DensePoly::zeros(b)?;
        let ostr = out.strides();
        for (idx, &c) in self.coeffs.iter().enumerate() {
            let mut e = self.exps_of(idx);
            if e[i] == 0 {
                continue;
            }
            let k = e[i] as f64;
            e[i] -= 1;
            let j: usize = e.iter().zip(&ostr).map(|(a, s)| a * s).sum();
            out.coeffs[j] += c * k;
        }
        Ok(out)
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

    /// Coefficientwise comparison over the union box.
    pub fn approx_eq(&self, other: &DensePoly, tol: f64) -> bool {
        match self.sub(other) {
            Ok(d) => d.coeffs.iter().all(|c| c.norm() <= tol),
            Err(_) => false,
        }
    }

    /// Total degree if every term above EPS_ZERO has the same degree.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut deg = None;
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.norm() > EPS_ZERO {
                let d: usize = self.exps_of(idx).iter().sum();
                match deg {
                    None => deg = Some(d),
                    Some(d0) if d0 != d => return None,
                    _ => {}
                }
            }
        }
        deg
    }

    /// Ascending coefficients of a univariate polynomial.
    pub fn univariate_coeffs(&self) -> Result<&[Scalar]> {
        if self.arity() != 1 {
            return Err(Error::ArityMismatch { expected: 1, got: self.arity() });
        }
        Ok(&self.coeffs)
    }

    /// Conversion to a bitmask table; every exponent above 1 must be negligible.
    pub fn to_multiaffine(&self) -> Result<MultiAffinePoly> {
        let mut out = MultiAffinePoly::zeros(self.arity())?;
        for (idx, &c) in self.coeffs.iter().enumerate() {
            let e = self.exps_of(idx);
            if e.iter().any(|&x| x > 1) {
                if c.norm() > EPS_ZERO {
                    return Err(Error::NotMultiaffine);
                }
                continue;
            }
            let mask = e.iter().enumerate().fold(0usize, |m, (i, &x)| m | (x << i));
            out.set(mask, c)?;
        }
        Ok(out)
    }

    /// Embed into `arity + extra` variables; new variables are absent.
    pub fn extend_arity(&self, extra: usize) -> DensePoly {
        let mut b = self.bounds.clone();
        b.extend(std::iter::repeat_n(0, extra));
        DensePoly { bounds: b, coeffs: self.coeffs.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{c, r};

    fn f_xy_x_y() -> DensePoly {
        DensePoly::from_real_terms(2, &[(vec![1, 1], 1.0), (vec![1, 0], 1.0), (vec![0, 1], 1.0)]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert!((f_xy_x_y().evaluate(&[r(1.0), r(1.0)]).unwrap() - r(3.0)).norm() < 1e-14);
        let g = DensePoly::from_real_terms(2, &[(vec![1, 1], 1.0), (vec![0, 0], 1.0)]).unwrap();
        assert!(g.evaluate(&[c(0.0, 1.0), c(0.0, 1.0)]).unwrap().norm() < 1e-14);
        let h = DensePoly::from_real_terms(2, &[(vec![1, 1], 1.0), (vec![0, 0], -1.0)]).unwrap();
        assert!((h.evaluate(&[c(0.0, 1.0), c(0.0, 1.0)]).unwrap() - r(-2.0)).norm() < 1e-14);
        assert!(matches!(h.evaluate(&[r(1.0)]), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn restrict_line_examples() {
        let xy = DensePoly::from_real_terms(2, &[(vec![1, 1], 1.0)]).unwrap();
        let p = xy.restrict_line(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(p.approx_eq(&DensePoly::univariate_real(&[0.0, 0.0, 1.0]).unwrap(), 1e-14));
        let s = DensePoly::from_real_terms(2, &[(vec![1, 0], 1.0), (vec![0, 1], 1.0)]).unwrap();
        let p = s.restrict_line(&[1.0, 0.0], &[1.0, 2.0]).unwrap();
        assert!(p.approx_eq(&DensePoly::univariate_real(&[1.0, 3.0]).unwrap(), 1e-14));
        let h = DensePoly::from_real_terms(2, &[(vec![1, 1], 1.0), (vec![0, 0], -1.0)]).unwrap();
        let p = h.restrict_line(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(p.approx_eq(&DensePoly::univariate_real(&[-1.0, 0.0, 1.0]).unwrap(), 1e-14));
    }

    #[test]
    fn mul_and_cap() {
        let a = DensePoly::univariate_real(&[1.0, 1.0]).unwrap();
        let sq = a.mul(&a).unwrap();
        assert!(sq.approx_eq(&DensePoly::univariate_real(&[1.0, 2.0, 1.0]).unwrap(), 1e-14));
        let big = DensePoly::zeros(vec![2047, 2047]).unwrap();
        assert!(matches!(big.mul(&big), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn degrees_and_trim() {
        let p = DensePoly::univariate(&[r(1.0), r(2.0), r(1e-12)]).unwrap();
        assert_eq!(p.deg(0).unwrap(), 1);
        assert_eq!(p.bounds(), &[2]);
        assert_eq!(p.trim().bounds(), &[1]);
        let q = DensePoly::univariate_real(&[0.0, 0.0, 3.0]).unwrap();
        assert!(q.derivative(0).unwrap().approx_eq(&DensePoly::univariate_real(&[0.0, 6.0]).unwrap(), 0.0));
    }

    #[test]
    fn non_finite_rejected() {
        assert_eq!(DensePoly::univariate_real(&[f64::NAN]).unwrap_err(), Error::NonFinite);
    }
}
