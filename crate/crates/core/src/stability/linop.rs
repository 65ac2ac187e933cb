use super::{probe_stable, RegionSpec, StabilityVerdict, Witness};
use crate::poly::{binomial, DensePoly, Scalar};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// A linear map on polynomials with `deg_i <= kappa_i`, given by the image
/// of every monomial in the box.
#[derive(Clone, Debug)]
pub struct LinOpSpec {
    kappa: Vec<usize>,
    out_arity: usize,
    /// indexed like the coefficients of a `DensePoly` with bounds `kappa`
    images: Vec<DensePoly>,
}

impl LinOpSpec {
    pub fn from_fn(kappa: Vec<usize>, out_arity: usize, f: impl Fn(&[usize]) -> Result<DensePoly>) -> Result<Self> {
        let shape = DensePoly::zeros(kappa.clone())?;
        let mut images = Vec::with_capacity(shape.volume());
        for idx in 0..shape.volume() {
            let img = f(&shape.exps_of(idx))?;
            if img.arity() != out_arity {
                return Err(Error::ArityMismatch { expected: out_arity, got: img.arity() });
            }
            images.push(img);
        }
        Ok(LinOpSpec { kappa, out_arity, images })
    }

    pub fn identity(kappa: Vec<usize>) -> Result<Self> {
        let m = kappa.len();
        LinOpSpec::from_fn(kappa, m, |a| DensePoly::monomial(a, Complex64::new(1.0, 0.0)))
    }

    /// `d / d x_i` on polynomials in the box.
    pub fn derivative(kappa: Vec<usize>, i: usize) -> Result<Self> {
        let m = kappa.len();
        LinOpSpec::from_fn(kappa, m, |a| DensePoly::monomial(a, Complex64::new(1.0, 0.0))?.derivative(i))
    }

    /// Diagonal map `x^a -> lambda(a) x^a`.
    pub fn multiplier(kappa: Vec<usize>, lambda: impl Fn(&[usize]) -> Scalar) -> Result<Self> {
        let m = kappa.len();
        LinOpSpec::from_fn(kappa, m, |a| DensePoly::monomial(a, lambda(a)))
    }

    /// `x^a -> (beta)_a x^a` with the falling factorial `(b)_k = b (b-1) .. (b-k+1)`.
    pub fn falling_factorial_multiplier(kappa: Vec<usize>, beta: &[usize]) -> Result<Self> {
        if beta.len() != kappa.len() {
            return Err(Error::ArityMismatch { expected: kappa.len(), got: beta.len() });
        }
        let beta = beta.to_vec();
        LinOpSpec::multiplier(kappa, move |a| {
            let v: f64 = a.iter().zip(&beta).map(|(&k, &b)| falling(b, k)).product();
            Complex64::new(v, 0.0)
        })
    }

    pub fn kappa(&self) -> &[usize] {
        &self.kappa
    }

    pub fn arity(&self) -> usize {
        self.kappa.len()
    }

    pub fn out_arity(&self) -> usize {
        self.out_arity
    }

    pub fn image(&self, alpha: &[usize]) -> Option<&DensePoly> {
        let shape = DensePoly::zeros(self.kappa.clone()).ok()?;
        shape.index_of(alpha).map(|i| &self.images[i])
    }

    /// `T(f)`; `f` must fit the box.
    pub fn apply(&self, f: &DensePoly) -> Result<DensePoly> {
        let f = f.with_bounds(&self.kappa)?;
        let mut acc = DensePoly::constant(self.out_arity, Complex64::new(0.0, 0.0));
        for (c, img) in f.coeffs().iter().zip(&self.images) {
            if c.norm() != 0.0 {
                acc = acc.add(&img.scale(*c))?;
            }
        }
        Ok(acc)
    }
}

pub(crate) fn falling(b: usize, k: usize) -> f64 {
    (0..k).map(|t| b as f64 - t as f64).product()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolSign {
    /// `T((x + y)^kappa)`
    Plus,
    /// `T((x - y)^kappa)`
    Minus,
}

/// `T((x +- y)^kappa) = sum_a C(kappa, a) T(x^a) (+-y)^(kappa - a)`, in
/// `out_arity + m` variables with `y` after `x`.
pub fn symbol(t: &LinOpSpec, sign: SymbolSign) -> Result<DensePoly> {
    let m = t.arity();
    let mut ob = vec![0; t.out_arity];
    for img in &t.images {
        for (b, &d) in ob.iter_mut().zip(img.bounds()) {
            *b = (*b).max(d);
        }
    }
    let mut bounds = ob.clone();
    bounds.extend_from_slice(&t.kappa);
    let mut out = DensePoly::zeros(bounds)?;
    let shape = DensePoly::zeros(t.kappa.clone())?;
    let mut buf = out.coeffs().to_vec();
    let strides = out.strides();
    for (idx, img) in t.images.iter().enumerate() {
        let alpha = shape.exps_of(idx);
        let rest: Vec<usize> = t.kappa.iter().zip(&alpha).map(|(k, a)| k - a).collect();
        let mut w: f64 = t.kappa.iter().zip(&alpha).map(|(&k, &a)| binomial(k, a)).product();
        if sign == SymbolSign::Minus && rest.iter().sum::<usize>() % 2 == 1 {
            w = -w;
        }
        let yoff: usize = rest.iter().enumerate().map(|(k, &e)| e * strides[t.out_arity + k]).sum();
        for (e, c) in img.terms() {
            let xoff: usize = e.iter().zip(&strides).map(|(a, s)| a * s).sum();
            buf[xoff + yoff] += c * w;
        }
    }
    out = DensePoly::from_coeffs(out.bounds().to_vec(), buf)?;
    let _ = m;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum PreserverClass {
    /// every image is a multiple of one polynomial `p`; the verdict is about `p`
    RankOneForm { image_verdict: StabilityVerdict },
    SymbolStable { probes: usize, seed: u64 },
    SymbolFalsified { witness: Witness },
}

fn proportional_images(t: &LinOpSpec) -> Result<Option<DensePoly>> {
    let mut bounds = vec![0; t.out_arity];
    for img in &t.images {
        for (b, &d) in bounds.iter_mut().zip(img.bounds()) {
            *b = (*b).max(d);
        }
    }
    let vecs: Vec<Vec<Scalar>> = t.images.iter().map(|p| Ok(p.with_bounds(&bounds)?.coeffs().to_vec())).collect::<Result<_>>()?;
    let norm = |v: &[Scalar]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let (best, bn) = vecs.iter().enumerate().map(|(i, v)| (i, norm(v))).fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    if bn == 0.0 {
        return Ok(Some(DensePoly::constant(t.out_arity, Complex64::new(0.0, 0.0))));
    }
    let v = &vecs[best];
    for w in &vecs {
        let dot: Scalar = v.iter().zip(w).map(|(a, b)| a.conj() * b).sum();
        let coef = dot / (bn * bn);
        let resid = norm(&w.iter().zip(v).map(|(b, a)| b - coef * a).collect::<Vec<_>>());
        if resid > 1e-10 * norm(w).max(bn) {
            return Ok(None);
        }
    }
    Ok(Some(t.images[best].clone()))
}

/// Rank-one images are detected exactly first; otherwise the symbol
/// `T((x + y)^kappa)` is probed.
pub fn classify_preserver(t: &LinOpSpec, n_probes: usize, seed: u64) -> Result<PreserverClass> {
    if let Some(p) = proportional_images(t)? {
        return Ok(PreserverClass::RankOneForm { image_verdict: probe_stable(&p, n_probes, seed, &RegionSpec::UpperHalfPlane)? });
    }
    let s = symbol(t, SymbolSign::Plus)?;
    Ok(match probe_stable(&s, n_probes, seed, &RegionSpec::UpperHalfPlane)? {
        StabilityVerdict::Falsified { witness } => PreserverClass::SymbolFalsified { witness },
        _ => PreserverClass::SymbolStable { probes: n_probes, seed },
    })
}
