use super::{DensePoly, MultiAffinePoly, Scalar, EPS_ZERO};
use crate::{Error, Result};
use num_complex::Complex64;

/// A single closure operation on polynomials.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosureOp {
    /// `f(x_{s(0)}, .., x_{s(m-1)})`
    Permute(Vec<usize>),
    /// `c f(a_0 x_0, .., a_{m-1} x_{m-1})`, every `a_i > 0`
    Scale { c: Scalar, a: Vec<f64> },
    /// replace `x_i` by `x_j`
    Diagonalize { i: usize, j: usize },
    /// set `x_i = a`
    Specialize { i: usize, a: Scalar },
    /// `x_i^d f(.., -1/x_i, ..)` with `d = deg_i f`
    Invert { i: usize },
    Differentiate { i: usize },
}

impl ClosureOp {
    pub fn apply(&self, f: &DensePoly) -> Result<DensePoly> {
        match self {
            ClosureOp::Permute(s) => f.permute(s),
            ClosureOp::Scale { c, a } => f.scale_vars(*c, a),
            ClosureOp::Diagonalize { i, j } => f.diagonalize(*i, *j),
            ClosureOp::Specialize { i, a } => f.specialize(*i, *a),
            ClosureOp::Invert { i } => f.invert(*i),
            ClosureOp::Differentiate { i } => f.derivative(*i),
        }
    }

    pub fn apply_multiaffine(&self, f: &MultiAffinePoly) -> Result<MultiAffinePoly> {
        self.apply(&f.to_dense())?.to_multiaffine()
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ClosureOp::Permute(_) => "permute",
            ClosureOp::Scale { .. } => "scale",
            ClosureOp::Diagonalize { .. } => "diagonalize",
            ClosureOp::Specialize { .. } => "specialize",
            ClosureOp::Invert { .. } => "invert",
            ClosureOp::Differentiate { .. } => "differentiate",
        }
    }

    /// Whether the operation maps stable polynomials to stable ones.
    /// Only specialization can fail, when the point lies below the real axis.
    pub fn preserves_stability(&self) -> bool {
        match self {
            ClosureOp::Specialize { a, .. } => a.im >= 0.0,
            _ => true,
        }
    }
}

impl DensePoly {
    fn check_var(&self, i: usize) -> Result<()> {
        if i >= self.arity() {
            return Err(Error::IndexOutOfRange { index: i, arity: self.arity() });
        }
        Ok(())
    }

    /// Move every term into a new box via an exponent map `(alpha, c) -> (beta, c')`.
    fn remap(&self, bounds: Vec<usize>, f: impl Fn(&mut Vec<usize>, Scalar) -> Scalar) -> Result<DensePoly> {
        let mut out = DensePoly::zeros(bounds)?;
        let mut buf = out.coeffs().to_vec();
        let strides = out.strides();
        let ob = out.bounds().to_vec();
        for (idx, &c) in self.coeffs().iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut e = self.exps_of(idx);
            let v = f(&mut e, c);
            if e.iter().zip(&ob).any(|(a, b)| a > b) {
                if v.norm() > EPS_ZERO {
                    return Err(Error::Internal("remap left the box".into()));
                }
                continue;
            }
            let j: usize = e.iter().zip(&strides).map(|(a, s)| a * s).sum();
            buf[j] += v;
        }
        out = DensePoly::from_coeffs(out.bounds().to_vec(), buf)?;
        Ok(out)
    }

    /// `g(x) = f(x_{s(0)}, .., x_{s(m-1)})`.
    pub fn permute(&self, s: &[usize]) -> Result<DensePoly> {
        let m = self.arity();
        if s.len() != m {
            return Err(Error::ArityMismatch { expected: m, got: s.len() });
        }
        let mut seen = vec![false; m];
        for &k in s {
            if k >= m || seen[k] {
                return Err(Error::InvalidArgument(format!("{s:?} is not a permutation")));
            }
            seen[k] = true;
        }
        let mut b = vec![0; m];
        for i in 0..m {
            b[s[i]] = self.bounds()[i];
        }
        self.remap(b, |e, c| {
            let old = e.clone();
            for i in 0..m {
                e[s[i]] = old[i];
            }
            c
        })
    }

    /// `c f(a_0 x_0, ..)` with positive `a`.
    pub fn scale_vars(&self, c: Scalar, a: &[f64]) -> Result<DensePoly> {
        if a.len() != self.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), got: a.len() });
        }
        if a.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidArgument("scaling factors must be positive".into()));
        }
        self.remap(self.bounds().to_vec(), |e, v| {
            let w: f64 = e.iter().zip(a).map(|(&k, &x)| x.powi(k as i32)).product();
            c * v * w
        })
    }

    /// Replace `x_i` by `x_j`; variable `i` becomes absent.
    pub fn diagonalize(&self, i: usize, j: usize) -> Result<DensePoly> {
        self.check_var(i)?;
        self.check_var(j)?;
        if i == j {
            return Err(Error::IndicesNotDistinct);
        }
        let mut b = self.bounds().to_vec();
        b[j] += b[i];
        b[i] = 0;
        self.remap(b, |e, c| {
            e[j] += e[i];
            e[i] = 0;
            c
        })
    }

    /// Set `x_i = a`. Arity is kept; variable `i` becomes absent.
    pub fn specialize(&self, i: usize, a: Scalar) -> Result<DensePoly> {
        self.check_var(i)?;
        super::check_finite(a)?;
        let mut b = self.bounds().to_vec();
        b[i] = 0;
        self.remap(b, |e, c| {
            let k = e[i];
            e[i] = 0;
            c * a.powu(k as u32)
        })
    }

    /// `x_i^d f(.., -1/x_i, ..)` with `d` the trimmed degree in `x_i`.
    pub fn invert(&self, i: usize) -> Result<DensePoly> {
        let d = self.deg(i)?;
        self.invert_with_degree(i, d)
    }

    /// Inversion against an explicit `d >= deg_i f`.
    pub fn invert_with_degree(&self, i: usize, d: usize) -> Result<DensePoly> {
        self.check_var(i)?;
        if d < self.deg(i)? {
            return Err(Error::DegreeBound(format!("d = {d} below degree in variable {i}")));
        }
        let mut b = self.bounds().to_vec();
        b[i] = d;
        self.remap(b, |e, c| {
            let k = e[i];
            if k > d {
                // negligible by the degree check; push it outside the box
                e[i] = d + 1;
                return c;
            }
            e[i] = d - k;
            if k % 2 == 1 {
                -c
            } else {
                c
            }
        })
    }

    /// Drop variable `i` entirely (its bound must be 0 after trimming).
    pub fn drop_variable(&self, i: usize) -> Result<DensePoly> {
        self.check_var(i)?;
        if self.deg(i)? != 0 {
            return Err(Error::DegreeBound(format!("variable {i} still occurs")));
        }
        let mut b = self.bounds().to_vec();
        b[i] = 0;
        let p = self.with_bounds(&b)?;
        b.remove(i);
        DensePoly::from_coeffs(b, p.coeffs().to_vec())
    }

    /// Coefficient of `x_h^k`, as a polynomial with bound 0 in `h`.
    pub fn slice(&self, h: usize, k: usize) -> Result<DensePoly> {
        self.check_var(h)?;
        let mut b = self.bounds().to_vec();
        b[h] = 0;
        self.remap(b, |e, c| {
            if e[h] == k {
                e[h] = 0;
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

/// `W_i[f, g] = d_i f * g - f * d_i g`.
pub fn wronskian(f: &DensePoly, g: &DensePoly, i: usize) -> Result<DensePoly> {
    if f.arity() != g.arity() {
        return Err(Error::ArityMismatch { expected: f.arity(), got: g.arity() });
    }
    f.derivative(i)?.mul(g)?.sub(&f.mul(&g.derivative(i)?)?)
}

fn delta_bounds(m: usize, i: usize, j: usize) -> Vec<usize> {
    (0..m).map(|k| if k == i || j == k { 0 } else { 2 }).collect()
}

fn check_pair(f: &MultiAffinePoly, i: usize, j: usize) -> Result<()> {
    for k in [i, j] {
        if k >= f.arity() {
            return Err(Error::IndexOutOfRange { index: k, arity: f.arity() });
        }
    }
    if i == j {
        return Err(Error::IndicesNotDistinct);
    }
    Ok(())
}

/// `f_i^j f_j^i - f^{ij} f_{ij}` by coefficient extraction.
pub fn delta_by_parts(f: &MultiAffinePoly, i: usize, j: usize) -> Result<DensePoly> {
    check_pair(f, i, j)?;
    let fi_j = f.with(i)?.without(j)?.to_dense();
    let fj_i = f.with(j)?.without(i)?.to_dense();
    let f_ij = f.without(i)?.without(j)?.to_dense();
    let fij = f.with(i)?.with(j)?.to_dense();
    fi_j.mul(&fj_i)?.sub(&f_ij.mul(&fij)?)?.with_bounds(&delta_bounds(f.arity(), i, j))
}

/// `Delta_ij f = d_i f * d_j f - f * d_i d_j f`; degree at most 2 in each
/// remaining variable, absent in `i` and `j`.
pub fn delta(f: &MultiAffinePoly, i: usize, j: usize) -> Result<DensePoly> {
    check_pair(f, i, j)?;
    let d = f.to_dense();
    let di = d.derivative(i)?;
    let dj = d.derivative(j)?;
    let dij = di.derivative(j)?;
    let raw = di.mul(&dj)?.sub(&d.mul(&dij)?)?;
    let parts = delta_by_parts(f, i, j)?;
    let scale = 1.0 + f.max_abs_coeff().powi(2);
    let diff = raw.sub(&parts)?;
    if diff.max_abs_coeff() > 1e-9 * scale {
        return Err(Error::Internal(format!(
            "delta identity off by {:e}",
            diff.max_abs_coeff()
        )));
    }
    // the product form has cancelled terms in x_i, x_j; return the clean layout
    Ok(parts)
}

/// `D_hij = B^2 - 4AC` where `A x_h^2 + B x_h + C = Delta_ij f`.
pub fn discriminant_d(f: &MultiAffinePoly, h: usize, i: usize, j: usize) -> Result<DensePoly> {
    check_pair(f, i, j)?;
    check_pair(f, h, i)?;
    check_pair(f, h, j)?;
    let q = delta(f, i, j)?;
    let cc = q.slice(h, 0)?;
    let bb = q.slice(h, 1)?;
    let aa = q.slice(h, 2)?;
    bb.mul(&bb)?.sub(&aa.mul(&cc)?.scale(Complex64::new(4.0, 0.0)))
}
