use super::StabilityVerdict;
use crate::detpoly::{pencil_poly, MatrixPencil};
use crate::poly::{ClosureOp, DensePoly, Scalar, EPS_ZERO};
use crate::polarize::{partial_symmetrize, polarize_multi, symmetric_homogenize};
use crate::{Error, Result};
use num_complex::Complex64;

/// `a . x + b` with `a >= 0` and `Im b >= 0`: no zero in the open upper half-plane.
#[derive(Clone, Debug)]
pub struct LinearFactor {
    pub a: Vec<f64>,
    pub b: Scalar,
}

/// Polynomials stable by construction.
#[derive(Clone, Debug)]
pub enum Generator {
    /// `det(sum x_i A_i + B)` with every `A_i` PSD and `B` Hermitian.
    Pencil(MatrixPencil),
    Monomial { exps: Vec<usize>, coeff: Scalar },
    LinearProduct { arity: usize, factors: Vec<LinearFactor> },
}

/// A derivation tree whose nodes all preserve stability.
#[derive(Clone, Debug)]
pub enum Construction {
    Leaf(Generator),
    Op(ClosureOp, Box<Construction>),
    Product(Box<Construction>, Box<Construction>),
    /// From `g + y f` (with `y` the last variable) to `g - d_i f`.
    LiebSokal { inner: Box<Construction>, i: usize },
    Polarize { inner: Box<Construction>, kappa: Vec<usize> },
    PartialSymmetrize { inner: Box<Construction>, i: usize, j: usize, lambda: f64 },
    /// Real multiaffine input only.
    SymmetricHomogenize(Box<Construction>),
    /// Append unused variables.
    Extend { inner: Box<Construction>, extra: usize },
    /// Remove a variable that no longer occurs.
    DropVariable { inner: Box<Construction>, i: usize },
}

impl Construction {
    pub fn leaf(g: Generator) -> Self {
        Construction::Leaf(g)
    }

    pub fn op(self, op: ClosureOp) -> Self {
        Construction::Op(op, Box::new(self))
    }

    pub fn times(self, other: Construction) -> Self {
        Construction::Product(Box::new(self), Box::new(other))
    }

    fn build(&self, trail: &mut Vec<String>) -> Result<DensePoly> {
        let out = match self {
            Construction::Leaf(g) => build_generator(g, trail)?,
            Construction::Op(op, inner) => {
                let f = inner.build(trail)?;
                if !op.preserves_stability() {
                    return Err(Error::NotCertifiable(format!("{} outside the closed upper half-plane", op.tag())));
                }
                trail.push(op.tag().into());
                op.apply(&f)?
            }
            Construction::Product(a, b) => {
                let f = a.build(trail)?;
                let g = b.build(trail)?;
                trail.push("product".into());
                f.mul(&g)?
            }
            Construction::LiebSokal { inner, i } => {
                let h = inner.build(trail)?;
                let y = h.arity().checked_sub(1).ok_or(Error::NotCertifiable("Lieb-Sokal needs a y variable".into()))?;
                if *i >= y {
                    return Err(Error::IndexOutOfRange { index: *i, arity: y });
                }
                if h.deg(y)? > 1 {
                    return Err(Error::NotCertifiable("degree in y exceeds 1".into()));
                }
                let g = h.slice(y, 0)?.drop_variable(y)?;
                let f = h.slice(y, 1)?.drop_variable(y)?;
                trail.push("lieb_sokal".into());
                lieb_sokal(&g, &f, *i)?
            }
            Construction::Polarize { inner, kappa } => {
                let f = inner.build(trail)?;
                trail.push("polarize".into());
                polarize_multi(&f, kappa)?.to_dense()
            }
            Construction::PartialSymmetrize { inner, i, j, lambda } => {
                let f = inner.build(trail)?.to_multiaffine().map_err(|_| Error::NotCertifiable("partial symmetrization of a non-multiaffine polynomial".into()))?;
                let (g, ok) = partial_symmetrize(&f, *i, *j, *lambda)?;
                if !ok {
                    return Err(Error::NotCertifiable(format!("lambda = {lambda} outside [0, 1]")));
                }
                trail.push("partial_symmetrize".into());
                g.to_dense()
            }
            Construction::SymmetricHomogenize(inner) => {
                let f = inner.build(trail)?;
                if !f.is_real() {
                    return Err(Error::NotCertifiable("symmetric homogenization of a non-real polynomial".into()));
                }
                let f = f.to_multiaffine().map_err(|_| Error::NotCertifiable("symmetric homogenization of a non-multiaffine polynomial".into()))?;
                trail.push("symmetric_homogenize".into());
                symmetric_homogenize(&f)?.to_dense()
            }
            Construction::Extend { inner, extra } => {
                let f = inner.build(trail)?;
                trail.push("extend".into());
                f.extend_arity(*extra)
            }
            Construction::DropVariable { inner, i } => {
                let f = inner.build(trail)?;
                trail.push("drop_variable".into());
                f.drop_variable(*i)?
            }
        };
        Ok(out)
    }
}

fn build_generator(g: &Generator, trail: &mut Vec<String>) -> Result<DensePoly> {
    match g {
        Generator::Pencil(p) => {
            let r = pencil_poly(p)?;
            if !r.certified {
                return Err(Error::NotCertifiable("pencil with a non-PSD coefficient".into()));
            }
            trail.push("pencil".into());
            Ok(r.poly)
        }
        Generator::Monomial { exps, coeff } => {
            trail.push("monomial".into());
            DensePoly::monomial(exps, *coeff)
        }
        Generator::LinearProduct { arity, factors } => {
            let mut acc = DensePoly::constant(*arity, Complex64::new(1.0, 0.0));
            for fac in factors {
                if fac.a.len() != *arity {
                    return Err(Error::ArityMismatch { expected: *arity, got: fac.a.len() });
                }
                if fac.a.iter().any(|&x| !(x >= 0.0 && x.is_finite())) || fac.b.im < 0.0 {
                    return Err(Error::NotCertifiable("linear factor with a zero in the upper half-plane".into()));
                }
                let mut terms: Vec<(Vec<usize>, Scalar)> = vec![(vec![0; *arity], fac.b)];
                for (k, &x) in fac.a.iter().enumerate() {
                    let mut e = vec![0; *arity];
                    e[k] = 1;
                    terms.push((e, Complex64::new(x, 0.0)));
                }
                acc = acc.mul(&DensePoly::from_terms(*arity, &terms)?)?;
            }
            trail.push("linear_product".into());
            Ok(acc)
        }
    }
}

/// `g - d_i f`, stable whenever `g + y f` is stable and `deg_i f <= 1`.
pub fn lieb_sokal(g: &DensePoly, f: &DensePoly, i: usize) -> Result<DensePoly> {
    if f.deg(i)? > 1 {
        return Err(Error::DegreeBound(format!("deg_{i} f exceeds 1")));
    }
    g.sub(&f.derivative(i)?)
}

/// Build the construction and return it with its derivation.
pub fn certify(c: &Construction) -> Result<(DensePoly, StabilityVerdict)> {
    let mut trail = Vec::new();
    let f = c.build(&mut trail)?;
    Ok((f, StabilityVerdict::Certified { derivation: trail }))
}

/// Certify `claimed` by a construction that must reproduce it coefficientwise.
pub fn certify_claim(c: &Construction, claimed: &DensePoly) -> Result<StabilityVerdict> {
    let (f, v) = certify(c)?;
    let tol = EPS_ZERO * (1.0 + claimed.max_abs_coeff());
    if !f.approx_eq(claimed, tol) {
        return Err(Error::NotCertifiable("construction does not reproduce the claimed polynomial".into()));
    }
    Ok(v)
}
