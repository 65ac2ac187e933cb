//! Determinantal polynomials, mixed determinants, and the matrix
//! inequalities derived from them.

mod fisher;
mod johnson;

pub use fisher::{fisher_products, newton_maclaurin_check, FisherProducts, Inequality, NewtonMaclaurinReport};
pub use johnson::{inertia_of_matrix, inertia_of_poly, johnson_suite, Inertia, InterlaceVerdict, JohnsonReport};

use crate::poly::{DensePoly, Scalar};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// A Hermitian matrix; construction checks `A = A^*` to `1e-12` relative.
#[derive(Clone, Debug)]
pub struct HermitianMatrix {
    m: DMatrix<Scalar>,
}

pub fn det(m: &DMatrix<Scalar>) -> Scalar {
    if m.nrows() == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        m.determinant()
    }
}

/// Principal submatrix on the rows/columns in bitmask `s`.
pub fn principal(m: &DMatrix<Scalar>, s: usize) -> DMatrix<Scalar> {
    let idx: Vec<usize> = (0..m.nrows()).filter(|&i| s >> i & 1 == 1).collect();
    m.select_rows(&idx).select_columns(&idx)
}

impl HermitianMatrix {
    pub fn new(m: DMatrix<Scalar>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::MatrixCondition("square"));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let gap = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if gap > 1e-12 * scale {
            return Err(Error::MatrixCondition("Hermitian"));
        }
        // store the exactly Hermitian part
        let h = (&m + m.adjoint()).map(|z| z * 0.5);
        Ok(HermitianMatrix { m: h })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::MatrixCondition("square"));
        }
        HermitianMatrix::new(DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix { m: DMatrix::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix { m: DMatrix::zeros(n, n) }
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        HermitianMatrix { m: DMatrix::from_fn(n, n, |i, j| Complex64::new(if i == j { d[i] } else { 0.0 }, 0.0)) }
    }

    /// `G G^*`, always positive semidefinite.
    pub fn gram(g: &DMatrix<Scalar>) -> Self {
        HermitianMatrix::new(g * g.adjoint()).expect("G G^* is Hermitian")
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Scalar> {
        &self.m
    }

    /// Largest entry modulus, at least 1.
    pub fn scale(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(1.0, f64::max)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.n() == 0 {
            return vec![];
        }
        let mut e: Vec<f64> = self.m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| a.total_cmp(b));
        e
    }

    fn norm2(&self) -> f64 {
        self.eigenvalues().iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue at least `-1e-10 * ||A||`.
    pub fn is_psd(&self) -> bool {
        let e = self.eigenvalues();
        e.first().is_none_or(|&x| x >= -1e-10 * self.norm2())
    }

    /// Smallest eigenvalue above `1e-10 * ||A||`.
    pub fn is_pd(&self) -> bool {
        let e = self.eigenvalues();
        e.first().is_none_or(|&x| x > 1e-10 * self.norm2())
    }

    /// `A(j)`: delete row and column `j`.
    pub fn minor(&self, j: usize) -> Result<HermitianMatrix> {
        if j >= self.n() {
            return Err(Error::IndexOutOfRange { index: j, arity: self.n() });
        }
        let all = (1usize << self.n()) - 1;
        Ok(HermitianMatrix { m: principal(&self.m, all ^ (1 << j)) })
    }
}

/// `(A_1..A_m; B)`, read as `det(x_1 A_1 + .. + x_m A_m + B)`.
#[derive(Clone, Debug)]
pub struct MatrixPencil {
    pub a: Vec<HermitianMatrix>,
    pub b: HermitianMatrix,
}

impl MatrixPencil {
    pub fn new(a: Vec<HermitianMatrix>, b: HermitianMatrix) -> Result<Self> {
        let n = b.n();
        if a.iter().any(|x| x.n() != n) {
            return Err(Error::MatrixCondition("of matching dimension"));
        }
        Ok(MatrixPencil { a, b })
    }

    /// `det(Q X Q^*)` with `X = diag(x)`: `A_i = q_i q_i^*` for the columns `q_i` of `Q`.
    pub fn from_q(q: &DMatrix<Scalar>) -> Self {
        let a = (0..q.ncols()).map(|i| HermitianMatrix::gram(&q.columns(i, 1).into_owned())).collect();
        MatrixPencil { a, b: HermitianMatrix::zeros(q.nrows()) }
    }

    pub fn arity(&self) -> usize {
        self.a.len()
    }

    pub fn n(&self) -> usize {
        self.b.n()
    }

    pub fn all_psd(&self) -> bool {
        self.a.iter().all(|x| x.is_psd())
    }

    pub fn at(&self, x: &[Scalar]) -> DMatrix<Scalar> {
        let mut m = self.b.matrix().clone();
        for (xi, ai) in x.iter().zip(&self.a) {
            m += ai.matrix() * *xi;
        }
        m
    }
}

/// Result of [`pencil_poly`]; `certified` is set when every `A_i` is PSD.
#[derive(Clone, Debug)]
pub struct PencilPoly {
    pub poly: DensePoly,
    pub certified: bool,
}

/// Column sources up to this many terms use multilinear column expansion.
const EXPANSION_CAP: usize = 1 << 16;

/// `det(x_1 A_1 + .. + x_m A_m + B)` as a real polynomial with box `n` per variable.
pub fn pencil_poly(p: &MatrixPencil) -> Result<PencilPoly> {
    let (m, n) = (p.arity(), p.n());
    let terms = (m as u128 + 1).checked_pow(n as u32).unwrap_or(u128::MAX);
    let raw = if terms <= EXPANSION_CAP as u128 { pencil_by_expansion(p)? } else { pencil_by_interpolation(p)? };
    let scale = raw.max_abs_coeff().max(1.0);
    let im = raw.coeffs().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if im > 1e-10 * scale {
        return Err(Error::Internal(format!("determinant has imaginary residue {im:e}")));
    }
    Ok(PencilPoly { poly: raw.map_coeffs(|z| Complex64::new(z.re, 0.0)), certified: p.all_psd() })
}

/// Multilinearity in columns: each column of the pencil comes from `B` or one `x_i A_i`.
pub fn pencil_by_expansion(p: &MatrixPencil) -> Result<DensePoly> {
    let (m, n) = (p.arity(), p.n());
    let mut out = DensePoly::zeros(vec![n; m])?;
    let sources: Vec<&DMatrix<Scalar>> = std::iter::once(p.b.matrix()).chain(p.a.iter().map(|a| a.matrix())).collect();
    let total = (m + 1).pow(n as u32);
    let mut pick = vec![0usize; n];
    let mut mat = DMatrix::<Scalar>::zeros(n, n);
    let mut acc = out.coeffs().to_vec();
    let strides = out.strides();
    for code in 0..total {
        let mut c = code;
        for k in 0..n {
            pick[k] = c % (m + 1);
            c /= m + 1;
            mat.set_column(k, &sources[pick[k]].column(k));
        }
        let d = det(&mat);
        if d.norm() == 0.0 {
            continue;
        }
        let idx: usize = pick.iter().filter(|&&s| s > 0).map(|&s| strides[s - 1]).sum();
        acc[idx] += d;
    }
    out = DensePoly::from_coeffs(out.bounds().to_vec(), acc)?;
    Ok(out)
}

/// Tensor-grid evaluation at integer nodes and per-axis Vandermonde solves.
pub fn pencil_by_interpolation(p: &MatrixPencil) -> Result<DensePoly> {
    let (m, n) = (p.arity(), p.n());
    let shape = DensePoly::zeros(vec![n; m])?;
    let nodes: Vec<f64> = (0..=n).map(|k| k as f64 - (n / 2) as f64).collect();
    let vinv = DMatrix::<Scalar>::from_fn(n + 1, n + 1, |k, l| Complex64::new(nodes[k].powi(l as i32), 0.0))
        .try_inverse()
        .ok_or_else(|| Error::Internal("singular Vandermonde".into()))?;
    let mut vals: Vec<Scalar> = (0..shape.volume())
        .map(|idx| {
            let x: Vec<Scalar> = shape.exps_of(idx).iter().map(|&k| Complex64::new(nodes[k], 0.0)).collect();
            det(&p.at(&x))
        })
        .collect();
    let strides = shape.strides();
    for axis in 0..m {
        let s = strides[axis];
        let mut next = vals.clone();
        for base in 0..vals.len() {
            if (base / s) % (n + 1) != 0 {
                continue;
            }
            for l in 0..=n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..=n {
                    acc += vinv[(l, k)] * vals[base + k * s];
                }
                next[base + l * s] = acc;
            }
        }
        vals = next;
    }
    DensePoly::from_coeffs(vec![n; m], vals)
}

/// `Det(A_1..A_k) = sum over ordered partitions (S_1..S_k) of [n] of prod det A_i[S_i]`.
pub fn mixed_det(mats: &[DMatrix<Scalar>]) -> Result<Scalar> {
    let k = mats.len();
    if k == 0 {
        return Err(Error::InvalidArgument("no matrices".into()));
    }
    let n = mats[0].nrows();
    if mats.iter().any(|a| a.nrows() != n || a.ncols() != n) {
        return Err(Error::MatrixCondition("square of matching dimension"));
    }
    let count = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > 1 << 24 || n > 16 {
        return Err(Error::CapExceeded { what: "mixed determinant assignments", needed: count, cap: 1 << 24 });
    }
    let dets: Vec<Vec<Scalar>> = mats.iter().map(|a| (0..1usize << n).map(|s| det(&principal(a, s))).collect()).collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut masks = vec![0usize; k];
    for code in 0..count as usize {
        masks.iter_mut().for_each(|x| *x = 0);
        let mut c = code;
        for pos in 0..n {
            masks[c % k] |= 1 << pos;
            c /= k;
        }
        total += masks.iter().zip(&dets).map(|(&s, d)| d[s]).product::<Scalar>();
    }
    Ok(total)
}

/// `Det(xA, -B) = sum_S x^|S| det A[S] det(-B[S^c])` as a univariate polynomial.
pub fn mixed_det_pair(a: &DMatrix<Scalar>, b: &DMatrix<Scalar>) -> Result<DensePoly> {
    let n = a.nrows();
    if b.nrows() != n || a.ncols() != n || b.ncols() != n {
        return Err(Error::MatrixCondition("square of matching dimension"));
    }
    if n > 20 {
        return Err(Error::CapExceeded { what: "subsets", needed: 1u128 << n, cap: 1 << 20 });
    }
    let all = (1usize << n) - 1;
    let neg_b = -b;
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    for s in 0..=all {
        c[s.count_ones() as usize] += det(&principal(a, s)) * det(&principal(&neg_b, all ^ s));
    }
    DensePoly::univariate(&c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> Scalar {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn pencil_examples() {
        let p = MatrixPencil::new(
            vec![HermitianMatrix::diag(&[1.0, 0.0]), HermitianMatrix::diag(&[0.0, 1.0])],
            HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        )
        .unwrap();
        let f = pencil_poly(&p).unwrap();
        assert!(f.certified);
        let expect = DensePoly::from_real_terms(2, &[(vec![1, 1], 1.0), (vec![0, 0], -1.0)]).unwrap();
        assert!(f.poly.approx_eq(&expect, 1e-13));
        assert!(pencil_by_interpolation(&p).unwrap().approx_eq(&expect, 1e-12));

        let p = MatrixPencil::new(vec![HermitianMatrix::identity(2)], HermitianMatrix::zeros(2)).unwrap();
        assert!(pencil_poly(&p).unwrap().poly.approx_eq(&DensePoly::univariate_real(&[0.0, 0.0, 1.0]).unwrap(), 1e-13));

        let q = MatrixPencil::from_q(&DMatrix::identity(2, 2));
        let expect = DensePoly::from_real_terms(2, &[(vec![1, 1], 1.0)]).unwrap();
        assert!(pencil_poly(&q).unwrap().poly.approx_eq(&expect, 1e-13));
    }

    #[test]
    fn non_psd_uncertified() {
        let p = MatrixPencil::new(vec![HermitianMatrix::diag(&[1.0, -1.0])], HermitianMatrix::zeros(2)).unwrap();
        assert!(!pencil_poly(&p).unwrap().certified);
    }

    #[test]
    fn hermitian_check() {
        let m = DMatrix::from_row_slice(2, 2, &[r(1.0), r(2.0), r(0.0), r(1.0)]);
        assert_eq!(HermitianMatrix::new(m).unwrap_err(), Error::MatrixCondition("Hermitian"));
    }

    #[test]
    fn mixed_det_examples() {
        let i2 = DMatrix::<Scalar>::identity(2, 2);
        // assignments of 2 positions to 2 slots, each term 1
        assert!((mixed_det(&[i2.clone(), i2.clone()]).unwrap() - r(4.0)).norm() < 1e-14);
        let b = DMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.0)]);
        let p = mixed_det_pair(&i2, &b).unwrap();
        assert!(p.approx_eq(&DensePoly::univariate_real(&[-1.0, 0.0, 1.0]).unwrap(), 1e-14));
        let a = DMatrix::from_row_slice(2, 2, &[r(2.0), r(1.0), r(1.0), r(3.0)]);
        assert!((mixed_det(std::slice::from_ref(&a)).unwrap() - r(5.0)).norm() < 1e-13);
    }
}
