use super::{minimize_log_ratio, vdw_bound, CapacityReport, LinearForms};
use crate::poly::DensePoly;
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

pub const MAX_PERMANENT_N: usize = 20;
pub const SINKHORN_TOL: f64 = 1e-10;
const SINKHORN_SWEEPS: usize = 100_000;

/// Neumaier compensated sum.
#[derive(Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Ryser's formula over a Gray code of column subsets.
pub fn permanent(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::MatrixCondition("square"));
    }
    if n > MAX_PERMANENT_N {
        return Err(Error::CapExceeded { what: "permanent dimension", needed: n as u128, cap: MAX_PERMANENT_N as u128 });
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut rows = vec![0.0; n];
    let mut acc = Compensated::default();
    let mut prev = 0usize;
    for k in 1usize..1 << n {
        let gray = k ^ (k >> 1);
        let j = (gray ^ prev).trailing_zeros() as usize;
        let sign = if gray & (1 << j) != 0 { 1.0 } else { -1.0 };
        for (i, r) in rows.iter_mut().enumerate() {
            *r += sign * a[(i, j)];
        }
        prev = gray;
        let term: f64 = rows.iter().product();
        if gray.count_ones() % 2 == n as u32 % 2 {
            acc.add(term);
        } else {
            acc.add(-term);
        }
    }
    Ok(acc.value())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sinkhorn {
    pub matrix: Vec<Vec<f64>>,
    pub sweeps: usize,
    /// largest `|row sum - 1|` or `|column sum - 1|`
    pub deviation: f64,
}

fn ds_deviation(b: &DMatrix<f64>) -> f64 {
    let r = b.row_iter().map(|r| (r.sum() - 1.0).abs());
    let c = b.column_iter().map(|c| (c.sum() - 1.0).abs());
    r.chain(c).fold(0.0, f64::max)
}

pub(crate) fn rows_of(b: &DMatrix<f64>) -> Vec<Vec<f64>> {
    b.row_iter().map(|r| r.iter().cloned().collect()).collect()
}

/// Alternate row and column normalization until doubly stochastic to `1e-10`.
pub fn sinkhorn(b: &DMatrix<f64>) -> Result<Sinkhorn> {
    if b.nrows() != b.ncols() || b.nrows() == 0 {
        return Err(Error::MatrixCondition("nonempty square"));
    }
    if let Some(v) = b.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::NegativeCoefficient { value: *v });
    }
    let mut m = b.clone();
    let mut sweeps = 0;
    loop {
        let deviation = ds_deviation(&m);
        if deviation <= SINKHORN_TOL {
            return Ok(Sinkhorn { matrix: rows_of(&m), sweeps, deviation });
        }
        if sweeps == SINKHORN_SWEEPS {
            return Err(Error::NoConvergence(format!("sinkhorn deviation {deviation:.3e}")));
        }
        sweeps += 1;
        for mut r in m.row_iter_mut() {
            let s = r.sum();
            if s <= 0.0 {
                return Err(Error::InvalidArgument("zero row".into()));
            }
            r /= s;
        }
        for mut c in m.column_iter_mut() {
            let s = c.sum();
            if s <= 0.0 {
                return Err(Error::InvalidArgument("zero column".into()));
            }
            c /= s;
        }
    }
}

/// `f_B(x) = prod_j (b_1j x_1 + .. + b_nj x_n)`.
pub fn linear_product_poly(b: &DMatrix<f64>) -> Result<DensePoly> {
    let n = b.nrows();
    let mut f = DensePoly::constant(n, Complex64::new(1.0, 0.0));
    for j in 0..b.ncols() {
        let form = (0..n).map(|i| Ok(DensePoly::variable(n, i)?.scale(Complex64::new(b[(i, j)], 0.0)))).try_fold(
            DensePoly::constant(n, Complex64::new(0.0, 0.0)),
            |acc, t: Result<DensePoly>| acc.add(&t?),
        )?;
        f = f.mul(&form)?;
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VdwReport {
    pub n: usize,
    pub sinkhorn_sweeps: usize,
    pub deviation: f64,
    pub permanent: f64,
    /// `n! / n^n`
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
    pub cap: CapacityReport,
    /// `|cap - 1| <= 1e-6`
    pub cap_ok: bool,
    /// entries all `1/n` to `1e-9`
    pub equality: bool,
    /// `|coeff(x_1..x_n) f_B - per B|` when the expansion is small enough to build
    pub expansion_gap: Option<f64>,
}

impl VdwReport {
    pub fn all_hold(&self) -> bool {
        self.holds && self.cap_ok && self.expansion_gap.is_none_or(|g| g <= 1e-12)
    }
}

/// `per(B) >= n!/n^n` and `cap(f_B) = 1` for doubly stochastic `B`;
/// with `normalize` the input is first Sinkhorn-scaled, otherwise it must
/// already be doubly stochastic.
pub fn vdw_suite(b: &DMatrix<f64>, normalize: bool) -> Result<VdwReport> {
    let n = b.nrows();
    let (m, sweeps, deviation) = if normalize {
        let s = sinkhorn(b)?;
        (DMatrix::from_fn(n, n, |i, j| s.matrix[i][j]), s.sweeps, s.deviation)
    } else {
        if b.ncols() != n || b.iter().any(|v| *v < 0.0) {
            return Err(Error::MatrixCondition("nonnegative square"));
        }
        let d = ds_deviation(b);
        if d > SINKHORN_TOL {
            return Err(Error::InvalidArgument(format!("not doubly stochastic (deviation {d:.3e})")));
        }
        (b.clone(), 0, d)
    };
    let per = permanent(&m)?;
    let bound = vdw_bound(n);
    let cap = minimize_log_ratio(&LinearForms::new(m.clone())?)?;
    let expansion_gap = if n <= 6 {
        let f = linear_product_poly(&m)?;
        Some((f.coeff(&vec![1; n]).re - per).abs())
    } else {
        None
    };
    Ok(VdwReport {
        n,
        sinkhorn_sweeps: sweeps,
        deviation,
        permanent: per,
        bound,
        slack: per - bound,
        holds: per >= bound - 1e-9,
        cap_ok: (cap.cap_estimate - 1.0).abs() <= 1e-6,
        cap,
        equality: m.iter().all(|v| (v - 1.0 / n as f64).abs() <= 1e-9),
        expansion_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng;
    use rand::Rng;

    pub(crate) fn naive_permanent(a: &DMatrix<f64>) -> f64 {
        fn rec(a: &DMatrix<f64>, row: usize, used: &mut Vec<bool>) -> f64 {
            if row == a.nrows() {
                return 1.0;
            }
            let mut s = 0.0;
            for j in 0..a.ncols() {
                if !used[j] {
                    used[j] = true;
                    s += a[(row, j)] * rec(a, row + 1, used);
                    used[j] = false;
                }
            }
            s
        }
        rec(a, 0, &mut vec![false; a.ncols()])
    }

    #[test]
    fn permanent_examples() {
        assert_eq!(permanent(&DMatrix::identity(3, 3)).unwrap(), 1.0);
        assert_eq!(permanent(&DMatrix::from_element(2, 2, 1.0)).unwrap(), 2.0);
        let j = DMatrix::from_element(3, 3, 1.0 / 3.0);
        assert!((permanent(&j).unwrap() - 2.0 / 9.0).abs() < 1e-16);
        assert!((naive_permanent(&j) - 2.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn ryser_matches_naive() {
        let mut r = rng(11);
        for _ in 0..20 {
            let n = r.random_range(1..=6);
            let a = DMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
            let (p, q) = (permanent(&a).unwrap(), naive_permanent(&a));
            assert!((p - q).abs() <= 1e-12 * (1.0 + q.abs()), "{p} {q}");
        }
    }

    #[test]
    fn sinkhorn_and_suite() {
        let j = DMatrix::from_element(3, 3, 1.0 / 3.0);
        let rep = vdw_suite(&j, false).unwrap();
        assert!(rep.equality && rep.all_hold());
        assert!(rep.slack.abs() < 1e-15);
        let rep = vdw_suite(&DMatrix::identity(3, 3), false).unwrap();
        assert!(!rep.equality && rep.all_hold());
        assert!((rep.permanent - 1.0).abs() < 1e-15);

        let mut r = rng(5);
        let b = DMatrix::from_fn(5, 5, |_, _| r.random_range(0.01..1.0));
        let rep = vdw_suite(&b, true).unwrap();
        assert!(rep.deviation <= SINKHORN_TOL && rep.all_hold());
        assert!(rep.slack > 0.0);

        let mut z = DMatrix::from_element(3, 3, 1.0);
        z.row_mut(1).fill(0.0);
        assert!(sinkhorn(&z).is_err());
        assert!(vdw_suite(&DMatrix::from_element(2, 2, 1.0), false).is_err());
    }
}
