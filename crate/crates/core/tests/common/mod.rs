#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use stablekit::detpoly::{HermitianMatrix, MatrixPencil};
use stablekit::poly::{DensePoly, MultiAffinePoly};
use stablekit::rng::Rng64;
use stablekit::stability::{certify, Construction, Generator};

pub fn normal(r: &mut Rng64) -> f64 {
    r.sample(StandardNormal)
}

pub fn cnormal(r: &mut Rng64, complex: bool) -> Complex64 {
    Complex64::new(normal(r), if complex { normal(r) } else { 0.0 })
}

pub fn gaussian(r: &mut Rng64, rows: usize, cols: usize, complex: bool) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| cnormal(r, complex))
}

pub fn hermitian(r: &mut Rng64, n: usize, complex: bool) -> HermitianMatrix {
    let g = gaussian(r, n, n, complex);
    HermitianMatrix::new((&g + g.adjoint()).scale(0.5)).unwrap()
}

/// `G G^*` with `G` of size `n x k`; PD almost surely when `k >= n`.
pub fn psd(r: &mut Rng64, n: usize, k: usize, complex: bool) -> HermitianMatrix {
    HermitianMatrix::gram(&gaussian(r, n, k, complex))
}

/// Real multiaffine `det(Q X Q^* + B)`, certified by construction.
pub fn certified_multiaffine(r: &mut Rng64, m: usize, complex: bool) -> MultiAffinePoly {
    let n = r.random_range(1..=m);
    let q = gaussian(r, n, m, complex);
    let pencil = MatrixPencil::new(MatrixPencil::from_q(&q).a, hermitian(r, n, complex)).unwrap();
    let (p, v) = certify(&Construction::leaf(Generator::Pencil(pencil))).unwrap();
    assert!(v.is_certified());
    p.with_bounds(&vec![1; m]).unwrap().to_multiaffine().unwrap()
}

/// `det(sum x_i A_i + B)` with full-rank PSD `A_i`; degree up to `n` per variable.
pub fn certified_pencil(r: &mut Rng64, m: usize, n: usize, b_psd: bool) -> DensePoly {
    let a = (0..m)
        .map(|_| {
            let k = r.random_range(1..=n);
            psd(r, n, k, false)
        })
        .collect();
    let b = if b_psd { psd(r, n, n, false) } else { hermitian(r, n, false) };
    let (p, v) = certify(&Construction::leaf(Generator::Pencil(MatrixPencil::new(a, b).unwrap()))).unwrap();
    assert!(v.is_certified());
    p.trim()
}
