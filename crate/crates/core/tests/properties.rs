mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::Rng;
use stablekit::capacity::{bound_chain, cap, diagonal_lift, g_factor, linear_product_poly, mixed_discriminant, permanent};
use stablekit::combi::{jump_system_check, SupportSet};
use stablekit::detpoly::mixed_det;
use stablekit::poly::{delta, delta_by_parts, discriminant_d, DensePoly, MultiAffinePoly};
use stablekit::polarize::{depolarize, gws_iterate, polarize_multi, symmetric_homogenize, GwsOptions};
use stablekit::rng::{rng, Rng64};
use stablekit::roots::{hb_check, is_real_rooted, proper_position, ProperPosition};
use stablekit::sep::{check_nc, evolve, na_exhaustive, single_edge_closed_form, CubeDistribution, SepGenerator};
use stablekit::stability::{probe_stable, probe_stable_ma, RegionSpec, StabilityVerdict, Witness};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { failure_persistence: None, rng_seed: RngSeed::Fixed(0x5eed), ..ProptestConfig::with_cases(cases) }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn random_multiaffine(r: &mut Rng64, m: usize) -> MultiAffinePoly {
    MultiAffinePoly::from_coeffs(m, (0..1 << m).map(|_| c(normal(r))).collect()).unwrap()
}

fn random_dense(r: &mut Rng64, bounds: Vec<usize>, complex: bool) -> DensePoly {
    let n: usize = bounds.iter().map(|b| b + 1).product();
    DensePoly::from_coeffs(bounds, (0..n).map(|_| cnormal(r, complex)).collect()).unwrap()
}

fn from_roots(roots: &[f64]) -> DensePoly {
    roots.iter().fold(DensePoly::univariate_real(&[1.0]).unwrap(), |p, &x| p.mul(&DensePoly::univariate_real(&[-x, 1.0]).unwrap()).unwrap())
}

fn rel_close(a: Complex64, b: Complex64, scale: f64, tol: f64) -> bool {
    (a - b).norm() <= tol * scale.max(1.0)
}

fn naive_permanent(a: &DMatrix<f64>) -> f64 {
    fn go(a: &DMatrix<f64>, row: usize, used: &mut Vec<bool>) -> f64 {
        if row == a.nrows() {
            return 1.0;
        }
        let mut s = 0.0;
        for j in 0..a.ncols() {
            if !used[j] {
                used[j] = true;
                s += a[(row, j)] * go(a, row + 1, used);
                used[j] = false;
            }
        }
        s
    }
    go(a, 0, &mut vec![false; a.ncols()])
}

fn random_distribution(r: &mut Rng64, m: usize) -> CubeDistribution {
    let w: Vec<f64> = (0..1 << m).map(|_| r.random::<f64>()).collect();
    let total: f64 = w.iter().sum();
    CubeDistribution::new(m, w.iter().map(|v| v / total).collect()).unwrap()
}

fn random_generator(r: &mut Rng64, m: usize) -> SepGenerator {
    let mut g = SepGenerator::new(m);
    for i in 0..m {
        for j in i + 1..m {
            if r.random_bool(0.6) {
                g = g.edge(i, j, r.random_range(0.1..2.0)).unwrap();
            }
        }
    }
    g
}

proptest! {
    #![proptest_config(config(500))]

    #[test]
    fn delta_matches_coefficient_extraction(seed in any::<u64>(), m in 2usize..=6) {
        let mut r = rng(seed);
        let f = random_multiaffine(&mut r, m);
        let i = r.random_range(0..m);
        let j = (i + r.random_range(1..m)) % m;
        let by_parts = delta_by_parts(&f, i, j).unwrap();
        let q = delta(&f, i, j).unwrap();
        prop_assert!(q.sub(&by_parts).unwrap().max_abs_coeff() <= 1e-10 * f.max_abs_coeff().powi(2).max(1.0));
    }

    #[test]
    fn line_restriction_commutes_with_evaluation(seed in any::<u64>(), m in 1usize..=4) {
        let mut r = rng(seed);
        let bounds: Vec<usize> = (0..m).map(|_| r.random_range(0..=3)).collect();
        let f = random_dense(&mut r, bounds, true);
        let a: Vec<f64> = (0..m).map(|_| normal(&mut r)).collect();
        let b: Vec<f64> = (0..m).map(|_| normal(&mut r)).collect();
        let t = cnormal(&mut r, true);
        let p = f.restrict_line(&a, &b).unwrap();
        let z: Vec<Complex64> = a.iter().zip(&b).map(|(&x, &y)| c(x) + t * y).collect();
        let lhs = p.evaluate(&[t]).unwrap();
        let rhs = f.evaluate(&z).unwrap();
        prop_assert!(rel_close(lhs, rhs, f.abs_scale(&z).unwrap(), 1e-10));
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn discriminant_symmetric_in_its_indices(seed in any::<u64>(), m in 3usize..=5) {
        let mut r = rng(seed);
        let f = random_multiaffine(&mut r, m);
        let mut idx: Vec<usize> = (0..m).collect();
        for k in 0..3 {
            let s = r.random_range(k..m);
            idx.swap(k, s);
        }
        let (h, i, j) = (idx[0], idx[1], idx[2]);
        let base = discriminant_d(&f, h, i, j).unwrap();
        let scale = base.max_abs_coeff().max(1.0);
        for (a, b, c3) in [(h, j, i), (i, h, j), (i, j, h), (j, h, i), (j, i, h)] {
            let other = discriminant_d(&f, a, b, c3).unwrap();
            prop_assert!(base.sub(&other).unwrap().max_abs_coeff() <= 1e-10 * scale);
        }
    }

    #[test]
    fn discriminant_matches_pointwise_quadratic(seed in any::<u64>(), m in 3usize..=5) {
        let mut r = rng(seed);
        let f = random_multiaffine(&mut r, m);
        let (h, i, j) = (0, 1, 2);
        let d = discriminant_d(&f, h, i, j).unwrap();
        let x: Vec<f64> = (0..m).map(|_| normal(&mut r)).collect();
        // Delta_ij f at x with x_h = t, from four evaluations of f
        let delta_at = |t: f64| {
            let at = |vi: f64, vj: f64| {
                let mut y = x.clone();
                y[h] = t;
                y[i] = vi;
                y[j] = vj;
                f.evaluate_real(&y).unwrap().re
            };
            let (f00, f10, f01, f11) = (at(0.0, 0.0), at(1.0, 0.0), at(0.0, 1.0), at(1.0, 1.0));
            let (fi, fj, fij) = (f10 - f00, f01 - f00, f11 - f10 - f01 + f00);
            let f_at = f00 + fi * x[i] + fj * x[j] + fij * x[i] * x[j];
            (fi + fij * x[j]) * (fj + fij * x[i]) - f_at * fij
        };
        let (lo, mid, hi) = (delta_at(-1.0), delta_at(0.0), delta_at(1.0));
        let (a2, b1, c0) = ((hi + lo) / 2.0 - mid, (hi - lo) / 2.0, mid);
        let expected = b1 * b1 - 4.0 * a2 * c0;
        let got = d.evaluate_real(&x).unwrap().re;
        let scale = d.abs_scale(&x.iter().map(|&v| c(v)).collect::<Vec<_>>()).unwrap();
        prop_assert!((got - expected).abs() <= 1e-9 * scale.max(1.0), "{got} vs {expected}");
    }

    #[test]
    fn double_inversion_is_sign_flip(seed in any::<u64>(), m in 1usize..=3) {
        let mut r = rng(seed);
        let bounds: Vec<usize> = (0..m).map(|_| r.random_range(1..=3)).collect();
        let f = random_dense(&mut r, bounds.clone(), false);
        let i = r.random_range(0..m);
        let d = bounds[i];
        let twice = f.invert_with_degree(i, d).unwrap().invert_with_degree(i, d).unwrap();
        let sign = if d % 2 == 1 { -1.0 } else { 1.0 };
        prop_assert!(twice.approx_eq(&f.scale(c(sign)), 1e-14));
    }

    #[test]
    fn products_evaluate_pointwise(seed in any::<u64>(), m in 1usize..=3) {
        let mut r = rng(seed);
        let bf: Vec<usize> = (0..m).map(|_| r.random_range(0..=2)).collect();
        let f = random_dense(&mut r, bf, true);
        let bg: Vec<usize> = (0..m).map(|_| r.random_range(0..=2)).collect();
        let g = random_dense(&mut r, bg, true);
        let bh: Vec<usize> = (0..m).map(|_| r.random_range(0..=2)).collect();
        let h = random_dense(&mut r, bh, true);
        let z: Vec<Complex64> = (0..m).map(|_| cnormal(&mut r, true)).collect();
        let fg = f.mul(&g).unwrap();
        let scale = f.abs_scale(&z).unwrap() * g.abs_scale(&z).unwrap();
        prop_assert!(rel_close(fg.evaluate(&z).unwrap(), f.evaluate(&z).unwrap() * g.evaluate(&z).unwrap(), scale, 1e-12));
        prop_assert!(fg.mul(&h).unwrap().approx_eq(&f.mul(&g.mul(&h).unwrap()).unwrap(), 1e-12 * scale.max(1.0)));
        prop_assert!(f.add(&g).unwrap().approx_eq(&g.add(&f).unwrap(), 0.0));
    }

    #[test]
    fn interlaced_pencils_stay_real_rooted(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let mut pts: Vec<f64> = (0..2 * n).map(|_| 3.0 * normal(&mut r)).collect();
        pts.sort_by(|a, b| a.total_cmp(b));
        prop_assume!(pts.windows(2).all(|w| w[1] - w[0] > 1e-3));
        let f = from_roots(&pts.iter().step_by(2).cloned().collect::<Vec<_>>());
        let g = from_roots(&pts.iter().skip(1).step_by(2).cloned().collect::<Vec<_>>());
        for _ in 0..20 {
            let (a, b) = (normal(&mut r), normal(&mut r));
            let h = f.scale(c(a)).add(&g.scale(c(b))).unwrap();
            prop_assert!(is_real_rooted(&h).unwrap());
        }
    }

    #[test]
    fn proper_position_is_antisymmetric(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let f = from_roots(&(0..n).map(|_| 2.0 * normal(&mut r)).collect::<Vec<_>>());
        let g = from_roots(&(0..n).map(|_| 2.0 * normal(&mut r)).collect::<Vec<_>>());
        let fg = proper_position(&f, &g).unwrap();
        let gf = proper_position(&g, &f).unwrap();
        let flipped = match fg {
            ProperPosition::FLlG => ProperPosition::GLlF,
            ProperPosition::GLlF => ProperPosition::FLlG,
            other => other,
        };
        prop_assert_eq!(gf, flipped);
        prop_assert_eq!(proper_position(&f, &f.scale(c(2.5))).unwrap(), ProperPosition::Both);
    }

    #[test]
    fn falsified_witnesses_recheck(seed in any::<u64>(), m in 2usize..=4) {
        let mut r = rng(seed);
        let f = random_multiaffine(&mut r, m).to_dense();
        if let StabilityVerdict::Falsified { witness: Witness::Point { point, residual, .. } } =
            probe_stable(&f, 200, seed, &RegionSpec::UpperHalfPlane).unwrap()
        {
            prop_assert!(point.iter().all(|z| z.im > 0.0));
            prop_assert!(residual <= 1e-8);
            let v = f.evaluate(&point).unwrap().norm();
            prop_assert!(v <= 1e-8 * f.abs_scale(&point).unwrap());
        }
    }

    #[test]
    fn disc_witnesses_lie_in_the_disc(seed in any::<u64>(), m in 1usize..=3) {
        let mut r = rng(seed);
        let f = random_multiaffine(&mut r, m).to_dense();
        if let StabilityVerdict::Falsified { witness: Witness::Point { point, .. } } =
            probe_stable(&f, 200, seed, &RegionSpec::UnitDisc).unwrap()
        {
            prop_assert!(point.iter().all(|z| z.norm() < 1.0));
            prop_assert!(f.evaluate(&point).unwrap().norm() <= 1e-7 * f.abs_scale(&point).unwrap().max(1e-300));
        }
    }
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn hb_agrees_with_proper_position(seed in any::<u64>(), n in 1usize..=4, stable_pair in any::<bool>()) {
        let mut r = rng(seed);
        let (f, g) = if stable_pair {
            let mut pts: Vec<f64> = (0..2 * n).map(|_| 3.0 * normal(&mut r)).collect();
            pts.sort_by(|a, b| a.total_cmp(b));
            prop_assume!(pts.windows(2).all(|w| w[1] - w[0] > 1e-3));
            (from_roots(&pts.iter().step_by(2).cloned().collect::<Vec<_>>()), from_roots(&pts.iter().skip(1).step_by(2).cloned().collect::<Vec<_>>()))
        } else {
            let f = DensePoly::univariate_real(&(0..=n).map(|_| normal(&mut r)).collect::<Vec<_>>()).unwrap();
            let g = DensePoly::univariate_real(&(0..=n).map(|_| normal(&mut r)).collect::<Vec<_>>()).unwrap();
            (f, g)
        };
        let hb = hb_check(&f, &g).unwrap();
        let expected = is_real_rooted(&f).unwrap()
            && is_real_rooted(&g).unwrap()
            && matches!(proper_position(&f, &g).unwrap(), ProperPosition::FLlG | ProperPosition::Both);
        prop_assert_eq!(hb, expected);
    }

    #[test]
    fn polarization_round_trips(seed in any::<u64>(), m in 1usize..=3) {
        let mut r = rng(seed);
        let kappa: Vec<usize> = (0..m).map(|_| r.random_range(0..=3)).collect();
        let f = random_dense(&mut r, kappa.clone(), true);
        let g = polarize_multi(&f, &kappa).unwrap();
        prop_assert!(depolarize(&g, &kappa).unwrap().approx_eq(&f, 1e-12 * f.max_abs_coeff().max(1.0)));
    }

    #[test]
    fn symmetrization_preserves_the_diagonal(seed in any::<u64>(), m in 2usize..=5) {
        let mut r = rng(seed);
        let f = DensePoly::univariate(&(0..=m).map(|_| cnormal(&mut r, true)).collect::<Vec<_>>()).unwrap();
        let run = gws_iterate(&f, m, &GwsOptions { tol: Some(1e-10), ..Default::default() }).unwrap();
        prop_assert!(depolarize(&run.result, &[m]).unwrap().approx_eq(&f, 1e-9 * f.max_abs_coeff().max(1.0)));
        prop_assert!(depolarize(&run.start, &[m]).unwrap().approx_eq(&f, 1e-9 * f.max_abs_coeff().max(1.0)));
    }

    #[test]
    fn real_rooted_inputs_polarize_to_stable(seed in any::<u64>(), d in 1usize..=5) {
        let mut r = rng(seed);
        let f = from_roots(&(0..d).map(|_| normal(&mut r)).collect::<Vec<_>>());
        let run = gws_iterate(&f, d, &GwsOptions { tol: Some(1e-10), ..Default::default() }).unwrap();
        prop_assert!(!probe_stable_ma(&run.result, 200, seed, &RegionSpec::UpperHalfPlane).unwrap().is_falsified());
    }

    #[test]
    fn ryser_matches_permutation_sum(seed in any::<u64>(), n in 1usize..=7) {
        let mut r = rng(seed);
        let a = DMatrix::from_fn(n, n, |_, _| normal(&mut r));
        let naive = naive_permanent(&a);
        let scale: f64 = naive_permanent(&a.map(f64::abs));
        prop_assert!((permanent(&a).unwrap() - naive).abs() <= 1e-10 * scale.max(1e-300));
    }

    #[test]
    fn mixed_discriminant_of_diagonal_lift_is_permanent(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let b = DMatrix::from_fn(n, n, |_, _| if r.random_bool(0.5) { r.random::<f64>() } else { f64::from(r.random_range(0..2u8)) });
        let per = permanent(&b).unwrap();
        let disc = mixed_discriminant(&diagonal_lift(&b)).unwrap();
        prop_assert!((disc - per).abs() <= 1e-10 * per.abs().max(1.0));
    }

    #[test]
    fn mixed_det_is_symmetric_and_homogeneous(seed in any::<u64>(), n in 1usize..=4, k in 1usize..=3) {
        let mut r = rng(seed);
        let mats: Vec<DMatrix<Complex64>> = (0..k).map(|_| gaussian(&mut r, n, n, true)).collect();
        let s = normal(&mut r);
        let base = mixed_det(&mats).unwrap();
        let scale = mats.iter().map(|m| 1.0 + m.norm()).product::<f64>().powi(n as i32);
        let mut rev = mats.clone();
        rev.reverse();
        prop_assert!(rel_close(mixed_det(&rev).unwrap(), base, scale, 1e-10));
        let scaled: Vec<_> = mats.iter().map(|m| m.scale(s)).collect();
        prop_assert!(rel_close(mixed_det(&scaled).unwrap(), base * s.powi(n as i32), scale * (1.0 + s.abs()).powi(n as i32), 1e-10));
        // diagonal inputs reduce to det of the sum
        let diags: Vec<DMatrix<Complex64>> = mats.iter().map(|m| DMatrix::from_diagonal(&m.diagonal())).collect();
        let sum = diags.iter().fold(DMatrix::zeros(n, n), |a, b| a + b);
        prop_assert!(rel_close(mixed_det(&diags).unwrap(), sum.determinant(), scale, 1e-10));
    }

    #[test]
    fn capacity_step_and_chain(seed in any::<u64>(), m in 2usize..=5) {
        let mut r = rng(seed);
        let b = DMatrix::from_fn(m, m, |_, _| r.random_range(0.05..1.0));
        let f = linear_product_poly(&b).unwrap();
        let full = cap(&f).unwrap();
        prop_assert!(!full.diverged && full.monotone);
        // d/dx_m at x_m = 0 keeps stability and loses at most G(deg_m f)
        let last = m - 1;
        let dm = f.deg(last).unwrap();
        let g = f.derivative(last).unwrap().specialize(last, c(0.0)).unwrap().drop_variable(last).unwrap();
        let step = cap(&g).unwrap();
        prop_assert!(step.cap_estimate >= g_factor(dm) * full.cap_estimate - 1e-6);
        let chain = bound_chain(&f).unwrap();
        prop_assert!(chain.bound >= chain.weak_bound - 1e-12);
        prop_assert!(chain.holds());
    }

    #[test]
    fn exclusion_semigroup(seed in any::<u64>(), m in 2usize..=5) {
        let mut r = rng(seed);
        let phi = random_distribution(&mut r, m);
        let gen = random_generator(&mut r, m);
        let (s, t) = (r.random_range(0.0..3.0), r.random_range(0.0..3.0));
        let two_step = evolve(&evolve(&phi, &gen, s).unwrap(), &gen, t).unwrap();
        let one_step = evolve(&phi, &gen, s + t).unwrap();
        prop_assert!(two_step.total_variation(&one_step) <= 1e-9);
        prop_assert!((one_step.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn negative_association_implies_negative_correlation(seed in any::<u64>(), m in 2usize..=4) {
        let mut r = rng(seed);
        let phi = if r.random_bool(0.5) {
            random_distribution(&mut r, m)
        } else {
            let start = CubeDistribution::delta(m, r.random_range(0..1usize << m)).unwrap();
            evolve(&start, &random_generator(&mut r, m), r.random_range(0.0..2.0)).unwrap()
        };
        if na_exhaustive(&phi).unwrap().holds {
            prop_assert!(check_nc(&phi).holds);
        }
    }

    #[test]
    fn symmetric_homogenization_stays_stable(seed in any::<u64>(), m in 1usize..=3) {
        let mut r = rng(seed);
        let n = r.random_range(1..=m);
        let q = gaussian(&mut r, n, m, false);
        let pencil = stablekit::detpoly::MatrixPencil::new(stablekit::detpoly::MatrixPencil::from_q(&q).a, psd(&mut r, n, n, false)).unwrap();
        let f = stablekit::detpoly::pencil_poly(&pencil).unwrap().poly.with_bounds(&vec![1; m]).unwrap().to_multiaffine().unwrap();
        let fsh = symmetric_homogenize(&f).unwrap();
        prop_assert_eq!(fsh.homogeneous_degree(), Some(m));
        prop_assert!(!probe_stable_ma(&fsh, 200, seed, &RegionSpec::UpperHalfPlane).unwrap().is_falsified());
    }

    #[test]
    fn certified_supports_are_jump_systems(seed in any::<u64>(), m in 1usize..=3, n in 1usize..=3) {
        let mut r = rng(seed);
        let f = certified_pencil(&mut r, m, n, false);
        prop_assert!(jump_system_check(&SupportSet::of_dense(&f)).unwrap().is_jump);
    }
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn single_edge_closed_form_holds(rate in 0.01f64..5.0, t in 0.0f64..5.0) {
        let phi = CubeDistribution::delta(2, 0b01).unwrap();
        let gen = SepGenerator::new(2).edge(0, 1, rate).unwrap();
        let out = evolve(&phi, &gen, t).unwrap();
        let (stay, swap) = single_edge_closed_form(rate, t);
        prop_assert!((out.prob(0b01) - stay).abs() <= 1e-12);
        prop_assert!((out.prob(0b10) - swap).abs() <= 1e-12);
    }
}
