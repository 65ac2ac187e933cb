use super::{StabilityVerdict, Witness};
use crate::poly::{delta, DensePoly, MultiAffinePoly, EPS_ZERO};
use crate::rng::{cauchy, rng, schedule};
use crate::{Error, Result};
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct DeltaOptions {
    /// Cauchy samples per pair.
    pub samples: usize,
    /// Starting points kept for coordinate descent.
    pub starts: usize,
    pub sweeps: usize,
}

impl Default for DeltaOptions {
    fn default() -> Self {
        DeltaOptions { samples: 64, starts: 4, sweeps: 25 }
    }
}

pub(crate) fn eval(q: &DensePoly, x: &[f64]) -> (f64, f64) {
    let v = q.evaluate_real(x).expect("arity checked").re;
    let z: Vec<_> = x.iter().map(|&t| num_complex::Complex64::new(t, 0.0)).collect();
    (v, q.abs_scale(&z).expect("arity checked"))
}

pub(crate) fn is_negative(v: f64, abs: f64) -> bool {
    v < -(EPS_ZERO.max(1e-9 * abs))
}

/// Push coordinate `h` to minimize the quadratic `A x^2 + B x + C` it traces,
/// or far enough to make it negative when it is unbounded below.
fn descend(q: &DensePoly, x: &mut [f64], h: usize) {
    let at = |x: &mut [f64], t: f64| {
        x[h] = t;
        eval(q, x).0
    };
    let keep = x[h];
    let (lo, mid, hi) = (at(x, -1.0), at(x, 0.0), at(x, 1.0));
    let a = (hi + lo) / 2.0 - mid;
    let b = (hi - lo) / 2.0;
    let c = mid;
    let scale = a.abs() + b.abs() + c.abs();
    let tol = 1e-12 * scale.max(1e-300);
    let t = if a < -tol {
        let big = (b.abs() + (b * b + 4.0 * a.abs() * (c.abs() + 1.0)).sqrt()) / a.abs() + 1.0;
        if b >= 0.0 { big } else { -big }
    } else if a > tol {
        -b / (2.0 * a)
    } else if b.abs() > tol {
        -(b.signum()) * ((c.abs() + 1.0) / b.abs() + 1.0)
    } else {
        keep
    };
    x[h] = if t.is_finite() { t } else { keep };
}

fn grid(k: usize) -> Vec<Vec<f64>> {
    let nodes: &[f64] = if k <= 4 {
        &[-2.0, -1.0, 0.0, 1.0, 2.0]
    } else if k <= 7 {
        &[-1.0, 0.0, 1.0]
    } else {
        return vec![];
    };
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|p| nodes.iter().map(move |&v| [p.clone(), vec![v]].concat())).collect();
    }
    out
}

fn search_pair(f: &MultiAffinePoly, i: usize, j: usize, seed: u64, opts: &DeltaOptions) -> Result<Option<Witness>> {
    let m = f.arity();
    let q = delta(f, i, j)?;
    let others: Vec<usize> = (0..m).filter(|&k| k != i && k != j).collect();
    let embed = |vals: &[f64]| {
        let mut x = vec![1.0; m];
        for (&k, &v) in others.iter().zip(vals) {
            x[k] = v;
        }
        x
    };
    let mut pts: Vec<Vec<f64>> = grid(others.len()).iter().map(|g| embed(g)).collect();
    let mut r = rng(seed);
    for _ in 0..opts.samples {
        let v: Vec<f64> = others.iter().map(|_| cauchy(&mut r)).collect();
        pts.push(embed(&v));
    }
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::with_capacity(pts.len());
    for x in pts {
        let (v, abs) = eval(&q, &x);
        if is_negative(v, abs) {
            return Ok(Some(Witness::DeltaNegative { i, j, at: x, value: v }));
        }
        scored.push((v / abs.max(1.0), x));
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, mut x) in scored.into_iter().take(opts.starts) {
        for _ in 0..opts.sweeps {
            for &h in &others {
                descend(&q, &mut x, h);
                let (v, abs) = eval(&q, &x);
                if is_negative(v, abs) {
                    return Ok(Some(Witness::DeltaNegative { i, j, at: x, value: v }));
                }
            }
        }
    }
    Ok(None)
}

/// Real stability of a real multiaffine polynomial through nonnegativity of
/// every `Delta_ij f` on `R^m`: a deterministic grid, Cauchy samples, and
/// exact coordinate descent (each `Delta_ij f` is quadratic per variable).
pub fn delta_real_stable(f: &MultiAffinePoly, seed: u64, opts: &DeltaOptions) -> Result<StabilityVerdict> {
    if !f.is_real() {
        return Err(Error::NotReal);
    }
    if f.is_zero() {
        return Ok(StabilityVerdict::Certified { derivation: vec!["zero".into()] });
    }
    let m = f.arity();
    if m <= 1 {
        return Ok(StabilityVerdict::Certified { derivation: vec!["real affine".into()] });
    }
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let seeds = schedule(seed, pairs.len());
    let hit = pairs
        .par_iter()
        .zip(seeds.par_iter())
        .map(|(&(i, j), &s)| search_pair(f, i, j, s, opts))
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match hit {
        None => Ok(StabilityVerdict::ProbePassed { probes: pairs.len() * opts.samples, seed }),
        Some(Ok(Some(w))) => Ok(StabilityVerdict::Falsified { witness: w }),
        Some(Err(e)) => Err(e),
        Some(Ok(None)) => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ma(m: usize, t: &[(usize, f64)]) -> MultiAffinePoly {
        MultiAffinePoly::from_real_terms(m, t).unwrap()
    }

    #[test]
    fn examples() {
        let o = DeltaOptions::default();
        match delta_real_stable(&ma(2, &[(0b11, 1.0), (0, 1.0)]), 0, &o).unwrap() {
            StabilityVerdict::Falsified { witness: Witness::DeltaNegative { i, j, at, value } } => {
                assert_eq!((i, j), (0, 1));
                assert_eq!(at, vec![1.0, 1.0]);
                assert!((value + 1.0).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
        assert!(delta_real_stable(&ma(2, &[(0b11, 1.0), (0b01, 1.0), (0b10, 1.0)]), 0, &o).unwrap().is_probe_passed());
        assert!(delta_real_stable(&ma(2, &[(0b01, 1.0), (0b10, 1.0)]), 0, &o).unwrap().is_probe_passed());
        let complex = MultiAffinePoly::from_fn(1, |_| num_complex::Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(delta_real_stable(&complex, 0, &o).unwrap_err(), Error::NotReal);
    }

    #[test]
    fn finds_hidden_negativity() {
        // x1 x2 + x3 x4 + x1 + x4: Delta_12 = x4 - x3 x4 is negative for x3 > 1
        let f = ma(4, &[(0b0011, 1.0), (0b1100, 1.0), (0b0001, 1.0), (0b1000, 1.0)]);
        assert!(delta_real_stable(&f, 7, &DeltaOptions::default()).unwrap().is_falsified());
        // e_2 itself is real stable
        let e2 = MultiAffinePoly::elementary_symmetric(4, 2).unwrap();
        assert!(delta_real_stable(&e2, 7, &DeltaOptions::default()).unwrap().is_probe_passed());
    }
}
