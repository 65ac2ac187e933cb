use super::{moebius_conjugate, RegionSpec, StabilityVerdict, Witness};
use crate::poly::{DensePoly, MultiAffinePoly, Scalar};
use crate::rng::{cauchy, log_uniform, normal, rng, schedule};
use crate::roots::{roots_of_coeffs, trimmed_coeffs};
use crate::Result;
use num_complex::Complex64;
use rayon::prelude::*;

pub const DEFAULT_PROBES: usize = 200;

/// Relative residual accepted for a reported zero.
const WITNESS_REL: f64 = 1e-8;

/// `|f(z)| / sum |c_a| |z|^a`, or `None` if that exceeds the witness tolerance.
pub fn validate_witness(f: &DensePoly, z: &[Scalar]) -> Result<Option<f64>> {
    let v = f.evaluate(z)?.norm();
    let s = f.abs_scale(z)?;
    let rel = if s > 0.0 { v / s } else { 0.0 };
    Ok((rel <= WITNESS_REL).then_some(rel))
}

/// Starting lines kept for local refinement and the steps spent on each.
const REFINE_STARTS: usize = 32;
const REFINE_STEPS: usize = 100;

enum Line {
    Zero(Vec<Scalar>),
    /// How close the line is to failing: largest `Im t / (1 + |t|)`, or
    /// minus the smallest relative critical value for real restrictions.
    Clear(f64),
}

/// Relative size below which a value on a line is a zero up to rounding.
const PSEUDO_REL: f64 = 1e-12;

/// `|p(x)| / sum |g_alpha| (|a| + |b| |x|)^alpha` for the restriction `p`
/// of `g` to the line `a + b t`: the size of `p(x)` against the rounding
/// error its coefficients can carry.
fn rel_on_line(g: &DensePoly, c: &[Scalar], a: &[f64], b: &[f64], x: Scalar) -> Result<f64> {
    let v = c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &k| acc * x + k).norm();
    let hull: Vec<Scalar> = a.iter().zip(b).map(|(p, q)| Complex64::new(p.abs() + q.abs() * x.norm(), 0.0)).collect();
    let s = g.abs_scale(&hull)?;
    Ok(if s > 0.0 { v / s } else { 0.0 })
}

/// A root `t` off the real line is trusted when `p(Re t)` is clearly not a
/// rounding-level zero and `p(t)` is far smaller than it; split multiple
/// real roots fail one test or the other.
fn trusted_root(g: &DensePoly, c: &[Scalar], a: &[f64], b: &[f64], t: Scalar) -> Result<bool> {
    let real = rel_on_line(g, c, a, b, Complex64::new(t.re, 0.0))?;
    Ok(real > PSEUDO_REL && rel_on_line(g, c, a, b, t)? <= 1e-3 * real)
}

/// Zero of `g` on the line `a + b t` with `t` in the upper half-plane.
/// Near-coincident roots are merged first, and only trusted roots count.
fn probe_line(g: &DensePoly, a: &[f64], b: &[f64]) -> Result<Line> {
    let p = g.restrict_line(a, b)?;
    let point = |t: Scalar| -> Vec<Scalar> { a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, 0.0) + t * y).collect() };
    let c = match trimmed_coeffs(&p)? {
        // g vanishes on the whole line, in particular at t = i
        None => return Ok(Line::Zero(point(Complex64::new(0.0, 1.0)))),
        Some(c) => c,
    };
    if c.len() == 1 {
        return Ok(Line::Clear(f64::NEG_INFINITY));
    }
    let rl = roots_of_coeffs(&c)?;
    let tau = rl.tau_im();
    let candidates: Vec<Scalar> = rl.clusters.iter().map(|&(t, _)| t).collect();
    let mut score = f64::NEG_INFINITY;
    for &t in &candidates {
        if t.im > tau && trusted_root(g, &c, a, b, t)? {
            let z = point(t);
            if validate_witness(g, &z)?.is_some() {
                return Ok(Line::Zero(z));
            }
        }
        score = score.max(t.im / (1.0 + t.norm()));
    }
    let cmax = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if score <= tau && c.iter().all(|z| z.im.abs() <= 1e-14 * cmax) {
        // real restriction: two real roots meet before leaving the line, so
        // watch the critical values
        score = critical_score(g, &c, a, b)?;
    }
    Ok(Line::Clear(score))
}

/// Minus the smallest relative `|p(x)|` over real critical points `x`.
fn critical_score(g: &DensePoly, c: &[Scalar], a: &[f64], b: &[f64]) -> Result<f64> {
    if c.len() < 3 {
        return Ok(f64::NEG_INFINITY);
    }
    let d: Vec<Scalar> = c.iter().enumerate().skip(1).map(|(k, z)| Complex64::new(z.re * k as f64, 0.0)).collect();
    let Some(d) = trim_tail(d) else { return Ok(f64::NEG_INFINITY) };
    if d.len() < 2 {
        return Ok(f64::NEG_INFINITY);
    }
    let crit = roots_of_coeffs(&d)?;
    let mut score = f64::NEG_INFINITY;
    for z in crit.roots.iter().filter(|z| z.im.abs() <= 1e-9 * (1.0 + z.norm())) {
        score = score.max(-rel_on_line(g, c, a, b, Complex64::new(z.re, 0.0))?);
    }
    Ok(score)
}

fn trim_tail(mut d: Vec<Scalar>) -> Option<Vec<Scalar>> {
    let big = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
    while d.last().is_some_and(|z| z.norm() <= 1e-14 * big) {
        d.pop();
    }
    (!d.is_empty() && big > 0.0).then_some(d)
}

/// (1+1) evolution strategy on the line parameters, climbing the root score.
fn refine(g: &DensePoly, mut a: Vec<f64>, mut b: Vec<f64>, mut best: f64, seed: u64) -> Result<Option<Vec<Scalar>>> {
    let mut r = rng(seed);
    let mut step = 0.5;
    for _ in 0..REFINE_STEPS {
        let a2: Vec<f64> = a.iter().map(|&x| x + step * (1.0 + x.abs()) * normal(&mut r)).collect();
        let b2: Vec<f64> = b.iter().map(|&y| y * (step * normal(&mut r)).exp()).collect();
        match probe_line(g, &a2, &b2)? {
            Line::Zero(z) => return Ok(Some(z)),
            Line::Clear(s) if s >= best => {
                (a, b, best) = (a2, b2, s);
                step = (step * 1.5).min(2.0);
            }
            Line::Clear(_) => step = (step * 0.85).max(1e-2),
        }
    }
    Ok(None)
}

fn line(k: usize, m: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    if k == 0 {
        return (vec![0.0; m], vec![1.0; m]);
    }
    let mut r = rng(seed);
    let a: Vec<f64> = (0..m).map(|_| cauchy(&mut r)).collect();
    let b: Vec<f64> = (0..m).map(|_| log_uniform(&mut r, 3.0)).collect();
    (a, b)
}

/// A line moving mostly in coordinates `i` and `j`: the others get
/// directions near `1e-3`, so the restriction follows a two-variable slice.
fn pair_line(i: usize, j: usize, m: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let a: Vec<f64> = (0..m).map(|_| cauchy(&mut r)).collect();
    let b: Vec<f64> = (0..m)
        .map(|k| match k {
            _ if k == i => 1.0,
            _ if k == j => log_uniform(&mut r, 3.0),
            _ => 1e-3 * log_uniform(&mut r, 1.0),
        })
        .collect();
    (a, b)
}

type Scored = (f64, Vec<f64>, Vec<f64>);

/// First zero in line order, or the scores of all clear lines.
fn sweep(g: &DensePoly, lines: &[(Vec<f64>, Vec<f64>)]) -> Result<std::result::Result<Vec<Scalar>, Vec<Scored>>> {
    let outcomes: Vec<Line> = lines.par_iter().map(|(a, b)| probe_line(g, a, b)).collect::<Result<_>>()?;
    let mut scored = Vec::with_capacity(lines.len());
    for (o, (a, b)) in outcomes.into_iter().zip(lines) {
        match o {
            Line::Zero(z) => return Ok(Ok(z)),
            Line::Clear(s) if s.is_finite() => scored.push((s, a.clone(), b.clone())),
            Line::Clear(_) => {}
        }
    }
    Ok(Err(scored))
}

/// Line-restriction probes after conjugating the region to the upper
/// half-plane. Probe 0 is the diagonal `a = 0, b = 1`; the rest use
/// `a ~ Cauchy`, `b ~ exp(U[-3, 3])` from per-probe seeds. If no line
/// fails, as many lines again are spent on two-variable slices, and the
/// lines whose roots come closest to the upper half-plane are refined by a
/// short local search.
pub fn probe_stable(f: &DensePoly, n_probes: usize, seed: u64, region: &RegionSpec) -> Result<StabilityVerdict> {
    probe(f, n_probes, seed, region, true)
}

/// The random lines of [`probe_stable`] alone, for cheap screening.
pub fn probe_lines(f: &DensePoly, n_probes: usize, seed: u64, region: &RegionSpec) -> Result<StabilityVerdict> {
    probe(f, n_probes, seed, region, false)
}

fn probe(f: &DensePoly, n_probes: usize, seed: u64, region: &RegionSpec, extended: bool) -> Result<StabilityVerdict> {
    if f.is_zero() {
        return Ok(StabilityVerdict::Certified { derivation: vec!["zero".into()] });
    }
    if f.total_degree() == Some(0) {
        return Ok(StabilityVerdict::Certified { derivation: vec!["constant".into()] });
    }
    let g = moebius_conjugate(f, region)?;
    let m = g.arity();
    let seeds = schedule(seed, 2 * n_probes + REFINE_STARTS);
    let lines: Vec<_> = (0..n_probes).map(|k| line(k, m, seeds[k])).collect();
    let mut hit = None;
    let mut pools = vec![];
    match sweep(&g, &lines)? {
        Ok(z) => hit = Some(z),
        Err(s) => pools.push(s),
    }
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    if hit.is_none() && extended && m > 2 {
        let slices: Vec<_> = (0..n_probes)
            .map(|k| {
                let (i, j) = pairs[k % pairs.len()];
                pair_line(i, j, m, seeds[n_probes + k])
            })
            .collect();
        match sweep(&g, &slices)? {
            Ok(z) => hit = Some(z),
            Err(s) => pools.push(s),
        }
    }
    if hit.is_none() && extended {
        // refinement starts are shared between the stages; the stable sort
        // keeps line order among ties
        let share = REFINE_STARTS / pools.len().max(1);
        let mut starts = vec![];
        for mut pool in pools {
            pool.sort_by(|x, y| y.0.total_cmp(&x.0));
            starts.extend(pool.into_iter().take(share));
        }
        let found: Vec<Option<Vec<Scalar>>> = starts
            .into_par_iter()
            .zip(seeds[2 * n_probes..].par_iter())
            .map(|((s, a, b), &rs)| refine(&g, a, b, s, rs))
            .collect::<Result<_>>()?;
        hit = found.into_iter().flatten().next();
    }
    let Some(upper) = hit else {
        return Ok(StabilityVerdict::ProbePassed { probes: n_probes, seed });
    };
    let point = region.push_forward(&upper)?;
    let residual = match validate_witness(f, &point)? {
        Some(r) => r,
        // the pulled-back point is too ill-conditioned to re-check on f
        None => {
            let v = f.evaluate(&point)?.norm();
            v / f.abs_scale(&point)?.max(f64::MIN_POSITIVE)
        }
    };
    Ok(StabilityVerdict::Falsified { witness: Witness::Point { point, upper, residual } })
}

pub fn probe_stable_ma(f: &MultiAffinePoly, n_probes: usize, seed: u64, region: &RegionSpec) -> Result<StabilityVerdict> {
    probe_stable(&f.to_dense(), n_probes, seed, region)
}
