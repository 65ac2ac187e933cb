//! Univariate roots, real-rootedness, interlacing and proper position.

use crate::poly::{wronskian, DensePoly, Scalar, EPS_ZERO};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Roots of a univariate polynomial, sorted by `(re, im)`, with repeats.
#[derive(Clone, Debug)]
pub struct RootList {
    pub roots: Vec<Scalar>,
    /// Near-coincident roots merged into `(centroid, multiplicity)`.
    pub clusters: Vec<(Scalar, usize)>,
    /// `max |p(root)| / max(1, |root|)^deg`.
    pub residual: f64,
}

impl RootList {
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    /// `max(1, max |root|)`.
    pub fn scale(&self) -> f64 {
        self.roots.iter().map(|z| z.norm()).fold(1.0, f64::max)
    }

    /// Imaginary-part tolerance for calling a root real.
    pub fn tau_im(&self) -> f64 {
        1e-7 * self.scale()
    }

    pub fn is_real(&self) -> bool {
        let t = self.tau_im();
        self.clusters.iter().all(|(z, _)| z.im.abs() <= t)
    }

    /// Real parts of cluster centroids, repeated by multiplicity, ascending.
    pub fn real_roots(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.clusters.iter().flat_map(|(z, k)| std::iter::repeat_n(z.re, *k)).collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }
}

const CLUSTER_RADIUS: f64 = 1e-2;
const CLUSTER_REL: f64 = 1e-10;

fn horner(c: &[Scalar], z: Scalar) -> Scalar {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn deriv(c: &[Scalar]) -> Vec<Scalar> {
    c.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect()
}

/// Ascending coefficients with negligible leading terms dropped.
/// `None` for the zero polynomial.
pub(crate) fn trimmed_coeffs(p: &DensePoly) -> Result<Option<Vec<Scalar>>> {
    let c = p.univariate_coeffs()?;
    let big = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if big <= EPS_ZERO {
        return Ok(None);
    }
    let mut v = c.to_vec();
    while v.len() > 1 && v.last().unwrap().norm() <= EPS_ZERO * big {
        v.pop();
    }
    Ok(Some(v))
}

/// Parlett-Reinsch balancing with powers of two.
fn balance(m: &mut DMatrix<Scalar>) {
    let n = m.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].norm();
                    row += m[(i, j)].norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let s = col + row;
            let mut f = 1.0;
            let (mut c, r) = (col, row);
            while c < r / 2.0 {
                c *= 4.0;
                f *= 2.0;
            }
            while c > r * 2.0 {
                c /= 4.0;
                f /= 2.0;
            }
            if (col * f + row / f) < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

fn eig_companion(monic: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = monic.len() - 1;
    let mut m = DMatrix::<Scalar>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -monic[i];
    }
    balance(&mut m);
    let schur = m.try_schur(1e-15, 100_000)?;
    let (_, t) = schur.unpack();
    Some((0..n).map(|i| t[(i, i)]).collect())
}

/// Aberth iteration, used when the eigensolver gives up.
fn aberth(c: &[Scalar]) -> Vec<Scalar> {
    let n = c.len() - 1;
    let dc = deriv(c);
    let rad = c.iter().take(n).map(|a| (a / c[n]).norm()).fold(0.0, f64::max) + 1.0;
    let mut z: Vec<Scalar> =
        (0..n).map(|k| Complex64::from_polar(rad * 0.5, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let pz = horner(c, z[k]);
            let dz = horner(&dc, z[k]);
            if pz.norm() == 0.0 {
                continue;
            }
            let ratio = pz / dz;
            let s: Scalar = (0..n).filter(|&j| j != k).map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn newton_polish(c: &[Scalar], z: Scalar, steps: usize) -> Scalar {
    let dc = deriv(c);
    let mut z = z;
    let mut pz = horner(c, z).norm();
    for _ in 0..steps {
        let d = horner(&dc, z);
        if d.norm() == 0.0 || pz == 0.0 {
            break;
        }
        let cand = z - horner(c, z) / d;
        let pc = horner(c, cand).norm();
        if pc < pz {
            z = cand;
            pz = pc;
        } else {
            break;
        }
    }
    z
}

fn linkage(roots: &[Scalar], radius: f64) -> Vec<Vec<Scalar>> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Scalar>> = Default::default();
    for (i, &z) in roots.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(z);
    }
    groups.into_values().collect()
}

/// Accept `group` as one k-fold root if `p, p', .., p^(k-1)` all vanish at the
/// refined centroid relative to their absolute-value polynomials; otherwise
/// split with a smaller linkage radius.
fn settle(c: &[Scalar], group: Vec<Scalar>, radius: f64, scale: f64, out: &mut Vec<(Scalar, usize)>) {
    let k = group.len();
    if k == 1 {
        out.push((group[0], 1));
        return;
    }
    let mut derivs = vec![c.to_vec()];
    for _ in 1..k {
        let d = deriv(derivs.last().unwrap());
        derivs.push(d);
    }
    let centroid = group.iter().sum::<Scalar>() / k as f64;
    let centroid = newton_polish(&derivs[k - 1], centroid, 8);
    let ok = derivs[..k].iter().all(|d| {
        let a = d.iter().rev().fold(0.0, |acc, z| acc * centroid.norm() + z.norm());
        horner(d, centroid).norm() <= CLUSTER_REL * a
    });
    if ok {
        out.push((centroid, k));
    } else if radius > 1e-9 * scale {
        for g in linkage(&group, radius / 10.0) {
            settle(c, g, radius / 10.0, scale, out);
        }
    } else {
        out.extend(group.into_iter().map(|z| (z, 1)));
    }
}

fn cluster(c: &[Scalar], roots: &[Scalar], scale: f64) -> Vec<(Scalar, usize)> {
    let mut out = Vec::new();
    for g in linkage(roots, CLUSTER_RADIUS * scale) {
        settle(c, g, CLUSTER_RADIUS * scale, scale, &mut out);
    }
    out
}

fn cmp_root(a: &Scalar, b: &Scalar) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All complex roots of a nonzero univariate polynomial.
pub fn roots(p: &DensePoly) -> Result<RootList> {
    let c = trimmed_coeffs(p)?.ok_or(Error::ZeroPolynomial)?;
    roots_of_coeffs(&c)
}

pub(crate) fn roots_of_coeffs(c: &[Scalar]) -> Result<RootList> {
    let n = c.len() - 1;
    let big = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let zeros = c.iter().take_while(|z| z.norm() <= 1e-14 * big).count().min(n);
    let core = &c[zeros..];
    let nc = core.len() - 1;
    let mut found = vec![Complex64::new(0.0, 0.0); zeros];
    if nc == 1 {
        found.push(-core[0] / core[1]);
    } else if nc > 1 {
        let lead = core[nc];
        let monic: Vec<Scalar> = core.iter().map(|&a| a / lead).collect();
        let raw = eig_companion(&monic).unwrap_or_else(|| aberth(core));
        found.extend(raw.into_iter().map(|z| newton_polish(core, z, 6)));
    }
    for z in &found {
        crate::poly::check_finite(*z).map_err(|_| Error::NoConvergence("root finder".into()))?;
    }
    found.sort_by(cmp_root);
    let scale = found.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let residual = found
        .iter()
        .map(|&z| horner(c, z).norm() / z.norm().max(1.0).powi(n as i32))
        .fold(0.0, f64::max);
    let mut clusters = cluster(c, &found, scale);
    clusters.sort_by(|a, b| cmp_root(&a.0, &b.0));
    Ok(RootList { roots: found, clusters, residual })
}

/// Every root real, up to `1e-7 * root-scale` in the imaginary part.
pub fn is_real_rooted(p: &DensePoly) -> Result<bool> {
    Ok(roots(p)?.is_real())
}

fn real_roots_checked(p: &DensePoly) -> Result<Vec<f64>> {
    if !p.is_real() {
        return Err(Error::NotReal);
    }
    match trimmed_coeffs(p)? {
        None => Err(Error::ZeroPolynomial),
        Some(c) => {
            let rl = roots_of_coeffs(&c)?;
            if !rl.is_real() {
                return Err(Error::NotRealRooted);
            }
            Ok(rl.real_roots())
        }
    }
}

/// Whether the roots of `f` and `g` alternate. Roots closer than
/// `1e-6 * root-scale` are reported as [`Error::DegenerateRoots`].
pub fn interlaces(f: &DensePoly, g: &DensePoly) -> Result<bool> {
    let rf = real_roots_checked(f)?;
    let rg = real_roots_checked(g)?;
    let mut merged: Vec<(f64, u8)> = rf.iter().map(|&x| (x, 0)).chain(rg.iter().map(|&x| (x, 1))).collect();
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = merged.iter().map(|x| x.0.abs()).fold(1.0, f64::max);
    let tau = 1e-6 * scale;
    for w in merged.windows(2) {
        if w[1].0 - w[0].0 <= tau {
            return Err(Error::DegenerateRoots { tolerance: tau });
        }
    }
    Ok(merged.windows(2).all(|w| w[0].1 != w[1].1))
}

/// Outcome of [`proper_position`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ProperPosition {
    /// `f << g`: `W[f, g] <= 0` on the real line
    FLlG,
    /// `g << f`
    GLlF,
    Both,
    Neither,
}

fn abs_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x.abs() + a.abs())
}

fn real_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

/// Sign class of a real polynomial over the real line: `(max <= 0, min >= 0)`.
pub(crate) fn global_sign(w: &[f64], rel: f64) -> Result<(bool, bool)> {
    let big = w.iter().map(|a| a.abs()).fold(0.0, f64::max);
    if big == 0.0 {
        return Ok((true, true));
    }
    let mut c = w.to_vec();
    while c.len() > 1 && c.last().unwrap().abs() <= 1e-14 * big {
        c.pop();
    }
    let n = c.len() - 1;
    let lead = c[n];
    let mut nonpos = true;
    let mut nonneg = true;
    if n % 2 == 1 {
        return Ok((false, false));
    }
    if n > 0 {
        if lead > 0.0 {
            nonpos = false;
        } else {
            nonneg = false;
        }
    }
    let mut points = vec![0.0];
    if n >= 2 {
        let d: Vec<Scalar> = c.iter().enumerate().skip(1).map(|(k, &a)| Complex64::new(a * k as f64, 0.0)).collect();
        let rl = roots_of_coeffs(&d)?;
        points.extend(rl.roots.iter().map(|z| z.re));
        points.extend(rl.clusters.iter().map(|z| z.0.re));
    }
    for x in points {
        let v = real_eval(&c, x);
        let tol = rel * abs_eval(&c, x);
        if v > tol {
            nonpos = false;
        }
        if v < -tol {
            nonneg = false;
        }
    }
    Ok((nonpos, nonneg))
}

/// Sign of the Wronskian `W[f, g] = f'g - fg'` over the real line.
pub fn proper_position(f: &DensePoly, g: &DensePoly) -> Result<ProperPosition> {
    for p in [f, g] {
        if p.arity() != 1 {
            return Err(Error::ArityMismatch { expected: 1, got: p.arity() });
        }
        if !p.is_real() {
            return Err(Error::NotReal);
        }
    }
    if f.is_zero() || g.is_zero() {
        return Ok(ProperPosition::Both);
    }
    for p in [f, g] {
        if !roots(p)?.is_real() {
            return Err(Error::NotRealRooted);
        }
    }
    let w = wronskian(f, g, 0)?;
    let wc: Vec<f64> = w.coeffs().iter().map(|z| z.re).collect();
    let scale = f.max_abs_coeff() * g.max_abs_coeff() * (f.volume() + g.volume()) as f64;
    if wc.iter().all(|a| a.abs() <= 1e-11 * scale) {
        return Ok(ProperPosition::Both);
    }
    Ok(match global_sign(&wc, 1e-9)? {
        (true, true) => ProperPosition::Both,
        (true, false) => ProperPosition::FLlG,
        (false, true) => ProperPosition::GLlF,
        (false, false) => ProperPosition::Neither,
    })
}

/// `g + i f` stable, decided from its roots; cross-checked against
/// real-rootedness of `f, g` together with `f << g`.
pub fn hb_check(f: &DensePoly, g: &DensePoly) -> Result<bool> {
    if !f.is_real() || !g.is_real() {
        return Err(Error::NotReal);
    }
    let h = g.add(&f.scale(Complex64::new(0.0, 1.0)))?;
    let direct = match trimmed_coeffs(&h)? {
        None => true,
        Some(c) => {
            let rl = roots_of_coeffs(&c)?;
            let t = rl.tau_im();
            rl.clusters.iter().all(|(z, _)| z.im <= t)
        }
    };
    let rr = |p: &DensePoly| -> Result<bool> { Ok(p.is_zero() || roots(p)?.is_real()) };
    let via = rr(f)? && rr(g)? && matches!(proper_position(f, g)?, ProperPosition::FLlG | ProperPosition::Both);
    if direct != via {
        return Err(Error::Internal(format!("root test says {direct}, Wronskian test says {via}")));
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(c: &[f64]) -> DensePoly {
        DensePoly::univariate_real(c).unwrap()
    }

    fn close(a: Scalar, re: f64, im: f64) -> bool {
        (a - Complex64::new(re, im)).norm() < 1e-9
    }

    #[test]
    fn root_examples() {
        let r = roots(&u(&[-1.0, 0.0, 1.0])).unwrap();
        assert!(close(r.roots[0], -1.0, 0.0) && close(r.roots[1], 1.0, 0.0));
        let r = roots(&u(&[1.0, 2.0, 1.0])).unwrap();
        assert_eq!(r.clusters.len(), 1);
        assert!(close(r.clusters[0].0, -1.0, 0.0));
        let r = roots(&u(&[1.0, 0.0, 1.0])).unwrap();
        assert!(close(r.roots[0], 0.0, -1.0) && close(r.roots[1], 0.0, 1.0));
        assert_eq!(roots(&u(&[0.0])).unwrap_err(), Error::ZeroPolynomial);
    }

    #[test]
    fn high_multiplicity_is_real() {
        // (x + 1)^5 (x - 2)^3
        let mut p = u(&[1.0]);
        for _ in 0..5 {
            p = p.mul(&u(&[1.0, 1.0])).unwrap();
        }
        for _ in 0..3 {
            p = p.mul(&u(&[-2.0, 1.0])).unwrap();
        }
        let r = roots(&p).unwrap();
        assert!(r.is_real());
        assert!(r.residual < 1e-7 * (1.0 + p.max_abs_coeff()));
        assert_eq!(r.clusters.len(), 2);
    }

    #[test]
    fn close_roots_kept_apart() {
        let p = u(&[-1.0, 1.0]).mul(&u(&[-1.001, 1.0])).unwrap();
        assert_eq!(roots(&p).unwrap().clusters.len(), 2);
        assert!(!is_real_rooted(&u(&[1e-12, 0.0, 1.0])).unwrap());
    }

    #[test]
    fn zero_roots_stripped() {
        let r = roots(&u(&[0.0, 0.0, -1.0, 0.0, 1.0])).unwrap();
        assert_eq!(r.roots.iter().filter(|z| z.norm() == 0.0).count(), 2);
        assert!(r.is_real());
    }

    #[test]
    fn real_rooted_examples() {
        assert!(is_real_rooted(&u(&[2.0, -3.0, 1.0])).unwrap());
        assert!(!is_real_rooted(&u(&[1.0, 1.0, 1.0])).unwrap());
        assert!(is_real_rooted(&u(&[1.0, 4.0, 2.0])).unwrap());
    }

    #[test]
    fn interlace_examples() {
        assert!(interlaces(&u(&[0.0, 1.0]), &u(&[-1.0, 0.0, 1.0])).unwrap());
        assert!(!interlaces(&u(&[-3.0, 1.0]), &u(&[-1.0, 0.0, 1.0])).unwrap());
        assert!(!interlaces(&u(&[-4.0, 0.0, 1.0]), &u(&[-1.0, 0.0, 1.0])).unwrap());
        assert!(matches!(interlaces(&u(&[1.0, 1.0]), &u(&[-1.0, 0.0, 1.0])), Err(Error::DegenerateRoots { .. })));
        assert_eq!(interlaces(&u(&[1.0, 0.0, 1.0]), &u(&[0.0, 1.0])).unwrap_err(), Error::NotRealRooted);
    }

    #[test]
    fn proper_position_examples() {
        use ProperPosition::*;
        assert_eq!(proper_position(&u(&[1.0]), &u(&[0.0, 1.0])).unwrap(), FLlG);
        assert_eq!(proper_position(&u(&[0.0, 1.0]), &u(&[0.0, 2.0])).unwrap(), Both);
        assert_eq!(proper_position(&u(&[-1.0, 0.0, 1.0]), &u(&[0.0, 1.0])).unwrap(), GLlF);
        assert_eq!(proper_position(&u(&[0.0]), &u(&[0.0, 1.0])).unwrap(), Both);
        assert_eq!(proper_position(&u(&[-4.0, 0.0, 1.0]), &u(&[-1.0, 0.0, 1.0])).unwrap(), Neither);
    }

    #[test]
    fn hb_examples() {
        assert!(hb_check(&u(&[1.0]), &u(&[0.0, 1.0])).unwrap());
        assert!(!hb_check(&u(&[0.0, 1.0]), &u(&[1.0])).unwrap());
        // x^2 - 1 + i x has roots (-i +- sqrt(3))/2, both below the axis
        assert!(hb_check(&u(&[0.0, 1.0]), &u(&[-1.0, 0.0, 1.0])).unwrap());
    }
}
