use super::CubeDistribution;
use crate::poly::{delta, MultiAffinePoly};
use crate::rng::{log_uniform, rng, schedule};
use crate::stability::delta::{eval, is_negative};
use crate::stability::{probe_stable_ma, RegionSpec, StabilityVerdict, Witness};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Largest support for exhaustive enumeration of increasing events.
pub const MAX_EVENT_SUPPORT: usize = 4;
const NA_SLACK: f64 = 1e-12;

/// An increasing event depending only on the sites in `support`:
/// `S` is in the event iff `S & support` is one of `members`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotoneEvent {
    pub support: usize,
    pub members: Vec<usize>,
}

impl MonotoneEvent {
    pub fn new(support: usize, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.iter().any(|s| s & !support != 0) {
            return Err(Error::InvalidArgument("member outside the support".into()));
        }
        for &s in &members {
            let mut rest = support & !s;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                if members.binary_search(&(s | bit)).is_err() {
                    return Err(Error::InvalidArgument(format!("not upward closed at {s:#b}")));
                }
                rest ^= bit;
            }
        }
        Ok(MonotoneEvent { support, members })
    }

    /// `{S : i in S}`.
    pub fn occupied(i: usize) -> Self {
        MonotoneEvent { support: 1 << i, members: vec![1 << i] }
    }

    pub fn contains(&self, state: usize) -> bool {
        self.members.binary_search(&(state & self.support)).is_ok()
    }

    pub fn probability(&self, phi: &CubeDistribution) -> f64 {
        phi.probs().iter().enumerate().filter(|(s, _)| self.contains(*s)).map(|(_, p)| p).sum()
    }

    pub fn disjointly_supported(&self, other: &MonotoneEvent) -> bool {
        self.support & other.support == 0
    }
}

/// All upward-closed families of subsets of `{0..k-1}`, as bitsets over the
/// `2^k` subsets (2, 3, 6, 20, 168 of them for `k = 0..4`).
pub fn monotone_families(k: usize) -> Result<Vec<u32>> {
    if k > MAX_EVENT_SUPPORT {
        return Err(Error::CapExceeded { what: "event support", needed: k as u128, cap: MAX_EVENT_SUPPORT as u128 });
    }
    let n = 1usize << k;
    let closed = |fam: u64| (0..n).all(|s| fam >> s & 1 == 0 || (0..k).all(|b| fam >> (s | 1 << b) & 1 == 1));
    Ok((0..1u64 << n).filter(|&f| closed(f)).map(|f| f as u32).collect())
}

fn sites_of(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|i| mask >> i & 1 == 1).collect()
}

fn local(state: usize, sites: &[usize]) -> usize {
    sites.iter().enumerate().map(|(k, &i)| (state >> i & 1) << k).sum()
}

fn global(local: usize, sites: &[usize]) -> usize {
    sites.iter().enumerate().map(|(k, &i)| (local >> k & 1) << i).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NcReport {
    /// max over pairs of `Pr[i and j] - Pr[i] Pr[j]`
    pub worst_margin: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub pairs: usize,
    pub holds: bool,
}

/// Negative correlation of every pair of occupation events.
pub fn check_nc(phi: &CubeDistribution) -> NcReport {
    let m = phi.sites();
    let single: Vec<f64> = (0..m).map(|i| MonotoneEvent::occupied(i).probability(phi)).collect();
    let mut worst = (f64::NEG_INFINITY, None);
    let mut pairs = 0;
    for i in 0..m {
        for j in i + 1..m {
            pairs += 1;
            let both = 1 << i | 1 << j;
            let pij: f64 = phi.probs().iter().enumerate().filter(|(s, _)| s & both == both).map(|(_, p)| p).sum();
            let margin = pij - single[i] * single[j];
            if margin > worst.0 {
                worst = (margin, Some((i, j)));
            }
        }
    }
    let worst_margin = if pairs == 0 { 0.0 } else { worst.0 };
    NcReport { worst_margin, worst_pair: worst.1, pairs, holds: worst_margin <= NA_SLACK }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NaReport {
    pub pairs_checked: usize,
    /// max of `Pr[E and F] - Pr[E] Pr[F]`
    pub worst_margin: f64,
    pub worst: Option<(MonotoneEvent, MonotoneEvent)>,
    pub holds: bool,
    /// enumeration is exhaustive for supports up to this size
    pub exhaustive_up_to: usize,
}

impl NaReport {
    fn empty() -> Self {
        NaReport { pairs_checked: 0, worst_margin: 0.0, worst: None, holds: true, exhaustive_up_to: MAX_EVENT_SUPPORT }
    }

    fn merge(mut self, other: NaReport) -> Self {
        self.pairs_checked += other.pairs_checked;
        if other.worst.is_some() && (self.worst.is_none() || other.worst_margin > self.worst_margin) {
            self.worst_margin = other.worst_margin;
            self.worst = other.worst;
        }
        self.holds &= other.holds;
        self
    }
}

/// Every pair of increasing events supported in `a` and in `b` (disjoint, at
/// most 4 sites each). Events on subsets of `a` are included, since an
/// increasing event on `A' subset A` is also increasing on `A`.
pub fn check_na(phi: &CubeDistribution, a: usize, b: usize) -> Result<NaReport> {
    let m = phi.sites();
    if a & b != 0 {
        return Err(Error::InvalidArgument("supports must be disjoint".into()));
    }
    if (a | b) >> m != 0 {
        return Err(Error::IndexOutOfRange { index: usize::BITS as usize - (a | b).leading_zeros() as usize - 1, arity: m });
    }
    let (sa, sb) = (sites_of(a), sites_of(b));
    let (fa, fb) = (monotone_families(sa.len())?, monotone_families(sb.len())?);
    let (na, nb) = (1usize << sa.len(), 1usize << sb.len());
    let mut joint = vec![vec![0.0; nb]; na];
    for (s, p) in phi.probs().iter().enumerate() {
        joint[local(s, &sa)][local(s, &sb)] += p;
    }
    let marg_b: Vec<f64> = (0..nb).map(|y| (0..na).map(|x| joint[x][y]).sum()).collect();
    let prob_b: Vec<f64> = fb.iter().map(|f| (0..nb).filter(|y| f >> y & 1 == 1).map(|y| marg_b[y]).sum()).collect();
    let mut worst = (f64::NEG_INFINITY, 0, 0);
    for (ia, e) in fa.iter().enumerate() {
        let row: Vec<f64> = (0..nb).map(|y| (0..na).filter(|x| e >> x & 1 == 1).map(|x| joint[x][y]).sum()).collect();
        let pe: f64 = row.iter().sum();
        for (ib, f) in fb.iter().enumerate() {
            let pef: f64 = (0..nb).filter(|y| f >> y & 1 == 1).map(|y| row[y]).sum();
            let margin = pef - pe * prob_b[ib];
            if margin > worst.0 {
                worst = (margin, ia, ib);
            }
        }
    }
    let event = |fam: u32, sites: &[usize], mask| MonotoneEvent {
        support: mask,
        members: (0..1usize << sites.len()).filter(|x| fam >> x & 1 == 1).map(|x| global(x, sites)).collect(),
    };
    Ok(NaReport {
        pairs_checked: fa.len() * fb.len(),
        worst_margin: worst.0,
        worst: Some((event(fa[worst.1], &sa, a), event(fb[worst.2], &sb, b))),
        holds: worst.0 <= NA_SLACK,
        exhaustive_up_to: MAX_EVENT_SUPPORT,
    })
}

/// [`check_na`] over every split of the sites into two nonempty sides of at
/// most 4 sites; needs `m <= 8`.
pub fn na_exhaustive(phi: &CubeDistribution) -> Result<NaReport> {
    let m = phi.sites();
    if m > 2 * MAX_EVENT_SUPPORT {
        return Err(Error::CapExceeded { what: "sites for exhaustive NA", needed: m as u128, cap: 2 * MAX_EVENT_SUPPORT as u128 });
    }
    let full = (1usize << m) - 1;
    let mut report = NaReport::empty();
    // `a` always holds site 0, so each unordered split is visited once
    for a in (1..=full).filter(|a| a & 1 == 1 && *a != full) {
        let b = full ^ a;
        if a.count_ones() as usize <= MAX_EVENT_SUPPORT && b.count_ones() as usize <= MAX_EVENT_SUPPORT {
            report = report.merge(check_na(phi, a, b)?);
        }
    }
    Ok(report)
}

/// `Delta_ij f(a) >= 0` for `a > 0`: log-uniform samples in the positive
/// orthant for every pair.
pub fn rayleigh_check(f: &MultiAffinePoly, n_probes: usize, seed: u64) -> Result<StabilityVerdict> {
    if !f.is_real() {
        return Err(Error::NotReal);
    }
    let scale = f.max_abs_coeff();
    if let Some(c) = f.coeffs().iter().find(|c| c.re < -1e-12 * scale.max(1.0)) {
        return Err(Error::NegativeCoefficient { value: c.re });
    }
    let m = f.arity();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    for (&(i, j), s) in pairs.iter().zip(schedule(seed, pairs.len())) {
        let q = delta(f, i, j)?;
        let mut r = rng(s);
        for k in 0..n_probes {
            let x: Vec<f64> = (0..q.arity()).map(|_| if k == 0 { 1.0 } else { log_uniform(&mut r, 3.0) }).collect();
            let (v, abs) = eval(&q, &x);
            if is_negative(v, abs) {
                return Ok(StabilityVerdict::Falsified { witness: Witness::DeltaNegative { i, j, at: x, value: v } });
            }
        }
    }
    Ok(StabilityVerdict::ProbePassed { probes: n_probes * pairs.len(), seed })
}

/// The four hypotheses of the Feder-Mihail theorem for the class of
/// homogeneous, multiaffine, stable partition functions with nonnegative
/// coefficients, evaluated at one member `z`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FederMihailReport {
    /// (i) a function on a finite cube; true by construction
    pub finite_cube: bool,
    /// (ii) `Z` homogeneous
    pub homogeneous: bool,
    /// (iii) `Z|_{x_i = 0}` and `d_i Z` stay in the class (zero counts as vacuous)
    pub closed: bool,
    /// (iv) `phi^a` negatively correlated for the sampled `a > 0`
    pub nc_reweighted: bool,
    pub reweightings: usize,
    pub worst_nc_margin: f64,
}

impl FederMihailReport {
    pub fn all_hold(&self) -> bool {
        self.finite_cube && self.homogeneous && self.closed && self.nc_reweighted
    }
}

fn in_class(z: &MultiAffinePoly, n_probes: usize, seed: u64) -> Result<bool> {
    if z.is_zero() {
        return Ok(true);
    }
    let nonneg = z.is_real() && z.coeffs().iter().all(|c| c.re >= -1e-12);
    Ok(nonneg && z.homogeneous_degree().is_some() && !probe_stable_ma(z, n_probes, seed, &RegionSpec::UpperHalfPlane)?.is_falsified())
}

/// Checks (i)-(iv) at `z`; (iv) is sampled over `reweightings` random `a > 0`
/// plus `a = 1`, not quantified over all of them.
pub fn feder_mihail(z: &MultiAffinePoly, n_probes: usize, reweightings: usize, seed: u64) -> Result<FederMihailReport> {
    let phi = CubeDistribution::from_partition_function(z)?;
    let m = z.arity();
    let seeds = schedule(seed, 2 * m + 1);
    let mut closed = true;
    for i in 0..m {
        closed &= in_class(&z.without(i)?, n_probes, seeds[2 * i])?;
        let d = MultiAffinePoly::from_fn(m, |s| if s >> i & 1 == 1 { Complex64::new(0.0, 0.0) } else { z.coeff(s | 1 << i) })?;
        closed &= in_class(&d, n_probes, seeds[2 * i + 1])?;
    }
    let mut r = rng(seeds[2 * m]);
    let mut worst = check_nc(&phi).worst_margin;
    for _ in 0..reweightings {
        let a: Vec<f64> = (0..m).map(|_| log_uniform(&mut r, 3.0)).collect();
        worst = worst.max(check_nc(&phi.reweight(&a)?).worst_margin);
    }
    Ok(FederMihailReport {
        finite_cube: true,
        homogeneous: z.homogeneous_degree().is_some(),
        closed,
        nc_reweighted: worst <= NA_SLACK,
        reweightings: reweightings + 1,
        worst_nc_margin: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_counts() {
        let counts: Vec<usize> = (0..=4).map(|k| monotone_families(k).unwrap().len()).collect();
        assert_eq!(counts, vec![2, 3, 6, 20, 168]);
        assert!(monotone_families(5).is_err());
    }

    #[test]
    fn events() {
        assert!(MonotoneEvent::new(0b11, vec![0b01, 0b11]).is_ok());
        assert!(MonotoneEvent::new(0b11, vec![0b01]).is_err());
        assert!(MonotoneEvent::occupied(0).disjointly_supported(&MonotoneEvent::occupied(1)));
    }

    #[test]
    fn nc_and_na_examples() {
        let phi = CubeDistribution::new(2, vec![0.0, 0.5, 0.5, 0.0]).unwrap();
        let nc = check_nc(&phi);
        assert!(nc.holds && (nc.worst_margin + 0.25).abs() < 1e-15);
        let prod = CubeDistribution::product(&[0.3, 0.6, 0.5, 0.8]).unwrap();
        let na = na_exhaustive(&prod).unwrap();
        assert!(na.holds && na.worst_margin.abs() < 1e-15);
        let pos = CubeDistribution::new(2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(!check_nc(&pos).holds);
        let na = check_na(&pos, 0b01, 0b10).unwrap();
        assert!(!na.holds && (na.worst_margin - 0.25).abs() < 1e-15);
        assert!(check_na(&pos, 0b01, 0b11).is_err());
    }

    #[test]
    fn rayleigh_examples() {
        let f = MultiAffinePoly::from_real_terms(2, &[(0b11, 1.0), (0b01, 1.0), (0b10, 1.0)]).unwrap();
        assert!(rayleigh_check(&f, 50, 0).unwrap().is_probe_passed());
        let g = MultiAffinePoly::from_real_terms(4, &[(0b0011, 1.0), (0b1100, 1.0)]).unwrap();
        match rayleigh_check(&g, 50, 0).unwrap() {
            StabilityVerdict::Falsified { witness: Witness::DeltaNegative { at, value, .. } } => {
                assert!(at.iter().all(|v| *v > 0.0) && value < 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn feder_mihail_on_uniform_spanning_trees_of_a_triangle() {
        // e_2(x1, x2, x3)
        let z = MultiAffinePoly::elementary_symmetric(3, 2).unwrap();
        let rep = feder_mihail(&z, 100, 20, 1).unwrap();
        assert!(rep.all_hold(), "{rep:?}");
        let bad = MultiAffinePoly::from_real_terms(4, &[(0b0011, 1.0), (0b1100, 1.0)]).unwrap();
        assert!(!feder_mihail(&bad, 100, 20, 1).unwrap().all_hold());
    }
}
