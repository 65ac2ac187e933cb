use super::{check_nc, evolve, na_exhaustive, CubeDistribution, Move, NaReport, NcReport, SepGenerator};
use crate::detpoly::{HermitianMatrix, MatrixPencil};
use crate::poly::MultiAffinePoly;
use crate::rng::{log_uniform, rng, schedule};
use crate::stability::{certify, probe_lines, probe_stable_ma, Construction, Generator, LinearFactor, RegionSpec, StabilityVerdict, Witness};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportEntry {
    pub t: f64,
    pub probs: Vec<f64>,
    pub verdict: StabilityVerdict,
    pub nc: NcReport,
    pub na: Option<NaReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportReport {
    pub initial: StabilityVerdict,
    /// stable start and no directed hops
    pub admitted: bool,
    pub entries: Vec<TransportEntry>,
}

impl TransportReport {
    /// Admitted, and every evolved state passes its probes and NA.
    pub fn all_pass(&self) -> bool {
        self.admitted
            && self.entries.iter().all(|e| e.verdict.is_consistent_with_stable() && e.nc.holds && e.na.as_ref().is_none_or(|na| na.holds))
    }
}

/// Evolves `phi0` to each time, probes `Z(phi_t)` with `n_probes` lines and
/// runs exhaustive NA when there are at most 8 sites. A start that is not
/// stable is still simulated but not admitted.
pub fn stability_transport_suite(
    phi0: &CubeDistribution,
    gen: &SepGenerator,
    times: &[f64],
    n_probes: usize,
    seed: u64,
) -> Result<TransportReport> {
    let z0 = phi0.partition_function();
    let seeds = schedule(seed, times.len() + 1);
    let support = z0.support(0.0);
    let initial = if support.len() == 1 {
        StabilityVerdict::Certified { derivation: vec!["monomial".into()] }
    } else {
        probe_stable_ma(&z0, n_probes, seeds[0], &RegionSpec::UpperHalfPlane)?
    };
    let admitted = initial.is_consistent_with_stable() && gen.is_symmetric();
    let entries = times
        .par_iter()
        .zip(seeds[1..].par_iter())
        .map(|(&t, &s)| {
            let phi = evolve(phi0, gen, t)?;
            let verdict = probe_stable_ma(&phi.partition_function(), n_probes, s, &RegionSpec::UpperHalfPlane)?;
            let na = if phi.sites() <= 8 { Some(na_exhaustive(&phi)?) } else { None };
            Ok(TransportEntry { t, nc: check_nc(&phi), probs: phi.probs().to_vec(), verdict, na })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransportReport { initial, admitted, entries })
}

/// `e^{-t} Z + (1 - e^{-t}) (b12 t_12 Z + b21 t_21 Z)` with `b21 = 1 - b12`,
/// where `t_12` hops a particle from site 0 to site 1.
pub fn asymmetric_image(z: &MultiAffinePoly, beta12: f64, t: f64) -> Result<MultiAffinePoly> {
    let s = (-t).exp();
    let u = 1.0 - s;
    let fwd = Move::Hop { from: 0, to: 1 }.act_on_polynomial(z)?;
    let back = Move::Hop { from: 1, to: 0 }.act_on_polynomial(z)?;
    z.scale(Complex64::new(s, 0.0))
        .add(&fwd.scale(Complex64::new(u * beta12, 0.0)))?
        .add(&back.scale(Complex64::new(u * (1.0 - beta12), 0.0)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymmetryWitness {
    /// certified stable input
    pub z: MultiAffinePoly,
    pub image: MultiAffinePoly,
    pub witness: Witness,
    pub trials: usize,
}

/// A certified stable multiaffine polynomial in 2..=4 variables: either a
/// product of real affine factors or a real determinantal pencil.
fn random_certified(seed: u64) -> Result<MultiAffinePoly> {
    let mut r = rng(seed);
    let m = r.random_range(2..=4usize);
    let gen = if r.random_bool(0.5) {
        let factors = (0..m)
            .map(|k| {
                let mut a = vec![0.0; m];
                a[k] = log_uniform(&mut r, 2.0);
                LinearFactor { a, b: Complex64::new(log_uniform(&mut r, 2.0), 0.0) }
            })
            .collect();
        Generator::LinearProduct { arity: m, factors }
    } else {
        let n = r.random_range(2..=m);
        let q = DMatrix::from_fn(n, m, |_, _| Complex64::new(r.random_range(-1.0..1.0), 0.0));
        let d: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let a = MatrixPencil::from_q(&q);
        Generator::Pencil(MatrixPencil::new(a.a, HermitianMatrix::diag(&d))?)
    };
    let (p, verdict) = certify(&Construction::leaf(gen))?;
    if !verdict.is_certified() {
        return Err(Error::Internal("generator not certified".into()));
    }
    p.with_bounds(&vec![1; m])?.to_multiaffine()
}

/// Random search without the symmetric-case guard; `None` when the budget
/// runs out. Each image is screened with plain line probes.
pub fn asymmetry_search(beta12: f64, t: f64, budget: usize, probes_per_trial: usize, seed: u64) -> Result<Option<AsymmetryWitness>> {
    let seeds = schedule(seed, budget);
    for (k, &s) in seeds.iter().enumerate() {
        let z = random_certified(s)?;
        if z.is_zero() {
            continue;
        }
        let image = asymmetric_image(&z, beta12, t)?;
        if let StabilityVerdict::Falsified { witness } = probe_lines(&image.to_dense(), probes_per_trial, s ^ 0x9E37, &RegionSpec::UpperHalfPlane)? {
            return Ok(Some(AsymmetryWitness { z, image, witness, trials: k + 1 }));
        }
    }
    Ok(None)
}

pub const ASYMMETRY_PROBES: usize = 32;

/// A stable `Z` whose image under the asymmetric two-site semigroup is not
/// stable. Errors for `beta12 = 1/2`, where no such `Z` exists.
pub fn asymmetry_counterexample(beta12: f64, t: f64, budget: usize, seed: u64) -> Result<Option<AsymmetryWitness>> {
    if !(0.0..=1.0).contains(&beta12) {
        return Err(Error::InvalidArgument(format!("beta12 = {beta12} outside [0, 1]")));
    }
    if (beta12 - 0.5).abs() < 1e-15 {
        return Err(Error::InvalidArgument("symmetric case: beta12 = 1/2 preserves stability".into()));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    asymmetry_search(beta12, t, budget, ASYMMETRY_PROBES, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_from_a_single_state() {
        let phi = CubeDistribution::from_occupation(&[true, false, true, false]).unwrap();
        let gen = SepGenerator::path(4, 1.0).unwrap();
        let rep = stability_transport_suite(&phi, &gen, &[0.1, 1.0, 10.0], 200, 3).unwrap();
        assert!(rep.initial.is_certified() && rep.all_pass(), "{rep:?}");
    }

    #[test]
    fn unstable_start_is_not_admitted() {
        // Z = (x1 x2 + 1) / 2
        let phi = CubeDistribution::new(2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let gen = SepGenerator::path(2, 1.0).unwrap();
        let rep = stability_transport_suite(&phi, &gen, &[1.0], 200, 3).unwrap();
        assert!(rep.initial.is_falsified() && !rep.admitted && !rep.all_pass());
        assert_eq!(rep.entries.len(), 1);
    }

    #[test]
    fn creation_and_annihilation_preserve_stability() {
        let phi = CubeDistribution::product(&[0.2, 0.7, 0.5]).unwrap();
        let gen = SepGenerator::new(3).create(0, 0.5).unwrap().annihilate(1, 1.5).unwrap().create(2, 0.3).unwrap();
        let rep = stability_transport_suite(&phi, &gen, &[0.5, 2.0], 200, 9).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
    }

    #[test]
    fn asymmetry() {
        let w = asymmetry_counterexample(1.0, 1.0, 10_000, 1).unwrap().expect("witness");
        assert!(w.trials <= 10_000);
        assert!(asymmetry_counterexample(0.5, 1.0, 10, 1).is_err());
        // the symmetric image of a product is still stable
        let z = MultiAffinePoly::from_real_terms(2, &[(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)]).unwrap();
        let img = asymmetric_image(&z, 0.5, 1.0).unwrap();
        assert!(!probe_stable_ma(&img, 200, 0, &RegionSpec::UpperHalfPlane).unwrap().is_falsified());
    }
}
