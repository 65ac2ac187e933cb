use crate::poly::{DensePoly, Scalar};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Region `A` whose `A^m` a stability query is about, written as the image
/// `phi(H)` of the upper half-plane under a Moebius map per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum RegionSpec {
    UpperHalfPlane,
    /// `phi(z) = -i z`: nonvanishing here is Hurwitz stability.
    RightHalfPlane,
    /// `phi(z) = (z - i) / (z + i)`: nonvanishing here is Schur stability.
    UnitDisc,
    /// `phi_k(z) = (a z + b) / (c z + d)` per coordinate, or one map for all.
    Moebius(Vec<[Scalar; 4]>),
}

fn i() -> Scalar {
    Complex64::new(0.0, 1.0)
}

impl RegionSpec {
    pub fn parse(s: &str) -> Result<RegionSpec> {
        match s {
            "H" | "h" | "upper" => Ok(RegionSpec::UpperHalfPlane),
            "rhp" | "right" => Ok(RegionSpec::RightHalfPlane),
            "disc" | "disk" | "D" => Ok(RegionSpec::UnitDisc),
            _ => Err(Error::Parse(format!("unknown region {s:?}"))),
        }
    }

    /// Map coefficients `[a, b, c, d]` for coordinate `k`.
    pub fn map_for(&self, k: usize) -> Result<[Scalar; 4]> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let m = match self {
            RegionSpec::UpperHalfPlane => [one, zero, zero, one],
            RegionSpec::RightHalfPlane => [-i(), zero, zero, one],
            RegionSpec::UnitDisc => [one, -i(), one, i()],
            RegionSpec::Moebius(v) => match v.len() {
                0 => return Err(Error::InvalidArgument("empty Moebius list".into())),
                1 => v[0],
                _ => *v.get(k).ok_or(Error::IndexOutOfRange { index: k, arity: v.len() })?,
            },
        };
        if (m[0] * m[3] - m[1] * m[2]).norm() == 0.0 {
            return Err(Error::InvalidArgument("Moebius map with ad - bc = 0".into()));
        }
        Ok(m)
    }

    pub fn is_upper(&self) -> bool {
        *self == RegionSpec::UpperHalfPlane
    }

    /// `phi(z)` coordinatewise: carries a point of `H^m` into the region.
    pub fn push_forward(&self, z: &[Scalar]) -> Result<Vec<Scalar>> {
        z.iter()
            .enumerate()
            .map(|(k, &x)| {
                let [a, b, c, d] = self.map_for(k)?;
                Ok((a * x + b) / (c * x + d))
            })
            .collect()
    }

    /// `phi^{-1}(w) = (d w - b) / (-c w + a)` coordinatewise.
    pub fn pull_back(&self, w: &[Scalar]) -> Result<Vec<Scalar>> {
        w.iter()
            .enumerate()
            .map(|(k, &x)| {
                let [a, b, c, d] = self.map_for(k)?;
                Ok((d * x - b) / (a - c * x))
            })
            .collect()
    }
}

/// Coefficients of `(a z + b)^k (c z + d)^(n - k)`, ascending.
fn factor_coeffs(m: [Scalar; 4], k: usize, n: usize) -> Vec<Scalar> {
    let mut p = vec![Complex64::new(1.0, 0.0)];
    let mul = |p: &Vec<Scalar>, lo: Scalar, hi: Scalar| {
        let mut q = vec![Complex64::new(0.0, 0.0); p.len() + 1];
        for (e, &v) in p.iter().enumerate() {
            q[e] += v * lo;
            q[e + 1] += v * hi;
        }
        q
    };
    for _ in 0..k {
        p = mul(&p, m[1], m[0]);
    }
    for _ in k..n {
        p = mul(&p, m[3], m[2]);
    }
    p
}

/// `prod_k (c_k z_k + d_k)^{deg_k f} f(phi_1(z_1), .., phi_m(z_m))`:
/// nonvanishing on `H^m` exactly when `f` is nonvanishing on the region.
pub fn moebius_conjugate(f: &DensePoly, region: &RegionSpec) -> Result<DensePoly> {
    if region.is_upper() {
        return Ok(f.clone());
    }
    let f = f.trim();
    let bounds = f.bounds().to_vec();
    let strides = f.strides();
    let mut vals = f.coeffs().to_vec();
    for (axis, &n) in bounds.iter().enumerate() {
        let map = region.map_for(axis)?;
        // column k holds the coefficients of the image of z^k
        let cols: Vec<Vec<Scalar>> = (0..=n).map(|k| factor_coeffs(map, k, n)).collect();
        let s = strides[axis];
        let mut next = vec![Complex64::new(0.0, 0.0); vals.len()];
        for base in 0..vals.len() {
            if (base / s) % (n + 1) != 0 {
                continue;
            }
            for (k, col) in cols.iter().enumerate() {
                let v = vals[base + k * s];
                if v.norm() == 0.0 {
                    continue;
                }
                for (l, &w) in col.iter().enumerate() {
                    next[base + l * s] += v * w;
                }
            }
        }
        vals = next;
    }
    DensePoly::from_coeffs(bounds, vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_land_in_region() {
        let z = [Complex64::new(0.3, 0.7), Complex64::new(-4.0, 0.01)];
        let rhp = RegionSpec::RightHalfPlane.push_forward(&z).unwrap();
        assert!(rhp.iter().all(|w| w.re > 0.0));
        let d = RegionSpec::UnitDisc.push_forward(&z).unwrap();
        assert!(d.iter().all(|w| w.norm() < 1.0));
        let back = RegionSpec::UnitDisc.pull_back(&d).unwrap();
        assert!((back[0] - z[0]).norm() < 1e-12 && (back[1] - z[1]).norm() < 1e-12);
    }

    #[test]
    fn conjugate_matches_pointwise() {
        let f = DensePoly::from_real_terms(2, &[(vec![2, 1], 1.0), (vec![0, 1], -3.0), (vec![1, 0], 0.5)]).unwrap();
        let z = [Complex64::new(0.2, 1.3), Complex64::new(-0.4, 0.5)];
        for region in [RegionSpec::RightHalfPlane, RegionSpec::UnitDisc] {
            let g = moebius_conjugate(&f, &region).unwrap();
            let w = region.push_forward(&z).unwrap();
            let mut factor = f.evaluate(&w).unwrap();
            for (k, &d) in f.degrees().iter().enumerate() {
                let [_, _, c, dd] = region.map_for(k).unwrap();
                factor *= (c * z[k] + dd).powu(d as u32);
            }
            assert!((g.evaluate(&z).unwrap() - factor).norm() < 1e-10);
        }
    }
}
