use super::{det, principal, HermitianMatrix};
use crate::poly::binomial;
use crate::{Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct FisherProducts {
    /// `sigma_j = sum_{|S| = j} det A[S] det A(S)`, `j = 0..=n`
    pub sigma: Vec<f64>,
    /// `sigma_j / C(n, j)`
    pub sigma_hat: Vec<f64>,
}

pub fn fisher_products(a: &HermitianMatrix) -> Result<FisherProducts> {
    let n = a.n();
    if n > 16 {
        return Err(Error::CapExceeded { what: "Fisher product dimension", needed: n as u128, cap: 16 });
    }
    let all = (1usize << n) - 1;
    let minors: Vec<f64> = (0..=all).map(|s| det(&principal(a.matrix(), s)).re).collect();
    let mut sigma = vec![0.0; n + 1];
    for s in 0..=all {
        sigma[s.count_ones() as usize] += minors[s] * minors[all ^ s];
    }
    let scale = sigma.iter().map(|x| x.abs()).fold(1.0, f64::max);
    for j in 0..=n {
        if (sigma[j] - sigma[n - j]).abs() > 1e-9 * scale {
            return Err(Error::Internal(format!("sigma_{j} != sigma_{}", n - j)));
        }
    }
    let sigma_hat = sigma.iter().enumerate().map(|(j, s)| s / binomial(n, j)).collect();
    Ok(FisherProducts { sigma, sigma_hat })
}

/// One inequality `lhs >= rhs` with its relative margin.
#[derive(Clone, Debug, Serialize)]
pub struct Inequality {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `(lhs - rhs) / max(|lhs|, |rhs|, unit)`, where `unit` bounds both sides a priori
    pub margin: f64,
    pub holds: bool,
}

const SLACK: f64 = -1e-9;

fn ineq(label: String, lhs: f64, rhs: f64, unit: f64) -> Inequality {
    let denom = lhs.abs().max(rhs.abs()).max(unit).max(1e-300);
    let margin = (lhs - rhs) / denom;
    Inequality { label, lhs, rhs, margin, holds: margin >= SLACK }
}

#[derive(Clone, Debug, Serialize)]
pub struct NewtonMaclaurinReport {
    pub fisher: FisherProducts,
    /// `sigma_hat_j^2 >= sigma_hat_{j-1} sigma_hat_{j+1}`
    pub newton: Vec<Inequality>,
    /// `sigma_hat_{j+1} >= sigma_hat_j` for `j < floor(n/2)`
    pub monotone: Vec<Inequality>,
    /// `(sigma_hat_j / d)^(1/j) >= (sigma_hat_{j+1} / d)^(1/(j+1))`, then the last term against 1; absent unless PD
    pub maclaurin: Option<Vec<Inequality>>,
}

impl NewtonMaclaurinReport {
    pub fn all_hold(&self) -> bool {
        self.newton.iter().chain(&self.monotone).chain(self.maclaurin.iter().flatten()).all(|x| x.holds)
    }
}

pub fn newton_maclaurin_check(a: &HermitianMatrix) -> Result<NewtonMaclaurinReport> {
    if !a.is_psd() {
        return Err(Error::MatrixCondition("positive semidefinite"));
    }
    let fisher = fisher_products(a)?;
    let n = a.n();
    let h = &fisher.sigma_hat;
    // Hadamard: every sigma_hat_j lies in [0, prod a_ii] <= [0, max a_ii^n]
    let unit = (0..n).map(|i| a.matrix()[(i, i)].re).fold(0.0, f64::max).powi(n as i32);
    let newton = (1..n).map(|j| ineq(format!("newton[{j}]"), h[j] * h[j], h[j - 1] * h[j + 1], unit * unit)).collect();
    let monotone = (0..n / 2).map(|j| ineq(format!("monotone[{j}]"), h[j + 1], h[j], unit)).collect();
    let maclaurin = if a.is_pd() && n >= 1 {
        let d = fisher.sigma[n];
        let root = |j: usize| (h[j] / d).max(0.0).powf(1.0 / j as f64);
        let mut v: Vec<Inequality> = (1..n).map(|j| ineq(format!("maclaurin[{j}]"), root(j), root(j + 1), 0.0)).collect();
        v.push(ineq("maclaurin[last=1]".into(), 1.0, root(n), 0.0));
        v.push(ineq("maclaurin[1>=last]".into(), root(n), 1.0, 0.0));
        Some(v)
    } else {
        None
    };
    Ok(NewtonMaclaurinReport { fisher, newton, monotone, maclaurin })
}
