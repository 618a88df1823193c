//! Fractional Marcinkiewicz integral, its commutator and T_λ.

use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use crate::error::{NhsError, Result};
use crate::mmspace::{DominatingFunction, PointCloudSpace};

/// Exponents and dilations shared by the operator checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OperatorParams {
    pub l: f64,
    pub rho: f64,
    pub s: f64,
    pub p: f64,
    pub q: f64,
    /// Dilation of the normalizing ball in M_{p,τ} and M_{ψ,p,τ}.
    pub tau: f64,
    pub eta: f64,
    pub delta: f64,
    pub sigma: f64,
    pub gamma: f64,
    /// Dilation used by discrete coefficients and Campanato norms.
    pub coefficient_tau: f64,
}

impl Default for OperatorParams {
    fn default() -> Self {
        Self {
            l: 0.0,
            rho: 1.0,
            s: 2.0,
            p: 2.0,
            q: 2.0,
            tau: 5.0,
            eta: 2.0,
            delta: 0.5,
            sigma: 0.2,
            gamma: 1.0,
            coefficient_tau: 2.0,
        }
    }
}

impl OperatorParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(NhsError::InvalidParams(what.to_string()));
        let finite = [
            self.l, self.rho, self.s, self.p, self.q, self.tau, self.eta, self.delta, self.sigma,
            self.gamma, self.coefficient_tau,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return bad("parameters must be finite");
        }
        if self.l < 0.0 {
            return bad("l must be >= 0");
        }
        if self.rho <= 0.0 {
            return bad("rho must be > 0");
        }
        if self.s < 1.0 {
            return bad("s must be >= 1");
        }
        if self.p <= 1.0 {
            return bad("p must be > 1");
        }
        if self.q < self.p {
            return bad("q must be >= p");
        }
        if self.tau < 5.0 {
            return bad("tau must be >= 5");
        }
        if self.eta <= 1.0 || self.coefficient_tau <= 1.0 {
            return bad("eta and coefficient_tau must exceed 1");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if self.sigma <= 0.0 {
            return bad("sigma must be > 0");
        }
        if self.gamma < 1.0 {
            return bad("gamma must be >= 1");
        }
        Ok(())
    }

    /// Exponent a = (l + ρ) s of the t-integral tail.
    pub fn decay(&self) -> f64 {
        (self.l + self.rho) * self.s
    }

    fn check_marcinkiewicz(&self) -> Result<()> {
        if self.l >= 0.0 && self.rho > 0.0 && self.s >= 1.0 && self.decay().is_finite() {
            Ok(())
        } else {
            Err(NhsError::InvalidParams(format!(
                "need l >= 0, rho > 0, s >= 1 (got l={}, rho={}, s={})",
                self.l, self.rho, self.s
            )))
        }
    }
}

/// T_λ f(x) = Σ_{y≠x} f(y) w(y) / λ(x, d(x,y)), summed in index order.
pub fn t_lambda(space: &PointCloudSpace, lambda: &DominatingFunction, f: &[f64], x: usize) -> f64 {
    let row = space.dist_row(x);
    let mut acc = 0.0;
    for y in 0..space.len() {
        if y != x {
            acc += f[y] * space.weight(y) / lambda.eval(x, row[y]);
        }
    }
    acc
}

pub fn t_lambda_all(space: &PointCloudSpace, lambda: &DominatingFunction, f: &[f64]) -> Vec<f64> {
    (0..space.len()).map(|x| t_lambda(space, lambda, f, x)).collect()
}

/// Closed form of the t-integral at `x` for the summand weights
/// `K(x,y) c(y) w(y) / d(x,y)^{1-ρ}`.
fn closed_form(
    space: &PointCloudSpace,
    kernel: &KernelSpec,
    x: usize,
    params: &OperatorParams,
    coefficient: impl Fn(usize) -> f64,
) -> f64 {
    let a = params.decay();
    let order = space.neighbors(x);
    let dists = space.neighbor_distances(x);
    let mut partial = 0.0;
    let mut integral = 0.0;
    let mut j = 1;
    while j < order.len() {
        let r = dists[j];
        // atoms at equal distance enter as one jump
        while j < order.len() && dists[j] == r {
            let y = order[j];
            partial += kernel.value(x, y) * coefficient(y) * space.weight(y) / r.powf(1.0 - params.rho);
            j += 1;
        }
        let next = if j < order.len() { dists[j].powf(-a) } else { 0.0 };
        if partial != 0.0 {
            integral += partial.abs().powf(params.s) * (r.powf(-a) - next) / a;
        }
    }
    integral.powf(1.0 / params.s)
}

/// M̃_{l,ρ,s} f(x), evaluated exactly on the piecewise-constant t-integral.
pub fn marcinkiewicz(
    space: &PointCloudSpace,
    kernel: &KernelSpec,
    f: &[f64],
    x: usize,
    params: &OperatorParams,
) -> Result<f64> {
    params.check_marcinkiewicz()?;
    Ok(closed_form(space, kernel, x, params, |y| f[y]))
}

pub fn marcinkiewicz_all(
    space: &PointCloudSpace,
    kernel: &KernelSpec,
    f: &[f64],
    params: &OperatorParams,
) -> Result<Vec<f64>> {
    params.check_marcinkiewicz()?;
    Ok((0..space.len())
        .map(|x| closed_form(space, kernel, x, params, |y| f[y]))
        .collect())
}

/// M̃_{l,ρ,s,b} f(x): the summands carry the factor b(x) − b(y).
pub fn marcinkiewicz_commutator(
    space: &PointCloudSpace,
    kernel: &KernelSpec,
    b: &[f64],
    f: &[f64],
    x: usize,
    params: &OperatorParams,
) -> Result<f64> {
    params.check_marcinkiewicz()?;
    Ok(closed_form(space, kernel, x, params, |y| (b[x] - b[y]) * f[y]))
}

pub fn marcinkiewicz_commutator_all(
    space: &PointCloudSpace,
    kernel: &KernelSpec,
    b: &[f64],
    f: &[f64],
    params: &OperatorParams,
) -> Result<Vec<f64>> {
    params.check_marcinkiewicz()?;
    Ok((0..space.len())
        .map(|x| closed_form(space, kernel, x, params, |y| (b[x] - b[y]) * f[y]))
        .collect())
}
