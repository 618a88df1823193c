//! Pointwise estimates relating the operators to each other.

use serde_json::json;

use super::kernel::KernelSpec;
use super::marcinkiewicz::{marcinkiewicz_all, marcinkiewicz_commutator_all, t_lambda_all, OperatorParams};
use super::maximal::{maximal_p_tau_all, maximal_psi_p_tau_with, psi_table, SharpContext};
use crate::error::{NhsError, Result};
use crate::geometry::{ball_json, BallFamily, Extremum};
use crate::mmspace::{DominatingFunction, GeometryProfile, PointCloudSpace};
use crate::report::CheckReport;
use crate::spaces::{morrey_norm_in, CampanatoContext};
use crate::spaces::{DiscreteFunction, GrowthFunctionPhi, RegularityFunctionPsi};

/// Relative slack allowed in estimates that hold exactly in real arithmetic.
pub const ROUNDING_SLACK: f64 = 1e-9;

/// Tolerance on ‖f‖ = 1 before the Morrey pointwise check runs.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// M̃f(x) ≤ ((l+ρ)s)^{-1/s} C_size T_λ|f|(x) at every point.
pub fn check_pointwise_domination(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    kernel: &KernelSpec,
    f: &DiscreteFunction,
    params: &OperatorParams,
) -> Result<CheckReport> {
    f.check_len(space)?;
    let lhs = marcinkiewicz_all(space, kernel, &f.values, params)?;
    let t = t_lambda_all(space, lambda, &f.abs().values);
    let constant = params.decay().powf(-1.0 / params.s) * kernel.c_size;
    let mut worst = Extremum::max();
    let mut violations = 0usize;
    for x in 0..space.len() {
        let rhs = constant * t[x];
        if lhs[x] > rhs + ROUNDING_SLACK * rhs.max(lhs[x]) {
            violations += 1;
        }
        let ratio = if rhs > 0.0 {
            lhs[x] / rhs
        } else if lhs[x] > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst.offer_max(ratio, || json!({ "x": x, "lhs": lhs[x], "rhs": rhs }));
    }
    Ok(CheckReport::new("pointwise_domination", violations == 0, worst.or(0.0))
        .with_witness(worst.witness)
        .with_number("constant", constant)
        .with_detail("violations", violations))
}

/// Function-independent data for the sharp-maximal estimate of the
/// commutator: ψ per ball, the Campanato context for b and the sharp context.
pub struct EstimateContext<'a> {
    pub space: &'a PointCloudSpace,
    pub family: &'a BallFamily,
    pub kernel: &'a KernelSpec,
    pub params: OperatorParams,
    pub psi_values: Vec<f64>,
    pub campanato: CampanatoContext<'a>,
    pub sharp: SharpContext<'a>,
}

impl<'a> EstimateContext<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        space: &'a PointCloudSpace,
        family: &'a BallFamily,
        lambda: &DominatingFunction,
        profile: &GeometryProfile,
        kernel: &'a KernelSpec,
        psi: &RegularityFunctionPsi,
        params: OperatorParams,
        pair_budget: usize,
        sharp_budget: usize,
        seed: u64,
    ) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            space,
            family,
            kernel,
            params,
            psi_values: psi_table(family, psi),
            campanato: CampanatoContext::new(space, family, lambda, psi, params.coefficient_tau, pair_budget, seed),
            sharp: SharpContext::new(space, family, lambda, profile, sharp_budget, seed ^ 0x5eed),
        })
    }

    /// Max over x of M̃^♯(M̃_b f)(x) / (‖b‖ (M_{ψ,p,5}f(x) + M_{ψ,p,6}(M̃f)(x))),
    /// skipping points where the denominator vanishes.
    pub fn sharp_estimate(&self, b: &DiscreteFunction, f: &DiscreteFunction) -> Result<CheckReport> {
        b.check_len(self.space)?;
        f.check_len(self.space)?;
        let b_norm = self.campanato.evaluate(&b.values, self.params.gamma).norm;
        if b_norm == 0.0 {
            return Err(NhsError::ZeroNormB);
        }
        let p = self.params.p;
        let commutator = marcinkiewicz_commutator_all(self.space, self.kernel, &b.values, &f.values, &self.params)?;
        let numerator = self.sharp.evaluate(&commutator);
        let m = marcinkiewicz_all(self.space, self.kernel, &f.values, &self.params)?;
        let first = maximal_psi_p_tau_with(self.space, self.family, &self.psi_values, &f.values, p, 5.0)?;
        let second = maximal_psi_p_tau_with(self.space, self.family, &self.psi_values, &m, p, 6.0)?;
        let mut worst = Extremum::max();
        let mut skipped = 0usize;
        for x in 0..self.space.len() {
            let denom = b_norm * (first[x] + second[x]);
            if denom == 0.0 {
                skipped += 1;
                continue;
            }
            worst.offer_max(numerator[x] / denom, || json!({ "x": x, "numerator": numerator[x], "denominator": denom }));
        }
        let value = worst.or(0.0);
        Ok(CheckReport::new("sharp_maximal_estimate", value.is_finite(), value)
            .with_witness(worst.witness)
            .with_number("b_norm", b_norm)
            .with_detail("skipped", skipped))
    }
}

#[allow(clippy::too_many_arguments)]
pub fn check_sharp_maximal_estimate(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    profile: &GeometryProfile,
    kernel: &KernelSpec,
    psi: &RegularityFunctionPsi,
    b: &DiscreteFunction,
    f: &DiscreteFunction,
    params: &OperatorParams,
) -> Result<CheckReport> {
    let family = BallFamily::new(space);
    let ctx = EstimateContext::new(
        space,
        &family,
        lambda,
        profile,
        kernel,
        psi,
        *params,
        crate::spaces::DEFAULT_PAIR_BUDGET,
        super::maximal::DEFAULT_SHARP_BUDGET,
        0,
    )?;
    ctx.sharp_estimate(b, f)
}

/// max over candidate balls of ψ(B) φ(B)^{1/p} / φ(B)^{1/q}.
pub fn compatibility_constant(
    family: &BallFamily,
    psi: &RegularityFunctionPsi,
    phi: &GrowthFunctionPhi,
    p: f64,
    q: f64,
) -> (f64, serde_json::Value) {
    let mut worst = Extremum::max();
    for &b in family.balls() {
        let ph = phi.eval(b.center, b.radius);
        let v = psi.eval(b.center, b.radius) * ph.powf(1.0 / p) / ph.powf(1.0 / q);
        worst.offer_max(v, || ball_json(b));
    }
    (worst.or(0.0), worst.witness)
}

/// M_{ψ,p,τ}f(x) ≤ C₁₀ M_{p,τ}f(x)^{p/q} at every point for f with
/// ‖f‖_{L^{p,φ}} = 1, the Morrey norm taken with η = τ. The reported value is
/// the measured implicit constant max_x lhs / (C₁₀ M_{p,τ}f(x)^{p/q}).
pub fn check_maximal_morrey_pointwise(
    space: &PointCloudSpace,
    family: &BallFamily,
    psi: &RegularityFunctionPsi,
    phi: &GrowthFunctionPhi,
    f: &DiscreteFunction,
    params: &OperatorParams,
) -> Result<CheckReport> {
    params.validate()?;
    f.check_len(space)?;
    let (p, q, tau) = (params.p, params.q, params.tau);
    let norm = morrey_norm_in(space, family, &f.values, p, phi, tau).value;
    let zero = f.values.iter().all(|&v| v == 0.0);
    if !zero && (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(NhsError::NotNormalized(norm));
    }
    let (c10, c10_witness) = compatibility_constant(family, psi, phi, p, q);
    let lhs = maximal_psi_p_tau_with(space, family, &psi_table(family, psi), &f.values, p, tau)?;
    let plain = maximal_p_tau_all(space, family, &f.values, p, tau)?;
    let mut worst = Extremum::max();
    let mut violations = 0usize;
    for x in 0..space.len() {
        let rhs = c10 * plain[x].powf(p / q);
        if lhs[x] > rhs * (1.0 + ROUNDING_SLACK) {
            violations += 1;
        }
        let ratio = if rhs > 0.0 {
            lhs[x] / rhs
        } else if lhs[x] > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst.offer_max(ratio, || json!({ "x": x, "lhs": lhs[x], "rhs": rhs }));
    }
    Ok(CheckReport::new("maximal_morrey_pointwise", violations == 0, worst.or(0.0))
        .with_witness(worst.witness)
        .with_number("c10", c10)
        .with_detail("c10_witness", c10_witness)
        .with_number("morrey_norm", norm)
        .with_detail("violations", violations))
}

#[cfg(test)]
mod tests {
    use super::super::kernel::{KernelForm, Theta};
    use super::*;
    use crate::mmspace::{build_space, SpaceData};

    #[test]
    fn two_point_domination_is_tight() {
        let s = build_space(SpaceData::Points(vec![vec![0.0], vec![1.0]]), vec![1.0, 1.0]).unwrap();
        let lam = DominatingFunction::custom(2.0, |_, r| 2.0 * r.max(1.0));
        let k = KernelSpec::build(&s, &lam, 0.0, Theta::Power(1.0), KernelForm::Canonical).unwrap();
        let f = DiscreteFunction::new(vec![0.0, 1.0]);
        let r = check_pointwise_domination(&s, &lam, &k, &f, &OperatorParams::default()).unwrap();
        assert!(r.pass);
        assert!((r.value - 1.0).abs() < 1e-12, "{}", r.value);
    }
}
