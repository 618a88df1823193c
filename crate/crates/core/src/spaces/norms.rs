use serde::{Deserialize, Serialize};
use serde_json::json;

use super::families::{GrowthFunctionPhi, LimitStatus, RegularityFunctionPsi};
use super::DiscreteFunction;
use crate::error::{NhsError, Result};
use crate::geometry::{ball_json, nested_candidate_pairs, Ball, BallFamily, Extremum, PairFamily};
use crate::mmspace::{DominatingFunction, PointCloudSpace, PrefixTable};
use crate::report::CheckReport;

/// Default number of sampled non-concentric pairs in regularity suprema.
pub const DEFAULT_PAIR_BUDGET: usize = 5000;

pub(crate) fn check_exponent(p: f64, min: f64, strict: bool) -> Result<()> {
    let ok = p.is_finite() && if strict { p > min } else { p >= min };
    if ok {
        Ok(())
    } else {
        Err(NhsError::InvalidExponent(p))
    }
}

pub(crate) fn check_dilation(tau: f64) -> Result<()> {
    if tau > 1.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(NhsError::InvalidParams(format!("dilation must exceed 1, got {tau}")))
    }
}

/// f_B = Σ_{y∈B} f(y) w(y) / μ(B), accumulated as deviations from the
/// center value.
pub fn ball_mean(space: &PointCloudSpace, f: &DiscreteFunction, ball: Ball) -> f64 {
    let members = ball.members(space);
    let base = f.values[ball.center];
    let sum: f64 = members.iter().map(|&y| (f.values[y] - base) * space.weight(y)).sum();
    base + sum / space.prefix_measure(ball.center, members.len())
}

/// Per-ball means of one function over a [`BallFamily`].
#[derive(Debug, Clone)]
pub struct FunctionTables {
    /// Centered prefix sums, see [`PrefixTable::centered`].
    pub prefix: PrefixTable,
    pub values: Vec<f64>,
    pub means: Vec<f64>,
}

impl FunctionTables {
    pub fn new(space: &PointCloudSpace, family: &BallFamily, values: &[f64]) -> Self {
        let prefix = PrefixTable::centered(space, values);
        let means = (0..family.len())
            .map(|i| {
                let c = family.ball(i).center;
                values[c] + prefix.sum(c, family.count(i)) / family.measure(i)
            })
            .collect();
        Self {
            prefix,
            values: values.to_vec(),
            means,
        }
    }

    /// Mean over the first `count` neighbors of `center`.
    #[inline]
    pub fn mean_of(&self, space: &PointCloudSpace, center: usize, count: usize) -> f64 {
        self.values[center] + self.prefix.sum(center, count) / space.prefix_measure(center, count)
    }
}

/// Σ_{y∈B} |f(y) − f_B|^p w(y) for every family ball.
pub fn oscillation_sums(
    space: &PointCloudSpace,
    family: &BallFamily,
    values: &[f64],
    means: &[f64],
    p: f64,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(family.len());
    for c in 0..space.len() {
        let order = space.neighbors(c);
        for i in family.centered_at(c) {
            let m = means[i];
            let members = &order[..family.count(i)];
            let s: f64 = if p == 1.0 {
                members.iter().map(|&y| (values[y] - m).abs() * space.weight(y)).sum()
            } else if p == 2.0 {
                members
                    .iter()
                    .map(|&y| (values[y] - m) * (values[y] - m) * space.weight(y))
                    .sum()
            } else {
                members
                    .iter()
                    .map(|&y| (values[y] - m).abs().powf(p) * space.weight(y))
                    .sum()
            };
            out.push(s);
        }
    }
    out
}

/// μ(τB) for every family ball.
pub fn dilated_measures(space: &PointCloudSpace, family: &BallFamily, tau: f64) -> Vec<f64> {
    family
        .balls()
        .iter()
        .map(|b| space.measure_of(b.center, b.radius * tau))
        .collect()
}

/// A supremum over balls with the ball where it is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSup {
    pub value: f64,
    pub witness: Ball,
}

/// sup_B (Σ_B |f|^p w / (φ(B) μ(ηB)))^{1/p} over candidate balls.
pub fn morrey_norm(
    space: &PointCloudSpace,
    f: &DiscreteFunction,
    p: f64,
    phi: &GrowthFunctionPhi,
    eta: f64,
) -> Result<BallSup> {
    check_exponent(p, 1.0, false)?;
    check_dilation(eta)?;
    f.check_len(space)?;
    let family = BallFamily::new(space);
    Ok(morrey_norm_in(space, &family, &f.values, p, phi, eta))
}

pub fn morrey_norm_in(
    space: &PointCloudSpace,
    family: &BallFamily,
    values: &[f64],
    p: f64,
    phi: &GrowthFunctionPhi,
    eta: f64,
) -> BallSup {
    let powered: Vec<f64> = values.iter().map(|v| v.abs().powf(p)).collect();
    let table = PrefixTable::weighted(space, &powered);
    let mut best = BallSup {
        value: 0.0,
        witness: family.ball(0),
    };
    for (i, &b) in family.balls().iter().enumerate() {
        let integral = table.sum(b.center, family.count(i));
        let normalized = integral / (phi.eval(b.center, b.radius) * space.measure_of(b.center, b.radius * eta));
        if normalized > best.value {
            best = BallSup {
                value: normalized,
                witness: b,
            };
        }
    }
    best.value = best.value.powf(1.0 / p);
    best
}

/// The two suprema defining the Campanato norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampanatoNormReport {
    pub oscillation_sup: f64,
    pub oscillation_witness: Option<Ball>,
    pub regularity_sup: f64,
    pub regularity_witness: Option<(Ball, Ball)>,
    pub norm: f64,
    pub tau: f64,
    pub gamma: f64,
}

/// Everything about a Campanato norm that does not depend on the function:
/// ψ and μ(τB) per candidate ball and the nested pair family.
pub struct CampanatoContext<'a> {
    pub space: &'a PointCloudSpace,
    pub family: &'a BallFamily,
    pub tau: f64,
    pub psi_values: Vec<f64>,
    pub tau_measures: Vec<f64>,
    pub pairs: PairFamily,
}

impl<'a> CampanatoContext<'a> {
    pub fn new(
        space: &'a PointCloudSpace,
        family: &'a BallFamily,
        lambda: &DominatingFunction,
        psi: &RegularityFunctionPsi,
        tau: f64,
        pair_budget: usize,
        seed: u64,
    ) -> Self {
        let psi_values = family
            .balls()
            .iter()
            .map(|b| psi.eval(b.center, b.radius))
            .collect();
        Self {
            space,
            family,
            tau,
            psi_values,
            tau_measures: dilated_measures(space, family, tau),
            pairs: PairFamily::build(space, family, lambda, tau, pair_budget, seed, &|_| true),
        }
    }

    pub fn evaluate(&self, values: &[f64], gamma: f64) -> CampanatoNormReport {
        let tables = FunctionTables::new(self.space, self.family, values);
        let osc = oscillation_sums(self.space, self.family, values, &tables.means, 1.0);
        self.evaluate_with(&tables, &osc, gamma)
    }

    /// Evaluate from precomputed means and first-order oscillation sums.
    pub fn evaluate_with(
        &self,
        tables: &FunctionTables,
        oscillation: &[f64],
        gamma: f64,
    ) -> CampanatoNormReport {
        let (oscillation_sup, oscillation_witness) = self.oscillation_term(oscillation);
        let (regularity_sup, regularity_witness) = self.regularity_term(tables, gamma);
        CampanatoNormReport {
            oscillation_sup,
            oscillation_witness,
            regularity_sup,
            regularity_witness,
            norm: oscillation_sup.max(regularity_sup),
            tau: self.tau,
            gamma,
        }
    }

    pub fn oscillation_term(&self, oscillation: &[f64]) -> (f64, Option<Ball>) {
        let mut best = (0.0, None);
        for (i, &s) in oscillation.iter().enumerate() {
            let v = s / (self.psi_values[i] * self.tau_measures[i]);
            if v > best.0 {
                best = (v, Some(self.family.ball(i)));
            }
        }
        best
    }

    pub fn regularity_term(&self, tables: &FunctionTables, gamma: f64) -> (f64, Option<(Ball, Ball)>) {
        let mut best = (0.0, None);
        for pair in &self.pairs.pairs {
            let fb = tables.means[pair.inner];
            let fs = tables.mean_of(self.space, pair.outer.center, pair.outer_count);
            let denom = self.psi_values[pair.inner] * pair.coefficient.powf(gamma);
            let v = (fb - fs).abs() / denom;
            if v > best.0 {
                best = (v, Some((self.family.ball(pair.inner), pair.outer)));
            }
        }
        best
    }
}

#[allow(clippy::too_many_arguments)]
pub fn campanato_norm(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    f: &DiscreteFunction,
    psi: &RegularityFunctionPsi,
    tau: f64,
    gamma: f64,
    pair_budget: usize,
    seed: u64,
) -> Result<CampanatoNormReport> {
    check_dilation(tau)?;
    check_exponent(gamma, 1.0, false)?;
    f.check_len(space)?;
    let family = BallFamily::new(space);
    let ctx = CampanatoContext::new(space, &family, lambda, psi, tau, pair_budget, seed);
    Ok(ctx.evaluate(&f.values, gamma))
}

/// sup_B ψ(B)^{-1} (μ(τB)^{-1} Σ_B |f − f_B|^p w)^{1/p}.
pub fn p_oscillation_norm(
    space: &PointCloudSpace,
    f: &DiscreteFunction,
    psi: &RegularityFunctionPsi,
    p: f64,
    tau: f64,
) -> Result<BallSup> {
    check_exponent(p, 1.0, false)?;
    check_dilation(tau)?;
    f.check_len(space)?;
    let family = BallFamily::new(space);
    let tables = FunctionTables::new(space, &family, &f.values);
    let sums = oscillation_sums(space, &family, &f.values, &tables.means, p);
    let tau_measures = dilated_measures(space, &family, tau);
    let psi_values: Vec<f64> = family.balls().iter().map(|b| psi.eval(b.center, b.radius)).collect();
    Ok(p_oscillation_from(&family, &sums, &tau_measures, &psi_values, p))
}

pub fn p_oscillation_from(
    family: &BallFamily,
    sums: &[f64],
    tau_measures: &[f64],
    psi_values: &[f64],
    p: f64,
) -> BallSup {
    let mut best = BallSup {
        value: 0.0,
        witness: family.ball(0),
    };
    for i in 0..family.len() {
        let v = (sums[i] / tau_measures[i]).powf(1.0 / p) / psi_values[i];
        if v > best.value {
            best = BallSup {
                value: v,
                witness: family.ball(i),
            };
        }
    }
    best
}

/// Strict decrease of φ along each center's radius grid and the empirical
/// nested-ball constants c_{(φ,η)} and C_{(φ,η)} for each η.
pub fn validate_phi_gdec(
    space: &PointCloudSpace,
    phi: &GrowthFunctionPhi,
    etas: &[f64],
    pair_budget: usize,
    seed: u64,
) -> CheckReport {
    let mut increase = None;
    'outer: for c in 0..space.len() {
        let radii = space.candidate_radii(c);
        for w in radii.windows(2) {
            if phi.eval(c, w[1]) >= phi.eval(c, w[0]) {
                increase = Some(json!({"center": c, "radius": w[0], "next_radius": w[1]}));
                break 'outer;
            }
        }
    }
    let family = BallFamily::new(space);
    let all = vec![true; family.len()];
    let (pairs, exhaustive) = nested_candidate_pairs(space, &family, pair_budget, seed, &all);
    let mut table = Vec::new();
    for &eta in etas {
        let eta_measures = dilated_measures(space, &family, eta);
        let phis: Vec<f64> = family.balls().iter().map(|b| phi.eval(b.center, b.radius)).collect();
        let mut lower = Extremum::min();
        let mut upper = Extremum::max();
        for &(i, j) in &pairs {
            let small = phis[i] * eta_measures[i].powf(phi.delta) / (phis[j] * eta_measures[j].powf(phi.delta));
            let large = phis[i] * eta_measures[i] / (phis[j] * eta_measures[j]);
            let w = || json!({"inner": ball_json(family.ball(i)), "outer": ball_json(family.ball(j))});
            lower.offer_min(small, w);
            upper.offer_max(large, w);
        }
        table.push(json!({
            "eta": eta,
            "c_lower": crate::report::float_repr::to_value(lower.or(1.0)),
            "c_upper": crate::report::float_repr::to_value(upper.or(1.0)),
        }));
    }
    let limits = phi.limits();
    let decreasing = increase.is_none();
    let pass = decreasing && limits == LimitStatus::Pass;
    let value = table
        .first()
        .and_then(|t| t["c_upper"].as_f64())
        .unwrap_or(1.0);
    CheckReport::new("phi_gdec", pass, value)
        .with_witness(increase.unwrap_or(serde_json::Value::Null))
        .with_detail("strictly_decreasing", decreasing)
        .with_detail("limits", limits.label())
        .with_detail("pairs", pairs.len())
        .with_detail("exhaustive", exhaustive)
        .with_detail("constants", serde_json::Value::Array(table))
}

/// C_ψ: the largest of ψ(2B)/ψ(B) over candidate balls and of ψ(B')/ψ(B),
/// ψ(B)/ψ(B') over equal-radius balls with centers within the radius.
pub fn validate_psi(space: &PointCloudSpace, psi: &RegularityFunctionPsi) -> CheckReport {
    let mut doubling = Extremum::max();
    let mut comparable = Extremum::max();
    for x in 0..space.len() {
        let row = space.dist_row(x);
        for &r in space.candidate_radii(x) {
            let base = psi.eval(x, r);
            doubling.offer_max(psi.eval(x, 2.0 * r) / base, || json!({"center": x, "radius": r}));
            for (y, &d) in row.iter().enumerate() {
                if y == x || d > r {
                    continue;
                }
                let other = psi.eval(y, r);
                let ratio = (other / base).max(base / other);
                comparable.offer_max(ratio, || json!({"x": x, "y": y, "radius": r}));
            }
        }
    }
    let c_doubling = doubling.or(1.0);
    let c_comparable = comparable.or(1.0);
    let value = c_doubling.max(c_comparable).max(1.0);
    let witness = if c_doubling >= c_comparable {
        doubling.witness
    } else {
        comparable.witness
    };
    CheckReport::new("psi_regularity", value.is_finite(), value)
        .with_witness(witness)
        .with_number("doubling_ratio", c_doubling)
        .with_number("comparability_ratio", c_comparable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmspace::{build_space, SpaceData};

    fn two_point(w: [f64; 2]) -> PointCloudSpace {
        build_space(SpaceData::Points(vec![vec![0.0], vec![1.0]]), w.to_vec()).unwrap()
    }

    fn f(v: &[f64]) -> DiscreteFunction {
        DiscreteFunction::new(v.to_vec())
    }

    #[test]
    fn means() {
        let s = two_point([1.0, 1.0]);
        assert_eq!(ball_mean(&s, &f(&[0.0, 1.0]), Ball::new(0, 1.0)), 0.5);
        let s = two_point([1.0, 3.0]);
        assert_eq!(ball_mean(&s, &f(&[0.0, 1.0]), Ball::new(0, 1.0)), 0.75);
        assert_eq!(ball_mean(&s, &f(&[2.0, 2.0]), Ball::new(1, 0.5)), 2.0);
    }

    #[test]
    fn morrey_singleton() {
        let s = build_space(SpaceData::Distances(vec![vec![0.0]]), vec![1.0]).unwrap();
        let phi = GrowthFunctionPhi::power(1.0, 0.5);
        let m = morrey_norm(&s, &f(&[-3.0]), 2.0, &phi, 2.0).unwrap();
        assert!((m.value - 3.0 * phi.eval(0, 1.0).powf(-0.5)).abs() < 1e-15);
        assert!(matches!(
            morrey_norm(&s, &f(&[1.0]), 0.5, &phi, 2.0),
            Err(NhsError::InvalidExponent(_))
        ));
        assert_eq!(morrey_norm(&s, &f(&[0.0]), 2.0, &phi, 2.0).unwrap().value, 0.0);
    }

    #[test]
    fn campanato_two_point() {
        let s = two_point([1.0, 1.0]);
        let lam = DominatingFunction::custom(2.0, |_, r| 2.0 * r.max(1.0));
        let psi = RegularityFunctionPsi::one();
        let r = campanato_norm(&s, &lam, &f(&[0.0, 1.0]), &psi, 2.0, 1.0, 5000, 1).unwrap();
        assert_eq!(r.oscillation_sup, 0.5);
        // B(a, 1/2) ⊂ B(a, 1): |0 − 1/2| / (1 + 1/2 + 1/2 + 1)
        assert_eq!(r.regularity_sup, 0.5 / 3.0);
        assert_eq!(r.norm, 0.5);
        let constant = campanato_norm(&s, &lam, &f(&[4.0, 4.0]), &psi, 2.0, 1.0, 5000, 1).unwrap();
        assert_eq!((constant.oscillation_sup, constant.regularity_sup, constant.norm), (0.0, 0.0, 0.0));
    }

    #[test]
    fn psi_constants() {
        let coords: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let s = build_space(SpaceData::Points(coords), vec![1.0; 5]).unwrap();
        assert_eq!(validate_psi(&s, &RegularityFunctionPsi::one()).value, 1.0);
        let lam = DominatingFunction::power(3.0, 1.0);
        let r = validate_psi(&s, &RegularityFunctionPsi::lambda_power(lam, 0.5));
        assert!((r.value - 2f64.sqrt()).abs() < 1e-12);
        let r = validate_psi(&s, &RegularityFunctionPsi::point_weight(vec![1.0, 1e3, 1.0, 1.0, 1.0]));
        assert_eq!(r.value, 1e3);
    }

    #[test]
    fn phi_validation() {
        let coords: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let s = build_space(SpaceData::Points(coords), vec![1.0; 6]).unwrap();
        let good = validate_phi_gdec(&s, &GrowthFunctionPhi::power(1.0, 0.5), &[2.0], 5000, 3);
        assert!(good.pass);
        let flat = validate_phi_gdec(&s, &GrowthFunctionPhi::constant(1.0, 0.5), &[2.0], 5000, 3);
        assert!(!flat.pass);
        assert_eq!(flat.details["limits"], json!("fail"));
    }
}
