use serde::{Deserialize, Serialize};
use serde_json::json;

use super::families::RegularityFunctionPsi;
use super::norms::{
    ball_mean,
    check_dilation, dilated_measures, oscillation_sums, p_oscillation_from, CampanatoContext,
    FunctionTables,
};
use super::DiscreteFunction;
use crate::error::{NhsError, Result};
use crate::geometry::{Ball, BallFamily, Extremum};
use crate::mmspace::{least_squares, DominatingFunction, PointCloudSpace};
use crate::report::CheckReport;

/// Default number of t values in a John–Nirenberg distribution.
pub const DEFAULT_T_POINTS: usize = 32;

/// Level-set measures of `|f − f_B|/ψ(B)` on a ball and their fitted
/// exponential decay rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JnReport {
    pub ball: Ball,
    pub mean: f64,
    pub psi: f64,
    pub mu_ball: f64,
    pub mu_tau_ball: f64,
    pub max_deviation: f64,
    pub t: Vec<f64>,
    pub distribution: Vec<f64>,
    /// Ĉ = −slope of the least-squares fit of ln(distribution/μ(τB)) in t.
    pub rate: Option<f64>,
    pub intercept: Option<f64>,
}

/// `count` evenly spaced points from 0 to `max`.
pub fn even_grid(max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count)
            .map(|i| max * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

pub fn jn_distribution(
    space: &PointCloudSpace,
    f: &DiscreteFunction,
    psi: &RegularityFunctionPsi,
    ball: Ball,
    tau: f64,
    t_grid: Option<&[f64]>,
) -> Result<JnReport> {
    check_dilation(tau)?;
    f.check_len(space)?;
    if f.is_constant() {
        return Err(NhsError::ZeroNorm);
    }
    let members = ball.members(space);
    let mu_ball = space.prefix_measure(ball.center, members.len());
    let mean = ball_mean(space, f, ball);
    let psi_b = psi.eval(ball.center, ball.radius);
    let deviations: Vec<(f64, f64)> = members
        .iter()
        .map(|&y| ((f.values[y] - mean).abs() / psi_b, space.weight(y)))
        .collect();
    let max_deviation = deviations.iter().map(|d| d.0).fold(0.0, f64::max);
    let t = match t_grid {
        Some(grid) => grid.to_vec(),
        None => even_grid(max_deviation, DEFAULT_T_POINTS),
    };
    let distribution: Vec<f64> = t
        .iter()
        .map(|&level| {
            deviations
                .iter()
                .filter(|d| d.0 > level)
                .map(|d| d.1)
                .sum()
        })
        .collect();
    let mu_tau_ball = space.measure_of(ball.center, ball.radius * tau);
    let (xs, ys): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(&distribution)
        .filter(|(_, &d)| d > 0.0)
        .map(|(&t, &d)| (t, (d / mu_tau_ball).ln()))
        .unzip();
    let fit = least_squares(&xs, &ys);
    Ok(JnReport {
        ball,
        mean,
        psi: psi_b,
        mu_ball,
        mu_tau_ball,
        max_deviation,
        t,
        distribution,
        rate: fit.map(|(slope, _)| -slope),
        intercept: fit.map(|(_, b)| b),
    })
}

impl JnReport {
    /// Share of t values where `2 exp(−rate·t) μ(τB)` dominates the
    /// distribution.
    pub fn envelope_coverage(&self, rate: f64) -> f64 {
        if self.t.is_empty() {
            return 1.0;
        }
        let covered = self
            .t
            .iter()
            .zip(&self.distribution)
            .filter(|(&t, &d)| d <= 2.0 * (-rate * t).exp() * self.mu_tau_ball)
            .count();
        covered as f64 / self.t.len() as f64
    }
}

/// Mean-jump constants relative to `norm`: |f_{kB} − f_B|/ψ(B) per k, the
/// iterated version divided by j, and jumps between comparable balls with
/// `max(r₁, r₂) = d(x₁, x₂)`.
pub fn check_mean_jump_bounds(
    space: &PointCloudSpace,
    f: &DiscreteFunction,
    psi: &RegularityFunctionPsi,
    norm: f64,
    k_values: &[f64],
) -> Result<CheckReport> {
    f.check_len(space)?;
    for &k in k_values {
        if !(k >= 1.0 && k.is_finite()) {
            return Err(NhsError::InvalidParams(format!("enlargement factor {k} below 1")));
        }
    }
    let constant = f.is_constant() || norm == 0.0;
    let family = BallFamily::new(space);
    let tables = FunctionTables::new(space, &family, &f.values);
    let psi_values: Vec<f64> = family.balls().iter().map(|b| psi.eval(b.center, b.radius)).collect();
    let scale = if constant { 0.0 } else { 1.0 / norm };

    let mut table = Vec::new();
    let mut overall = Extremum::max();
    for &k in k_values {
        let mut single = Extremum::max();
        let mut iterated = Extremum::max();
        for (i, &b) in family.balls().iter().enumerate() {
            let fb = tables.means[i];
            let denom = psi_values[i];
            let ecc = space.eccentricity(b.center);
            let mut j = 1;
            loop {
                let big = b.dilated(k, j);
                let jump = (tables.mean_of(space, b.center, big.count(space)) - fb).abs() / denom * scale;
                if j == 1 {
                    single.offer_max(jump, || json!({"center": b.center, "radius": b.radius}));
                }
                iterated.offer_max(jump / j as f64, || json!({"center": b.center, "radius": b.radius, "j": j}));
                if k == 1.0 || big.radius >= ecc {
                    break;
                }
                j += 1;
            }
        }
        overall.offer_max(single.or(0.0), || json!({"k": k, "ball": single.witness.clone()}));
        table.push(json!({"k": k, "single": single.or(0.0), "iterated": iterated.or(0.0)}));
    }

    let mut comparable = Extremum::max();
    for x1 in 0..space.len() {
        for x2 in 0..space.len() {
            if x1 == x2 {
                continue;
            }
            let d = space.dist(x1, x2);
            let limit = d * (1.0 + 1e-9);
            let big1 = family.centered_at(x1).find(|&i| family.ball(i).radius >= d).expect("distance is a candidate radius");
            let big2 = family.centered_at(x2).find(|&i| family.ball(i).radius >= d).expect("distance is a candidate radius");
            // B₁ = B(x₁, d) against every smaller ball at x₂
            for i2 in family.centered_at(x2).take_while(|&i| family.ball(i).radius <= limit) {
                let jump = (tables.means[big1] - tables.means[i2]).abs() / psi_values[big1] * scale;
                comparable.offer_max(jump, || json!({"b1": [x1, family.ball(big1).radius], "b2": [x2, family.ball(i2).radius]}));
            }
            // B₂ = B(x₂, d) against every smaller ball at x₁
            for i1 in family.centered_at(x1).take_while(|&i| family.ball(i).radius <= limit) {
                let jump = (tables.means[i1] - tables.means[big2]).abs() / psi_values[i1] * scale;
                comparable.offer_max(jump, || json!({"b1": [x1, family.ball(i1).radius], "b2": [x2, family.ball(big2).radius]}));
            }
        }
    }

    Ok(CheckReport::new("mean_jump_bounds", true, overall.or(0.0))
        .with_witness(overall.witness)
        .with_detail("per_k", serde_json::Value::Array(table))
        .with_number("comparable", comparable.or(0.0))
        .with_detail("comparable_witness", comparable.witness))
}

/// Parameters of the τ/γ equivalence experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceParams {
    pub tau1: f64,
    pub tau2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl Default for EquivalenceParams {
    fn default() -> Self {
        Self {
            tau1: 2.0,
            tau2: 6.0,
            gamma1: 1.0,
            gamma2: 2.0,
        }
    }
}

/// Max and min of one norm ratio over a function family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioBand {
    pub experiment: String,
    pub ratio_max: f64,
    pub ratio_min: f64,
    /// Index of the function attaining the maximum.
    pub witness: Option<usize>,
    pub samples: usize,
}

impl RatioBand {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            ratio_max: f64::NAN,
            ratio_min: f64::NAN,
            witness: None,
            samples: 0,
        }
    }

    pub fn offer(&mut self, ratio: f64, index: usize) {
        if !ratio.is_finite() {
            return;
        }
        if self.samples == 0 || ratio > self.ratio_max {
            self.ratio_max = ratio;
            self.witness = Some(index);
        }
        if self.samples == 0 || ratio < self.ratio_min {
            self.ratio_min = ratio;
        }
        self.samples += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub params: EquivalenceParams,
    pub bands: Vec<RatioBand>,
    /// Functions skipped because every norm vanished.
    pub skipped: usize,
    /// Oscillation term nonincreasing in τ and regularity term
    /// nonincreasing in γ, per function.
    pub term_monotone: bool,
}

/// Norms ‖f‖_{ψ,τᵢ,γⱼ} over a family and the bands of their ratios.
#[allow(clippy::too_many_arguments)]
pub fn equivalence_experiment(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    psi: &RegularityFunctionPsi,
    params: EquivalenceParams,
    functions: &[DiscreteFunction],
    pair_budget: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    check_dilation(params.tau1)?;
    check_dilation(params.tau2)?;
    let family = BallFamily::new(space);
    let ctx1 = CampanatoContext::new(space, &family, lambda, psi, params.tau1, pair_budget, seed);
    let ctx2 = CampanatoContext::new(space, &family, lambda, psi, params.tau2, pair_budget, seed);
    let mut bands = vec![
        RatioBand::new("tau_ratio_gamma1"),
        RatioBand::new("tau_ratio_gamma2"),
        RatioBand::new("gamma_ratio_tau1"),
        RatioBand::new("gamma_ratio_tau2"),
    ];
    let mut skipped = 0;
    let mut term_monotone = true;
    for (index, f) in functions.iter().enumerate() {
        f.check_len(space)?;
        let tables = FunctionTables::new(space, &family, &f.values);
        let osc = oscillation_sums(space, &family, &f.values, &tables.means, 1.0);
        let n11 = ctx1.evaluate_with(&tables, &osc, params.gamma1);
        let n12 = ctx1.evaluate_with(&tables, &osc, params.gamma2);
        let n21 = ctx2.evaluate_with(&tables, &osc, params.gamma1);
        let n22 = ctx2.evaluate_with(&tables, &osc, params.gamma2);
        if params.tau1 <= params.tau2 && n11.oscillation_sup < n21.oscillation_sup {
            term_monotone = false;
        }
        if params.gamma1 <= params.gamma2
            && (n12.regularity_sup > n11.regularity_sup || n22.regularity_sup > n21.regularity_sup)
        {
            term_monotone = false;
        }
        if n11.norm == 0.0 || n12.norm == 0.0 || n21.norm == 0.0 || n22.norm == 0.0 {
            skipped += 1;
            continue;
        }
        bands[0].offer(n11.norm / n21.norm, index);
        bands[1].offer(n12.norm / n22.norm, index);
        bands[2].offer(n11.norm / n12.norm, index);
        bands[3].offer(n21.norm / n22.norm, index);
    }
    Ok(EquivalenceReport {
        params,
        bands,
        skipped,
        term_monotone,
    })
}

/// Band of `p_oscillation_norm(f) / campanato_norm(f)` with γ = 1.
pub fn p_oscillation_band(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    psi: &RegularityFunctionPsi,
    p: f64,
    tau: f64,
    functions: &[DiscreteFunction],
    pair_budget: usize,
    seed: u64,
) -> Result<RatioBand> {
    let family = BallFamily::new(space);
    let ctx = CampanatoContext::new(space, &family, lambda, psi, tau, pair_budget, seed);
    let tau_measures = dilated_measures(space, &family, tau);
    let mut band = RatioBand::new(&format!("p_oscillation_p{p}"));
    for (index, f) in functions.iter().enumerate() {
        f.check_len(space)?;
        let tables = FunctionTables::new(space, &family, &f.values);
        let osc1 = oscillation_sums(space, &family, &f.values, &tables.means, 1.0);
        let norm = ctx.evaluate_with(&tables, &osc1, 1.0).norm;
        if norm == 0.0 {
            continue;
        }
        let oscp = oscillation_sums(space, &family, &f.values, &tables.means, p);
        let value = p_oscillation_from(&family, &oscp, &tau_measures, &ctx.psi_values, p).value;
        band.offer(value / norm, index);
    }
    Ok(band)
}
