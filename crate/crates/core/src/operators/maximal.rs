//! The four maximal operators, evaluated at every point at once.
//!
//! Each operator is a supremum over candidate balls containing x of a
//! per-ball quantity, so the per-ball values are computed once and spread
//! with [`BallFamily::spread_sup`].

use crate::error::{NhsError, Result};
use crate::geometry::{is_doubling, Ball, BallFamily, PairFamily};
use crate::mmspace::{DominatingFunction, GeometryProfile, PointCloudSpace, PrefixTable};
use crate::spaces::{dilated_measures, oscillation_sums, FunctionTables};
use crate::spaces::RegularityFunctionPsi;

/// Default per-point budget of sampled doubling pairs in the sharp maximal function.
pub const DEFAULT_SHARP_BUDGET: usize = 2000;

fn check_maximal(p: f64, tau: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() && tau >= 5.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(NhsError::InvalidParams(format!("need p > 1 and tau >= 5 (got p={p}, tau={tau})")))
    }
}

fn spread(space: &PointCloudSpace, family: &BallFamily, values: &[f64]) -> Vec<f64> {
    // every point lies in its own saturated ball, so the sup is never empty
    family.spread_sup(space, values)
}

/// Per-ball (μ(τB)^{-1} Σ_B |f|^p w)^{1/p}.
fn p_means(space: &PointCloudSpace, family: &BallFamily, f: &[f64], p: f64, tau_measures: &[f64]) -> Vec<f64> {
    let powered: Vec<f64> = f.iter().map(|v| v.abs().powf(p)).collect();
    let table = PrefixTable::weighted(space, &powered);
    (0..family.len())
        .map(|i| (table.sum(family.ball(i).center, family.count(i)) / tau_measures[i]).powf(1.0 / p))
        .collect()
}

/// M_{p,τ} f at every point.
pub fn maximal_p_tau_all(
    space: &PointCloudSpace,
    family: &BallFamily,
    f: &[f64],
    p: f64,
    tau: f64,
) -> Result<Vec<f64>> {
    check_maximal(p, tau)?;
    let tau_measures = dilated_measures(space, family, tau);
    Ok(spread(space, family, &p_means(space, family, f, p, &tau_measures)))
}

pub fn maximal_p_tau(space: &PointCloudSpace, f: &[f64], p: f64, tau: f64, x: usize) -> Result<f64> {
    space.check_point(x)?;
    let family = BallFamily::new(space);
    Ok(maximal_p_tau_all(space, &family, f, p, tau)?[x])
}

/// M_{ψ,p,τ} f at every point, with ψ(B) precomputed per family ball.
pub fn maximal_psi_p_tau_with(
    space: &PointCloudSpace,
    family: &BallFamily,
    psi_values: &[f64],
    f: &[f64],
    p: f64,
    tau: f64,
) -> Result<Vec<f64>> {
    check_maximal(p, tau)?;
    let tau_measures = dilated_measures(space, family, tau);
    let mut values = p_means(space, family, f, p, &tau_measures);
    for (v, psi) in values.iter_mut().zip(psi_values) {
        *v *= psi;
    }
    Ok(spread(space, family, &values))
}

pub fn psi_table(family: &BallFamily, psi: &RegularityFunctionPsi) -> Vec<f64> {
    family.balls().iter().map(|b| psi.eval(b.center, b.radius)).collect()
}

pub fn maximal_psi_p_tau_all(
    space: &PointCloudSpace,
    family: &BallFamily,
    psi: &RegularityFunctionPsi,
    f: &[f64],
    p: f64,
    tau: f64,
) -> Result<Vec<f64>> {
    maximal_psi_p_tau_with(space, family, &psi_table(family, psi), f, p, tau)
}

pub fn maximal_psi_p_tau(
    space: &PointCloudSpace,
    psi: &RegularityFunctionPsi,
    f: &[f64],
    p: f64,
    tau: f64,
    x: usize,
) -> Result<f64> {
    space.check_point(x)?;
    let family = BallFamily::new(space);
    Ok(maximal_psi_p_tau_all(space, &family, psi, f, p, tau)?[x])
}

/// Which family balls are (6, β₆)-doubling.
pub fn doubling_flags(space: &PointCloudSpace, family: &BallFamily, profile: &GeometryProfile) -> Vec<bool> {
    let beta = profile.beta(6.0);
    family
        .balls()
        .iter()
        .map(|&b| is_doubling(space, b, 6.0, beta))
        .collect()
}

/// N f at every point: sup of the plain mean of |f| over doubling balls.
pub fn doubling_maximal_all(
    space: &PointCloudSpace,
    family: &BallFamily,
    profile: &GeometryProfile,
    f: &[f64],
) -> Vec<f64> {
    let flags = doubling_flags(space, family, profile);
    let abs: Vec<f64> = f.iter().map(|v| v.abs()).collect();
    let table = PrefixTable::weighted(space, &abs);
    let values: Vec<f64> = (0..family.len())
        .map(|i| {
            if flags[i] {
                table.sum(family.ball(i).center, family.count(i)) / family.measure(i)
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let out = spread(space, family, &values);
    // the saturated ball around any center is doubling and contains everything
    debug_assert!(out.iter().all(|v| v.is_finite()));
    out
}

pub fn doubling_maximal_n(space: &PointCloudSpace, profile: &GeometryProfile, f: &[f64], x: usize) -> Result<f64> {
    space.check_point(x)?;
    let family = BallFamily::new(space);
    Ok(doubling_maximal_all(space, &family, profile, f)[x])
}

/// Function-independent part of the sharp maximal operator: μ(6B) per ball
/// and the doubling pairs with their K̃^{(6)} coefficients.
pub struct SharpContext<'a> {
    pub space: &'a PointCloudSpace,
    pub family: &'a BallFamily,
    pub six_measures: Vec<f64>,
    pub pairs: PairFamily,
}

impl<'a> SharpContext<'a> {
    /// `budget` is per evaluation point; the pair sample is shared by all points.
    pub fn new(
        space: &'a PointCloudSpace,
        family: &'a BallFamily,
        lambda: &DominatingFunction,
        profile: &GeometryProfile,
        budget: usize,
        seed: u64,
    ) -> Self {
        let beta = profile.beta(6.0);
        let admissible = |b: Ball| is_doubling(space, b, 6.0, beta);
        let total = budget.saturating_mul(space.len());
        Self {
            space,
            family,
            six_measures: dilated_measures(space, family, 6.0),
            pairs: PairFamily::build(space, family, lambda, 6.0, total, seed, &admissible),
        }
    }

    /// Oscillation part at every point: sup_{B∋x} μ(6B)^{-1} Σ_B |f − f_B| w.
    pub fn oscillation_part(&self, tables: &FunctionTables, f: &[f64]) -> Vec<f64> {
        let sums = oscillation_sums(self.space, self.family, f, &tables.means, 1.0);
        let values: Vec<f64> = sums.iter().zip(&self.six_measures).map(|(s, m)| s / m).collect();
        spread(self.space, self.family, &values)
    }

    /// Mean-jump part at every point: sup over doubling pairs x ∈ B ⊆ S of
    /// |f_B − f_S| / K̃^{(6)}_{B,S}; zero where no pair applies.
    pub fn jump_part(&self, tables: &FunctionTables) -> Vec<f64> {
        let mut best = vec![0.0f64; self.family.len()];
        for pair in &self.pairs.pairs {
            let fb = tables.means[pair.inner];
            let fs = tables.mean_of(self.space, pair.outer.center, pair.outer_count);
            let v = (fb - fs).abs() / pair.coefficient;
            if v > best[pair.inner] {
                best[pair.inner] = v;
            }
        }
        spread(self.space, self.family, &best)
    }

    /// M̃^♯ f at every point: oscillation part plus mean-jump part.
    pub fn evaluate(&self, f: &[f64]) -> Vec<f64> {
        let tables = FunctionTables::new(self.space, self.family, f);
        let osc = self.oscillation_part(&tables, f);
        let jump = self.jump_part(&tables);
        osc.iter().zip(&jump).map(|(a, b)| a + b).collect()
    }
}

pub fn sharp_maximal(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    profile: &GeometryProfile,
    f: &[f64],
    x: usize,
    pair_budget: usize,
) -> Result<f64> {
    space.check_point(x)?;
    let family = BallFamily::new(space);
    let ctx = SharpContext::new(space, &family, lambda, profile, pair_budget, 0);
    Ok(ctx.evaluate(f)[x])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmspace::{build_space, SpaceData};

    fn line(n: usize) -> PointCloudSpace {
        let pts = (0..n).map(|i| vec![i as f64]).collect();
        let w = (0..n).map(|i| 1.0 + i as f64).collect();
        build_space(SpaceData::Points(pts), w).unwrap()
    }

    #[test]
    fn singleton_values() {
        let s = build_space(SpaceData::Points(vec![vec![0.0]]), vec![1.0]).unwrap();
        assert_eq!(maximal_p_tau(&s, &[-3.0], 2.0, 5.0, 0).unwrap(), 3.0);
        let profile = GeometryProfile::new(1, 0.0);
        assert_eq!(doubling_maximal_n(&s, &profile, &[-3.0], 0).unwrap(), 3.0);
    }

    #[test]
    fn psi_one_reduces() {
        let s = line(6);
        let fam = BallFamily::new(&s);
        let f = [0.3, -1.0, 2.0, 0.0, 5.0, -0.5];
        let a = maximal_p_tau_all(&s, &fam, &f, 2.0, 5.0).unwrap();
        let b = maximal_psi_p_tau_all(&s, &fam, &RegularityFunctionPsi::one(), &f, 2.0, 5.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sharp_vanishes_on_constants() {
        let s = line(7);
        let fam = BallFamily::new(&s);
        let lam = DominatingFunction::power(1.0, 1.0);
        let profile = GeometryProfile::from_space(&s, &lam);
        let ctx = SharpContext::new(&s, &fam, &lam, &profile, 50, 3);
        assert!(ctx.evaluate(&[2.5; 7]).iter().all(|&v| v == 0.0));
        assert!(ctx.evaluate(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).iter().all(|&v| v > 0.0));
    }

    #[test]
    fn rejects_bad_exponent() {
        let s = line(3);
        assert!(maximal_p_tau(&s, &[1.0; 3], 1.0, 5.0, 0).is_err());
        assert!(maximal_p_tau(&s, &[1.0; 3], 2.0, 1.0, 0).is_err());
    }
}
