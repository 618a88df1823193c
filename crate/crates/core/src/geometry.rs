//! Balls, doubling enlargements and the discrete coefficient K̃.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{NhsError, Result};
use crate::mmspace::{DominatingFunction, GeometryProfile, PointCloudSpace};
use crate::report::CheckReport;

/// Default number of sampled triples for coefficient property checks.
pub const DEFAULT_TRIPLE_BUDGET: usize = 5000;

/// Closed ball `{ y : d(center, y) <= radius }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: usize, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn checked(space: &PointCloudSpace, center: usize, radius: f64) -> Result<Self> {
        space.check_point(center)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(NhsError::InvalidRadius(radius));
        }
        Ok(Self::new(center, radius))
    }

    /// The ball `factor · B`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.center, self.radius * factor)
    }

    /// The ball `τ^k · B`, with the radius computed as `r * tau.powi(k)`.
    pub fn dilated(&self, tau: f64, k: i32) -> Self {
        Self::new(self.center, self.radius * tau.powi(k))
    }

    pub fn contains(&self, space: &PointCloudSpace, y: usize) -> bool {
        space.dist(self.center, y) <= self.radius
    }

    pub fn members<'a>(&self, space: &'a PointCloudSpace) -> &'a [usize] {
        space.members(self.center, self.radius)
    }

    pub fn count(&self, space: &PointCloudSpace) -> usize {
        space.member_count(self.center, self.radius)
    }
}

/// μ(B), summed over members in neighbor order of the center.
pub fn ball_measure(space: &PointCloudSpace, ball: Ball) -> f64 {
    space.measure_of(ball.center, ball.radius)
}

/// `inner ⊆ outer` as member sets, together with `r_inner <= r_outer`.
pub fn is_nested(space: &PointCloudSpace, inner: Ball, outer: Ball) -> bool {
    inner.radius <= outer.radius && reach(space, inner, outer.center) <= outer.radius
}

/// Largest distance from `from` to a member of `ball`.
fn reach(space: &PointCloudSpace, ball: Ball, from: usize) -> f64 {
    let row = space.dist_row(from);
    ball.members(space)
        .iter()
        .map(|&y| row[y])
        .fold(0.0, f64::max)
}

/// Every candidate ball of a space, grouped by center with ascending radii.
#[derive(Debug, Clone)]
pub struct BallFamily {
    offsets: Vec<usize>,
    balls: Vec<Ball>,
    counts: Vec<usize>,
    measures: Vec<f64>,
}

impl BallFamily {
    pub fn new(space: &PointCloudSpace) -> Self {
        let mut offsets = Vec::with_capacity(space.len() + 1);
        let mut balls = Vec::with_capacity(space.candidate_ball_count());
        let mut counts = Vec::with_capacity(space.candidate_ball_count());
        let mut measures = Vec::with_capacity(space.candidate_ball_count());
        offsets.push(0);
        for c in 0..space.len() {
            for &r in space.candidate_radii(c) {
                let count = space.member_count(c, r);
                balls.push(Ball::new(c, r));
                counts.push(count);
                measures.push(space.prefix_measure(c, count));
            }
            offsets.push(balls.len());
        }
        Self {
            offsets,
            balls,
            counts,
            measures,
        }
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    #[inline]
    pub fn ball(&self, i: usize) -> Ball {
        self.balls[i]
    }

    #[inline]
    pub fn count(&self, i: usize) -> usize {
        self.counts[i]
    }

    #[inline]
    pub fn measure(&self, i: usize) -> f64 {
        self.measures[i]
    }

    /// Indices of the balls centered at `center`.
    pub fn centered_at(&self, center: usize) -> Range<usize> {
        self.offsets[center]..self.offsets[center + 1]
    }

    /// For every point x, the supremum of `values[i]` over family balls
    /// containing x.
    pub fn spread_sup(&self, space: &PointCloudSpace, values: &[f64]) -> Vec<f64> {
        let n = space.len();
        let mut out = vec![f64::NEG_INFINITY; n];
        let mut suffix = Vec::new();
        for c in 0..n {
            let range = self.centered_at(c);
            suffix.clear();
            suffix.resize(range.len(), f64::NEG_INFINITY);
            let mut best = f64::NEG_INFINITY;
            for (slot, i) in range.clone().enumerate().rev() {
                best = best.max(values[i]);
                suffix[slot] = best;
            }
            let counts = &self.counts[range];
            let mut slot = 0;
            for (rank, &y) in space.neighbors(c).iter().enumerate() {
                while slot < counts.len() && counts[slot] <= rank {
                    slot += 1;
                }
                if slot == counts.len() {
                    break;
                }
                if suffix[slot] > out[y] {
                    out[y] = suffix[slot];
                }
            }
        }
        out
    }
}

/// ⌊log_τ 2⌋, nudged so that exact integers are not rounded down.
pub fn lower_index(tau: f64) -> i32 {
    (2f64.ln() / tau.ln() + 1e-12).floor() as i32
}

/// Smallest integer N with `r_inner · τ^N >= r_outer`.
pub fn coefficient_index(r_inner: f64, r_outer: f64, tau: f64) -> i32 {
    let mut n = ((r_outer / r_inner).ln() / tau.ln()).ceil().max(0.0) as i32;
    while r_inner * tau.powi(n - 1) >= r_outer {
        n -= 1;
    }
    while r_inner * tau.powi(n) < r_outer {
        n += 1;
    }
    n
}

/// Value of K̃ together with its index and summands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientValue {
    pub value: f64,
    #[serde(rename = "N")]
    pub n: i32,
    pub terms: Vec<f64>,
}

/// Summand μ(τ^k B)/λ(c_B, τ^k r_B).
#[inline]
pub fn coefficient_term(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    center: usize,
    radius: f64,
    tau: f64,
    k: i32,
) -> f64 {
    let r = radius * tau.powi(k);
    space.measure_of(center, r) / lambda.eval(center, r)
}

/// 1 + Σ_{k=-⌊log_τ 2⌋}^{n} μ(τ^k B)/λ(c_B, τ^k r_B).
pub fn coefficient_sum(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    inner: Ball,
    n: i32,
    tau: f64,
) -> f64 {
    let mut acc = 0.0;
    for k in -lower_index(tau)..=n {
        acc += coefficient_term(space, lambda, inner.center, inner.radius, tau, k);
    }
    1.0 + acc
}

/// K̃ for nested balls without the nesting check.
pub fn coefficient_unchecked(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    inner: Ball,
    outer: Ball,
    tau: f64,
) -> f64 {
    let n = coefficient_index(inner.radius, outer.radius, tau);
    coefficient_sum(space, lambda, inner, n, tau)
}

pub fn discrete_coefficient(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    inner: Ball,
    outer: Ball,
    tau: f64,
) -> Result<CoefficientValue> {
    if !(tau > 1.0 && tau.is_finite()) {
        return Err(NhsError::InvalidParams(format!("tau must exceed 1, got {tau}")));
    }
    if !is_nested(space, inner, outer) {
        return Err(NhsError::NotNested {
            inner_center: inner.center,
            inner_radius: inner.radius,
            outer_center: outer.center,
            outer_radius: outer.radius,
        });
    }
    let n = coefficient_index(inner.radius, outer.radius, tau);
    let terms: Vec<f64> = (-lower_index(tau)..=n)
        .map(|k| coefficient_term(space, lambda, inner.center, inner.radius, tau, k))
        .collect();
    let value = 1.0 + terms.iter().sum::<f64>();
    Ok(CoefficientValue { value, n, terms })
}

/// Whether μ(αB) ≤ β μ(B).
pub fn is_doubling(space: &PointCloudSpace, ball: Ball, alpha: f64, beta: f64) -> bool {
    space.measure_of(ball.center, ball.radius * alpha) <= beta * space.measure_of(ball.center, ball.radius)
}

/// Smallest `i` such that `α^i B` is (α, β_α)-doubling, with that ball.
pub fn smallest_doubling_ball(
    space: &PointCloudSpace,
    profile: &GeometryProfile,
    ball: Ball,
    alpha: f64,
) -> (Ball, i32) {
    smallest_doubling_with_beta(space, ball, alpha, profile.beta(alpha))
}

pub fn smallest_doubling_with_beta(
    space: &PointCloudSpace,
    ball: Ball,
    alpha: f64,
    beta: f64,
) -> (Ball, i32) {
    let ecc = space.eccentricity(ball.center);
    let mut i = 0;
    loop {
        let candidate = ball.dilated(alpha, i);
        // a saturated ball is doubling because β > 1
        if candidate.radius >= ecc || is_doubling(space, candidate, alpha, beta) {
            return (candidate, i);
        }
        i += 1;
    }
}

/// A nested pair `inner ⊆ outer` with its coefficient precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallPair {
    /// Index of the inner ball in the [`BallFamily`].
    pub inner: usize,
    pub outer: Ball,
    pub outer_count: usize,
    pub coefficient: f64,
}

/// Nested pairs used by every supremum over `B ⊆ S`: all concentric
/// enlargements `(B, τ^k B)` up to saturation, plus containing pairs of
/// candidate balls (every such pair when the family is small, otherwise a
/// fixed-seed sample of `budget` draws).
#[derive(Debug, Clone)]
pub struct PairFamily {
    pub tau: f64,
    pub pairs: Vec<BallPair>,
    pub exhaustive: bool,
}

impl PairFamily {
    pub fn build(
        space: &PointCloudSpace,
        family: &BallFamily,
        lambda: &DominatingFunction,
        tau: f64,
        budget: usize,
        seed: u64,
        admissible: &dyn Fn(Ball) -> bool,
    ) -> Self {
        let lower = lower_index(tau);
        let mut pairs = Vec::new();
        let inner_ok: Vec<bool> = family.balls().iter().map(|&b| admissible(b)).collect();
        for (i, &b) in family.balls().iter().enumerate() {
            if !inner_ok[i] {
                continue;
            }
            let ecc = space.eccentricity(b.center);
            if b.radius >= ecc {
                continue;
            }
            let mut acc = 0.0;
            for k in -lower..=0 {
                acc += coefficient_term(space, lambda, b.center, b.radius, tau, k);
            }
            let mut k = 1;
            loop {
                acc += coefficient_term(space, lambda, b.center, b.radius, tau, k);
                let outer = b.dilated(tau, k);
                if admissible(outer) {
                    pairs.push(BallPair {
                        inner: i,
                        outer,
                        outer_count: outer.count(space),
                        coefficient: 1.0 + acc,
                    });
                }
                if outer.radius >= ecc {
                    break;
                }
                k += 1;
            }
        }
        let (containing, exhaustive) = nested_candidate_pairs(space, family, budget, seed, &inner_ok);
        for (i, j) in containing {
            let (inner, outer) = (family.ball(i), family.ball(j));
            pairs.push(BallPair {
                inner: i,
                outer,
                outer_count: family.count(j),
                coefficient: coefficient_unchecked(space, lambda, inner, outer, tau),
            });
        }
        Self {
            tau,
            pairs,
            exhaustive,
        }
    }
}

/// Pairs `(i, j)` of admissible family balls with `ball(i) ⊆ ball(j)` and
/// `r_i <= r_j`: all of them when `count² <= budget`, otherwise `budget`
/// fixed-seed draws (inner ball, then outer center, then outer radius). The
/// flag reports whether the enumeration was exhaustive.
pub fn nested_candidate_pairs(
    space: &PointCloudSpace,
    family: &BallFamily,
    budget: usize,
    seed: u64,
    admissible: &[bool],
) -> (Vec<(usize, usize)>, bool) {
    let inners: Vec<usize> = (0..family.len()).filter(|&i| admissible[i]).collect();
    let exhaustive = inners.len().saturating_mul(inners.len()) <= budget;
    let mut out = Vec::new();
    if exhaustive {
        for &i in &inners {
            let inner = family.ball(i);
            for c in 0..space.len() {
                let floor = inner.radius.max(reach(space, inner, c));
                for j in family.centered_at(c) {
                    if admissible[j] && family.ball(j).radius >= floor {
                        out.push((i, j));
                    }
                }
            }
        }
    } else if !inners.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..budget {
            let i = inners[rng.random_range(0..inners.len())];
            let c = rng.random_range(0..space.len());
            if let Some(j) = draw_containing(space, family, &mut rng, i, c, admissible) {
                out.push((i, j));
            }
        }
    }
    (out, exhaustive)
}

/// Uniform draw among admissible candidate balls at `center` that contain
/// family ball `inner` and are at least as large.
fn draw_containing(
    space: &PointCloudSpace,
    family: &BallFamily,
    rng: &mut ChaCha8Rng,
    inner: usize,
    center: usize,
    admissible: &[bool],
) -> Option<usize> {
    let b = family.ball(inner);
    let floor = b.radius.max(reach(space, b, center));
    let range = family.centered_at(center);
    let start = range.start
        + family.balls()[range.clone()].partition_point(|s| s.radius < floor);
    let options: Vec<usize> = (start..range.end).filter(|&j| admissible[j]).collect();
    if options.is_empty() {
        None
    } else {
        Some(options[rng.random_range(0..options.len())])
    }
}

/// Sampled nested triple `B ⊆ R ⊆ S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NestedTriple {
    pub inner: Ball,
    pub middle: Ball,
    pub outer: Ball,
}

/// Draw nested triples of candidate balls with a fixed-seed generator.
pub fn sample_nested_triples(
    space: &PointCloudSpace,
    family: &BallFamily,
    count: usize,
    seed: u64,
) -> Vec<NestedTriple> {
    let all = vec![true; family.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples = Vec::with_capacity(count);
    let attempts = count.saturating_mul(20).max(100);
    for _ in 0..attempts {
        if triples.len() == count {
            break;
        }
        let i = rng.random_range(0..family.len());
        let c1 = rng.random_range(0..space.len());
        let Some(j) = draw_containing(space, family, &mut rng, i, c1, &all) else {
            continue;
        };
        let c2 = rng.random_range(0..space.len());
        let Some(k) = draw_containing(space, family, &mut rng, j, c2, &all) else {
            continue;
        };
        triples.push(NestedTriple {
            inner: family.ball(i),
            middle: family.ball(j),
            outer: family.ball(k),
        });
    }
    triples
}

/// Running maximum with its witness.
#[derive(Debug, Clone)]
pub(crate) struct Extremum {
    pub value: f64,
    pub witness: Value,
}

impl Extremum {
    pub fn max() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            witness: Value::Null,
        }
    }

    pub fn min() -> Self {
        Self {
            value: f64::INFINITY,
            witness: Value::Null,
        }
    }

    pub fn offer_max(&mut self, value: f64, witness: impl FnOnce() -> Value) {
        if value > self.value {
            self.value = value;
            self.witness = witness();
        }
    }

    pub fn offer_min(&mut self, value: f64, witness: impl FnOnce() -> Value) {
        if value < self.value {
            self.value = value;
            self.witness = witness();
        }
    }

    pub fn or(&self, fallback: f64) -> f64 {
        if self.value.is_finite() {
            self.value
        } else {
            fallback
        }
    }
}

pub(crate) fn ball_json(b: Ball) -> Value {
    json!({"center": b.center, "radius": b.radius})
}

/// Coefficient properties over sampled nested triples.
///
/// The outer-ball monotonicity `K̃_{B,R} ≤ K̃_{B,S}` is asserted exactly. The
/// remaining quantities are empirical constants: the sup of K̃_{B,S} over
/// pairs with `r_S ≤ α r_B` (α = 2, 6), the quasi-additivity constant
/// `(K̃_{B,S} − K̃_{B,R})/K̃_{R,S}`, the ratio `K̃_{R,S}/K̃_{B,S}`, the
/// band of `K̃^{(τ₁)}/K̃^{(τ₂)}` and the largest coefficient of a concentric
/// pair with no intermediate (τ₁, β)-doubling ball.
pub fn check_k_properties(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    profile: &GeometryProfile,
    taus: (f64, f64),
    budget: usize,
    seed: u64,
) -> CheckReport {
    let (tau1, tau2) = taus;
    let family = BallFamily::new(space);
    let triples = sample_nested_triples(space, &family, budget, seed);
    let k1 = |b: Ball, s: Ball| coefficient_unchecked(space, lambda, b, s, tau1);
    let k2 = |b: Ball, s: Ball| coefficient_unchecked(space, lambda, b, s, tau2);

    let mut monotone_violation = Extremum::max();
    let mut below_one = Extremum::min();
    let mut bounded_2 = Extremum::max();
    let mut bounded_6 = Extremum::max();
    let mut additivity = Extremum::max();
    let mut outer_ratio = Extremum::max();
    let mut band_hi = Extremum::max();
    let mut band_lo = Extremum::min();

    let mut pair_stats = |b: Ball, s: Ball, kbs: f64| {
        below_one.offer_min(kbs, || json!({"inner": ball_json(b), "outer": ball_json(s)}));
        if s.radius <= 2.0 * b.radius {
            bounded_2.offer_max(kbs, || json!({"inner": ball_json(b), "outer": ball_json(s)}));
        }
        if s.radius <= 6.0 * b.radius {
            bounded_6.offer_max(kbs, || json!({"inner": ball_json(b), "outer": ball_json(s)}));
        }
        let ratio = kbs / k2(b, s);
        band_hi.offer_max(ratio, || json!({"inner": ball_json(b), "outer": ball_json(s)}));
        band_lo.offer_min(ratio, || json!({"inner": ball_json(b), "outer": ball_json(s)}));
    };

    for t in &triples {
        let (b, r, s) = (t.inner, t.middle, t.outer);
        let kbr = k1(b, r);
        let kbs = k1(b, s);
        let krs = k1(r, s);
        let witness = || json!({"inner": ball_json(b), "middle": ball_json(r), "outer": ball_json(s)});
        monotone_violation.offer_max(kbr - kbs, witness);
        additivity.offer_max((kbs - kbr) / krs, witness);
        outer_ratio.offer_max(krs / kbs, witness);
        pair_stats(b, s, kbs);
        pair_stats(b, r, kbr);
        pair_stats(r, s, krs);
    }

    // concentric enlargements B ⊂ τ₁^k B, all candidate balls
    let beta = profile.beta(tau1);
    let mut no_intermediate = Extremum::max();
    for &b in family.balls() {
        let ecc = space.eccentricity(b.center);
        let mut all_fail = !is_doubling(space, b, tau1, beta);
        let mut k = 1;
        while b.radius * tau1.powi(k - 1) < ecc {
            let s = b.dilated(tau1, k);
            let kbs = k1(b, s);
            pair_stats(b, s, kbs);
            all_fail = all_fail && !is_doubling(space, s, tau1, beta);
            if all_fail {
                no_intermediate.offer_max(kbs, || json!({"inner": ball_json(b), "outer": ball_json(s)}));
            }
            k += 1;
        }
    }

    let pass = monotone_violation.value <= 0.0 && below_one.or(1.0) >= 1.0;
    let witness = if pass {
        band_hi.witness.clone()
    } else if below_one.or(1.0) < 1.0 {
        below_one.witness.clone()
    } else {
        monotone_violation.witness.clone()
    };
    CheckReport::new("k_properties", pass, band_hi.or(1.0))
        .with_witness(witness)
        .with_detail("triples", triples.len())
        .with_number("monotone_excess", monotone_violation.or(0.0))
        .with_number("min_coefficient", below_one.or(1.0))
        .with_number("bounded_alpha_2", bounded_2.or(1.0))
        .with_number("bounded_alpha_6", bounded_6.or(1.0))
        .with_number("quasi_additivity", additivity.or(0.0))
        .with_number("outer_ratio", outer_ratio.or(0.0))
        .with_number("tau_band_max", band_hi.or(1.0))
        .with_number("tau_band_min", band_lo.or(1.0))
        .with_number("no_intermediate_doubling_max", no_intermediate.or(1.0))
        .with_detail("tau1", tau1)
        .with_detail("tau2", tau2)
}

/// Concentric chain `B(center, base · τ^{e_i})` for increasing exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub center: usize,
    pub base_radius: f64,
    pub exponents: Vec<i32>,
}

impl ChainSpec {
    pub fn balls(&self, tau: f64) -> Vec<Ball> {
        self.exponents
            .iter()
            .map(|&e| Ball::new(self.center, self.base_radius).dilated(tau, e))
            .collect()
    }
}

/// Strict chain inequality Σ K̃_{Bᵢ,Bᵢ₊₁} < (3 + ⌊log_τ 2⌋) K̃_{B₁,B_m} on
/// every chain whose links all exceed 3 + ⌊log_τ 2⌋.
pub fn check_chain_lemma(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    tau: f64,
    chains: &[ChainSpec],
) -> CheckReport {
    let bound = 3.0 + lower_index(tau) as f64;
    let mut qualifying = 0usize;
    let mut passing = 0usize;
    let mut skipped = 0usize;
    let mut worst = Extremum::max();
    let mut failure = Value::Null;
    for (index, chain) in chains.iter().enumerate() {
        let balls = chain.balls(tau);
        let valid = balls.len() >= 2
            && chain.exponents.windows(2).all(|w| w[0] < w[1])
            && chain.center < space.len();
        if !valid {
            skipped += 1;
            continue;
        }
        let links: Vec<f64> = balls
            .windows(2)
            .map(|w| coefficient_unchecked(space, lambda, w[0], w[1], tau))
            .collect();
        if links.iter().any(|&k| k <= bound) {
            skipped += 1;
            continue;
        }
        qualifying += 1;
        let total = coefficient_unchecked(space, lambda, balls[0], balls[balls.len() - 1], tau);
        let lhs: f64 = links.iter().sum();
        let ratio = lhs / (bound * total);
        worst.offer_max(ratio, || json!({"chain": index, "lhs": lhs, "rhs": bound * total}));
        if lhs < bound * total {
            passing += 1;
        } else if failure.is_null() {
            failure = json!({"chain": index, "lhs": lhs, "rhs": bound * total});
        }
    }
    let pass = passing == qualifying;
    CheckReport::new("chain_lemma", pass, worst.or(0.0))
        .with_witness(if pass { worst.witness } else { failure })
        .with_detail("qualifying", qualifying)
        .with_detail("passing", passing)
        .with_detail("skipped", skipped)
        .with_detail("bound", bound)
}

/// Max over candidate balls of K̃^{(α)}_{B, B̃^α}.
pub fn check_doubling_coefficient_bound(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    profile: &GeometryProfile,
    alpha: f64,
) -> CheckReport {
    let beta = profile.beta(alpha);
    let mut worst = Extremum::max();
    for c in 0..space.len() {
        for &r in space.candidate_radii(c) {
            let b = Ball::new(c, r);
            let (enlarged, i) = smallest_doubling_with_beta(space, b, alpha, beta);
            let k = coefficient_sum(space, lambda, b, i, alpha);
            worst.offer_max(k, || json!({"ball": ball_json(b), "doubling": ball_json(enlarged), "i": i}));
        }
    }
    CheckReport::new("doubling_coefficient_bound", true, worst.or(1.0))
        .with_witness(worst.witness)
        .with_detail("alpha", alpha)
        .with_number("beta", beta)
}

/// Max over candidate balls of the index between B and its smallest
/// (τ, β_τ)-doubling enlargement.
pub fn validate_weak_doubling_mu(
    space: &PointCloudSpace,
    profile: &GeometryProfile,
    tau: f64,
) -> CheckReport {
    let beta = profile.beta(tau);
    let mut worst = (0i32, Value::Null);
    for c in 0..space.len() {
        for &r in space.candidate_radii(c) {
            let (_, i) = smallest_doubling_with_beta(space, Ball::new(c, r), tau, beta);
            if i > worst.0 || worst.1.is_null() {
                worst = (i, json!({"center": c, "radius": r, "index": i}));
            }
        }
    }
    CheckReport::new("weak_doubling_mu", true, worst.0 as f64)
        .with_witness(worst.1)
        .with_detail("tau", tau)
        .with_number("beta", beta)
}
