//! Finite metric measure spaces and their dominating functions.
//!
//! A [`PointCloudSpace`] is a finite set of atoms with a validated metric and
//! positive weights. All balls are closed (`d(c, y) <= r`). For every center
//! the space keeps its points sorted by distance, so the members of any ball
//! centered there are a prefix of that ordering and ball measures reduce to a
//! binary search plus a prefix-sum lookup.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{MetricAxiom, NhsError, Result};
use crate::report::CheckReport;

/// Default relative slack for floating-point comparisons in validators.
pub const DEFAULT_SLACK: f64 = 1e-9;

/// Relative tolerance used to merge nearly equal candidate radii.
pub const RADIUS_DEDUP_TOL: f64 = 1e-12;

/// Largest space whose triangle inequality is checked on every triple.
pub const EXHAUSTIVE_METRIC_LIMIT: usize = 2048;

const TRIANGLE_REL_TOL: f64 = 1e-12;

/// Raw geometry accepted by [`build_space`].
#[derive(Debug, Clone)]
pub enum SpaceData {
    /// Euclidean coordinates, one row per point.
    Points(Vec<Vec<f64>>),
    /// Full square distance matrix.
    Distances(Vec<Vec<f64>>),
}

/// On-disk space description.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SpaceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<f64>>>,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ids: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub metadata: Value,
}

impl SpaceFile {
    pub fn into_space(self) -> Result<PointCloudSpace> {
        let data = match (self.points, self.distances) {
            (Some(p), None) => SpaceData::Points(p),
            (None, Some(d)) => SpaceData::Distances(d),
            (Some(_), Some(_)) => {
                return Err(NhsError::Spec(
                    "space file must give either \"points\" or \"distances\", not both".into(),
                ))
            }
            (None, None) if self.weights.len() == 1 => SpaceData::Distances(vec![vec![0.0]]),
            (None, None) => {
                return Err(NhsError::Spec(
                    "space file must give \"points\" or \"distances\"".into(),
                ))
            }
        };
        let mut space = build_space(data, self.weights)?;
        if let Some(ids) = self.ids {
            space = space.with_ids(ids)?;
        }
        Ok(space.with_metadata(self.metadata))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Finite metric measure space on weighted atoms.
#[derive(Clone)]
pub struct PointCloudSpace {
    ids: Vec<String>,
    coords: Option<Vec<Vec<f64>>>,
    dist: Vec<f64>,
    weights: Vec<f64>,
    total: f64,
    diameter: f64,
    order: Vec<usize>,
    sorted: Vec<f64>,
    weight_prefix: Vec<f64>,
    radii: Vec<Vec<f64>>,
    metadata: Value,
}

impl fmt::Debug for PointCloudSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointCloudSpace")
            .field("len", &self.len())
            .field("total_measure", &self.total)
            .field("diameter", &self.diameter)
            .finish()
    }
}

/// Validate raw geometry and weights and build the space.
pub fn build_space(data: SpaceData, weights: Vec<f64>) -> Result<PointCloudSpace> {
    let n = weights.len();
    if n == 0 {
        return Err(NhsError::EmptySpace);
    }
    for (index, &weight) in weights.iter().enumerate() {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(NhsError::NonPositiveWeight { index, weight });
        }
    }
    let (dist, coords) = match data {
        SpaceData::Points(points) => {
            if points.len() != n {
                return Err(NhsError::DimensionMismatch {
                    what: "points vs weights",
                    expected: n,
                    found: points.len(),
                });
            }
            let dim = points[0].len();
            if let Some(bad) = points.iter().find(|p| p.len() != dim) {
                return Err(NhsError::DimensionMismatch {
                    what: "coordinate dimension",
                    expected: dim,
                    found: bad.len(),
                });
            }
            let mut dist = vec![0.0; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = euclidean(&points[i], &points[j]);
                    dist[i * n + j] = d;
                    dist[j * n + i] = d;
                }
            }
            (dist, Some(points))
        }
        SpaceData::Distances(rows) => {
            if rows.len() != n {
                return Err(NhsError::DimensionMismatch {
                    what: "distance rows vs weights",
                    expected: n,
                    found: rows.len(),
                });
            }
            let mut dist = Vec::with_capacity(n * n);
            for row in &rows {
                if row.len() != n {
                    return Err(NhsError::DimensionMismatch {
                        what: "distance matrix is not square",
                        expected: n,
                        found: row.len(),
                    });
                }
                dist.extend_from_slice(row);
            }
            (dist, None)
        }
    };
    check_metric(n, &dist)?;
    Ok(PointCloudSpace::assemble(dist, weights, coords))
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn check_metric(n: usize, dist: &[f64]) -> Result<()> {
    let violation = |axiom, points: Vec<usize>| NhsError::MetricViolation { axiom, points };
    for i in 0..n {
        if dist[i * n + i] != 0.0 {
            return Err(violation(MetricAxiom::Diagonal, vec![i]));
        }
        for j in 0..n {
            let d = dist[i * n + j];
            if !(d.is_finite() && d >= 0.0) {
                return Err(violation(MetricAxiom::NotFinite, vec![i, j]));
            }
            if d != dist[j * n + i] {
                return Err(violation(MetricAxiom::Symmetry, vec![i, j]));
            }
            if i != j && d == 0.0 {
                return Err(violation(MetricAxiom::Separation, vec![i, j]));
            }
        }
    }
    let triangle = |i: usize, j: usize, k: usize| {
        let direct = dist[i * n + k];
        let via = dist[i * n + j] + dist[j * n + k];
        direct <= via * (1.0 + TRIANGLE_REL_TOL)
    };
    if n <= EXHAUSTIVE_METRIC_LIMIT {
        for i in 0..n {
            let row_i = &dist[i * n..(i + 1) * n];
            for j in 0..n {
                let dij = row_i[j];
                let row_j = &dist[j * n..(j + 1) * n];
                for k in (i + 1)..n {
                    if row_i[k] > (dij + row_j[k]) * (1.0 + TRIANGLE_REL_TOL) {
                        return Err(violation(MetricAxiom::Triangle, vec![i, j, k]));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6d65_7472_6963);
        for _ in 0..10 * n * n {
            let (i, j, k) = (
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(0..n),
            );
            if !triangle(i, j, k) {
                return Err(violation(MetricAxiom::Triangle, vec![i, j, k]));
            }
        }
    }
    Ok(())
}

impl PointCloudSpace {
    fn assemble(dist: Vec<f64>, weights: Vec<f64>, coords: Option<Vec<Vec<f64>>>) -> Self {
        let n = weights.len();
        let total = weights.iter().sum();
        let diameter = dist.iter().copied().fold(0.0, f64::max);
        let mut order = Vec::with_capacity(n * n);
        let mut sorted = Vec::with_capacity(n * n);
        let mut weight_prefix = Vec::with_capacity(n * (n + 1));
        let mut radii = Vec::with_capacity(n);
        for c in 0..n {
            let row = &dist[c * n..(c + 1) * n];
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
            let mut acc = 0.0;
            weight_prefix.push(0.0);
            for &y in &idx {
                sorted.push(row[y]);
                acc += weights[y];
                weight_prefix.push(acc);
            }
            radii.push(candidate_radii_from(&sorted[c * n..(c + 1) * n]));
            order.extend(idx);
        }
        Self {
            ids: (0..n).map(|i| format!("p{i}")).collect(),
            coords,
            dist,
            weights,
            total,
            diameter,
            order,
            sorted,
            weight_prefix,
            radii,
            metadata: Value::Null,
        }
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.len() {
            return Err(NhsError::DimensionMismatch {
                what: "ids vs points",
                expected: self.len(),
                found: ids.len(),
            });
        }
        self.ids = ids;
        Ok(self)
    }

    pub fn with_metadata(mut self, metadata: Value) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn metadata(&self) -> &Value {
        &self.metadata
    }

    #[inline]
    pub fn dist(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.len() + y]
    }

    /// Row of distances from `x`, indexed by point.
    pub fn dist_row(&self, x: usize) -> &[f64] {
        let n = self.len();
        &self.dist[x * n..(x + 1) * n]
    }

    #[inline]
    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// μ(X).
    pub fn total_measure(&self) -> f64 {
        self.total
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Largest distance from `center`.
    pub fn eccentricity(&self, center: usize) -> f64 {
        self.neighbor_distances(center)[self.len() - 1]
    }

    /// Points sorted by (distance from `center`, index); `center` is first.
    pub fn neighbors(&self, center: usize) -> &[usize] {
        let n = self.len();
        &self.order[center * n..(center + 1) * n]
    }

    /// Distances matching [`neighbors`](Self::neighbors).
    pub fn neighbor_distances(&self, center: usize) -> &[f64] {
        let n = self.len();
        &self.sorted[center * n..(center + 1) * n]
    }

    /// Number of points in the closed ball `B(center, radius)`.
    #[inline]
    pub fn member_count(&self, center: usize, radius: f64) -> usize {
        self.neighbor_distances(center)
            .partition_point(|&d| d <= radius)
    }

    pub fn members(&self, center: usize, radius: f64) -> &[usize] {
        &self.neighbors(center)[..self.member_count(center, radius)]
    }

    /// μ(B(center, radius)) for a closed ball.
    #[inline]
    pub fn measure_of(&self, center: usize, radius: f64) -> f64 {
        self.prefix_measure(center, self.member_count(center, radius))
    }

    /// Measure of the first `count` neighbors of `center`.
    #[inline]
    pub fn prefix_measure(&self, center: usize, count: usize) -> f64 {
        self.weight_prefix[center * (self.len() + 1) + count]
    }

    /// Candidate radii at `center`: half the nearest distance (a ball holding
    /// only the center), then every distinct positive distance, ascending.
    /// An isolated point gets the single radius 1.
    pub fn candidate_radii(&self, center: usize) -> &[f64] {
        &self.radii[center]
    }

    pub fn candidate_ball_count(&self) -> usize {
        self.radii.iter().map(Vec::len).sum()
    }

    pub fn check_point(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(NhsError::PointOutOfRange {
                index,
                len: self.len(),
            })
        }
    }

    /// Serializable description of this space.
    pub fn to_file(&self) -> SpaceFile {
        let n = self.len();
        let (points, distances) = match &self.coords {
            Some(p) => (Some(p.clone()), None),
            None => (
                None,
                Some((0..n).map(|i| self.dist_row(i).to_vec()).collect()),
            ),
        };
        SpaceFile {
            points,
            distances,
            weights: self.weights.clone(),
            ids: Some(self.ids.clone()),
            metadata: self.metadata.clone(),
        }
    }
}

fn candidate_radii_from(sorted: &[f64]) -> Vec<f64> {
    let mut positive: Vec<f64> = Vec::new();
    for &d in sorted.iter().skip(1) {
        match positive.last_mut() {
            // keep the largest of a cluster so no member drops out of the ball
            Some(last) if d <= *last * (1.0 + RADIUS_DEDUP_TOL) => *last = d,
            _ => positive.push(d),
        }
    }
    let anchor = sorted.get(1).map_or(1.0, |d| d / 2.0);
    let mut radii = Vec::with_capacity(positive.len() + 1);
    radii.push(anchor);
    radii.extend(positive);
    radii
}

/// Per-center prefix sums of `values[y] * weight(y)` in neighbor order, so a
/// ball integral is one lookup.
#[derive(Debug, Clone)]
pub struct PrefixTable {
    stride: usize,
    sums: Vec<f64>,
}

impl PrefixTable {
    pub fn weighted(space: &PointCloudSpace, values: &[f64]) -> Self {
        let n = space.len();
        let mut sums = Vec::with_capacity(n * (n + 1));
        for c in 0..n {
            let mut acc = 0.0;
            sums.push(0.0);
            for &y in space.neighbors(c) {
                acc += values[y] * space.weight(y);
                sums.push(acc);
            }
        }
        Self { stride: n + 1, sums }
    }

    /// Per-center prefix sums of `(values[y] − values[center]) * weight(y)`.
    /// Means built on these are exact for constant functions.
    pub fn centered(space: &PointCloudSpace, values: &[f64]) -> Self {
        let n = space.len();
        let mut sums = Vec::with_capacity(n * (n + 1));
        for c in 0..n {
            let base = values[c];
            let mut acc = 0.0;
            sums.push(0.0);
            for &y in space.neighbors(c) {
                acc += (values[y] - base) * space.weight(y);
                sums.push(acc);
            }
        }
        Self { stride: n + 1, sums }
    }

    /// Σ over the first `count` neighbors of `center`.
    #[inline]
    pub fn sum(&self, center: usize, count: usize) -> f64 {
        self.sums[center * self.stride + count]
    }
}

/// Validation state of a dominating function.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Validation {
    #[default]
    Unchecked,
    Pass,
    Fail { witness: String },
}

type BallFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum LambdaForm {
    /// `coefficient * r^exponent`, independent of the center.
    Power { coefficient: f64, exponent: f64 },
    Constant(f64),
    Custom(BallFn),
}

impl fmt::Debug for LambdaForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaForm::Power {
                coefficient,
                exponent,
            } => write!(f, "Power({coefficient} * r^{exponent})"),
            LambdaForm::Constant(c) => write!(f, "Constant({c})"),
            LambdaForm::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// The dominating function λ(x, r) together with its doubling constant.
#[derive(Debug, Clone)]
pub struct DominatingFunction {
    form: LambdaForm,
    c_lambda: f64,
    validated: Validation,
}

impl DominatingFunction {
    pub fn power(coefficient: f64, exponent: f64) -> Self {
        Self {
            form: LambdaForm::Power {
                coefficient,
                exponent,
            },
            c_lambda: 2f64.powf(exponent),
            validated: Validation::Unchecked,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self {
            form: LambdaForm::Constant(value),
            c_lambda: 1.0,
            validated: Validation::Unchecked,
        }
    }

    pub fn custom(
        c_lambda: f64,
        eval: impl Fn(usize, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            form: LambdaForm::Custom(Arc::new(eval)),
            c_lambda,
            validated: Validation::Unchecked,
        }
    }

    #[inline]
    pub fn eval(&self, x: usize, r: f64) -> f64 {
        match &self.form {
            LambdaForm::Power {
                coefficient,
                exponent,
            } => coefficient * r.powf(*exponent),
            LambdaForm::Constant(c) => *c,
            LambdaForm::Custom(f) => f(x, r),
        }
    }

    pub fn form(&self) -> &LambdaForm {
        &self.form
    }

    pub fn c_lambda(&self) -> f64 {
        self.c_lambda
    }

    /// ν = log₂ C_λ.
    pub fn nu(&self) -> f64 {
        self.c_lambda.log2()
    }

    pub fn validated(&self) -> &Validation {
        &self.validated
    }

    pub fn is_center_independent(&self) -> bool {
        !matches!(self.form, LambdaForm::Custom(_))
    }
}

/// Exponent choice for [`fit_power_lambda`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerExponent {
    Auto,
    Fixed(f64),
}

/// How an experiment obtains λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSpec {
    /// Fit `C₀ r^κ` with κ from a log-log regression.
    Auto,
    /// Fit `C₀ r^κ` for the given κ.
    Power { exponent: f64 },
    /// Use `coefficient * r^exponent` as given, no fitting.
    Explicit { coefficient: f64, exponent: f64 },
    Constant { value: f64 },
}

impl Default for LambdaSpec {
    fn default() -> Self {
        LambdaSpec::Power { exponent: 0.5 }
    }
}

impl LambdaSpec {
    pub fn resolve(&self, space: &PointCloudSpace) -> Result<DominatingFunction> {
        match *self {
            LambdaSpec::Auto => fit_power_lambda(space, PowerExponent::Auto),
            LambdaSpec::Power { exponent } => {
                fit_power_lambda(space, PowerExponent::Fixed(exponent))
            }
            LambdaSpec::Explicit {
                coefficient,
                exponent,
            } => Ok(DominatingFunction::power(coefficient, exponent)),
            LambdaSpec::Constant { value } => Ok(DominatingFunction::constant(value)),
        }
    }
}

/// Fit λ(x, r) = C₀ r^κ with C₀ the smallest constant dominating every
/// candidate ball.
pub fn fit_power_lambda(space: &PointCloudSpace, exponent: PowerExponent) -> Result<DominatingFunction> {
    let kappa = match exponent {
        PowerExponent::Fixed(k) if k > 0.0 && k.is_finite() => k,
        PowerExponent::Fixed(k) => return Err(NhsError::InvalidExponent(k)),
        PowerExponent::Auto => fit_growth_exponent(space)?,
    };
    let mut c0: f64 = 0.0;
    for c in 0..space.len() {
        for &r in space.candidate_radii(c) {
            c0 = c0.max(space.measure_of(c, r) / r.powf(kappa));
        }
    }
    Ok(DominatingFunction::power(c0, kappa))
}

fn fit_growth_exponent(space: &PointCloudSpace) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for c in 0..space.len() {
        for &r in space.candidate_radii(c) {
            xs.push(r.ln());
            ys.push(space.measure_of(c, r).ln());
        }
    }
    let slope = least_squares_slope(&xs, &ys).ok_or(NhsError::DegenerateRadii)?;
    if slope > 0.0 {
        Ok(slope)
    } else {
        Err(NhsError::DegenerateRadii)
    }
}

/// Ordinary least-squares slope; `None` when the abscissae have no spread.
pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    least_squares(xs, ys).map(|(slope, _)| slope)
}

/// Ordinary least-squares `(slope, intercept)`.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let scale = xs.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
    if sxx <= 1e-24 * scale {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Check domination, the half-radius doubling bound and radius monotonicity
/// of λ on every candidate ball; records the outcome on `lambda`.
pub fn validate_upper_doubling(
    space: &PointCloudSpace,
    lambda: &mut DominatingFunction,
    slack: f64,
) -> CheckReport {
    let c_lambda = lambda.c_lambda();
    let mut worst_domination: (f64, usize, f64) = (0.0, 0, 0.0);
    let mut required_c: (f64, usize, f64) = (0.0, 0, 0.0);
    let mut monotone_violation: Option<(usize, f64, f64)> = None;
    for c in 0..space.len() {
        let mut previous: Option<(f64, f64)> = None;
        for &r in space.candidate_radii(c) {
            let lam = lambda.eval(c, r);
            let ratio = space.measure_of(c, r) / lam;
            if ratio > worst_domination.0 {
                worst_domination = (ratio, c, r);
            }
            let halving = lam / lambda.eval(c, r / 2.0);
            if halving > required_c.0 {
                required_c = (halving, c, r);
            }
            if let Some((prev_r, prev_lam)) = previous {
                if prev_lam > lam * (1.0 + slack) && monotone_violation.is_none() {
                    monotone_violation = Some((c, prev_r, r));
                }
            }
            previous = Some((r, lam));
        }
    }
    let dominated = worst_domination.0 <= 1.0 + slack;
    let doubling = required_c.0 <= c_lambda * (1.0 + slack);
    let monotone = monotone_violation.is_none();
    let pass = dominated && doubling && monotone;
    let witness = if !dominated {
        json!({"failure": "domination", "center": worst_domination.1, "radius": worst_domination.2, "ratio": worst_domination.0})
    } else if !doubling {
        json!({"failure": "half_radius", "center": required_c.1, "radius": required_c.2, "ratio": required_c.0})
    } else if let Some((c, r0, r1)) = monotone_violation {
        json!({"failure": "monotone", "center": c, "radius": r0, "next_radius": r1})
    } else {
        json!({"center": required_c.1, "radius": required_c.2, "ratio": required_c.0})
    };
    lambda.validated = if pass {
        Validation::Pass
    } else {
        Validation::Fail {
            witness: witness.to_string(),
        }
    };
    CheckReport::new("upper_doubling", pass, required_c.0)
        .with_witness(witness)
        .with_number("max_measure_over_lambda", worst_domination.0)
        .with_number("c_lambda", c_lambda)
        .with_detail("monotone", monotone)
}

/// Check λ(x, r₀) ≤ C_λ λ(y, r₀) whenever d(x, y) ≤ r₀, over ordered pairs
/// and candidate radii of `x`.
pub fn validate_lambda_comparability(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    slack: f64,
) -> CheckReport {
    let mut worst = (1.0, Value::Null);
    let mut pairs = 0usize;
    for x in 0..space.len() {
        for y in 0..space.len() {
            if x == y {
                continue;
            }
            let d = space.dist(x, y);
            for &r in space.candidate_radii(x).iter().filter(|&&r| r >= d) {
                pairs += 1;
                let ratio = lambda.eval(x, r) / lambda.eval(y, r);
                if ratio > worst.0 {
                    worst = (ratio, json!({"x": x, "y": y, "radius": r}));
                }
            }
        }
    }
    let pass = worst.0 <= lambda.c_lambda() * (1.0 + slack);
    CheckReport::new("lambda_comparability", pass, worst.0)
        .with_witness(worst.1)
        .with_detail("pairs", pairs)
}

/// Check the weak reverse doubling condition for every dilation in `a_grid`.
///
/// `C_(a)` is the minimum of λ(x, a r)/λ(x, r) over candidate radii with
/// `a r < 2 diam`. The series Σ C_(a^j)^{-σ} is summed until the tail of its
/// geometric majorant (ratio C_(a)^{-σ}) drops below 1e-6; where no radius
/// admits the dilation a^j, C_(a^j) is extended supermultiplicatively.
pub fn validate_weak_reverse_doubling(
    lambda: &DominatingFunction,
    space: &PointCloudSpace,
    sigma: f64,
    a_grid: &[f64],
) -> CheckReport {
    const TAIL_TOL: f64 = 1e-6;
    const MAX_TERMS: usize = 100_000;
    let limit = 2.0 * space.diameter();
    let dilation_constant = |a: f64| -> Option<f64> {
        let mut best: Option<f64> = None;
        for x in 0..space.len() {
            for &r in space.candidate_radii(x) {
                if r < limit && a * r < limit {
                    let ratio = lambda.eval(x, a * r) / lambda.eval(x, r);
                    best = Some(best.map_or(ratio, |b: f64| b.min(ratio)));
                }
            }
        }
        best
    };
    let mut table = Vec::new();
    let mut pass = true;
    let mut witness = Value::Null;
    let mut value = 0.0f64;
    for &a in a_grid {
        if !(a > 1.0) {
            pass = false;
            witness = json!({"a": a, "failure": "dilation must exceed 1"});
            continue;
        }
        let Some(ca) = dilation_constant(a) else {
            table.push(json!({"a": a, "c_a": Value::Null, "status": "no admissible radius"}));
            continue;
        };
        let q = ca.powf(-sigma);
        if ca < 1.0 || q >= 1.0 - 1e-12 {
            pass = false;
            let failure = if ca < 1.0 { "non_monotone_lambda" } else { "divergent" };
            witness = json!({"a": a, "c_a": ca, "failure": failure});
            value = f64::INFINITY;
            table.push(json!({"a": a, "c_a": ca, "partial_sum": Value::Null, "status": failure}));
            continue;
        }
        let mut partial = 0.0;
        let mut previous = 1.0;
        let mut terms = 0;
        for j in 1..=MAX_TERMS {
            let aj = a.powi(j as i32);
            let cj = dilation_constant(aj).unwrap_or(previous * ca);
            let term = cj.powf(-sigma);
            partial += term;
            previous = cj;
            terms = j;
            if term * q / (1.0 - q) < TAIL_TOL {
                break;
            }
        }
        value = value.max(partial);
        table.push(json!({"a": a, "c_a": ca, "partial_sum": partial, "terms": terms}));
    }
    CheckReport::new("weak_reverse_doubling", pass, value)
        .with_witness(witness)
        .with_detail("sigma", sigma)
        .with_detail("table", Value::Array(table))
}

/// Geometric doubling profile: N₀, n₀ = log₂ N₀ and ν = log₂ C_λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryProfile {
    pub doubling_count: usize,
    pub n0: f64,
    pub nu: f64,
}

impl GeometryProfile {
    pub fn new(doubling_count: usize, nu: f64) -> Self {
        Self {
            doubling_count,
            n0: (doubling_count.max(1) as f64).log2(),
            nu,
        }
    }

    pub fn from_space(space: &PointCloudSpace, lambda: &DominatingFunction) -> Self {
        Self::new(estimate_geometric_doubling(space), lambda.nu())
    }

    /// β_α = α^{max(n₀, ν)} + 30^{n₀} + 30^{ν}.
    pub fn beta(&self, alpha: f64) -> f64 {
        alpha.powf(self.n0.max(self.nu)) + 30f64.powf(self.n0) + 30f64.powf(self.nu)
    }
}

/// Upper bound for N₀: the largest greedy farthest-point cover of a candidate
/// ball `B(x, r)` by closed balls of radius `r/2` centered at its members.
pub fn estimate_geometric_doubling(space: &PointCloudSpace) -> usize {
    let mut best = 1;
    let mut gap = Vec::with_capacity(space.len());
    for c in 0..space.len() {
        let order = space.neighbors(c);
        for &r in space.candidate_radii(c) {
            let members = &order[..space.member_count(c, r)];
            best = best.max(greedy_cover_size(space, members, r / 2.0, &mut gap));
        }
    }
    best
}

/// Greedy cover of `members` (first entry is the ball's center) by balls of
/// radius `half` centered at members.
pub fn greedy_cover_size(
    space: &PointCloudSpace,
    members: &[usize],
    half: f64,
    gap: &mut Vec<f64>,
) -> usize {
    gap.clear();
    let first = members[0];
    gap.extend(members.iter().map(|&y| space.dist(first, y)));
    let mut count = 1;
    loop {
        let (far, &largest) = gap
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("ball has members");
        if largest <= half {
            return count;
        }
        count += 1;
        let row = space.dist_row(members[far]);
        for (g, &y) in gap.iter_mut().zip(members) {
            *g = g.min(row[y]);
        }
    }
}
