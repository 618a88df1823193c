//! Brute-force oracles shared by the integration tests. Everything here is
//! recomputed from the definitions by direct scans, without the library's
//! prefix tables, neighbor orders or pair families.
#![allow(dead_code)]

use nhs_core::geometry::Ball;
use nhs_core::lab::ExperimentReport;
use nhs_core::mmspace::{build_space, DominatingFunction, PointCloudSpace, SpaceData};
use nhs_core::operators::{adaptive_simpson, KernelSpec, OperatorParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn line(xs: &[f64], weights: &[f64]) -> PointCloudSpace {
    build_space(SpaceData::Points(xs.iter().map(|&x| vec![x]).collect()), weights.to_vec()).unwrap()
}

/// Points 0 and 1 on the line with the given weights.
pub fn two_point(weights: [f64; 2]) -> PointCloudSpace {
    line(&[0.0, 1.0], &weights)
}

/// λ(x, r) = 2·max(r, 1), the dominating function of the hand fixtures.
pub fn hand_lambda() -> DominatingFunction {
    DominatingFunction::custom(2.0, |_, r| 2.0 * r.max(1.0))
}

/// Random points in [0,1]^dim with log-uniform weights in [0.1, 10].
pub fn random_space(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> PointCloudSpace {
    let points: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
    let weights: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-1.0..1.0))).collect();
    build_space(SpaceData::Points(points), weights).unwrap()
}

pub fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn members(space: &PointCloudSpace, c: usize, r: f64) -> Vec<usize> {
    (0..space.len()).filter(|&y| space.dist(c, y) <= r).collect()
}

pub fn measure(space: &PointCloudSpace, c: usize, r: f64) -> f64 {
    members(space, c, r).iter().map(|&y| space.weight(y)).sum()
}

/// Weighted mean over a ball, summed as deviations from the center value so
/// constants come out exact.
pub fn mean(space: &PointCloudSpace, f: &[f64], b: Ball) -> f64 {
    let m = members(space, b.center, b.radius);
    let mass: f64 = m.iter().map(|&y| space.weight(y)).sum();
    let base = f[b.center];
    base + m.iter().map(|&y| (f[y] - base) * space.weight(y)).sum::<f64>() / mass
}

pub fn eccentricity(space: &PointCloudSpace, c: usize) -> f64 {
    (0..space.len()).map(|y| space.dist(c, y)).fold(0.0, f64::max)
}

/// Candidate balls: per center, half the nearest distance and then every
/// distinct positive distance (values within relative 1e-12 collapse onto
/// the largest); a lone point gets radius 1.
pub fn candidate_balls(space: &PointCloudSpace) -> Vec<Ball> {
    let mut out = Vec::new();
    for c in 0..space.len() {
        let mut d: Vec<f64> = (0..space.len()).map(|y| space.dist(c, y)).filter(|&d| d > 0.0).collect();
        d.sort_by(f64::total_cmp);
        if d.is_empty() {
            out.push(Ball::new(c, 1.0));
            continue;
        }
        out.push(Ball::new(c, d[0] / 2.0));
        let mut kept: Vec<f64> = Vec::new();
        for r in d {
            match kept.last_mut() {
                Some(last) if r <= *last * (1.0 + 1e-12) => *last = r,
                _ => kept.push(r),
            }
        }
        out.extend(kept.into_iter().map(|r| Ball::new(c, r)));
    }
    out
}

/// ⌊log_τ 2⌋ by counting powers.
pub fn lower_index(tau: f64) -> i32 {
    let mut m = 0;
    while tau.powi(m + 1) <= 2.0 * (1.0 + 1e-12) {
        m += 1;
    }
    m
}

/// K̃^{(τ)}_{B,S} straight from its definition.
pub fn k_tilde(space: &PointCloudSpace, lambda: &DominatingFunction, b: Ball, s: Ball, tau: f64) -> f64 {
    let mut n = 0;
    while b.radius * tau.powi(n) < s.radius {
        n += 1;
    }
    let mut acc = 1.0;
    for k in -lower_index(tau)..=n {
        let r = b.radius * tau.powi(k);
        acc += measure(space, b.center, r) / lambda.eval(b.center, r);
    }
    acc
}

pub fn nested(space: &PointCloudSpace, b: Ball, s: Ball) -> bool {
    b.radius <= s.radius
        && members(space, b.center, b.radius)
            .iter()
            .all(|&y| space.dist(s.center, y) <= s.radius)
}

/// Every pair used by the nested-ball suprema: concentric τ-enlargements up
/// to saturation and all containing pairs of candidate balls, restricted to
/// admissible balls.
pub fn all_pairs(space: &PointCloudSpace, tau: f64, admissible: &dyn Fn(Ball) -> bool) -> Vec<(Ball, Ball)> {
    let balls = candidate_balls(space);
    let mut out = Vec::new();
    for &b in &balls {
        if !admissible(b) {
            continue;
        }
        let ecc = eccentricity(space, b.center);
        let mut k = 1;
        while b.radius * tau.powi(k - 1) < ecc {
            let s = Ball::new(b.center, b.radius * tau.powi(k));
            if admissible(s) {
                out.push((b, s));
            }
            k += 1;
        }
        for &s in &balls {
            if admissible(s) && nested(space, b, s) {
                out.push((b, s));
            }
        }
    }
    out
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Minimum number of closed balls of radius `r` centered at points of
/// `set` that cover `set`, by subset enumeration.
pub fn min_cover(space: &PointCloudSpace, set: &[usize], r: f64) -> usize {
    let k = set.len();
    assert!(k <= 16, "subset enumeration limited to 16 points");
    let mut best = k;
    for mask in 1u32..(1u32 << k) {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let covered = set.iter().all(|&y| {
            (0..k).any(|i| mask & (1 << i) != 0 && space.dist(set[i], y) <= r)
        });
        if covered {
            best = size;
        }
    }
    best
}

fn osc_sum(space: &PointCloudSpace, f: &[f64], b: Ball, p: f64) -> f64 {
    let m = mean(space, f, b);
    members(space, b.center, b.radius)
        .iter()
        .map(|&y| (f[y] - m).abs().powf(p) * space.weight(y))
        .sum()
}

/// Campanato norm by enumeration: (oscillation sup, regularity sup).
pub fn campanato_oracle(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    f: &[f64],
    psi: &dyn Fn(usize, f64) -> f64,
    tau: f64,
    gamma: f64,
) -> (f64, f64) {
    let mut osc: f64 = 0.0;
    for b in candidate_balls(space) {
        let v = osc_sum(space, f, b, 1.0) / (psi(b.center, b.radius) * measure(space, b.center, tau * b.radius));
        osc = osc.max(v);
    }
    let mut reg: f64 = 0.0;
    for (b, s) in all_pairs(space, tau, &|_| true) {
        let k = k_tilde(space, lambda, b, s, tau);
        let v = (mean(space, f, b) - mean(space, f, s)).abs() / (psi(b.center, b.radius) * k.powf(gamma));
        reg = reg.max(v);
    }
    (osc, reg)
}

/// sup_B ψ(B)^{-1} (μ(τB)^{-1} Σ_B |f − f_B|^p w)^{1/p}.
pub fn p_oscillation_oracle(space: &PointCloudSpace, f: &[f64], psi: &dyn Fn(usize, f64) -> f64, p: f64, tau: f64) -> f64 {
    candidate_balls(space)
        .into_iter()
        .map(|b| (osc_sum(space, f, b, p) / measure(space, b.center, tau * b.radius)).powf(1.0 / p) / psi(b.center, b.radius))
        .fold(0.0, f64::max)
}

/// sup_B (Σ_B |f|^p w / (φ(B) μ(ηB)))^{1/p}.
pub fn morrey_oracle(space: &PointCloudSpace, f: &[f64], p: f64, phi: &dyn Fn(usize, f64) -> f64, eta: f64) -> f64 {
    candidate_balls(space)
        .into_iter()
        .map(|b| {
            let s: f64 = members(space, b.center, b.radius)
                .iter()
                .map(|&y| f[y].abs().powf(p) * space.weight(y))
                .sum();
            (s / (phi(b.center, b.radius) * measure(space, b.center, eta * b.radius))).powf(1.0 / p)
        })
        .fold(0.0, f64::max)
}

/// M_{ψ,p,τ} f(x) by scanning the balls that contain x.
pub fn maximal_oracle(space: &PointCloudSpace, f: &[f64], psi: &dyn Fn(usize, f64) -> f64, p: f64, tau: f64, x: usize) -> f64 {
    candidate_balls(space)
        .into_iter()
        .filter(|b| space.dist(b.center, x) <= b.radius)
        .map(|b| {
            let s: f64 = members(space, b.center, b.radius)
                .iter()
                .map(|&y| f[y].abs().powf(p) * space.weight(y))
                .sum();
            psi(b.center, b.radius) * (s / measure(space, b.center, tau * b.radius)).powf(1.0 / p)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn doubling(space: &PointCloudSpace, b: Ball, alpha: f64, beta: f64) -> bool {
    measure(space, b.center, alpha * b.radius) <= beta * measure(space, b.center, b.radius)
}

/// N f(x): largest mean of |f| over (6, β)-doubling balls containing x.
pub fn doubling_maximal_oracle(space: &PointCloudSpace, f: &[f64], beta: f64, x: usize) -> f64 {
    let abs: Vec<f64> = f.iter().map(|v| v.abs()).collect();
    candidate_balls(space)
        .into_iter()
        .filter(|&b| space.dist(b.center, x) <= b.radius && doubling(space, b, 6.0, beta))
        .map(|b| mean(space, &abs, b))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Sharp maximal function at x: the 6-fold oscillation sup plus the sup of
/// |f_B − f_S|/K̃^{(6)} over doubling pairs with x ∈ B.
pub fn sharp_oracle(space: &PointCloudSpace, lambda: &DominatingFunction, f: &[f64], beta: f64, x: usize) -> f64 {
    let osc = candidate_balls(space)
        .into_iter()
        .filter(|b| space.dist(b.center, x) <= b.radius)
        .map(|b| osc_sum(space, f, b, 1.0) / measure(space, b.center, 6.0 * b.radius))
        .fold(0.0, f64::max);
    let jump = all_pairs(space, 6.0, &|b| doubling(space, b, 6.0, beta))
        .into_iter()
        .filter(|(b, _)| space.dist(b.center, x) <= b.radius)
        .map(|(b, s)| (mean(space, f, b) - mean(space, f, s)).abs() / k_tilde(space, lambda, b, s, 6.0))
        .fold(0.0, f64::max);
    osc + jump
}

/// ∫₀^∞ |S(t)|^s t^{−(l+ρ)s} dt/t by adaptive Simpson between consecutive
/// distances from x, with S(t) recounted at every node, plus the tail past
/// the largest distance under t = r_m/u.
pub fn quadrature_oracle(
    s: &PointCloudSpace,
    k: &KernelSpec,
    c: &dyn Fn(usize) -> f64,
    x: usize,
    pr: &OperatorParams,
) -> f64 {
    let a = pr.decay();
    let partial = |t: f64| -> f64 {
        (0..s.len())
            .filter(|&y| y != x && s.dist(x, y) <= t)
            .map(|y| k.value(x, y) * c(y) * s.weight(y) / s.dist(x, y).powf(1.0 - pr.rho))
            .sum()
    };
    let mut d: Vec<f64> = (0..s.len()).filter(|&y| y != x).map(|y| s.dist(x, y)).collect();
    d.sort_by(f64::total_cmp);
    d.dedup();
    if d.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for w in d.windows(2) {
        let level = partial(0.5 * (w[0] + w[1])).abs().powf(pr.s);
        let scale = level * w[0].powf(-a);
        if scale == 0.0 {
            continue;
        }
        let g = |t: f64| level * t.powf(-a - 1.0);
        total += adaptive_simpson(&g, w[0], w[1], 1e-10 * scale);
    }
    let last = *d.last().unwrap();
    let level = partial(last).abs().powf(pr.s);
    let g = |u: f64| level * last.powf(-a) * u.powf(a - 1.0);
    total += adaptive_simpson(&g, 0.0, 1.0, 1e-10 * level * last.powf(-a));
    total.powf(1.0 / pr.s)
}

pub fn golden_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/grid1_64.json")
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a.is_nan() && b.is_nan()) || a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Rows of `got` that differ from `want` beyond relative `tol`, described.
pub fn report_mismatches(got: &ExperimentReport, want: &ExperimentReport, tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    if got.rows.len() != want.rows.len() {
        out.push(format!("{} rows vs {}", got.rows.len(), want.rows.len()));
    }
    for (g, w) in got.rows.iter().zip(&want.rows) {
        let fields = [(Some(g.value), Some(w.value)), (g.lower, w.lower), (g.upper, w.upper)];
        let values_match = fields.iter().all(|pair| match *pair {
            (Some(a), Some(b)) => close(a, b, tol),
            (None, None) => true,
            _ => false,
        });
        if g.check != w.check || g.status != w.status || g.n != w.n || !values_match {
            out.push(format!(
                "{}: value {} [{:?}, {:?}] {:?} vs {}: value {} [{:?}, {:?}] {:?}",
                g.check, g.value, g.lower, g.upper, g.status, w.check, w.value, w.lower, w.upper, w.status
            ));
        }
    }
    out
}

/// Rows whose value, bounds, witness or status differ in any bit.
pub fn bitwise_mismatches(a: &ExperimentReport, b: &ExperimentReport) -> Vec<String> {
    let bits = |x: Option<f64>| x.map(f64::to_bits);
    let mut out = Vec::new();
    if a.rows.len() != b.rows.len() {
        out.push(format!("{} rows vs {}", a.rows.len(), b.rows.len()));
    }
    for (x, y) in a.rows.iter().zip(&b.rows) {
        if x.value.to_bits() != y.value.to_bits()
            || bits(x.lower) != bits(y.lower)
            || bits(x.upper) != bits(y.upper)
            || x.witness != y.witness
            || x.status != y.status
        {
            out.push(x.check.clone());
        }
    }
    out
}
