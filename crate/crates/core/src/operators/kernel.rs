//! θ-type kernels and the log-Dini integral.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{NhsError, Result};
use crate::mmspace::{DominatingFunction, PointCloudSpace};
use crate::report::CheckReport;

/// Modulus of continuity θ.
#[derive(Clone)]
pub enum Theta {
    /// `t^a`.
    Power(f64),
    Zero,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Theta::Power(a) => write!(f, "t^{a}"),
            Theta::Zero => f.write_str("0"),
            Theta::Custom(_) => f.write_str("custom"),
        }
    }
}

impl Theta {
    pub fn custom(eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Theta::Custom(Arc::new(eval))
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Theta::Power(a) => t.powf(*a),
            Theta::Zero => 0.0,
            Theta::Custom(f) => f(t),
        }
    }
}

/// Result of [`dini_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiniValue {
    Finite(f64),
    Divergent,
}

const DINI_RATIO_LEVELS: usize = 60;
const DINI_MAX_LEVELS: usize = 1000;

/// ∫₀¹ θ(t)/t · log(1/t) dt, summed over dyadic pieces [2^{-j-1}, 2^{-j}].
///
/// With `t = e^{-u}` each piece becomes ∫ θ(e^{-u}) u du over an interval of
/// length ln 2, integrated by adaptive Simpson. After 60 pieces the ratio of
/// consecutive pieces must be below 1; the sum then continues until the
/// geometric tail bound falls under `tol`.
pub fn dini_integral(theta: &Theta, tol: f64) -> Result<DiniValue> {
    let mut previous = f64::NEG_INFINITY;
    for i in 0..=4096 {
        let t = (i as f64 / 4096.0).max(1e-300).powi(3);
        let v = theta.eval(t);
        if v < previous || v.is_nan() || v < 0.0 {
            return Err(NhsError::NonMonotoneTheta(t));
        }
        previous = v;
    }
    let ln2 = 2f64.ln();
    let piece = |j: usize| {
        let a = j as f64 * ln2;
        let g = |u: f64| theta.eval((-u).exp()) * u;
        adaptive_simpson(&g, a, a + ln2, tol * 1e-3)
    };
    let mut total = 0.0;
    let mut last = 0.0;
    for j in 0..DINI_MAX_LEVELS {
        let value = piece(j);
        total += value;
        if j + 1 >= DINI_RATIO_LEVELS {
            if value == 0.0 {
                return Ok(DiniValue::Finite(total));
            }
            let q = value / last;
            if !(q < 1.0) {
                return Ok(DiniValue::Divergent);
            }
            if value * q / (1.0 - q) < tol {
                return Ok(DiniValue::Finite(total));
            }
        }
        last = value;
    }
    Ok(DiniValue::Divergent)
}

/// Adaptive Simpson quadrature of `g` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (g(a), g(m), g(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(g, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    g: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm), g(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(g, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_step(g, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// How kernel values are produced.
#[derive(Clone)]
pub enum KernelForm {
    /// `d(x,y)^{1+l} / λ(x, d(x,y))`.
    Canonical,
    /// `c` times the canonical kernel.
    Scaled(f64),
    /// Canonical kernel times `1 + ε h(x,y)` with `h` uniform on [-1, 1].
    Perturbed { epsilon: f64, seed: u64 },
    Custom(Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>),
}

impl fmt::Debug for KernelForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelForm::Canonical => f.write_str("canonical"),
            KernelForm::Scaled(c) => write!(f, "scaled({c})"),
            KernelForm::Perturbed { epsilon, seed } => write!(f, "perturbed({epsilon}, {seed})"),
            KernelForm::Custom(_) => f.write_str("custom"),
        }
    }
}

/// Off-diagonal kernel values on a space together with the size constant.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub l: f64,
    pub theta: Theta,
    pub form: KernelForm,
    n: usize,
    values: Vec<f64>,
    pub c_size: f64,
}

impl KernelSpec {
    pub fn build(
        space: &PointCloudSpace,
        lambda: &DominatingFunction,
        l: f64,
        theta: Theta,
        form: KernelForm,
    ) -> Result<Self> {
        if !(l >= 0.0 && l.is_finite()) {
            return Err(NhsError::InvalidParams(format!("kernel exponent l = {l} must be >= 0")));
        }
        let n = space.len();
        let mut values = vec![0.0; n * n];
        let mut rng = match &form {
            KernelForm::Perturbed { seed, .. } => Some(ChaCha8Rng::seed_from_u64(*seed)),
            _ => None,
        };
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let d = space.dist(x, y);
                let canonical = d.powf(1.0 + l) / lambda.eval(x, d);
                values[x * n + y] = match &form {
                    KernelForm::Canonical => canonical,
                    KernelForm::Scaled(c) => c * canonical,
                    KernelForm::Perturbed { epsilon, .. } => {
                        let h: f64 = rng.as_mut().expect("seeded").random_range(-1.0..=1.0);
                        canonical * (1.0 + epsilon * h)
                    }
                    KernelForm::Custom(k) => k(x, y),
                };
            }
        }
        let mut spec = Self {
            l,
            theta,
            form,
            n,
            values,
            c_size: 0.0,
        };
        spec.c_size = spec.size_constant(space, lambda);
        Ok(spec)
    }

    /// K(x, y); zero on the diagonal where the kernel is undefined.
    #[inline]
    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.n + y]
    }

    fn size_constant(&self, space: &PointCloudSpace, lambda: &DominatingFunction) -> f64 {
        let mut c: f64 = 0.0;
        for x in 0..self.n {
            for y in 0..self.n {
                if x != y {
                    let d = space.dist(x, y);
                    c = c.max(self.value(x, y).abs() * lambda.eval(x, d) / d.powf(1.0 + self.l));
                }
            }
        }
        c
    }
}

/// Size constant and smoothness constants of a kernel. Smoothness is
/// measured over triples with d(x,y) ≥ d(x,z)/2, y ∉ {x, z}, for the
/// difference `|K(x,y)−K(z,y)| − |K(y,x)−K(y,z)|` (clamped at 0) and for the
/// corresponding sum; both are reported, neither is asserted.
pub fn validate_kernel(
    space: &PointCloudSpace,
    lambda: &DominatingFunction,
    kernel: &KernelSpec,
) -> CheckReport {
    let n = space.len();
    let mut difference: (f64, serde_json::Value) = (0.0, serde_json::Value::Null);
    let mut sum: (f64, serde_json::Value) = (0.0, serde_json::Value::Null);
    for x in 0..n {
        for y in 0..n {
            if y == x {
                continue;
            }
            let dxy = space.dist(x, y);
            let lam = lambda.eval(x, dxy);
            for z in 0..n {
                if z == y || z == x {
                    continue;
                }
                let dxz = space.dist(x, z);
                if dxy < dxz / 2.0 {
                    continue;
                }
                let rhs = kernel.theta.eval(dxz / dxy) * dxz.powf(1.0 + kernel.l) / lam;
                let a = (kernel.value(x, y) - kernel.value(z, y)).abs();
                let b = (kernel.value(y, x) - kernel.value(y, z)).abs();
                let (d_ratio, s_ratio) = if rhs > 0.0 {
                    ((a - b).max(0.0) / rhs, (a + b) / rhs)
                } else {
                    let lift = |v: f64| if v > 0.0 { f64::INFINITY } else { 0.0 };
                    (lift((a - b).max(0.0)), lift(a + b))
                };
                if d_ratio > difference.0 {
                    difference = (d_ratio, json!([x, y, z]));
                }
                if s_ratio > sum.0 {
                    sum = (s_ratio, json!([x, y, z]));
                }
            }
        }
    }
    CheckReport::new("kernel", kernel.c_size.is_finite(), kernel.c_size)
        .with_witness(difference.1)
        .with_number("c_size", kernel.c_size)
        .with_number("smoothness_difference", difference.0)
        .with_number("smoothness_sum", sum.0)
        .with_detail("smoothness_sum_witness", sum.1)
}
