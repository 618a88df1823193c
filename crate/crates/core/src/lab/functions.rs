//! Test-function families.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NhsError, Result};
use crate::geometry::Ball;
use crate::mmspace::PointCloudSpace;
use crate::spaces::{CampanatoContext, DiscreteFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FunctionFamily {
    /// Smooth random trigonometric fields with values in [-1, 1].
    RandomBounded { seed: u64 },
    Indicator { center: usize, radius: f64 },
    /// Random bounded fields projected to Σ f w = 0.
    MeanZeroRandom { seed: u64 },
    /// Random bounded fields rescaled to unit Campanato norm.
    PsiAdapted { seed: u64 },
}

impl FunctionFamily {
    pub fn label(&self) -> &'static str {
        match self {
            FunctionFamily::RandomBounded { .. } => "random_bounded",
            FunctionFamily::Indicator { .. } => "indicator",
            FunctionFamily::MeanZeroRandom { .. } => "mean_zero_random",
            FunctionFamily::PsiAdapted { .. } => "psi_adapted",
        }
    }
}

const MODES: usize = 4;

/// The `index`-th field of a seed. On spaces with coordinates the field is a
/// fixed continuous function of position, so the same (seed, index) samples
/// the same function at every grid resolution.
pub fn random_field(space: &PointCloudSpace, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    match space.coords() {
        Some(coords) => {
            let d = coords.first().map_or(0, Vec::len);
            let modes: Vec<(f64, Vec<f64>, f64)> = (0..MODES)
                .map(|m| {
                    let amplitude = rng.random_range(-1.0..=1.0) / (m as f64 + 1.0);
                    let freq = (0..d).map(|_| rng.random_range(1..=3) as f64).collect();
                    let phase = rng.random_range(0.0..TAU);
                    (amplitude, freq, phase)
                })
                .collect();
            let total: f64 = modes.iter().map(|m| m.0.abs()).sum();
            let scale = if total > 0.0 { 1.0 / total } else { 1.0 };
            coords
                .iter()
                .map(|x| {
                    modes
                        .iter()
                        .map(|(a, k, phase)| {
                            let arg: f64 = x.iter().zip(k).map(|(xi, ki)| xi * ki).sum();
                            a * (TAU * arg + phase).cos()
                        })
                        .sum::<f64>()
                        * scale
                })
                .collect()
        }
        None => (0..space.len()).map(|_| rng.random_range(-1.0..=1.0)).collect(),
    }
}

/// Subtract the weighted mean so that Σ f w = 0.
pub fn project_mean_zero(space: &PointCloudSpace, values: &mut [f64]) {
    // a second pass removes most of the rounding left by the first
    for _ in 0..2 {
        let total: f64 = values.iter().zip(space.weights()).map(|(v, w)| v * w).sum();
        let mean = total / space.total_measure();
        for v in values.iter_mut() {
            *v -= mean;
        }
    }
}

/// `count` functions of a family. `campanato` is required for the
/// ψ-adapted family; functions with zero norm are dropped from it.
pub fn generate_functions(
    space: &PointCloudSpace,
    family: &FunctionFamily,
    count: usize,
    campanato: Option<(&CampanatoContext<'_>, f64)>,
) -> Result<Vec<DiscreteFunction>> {
    match *family {
        FunctionFamily::RandomBounded { seed } => Ok((0..count)
            .map(|i| DiscreteFunction::new(random_field(space, seed, i)))
            .collect()),
        FunctionFamily::Indicator { center, radius } => {
            let ball = Ball::checked(space, center, radius)?;
            let mut values = vec![0.0; space.len()];
            for &y in ball.members(space) {
                values[y] = 1.0;
            }
            Ok(vec![DiscreteFunction::new(values); count])
        }
        FunctionFamily::MeanZeroRandom { seed } => Ok((0..count)
            .map(|i| {
                let mut v = random_field(space, seed, i);
                project_mean_zero(space, &mut v);
                DiscreteFunction::new(v)
            })
            .collect()),
        FunctionFamily::PsiAdapted { seed } => {
            let (ctx, gamma) = campanato
                .ok_or_else(|| NhsError::Spec("psi_adapted functions need a Campanato context".into()))?;
            let mut out = Vec::with_capacity(count);
            let mut index = 0;
            // bounded so that a space where every field is constant cannot spin
            while out.len() < count && index < count.saturating_mul(4).max(8) {
                let v = random_field(space, seed, index);
                index += 1;
                let norm = ctx.evaluate(&v, gamma).norm;
                if norm > 0.0 {
                    out.push(DiscreteFunction::new(v.iter().map(|x| x / norm).collect()));
                }
            }
            Ok(out)
        }
    }
}
