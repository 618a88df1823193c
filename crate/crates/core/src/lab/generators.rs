//! Space generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NhsError, Result};
use crate::geometry::ChainSpec;
use crate::mmspace::{build_space, DominatingFunction, PointCloudSpace, SpaceData};

/// Largest space a config may request unless it raises the cap.
pub const DEFAULT_MAX_POINTS: usize = 512;

/// Atom weights of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    /// n^{-d} per atom.
    Lebesgue,
    /// n^{-d} (|x| + 1/n)^a.
    Power { a: f64 },
    /// Log-uniform in [1e-3, 1].
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    /// n points per axis on [0,1]^d.
    Grid {
        d: usize,
        n: usize,
        #[serde(default = "lebesgue")]
        weights: WeightSpec,
    },
    /// Points 0 and 1 with unit weights.
    TwoPoint,
    Atoms { atoms: Vec<Atom> },
}

fn lebesgue() -> WeightSpec {
    WeightSpec::Lebesgue
}

impl SpaceSpec {
    pub fn grid(d: usize, n: usize) -> Self {
        SpaceSpec::Grid {
            d,
            n,
            weights: WeightSpec::Lebesgue,
        }
    }

    /// Total number of points the generator produces.
    pub fn size(&self) -> usize {
        match self {
            SpaceSpec::Grid { d, n, .. } => n.checked_pow(*d as u32).unwrap_or(usize::MAX),
            SpaceSpec::TwoPoint => 2,
            SpaceSpec::Atoms { atoms } => atoms.len(),
        }
    }

    /// Same generator at a different resolution; identity for fixed spaces.
    pub fn with_resolution(&self, n: usize) -> Self {
        match self {
            SpaceSpec::Grid { d, weights, .. } => SpaceSpec::Grid {
                d: *d,
                n,
                weights: weights.clone(),
            },
            other => other.clone(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SpaceSpec::Grid { d, n, weights } => {
                let w = match weights {
                    WeightSpec::Lebesgue => "lebesgue".to_string(),
                    WeightSpec::Power { a } => format!("power({a})"),
                    WeightSpec::Random { seed } => format!("random({seed})"),
                };
                format!("grid({d},{n},{w})")
            }
            SpaceSpec::TwoPoint => "two_point".to_string(),
            SpaceSpec::Atoms { atoms } => format!("atoms({})", atoms.len()),
        }
    }
}

/// Lattice coordinates of grid(d, n) in row-major order.
pub fn grid_points(d: usize, n: usize) -> Vec<Vec<f64>> {
    let total = n.pow(d as u32);
    let step = if n > 1 { 1.0 / (n - 1) as f64 } else { 0.0 };
    (0..total)
        .map(|mut index| {
            let mut coords = vec![0.0; d];
            for slot in coords.iter_mut().rev() {
                *slot = (index % n) as f64 * step;
                index /= n;
            }
            coords
        })
        .collect()
}

/// Weight of a grid atom at `x` under the power profile.
pub fn power_weight(x: &[f64], n: usize, d: usize, a: f64) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    (norm + 1.0 / n as f64).powf(a) / (n as f64).powi(d as i32)
}

pub fn generate_space(spec: &SpaceSpec, max_points: usize) -> Result<PointCloudSpace> {
    let size = spec.size();
    if size == 0 {
        return Err(NhsError::Spec("space must have at least one point".into()));
    }
    if size > max_points {
        return Err(NhsError::Spec(format!(
            "space has {size} points, above the configured maximum {max_points}"
        )));
    }
    match spec {
        SpaceSpec::Grid { d, n, weights } => {
            if *d == 0 {
                return Err(NhsError::Spec("grid dimension must be at least 1".into()));
            }
            let points = grid_points(*d, *n);
            let base = 1.0 / (*n as f64).powi(*d as i32);
            let w: Vec<f64> = match weights {
                WeightSpec::Lebesgue => vec![base; points.len()],
                WeightSpec::Power { a } => {
                    if !a.is_finite() {
                        return Err(NhsError::Spec(format!("power weight exponent {a} is not finite")));
                    }
                    points.iter().map(|x| power_weight(x, *n, *d, *a)).collect()
                }
                WeightSpec::Random { seed } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    let (lo, hi) = (1e-3f64.ln(), 0.0);
                    points.iter().map(|_| rng.random_range(lo..=hi).exp()).collect()
                }
            };
            build_space(SpaceData::Points(points), w)
        }
        SpaceSpec::TwoPoint => build_space(SpaceData::Points(vec![vec![0.0], vec![1.0]]), vec![1.0, 1.0]),
        SpaceSpec::Atoms { atoms } => {
            let points = atoms.iter().map(|a| a.position.clone()).collect();
            let w = atoms.iter().map(|a| a.weight).collect();
            build_space(SpaceData::Points(points), w)
        }
    }
}

/// A space with geometrically growing atoms at 0 and τ^j, a λ tight at the
/// radii τ^j around 0, and concentric chains at 0 whose links all satisfy
/// the chain hypothesis.
pub struct ChainFixture {
    pub space: PointCloudSpace,
    pub lambda: DominatingFunction,
    pub tau: f64,
    pub chains: Vec<ChainSpec>,
}

/// `levels` atoms at τ^0..τ^{levels-1} plus the origin; μ(B(0, τ^j)) =
/// u_j τ^{κ(j+1)} with u_j drawn from [0.85, 1]; λ(x, r) = (τ r)^κ.
pub fn chain_fixture(levels: usize, count: usize, seed: u64) -> Result<ChainFixture> {
    let (tau, kappa) = (2.0f64, 0.25f64);
    if levels < 4 {
        return Err(NhsError::Spec("chain fixture needs at least 4 levels".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![vec![0.0]];
    let mut weights = vec![rng.random_range(0.85..=1.0)];
    let mut mass = weights[0];
    for j in 0..levels {
        let target = rng.random_range(0.85..=1.0) * tau.powf(kappa * (j as f64 + 1.0));
        points.push(vec![tau.powi(j as i32)]);
        weights.push(target - mass);
        mass = target;
    }
    let space = build_space(SpaceData::Points(points), weights)?;
    let lambda = DominatingFunction::custom(tau.powf(kappa), move |_, r| (tau * r).powf(kappa));

    let top = levels as i32 - 1;
    let mut chains = Vec::with_capacity(count);
    while chains.len() < count {
        // links of at least two levels keep every link coefficient above the threshold
        let mut e = rng.random_range(0..top - 3);
        let mut exponents = vec![e];
        loop {
            let step = rng.random_range(2..=4);
            if e + step > top {
                break;
            }
            e += step;
            exponents.push(e);
            if exponents.len() >= 2 && rng.random_bool(0.25) {
                break;
            }
        }
        if exponents.len() < 2 {
            continue;
        }
        chains.push(ChainSpec {
            center: 0,
            base_radius: 1.0,
            exponents,
        });
    }
    Ok(ChainFixture {
        space,
        lambda,
        tau,
        chains,
    })
}
