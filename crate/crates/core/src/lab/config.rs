//! Experiment configuration.

use serde::{Deserialize, Serialize};

use super::generators::{SpaceSpec, DEFAULT_MAX_POINTS};
use crate::error::{NhsError, Result};
use crate::mmspace::{DominatingFunction, LambdaSpec};
use crate::operators::{KernelForm, OperatorParams, Theta};
use crate::spaces::{GrowthFunctionPhi, RegularityFunctionPsi};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiSpec {
    Power { a: f64 },
    Shifted { a: f64 },
    Constant { c: f64 },
}

impl PhiSpec {
    pub fn build(&self, delta: f64) -> GrowthFunctionPhi {
        match *self {
            PhiSpec::Power { a } => GrowthFunctionPhi::power(a, delta),
            PhiSpec::Shifted { a } => GrowthFunctionPhi::shifted(a, delta),
            PhiSpec::Constant { c } => GrowthFunctionPhi::constant(c, delta),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsiSpec {
    One,
    LambdaPower { alpha: f64 },
    RadiusPower { a: f64 },
    /// φ^{1/q − 1/p} with the configured φ, p and q.
    PhiRatio,
}

impl PsiSpec {
    pub fn build(&self, lambda: &DominatingFunction, phi: &GrowthFunctionPhi, params: &OperatorParams) -> RegularityFunctionPsi {
        match *self {
            PsiSpec::One => RegularityFunctionPsi::one(),
            PsiSpec::LambdaPower { alpha } => RegularityFunctionPsi::lambda_power(lambda.clone(), alpha),
            PsiSpec::RadiusPower { a } => RegularityFunctionPsi::radius_power(a),
            PsiSpec::PhiRatio => RegularityFunctionPsi::phi_ratio(phi.clone(), params.p, params.q),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaSpec {
    Power { a: f64 },
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelFormSpec {
    Canonical,
    Scaled { c: f64 },
    Perturbed { epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelConfig {
    pub form: KernelFormSpec,
    pub theta: ThetaSpec,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            form: KernelFormSpec::Canonical,
            theta: ThetaSpec::Power { a: 1.0 },
        }
    }
}

impl KernelConfig {
    pub fn theta(&self) -> Result<Theta> {
        match self.theta {
            ThetaSpec::Power { a } if a > 0.0 && a.is_finite() => Ok(Theta::Power(a)),
            ThetaSpec::Power { a } => Err(NhsError::Spec(format!("theta exponent {a} must be positive"))),
            ThetaSpec::Zero => Ok(Theta::Zero),
        }
    }

    pub fn form(&self, seed: u64) -> KernelForm {
        match self.form {
            KernelFormSpec::Canonical => KernelForm::Canonical,
            KernelFormSpec::Scaled { c } => KernelForm::Scaled(c),
            KernelFormSpec::Perturbed { epsilon } => KernelForm::Perturbed { epsilon, seed },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    /// Sampled containing pairs in Campanato regularity suprema.
    pub pairs: usize,
    /// Sampled doubling pairs per point in the sharp maximal function.
    pub sharp: usize,
    /// Sampled nested triples in coefficient checks.
    pub triples: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            pairs: crate::spaces::DEFAULT_PAIR_BUDGET,
            sharp: crate::operators::DEFAULT_SHARP_BUDGET,
            triples: crate::geometry::DEFAULT_TRIPLE_BUDGET,
        }
    }
}

/// Every check the runner knows, in the default order.
pub const ALL_CHECKS: &[&str] = &[
    "metric",
    "geometric_doubling",
    "upper_doubling",
    "lambda_comparability",
    "weak_reverse_doubling",
    "k_properties",
    "k_quasi_additivity",
    "k_tau_band",
    "chain_lemma",
    "doubling_coefficient_bound",
    "weak_doubling_mu",
    "phi_gdec",
    "psi_validation",
    "constant_function",
    "homogeneity",
    "psi_one_reduction",
    "campanato_norms",
    "mean_jump_lemma",
    "comparable_balls",
    "equivalence_tau_gamma1",
    "equivalence_tau_gamma2",
    "equivalence_gamma_tau1",
    "equivalence_gamma_tau2",
    "p_oscillation_p2",
    "p_oscillation_p4",
    "john_nirenberg",
    "dini",
    "kernel",
    "pointwise_domination",
    "maximal_lp",
    "doubling_maximal_lp",
    "sharp_lp",
    "t_lambda_morrey",
    "marcinkiewicz_morrey",
    "sharp_estimate",
    "morrey_pointwise",
    "commutator_morrey",
];

/// Rows compared across refinements, with the field compared.
pub const STABILITY_FIELDS: &[(&str, Field)] = &[
    ("k_quasi_additivity", Field::Value),
    ("k_tau_band", Field::Lower),
    ("k_tau_band", Field::Upper),
    ("doubling_coefficient_bound", Field::Value),
    ("mean_jump_lemma", Field::Value),
    ("comparable_balls", Field::Value),
    ("equivalence_tau_gamma1", Field::Lower),
    ("equivalence_tau_gamma1", Field::Upper),
    ("equivalence_tau_gamma2", Field::Lower),
    ("equivalence_tau_gamma2", Field::Upper),
    ("equivalence_gamma_tau1", Field::Lower),
    ("equivalence_gamma_tau1", Field::Upper),
    ("equivalence_gamma_tau2", Field::Lower),
    ("equivalence_gamma_tau2", Field::Upper),
    ("p_oscillation_p2", Field::Lower),
    ("p_oscillation_p2", Field::Upper),
    ("p_oscillation_p4", Field::Lower),
    ("p_oscillation_p4", Field::Upper),
    ("sharp_estimate", Field::Value),
    ("morrey_pointwise", Field::Value),
    ("maximal_lp", Field::Value),
    ("doubling_maximal_lp", Field::Value),
    ("sharp_lp", Field::Value),
    ("t_lambda_morrey", Field::Value),
    ("marcinkiewicz_morrey", Field::Value),
    ("commutator_morrey", Field::Value),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Value,
    Lower,
    Upper,
}

fn default_checks() -> Vec<String> {
    ALL_CHECKS.iter().map(|s| s.to_string()).collect()
}

fn default_count() -> usize {
    100
}

fn default_seed() -> u64 {
    7
}

fn default_max_points() -> usize {
    DEFAULT_MAX_POINTS
}

fn default_phi() -> PhiSpec {
    PhiSpec::Power { a: 0.75 }
}

fn default_operator_psi() -> PsiSpec {
    PsiSpec::PhiRatio
}

fn default_params() -> OperatorParams {
    OperatorParams::default()
}

fn default_pointwise_q() -> f64 {
    4.0
}

fn default_generator() -> SpaceSpec {
    SpaceSpec::grid(1, 64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_generator")]
    pub generator: SpaceSpec,
    #[serde(default = "default_params")]
    pub params: OperatorParams,
    #[serde(default)]
    pub lambda: LambdaSpec,
    #[serde(default = "default_phi")]
    pub phi: PhiSpec,
    /// ψ of the Campanato experiments.
    #[serde(default = "PsiSpec::one")]
    pub psi: PsiSpec,
    /// ψ of the commutator and maximal-operator experiments.
    #[serde(default = "default_operator_psi")]
    pub operator_psi: PsiSpec,
    #[serde(default)]
    pub kernel: KernelConfig,
    /// Target exponent q of the pointwise Morrey check; the other operator
    /// checks use `params.q`.
    #[serde(default = "default_pointwise_q")]
    pub pointwise_q: f64,
    /// Size of each generated function family.
    #[serde(default = "default_count")]
    pub function_count: usize,
    #[serde(default = "default_checks")]
    pub checks: Vec<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

impl PsiSpec {
    fn one() -> Self {
        PsiSpec::One
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            generator: default_generator(),
            params: default_params(),
            lambda: LambdaSpec::default(),
            phi: default_phi(),
            psi: PsiSpec::One,
            operator_psi: default_operator_psi(),
            kernel: KernelConfig::default(),
            pointwise_q: default_pointwise_q(),
            function_count: default_count(),
            checks: default_checks(),
            seed: default_seed(),
            budgets: Budgets::default(),
            max_points: default_max_points(),
            output_path: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| NhsError::Spec(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.params
            .validate()
            .map_err(|e| NhsError::Spec(e.to_string()))?;
        for check in &self.checks {
            if !ALL_CHECKS.contains(&check.as_str()) {
                return Err(NhsError::Spec(format!("unknown check '{check}'")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for check in &self.checks {
            if !seen.insert(check) {
                return Err(NhsError::Spec(format!("check '{check}' listed twice")));
            }
        }
        if self.generator.size() > self.max_points {
            return Err(NhsError::Spec(format!(
                "generator yields {} points, above max_points = {}",
                self.generator.size(),
                self.max_points
            )));
        }
        if !(self.pointwise_q >= self.params.p && self.pointwise_q.is_finite()) {
            return Err(NhsError::Spec(format!(
                "pointwise_q = {} must be finite and at least p = {}",
                self.pointwise_q, self.params.p
            )));
        }
        if self.function_count == 0 {
            return Err(NhsError::Spec("function_count must be at least 1".into()));
        }
        self.kernel.theta()?;
        Ok(())
    }
}
