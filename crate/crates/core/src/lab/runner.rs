//! Experiment orchestration: one row per configured check.

use std::cell::OnceCell;
use std::time::Instant;

use serde_json::{json, Value};

use super::config::ExperimentConfig;
use super::functions::{generate_functions, random_field, FunctionFamily};
use super::generators::{chain_fixture, generate_space};
use super::report::{ExperimentReport, ReportRow, Status};
use crate::error::{NhsError, Result};
use crate::geometry::{
    check_chain_lemma, check_doubling_coefficient_bound, check_k_properties, validate_weak_doubling_mu, Ball,
    BallFamily,
};
use crate::mmspace::{
    validate_lambda_comparability, validate_upper_doubling, validate_weak_reverse_doubling, DominatingFunction,
    GeometryProfile, PointCloudSpace, DEFAULT_SLACK,
};
use crate::operators::{
    check_maximal_morrey_pointwise, check_pointwise_domination, dini_integral, doubling_maximal_all,
    marcinkiewicz_all, marcinkiewicz_commutator_all, maximal_p_tau_all, maximal_psi_p_tau_all, t_lambda_all,
    validate_kernel, DiniValue, EstimateContext, KernelSpec, OperatorParams, SharpContext,
};
use crate::report::CheckReport;
use crate::spaces::{
    campanato_norm, check_mean_jump_bounds, equivalence_experiment, jn_distribution, morrey_norm_in,
    p_oscillation_band, p_oscillation_norm, validate_phi_gdec, validate_psi, CampanatoContext, CampanatoNormReport,
    DiscreteFunction, EquivalenceParams, EquivalenceReport, GrowthFunctionPhi, JnReport, RatioBand,
    RegularityFunctionPsi,
};

/// Functions used by the John–Nirenberg check.
pub const JN_FUNCTIONS: usize = 20;
/// Atoms and chains of the chain-lemma fixture.
pub const CHAIN_LEVELS: usize = 40;
pub const CHAIN_COUNT: usize = 200;
/// Tolerance of the exact identity suite, relative to the function scale.
pub const IDENTITY_TOL: f64 = 1e-12;

// seed offsets for independent families drawn from one config seed
const MEAN_ZERO_STREAM: u64 = 0x6d65_616e;
const PSI_STREAM: u64 = 0x7073_6921;
const SYMBOL_STREAM: u64 = 0x7379_6d62;

/// Everything derived from a config before any check runs.
pub struct Lab {
    pub config: ExperimentConfig,
    pub space: PointCloudSpace,
    pub lambda: DominatingFunction,
    pub lambda_report: CheckReport,
    pub profile: GeometryProfile,
    pub family: BallFamily,
    pub phi: GrowthFunctionPhi,
    pub psi: RegularityFunctionPsi,
    pub operator_psi: RegularityFunctionPsi,
    pub functions: Vec<DiscreteFunction>,
    pub kernel: KernelSpec,
    pub generator: String,
}

impl Lab {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let space = generate_space(&config.generator, config.max_points)?;
        let generator = config.generator.label();
        Self::with_space(config, space, generator, None)
    }

    /// Lab over an externally supplied space; `functions` replaces the
    /// generated random family when given.
    pub fn with_space(
        config: ExperimentConfig,
        space: PointCloudSpace,
        generator: String,
        functions: Option<Vec<DiscreteFunction>>,
    ) -> Result<Self> {
        config.params.validate().map_err(|e| NhsError::Spec(e.to_string()))?;
        if space.len() > config.max_points {
            return Err(NhsError::Spec(format!(
                "space has {} points, above max_points = {}",
                space.len(),
                config.max_points
            )));
        }
        let mut lambda = config.lambda.resolve(&space)?;
        let lambda_report = validate_upper_doubling(&space, &mut lambda, DEFAULT_SLACK);
        let profile = GeometryProfile::from_space(&space, &lambda);
        let family = BallFamily::new(&space);
        let params = config.params;
        let phi = config.phi.build(params.delta);
        let psi = config.psi.build(&lambda, &phi, &params);
        let operator_psi = config.operator_psi.build(&lambda, &phi, &params);
        let functions = match functions {
            Some(functions) => {
                for f in &functions {
                    f.check_len(&space)?;
                }
                functions
            }
            None => generate_functions(
                &space,
                &FunctionFamily::RandomBounded { seed: config.seed },
                config.function_count,
                None,
            )?,
        };
        let kernel = KernelSpec::build(
            &space,
            &lambda,
            params.l,
            config.kernel.theta()?,
            config.kernel.form(config.seed),
        )?;
        Ok(Self {
            config,
            space,
            lambda,
            lambda_report,
            profile,
            family,
            phi,
            psi,
            operator_psi,
            functions,
            kernel,
            generator,
        })
    }

    fn row(&self, check: &str, exact: bool, pass: bool, value: f64) -> ReportRow {
        ReportRow {
            check: check.to_string(),
            n: self.space.len(),
            generator: self.generator.clone(),
            value,
            lower: None,
            upper: None,
            witness: Value::Null,
            status: if pass { Status::Pass } else { Status::Fail },
            exact,
            message: None,
        }
    }

    fn report_row(&self, check: &str, exact: bool, report: &CheckReport) -> ReportRow {
        let mut row = self.row(check, exact, report.pass, report.value);
        row.witness = report.worst_witness.clone();
        row
    }

    fn error_row(&self, check: &str, error: &NhsError) -> ReportRow {
        let mut row = self.row(check, false, false, f64::NAN);
        row.message = Some(error.to_string());
        row
    }
}

fn band_row(mut row: ReportRow, band: &RatioBand) -> ReportRow {
    if band.samples == 0 {
        row.status = Status::Skip;
        row.value = f64::NAN;
        return row;
    }
    row.value = band.ratio_max;
    row.lower = Some(band.ratio_min);
    row.upper = Some(band.ratio_max);
    row.witness = json!({ "function": band.witness, "samples": band.samples });
    row
}

fn detail(report: &CheckReport, key: &str) -> f64 {
    report
        .details
        .get(key)
        .and_then(crate::report::float_repr::from_value)
        .unwrap_or(f64::NAN)
}

/// (Σ |f|^p w)^{1/p}.
pub fn lp_norm(space: &PointCloudSpace, values: &[f64], p: f64) -> f64 {
    values
        .iter()
        .zip(space.weights())
        .map(|(v, w)| v.abs().powf(p) * w)
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Relative deviation |a − b| / max(|b|, scale).
fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / b.abs().max(scale)
}

fn max_rel(a: &[f64], b: &[f64], scale: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| rel(*x, *y, scale)).fold(0.0, f64::max)
}

/// Lazily built function-independent contexts shared between checks.
pub struct Session<'a> {
    lab: &'a Lab,
    campanato: OnceCell<CampanatoContext<'a>>,
    norms: OnceCell<Vec<CampanatoNormReport>>,
    k_report: OnceCell<CheckReport>,
    jumps: OnceCell<std::result::Result<Vec<CheckReport>, String>>,
    equivalence: OnceCell<std::result::Result<EquivalenceReport, String>>,
    sharp: OnceCell<SharpContext<'a>>,
    estimate: OnceCell<std::result::Result<EstimateContext<'a>, String>>,
    symbol: OnceCell<DiscreteFunction>,
}

fn lift<T>(cached: &std::result::Result<T, String>) -> Result<&T> {
    cached.as_ref().map_err(|m| NhsError::InvalidParams(m.clone()))
}

impl<'a> Session<'a> {
    pub fn new(lab: &'a Lab) -> Self {
        Self {
            lab,
            campanato: OnceCell::new(),
            norms: OnceCell::new(),
            k_report: OnceCell::new(),
            jumps: OnceCell::new(),
            equivalence: OnceCell::new(),
            sharp: OnceCell::new(),
            estimate: OnceCell::new(),
            symbol: OnceCell::new(),
        }
    }

    fn config(&self) -> &ExperimentConfig {
        &self.lab.config
    }

    pub fn campanato(&self) -> &CampanatoContext<'a> {
        self.campanato.get_or_init(|| {
            let lab = self.lab;
            CampanatoContext::new(
                &lab.space,
                &lab.family,
                &lab.lambda,
                &lab.psi,
                lab.config.params.coefficient_tau,
                lab.config.budgets.pairs,
                lab.config.seed,
            )
        })
    }

    pub fn norms(&self) -> &[CampanatoNormReport] {
        self.norms.get_or_init(|| {
            let ctx = self.campanato();
            let gamma = self.config().params.gamma;
            self.lab.functions.iter().map(|f| ctx.evaluate(&f.values, gamma)).collect()
        })
    }

    fn k_report(&self) -> &CheckReport {
        self.k_report.get_or_init(|| {
            let lab = self.lab;
            check_k_properties(
                &lab.space,
                &lab.lambda,
                &lab.profile,
                (lab.config.params.coefficient_tau, 6.0),
                lab.config.budgets.triples,
                lab.config.seed,
            )
        })
    }

    fn jumps(&self) -> Result<&Vec<CheckReport>> {
        lift(self.jumps.get_or_init(|| {
            let lab = self.lab;
            lab.functions
                .iter()
                .zip(self.norms())
                .map(|(f, n)| check_mean_jump_bounds(&lab.space, f, &lab.psi, n.norm, &[2.0, 6.0]))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| e.to_string())
        }))
    }

    fn equivalence(&self) -> Result<&EquivalenceReport> {
        lift(self.equivalence.get_or_init(|| {
            let lab = self.lab;
            equivalence_experiment(
                &lab.space,
                &lab.lambda,
                &lab.psi,
                EquivalenceParams::default(),
                &lab.functions,
                lab.config.budgets.pairs,
                lab.config.seed,
            )
            .map_err(|e| e.to_string())
        }))
    }

    pub fn sharp(&self) -> &SharpContext<'a> {
        self.sharp.get_or_init(|| {
            let lab = self.lab;
            SharpContext::new(
                &lab.space,
                &lab.family,
                &lab.lambda,
                &lab.profile,
                lab.config.budgets.sharp,
                lab.config.seed,
            )
        })
    }

    fn estimate(&self) -> Result<&EstimateContext<'a>> {
        lift(self.estimate.get_or_init(|| {
            let lab = self.lab;
            EstimateContext::new(
                &lab.space,
                &lab.family,
                &lab.lambda,
                &lab.profile,
                &lab.kernel,
                &lab.operator_psi,
                lab.config.params,
                lab.config.budgets.pairs,
                lab.config.budgets.sharp,
                lab.config.seed,
            )
            .map_err(|e| e.to_string())
        }))
    }

    /// Replace the generated commutator symbol.
    pub fn with_symbol(self, b: DiscreteFunction) -> Self {
        let _ = self.symbol.set(b);
        self
    }

    /// The commutator symbol b: a smooth field independent of the test family.
    pub fn symbol(&self) -> &DiscreteFunction {
        self.symbol
            .get_or_init(|| DiscreteFunction::new(random_field(&self.lab.space, self.config().seed ^ SYMBOL_STREAM, 0)))
    }

    fn mean_zero_functions(&self) -> Result<Vec<DiscreteFunction>> {
        generate_functions(
            &self.lab.space,
            &FunctionFamily::MeanZeroRandom {
                seed: self.config().seed ^ MEAN_ZERO_STREAM,
            },
            self.config().function_count,
            None,
        )
    }

    /// ψ-normalized functions paired with their index in the seed stream.
    pub fn jn_reports(&self) -> Result<Vec<JnReport>> {
        let lab = self.lab;
        let count = JN_FUNCTIONS.min(lab.config.function_count);
        let functions = generate_functions(
            &lab.space,
            &FunctionFamily::PsiAdapted {
                seed: lab.config.seed ^ PSI_STREAM,
            },
            count,
            Some((self.campanato(), lab.config.params.gamma)),
        )?;
        let ball = jn_ball(&lab.space);
        functions
            .iter()
            .map(|f| jn_distribution(&lab.space, f, &lab.psi, ball, lab.config.params.coefficient_tau, None))
            .collect()
    }

    /// Rows for `checks` in order, wrapped with the lab's config.
    pub fn report(&self, checks: &[String], started: Instant) -> ExperimentReport {
        let rows = checks.iter().map(|c| self.run(c)).collect();
        ExperimentReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: self.lab.config.clone(),
            runtime_seconds: started.elapsed().as_secs_f64(),
            rows,
        }
    }

    pub fn run(&self, check: &str) -> ReportRow {
        match self.dispatch(check) {
            Ok(row) => row,
            Err(e) => self.lab.error_row(check, &e),
        }
    }

    fn dispatch(&self, check: &str) -> Result<ReportRow> {
        let lab = self.lab;
        let space = &lab.space;
        let params = lab.config.params;
        let seed = lab.config.seed;
        let budgets = lab.config.budgets;
        Ok(match check {
            "metric" => lab.row(check, true, true, space.len() as f64),
            "geometric_doubling" => {
                let mut row = lab.row(check, false, true, lab.profile.doubling_count as f64);
                row.witness = json!({ "n0": lab.profile.n0, "nu": lab.profile.nu, "beta6": lab.profile.beta(6.0) });
                row
            }
            "upper_doubling" => lab.report_row(check, true, &lab.lambda_report),
            "lambda_comparability" => {
                lab.report_row(check, true, &validate_lambda_comparability(space, &lab.lambda, DEFAULT_SLACK))
            }
            "weak_reverse_doubling" => lab.report_row(
                check,
                false,
                &validate_weak_reverse_doubling(&lab.lambda, space, params.sigma, &[2.0, 4.0, 8.0]),
            ),
            "k_properties" => lab.report_row(check, true, self.k_report()),
            "k_quasi_additivity" => {
                let r = self.k_report();
                lab.row(check, false, true, detail(r, "quasi_additivity"))
            }
            "k_tau_band" => {
                let r = self.k_report();
                let mut row = lab.row(check, false, true, detail(r, "tau_band_max"));
                row.lower = Some(detail(r, "tau_band_min"));
                row.upper = Some(detail(r, "tau_band_max"));
                row
            }
            "chain_lemma" => {
                let fixture = chain_fixture(CHAIN_LEVELS, CHAIN_COUNT, seed)?;
                let r = check_chain_lemma(&fixture.space, &fixture.lambda, fixture.tau, &fixture.chains);
                let qualifying = r.details.get("qualifying").and_then(Value::as_u64).unwrap_or(0);
                let mut row = lab.report_row(check, true, &r);
                row.status = if r.pass && qualifying as usize == CHAIN_COUNT {
                    Status::Pass
                } else {
                    Status::Fail
                };
                // the fixture is independent of the configured space
                row.n = fixture.space.len();
                row.generator = "chain_fixture".to_string();
                row
            }
            "doubling_coefficient_bound" => {
                lab.report_row(check, false, &check_doubling_coefficient_bound(space, &lab.lambda, &lab.profile, 6.0))
            }
            "weak_doubling_mu" => {
                lab.report_row(check, false, &validate_weak_doubling_mu(space, &lab.profile, params.coefficient_tau))
            }
            "phi_gdec" => lab.report_row(
                check,
                false,
                &validate_phi_gdec(space, &lab.phi, &[params.eta, params.tau], budgets.pairs, seed),
            ),
            "psi_validation" => lab.report_row(check, false, &validate_psi(space, &lab.psi)),
            "constant_function" => self.constant_suite()?,
            "homogeneity" => self.homogeneity_suite()?,
            "psi_one_reduction" => {
                let mut worst = 0.0f64;
                for f in &lab.functions {
                    let a = maximal_p_tau_all(space, &lab.family, &f.values, params.p, params.tau)?;
                    let b = maximal_psi_p_tau_all(
                        space,
                        &lab.family,
                        &RegularityFunctionPsi::one(),
                        &f.values,
                        params.p,
                        params.tau,
                    )?;
                    worst = worst.max(max_rel(&b, &a, f64::MIN_POSITIVE));
                }
                lab.row(check, true, worst == 0.0, worst)
            }
            "campanato_norms" => {
                let mut band = RatioBand::new("campanato_norm");
                for (i, n) in self.norms().iter().enumerate() {
                    if n.norm > 0.0 {
                        band.offer(n.norm, i);
                    }
                }
                band_row(lab.row(check, false, true, 0.0), &band)
            }
            "mean_jump_lemma" => {
                let mut best = 0.0f64;
                let mut witness = Value::Null;
                for (i, r) in self.jumps()?.iter().enumerate() {
                    if r.value > best {
                        best = r.value;
                        witness = json!({ "function": i, "ball": r.worst_witness });
                    }
                }
                let mut row = lab.row(check, false, true, best);
                row.witness = witness;
                row
            }
            "comparable_balls" => {
                let mut best = 0.0f64;
                let mut witness = Value::Null;
                for (i, r) in self.jumps()?.iter().enumerate() {
                    let v = detail(r, "comparable");
                    if v > best {
                        best = v;
                        witness = json!({ "function": i, "pair": r.details.get("comparable_witness") });
                    }
                }
                let mut row = lab.row(check, false, true, best);
                row.witness = witness;
                row
            }
            "equivalence_tau_gamma1" | "equivalence_tau_gamma2" | "equivalence_gamma_tau1"
            | "equivalence_gamma_tau2" => {
                let report = self.equivalence()?;
                let index = match check {
                    "equivalence_tau_gamma1" => 0,
                    "equivalence_tau_gamma2" => 1,
                    "equivalence_gamma_tau1" => 2,
                    _ => 3,
                };
                band_row(lab.row(check, true, report.term_monotone, 0.0), &report.bands[index])
            }
            "p_oscillation_p2" | "p_oscillation_p4" => {
                let p = if check == "p_oscillation_p2" { 2.0 } else { 4.0 };
                let band = p_oscillation_band(
                    space,
                    &lab.lambda,
                    &lab.psi,
                    p,
                    params.coefficient_tau,
                    &lab.functions,
                    budgets.pairs,
                    seed,
                )?;
                band_row(lab.row(check, false, true, 0.0), &band)
            }
            "john_nirenberg" => {
                let reports = self.jn_reports()?;
                let mut coverage = f64::INFINITY;
                let mut band = RatioBand::new("jn_rate");
                for (i, r) in reports.iter().enumerate() {
                    if let Some(rate) = r.rate {
                        coverage = coverage.min(r.envelope_coverage(rate));
                        band.offer(rate, i);
                    }
                }
                let mut row = band_row(lab.row(check, false, coverage >= 0.95, 0.0), &band);
                if band.samples > 0 {
                    row.value = coverage;
                }
                row
            }
            "dini" => match dini_integral(&lab.kernel.theta, 1e-10)? {
                DiniValue::Finite(v) => lab.row(check, false, true, v),
                DiniValue::Divergent => lab.row(check, false, false, f64::INFINITY),
            },
            "kernel" => lab.report_row(check, false, &validate_kernel(space, &lab.lambda, &lab.kernel)),
            "pointwise_domination" => {
                let mut worst = 0.0f64;
                let mut witness = Value::Null;
                let mut pass = true;
                for (i, f) in lab.functions.iter().enumerate() {
                    let r = check_pointwise_domination(space, &lab.lambda, &lab.kernel, f, &params)?;
                    pass &= r.pass;
                    if r.value > worst {
                        worst = r.value;
                        witness = json!({ "function": i, "point": r.worst_witness });
                    }
                }
                let mut row = lab.row(check, true, pass, worst);
                row.witness = witness;
                row
            }
            "maximal_lp" => self.ratio_band(check, &lab.functions, |f| {
                let m = maximal_p_tau_all(space, &lab.family, f, params.p, 5.0)?;
                Ok(lp_norm(space, &m, params.p) / lp_norm(space, f, params.p))
            })?,
            "doubling_maximal_lp" => self.ratio_band(check, &lab.functions, |f| {
                let m = doubling_maximal_all(space, &lab.family, &lab.profile, f);
                Ok(lp_norm(space, &m, params.p) / lp_norm(space, f, params.p))
            })?,
            "sharp_lp" => {
                let functions = self.mean_zero_functions()?;
                let sharp = self.sharp();
                self.ratio_band(check, &functions, |f| {
                    let n = doubling_maximal_all(space, &lab.family, &lab.profile, f);
                    let s = sharp.evaluate(f);
                    Ok(lp_norm(space, &n, params.p) / lp_norm(space, &s, params.p))
                })?
            }
            "t_lambda_morrey" => self.ratio_band(check, &lab.functions, |f| {
                let t = t_lambda_all(space, &lab.lambda, f);
                Ok(self.morrey(&t, params.p) / self.morrey(f, params.p))
            })?,
            "marcinkiewicz_morrey" => self.ratio_band(check, &lab.functions, |f| {
                let m = marcinkiewicz_all(space, &lab.kernel, f, &params)?;
                Ok(self.morrey(&m, params.p) / self.morrey(f, params.p))
            })?,
            "commutator_morrey" => {
                let b = self.symbol();
                let b_norm = self.estimate()?.campanato.evaluate(&b.values, params.gamma).norm;
                if b_norm == 0.0 {
                    return Err(NhsError::ZeroNormB);
                }
                self.ratio_band(check, &lab.functions, |f| {
                    let m = marcinkiewicz_commutator_all(space, &lab.kernel, &b.values, f, &params)?;
                    Ok(self.morrey(&m, params.q) / (b_norm * self.morrey(f, params.p)))
                })?
            }
            "sharp_estimate" => {
                let ctx = self.estimate()?;
                let b = self.symbol();
                let mut band = RatioBand::new(check);
                let mut witness = Value::Null;
                for (i, f) in lab.functions.iter().enumerate() {
                    let r = ctx.sharp_estimate(b, f)?;
                    if band.samples == 0 || r.value > band.ratio_max {
                        witness = json!({ "function": i, "point": r.worst_witness });
                    }
                    band.offer(r.value, i);
                }
                let mut row = band_row(lab.row(check, false, true, 0.0), &band);
                row.witness = witness;
                row
            }
            "morrey_pointwise" => self.morrey_pointwise()?,
            other => return Err(NhsError::Spec(format!("unknown check '{other}'"))),
        })
    }

    fn morrey(&self, values: &[f64], p: f64) -> f64 {
        let lab = self.lab;
        morrey_norm_in(&lab.space, &lab.family, values, p, &lab.phi, lab.config.params.eta).value
    }

    /// Band of a per-function ratio; functions with a 0/0 ratio are skipped.
    fn ratio_band(
        &self,
        check: &str,
        functions: &[DiscreteFunction],
        ratio: impl Fn(&[f64]) -> Result<f64>,
    ) -> Result<ReportRow> {
        let mut band = RatioBand::new(check);
        for (i, f) in functions.iter().enumerate() {
            band.offer(ratio(&f.values)?, i);
        }
        Ok(band_row(self.lab.row(check, false, true, 0.0), &band))
    }

    /// Calibrate the implicit constant on one half of the family, verify on
    /// the other.
    fn morrey_pointwise(&self) -> Result<ReportRow> {
        let lab = self.lab;
        let params = OperatorParams {
            q: lab.config.pointwise_q,
            ..lab.config.params
        };
        let psi = lab.config.operator_psi.build(&lab.lambda, &lab.phi, &params);
        let split = lab.functions.len().div_ceil(2);
        let mut calibrated = 0.0f64;
        let mut verified = 0.0f64;
        let mut pass = true;
        let mut witness = Value::Null;
        for (i, f) in lab.functions.iter().enumerate() {
            let norm = morrey_norm_in(&lab.space, &lab.family, &f.values, params.p, &lab.phi, params.tau).value;
            if norm == 0.0 {
                continue;
            }
            let g = f.affine(1.0 / norm, 0.0);
            let r = check_maximal_morrey_pointwise(&lab.space, &lab.family, &psi, &lab.phi, &g, &params)?;
            pass &= r.pass;
            if i < split {
                if r.value > calibrated {
                    calibrated = r.value;
                    witness = json!({ "function": i, "point": r.worst_witness, "c10": r.details.get("c10") });
                }
            } else {
                verified = verified.max(r.value);
            }
        }
        let mut row = lab.row("morrey_pointwise", true, pass, calibrated);
        row.lower = Some(verified);
        row.upper = Some(calibrated);
        row.witness = witness;
        Ok(row)
    }

    /// Exact identities for constant inputs.
    fn constant_suite(&self) -> Result<ReportRow> {
        let lab = self.lab;
        let space = &lab.space;
        let params = lab.config.params;
        let c = 1.7;
        let constant = DiscreteFunction::constant(space.len(), c);
        let mut worst = 0.0f64;
        let mut witness = Value::Null;
        let mut offer = |what: &str, v: f64| {
            if v > worst || witness.is_null() {
                worst = worst.max(v);
                witness = json!(what);
            }
        };
        for tau in [params.coefficient_tau, 6.0] {
            let r = campanato_norm(
                space,
                &lab.lambda,
                &constant,
                &lab.psi,
                tau,
                params.gamma,
                lab.config.budgets.pairs,
                lab.config.seed,
            )?;
            offer("campanato_norm", r.norm / c);
        }
        let osc = p_oscillation_norm(space, &constant, &lab.psi, params.p, params.coefficient_tau)?;
        offer("p_oscillation_norm", osc.value / c);
        let sharp = self.sharp().evaluate(&constant.values);
        offer("sharp_maximal", sharp.iter().fold(0.0, |a: f64, &b| a.max(b)) / c);
        if let Some(f) = lab.functions.first() {
            let comm = marcinkiewicz_commutator_all(space, &lab.kernel, &constant.values, &f.values, &params)?;
            offer("commutator", comm.iter().fold(0.0, |a: f64, &b| a.max(b)));
        }
        Ok({
            let mut row = lab.row("constant_function", true, worst <= IDENTITY_TOL, worst);
            row.witness = witness;
            row
        })
    }

    /// Affine and homogeneity laws of every norm and operator, plus
    /// monotonicity in |f| of the maximal operators.
    fn homogeneity_suite(&self) -> Result<ReportRow> {
        let lab = self.lab;
        let space = &lab.space;
        let params = lab.config.params;
        let Some(f) = lab.functions.first() else {
            return Ok(lab.row("homogeneity", true, true, 0.0));
        };
        let g = lab.functions.get(1).unwrap_or(f);
        let (c, d) = (-2.5, 0.75);
        let scaled = f.affine(c, 0.0);
        let shifted = f.affine(c, d);
        let mut worst = 0.0f64;
        let mut witness = Value::Null;
        let mut offer = |what: &str, v: f64| {
            if v > worst {
                worst = v;
                witness = json!(what);
            }
        };

        let ctx = self.campanato();
        let gamma = params.gamma;
        let base = ctx.evaluate(&f.values, gamma).norm;
        offer("campanato_norm", rel(ctx.evaluate(&shifted.values, gamma).norm, c.abs() * base, base));

        let po = |h: &DiscreteFunction| p_oscillation_norm(space, h, &lab.psi, params.p, params.coefficient_tau);
        let base = po(f)?.value;
        offer("p_oscillation_norm", rel(po(&shifted)?.value, c.abs() * base, base));

        let base = self.morrey(&f.values, params.p);
        offer("morrey_norm", rel(self.morrey(&scaled.values, params.p), c.abs() * base, base));

        let scale_vec = |v: &[f64]| v.iter().map(|x| c.abs() * x).collect::<Vec<f64>>();
        let vec_scale = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));

        let m = maximal_p_tau_all(space, &lab.family, &f.values, params.p, params.tau)?;
        let ms = maximal_p_tau_all(space, &lab.family, &scaled.values, params.p, params.tau)?;
        offer("maximal_p_tau", max_rel(&ms, &scale_vec(&m), c.abs() * vec_scale(&m)));

        let m = maximal_psi_p_tau_all(space, &lab.family, &lab.operator_psi, &f.values, params.p, params.tau)?;
        let ms = maximal_psi_p_tau_all(space, &lab.family, &lab.operator_psi, &scaled.values, params.p, params.tau)?;
        offer("maximal_psi_p_tau", max_rel(&ms, &scale_vec(&m), c.abs() * vec_scale(&m)));

        let m = doubling_maximal_all(space, &lab.family, &lab.profile, &f.values);
        let ms = doubling_maximal_all(space, &lab.family, &lab.profile, &scaled.values);
        offer("doubling_maximal", max_rel(&ms, &scale_vec(&m), c.abs() * vec_scale(&m)));

        let sharp = self.sharp();
        let m = sharp.evaluate(&f.values);
        let ms = sharp.evaluate(&shifted.values);
        offer("sharp_maximal", max_rel(&ms, &scale_vec(&m), c.abs() * vec_scale(&m)));

        let m = marcinkiewicz_all(space, &lab.kernel, &f.values, &params)?;
        let ms = marcinkiewicz_all(space, &lab.kernel, &scaled.values, &params)?;
        offer("marcinkiewicz", max_rel(&ms, &scale_vec(&m), c.abs() * vec_scale(&m)));

        let b = self.symbol();
        let m = marcinkiewicz_commutator_all(space, &lab.kernel, &b.values, &f.values, &params)?;
        let ms = marcinkiewicz_commutator_all(space, &lab.kernel, &b.values, &scaled.values, &params)?;
        offer("commutator", max_rel(&ms, &scale_vec(&m), c.abs() * vec_scale(&m)));

        // T_λ is linear
        let (a, e) = (0.5, -3.0);
        let combo: Vec<f64> = f.values.iter().zip(&g.values).map(|(x, y)| a * x + e * y).collect();
        let tf = t_lambda_all(space, &lab.lambda, &f.values);
        let tg = t_lambda_all(space, &lab.lambda, &g.values);
        let expected: Vec<f64> = tf.iter().zip(&tg).map(|(x, y)| a * x + e * y).collect();
        let t_scale = tf.iter().chain(&tg).fold(0.0f64, |m, v| m.max(v.abs()));
        offer("t_lambda", max_rel(&t_lambda_all(space, &lab.lambda, &combo), &expected, t_scale));

        // |f| ≤ |f| + |g| pointwise, so every maximal operator must not decrease
        let bigger: Vec<f64> = f.values.iter().zip(&g.values).map(|(x, y)| x.abs() + y.abs()).collect();
        let mut monotone = true;
        let pairs = [
            (
                maximal_p_tau_all(space, &lab.family, &f.values, params.p, params.tau)?,
                maximal_p_tau_all(space, &lab.family, &bigger, params.p, params.tau)?,
            ),
            (
                maximal_psi_p_tau_all(space, &lab.family, &lab.operator_psi, &f.values, params.p, params.tau)?,
                maximal_psi_p_tau_all(space, &lab.family, &lab.operator_psi, &bigger, params.p, params.tau)?,
            ),
            (
                doubling_maximal_all(space, &lab.family, &lab.profile, &f.values),
                doubling_maximal_all(space, &lab.family, &lab.profile, &bigger),
            ),
        ];
        for (small, large) in &pairs {
            monotone &= small.iter().zip(large).all(|(s, l)| s <= l);
        }
        if !monotone {
            offer("monotone", f64::INFINITY);
        }
        let mut row = lab.row("homogeneity", true, worst <= IDENTITY_TOL, worst);
        row.witness = witness;
        Ok(row)
    }
}

/// Ball used by the John–Nirenberg check: centered at the first point with
/// half its eccentricity as radius.
pub fn jn_ball(space: &PointCloudSpace) -> Ball {
    let ecc = space.eccentricity(0);
    Ball::new(0, if ecc > 0.0 { ecc / 2.0 } else { 1.0 })
}

pub fn run_experiments(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let lab = Lab::new(config.clone())?;
    let session = Session::new(&lab);
    Ok(session.report(&config.checks, start))
}
