//! Growth functions φ and regularity functions ψ.

use std::fmt;
use std::sync::Arc;

use crate::mmspace::DominatingFunction;

type BallFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// Outcome of the symbolic limit test for φ at r → 0⁺ and r → ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitStatus {
    Pass,
    Fail,
    Unchecked,
}

impl LimitStatus {
    pub fn label(self) -> &'static str {
        match self {
            LimitStatus::Pass => "pass",
            LimitStatus::Fail => "fail",
            LimitStatus::Unchecked => "unchecked at r->0,inf",
        }
    }
}

#[derive(Clone)]
pub enum PhiForm {
    /// `r^{-a}`.
    Power { a: f64 },
    /// `(1 + r)^{-a}`.
    Shifted { a: f64 },
    Constant(f64),
    Custom(BallFn),
}

/// Growth function φ(x, r) with its exponent δ.
#[derive(Clone)]
pub struct GrowthFunctionPhi {
    pub form: PhiForm,
    pub delta: f64,
}

impl fmt::Debug for GrowthFunctionPhi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let form = match &self.form {
            PhiForm::Power { a } => format!("r^-{a}"),
            PhiForm::Shifted { a } => format!("(1+r)^-{a}"),
            PhiForm::Constant(c) => format!("{c}"),
            PhiForm::Custom(_) => "custom".to_string(),
        };
        write!(f, "Phi({form}, delta={})", self.delta)
    }
}

impl GrowthFunctionPhi {
    pub fn power(a: f64, delta: f64) -> Self {
        Self {
            form: PhiForm::Power { a },
            delta,
        }
    }

    pub fn shifted(a: f64, delta: f64) -> Self {
        Self {
            form: PhiForm::Shifted { a },
            delta,
        }
    }

    pub fn constant(c: f64, delta: f64) -> Self {
        Self {
            form: PhiForm::Constant(c),
            delta,
        }
    }

    pub fn custom(delta: f64, eval: impl Fn(usize, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            form: PhiForm::Custom(Arc::new(eval)),
            delta,
        }
    }

    #[inline]
    pub fn eval(&self, x: usize, r: f64) -> f64 {
        match &self.form {
            PhiForm::Power { a } => r.powf(-a),
            PhiForm::Shifted { a } => (1.0 + r).powf(-a),
            PhiForm::Constant(c) => *c,
            PhiForm::Custom(f) => f(x, r),
        }
    }

    /// Symbolic check of φ → ∞ as r → 0⁺ and φ → 0 as r → ∞.
    pub fn limits(&self) -> LimitStatus {
        match &self.form {
            PhiForm::Power { a } if *a > 0.0 => LimitStatus::Pass,
            // bounded at the origin
            PhiForm::Shifted { .. } | PhiForm::Constant(_) | PhiForm::Power { .. } => {
                LimitStatus::Fail
            }
            PhiForm::Custom(_) => LimitStatus::Unchecked,
        }
    }
}

#[derive(Clone)]
pub enum PsiForm {
    One,
    /// `λ(x, r)^α`.
    LambdaPower { lambda: DominatingFunction, alpha: f64 },
    /// `r^a`.
    RadiusPower { a: f64 },
    /// `w(x)`, independent of the radius.
    PointWeight(Arc<Vec<f64>>),
    /// `φ(x, r)^{1/q − 1/p}`, the extremal choice compatible with φ.
    PhiRatio { phi: GrowthFunctionPhi, p: f64, q: f64 },
    Custom(BallFn),
}

/// Regularity function ψ(x, r).
#[derive(Clone)]
pub struct RegularityFunctionPsi {
    pub form: PsiForm,
}

impl fmt::Debug for RegularityFunctionPsi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let form = match &self.form {
            PsiForm::One => "1".to_string(),
            PsiForm::LambdaPower { alpha, .. } => format!("lambda^{alpha}"),
            PsiForm::RadiusPower { a } => format!("r^{a}"),
            PsiForm::PointWeight(_) => "w(x)".to_string(),
            PsiForm::PhiRatio { phi, p, q } => format!("{phi:?}^(1/{q}-1/{p})"),
            PsiForm::Custom(_) => "custom".to_string(),
        };
        write!(f, "Psi({form})")
    }
}

impl RegularityFunctionPsi {
    pub fn one() -> Self {
        Self { form: PsiForm::One }
    }

    pub fn lambda_power(lambda: DominatingFunction, alpha: f64) -> Self {
        Self {
            form: PsiForm::LambdaPower { lambda, alpha },
        }
    }

    pub fn radius_power(a: f64) -> Self {
        Self {
            form: PsiForm::RadiusPower { a },
        }
    }

    pub fn point_weight(w: Vec<f64>) -> Self {
        Self {
            form: PsiForm::PointWeight(Arc::new(w)),
        }
    }

    pub fn phi_ratio(phi: GrowthFunctionPhi, p: f64, q: f64) -> Self {
        Self {
            form: PsiForm::PhiRatio { phi, p, q },
        }
    }

    pub fn custom(eval: impl Fn(usize, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            form: PsiForm::Custom(Arc::new(eval)),
        }
    }

    #[inline]
    pub fn eval(&self, x: usize, r: f64) -> f64 {
        match &self.form {
            PsiForm::One => 1.0,
            PsiForm::LambdaPower { lambda, alpha } => lambda.eval(x, r).powf(*alpha),
            PsiForm::RadiusPower { a } => r.powf(*a),
            PsiForm::PointWeight(w) => w[x],
            PsiForm::PhiRatio { phi, p, q } => phi.eval(x, r).powf(1.0 / q - 1.0 / p),
            PsiForm::Custom(f) => f(x, r),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self.form, PsiForm::One)
    }
}
