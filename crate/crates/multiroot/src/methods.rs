//! One-step iteration kernels for root finding with known multiplicity,
//! generic over the number field.
//!
//! Six kernels are provided:
//! - plain Newton–Secant (third order on simple roots, first order on
//!   multiple roots),
//! - the θ-damped Newton–Secant variant that restores third order on a root
//!   of multiplicity m via θ(m) = ((m−1)/m)^(m−1),
//! - Schröder's multiplicity-scaled Newton step (second order),
//! - Osada's method (third order, uses f''),
//! - Dong's two-stage method (third order),
//! - Chun's one-parameter family (third order, uses f''; γ defaults to −1).
//!
//! Every kernel is a pure function returning a [`StepOutcome`]: the proposed
//! next iterate, the internal substep where one exists, and a status. On any
//! failure the returned `next` is the (finite) input point, never NaN or
//! infinity.

use num_bigint::BigUint;
use thiserror::Error;

use crate::numerics::MethodField;
use crate::problems::Evaluate;

/// Which iteration kernel to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodKind {
    NewtonSecant,
    ModifiedNewtonSecant,
    Schroder,
    Osada,
    Dong,
    Chun,
}

/// Sign convention for the first substep of Dong's method.
///
/// The minus convention is the one that is exact on pure monomials and is
/// the default; plus is selectable for fidelity experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DongSign {
    #[default]
    Minus,
    Plus,
}

/// Unknown method-name error for command-line parsing.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown method {0:?} (expected ns, mns, schroder, osada, dong, or chun)")]
pub struct UnknownMethod(pub String);

impl MethodKind {
    /// All kernels, in display order.
    pub const ALL: [MethodKind; 6] = [
        MethodKind::NewtonSecant,
        MethodKind::ModifiedNewtonSecant,
        MethodKind::Schroder,
        MethodKind::Osada,
        MethodKind::Dong,
        MethodKind::Chun,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::NewtonSecant => "ns",
            MethodKind::ModifiedNewtonSecant => "mns",
            MethodKind::Schroder => "schroder",
            MethodKind::Osada => "osada",
            MethodKind::Dong => "dong",
            MethodKind::Chun => "chun",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            MethodKind::NewtonSecant => "Newton-Secant (two-stage, no multiplicity damping)",
            MethodKind::ModifiedNewtonSecant => "theta-damped Newton-Secant for multiple roots",
            MethodKind::Schroder => "Schroder (multiplicity-scaled Newton)",
            MethodKind::Osada => "Osada",
            MethodKind::Dong => "Dong (two-stage)",
            MethodKind::Chun => "Chun family",
        }
    }

    /// Evaluations the kernel needs, as a display string.
    pub fn derivative_requirements(self) -> &'static str {
        if self.requires_second_derivative() {
            "f, f', f''"
        } else {
            "f, f'"
        }
    }

    pub fn requires_second_derivative(self) -> bool {
        matches!(self, MethodKind::Osada | MethodKind::Chun)
    }
}

impl std::str::FromStr for MethodKind {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ns" | "newton-secant" => Ok(MethodKind::NewtonSecant),
            "mns" | "modified-newton-secant" => Ok(MethodKind::ModifiedNewtonSecant),
            "schroder" => Ok(MethodKind::Schroder),
            "osada" => Ok(MethodKind::Osada),
            "dong" => Ok(MethodKind::Dong),
            "chun" => Ok(MethodKind::Chun),
            other => Err(UnknownMethod(other.to_owned())),
        }
    }
}

impl std::fmt::Display for MethodKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A kernel choice plus its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSpec {
    pub kind: MethodKind,
    /// Chun family parameter; −1 is the benchmark default. γ = 1 recovers
    /// Osada's method.
    pub gamma: f64,
    /// Dong substep sign convention.
    pub dong_sign: DongSign,
}

impl MethodSpec {
    pub fn new(kind: MethodKind) -> Self {
        MethodSpec {
            kind,
            gamma: -1.0,
            dong_sign: DongSign::Minus,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        assert!(gamma.is_finite(), "gamma must be finite");
        self.gamma = gamma;
        self
    }

    pub fn with_dong_sign(mut self, sign: DongSign) -> Self {
        self.dong_sign = sign;
        self
    }
}

/// How a kernel invocation ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    Ok,
    /// f' (or f'') vanished or blew up where the kernel divides by it.
    DerivativeUnderflow,
    /// An evaluation left the problem's domain.
    DomainError,
    /// A secant-like denominator cancelled below the underflow threshold.
    DenominatorUnderflow,
}

/// Result of one kernel step. `next` is always finite; on failure it is the
/// unchanged input point.
#[derive(Debug, Clone)]
pub struct StepOutcome<F> {
    pub next: F,
    pub intermediate: Option<F>,
    pub status: StepStatus,
}

impl<F> StepOutcome<F> {
    pub fn is_ok(&self) -> bool {
        self.status == StepStatus::Ok
    }
}

fn fail<F: MethodField>(x: &F, status: StepStatus) -> StepOutcome<F> {
    StepOutcome {
        next: x.clone(),
        intermediate: None,
        status,
    }
}

fn fixed_point<F: MethodField>(x: &F) -> StepOutcome<F> {
    StepOutcome {
        next: x.clone(),
        intermediate: None,
        status: StepStatus::Ok,
    }
}

/// Exact integer pair (numerator, denominator) of θ(m) = ((m−1)/m)^(m−1);
/// θ(1) is 1 by the 0^0 = 1 convention.
pub fn theta_integers(m: u32) -> (BigUint, BigUint) {
    assert!(m >= 1, "multiplicity must be positive");
    if m == 1 {
        return (BigUint::from(1u32), BigUint::from(1u32));
    }
    (
        BigUint::from(m - 1).pow(m - 1),
        BigUint::from(m).pow(m - 1),
    )
}

/// θ(m) in the target field: exact integer powers, then one division.
pub fn theta<F: MethodField>(m: u32, like: &F) -> F {
    let (num, den) = theta_integers(m);
    like.from_decimal(&num.to_string())
        .div(&like.from_decimal(&den.to_string()))
}

/// True when a denominator has cancelled so far below the magnitudes feeding
/// it that dividing by it would amplify noise: |den| <= |feed|·10^-(digits-5).
fn denominator_unusable<F: MethodField>(den: &F, feeds: &[&F]) -> bool {
    if den.is_zero() || !den.is_finite() {
        return true;
    }
    let guard = -((den.working_digits() as i64) - 5);
    feeds.iter().any(|feed| den.mag_le_scaled(feed, guard))
}

/// Shared two-stage core: `scale = None` runs the plain secant bracket
/// f/(f − f(y)); `Some(θ)` runs the damped bracket θf/(θf − f(y)). The plain
/// variant is bit-identical to the damped one at θ = 1.
fn newton_secant_core<F: MethodField, E: Evaluate<F> + ?Sized>(
    ev: &E,
    x: &F,
    scale: Option<&F>,
) -> StepOutcome<F> {
    let Some(fx) = ev.f(x) else {
        return fail(x, StepStatus::DomainError);
    };
    if fx.is_zero() {
        return fixed_point(x);
    }
    let Some(dfx) = ev.df(x) else {
        return fail(x, StepStatus::DomainError);
    };
    if dfx.is_zero() || !dfx.is_finite() {
        return fail(x, StepStatus::DerivativeUnderflow);
    }
    let u = fx.div(&dfx);
    let y = x.sub(&u);
    if !y.is_finite() {
        return fail(x, StepStatus::DerivativeUnderflow);
    }
    let Some(fy) = ev.f(&y) else {
        return fail(x, StepStatus::DomainError);
    };
    let num = match scale {
        Some(t) => t.mul(&fx),
        None => fx.clone(),
    };
    let den = num.sub(&fy);
    if denominator_unusable(&den, &[&num, &fy]) {
        return fail(x, StepStatus::DenominatorUnderflow);
    }
    let next = x.sub(&num.div(&den).mul(&u));
    if !next.is_finite() {
        return fail(x, StepStatus::DomainError);
    }
    StepOutcome {
        next,
        intermediate: Some(y),
        status: StepStatus::Ok,
    }
}

/// One plain Newton–Secant step:
/// y = x − f/f', next = x − [f/(f − f(y))]·f/f'.
pub fn step_newton_secant<F: MethodField, E: Evaluate<F> + ?Sized>(
    ev: &E,
    x: &F,
) -> StepOutcome<F> {
    newton_secant_core(ev, x, None)
}

/// One θ-damped Newton–Secant step for a root of multiplicity m:
/// y = x − f/f', next = x − [θf/(θf − f(y))]·f/f' with θ = θ(m).
pub fn step_mns<F: MethodField, E: Evaluate<F> + ?Sized>(ev: &E, x: &F) -> StepOutcome<F> {
    let t = theta(ev.multiplicity(), x);
    newton_secant_core(ev, x, Some(&t))
}

/// [`step_mns`] with a caller-cached θ — avoids recomputing the exact
/// integer powers in per-pixel loops.
pub fn step_mns_with_theta<F: MethodField, E: Evaluate<F> + ?Sized>(
    ev: &E,
    x: &F,
    theta: &F,
) -> StepOutcome<F> {
    newton_secant_core(ev, x, Some(theta))
}

/// One Schröder step: next = x − m·f/f'.
pub fn step_schroder<F: MethodField, E: Evaluate<F> + ?Sized>(ev: &E, x: &F) -> StepOutcome<F> {
    let Some(fx) = ev.f(x) else {
        return fail(x, StepStatus::DomainError);
    };
    if fx.is_zero() {
        return fixed_point(x);
    }
    let Some(dfx) = ev.df(x) else {
        return fail(x, StepStatus::DomainError);
    };
    if dfx.is_zero() || !dfx.is_finite() {
        return fail(x, StepStatus::DerivativeUnderflow);
    }
    let m = x.from_i64(ev.multiplicity() as i64);
    let next = x.sub(&m.mul(&fx.div(&dfx)));
    if !next.is_finite() {
        return fail(x, StepStatus::DomainError);
    }
    StepOutcome {
        next,
        intermediate: None,
        status: StepStatus::Ok,
    }
}

/// One Osada step: next = x − m(m+1)/2·f/f' + (m−1)²/2·f'/f''.
///
/// At m = 1 both multiplicity corrections collapse and the step is plain
/// Newton, so f'' is not consulted.
pub fn step_osada<F: MethodField, E: Evaluate<F> + ?Sized>(ev: &E, x: &F) -> StepOutcome<F> {
    let m = ev.multiplicity() as i64;
    let Some(fx) = ev.f(x) else {
        return fail(x, StepStatus::DomainError);
    };
    if fx.is_zero() {
        return fixed_point(x);
    }
    let Some(dfx) = ev.df(x) else {
        return fail(x, StepStatus::DomainError);
    };
    if dfx.is_zero() || !dfx.is_finite() {
        return fail(x, StepStatus::DerivativeUnderflow);
    }
    // m(m+1)/2 is integral; (m−1)²/2 halves exactly in binary.
    let slope_coeff = x.from_i64(m * (m + 1) / 2);
    let mut next = x.sub(&slope_coeff.mul(&fx.div(&dfx)));
    if m >= 2 {
        let Some(d2fx) = ev.d2f(x) else {
            return fail(x, StepStatus::DomainError);
        };
        if d2fx.is_zero() || !d2fx.is_finite() {
            return fail(x, StepStatus::DerivativeUnderflow);
        }
        let bend_coeff = x.from_i64((m - 1) * (m - 1)).div(&x.from_i64(2));
        next = next.add(&bend_coeff.mul(&dfx.div(&d2fx)));
    }
    if !next.is_finite() {
        return fail(x, StepStatus::DomainError);
    }
    StepOutcome {
        next,
        intermediate: None,
        status: StepStatus::Ok,
    }
}

/// One Dong step: y = x ∓ √m·f/f' (sign per `spec.dong_sign`, minus by
/// default), next = y − m(1 − 1/√m)^(1−m)·f(y)/f'(x).
///
/// The second stage divides by f'(x): that is the variant that is exact on
/// pure monomials and reproduces third order (dividing by f'(y) is not).
/// Multiplicity 1 is rejected as a domain error — the correction factor
/// (1 − 1/√m)^(1−m) is singular there.
pub fn step_dong<F: MethodField, E: Evaluate<F> + ?Sized>(
    ev: &E,
    x: &F,
    spec: &MethodSpec,
) -> StepOutcome<F> {
    let m = ev.multiplicity();
    if m < 2 {
        return fail(x, StepStatus::DomainError);
    }
    let Some(fx) = ev.f(x) else {
        return fail(x, StepStatus::DomainError);
    };
    if fx.is_zero() {
        return fixed_point(x);
    }
    let Some(dfx) = ev.df(x) else {
        return fail(x, StepStatus::DomainError);
    };
    if dfx.is_zero() || !dfx.is_finite() {
        return fail(x, StepStatus::DerivativeUnderflow);
    }
    let m_f = x.from_i64(m as i64);
    let sqrt_m = m_f.sqrt().expect("square root of a positive integer");
    let stride = sqrt_m.mul(&fx.div(&dfx));
    let y = match spec.dong_sign {
        DongSign::Minus => x.sub(&stride),
        DongSign::Plus => x.add(&stride),
    };
    if !y.is_finite() {
        return fail(x, StepStatus::DerivativeUnderflow);
    }
    let Some(fy) = ev.f(&y) else {
        return fail(x, StepStatus::DomainError);
    };
    // m(1 − 1/√m)^(1−m) = m / (1 − 1/√m)^(m−1); the base is in (0, 1).
    let one = x.from_i64(1);
    let base = one.sub(&one.div(&sqrt_m));
    let factor = m_f.div(&base.powu(m - 1));
    let next = y.sub(&factor.mul(&fy.div(&dfx)));
    if !next.is_finite() {
        return fail(x, StepStatus::DomainError);
    }
    StepOutcome {
        next,
        intermediate: Some(y),
        status: StepStatus::Ok,
    }
}

/// One Chun-family step with parameter γ:
/// next = x − m((2γ−1)m + 3 − 2γ)/2·f/f' + γ(m−1)²/2·f'/f''
///          − (1−γ)m²/2·f²f''/f'³.
///
/// Terms with a zero coefficient are skipped, so γ = 1, m = 1 degrades to a
/// plain Newton step without consulting f''.
pub fn step_chun<F: MethodField, E: Evaluate<F> + ?Sized>(
    ev: &E,
    x: &F,
    spec: &MethodSpec,
) -> StepOutcome<F> {
    let m = ev.multiplicity() as i64;
    let Some(fx) = ev.f(x) else {
        return fail(x, StepStatus::DomainError);
    };
    if fx.is_zero() {
        return fixed_point(x);
    }
    let Some(dfx) = ev.df(x) else {
        return fail(x, StepStatus::DomainError);
    };
    if dfx.is_zero() || !dfx.is_finite() {
        return fail(x, StepStatus::DerivativeUnderflow);
    }
    let one = x.from_i64(1);
    let two = x.from_i64(2);
    let gamma = x.from_f64(spec.gamma);
    let two_gamma = gamma.mul(&two);

    // slope coefficient m((2γ−1)m + 3 − 2γ)/2
    let slope_coeff = x
        .from_i64(m)
        .mul(
            &two_gamma
                .sub(&one)
                .mul(&x.from_i64(m))
                .add(&x.from_i64(3).sub(&two_gamma)),
        )
        .div(&two);
    let bend_coeff = gamma.mul(&x.from_i64((m - 1) * (m - 1))).div(&two);
    let torsion_coeff = one.sub(&gamma).mul(&x.from_i64(m * m)).div(&two);

    let mut next = x.sub(&slope_coeff.mul(&fx.div(&dfx)));
    if !bend_coeff.is_zero() || !torsion_coeff.is_zero() {
        let Some(d2fx) = ev.d2f(x) else {
            return fail(x, StepStatus::DomainError);
        };
        if !bend_coeff.is_zero() {
            if d2fx.is_zero() || !d2fx.is_finite() {
                return fail(x, StepStatus::DerivativeUnderflow);
            }
            next = next.add(&bend_coeff.mul(&dfx.div(&d2fx)));
        }
        if !torsion_coeff.is_zero() {
            if !d2fx.is_finite() {
                return fail(x, StepStatus::DerivativeUnderflow);
            }
            let twist = fx.powu(2).mul(&d2fx).div(&dfx.powu(3));
            next = next.sub(&torsion_coeff.mul(&twist));
        }
    }
    if !next.is_finite() {
        return fail(x, StepStatus::DomainError);
    }
    StepOutcome {
        next,
        intermediate: None,
        status: StepStatus::Ok,
    }
}

/// Dispatches one step of the kernel selected by `spec`.
pub fn step<F: MethodField, E: Evaluate<F> + ?Sized>(
    ev: &E,
    x: &F,
    spec: &MethodSpec,
) -> StepOutcome<F> {
    match spec.kind {
        MethodKind::NewtonSecant => step_newton_secant(ev, x),
        MethodKind::ModifiedNewtonSecant => step_mns(ev, x),
        MethodKind::Schroder => step_schroder(ev, x),
        MethodKind::Osada => step_osada(ev, x),
        MethodKind::Dong => step_dong(ev, x, spec),
        MethodKind::Chun => step_chun(ev, x, spec),
    }
}
