//! Iteration driver over arbitrary-precision reals, plus convergence
//! diagnostics on the resulting traces.
//!
//! [`solve`] runs a kernel until a strict step tolerance, a strict residual
//! tolerance, an iteration cap, or a kernel failure stops it, recording every
//! iterate, substep, and residual. [`solve_fixed`] runs an exact number of
//! steps by disabling both tolerances (a strict `< 0` never fires).
//!
//! Diagnostics: [`convergence_order`] estimates the order from true errors,
//! [`apparent_convergence_order`] from successive differences (no root
//! needed), and [`empirical_error_ratio`] extracts e_{n+1}/e_n^p ratios for
//! comparison against the asymptotic error constant from [`error_constant`].
//! All three window away values lost to rounding noise before estimating.

use thiserror::Error;

use crate::methods::{step, MethodKind, MethodSpec, StepStatus};
use crate::numerics::{PrecisionConfig, Scalar};
use crate::problems::{Evaluate, Problem};

/// Stopping rules for [`solve`]. Tolerances compare strictly, so a zero
/// tolerance can never fire.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub max_iterations: u32,
    /// Stop when |x_{n+1} - x_n| < this.
    pub step_tolerance: Scalar,
    /// Stop when |f(x_{n+1})| < this.
    pub residual_tolerance: Scalar,
    pub precision: PrecisionConfig,
}

impl SolverConfig {
    /// 50 iterations max, both tolerances at the noise floor 10^-(digits-10).
    pub fn with_defaults(precision: PrecisionConfig) -> Self {
        SolverConfig {
            max_iterations: 50,
            step_tolerance: noise_floor(precision),
            residual_tolerance: noise_floor(precision),
            precision,
        }
    }

    /// Disables the residual stop; used by diagnostics runs that must keep
    /// iterating until the step size itself collapses.
    pub fn without_residual_stop(mut self) -> Self {
        self.residual_tolerance = Scalar::zero(self.precision);
        self
    }
}

/// 10^-(digits-10): below this magnitude a quantity is treated as rounding
/// noise by the trace diagnostics.
pub fn noise_floor(precision: PrecisionConfig) -> Scalar {
    Scalar::pow10(-(precision.significant_digits() as i64 - 10), precision)
}

/// Why a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    StepTolerance,
    ResidualTolerance,
    MaxIterations,
    StepFailure(StepStatus),
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::StepTolerance => f.write_str("step-tolerance"),
            Termination::ResidualTolerance => f.write_str("residual-tolerance"),
            Termination::MaxIterations => f.write_str("max-iterations"),
            Termination::StepFailure(status) => {
                let what = match status {
                    StepStatus::Ok => "none",
                    StepStatus::DerivativeUnderflow => "derivative-underflow",
                    StepStatus::DomainError => "domain-error",
                    StepStatus::DenominatorUnderflow => "denominator-underflow",
                };
                write!(f, "step-failure: {what}")
            }
        }
    }
}

/// Full record of one solve: x_0..x_N, the substep of each two-stage step,
/// |f(x_n)| per iterate, and |x_n - root| when the root is known.
#[derive(Debug, Clone)]
pub struct Trace {
    pub iterates: Vec<Scalar>,
    /// One entry per step; `None` for single-stage kernels.
    pub intermediates: Vec<Option<Scalar>>,
    pub residuals: Vec<Scalar>,
    pub errors: Option<Vec<Scalar>>,
    pub termination: Termination,
}

impl Trace {
    pub fn steps(&self) -> usize {
        self.iterates.len() - 1
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("f is undefined (or not finite) at the starting point")]
    OutOfDomainStart,
    #[error("method {0} needs a second derivative, which this problem does not provide")]
    SecondDerivativeRequired(MethodKind),
    #[error("method {method} is undefined at multiplicity {multiplicity}")]
    UnsupportedMultiplicity {
        method: MethodKind,
        multiplicity: u32,
    },
}

/// Errors from the trace diagnostics.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagnosticsError {
    #[error("an iterate hit the root exactly; order estimation needs nonzero errors")]
    ExactHit,
    #[error("order estimation needs at least {required} iterates, got {got}")]
    InsufficientIterates { required: usize, got: usize },
    #[error("no window of consecutive values stays above the noise floor")]
    NoUsableWindow,
}

/// Runs `spec` on `problem` from `x0` until a stopping rule fires.
///
/// The residual of a proposed iterate is evaluated before the iterate is
/// committed: a domain failure there ends the trace at the previous point.
pub fn solve(
    problem: &Problem,
    x0: &Scalar,
    spec: &MethodSpec,
    config: &SolverConfig,
) -> Result<Trace, SolverError> {
    if spec.kind.requires_second_derivative() && !problem.has_second_derivative() {
        return Err(SolverError::SecondDerivativeRequired(spec.kind));
    }
    if spec.kind == MethodKind::Dong && problem.multiplicity() < 2 {
        return Err(SolverError::UnsupportedMultiplicity {
            method: spec.kind,
            multiplicity: problem.multiplicity(),
        });
    }
    let r0 = Evaluate::<Scalar>::f(problem, x0).ok_or(SolverError::OutOfDomainStart)?;
    if !r0.is_finite() || !x0.is_finite() {
        return Err(SolverError::OutOfDomainStart);
    }

    let mut iterates = vec![x0.clone()];
    let mut intermediates = Vec::new();
    let mut residuals = vec![r0.abs()];
    let termination = loop {
        if iterates.len() - 1 >= config.max_iterations as usize {
            break Termination::MaxIterations;
        }
        let out = step(problem, iterates.last().expect("nonempty"), spec);
        if out.status != StepStatus::Ok {
            break Termination::StepFailure(out.status);
        }
        let Some(r) = Evaluate::<Scalar>::f(problem, &out.next) else {
            break Termination::StepFailure(StepStatus::DomainError);
        };
        if !r.is_finite() {
            break Termination::StepFailure(StepStatus::DomainError);
        }
        let delta = (&out.next - iterates.last().expect("nonempty")).abs();
        intermediates.push(out.intermediate);
        iterates.push(out.next);
        residuals.push(r.abs());
        if delta < config.step_tolerance {
            break Termination::StepTolerance;
        }
        if *residuals.last().expect("nonempty") < config.residual_tolerance {
            break Termination::ResidualTolerance;
        }
    };

    let errors = problem.known_root(config.precision).map(|alpha| {
        iterates.iter().map(|x| (x - &alpha).abs()).collect()
    });
    Ok(Trace {
        iterates,
        intermediates,
        residuals,
        errors,
        termination,
    })
}

/// Runs exactly `steps` steps (unless the kernel fails earlier) by disabling
/// both tolerances.
pub fn solve_fixed(
    problem: &Problem,
    x0: &Scalar,
    spec: &MethodSpec,
    precision: PrecisionConfig,
    steps: u32,
) -> Result<Trace, SolverError> {
    let config = SolverConfig {
        max_iterations: steps,
        step_tolerance: Scalar::zero(precision),
        residual_tolerance: Scalar::zero(precision),
        precision,
    };
    solve(problem, x0, spec, &config)
}

/// Scans magnitude windows from the back for the largest index k such that
/// mags[k-2..=k] all sit strictly above the floor, and returns
/// ln(m_k/m_{k-1}) / ln(m_{k-1}/m_{k-2}) there. Degenerate windows (equal
/// neighbors) are skipped.
fn scan_order(mags: &[Scalar], floor: &Scalar) -> Option<Scalar> {
    for k in (2..mags.len()).rev() {
        if mags[k] > *floor && mags[k - 1] > *floor && mags[k - 2] > *floor {
            let num = (&mags[k] / &mags[k - 1])
                .ln()
                .expect("positive by floor guard");
            let den = (&mags[k - 1] / &mags[k - 2])
                .ln()
                .expect("positive by floor guard");
            if den.is_zero() {
                continue;
            }
            let order = &num / &den;
            if order.is_finite() {
                return Some(order);
            }
        }
    }
    None
}

fn no_window_reason(mags: &[Scalar]) -> DiagnosticsError {
    if mags.iter().any(Scalar::is_zero) {
        DiagnosticsError::ExactHit
    } else {
        DiagnosticsError::NoUsableWindow
    }
}

/// Computational order of convergence from true error magnitudes:
/// ln(e_n/e_{n-1}) / ln(e_{n-1}/e_{n-2}) at the last window where all three
/// errors sit strictly above `floor`.
pub fn convergence_order(errors: &[Scalar], floor: &Scalar) -> Result<Scalar, DiagnosticsError> {
    if errors.len() < 3 {
        return Err(DiagnosticsError::InsufficientIterates {
            required: 3,
            got: errors.len(),
        });
    }
    scan_order(errors, floor).ok_or_else(|| no_window_reason(errors))
}

/// Like [`convergence_order`] but root-free: uses successive differences
/// |x_n - x_{n-1}| in place of true errors, so it needs four iterates.
pub fn apparent_convergence_order(
    iterates: &[Scalar],
    floor: &Scalar,
) -> Result<Scalar, DiagnosticsError> {
    if iterates.len() < 4 {
        return Err(DiagnosticsError::InsufficientIterates {
            required: 4,
            got: iterates.len(),
        });
    }
    let diffs: Vec<Scalar> = iterates
        .windows(2)
        .map(|w| (&w[1] - &w[0]).abs())
        .collect();
    scan_order(&diffs, floor).ok_or_else(|| no_window_reason(&diffs))
}

/// Signed ratios e_{n+1} / e_n^order for every pair whose leading error sits
/// inside the trustworthy band 10^-(digits/3) < |e_n| < 10^-2: below that the
/// ratio is rounding noise, above it the asymptotic regime has not started.
pub fn empirical_error_ratio(
    trace: &Trace,
    alpha: &Scalar,
    order: u32,
) -> Result<Vec<Scalar>, DiagnosticsError> {
    if trace.iterates.len() < 2 {
        return Err(DiagnosticsError::InsufficientIterates {
            required: 2,
            got: trace.iterates.len(),
        });
    }
    let cfg = alpha.config();
    let lower = Scalar::pow10(-(cfg.significant_digits() as i64 / 3), cfg);
    let upper = Scalar::pow10(-2, cfg);
    let eps: Vec<Scalar> = trace.iterates.iter().map(|x| x - alpha).collect();
    let mut ratios = Vec::new();
    for pair in eps.windows(2) {
        let mag = pair[0].abs();
        if lower < mag && mag < upper {
            if pair[1].is_zero() {
                return Err(DiagnosticsError::ExactHit);
            }
            ratios.push(&pair[1] / &pair[0].powi(order as i32));
        }
    }
    if ratios.is_empty() {
        Err(DiagnosticsError::NoUsableWindow)
    } else {
        Ok(ratios)
    }
}

/// Asymptotic error constant of the damped two-stage kernel at a root of
/// multiplicity m: (m c1^2 - 2(m-1) c2) / (2 m^2), where c1, c2 are the
/// normalized series coefficients of f around the root (c_i = b_{m+i}/b_m).
pub fn error_constant(c1: &Scalar, c2: &Scalar, multiplicity: u32) -> Scalar {
    let cfg = c1.config();
    let m = multiplicity as i64;
    let num = &(&Scalar::from_i64(m, cfg) * &c1.powi(2))
        - &(&Scalar::from_i64(2 * (m - 1), cfg) * c2);
    let den = Scalar::from_i64(2 * m * m, cfg);
    &num / &den
}

/// Renders a trace as CSV with columns n, x, residual, error. The error
/// column is blank when the root is unknown.
pub fn trace_to_csv(trace: &Trace) -> String {
    let mut out = String::from("n,x,residual,error\n");
    for (n, x) in trace.iterates.iter().enumerate() {
        let error = trace
            .errors
            .as_ref()
            .map(|e| e[n].to_decimal_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{n},{},{},{error}\n",
            x.to_decimal_string(),
            trace.residuals[n].to_decimal_string()
        ));
    }
    out
}
