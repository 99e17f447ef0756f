//! Registry of target functions: four real benchmark functions with known
//! multiple roots, three complex polynomial problems for basin rendering, and
//! a small polynomial with an analytically known error constant.
//!
//! Real problems carry hand-written analytic closures for f, f', f''.
//! Polynomial problems are stored as integer coefficients of a simple-rooted
//! base polynomial q raised to an outer power m; their derivatives are exact
//! polynomial calculus over any [`MethodField`], so the same definition serves
//! the high-precision real solver and the binary64 complex renderer.

use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::numerics::{ComplexScalar, MethodField, PrecisionConfig, Scalar};

/// Root of f2(x) = (ln x + sqrt(x) - 5)^3, to 400 decimal digits.
///
/// Embedded well beyond any supported working precision so that error
/// measurements |x_n - alpha| stay meaningful at diagnostic precisions.
const ALPHA_F2: &str = "8.309432694231571795346955682692068618222172712390291230634949714908573188433850919521454514228202953559263823921255699237626661325548537010706234173095331664563723053510422660209979981263134555824277146543126065330325692724555692246542218492824827195726210441052841311524903769952521667518676193254286915510439860614526535708199383102266705117872980371357938582568294750847097788636792861892030045458";

/// Root of f4(x) = (sqrt(x) - 1/x - 3)^7, to 400 decimal digits.
const ALPHA_F4: &str = "9.633595562832695192406312709190816262189895632590389550383073098267247911555472340209171349867436852706944864198334551574599793748336667914338683295874593834518416642203145943141090167327379593531753822562887445742885900479945954135203522617509930639998668529154106848161888794748646567718656267657647458851485819025985334490350110906534936344291877306009206988740991304147865849654631094721578001821";

/// Errors from registry lookups and problem validation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProblemError {
    #[error("unknown problem {0:?} (see `list` for the registry)")]
    UnknownProblem(String),
}

/// Errors from Taylor-shift coefficient extraction.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TaylorError {
    /// The expansion point is not a root of the stated multiplicity at
    /// working precision.
    #[error("expansion point is not a root of the stated multiplicity at working precision")]
    NotARoot,
    /// The requested expansion order is too small to normalize coefficients.
    #[error("expansion order {given} is too small (need at least multiplicity + 2 = {required})")]
    OrderTooSmall { required: usize, given: usize },
}

/// Evaluation contract the iteration kernels require: f, its first
/// derivative, an optional second derivative, and the root multiplicity.
///
/// Evaluations return `None` off the problem's domain.
pub trait Evaluate<F: MethodField> {
    fn multiplicity(&self) -> u32;
    fn f(&self, x: &F) -> Option<F>;
    fn df(&self, x: &F) -> Option<F>;
    fn d2f(&self, x: &F) -> Option<F>;
    fn has_d2f(&self) -> bool;
}

/// Real-valued curve evaluation; `None` marks a point outside the domain.
pub type RealFn = Arc<dyn Fn(&Scalar) -> Option<Scalar> + Send + Sync>;

/// A polynomial target q(x)^m stored as exact integer coefficients of the
/// base polynomial q (ascending order) plus the outer power m.
///
/// Derivatives are exact polynomial calculus — no finite differences.
#[derive(Debug, Clone)]
pub struct PolynomialProblem {
    inner: Vec<i64>,
    dq: Vec<i64>,
    d2q: Vec<i64>,
    outer_power: u32,
    roots: Vec<ComplexScalar>,
}

fn derive_coeffs(coeffs: &[i64]) -> Vec<i64> {
    if coeffs.len() <= 1 {
        return vec![0];
    }
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as i64)
        .collect()
}

fn horner<F: MethodField>(coeffs: &[i64], x: &F) -> F {
    let mut acc = x.from_i64(*coeffs.last().expect("coefficient list is nonempty"));
    for &c in coeffs.iter().rev().skip(1) {
        acc = acc.mul(x).add(&x.from_i64(c));
    }
    acc
}

impl PolynomialProblem {
    /// `inner` holds ascending coefficients of q; the problem is q^m.
    /// `roots` lists the (simple) roots of q for basin classification and
    /// may be empty for problems never rendered.
    pub fn new(inner: Vec<i64>, outer_power: u32, roots: Vec<ComplexScalar>) -> Self {
        assert!(
            inner.len() >= 2 && *inner.last().unwrap() != 0,
            "base polynomial must be nonconstant with nonzero leading coefficient"
        );
        assert!(outer_power >= 1, "outer power must be positive");
        let dq = derive_coeffs(&inner);
        let d2q = derive_coeffs(&dq);
        PolynomialProblem {
            inner,
            dq,
            d2q,
            outer_power,
            roots,
        }
    }

    pub fn inner_coefficients(&self) -> &[i64] {
        &self.inner
    }

    pub fn outer_power(&self) -> u32 {
        self.outer_power
    }

    pub fn roots(&self) -> &[ComplexScalar] {
        &self.roots
    }

    pub fn q<F: MethodField>(&self, x: &F) -> F {
        horner(&self.inner, x)
    }

    /// Exact integer coefficients of the fully expanded q^m (ascending).
    pub fn dense_coefficients(&self) -> Vec<BigInt> {
        let base: Vec<BigInt> = self.inner.iter().map(|&c| BigInt::from(c)).collect();
        let mut acc = vec![BigInt::from(1)];
        for _ in 0..self.outer_power {
            let mut next = vec![BigInt::from(0); acc.len() + base.len() - 1];
            for (i, a) in acc.iter().enumerate() {
                for (j, b) in base.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            acc = next;
        }
        acc
    }
}

impl<F: MethodField> Evaluate<F> for PolynomialProblem {
    fn multiplicity(&self) -> u32 {
        self.outer_power
    }

    fn f(&self, x: &F) -> Option<F> {
        Some(self.q(x).powu(self.outer_power))
    }

    fn df(&self, x: &F) -> Option<F> {
        let q = self.q(x);
        let dq = horner(&self.dq, x);
        let m = self.outer_power;
        Some(x.from_i64(m as i64).mul(&q.powu(m - 1)).mul(&dq))
    }

    fn d2f(&self, x: &F) -> Option<F> {
        let q = self.q(x);
        let dq = horner(&self.dq, x);
        let d2q = horner(&self.d2q, x);
        let m = self.outer_power;
        let m_f = x.from_i64(m as i64);
        let smooth = m_f.mul(&q.powu(m - 1)).mul(&d2q);
        if m == 1 {
            return Some(d2q);
        }
        let curvature = x
            .from_i64((m as i64) * (m as i64 - 1))
            .mul(&q.powu(m - 2))
            .mul(&dq.powu(2));
        Some(curvature.add(&smooth))
    }

    fn has_d2f(&self) -> bool {
        true
    }
}

enum Curve {
    Real {
        f: RealFn,
        df: RealFn,
        d2f: Option<RealFn>,
    },
    Poly(PolynomialProblem),
}

/// A target function bundle: evaluations, multiplicity, and optional known
/// root / starting point / complex root set.
pub struct Problem {
    name: String,
    formula: String,
    multiplicity: u32,
    known_root: Option<String>,
    default_x0: Option<String>,
    curve: Curve,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("formula", &self.formula)
            .field("multiplicity", &self.multiplicity)
            .finish_non_exhaustive()
    }
}

impl Problem {
    /// Defines a custom real problem from analytic closures.
    pub fn from_closures(
        name: impl Into<String>,
        formula: impl Into<String>,
        multiplicity: u32,
        f: RealFn,
        df: RealFn,
        d2f: Option<RealFn>,
        known_root: Option<&str>,
    ) -> Self {
        assert!(multiplicity >= 1, "multiplicity must be positive");
        Problem {
            name: name.into(),
            formula: formula.into(),
            multiplicity,
            known_root: known_root.map(str::to_owned),
            default_x0: None,
            curve: Curve::Real { f, df, d2f },
        }
    }

    fn from_polynomial(
        name: &str,
        formula: &str,
        multiplicity: u32,
        poly: PolynomialProblem,
        known_root: Option<&str>,
        default_x0: Option<&str>,
    ) -> Self {
        Problem {
            name: name.to_owned(),
            formula: formula.to_owned(),
            multiplicity,
            known_root: known_root.map(str::to_owned),
            default_x0: default_x0.map(str::to_owned),
            curve: Curve::Poly(poly),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn formula(&self) -> &str {
        &self.formula
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    /// The known root parsed at `cfg` precision.
    pub fn known_root(&self, cfg: PrecisionConfig) -> Option<Scalar> {
        self.known_root
            .as_deref()
            .map(|s| Scalar::from_decimal(s, cfg).expect("embedded root literal parses"))
    }

    pub fn known_root_literal(&self) -> Option<&str> {
        self.known_root.as_deref()
    }

    /// The benchmark starting point parsed at `cfg` precision.
    pub fn default_x0(&self, cfg: PrecisionConfig) -> Option<Scalar> {
        self.default_x0
            .as_deref()
            .map(|s| Scalar::from_decimal(s, cfg).expect("embedded x0 literal parses"))
    }

    pub fn default_x0_literal(&self) -> Option<&str> {
        self.default_x0.as_deref()
    }

    /// The underlying polynomial representation, when the problem is one.
    pub fn polynomial(&self) -> Option<&PolynomialProblem> {
        match &self.curve {
            Curve::Poly(p) => Some(p),
            Curve::Real { .. } => None,
        }
    }

    /// Roots of the base polynomial for basin classification.
    pub fn complex_roots(&self) -> Option<&[ComplexScalar]> {
        match &self.curve {
            Curve::Poly(p) if !p.roots.is_empty() => Some(p.roots()),
            _ => None,
        }
    }

    pub fn has_second_derivative(&self) -> bool {
        match &self.curve {
            Curve::Real { d2f, .. } => d2f.is_some(),
            Curve::Poly(_) => true,
        }
    }
}

impl Evaluate<Scalar> for Problem {
    fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    fn f(&self, x: &Scalar) -> Option<Scalar> {
        match &self.curve {
            Curve::Real { f, .. } => f(x),
            Curve::Poly(p) => p.f(x),
        }
    }

    fn df(&self, x: &Scalar) -> Option<Scalar> {
        match &self.curve {
            Curve::Real { df, .. } => df(x),
            Curve::Poly(p) => p.df(x),
        }
    }

    fn d2f(&self, x: &Scalar) -> Option<Scalar> {
        match &self.curve {
            Curve::Real { d2f, .. } => d2f.as_ref().and_then(|g| g(x)),
            Curve::Poly(p) => p.d2f(x),
        }
    }

    fn has_d2f(&self) -> bool {
        self.has_second_derivative()
    }
}

impl Evaluate<ComplexScalar> for Problem {
    fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    fn f(&self, x: &ComplexScalar) -> Option<ComplexScalar> {
        match &self.curve {
            Curve::Real { .. } => None,
            Curve::Poly(p) => p.f(x),
        }
    }

    fn df(&self, x: &ComplexScalar) -> Option<ComplexScalar> {
        match &self.curve {
            Curve::Real { .. } => None,
            Curve::Poly(p) => p.df(x),
        }
    }

    fn d2f(&self, x: &ComplexScalar) -> Option<ComplexScalar> {
        match &self.curve {
            Curve::Real { .. } => None,
            Curve::Poly(p) => p.d2f(x),
        }
    }

    fn has_d2f(&self) -> bool {
        matches!(self.curve, Curve::Poly(_))
    }
}

/// Names accepted by [`builtin`], in registry order.
pub const BUILTIN_NAMES: [&str; 8] = ["f1", "f2", "f3", "f4", "p1", "p2", "p3", "poly_m2_demo"];

fn build_f1() -> Problem {
    let inner = |x: &Scalar| -> Scalar { &x.sin().powi(2) + x };
    let f: RealFn = Arc::new(move |x| Some(inner(x).powi(5)));
    let df: RealFn = Arc::new(move |x| {
        let g = inner(x);
        let dg = &(x + x).sin() + &x.from_i64(1);
        Some(&(&x.from_i64(5) * &g.powi(4)) * &dg)
    });
    let d2f: RealFn = Arc::new(move |x| {
        let g = inner(x);
        let dg = &(x + x).sin() + &x.from_i64(1);
        let d2g = &x.from_i64(2) * &(x + x).cos();
        let bend = &(&x.from_i64(20) * &g.powi(3)) * &dg.powi(2);
        let stretch = &(&x.from_i64(5) * &g.powi(4)) * &d2g;
        Some(&bend + &stretch)
    });
    let mut p = Problem::from_closures(
        "f1",
        "(sin(x)^2 + x)^5",
        5,
        f,
        df,
        Some(d2f),
        Some("0"),
    );
    p.default_x0 = Some("0.1".to_owned());
    p
}

fn build_f2() -> Problem {
    let inner = |x: &Scalar| -> Option<Scalar> {
        let lnx = x.ln()?;
        let sqx = x.sqrt()?;
        Some(&(&lnx + &sqx) - &x.from_i64(5))
    };
    let dinner = |x: &Scalar| -> Option<Scalar> {
        let sqx = x.sqrt()?;
        let one = x.from_i64(1);
        Some(&(&one / x) + &(&one / &(&x.from_i64(2) * &sqx)))
    };
    let f: RealFn = Arc::new(move |x| Some(inner(x)?.powi(3)));
    let df: RealFn = Arc::new(move |x| {
        let h = inner(x)?;
        let dh = dinner(x)?;
        Some(&(&x.from_i64(3) * &h.powi(2)) * &dh)
    });
    let d2f: RealFn = Arc::new(move |x| {
        let h = inner(x)?;
        let dh = dinner(x)?;
        let sqx = x.sqrt()?;
        let one = x.from_i64(1);
        // h'' = -1/x^2 - 1/(4 x sqrt(x))
        let d2h = &(-&(&one / &x.powi(2))) - &(&one / &(&x.from_i64(4) * &(x * &sqx)));
        let spread = &(&x.from_i64(6) * &h) * &dh.powi(2);
        let bend = &(&x.from_i64(3) * &h.powi(2)) * &d2h;
        Some(&spread + &bend)
    });
    let mut p = Problem::from_closures(
        "f2",
        "(ln(x) + sqrt(x) - 5)^3",
        3,
        f,
        df,
        Some(d2f),
        Some(ALPHA_F2),
    );
    p.default_x0 = Some("8".to_owned());
    p
}

fn build_f3() -> Problem {
    fn exponent(x: &Scalar) -> Scalar {
        &(&x.powi(2) + &(&x.from_i64(7) * x)) - &x.from_i64(30)
    }
    fn inner(x: &Scalar) -> Scalar {
        &exponent(x).exp() - &x.from_i64(1)
    }
    let f: RealFn = Arc::new(move |x| Some(inner(x).powi(6)));
    let df: RealFn = Arc::new(move |x| {
        let k = inner(x);
        let eu = exponent(x).exp();
        let du = &(&x.from_i64(2) * x) + &x.from_i64(7);
        Some(&(&x.from_i64(6) * &k.powi(5)) * &(&du * &eu))
    });
    let d2f: RealFn = Arc::new(move |x| {
        let k = inner(x);
        let eu = exponent(x).exp();
        let du = &(&x.from_i64(2) * x) + &x.from_i64(7);
        let dk = &du * &eu;
        // k'' = (2 + (2x+7)^2) e^u
        let d2k = &(&x.from_i64(2) + &du.powi(2)) * &eu;
        let spread = &(&x.from_i64(30) * &k.powi(4)) * &dk.powi(2);
        let bend = &(&x.from_i64(6) * &k.powi(5)) * &d2k;
        Some(&spread + &bend)
    });
    let mut p = Problem::from_closures(
        "f3",
        "(exp(x^2 + 7x - 30) - 1)^6",
        6,
        f,
        df,
        Some(d2f),
        Some("3"),
    );
    p.default_x0 = Some("3.1".to_owned());
    p
}

fn build_f4() -> Problem {
    let inner = |x: &Scalar| -> Option<Scalar> {
        if x.is_zero() {
            return None;
        }
        let sqx = x.sqrt()?;
        if sqx.is_zero() {
            return None;
        }
        let one = x.from_i64(1);
        Some(&(&sqx - &(&one / x)) - &x.from_i64(3))
    };
    let dinner = |x: &Scalar| -> Option<Scalar> {
        let sqx = x.sqrt()?;
        if sqx.is_zero() {
            return None;
        }
        let one = x.from_i64(1);
        Some(&(&one / &(&x.from_i64(2) * &sqx)) + &(&one / &x.powi(2)))
    };
    let f: RealFn = Arc::new(move |x| Some(inner(x)?.powi(7)));
    let df: RealFn = Arc::new(move |x| {
        let w = inner(x)?;
        let dw = dinner(x)?;
        Some(&(&x.from_i64(7) * &w.powi(6)) * &dw)
    });
    let d2f: RealFn = Arc::new(move |x| {
        let w = inner(x)?;
        let dw = dinner(x)?;
        let sqx = x.sqrt()?;
        let one = x.from_i64(1);
        // w'' = -1/(4 x sqrt(x)) - 2/x^3
        let d2w =
            &(-&(&one / &(&x.from_i64(4) * &(x * &sqx)))) - &(&x.from_i64(2) / &x.powi(3));
        let spread = &(&x.from_i64(42) * &w.powi(5)) * &dw.powi(2);
        let bend = &(&x.from_i64(7) * &w.powi(6)) * &d2w;
        Some(&spread + &bend)
    });
    let mut p = Problem::from_closures(
        "f4",
        "(sqrt(x) - 1/x - 3)^7",
        7,
        f,
        df,
        Some(d2f),
        Some(ALPHA_F4),
    );
    p.default_x0 = Some("9".to_owned());
    p
}

fn build_p1() -> Problem {
    let roots = vec![
        ComplexScalar::new(1.0, 0.0),
        ComplexScalar::new(-0.5, 0.86602540378443865),
        ComplexScalar::new(-0.5, -0.86602540378443865),
    ];
    let poly = PolynomialProblem::new(vec![-1, 0, 0, 1], 10, roots);
    Problem::from_polynomial("p1", "(z^3 - 1)^10", 10, poly, None, None)
}

fn build_p2() -> Problem {
    let roots = vec![
        ComplexScalar::new(-0.80873060047939201, 0.0),
        ComplexScalar::new(-0.46491220160289785, 1.0714738402702694),
        ComplexScalar::new(-0.46491220160289785, -1.0714738402702694),
        ComplexScalar::new(0.86927750184259386, 0.38826940659974036),
        ComplexScalar::new(0.86927750184259386, -0.38826940659974036),
    ];
    let poly = PolynomialProblem::new(vec![1, 0, -1, 0, 0, 1], 15, roots);
    Problem::from_polynomial("p2", "(z^5 - z^2 + 1)^15", 15, poly, None, None)
}

fn build_p3() -> Problem {
    let roots = vec![
        ComplexScalar::new(0.0, 0.0),
        ComplexScalar::new(0.7937005259840997, 0.0),
        ComplexScalar::new(-0.39685026299204987, 0.68736481849930131),
        ComplexScalar::new(-0.39685026299204987, -0.68736481849930131),
    ];
    let poly = PolynomialProblem::new(vec![0, -1, 0, 0, 2], 8, roots);
    Problem::from_polynomial("p3", "(2z^4 - z)^8", 8, poly, None, None)
}

fn build_poly_m2_demo() -> Problem {
    // (x-1)^2 (x+2) expanded: x^3 - 3x + 2. Stored dense (outer power 1);
    // the root at 1 has multiplicity 2.
    let poly = PolynomialProblem::new(vec![2, -3, 0, 1], 1, Vec::new());
    Problem::from_polynomial(
        "poly_m2_demo",
        "(x - 1)^2 (x + 2)",
        2,
        poly,
        Some("1"),
        Some("1.01"),
    )
}

/// Looks up a builtin problem by registry name.
pub fn builtin(name: &str) -> Result<Problem, ProblemError> {
    match name {
        "f1" => Ok(build_f1()),
        "f2" => Ok(build_f2()),
        "f3" => Ok(build_f3()),
        "f4" => Ok(build_f4()),
        "p1" => Ok(build_p1()),
        "p2" => Ok(build_p2()),
        "p3" => Ok(build_p3()),
        "poly_m2_demo" => Ok(build_poly_m2_demo()),
        other => Err(ProblemError::UnknownProblem(other.to_owned())),
    }
}

/// Coefficients (c_0, c_1, ..., c_{order-m}) of the normalized shifted
/// expansion f(alpha + e) = e^m * b_m * (c_0 + c_1 e + c_2 e^2 + ...), with
/// c_0 = 1, computed by repeated synthetic division — no differentiation.
///
/// `alpha` must be a root of multiplicity `multiplicity`; `order` is the
/// highest expansion degree carried and must be at least multiplicity + 2.
pub fn poly_taylor_at_root(
    p: &PolynomialProblem,
    alpha: &Scalar,
    multiplicity: u32,
    order: usize,
) -> Result<Vec<Scalar>, TaylorError> {
    let m = multiplicity as usize;
    if order < m + 2 {
        return Err(TaylorError::OrderTooSmall {
            required: m + 2,
            given: order,
        });
    }
    let cfg = alpha.config();
    let mut coeffs: Vec<Scalar> = p
        .dense_coefficients()
        .iter()
        .map(|c| Scalar::from_decimal(&c.to_string(), cfg).expect("integer literal parses"))
        .collect();
    let degree = coeffs.len() - 1;
    if m > degree {
        return Err(TaylorError::NotARoot);
    }

    // Repeated synthetic division by (x - alpha). Each pass emits the next
    // shifted coefficient b_k as the remainder and leaves the quotient
    // occupying the slots one past `start` (reading original coefficients
    // before overwriting them).
    let mut shifted: Vec<Scalar> = Vec::with_capacity(degree + 1);
    let mut start = 0usize;
    let mut len = degree + 1;
    while len > 0 {
        if len == 1 {
            shifted.push(coeffs[start].clone());
            break;
        }
        // Descending Horner: q_{len-2} = c_{len-1}; q_{i-1} = c_i + alpha*q_i;
        // remainder = c_0 + alpha*q_0. Quotient coefficient q_j lands in slot
        // start+1+j, so the next pass shifts `start` up by one.
        let mut acc = coeffs[start + len - 1].clone();
        for i in (1..len - 1).rev() {
            let qprev = &coeffs[start + i] + &(alpha * &acc);
            coeffs[start + i + 1] = acc;
            acc = qprev;
        }
        let r = &coeffs[start] + &(alpha * &acc);
        coeffs[start + 1] = acc;
        shifted.push(r);
        start += 1;
        len -= 1;
    }

    let scale = shifted
        .iter()
        .map(Scalar::abs)
        .fold(Scalar::zero(cfg), |acc, v| if v > acc { v } else { acc });
    let floor = &scale * &Scalar::pow10(-((cfg.significant_digits() as i64) - 10), cfg);
    if shifted[..m].iter().any(|b| b.abs() > floor) {
        return Err(TaylorError::NotARoot);
    }
    let lead = shifted[m].clone();
    if lead.abs() <= floor {
        return Err(TaylorError::NotARoot);
    }

    let mut normalized = Vec::with_capacity(order - m + 1);
    for i in 0..=(order - m) {
        let c = match shifted.get(m + i) {
            Some(b) => b / &lead,
            None => Scalar::zero(cfg),
        };
        normalized.push(c);
    }
    Ok(normalized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg100() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    fn dec(s: &str) -> Scalar {
        Scalar::from_decimal(s, cfg100()).expect("test literal parses")
    }

    #[test]
    fn registry_contents() {
        for name in BUILTIN_NAMES {
            let p = builtin(name).expect("registry name resolves");
            assert_eq!(p.name(), name);
        }
        let f3 = builtin("f3").unwrap();
        assert_eq!(f3.multiplicity(), 6);
        assert_eq!(f3.known_root(cfg100()).unwrap(), Scalar::from_i64(3, cfg100()));
        assert!(f3.has_second_derivative());

        let p1 = builtin("p1").unwrap();
        assert_eq!(p1.multiplicity(), 10);
        let roots = p1.complex_roots().expect("basin problem lists roots");
        assert_eq!(roots.len(), 3);
        assert_eq!(roots[0], ComplexScalar::new(1.0, 0.0));

        let demo = builtin("poly_m2_demo").unwrap();
        assert_eq!(demo.multiplicity(), 2);
        assert_eq!(demo.known_root(cfg100()).unwrap(), Scalar::one(cfg100()));
        assert!(
            demo.complex_roots().is_none(),
            "demo polynomial is not a basin problem"
        );

        assert_eq!(
            builtin("f9").unwrap_err(),
            ProblemError::UnknownProblem("f9".to_owned())
        );
    }

    #[test]
    fn known_roots_annihilate_f_and_low_derivatives() {
        // At a root of multiplicity m, f and derivatives up to order m-1
        // vanish; closures exist through order 2, so check min(m-1, 2).
        let c = cfg100();
        let floor = Scalar::pow10(-90, c);
        for name in ["f1", "f2", "f3", "f4", "poly_m2_demo"] {
            let p = builtin(name).unwrap();
            let alpha = p.known_root(c).expect("problem has a known root");
            let levels = p.multiplicity().saturating_sub(1).min(2);
            let fa = p.f(&alpha).unwrap().abs();
            assert!(fa <= floor, "{name}: |f(alpha)| = {fa}");
            if levels >= 1 {
                let dfa = p.df(&alpha).unwrap().abs();
                assert!(dfa <= floor, "{name}: |f'(alpha)| = {dfa}");
            }
            if levels >= 2 {
                let d2fa = p.d2f(&alpha).unwrap().abs();
                assert!(d2fa <= floor, "{name}: |f''(alpha)| = {d2fa}");
            }
        }
    }

    #[test]
    fn multiplicity_is_the_vanishing_order() {
        // f(alpha + h) / h^m tends to a nonzero constant through
        // h = 1e-5, 1e-6, 1e-7 at 100 digits.
        let c = cfg100();
        for name in ["f1", "f2", "f3", "f4"] {
            let p = builtin(name).unwrap();
            let alpha = p.known_root(c).unwrap();
            let m = p.multiplicity() as i32;
            let mut ratios = Vec::new();
            for e in [-5i64, -6, -7] {
                let h = Scalar::pow10(e, c);
                let x = &alpha + &h;
                let ratio = &p.f(&x).unwrap() / &h.powi(m);
                ratios.push(ratio);
            }
            assert!(
                !ratios[2].is_zero(),
                "{name}: limit constant must be nonzero"
            );
            let drift = (&(&ratios[1] / &ratios[2]) - &Scalar::one(c)).abs();
            assert!(
                drift < dec("0.01"),
                "{name}: f(alpha+h)/h^m drifts too fast: {drift}"
            );
        }
    }

    #[test]
    fn polynomial_evaluation_matches_hand_values() {
        // p1 at z=2: q = 7, f = 7^10, f' = 10*7^9*12.
        let p1 = builtin("p1").unwrap();
        let poly = p1.polynomial().unwrap();
        let two = Scalar::from_i64(2, cfg100());
        assert_eq!(
            poly.f(&two).unwrap(),
            Scalar::from_i64(282_475_249, cfg100())
        );
        assert_eq!(
            poly.df(&two).unwrap(),
            Scalar::from_i64(4_842_432_840, cfg100())
        );
        // d2f = 90*q^8*dq^2 + 10*q^9*d2q with q=7, dq=12, d2q=6z=12 at z=2.
        let expect = 90i64 * 5_764_801 * 144 + 10 * 40_353_607 * 12;
        assert_eq!(poly.d2f(&two).unwrap(), Scalar::from_i64(expect, cfg100()));
    }

    #[test]
    fn dense_expansion_of_demo_matches_hand_expansion() {
        let demo = builtin("poly_m2_demo").unwrap();
        let dense = demo.polynomial().unwrap().dense_coefficients();
        let expect: Vec<BigInt> = [2, -3, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
        assert_eq!(dense, expect);
    }

    #[test]
    fn embedded_complex_roots_satisfy_their_polynomials() {
        for name in ["p1", "p2", "p3"] {
            let p = builtin(name).unwrap();
            let poly = p.polynomial().unwrap();
            for (k, root) in poly.roots().iter().enumerate() {
                let residual = poly.q(root).norm();
                assert!(
                    residual < 1e-12,
                    "{name} root {k}: |q(root)| = {residual:e}"
                );
            }
        }
    }

    #[test]
    fn real_and_complex_evaluation_agree_on_the_real_axis() {
        let p1 = builtin("p1").unwrap();
        let poly = p1.polynomial().unwrap();
        let x = 1.375f64;
        let real = poly.f(&Scalar::from_decimal("1.375", cfg100()).unwrap()).unwrap();
        let complex = poly.f(&ComplexScalar::new(x, 0.0)).unwrap();
        assert_eq!(complex.im, 0.0, "real input keeps a real value");
        assert!(
            (real.to_f64() - complex.re).abs() <= 1e-9 * complex.re.abs(),
            "field evaluations diverged: {real} vs {}",
            complex.re
        );
    }

    // Independent oracle for the Taylor shift: binomial-theorem expansion in
    // exact integers, no synthetic division involved.
    fn binomials(n: usize) -> Vec<Vec<BigInt>> {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut row = vec![BigInt::from(1); i + 1];
            for j in 1..i {
                row[j] = &rows[i - 1][j - 1] + &rows[i - 1][j];
            }
            rows.push(row);
        }
        rows
    }

    fn shift_by_one(dense: &[BigInt]) -> Vec<BigInt> {
        // p(x + 1) coefficients: b_k = sum_j a_j C(j, k).
        let ch = binomials(dense.len());
        let mut out = vec![BigInt::from(0); dense.len()];
        for (j, a) in dense.iter().enumerate() {
            for (k, item) in out.iter_mut().enumerate().take(j + 1) {
                *item += a * &ch[j][k];
            }
        }
        out
    }

    #[test]
    fn taylor_coefficients_match_binomial_shift_oracle_for_demo() {
        // (x-1)^2 (x+2) about 1: e^2 (3 + e) => c = (1, 1/3, 0).
        let demo = builtin("poly_m2_demo").unwrap();
        let c = poly_taylor_at_root(
            demo.polynomial().unwrap(),
            &Scalar::one(cfg100()),
            2,
            4,
        )
        .unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c[0], Scalar::one(cfg100()), "c0 is normalized to 1");
        let third = &Scalar::one(cfg100()) / &Scalar::from_i64(3, cfg100());
        let err = (&c[1] - &third).abs();
        assert!(err <= Scalar::pow10(-95, cfg100()), "c1 = 1/3: off by {err}");
        assert!(c[2].abs() <= Scalar::pow10(-95, cfg100()), "c2 = 0");

        // Cross-check against the independent binomial-shift oracle.
        let dense: Vec<BigInt> = [2, -3, 0, 1].iter().map(|&v| BigInt::from(v)).collect();
        let b = shift_by_one(&dense);
        assert_eq!(b[0], BigInt::from(0));
        assert_eq!(b[1], BigInt::from(0));
        assert_eq!(b[2], BigInt::from(3));
        assert_eq!(b[3], BigInt::from(1));
    }

    #[test]
    fn taylor_coefficients_match_binomial_shift_oracle_for_p1() {
        // Oracle: expand (z^3 - 1)^10 by the binomial theorem (coefficients
        // C(10,k)(-1)^(10-k) at degree 3k), shift to z = 1 + e by a second
        // binomial expansion, then normalize exactly.
        let ch = binomials(31);
        let mut dense = vec![BigInt::from(0); 31];
        for k in 0..=10usize {
            let sign = if (10 - k) % 2 == 0 { 1 } else { -1 };
            dense[3 * k] = &ch[10][k] * BigInt::from(sign);
        }
        let b = shift_by_one(&dense);
        for (k, item) in b.iter().enumerate().take(10) {
            assert_eq!(*item, BigInt::from(0), "b_{k} vanishes below multiplicity");
        }
        assert_eq!(b[10], BigInt::from(59049), "b_10 = 3^10");

        let p1 = builtin("p1").unwrap();
        let c = poly_taylor_at_root(
            p1.polynomial().unwrap(),
            &Scalar::one(cfg100()),
            10,
            14,
        )
        .unwrap();
        assert_eq!(c.len(), 5);
        for (i, ci) in c.iter().enumerate() {
            let expect = &Scalar::from_decimal(&b[10 + i].to_string(), cfg100()).unwrap()
                / &Scalar::from_decimal(&b[10].to_string(), cfg100()).unwrap();
            let err = (ci - &expect).abs();
            let bound = &expect.abs() * &Scalar::pow10(-90, cfg100());
            assert!(
                err <= bound || err <= Scalar::pow10(-90, cfg100()),
                "c_{i} disagrees with oracle: {ci} vs {expect}"
            );
        }
        // Spot values: c1 = b11/b10 = 10, c2 = b12/b10 = 145/3.
        assert_eq!(b[11], BigInt::from(590_490));
        assert_eq!(b[12], BigInt::from(2_854_035));
    }

    #[test]
    fn taylor_rejects_non_roots_and_tiny_orders() {
        let demo = builtin("poly_m2_demo").unwrap();
        let poly = demo.polynomial().unwrap();
        assert_eq!(
            poly_taylor_at_root(poly, &dec("1.5"), 2, 4).unwrap_err(),
            TaylorError::NotARoot
        );
        assert_eq!(
            poly_taylor_at_root(poly, &Scalar::one(cfg100()), 2, 3).unwrap_err(),
            TaylorError::OrderTooSmall {
                required: 4,
                given: 3
            }
        );
    }

    #[test]
    fn pure_monomial_expansion_has_no_higher_terms() {
        // (x-2)^3 about 2 => (1, 0, 0).
        let poly = PolynomialProblem::new(vec![-2, 1], 3, Vec::new());
        let c = poly_taylor_at_root(&poly, &Scalar::from_i64(2, cfg100()), 3, 5).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c[0], Scalar::one(cfg100()));
        assert!(c[1].is_zero() && c[2].is_zero(), "monomial has no tail");
    }

    #[test]
    fn shifted_expansion_recomposes_to_the_original_polynomial() {
        // Rebuild sum_k b_k (x - alpha)^k for integer alpha and compare with
        // the dense coefficients exactly (all arithmetic stays integral).
        let p1 = builtin("p1").unwrap();
        let poly = p1.polynomial().unwrap();
        let dense = poly.dense_coefficients();
        let alpha = Scalar::one(cfg100());
        let c = poly_taylor_at_root(poly, &alpha, 10, 30).unwrap();
        let lead = dec("59049");
        // Horner over coefficients b_k = c_{k-10} * b_10 (zeros below e^10).
        let mut b: Vec<Scalar> = vec![Scalar::zero(cfg100()); 31];
        for (i, ci) in c.iter().enumerate() {
            b[10 + i] = ci * &lead;
        }
        // Recomposition per x: evaluate both at a few integer points exactly.
        for xv in [-3i64, -1, 0, 2, 5] {
            let x = Scalar::from_i64(xv, cfg100());
            let e = &x - &alpha;
            let mut acc = Scalar::zero(cfg100());
            for bk in b.iter().rev() {
                acc = &(&acc * &e) + bk;
            }
            let mut direct = Scalar::zero(cfg100());
            for dk in dense.iter().rev() {
                let dk = Scalar::from_decimal(&dk.to_string(), cfg100()).unwrap();
                direct = &(&direct * &x) + &dk;
            }
            assert_eq!(acc, direct, "recomposition differs at x = {xv}");
        }
    }

    proptest! {
        // Polynomial derivative closures agree with a central difference at
        // modest precision — a smoke check that dq/d2q coefficients are the
        // calculus derivatives.
        #[test]
        fn polynomial_derivatives_match_central_differences(xv in -2.0f64..2.0) {
            let p2 = builtin("p2").unwrap();
            let poly = p2.polynomial().unwrap();
            let c = cfg100();
            let x = Scalar::from_decimal(&format!("{xv:.15}"), c).unwrap();
            let h = Scalar::pow10(-30, c);
            let fp = poly.f(&(&x + &h)).unwrap();
            let fm = poly.f(&(&x - &h)).unwrap();
            let numerical = &(&fp - &fm) / &(&h + &h);
            let analytic = poly.df(&x).unwrap();
            let scale = &analytic.abs() + &Scalar::one(c);
            let err = (&numerical - &analytic).abs();
            prop_assert!(err <= &scale * &Scalar::pow10(-25, c),
                "df mismatch at {xv}: {err}");
        }
    }
}
