//! Root finding for nonlinear equations whose root multiplicity is known.
//!
//! The centerpiece is a two-stage Newton–Secant iteration damped by the
//! multiplicity-dependent parameter θ(m) = ((m−1)/m)^(m−1), which restores
//! third-order convergence on multiple roots. Alongside it live the classical
//! comparison kernels (Schröder, Osada, Dong, Chun) plus plain Newton–Secant,
//! a configurable-precision iteration driver with order-of-convergence
//! diagnostics, and a complex-plane basin-of-attraction renderer.
//!
//! Module map:
//! - [`numerics`]: the real (MPFR-backed, configurable precision) and complex
//!   (binary64) number fields all kernels are generic over.
//! - [`problems`]: the builtin target functions, polynomial evaluation with
//!   exact derivatives, and Taylor-shift coefficient extraction.
//! - [`methods`]: one-step iteration kernels for all six methods.
//! - [`solver`]: the iteration driver, trace capture, COC/ACOC estimators,
//!   and the asymptotic error-constant checks.
//! - [`basins`]: deterministic parallel rendering of basins of attraction to
//!   binary PPM images with per-basin statistics.

pub mod basins;
pub mod methods;
pub mod numerics;
pub mod problems;
pub mod solver;
