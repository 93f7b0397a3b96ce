//! Geodesics of `ds² = w(y, z)² dx² + dy² + dz²` on `S¹ × R²` with
//! `w = cosh y · P(z)`, `P(z) = 2z⁴ - z² + 1`.
//!
//! The lines `y = 0, z ∈ {0, ±½}` are closed geodesics. Their linearized
//! return maps are computed from the variational equations and classified
//! by their Floquet multipliers; the effective potential
//! `Ṽ = cosh⁻²y P⁻² - 1` gives the same picture through its Hessian.

mod flow;
mod metric;
mod poincare;
mod potential;

pub use flow::{integrate, integrate_variational, Trajectory, Variational};
pub use metric::{ChristoffelTable, GeodesicState, WarpedMetric};
pub use poincare::{poincare_linearization, PoincareReport, Verdict};
pub use potential::{critical_point, effective_potential, hessian_signature, CriticalPoint};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeodesicError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("orbit does not close: residual {0:e}")]
    NotClosed(f64),
    #[error("Newton iteration from seed ({y}, {z}) did not converge (|∇Ṽ| = {residual:e})")]
    Newton { y: f64, z: f64, residual: f64 },
}
