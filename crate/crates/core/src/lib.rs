//! Numerical tools for model monodromy operators attached to closed
//! orbits with hyperbolic and elliptic directions.
//!
//! The crate is split along the mathematical pipeline:
//!
//! * [`symplectic`]: polar decomposition, logarithms and the spectral normal
//!   form `dS = exp(-JF) exp(B)` of a linearized Poincaré map, together with
//!   the quadratic Hamiltonians and deformation schedules built from it.
//! * [`escape`]: the escape function `G` and positivity of `H_q G`.
//! * [`weyl`]: discrete Weyl quantization on a periodic phase-space grid,
//!   operator exponentials and matrix-free propagators.
//! * [`monodromy`]: the hyperbolic and elliptic model monodromy operators,
//!   the rescaling `T_{h,ĥ}` and the weighted contraction estimate.
//! * [`quasimode`]: Hermite modes, eigenvalue ladders, the perturbation
//!   series for `z_{k,β}` and its Borel-type resummation.
//! * [`geodesic`]: a warped metric on `S¹ × R²` with three closed geodesics
//!   and their Poincaré/Floquet classification.
//!
//! Dense linear algebra runs in `f64`. Scalar-only pieces (schedules, the
//! escape function, the geodesic integrator, Borel sums) are generic over
//! [`Real`], which is implemented for `f32` and `f64`.

pub mod escape;
pub mod geodesic;
pub mod linalg;
pub mod monodromy;
pub mod quasimode;
pub mod symplectic;
pub mod weyl;

use std::fmt::{Debug, Display};

pub use num_complex::Complex;

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Floating point scalar accepted by the generic parts of the crate.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x).expect("f64 literal fits every Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C64 = Complex<f64>;
pub type RMat = nalgebra::DMatrix<f64>;
pub type CMat = nalgebra::DMatrix<C64>;

pub type Schedule = symplectic::DeformationSchedule<f64>;
pub type Schedule32 = symplectic::DeformationSchedule<f32>;

pub type Metric = geodesic::WarpedMetric<f64>;
pub type Metric32 = geodesic::WarpedMetric<f32>;
pub type State = geodesic::GeodesicState<f64>;
pub type State32 = geodesic::GeodesicState<f32>;
