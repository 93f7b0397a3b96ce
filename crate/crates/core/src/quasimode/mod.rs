//! Quasimodes concentrated on an elliptic closed orbit: Hermite modes,
//! the lattice of eigenvalues `z_{k,β}`, its perturbation series and the
//! Borel-type resummation of that series.

mod borel;
mod hermite;
mod ladder;
mod perturb;
mod residual;

pub use borel::{borel_resum, borel_resum_with_schedule, borel_schedule, BorelReport, Certificate};
pub use hermite::{hermite_functions, hermite_mode, HermiteMode};
pub(crate) use ladder::slope;
pub use ladder::{counting_sweep, exact_model_ladder, exact_model_ladder_rational, CountPoint, LadderEntry, QuasimodeLadder};
pub use perturb::{perturbed_ladder, PerturbedLadder, Perturbation};
pub use residual::residual_certify;

use thiserror::Error;

use crate::weyl::WeylError;

#[derive(Debug, Error)]
pub enum QuasimodeError {
    #[error("Hermite index {beta} at h = {h} exceeds the grid capacity {capacity}")]
    Capacity { beta: usize, h: f64, capacity: usize },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("series term j = {order} for (k = {k}, β = {beta:?}) has size {magnitude:e} > bound {bound:e}")]
    Divergence { k: i64, beta: Vec<usize>, order: usize, magnitude: f64, bound: f64 },
    #[error("cutoff schedule is not increasing at j = {0}")]
    Schedule(usize),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}
