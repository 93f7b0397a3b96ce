//! Linear symplectic algebra for linearized Poincaré maps.
//!
//! Conventions: phase space is `R^{2m}` with coordinates `(x, ξ)`, the
//! standard form is `J = [[0, -I], [I, 0]]` and `K` is symplectic when
//! `KᵀJK = J`. A quadratic `q = ½ zᵀSz` generates the linear flow
//! `exp(t·(-JS))`.

mod classify;
mod deform;
mod log;
mod nonres;
mod polar;
mod quadratic;
mod schedule;

pub use classify::{classify_spectrum, BlockKind, Branch, SpectralBlock, SpectralClassification, DEFAULT_TOL_UNIT};
pub use deform::{
    composite_deformation, composite_deformation_normal, reparametrize_flow, FlowOptions, ReparametrizedFlow,
};
pub use log::{symplectic_log, SymplecticLog};
pub use nonres::{nonresonance_check, nonresonance_check_exact, ExactAngle, Resonance};
pub use polar::{polar_decompose, PolarDecomposition};
pub use quadratic::{build_quadratic_hamiltonian, QuadraticHamiltonian};
pub use schedule::{DeformationSchedule, Ramp};

use rand::Rng;
use thiserror::Error;

use crate::linalg::{self, LinalgError};
use crate::RMat;

#[derive(Debug, Error)]
pub enum SymplecticError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension {0} is odd")]
    OddDimension(usize),
    #[error("not symplectic: defect {defect:e} exceeds {tol:e}")]
    NotSymplectic { defect: f64, tol: f64 },
    #[error("not symmetric: asymmetry {0:e}")]
    NotSymmetric(f64),
    #[error("not positive definite: smallest eigenvalue {0:e}")]
    NotPositiveDefinite(f64),
    #[error("eigenvalue {re}+{im}i lies in the ambiguous band around the unit circle (||mu|-1| = {distance:e})")]
    Ambiguous { re: f64, im: f64, distance: f64 },
    #[error("eigenvalue {re}+{im}i equals ±1: neither hyperbolic nor nonresonant elliptic")]
    UnitEigenvalue { re: f64, im: f64 },
    #[error("elliptic eigenvalue with angle {alpha} has multiplicity {multiplicity}; only simple elliptic eigenvalues are supported")]
    RepeatedElliptic { alpha: f64, multiplicity: usize },
    #[error("no partner found for eigenvalue {re}+{im}i")]
    Pairing { re: f64, im: f64 },
    #[error("schedule time {0} outside [0, 1]")]
    TimeOutOfRange(f64),
    #[error("integrator step {step:e} at t = {t} rejected with local error estimate {error:e}")]
    StepRejected { t: f64, step: f64, error: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The standard symplectic matrix of size `2m`.
pub fn standard_j(m: usize) -> RMat {
    let mut j = RMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        j[(i, m + i)] = -1.0;
        j[(m + i, i)] = 1.0;
    }
    j
}

/// Frobenius norm of `KᵀJK - J`.
pub fn symplectic_defect(k: &RMat) -> f64 {
    let j = standard_j(k.nrows() / 2);
    linalg::frobenius(&(k.transpose() * &j * k - j))
}

/// Frobenius norm of `HᵀJ + JH`; zero on the symplectic Lie algebra.
pub fn hamiltonian_defect(h: &RMat) -> f64 {
    let j = standard_j(h.nrows() / 2);
    linalg::frobenius(&(h.transpose() * &j + &j * h))
}

/// A real matrix with a certified symplectic defect.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix {
    entries: RMat,
    defect: f64,
}

impl SymplecticMatrix {
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn new(entries: RMat) -> Result<Self, SymplecticError> {
        Self::with_tolerance(entries, Self::DEFAULT_TOL)
    }

    pub fn with_tolerance(entries: RMat, tol: f64) -> Result<Self, SymplecticError> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(SymplecticError::NotSquare { rows, cols });
        }
        if rows % 2 != 0 {
            return Err(SymplecticError::OddDimension(rows));
        }
        let defect = symplectic_defect(&entries);
        if !(defect <= tol) {
            return Err(SymplecticError::NotSymplectic { defect, tol });
        }
        Ok(Self { entries, defect })
    }

    pub fn identity(dim: usize) -> Result<Self, SymplecticError> {
        Self::new(RMat::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn half_dim(&self) -> usize {
        self.dim() / 2
    }

    pub fn entries(&self) -> &RMat {
        &self.entries
    }

    pub fn into_inner(self) -> RMat {
        self.entries
    }

    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn j(&self) -> RMat {
        standard_j(self.half_dim())
    }

    /// `K⁻¹ = -J Kᵀ J`.
    pub fn inverse(&self) -> RMat {
        let j = self.j();
        -(&j * self.entries.transpose() * &j)
    }
}

/// A random element `JS` of the symplectic Lie algebra, `S` symmetric with
/// entries uniform in `[-1, 1]`.
pub fn random_hamiltonian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> RMat {
    let mut s = RMat::zeros(dim, dim);
    for i in 0..dim {
        for k in i..dim {
            let v = rng.random_range(-1.0..=1.0);
            s[(i, k)] = v;
            s[(k, i)] = v;
        }
    }
    standard_j(dim / 2) * s
}

/// `exp` of [`random_hamiltonian`].
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<SymplecticMatrix, SymplecticError> {
    let k = linalg::expm(&random_hamiltonian(rng, dim))?;
    SymplecticMatrix::new(k)
}
