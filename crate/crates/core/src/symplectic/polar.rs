use super::{SymplecticError, SymplecticMatrix};
use crate::linalg;
use crate::RMat;

/// `K = Q P` with `Q` orthogonal and `P` symmetric positive definite; both
/// factors of a symplectic `K` are symplectic.
#[derive(Clone, Debug)]
pub struct PolarDecomposition {
    pub orthogonal: SymplecticMatrix,
    pub positive: SymplecticMatrix,
    /// `σ_max / σ_min` of `K`.
    pub condition: f64,
    pub iterations: usize,
}

const MAX_ITER: usize = 100;

/// Polar factors by the scaled Newton iteration `Q ← ½(γQ + (γQ)⁻ᵀ)`.
pub fn polar_decompose(k: &SymplecticMatrix) -> Result<PolarDecomposition, SymplecticError> {
    let a = k.entries();
    let mut q = a.clone();
    let mut iterations = 0;
    for it in 0..MAX_ITER {
        iterations = it + 1;
        // For symplectic iterates the inverse is explicit, but the iterate
        // only approaches the symplectic group, so invert numerically.
        let inv_t = q.clone().try_inverse().ok_or(linalg::LinalgError::Singular)?.transpose();
        let gamma = (linalg::frobenius(&inv_t) / linalg::frobenius(&q)).sqrt();
        let next = (&q * gamma + inv_t / gamma) * 0.5;
        let delta = linalg::frobenius(&(&next - &q)) / linalg::frobenius(&next);
        q = next;
        if delta < 1e-15 {
            break;
        }
        if delta < 1e-9 {
            // One more unscaled step lands at full precision.
            let inv_t = q.clone().try_inverse().ok_or(linalg::LinalgError::Singular)?.transpose();
            q = (&q + inv_t) * 0.5;
            iterations += 1;
            break;
        }
    }
    let p = q.transpose() * a;
    let p = (&p + p.transpose()) * 0.5;
    let sv = a.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = SymplecticMatrix::DEFAULT_TOL * (1.0 + smax * smax);
    Ok(PolarDecomposition {
        orthogonal: SymplecticMatrix::with_tolerance(q, tol)?,
        positive: SymplecticMatrix::with_tolerance(p, tol)?,
        condition: smax / smin,
        iterations,
    })
}

impl PolarDecomposition {
    pub fn reconstruction_error(&self, k: &SymplecticMatrix) -> f64 {
        linalg::frobenius(&(self.orthogonal.entries() * self.positive.entries() - k.entries()))
    }

    pub fn orthogonality_defect(&self) -> f64 {
        let q = self.orthogonal.entries();
        linalg::frobenius(&(q.transpose() * q - RMat::identity(q.nrows(), q.ncols())))
    }
}
