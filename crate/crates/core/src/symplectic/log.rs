use nalgebra::DVector;

use super::{standard_j, SymplecticError, SymplecticMatrix};
use crate::linalg;
use crate::RMat;

/// Real logarithm of a positive-definite symplectic matrix.
#[derive(Clone, Debug)]
pub struct SymplecticLog {
    /// Symmetric element of the symplectic Lie algebra with `exp(B) = A`.
    pub generator: RMat,
    /// `(μ, log μ)` for every eigenvalue, paired so that the log of `μ⁻¹`
    /// is the exact negative of the log of `μ`.
    pub branches: Vec<(f64, f64)>,
    /// Condition number `μ_max / μ_min` of `A`.
    pub condition: f64,
}

/// `B = log A` through the symmetric eigendecomposition of `A`.
pub fn symplectic_log(a: &SymplecticMatrix) -> Result<SymplecticLog, SymplecticError> {
    let m = a.entries();
    let scale = linalg::frobenius(m).max(1.0);
    let asym = linalg::frobenius(&(m - m.transpose()));
    if asym > 1e-10 * scale {
        return Err(SymplecticError::NotSymmetric(asym));
    }
    let (vals, vecs) = linalg::sym_eigen(m);
    let n = vals.len();
    if !(vals[0] > 0.0) {
        return Err(SymplecticError::NotPositiveDefinite(vals[0]));
    }
    // Ascending order pairs the i-th smallest with the i-th largest
    // eigenvalue, which are reciprocal for a symplectic matrix.
    let mut logs = vec![0.0; n];
    for i in 0..n / 2 {
        let hi = n - 1 - i;
        let l = 0.5 * (vals[hi].ln() - vals[i].ln());
        logs[hi] = l;
        logs[i] = -l;
    }
    let d = RMat::from_diagonal(&DVector::from_vec(logs.clone()));
    let b = &vecs * d * vecs.transpose();
    // Project onto the Lie algebra: X ↦ ½(X + J Xᵀ J), then symmetrize.
    let j = standard_j(n / 2);
    let b = (&b + &j * b.transpose() * &j) * 0.5;
    let b = (&b + b.transpose()) * 0.5;
    Ok(SymplecticLog {
        generator: b,
        branches: vals.iter().cloned().zip(logs).collect(),
        condition: vals[n - 1] / vals[0],
    })
}
