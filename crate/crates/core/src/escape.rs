//! The escape function
//!
//! `G(X, Ξ) = ½ log((1 + |X|²_hyp) / (1 + |Ξ|²_hyp)) + (i/2)(|X_ell|² - |Ξ_ell|²)`
//!
//! and its derivative `H_q G` along linear Hamiltonian flows. Hyperbolic
//! coordinates come first, elliptic ones last.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use thiserror::Error;

use crate::symplectic::{QuadraticHamiltonian, SymplecticMatrix};
use crate::{Real, RMat, C64};

#[derive(Debug, Error)]
pub enum EscapeError {
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("H_q G / envelope = {ratio:e} at {point:?}: positivity fails")]
    Counterexample { point: Vec<f64>, ratio: f64 },
    #[error("unsupported shape: {0}")]
    Unsupported(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EscapeFunction<T> {
    pub dim_hyp: usize,
    pub dim_ell: usize,
    _scalar: std::marker::PhantomData<T>,
}

/// `(∂G/∂X, ∂G/∂Ξ)`.
pub type Gradient<T> = (Vec<Complex<T>>, Vec<Complex<T>>);

impl<T: Real> EscapeFunction<T> {
    pub fn new(dim_hyp: usize, dim_ell: usize) -> Self {
        Self { dim_hyp, dim_ell, _scalar: std::marker::PhantomData }
    }

    pub fn for_hamiltonian(q: &QuadraticHamiltonian) -> Self {
        Self::new(q.n_hyp, q.n_ell)
    }

    pub fn dim(&self) -> usize {
        self.dim_hyp + self.dim_ell
    }

    fn check(&self, x: &[T], xi: &[T]) -> Result<(), EscapeError> {
        for v in [x, xi] {
            if v.len() != self.dim() {
                return Err(EscapeError::Dimension { expected: self.dim(), got: v.len() });
            }
        }
        Ok(())
    }

    fn sq(v: &[T]) -> T {
        v.iter().fold(T::zero(), |acc, &a| acc + a * a)
    }

    pub fn eval(&self, x: &[T], xi: &[T]) -> Result<Complex<T>, EscapeError> {
        self.check(x, xi)?;
        let h = self.dim_hyp;
        let half = T::lit(0.5);
        // ln_1p keeps tiny arguments accurate, which the antisymmetry relies on.
        let re = half * (Self::sq(&x[..h]).ln_1p() - Self::sq(&xi[..h]).ln_1p());
        let im = half * (Self::sq(&x[h..]) - Self::sq(&xi[h..]));
        Ok(Complex::new(re, im))
    }

    /// Closed-form gradient.
    pub fn gradient(&self, x: &[T], xi: &[T]) -> Result<Gradient<T>, EscapeError> {
        self.check(x, xi)?;
        let h = self.dim_hyp;
        let dx = T::one() + Self::sq(&x[..h]);
        let dxi = T::one() + Self::sq(&xi[..h]);
        let gx = (0..self.dim())
            .map(|j| if j < h { Complex::new(x[j] / dx, T::zero()) } else { Complex::new(T::zero(), x[j]) })
            .collect();
        let gxi = (0..self.dim())
            .map(|j| if j < h { Complex::new(-xi[j] / dxi, T::zero()) } else { Complex::new(T::zero(), -xi[j]) })
            .collect();
        Ok((gx, gxi))
    }

    /// Euclidean norm of `∇ Re G`.
    pub fn real_gradient_norm(&self, x: &[T], xi: &[T]) -> Result<T, EscapeError> {
        let (gx, gxi) = self.gradient(x, xi)?;
        Ok(gx.iter().chain(gxi.iter()).fold(T::zero(), |acc, g| acc + g.re * g.re).sqrt())
    }
}

/// `H_q G` at `(X, Ξ)` for the linear field of `q` (hyperbolic part plus
/// elliptic rotation).
pub fn hamiltonian_action(
    q: &QuadraticHamiltonian,
    ef: &EscapeFunction<f64>,
    x: &[f64],
    xi: &[f64],
) -> Result<C64, EscapeError> {
    if ef.dim() != q.half_dim() {
        return Err(EscapeError::Dimension { expected: q.half_dim(), got: ef.dim() });
    }
    let (gx, gxi) = ef.gradient(x, xi)?;
    let h = q.escape_field();
    let m = q.half_dim();
    let z: Vec<f64> = x.iter().chain(xi.iter()).copied().collect();
    let mut out = C64::new(0.0, 0.0);
    for i in 0..2 * m {
        let v: f64 = (0..2 * m).map(|k| h[(i, k)] * z[k]).sum();
        let g = if i < m { gx[i] } else { gxi[i - m] };
        out += g * v;
    }
    Ok(out)
}

/// `|X|²/(1+|X|²) + |Ξ|²/(1+|Ξ|²)` over the hyperbolic coordinates.
pub fn envelope(dim_hyp: usize, x: &[f64], xi: &[f64]) -> f64 {
    let a: f64 = x[..dim_hyp].iter().map(|v| v * v).sum();
    let b: f64 = xi[..dim_hyp].iter().map(|v| v * v).sum();
    a / (1.0 + a) + b / (1.0 + b)
}

#[derive(Clone, Debug, Serialize)]
pub struct PositivityReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `(X, Ξ)` concatenated.
    pub argmin_point: Vec<f64>,
    pub samples: usize,
    pub radius: f64,
}

/// Samples `Re H_q G / envelope` uniformly in the ball of the given radius
/// and along a log-spaced radial sweep out to `10³`.
pub fn verify_positivity<R: Rng + ?Sized>(
    q: &QuadraticHamiltonian,
    samples: usize,
    radius: f64,
    rng: &mut R,
) -> Result<PositivityReport, EscapeError> {
    let ef = EscapeFunction::<f64>::for_hamiltonian(q);
    let m = q.half_dim();
    let d = 2 * m;
    let sweep = (samples / 10).max(1);
    let mut report =
        PositivityReport { min_ratio: f64::INFINITY, max_ratio: 0.0, argmin_point: vec![0.0; d], samples: 0, radius };
    for s in 0..samples + sweep {
        let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = if s < samples {
            radius * rng.random::<f64>().powf(1.0 / d as f64)
        } else {
            let u = (s - samples) as f64 / sweep.max(2).saturating_sub(1) as f64;
            10f64.powf(-3.0 + 6.0 * u)
        };
        let z: Vec<f64> = dir.iter().map(|v| v * r / norm).collect();
        let (x, xi) = z.split_at(m);
        let env = envelope(ef.dim_hyp, x, xi);
        if !(env > 0.0) {
            continue;
        }
        let ratio = hamiltonian_action(q, &ef, x, xi)?.re / env;
        if !(ratio > 0.0) {
            return Err(EscapeError::Counterexample { point: z, ratio });
        }
        report.samples += 1;
        report.max_ratio = report.max_ratio.max(ratio);
        if ratio < report.min_ratio {
            report.min_ratio = ratio;
            report.argmin_point = z;
        }
    }
    Ok(report)
}

/// `H_q G = Σ r_j⁻² x_j² / (1 + |Mx|²) + Σ r_j⁻² ξ_j² / (1 + |M'ξ|²)` in the
/// coordinates `coord_change · (x, ξ)`.
#[derive(Clone, Debug)]
pub struct EscapeNormalForm {
    pub m: RMat,
    pub m_prime: RMat,
    pub r: Vec<f64>,
    pub coord_change: SymplecticMatrix,
}

impl EscapeNormalForm {
    /// Right-hand side of the normal-form identity at the original point.
    pub fn rhs(&self, x: &[f64], xi: &[f64]) -> f64 {
        let n = self.r.len();
        let z = nalgebra::DVector::from_iterator(2 * n, x.iter().chain(xi.iter()).copied());
        let y = self.coord_change.entries() * z;
        let (yx, yxi) = (y.rows(0, n).into_owned(), y.rows(n, n).into_owned());
        let mx = (&self.m * &yx).norm_squared();
        let mxi = (&self.m_prime * &yxi).norm_squared();
        (0..n).map(|j| (yx[j] * yx[j] / (1.0 + mx) + yxi[j] * yxi[j] / (1.0 + mxi)) / (self.r[j] * self.r[j])).sum()
    }

    pub fn smallest_eigenvalues(&self) -> (f64, f64) {
        let min = |a: &RMat| crate::linalg::sym_eigen(a).0.first().copied().unwrap_or(f64::NAN);
        (min(&self.m), min(&self.m_prime))
    }
}

/// Normal form for `q = Σ λ_j x_j ξ_j` with `λ_j > 0`: `r_j = λ_j^{-1/2}`
/// sorted ascending, the sorting permutation as coordinate change and
/// `M = M' = I`, which is forced because `G` is fixed in the original
/// coordinates and permutations preserve `|X|`.
pub fn diagonal_normal_form(q: &QuadraticHamiltonian) -> Result<EscapeNormalForm, EscapeError> {
    let n = q.half_dim();
    if q.n_ell > 0 {
        return Err(EscapeError::Unsupported("elliptic coordinates present; use verify_positivity".into()));
    }
    let scale = q.hyp.amax().max(1.0);
    for i in 0..n {
        for k in 0..n {
            if i != k && q.hyp[(i, k)].abs() > 1e-12 * scale {
                return Err(EscapeError::Unsupported("non-diagonal hyperbolic part; use verify_positivity".into()));
            }
        }
        if !(q.hyp[(i, i)] > 0.0) {
            return Err(EscapeError::Unsupported(format!("exponent {} is not positive", q.hyp[(i, i)])));
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let r_of = |j: usize| q.hyp[(j, j)].powf(-0.5);
    order.sort_by(|&a, &b| r_of(a).total_cmp(&r_of(b)));
    let mut p = RMat::zeros(2 * n, 2 * n);
    for (new, &old) in order.iter().enumerate() {
        p[(new, old)] = 1.0;
        p[(n + new, n + old)] = 1.0;
    }
    let coord_change = SymplecticMatrix::new(p).map_err(|e| EscapeError::Unsupported(e.to_string()))?;
    Ok(EscapeNormalForm {
        m: RMat::identity(n, n),
        m_prime: RMat::identity(n, n),
        r: order.iter().map(|&j| r_of(j)).collect(),
        coord_change,
    })
}
