use super::{build_quadratic_hamiltonian, standard_j, DeformationSchedule, Ramp, SpectralClassification};
use super::{SymplecticError, SymplecticMatrix};
use crate::linalg;
use crate::RMat;

/// Tolerance on the symplectic defect of deformation outputs.
const DEFORM_TOL: f64 = 1e-8;

fn check_time(t: f64) -> Result<(), SymplecticError> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(SymplecticError::TimeOutOfRange(t))
    }
}

/// `κ_t = exp(-ψ₁(t) JF) · exp(ψ₂(t) H_ah) · exp(ψ(t) (B - H_ah))` in
/// normal-form coordinates. `H_ah` lives on the elliptic coordinates where
/// `B` vanishes, so the last two factors commute and `κ_1 = E exp(B)`.
pub fn composite_deformation_normal(
    cls: &SpectralClassification,
    sched: &DeformationSchedule<f64>,
    t: f64,
) -> Result<RMat, SymplecticError> {
    check_time(t)?;
    let q = build_quadratic_hamiltonian(cls);
    let j = standard_j(cls.half_dim());
    let ah = q.hamiltonian_matrix_ah();
    let (p1, p2, p) = (sched.psi1.value(t), sched.psi2.value(t), sched.psi.value(t));
    let e = linalg::expm(&(-(&j * &cls.f) * p1))?;
    let a = linalg::expm(&(&ah * p2))?;
    let b = linalg::expm(&((&cls.b - &ah) * p))?;
    Ok(e * a * b)
}

/// The deformation carried back to the original coordinates.
pub fn composite_deformation(
    cls: &SpectralClassification,
    sched: &DeformationSchedule<f64>,
    t: f64,
) -> Result<SymplecticMatrix, SymplecticError> {
    let k = cls.to_original(&composite_deformation_normal(cls, sched, t)?);
    SymplecticMatrix::with_tolerance(k, DEFORM_TOL)
}

#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    /// Local error tolerance per step, relative to `max(1, ‖Y‖)`.
    pub tol: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { tol: 1e-12, initial_step: 1e-2, min_step: 1e-10, max_steps: 1_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct ReparametrizedFlow {
    /// `ψ(1)` for `ψ' = χ'(t) A(χ(t)) ψ`.
    pub psi_end: RMat,
    /// `φ(1)` for `φ' = A(t) φ`.
    pub phi_end: RMat,
    pub accepted: usize,
    pub rejected: usize,
    pub max_error_estimate: f64,
    pub chi: Ramp<f64>,
}

impl ReparametrizedFlow {
    pub fn endpoint_mismatch(&self) -> f64 {
        linalg::frobenius(&(&self.psi_end - &self.phi_end))
    }
}

fn rk4_step(gen: &dyn Fn(f64) -> RMat, t: f64, y: &RMat, h: f64) -> RMat {
    let k1 = gen(t) * y;
    let k2 = gen(t + 0.5 * h) * (y + &k1 * (0.5 * h));
    let k3 = gen(t + 0.5 * h) * (y + &k2 * (0.5 * h));
    let k4 = gen(t + h) * (y + &k3 * h);
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

struct Integration {
    end: RMat,
    accepted: usize,
    rejected: usize,
    max_err: f64,
}

/// Fundamental matrix of `Y' = G(t) Y` on `[0, 1]` by RK4 with step
/// doubling and Richardson extrapolation.
fn integrate(gen: &dyn Fn(f64) -> RMat, n: usize, opts: &FlowOptions) -> Result<Integration, SymplecticError> {
    let mut y = RMat::identity(n, n);
    let mut t = 0.0;
    let mut h = opts.initial_step;
    let (mut accepted, mut rejected, mut max_err) = (0, 0, 0.0f64);
    while t < 1.0 {
        if accepted + rejected >= opts.max_steps {
            return Err(SymplecticError::StepRejected { t, step: h, error: f64::NAN });
        }
        h = h.min(1.0 - t);
        let full = rk4_step(gen, t, &y, h);
        let half = rk4_step(gen, t, &y, 0.5 * h);
        let two = rk4_step(gen, t + 0.5 * h, &half, 0.5 * h);
        let diff = &two - &full;
        let err = linalg::frobenius(&diff) / 15.0;
        let scale = linalg::frobenius(&y).max(1.0);
        if err <= opts.tol * scale {
            y = two + diff / 15.0;
            t += h;
            accepted += 1;
            max_err = max_err.max(err);
        } else {
            rejected += 1;
            if h <= opts.min_step {
                return Err(SymplecticError::StepRejected { t, step: h, error: err });
            }
        }
        let ratio = if err > 0.0 { 0.9 * (opts.tol * scale / err).powf(0.2) } else { 2.0 };
        h = (h * ratio.clamp(0.2, 2.0)).max(opts.min_step);
    }
    Ok(Integration { end: y, accepted, rejected, max_err })
}

/// Integrates the reparametrized field `B(t) = χ'(t) A(χ(t))` and the
/// original field `A`; both fundamental matrices agree at `t = 1` and `B`
/// is supported inside `(0, 1)`.
pub fn reparametrize_flow(
    a: &dyn Fn(f64) -> RMat,
    dim: usize,
    chi: Option<Ramp<f64>>,
    opts: &FlowOptions,
) -> Result<ReparametrizedFlow, SymplecticError> {
    let chi = chi.unwrap_or(Ramp::new(1.0 / 3.0, 2.0 / 3.0));
    let b = |t: f64| {
        let d = chi.derivative(t);
        if d == 0.0 {
            RMat::zeros(dim, dim)
        } else {
            a(chi.value(t)) * d
        }
    };
    let psi = integrate(&b, dim, opts)?;
    let phi = integrate(a, dim, opts)?;
    Ok(ReparametrizedFlow {
        psi_end: psi.end,
        phi_end: phi.end,
        accepted: psi.accepted + phi.accepted,
        rejected: psi.rejected + phi.rejected,
        max_error_estimate: psi.max_err.max(phi.max_err),
        chi,
    })
}
