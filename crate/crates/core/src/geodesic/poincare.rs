use serde::Serialize;

use super::{integrate_variational, GeodesicError, GeodesicState, WarpedMetric};
use crate::symplectic::symplectic_defect;
use crate::{RMat, C64};

/// Closure error above which an orbit is not treated as closed.
const CLOSURE_TOL: f64 = 1e-6;

/// Multipliers with `| |μ| - 1 |` below this count as elliptic.
const UNIT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Hyperbolic,
    SemiHyperbolic,
    Elliptic,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoincareReport {
    pub z0: f64,
    pub vx0: f64,
    pub period: f64,
    pub step: f64,
    /// Linearized return map on the section `x ≡ 0` in the coordinates
    /// `(y, z, v_y, v_z)`.
    #[serde(serialize_with = "ser_matrix")]
    pub monodromy: RMat,
    pub multipliers: Vec<C64>,
    pub verdict: Verdict,
    pub closure_residual: f64,
    pub symplectic_defect: f64,
    pub determinant: f64,
    pub energy_drift: f64,
}

fn ser_matrix<S: serde::Serializer>(m: &RMat, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for r in 0..m.nrows() {
        seq.serialize_element(&m.row(r).iter().copied().collect::<Vec<f64>>())?;
    }
    seq.end()
}

/// Transverse linearization of the closed geodesic `y = 0, z = z0` over one
/// turn in `x`. The base speed is `vx0`, defaulting to unit energy
/// `vx0 = 1/w(0, z0)`; the period is `1/vx0`.
pub fn poincare_linearization(z0: f64, vx0: Option<f64>, step: f64) -> Result<PoincareReport, GeodesicError> {
    let m = WarpedMetric::<f64>::default();
    let mut start = GeodesicState::on_line(&m, 0.0, z0);
    if let Some(v) = vx0 {
        if !(v > 0.0 && v.is_finite()) {
            return Err(GeodesicError::Params(format!("vx0 = {v} must be positive")));
        }
        start.vx = v;
    }
    let period = 1.0 / start.vx;
    let var = integrate_variational(&m, &start, period, step)?;
    let e = var.end;
    let closure = [e.x - 1.0, e.y, e.z - z0, e.vx - start.vx, e.vy, e.vz].iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if !(closure <= CLOSURE_TOL) {
        return Err(GeodesicError::NotClosed(closure));
    }
    let phi = RMat::from_fn(6, 6, |r, c| var.phi[r][c]);

    // Perturbations of (y, z, vy, vz) on the section, with vx fixed by
    // energy conservation.
    let s0 = start.to_array();
    let (w, wy, wz) = (m.w(0.0, z0), m.w_y(0.0, z0), m.w_z(0.0, z0));
    let v = start.vx;
    let de = [0.0, 2.0 * w * wy * v * v, 2.0 * w * wz * v * v, 2.0 * w * w * v, 2.0 * s0[4], 2.0 * s0[5]];
    let trans = [1usize, 2, 4, 5];
    let mut embed = RMat::zeros(6, 4);
    for (c, &i) in trans.iter().enumerate() {
        embed[(i, c)] = 1.0;
        embed[(3, c)] = -de[i] / de[3];
    }
    // Correct for the change in return time: δT = -δx(T)/ẋ(T).
    let f = RMat::from_row_slice(6, 1, &m.rhs(&e.to_array()));
    let mut proj = RMat::identity(6, 6);
    for r in 0..6 {
        proj[(r, 0)] -= f[(r, 0)] / f[(0, 0)];
    }
    let full = proj * phi * embed;
    let dp = RMat::from_fn(4, 4, |r, c| full[(trans[r], c)]);

    let mut multipliers: Vec<C64> = dp.complex_eigenvalues().iter().copied().collect();
    multipliers.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
    let off = multipliers.iter().filter(|mu| (mu.norm() - 1.0).abs() > UNIT_TOL).count();
    let verdict = match off {
        0 => Verdict::Elliptic,
        4 => Verdict::Hyperbolic,
        _ => Verdict::SemiHyperbolic,
    };
    let defect = symplectic_defect(&dp);
    Ok(PoincareReport {
        z0,
        vx0: start.vx,
        period,
        step,
        determinant: dp.determinant(),
        monodromy: dp,
        multipliers,
        verdict,
        closure_residual: closure,
        symplectic_defect: defect,
        energy_drift: var.energy_drift,
    })
}
