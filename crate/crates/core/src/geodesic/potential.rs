use serde::Serialize;

use super::{GeodesicError, WarpedMetric};
use crate::Real;

/// `Ṽ(y, z) = cosh⁻²y P(z)⁻² - 1`.
pub fn effective_potential<T: Real>(m: &WarpedMetric<T>, y: T, z: T) -> T {
    let w = m.w(y, z);
    (w * w).recip() - T::one()
}

/// `(∇Ṽ, ∂²Ṽ)` in closed form, from `Ṽ + 1 = C(y) Q(z)`.
fn derivatives<T: Real>(m: &WarpedMetric<T>, y: T, z: T) -> ([T; 2], [[T; 2]; 2]) {
    let two = T::lit(2.0);
    let ch = y.cosh();
    let th = y.tanh();
    let c = (ch * ch).recip();
    let c1 = -two * c * th;
    let c2 = c * (T::lit(4.0) * th * th - two * c);
    let (p, pz, pzz) = (m.p(z), m.p_z(z), m.p_zz(z));
    let q = (p * p).recip();
    let q1 = -two * pz / (p * p * p);
    let q2 = T::lit(6.0) * pz * pz / (p * p * p * p) - two * pzz / (p * p * p);
    ([c1 * q, c * q1], [[c2 * q, c1 * q1], [c1 * q1, c * q2]])
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CriticalPoint<T> {
    pub y: T,
    pub z: T,
    pub hessian: [[T; 2]; 2],
    /// Signs of the Hessian eigenvalues, ascending.
    pub signature: [i8; 2],
    pub iterations: usize,
}

fn eig2<T: Real>(h: &[[T; 2]; 2]) -> [T; 2] {
    let half = T::lit(0.5);
    let tr = h[0][0] + h[1][1];
    let diff = h[0][0] - h[1][1];
    let r = (diff * diff * T::lit(0.25) + h[0][1] * h[1][0]).sqrt();
    [tr * half - r, tr * half + r]
}

/// Signs of the eigenvalues of a symmetric 2×2 Hessian, ascending; zero
/// for eigenvalues below `tol` in size.
pub fn hessian_signature<T: Real>(h: &[[T; 2]; 2], tol: T) -> [i8; 2] {
    eig2(h).map(|l| if l > tol { 1 } else if l < -tol { -1 } else { 0 })
}

/// Damped Newton iteration for `∇Ṽ = 0` from a seed.
pub fn critical_point<T: Real>(m: &WarpedMetric<T>, seed: (T, T)) -> Result<CriticalPoint<T>, GeodesicError> {
    let (mut y, mut z) = seed;
    let tol = T::epsilon() * T::lit(64.0);
    let norm = |g: [T; 2]| (g[0] * g[0] + g[1] * g[1]).sqrt();
    for it in 0..100 {
        let (g, h) = derivatives(m, y, z);
        let gn = norm(g);
        if gn <= tol {
            let signature = hessian_signature(&h, T::lit(1e-6));
            return Ok(CriticalPoint { y, z, hessian: h, signature, iterations: it });
        }
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det == T::zero() {
            break;
        }
        let dy = (h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let dz = (h[0][0] * g[1] - h[1][0] * g[0]) / det;
        let mut t = T::one();
        loop {
            let (ny, nz) = (y - t * dy, z - t * dz);
            if norm(derivatives(m, ny, nz).0) < gn || t < T::lit(1e-6) {
                y = ny;
                z = nz;
                break;
            }
            t = t * T::lit(0.5);
        }
    }
    let residual = norm(derivatives(m, y, z).0).to_f64().unwrap_or(f64::NAN);
    Err(GeodesicError::Newton {
        y: seed.0.to_f64().unwrap_or(f64::NAN),
        z: seed.1.to_f64().unwrap_or(f64::NAN),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_origin() {
        assert_eq!(effective_potential(&WarpedMetric::<f64>::default(), 0.0, 0.0), 0.0);
    }

    #[test]
    fn closed_form_derivatives_match_differences() {
        let m = WarpedMetric::<f64>::default();
        let d = 1e-5;
        for &(y, z) in &[(0.3, -0.2), (-0.7, 0.6), (0.0, 0.5), (1.1, 0.05)] {
            let v = |a: f64, b: f64| effective_potential(&m, a, b);
            let (g, h) = derivatives(&m, y, z);
            assert!((g[0] - (v(y + d, z) - v(y - d, z)) / (2.0 * d)).abs() < 1e-8);
            assert!((g[1] - (v(y, z + d) - v(y, z - d)) / (2.0 * d)).abs() < 1e-8);
            let hyy = (v(y + d, z) - 2.0 * v(y, z) + v(y - d, z)) / (d * d);
            let hzz = (v(y, z + d) - 2.0 * v(y, z) + v(y, z - d)) / (d * d);
            let hyz = (v(y + d, z + d) - v(y + d, z - d) - v(y - d, z + d) + v(y - d, z - d)) / (4.0 * d * d);
            assert!((h[0][0] - hyy).abs() < 1e-4);
            assert!((h[1][1] - hzz).abs() < 1e-4);
            assert!((h[0][1] - hyz).abs() < 1e-4);
        }
    }

    #[test]
    fn critical_points_and_signatures() {
        let m = WarpedMetric::<f64>::default();
        let c = critical_point(&m, (0.05, 0.1)).unwrap();
        assert!(c.y.abs() < 1e-12 && c.z.abs() < 1e-12);
        assert_eq!(c.signature, [-1, 1]);
        for z0 in [0.5, -0.5] {
            let c = critical_point(&m, (0.02, z0 * 0.9)).unwrap();
            assert!((c.z - z0).abs() < 1e-12 && c.y.abs() < 1e-12);
            assert_eq!(c.signature, [-1, -1]);
        }
        // ±1/4 is not critical.
        assert!(derivatives(&m, 0.0, 0.25).0[1].abs() > 0.1);
    }

    #[test]
    fn single_precision_critical_point() {
        let m = WarpedMetric::<f32>::default();
        let c = critical_point(&m, (0.0, 0.45)).unwrap();
        assert!((c.z - 0.5).abs() < 1e-5);
        assert_eq!(c.signature, [-1, -1]);
    }
}
