use rustfft::FftPlanner;

use super::{hermite_mode, QuasimodeError};
use crate::weyl::{LinearAction, PhaseGrid, SpectralOperator};
use crate::C64;

/// Applies `op` along axis `axis` of a row-major array with `d` axes of
/// length `n`.
fn apply_axis(op: &SpectralOperator, u: &[C64], n: usize, d: usize, axis: usize) -> Vec<C64> {
    let stride = n.pow((d - 1 - axis) as u32);
    let mut out = vec![C64::new(0.0, 0.0); u.len()];
    let mut line = vec![C64::new(0.0, 0.0); n];
    for start in 0..u.len() {
        if (start / stride) % n != 0 {
            continue;
        }
        for (i, l) in line.iter_mut().enumerate() {
            *l = u[start + i * stride];
        }
        for (i, v) in op.apply(&line).into_iter().enumerate() {
            out[start + i * stride] = v;
        }
    }
    out
}

/// `‖(hD_t + Q - z) u‖ / ‖u‖` for `u(t, x) = e^{2πikt} v_β(x)` on a
/// `n_t × N^d` product grid, with `Q = Σ_j (α_j/2) Op_h^w(x_j² + ξ_j²)` and
/// `z = Σ_j (α_j/2)(2β_j + 1) h + 2πkh + detuning`.
///
/// `hD_t` is applied by FFT in `t` and `Q` by FFT in each `x_j`, so the
/// residual measures the discrete operator rather than the formula for `z`.
pub fn residual_certify(
    alphas: &[f64],
    beta: &[usize],
    k: i64,
    h: f64,
    grid: &PhaseGrid,
    n_t: usize,
    detuning: f64,
) -> Result<f64, QuasimodeError> {
    let d = alphas.len();
    if d == 0 || d > 2 || beta.len() != d {
        return Err(QuasimodeError::Params("one or two transverse dimensions with matching β".into()));
    }
    if n_t == 0 || (k.unsigned_abs() as usize) >= n_t.div_ceil(2) {
        return Err(QuasimodeError::Params(format!("{n_t} time samples cannot resolve k = {k}")));
    }
    let mode = hermite_mode(beta, h, grid)?;
    let g = mode.grid;
    let n = g.n;
    let v = mode.tensor();
    let m = v.len();
    let tau = std::f64::consts::TAU;
    let mut u = vec![C64::new(0.0, 0.0); n_t * m];
    for it in 0..n_t {
        let phase = C64::from_polar(1.0, tau * k as f64 * it as f64 / n_t as f64);
        for (j, &vj) in v.iter().enumerate() {
            u[it * m + j] = phase * vj;
        }
    }
    let z = alphas.iter().zip(beta).map(|(a, &b)| 0.5 * a * (2 * b + 1) as f64 * h).sum::<f64>()
        + tau * k as f64 * h
        + detuning;
    let mut r: Vec<C64> = u.iter().map(|w| -w * z).collect();

    // hD_t along the time axis.
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n_t);
    let inv = planner.plan_fft_inverse(n_t);
    let mut col = vec![C64::new(0.0, 0.0); n_t];
    for j in 0..m {
        for it in 0..n_t {
            col[it] = u[it * m + j];
        }
        fwd.process(&mut col);
        for (q, c) in col.iter_mut().enumerate() {
            let freq = if q <= n_t / 2 { q as f64 } else { q as f64 - n_t as f64 };
            *c *= h * tau * freq / n_t as f64;
        }
        inv.process(&mut col);
        for it in 0..n_t {
            r[it * m + j] += col[it];
        }
    }

    // Q slice by slice.
    for (axis, &a) in alphas.iter().enumerate() {
        let op = SpectralOperator::new(&g, |x| 0.5 * a * x * x, |xi| 0.5 * a * xi * xi, 0.0)?;
        for it in 0..n_t {
            let q = apply_axis(&op, &u[it * m..(it + 1) * m], n, d, axis);
            for (ri, qi) in r[it * m..(it + 1) * m].iter_mut().zip(q) {
                *ri += qi;
            }
        }
    }
    let nr: f64 = r.iter().map(|c| c.norm_sqr()).sum();
    let nu: f64 = u.iter().map(|c| c.norm_sqr()).sum();
    Ok((nr / nu).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_mode_has_tiny_residual() {
        let g = PhaseGrid::new(4.0, 256, 1.0).unwrap();
        let r = residual_certify(&[1.0], &[3], 2, 0.05, &g, 16, 0.0).unwrap();
        assert!(r < 1e-9, "{r}");
    }

    #[test]
    fn detuning_is_seen_exactly() {
        let g = PhaseGrid::new(4.0, 256, 1.0).unwrap();
        let r = residual_certify(&[1.0], &[3], -1, 0.05, &g, 16, 1e-3).unwrap();
        assert!((r - 1e-3).abs() < 1e-9, "{r}");
    }

    #[test]
    fn two_dimensions() {
        let g = PhaseGrid::new(4.0, 64, 1.0).unwrap();
        let r = residual_certify(&[1.0, 2.0f64.sqrt()], &[1, 2], 1, 0.1, &g, 8, 0.0).unwrap();
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn refusals() {
        let g = PhaseGrid::new(1.0, 64, 1.0).unwrap();
        assert!(matches!(residual_certify(&[1.0], &[500], 0, 0.01, &g, 8, 0.0), Err(QuasimodeError::Capacity { .. })));
        assert!(residual_certify(&[1.0], &[0], 9, 0.01, &g, 8, 0.0).is_err());
    }
}
