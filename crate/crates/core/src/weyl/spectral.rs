use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::{PhaseGrid, WeylError};
use crate::linalg;
use crate::{CMat, C64};

/// Something that can be applied to a grid function.
pub trait LinearAction: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, u: &[C64]) -> Vec<C64>;

    /// Upper bound on the spectral radius.
    fn spectral_bound(&self) -> f64;
}

impl LinearAction for CMat {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, u: &[C64]) -> Vec<C64> {
        (0..self.nrows()).map(|i| self.row(i).iter().zip(u).map(|(a, b)| a * b).sum()).collect()
    }

    fn spectral_bound(&self) -> f64 {
        linalg::norm1(self)
    }
}

/// `Op_ħ^w(f(x) + g(ξ) + c·xξ)` applied with FFTs; the `xξ` term is
/// `½(X D + D X)`, which coincides with its dense Weyl matrix.
#[derive(Clone)]
pub struct SpectralOperator {
    grid: PhaseGrid,
    fx: Vec<f64>,
    gxi: Vec<f64>,
    xis: Vec<f64>,
    c: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralOperator").field("grid", &self.grid).field("c", &self.c).finish_non_exhaustive()
    }
}

impl SpectralOperator {
    pub fn new(grid: &PhaseGrid, f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, c: f64) -> Result<Self, WeylError> {
        let fx: Vec<f64> = grid.positions().into_iter().map(f).collect();
        let xis = grid.momenta();
        let gxi: Vec<f64> = xis.iter().map(|&x| g(x)).collect();
        if fx.iter().chain(&gxi).any(|v| !v.is_finite()) || !c.is_finite() {
            return Err(WeylError::NotANumber { x: f64::NAN, xi: f64::NAN });
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            grid: *grid,
            fx,
            gxi,
            xis,
            c,
            fwd: planner.plan_fft_forward(grid.n),
            inv: planner.plan_fft_inverse(grid.n),
        })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.fx.iter_mut().for_each(|v| *v *= s);
        out.gxi.iter_mut().for_each(|v| *v *= s);
        out.c *= s;
        out
    }

    fn multiplier(&self, u: &[C64], m: &[f64]) -> Vec<C64> {
        let n = self.grid.n;
        let mut w: Vec<C64> = u.iter().enumerate().map(|(j, &z)| if j % 2 == 0 { z } else { -z }).collect();
        self.fwd.process(&mut w);
        for (z, &g) in w.iter_mut().zip(m) {
            *z *= g;
        }
        self.inv.process(&mut w);
        let s = 1.0 / n as f64;
        w.iter().enumerate().map(|(i, &z)| if i % 2 == 0 { z * s } else { -z * s }).collect()
    }

    /// Dense matrix of the same operator, column by column.
    pub fn to_dense(&self) -> CMat {
        let n = self.grid.n;
        let mut out = CMat::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            let col = self.apply(&e);
            out.column_mut(j).copy_from_slice(&col);
            e[j] = C64::new(0.0, 0.0);
        }
        out
    }
}

impl LinearAction for SpectralOperator {
    fn dim(&self) -> usize {
        self.grid.n
    }

    fn apply(&self, u: &[C64]) -> Vec<C64> {
        let mut out: Vec<C64> = u.iter().zip(&self.fx).map(|(z, f)| z * f).collect();
        if self.gxi.iter().any(|&g| g != 0.0) {
            for (o, v) in out.iter_mut().zip(self.multiplier(u, &self.gxi)) {
                *o += v;
            }
        }
        if self.c != 0.0 {
            let xs = self.grid.positions();
            let du = self.multiplier(u, &self.xis);
            let xu: Vec<C64> = u.iter().zip(&xs).map(|(z, x)| z * x).collect();
            let dxu = self.multiplier(&xu, &self.xis);
            for i in 0..u.len() {
                out[i] += (du[i] * xs[i] + dxu[i]) * (0.5 * self.c);
            }
        }
        out
    }

    fn spectral_bound(&self) -> f64 {
        let amax = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        amax(&self.fx) + amax(&self.gxi) + self.c.abs() * self.grid.l * self.grid.xi_max()
    }
}

/// `J_0(x), …, J_kmax(x)` by Miller's backward recurrence normalized with
/// `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j_sequence(x: f64, kmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let start = kmax.max(ax.ceil() as usize) + 60 + (10.0 * ax.cbrt()).ceil() as usize;
    let start = start + start % 2;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / ax * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    let norm: f64 = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    for (k, o) in out.iter_mut().enumerate() {
        let v = vals[k] / norm;
        // J_k(-x) = (-1)^k J_k(x)
        *o = if x < 0.0 && k % 2 == 1 { -v } else { v };
    }
    out
}

/// `exp(-iτA) v` for Hermitian `A` by the Chebyshev expansion on
/// `[-R, R]`, `R` the operator's spectral bound. Returns the vector and the
/// number of terms used.
pub fn chebyshev_propagate(op: &dyn LinearAction, tau: f64, v: &[C64], tol: f64) -> (Vec<C64>, usize) {
    let r = op.spectral_bound() * (1.0 + 1e-12);
    if r == 0.0 || tau == 0.0 {
        return (v.to_vec(), 0);
    }
    let x = tau * r;
    let kmax = (x.abs().ceil() as usize) + 40 + (20.0 * x.abs().cbrt()).ceil() as usize;
    let j = bessel_j_sequence(x, kmax);
    // Last index that still matters.
    let mut last = kmax;
    while last > x.abs() as usize && j[last].abs() < tol * 1e-3 {
        last -= 1;
    }
    let scaled = |u: &[C64]| -> Vec<C64> { op.apply(u).into_iter().map(|z| z / r).collect() };
    let mut t_prev = v.to_vec();
    let mut out: Vec<C64> = v.iter().map(|z| z * j[0]).collect();
    if last == 0 {
        return (out, 1);
    }
    let mut t_cur = scaled(v);
    let phase = [C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0)];
    for (o, t) in out.iter_mut().zip(&t_cur) {
        *o += t * (phase[1] * 2.0 * j[1]);
    }
    for k in 2..=last {
        let at = scaled(&t_cur);
        let t_next: Vec<C64> = at.iter().zip(&t_prev).map(|(a, p)| a * 2.0 - p).collect();
        let c = phase[k % 4] * (2.0 * j[k]);
        for (o, t) in out.iter_mut().zip(&t_next) {
            *o += t * c;
        }
        t_prev = std::mem::replace(&mut t_cur, t_next);
    }
    (out, last + 1)
}
