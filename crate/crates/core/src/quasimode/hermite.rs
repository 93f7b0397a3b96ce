use super::QuasimodeError;
use crate::weyl::PhaseGrid;
use crate::C64;

/// Largest Hermite index the grid resolves at this `h`: the mode's classical
/// radius `sqrt(h(2β+1))` must stay within half the position window and
/// half the momentum window.
fn capacity(grid: &PhaseGrid, h: f64) -> usize {
    let lim = (grid.l * grid.l).min(grid.xi_max() * grid.xi_max()) / 4.0;
    (lim / h).floor() as usize
}

/// Normalized Hermite functions `v_0, …, v_nmax` at scale `h = grid.hbar`,
/// sampled on the grid and renormalized in the discrete `L²` norm.
///
/// The three-term recurrence runs on mantissas with a separate log scale, so
/// high indices neither overflow nor lose the Gaussian factor to underflow.
pub fn hermite_functions(grid: &PhaseGrid, n_max: usize) -> Result<Vec<Vec<f64>>, QuasimodeError> {
    let h = grid.hbar;
    let cap = capacity(grid, h);
    if n_max > cap {
        return Err(QuasimodeError::Capacity { beta: n_max, h, capacity: cap });
    }
    let n = grid.n;
    let mut out = vec![vec![0.0; n]; n_max + 1];
    let sh = h.sqrt();
    for k in 0..n {
        let x = grid.x(k);
        let y = x / sh;
        let mut log_scale = -0.25 * (std::f64::consts::PI * h).ln() - 0.5 * y * y;
        let mut prev = 0.0;
        let mut cur = 1.0;
        out[0][k] = log_scale.exp();
        for j in 0..n_max {
            let jf = j as f64;
            let next = (2.0 / (jf + 1.0)).sqrt() * y * cur - (jf / (jf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
            let a = cur.abs().max(prev.abs());
            if a > 1e100 {
                cur /= a;
                prev /= a;
                log_scale += a.ln();
            }
            out[j + 1][k] = cur * log_scale.exp();
        }
    }
    let dx = grid.dx();
    for v in out.iter_mut() {
        let norm = (dx * v.iter().map(|a| a * a).sum::<f64>()).sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
    }
    Ok(out)
}

/// A product Hermite mode `v_β(x) = Π_j v_{β_j}(x_j)`.
#[derive(Clone, Debug)]
pub struct HermiteMode {
    pub beta: Vec<usize>,
    pub h: f64,
    pub grid: PhaseGrid,
    /// One factor per transverse coordinate.
    pub values: Vec<Vec<C64>>,
}

impl HermiteMode {
    /// The factor values as a flat vector on the product grid (row-major in
    /// the coordinate order).
    pub fn tensor(&self) -> Vec<C64> {
        let mut out = vec![C64::new(1.0, 0.0)];
        for f in &self.values {
            out = out.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|f| self.grid.norm(f)).product()
    }
}

pub fn hermite_mode(beta: &[usize], h: f64, grid: &PhaseGrid) -> Result<HermiteMode, QuasimodeError> {
    let grid = grid.with_hbar(h)?;
    let top = beta.iter().copied().max().unwrap_or(0);
    let fns = hermite_functions(&grid, top)?;
    let values = beta.iter().map(|&b| fns[b].iter().map(|&a| C64::new(a, 0.0)).collect()).collect();
    Ok(HermiteMode { beta: beta.to_vec(), h, grid, values })
}
