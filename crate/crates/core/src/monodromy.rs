//! Model monodromy operators.
//!
//! Near a hyperbolic orbit the model symbol is `τ + λxξ`; its time-one
//! propagator is `M = exp(-(i/h) Op_h^w(λxξ))`. After the rescaling
//! `T_{h,ĥ}` this becomes `exp(-(i/h) Op_ĥ^w(λ(h/ĥ)XΞ))` on the `ĥ` grid,
//! which is conjugated by `exp(±s Op_ĥ^w(Re G))` to obtain a contraction on
//! states localized near the origin.
//!
//! Near an elliptic orbit the model is `Q = Op_h^w((α/2)(x² + ξ²))` and
//! `M(z) = exp(-(i/h)(Q - z))`.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::escape::EscapeFunction;
use crate::linalg::{self, LinalgError};
use crate::quasimode::{hermite_functions, QuasimodeError};
use crate::symplectic::{nonresonance_check, Resonance};
use crate::weyl::{
    chebyshev_propagate, hermitian_function, op_exponential, quantize, real_symbol, PhaseGrid, SpectralOperator,
    WeylError,
};
use crate::{CMat, C64};

/// Largest unitarity defect `‖M*M - I‖_F` accepted for a model monodromy.
pub const UNITARITY_TOL: f64 = 1e-9;

/// Relative energy a state may lose to aliasing or truncation when rescaled.
const RESCALE_LEAK_TOL: f64 = 1e-12;

const NONRESONANCE_BOUND: i64 = 50;

#[derive(Debug, Error)]
pub enum MonodromyError {
    #[error("invalid model parameters: {0}")]
    Params(String),
    #[error("elliptic angle is resonant: {0:?}")]
    Resonant(Resonance),
    #[error("rescaling would alias: {0}")]
    Aliasing(String),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Quasimode(#[from] QuasimodeError),
    #[error("no contraction at (h, ĥ, s) = ({h}, {hbar_tilde}, {s}): r = {r}")]
    Contraction { h: f64, hbar_tilde: f64, s: f64, r: f64 },
    #[error("monodromy is not unitary: defect {0:e}")]
    Unitarity(f64),
}

/// Parameters of the model problems. `grid` is the `ĥ` grid for the
/// hyperbolic model; its `hbar` field is ignored in favour of `hbar_tilde`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub lambda: f64,
    pub alpha: f64,
    pub h: f64,
    pub hbar_tilde: f64,
    pub s: f64,
    pub grid: PhaseGrid,
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), MonodromyError> {
        let bad = |m: String| Err(MonodromyError::Params(m));
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda = {} must be nonnegative", self.lambda));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha = {} must be positive", self.alpha));
        }
        if !(self.h > 0.0 && self.h <= self.hbar_tilde && self.hbar_tilde <= 1.0) {
            return bad(format!("need 0 < h ≤ ĥ ≤ 1 (h = {}, ĥ = {})", self.h, self.hbar_tilde));
        }
        if !(self.s.abs() <= 0.5) {
            return bad(format!("|s| = {} exceeds 1/2", self.s.abs()));
        }
        Ok(())
    }

    /// The `ĥ` grid.
    pub fn tilde_grid(&self) -> Result<PhaseGrid, MonodromyError> {
        Ok(self.grid.with_hbar(self.hbar_tilde)?)
    }

    /// `(h/ĥ)^{1/2}`.
    pub fn dilation(&self) -> f64 {
        (self.h / self.hbar_tilde).sqrt()
    }

    /// The `h` grid matched to the `ĥ` grid: same `N`, window scaled by the
    /// dilation, so that the rescaling is a pointwise multiplication.
    pub fn matched_h_grid(&self) -> Result<PhaseGrid, MonodromyError> {
        Ok(PhaseGrid::new(self.grid.l * self.dilation(), self.grid.n, self.h)?)
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            alpha: 1.0,
            h: 0.01,
            hbar_tilde: 0.2,
            s: 0.3,
            grid: PhaseGrid { l: 8.0, n: 512, hbar: 0.2 },
        }
    }
}

/// Outcome of [`conjugated_contraction`] for one parameter set.
#[derive(Clone, Debug, Serialize)]
pub struct MonodromyResult {
    pub h: f64,
    pub hbar_tilde: f64,
    pub s: f64,
    /// `‖e^{-sG} M e^{sG} Π‖`, `Π` the projector onto the localized band.
    pub norm_conjugated: f64,
    /// `‖e^{-sG} M^{-1} e^{sG} Π‖`.
    pub norm_inverse_conjugated: f64,
    /// `min Re⟨(I - M̃)u, u⟩/‖u‖² - (1 - r)` over random band states.
    pub band_margin: f64,
    pub band_dim: usize,
    pub unitarity_defect: f64,
    /// Filled in by [`contraction_sweep`].
    pub gap_constant: Option<f64>,
    pub gap_exponent: Option<f64>,
}

impl MonodromyResult {
    pub fn contracts(&self) -> bool {
        self.norm_conjugated < 1.0
    }
}

pub fn unitarity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    linalg::frobenius(&(linalg::cmul_adjoint(m, m) - CMat::identity(n, n)))
}

fn dft_coefficients(u: &[C64]) -> Vec<C64> {
    let n = u.len();
    let mut w = u.to_vec();
    rustfft::FftPlanner::new().plan_fft_forward(n).process(&mut w);
    w.iter_mut().for_each(|z| *z /= n as f64);
    w
}

fn signed_index(q: usize, n: usize) -> f64 {
    if q < n / 2 {
        q as f64
    } else if q > n / 2 {
        q as f64 - n as f64
    } else {
        // The Nyquist mode is split evenly.
        0.0
    }
}

/// `(T_{h,ĥ} u)(X) = c^{1/2} u(cX)`, `c = (h/ĥ)^{1/2}`, carried from the
/// grid `from` (width `L_h`) to the grid `to` (width `L̂`).
///
/// When `L_h = c L̂` and the sizes agree this is a multiplication by
/// `c^{1/2}`; otherwise `u` is evaluated at `c X_k` by trigonometric
/// interpolation. States whose energy would land beyond the target
/// Nyquist frequency, or that have mass outside `[-cL̂, cL̂]`, are refused.
pub fn rescale_state(
    u: &[C64],
    from: &PhaseGrid,
    to: &PhaseGrid,
    h: f64,
    hbar_tilde: f64,
) -> Result<Vec<C64>, MonodromyError> {
    if u.len() != from.n {
        return Err(MonodromyError::Params(format!("state has {} samples, grid has {}", u.len(), from.n)));
    }
    if !(h > 0.0 && hbar_tilde > 0.0) {
        return Err(MonodromyError::Params("h and ĥ must be positive".into()));
    }
    let c = (h / hbar_tilde).sqrt();
    let amp = c.sqrt();
    let matched = from.n == to.n && ((from.l - c * to.l) / from.l).abs() < 1e-14;
    if matched {
        return Ok(u.iter().map(|z| z * amp).collect());
    }
    let total: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return Ok(vec![C64::new(0.0, 0.0); to.n]);
    }
    // Mass that the target window cannot see.
    let reach = c * to.l;
    let outside: f64 = u.iter().enumerate().filter(|(k, _)| from.x(*k).abs() > reach).map(|(_, z)| z.norm_sqr()).sum();
    if outside > RESCALE_LEAK_TOL * total {
        return Err(MonodromyError::Aliasing(format!(
            "{:.3e} of the mass lies outside |x| ≤ {reach}",
            outside / total
        )));
    }
    let coef = dft_coefficients(u);
    let n = from.n;
    let k_target = std::f64::consts::PI * to.n as f64 / (2.0 * to.l);
    let kappa = |q: usize| std::f64::consts::PI * signed_index(q, n) / from.l;
    let high: f64 = coef.iter().enumerate().filter(|(q, _)| kappa(*q).abs() * c >= k_target).map(|(_, z)| z.norm_sqr()).sum();
    let energy: f64 = coef.iter().map(|z| z.norm_sqr()).sum();
    if high > RESCALE_LEAK_TOL * energy {
        return Err(MonodromyError::Aliasing(format!(
            "{:.3e} of the energy exceeds the target Nyquist frequency",
            high / energy
        )));
    }
    let out = (0..to.n)
        .map(|k| {
            let y = c * to.x(k) + from.l;
            let mut acc = C64::new(0.0, 0.0);
            for (q, a) in coef.iter().enumerate() {
                let s = signed_index(q, n);
                if q == n / 2 {
                    acc += a * (std::f64::consts::PI * n as f64 / 2.0 * y / from.l).cos();
                } else {
                    acc += a * C64::from_polar(1.0, std::f64::consts::PI * s * y / from.l);
                }
            }
            acc * amp
        })
        .collect();
    Ok(out)
}

/// `exp(-(i t/h) Op_ĥ^w(λ(h/ĥ)XΞ))` on the `ĥ` grid.
pub fn hyperbolic_flow(p: &ModelParams, t: f64) -> Result<CMat, MonodromyError> {
    p.validate()?;
    let g = p.tilde_grid()?;
    let coef = p.lambda * p.h / p.hbar_tilde;
    let q1 = quantize(&real_symbol("lambda*(h/hbar)*X*Xi", move |x, xi| coef * x * xi), &g)?;
    let m = op_exponential(&q1.matrix, C64::new(0.0, -t / p.h))?;
    let defect = unitarity_defect(&m);
    if defect > UNITARITY_TOL {
        return Err(MonodromyError::Unitarity(defect));
    }
    Ok(m)
}

pub fn build_hyperbolic_monodromy(p: &ModelParams) -> Result<CMat, MonodromyError> {
    hyperbolic_flow(p, 1.0)
}

/// `exp(±s Op_ĥ^w(Re G))` by the eigendecomposition of the Hermitian
/// quantized weight.
pub fn escape_weights(p: &ModelParams) -> Result<(CMat, CMat), MonodromyError> {
    let g = p.tilde_grid()?;
    let esc = EscapeFunction::<f64>::new(1, 0);
    let gw = quantize(&real_symbol("Re G", move |x, xi| esc.eval(&[x], &[xi]).map(|z| z.re).unwrap_or(f64::NAN)), &g)?;
    let s = p.s;
    let minus = hermitian_function(&gw.matrix, |v| C64::new((-s * v).exp(), 0.0))?;
    let plus = hermitian_function(&gw.matrix, |v| C64::new((s * v).exp(), 0.0))?;
    Ok((minus, plus))
}

/// Orthonormal eigenvectors of `Op_ĥ^w(exp(-(X² + Ξ²)/2))` with eigenvalue
/// at least ½: the states microlocalized near the origin.
pub fn localized_band(grid: &PhaseGrid) -> Result<CMat, MonodromyError> {
    let cut = quantize(&real_symbol("exp(-(X^2+Xi^2)/2)", |x, xi| (-(x * x + xi * xi) / 2.0).exp()), grid)?;
    let (vals, vecs) = linalg::herm_eigen(&cut.matrix);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] >= 0.5).collect();
    if keep.is_empty() {
        return Err(MonodromyError::Params("no localized states at this ĥ".into()));
    }
    Ok(CMat::from_fn(grid.n, keep.len(), |r, c| vecs[(r, keep[c])]))
}

/// Norm of the conjugated monodromy on the localized band, the same for
/// `M⁻¹`, and a check of `Re⟨(I - M̃)u, u⟩ ≥ (1 - r)‖u‖²` on seeded random
/// band states.
pub fn conjugated_contraction(p: &ModelParams) -> Result<MonodromyResult, MonodromyError> {
    conjugated_contraction_seeded(p, 0x5eed)
}

/// [`conjugated_contraction`] with the seed of the random band states.
pub fn conjugated_contraction_seeded(p: &ModelParams, seed: u64) -> Result<MonodromyResult, MonodromyError> {
    p.validate()?;
    let m = build_hyperbolic_monodromy(p)?;
    let defect = unitarity_defect(&m);
    let (wm, wp) = escape_weights(p)?;
    let v = localized_band(&p.tilde_grid()?)?;
    let wpv = linalg::cmul(&wp, &v);
    let mt_v = linalg::cmul(&wm, &linalg::cmul(&m, &wpv));
    let mi_v = linalg::cmul(&wm, &linalg::cmul(&m.adjoint(), &wpv));
    let r = linalg::spectral_norm(&mt_v);
    let r_inv = linalg::spectral_norm(&mi_v);

    // Rayleigh quotients on the band: Vᴴ M̃ V.
    let small = linalg::cmul_adjoint(&v, &mt_v);
    let k = small.nrows();
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut margin = f64::INFINITY;
    for trial in 0..(16 + k) {
        let c: Vec<C64> = if trial < k {
            (0..k).map(|i| C64::new(if i == trial { 1.0 } else { 0.0 }, 0.0)).collect()
        } else {
            (0..k).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
        };
        let nc: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        let mut q = C64::new(0.0, 0.0);
        for i in 0..k {
            for j in 0..k {
                q += c[i].conj() * small[(i, j)] * c[j];
            }
        }
        let rayleigh = 1.0 - q.re / nc;
        margin = margin.min(rayleigh - (1.0 - r));
    }
    Ok(MonodromyResult {
        h: p.h,
        hbar_tilde: p.hbar_tilde,
        s: p.s,
        norm_conjugated: r,
        norm_inverse_conjugated: r_inv,
        band_margin: margin,
        band_dim: k,
        unitarity_defect: defect,
        gap_constant: None,
        gap_exponent: None,
    })
}

/// [`conjugated_contraction`] that fails unless `r < 1`.
pub fn require_contraction(p: &ModelParams) -> Result<MonodromyResult, MonodromyError> {
    let res = conjugated_contraction(p)?;
    if !res.contracts() {
        return Err(MonodromyError::Contraction { h: p.h, hbar_tilde: p.hbar_tilde, s: p.s, r: res.norm_conjugated });
    }
    Ok(res)
}

/// Settings of the spectral-gap probe on the `h` grid.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapProbe {
    /// Half-width of the `h` grid.
    pub l: f64,
    /// Required momentum reach `max |ξ|`; `N` is the smallest power of two
    /// achieving it, times `refine`.
    pub xi_reach: f64,
    /// Width of the Gaussian cutoff defining the localized band.
    pub eps: f64,
    pub refine: usize,
    pub tol: f64,
}

impl Default for GapProbe {
    fn default() -> Self {
        Self { l: 2.0, xi_reach: 0.9, eps: 0.4, refine: 1, tol: 1e-12 }
    }
}

impl GapProbe {
    pub fn grid(&self, h: f64) -> Result<PhaseGrid, MonodromyError> {
        let need = 2.0 * self.l * self.xi_reach / (std::f64::consts::PI * h);
        let n = (need.ceil() as usize).next_power_of_two() * self.refine.max(1);
        Ok(PhaseGrid::new(self.l, n, h)?)
    }

    /// Hermite indices `β` whose eigenvalue under the quantized Gaussian
    /// cutoff `exp(-(x² + ξ²)/2ε²)` is at least ½. With `a = h/(2ε²)` that
    /// eigenvalue is `(1/(1+a))((1-a)/(1+a))^β`.
    pub fn band_size(&self, h: f64) -> usize {
        let a = h / (2.0 * self.eps * self.eps);
        let mut b = 0usize;
        while (1.0 / (1.0 + a)) * ((1.0 - a) / (1.0 + a)).powi(b as i32 + 1) >= 0.5 {
            b += 1;
        }
        b + 1
    }
}

/// `min_u Re⟨(I - M)u, u⟩/‖u‖²` over the Hermite band at scale `h`, with
/// `M = exp(-(i/h) Op_h^w(λxξ))` applied by the Chebyshev propagator.
pub fn spectral_gap(lambda: f64, h: f64, probe: &GapProbe) -> Result<f64, MonodromyError> {
    let grid = probe.grid(h)?;
    let band = probe.band_size(h);
    let modes = hermite_functions(&grid, band - 1)?;
    let op = SpectralOperator::new(&grid, |_| 0.0, |_| 0.0, lambda)?.scaled(1.0 / h);
    let dx = grid.dx();
    let cols: Vec<Vec<C64>> = modes.iter().map(|v| v.iter().map(|&a| C64::new(a, 0.0)).collect()).collect();
    let images: Vec<Vec<C64>> = cols.iter().map(|v| chebyshev_propagate(&op, 1.0, v, probe.tol).0).collect();
    let a = CMat::from_fn(band, band, |i, j| {
        let ip: C64 = cols[i].iter().zip(&cols[j]).zip(&images[j]).map(|((u, v), w)| u.conj() * (v - w)).sum();
        ip * dx
    });
    let herm = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    Ok(linalg::herm_eigenvalues(&herm)[0])
}

/// Fit of `gap(h) ≥ C⁻¹ h^N`.
#[derive(Clone, Debug, Serialize)]
pub struct GapFit {
    pub hs: Vec<f64>,
    pub gaps: Vec<f64>,
    /// Least-squares slope of `log gap` against `log h`.
    pub exponent: f64,
    /// `C = max_h h^N / gap`.
    pub constant: f64,
}

pub fn fit_gap(lambda: f64, hs: &[f64], probe: &GapProbe) -> Result<GapFit, MonodromyError> {
    if hs.len() < 2 {
        return Err(MonodromyError::Params("a gap fit needs at least two h values".into()));
    }
    let gaps = hs.iter().map(|&h| spectral_gap(lambda, h, probe)).collect::<Result<Vec<_>, _>>()?;
    if gaps.iter().any(|&g| !(g > 0.0)) {
        return Err(MonodromyError::Params(format!("nonpositive gap in {gaps:?}")));
    }
    let lx: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let exponent = crate::quasimode::slope(&lx, &ly);
    let constant = hs.iter().zip(&gaps).map(|(h, g)| h.powf(exponent) / g).fold(0.0, f64::max);
    Ok(GapFit { hs: hs.to_vec(), gaps, exponent, constant })
}

/// Contraction data over an `h` sweep, with the gap fit attached to each
/// row.
pub fn contraction_sweep(
    base: &ModelParams,
    hs: &[f64],
    probe: &GapProbe,
) -> Result<(Vec<MonodromyResult>, GapFit), MonodromyError> {
    let fit = fit_gap(base.lambda, hs, probe)?;
    let mut rows = Vec::with_capacity(hs.len());
    for &h in hs {
        let mut r = conjugated_contraction(&ModelParams { h, ..*base })?;
        r.gap_constant = Some(fit.constant);
        r.gap_exponent = Some(fit.exponent);
        rows.push(r);
    }
    Ok((rows, fit))
}

/// `M(0) = exp(-(i/h) Q)`, `Q = Op_h^w((α/2)(x² + ξ²))` on `p.grid` with
/// `ħ = h`. `M(z)` is `e^{iz/h} M(0)`.
#[derive(Clone, Debug)]
pub struct EllipticMonodromy {
    pub alpha: f64,
    pub h: f64,
    pub grid: PhaseGrid,
    pub m0: CMat,
}

impl EllipticMonodromy {
    pub fn at(&self, z: f64) -> CMat {
        &self.m0 * C64::from_polar(1.0, z / self.h)
    }

    pub fn apply(&self, z: f64, v: &[C64]) -> Vec<C64> {
        let phase = C64::from_polar(1.0, z / self.h);
        (0..self.m0.nrows()).map(|i| self.m0.row(i).iter().zip(v).map(|(a, b)| a * b).sum::<C64>() * phase).collect()
    }
}

pub fn elliptic_monodromy(p: &ModelParams) -> Result<EllipticMonodromy, MonodromyError> {
    p.validate()?;
    let res = nonresonance_check(&[p.alpha], NONRESONANCE_BOUND);
    if res.is_resonant() {
        return Err(MonodromyError::Resonant(res));
    }
    let g = p.grid.with_hbar(p.h)?;
    let a = p.alpha / 2.0;
    let q = quantize(&real_symbol("(alpha/2)(x^2+xi^2)", move |x, xi| a * (x * x + xi * xi)), &g)?;
    let m0 = op_exponential(&q.matrix, C64::new(0.0, -1.0 / p.h))?;
    let defect = unitarity_defect(&m0);
    if defect > UNITARITY_TOL {
        return Err(MonodromyError::Unitarity(defect));
    }
    Ok(EllipticMonodromy { alpha: p.alpha, h: p.h, grid: g, m0 })
}

pub fn build_elliptic_monodromy(p: &ModelParams, z: f64) -> Result<CMat, MonodromyError> {
    Ok(elliptic_monodromy(p)?.at(z))
}

/// Gaussian random state in the Hermite band, used by sweeps that need a
/// localized test vector.
pub fn random_band_state<R: Rng + ?Sized>(band: &CMat, rng: &mut R) -> Vec<C64> {
    let c: Vec<C64> = (0..band.ncols()).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    (0..band.nrows()).map(|r| band.row(r).iter().zip(&c).map(|(a, b)| a * b).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasimode::hermite_mode;

    fn small(h: f64, s: f64) -> ModelParams {
        ModelParams { h, s, grid: PhaseGrid { l: 6.0, n: 128, hbar: 0.2 }, ..ModelParams::default() }
    }

    #[test]
    fn validation() {
        assert!(small(0.3, 0.3).validate().is_err());
        assert!(small(0.01, 0.7).validate().is_err());
        assert!(ModelParams { lambda: -1.0, ..small(0.01, 0.1) }.validate().is_err());
        assert!(small(0.2, 0.0).validate().is_ok());
    }

    #[test]
    fn zero_lambda_is_identity() {
        let p = ModelParams { lambda: 0.0, ..small(0.05, 0.1) };
        let m = build_hyperbolic_monodromy(&p).unwrap();
        assert!(linalg::frobenius(&(m - CMat::identity(128, 128))) < 1e-12);
    }

    #[test]
    fn group_law() {
        let p = small(0.05, 0.1);
        let a = hyperbolic_flow(&p, 0.3).unwrap();
        let b = hyperbolic_flow(&p, 0.7).unwrap();
        let c = hyperbolic_flow(&p, 1.0).unwrap();
        assert!(linalg::frobenius(&(linalg::cmul(&a, &b) - c)) < 1e-8);
    }

    #[test]
    fn rescaling_is_h_independent_on_matched_grids() {
        // The matched h-grid operator equals the ĥ-grid operator entrywise.
        let p = small(0.02, 0.1);
        let gh = p.matched_h_grid().unwrap();
        let q = quantize(&real_symbol("x*xi", |x, xi| x * xi), &gh).unwrap();
        let mh = op_exponential(&q.matrix, C64::new(0.0, -1.0 / p.h)).unwrap();
        let mt = build_hyperbolic_monodromy(&p).unwrap();
        assert!(linalg::frobenius(&(mh - mt)) < 1e-9);
    }

    #[test]
    fn rescale_identity_and_gaussian() {
        let g = PhaseGrid::new(4.0, 128, 0.1).unwrap();
        let u: Vec<C64> = g.positions().iter().map(|x| C64::new((-x * x / 0.2).exp(), 0.0)).collect();
        let same = rescale_state(&u, &g, &g, 0.1, 0.1).unwrap();
        assert!(same.iter().zip(&u).all(|(a, b)| (a - b).norm() < 1e-12));
        // e^{-x²/2h} becomes c^{1/2} e^{-X²/2ĥ}.
        let (h, ht) = (0.0125, 0.2);
        let gh = PhaseGrid::new(2.0, 128, h).unwrap();
        let gt = PhaseGrid::new(4.0, 128, ht).unwrap();
        let u: Vec<C64> = gh.positions().iter().map(|x| C64::new((-x * x / (2.0 * h)).exp(), 0.0)).collect();
        let t = rescale_state(&u, &gh, &gt, h, ht).unwrap();
        let c: f64 = (h / ht).sqrt();
        for (k, z) in t.iter().enumerate() {
            let x = gt.x(k);
            assert!((z.re - c.sqrt() * (-x * x / (2.0 * ht)).exp()).abs() < 1e-10, "{k}");
        }
        assert!((gt.norm(&t) - gh.norm(&u)).abs() < 1e-10);
    }

    #[test]
    fn rescale_refuses_aliasing() {
        let gh = PhaseGrid::new(1.0, 64, 0.01).unwrap();
        let gt = PhaseGrid::new(1.0, 64, 0.16).unwrap();
        // Spreads beyond c·L̂ = L/4.
        let u: Vec<C64> = gh.positions().iter().map(|x| C64::new((-x * x).exp(), 0.0)).collect();
        assert!(matches!(rescale_state(&u, &gh, &gt, 0.01, 0.16), Err(MonodromyError::Aliasing(_))));
        // High frequencies that the coarser target cannot hold.
        let gt = PhaseGrid::new(16.0, 64, 0.16).unwrap();
        let u: Vec<C64> =
            gh.positions().iter().map(|x| C64::new((-x * x / 0.02).exp() * (25.0 * x).cos(), 0.0)).collect();
        assert!(matches!(rescale_state(&u, &gh, &gt, 0.01, 0.16), Err(MonodromyError::Aliasing(_))));
    }

    #[test]
    fn zero_weight_gives_unit_norm() {
        let r = conjugated_contraction(&small(0.01, 0.0)).unwrap();
        assert!((r.norm_conjugated - 1.0).abs() < 1e-9, "{}", r.norm_conjugated);
    }

    #[test]
    fn weight_contracts_and_inverse_expands() {
        let r = conjugated_contraction(&small(0.01, 0.3)).unwrap();
        assert!(r.contracts(), "{r:?}");
        assert!(r.norm_inverse_conjugated > 1.0);
        assert!(r.band_margin >= -1e-12);
        assert_eq!(r.band_dim, 3);
    }

    #[test]
    fn band_size_matches_cutoff_eigenvalues() {
        let probe = GapProbe::default();
        let h = 0.01;
        let g = PhaseGrid::new(2.0, 256, h).unwrap();
        let eps2 = probe.eps * probe.eps;
        let cut = quantize(&real_symbol("cut", move |x, xi| (-(x * x + xi * xi) / (2.0 * eps2)).exp()), &g).unwrap();
        let vals = linalg::herm_eigenvalues(&cut.matrix);
        let count = vals.iter().filter(|&&v| v >= 0.5).count();
        assert_eq!(count, probe.band_size(h));
    }

    #[test]
    fn elliptic_phases() {
        let p = ModelParams { h: 0.01, grid: PhaseGrid { l: 2.0, n: 128, hbar: 0.01 }, ..ModelParams::default() };
        let em = elliptic_monodromy(&p).unwrap();
        for k in [0usize, 1, 5] {
            let v = hermite_mode(&[k], p.h, &p.grid).unwrap().values.remove(0);
            let z = 0.37 * p.h;
            let mv = em.apply(z, &v);
            let want = C64::from_polar(1.0, (z - 0.5 * (2 * k + 1) as f64 * p.h) / p.h);
            let err: f64 = mv.iter().zip(&v).map(|(a, b)| (a - b * want).norm_sqr()).sum::<f64>();
            assert!((err * em.grid.dx()).sqrt() < 1e-8, "{k}");
        }
        let res = ModelParams { alpha: std::f64::consts::FRAC_PI_2, ..p };
        assert!(matches!(elliptic_monodromy(&res), Err(MonodromyError::Resonant(_))));
    }
}
