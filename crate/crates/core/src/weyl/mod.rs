//! Discrete Weyl quantization on a periodic phase-space grid.
//!
//! Positions are `x_k = -L + 2Lk/N` and the dual momenta are
//! `ξ_p = πħ(p - N/2)/L`, `k, p = 0..N`. The Weyl kernel
//!
//! `K_ij = (1/N) Σ_p a((x_i + x_j)/2, ξ_p) e^{i(x_i - x_j)ξ_p/ħ}`
//!
//! is assembled by one inverse FFT per midpoint index `i + j`.

mod spectral;

pub use spectral::{bessel_j_sequence, chebyshev_propagate, LinearAction, SpectralOperator};

use std::io::Write;
use std::path::Path;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, LinalgError};
use crate::{CMat, C64};

#[derive(Debug, Error)]
pub enum WeylError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("grid under-resolves the symbol: max |ξ| = {xi_max} < 4 × momentum support {support}; need N ≥ {required_n}")]
    Nyquist { xi_max: f64, support: f64, required_n: usize },
    #[error("symbol is not a number at (x, ξ) = ({x}, {xi})")]
    NotANumber { x: f64, xi: f64 },
    #[error("operator is not Hermitian: ‖A - A*‖ = {0:e}")]
    NotHermitian(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("export: {0}")]
    Io(#[from] std::io::Error),
    #[error("export: {0}")]
    Json(#[from] serde_json::Error),
}

/// Uniform periodic grid on `[-L, L)` with `N` points (a power of two).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub hbar: f64,
}

impl PhaseGrid {
    pub fn new(l: f64, n: usize, hbar: f64) -> Result<Self, WeylError> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(WeylError::Grid(format!("half-width L = {l} must be positive")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(WeylError::Grid(format!("hbar = {hbar} must be positive")));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(WeylError::Grid(format!("N = {n} must be a power of two")));
        }
        Ok(Self { l, n, hbar })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        -self.l + 2.0 * self.l * k as f64 / self.n as f64
    }

    pub fn xi(&self, p: usize) -> f64 {
        std::f64::consts::PI * self.hbar * (p as f64 - self.n as f64 / 2.0) / self.l
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.x(k)).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n).map(|p| self.xi(p)).collect()
    }

    /// Largest representable `|ξ|`.
    pub fn xi_max(&self) -> f64 {
        std::f64::consts::PI * self.hbar * self.n as f64 / (2.0 * self.l)
    }

    pub fn with_hbar(&self, hbar: f64) -> Result<Self, WeylError> {
        Self::new(self.l, self.n, hbar)
    }

    /// Discrete `L²` norm `(Δx Σ |u_k|²)^{1/2}`.
    pub fn norm(&self, u: &[C64]) -> f64 {
        (self.dx() * u.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Discrete inner product `Δx Σ conj(u_k) v_k`.
    pub fn inner(&self, u: &[C64], v: &[C64]) -> C64 {
        u.iter().zip(v).map(|(a, b)| a.conj() * b).sum::<C64>() * self.dx()
    }
}

/// A phase-space function to be quantized.
pub trait Symbol: Sync {
    fn eval(&self, x: f64, xi: f64) -> C64;

    fn tag(&self) -> String;

    /// `σ` with `a(x, ξ)` negligible for `|ξ| > σ`, if the symbol has one.
    fn momentum_support(&self) -> Option<f64> {
        None
    }
}

/// A symbol given by a closure.
pub struct FnSymbol<F> {
    f: F,
    tag: String,
    support: Option<f64>,
}

impl<F: Fn(f64, f64) -> C64 + Sync> FnSymbol<F> {
    pub fn new(tag: impl Into<String>, f: F) -> Self {
        Self { f, tag: tag.into(), support: None }
    }

    pub fn with_support(mut self, sigma: f64) -> Self {
        self.support = Some(sigma);
        self
    }
}

impl<F: Fn(f64, f64) -> C64 + Sync> Symbol for FnSymbol<F> {
    fn eval(&self, x: f64, xi: f64) -> C64 {
        (self.f)(x, xi)
    }

    fn tag(&self) -> String {
        self.tag.clone()
    }

    fn momentum_support(&self) -> Option<f64> {
        self.support
    }
}

/// Real-valued symbol from a closure.
pub fn real_symbol(tag: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Sync) -> impl Symbol {
    FnSymbol::new(tag, move |x, xi| C64::new(f(x, xi), 0.0))
}

/// Dense matrix of `Op_ħ^w(a)` on a grid.
#[derive(Clone, Debug)]
pub struct WeylOperator {
    pub grid: PhaseGrid,
    pub matrix: CMat,
    pub symbol_tag: String,
}

impl WeylOperator {
    pub fn hermitian_defect(&self) -> f64 {
        linalg::frobenius(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { grid: self.grid, matrix: &self.matrix * C64::new(c, 0.0), symbol_tag: format!("{c}*({})", self.symbol_tag) }
    }
}

/// Smallest `N` (power of two) with `πħN/(2L) ≥ 4σ`.
fn required_n(grid: &PhaseGrid, sigma: f64) -> usize {
    let need = 8.0 * sigma * grid.l / (std::f64::consts::PI * grid.hbar);
    (need.ceil().max(2.0) as usize).next_power_of_two()
}

pub fn quantize(symbol: &dyn Symbol, grid: &PhaseGrid) -> Result<WeylOperator, WeylError> {
    if let Some(sigma) = symbol.momentum_support() {
        if grid.xi_max() < 4.0 * sigma {
            return Err(WeylError::Nyquist { xi_max: grid.xi_max(), support: sigma, required_n: required_n(grid, sigma) });
        }
    }
    let n = grid.n;
    let inv = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let xis = grid.momenta();
    let mut k = CMat::zeros(n, n);
    let mut buf = vec![C64::new(0.0, 0.0); n];
    let mut all_real = true;
    let scale = 1.0 / n as f64;
    for s in 0..2 * n - 1 {
        let mid = -grid.l + grid.l * s as f64 / n as f64;
        for (b, &xi) in buf.iter_mut().zip(&xis) {
            let v = symbol.eval(mid, xi);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(WeylError::NotANumber { x: mid, xi });
            }
            all_real &= v.im == 0.0;
            *b = v;
        }
        inv.process(&mut buf);
        let lo = s.saturating_sub(n - 1);
        let hi = s.min(n - 1);
        for i in lo..=hi {
            let j = s - i;
            let d = (i + n - j) % n;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            k[(i, j)] = buf[d] * (sign * scale);
        }
    }
    if all_real {
        k = (&k + k.adjoint()) * C64::new(0.5, 0.0);
    }
    Ok(WeylOperator { grid: *grid, matrix: k, symbol_tag: symbol.tag() })
}

/// `exp(t A)` by Padé scaling and squaring.
pub fn op_exponential(a: &CMat, t: C64) -> Result<CMat, WeylError> {
    Ok(linalg::expm_complex(&(a * t))?)
}

/// `f(A)` for Hermitian `A` through its eigendecomposition.
pub fn hermitian_function(a: &CMat, f: impl Fn(f64) -> C64) -> Result<CMat, WeylError> {
    check_hermitian(a)?;
    let (vals, vecs) = linalg::herm_eigen(a);
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let c = f(v);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= c);
    }
    Ok(linalg::cmul(&scaled, &vecs.adjoint()))
}

fn check_hermitian(a: &CMat) -> Result<(), WeylError> {
    if a.nrows() != a.ncols() {
        return Err(WeylError::Shape(format!("{}x{} is not square", a.nrows(), a.ncols())));
    }
    let defect = linalg::frobenius(&(a - a.adjoint()));
    if defect > 1e-10 * linalg::frobenius(a).max(1.0) {
        return Err(WeylError::NotHermitian(defect));
    }
    Ok(())
}

pub fn min_eigenvalue(a: &CMat) -> Result<f64, WeylError> {
    check_hermitian(a)?;
    Ok(linalg::herm_eigenvalues(a)[0])
}

/// `A ⊗ I + I ⊗ B`, the quantization of `a(x₁, ξ₁) + b(x₂, ξ₂)` on the
/// product grid.
pub fn tensor_sum(a: &CMat, b: &CMat) -> CMat {
    let (na, nb) = (a.nrows(), b.nrows());
    CMat::from_fn(na * nb, na * nb, |r, c| {
        let (i1, i2) = (r / nb, r % nb);
        let (j1, j2) = (c / nb, c % nb);
        let mut v = C64::new(0.0, 0.0);
        if i2 == j2 {
            v += a[(i1, j1)];
        }
        if i1 == j1 {
            v += b[(i2, j2)];
        }
        v
    })
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "N")]
    n: usize,
    hbar: f64,
    symbol_tag: String,
}

/// Writes the matrix as row-major little-endian complex128 to `bin` and
/// the grid metadata to `sidecar`.
pub fn export(op: &WeylOperator, bin: &Path, sidecar: &Path) -> Result<(), WeylError> {
    let mut bytes = Vec::with_capacity(op.matrix.len() * 16);
    for i in 0..op.matrix.nrows() {
        for j in 0..op.matrix.ncols() {
            let z = op.matrix[(i, j)];
            bytes.extend_from_slice(&z.re.to_le_bytes());
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    std::fs::File::create(bin)?.write_all(&bytes)?;
    let meta = Sidecar { l: op.grid.l, n: op.grid.n, hbar: op.grid.hbar, symbol_tag: op.symbol_tag.clone() };
    std::fs::write(sidecar, serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

pub fn import(bin: &Path, sidecar: &Path) -> Result<WeylOperator, WeylError> {
    let meta: Sidecar = serde_json::from_str(&std::fs::read_to_string(sidecar)?)?;
    let grid = PhaseGrid::new(meta.l, meta.n, meta.hbar)?;
    let bytes = std::fs::read(bin)?;
    if bytes.len() != meta.n * meta.n * 16 {
        return Err(WeylError::Shape(format!("{} bytes for N = {}", bytes.len(), meta.n)));
    }
    let f = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8-byte slice"));
    let matrix = CMat::from_fn(meta.n, meta.n, |i, j| {
        let o = 16 * (i * meta.n + j);
        C64::new(f(o), f(o + 8))
    });
    Ok(WeylOperator { grid, matrix, symbol_tag: meta.symbol_tag })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, hbar: f64) -> PhaseGrid {
        PhaseGrid::new(4.0, n, hbar).unwrap()
    }

    #[test]
    fn constant_symbol_is_identity() {
        let g = grid(64, 0.1);
        let op = quantize(&real_symbol("1", |_, _| 1.0), &g).unwrap();
        assert!(linalg::frobenius(&(&op.matrix - CMat::identity(64, 64))) < 1e-10);
        assert!((min_eigenvalue(&op.matrix).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn position_symbol_is_diagonal() {
        let g = grid(64, 0.1);
        let op = quantize(&real_symbol("x", |x, _| x), &g).unwrap();
        for i in 0..64 {
            for j in 0..64 {
                let want = if i == j { g.x(i) } else { 0.0 };
                assert!((op.matrix[(i, j)] - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn momentum_square_matches_fourier_multiplier() {
        let g = grid(32, 0.2);
        let op = quantize(&real_symbol("xi^2", |_, xi| xi * xi), &g).unwrap();
        // Direct construction: F* diag(ξ_p²) F with the shifted DFT.
        let n = g.n;
        let f = CMat::from_fn(n, n, |p, j| {
            let phase = -(g.x(j) * g.xi(p)) / g.hbar;
            C64::from_polar(1.0 / (n as f64).sqrt(), phase)
        });
        let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(n, (0..n).map(|p| C64::new(g.xi(p).powi(2), 0.0))));
        let direct = f.adjoint() * d * &f;
        assert!(linalg::frobenius(&(&op.matrix - &direct)) < 1e-10);
        let mut want: Vec<f64> = g.momenta().iter().map(|x| x * x).collect();
        want.sort_by(f64::total_cmp);
        let got = linalg::herm_eigenvalues(&op.matrix);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn nyquist_and_nan_are_refused() {
        let g = grid(32, 0.1);
        let s = FnSymbol::new("wide", |_, _| C64::new(1.0, 0.0)).with_support(10.0);
        match quantize(&s, &g) {
            Err(WeylError::Nyquist { required_n, .. }) => {
                let ok = PhaseGrid::new(g.l, required_n, g.hbar).unwrap();
                assert!(ok.xi_max() >= 40.0);
                assert!(quantize(&s, &ok).is_ok());
            }
            other => panic!("{other:?}"),
        }
        let bad = real_symbol("nan", |x, _| if x > 0.0 { f64::NAN } else { 0.0 });
        assert!(matches!(quantize(&bad, &g), Err(WeylError::NotANumber { .. })));
    }

    #[test]
    fn non_hermitian_is_refused() {
        let a = CMat::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64, 0.0));
        assert!(matches!(min_eigenvalue(&a), Err(WeylError::NotHermitian(_))));
    }

    #[test]
    fn exponential_of_zero_and_unitary_case() {
        let g = grid(64, 0.1);
        let op = quantize(&real_symbol("ho", |x, xi| x * x + xi * xi), &g).unwrap();
        assert_eq!(op_exponential(&op.matrix, C64::new(0.0, 0.0)).unwrap(), CMat::identity(64, 64));
        let u = op_exponential(&op.matrix, C64::new(0.0, -3.0)).unwrap();
        let d = linalg::cmul_adjoint(&u, &u) - CMat::identity(64, 64);
        assert!(linalg::frobenius(&d) < 1e-10);
        let v = hermitian_function(&op.matrix, |l| C64::from_polar(1.0, -3.0 * l)).unwrap();
        assert!(linalg::frobenius(&(u - v)) < 1e-9);
    }

    #[test]
    fn export_round_trip() {
        let g = grid(8, 0.3);
        let op = quantize(&FnSymbol::new("x+i xi", |x, xi| C64::new(x, xi)), &g).unwrap();
        let dir = std::env::temp_dir().join(format!("weyl-export-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let (bin, meta) = (dir.join("op.bin"), dir.join("op.json"));
        export(&op, &bin, &meta).unwrap();
        assert_eq!(std::fs::metadata(&bin).unwrap().len(), 8 * 8 * 16);
        let back = import(&bin, &meta).unwrap();
        assert_eq!(back.matrix, op.matrix);
        assert_eq!(back.grid, g);
        assert_eq!(back.symbol_tag, "x+i xi");
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn tensor_sum_spectrum_adds() {
        let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)]));
        let b = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(10.0, 0.0), C64::new(20.0, 0.0)]));
        let s = tensor_sum(&a, &b);
        let vals = linalg::herm_eigenvalues(&s);
        assert_eq!(vals, vec![11.0, 12.0, 21.0, 22.0]);
    }
}
