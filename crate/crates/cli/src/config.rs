use std::path::Path;

use monodromy_core::monodromy::{GapProbe, ModelParams};
use monodromy_core::symplectic::DEFAULT_TOL_UNIT;
use monodromy_core::weyl::PhaseGrid;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Reads a JSON config, reporting the path of the offending field on error.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        let at = if at == "." { "<root>".to_string() } else { at };
        CliError::Config(format!("{}: at `{at}`: {}", path.display(), e.inner()))
    })
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

fn positive_list(name: &str, v: &[f64]) -> Result<(), CliError> {
    require(!v.is_empty(), || format!("{name} is empty"))?;
    for (i, x) in v.iter().enumerate() {
        require(*x > 0.0 && x.is_finite(), || format!("{name}[{i}] = {x} must be positive"))?;
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyConfig {
    pub tol_unit: f64,
    /// Largest accepted relative reconstruction error.
    pub reconstruction_tol: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { tol_unit: DEFAULT_TOL_UNIT, reconstruction_tol: 1e-8 }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        require(self.tol_unit > 0.0 && self.tol_unit < 1.0, || format!("tol_unit = {} must lie in (0, 1)", self.tol_unit))?;
        require(self.reconstruction_tol > 0.0, || "reconstruction_tol must be positive".into())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub l: f64,
    pub n: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContractConfig {
    pub lambda: f64,
    pub alpha: f64,
    pub hbar_tilde: f64,
    pub grid: GridConfig,
    pub hs: Vec<f64>,
    pub s_values: Vec<f64>,
    /// Spectral-gap fit over `hs`; omitted when absent.
    pub gap: Option<GapProbe>,
}

impl Default for ContractConfig {
    fn default() -> Self {
        let m = ModelParams::default();
        Self {
            lambda: m.lambda,
            alpha: m.alpha,
            hbar_tilde: m.hbar_tilde,
            grid: GridConfig { l: m.grid.l, n: m.grid.n },
            hs: vec![1.0 / 100.0, 1.0 / 200.0, 1.0 / 400.0, 1.0 / 800.0],
            s_values: vec![m.s],
            gap: Some(GapProbe::default()),
        }
    }
}

impl ContractConfig {
    pub fn params(&self, h: f64, s: f64) -> ModelParams {
        ModelParams {
            lambda: self.lambda,
            alpha: self.alpha,
            h,
            hbar_tilde: self.hbar_tilde,
            s,
            grid: PhaseGrid { l: self.grid.l, n: self.grid.n, hbar: self.hbar_tilde },
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        positive_list("hs", &self.hs)?;
        require(!self.s_values.is_empty(), || "s_values is empty".into())?;
        PhaseGrid::new(self.grid.l, self.grid.n, self.hbar_tilde).map_err(|e| CliError::Config(format!("grid: {e}")))?;
        for &h in &self.hs {
            for &s in &self.s_values {
                self.params(h, s).validate().map_err(|e| CliError::Config(format!("h = {h}, s = {s}: {e}")))?;
            }
            if let Some(g) = &self.gap {
                g.grid(h).map_err(|e| CliError::Config(format!("gap at h = {h}: {e}")))?;
            }
        }
        if self.gap.is_some() {
            require(self.hs.len() >= 2, || "the gap fit needs at least two h values".into())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LadderConfig {
    pub alphas: Vec<f64>,
    /// `h` of the tabulated ladder.
    pub h: f64,
    pub m_exponent: u32,
    pub c0: f64,
    /// `h` values of the counting sweep.
    pub count_hs: Vec<f64>,
    /// `λ_j(z) = α_j/2 + slope_j z`; the exact ladder when absent.
    pub lambda_slopes: Option<Vec<f64>>,
    pub order: usize,
    pub envelope: f64,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            alphas: vec![1.0],
            h: 1e-2,
            m_exponent: 2,
            c0: 1.0,
            count_hs: vec![1e-2, 1e-3, 1e-4],
            lambda_slopes: None,
            order: 8,
            envelope: 10.0,
        }
    }
}

impl LadderConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        positive_list("alphas", &self.alphas)?;
        positive_list("count_hs", &self.count_hs)?;
        require(self.h > 0.0 && self.h < 1.0, || format!("h = {} must lie in (0, 1)", self.h))?;
        require(self.m_exponent >= 1, || "m_exponent must be at least 1".into())?;
        require(self.c0 > 0.0, || "c0 must be positive".into())?;
        if let Some(s) = &self.lambda_slopes {
            require(s.len() == self.alphas.len(), || format!("lambda_slopes has {} entries, alphas {}", s.len(), self.alphas.len()))?;
            require(self.order >= 1, || "order must be at least 1".into())?;
            require(self.envelope > 0.0, || "envelope must be positive".into())?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub y: f64,
    pub z: f64,
    /// Unit speed along the `x` direction when absent.
    pub vx: Option<f64>,
    pub vy: f64,
    pub vz: f64,
    pub t_end: f64,
    pub step: f64,
    pub stride: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeodesicConfig {
    pub orbits: Vec<f64>,
    pub vx0: Option<f64>,
    pub step: f64,
    pub critical_seeds: Vec<[f64; 2]>,
    pub trajectory: TrajectoryConfig,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        Self {
            orbits: vec![0.0, 0.5, -0.5],
            vx0: None,
            step: 1e-4,
            critical_seeds: vec![[0.0, 0.0], [0.0, 0.5], [0.0, -0.5]],
            trajectory: TrajectoryConfig { y: 0.0, z: 0.0, vx: None, vy: 1e-3, vz: 1e-3, t_end: 10.0, step: 1e-3, stride: 10 },
        }
    }
}

impl GeodesicConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        require(self.step > 0.0 && self.step < 0.1, || format!("step = {} must lie in (0, 0.1)", self.step))?;
        if let Some(v) = self.vx0 {
            require(v > 0.0 && v.is_finite(), || format!("vx0 = {v} must be positive"))?;
        }
        let t = &self.trajectory;
        require(t.step > 0.0 && t.t_end > 0.0 && t.step <= t.t_end, || "trajectory needs 0 < step ≤ t_end".into())?;
        require(t.stride >= 1, || "trajectory.stride must be at least 1".into())?;
        let finite = [t.y, t.z, t.vy, t.vz, t.vx.unwrap_or(1.0)].iter().all(|v| v.is_finite());
        require(finite, || "trajectory values must be finite".into())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositivityCase {
    pub name: String,
    /// Explicit symplectic matrix (rows).
    pub matrix: Option<Vec<Vec<f64>>>,
    /// Seeded random symplectic matrix of this dimension.
    pub random_dim: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PositivityConfig {
    pub cases: Vec<PositivityCase>,
    pub samples: usize,
    pub radius: f64,
    pub tol_unit: f64,
}

impl Default for PositivityConfig {
    fn default() -> Self {
        let e = std::f64::consts::E;
        Self {
            cases: vec![
                PositivityCase { name: "model".into(), matrix: Some(vec![vec![e, 0.0], vec![0.0, 1.0 / e]]), random_dim: None },
                PositivityCase { name: "random-4".into(), matrix: None, random_dim: Some(4) },
                PositivityCase { name: "random-6".into(), matrix: None, random_dim: Some(6) },
            ],
            samples: 100_000,
            radius: 10.0,
            tol_unit: DEFAULT_TOL_UNIT,
        }
    }
}

impl PositivityConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        require(!self.cases.is_empty(), || "cases is empty".into())?;
        require(self.samples >= 1, || "samples must be at least 1".into())?;
        require(self.radius > 0.0, || "radius must be positive".into())?;
        for (i, c) in self.cases.iter().enumerate() {
            match (&c.matrix, c.random_dim) {
                (Some(_), None) => {}
                (None, Some(d)) => require(d >= 2 && d % 2 == 0, || format!("cases[{i}].random_dim = {d} must be even and positive"))?,
                _ => return Err(CliError::Config(format!("cases[{i}]: give exactly one of matrix, random_dim"))),
            }
        }
        Ok(())
    }
}
