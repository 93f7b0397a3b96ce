use std::path::Path;

use monodromy_core::escape::{verify_positivity, EscapeError};
use monodromy_core::geodesic::{critical_point, integrate, poincare_linearization, GeodesicError, GeodesicState, WarpedMetric};
use monodromy_core::monodromy::{conjugated_contraction_seeded, fit_gap, MonodromyError};
use monodromy_core::quasimode::{counting_sweep, exact_model_ladder, perturbed_ladder, Perturbation, QuasimodeError};
use monodromy_core::symplectic::{
    build_quadratic_hamiltonian, classify_spectrum, random_symplectic, SpectralClassification, SymplecticError,
    SymplecticMatrix,
};
use monodromy_core::RMat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ClassifyConfig, ContractConfig, GeodesicConfig, LadderConfig, PositivityConfig};
use crate::output::{Sink, Table};
use crate::CliError;

/// `Ok(Some(msg))` means the outputs were written but a numeric check
/// failed.
pub type Outcome = Result<Option<String>, CliError>;

fn symplectic_error(e: SymplecticError) -> CliError {
    match e {
        SymplecticError::Ambiguous { .. }
        | SymplecticError::UnitEigenvalue { .. }
        | SymplecticError::RepeatedElliptic { .. }
        | SymplecticError::Pairing { .. } => CliError::Ambiguous(e.to_string()),
        SymplecticError::NotSquare { .. } | SymplecticError::OddDimension(_) | SymplecticError::NotSymplectic { .. } => {
            CliError::Config(e.to_string())
        }
        other => CliError::Numeric(other.to_string()),
    }
}

fn monodromy_error(e: MonodromyError) -> CliError {
    match e {
        MonodromyError::Params(_) => CliError::Config(e.to_string()),
        MonodromyError::Resonant(_) => CliError::Ambiguous(e.to_string()),
        other => CliError::Numeric(other.to_string()),
    }
}

fn quasimode_error(e: QuasimodeError) -> CliError {
    match e {
        QuasimodeError::Params(_) => CliError::Config(e.to_string()),
        other => CliError::Numeric(other.to_string()),
    }
}

fn geodesic_error(e: GeodesicError) -> CliError {
    match e {
        GeodesicError::Params(_) => CliError::Config(e.to_string()),
        other => CliError::Numeric(other.to_string()),
    }
}

/// Rows of a matrix file: a JSON array of rows, or whitespace/comma
/// separated numbers one row per line (`#` starts a comment).
pub fn parse_matrix(text: &str) -> Result<RMat, CliError> {
    let rows: Vec<Vec<f64>> = if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("matrix: {e}")))?
    } else {
        text.lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .enumerate()
            .map(|(i, l)| {
                l.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<f64>().map_err(|e| CliError::Config(format!("matrix row {}: `{t}`: {e}", i + 1))))
                    .collect()
            })
            .collect::<Result<_, _>>()?
    };
    rows_to_matrix(&rows)
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<RMat, CliError> {
    let n = rows.len();
    if n == 0 {
        return Err(CliError::Config("matrix is empty".into()));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(CliError::Config(format!("matrix row {} has {} entries, expected {n}", i + 1, r.len())));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CliError::Config("matrix has non-finite entries".into()));
    }
    Ok(RMat::from_fn(n, n, |i, j| rows[i][j]))
}

fn rows_of(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[derive(Serialize)]
struct ClassifyReport {
    dim: usize,
    n_hc: usize,
    n_hr_plus: usize,
    n_hr_minus: usize,
    n_e: usize,
    reconstruction_error: f64,
    normal_error: f64,
    basis_defect: f64,
    /// `B` and `F` in normal-form coordinates.
    b: Vec<Vec<f64>>,
    f: Vec<Vec<f64>>,
    basis: Vec<Vec<f64>>,
}

fn classify_report(c: &SpectralClassification) -> ClassifyReport {
    ClassifyReport {
        dim: c.b.nrows(),
        n_hc: c.n_hc,
        n_hr_plus: c.n_hr_plus,
        n_hr_minus: c.n_hr_minus,
        n_e: c.n_e,
        reconstruction_error: c.reconstruction_error,
        normal_error: c.normal_error,
        basis_defect: c.basis_defect,
        b: rows_of(&c.b),
        f: rows_of(&c.f),
        basis: rows_of(&c.basis),
    }
}

fn block_table(c: &SpectralClassification) -> Table {
    let mut t = Table::new(&[
        "kind", "eigenvalue_re", "eigenvalue_im", "multiplicity", "log_re", "log_im", "krein_sign", "f_diag",
    ]);
    for b in &c.blocks {
        let kind = serde_json::to_value(b.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        t.push(vec![
            kind.into(),
            b.eigenvalue.re.into(),
            b.eigenvalue.im.into(),
            b.multiplicity.into(),
            b.log.re.into(),
            b.log.im.into(),
            (b.krein_sign as i64).into(),
            c.f[(b.coords.start, b.coords.start)].into(),
        ]);
    }
    t
}

pub fn classify(matrix: &RMat, cfg: &ClassifyConfig, sink: &mut Sink) -> Outcome {
    cfg.validate()?;
    let ds = SymplecticMatrix::new(matrix.clone()).map_err(symplectic_error)?;
    let cls = classify_spectrum(&ds, cfg.tol_unit).map_err(symplectic_error)?;
    sink.json("classification", &classify_report(&cls))?;
    sink.table("blocks", &block_table(&cls))?;
    if cls.reconstruction_error > cfg.reconstruction_tol {
        return Ok(Some(format!(
            "reconstruction error {:e} exceeds {:e}",
            cls.reconstruction_error, cfg.reconstruction_tol
        )));
    }
    Ok(None)
}

pub fn contract(cfg: &ContractConfig, seed: u64, sink: &mut Sink) -> Outcome {
    cfg.validate()?;
    let cells: Vec<(f64, f64)> = cfg.hs.iter().flat_map(|&h| cfg.s_values.iter().map(move |&s| (h, s))).collect();
    let results: Vec<_> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(h, s))| conjugated_contraction_seeded(&cfg.params(h, s), seed.wrapping_add(i as u64)))
        .collect::<Result<_, _>>()
        .map_err(monodromy_error)?;
    let fit = match &cfg.gap {
        Some(probe) => Some(fit_gap(cfg.lambda, &cfg.hs, probe).map_err(monodromy_error)?),
        None => None,
    };
    let mut t = Table::new(&["h", "hbar_tilde", "s", "r", "gap_C", "gap_N", "unitarity_defect"]);
    let mut failures = Vec::new();
    for r in &results {
        t.push(vec![
            r.h.into(),
            r.hbar_tilde.into(),
            r.s.into(),
            r.norm_conjugated.into(),
            fit.as_ref().map(|f| f.constant).into(),
            fit.as_ref().map(|f| f.exponent).into(),
            r.unitarity_defect.into(),
        ]);
        // s = 0 rows are the unweighted reference with r = 1.
        if r.s != 0.0 && !r.contracts() {
            failures.push(format!("r = {} at h = {}, s = {}", r.norm_conjugated, r.h, r.s));
        }
    }
    sink.table("contract", &t)?;
    if let Some(f) = &fit {
        sink.json("gap_fit", f)?;
    }
    Ok((!failures.is_empty()).then(|| format!("no contraction: {}", failures.join("; "))))
}

#[derive(Serialize)]
struct LadderSummary {
    alphas: Vec<f64>,
    h: f64,
    m_exponent: u32,
    c0: f64,
    window: f64,
    k_max: i64,
    count: usize,
    perturbed: bool,
    counting_slope: f64,
    slope_bracket: [f64; 2],
}

pub fn ladder(cfg: &LadderConfig, sink: &mut Sink) -> Outcome {
    cfg.validate()?;
    let (lad, perturbed) = match &cfg.lambda_slopes {
        None => (exact_model_ladder(&cfg.alphas, cfg.h, cfg.m_exponent, cfg.c0).map_err(quasimode_error)?, false),
        Some(slopes) => {
            let lambdas = cfg
                .alphas
                .iter()
                .zip(slopes)
                .map(|(&a, &s)| Box::new(move |z: f64| 0.5 * a + s * z) as Box<dyn Fn(f64) -> f64 + Sync>)
                .collect();
            let p = Perturbation::new(lambdas).with_envelope(cfg.envelope);
            let got = perturbed_ladder(&p, cfg.h, cfg.m_exponent, cfg.c0, cfg.order).map_err(quasimode_error)?;
            (got.ladder, true)
        }
    };
    let mut t = Table::new(&["k", "beta", "z", "multiplicity", "residual"]);
    for e in &lad.entries {
        let beta = e.beta.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(";");
        t.push(vec![e.k.into(), beta.into(), e.z.into(), e.multiplicity.into(), e.residual.into()]);
    }
    sink.table("ladder", &t)?;

    let (pts, slope) = counting_sweep(&cfg.alphas, &cfg.count_hs, cfg.m_exponent, cfg.c0).map_err(quasimode_error)?;
    let mut c = Table::new(&["h", "count", "ratio"]);
    for p in &pts {
        c.push(vec![p.h.into(), p.count.into(), p.ratio.into()]);
    }
    sink.table("counts", &c)?;
    // Manifold dimension: one more than the number of transverse angles.
    let n = (cfg.alphas.len() + 1) as f64;
    let bracket = [n * (1.0 - 1.0 / cfg.m_exponent as f64) - 0.25, n + 0.25];
    sink.json(
        "ladder_summary",
        &LadderSummary {
            alphas: cfg.alphas.clone(),
            h: cfg.h,
            m_exponent: cfg.m_exponent,
            c0: cfg.c0,
            window: lad.window(),
            k_max: lad.k_max(),
            count: lad.count,
            perturbed,
            counting_slope: slope,
            slope_bracket: bracket,
        },
    )?;
    if cfg.count_hs.len() >= 2 && !(slope >= bracket[0] && slope <= bracket[1]) {
        return Ok(Some(format!("counting slope {slope} outside [{}, {}]", bracket[0], bracket[1])));
    }
    Ok(None)
}

#[derive(Serialize)]
struct GeodesicSummary {
    orbits: Vec<monodromy_core::geodesic::PoincareReport>,
    critical_points: Vec<monodromy_core::geodesic::CriticalPoint<f64>>,
    trajectory_energy_drift: f64,
    trajectory_blown_up: bool,
    trajectory_steps: usize,
}

pub fn geodesic(cfg: &GeodesicConfig, sink: &mut Sink) -> Outcome {
    cfg.validate()?;
    let orbits = cfg
        .orbits
        .par_iter()
        .map(|&z0| poincare_linearization(z0, cfg.vx0, cfg.step))
        .collect::<Result<Vec<_>, _>>()
        .map_err(geodesic_error)?;
    let m = WarpedMetric::<f64>::default();
    let critical_points = cfg
        .critical_seeds
        .iter()
        .map(|s| critical_point(&m, (s[0], s[1])))
        .collect::<Result<Vec<_>, _>>()
        .map_err(geodesic_error)?;

    let tc = &cfg.trajectory;
    let mut start = GeodesicState::on_line(&m, tc.y, tc.z);
    if let Some(vx) = tc.vx {
        start.vx = vx;
    }
    start.vy = tc.vy;
    start.vz = tc.vz;
    let traj = integrate(&m, &start, tc.t_end, tc.step, tc.stride).map_err(geodesic_error)?;
    let mut t = Table::new(&["t", "x", "y", "z", "vx", "vy", "vz", "energy"]);
    for (time, s, e) in &traj.samples {
        t.push(vec![(*time).into(), s.x.into(), s.y.into(), s.z.into(), s.vx.into(), s.vy.into(), s.vz.into(), (*e).into()]);
    }
    sink.table("trajectory", &t)?;
    let blown_up = traj.blown_up;
    let steps = traj.steps;
    sink.json(
        "poincare",
        &GeodesicSummary {
            orbits,
            critical_points,
            trajectory_energy_drift: traj.energy_drift,
            trajectory_blown_up: blown_up,
            trajectory_steps: steps,
        },
    )?;
    if blown_up {
        let last = traj.samples.last().map_or(0.0, |s| s.0);
        return Ok(Some(format!("trajectory left the domain at t = {last} after {steps} steps")));
    }
    Ok(None)
}

#[derive(Serialize)]
struct PositivityRow {
    name: String,
    dim: usize,
    n_hc: usize,
    n_hr_plus: usize,
    n_hr_minus: usize,
    n_e: usize,
    min_ratio: f64,
    max_ratio: f64,
    samples: usize,
    argmin_point: Vec<f64>,
}

pub fn positivity(cfg: &PositivityConfig, seed: u64, sink: &mut Sink) -> Outcome {
    cfg.validate()?;
    let rows = cfg
        .cases
        .par_iter()
        .enumerate()
        .map(|(i, case)| -> Result<Result<PositivityRow, String>, CliError> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let ds = match (&case.matrix, case.random_dim) {
                (Some(rows), _) => SymplecticMatrix::new(rows_to_matrix(rows)?).map_err(symplectic_error)?,
                (None, Some(d)) => random_symplectic(&mut rng, d).map_err(symplectic_error)?,
                (None, None) => unreachable!("validated"),
            };
            let cls = classify_spectrum(&ds, cfg.tol_unit).map_err(symplectic_error)?;
            let q = build_quadratic_hamiltonian(&cls);
            match verify_positivity(&q, cfg.samples, cfg.radius, &mut rng) {
                Ok(r) => Ok(Ok(PositivityRow {
                    name: case.name.clone(),
                    dim: ds.dim(),
                    n_hc: cls.n_hc,
                    n_hr_plus: cls.n_hr_plus,
                    n_hr_minus: cls.n_hr_minus,
                    n_e: cls.n_e,
                    min_ratio: r.min_ratio,
                    max_ratio: r.max_ratio,
                    samples: r.samples,
                    argmin_point: r.argmin_point,
                })),
                Err(EscapeError::Counterexample { point, ratio }) => {
                    Ok(Err(format!("{}: ratio {ratio:e} at {point:?}", case.name)))
                }
                Err(e) => Err(CliError::Numeric(format!("{}: {e}", case.name))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&["name", "dim", "n_hc", "n_hr_plus", "n_hr_minus", "n_e", "min_ratio", "max_ratio", "samples"]);
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    for r in rows {
        match r {
            Ok(r) => {
                t.push(vec![
                    r.name.clone().into(),
                    r.dim.into(),
                    r.n_hc.into(),
                    r.n_hr_plus.into(),
                    r.n_hr_minus.into(),
                    r.n_e.into(),
                    r.min_ratio.into(),
                    r.max_ratio.into(),
                    r.samples.into(),
                ]);
                reports.push(r);
            }
            Err(msg) => failures.push(msg),
        }
    }
    sink.table("positivity", &t)?;
    sink.json("positivity_points", &reports)?;
    Ok((!failures.is_empty()).then(|| format!("H_q G is not positive: {}", failures.join("; "))))
}

pub fn read_matrix(path: &Path) -> Result<(RMat, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Config(format!("{}: not UTF-8", path.display())))?;
    Ok((parse_matrix(&text)?, bytes))
}
