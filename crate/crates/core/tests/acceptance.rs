//! Acceptance run: one PASS/FAIL line per criterion, each with its runtime
//! budget. Run with `cargo test --test acceptance -- --nocapture` to see the
//! report.

use std::time::{Duration, Instant};

use monodromy_core::escape::verify_positivity;
use monodromy_core::geodesic::{
    critical_point, integrate, poincare_linearization, GeodesicState, Verdict, WarpedMetric,
};
use monodromy_core::linalg;
use monodromy_core::monodromy::{conjugated_contraction, elliptic_monodromy, fit_gap, GapProbe, ModelParams};
use monodromy_core::quasimode::{borel_resum, counting_sweep, exact_model_ladder, hermite_functions};
use monodromy_core::symplectic::{
    build_quadratic_hamiltonian, classify_spectrum, random_hamiltonian, random_symplectic, reparametrize_flow,
    FlowOptions, SymplecticMatrix, DEFAULT_TOL_UNIT,
};
use monodromy_core::weyl::{min_eigenvalue, quantize, real_symbol, PhaseGrid};
use monodromy_core::{RMat, C64};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: usize,
    pass: bool,
    line: String,
}

fn run(id: usize, name: &str, budget_s: u64, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let t = Instant::now();
    let res = f();
    let dt = t.elapsed();
    let budget = Duration::from_secs(budget_s);
    let (ok, detail) = match res {
        Ok(d) => (dt <= budget, d),
        Err(d) => (false, d),
    };
    let line = format!(
        "{} criterion {id:>2} {name}: {detail} [{:.2}s / {budget_s}s]",
        if ok { "PASS" } else { "FAIL" },
        dt.as_secs_f64()
    );
    println!("{line}");
    Outcome { id, pass: ok, line }
}

fn check(cond: bool, detail: String) -> Result<String, String> {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Result<String, String> {
    let mut worst = 0.0f64;
    let mut branch_failures = 0;
    let mut count = 0;
    for dim in [2usize, 4, 6] {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + dim as u64);
        for i in 0..100 {
            let ds = random_symplectic(&mut rng, dim).map_err(|e| e.to_string())?;
            let cls = classify_spectrum(&ds, DEFAULT_TOL_UNIT).map_err(|e| format!("dim {dim} #{i}: {e}"))?;
            let e = cls.e_normal().map_err(|e| e.to_string())?;
            let b = linalg::expm(&cls.b).map_err(|e| e.to_string())?;
            let rec = cls.to_original(&(e * b));
            let rel = linalg::frobenius(&(rec - ds.entries())) / linalg::frobenius(ds.entries());
            worst = worst.max(rel);
            let br = cls.branches();
            for a in br {
                let inv = a.eigenvalue.inv();
                let partner = br
                    .iter()
                    .min_by(|p, q| (p.eigenvalue - inv).norm().total_cmp(&(q.eigenvalue - inv).norm()))
                    .expect("nonempty");
                if partner.log != -a.log {
                    branch_failures += 1;
                }
            }
            count += 1;
        }
    }
    check(
        worst <= 1e-8 && branch_failures == 0,
        format!("{count} maps, max relative error {worst:.2e}, branch mismatches {branch_failures}"),
    )
}

fn criterion_2() -> Result<String, String> {
    let mut ho = Vec::new();
    let mut ratios = Vec::new();
    for hb in [0.05, 0.1, 0.2] {
        let g = PhaseGrid::new(10.0, 512, hb).map_err(|e| e.to_string())?;
        let q = quantize(&real_symbol("x^2+xi^2", |x, xi| x * x + xi * xi), &g).map_err(|e| e.to_string())?;
        let e0 = min_eigenvalue(&q.matrix).map_err(|e| e.to_string())?;
        ho.push((e0 / hb - 1.0).abs());
        let a0 = quantize(&real_symbol("a0", |x, xi| x * x / (1.0 + x * x) + xi * xi / (1.0 + xi * xi)), &g)
            .map_err(|e| e.to_string())?;
        ratios.push(min_eigenvalue(&a0.matrix).map_err(|e| e.to_string())? / hb);
    }
    let worst = ho.iter().copied().fold(0.0, f64::max);
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let spread = (hi - lo) / hi;
    check(
        worst <= 0.01 && lo > 0.0 && spread <= 0.2,
        format!("oscillator rel. error {worst:.2e}; a0 ratios {ratios:.4?}, spread {spread:.3}"),
    )
}

const SWEEP: [f64; 4] = [1.0 / 100.0, 1.0 / 200.0, 1.0 / 400.0, 1.0 / 800.0];

fn criterion_3() -> Result<String, String> {
    let mut rs = Vec::new();
    let mut defect = 0.0f64;
    for h in SWEEP {
        let r = conjugated_contraction(&ModelParams { h, ..ModelParams::default() }).map_err(|e| e.to_string())?;
        rs.push(r.norm_conjugated);
        defect = defect.max(r.unitarity_defect);
    }
    let r_max = rs.iter().copied().fold(0.0, f64::max);
    let r_min = rs.iter().copied().fold(f64::INFINITY, f64::min);
    check(
        r_max < 1.0 && defect <= 1e-9,
        format!("r_max = {r_max:.6} (spread {:.1e}), unitarity defect {defect:.2e}", r_max - r_min),
    )
}

fn criterion_4() -> Result<String, String> {
    let base = fit_gap(1.0, &SWEEP, &GapProbe::default()).map_err(|e| e.to_string())?;
    let fine = fit_gap(1.0, &SWEEP, &GapProbe { refine: 2, ..GapProbe::default() }).map_err(|e| e.to_string())?;
    let change = (base.exponent - fine.exponent).abs();
    check(
        base.exponent.is_finite() && fine.exponent.is_finite() && change <= 0.3,
        format!("N = {:.4} (C = {:.3}), refined N = {:.4}, change {change:.2e}", base.exponent, base.constant, fine.exponent),
    )
}

fn criterion_5() -> Result<String, String> {
    let h = 1e-3;
    let ladder = exact_model_ladder(&[1.0], h, 2, 1.0).map_err(|e| e.to_string())?;
    let grid = PhaseGrid::new(1.0, 512, h).map_err(|e| e.to_string())?;
    let p = ModelParams { alpha: 1.0, h, grid, ..ModelParams::default() };
    let em = elliptic_monodromy(&p).map_err(|e| e.to_string())?;
    let top = ladder.entries.iter().map(|e| e.beta[0]).max().unwrap_or(0);
    let modes = hermite_functions(&em.grid, top).map_err(|e| e.to_string())?;
    // M(0) v_β once per β; M(z) only adds the phase e^{iz/h}.
    let images: Vec<(Vec<C64>, Vec<C64>)> = modes
        .iter()
        .map(|v| {
            let v: Vec<C64> = v.iter().map(|&a| C64::new(a, 0.0)).collect();
            (em.apply(0.0, &v), v)
        })
        .collect();
    let mut worst_res = 0.0f64;
    let mut worst_z = 0.0f64;
    for e in &ladder.entries {
        let (mv, v) = &images[e.beta[0]];
        let phase = C64::from_polar(1.0, e.z / h);
        let diff: Vec<C64> = mv.iter().zip(v).map(|(a, b)| a * phase - b).collect();
        worst_res = worst_res.max(em.grid.norm(&diff));
        let a = 0.5 * (2 * e.beta[0] + 1) as f64 * h;
        let b = 2.0 * std::f64::consts::PI * e.k as f64 * h;
        let tol = 2.0 * f64::EPSILON * (a.abs() + b.abs());
        worst_z = worst_z.max((e.z - (a + b)).abs() / tol.max(f64::MIN_POSITIVE));
    }
    check(
        worst_res <= 1e-8 && worst_z <= 1.0,
        format!(
            "{} entries (β ≤ {top}, |k| ≤ {}), max residual {worst_res:.2e}, max z error {worst_z:.2} ulp-units",
            ladder.entries.len(),
            ladder.k_max()
        ),
    )
}

fn criterion_6() -> Result<String, String> {
    let (pts, slope) = counting_sweep(&[1.0], &[1e-2, 1e-3, 1e-4], 2, 1.0).map_err(|e| e.to_string())?;
    let ok = pts.iter().all(|p| (0.75..=2.25).contains(&p.ratio));
    let desc: Vec<String> = pts.iter().map(|p| format!("N({:.0e}) = {} ({:.3})", p.h, p.count, p.ratio)).collect();
    check(ok, format!("{}; fitted slope {slope:.3}", desc.join(", ")))
}

fn criterion_7() -> Result<String, String> {
    let hs: Vec<f64> = (0..31).map(|i| 10f64.powf(-4.0 + 3.0 * i as f64 / 30.0)).collect();
    let geo: Vec<f64> = (0..40).map(|j| 2f64.powi(j)).collect();
    let fact: Vec<f64> = (0..40).map(|j| (1..=j).map(|k| k as f64).product()).collect();
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, env) in [("geometric", geo), ("factorial", fact)] {
        let coeffs: Vec<f64> = env.iter().enumerate().map(|(j, c)| if j % 2 == 0 { *c } else { -c }).collect();
        let rep = borel_resum(&coeffs, &env, &hs, 2, &[1, 2, 3]).map_err(|e| e.to_string())?;
        for c in &rep.certificates {
            ok &= c.holds;
            lines.push(format!("{name} N={}: {:.2e} ≤ {:.2e}", c.n, c.empirical_constant, c.bound_constant));
        }
    }
    check(ok, lines.join("; "))
}

fn criterion_8() -> Result<String, String> {
    let step = 1e-4;
    let mut drift = 0.0f64;
    let mut defect = 0.0f64;
    let mut verdicts = Vec::new();
    let want = [(0.0, Verdict::SemiHyperbolic), (0.5, Verdict::Hyperbolic), (-0.5, Verdict::Hyperbolic)];
    let mut ok = true;
    for (z0, v) in want {
        let r = poincare_linearization(z0, None, step).map_err(|e| e.to_string())?;
        drift = drift.max(r.energy_drift);
        defect = defect.max(r.symplectic_defect);
        ok &= r.verdict == v;
        verdicts.push(format!("{:?}", r.verdict));
        // A nearby orbit over one period of the base orbit.
        let m = WarpedMetric::<f64>::default();
        let mut s = GeodesicState::on_line(&m, 0.0, z0);
        s.y = 1e-3;
        s.vz = 1e-3;
        let tr = integrate(&m, &s, 1.0 / s.vx, step, 1000).map_err(|e| e.to_string())?;
        drift = drift.max(tr.energy_drift);
    }
    let m = WarpedMetric::<f64>::default();
    let mut sigs = Vec::new();
    for (seed, want) in [((0.05, 0.05), [-1, 1]), ((0.05, 0.45), [-1, -1]), ((0.05, -0.45), [-1, -1])] {
        let c = critical_point(&m, seed).map_err(|e| e.to_string())?;
        ok &= c.signature == want;
        sigs.push(format!("{:?}", c.signature));
    }
    check(
        ok && drift <= 1e-8 && defect <= 1e-6,
        format!("energy drift {drift:.1e}, symplectic defect {defect:.1e}, verdicts {verdicts:?}, signatures {sigs:?}"),
    )
}

fn criterion_9() -> Result<String, String> {
    let mut worst = 0.0f64;
    for (seed, dim) in [(1u64, 2usize), (2, 4), (3, 6)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h0, h1, h2) =
            (random_hamiltonian(&mut rng, dim), random_hamiltonian(&mut rng, dim), random_hamiltonian(&mut rng, dim));
        let a = |t: f64| &h0 + &h1 * t + &h2 * (2.0 * std::f64::consts::PI * t).sin();
        let r = reparametrize_flow(&a, dim, None, &FlowOptions::default()).map_err(|e| e.to_string())?;
        worst = worst.max(r.endpoint_mismatch());
    }
    check(worst <= 1e-8, format!("max ‖ψ(1) - φ(1)‖ = {worst:.2e}"))
}

fn block_diag(blocks: &[RMat]) -> RMat {
    // Blocks are symplectic in their own (x, ξ) splitting; interleave them
    // into the global (x₁…x_n, ξ₁…ξ_n) layout.
    let n: usize = blocks.iter().map(|b| b.nrows() / 2).sum();
    let mut out = RMat::zeros(2 * n, 2 * n);
    let mut off = 0;
    for b in blocks {
        let m = b.nrows() / 2;
        for i in 0..2 * m {
            for k in 0..2 * m {
                let gi = if i < m { off + i } else { n + off + i - m };
                let gk = if k < m { off + k } else { n + off + k - m };
                out[(gi, gk)] = b[(i, k)];
            }
        }
        off += m;
    }
    out
}

fn criterion_10() -> Result<String, String> {
    let e = std::f64::consts::E;
    let diag = |v: &[f64]| RMat::from_diagonal(&DVector::from_vec(v.to_vec()));
    let rot = |a: f64| RMat::from_row_slice(2, 2, &[a.cos(), a.sin(), -a.sin(), a.cos()]);
    let hc = {
        let bx = RMat::from_row_slice(2, 2, &[1.0, 5.0, -5.0, 1.0]);
        let mut b = RMat::zeros(4, 4);
        b.view_mut((0, 0), (2, 2)).copy_from(&bx);
        b.view_mut((2, 2), (2, 2)).copy_from(&(-bx.transpose()));
        linalg::expm(&b).map_err(|e| e.to_string())?
    };
    let cases: Vec<(&str, RMat)> = vec![
        ("model diag(e, 1/e)", diag(&[e, 1.0 / e])),
        ("real negative", diag(&[-2.0, -0.5])),
        ("complex hyperbolic 1+5i", hc.clone()),
        ("real positive x2", block_diag(&[diag(&[2f64.exp(), (-2f64).exp()]), diag(&[3f64.exp(), (-3f64).exp()])])),
        ("mixed hc + hr- + elliptic", block_diag(&[hc, diag(&[-2.0, -0.5]), rot(1.0)])),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut kinds = std::collections::BTreeSet::new();
    let mut mins = Vec::new();
    let mut model_ok = false;
    for (i, (name, ds)) in cases.into_iter().enumerate() {
        let s = SymplecticMatrix::new(ds).map_err(|e| format!("{name}: {e}"))?;
        let cls = classify_spectrum(&s, DEFAULT_TOL_UNIT).map_err(|e| format!("{name}: {e}"))?;
        for b in &cls.blocks {
            kinds.insert(format!("{:?}", b.kind));
        }
        let q = build_quadratic_hamiltonian(&cls);
        let rep = verify_positivity(&q, 100_000, 10.0, &mut rng).map_err(|e| format!("{name}: {e}"))?;
        if i == 0 {
            model_ok = (rep.min_ratio - 1.0).abs() <= 1e-12 && (rep.max_ratio - 1.0).abs() <= 1e-12;
        }
        mins.push(format!("{name}: {:.4}", rep.min_ratio));
    }
    check(
        kinds.len() == 4 && model_ok,
        format!("{} block kinds, model ratio = 1: {model_ok}; min ratios [{}]", kinds.len(), mins.join(", ")),
    )
}

#[test]
fn acceptance_criteria() {
    let outcomes = vec![
        run(1, "symplectic factorization", 10, criterion_1),
        run(2, "harmonic-oscillator bound", 60, criterion_2),
        run(3, "model contraction", 300, criterion_3),
        run(4, "spectral gap", 300, criterion_4),
        run(5, "elliptic ladder exactness", 60, criterion_5),
        run(6, "counting slope", 10, criterion_6),
        run(7, "Borel truncation certificates", 10, criterion_7),
        run(8, "geodesic lab", 120, criterion_8),
        run(9, "reparametrized flow", 5, criterion_9),
        run(10, "positivity", 30, criterion_10),
    ];
    let failed: Vec<&Outcome> = outcomes.iter().filter(|o| !o.pass).collect();
    assert!(
        failed.is_empty(),
        "failed criteria: {:?}\n{}",
        failed.iter().map(|o| o.id).collect::<Vec<_>>(),
        failed.iter().map(|o| o.line.as_str()).collect::<Vec<_>>().join("\n")
    );
}
