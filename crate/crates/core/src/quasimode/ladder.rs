use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::QuasimodeError;

const DISTINCT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderEntry {
    pub k: i64,
    pub beta: Vec<usize>,
    pub z: f64,
    pub residual: f64,
    /// Number of lattice points `(k, β)` sharing this `z`.
    pub multiplicity: usize,
}

/// Admissible `(k, β)` with `|z| ≤ c₀ h^{1/m}` and `|k| ≤ c₀ h^{1/m - 1} / π`.
#[derive(Clone, Debug, Serialize)]
pub struct QuasimodeLadder {
    pub m_exponent: u32,
    pub c0: f64,
    pub h: f64,
    pub alphas: Vec<f64>,
    pub entries: Vec<LadderEntry>,
    /// `N(h)`: number of distinct `z`.
    pub count: usize,
}

impl QuasimodeLadder {
    pub fn window(&self) -> f64 {
        self.c0 * self.h.powf(1.0 / self.m_exponent as f64)
    }

    pub fn k_max(&self) -> i64 {
        k_max(self.h, self.m_exponent, self.c0)
    }
}

/// The `k` window: `2π|k|h ≤ 2c₀h^{1/m}`.
fn k_max(h: f64, m: u32, c0: f64) -> i64 {
    (c0 * h.powf(1.0 / m as f64 - 1.0) / std::f64::consts::PI).floor() as i64
}

fn validate(alphas: &[f64], h: f64, m: u32, c0: f64) -> Result<(), QuasimodeError> {
    if alphas.is_empty() || alphas.iter().any(|a| !(*a > 0.0)) {
        return Err(QuasimodeError::Params("elliptic angles must be positive".into()));
    }
    if !(h > 0.0) || !(c0 >= 0.0) || m < 1 {
        return Err(QuasimodeError::Params(format!("need h > 0, c0 ≥ 0, m ≥ 1 (h = {h}, c0 = {c0}, m = {m})")));
    }
    Ok(())
}

/// Calls `visit(β, Σ (α_j/2)(2β_j+1))` for every multi-index whose
/// oscillator energy in units of `h` stays at most `limit`.
fn for_each_beta(alphas: &[f64], limit: f64, visit: &mut dyn FnMut(&[usize], f64)) {
    fn rec(alphas: &[f64], limit: f64, beta: &mut Vec<usize>, acc: f64, visit: &mut dyn FnMut(&[usize], f64)) {
        let j = beta.len();
        if j == alphas.len() {
            visit(beta, acc);
            return;
        }
        // Remaining coordinates contribute at least their zero-point energy.
        let rest: f64 = alphas[j + 1..].iter().map(|a| a / 2.0).sum();
        let mut b = 0usize;
        loop {
            let e = alphas[j] / 2.0 * (2 * b + 1) as f64;
            if acc + e + rest > limit {
                break;
            }
            beta.push(b);
            rec(alphas, limit, beta, acc + e, visit);
            beta.pop();
            b += 1;
        }
    }
    rec(alphas, limit, &mut Vec::new(), 0.0, visit);
}

fn enumerate(alphas: &[f64], h: f64, m: u32, c0: f64) -> Vec<LadderEntry> {
    let w = c0 * h.powf(1.0 / m as f64);
    let km = k_max(h, m, c0);
    let mut out = Vec::new();
    for k in -km..=km {
        let shift = 2.0 * std::f64::consts::PI * k as f64 * h;
        // z = h E + shift with E ≥ 0, so E ≤ (w - shift)/h.
        for_each_beta(alphas, (w - shift) / h, &mut |beta, e| {
            let z = h * e + shift;
            if z.abs() <= w {
                out.push(LadderEntry { k, beta: beta.to_vec(), z, residual: 0.0, multiplicity: 1 });
            }
        });
    }
    out
}

fn merge_sorted(mut entries: Vec<LadderEntry>, same: impl Fn(&LadderEntry, &LadderEntry) -> bool) -> Vec<LadderEntry> {
    entries.sort_by(|a, b| a.z.total_cmp(&b.z));
    let mut out: Vec<LadderEntry> = Vec::with_capacity(entries.len());
    for e in entries {
        match out.last_mut() {
            Some(last) if same(last, &e) => last.multiplicity += 1,
            _ => out.push(e),
        }
    }
    out
}

/// `z = Σ (α_j/2)(2β_j+1) h + 2πkh` inside the window, with coinciding
/// values (closer than `1e-12`) merged.
pub fn exact_model_ladder(alphas: &[f64], h: f64, m_exponent: u32, c0: f64) -> Result<QuasimodeLadder, QuasimodeError> {
    validate(alphas, h, m_exponent, c0)?;
    let entries = merge_sorted(enumerate(alphas, h, m_exponent, c0), |a, b| (a.z - b.z).abs() <= DISTINCT_TOL);
    Ok(QuasimodeLadder { m_exponent, c0, h, alphas: alphas.to_vec(), count: entries.len(), entries })
}

/// Same ladder with rational angles and `h`; coincidences are decided
/// exactly on `z/h = a + 2πk` with rational `a`.
pub fn exact_model_ladder_rational(
    alphas: &[Rational64],
    h: Rational64,
    m_exponent: u32,
    c0: f64,
) -> Result<QuasimodeLadder, QuasimodeError> {
    let af: Vec<f64> = alphas.iter().map(|a| a.to_f64().unwrap_or(f64::NAN)).collect();
    let hf = h.to_f64().unwrap_or(f64::NAN);
    validate(&af, hf, m_exponent, c0)?;
    let exact = |e: &LadderEntry| -> (Rational64, i64) {
        let a = e.beta.iter().zip(alphas).map(|(&b, &al)| al * Rational64::from_integer(2 * b as i64 + 1) / 2).sum();
        (a, e.k)
    };
    let entries = merge_sorted(enumerate(&af, hf, m_exponent, c0), |a, b| exact(a) == exact(b));
    // Float sorting may separate exactly equal keys only if they were not
    // adjacent; recheck all pairs that lie within rounding distance.
    let mut merged: Vec<LadderEntry> = Vec::with_capacity(entries.len());
    for e in entries {
        if let Some(prev) = merged.iter_mut().rev().take_while(|p| (e.z - p.z).abs() <= 1e-9).find(|p| exact(p) == exact(&e)) {
            prev.multiplicity += e.multiplicity;
        } else {
            merged.push(e);
        }
    }
    Ok(QuasimodeLadder { m_exponent, c0, h: hf, alphas: af, count: merged.len(), entries: merged })
}

#[derive(Clone, Debug, Serialize)]
pub struct CountPoint {
    pub h: f64,
    pub count: usize,
    /// `log N(h) / log(1/h)`.
    pub ratio: f64,
}

/// `N(h)` over a list of `h` values, with the least-squares slope of
/// `log N` against `log(1/h)`.
pub fn counting_sweep(alphas: &[f64], hs: &[f64], m_exponent: u32, c0: f64) -> Result<(Vec<CountPoint>, f64), QuasimodeError> {
    let mut pts = Vec::new();
    for &h in hs {
        let l = exact_model_ladder(alphas, h, m_exponent, c0)?;
        let ratio = if l.count > 0 { (l.count as f64).ln() / (1.0 / h).ln() } else { f64::NEG_INFINITY };
        pts.push(CountPoint { h, count: l.count, ratio });
    }
    let xs: Vec<f64> = pts.iter().map(|p| (1.0 / p.h).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| (p.count.max(1) as f64).ln()).collect();
    Ok((pts, slope(&xs, &ys)))
}

pub(crate) fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn count_at_one_hundredth_matches_enumeration() {
        let l = exact_model_ladder(&[1.0], 0.01, 2, 1.0).unwrap();
        // Independent enumeration over a generous box.
        let mut n = 0;
        for k in -50i64..=50 {
            if 2.0 * PI * (k.abs() as f64) * 0.01 > 2.0 * 0.1 {
                continue;
            }
            for b in 0..1000 {
                if (0.005 * (2 * b + 1) as f64 + 2.0 * PI * 0.01 * k as f64).abs() <= 0.1 {
                    n += 1;
                }
            }
        }
        assert_eq!(l.count, n);
        assert_eq!(l.count, 70);
        assert!(l.entries.iter().all(|e| e.z.abs() <= l.window() && e.k.abs() <= l.k_max()));
    }

    #[test]
    fn zero_window_is_empty() {
        assert_eq!(exact_model_ladder(&[1.0], 0.01, 2, 0.0).unwrap().count, 0);
    }

    #[test]
    fn shrinking_c0_never_adds_entries() {
        let mut prev = usize::MAX;
        for c0 in [2.0, 1.5, 1.0, 0.5, 0.1] {
            let n = exact_model_ladder(&[1.0, 1.3], 0.003, 2, c0).unwrap().count;
            assert!(n <= prev);
            prev = n;
        }
    }

    #[test]
    fn rational_bookkeeping_merges_exact_ties() {
        let a = Rational64::new(3, 4);
        let l = exact_model_ladder_rational(&[a, a], Rational64::new(1, 100), 2, 1.0).unwrap();
        let f = exact_model_ladder(&[0.75, 0.75], 0.01, 2, 1.0).unwrap();
        assert_eq!(l.count, f.count);
        assert!(l.entries.iter().any(|e| e.multiplicity > 1));
        let total: usize = l.entries.iter().map(|e| e.multiplicity).sum();
        assert!(total > l.count);
    }

    #[test]
    fn distinct_values() {
        let l = exact_model_ladder(&[1.0], 1e-3, 2, 1.0).unwrap();
        assert!(l.entries.windows(2).all(|w| w[1].z - w[0].z > 1e-12));
        assert!(l.entries.iter().all(|e| e.multiplicity == 1));
    }
}
