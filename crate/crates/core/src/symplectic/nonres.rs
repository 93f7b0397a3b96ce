use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

/// Outcome of the search for integer relations `Σ c_j α_j ∈ πZ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Resonance {
    /// `Σ c_j α_j = k π` for the witness `c` (first nonzero entry positive).
    Resonant { witness: Vec<i64>, pi_multiple: i64, residual: f64 },
    /// No relation with `max |c_j| ≤ bound`, and no near miss either.
    Independent { bound: i64 },
    /// No exact relation within the bound, but a combination came closer to
    /// `πZ` than floating point can separate from zero.
    Undecided { bound: i64, closest: Vec<i64>, residual: f64 },
}

impl Resonance {
    pub fn is_resonant(&self) -> bool {
        matches!(self, Resonance::Resonant { .. })
    }
}

/// Calls `visit` on every integer vector with `max |c_j| = shell` whose
/// first nonzero entry is positive.
fn scan_shell(n: usize, shell: i64, visit: &mut dyn FnMut(&[i64]) -> bool) -> bool {
    let mut c = vec![-shell; n];
    loop {
        let on_shell = c.iter().any(|v| v.abs() == shell);
        let first = c.iter().find(|v| **v != 0).copied().unwrap_or(0);
        if on_shell && first > 0 && visit(&c) {
            return true;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if c[i] < shell {
                c[i] += 1;
                break;
            }
            c[i] = -shell;
        }
    }
}

/// Floating point scan for relations `Σ c_j α_j ∈ πZ` with `|c_j| ≤ bound`,
/// shell by shell in the max norm.
pub fn nonresonance_check(alphas: &[f64], bound: i64) -> Resonance {
    let scale: f64 = alphas.iter().map(|a| a.abs()).sum::<f64>().max(1.0);
    let exact_tol = 64.0 * f64::EPSILON * scale * bound.max(1) as f64;
    let near_tol = 1e-8 * scale;
    let mut closest: Option<(Vec<i64>, f64)> = None;
    for shell in 1..=bound.max(0) {
        let mut hit: Option<(Vec<i64>, i64, f64)> = None;
        scan_shell(alphas.len(), shell, &mut |c| {
            let v: f64 = c.iter().zip(alphas).map(|(&ci, &a)| ci as f64 * a).sum();
            let k = (v / std::f64::consts::PI).round();
            let r = (v - k * std::f64::consts::PI).abs();
            if r <= exact_tol {
                hit = Some((c.to_vec(), k as i64, r));
                return true;
            }
            if r <= near_tol && closest.as_ref().is_none_or(|(_, best)| r < *best) {
                closest = Some((c.to_vec(), r));
            }
            false
        });
        if let Some((witness, pi_multiple, residual)) = hit {
            return Resonance::Resonant { witness, pi_multiple, residual };
        }
    }
    match closest {
        Some((c, r)) => Resonance::Undecided { bound, closest: c, residual: r },
        None => Resonance::Independent { bound },
    }
}

/// An angle `a + bπ` with rational `a`, `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactAngle {
    pub rational: Rational64,
    pub pi_coeff: Rational64,
}

impl ExactAngle {
    pub fn new(rational: Rational64, pi_coeff: Rational64) -> Self {
        Self { rational, pi_coeff }
    }

    pub fn rational(a: Rational64) -> Self {
        Self::new(a, Rational64::zero())
    }

    pub fn pi_multiple(b: Rational64) -> Self {
        Self::new(Rational64::zero(), b)
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64().unwrap_or(f64::NAN) + self.pi_coeff.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI
    }
}

/// Exact relation search: `Σ c_j a_j = 0` and `Σ c_j b_j ∈ Z`, using that `π`
/// is irrational.
pub fn nonresonance_check_exact(alphas: &[ExactAngle], bound: i64) -> Resonance {
    for shell in 1..=bound.max(0) {
        let mut hit: Option<(Vec<i64>, i64)> = None;
        scan_shell(alphas.len(), shell, &mut |c| {
            let mut a = Rational64::zero();
            let mut b = Rational64::zero();
            for (&ci, al) in c.iter().zip(alphas) {
                a += al.rational * ci;
                b += al.pi_coeff * ci;
            }
            if a.is_zero() && b.is_integer() {
                hit = Some((c.to_vec(), b.to_integer()));
                return true;
            }
            false
        });
        if let Some((witness, pi_multiple)) = hit {
            return Resonance::Resonant { witness, pi_multiple, residual: 0.0 };
        }
    }
    Resonance::Independent { bound }
}
