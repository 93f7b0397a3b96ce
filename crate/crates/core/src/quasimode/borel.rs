use serde::Serialize;

use super::QuasimodeError;
use crate::symplectic::Ramp;
use crate::Real;

/// Truncation certificate `|z̃ - Σ_{j≤mN} z^{(j)}| ≤ C_N h^N` on the tested
/// `h` values.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate<T> {
    pub n: usize,
    /// `C_N` from the construction.
    pub bound_constant: T,
    /// `max_h |z̃ - S_N| / h^N`.
    pub empirical_constant: T,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BorelReport<T> {
    pub schedule: Vec<T>,
    pub hs: Vec<T>,
    pub resummed: Vec<T>,
    pub certificates: Vec<Certificate<T>>,
}

/// `λ_j = max(2^{j+1} C_j, 2^j C_j / C_{j-1}, 2 λ_{j-1}, 1)`.
pub fn borel_schedule<T: Real>(envelope: &[T]) -> Vec<T> {
    let two = T::lit(2.0);
    let mut out: Vec<T> = Vec::with_capacity(envelope.len());
    for (j, &c) in envelope.iter().enumerate() {
        let c = c.abs();
        let p = two.powi(j as i32);
        let mut l = (p * two * c).max(T::one());
        if j > 0 {
            let prev = envelope[j - 1].abs();
            if prev > T::zero() {
                l = l.max(p * c / prev);
            }
            l = l.max(two * out[j - 1]);
        }
        out.push(l);
    }
    out
}

/// Resums `Σ_j c_j h^{(j+1)/m}` with the schedule from [`borel_schedule`].
pub fn borel_resum<T: Real>(
    coeffs: &[T],
    envelope: &[T],
    hs: &[T],
    m_exponent: u32,
    orders: &[usize],
) -> Result<BorelReport<T>, QuasimodeError> {
    let schedule = borel_schedule(envelope);
    borel_resum_with_schedule(coeffs, envelope, &schedule, hs, m_exponent, orders)
}

/// `z̃(h) = Σ_j χ(λ_j t) c_j t^{j+1}`, `t = h^{1/m}`, where `χ = 1` on
/// `[0, 1]`, `χ = 0` on `[2, ∞)`.
pub fn borel_resum_with_schedule<T: Real>(
    coeffs: &[T],
    envelope: &[T],
    schedule: &[T],
    hs: &[T],
    m_exponent: u32,
    orders: &[usize],
) -> Result<BorelReport<T>, QuasimodeError> {
    if coeffs.len() != envelope.len() || coeffs.len() != schedule.len() {
        return Err(QuasimodeError::Params("coefficients, envelope and schedule differ in length".into()));
    }
    if m_exponent == 0 {
        return Err(QuasimodeError::Params("m must be positive".into()));
    }
    for (j, (c, e)) in coeffs.iter().zip(envelope).enumerate() {
        if !(e.is_finite()) || c.abs() > e.abs() {
            return Err(QuasimodeError::Params(format!("|c_{j}| exceeds its envelope")));
        }
    }
    for j in 0..schedule.len() {
        if !(schedule[j] >= T::one()) || (j > 0 && schedule[j] <= schedule[j - 1]) {
            return Err(QuasimodeError::Schedule(j));
        }
    }
    if hs.iter().any(|&h| !(h > T::zero() && h <= T::one())) {
        return Err(QuasimodeError::Params("h values must lie in (0, 1]".into()));
    }
    let cut = Ramp::new(T::one(), T::lit(2.0));
    let inv_m = T::one() / T::from_u32(m_exponent).expect("small integer");
    let resum = |t: T| -> (T, T) {
        let mut sum = T::zero();
        let mut mag = T::zero();
        for (j, (&c, &l)) in coeffs.iter().zip(schedule).enumerate() {
            let w = T::one() - cut.value(l * t);
            if w > T::zero() {
                let term = c * t.powi(j as i32 + 1);
                sum = sum + w * term;
                mag = mag + term.abs();
            }
        }
        (sum, mag)
    };
    let resummed: Vec<T> = hs.iter().map(|&h| resum(h.powf(inv_m)).0).collect();
    let mut certificates = Vec::new();
    for &n in orders {
        let top = m_exponent as usize * n;
        let head: T = envelope.iter().take(top + 1).fold(T::zero(), |a, &c| a + c.abs());
        let lam = if top < schedule.len() { schedule[top] } else { *schedule.last().unwrap_or(&T::one()) };
        let two = T::lit(2.0);
        let tail = envelope
            .iter()
            .zip(schedule)
            .skip(top + 1)
            .fold(T::zero(), |a, (&c, &l)| a + c.abs() * (two / l).min(T::one()));
        let bound = lam.powi(top as i32) * head + tail;
        let mut emp = T::zero();
        let mut ok = true;
        for &h in hs {
            let t = h.powf(inv_m);
            let (z, mag) = resum(t);
            let partial = coeffs.iter().take(top + 1).enumerate().fold(T::zero(), |a, (j, &c)| a + c * t.powi(j as i32 + 1));
            let diff = (z - partial).abs();
            let hn = h.powi(n as i32);
            emp = emp.max(diff / hn);
            // Allow for rounding in the two sums.
            let slack = T::lit(8.0) * T::epsilon() * (mag + partial.abs());
            ok &= diff <= bound * hn + slack;
        }
        certificates.push(Certificate { n, bound_constant: bound, empirical_constant: emp, holds: ok });
    }
    Ok(BorelReport { schedule: schedule.to_vec(), hs: hs.to_vec(), resummed, certificates })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| 10f64.powf(-4.0 + 3.0 * i as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn finite_series_is_summed_exactly_for_small_h() {
        let c = [1.0, -2.0, 0.5, 0.0, 0.0, 0.0];
        let r = borel_resum(&c, &c.map(f64::abs), &[1e-4], 2, &[1]).unwrap();
        let t = 1e-2f64;
        let want = t - 2.0 * t * t + 0.5 * t.powi(3);
        assert!((r.resummed[0] - want).abs() < 1e-18);
    }

    #[test]
    fn geometric_and_factorial_envelopes() {
        let hs = log_grid(40);
        let geo: Vec<f64> = (0..40).map(|j| 2f64.powi(j)).collect();
        let fact: Vec<f64> = (0..40).map(|j| (1..=j).map(|k| k as f64).product()).collect();
        for env in [geo, fact] {
            let r = borel_resum(&env, &env, &hs, 2, &[1, 2, 3]).unwrap();
            assert!(r.schedule.windows(2).all(|w| w[1] > w[0]));
            for c in &r.certificates {
                assert!(c.holds, "{c:?}");
            }
        }
    }

    #[test]
    fn non_monotone_schedule_is_refused() {
        let c = [1.0, 1.0, 1.0];
        let r = borel_resum_with_schedule(&c, &c, &[1.0, 4.0, 3.0], &[0.1], 2, &[1]);
        assert!(matches!(r, Err(QuasimodeError::Schedule(2))));
    }

    #[test]
    fn single_precision_runs() {
        let env: Vec<f32> = (0..12).map(|j| 2f32.powi(j)).collect();
        let r = borel_resum(&env, &env, &[1e-3f32, 1e-2, 1e-1], 2, &[1]).unwrap();
        assert!(r.certificates[0].holds);
    }
}
