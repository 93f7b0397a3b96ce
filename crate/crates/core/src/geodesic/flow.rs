use serde::Serialize;

use super::{GeodesicError, GeodesicState, WarpedMetric};
use crate::Real;

/// Integration stops once `|y|` or `|z|` exceeds this.
const DOMAIN_BOUND: f64 = 10.0;

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory<T> {
    /// `(t, state, energy)` every `stride` steps, first and last included.
    pub samples: Vec<(T, GeodesicState<T>, T)>,
    pub end: GeodesicState<T>,
    pub steps: usize,
    /// Set when the domain guard stopped the integration early.
    pub blown_up: bool,
    /// `max |E(t) - E(0)|` over all steps.
    pub energy_drift: T,
}

fn axpy<T: Real>(y: &[T; 6], a: T, k: &[T; 6]) -> [T; 6] {
    std::array::from_fn(|i| y[i] + a * k[i])
}

fn rk4<T: Real>(m: &WarpedMetric<T>, s: &[T; 6], h: T) -> [T; 6] {
    let half = T::lit(0.5);
    let k1 = m.rhs(s);
    let k2 = m.rhs(&axpy(s, half * h, &k1));
    let k3 = m.rhs(&axpy(s, half * h, &k2));
    let k4 = m.rhs(&axpy(s, h, &k3));
    let six = T::lit(6.0);
    let two = T::lit(2.0);
    std::array::from_fn(|i| s[i] + h / six * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
}

fn step_count<T: Real>(t_end: T, step: T) -> Result<usize, GeodesicError> {
    if !(step > T::zero()) || !(t_end >= T::zero()) || !t_end.is_finite() {
        return Err(GeodesicError::Params(format!("need step > 0 and t ≥ 0 (step = {step}, t = {t_end})")));
    }
    Ok((t_end / step).round().to_usize().unwrap_or(0).max(1))
}

/// Fixed-step RK4 on `[0, t_end]` with `step` adjusted so that an integer
/// number of steps lands on `t_end`.
pub fn integrate<T: Real>(
    metric: &WarpedMetric<T>,
    start: &GeodesicState<T>,
    t_end: T,
    step: T,
    stride: usize,
) -> Result<Trajectory<T>, GeodesicError> {
    let n = step_count(t_end, step)?;
    let h = t_end / T::from_usize(n).expect("step count fits");
    let stride = stride.max(1);
    let bound = T::lit(DOMAIN_BOUND);
    let e0 = metric.energy(start);
    let mut s = start.to_array();
    let mut samples = vec![(T::zero(), *start, e0)];
    let mut drift = T::zero();
    let mut blown_up = false;
    let mut done = 0;
    for i in 1..=n {
        s = rk4(metric, &s, h);
        done = i;
        let st = GeodesicState::from_array(s);
        let e = metric.energy(&st);
        drift = drift.max((e - e0).abs());
        let t = h * T::from_usize(i).expect("step index fits");
        let out = !(s[1].abs() <= bound && s[2].abs() <= bound);
        if i % stride == 0 || i == n || out {
            samples.push((t, st, e));
        }
        if out {
            blown_up = true;
            break;
        }
    }
    Ok(Trajectory { samples, end: GeodesicState::from_array(s), steps: done, blown_up, energy_drift: drift })
}

/// Flow map and its derivative `Φ(t) = ∂s(t)/∂s(0)`.
#[derive(Clone, Debug)]
pub struct Variational<T> {
    pub end: GeodesicState<T>,
    pub phi: [[T; 6]; 6],
    pub energy_drift: T,
    pub steps: usize,
}

type Tangent<T> = ([T; 6], [[T; 6]; 6]);

fn tangent_rhs<T: Real>(m: &WarpedMetric<T>, (s, phi): &Tangent<T>) -> Tangent<T> {
    let j = m.jacobian(s);
    let dphi = std::array::from_fn(|r| std::array::from_fn(|c| (0..6).fold(T::zero(), |a, k| a + j[r][k] * phi[k][c])));
    (m.rhs(s), dphi)
}

fn tangent_axpy<T: Real>((s, p): &Tangent<T>, a: T, (ks, kp): &Tangent<T>) -> Tangent<T> {
    (axpy(s, a, ks), std::array::from_fn(|r| axpy(&p[r], a, &kp[r])))
}

/// Integrates the geodesic and its variational equation together with the
/// same fixed-step RK4, so the two stay synchronized.
pub fn integrate_variational<T: Real>(
    metric: &WarpedMetric<T>,
    start: &GeodesicState<T>,
    t_end: T,
    step: T,
) -> Result<Variational<T>, GeodesicError> {
    let n = step_count(t_end, step)?;
    let h = t_end / T::from_usize(n).expect("step count fits");
    let half = T::lit(0.5);
    let (two, six) = (T::lit(2.0), T::lit(6.0));
    let e0 = metric.energy(start);
    let mut y: Tangent<T> =
        (start.to_array(), std::array::from_fn(|r| std::array::from_fn(|c| if r == c { T::one() } else { T::zero() })));
    let mut drift = T::zero();
    for _ in 0..n {
        let k1 = tangent_rhs(metric, &y);
        let k2 = tangent_rhs(metric, &tangent_axpy(&y, half * h, &k1));
        let k3 = tangent_rhs(metric, &tangent_axpy(&y, half * h, &k2));
        let k4 = tangent_rhs(metric, &tangent_axpy(&y, h, &k3));
        let w = h / six;
        y.0 = std::array::from_fn(|i| y.0[i] + w * (k1.0[i] + two * k2.0[i] + two * k3.0[i] + k4.0[i]));
        y.1 = std::array::from_fn(|r| {
            std::array::from_fn(|c| y.1[r][c] + w * (k1.1[r][c] + two * k2.1[r][c] + two * k3.1[r][c] + k4.1[r][c]))
        });
        drift = drift.max((metric.energy(&GeodesicState::from_array(y.0)) - e0).abs());
    }
    Ok(Variational { end: GeodesicState::from_array(y.0), phi: y.1, energy_drift: drift, steps: n })
}
