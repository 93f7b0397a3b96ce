use crate::Real;

/// `exp(-1/t)` for `t > 0`, zero otherwise.
fn bump<T: Real>(t: T) -> T {
    if t <= T::zero() {
        T::zero()
    } else {
        (-t.recip()).exp()
    }
}

fn bump_prime<T: Real>(t: T) -> T {
    if t <= T::zero() {
        T::zero()
    } else {
        (-t.recip()).exp() / (t * t)
    }
}

/// Smooth monotone step from 0 to 1 on `[start, end]`, built from the
/// normalized bump `g(s) = f(s) / (f(s) + f(1-s))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ramp<T> {
    pub start: T,
    pub end: T,
}

impl<T: Real> Ramp<T> {
    pub fn new(start: T, end: T) -> Self {
        assert!(start < end, "ramp support must be a nonempty interval");
        Self { start, end }
    }

    fn local(&self, t: T) -> T {
        (t - self.start) / (self.end - self.start)
    }

    pub fn value(&self, t: T) -> T {
        let s = self.local(t);
        if s <= T::zero() {
            return T::zero();
        }
        if s >= T::one() {
            return T::one();
        }
        let a = bump(s);
        a / (a + bump(T::one() - s))
    }

    pub fn derivative(&self, t: T) -> T {
        let s = self.local(t);
        if s <= T::zero() || s >= T::one() {
            return T::zero();
        }
        let (a, b) = (bump(s), bump(T::one() - s));
        let (da, db) = (bump_prime(s), bump_prime(T::one() - s));
        let den = a + b;
        (da * b + a * db) / (den * den) / (self.end - self.start)
    }

    /// Closed interval containing the support of the derivative.
    pub fn support(&self) -> (T, T) {
        (self.start, self.end)
    }
}

/// The four cutoffs of the deformation: `ψ₁` switches on `E`, `χ` the
/// escape weight, `ψ₂` the artificial hyperbolic part and `ψ` the rest of
/// `B`, in that order along `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeformationSchedule<T> {
    pub psi1: Ramp<T>,
    pub chi: Ramp<T>,
    pub psi2: Ramp<T>,
    pub psi: Ramp<T>,
}

impl<T: Real> Default for DeformationSchedule<T> {
    fn default() -> Self {
        let q = |k: f64| T::lit(k / 4.0);
        Self {
            psi1: Ramp::new(q(0.0), q(1.0)),
            chi: Ramp::new(q(1.0), q(2.0)),
            psi2: Ramp::new(q(2.0), q(3.0)),
            psi: Ramp::new(q(3.0), q(4.0)),
        }
    }
}

impl<T: Real> DeformationSchedule<T> {
    pub fn components(&self) -> [(&'static str, Ramp<T>); 4] {
        [("psi1", self.psi1), ("chi", self.chi), ("psi2", self.psi2), ("psi", self.psi)]
    }
}
