use serde::Serialize;

use crate::Real;

/// Warped metric `diag(w², 1, 1)` with `w = cosh y · P(z)` and
/// `P(z) = a₄z⁴ + a₂z² + a₀`. The default is `P = 2z⁴ - z² + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WarpedMetric<T> {
    pub a4: T,
    pub a2: T,
    pub a0: T,
}

impl<T: Real> Default for WarpedMetric<T> {
    fn default() -> Self {
        Self { a4: T::lit(2.0), a2: T::lit(-1.0), a0: T::one() }
    }
}

/// Position and velocity; `x` is read modulo 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct GeodesicState<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub vx: T,
    pub vy: T,
    pub vz: T,
}

impl<T: Real> GeodesicState<T> {
    pub fn to_array(&self) -> [T; 6] {
        [self.x, self.y, self.z, self.vx, self.vy, self.vz]
    }

    pub fn from_array(a: [T; 6]) -> Self {
        Self { x: a[0], y: a[1], z: a[2], vx: a[3], vy: a[4], vz: a[5] }
    }

    /// Unit-speed state on the line `y = y0, z = z0` moving in `x`.
    pub fn on_line(metric: &WarpedMetric<T>, y0: T, z0: T) -> Self {
        Self { x: T::zero(), y: y0, z: z0, vx: metric.w(y0, z0).recip(), vy: T::zero(), vz: T::zero() }
    }
}

/// Christoffel symbols `Γ^k_{ij}`, indexed `[k][i][j]` with coordinates
/// ordered `(x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChristoffelTable<T>(pub [[[T; 3]; 3]; 3]);

impl<T: Real> WarpedMetric<T> {
    pub fn p(&self, z: T) -> T {
        let z2 = z * z;
        (self.a4 * z2 + self.a2) * z2 + self.a0
    }

    pub fn p_z(&self, z: T) -> T {
        let two = T::lit(2.0);
        (two * two * self.a4 * z * z + two * self.a2) * z
    }

    pub fn p_zz(&self, z: T) -> T {
        T::lit(12.0) * self.a4 * z * z + T::lit(2.0) * self.a2
    }

    pub fn w(&self, y: T, z: T) -> T {
        y.cosh() * self.p(z)
    }

    pub fn w_y(&self, y: T, z: T) -> T {
        y.sinh() * self.p(z)
    }

    pub fn w_z(&self, y: T, z: T) -> T {
        y.cosh() * self.p_z(z)
    }

    /// Diagonal of `g_{ij}`.
    pub fn metric(&self, y: T, z: T) -> [T; 3] {
        let w = self.w(y, z);
        [w * w, T::one(), T::one()]
    }

    /// `g(v, v)`.
    pub fn energy(&self, s: &GeodesicState<T>) -> T {
        let w = self.w(s.y, s.z);
        w * w * s.vx * s.vx + s.vy * s.vy + s.vz * s.vz
    }

    /// The nonzero symbols are `Γ¹₁₂ = Γ¹₂₁ = tanh y`,
    /// `Γ¹₁₃ = Γ¹₃₁ = P'/P`, `Γ²₁₁ = -sinh y cosh y P²` and
    /// `Γ³₁₁ = -P' P cosh² y`.
    pub fn christoffel(&self, y: T, z: T) -> ChristoffelTable<T> {
        let mut g = [[[T::zero(); 3]; 3]; 3];
        let (p, pz) = (self.p(z), self.p_z(z));
        let (sh, ch) = (y.sinh(), y.cosh());
        g[0][0][1] = y.tanh();
        g[0][1][0] = g[0][0][1];
        g[0][0][2] = pz / p;
        g[0][2][0] = g[0][0][2];
        g[1][0][0] = -sh * ch * p * p;
        g[2][0][0] = -pz * p * ch * ch;
        ChristoffelTable(g)
    }

    /// First-order geodesic system in `(x, y, z, vx, vy, vz)`.
    pub fn rhs(&self, s: &[T; 6]) -> [T; 6] {
        let [_, y, z, vx, vy, vz] = *s;
        let two = T::lit(2.0);
        let (p, pz) = (self.p(z), self.p_z(z));
        let (sh, ch) = (y.sinh(), y.cosh());
        [
            vx,
            vy,
            vz,
            -two * y.tanh() * vy * vx - two * (pz / p) * vz * vx,
            sh * ch * p * p * vx * vx,
            pz * p * ch * ch * vx * vx,
        ]
    }

    /// Jacobian of [`rhs`](Self::rhs), row `i` = derivative of component `i`.
    pub fn jacobian(&self, s: &[T; 6]) -> [[T; 6]; 6] {
        let [_, y, z, vx, vy, vz] = *s;
        let two = T::lit(2.0);
        let (p, pz, pzz) = (self.p(z), self.p_z(z), self.p_zz(z));
        let (th, ch, s2, c2) = (y.tanh(), y.cosh(), (two * y).sinh(), (two * y).cosh());
        let sech2 = (ch * ch).recip();
        let r = pz / p;
        let r_z = (pzz * p - pz * pz) / (p * p);
        let mut j = [[T::zero(); 6]; 6];
        j[0][3] = T::one();
        j[1][4] = T::one();
        j[2][5] = T::one();
        j[3][1] = -two * sech2 * vx * vy;
        j[3][2] = -two * r_z * vx * vz;
        j[3][3] = -two * th * vy - two * r * vz;
        j[3][4] = -two * th * vx;
        j[3][5] = -two * r * vx;
        j[4][1] = c2 * p * p * vx * vx;
        j[4][2] = s2 * p * pz * vx * vx;
        j[4][3] = s2 * p * p * vx;
        j[5][1] = s2 * p * pz * vx * vx;
        j[5][2] = ch * ch * (pz * pz + p * pzz) * vx * vx;
        j[5][3] = two * ch * ch * p * pz * vx;
        j
    }
}
