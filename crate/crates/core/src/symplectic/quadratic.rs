use super::{BlockKind, SpectralClassification};
use crate::RMat;

/// Quadratic Hamiltonians read off a spectral classification, in normal-form
/// coordinates `(x, ξ)`:
///
/// * `q(x, ξ) = ⟨B_x x, ξ⟩` generates `exp(B)`;
/// * `q¹(x, ξ) = Σ_j c_j (x_j² + ξ_j²)` generates `E = exp(-JF)`, with
///   `c_j = π/2` on real-negative coordinates and `c_j = ±α_j/2` on elliptic
///   ones (sign = Krein sign);
/// * `q_ah(x, ξ) = Σ_j a_j x_j ξ_j` is the artificial hyperbolic term, with
///   `a_j = 2` on elliptic coordinates and zero elsewhere.
#[derive(Clone, Debug)]
pub struct QuadraticHamiltonian {
    pub hyp: RMat,
    pub rot: Vec<f64>,
    pub ah: Vec<f64>,
    /// Number of hyperbolic `x` coordinates (leading) and elliptic ones
    /// (trailing).
    pub n_hyp: usize,
    pub n_ell: usize,
}

pub fn build_quadratic_hamiltonian(cls: &SpectralClassification) -> QuadraticHamiltonian {
    let m = cls.half_dim();
    let rot = (0..m).map(|j| 0.5 * cls.f[(j, j)]).collect();
    let mut ah = vec![0.0; m];
    for b in cls.blocks.iter().filter(|b| b.kind == BlockKind::Elliptic) {
        for j in b.coords.clone() {
            ah[j] = 2.0;
        }
    }
    QuadraticHamiltonian { hyp: cls.b_x(), rot, ah, n_hyp: m - cls.n_e, n_ell: cls.n_e }
}

fn block2(a: &RMat, b: &RMat, c: &RMat, d: &RMat) -> RMat {
    let m = a.nrows();
    let mut out = RMat::zeros(2 * m, 2 * m);
    out.view_mut((0, 0), (m, m)).copy_from(a);
    out.view_mut((0, m), (m, m)).copy_from(b);
    out.view_mut((m, 0), (m, m)).copy_from(c);
    out.view_mut((m, m), (m, m)).copy_from(d);
    out
}

impl QuadraticHamiltonian {
    pub fn dim(&self) -> usize {
        2 * self.hyp.nrows()
    }

    pub fn half_dim(&self) -> usize {
        self.hyp.nrows()
    }

    pub fn q(&self, x: &[f64], xi: &[f64]) -> f64 {
        let m = self.half_dim();
        (0..m).map(|i| xi[i] * (0..m).map(|k| self.hyp[(i, k)] * x[k]).sum::<f64>()).sum()
    }

    pub fn q1(&self, x: &[f64], xi: &[f64]) -> f64 {
        self.rot.iter().enumerate().map(|(j, c)| c * (x[j] * x[j] + xi[j] * xi[j])).sum()
    }

    pub fn q_ah(&self, x: &[f64], xi: &[f64]) -> f64 {
        self.ah.iter().enumerate().map(|(j, a)| a * x[j] * xi[j]).sum()
    }

    /// `-J·Hess(q) = diag(B_x, -B_xᵀ)`.
    pub fn hamiltonian_matrix_q(&self) -> RMat {
        let m = self.half_dim();
        let z = RMat::zeros(m, m);
        block2(&self.hyp, &z, &z, &(-self.hyp.transpose()))
    }

    pub fn hamiltonian_matrix_q1(&self) -> RMat {
        let m = self.half_dim();
        let c = RMat::from_diagonal(&nalgebra::DVector::from_iterator(m, self.rot.iter().map(|c| 2.0 * c)));
        let z = RMat::zeros(m, m);
        block2(&z, &c, &(-&c), &z)
    }

    pub fn hamiltonian_matrix_ah(&self) -> RMat {
        let m = self.half_dim();
        let a = RMat::from_diagonal(&nalgebra::DVector::from_vec(self.ah.clone()));
        let z = RMat::zeros(m, m);
        block2(&a, &z, &z, &(-&a))
    }

    /// Hamiltonian matrix of `q` plus the elliptic rotation only; this is the
    /// linear field whose action on the escape function is tested for
    /// positivity.
    pub fn escape_field(&self) -> RMat {
        let m = self.half_dim();
        let mut h = self.hamiltonian_matrix_q();
        for j in self.n_hyp..m {
            let c = 2.0 * self.rot[j];
            h[(j, m + j)] += c;
            h[(m + j, j)] -= c;
        }
        h
    }
}
