use serde::Serialize;

use super::{exact_model_ladder, LadderEntry, QuasimodeError, QuasimodeLadder};

type Lambda<'a> = Box<dyn Fn(f64) -> f64 + Sync + 'a>;
type Correction<'a> = Box<dyn Fn(f64, &[f64]) -> f64 + Sync + 'a>;

/// Spectral data of the normal form near an elliptic orbit:
///
/// `ζ_β(z) = Σ_j λ_j(z) I_j + Σ_{l≥1} h^l q_l(z, I)`, `I_j = h(2β_j + 1)`.
pub struct Perturbation<'a> {
    /// `λ_j(z)`, with `λ_j(0) = α_j / 2`.
    pub lambdas: Vec<Lambda<'a>>,
    /// `q_l(z, I)` for `l = 1, 2, …`; each must vanish at `I = 0`.
    pub corrections: Vec<Correction<'a>>,
    /// Series terms must satisfy `|z^{(j)}| ≤ (envelope · h^{1/m})^{j+1}`.
    pub envelope: f64,
}

impl<'a> Perturbation<'a> {
    pub fn new(lambdas: Vec<Lambda<'a>>) -> Self {
        Self { lambdas, corrections: Vec::new(), envelope: 10.0 }
    }

    pub fn with_correction(mut self, q: Correction<'a>) -> Self {
        self.corrections.push(q);
        self
    }

    pub fn with_envelope(mut self, envelope: f64) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn zeta(&self, z: f64, beta: &[usize], h: f64) -> f64 {
        let actions: Vec<f64> = beta.iter().map(|&b| h * (2 * b + 1) as f64).collect();
        let main: f64 = self.lambdas.iter().zip(&actions).map(|(l, i)| l(z) * i).sum();
        let corr: f64 = self.corrections.iter().enumerate().map(|(l, q)| h.powi(l as i32 + 1) * q(z, &actions)).sum();
        main + corr
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbedLadder {
    pub ladder: QuasimodeLadder,
    /// `z^{(0)}, …, z^{(order)}` per entry.
    pub increments: Vec<Vec<f64>>,
}

/// Solves `z - ζ_β(z) = 2πkh` by fixed-point iteration started at the
/// exact model value; the successive differences are the series terms
/// `z^{(j)}` and the truncated sum is `z̃_{k,β}`.
pub fn perturbed_ladder(
    p: &Perturbation<'_>,
    h: f64,
    m_exponent: u32,
    c0: f64,
    order: usize,
) -> Result<PerturbedLadder, QuasimodeError> {
    let zero_actions = vec![0.0; p.lambdas.len()];
    for (l, q) in p.corrections.iter().enumerate() {
        let v = q(0.0, &zero_actions);
        if v.abs() > 1e-14 {
            return Err(QuasimodeError::Params(format!("correction q_{} does not vanish at I = 0 ({v:e})", l + 1)));
        }
    }
    let alphas: Vec<f64> = p.lambdas.iter().map(|l| 2.0 * l(0.0)).collect();
    let base = exact_model_ladder(&alphas, h, m_exponent, c0)?;
    let mut entries = Vec::with_capacity(base.entries.len());
    let mut increments = Vec::with_capacity(base.entries.len());
    let inv_m = 1.0 / m_exponent as f64;
    for e in &base.entries {
        let shift = 2.0 * std::f64::consts::PI * e.k as f64 * h;
        let mut terms = vec![e.z];
        let mut z = e.z;
        for j in 1..=order {
            let next = shift + p.zeta(z, &e.beta, h);
            let dz = next - z;
            let bound = (p.envelope * h.powf(inv_m)).powi(j as i32 + 1);
            if dz.abs() > bound {
                return Err(QuasimodeError::Divergence {
                    k: e.k,
                    beta: e.beta.clone(),
                    order: j,
                    magnitude: dz.abs(),
                    bound,
                });
            }
            terms.push(dz);
            z = next;
        }
        let residual = (z - p.zeta(z, &e.beta, h) - shift).abs();
        entries.push(LadderEntry { k: e.k, beta: e.beta.clone(), z, residual, multiplicity: e.multiplicity });
        increments.push(terms);
    }
    Ok(PerturbedLadder {
        ladder: QuasimodeLadder { m_exponent, c0, h, alphas, count: entries.len(), entries },
        increments,
    })
}
