use std::ops::Range;

use nalgebra::{ComplexField, DMatrix, DVector};
use serde::Serialize;

use super::{standard_j, symplectic_defect, SymplecticError, SymplecticMatrix};
use crate::linalg::{self, LinalgError};
use crate::{CMat, RMat, C64};

pub const DEFAULT_TOL_UNIT: f64 = 1e-6;
/// Relative gap below which computed eigenvalues are merged into one cluster.
const CLUSTER_GAP: f64 = 1e-6;
/// Singular-value threshold for the staircase rank test on `log` of the
/// restricted map, which is dimensionless.
const RANK_TOL: f64 = 1e-6;
const PARTNER_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    ComplexHyperbolic,
    RealPositive,
    RealNegative,
    Elliptic,
}

/// One Jordan block of the normal form.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralBlock {
    pub kind: BlockKind,
    /// Representative eigenvalue: `|μ| > 1` and `Im μ > 0` for complex
    /// hyperbolic blocks, `Im μ > 0` for elliptic ones.
    pub eigenvalue: C64,
    /// Jordan block size `k_j` (always 1 for elliptic blocks).
    pub multiplicity: usize,
    /// Chosen logarithm: principal `log μ`, `log(-μ)` for negative real `μ`.
    pub log: C64,
    /// `+1` or `-1` for elliptic blocks (sign of `F_j / Im λ_j`), 0 otherwise.
    pub krein_sign: i8,
    /// Range of the block's `x` coordinates in the normal-form basis.
    pub coords: Range<usize>,
}

/// An eigenvalue together with its stored logarithm.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Branch {
    pub eigenvalue: C64,
    pub log: C64,
}


/// Normal form `dS = T exp(-JF) exp(B) T⁻¹` of a symplectic matrix.
///
/// `b` and `f` are expressed in the normal-form coordinates whose basis is
/// the columns of `basis`: first the `x` directions of all blocks (complex
/// hyperbolic, real positive, real negative, elliptic), then the dual `ξ`
/// directions in the same order.
#[derive(Clone, Debug)]
pub struct SpectralClassification {
    pub n_hc: usize,
    pub n_hr_plus: usize,
    pub n_hr_minus: usize,
    pub n_e: usize,
    pub blocks: Vec<SpectralBlock>,
    pub b: RMat,
    pub f: RMat,
    pub basis: RMat,
    pub basis_inverse: RMat,
    /// `‖T exp(-JF) exp(B) T⁻¹ - dS‖ / ‖dS‖` (Frobenius).
    pub reconstruction_error: f64,
    /// Same comparison carried out in normal-form coordinates.
    pub normal_error: f64,
    pub basis_defect: f64,
    branches: Vec<Branch>,
}

impl SpectralClassification {
    pub fn half_dim(&self) -> usize {
        self.b.nrows() / 2
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// `B` in the original coordinates, `T B T⁻¹`.
    pub fn b_original(&self) -> RMat {
        &self.basis * &self.b * &self.basis_inverse
    }

    /// `F` in the original coordinates, `T⁻ᵀ F T⁻¹`, so that
    /// `exp(-J F') = T exp(-JF) T⁻¹` for symplectic `T`.
    pub fn f_original(&self) -> RMat {
        self.basis_inverse.transpose() * &self.f * &self.basis_inverse
    }

    /// `E = exp(-JF)` in normal-form coordinates.
    pub fn e_normal(&self) -> Result<RMat, LinalgError> {
        linalg::expm(&(-(standard_j(self.half_dim()) * &self.f)))
    }

    /// The `x` block of `B`: `B = diag(B_x, -B_xᵀ)`.
    pub fn b_x(&self) -> RMat {
        let m = self.half_dim();
        self.b.view((0, 0), (m, m)).into_owned()
    }

    /// Normal-form `x` coordinates belonging to elliptic blocks.
    pub fn elliptic_coords(&self) -> Range<usize> {
        let m = self.half_dim();
        (m - self.n_e)..m
    }

    pub fn to_original(&self, normal: &RMat) -> RMat {
        &self.basis * normal * &self.basis_inverse
    }
}

#[derive(Clone, Debug)]
struct Cluster {
    mean: C64,
    size: usize,
}

fn cluster(eig: &[C64]) -> Vec<Cluster> {
    let n = eig.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for k in i + 1..n {
            let scale = eig[i].norm().max(eig[k].norm()).max(1.0);
            if (eig[i] - eig[k]).norm() <= CLUSTER_GAP * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, k));
                parent[a] = b;
            }
        }
    }
    let mut out: Vec<(usize, C64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match out.iter_mut().find(|c| c.0 == r) {
            Some(c) => {
                c.1 += eig[i];
                c.2 += 1;
            }
            None => out.push((r, eig[i], 1)),
        }
    }
    out.into_iter()
        .map(|(_, sum, size)| Cluster { mean: sum / size as f64, size })
        .collect()
}

/// Coefficient vectors of Jordan chains of `log` of a restricted map with a
/// single (clustered) eigenvalue, together with the scalar part `λ`.
struct JordanData<T: nalgebra::Scalar> {
    lambda: T,
    /// Each chain is `(v_1, …, v_k)` with `N v_1 = 0`, `N v_l = v_{l-1}`.
    chains: Vec<Vec<DVector<T>>>,
}

fn mat_pow<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>, k: usize) -> DMatrix<T> {
    let mut p = DMatrix::<T>::identity(a.nrows(), a.ncols());
    for _ in 0..k {
        p = &p * a;
    }
    p
}

fn jordan_log<T: ComplexField<RealField = f64> + Copy>(ae: &DMatrix<T>) -> JordanData<T> {
    let a = ae.nrows();
    if a == 1 {
        return JordanData { lambda: ae[(0, 0)].ln(), chains: vec![vec![DVector::from_element(1, T::one())]] };
    }
    let mu = ae.trace() / T::from_usize(a).unwrap();
    let na = (ae - DMatrix::<T>::identity(a, a) * mu) / mu;
    let mut nl = DMatrix::<T>::zeros(a, a);
    let mut p = DMatrix::<T>::identity(a, a);
    for k in 1..=a {
        p = &p * &na;
        let c = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
        nl += &p * T::from_real(c);
    }
    let lambda = mu.ln();
    let mut ranks = vec![a];
    for j in 1..=a {
        let r = linalg::rank(&mat_pow(&nl, j), RANK_TOL);
        ranks.push(r.min(ranks[j - 1]));
        if r == 0 {
            break;
        }
    }
    while ranks.len() < a + 2 {
        ranks.push(0);
    }
    if ranks[1] == 0 {
        let chains = (0..a)
            .map(|i| vec![DVector::from_fn(a, |r, _| if r == i { T::one() } else { T::zero() })])
            .collect();
        return JordanData { lambda, chains };
    }
    let longest = (1..=a).filter(|&j| ranks[j - 1] > ranks[j]).max().unwrap_or(1);
    let kernel = |j: usize| -> DMatrix<T> {
        if j == 0 {
            return DMatrix::zeros(a, 0);
        }
        linalg::smallest_right_singular(&mat_pow(&nl, j), a - ranks[j]).0
    };
    let mut chains: Vec<Vec<DVector<T>>> = Vec::new();
    for j in (1..=longest).rev() {
        let count = ranks[j - 1] + ranks[j + 1] - 2 * ranks[j];
        if count == 0 {
            continue;
        }
        let kj = kernel(j);
        let mut cols: Vec<DVector<T>> = kernel(j - 1).column_iter().map(|c| c.into_owned()).collect();
        for ch in &chains {
            // Existing chains longer than j contribute their level-j vector.
            cols.push(ch[j - 1].clone());
        }
        let w = if cols.is_empty() {
            DMatrix::<T>::zeros(a, 0)
        } else {
            linalg::orthonormalize(&DMatrix::from_columns(&cols), 1e-10)
        };
        let proj = &kj - &w * (w.adjoint() * &kj);
        let svd = proj.svd(true, false);
        let u = svd.u.expect("requested u");
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
        for &i in idx.iter().take(count) {
            let top = u.column(i).into_owned();
            let mut chain = vec![top];
            for _ in 1..j {
                let next = &nl * chain.last().unwrap();
                chain.push(next);
            }
            chain.reverse();
            chains.push(chain);
        }
    }
    JordanData { lambda, chains }
}

/// Columns and structure contributed by one eigenvalue cluster.
struct Piece {
    kind: BlockKind,
    eigenvalue: C64,
    lambda: C64,
    krein_sign: i8,
    block_sizes: Vec<usize>,
    x_cols: Vec<DVector<f64>>,
    xi_cols: Vec<DVector<f64>>,
    b_x: RMat,
    f_diag: Vec<f64>,
}

fn block_diag(blocks: &[RMat]) -> RMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = RMat::zeros(n, n);
    let mut o = 0;
    for b in blocks {
        out.view_mut((o, o), b.shape()).copy_from(b);
        o += b.nrows();
    }
    out
}

fn jordan_real(lambda: f64, k: usize) -> RMat {
    RMat::from_fn(k, k, |i, j| if i == j { lambda } else if j == i + 1 { 1.0 } else { 0.0 })
}

fn jordan_complex(lambda: C64, k: usize) -> RMat {
    let mut out = RMat::zeros(2 * k, 2 * k);
    for l in 0..k {
        let o = 2 * l;
        out[(o, o)] = lambda.re;
        out[(o, o + 1)] = lambda.im;
        out[(o + 1, o)] = -lambda.im;
        out[(o + 1, o + 1)] = lambda.re;
        if l + 1 < k {
            out[(o, o + 2)] = 1.0;
            out[(o + 1, o + 3)] = 1.0;
        }
    }
    out
}

/// Dual basis in the partner subspace spanned by `w`: `eᵢᵀ J fⱼ = -δᵢⱼ`.
fn dual_basis(x_cols: &[DVector<f64>], w: &RMat) -> Result<Vec<DVector<f64>>, SymplecticError> {
    let e = RMat::from_columns(x_cols);
    let j = standard_j(e.nrows() / 2);
    let pairing = e.transpose() * j * w;
    let inv = pairing.try_inverse().ok_or(LinalgError::Singular)?;
    let f = -(w * inv);
    Ok(f.column_iter().map(|c| c.into_owned()).collect())
}

fn hyperbolic_real_piece(a: &RMat, cl: &Cluster, partner: &Cluster, kind: BlockKind) -> Result<Piece, SymplecticError> {
    let n = a.nrows();
    let mu = cl.mean.re;
    let shifted = a - RMat::identity(n, n) * mu;
    let (u, _) = linalg::smallest_right_singular(&mat_pow(&shifted, cl.size), cl.size);
    let mut ae = u.transpose() * a * &u;
    if kind == BlockKind::RealNegative {
        ae = -ae;
    }
    let jd = jordan_log(&ae);
    let lambda = jd.lambda;
    let mut x_cols = Vec::new();
    let mut blocks = Vec::new();
    let mut sizes = Vec::new();
    for ch in &jd.chains {
        sizes.push(ch.len());
        blocks.push(jordan_real(lambda, ch.len()));
        for v in ch {
            x_cols.push(&u * v);
        }
    }
    let shifted = a - RMat::identity(n, n) * partner.mean.re;
    let (w, _) = linalg::smallest_right_singular(&mat_pow(&shifted, partner.size), partner.size);
    let xi_cols = dual_basis(&x_cols, &w)?;
    let f = if kind == BlockKind::RealNegative { std::f64::consts::PI } else { 0.0 };
    Ok(Piece {
        kind,
        eigenvalue: C64::new(mu, 0.0),
        lambda: C64::new(lambda, 0.0),
        krein_sign: 0,
        f_diag: vec![f; x_cols.len()],
        block_sizes: sizes,
        x_cols,
        xi_cols,
        b_x: block_diag(&blocks),
    })
}

fn complex_hyperbolic_piece(ac: &CMat, cl: &Cluster, partner: &Cluster) -> Result<Piece, SymplecticError> {
    let n = ac.nrows();
    let shifted = ac - CMat::identity(n, n) * cl.mean;
    let (u, _) = linalg::smallest_right_singular(&mat_pow(&shifted, cl.size), cl.size);
    let ae = u.adjoint() * ac * &u;
    let jd = jordan_log(&ae);
    let lambda = jd.lambda;
    let mut x_cols = Vec::new();
    let mut blocks = Vec::new();
    let mut sizes = Vec::new();
    for ch in &jd.chains {
        sizes.push(ch.len());
        blocks.push(jordan_complex(lambda, ch.len()));
        for v in ch {
            let w = &u * v;
            x_cols.push(w.map(|z| z.re));
            x_cols.push(w.map(|z| z.im));
        }
    }
    // Real span of E_{1/μ} ⊕ E_{1/μ̄}.
    let shifted = ac - CMat::identity(n, n) * partner.mean;
    let (w, _) = linalg::smallest_right_singular(&mat_pow(&shifted, partner.size), partner.size);
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for c in w.column_iter() {
        cols.push(c.map(|z| z.re));
        cols.push(c.map(|z| z.im));
    }
    let w_real = linalg::orthonormalize(&RMat::from_columns(&cols), 1e-8);
    if w_real.ncols() != x_cols.len() {
        return Err(SymplecticError::Pairing { re: partner.mean.re, im: partner.mean.im });
    }
    let xi_cols = dual_basis(&x_cols, &w_real)?;
    Ok(Piece {
        kind: BlockKind::ComplexHyperbolic,
        eigenvalue: cl.mean,
        lambda,
        krein_sign: 0,
        f_diag: vec![0.0; x_cols.len()],
        block_sizes: sizes,
        x_cols,
        xi_cols,
        b_x: block_diag(&blocks),
    })
}

fn elliptic_piece(a: &RMat, ac: &CMat, cl: &Cluster) -> Piece {
    let n = ac.nrows();
    let shifted = ac - CMat::identity(n, n) * cl.mean;
    let (u, _) = linalg::smallest_right_singular(&shifted, 1);
    let v = u.column(0).into_owned();
    let rayleigh = v.dotc(&(ac * &v));
    let alpha = rayleigh.arg();
    let p = v.map(|z| z.re);
    let q = v.map(|z| z.im);
    let j = standard_j(n / 2);
    let omega = p.dot(&(&j * &q));
    let (e, f, sign) = if omega < 0.0 {
        let s = (-omega).sqrt();
        (p / s, q / s, 1i8)
    } else {
        let s = omega.sqrt();
        (p / s, -q / s, -1i8)
    };
    let _ = a;
    Piece {
        kind: BlockKind::Elliptic,
        eigenvalue: C64::from_polar(1.0, alpha),
        lambda: C64::new(0.0, alpha),
        krein_sign: sign,
        block_sizes: vec![1],
        x_cols: vec![e],
        xi_cols: vec![f],
        b_x: RMat::zeros(1, 1),
        f_diag: vec![sign as f64 * alpha],
    }
}

fn find_partner(clusters: &[Cluster], target: C64, size: usize) -> Result<usize, SymplecticError> {
    let (idx, dist) = clusters
        .iter()
        .enumerate()
        .map(|(i, c)| (i, (c.mean - target).norm()))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .ok_or(SymplecticError::Pairing { re: target.re, im: target.im })?;
    if dist > PARTNER_TOL * target.norm().max(1.0) || clusters[idx].size != size {
        return Err(SymplecticError::Pairing { re: target.re, im: target.im });
    }
    Ok(idx)
}

/// Normal form of a symplectic matrix: counts of complex-hyperbolic,
/// real-positive, real-negative and elliptic blocks, Jordan sizes, chosen
/// logarithms and the factors `B`, `F`.
pub fn classify_spectrum(ds: &SymplecticMatrix, tol_unit: f64) -> Result<SpectralClassification, SymplecticError> {
    let a = ds.entries();
    let n = ds.dim();
    let m = n / 2;
    let ac = linalg::to_complex(a);
    let eig: Vec<C64> = a.clone().complex_eigenvalues().iter().cloned().collect();
    let mut clusters = cluster(&eig);
    let mut kinds = Vec::with_capacity(clusters.len());
    for c in clusters.iter_mut() {
        let r = c.mean.norm();
        let dist = (r - 1.0).abs();
        let real = c.mean.im.abs() <= CLUSTER_GAP * r.max(1.0);
        if real {
            c.mean.im = 0.0;
        }
        let kind = if dist <= tol_unit {
            if real {
                return Err(SymplecticError::UnitEigenvalue { re: c.mean.re, im: c.mean.im });
            }
            if c.size > 1 {
                return Err(SymplecticError::RepeatedElliptic { alpha: c.mean.arg().abs(), multiplicity: c.size });
            }
            BlockKind::Elliptic
        } else if dist < 10.0 * tol_unit {
            return Err(SymplecticError::Ambiguous { re: c.mean.re, im: c.mean.im, distance: dist });
        } else if real {
            if c.mean.re > 0.0 {
                BlockKind::RealPositive
            } else {
                BlockKind::RealNegative
            }
        } else {
            BlockKind::ComplexHyperbolic
        };
        kinds.push(kind);
    }

    let mut pieces: Vec<(Piece, Vec<Branch>)> = Vec::new();
    for (i, c) in clusters.iter().enumerate() {
        let kind = kinds[i];
        let representative = match kind {
            BlockKind::Elliptic => c.mean.im > 0.0,
            BlockKind::ComplexHyperbolic => c.mean.norm() > 1.0 && c.mean.im > 0.0,
            _ => c.mean.norm() > 1.0,
        };
        if !representative {
            continue;
        }
        let (piece, branches) = match kind {
            BlockKind::Elliptic => {
                let conj = find_partner(&clusters, c.mean.conj(), 1)?;
                let p = elliptic_piece(a, &ac, c);
                let br = vec![
                    Branch { eigenvalue: p.eigenvalue, log: p.lambda },
                    Branch { eigenvalue: clusters[conj].mean, log: -p.lambda },
                ];
                (p, br)
            }
            BlockKind::ComplexHyperbolic => {
                let inv = find_partner(&clusters, c.mean.inv(), c.size)?;
                let conj = find_partner(&clusters, c.mean.conj(), c.size)?;
                let inv_conj = find_partner(&clusters, c.mean.conj().inv(), c.size)?;
                let p = complex_hyperbolic_piece(&ac, c, &clusters[inv])?;
                let br = vec![
                    Branch { eigenvalue: c.mean, log: p.lambda },
                    Branch { eigenvalue: clusters[conj].mean, log: p.lambda.conj() },
                    Branch { eigenvalue: clusters[inv].mean, log: -p.lambda },
                    Branch { eigenvalue: clusters[inv_conj].mean, log: -p.lambda.conj() },
                ];
                (p, br)
            }
            _ => {
                let inv = find_partner(&clusters, c.mean.inv(), c.size)?;
                let p = hyperbolic_real_piece(a, c, &clusters[inv], kind)?;
                let br = vec![
                    Branch { eigenvalue: c.mean, log: p.lambda },
                    Branch { eigenvalue: clusters[inv].mean, log: -p.lambda },
                ];
                (p, br)
            }
        };
        pieces.push((piece, branches));
    }
    let order = |k: BlockKind| match k {
        BlockKind::ComplexHyperbolic => 0,
        BlockKind::RealPositive => 1,
        BlockKind::RealNegative => 2,
        BlockKind::Elliptic => 3,
    };
    pieces.sort_by(|x, y| order(x.0.kind).cmp(&order(y.0.kind)));

    let mut x_cols = Vec::new();
    let mut xi_cols = Vec::new();
    let mut bx_blocks = Vec::new();
    let mut f_diag = Vec::new();
    let mut blocks = Vec::new();
    let mut branches = Vec::new();
    let (mut n_hc, mut n_hrp, mut n_hrm, mut n_e) = (0, 0, 0, 0);
    for (p, br) in pieces {
        let mut offset = x_cols.len();
        let width = if p.kind == BlockKind::ComplexHyperbolic { 2 } else { 1 };
        for &k in &p.block_sizes {
            match p.kind {
                BlockKind::ComplexHyperbolic => n_hc += 1,
                BlockKind::RealPositive => n_hrp += 1,
                BlockKind::RealNegative => n_hrm += 1,
                BlockKind::Elliptic => n_e += 1,
            }
            blocks.push(SpectralBlock {
                kind: p.kind,
                eigenvalue: p.eigenvalue,
                multiplicity: k,
                log: p.lambda,
                krein_sign: p.krein_sign,
                coords: offset..offset + width * k,
            });
            offset += width * k;
        }
        x_cols.extend(p.x_cols);
        xi_cols.extend(p.xi_cols);
        bx_blocks.push(p.b_x);
        f_diag.extend(p.f_diag);
        branches.extend(br);
    }
    if x_cols.len() != m {
        return Err(SymplecticError::Dimension(format!("normal form has {} x-directions, expected {m}", x_cols.len())));
    }
    let mut cols = x_cols;
    cols.extend(xi_cols);
    let basis = RMat::from_columns(&cols);
    let basis_inverse = basis.clone().try_inverse().ok_or(LinalgError::Singular)?;
    let bx = block_diag(&bx_blocks);
    let mut b = RMat::zeros(n, n);
    b.view_mut((0, 0), (m, m)).copy_from(&bx);
    b.view_mut((m, m), (m, m)).copy_from(&(-bx.transpose()));
    let mut f = RMat::zeros(n, n);
    for (i, &v) in f_diag.iter().enumerate() {
        f[(i, i)] = v;
        f[(m + i, m + i)] = v;
    }
    let j = standard_j(m);
    let product = linalg::expm(&(-(&j * &f)))? * linalg::expm(&b)?;
    let norm = linalg::frobenius(a);
    let reconstruction_error = linalg::frobenius(&(&basis * &product * &basis_inverse - a)) / norm;
    let normal_error = linalg::frobenius(&(&product - &basis_inverse * a * &basis)) / norm;
    Ok(SpectralClassification {
        n_hc,
        n_hr_plus: n_hrp,
        n_hr_minus: n_hrm,
        n_e,
        blocks,
        b,
        f,
        basis_defect: symplectic_defect(&basis),
        basis,
        basis_inverse,
        reconstruction_error,
        normal_error,
        branches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn diag(v: &[f64]) -> SymplecticMatrix {
        SymplecticMatrix::new(RMat::from_diagonal(&DVector::from_vec(v.to_vec()))).unwrap()
    }

    #[test]
    fn model_map() {
        let c = classify_spectrum(&diag(&[E, 1.0 / E]), DEFAULT_TOL_UNIT).unwrap();
        assert_eq!((c.n_hc, c.n_hr_plus, c.n_hr_minus, c.n_e), (0, 1, 0, 0));
        assert_eq!(c.f, RMat::zeros(2, 2));
        assert!((c.blocks[0].log.re - 1.0).abs() < 1e-15);
        assert!(c.reconstruction_error < 1e-15);
    }

    #[test]
    fn negative_real_pair() {
        let c = classify_spectrum(&diag(&[-2.0, -0.5]), DEFAULT_TOL_UNIT).unwrap();
        assert_eq!((c.n_hc, c.n_hr_plus, c.n_hr_minus, c.n_e), (0, 0, 1, 0));
        assert!((c.blocks[0].log.re - 2f64.ln()).abs() < 1e-15);
        assert_eq!(c.blocks[0].log.im, 0.0);
        assert_eq!(c.f, RMat::identity(2, 2) * std::f64::consts::PI);
        assert!(c.reconstruction_error < 1e-14);
    }

    #[test]
    fn rotation_is_elliptic() {
        let (co, si) = (1f64.cos(), 1f64.sin());
        // exp(-J) rotates (x, ξ) by one radian.
        let r = SymplecticMatrix::new(RMat::from_row_slice(2, 2, &[co, si, -si, co])).unwrap();
        let c = classify_spectrum(&r, DEFAULT_TOL_UNIT).unwrap();
        assert_eq!(c.n_e, 1);
        assert_eq!(c.b, RMat::zeros(2, 2));
        assert!((c.blocks[0].log.im - 1.0).abs() < 1e-14);
        assert_eq!(c.blocks[0].krein_sign, 1);
        assert!(linalg::frobenius(&(&c.f - RMat::identity(2, 2))) < 1e-14);
        // The opposite rotation has the same angle and negative Krein sign.
        let r = SymplecticMatrix::new(RMat::from_row_slice(2, 2, &[co, -si, si, co])).unwrap();
        let c = classify_spectrum(&r, DEFAULT_TOL_UNIT).unwrap();
        assert_eq!(c.blocks[0].krein_sign, -1);
        assert!(linalg::frobenius(&(&c.f + RMat::identity(2, 2))) < 1e-14);
        assert!(c.reconstruction_error < 1e-14);
    }

    #[test]
    fn identity_and_ambiguous_are_refused() {
        let id = SymplecticMatrix::identity(2).unwrap();
        assert!(matches!(classify_spectrum(&id, DEFAULT_TOL_UNIT), Err(SymplecticError::UnitEigenvalue { .. })));
        let near = diag(&[1.0 + 5e-6, 1.0 / (1.0 + 5e-6)]);
        assert!(matches!(classify_spectrum(&near, DEFAULT_TOL_UNIT), Err(SymplecticError::Ambiguous { .. })));
    }

    #[test]
    fn repeated_elliptic_is_unsupported() {
        let (co, si) = (1f64.cos(), 1f64.sin());
        let mut r = RMat::zeros(4, 4);
        for i in 0..2 {
            r[(i, i)] = co;
            r[(i + 2, i + 2)] = co;
            r[(i, i + 2)] = si;
            r[(i + 2, i)] = -si;
        }
        let r = SymplecticMatrix::new(r).unwrap();
        assert!(matches!(classify_spectrum(&r, DEFAULT_TOL_UNIT), Err(SymplecticError::RepeatedElliptic { .. })));
    }

    #[test]
    fn jordan_block_of_positive_eigenvalue() {
        // exp(diag(Jordan(λ), -Jordan(λ)ᵀ)) has a 2x2 Jordan block at e^λ.
        let bx = jordan_real(0.7, 2);
        let mut b = RMat::zeros(4, 4);
        b.view_mut((0, 0), (2, 2)).copy_from(&bx);
        b.view_mut((2, 2), (2, 2)).copy_from(&(-bx.transpose()));
        let k = SymplecticMatrix::new(linalg::expm(&b).unwrap()).unwrap();
        let c = classify_spectrum(&k, DEFAULT_TOL_UNIT).unwrap();
        assert_eq!(c.n_hr_plus, 1);
        assert_eq!(c.blocks[0].multiplicity, 2);
        assert!((c.blocks[0].log.re - 0.7).abs() < 1e-8);
        assert!(c.reconstruction_error < 1e-8, "{}", c.reconstruction_error);
    }

    #[test]
    fn complex_hyperbolic_block_shape() {
        let lam = C64::new(1.0, 0.5);
        let bx = jordan_complex(lam, 1);
        let mut b = RMat::zeros(4, 4);
        b.view_mut((0, 0), (2, 2)).copy_from(&bx);
        b.view_mut((2, 2), (2, 2)).copy_from(&(-bx.transpose()));
        let k = SymplecticMatrix::new(linalg::expm(&b).unwrap()).unwrap();
        let c = classify_spectrum(&k, DEFAULT_TOL_UNIT).unwrap();
        assert_eq!((c.n_hc, c.blocks[0].multiplicity), (1, 1));
        assert!((c.blocks[0].log - lam).norm() < 1e-12);
        assert!(c.reconstruction_error < 1e-12);
        assert_eq!(c.branches().len(), 4);
    }
}
