//! Dense linear algebra shared by the numerical modules.
//!
//! nalgebra's generic matrix product is slow for complex entries, so complex
//! products are split into four real GEMMs. The matrix exponential is the
//! degree-13 Padé scaling-and-squaring method.

use std::io::Write;
use std::path::Path;

use nalgebra::{ComplexField, DMatrix};
use serde::Deserialize;
use thiserror::Error;

use crate::{CMat, RMat, C64};

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix exponential refused: 1-norm {norm:e} of the argument is not usable")]
    ExpmNorm { norm: f64 },
    #[error("matrix exponential overflowed (argument 1-norm {norm:e})")]
    ExpmOverflow { norm: f64 },
    #[error("singular Padé denominator")]
    Singular,
    #[error("matrix file: {0}")]
    Io(#[from] std::io::Error),
    #[error("matrix json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("matrix json: {0}")]
    Shape(String),
}

pub fn split(a: &CMat) -> (RMat, RMat) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

pub fn join(re: &RMat, im: &RMat) -> CMat {
    re.zip_map(im, C64::new)
}

pub fn to_complex(a: &RMat) -> CMat {
    a.map(|x| C64::new(x, 0.0))
}

/// Complex matrix product through real GEMMs.
pub fn cmul(a: &CMat, b: &CMat) -> CMat {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    join(&re, &im)
}

/// `a^H b`.
pub fn cmul_adjoint(a: &CMat, b: &CMat) -> CMat {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = ar.tr_mul(&br) + ai.tr_mul(&bi);
    let im = ar.tr_mul(&bi) - ai.tr_mul(&br);
    join(&re, &im)
}

pub fn norm1<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.clone().modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn frobenius<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    a.iter().map(|z| z.clone().modulus_squared()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn spectral_norm<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;
const MAX_EXPM_NORM: f64 = 1e8;

fn expm_generic<T, F>(a: &DMatrix<T>, mul: F) -> Result<DMatrix<T>, LinalgError>
where
    T: ComplexField<RealField = f64> + Copy,
    F: Fn(&DMatrix<T>, &DMatrix<T>) -> DMatrix<T>,
{
    let n = a.nrows();
    let norm = norm1(a);
    if !norm.is_finite() || norm > MAX_EXPM_NORM {
        return Err(LinalgError::ExpmNorm { norm });
    }
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let scale = T::from_real(0.5f64.powi(s));
    let a = a * scale;
    let id = DMatrix::<T>::identity(n, n);
    let c = |k: usize| T::from_real(PADE13[k]);
    let a2 = mul(&a, &a);
    let a4 = mul(&a2, &a2);
    let a6 = mul(&a4, &a2);
    let inner_u = &a6 * c(13) + &a4 * c(11) + &a2 * c(9);
    let u_arg = mul(&a6, &inner_u) + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &id * c(1);
    let u = mul(&a, &u_arg);
    let inner_v = &a6 * c(12) + &a4 * c(10) + &a2 * c(8);
    let v = mul(&a6, &inner_v) + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &id * c(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or(LinalgError::Singular)?;
    for _ in 0..s {
        r = mul(&r, &r);
    }
    if r.iter().any(|z| !z.clone().modulus().is_finite()) {
        return Err(LinalgError::ExpmOverflow { norm });
    }
    Ok(r)
}

/// `exp(a)` for a real matrix.
pub fn expm(a: &RMat) -> Result<RMat, LinalgError> {
    expm_generic(a, |x, y| x * y)
}

/// `exp(a)` for a complex matrix.
pub fn expm_complex(a: &CMat) -> Result<CMat, LinalgError> {
    expm_generic(a, cmul)
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
pub fn sym_eigen(a: &RMat) -> (Vec<f64>, RMat) {
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut idx: Vec<usize> = (0..a.nrows()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = RMat::from_fn(a.nrows(), a.ncols(), |r, c| eig.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Apply a scalar function to a symmetric matrix through its eigenbasis.
pub fn sym_fn(a: &RMat, f: impl Fn(f64) -> f64) -> RMat {
    let (vals, vecs) = sym_eigen(a);
    let d = RMat::from_diagonal(&nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|&x| f(x))));
    &vecs * d * vecs.transpose()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Uses the real symmetric solver when the imaginary part vanishes.
pub fn herm_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let (re, im) = split(a);
    if im.iter().all(|&x| x == 0.0) {
        let (vals, vecs) = sym_eigen(&re);
        return (vals, to_complex(&vecs));
    }
    let h = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut idx: Vec<usize> = (0..a.nrows()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(a.nrows(), a.ncols(), |r, c| eig.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn herm_eigenvalues(a: &CMat) -> Vec<f64> {
    let (re, im) = split(a);
    let mut vals: Vec<f64> = if im.iter().all(|&x| x == 0.0) {
        ((&re + re.transpose()) * 0.5).symmetric_eigenvalues().iter().cloned().collect()
    } else {
        ((a + a.adjoint()) * C64::new(0.5, 0.0)).symmetric_eigenvalues().iter().cloned().collect()
    };
    vals.sort_by(f64::total_cmp);
    vals
}

/// Orthonormal basis for the span of the columns (modified Gram-Schmidt,
/// twice), dropping columns whose residual falls below `tol`.
pub fn orthonormalize<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>, tol: f64) -> DMatrix<T> {
    let mut cols: Vec<nalgebra::DVector<T>> = Vec::new();
    for j in 0..a.ncols() {
        let mut v = a.column(j).into_owned();
        let scale = v.norm();
        for _ in 0..2 {
            for q in &cols {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let nv = v.norm();
        if nv > tol * scale.max(1e-300) {
            cols.push(v / T::from_real(nv));
        }
    }
    if cols.is_empty() {
        return DMatrix::zeros(a.nrows(), 0);
    }
    DMatrix::from_columns(&cols)
}

/// Orthonormal basis of the `k` right singular directions with the smallest
/// singular values, and those singular values (ascending).
pub fn smallest_right_singular<T: ComplexField<RealField = f64> + Copy>(
    a: &DMatrix<T>,
    k: usize,
) -> (DMatrix<T>, Vec<f64>) {
    let n = a.ncols();
    // Work with a square matrix so that v_t has all n rows.
    let sq = if a.nrows() >= n { a.clone() } else { a.clone().insert_rows(a.nrows(), n - a.nrows(), T::zero()) };
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let take: Vec<usize> = idx.into_iter().take(k).collect();
    let basis = DMatrix::from_fn(n, k, |r, c| vt[(take[c], r)].conjugate());
    let vals = take.iter().map(|&i| svd.singular_values[i]).collect();
    (basis, vals)
}

/// Numerical rank with an absolute threshold on the singular values.
pub fn rank<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    a.clone().singular_values().iter().filter(|&&s| s > tol).count()
}

#[derive(Debug, Deserialize)]
struct MatrixJson {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

/// Parse the `{"dim": n, "rows": [[...], ...]}` exchange format.
pub fn matrix_from_json(text: &str) -> Result<RMat, LinalgError> {
    let m: MatrixJson = serde_json::from_str(text)?;
    if m.rows.len() != m.dim || m.rows.iter().any(|r| r.len() != m.dim) {
        return Err(LinalgError::Shape(format!("expected {0}x{0} rows", m.dim)));
    }
    Ok(RMat::from_fn(m.dim, m.dim, |i, j| m.rows[i][j]))
}

pub fn read_matrix(path: &Path) -> Result<RMat, LinalgError> {
    matrix_from_json(&std::fs::read_to_string(path)?)
}

/// Serialize a square matrix with 17 significant digits per entry.
pub fn matrix_to_json(a: &RMat) -> String {
    let rows: Vec<String> = (0..a.nrows())
        .map(|i| {
            let cells: Vec<String> = (0..a.ncols()).map(|j| fmt17(a[(i, j)])).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("{{\"dim\": {}, \"rows\": [{}]}}", a.nrows(), rows.join(", "))
}

pub fn write_matrix(path: &Path, a: &RMat) -> Result<(), LinalgError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(matrix_to_json(a).as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Decimal rendering with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
