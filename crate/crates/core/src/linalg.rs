//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(r: usize, k: usize) -> CMatrix {
    CMatrix::zeros(r, k)
}

/// Builds a matrix from row slices of `(re, im)` pairs.
pub fn from_rows(rows: &[&[(f64, f64)]]) -> CMatrix {
    let r = rows.len();
    let k = if r == 0 { 0 } else { rows[0].len() };
    CMatrix::from_fn(r, k, |i, j| c(rows[i][j].0, rows[i][j].1))
}

pub fn real_diag(d: &[f64]) -> CMatrix {
    let n = d.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { c(d[i], 0.0) } else { C64::new(0.0, 0.0) })
}

pub fn scalar(z: C64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}

/// Frobenius norm.
pub fn norm(m: &CMatrix) -> f64 {
    m.norm()
}

pub fn vnorm(v: &CVector) -> f64 {
    v.norm()
}

/// `defect / scale`, falling back to the absolute defect when the scale vanishes.
pub fn rel(defect: f64, scale: f64) -> f64 {
    if scale > f64::MIN_POSITIVE {
        defect / scale
    } else {
        defect
    }
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite(m: &CMatrix, what: &str) -> Result<()> {
    if all_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

pub fn ensure_square(m: &CMatrix, what: &str) -> Result<()> {
    if m.nrows() == m.ncols() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

pub fn ensure_shape(m: &CMatrix, r: usize, k: usize, what: &str) -> Result<()> {
    if m.nrows() == r && m.ncols() == k {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "{what} must be {r}x{k}, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

/// Relative Hermitian defect ‖M − M*‖ / ‖M‖.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    rel(norm(&(m - m.adjoint())), norm(m))
}

pub fn ensure_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    let defect = hermitian_defect(m);
    if defect <= tol {
        Ok(())
    } else {
        Err(Error::NotHermitian { defect })
    }
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `m`.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let e = hermitian_part(m).symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&k| e.eigenvalues[k]).collect();
    let vecs = CMatrix::from_fn(n, n, |i, j| e.eigenvectors[(i, idx[j])]);
    (vals, vecs)
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    eigh(m).0
}

/// Inertia counts (positive, negative, zero) with zero band `band`.
pub fn inertia(eigs: &[f64], band: f64) -> (usize, usize, usize) {
    let mut pos = 0;
    let mut neg = 0;
    let mut zero = 0;
    for &e in eigs {
        if e > band {
            pos += 1;
        } else if e < -band {
            neg += 1;
        } else {
            zero += 1;
        }
    }
    (pos, neg, zero)
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn sigma_min(m: &CMatrix) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub fn sigma_max(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Euclidean orthonormal basis (columns) of the numerical kernel of `m`,
/// keeping right singular vectors whose singular value is at most `thresh`.
/// Also returns all singular values (descending, padded with zeros up to `ncols`).
pub fn kernel_basis(m: &CMatrix, thresh: f64) -> (CMatrix, Vec<f64>) {
    let k = m.ncols();
    if k == 0 {
        return (zeros(0, 0), Vec::new());
    }
    let r = m.nrows().max(k);
    let mut padded = zeros(r, k);
    padded.view_mut((0, 0), (m.nrows(), k)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let vals: Vec<f64> = order.iter().map(|&j| svd.singular_values[j]).collect();
    let keep: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&j| svd.singular_values[j] <= thresh)
        .collect();
    let mut basis = zeros(k, keep.len());
    for (col, &j) in keep.iter().enumerate() {
        for i in 0..k {
            basis[(i, col)] = v_t[(j, i)].conj();
        }
    }
    (basis, vals)
}

/// Solves `a x = b`, refusing numerically singular systems.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    ensure_square(a, "system matrix")?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch("right-hand side rows".into()));
    }
    if a.nrows() == 0 {
        return Ok(zeros(0, b.ncols()));
    }
    let s = singular_values(a);
    if s[s.len() - 1] <= 1e-14 * s[0].max(f64::MIN_POSITIVE) {
        return Err(Error::Numerical("singular linear system".into()));
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Numerical("singular linear system".into()))
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    solve(a, &eye(a.nrows()))
}

/// Reciprocal 2-norm condition number σ_min/σ_max (1 for empty matrices).
pub fn rcond(a: &CMatrix) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        (Some(_), Some(_)) => 0.0,
        _ => 1.0,
    }
}

/// Solves `(a − z I) x = b` with a proximity guard against the spectrum of `a`.
pub fn resolvent_solve(a: &CMatrix, z: C64, b: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    if n == 0 {
        return Ok(zeros(0, b.ncols()));
    }
    let shifted = a - eye(n) * z;
    let smin = sigma_min(&shifted);
    if smin <= 1e-12 * norm(a).max(1.0) {
        return Err(Error::SpectrumHit(fmt_c(z)));
    }
    shifted
        .lu()
        .solve(b)
        .ok_or_else(|| Error::SpectrumHit(fmt_c(z)))
}

pub fn fmt_c(z: C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

/// Eigenvalues of a general complex square matrix.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    a.clone()
        .schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))
}

/// Grows an orthonormal basis `q` (columns) by the candidate columns, keeping
/// residuals whose norm exceeds `thresh`. Returns the indices of accepted candidates.
pub fn orth_extend(q: &mut Vec<CVector>, cands: &CMatrix, thresh: f64) -> Vec<usize> {
    let mut accepted = Vec::new();
    for j in 0..cands.ncols() {
        let mut r: CVector = cands.column(j).into_owned();
        for _ in 0..2 {
            for qi in q.iter() {
                let p = qi.dotc(&r);
                r -= qi * p;
            }
        }
        let nr = r.norm();
        if nr > thresh {
            q.push(r / C64::new(nr, 0.0));
            accepted.push(j);
        }
    }
    accepted
}

pub fn columns_to_matrix(rows: usize, cols: &[CVector]) -> CMatrix {
    let mut m = zeros(rows, cols.len());
    for (j, v) in cols.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut m = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    m
}

pub fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows(), "hstack row mismatch");
    let mut m = zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    m
}

pub fn vstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.ncols(), "vstack column mismatch");
    let mut m = zeros(a.nrows() + b.nrows(), a.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    m
}

/// Euclidean orthogonal projector onto the column span of an orthonormal `q`.
pub fn projector(q: &CMatrix) -> CMatrix {
    q * q.adjoint()
}

/// Integer power by repeated multiplication.
pub fn mat_pow(a: &CMatrix, k: usize) -> CMatrix {
    let mut r = eye(a.nrows());
    for _ in 0..k {
        r = &r * a;
    }
    r
}
