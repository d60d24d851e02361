//! Finite-dimensional Pontryagin spaces given by a Gram matrix.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::DEFAULT_TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct IndefiniteSpace {
    gram: CMatrix,
    gram_inv: CMatrix,
    neg_index: usize,
}

impl IndefiniteSpace {
    /// Validates `gram` (Hermitian, invertible, finite) and records its negative index.
    pub fn new(gram: CMatrix, tol: f64) -> Result<Self> {
        linalg::ensure_square(&gram, "Gram matrix")?;
        linalg::ensure_finite(&gram, "Gram matrix")?;
        let neg_index = neg_index(&gram, tol)?;
        let gram_inv = linalg::inverse(&gram)?;
        Ok(Self { gram, gram_inv, neg_index })
    }

    pub fn euclidean(n: usize) -> Self {
        Self { gram: linalg::eye(n), gram_inv: linalg::eye(n), neg_index: 0 }
    }

    /// Signature space diag(I_p, −I_q).
    pub fn signature(p: usize, q: usize) -> Self {
        let d: Vec<f64> = (0..p + q).map(|k| if k < p { 1.0 } else { -1.0 }).collect();
        let g = linalg::real_diag(&d);
        Self { gram: g.clone(), gram_inv: g, neg_index: q }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn gram_inv(&self) -> &CMatrix {
        &self.gram_inv
    }

    pub fn neg_index(&self) -> usize {
        self.neg_index
    }

    /// Direct sum with Gram diag(G_self, G_other).
    pub fn direct_sum(&self, other: &IndefiniteSpace) -> IndefiniteSpace {
        IndefiniteSpace {
            gram: linalg::block_diag(&self.gram, &other.gram),
            gram_inv: linalg::block_diag(&self.gram_inv, &other.gram_inv),
            neg_index: self.neg_index + other.neg_index,
        }
    }

    /// Indefinite inner product [x, y] = y* G x.
    pub fn inner(&self, x: &CMatrix, y: &CMatrix) -> CMatrix {
        y.adjoint() * &self.gram * x
    }
}

/// Number of negative eigenvalues of a Hermitian matrix.
pub fn neg_index(g: &CMatrix, tol: f64) -> Result<usize> {
    linalg::ensure_square(g, "Gram matrix")?;
    linalg::ensure_hermitian(g, tol)?;
    let eigs = linalg::eigvalsh(g);
    let band = tol * linalg::max_abs(&eigs);
    if let Some(&e) = eigs.iter().find(|e| e.abs() <= band) {
        return Err(Error::NearSingular { eigenvalue: e, band });
    }
    Ok(eigs.iter().filter(|&&e| e < 0.0).count())
}

/// A^{[*]} = G_dom⁻¹ A* G_cod for A mapping `domain` into `codomain`.
pub fn indefinite_adjoint(
    a: &CMatrix,
    domain: &IndefiniteSpace,
    codomain: &IndefiniteSpace,
) -> Result<CMatrix> {
    if a.ncols() != domain.dim() || a.nrows() != codomain.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, spaces have dimensions {} -> {}",
            a.nrows(),
            a.ncols(),
            domain.dim(),
            codomain.dim()
        )));
    }
    Ok(domain.gram_inv() * a.adjoint() * codomain.gram())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorClass {
    pub isometry: bool,
    pub coisometry: bool,
    pub unitary: bool,
    pub contraction: bool,
}

pub fn classify_operator(
    a: &CMatrix,
    domain: &IndefiniteSpace,
    codomain: &IndefiniteSpace,
    tol: f64,
) -> Result<OperatorClass> {
    let adj = indefinite_adjoint(a, domain, codomain)?;
    let isometry = linalg::norm(&(&adj * a - linalg::eye(domain.dim()))) <= tol;
    let coisometry = linalg::norm(&(a * &adj - linalg::eye(codomain.dim()))) <= tol;
    let defect = domain.gram() - a.adjoint() * codomain.gram() * a;
    let contraction = linalg::eigvalsh(&defect).iter().all(|&e| e >= -tol);
    Ok(OperatorClass { isometry, coisometry, unitary: isometry && coisometry, contraction })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalDecomposition {
    pub basis_plus: CMatrix,
    pub basis_minus: CMatrix,
}

/// Gram-orthogonal positive and negative eigenvector families.
pub fn fundamental_decomposition(space: &IndefiniteSpace) -> FundamentalDecomposition {
    let n = space.dim();
    let (vals, vecs) = linalg::eigh(space.gram());
    let minus: Vec<usize> = (0..n).filter(|&k| vals[k] < 0.0).collect();
    let plus: Vec<usize> = (0..n).filter(|&k| vals[k] > 0.0).collect();
    let pick = |idx: &[usize]| {
        let mut m = linalg::zeros(n, idx.len());
        for (j, &k) in idx.iter().enumerate() {
            m.set_column(j, &vecs.column(k));
        }
        m
    };
    FundamentalDecomposition { basis_plus: pick(&plus), basis_minus: pick(&minus) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubspaceStatus {
    pub nondegenerate: bool,
    pub neg_index: usize,
}

/// Non-degeneracy and negative index of the subspace spanned by `basis` columns.
pub fn subspace_status(space: &IndefiniteSpace, basis: &CMatrix, tol: f64) -> Result<SubspaceStatus> {
    if basis.nrows() != space.dim() {
        return Err(Error::DimensionMismatch("basis rows must equal the space dimension".into()));
    }
    if basis.ncols() == 0 {
        return Ok(SubspaceStatus { nondegenerate: true, neg_index: 0 });
    }
    if basis.ncols() > basis.nrows() || linalg::rcond(basis) <= tol {
        return Err(Error::RankDeficientBasis);
    }
    let restricted = basis.adjoint() * space.gram() * basis;
    let eigs = linalg::eigvalsh(&restricted);
    let gnorm = linalg::max_abs(&linalg::eigvalsh(space.gram()));
    let smax = linalg::sigma_max(basis);
    let band = tol * gnorm * smax * smax;
    let (_, neg, zero) = linalg::inertia(&eigs, band);
    Ok(SubspaceStatus { nondegenerate: zero == 0, neg_index: neg })
}

impl Default for IndefiniteSpace {
    fn default() -> Self {
        Self::euclidean(0)
    }
}

/// Convenience: validated space with the default tolerance.
pub fn space(gram: CMatrix) -> Result<IndefiniteSpace> {
    IndefiniteSpace::new(gram, DEFAULT_TOL)
}
