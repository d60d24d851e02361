//! Single-operator colligations and their characteristic functions.

use crate::error::{Error, Result};
use crate::indefinite::{self, IndefiniteSpace};
use crate::kernels::{self, KernelEvaluator};
use crate::linalg::{self, CMatrix, CVector, C64, I};

#[derive(Debug, Clone, PartialEq)]
pub struct Colligation {
    pub a: CMatrix,
    pub state: IndefiniteSpace,
    pub phi: CMatrix,
    pub sigma: CMatrix,
}

impl Colligation {
    pub fn new(a: CMatrix, state: IndefiniteSpace, phi: CMatrix, sigma: CMatrix) -> Result<Self> {
        let n = state.dim();
        linalg::ensure_shape(&a, n, n, "A")?;
        linalg::ensure_square(&sigma, "sigma")?;
        linalg::ensure_shape(&phi, sigma.nrows(), n, "phi")?;
        for (m, name) in [(&a, "A"), (&phi, "phi"), (&sigma, "sigma")] {
            linalg::ensure_finite(m, name)?;
        }
        linalg::ensure_hermitian(&sigma, crate::DEFAULT_TOL)?;
        Ok(Self { a, state, phi, sigma })
    }

    pub fn state_dim(&self) -> usize {
        self.state.dim()
    }

    pub fn outer_dim(&self) -> usize {
        self.sigma.nrows()
    }

    /// Φ^{[*]} = G⁻¹ Φ*.
    pub fn phi_adj(&self) -> CMatrix {
        self.state.gram_inv() * self.phi.adjoint()
    }

    pub fn a_adj(&self) -> CMatrix {
        self.state.gram_inv() * self.a.adjoint() * self.state.gram()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColligationCheck {
    pub residual: f64,
    pub pass: bool,
}

/// Relative defect of (A − A^{[*]})/i = Φ^{[*]} σ Φ for a pair (A, σ).
pub fn colligation_defect(a: &CMatrix, state: &IndefiniteSpace, phi: &CMatrix, sigma: &CMatrix) -> f64 {
    let adj = state.gram_inv() * a.adjoint() * state.gram();
    let phi_adj = state.gram_inv() * phi.adjoint();
    let lhs = (a - &adj) / I;
    let rhs = &phi_adj * sigma * phi;
    let scale = linalg::norm(a)
        + linalg::norm(&adj)
        + linalg::norm(&phi_adj) * linalg::norm(sigma) * linalg::norm(phi);
    linalg::rel(linalg::norm(&(lhs - rhs)), scale)
}

pub fn check_colligation(c: &Colligation, tol: f64) -> ColligationCheck {
    let residual = colligation_defect(&c.a, &c.state, &c.phi, &c.sigma);
    ColligationCheck { residual, pass: residual <= tol }
}

/// S(z) = I − iΦ(A − zI)⁻¹Φ^{[*]}σ.
pub fn char_fn_eval(c: &Colligation, z: C64) -> Result<CMatrix> {
    let m = c.outer_dim();
    let x = linalg::resolvent_solve(&c.a, z, &(c.phi_adj() * &c.sigma))?;
    Ok(linalg::eye(m) - (&c.phi * x) * I)
}

/// Schur kernel of the characteristic function with metric σ.
pub fn schur_kernel(c: &Colligation) -> Result<KernelEvaluator> {
    let owned = c.clone();
    kernels::schur_kernel(move |z| char_fn_eval(&owned, z), c.sigma.clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalSubspace {
    /// Euclidean-orthonormal basis columns.
    pub basis: CMatrix,
    pub neg_index: usize,
    pub nondegenerate: bool,
    pub irreducible: bool,
}

/// Krylov span of `gens` under the operators in `ops`, orthonormal in the Euclidean metric.
pub fn krylov_basis(ops: &[&CMatrix], gens: &CMatrix, tol: f64) -> CMatrix {
    let n = gens.nrows();
    let mut q: Vec<CVector> = Vec::new();
    let seed_thresh = tol * linalg::norm(gens).max(f64::MIN_POSITIVE);
    linalg::orth_extend(&mut q, gens, seed_thresh);
    let mut frontier = 0;
    while frontier < q.len() && q.len() < n {
        let end = q.len();
        for op in ops {
            let block = linalg::columns_to_matrix(n, &q[frontier..end]);
            let cands = *op * block;
            let thresh = tol * linalg::norm(op).max(f64::MIN_POSITIVE);
            linalg::orth_extend(&mut q, &cands, thresh);
        }
        frontier = end;
    }
    q.truncate(n);
    linalg::columns_to_matrix(n, &q)
}

/// Basis and metric status of the subspace spanned by A^k Φ^{[*]}(E).
pub fn principal_subspace(c: &Colligation, tol: f64) -> Result<PrincipalSubspace> {
    let basis = krylov_basis(&[&c.a], &c.phi_adj(), tol);
    principal_from_basis(&c.state, basis, tol)
}

pub(crate) fn principal_from_basis(
    state: &IndefiniteSpace,
    basis: CMatrix,
    tol: f64,
) -> Result<PrincipalSubspace> {
    let status = indefinite::subspace_status(state, &basis, tol)?;
    let irreducible = basis.ncols() == state.dim();
    Ok(PrincipalSubspace {
        basis,
        neg_index: status.neg_index,
        nondegenerate: status.nondegenerate,
        irreducible,
    })
}

/// Relative defect of S(w)*σS(z) − σ = −i(z − w̄)·σΦ(wI−A)^{−[*]}(zI−A)⁻¹Φ^{[*]}σ.
pub fn kernel_identity_residual(c: &Colligation, z: C64, w: C64) -> Result<f64> {
    let sz = char_fn_eval(c, z)?;
    let sw = char_fn_eval(c, w)?;
    let lhs = sw.adjoint() * &c.sigma * &sz - &c.sigma;
    let x = c.phi_adj() * &c.sigma;
    let fz = -linalg::resolvent_solve(&c.a, z, &x)?;
    let fw = -linalg::resolvent_solve(&c.a, w, &x)?;
    let rhs = (fw.adjoint() * c.state.gram() * fz) * (-I * (z - w.conj()));
    let scale = linalg::norm(&sw) * linalg::norm(&c.sigma) * linalg::norm(&sz) + linalg::norm(&c.sigma);
    Ok(linalg::rel(linalg::norm(&(lhs - rhs)), scale))
}

/// Direct coupling of two colligations over the same (E, σ); the characteristic
/// function of the result is S₂·S₁.
pub fn couple_colligations(c1: &Colligation, c2: &Colligation) -> Result<Colligation> {
    if c1.outer_dim() != c2.outer_dim()
        || linalg::norm(&(&c1.sigma - &c2.sigma)) > crate::DEFAULT_TOL * linalg::norm(&c1.sigma).max(1.0)
    {
        return Err(Error::ExternalPartMismatch);
    }
    let n1 = c1.state_dim();
    let n2 = c2.state_dim();
    let mut a = linalg::block_diag(&c1.a, &c2.a);
    let coupling = (c2.phi_adj() * &c1.sigma * &c1.phi) * I;
    a.view_mut((n1, 0), (n2, n1)).copy_from(&coupling);
    let phi = linalg::hstack(&c1.phi, &c2.phi);
    Colligation::new(a, c1.state.direct_sum(&c2.state), phi, c1.sigma.clone())
}
