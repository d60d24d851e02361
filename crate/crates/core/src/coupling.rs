//! Coupling of vessels and decomposition along invariant subspaces.

use crate::error::{Error, Result};
use crate::indefinite::{self, IndefiniteSpace};
use crate::linalg::{self, CMatrix, CVector, I};
use crate::vessel::{self, Vessel};

/// Coupled vessel on the direct-sum state with
/// A_k = [[A_k¹, 0], [iΦ²^{[*]}σ_kΦ¹, A_k²]], Φ = [Φ¹ Φ²], γ = γ¹, γ̃ = γ̃².
pub fn couple(v1: &Vessel, v2: &Vessel, tol: f64) -> Result<Vessel> {
    if !vessel::same_external_part(v1, v2, tol) {
        return Err(Error::ExternalPartMismatch);
    }
    let gap = linalg::rel(
        linalg::norm(&(&v2.gamma - &v1.gamma_tilde)),
        linalg::norm(&v2.gamma).max(linalg::norm(&v1.gamma_tilde)),
    );
    if gap > tol {
        return Err(Error::GammaChainMismatch(gap));
    }
    let n1 = v1.state_dim();
    let n2 = v2.state_dim();
    let p2 = v2.phi_adj();
    let block = |a1: &CMatrix, a2: &CMatrix, s: &CMatrix| {
        let mut a = linalg::block_diag(a1, a2);
        a.view_mut((n1, 0), (n2, n1)).copy_from(&((&p2 * s * &v1.phi) * I));
        a
    };
    Vessel::new(
        block(&v1.a1, &v2.a1, &v1.sigma1),
        block(&v1.a2, &v2.a2, &v1.sigma2),
        v1.state.direct_sum(&v2.state),
        linalg::hstack(&v1.phi, &v2.phi),
        v1.sigma1.clone(),
        v1.sigma2.clone(),
        v1.gamma.clone(),
        v2.gamma_tilde.clone(),
    )
}

/// max_k ‖(I − Π)A_kB‖ / (‖A_k‖‖B‖) with Π the Euclidean projector onto span B.
pub fn invariance_residual(v: &Vessel, basis: &CMatrix) -> f64 {
    if basis.ncols() == 0 {
        return 0.0;
    }
    let mut q = Vec::new();
    linalg::orth_extend(&mut q, basis, 0.0);
    let qm = linalg::columns_to_matrix(basis.nrows(), &q);
    let comp = linalg::eye(basis.nrows()) - linalg::projector(&qm);
    [&v.a1, &v.a2]
        .iter()
        .map(|a| {
            linalg::rel(
                linalg::norm(&(&comp * *a * basis)),
                linalg::norm(a) * linalg::norm(basis),
            )
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub v1: Vessel,
    pub v2: Vessel,
    /// Change of basis T = [C | B] with C spanning the indefinite complement.
    pub transform: CMatrix,
}

/// Columns of Π₁ = I − B(B*GB)⁻¹B*G chosen greedily (pivoted Gram–Schmidt),
/// returned unmodified and in their original order.
fn complement_columns(proj: &CMatrix, k: usize) -> CMatrix {
    let n = proj.nrows();
    let mut chosen: Vec<usize> = Vec::new();
    let mut q: Vec<CVector> = Vec::new();
    for _ in 0..k {
        let mut best = None;
        let mut best_norm = -1.0;
        for j in (0..n).filter(|j| !chosen.contains(j)) {
            let mut r: CVector = proj.column(j).into_owned();
            for _ in 0..2 {
                for qi in &q {
                    let p = qi.dotc(&r);
                    r -= qi * p;
                }
            }
            let nr = r.norm();
            if nr > best_norm {
                best_norm = nr;
                best = Some((j, r));
            }
        }
        let Some((j, r)) = best else { break };
        chosen.push(j);
        q.push(&r / linalg::c(best_norm.max(f64::MIN_POSITIVE), 0.0));
    }
    chosen.sort_unstable();
    let mut out = linalg::zeros(n, chosen.len());
    for (col, &j) in chosen.iter().enumerate() {
        out.set_column(col, &proj.column(j));
    }
    out
}

/// Splits `v` along the A1, A2-invariant nondegenerate subspace spanned by `basis`.
/// The factor on the subspace is `v2`, the factor on its indefinite complement is `v1`,
/// and couple(v1, v2) is similar to `v`.
pub fn decompose(v: &Vessel, basis: &CMatrix, tol: f64) -> Result<Decomposition> {
    let n = v.state_dim();
    if basis.nrows() != n {
        return Err(Error::DimensionMismatch("basis rows must equal the state dimension".into()));
    }
    let inv = invariance_residual(v, basis);
    if inv > tol {
        return Err(Error::NotInvariant(inv));
    }
    let status = indefinite::subspace_status(&v.state, basis, tol)
        .map_err(|e| if e == Error::RankDeficientBasis { Error::DegenerateSubspace } else { e })?;
    if !status.nondegenerate {
        return Err(Error::DegenerateSubspace);
    }
    let g = v.state.gram();
    let k = basis.ncols();
    let bgb = basis.adjoint() * g * basis;
    let proj = if k == 0 {
        linalg::eye(n)
    } else {
        linalg::eye(n) - basis * linalg::inverse(&bgb)? * basis.adjoint() * g
    };
    let comp = complement_columns(&proj, n - k);
    let t = linalg::hstack(&comp, basis);
    let tinv = linalg::inverse(&t)?;
    let n1 = n - k;
    let gt = t.adjoint() * g * &t;
    let sub = |m: &CMatrix, r: usize, c: usize, h: usize, w: usize| m.view((r, c), (h, w)).into_owned();
    let hermitize = |m: CMatrix| linalg::hermitian_part(&m);
    let g1 = hermitize(sub(&gt, 0, 0, n1, n1));
    let g2 = hermitize(sub(&gt, n1, n1, k, k));
    let a1t = &tinv * &v.a1 * &t;
    let a2t = &tinv * &v.a2 * &t;
    let phit = &v.phi * &t;
    let m = v.outer_dim();
    let s1 = IndefiniteSpace::new(g1, tol)?;
    let s2 = IndefiniteSpace::new(g2, tol)?;
    let phi1 = sub(&phit, 0, 0, m, n1);
    let phi2 = sub(&phit, 0, n1, m, k);
    let gt1 = &v.gamma + vessel::linkage_term(&phi1, &(s1.gram_inv() * phi1.adjoint()), &v.sigma1, &v.sigma2);
    let v1 = Vessel::new(
        sub(&a1t, 0, 0, n1, n1),
        sub(&a2t, 0, 0, n1, n1),
        s1,
        phi1,
        v.sigma1.clone(),
        v.sigma2.clone(),
        v.gamma.clone(),
        gt1.clone(),
    )?;
    let v2 = Vessel::new(
        sub(&a1t, n1, n1, k, k),
        sub(&a2t, n1, n1, k, k),
        s2,
        phi2,
        v.sigma1.clone(),
        v.sigma2.clone(),
        gt1,
        v.gamma_tilde.clone(),
    )?;
    Ok(Decomposition { v1, v2, transform: t })
}

/// Basis of the last `k` coordinate directions of an n-dimensional state.
pub fn trailing_block(n: usize, k: usize) -> CMatrix {
    let mut b = linalg::zeros(n, k);
    for j in 0..k {
        b[(n - k + j, j)] = linalg::c(1.0, 0.0);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{example_vessel, random_chain_vessel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn couple_with_trivial() {
        let v = example_vessel();
        let t = Vessel::trivial(v.sigma1.clone(), v.sigma2.clone(), v.gamma_tilde.clone()).unwrap();
        assert_eq!(couple(&v, &t, 1e-9).unwrap(), v);
    }

    #[test]
    fn couple_rejects_mismatch() {
        let v = example_vessel();
        assert!(matches!(couple(&v, &v, 1e-9), Err(Error::GammaChainMismatch(_))));
        let mut w = v.clone();
        w.sigma1 = linalg::eye(2);
        assert_eq!(couple(&v, &w, 1e-9), Err(Error::ExternalPartMismatch));
    }

    #[test]
    fn decompose_extremes() {
        let v = example_vessel();
        let d = decompose(&v, &linalg::eye(1), 1e-9).unwrap();
        assert_eq!(d.v1.state_dim(), 0);
        assert!(linalg::norm(&(&d.v2.a1 - &v.a1)) < 1e-15);
        let d = decompose(&v, &linalg::zeros(1, 0), 1e-9).unwrap();
        assert_eq!(d.v2.state_dim(), 0);
        assert!(linalg::norm(&(&d.v1.gamma_tilde - &v.gamma_tilde)) < 1e-14);
    }

    #[test]
    fn round_trip_on_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (parts, coupled) = random_chain_vessel(&mut rng, 2, 2, 2, 1).unwrap();
        let (first, second) = (&parts[0], &parts[1]);
        let two = couple(first, second, 1e-9).unwrap();
        assert!(vessel::check_vessel(&two, 1e-9).pass);
        let d = decompose(&two, &trailing_block(two.state_dim(), second.state_dim()), 1e-9).unwrap();
        assert!(linalg::norm(&(&d.v1.a1 - &first.a1)) <= 1e-10 * linalg::norm(&first.a1));
        assert!(linalg::norm(&(&d.v2.a2 - &second.a2)) <= 1e-10 * linalg::norm(&second.a2).max(1.0));
        assert!(vessel::check_vessel(&coupled, 1e-9).pass);
    }
}
