//! Commutative two-operator vessels.

use crate::colligation::{self, krylov_basis};
use crate::error::{Error, Result};
use crate::indefinite::{self, IndefiniteSpace};
use crate::linalg::{self, CMatrix, C64, I};
use crate::poly::BivariatePoly;
use crate::DEFAULT_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Input,
    Output,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "input" => Ok(Side::Input),
            "output" => Ok(Side::Output),
            other => Err(Error::Schema(format!("unknown side {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vessel {
    pub a1: CMatrix,
    pub a2: CMatrix,
    pub state: IndefiniteSpace,
    pub phi: CMatrix,
    pub sigma1: CMatrix,
    pub sigma2: CMatrix,
    pub gamma: CMatrix,
    pub gamma_tilde: CMatrix,
}

impl Vessel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a1: CMatrix,
        a2: CMatrix,
        state: IndefiniteSpace,
        phi: CMatrix,
        sigma1: CMatrix,
        sigma2: CMatrix,
        gamma: CMatrix,
        gamma_tilde: CMatrix,
    ) -> Result<Self> {
        let n = state.dim();
        linalg::ensure_square(&sigma1, "sigma1")?;
        let m = sigma1.nrows();
        linalg::ensure_shape(&a1, n, n, "A1")?;
        linalg::ensure_shape(&a2, n, n, "A2")?;
        linalg::ensure_shape(&phi, m, n, "phi")?;
        for (x, name) in [(&sigma2, "sigma2"), (&gamma, "gamma"), (&gamma_tilde, "gammaTilde")] {
            linalg::ensure_shape(x, m, m, name)?;
        }
        for (x, name) in [
            (&a1, "A1"),
            (&a2, "A2"),
            (&phi, "phi"),
            (&sigma1, "sigma1"),
            (&sigma2, "sigma2"),
            (&gamma, "gamma"),
            (&gamma_tilde, "gammaTilde"),
        ] {
            linalg::ensure_finite(x, name)?;
        }
        for x in [&sigma1, &sigma2, &gamma, &gamma_tilde] {
            linalg::ensure_hermitian(x, DEFAULT_TOL)?;
        }
        Ok(Self { a1, a2, state, phi, sigma1, sigma2, gamma, gamma_tilde })
    }

    /// Vessel with a zero-dimensional state and γ̃ = γ.
    pub fn trivial(sigma1: CMatrix, sigma2: CMatrix, gamma: CMatrix) -> Result<Self> {
        let m = sigma1.nrows();
        Self::new(
            linalg::zeros(0, 0),
            linalg::zeros(0, 0),
            IndefiniteSpace::euclidean(0),
            linalg::zeros(m, 0),
            sigma1,
            sigma2,
            gamma.clone(),
            gamma,
        )
    }

    pub fn state_dim(&self) -> usize {
        self.state.dim()
    }

    pub fn outer_dim(&self) -> usize {
        self.sigma1.nrows()
    }

    pub fn phi_adj(&self) -> CMatrix {
        self.state.gram_inv() * self.phi.adjoint()
    }

    pub fn adj(&self, a: &CMatrix) -> CMatrix {
        self.state.gram_inv() * a.adjoint() * self.state.gram()
    }

    pub fn gamma_side(&self, side: Side) -> &CMatrix {
        match side {
            Side::Input => &self.gamma,
            Side::Output => &self.gamma_tilde,
        }
    }

    /// λ1σ2 − λ2σ1 + γ_side.
    pub fn pencil(&self, side: Side, l1: C64, l2: C64) -> CMatrix {
        &self.sigma2 * l1 - &self.sigma1 * l2 + self.gamma_side(side)
    }

    /// Size of the pencil terms at (λ1, λ2), used to scale fiber tests.
    pub fn pencil_scale(&self, side: Side, l1: C64, l2: C64) -> f64 {
        l1.norm() * linalg::norm(&self.sigma2)
            + l2.norm() * linalg::norm(&self.sigma1)
            + linalg::norm(self.gamma_side(side))
    }

    /// Colligation (A_k, σ_k) of the k-th operator (k = 1, 2).
    pub fn colligation(&self, k: usize) -> Result<colligation::Colligation> {
        let (a, s) = if k == 1 { (&self.a1, &self.sigma1) } else { (&self.a2, &self.sigma2) };
        colligation::Colligation::new(a.clone(), self.state.clone(), self.phi.clone(), s.clone())
    }
}

/// i(σ1ΦΦ^{[*]}σ2 − σ2ΦΦ^{[*]}σ1), written as i(X − X*) so the result is exactly Hermitian.
pub fn linkage_term(phi: &CMatrix, phi_adj: &CMatrix, sigma1: &CMatrix, sigma2: &CMatrix) -> CMatrix {
    let x = sigma1 * phi * phi_adj * sigma2;
    (&x - x.adjoint()) * I
}

#[derive(Debug, Clone, PartialEq)]
pub struct VesselCheck {
    pub commutator: f64,
    pub coll1: f64,
    pub coll2: f64,
    pub input: f64,
    pub output: f64,
    pub linkage: f64,
    pub pass: bool,
    pub warnings: Vec<String>,
}

impl VesselCheck {
    pub fn max_residual(&self) -> f64 {
        [self.commutator, self.coll1, self.coll2, self.input, self.output, self.linkage]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn input_defect(v: &Vessel, gamma: &CMatrix) -> f64 {
    let a1a = v.adj(&v.a1);
    let a2a = v.adj(&v.a2);
    let rhs = &v.sigma1 * &v.phi * &a2a - &v.sigma2 * &v.phi * &a1a;
    let pn = linalg::norm(&v.phi);
    let scale = linalg::norm(gamma) * pn
        + linalg::norm(&v.sigma1) * pn * linalg::norm(&a2a)
        + linalg::norm(&v.sigma2) * pn * linalg::norm(&a1a);
    linalg::rel(linalg::norm(&(gamma * &v.phi - rhs)), scale)
}

pub fn output_defect(v: &Vessel, gamma_tilde: &CMatrix) -> f64 {
    let rhs = &v.sigma1 * &v.phi * &v.a2 - &v.sigma2 * &v.phi * &v.a1;
    let pn = linalg::norm(&v.phi);
    let scale = linalg::norm(gamma_tilde) * pn
        + linalg::norm(&v.sigma1) * pn * linalg::norm(&v.a2)
        + linalg::norm(&v.sigma2) * pn * linalg::norm(&v.a1);
    linalg::rel(linalg::norm(&(gamma_tilde * &v.phi - rhs)), scale)
}

/// Residuals of commutativity, both colligation conditions, input, output and linkage.
pub fn check_vessel(v: &Vessel, tol: f64) -> VesselCheck {
    let comm = &v.a1 * &v.a2 - &v.a2 * &v.a1;
    let commutator = linalg::rel(linalg::norm(&comm), 2.0 * linalg::norm(&v.a1) * linalg::norm(&v.a2));
    let coll1 = colligation::colligation_defect(&v.a1, &v.state, &v.phi, &v.sigma1);
    let coll2 = colligation::colligation_defect(&v.a2, &v.state, &v.phi, &v.sigma2);
    let input = input_defect(v, &v.gamma);
    let output = output_defect(v, &v.gamma_tilde);
    let phi_adj = v.phi_adj();
    let link = linkage_term(&v.phi, &phi_adj, &v.sigma1, &v.sigma2);
    let linkage = linalg::rel(
        linalg::norm(&(&v.gamma_tilde - &v.gamma - &link)),
        linalg::norm(&v.gamma_tilde) + linalg::norm(&v.gamma) + linalg::norm(&link),
    );
    let mut warnings = Vec::new();
    let m = v.outer_dim();
    if m > 0 && linalg::rcond(&v.sigma1) <= tol && linalg::rcond(&v.sigma2) <= tol {
        warnings.push(
            "sigma1 and sigma2 are both singular; the discriminant curve may contain the line at infinity"
                .to_string(),
        );
    }
    let pass = [commutator, coll1, coll2, input, output, linkage].iter().all(|&r| r <= tol);
    VesselCheck { commutator, coll1, coll2, input, output, linkage, pass, warnings }
}

/// Ä_k = α_k1 A1 + α_k2 A2 and σ̈_k likewise; Φ, γ, γ̃ unchanged.
pub fn alpha_transform(v: &Vessel, alpha: [[f64; 2]; 2], tol: f64) -> Result<Vessel> {
    let det = alpha[0][0] * alpha[1][1] - alpha[0][1] * alpha[1][0];
    if !alpha.iter().flatten().all(|x| x.is_finite()) || (det - 1.0).abs() > tol {
        return Err(Error::NotUnimodular(det));
    }
    let mix = |x1: &CMatrix, x2: &CMatrix, k: usize| -> CMatrix {
        x1 * C64::new(alpha[k][0], 0.0) + x2 * C64::new(alpha[k][1], 0.0)
    };
    Ok(Vessel {
        a1: mix(&v.a1, &v.a2, 0),
        a2: mix(&v.a1, &v.a2, 1),
        sigma1: mix(&v.sigma1, &v.sigma2, 0),
        sigma2: mix(&v.sigma1, &v.sigma2, 1),
        ..v.clone()
    })
}

/// det(z1σ2 − z2σ1 + γ_side) as a bivariate polynomial.
pub fn discriminant_polynomial(v: &Vessel, side: Side) -> Result<BivariatePoly> {
    pencil_determinant(&v.sigma1, &v.sigma2, v.gamma_side(side))
}

pub fn pencil_determinant(sigma1: &CMatrix, sigma2: &CMatrix, gamma: &CMatrix) -> Result<BivariatePoly> {
    let m = sigma1.nrows();
    BivariatePoly::interpolate(m, 1e-13, |z1, z2| {
        let p = sigma2 * z1 - sigma1 * z2 + gamma;
        Ok(if m == 0 { C64::new(1.0, 0.0) } else { p.determinant() })
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointPrincipalSubspace {
    pub basis: CMatrix,
    pub neg_index: usize,
    pub nondegenerate: bool,
    pub irreducible: bool,
    /// max_k ‖(I − Π)A_k^{[*]}Π‖ / ‖A_k^{[*]}‖ with Π the Euclidean projector.
    pub adjoint_invariance: f64,
}

/// Joint Krylov span of A1^i A2^j Φ^{[*]}(E).
pub fn principal_subspace_joint(v: &Vessel, tol: f64) -> Result<JointPrincipalSubspace> {
    let basis = krylov_basis(&[&v.a1, &v.a2], &v.phi_adj(), tol);
    let p = colligation::principal_from_basis(&v.state, basis, tol)?;
    let n = v.state_dim();
    let proj = linalg::projector(&p.basis);
    let comp = linalg::eye(n) - &proj;
    let mut adjoint_invariance: f64 = 0.0;
    for a in [&v.a1, &v.a2] {
        let adj = v.adj(a);
        let r = linalg::rel(linalg::norm(&(&comp * &adj * &proj)), linalg::norm(&adj));
        adjoint_invariance = adjoint_invariance.max(r);
    }
    Ok(JointPrincipalSubspace {
        basis: p.basis,
        neg_index: p.neg_index,
        nondegenerate: p.nondegenerate,
        irreducible: p.irreducible,
        adjoint_invariance,
    })
}

/// ‖p(A1, A2)|_principal‖ relative to Σ|c_ij|‖A1‖^i‖A2‖^j.
pub fn cayley_hamilton_residual(v: &Vessel, tol: f64) -> Result<f64> {
    let ps = principal_subspace_joint(v, tol)?;
    if ps.basis.ncols() == 0 {
        return Ok(0.0);
    }
    if !ps.nondegenerate {
        return Err(Error::DegeneratePrincipalSubspace);
    }
    let p = discriminant_polynomial(v, Side::Input)?;
    let n = v.state_dim();
    let (n1, n2) = (linalg::norm(&v.a1), linalg::norm(&v.a2));
    let mut acc = linalg::zeros(n, n);
    let mut scale = 0.0;
    for (&(i, j), &c) in &p.coeffs {
        acc += linalg::mat_pow(&v.a1, i) * linalg::mat_pow(&v.a2, j) * c;
        scale += c.norm() * n1.powi(i as i32) * n2.powi(j as i32);
    }
    Ok(linalg::rel(linalg::norm(&(acc * &ps.basis)), scale))
}

/// Selfadjointness defect of A1, A2 compressed to the indefinite orthogonal
/// complement of the principal subspace.
pub fn selfadjoint_remainder_residual(v: &Vessel, tol: f64) -> Result<f64> {
    let ps = principal_subspace_joint(v, tol)?;
    if !ps.nondegenerate {
        return Err(Error::DegeneratePrincipalSubspace);
    }
    let g = v.state.gram();
    let (comp, _) = linalg::kernel_basis(&(ps.basis.adjoint() * g), tol * linalg::norm(g));
    if comp.ncols() == 0 {
        return Ok(0.0);
    }
    let gc = comp.adjoint() * g * &comp;
    let gc_inv = linalg::inverse(&gc)?;
    let mut worst: f64 = 0.0;
    for a in [&v.a1, &v.a2] {
        let restricted = &gc_inv * comp.adjoint() * g * a * &comp;
        let h = &gc * &restricted;
        let r = linalg::rel(linalg::norm(&(&h - h.adjoint())), 2.0 * linalg::norm(&h));
        worst = worst.max(r);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gammas {
    pub gamma: CMatrix,
    pub gamma_tilde: CMatrix,
    pub residual: f64,
}

/// Minimum-norm Hermitian γ with γΦ = R: with Φ = U_r S_r V_r* and Y = R V_r S_r⁻¹,
/// γ = YU_r* + U_rY* − U_r·herm(U_r*Y)·U_r*.
fn hermitian_solve(phi: &CMatrix, rhs: &CMatrix) -> CMatrix {
    let (m, n) = phi.shape();
    if m == 0 || n == 0 {
        return linalg::zeros(m, m);
    }
    let svd = phi.clone().svd(true, true);
    let (Some(u), Some(vt)) = (svd.u, svd.v_t) else { return linalg::zeros(m, m) };
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, &b| a.max(b));
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > 1e-12 * smax)
        .collect();
    let mut q = linalg::zeros(m, keep.len());
    let mut y = linalg::zeros(m, keep.len());
    for (col, &k) in keep.iter().enumerate() {
        q.set_column(col, &u.column(k));
        let vk = vt.row(k).adjoint();
        y.set_column(col, &(rhs * vk / C64::new(svd.singular_values[k], 0.0)));
    }
    let h = linalg::hermitian_part(&(q.adjoint() * &y));
    linalg::hermitian_part(&(&y * q.adjoint() + &q * y.adjoint() - &q * h * q.adjoint()))
}

/// Minimum-norm Hermitian γ with γΦ = σ1ΦA2^{[*]} − σ2ΦA1^{[*]}, and γ̃ from the linkage condition.
#[allow(clippy::too_many_arguments)]
pub fn construct_gammas(
    a1: &CMatrix,
    a2: &CMatrix,
    phi: &CMatrix,
    sigma1: &CMatrix,
    sigma2: &CMatrix,
    state: &IndefiniteSpace,
    tol: f64,
) -> Result<Gammas> {
    let m = sigma1.nrows();
    let probe = Vessel::new(
        a1.clone(),
        a2.clone(),
        state.clone(),
        phi.clone(),
        sigma1.clone(),
        sigma2.clone(),
        linalg::zeros(m, m),
        linalg::zeros(m, m),
    )?;
    let rhs = sigma1 * phi * probe.adj(a2) - sigma2 * phi * probe.adj(a1);
    let gamma = hermitian_solve(phi, &rhs);
    let residual = input_defect(&probe, &gamma);
    if residual > tol {
        return Err(Error::NoHermitianSolution(residual));
    }
    let gamma_tilde = &gamma + linkage_term(phi, &probe.phi_adj(), sigma1, sigma2);
    Ok(Gammas { gamma, gamma_tilde, residual })
}

/// Checks that the outer data of two vessels agree.
pub fn same_external_part(v1: &Vessel, v2: &Vessel, tol: f64) -> bool {
    v1.outer_dim() == v2.outer_dim()
        && linalg::norm(&(&v1.sigma1 - &v2.sigma1)) <= tol * linalg::norm(&v1.sigma1).max(1.0)
        && linalg::norm(&(&v1.sigma2 - &v2.sigma2)) <= tol * linalg::norm(&v1.sigma2).max(1.0)
}

/// Negative index of the state space.
pub fn neg_index(v: &Vessel) -> usize {
    v.state.neg_index()
}

/// Subspace status of the joint principal subspace, for reporting.
pub fn principal_status(v: &Vessel, tol: f64) -> Result<indefinite::SubspaceStatus> {
    let ps = principal_subspace_joint(v, tol)?;
    Ok(indefinite::SubspaceStatus { nondegenerate: ps.nondegenerate, neg_index: ps.neg_index })
}
