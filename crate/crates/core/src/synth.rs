//! Example data and seeded random generators of valid colligations and vessels.

use rand::Rng;

use crate::charfun::{self, CurvePoint};
use crate::coupling;
use crate::error::{Error, Result};
use crate::indefinite::IndefiniteSpace;
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::vessel::{self, Side, Vessel};

/// One-dimensional Hilbert-space vessel with curve λ2(1 − λ1) = 1/4.
pub fn example_vessel() -> Vessel {
    let h = 0.5;
    Vessel::new(
        linalg::scalar(c(1.0, h)),
        linalg::scalar(c(0.0, h)),
        IndefiniteSpace::euclidean(1),
        linalg::from_rows(&[&[(1.0, 0.0)], &[(1.0, 0.0)]]),
        linalg::real_diag(&[1.0, 0.0]),
        linalg::real_diag(&[0.0, 1.0]),
        linalg::from_rows(&[&[(0.0, 0.0), (0.0, -h)], &[(0.0, h), (-1.0, 0.0)]]),
        linalg::from_rows(&[&[(0.0, 0.0), (0.0, h)], &[(0.0, -h), (-1.0, 0.0)]]),
    )
    .expect("example vessel is well formed")
}

pub fn crand<R: Rng>(rng: &mut R) -> C64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng>(rng: &mut R, r: usize, k: usize) -> CMatrix {
    CMatrix::from_fn(r, k, |_, _| crand(rng))
}

pub fn random_hermitian<R: Rng>(rng: &mut R, m: usize) -> CMatrix {
    linalg::hermitian_part(&random_matrix(rng, m, m))
}

pub fn random_unitary<R: Rng>(rng: &mut R, m: usize) -> CMatrix {
    if m == 0 {
        return linalg::zeros(0, 0);
    }
    random_matrix(rng, m, m).qr().q()
}

/// Random Gram T*·diag(I, −I_κ)·T with T a perturbation of the identity.
pub fn random_gram<R: Rng>(rng: &mut R, n: usize, kappa: usize) -> CMatrix {
    let d: Vec<f64> = (0..n).map(|k| if k < n - kappa { 1.0 } else { -1.0 }).collect();
    let t = linalg::eye(n) + random_matrix(rng, n, n) * c(0.3, 0.0);
    t.adjoint() * linalg::real_diag(&d) * t
}

/// Vessel with A1 = N, A2 = polynomial in N, Φ = U[I; 0] and σ_k completing
/// the colligation conditions; γ by `construct_gammas`. Requires n ≤ m.
pub fn random_vessel_direct<R: Rng>(rng: &mut R, m: usize, n: usize, kappa: usize) -> Result<Vessel> {
    if n > m || kappa > n {
        return Err(Error::DimensionMismatch("need kappa <= n <= m".into()));
    }
    let nmat = random_matrix(rng, n, n) * c(0.8, 0.0);
    let (c0, c1, c2) = (crand(rng), crand(rng), crand(rng) * 0.3);
    let a1 = nmat.clone();
    let a2 = linalg::eye(n) * c0 + &nmat * c1 + &nmat * &nmat * c2;
    let g = random_gram(rng, n, kappa);
    let state = IndefiniteSpace::new(g.clone(), 1e-9)?;
    let u = random_unitary(rng, m);
    let phi = u.columns(0, n).into_owned();
    let mut sigma = |a: &CMatrix| -> CMatrix {
        let mk = (&g * a - a.adjoint() * &g) / linalg::I;
        let mut block = linalg::zeros(m, m);
        block.view_mut((0, 0), (n, n)).copy_from(&linalg::hermitian_part(&mk));
        let x = random_matrix(rng, n, m - n);
        block.view_mut((0, n), (n, m - n)).copy_from(&x);
        block.view_mut((n, 0), (m - n, n)).copy_from(&x.adjoint());
        block.view_mut((n, n), (m - n, m - n)).copy_from(&random_hermitian(rng, m - n));
        linalg::hermitian_part(&(&u * block * u.adjoint()))
    };
    let s1 = sigma(&a1);
    let s2 = sigma(&a2);
    let gm = vessel::construct_gammas(&a1, &a2, &phi, &s1, &s2, &state, 1e-9)?;
    Vessel::new(a1, a2, state, phi, s1, s2, gm.gamma, gm.gamma_tilde)
}

/// One-dimensional vessel whose input curve data is `gamma`, attached at the
/// non-real curve point λ with fiber vector u: a_k = conj(λ_k), Φ = t·u.
pub fn point_vessel(
    sigma1: &CMatrix,
    sigma2: &CMatrix,
    gamma: &CMatrix,
    pt: CurvePoint,
    u: &CVector,
) -> Result<Vessel> {
    let s1 = (u.adjoint() * sigma1 * u)[(0, 0)].re;
    let s2 = (u.adjoint() * sigma2 * u)[(0, 0)].re;
    let (im, s) = if s1.abs() >= s2.abs() { (pt.l1.im, s1) } else { (pt.l2.im, s2) };
    if im == 0.0 || s == 0.0 {
        return Err(Error::DegenerateDirection("point vessel needs a non-real point".into()));
    }
    let g = -(im * s).signum();
    let t = (-2.0 * g * im / s).sqrt();
    let phi = CMatrix::from_column_slice(u.len(), 1, (u * c(t, 0.0)).as_slice());
    let state = IndefiniteSpace::new(linalg::scalar(c(g, 0.0)), 1e-9)?;
    let link = vessel::linkage_term(&phi, &(state.gram_inv() * phi.adjoint()), sigma1, sigma2);
    Vessel::new(
        linalg::scalar(pt.l1.conj()),
        linalg::scalar(pt.l2.conj()),
        state,
        phi,
        sigma1.clone(),
        sigma2.clone(),
        gamma.clone(),
        gamma + link,
    )
}

/// Newton steps on (λ, u) for λ1σ2 − λ2σ1 + γ̃ along the line through `pt`
/// with direction (ξ2, −ξ1), normalized by u0*u = 1.
fn polish_point(v: &Vessel, pt: CurvePoint, u0: &CVector, xi: (f64, f64)) -> Option<(CurvePoint, CVector)> {
    let m = u0.len();
    let (d1, d2) = (c(xi.1, 0.0), c(-xi.0, 0.0));
    let m1 = &v.sigma2 * d1 - &v.sigma1 * d2;
    let mut u = u0.clone();
    let mut t = C64::new(0.0, 0.0);
    for _ in 0..6 {
        let p = v.pencil(Side::Output, pt.l1 + d1 * t, pt.l2 + d2 * t);
        let mut jac = linalg::zeros(m + 1, m + 1);
        jac.view_mut((0, 0), (m, m)).copy_from(&p);
        jac.view_mut((0, m), (m, 1)).copy_from(&(&m1 * &u));
        jac.view_mut((m, 0), (1, m)).copy_from(&u0.adjoint());
        let mut rhs = linalg::zeros(m + 1, 1);
        rhs.view_mut((0, 0), (m, 1)).copy_from(&(-(&p * &u)));
        rhs[(m, 0)] = C64::new(1.0, 0.0) - (u0.adjoint() * &u)[(0, 0)];
        let step = linalg::solve(&jac, &rhs).ok()?;
        u += step.view((0, 0), (m, 1));
        t += step[(m, 0)];
    }
    let u = &u / c(u.norm(), 0.0);
    Some((CurvePoint::new(pt.l1 + d1 * t, pt.l2 + d2 * t), u))
}

/// Picks a well-separated non-real point on the output curve of `v` and the
/// one-dimensional vessel attached there.
pub fn random_point_vessel<R: Rng>(rng: &mut R, v: &Vessel) -> Result<Vessel> {
    let p = vessel::discriminant_polynomial(v, Side::Output)?;
    for _ in 0..50 {
        let xi = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let z = c(rng.random_range(-1.0..1.0), rng.random_range(0.3..1.2));
        let Ok(points) = charfun::intersections_with(&p, xi.0, xi.1, z) else { continue };
        for pt in points {
            if pt.l1.im.abs() < 0.05 || pt.l2.im.abs() < 0.05 || pt.l1.norm() > 5.0 || pt.l2.norm() > 5.0 {
                continue;
            }
            let Ok(f) = charfun::fiber(v, pt, Side::Output, 1e-9) else { continue };
            if f.basis.ncols() != 1 {
                continue;
            }
            let Some((pt, u)) = polish_point(v, pt, &f.basis.column(0).into_owned(), xi) else { continue };
            let Ok(pv) = point_vessel(&v.sigma1, &v.sigma2, &v.gamma_tilde, pt, &u) else { continue };
            let scale = linalg::norm(&pv.phi);
            if !(0.05..=5.0).contains(&scale) {
                continue;
            }
            if vessel::check_vessel(&pv, 1e-9).pass {
                return Ok(pv);
            }
        }
    }
    Err(Error::Numerical("no admissible curve point found".into()))
}

/// Base vessel from [`random_vessel_direct`] followed by `blocks` one-dimensional
/// point vessels, each chained to the output curve of the previous coupling.
/// Returns the parts and their coupling.
pub fn random_chain_vessel<R: Rng>(
    rng: &mut R,
    m: usize,
    base_n: usize,
    blocks: usize,
    base_kappa: usize,
) -> Result<(Vec<Vessel>, Vessel)> {
    let base = random_vessel_direct(rng, m, base_n, base_kappa)?;
    let mut parts = vec![base.clone()];
    let mut cur = base;
    for _ in 0..blocks {
        let pv = random_point_vessel(rng, &cur)?;
        cur = coupling::couple(&cur, &pv, 1e-9)?;
        parts.push(pv);
    }
    Ok((parts, cur))
}
