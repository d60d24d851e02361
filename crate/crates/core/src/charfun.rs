//! Complete and joint characteristic functions, fibers and the restoration formula.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, I};
use crate::poly::BivariatePoly;
use crate::vessel::{self, Side, Vessel};

/// W(ξ1, ξ2, z) = I − iΦ(ξ1A1 + ξ2A2 − zI)⁻¹Φ^{[*]}(ξ1σ1 + ξ2σ2).
pub fn ccf_eval(v: &Vessel, xi1: C64, xi2: C64, z: C64) -> Result<CMatrix> {
    let a = &v.a1 * xi1 + &v.a2 * xi2;
    let s = &v.sigma1 * xi1 + &v.sigma2 * xi2;
    let x = linalg::resolvent_solve(&a, z, &(v.phi_adj() * s))?;
    Ok(linalg::eye(v.outer_dim()) - (&v.phi * x) * I)
}

/// W̃(1, 0, z) = I − iσ1Φ(A1 − zI)⁻¹Φ^{[*]}.
pub fn ccf_tilde(v: &Vessel, z: C64) -> Result<CMatrix> {
    let x = linalg::resolvent_solve(&v.a1, z, &v.phi_adj())?;
    Ok(linalg::eye(v.outer_dim()) - (&v.sigma1 * &v.phi * x) * I)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub l1: C64,
    pub l2: C64,
}

impl CurvePoint {
    pub fn new(l1: C64, l2: C64) -> Self {
        Self { l1, l2 }
    }

    pub fn conj(&self) -> Self {
        Self { l1: self.l1.conj(), l2: self.l2.conj() }
    }

    /// ξ1λ1 + ξ2λ2.
    pub fn dot(&self, xi: (f64, f64)) -> C64 {
        self.l1 * xi.0 + self.l2 * xi.1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    pub point: CurvePoint,
    pub side: Side,
    /// Euclidean-orthonormal kernel basis of the pencil at `point`.
    pub basis: CMatrix,
}

/// Kernel of λ1σ2 − λ2σ1 + γ_side at a curve point.
pub fn fiber(v: &Vessel, pt: CurvePoint, side: Side, tol: f64) -> Result<Fiber> {
    let pencil = v.pencil(side, pt.l1, pt.l2);
    let scale = v.pencil_scale(side, pt.l1, pt.l2).max(f64::MIN_POSITIVE);
    let (basis, svals) = linalg::kernel_basis(&pencil, tol * scale);
    if basis.ncols() == 0 {
        let smin = svals.last().copied().unwrap_or(0.0);
        if smin > tol.sqrt() * scale {
            return Err(Error::NotOnCurve(smin / scale));
        }
        return Err(Error::EmptyFiber);
    }
    Ok(Fiber { point: pt, side, basis })
}

fn line_poly(p: &BivariatePoly, xi1: f64, xi2: f64, z: C64) -> (crate::poly::UnivariatePoly, bool) {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    if xi2.abs() >= xi1.abs() {
        // λ1 = t, λ2 = (z − ξ1 t)/ξ2
        (p.restrict(zero, one, z / xi2, C64::new(-xi1 / xi2, 0.0)), true)
    } else {
        // λ2 = t, λ1 = (z − ξ2 t)/ξ1
        (p.restrict(z / xi1, C64::new(-xi2 / xi1, 0.0), zero, one), false)
    }
}

/// Affine points of the input discriminant curve on ξ1λ1 + ξ2λ2 = z.
pub fn line_intersections(v: &Vessel, xi1: f64, xi2: f64, z: C64) -> Result<Vec<CurvePoint>> {
    let p = vessel::discriminant_polynomial(v, Side::Input)?;
    intersections_with(&p, xi1, xi2, z)
}

pub fn intersections_with(p: &BivariatePoly, xi1: f64, xi2: f64, z: C64) -> Result<Vec<CurvePoint>> {
    if !(xi1.is_finite() && xi2.is_finite()) || (xi1 == 0.0 && xi2 == 0.0) {
        return Err(Error::DegenerateDirection("xi must be a nonzero real pair".into()));
    }
    let (q, by_l1) = line_poly(p, xi1, xi2, z);
    let scale = p.max_abs_coeff() * (1.0 + z.norm()).powi(p.total_degree() as i32);
    let q = q.trimmed(0.0);
    let big = q.max_abs_coeff();
    if big <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateDirection("line lies on the curve".into()));
    }
    let q = q.trimmed(1e-12);
    let roots = q.roots()?;
    let rscale = roots.iter().fold(1.0_f64, |a, r| a.max(r.norm()));
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() <= 1e-6 * rscale {
                return Err(Error::MultipleRoots);
            }
        }
    }
    Ok(roots
        .into_iter()
        .map(|t| {
            if by_l1 {
                CurvePoint::new(t, (z - t * xi1) / xi2)
            } else {
                CurvePoint::new((z - t * xi2) / xi1, t)
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct JcfValue {
    /// Coordinates of W u in the output basis, dim Ẽ × dim E.
    pub matrix: CMatrix,
    pub input_basis: CMatrix,
    pub output_basis: CMatrix,
    pub residual: f64,
}

/// Joint characteristic function S(λ): E(λ) → Ẽ(λ) computed with the probe direction ξ.
pub fn jcf_eval(v: &Vessel, pt: CurvePoint, probe: (f64, f64), tol: f64) -> Result<JcfValue> {
    let fin = fiber(v, pt, Side::Input, tol)?;
    let fout = fiber(v, pt, Side::Output, tol)?;
    jcf_with_fibers(v, &fin.basis, &fout.basis, pt, probe, tol)
}

fn jcf_with_fibers(
    v: &Vessel,
    ein: &CMatrix,
    eout: &CMatrix,
    pt: CurvePoint,
    probe: (f64, f64),
    tol: f64,
) -> Result<JcfValue> {
    let w = ccf_eval(v, C64::new(probe.0, 0.0), C64::new(probe.1, 0.0), pt.dot(probe))?;
    let image = &w * ein;
    let coords = eout.adjoint() * &image;
    let residual = linalg::rel(linalg::norm(&(&image - eout * &coords)), linalg::norm(&image));
    if residual > tol {
        return Err(Error::NotIntoOutputFiber(residual));
    }
    Ok(JcfValue { matrix: coords, input_basis: ein.clone(), output_basis: eout.clone(), residual })
}

/// Probe directions tried in order after the requested one.
fn alternate_probes(xi: (f64, f64)) -> Vec<(f64, f64)> {
    let cands = [
        (-xi.1, xi.0),
        (xi.0 + xi.1, xi.1 - xi.0),
        (xi.0 - 0.5 * xi.1, xi.1 + 0.5 * xi.0),
        (1.0, 0.0),
        (0.0, 1.0),
        (1.0, 1.0),
        (1.0, -1.0),
    ];
    cands
        .into_iter()
        .filter(|p| (p.0 * xi.1 - p.1 * xi.0).abs() > 1e-8 * (xi.0.hypot(xi.1) * p.0.hypot(p.1)))
        .collect()
}

/// JCF at `pt` using the first probe from `probes` that avoids the spectrum.
pub fn jcf_any_probe(v: &Vessel, pt: CurvePoint, probes: &[(f64, f64)], tol: f64) -> Result<JcfValue> {
    let mut last = Error::SpectrumHit("no probe direction".into());
    for &p in probes {
        match jcf_eval(v, pt, p, tol) {
            Ok(j) => return Ok(j),
            Err(e @ Error::SpectrumHit(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Restoration {
    pub w_reconstructed: CMatrix,
    pub w_direct: CMatrix,
    pub defect: f64,
    pub points: Vec<CurvePoint>,
    /// Reciprocal condition number of the concatenated fiber bases.
    pub rcond: f64,
}

/// W(ξ, z) = Σ_j S(λ^{(j)}) P(λ^{(j)}) over the curve points of the line ξ·λ = z.
/// Each S(λ^{(j)}) is computed with a probe direction different from ξ.
pub fn restoration(v: &Vessel, xi1: f64, xi2: f64, z: C64, tol: f64) -> Result<Restoration> {
    let m = v.outer_dim();
    let points = line_intersections(v, xi1, xi2, z)?;
    let probes = alternate_probes((xi1, xi2));
    let mut blocks = Vec::with_capacity(points.len());
    let mut dims = 0;
    for &pt in &points {
        let j = jcf_any_probe(v, pt, &probes, tol)?;
        dims += j.input_basis.ncols();
        blocks.push(j);
    }
    if dims != m {
        return Err(Error::FibersDontSpan);
    }
    let mut all = linalg::zeros(m, m);
    let mut col = 0;
    for b in &blocks {
        let k = b.input_basis.ncols();
        all.view_mut((0, col), (m, k)).copy_from(&b.input_basis);
        col += k;
    }
    let rc = linalg::rcond(&all);
    if m > 0 && rc <= 1e-12 {
        return Err(Error::FibersDontSpan);
    }
    let inv = linalg::inverse(&all).map_err(|_| Error::FibersDontSpan)?;
    let mut rec = linalg::zeros(m, m);
    let mut row = 0;
    for b in &blocks {
        let k = b.input_basis.ncols();
        let proj_rows = inv.rows(row, k).into_owned();
        rec += &b.output_basis * &b.matrix * proj_rows;
        row += k;
    }
    let direct = ccf_eval(v, C64::new(xi1, 0.0), C64::new(xi2, 0.0), z)?;
    let defect = linalg::rel(linalg::norm(&(&rec - &direct)), linalg::norm(&direct));
    Ok(Restoration { w_reconstructed: rec, w_direct: direct, defect, points, rcond: rc })
}

/// Denominator ξ·λ¹ − conj(ξ·λ²) of the fiber pairing, switching to the tangent
/// (∂p/∂λ2, −∂p/∂λ1) when pt2 is the conjugate of pt1.
fn pairing_denominator(v: &Vessel, pt1: CurvePoint, pt2: CurvePoint, xi: (f64, f64)) -> Result<C64> {
    let d = pt1.dot(xi) - pt2.dot(xi).conj();
    let scale = 1.0 + pt1.dot(xi).norm() + pt2.dot(xi).norm();
    if d.norm() > 1e-10 * scale {
        return Ok(d);
    }
    let conj_gap = (pt1.l1 - pt2.l1.conj()).norm() + (pt1.l2 - pt2.l2.conj()).norm();
    if conj_gap > 1e-8 * (1.0 + pt1.l1.norm() + pt1.l2.norm()) {
        return Err(Error::ZeroDenominator);
    }
    let p = vessel::discriminant_polynomial(v, Side::Input)?;
    let (d1, d2) = p.gradient(pt1.l1, pt1.l2);
    if d1.norm() + d2.norm() <= 1e-10 * p.term_scale(pt1.l1, pt1.l2).max(f64::MIN_POSITIVE) {
        return Err(Error::SingularCurvePoint);
    }
    let t = d2 * xi.0 - d1 * xi.1;
    if t.norm() <= 1e-14 * (d1.norm() + d2.norm()) {
        return Err(Error::ZeroDenominator);
    }
    Ok(t)
}

/// [u, w] = i·w*(ξ1σ1 + ξ2σ2)u / (ξ·λ¹ − conj(ξ·λ²)) for u at pt1 and w at pt2.
pub fn fiber_pairing(
    v: &Vessel,
    u: &CVector,
    pt1: CurvePoint,
    w: &CVector,
    pt2: CurvePoint,
    xi: (f64, f64),
) -> Result<C64> {
    let s = &v.sigma1 * C64::new(xi.0, 0.0) + &v.sigma2 * C64::new(xi.1, 0.0);
    let num = (w.adjoint() * s * u)[(0, 0)];
    Ok(I * num / pairing_denominator(v, pt1, pt2, xi)?)
}

/// Matrix of [S u_h, S u_j] − [u_h, u_j] for input-fiber vectors u_h at the given points.
/// Entry (h, j) pairs u_h against u_j, matching the sampled kernel Gram convention.
pub fn jcf_gram(
    v: &Vessel,
    points: &[CurvePoint],
    vectors: &[CVector],
    xi: (f64, f64),
) -> Result<CMatrix> {
    if points.len() != vectors.len() {
        return Err(Error::DimensionMismatch("points and vectors differ in length".into()));
    }
    let images: Vec<CVector> = points
        .iter()
        .zip(vectors)
        .map(|(pt, u)| {
            let w = ccf_eval(v, C64::new(xi.0, 0.0), C64::new(xi.1, 0.0), pt.dot(xi))?;
            Ok(&w * u)
        })
        .collect::<Result<_>>()?;
    let n = points.len();
    let mut g = linalg::zeros(n, n);
    for h in 0..n {
        for j in 0..n {
            let after = fiber_pairing(v, &images[h], points[h], &images[j], points[j], xi)?;
            let before = fiber_pairing(v, &vectors[h], points[h], &vectors[j], points[j], xi)?;
            g[(h, j)] = after - before;
        }
    }
    Ok(g)
}

/// Relative defect of (z1σ2 − z2σ1 + γ̃)W(1,0,z1) = W̃(1,0,z1)(z1σ2 − z2σ1 + γ).
pub fn intertwining_residual(v: &Vessel, z1: C64, z2: C64) -> Result<f64> {
    let w = ccf_eval(v, C64::new(1.0, 0.0), C64::new(0.0, 0.0), z1)?;
    let wt = ccf_tilde(v, z1)?;
    let lhs = v.pencil(Side::Output, z1, z2) * &w;
    let rhs = &wt * v.pencil(Side::Input, z1, z2);
    let scale = linalg::norm(&v.pencil(Side::Output, z1, z2)) * linalg::norm(&w)
        + linalg::norm(&wt) * linalg::norm(&v.pencil(Side::Input, z1, z2));
    Ok(linalg::rel(linalg::norm(&(lhs - rhs)), scale))
}

/// |det W(1,0,z1) − det W̃(1,0,z1)| relative to the magnitudes.
pub fn det_equality_residual(v: &Vessel, z1: C64) -> Result<f64> {
    let d1 = ccf_eval(v, C64::new(1.0, 0.0), C64::new(0.0, 0.0), z1)?.determinant();
    let d2 = ccf_tilde(v, z1)?.determinant();
    Ok(linalg::rel((d1 - d2).norm(), d1.norm().max(d2.norm())))
}
