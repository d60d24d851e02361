//! Overdetermined 2D systems generated by a vessel.
//!
//! State and output obey i∂x/∂t_k + A_k x = Φ^{[*]}σ_k u and v = u − iΦx.

use crate::charfun::{self, CurvePoint};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64, I};
use crate::vessel::{Side, Vessel};

/// Finite-difference step of the energy-balance check.
pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub state: CVector,
    pub output: CVector,
}

fn propagator(v: &Vessel, t1: f64, t2: f64) -> CMatrix {
    ((&v.a1 * c(t1, 0.0) + &v.a2 * c(t2, 0.0)) * I).exp()
}

/// f = exp(i(t1A1 + t2A2))h and v = −iΦf.
pub fn evolve_zero_input(v: &Vessel, h: &CVector, t1: f64, t2: f64) -> Trajectory {
    let state = propagator(v, t1, t2) * h;
    let output = (&v.phi * &state) * (-I);
    Trajectory { state, output }
}

/// Relative residual of σ2∂v/∂t1 − σ1∂v/∂t2 + iγ̃v = 0 along the zero-input output.
pub fn output_pde_residual(v: &Vessel, h: &CVector, t1: f64, t2: f64) -> f64 {
    let f = evolve_zero_input(v, h, t1, t2).state;
    let pf = &v.phi * &f;
    // ∂v/∂t_k = ΦA_k f
    let r = &v.sigma2 * &v.phi * &v.a1 * &f - &v.sigma1 * &v.phi * &v.a2 * &f + &v.gamma_tilde * &pf;
    let pn = linalg::norm(&v.phi);
    let scale = pn
        * (linalg::norm(&v.sigma2) * linalg::norm(&v.a1)
            + linalg::norm(&v.sigma1) * linalg::norm(&v.a2)
            + linalg::norm(&v.gamma_tilde))
        * f.norm();
    linalg::rel(r.norm(), scale)
}

fn energy(v: &Vessel, h: &CVector, t1: f64, t2: f64) -> f64 {
    let f = evolve_zero_input(v, h, t1, t2).state;
    (f.adjoint() * v.state.gram() * &f)[(0, 0)].re
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBalance {
    /// Central difference of [f, f] in t_k.
    pub derivative: f64,
    /// −⟨σ_k v, v⟩ for the zero-input output v.
    pub flux: f64,
    pub residual: f64,
}

/// d/dt_k [f, f] = −v*σ_k v for zero input, checked by central differences.
pub fn energy_balance(v: &Vessel, h: &CVector, t1: f64, t2: f64, k: usize) -> EnergyBalance {
    let (d1, d2) = if k == 1 { (FD_STEP, 0.0) } else { (0.0, FD_STEP) };
    let derivative = (energy(v, h, t1 + d1, t2 + d2) - energy(v, h, t1 - d1, t2 - d2)) / (2.0 * FD_STEP);
    let out = evolve_zero_input(v, h, t1, t2);
    let s = if k == 1 { &v.sigma1 } else { &v.sigma2 };
    let flux = -(out.output.adjoint() * s * &out.output)[(0, 0)].re;
    let pn = linalg::norm(&v.phi);
    let scale = linalg::norm(s) * pn * pn * out.state.norm_squared();
    EnergyBalance { derivative, flux, residual: linalg::rel((derivative - flux).abs(), scale) }
}

/// ‖∂²f/∂t1∂t2 − ∂²f/∂t2∂t1‖ relative to ‖A1‖‖A2‖‖f‖.
pub fn mixed_derivative_residual(v: &Vessel, h: &CVector, t1: f64, t2: f64) -> f64 {
    let f = evolve_zero_input(v, h, t1, t2).state;
    let d = (&v.a1 * &v.a2 - &v.a2 * &v.a1) * &f;
    linalg::rel(d.norm(), linalg::norm(&v.a1) * linalg::norm(&v.a2) * f.norm())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWave {
    pub v_hat: CVector,
    pub input_residual: f64,
    pub output_residual: f64,
}

const PROBES: [(f64, f64); 6] = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0), (2.0, 1.0), (1.0, 2.0)];

fn pencil_residual(v: &Vessel, side: Side, pt: CurvePoint, x: &CVector) -> f64 {
    let r = v.pencil(side, pt.l1, pt.l2) * x;
    linalg::rel(r.norm(), v.pencil_scale(side, pt.l1, pt.l2) * x.norm())
}

/// Output amplitude v̂ = W(ξ, ξ·λ)û of the plane wave û e^{i(t1λ1 + t2λ2)}.
pub fn plane_wave_response(v: &Vessel, pt: CurvePoint, u: &CVector, tol: f64) -> Result<PlaneWave> {
    if u.len() != v.outer_dim() {
        return Err(Error::DimensionMismatch("input amplitude length must equal the outer dimension".into()));
    }
    match charfun::fiber(v, pt, Side::Input, tol) {
        Ok(_) => {}
        Err(Error::EmptyFiber) => {
            let p = v.pencil(Side::Input, pt.l1, pt.l2);
            let s = linalg::sigma_min(&p) / v.pencil_scale(Side::Input, pt.l1, pt.l2).max(f64::MIN_POSITIVE);
            return Err(Error::NotOnCurve(s));
        }
        Err(e) => return Err(e),
    }
    let input_residual = pencil_residual(v, Side::Input, pt, u);
    if input_residual > tol {
        return Err(Error::NotInInputFiber(input_residual));
    }
    let mut last = Error::SpectrumHit("no probe direction".into());
    for xi in PROBES {
        match charfun::ccf_eval(v, c(xi.0, 0.0), c(xi.1, 0.0), pt.dot(xi)) {
            Ok(w) => {
                let v_hat = w * u;
                let output_residual = pencil_residual(v, Side::Output, pt, &v_hat);
                return Ok(PlaneWave { v_hat, input_residual, output_residual });
            }
            Err(e @ Error::SpectrumHit(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// State amplitudes x̂_k = (A_k − λ_k)⁻¹Φ^{[*]}σ_k û and their relative disagreement.
pub fn plane_wave_state(v: &Vessel, pt: CurvePoint, u: &CVector) -> Result<(CVector, CVector, f64)> {
    let um = CMatrix::from_column_slice(u.len(), 1, u.as_slice());
    let pa = v.phi_adj();
    let x1 = linalg::resolvent_solve(&v.a1, pt.l1, &(&pa * &v.sigma1 * &um))?.column(0).into_owned();
    let x2 = linalg::resolvent_solve(&v.a2, pt.l2, &(&pa * &v.sigma2 * &um))?.column(0).into_owned();
    let d = linalg::rel((&x1 - &x2).norm(), x1.norm().max(x2.norm()));
    Ok((x1, x2, d))
}

/// Integrates the state equations along the ray s(t1, t2), s ∈ [0, 1], from x(0) = x̂
/// with input û e^{i s(t1λ1 + t2λ2)} (augmented exponential), and compares the
/// output at s = 1 with v̂ e^{i(t1λ1 + t2λ2)}.
pub fn plane_wave_time_residual(v: &Vessel, pt: CurvePoint, u: &CVector, t1: f64, t2: f64) -> Result<f64> {
    let (x_hat, _, _) = plane_wave_state(v, pt, u)?;
    let pw = plane_wave_response(v, pt, u, 1.0)?;
    let n = v.state_dim();
    let mu = pt.l1 * t1 + pt.l2 * t2;
    let m = &v.a1 * c(t1, 0.0) + &v.a2 * c(t2, 0.0);
    let s = &v.sigma1 * c(t1, 0.0) + &v.sigma2 * c(t2, 0.0);
    let forcing = v.phi_adj() * s * u * (-I);
    let mut aug = linalg::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(&(m * I));
    aug.view_mut((0, n), (n, 1)).copy_from(&forcing);
    aug[(n, n)] = I * mu;
    let mut init = CVector::zeros(n + 1);
    init.rows_mut(0, n).copy_from(&x_hat);
    init[n] = C64::new(1.0, 0.0);
    let end = aug.exp() * init;
    let x = end.rows(0, n).into_owned();
    let phase = end[n];
    let out = u * phase - (&v.phi * x) * I;
    let expected = &pw.v_hat * (I * mu).exp();
    Ok(linalg::rel((out - &expected).norm(), expected.norm().max(u.norm() * phase.norm())))
}
