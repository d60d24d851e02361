//! State-space realizations of J-unitary rational functions normalized at infinity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::colligation::{self, Colligation};
use crate::error::{Error, Result};
use crate::indefinite::IndefiniteSpace;
use crate::linalg::{self, CMatrix, C64, I};

/// Transfer function F(z) = D + C(zI − A)⁻¹B with a state-space Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
    pub state_gram: CMatrix,
}

impl Realization {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix, state_gram: CMatrix) -> Result<Self> {
        let n = a.nrows();
        linalg::ensure_shape(&a, n, n, "A")?;
        linalg::ensure_square(&d, "D")?;
        let m = d.nrows();
        linalg::ensure_shape(&b, n, m, "B")?;
        linalg::ensure_shape(&c, m, n, "C")?;
        linalg::ensure_shape(&state_gram, n, n, "stateGram")?;
        for (x, name) in [(&a, "A"), (&b, "B"), (&c, "C"), (&d, "D"), (&state_gram, "stateGram")] {
            linalg::ensure_finite(x, name)?;
        }
        Ok(Self { a, b, c, d, state_gram })
    }

    /// Static system F ≡ I_m with an empty state.
    pub fn identity(m: usize) -> Self {
        Self {
            a: linalg::zeros(0, 0),
            b: linalg::zeros(0, m),
            c: linalg::zeros(m, 0),
            d: linalg::eye(m),
            state_gram: linalg::zeros(0, 0),
        }
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn io_dim(&self) -> usize {
        self.d.nrows()
    }

    pub fn transfer(&self, z: C64) -> Result<CMatrix> {
        let x = linalg::resolvent_solve(&self.a, z, &self.b)?;
        Ok(&self.d - &self.c * x)
    }

    /// Relative defects of the colligation-normalized conditions with signature `j`:
    /// D = I, B = iG⁻¹C*J and (A − A^{[*]})/i = G⁻¹C*JC.
    pub fn normalization_defects(&self, j: &CMatrix) -> Result<(f64, f64, f64)> {
        let n = self.state_dim();
        let ginv = linalg::inverse(&self.state_gram)?;
        let d_def = linalg::norm(&(&self.d - linalg::eye(self.io_dim())));
        let b_expect = &ginv * self.c.adjoint() * j * I;
        let b_def = linalg::rel(
            linalg::norm(&(&self.b - &b_expect)),
            linalg::norm(&self.b) + linalg::norm(&b_expect),
        );
        let adj = &ginv * self.a.adjoint() * &self.state_gram;
        let lhs = (&self.a - &adj) / I;
        let rhs = &ginv * self.c.adjoint() * j * &self.c;
        let scale = linalg::norm(&self.a) + linalg::norm(&adj) + linalg::norm(&rhs);
        let a_def = if n == 0 { 0.0 } else { linalg::rel(linalg::norm(&(lhs - rhs)), scale) };
        Ok((d_def, b_def, a_def))
    }
}

/// Validates J = J*, J² = I.
pub fn check_signature(j: &CMatrix) -> Result<()> {
    linalg::ensure_square(j, "J")?;
    linalg::ensure_finite(j, "J")?;
    let n = j.nrows();
    if linalg::norm(&(j - j.adjoint())) > 1e-12 || linalg::norm(&(j * j - linalg::eye(n))) > 1e-12 {
        return Err(Error::NotSignature("J must satisfy J = J* and J^2 = I".into()));
    }
    Ok(())
}

fn projections(j: &CMatrix) -> (CMatrix, CMatrix) {
    let n = j.nrows();
    let p = (linalg::eye(n) + j) * C64::new(0.5, 0.0);
    let q = (linalg::eye(n) - j) * C64::new(0.5, 0.0);
    (p, q)
}

fn pg_solve(num: CMatrix, den: CMatrix) -> Result<CMatrix> {
    if linalg::rcond(&den) <= 1e-13 {
        return Err(Error::SingularPgDenominator);
    }
    let inv = linalg::inverse(&den).map_err(|_| Error::SingularPgDenominator)?;
    Ok(num * inv)
}

/// Σ = (PS + Q)(P + QS)⁻¹.
pub fn pg_transform(s: &CMatrix, j: &CMatrix) -> Result<CMatrix> {
    check_signature(j)?;
    linalg::ensure_shape(s, j.nrows(), j.nrows(), "S")?;
    let (p, q) = projections(j);
    pg_solve(&p * s + &q, &p + &q * s)
}

/// S = (Q + PΣ)(P + QΣ)⁻¹.
pub fn pg_inverse(sig: &CMatrix, j: &CMatrix) -> Result<CMatrix> {
    check_signature(j)?;
    linalg::ensure_shape(sig, j.nrows(), j.nrows(), "Sigma")?;
    let (p, q) = projections(j);
    pg_solve(&q + &p * sig, &p + &q * sig)
}

fn check_zeros(zeros: &[C64]) -> Result<()> {
    for &w in zeros {
        if !w.re.is_finite() || !w.im.is_finite() || w.im <= 0.0 {
            return Err(Error::ZeroNotInUpperHalfPlane(linalg::fmt_c(w)));
        }
    }
    Ok(())
}

/// Scalar Blaschke product ∏ (z − w_j)/(z − w̄_j) with state Gram −I.
pub fn blaschke_realization(zeros: &[C64]) -> Result<Realization> {
    blaschke_potapov_realization(zeros, &linalg::CVector::from_element(1, C64::new(1.0, 0.0)))
}

/// I + (b(z) − 1)uu* for the Blaschke product b, one state per zero, Gram −I.
pub fn blaschke_potapov_realization(zeros: &[C64], u: &linalg::CVector) -> Result<Realization> {
    check_zeros(zeros)?;
    let nu = u.norm();
    if !nu.is_finite() || nu <= 0.0 {
        return Err(Error::DimensionMismatch("direction must be nonzero".into()));
    }
    let m = u.len();
    let u = CMatrix::from_column_slice(m, 1, (u / C64::new(nu, 0.0)).as_slice());
    let mut r = Realization::identity(m);
    for &w in zeros {
        let cc = (2.0 * w.im).sqrt();
        let factor = Realization {
            a: linalg::scalar(w.conj()),
            b: u.adjoint() * C64::new(0.0, -cc),
            c: &u * C64::new(cc, 0.0),
            d: linalg::eye(m),
            state_gram: linalg::scalar(C64::new(-1.0, 0.0)),
        };
        r = cascade_product(&r, &factor)?;
    }
    Ok(r)
}

/// (A − BD⁻¹C, BD⁻¹, −D⁻¹C, D⁻¹); the Gram is carried over.
pub fn invert_realization(r: &Realization) -> Result<Realization> {
    if linalg::rcond(&r.d) <= 1e-13 {
        return Err(Error::SingularD);
    }
    let dinv = linalg::inverse(&r.d).map_err(|_| Error::SingularD)?;
    Ok(Realization {
        a: &r.a - &r.b * &dinv * &r.c,
        b: &r.b * &dinv,
        c: -(&dinv * &r.c),
        d: dinv,
        state_gram: r.state_gram.clone(),
    })
}

/// Realization of F₁·F₂ with A = [[A₁, B₁C₂], [0, A₂]].
pub fn cascade_product(r1: &Realization, r2: &Realization) -> Result<Realization> {
    if r1.io_dim() != r2.io_dim() {
        return Err(Error::DimensionMismatch("outer dimensions of cascaded systems differ".into()));
    }
    let n1 = r1.state_dim();
    let n2 = r2.state_dim();
    let mut a = linalg::block_diag(&r1.a, &r2.a);
    a.view_mut((0, n1), (n1, n2)).copy_from(&(&r1.b * &r2.c));
    Ok(Realization {
        a,
        b: linalg::vstack(&(&r1.b * &r2.d), &r2.b),
        c: linalg::hstack(&r1.c, &(&r1.d * &r2.c)),
        d: &r1.d * &r2.d,
        state_gram: linalg::block_diag(&r1.state_gram, &r2.state_gram),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationReport {
    /// Relative defect of (A′ − A′^{[*]})/i = C^{[*]}JC.
    pub identity_residual: f64,
    /// max over real samples of ‖S(x)*JS(x) − J‖.
    pub junitary_residual: f64,
    /// max over all samples of ‖S(z) − pg_inverse(Σ(z))‖ relative.
    pub pg_residual: f64,
    pub neg_index: usize,
    pub real_samples: Vec<f64>,
    pub complex_samples: Vec<C64>,
}

impl RealizationReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.identity_residual <= tol && self.junitary_residual <= tol && self.pg_residual <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JUnitaryRealization {
    pub colligation: Colligation,
    /// Realization of the Potapov–Ginzburg transform Σ.
    pub sigma_realization: Realization,
    pub report: RealizationReport,
}

/// Fixed seeded verification points: 10 real in [−4, 4] and 15 in the upper half-plane.
pub fn verification_samples() -> (Vec<f64>, Vec<C64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let real = (0..10).map(|_| rng.random_range(-4.0..4.0)).collect();
    let cplx = (0..15)
        .map(|_| C64::new(rng.random_range(-4.0..4.0), rng.random_range(0.1..4.0)))
        .collect();
    (real, cplx)
}

/// Colligation whose characteristic function is the inverse PG transform of
/// Σ = Σ₀·B with B the Blaschke–Potapov product of `zeros` along e₁.
pub fn realize_junitary(
    schur_part: &Realization,
    zeros: &[C64],
    j: &CMatrix,
    tol: f64,
) -> Result<JUnitaryRealization> {
    check_signature(j)?;
    let m = j.nrows();
    if schur_part.io_dim() != m {
        return Err(Error::DimensionMismatch("Schur part and J differ in size".into()));
    }
    check_zeros(zeros)?;
    let g0 = &schur_part.state_gram;
    if schur_part.state_dim() > 0 {
        linalg::ensure_hermitian(g0, tol)
            .map_err(|_| Error::InvalidSchurPart("state Gram is not Hermitian".into()))?;
        if linalg::eigvalsh(g0).first().copied().unwrap_or(1.0) <= 0.0 {
            return Err(Error::InvalidSchurPart("state Gram is not positive definite".into()));
        }
    }
    let (d_def, b_def, a_def) = schur_part.normalization_defects(&linalg::eye(m))?;
    if d_def > tol || b_def > tol || a_def > tol {
        return Err(Error::InvalidSchurPart(format!(
            "defects D {d_def:.3e}, B {b_def:.3e}, A {a_def:.3e}"
        )));
    }
    let mut u = linalg::CVector::zeros(m);
    if m > 0 {
        u[0] = C64::new(1.0, 0.0);
    }
    let blaschke = if zeros.is_empty() {
        Realization::identity(m)
    } else {
        blaschke_potapov_realization(zeros, &u)?
    };
    let sig = cascade_product(schur_part, &blaschke)?;
    let (_, q) = projections(j);
    let a_prime = &sig.a - &sig.b * &q * &sig.c;
    let gram = sig.state_gram.clone();
    let state = IndefiniteSpace::new(gram, tol)?;
    let colligation = Colligation::new(a_prime, state, j * &sig.c, j.clone())?;

    let identity_residual = colligation::check_colligation(&colligation, tol).residual;
    let (real, cplx) = verification_samples();
    let mut junitary_residual: f64 = 0.0;
    let mut pg_residual: f64 = 0.0;
    for z in real.iter().map(|&x| C64::new(x, 0.0)).chain(cplx.iter().copied()) {
        let s = colligation::char_fn_eval(&colligation, z)?;
        let via_pg = pg_inverse(&sig.transfer(z)?, j)?;
        pg_residual = pg_residual.max(linalg::rel(linalg::norm(&(&s - &via_pg)), linalg::norm(&s)));
        if z.im == 0.0 {
            let defect = s.adjoint() * j * &s - j;
            junitary_residual =
                junitary_residual.max(linalg::rel(linalg::norm(&defect), linalg::norm(&s).powi(2)));
        }
    }
    let report = RealizationReport {
        identity_residual,
        junitary_residual,
        pg_residual,
        neg_index: colligation.state.neg_index(),
        real_samples: real,
        complex_samples: cplx,
    };
    Ok(JUnitaryRealization { colligation, sigma_realization: sig, report })
}

/// Random colligation-normalized Hilbert-space realization with n states and m channels:
/// A = H + (i/2)C*C, B = iC*, D = I, Gram I.
pub fn random_schur_realization<R: Rng>(rng: &mut R, n: usize, m: usize, scale: f64) -> Realization {
    let mut gauss = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let c = CMatrix::from_fn(m, n, |_, _| gauss() * scale);
    let h0 = CMatrix::from_fn(n, n, |_, _| gauss());
    let h = linalg::hermitian_part(&h0);
    let a = h + c.adjoint() * &c * C64::new(0.0, 0.5);
    Realization { b: c.adjoint() * I, a, c, d: linalg::eye(m), state_gram: linalg::eye(n) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real_diag, scalar};

    #[test]
    fn pg_examples() {
        let s = CMatrix::from_fn(2, 2, |i, k| c(i as f64 + 0.3, k as f64 - 0.7));
        let id = linalg::eye(2);
        assert!(linalg::norm(&(pg_transform(&s, &id).unwrap() - &s)) < 1e-14);
        let minus = -linalg::eye(2);
        let inv = linalg::inverse(&s).unwrap();
        assert!(linalg::norm(&(pg_transform(&s, &minus).unwrap() - inv)) < 1e-12);
        let j = real_diag(&[1.0, -1.0]);
        let out = pg_transform(&real_diag(&[2.0, 2.0]), &j).unwrap();
        assert!(linalg::norm(&(out - real_diag(&[2.0, 0.5]))) < 1e-14);
        let back = pg_inverse(&real_diag(&[2.0, 2.0]), &minus).unwrap();
        assert!(linalg::norm(&(back - real_diag(&[0.5, 0.5]))) < 1e-14);
        assert!(linalg::norm(&(pg_inverse(&s, &id).unwrap() - &s)) < 1e-14);
        assert_eq!(pg_transform(&linalg::zeros(2, 2), &minus), Err(Error::SingularPgDenominator));
    }

    #[test]
    fn pg_round_trip_3x3() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let j = real_diag(&[1.0, 1.0, -1.0]);
        let s = CMatrix::from_fn(3, 3, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let back = pg_inverse(&pg_transform(&s, &j).unwrap(), &j).unwrap();
        assert!(linalg::norm(&(back - &s)) <= 1e-12 * linalg::norm(&s));
    }

    #[test]
    fn blaschke_examples() {
        let e = blaschke_realization(&[]).unwrap();
        assert_eq!(e.state_dim(), 0);
        assert_eq!(e.d[(0, 0)], c(1.0, 0.0));

        let w = c(0.0, 0.5);
        let r = blaschke_realization(&[w]).unwrap();
        assert!((r.a[(0, 0)] - c(0.0, -0.5)).norm() < 1e-15);
        assert!((r.c[(0, 0)].norm_sqr() - 1.0).abs() < 1e-14);
        assert_eq!(r.state_gram[(0, 0)], c(-1.0, 0.0));
        for z in [c(1.0, 0.0), c(-2.0, 1.0), c(0.3, 3.0), c(0.0, -2.0), c(5.0, 0.1)] {
            let f = r.transfer(z).unwrap()[(0, 0)];
            assert!((f - (z - w) / (z - w.conj())).norm() < 1e-14);
        }
        let (d, b, a) = r.normalization_defects(&linalg::eye(1)).unwrap();
        assert!(d < 1e-15 && b < 1e-15 && a < 1e-15);

        let r2 = blaschke_realization(&[w, c(0.0, 1.0)]).unwrap();
        assert!((r2.transfer(c(0.0, 2.0)).unwrap()[(0, 0)] - c(0.2, 0.0)).norm() < 1e-14);
        assert_eq!(crate::indefinite::neg_index(&r2.state_gram, 1e-9).unwrap(), 2);

        assert!(matches!(blaschke_realization(&[c(1.0, -1.0)]), Err(Error::ZeroNotInUpperHalfPlane(_))));
    }

    #[test]
    fn inversion_examples() {
        let mut id = Realization::identity(1);
        id.a = scalar(c(0.5, 0.0));
        id.b = linalg::zeros(1, 1);
        id.c = scalar(c(1.0, 0.0));
        id.state_gram = linalg::eye(1);
        let inv = invert_realization(&id).unwrap();
        assert!((inv.transfer(c(0.1, 0.2)).unwrap()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        let r = blaschke_realization(&[c(0.0, 0.5)]).unwrap();
        let inv = invert_realization(&r).unwrap();
        assert!((inv.transfer(c(0.0, 2.0)).unwrap()[(0, 0)] - c(5.0 / 3.0, 0.0)).norm() < 1e-14);
        let back = invert_realization(&inv).unwrap();
        for z in [c(0.4, 1.0), c(-3.0, 0.2)] {
            let d = back.transfer(z).unwrap() - r.transfer(z).unwrap();
            assert!(linalg::norm(&d) < 1e-12);
        }
        let mut sing = r.clone();
        sing.d = linalg::zeros(1, 1);
        assert_eq!(invert_realization(&sing), Err(Error::SingularD));
    }

    #[test]
    fn cascade_examples() {
        let r = blaschke_realization(&[c(0.0, 0.5)]).unwrap();
        let same = cascade_product(&r, &Realization::identity(1)).unwrap();
        assert_eq!(same, r);
        let r2 = blaschke_realization(&[c(0.0, 1.0)]).unwrap();
        let p = cascade_product(&r, &r2).unwrap();
        assert!((p.transfer(c(0.0, 2.0)).unwrap()[(0, 0)] - c(0.2, 0.0)).norm() < 1e-14);
        let mixed = cascade_product(&random_schur_realization(&mut ChaCha8Rng::seed_from_u64(1), 2, 1, 1.0), &r2)
            .unwrap();
        assert_eq!(crate::indefinite::neg_index(&mixed.state_gram, 1e-9).unwrap(), 1);
        assert!(matches!(
            cascade_product(&r, &Realization::identity(2)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn realize_examples() {
        let schur = Realization::new(
            scalar(c(0.0, 0.5)),
            scalar(c(0.0, 1.0)),
            scalar(c(1.0, 0.0)),
            linalg::eye(1),
            linalg::eye(1),
        )
        .unwrap();
        let out = realize_junitary(&schur, &[], &linalg::eye(1), 1e-9).unwrap();
        let z = c(0.3, 1.1);
        let s = colligation::char_fn_eval(&out.colligation, z).unwrap()[(0, 0)];
        assert!((s - (z + c(0.0, 0.5)) / (z - c(0.0, 0.5))).norm() < 1e-13);
        assert_eq!(out.report.neg_index, 0);

        let out = realize_junitary(&Realization::identity(1), &[c(0.0, 0.5)], &linalg::eye(1), 1e-9).unwrap();
        let s = colligation::char_fn_eval(&out.colligation, c(0.0, 2.0)).unwrap()[(0, 0)];
        assert!((s - c(0.6, 0.0)).norm() < 1e-13);
        assert_eq!(out.report.neg_index, 1);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let schur = random_schur_realization(&mut rng, 2, 2, 1.0);
        let j = real_diag(&[1.0, -1.0]);
        let out = realize_junitary(&schur, &[c(0.5, 0.7)], &j, 1e-9).unwrap();
        assert!(out.report.identity_residual <= 1e-10);
        assert!(out.report.junitary_residual <= 1e-9);
        assert!(out.report.pg_residual <= 1e-9);

        let mut bad = schur.clone();
        bad.b = -bad.b;
        assert!(matches!(realize_junitary(&bad, &[], &j, 1e-9), Err(Error::InvalidSchurPart(_))));
    }
}
