//! Schur-type kernels, sampled Gram matrices and negative-squares estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, I};

type EvalFn = dyn Fn(C64, C64) -> Result<CMatrix> + Send + Sync;
type DomainFn = dyn Fn(C64) -> bool + Send + Sync;

/// Matrix-valued kernel K(z, w) with its outer metric and domain.
pub struct KernelEvaluator {
    dim: usize,
    sigma: CMatrix,
    eval: Box<EvalFn>,
    domain: Box<DomainFn>,
}

impl KernelEvaluator {
    pub fn new<F, D>(sigma: CMatrix, eval: F, domain: D) -> Result<Self>
    where
        F: Fn(C64, C64) -> Result<CMatrix> + Send + Sync + 'static,
        D: Fn(C64) -> bool + Send + Sync + 'static,
    {
        linalg::ensure_square(&sigma, "sigma")?;
        Ok(Self { dim: sigma.nrows(), sigma, eval: Box::new(eval), domain: Box::new(domain) })
    }

    /// K ≡ 0 on the upper half-plane.
    pub fn zero(m: usize) -> Self {
        Self {
            dim: m,
            sigma: linalg::eye(m),
            eval: Box::new(move |_, _| Ok(linalg::zeros(m, m))),
            domain: Box::new(|z: C64| z.im > 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma(&self) -> &CMatrix {
        &self.sigma
    }

    pub fn in_domain(&self, z: C64) -> bool {
        (self.domain)(z)
    }

    pub fn eval(&self, z: C64, w: C64) -> Result<CMatrix> {
        (self.eval)(z, w)
    }
}

impl std::fmt::Debug for KernelEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelEvaluator").field("dim", &self.dim).finish_non_exhaustive()
    }
}

/// K(z, w) = (S(w)* σ S(z) − σ) / (−i (z − conj(w))) on the upper half-plane.
pub fn schur_kernel<F>(s: F, sigma: CMatrix) -> Result<KernelEvaluator>
where
    F: Fn(C64) -> Result<CMatrix> + Send + Sync + 'static,
{
    linalg::ensure_hermitian(&sigma, crate::DEFAULT_TOL)?;
    let sig = sigma.clone();
    KernelEvaluator::new(
        sigma,
        move |z, w| {
            let den = -I * (z - w.conj());
            if den.norm() <= 1e-14 * (1.0 + z.norm() + w.norm()) {
                return Err(Error::ConjugatePairSingularity);
            }
            let sz = s(z)?;
            let sw = if (z - w).norm() == 0.0 { sz.clone() } else { s(w)? };
            Ok((sw.adjoint() * &sig * sz - &sig) / den)
        },
        |z: C64| z.im > 0.0,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub points: Vec<C64>,
    pub vectors: Vec<CVector>,
    pub seed: u64,
}

impl SamplePlan {
    pub fn new(points: Vec<C64>, vectors: Vec<CVector>) -> Result<Self> {
        if points.len() != vectors.len() {
            return Err(Error::InvalidPlan("points and vectors differ in length".into()));
        }
        Ok(Self { points, vectors, seed: 0 })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Seeded random plan: uniform points in `region`, vectors on the unit sphere of C^m.
    pub fn random(m: usize, n: usize, region: &Region, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(n);
        let mut vectors = Vec::with_capacity(n);
        for _ in 0..n {
            let x = rng.random_range(region.re.0..=region.re.1);
            let y = rng.random_range(region.im.0..=region.im.1);
            points.push(C64::new(x, y));
            vectors.push(unit_vector(&mut rng, m));
        }
        Self { points, vectors, seed }
    }

    /// The first `k` entries of the plan.
    pub fn prefix(&self, k: usize) -> Self {
        Self {
            points: self.points[..k].to_vec(),
            vectors: self.vectors[..k].to_vec(),
            seed: self.seed,
        }
    }
}

pub fn unit_vector<R: Rng>(rng: &mut R, m: usize) -> CVector {
    let v = CVector::from_fn(m, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let n = v.norm();
    if n > 0.0 {
        v / C64::new(n, 0.0)
    } else {
        v
    }
}

/// Axis-aligned rectangle `re.0 ≤ Re z ≤ re.1`, `im.0 ≤ Im z ≤ im.1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Default for Region {
    fn default() -> Self {
        Self { re: (-2.0, 2.0), im: (0.1, 2.0) }
    }
}

/// N×N Gram matrix with entry (u, v) = c_v* K(w_u, w_v) c_u.
pub fn gram_matrix(k: &KernelEvaluator, plan: &SamplePlan) -> Result<CMatrix> {
    let n = plan.len();
    if plan.vectors.len() != n {
        return Err(Error::InvalidPlan("points and vectors differ in length".into()));
    }
    for (p, v) in plan.points.iter().zip(&plan.vectors) {
        if !k.in_domain(*p) {
            return Err(Error::DomainViolation(linalg::fmt_c(*p)));
        }
        if v.len() != k.dim() {
            return Err(Error::DimensionMismatch("plan vector length".into()));
        }
    }
    let mut g = linalg::zeros(n, n);
    for u in 0..n {
        for v in u..n {
            let kv = k.eval(plan.points[u], plan.points[v])?;
            let e = (plan.vectors[v].adjoint() * kv * &plan.vectors[u])[(0, 0)];
            g[(u, v)] = e;
            if u != v {
                g[(v, u)] = e.conj();
            } else {
                g[(u, u)] = C64::new(e.re, 0.0);
            }
        }
    }
    Ok(g)
}

/// Negative eigenvalue count of a Hermitian matrix outside the zero band tol·max|eig|.
pub fn count_negative(g: &CMatrix, tol: f64) -> usize {
    let eigs = linalg::eigvalsh(g);
    let band = tol * linalg::max_abs(&eigs);
    linalg::inertia(&eigs, band).1
}

#[derive(Debug, Clone, PartialEq)]
pub struct NegSquaresEstimate {
    pub estimate: usize,
    pub stabilized: bool,
    pub trials: usize,
    pub points: usize,
    /// Eigenvalues of the Gram matrix of the trial attaining the estimate.
    pub eigenvalues: Vec<f64>,
}

/// Maximum sampled negative index over seeded random plans.
pub fn estimate_neg_squares(
    k: &KernelEvaluator,
    trials: usize,
    points_per_trial: usize,
    region: &Region,
    seed: u64,
    tol: f64,
) -> Result<NegSquaresEstimate> {
    if trials == 0 || points_per_trial == 0 {
        return Err(Error::InvalidPlan("trials and points per trial must be positive".into()));
    }
    if !(region.re.0 <= region.re.1 && region.im.0 <= region.im.1) {
        return Err(Error::InvalidPlan("empty region".into()));
    }
    for corner in [
        C64::new(region.re.0, region.im.0),
        C64::new(region.re.1, region.im.1),
    ] {
        if !k.in_domain(corner) {
            return Err(Error::DomainViolation(linalg::fmt_c(corner)));
        }
    }
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let half = points_per_trial.div_ceil(2);
    let mut best = 0;
    let mut best_half = 0;
    let mut best_eigs = Vec::new();
    for _ in 0..trials {
        let plan = SamplePlan::random(k.dim(), points_per_trial, region, seeder.random());
        let g = gram_matrix(k, &plan)?;
        let eigs = linalg::eigvalsh(&g);
        let band = tol * linalg::max_abs(&eigs);
        let neg = linalg::inertia(&eigs, band).1;
        let neg_half = count_negative(&gram_matrix(k, &plan.prefix(half))?, tol);
        best_half = best_half.max(neg_half);
        if neg > best || best_eigs.is_empty() {
            best = best.max(neg);
            best_eigs = eigs;
        }
    }
    Ok(NegSquaresEstimate {
        estimate: best,
        stabilized: best_half == best,
        trials,
        points: points_per_trial,
        eigenvalues: best_eigs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSplit {
    pub pos_part: CMatrix,
    pub neg_part: CMatrix,
}

/// Spectral split of the sampled Gram matrix, G = pos − neg.
pub fn kernel_split(k: &KernelEvaluator, plan: &SamplePlan, tol: f64) -> Result<KernelSplit> {
    Ok(split_hermitian(&gram_matrix(k, plan)?, tol))
}

pub fn split_hermitian(g: &CMatrix, tol: f64) -> KernelSplit {
    let n = g.nrows();
    let (vals, vecs) = linalg::eigh(g);
    let band = tol * linalg::max_abs(&vals);
    let pos: Vec<f64> = vals.iter().map(|&e| if e > band { e } else { 0.0 }).collect();
    let neg: Vec<f64> = vals.iter().map(|&e| if e < -band { -e } else { 0.0 }).collect();
    let build = |d: &[f64]| {
        if n == 0 {
            linalg::zeros(0, 0)
        } else {
            &vecs * linalg::real_diag(d) * vecs.adjoint()
        }
    };
    KernelSplit { pos_part: build(&pos), neg_part: build(&neg) }
}
