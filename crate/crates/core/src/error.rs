use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix has an eigenvalue inside the zero band (|{eigenvalue:.3e}| <= {band:.3e})")]
    NearSingular { eigenvalue: f64, band: f64 },
    #[error("non-finite entry in {0}")]
    NonFinite(String),
    #[error("basis columns are linearly dependent")]
    RankDeficientBasis,
    #[error("kernel requested at a conjugate pair z = conj(w)")]
    ConjugatePairSingularity,
    #[error("point {0} lies outside the kernel domain")]
    DomainViolation(String),
    #[error("invalid sample plan: {0}")]
    InvalidPlan(String),
    #[error("point {0} is within tolerance of the spectrum")]
    SpectrumHit(String),
    #[error("Potapov-Ginzburg denominator P + QS is singular")]
    SingularPgDenominator,
    #[error("Blaschke zero {0} is not in the open upper half-plane")]
    ZeroNotInUpperHalfPlane(String),
    #[error("feedthrough matrix D is singular")]
    SingularD,
    #[error("Schur part does not satisfy the realization conditions: {0}")]
    InvalidSchurPart(String),
    #[error("not a signature matrix: {0}")]
    NotSignature(String),
    #[error("alpha matrix is not real unimodular (det = {0})")]
    NotUnimodular(f64),
    #[error("principal subspace is degenerate")]
    DegeneratePrincipalSubspace,
    #[error("no Hermitian solution of the input condition (relative residual {0:.3e})")]
    NoHermitianSolution(f64),
    #[error("point is not on the discriminant curve (relative pencil defect {0:.3e})")]
    NotOnCurve(f64),
    #[error("fiber is empty at the requested tolerance")]
    EmptyFiber,
    #[error("line meets the curve at a multiple point (branch point)")]
    MultipleRoots,
    #[error("degenerate line direction: {0}")]
    DegenerateDirection(String),
    #[error("CCF does not map the input fiber into the output fiber (residual {0:.3e})")]
    NotIntoOutputFiber(f64),
    #[error("input fibers do not span the outer space")]
    FibersDontSpan,
    #[error("fiber pairing denominator vanishes")]
    ZeroDenominator,
    #[error("curve point is singular (vanishing gradient)")]
    SingularCurvePoint,
    #[error("vessels do not share the external part (E, sigma1, sigma2)")]
    ExternalPartMismatch,
    #[error("gamma chain condition gamma2 = gamma_tilde1 fails (residual {0:.3e})")]
    GammaChainMismatch(f64),
    #[error("subspace is not invariant under A1, A2 (residual {0:.3e})")]
    NotInvariant(f64),
    #[error("subspace is degenerate in the indefinite metric")]
    DegenerateSubspace,
    #[error("vector is not in the input fiber (residual {0:.3e})")]
    NotInInputFiber(f64),
    #[error("numerical routine failed: {0}")]
    Numerical(String),
    #[error("malformed input: {0}")]
    Schema(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI error records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NearSingular { .. } => "NearSingular",
            Error::NonFinite(_) => "NonFinite",
            Error::RankDeficientBasis => "RankDeficientBasis",
            Error::ConjugatePairSingularity => "ConjugatePairSingularity",
            Error::DomainViolation(_) => "DomainViolation",
            Error::InvalidPlan(_) => "InvalidPlan",
            Error::SpectrumHit(_) => "SpectrumHit",
            Error::SingularPgDenominator => "SingularPGDenominator",
            Error::ZeroNotInUpperHalfPlane(_) => "ZeroNotInUpperHalfPlane",
            Error::SingularD => "SingularD",
            Error::InvalidSchurPart(_) => "InvalidSchurPart",
            Error::NotSignature(_) => "NotSignature",
            Error::NotUnimodular(_) => "NotUnimodular",
            Error::DegeneratePrincipalSubspace => "DegeneratePrincipalSubspace",
            Error::NoHermitianSolution(_) => "NoHermitianSolution",
            Error::NotOnCurve(_) => "NotOnCurve",
            Error::EmptyFiber => "EmptyFiber",
            Error::MultipleRoots => "MultipleRoots",
            Error::DegenerateDirection(_) => "DegenerateDirection",
            Error::NotIntoOutputFiber(_) => "NotIntoOutputFiber",
            Error::FibersDontSpan => "FibersDontSpan",
            Error::ZeroDenominator => "ZeroDenominator",
            Error::SingularCurvePoint => "SingularCurvePoint",
            Error::ExternalPartMismatch => "ExternalPartMismatch",
            Error::GammaChainMismatch(_) => "GammaChainMismatch",
            Error::NotInvariant(_) => "NotInvariant",
            Error::DegenerateSubspace => "DegenerateSubspace",
            Error::NotInInputFiber(_) => "NotInInputFiber",
            Error::Numerical(_) => "Numerical",
            Error::Schema(_) => "SchemaError",
        }
    }
}
