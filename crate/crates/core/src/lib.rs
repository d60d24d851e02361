//! Commuting non-selfadjoint operators over Pontryagin spaces.
//!
//! Colligations and two-operator vessels in finite dimensions, their
//! characteristic functions, negative-squares analysis of the associated
//! kernels, J-unitary realizations and the overdetermined 2D systems they
//! generate.

pub mod charfun;
pub mod colligation;
pub mod coupling;
pub mod error;
pub mod indefinite;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod poly;
pub mod realization;
pub mod synth;
pub mod sys2d;
pub mod vessel;

pub use error::{Error, Result};
pub use indefinite::IndefiniteSpace;
pub use linalg::{CMatrix, CVector, C64};
pub use vessel::{Side, Vessel};

/// Default relative tolerance for every tolerance-bearing operation.
pub const DEFAULT_TOL: f64 = 1e-9;
