//! Positivity certificates for matrix-valued polynomials.
//!
//! The search side poses coefficient-matching semidefinite programs for
//! Putinar-, Reznick- and Fejér–Riesz-type identities and decodes their
//! solutions into Gram-matrix certificates. The checking side re-expands
//! certificates with plain polynomial arithmetic and its own eigensolver.
//! Failed searches come with Farkas rays or moment-functional witnesses.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar for the common cases.

pub mod certify;
pub mod error;
pub mod gram;
pub mod io;
pub mod moments;
pub mod poly;
pub mod qmodule;
pub mod scalar;
pub mod sdp;
pub mod verify;

pub use certify::{
    fejer_riesz_certify, nnsd_certify, putinar_certify, reznick_certify, CertifyOptions, CertifyOutcome, LevelReport,
    LevelStatus, Margin, ReznickOutcome,
};
pub use error::{Error, Result};
pub use gram::{gram_expand, gram_synthesize, CertMode, Certificate, GramBlock};
pub use moments::{evaluation_functional, localizing_matrix, moment_matrix, refute, MomentFunctional, RefuteOutcome};
pub use poly::{monomial_basis, AlgebraKind, AlgebraSpec, MatrixPoly, Monomial, Point};
pub use qmodule::{archimedean_probe, truncate, ConstraintSystem, ProbeOutcome, TruncationPlan};
pub use scalar::Real;
pub use sdp::{solve, SdpOptions, SdpProblem, SdpSolution, SdpStatus};
pub use verify::{psd_check, verify_certificate, VerifyReport};

pub type MatrixPolyF64 = MatrixPoly<f64>;
pub type MatrixPolyF32 = MatrixPoly<f32>;
pub type ConstraintSystemF64 = ConstraintSystem<f64>;
pub type ConstraintSystemF32 = ConstraintSystem<f32>;
pub type CertificateF64 = Certificate<f64>;
pub type CertificateF32 = Certificate<f32>;
pub type MomentFunctionalF64 = MomentFunctional<f64>;
pub type MomentFunctionalF32 = MomentFunctional<f32>;
pub type SdpProblemF64 = SdpProblem<f64>;
pub type SdpProblemF32 = SdpProblem<f32>;
