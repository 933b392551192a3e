//! Bounded certificate searches.
//!
//! Each driver walks an explicit range of truncation levels (or Reznick
//! exponents) and returns the first certificate that the independent
//! verifier accepts. Exhausting the range is reported per level and never
//! read as "no certificate exists"; solver stalls stay distinct from
//! Farkas-certified infeasibility.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gram::{build_certificate_sdp, Certificate, SearchMode};
use crate::poly::{AlgebraKind, MatrixPoly, Point};
use crate::qmodule::{half_ceil, truncate, ConstraintSystem};
use crate::scalar::Real;
use crate::sdp::{solve, SdpOptions, SdpStatus};
use crate::verify::{psd_check, verify_certificate_with};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub sdp: SdpOptions,
    /// Residual tolerance handed to the verifier.
    pub verify_tol: f64,
    pub psd_tol: f64,
    /// Smallest ε reported as a strict certificate.
    pub min_margin: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { sdp: SdpOptions::default(), verify_tol: 1e-6, psd_tol: 1e-9, min_margin: 1e-7 }
    }
}

impl CertifyOptions {
    pub fn for_scalar<T: Real>() -> Self {
        let sdp = SdpOptions::for_scalar::<T>();
        let d = Self::default();
        let loosen = sdp.tol_eq / SdpOptions::default().tol_eq;
        Self { sdp, verify_tol: d.verify_tol * loosen, psd_tol: sdp.tol_psd, min_margin: d.min_margin * loosen }
    }
}

/// Whether a Putinar search maximises a margin or only asks for membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Margin {
    Strict,
    Closure,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LevelStatus<T> {
    /// The SDP carried a verified Farkas ray.
    Infeasible { farkas: Vec<T> },
    /// Strict search converged but the best margin is not positive.
    NoMargin { epsilon: T },
    /// Numerical failure, or a decoded certificate the verifier rejected.
    Stalled { reason: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelReport<T> {
    pub level: u32,
    pub theta: Option<u32>,
    pub status: LevelStatus<T>,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub enum CertifyOutcome<T: Real> {
    Found(Certificate<T>),
    /// Every tried level was infeasible (or had no positive margin).
    InfeasibleAt(Vec<LevelReport<T>>),
    /// No certificate, and at least one level stalled.
    Stalled(Vec<LevelReport<T>>),
}

impl<T: Real> CertifyOutcome<T> {
    pub fn certificate(&self) -> Option<&Certificate<T>> {
        match self {
            Self::Found(c) => Some(c),
            _ => None,
        }
    }

    fn from_reports(reports: Vec<LevelReport<T>>) -> Self {
        if reports.iter().any(|r| matches!(r.status, LevelStatus::Stalled { .. })) {
            Self::Stalled(reports)
        } else {
            Self::InfeasibleAt(reports)
        }
    }
}

/// `⌈deg p / 2⌉ ..= ⌈deg p / 2⌉ + 3`.
pub fn default_levels<T: Real>(p: &MatrixPoly<T>) -> RangeInclusive<u32> {
    let lo = half_ceil(p.degree());
    lo..=lo + 3
}

enum LevelResult<T: Real> {
    Found(Certificate<T>),
    Failed(LevelReport<T>),
}

fn search_level<T: Real>(
    p: &MatrixPoly<T>,
    s: &ConstraintSystem<T>,
    level: u32,
    mode: SearchMode,
    opts: &CertifyOptions,
) -> Result<LevelResult<T>> {
    let homogeneous = matches!(mode, SearchMode::Reznick { .. });
    let plan = truncate(s, level, homogeneous)?;
    let sdp = build_certificate_sdp(p, s, &plan, mode)?;
    let sol = solve(&sdp.problem, &opts.sdp)?;
    let theta = match mode {
        SearchMode::Reznick { theta } => Some(theta),
        _ => None,
    };
    let report = |status| LevelReport { level, theta, status, iterations: sol.iterations };
    match sol.status {
        SdpStatus::Optimal | SdpStatus::Feasible => {
            let cert = sdp.decode(&sol)?;
            if let Some(eps) = cert.epsilon() {
                if eps < T::lit(opts.min_margin) {
                    return Ok(LevelResult::Failed(report(LevelStatus::NoMargin { epsilon: eps })));
                }
            }
            let vr = verify_certificate_with(p, s, &cert, T::lit(opts.verify_tol), T::lit(opts.psd_tol));
            if vr.accepted {
                Ok(LevelResult::Found(cert))
            } else {
                let reason = format!("decoded certificate rejected: {}", vr.summary());
                Ok(LevelResult::Failed(report(LevelStatus::Stalled { reason })))
            }
        }
        SdpStatus::Infeasible => {
            Ok(LevelResult::Failed(report(LevelStatus::Infeasible { farkas: sol.farkas.clone().unwrap_or_default() })))
        }
        SdpStatus::Stalled => {
            // Stalled iterates still go through decode and the verifier.
            let mut near = sol.clone();
            near.status = SdpStatus::Feasible;
            if let Ok(cert) = sdp.decode(&near) {
                let margin_ok = cert.epsilon().is_none_or(|e| e >= T::lit(opts.min_margin));
                if margin_ok
                    && verify_certificate_with(p, s, &cert, T::lit(opts.verify_tol), T::lit(opts.psd_tol)).accepted
                {
                    return Ok(LevelResult::Found(cert));
                }
            }
            Ok(LevelResult::Failed(report(LevelStatus::Stalled { reason: sol.diagnostics.clone() })))
        }
    }
}

fn check_target<T: Real>(p: &MatrixPoly<T>, s: &ConstraintSystem<T>) -> Result<()> {
    s.algebra().check_same(p.algebra())?;
    if !p.is_hermitian() {
        return Err(Error::NotHermitian("target polynomial".into()));
    }
    if p.size() != s.ambient_size() {
        return Err(Error::SizeMismatch(format!(
            "polynomial has size {}, constraint system expects {}",
            p.size(),
            s.ambient_size()
        )));
    }
    Ok(())
}

fn check_levels<T: Real>(p: &MatrixPoly<T>, levels: &RangeInclusive<u32>) -> Result<()> {
    let need = half_ceil(p.degree());
    if *levels.start() < need {
        return Err(Error::DegreeOverflow { degree: p.degree(), level: *levels.start() });
    }
    Ok(())
}

/// Searches `p − ε ∈ M_S` (strict, maximising ε) or `p ∈ M_S` (closure)
/// over ascending levels.
pub fn putinar_certify<T: Real>(
    p: &MatrixPoly<T>,
    s: &ConstraintSystem<T>,
    levels: RangeInclusive<u32>,
    margin: Margin,
    opts: &CertifyOptions,
) -> Result<CertifyOutcome<T>> {
    check_target(p, s)?;
    check_levels(p, &levels)?;
    let mode = match margin {
        Margin::Strict => SearchMode::Strict,
        Margin::Closure => SearchMode::Closure,
    };
    let mut reports = Vec::new();
    for t in levels {
        match search_level(p, s, t, mode, opts)? {
            LevelResult::Found(c) => return Ok(CertifyOutcome::Found(c)),
            LevelResult::Failed(r) => reports.push(r),
        }
    }
    Ok(CertifyOutcome::from_reports(reports))
}

#[derive(Clone, Debug)]
pub enum ReznickOutcome<T: Real> {
    Found {
        theta: u32,
        certificate: Certificate<T>,
    },
    /// One report per θ in `0..=θ_max`.
    Exhausted(Vec<LevelReport<T>>),
}

/// Searches `(x1² + … + xd²)^θ p ∈ M_S` for `θ = 0, 1, …, θ_max` with
/// homogeneous multiplier bases.
pub fn reznick_certify<T: Real>(
    p: &MatrixPoly<T>,
    s: &ConstraintSystem<T>,
    theta_max: u32,
    opts: &CertifyOptions,
) -> Result<ReznickOutcome<T>> {
    if p.algebra().kind() != AlgebraKind::FreePoly {
        return Err(Error::NotFreePoly);
    }
    check_target(p, s)?;
    if p.is_zero() || !p.is_homogeneous() || p.degree() % 2 == 1 {
        return Err(Error::NotHomogeneousEven(format!("target {p}")));
    }
    for g in s.user_generators() {
        if !g.is_homogeneous() || g.degree() % 2 == 1 {
            return Err(Error::NotHomogeneousEven(format!("generator {g}")));
        }
    }
    let mut reports = Vec::new();
    for theta in 0..=theta_max {
        let level = p.degree() / 2 + theta;
        match search_level(p, s, level, SearchMode::Reznick { theta }, opts)? {
            LevelResult::Found(certificate) => return Ok(ReznickOutcome::Found { theta, certificate }),
            LevelResult::Failed(r) => reports.push(r),
        }
    }
    Ok(ReznickOutcome::Exhausted(reports))
}

/// Searches `Σ_i c_i* p c_i ∈ 1 + M_S` over ascending levels.
pub fn nnsd_certify<T: Real>(
    p: &MatrixPoly<T>,
    s: &ConstraintSystem<T>,
    levels: RangeInclusive<u32>,
    opts: &CertifyOptions,
) -> Result<CertifyOutcome<T>> {
    check_target(p, s)?;
    check_levels(p, &levels)?;
    let mut reports = Vec::new();
    for t in levels {
        match search_level(p, s, t, SearchMode::Nnsd, opts)? {
            LevelResult::Found(c) => return Ok(CertifyOutcome::Found(c)),
            LevelResult::Failed(r) => reports.push(r),
        }
    }
    Ok(CertifyOutcome::from_reports(reports))
}

/// Unweighted sum-of-squares search on the torus, matching coefficients
/// modulo `ci² + si² = 1`.
pub fn fejer_riesz_certify<T: Real>(
    p: &MatrixPoly<T>,
    levels: RangeInclusive<u32>,
    margin: Margin,
    opts: &CertifyOptions,
) -> Result<CertifyOutcome<T>> {
    if !p.algebra().is_torus() {
        return Err(Error::NotTorus);
    }
    let p = p.torus_reduce()?;
    let s = ConstraintSystem::new(*p.algebra(), p.size());
    putinar_certify(&p, &s, levels, margin, opts)
}

/// Result of sampling `λ_min(p(a))` over points of `K_S`.
#[derive(Clone, Debug, PartialEq)]
pub struct SoundnessSample<T> {
    pub accepted: usize,
    pub attempts: usize,
    pub min_eigenvalue: T,
}

/// Rejection-samples `accept` points of `K_S` from the box `[−B, B]^d`
/// (angles on the torus) and records the smallest eigenvalue of `p`.
pub fn sample_soundness<T: Real>(
    p: &MatrixPoly<T>,
    s: &ConstraintSystem<T>,
    bound: T,
    accept: usize,
    seed: u64,
) -> Result<SoundnessSample<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alg = *p.algebra();
    let max_attempts = accept.saturating_mul(10_000).max(1);
    let mut out = SoundnessSample { accepted: 0, attempts: 0, min_eigenvalue: T::max_value().unwrap() };
    let b = bound.as_f64();
    while out.accepted < accept && out.attempts < max_attempts {
        out.attempts += 1;
        let pt = if alg.is_torus() {
            let angles: Vec<T> =
                (0..alg.num_vars()).map(|_| T::lit(rng.gen_range(0.0..std::f64::consts::TAU))).collect();
            Point::torus(&angles)
        } else {
            Point::free((0..alg.num_vars()).map(|_| T::lit(rng.gen_range(-b..=b))).collect())
        };
        if !s.contains_point(&pt, T::zero())? {
            continue;
        }
        out.accepted += 1;
        let lam = psd_check(&p.eval(&pt)?, T::lit(1e-9))?;
        out.min_eigenvalue = out.min_eigenvalue.min(lam);
    }
    Ok(out)
}
