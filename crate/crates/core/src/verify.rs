//! Independent certificate checking.
//!
//! Nothing here touches the SDP layer: the identity is re-expanded from the
//! Gram blocks by polynomial arithmetic and PSD-ness is decided by a
//! separate cyclic Jacobi eigensolver.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gram::{gram_expand, CertMode, Certificate, GramBlock};
use crate::poly::{AlgebraKind, MatrixPoly, Monomial};
use crate::qmodule::ConstraintSystem;
use crate::scalar::Real;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport<T> {
    pub accepted: bool,
    /// Largest absolute coefficient of `lhs − rhs`.
    pub residual: T,
    /// Monomial carrying the largest residual, if any.
    pub worst_monomial: Option<String>,
    /// Smallest eigenvalue of each module block, then the transformer.
    pub min_eigs: Vec<T>,
    pub reason: Option<String>,
}

impl<T: Real> VerifyReport<T> {
    fn rejected(reason: String) -> Self {
        Self { accepted: false, residual: T::zero(), worst_monomial: None, min_eigs: Vec::new(), reason: Some(reason) }
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        let lam = self.min_eigs.iter().copied().fold(None, |a: Option<T>, b| Some(a.map_or(b, |a| a.min(b))));
        let mut s =
            format!("{} residual={:e}", if self.accepted { "accepted" } else { "rejected" }, self.residual.as_f64());
        if let Some(m) = &self.worst_monomial {
            s.push_str(&format!(" at {m}"));
        }
        if let Some(l) = lam {
            s.push_str(&format!(" min_eig={:e}", l.as_f64()));
        }
        if let Some(r) = &self.reason {
            s.push_str(&format!(" ({r})"));
        }
        s
    }
}

impl<T: Real> fmt::Display for VerifyReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict:  {}", if self.accepted { "accepted" } else { "rejected" })?;
        write!(f, "residual: {:e}", self.residual.as_f64())?;
        if let Some(m) = &self.worst_monomial {
            write!(f, " (at {m})")?;
        }
        writeln!(f)?;
        for (i, l) in self.min_eigs.iter().enumerate() {
            writeln!(f, "block {i}: min eigenvalue {:e}", l.as_f64())?;
        }
        if let Some(r) = &self.reason {
            writeln!(f, "reason:   {r}")?;
        }
        Ok(())
    }
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
///
/// Fails when `m` is not square or departs from symmetry by more than
/// `sym_tol` relative to its largest entry.
pub fn psd_check<T: Real>(m: &DMatrix<T>, sym_tol: T) -> Result<T> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension { expected: n, got: m.ncols() });
    }
    if n == 0 {
        return Ok(T::zero());
    }
    let scale = m.iter().fold(T::one(), |a, v| a.max(v.abs()));
    for i in 0..n {
        for j in 0..i {
            if !m[(i, j)].is_finite() || !m[(j, i)].is_finite() {
                return Err(Error::Invalid("matrix has non-finite entries".into()));
            }
            if (m[(i, j)] - m[(j, i)]).abs() > sym_tol * scale {
                return Err(Error::NotHermitian(format!("entry ({i},{j}) differs from ({j},{i})")));
            }
        }
    }
    Ok(jacobi_eigenvalues(m).into_iter().fold(T::max_value().unwrap(), |a, b| a.min(b)))
}

fn jacobi_eigenvalues<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    let n = m.nrows();
    let half = T::lit(0.5);
    let mut a = (m + m.transpose()) * half;
    let eps = T::eps();
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |s, (i, j)| s + a[(i, j)] * a[(i, j)]);
        let diag: T = (0..n).fold(T::zero(), |s, i| s + a[(i, i)] * a[(i, i)]);
        if off <= eps * eps * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

/// [`verify_certificate_with`] using the default PSD tolerance.
pub fn verify_certificate<T: Real>(
    p: &MatrixPoly<T>,
    s: &ConstraintSystem<T>,
    cert: &Certificate<T>,
    tol: T,
) -> VerifyReport<T> {
    verify_certificate_with(p, s, cert, tol, T::lit(DEFAULT_PSD_TOL))
}

/// Recomputes the certificate identity and accepts when the coefficient
/// residual is at most `tol` and every Gram block has `λ_min ≥ −psd_tol`.
pub fn verify_certificate_with<T: Real>(
    p: &MatrixPoly<T>,
    s: &ConstraintSystem<T>,
    cert: &Certificate<T>,
    tol: T,
    psd_tol: T,
) -> VerifyReport<T> {
    match check(p, s, cert, tol, psd_tol) {
        Ok(r) => r,
        Err(e) => VerifyReport::rejected(e.to_string()),
    }
}

fn check_block<T: Real>(b: &GramBlock<T>, weight_size: usize, nu: usize, ngens: usize) -> Result<()> {
    if b.weight_size != weight_size || b.ambient_size != nu {
        return Err(Error::SizeMismatch(format!(
            "block for generator {} has shape ({}, {}), expected ({weight_size}, {nu})",
            b.k, b.weight_size, b.ambient_size
        )));
    }
    if let Some(m) = b.basis.iter().find(|m| m.len() != ngens) {
        return Err(Error::Dimension { expected: ngens, got: m.len() });
    }
    let dim = b.lift_dim();
    if b.gram.nrows() != dim || b.gram.ncols() != dim {
        return Err(Error::Dimension { expected: dim, got: b.gram.nrows() });
    }
    Ok(())
}

fn check<T: Real>(
    p: &MatrixPoly<T>,
    s: &ConstraintSystem<T>,
    cert: &Certificate<T>,
    tol: T,
    psd_tol: T,
) -> Result<VerifyReport<T>> {
    let alg = *p.algebra();
    s.algebra().check_same(&alg)?;
    if !p.is_hermitian() {
        return Err(Error::NotHermitian("target polynomial".into()));
    }
    let nu = p.size();
    if s.ambient_size() != nu {
        return Err(Error::SizeMismatch(format!("system size {} vs polynomial size {nu}", s.ambient_size())));
    }
    let p = if alg.is_torus() { p.torus_reduce()? } else { p.clone() };
    let sym_tol = T::lit(1e-12).max(T::eps() * T::lit(16.0));

    let mut min_eigs = Vec::new();
    let mut sum = MatrixPoly::zero(alg, nu);
    for b in &cert.blocks {
        let w = s.generator(b.k).ok_or_else(|| Error::Invalid(format!("unknown generator index {}", b.k)))?;
        check_block(b, w.size(), nu, alg.num_generators())?;
        min_eigs.push(psd_check(&b.gram, sym_tol)?);
        sum = sum.add(&gram_expand(b, &w)?)?;
    }
    let (lhs, rhs) = match cert.mode {
        CertMode::Strict { epsilon } => {
            if !(epsilon > T::zero()) {
                return Ok(VerifyReport {
                    min_eigs,
                    ..VerifyReport::rejected(format!("strict certificate has non-positive margin {epsilon}"))
                });
            }
            (sum, p.sub(&MatrixPoly::identity(alg, nu).scale(epsilon))?)
        }
        CertMode::Closure => (sum, p),
        CertMode::Reznick { theta } => {
            if alg.kind() != AlgebraKind::FreePoly {
                return Err(Error::NotFreePoly);
            }
            (sum, p.mul_scalar_poly(&MatrixPoly::norm_squared(alg).pow(theta)?)?)
        }
        CertMode::Nnsd => {
            let tb = cert
                .transformer
                .as_ref()
                .ok_or_else(|| Error::Invalid("nnsd certificate without transformer".into()))?;
            check_block(tb, nu, nu, alg.num_generators())?;
            min_eigs.push(psd_check(&tb.gram, sym_tol)?);
            (gram_expand(tb, &p)?, sum.add(&MatrixPoly::identity(alg, nu))?)
        }
    };
    if !matches!(cert.mode, CertMode::Nnsd) && cert.transformer.is_some() {
        return Err(Error::Invalid("transformer block only belongs to nnsd certificates".into()));
    }
    let diff = lhs.sub(&rhs)?;
    let (residual, worst) = worst_term(&diff);
    let worst_monomial = worst.map(|m| m.display(&alg));
    let psd_ok = min_eigs.iter().all(|&l| l >= -psd_tol);
    let mut reason = None;
    if residual > tol {
        reason = Some(format!("identity residual {:e} exceeds {:e}", residual.as_f64(), tol.as_f64()));
    } else if !psd_ok {
        reason = Some("a Gram block is not positive semidefinite".into());
    }
    Ok(VerifyReport { accepted: reason.is_none(), residual, worst_monomial, min_eigs, reason })
}

fn worst_term<T: Real>(d: &MatrixPoly<T>) -> (T, Option<Monomial>) {
    let mut best = (T::zero(), None);
    for (m, c) in d.terms() {
        let v = c.iter().fold(T::zero(), |a, x| a.max(x.abs()));
        if v > best.0 || !v.is_finite() {
            best = (v, Some(m.clone()));
            if !v.is_finite() {
                best.0 = T::max_value().unwrap();
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{monomial_basis, AlgebraSpec};
    use nalgebra::dmatrix;

    fn free1() -> AlgebraSpec {
        AlgebraSpec::free(1).unwrap()
    }

    fn square_cert(g: DMatrix<f64>) -> Certificate<f64> {
        Certificate {
            mode: CertMode::Closure,
            level: 1,
            blocks: vec![GramBlock {
                k: 0,
                basis: monomial_basis(&free1(), 1, false).unwrap(),
                weight_size: 1,
                ambient_size: 1,
                gram: g,
            }],
            transformer: None,
            shift: 0.0,
        }
    }

    fn one_plus_x_squared() -> MatrixPoly<f64> {
        MatrixPoly::scalar(
            free1(),
            [(Monomial::new(vec![0]), 1.0), (Monomial::new(vec![1]), 2.0), (Monomial::new(vec![2]), 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn jacobi_matches_known_spectrum() {
        let m = dmatrix![2.0, 1.0, 0.0; 1.0, 2.0, 1.0; 0.0, 1.0, 2.0];
        let lam = psd_check(&m, 1e-12).unwrap();
        assert!((lam - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!(psd_check(&dmatrix![0.0, 1.0; 1.0, 0.0], 1e-12).unwrap() + 1.0 < 1e-14);
    }

    #[test]
    fn asymmetric_input_rejected() {
        assert!(matches!(psd_check(&dmatrix![1.0, 1.0; 0.0, 1.0], 1e-12), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn accepts_and_tampers() {
        let p = one_plus_x_squared();
        let s = ConstraintSystem::new(free1(), 1);
        let good = square_cert(DMatrix::from_element(2, 2, 1.0));
        let r = verify_certificate(&p, &s, &good, 1e-6);
        assert!(r.accepted, "{r}");
        let mut bad = good.clone();
        bad.blocks[0].gram[(0, 0)] += 1e-3;
        let r = verify_certificate(&p, &s, &bad, 1e-6);
        assert!(!r.accepted);
        assert_eq!(r.worst_monomial.as_deref(), Some("1"));
    }

    #[test]
    fn indefinite_gram_rejected() {
        let p = MatrixPoly::scalar(free1(), [(Monomial::new(vec![1]), 2.0)]).unwrap();
        let s = ConstraintSystem::new(free1(), 1);
        let cert = square_cert(dmatrix![0.0, 1.0; 1.0, 0.0]);
        let r = verify_certificate(&p, &s, &cert, 1e-6);
        assert!(r.residual < 1e-15);
        assert!(!r.accepted);
    }

    #[test]
    fn non_positive_margin_rejected() {
        let p = one_plus_x_squared();
        let s = ConstraintSystem::new(free1(), 1);
        let mut cert = square_cert(DMatrix::from_element(2, 2, 1.0));
        cert.mode = CertMode::Strict { epsilon: 0.0 };
        assert!(!verify_certificate(&p, &s, &cert, 1e-6).accepted);
    }
}
