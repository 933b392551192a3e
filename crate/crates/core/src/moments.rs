//! Truncated moment functionals, moment and localizing matrices, and
//! refutation witnesses.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};

use crate::certify::CertifyOptions;
use crate::error::{Error, Result};
use crate::gram::{build_certificate_sdp, CertificateSdp, SearchMode};
use crate::poly::{monomial_basis, AlgebraSpec, MatrixPoly, Monomial, Point};
use crate::qmodule::{half_ceil, truncate, ConstraintSystem};
use crate::scalar::Real;
use crate::sdp::{solve, SdpStatus};
use crate::verify::psd_check;

/// Witnesses with `L(p)` above this are treated as noise.
pub const WITNESS_THRESHOLD: f64 = -1e-9;

/// A linear functional on matrix polynomials of degree at most `2t`,
/// stored as `V_α = [L(x^α ⊗ E_rc)]_rc` per normal-form monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentFunctional<T: Real> {
    pub algebra: AlgebraSpec,
    pub size: usize,
    pub level: u32,
    pub values: BTreeMap<Monomial, DMatrix<T>>,
}

impl<T: Real> MomentFunctional<T> {
    pub fn new(algebra: AlgebraSpec, size: usize, level: u32) -> Self {
        Self { algebra, size, level, values: BTreeMap::new() }
    }

    pub fn insert(&mut self, m: Monomial, v: DMatrix<T>) -> Result<()> {
        if m.len() != self.algebra.num_generators() {
            return Err(Error::Dimension { expected: self.algebra.num_generators(), got: m.len() });
        }
        if v.nrows() != self.size || v.ncols() != self.size {
            return Err(Error::SizeMismatch(format!("moment value must be {0}x{0}", self.size)));
        }
        self.values.insert(m, v);
        Ok(())
    }

    pub fn value(&self, m: &Monomial) -> Option<&DMatrix<T>> {
        self.values.get(m)
    }

    /// `trace L(1 ⊗ I)`.
    pub fn trace_one(&self) -> T {
        self.values.get(&Monomial::one(self.algebra.num_generators())).map_or(T::zero(), |v| v.trace())
    }

    pub fn scale(&self, s: T) -> Self {
        Self { values: self.values.iter().map(|(m, v)| (m.clone(), v * s)).collect(), ..self.clone() }
    }

    /// `L(F) = Σ_α ⟨V_α, F_α⟩`, after reducing `F` on the torus.
    pub fn apply(&self, f: &MatrixPoly<T>) -> Result<T> {
        self.algebra.check_same(f.algebra())?;
        if f.rows() != self.size || f.cols() != self.size {
            return Err(Error::SizeMismatch(format!(
                "functional has size {}, polynomial {}x{}",
                self.size,
                f.rows(),
                f.cols()
            )));
        }
        let f = if self.algebra.is_torus() { f.torus_reduce()? } else { f.clone() };
        let mut acc = T::zero();
        for (m, c) in f.terms() {
            let v = self.values.get(m).ok_or_else(|| Error::MissingMoment(m.display(&self.algebra)))?;
            acc += v.component_mul(c).sum();
        }
        Ok(acc)
    }
}

struct Pairing<'a, T: Real> {
    l: &'a MomentFunctional<T>,
    cache: HashMap<Monomial, DMatrix<T>>,
}

impl<'a, T: Real> Pairing<'a, T> {
    fn new(l: &'a MomentFunctional<T>) -> Self {
        Self { l, cache: HashMap::new() }
    }

    /// `[L(x^m ⊗ E_rc)]_rc` for an arbitrary (possibly non-normal) monomial.
    fn at(&mut self, m: Monomial) -> Result<DMatrix<T>> {
        if let Some(v) = self.cache.get(&m) {
            return Ok(v.clone());
        }
        let l = self.l;
        let v = if l.algebra.is_torus() && !m.is_torus_normal() {
            let red = MatrixPoly::scalar(l.algebra, [(m.clone(), T::one())])?;
            let mut acc = DMatrix::zeros(l.size, l.size);
            for (d, c) in red.terms() {
                let vd = l.values.get(d).ok_or_else(|| Error::MissingMoment(d.display(&l.algebra)))?;
                acc += vd * c[(0, 0)];
            }
            acc
        } else {
            l.values.get(&m).ok_or_else(|| Error::MissingMoment(m.display(&l.algebra)))?.clone()
        };
        self.cache.insert(m, v.clone());
        Ok(v)
    }
}

fn pairing_matrix<T: Real>(l: &MomentFunctional<T>, basis: &[Monomial], weight: &MatrixPoly<T>) -> Result<DMatrix<T>> {
    let (nk, nu) = (weight.rows(), l.size);
    let idx = |a: usize, r: usize, c: usize| (a * nk + r) * nu + c;
    let dim = basis.len() * nk * nu;
    let mut out = DMatrix::zeros(dim, dim);
    let mut pair = Pairing::new(l);
    for (ai, alpha) in basis.iter().enumerate() {
        for (bi, beta) in basis.iter().enumerate() {
            let ab = alpha.mul(beta);
            for (gamma, pg) in weight.terms() {
                let v = pair.at(ab.mul(gamma))?;
                for r in 0..nk {
                    for r2 in 0..nk {
                        let w = pg[(r, r2)];
                        if w == T::zero() {
                            continue;
                        }
                        for c in 0..nu {
                            for c2 in 0..nu {
                                out[(idx(ai, r, c), idx(bi, r2, c2))] += w * v[(c, c2)];
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Block matrix `[L(x^{α+β} ⊗ E_cc')]` over monomials of degree `≤ t`.
pub fn moment_matrix<T: Real>(l: &MomentFunctional<T>) -> Result<DMatrix<T>> {
    let basis = monomial_basis(&l.algebra, l.level, false)?;
    pairing_matrix(l, &basis, &MatrixPoly::identity(l.algebra, 1))
}

/// Moment matrix of `q ↦ L(q* p_k q)` at level `t − ⌈deg p_k / 2⌉`.
pub fn localizing_matrix<T: Real>(l: &MomentFunctional<T>, pk: &MatrixPoly<T>) -> Result<DMatrix<T>> {
    l.algebra.check_same(pk.algebra())?;
    if !pk.is_square() {
        return Err(Error::SizeMismatch("localizing weight must be square".into()));
    }
    let need = half_ceil(pk.degree());
    if need > l.level {
        return Err(Error::LevelTooSmall { level: l.level, needed: need });
    }
    let basis = monomial_basis(&l.algebra, l.level - need, false)?;
    pairing_matrix(l, &basis, pk)
}

/// Point evaluation `L(x^α ⊗ E) = a^α ⟨E v, v⟩` up to degree `2t`.
pub fn evaluation_functional<T: Real>(
    algebra: AlgebraSpec,
    a: &Point<T>,
    v: &DVector<T>,
    t: u32,
) -> Result<MomentFunctional<T>> {
    a.check(&algebra)?;
    if (v.norm() - T::one()).abs() > T::lit(1e-9).max(T::eps() * T::lit(16.0)) {
        return Err(Error::Invalid(format!("vector has norm {}, expected 1", v.norm())));
    }
    let vv = v * v.transpose();
    let mut l = MomentFunctional::new(algebra, v.len(), t);
    for m in monomial_basis(&algebra, 2 * t, false)? {
        let s = m.eval(a.coords());
        l.values.insert(m, &vv * s);
    }
    Ok(l)
}

/// Independent re-check of a candidate witness.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessCheck<T> {
    pub moment_min_eig: T,
    /// One entry per user generator; `None` when its degree exceeds `2t`.
    pub localizing_min_eigs: Vec<Option<T>>,
    pub trace: T,
    pub value: T,
}

impl<T: Real> WitnessCheck<T> {
    pub fn min_eig(&self) -> T {
        self.localizing_min_eigs.iter().flatten().fold(self.moment_min_eig, |a, &b| a.min(b))
    }

    /// PSD up to `psd_tol`, unit trace, and `L(p)` below the witness threshold.
    pub fn is_witness(&self, psd_tol: T) -> bool {
        self.min_eig() >= -psd_tol
            && (self.trace - T::one()).abs() <= T::lit(1e-9).max(T::eps() * T::lit(64.0))
            && self.value < T::lit(WITNESS_THRESHOLD)
    }
}

pub fn check_witness<T: Real>(
    l: &MomentFunctional<T>,
    p: &MatrixPoly<T>,
    s: &ConstraintSystem<T>,
) -> Result<WitnessCheck<T>> {
    let sym = T::lit(1e-9);
    let moment_min_eig = psd_check(&moment_matrix(l)?, sym)?;
    let mut localizing_min_eigs = Vec::new();
    for g in s.user_generators() {
        if g.degree() > 2 * l.level {
            localizing_min_eigs.push(None);
        } else {
            localizing_min_eigs.push(Some(psd_check(&localizing_matrix(l, g)?, sym)?));
        }
    }
    Ok(WitnessCheck { moment_min_eig, localizing_min_eigs, trace: l.trace_one(), value: l.apply(p)? })
}

/// Reads a dual vector of a coefficient-matching SDP as a functional:
/// the row `(δ, c, c')` contributes `y` on the diagonal and `y/2` to each
/// off-diagonal entry.
pub fn functional_from_dual<T: Real>(
    sdp: &CertificateSdp<T>,
    algebra: AlgebraSpec,
    size: usize,
    y: &[T],
) -> Result<MomentFunctional<T>> {
    if y.len() != sdp.rows.len() {
        return Err(Error::Dimension { expected: sdp.rows.len(), got: y.len() });
    }
    let mut l = MomentFunctional::new(algebra, size, sdp.level);
    let half = T::lit(0.5);
    for (m, rows) in sdp.row_map() {
        let mut v = DMatrix::zeros(size, size);
        for (i, c, c2) in rows {
            if c == c2 {
                v[(c, c)] = y[i];
            } else {
                v[(c, c2)] = y[i] * half;
                v[(c2, c)] = y[i] * half;
            }
        }
        l.values.insert(m, v);
    }
    Ok(l)
}

#[derive(Clone, Debug)]
pub enum RefuteOutcome<T: Real> {
    Witness { functional: MomentFunctional<T>, check: WitnessCheck<T> },
    NoneFound { reason: String },
}

impl<T: Real> RefuteOutcome<T> {
    pub fn witness(&self) -> Option<&MomentFunctional<T>> {
        match self {
            Self::Witness { functional, .. } => Some(functional),
            Self::NoneFound { .. } => None,
        }
    }
}

/// Looks for an M-positive functional with `L(1 ⊗ I)` of trace 1 and
/// `L(p) < 0` at level `t`, via a Farkas ray of the membership SDP.
pub fn refute<T: Real>(
    p: &MatrixPoly<T>,
    s: &ConstraintSystem<T>,
    t: u32,
    opts: &CertifyOptions,
) -> Result<RefuteOutcome<T>> {
    s.algebra().check_same(p.algebra())?;
    if !p.is_hermitian() {
        return Err(Error::NotHermitian("target polynomial".into()));
    }
    let need = half_ceil(p.degree());
    if need > t {
        return Err(Error::LevelTooSmall { level: t, needed: need });
    }
    let plan = truncate(s, t, false)?;
    let sdp = build_certificate_sdp(p, s, &plan, SearchMode::Closure)?;
    let sol = solve(&sdp.problem, &opts.sdp)?;
    let y = match sol.status {
        SdpStatus::Infeasible => sol.farkas.clone().unwrap_or_default(),
        SdpStatus::Optimal | SdpStatus::Feasible => {
            return Ok(RefuteOutcome::NoneFound { reason: format!("p lies in the level-{t} module") })
        }
        SdpStatus::Stalled => {
            return Ok(RefuteOutcome::NoneFound { reason: format!("solver stalled at level {t}: {}", sol.diagnostics) })
        }
    };
    let raw = functional_from_dual(&sdp, *p.algebra(), p.size(), &y)?;
    let tr = raw.trace_one();
    if !(tr > T::lit(1e-12)) {
        return Ok(RefuteOutcome::NoneFound { reason: format!("Farkas ray at level {t} has no mass at 1") });
    }
    let functional = raw.scale(T::one() / tr);
    let check = check_witness(&functional, p, s)?;
    if check.is_witness(T::lit(opts.psd_tol).max(T::lit(1e-8))) {
        Ok(RefuteOutcome::Witness { functional, check })
    } else {
        Ok(RefuteOutcome::NoneFound {
            reason: format!(
                "ray failed re-verification at level {t}: min eig {:e}, L(p) {:e}",
                check.min_eig().as_f64(),
                check.value.as_f64()
            ),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    fn free1() -> AlgebraSpec {
        AlgebraSpec::free(1).unwrap()
    }

    fn scalar(coefs: &[f64]) -> MatrixPoly<f64> {
        MatrixPoly::scalar(free1(), coefs.iter().enumerate().map(|(i, &c)| (Monomial::new(vec![i as u32]), c))).unwrap()
    }

    fn seq(vals: &[f64]) -> MomentFunctional<f64> {
        let mut l = MomentFunctional::new(free1(), 1, (vals.len() as u32 - 1) / 2);
        for (i, v) in vals.iter().enumerate() {
            l.insert(Monomial::new(vec![i as u32]), DMatrix::from_element(1, 1, *v)).unwrap();
        }
        l
    }

    #[test]
    fn moment_matrix_of_sequence() {
        let m = moment_matrix(&seq(&[1.0, 0.5, 2.0])).unwrap();
        assert_eq!(m, dmatrix![1.0, 0.5; 0.5, 2.0]);
        let bad = moment_matrix(&seq(&[1.0, 0.0, -1.0])).unwrap();
        assert!(psd_check(&bad, 1e-12).unwrap() < 0.0);
    }

    #[test]
    fn missing_moment_is_an_error() {
        let mut l = seq(&[1.0, 0.5, 2.0]);
        l.values.remove(&Monomial::new(vec![2]));
        assert!(matches!(moment_matrix(&l), Err(Error::MissingMoment(_))));
    }

    #[test]
    fn localizing_interval() {
        let g = scalar(&[1.0, 0.0, -1.0]);
        let loc = localizing_matrix(&seq(&[1.0, 0.0, 0.3]), &g).unwrap();
        assert_eq!(loc.shape(), (1, 1));
        assert!((loc[(0, 0)] - 0.7).abs() < 1e-15);
        for (a, want) in [(0.5, 0.75), (2.0, -3.0)] {
            let l = evaluation_functional(free1(), &Point::free(vec![a]), &dvector![1.0], 1).unwrap();
            assert!((localizing_matrix(&l, &g).unwrap()[(0, 0)] - want).abs() < 1e-14);
        }
        let l = seq(&[1.0, 0.0, 0.3]);
        let g4 = scalar(&[0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(localizing_matrix(&l, &g4), Err(Error::LevelTooSmall { .. })));
    }

    #[test]
    fn evaluation_at_origin() {
        let v = dvector![1.0, 0.0];
        let l = evaluation_functional(free1(), &Point::free(vec![0.0]), &v, 1).unwrap();
        let m = moment_matrix(&l).unwrap();
        let mut want = DMatrix::zeros(4, 4);
        want[(0, 0)] = 1.0;
        assert_eq!(m, want);
        let l2 = evaluation_functional(free1(), &Point::free(vec![2.0]), &v, 1).unwrap();
        let m2 = moment_matrix(&l2).unwrap();
        assert_eq!(m2.rank(1e-12), 1);
        assert!(evaluation_functional(free1(), &Point::free(vec![0.0]), &dvector![1.0, 1.0], 1).is_err());
    }

    #[test]
    fn odd_polynomial_refuted() {
        let p = scalar(&[0.0, 1.0]);
        let s = ConstraintSystem::new(free1(), 1);
        let out = refute(&p, &s, 1, &CertifyOptions::default()).unwrap();
        match out {
            RefuteOutcome::Witness { check, .. } => {
                assert!(check.value < -1e-9);
                assert!((check.trace - 1.0).abs() < 1e-9);
                assert!(check.moment_min_eig > -1e-8);
            }
            RefuteOutcome::NoneFound { reason } => panic!("{reason}"),
        }
    }

    #[test]
    fn positive_on_interval_not_refuted() {
        let p = scalar(&[3.0, 1.0]);
        let s = ConstraintSystem::new(free1(), 1).with(scalar(&[1.0, 0.0, -1.0])).unwrap();
        for t in 1..=2 {
            assert!(refute(&p, &s, t, &CertifyOptions::default()).unwrap().witness().is_none());
        }
    }

    #[test]
    fn torus_cosine_refuted() {
        let alg = AlgebraSpec::torus(1).unwrap();
        let c = MatrixPoly::<f64>::generator(alg, 0);
        let s = ConstraintSystem::new(alg, 1);
        let out = refute(&c, &s, 1, &CertifyOptions::default()).unwrap();
        let l = out.witness().expect("cos changes sign");
        assert!(l.apply(&c).unwrap() < -1e-9);
        let at_pi = evaluation_functional(alg, &Point::torus(&[std::f64::consts::PI]), &dvector![1.0], 1).unwrap();
        assert!((at_pi.apply(&c).unwrap() + 1.0).abs() < 1e-12);
    }
}
