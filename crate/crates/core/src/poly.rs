//! Matrix-valued polynomials over the free commutative algebra `ℝ[x1..xd]`
//! and over the torus quotient `ℝ[c1,s1,..,cn,sn]/(ci² + si² − 1)`.
//!
//! Coefficients are dense real matrices. Terms are kept in graded
//! lexicographic order; a coefficient is dropped only when it is exactly
//! zero, so the symbolic layer never applies a tolerance of its own.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    FreePoly,
    Torus,
}

/// The ambient commutative algebra.
///
/// For `FreePoly` the generators are `x1..xd`; for `Torus` with `n` angles
/// they are interleaved as `c1, s1, c2, s2, ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraSpec {
    kind: AlgebraKind,
    num_vars: usize,
}

impl AlgebraSpec {
    pub fn free(num_vars: usize) -> Result<Self> {
        Self::new(AlgebraKind::FreePoly, num_vars)
    }

    pub fn torus(num_angles: usize) -> Result<Self> {
        Self::new(AlgebraKind::Torus, num_angles)
    }

    pub fn new(kind: AlgebraKind, num_vars: usize) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::Invalid("algebra needs at least one variable".into()));
        }
        Ok(Self { kind, num_vars })
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    /// Number of variables `d`, or number of angles `n` on the torus.
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_torus(&self) -> bool {
        self.kind == AlgebraKind::Torus
    }

    pub fn num_generators(&self) -> usize {
        match self.kind {
            AlgebraKind::FreePoly => self.num_vars,
            AlgebraKind::Torus => 2 * self.num_vars,
        }
    }

    pub fn generator_name(&self, i: usize) -> String {
        match self.kind {
            AlgebraKind::FreePoly => format!("x{}", i + 1),
            AlgebraKind::Torus if i.is_multiple_of(2) => format!("c{}", i / 2 + 1),
            AlgebraKind::Torus => format!("s{}", i / 2 + 1),
        }
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::AlgebraMismatch(*self, *other));
        }
        Ok(())
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AlgebraKind::FreePoly => write!(f, "poly(d={})", self.num_vars),
            AlgebraKind::Torus => write!(f, "torus(n={})", self.num_vars),
        }
    }
}

/// Exponent vector, one entry per generator.
///
/// Ordered by total degree first; within a degree, monomials with a larger
/// power of an earlier generator come first (`1 < x1 < x2 < x1² < x1x2 < x2²`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn one(num_generators: usize) -> Self {
        Self(vec![0; num_generators])
    }

    pub fn var(num_generators: usize, i: usize) -> Self {
        let mut e = vec![0; num_generators];
        e[i] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// True when every `s`-exponent is at most one.
    pub fn is_torus_normal(&self) -> bool {
        self.0.iter().skip(1).step_by(2).all(|&e| e <= 1)
    }

    pub fn eval<T: Real>(&self, coords: &[T]) -> T {
        self.0.iter().zip(coords).fold(T::one(), |acc, (&e, &v)| if e == 0 { acc } else { acc * v.powi(e as i32) })
    }

    pub fn display(&self, alg: &AlgebraSpec) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                let name = alg.generator_name(i);
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Rewrites `c^a s^b` with `b ≥ 2` into normal form using `s² = 1 − c²`.
fn torus_normal_form(m: &Monomial) -> Vec<(Monomial, i64)> {
    let mut done: Vec<(Monomial, i64)> = Vec::new();
    let mut work = vec![(m.clone(), 1i64)];
    while let Some((mono, coef)) = work.pop() {
        let pos = mono.0.iter().enumerate().skip(1).step_by(2).find(|(_, &e)| e >= 2).map(|(i, _)| i);
        match pos {
            None => done.push((mono, coef)),
            Some(i) => {
                let mut a = mono.clone();
                a.0[i] -= 2;
                let mut b = a.clone();
                b.0[i - 1] += 2;
                work.push((a, coef));
                work.push((b, -coef));
            }
        }
    }
    done
}

/// All normal-form monomials of degree `≤ t` (or exactly `t` when
/// `homogeneous`), sorted in graded lexicographic order.
pub fn monomial_basis(alg: &AlgebraSpec, t: u32, homogeneous: bool) -> Result<Vec<Monomial>> {
    if homogeneous && alg.is_torus() {
        return Err(Error::HomogeneousTorus);
    }
    let n = alg.num_generators();
    let mut out = Vec::new();
    let lo = if homogeneous { t } else { 0 };
    for deg in lo..=t {
        let mut cur = vec![0u32; n];
        compositions(deg, 0, &mut cur, &mut out);
    }
    if alg.is_torus() {
        out.retain(Monomial::is_torus_normal);
    }
    out.sort();
    Ok(out)
}

fn compositions(rest: u32, idx: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if idx + 1 == cur.len() {
        cur[idx] = rest;
        out.push(Monomial(cur.clone()));
        cur[idx] = 0;
        return;
    }
    for e in (0..=rest).rev() {
        cur[idx] = e;
        compositions(rest - e, idx + 1, cur, out);
    }
    cur[idx] = 0;
}

/// Evaluation point, stored as generator values.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<T: Real> {
    coords: Vec<T>,
}

impl<T: Real> Point<T> {
    /// A point of `ℝ^d`.
    pub fn free(coords: Vec<T>) -> Self {
        Self { coords }
    }

    /// A point of the torus given by its angles in radians.
    pub fn torus(angles: &[T]) -> Self {
        let coords = angles.iter().flat_map(|&a| [a.cos(), a.sin()]).collect();
        Self { coords }
    }

    /// Raw generator values; torus points are validated at evaluation time.
    pub fn from_generators(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn check(&self, alg: &AlgebraSpec) -> Result<()> {
        if self.coords.len() != alg.num_generators() {
            return Err(Error::Dimension { expected: alg.num_generators(), got: self.coords.len() });
        }
        if alg.is_torus() {
            let tol = T::lit(1e-12).max(T::eps() * T::lit(16.0));
            for (i, pair) in self.coords.chunks(2).enumerate() {
                let r = pair[0] * pair[0] + pair[1] * pair[1] - T::one();
                if r.abs() > tol {
                    return Err(Error::InvalidPoint(format!("c{0}^2 + s{0}^2 deviates from 1 by {1}", i + 1, r)));
                }
            }
        }
        Ok(())
    }
}

/// Polynomial with `rows × cols` real matrix coefficients.
///
/// Public arithmetic works with square `ν × ν` polynomials; rectangular
/// ones appear as Gram factors `q ∈ M_{ν_k × ν}(R)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoly<T: Real> {
    algebra: AlgebraSpec,
    rows: usize,
    cols: usize,
    terms: BTreeMap<Monomial, DMatrix<T>>,
}

impl<T: Real> MatrixPoly<T> {
    pub fn zero(algebra: AlgebraSpec, size: usize) -> Self {
        Self::zero_rect(algebra, size, size)
    }

    pub fn zero_rect(algebra: AlgebraSpec, rows: usize, cols: usize) -> Self {
        Self { algebra, rows, cols, terms: BTreeMap::new() }
    }

    pub fn constant(algebra: AlgebraSpec, m: DMatrix<T>) -> Self {
        let mut p = Self::zero_rect(algebra, m.nrows(), m.ncols());
        p.add_term(Monomial::one(algebra.num_generators()), m);
        p
    }

    pub fn identity(algebra: AlgebraSpec, size: usize) -> Self {
        Self::constant(algebra, DMatrix::identity(size, size))
    }

    /// `1 × 1` polynomial from scalar terms.
    pub fn scalar<I>(algebra: AlgebraSpec, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, T)>,
    {
        Self::from_terms(algebra, 1, 1, terms.into_iter().map(|(m, c)| (m, DMatrix::from_element(1, 1, c))))
    }

    /// The scalar generator `x_i` (or `c_i`/`s_i` on the torus).
    pub fn generator(algebra: AlgebraSpec, i: usize) -> Self {
        let mut p = Self::zero(algebra, 1);
        p.add_term(Monomial::var(algebra.num_generators(), i), DMatrix::from_element(1, 1, T::one()));
        p
    }

    /// Builds a polynomial from terms; repeated monomials accumulate and
    /// torus inputs are brought into normal form.
    pub fn from_terms<I>(algebra: AlgebraSpec, rows: usize, cols: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, DMatrix<T>)>,
    {
        let mut p = Self::zero_rect(algebra, rows, cols);
        for (m, c) in terms {
            if m.len() != algebra.num_generators() {
                return Err(Error::Dimension { expected: algebra.num_generators(), got: m.len() });
            }
            if c.nrows() != rows || c.ncols() != cols {
                return Err(Error::SizeMismatch(format!(
                    "coefficient of {} is {}x{}, expected {rows}x{cols}",
                    m.display(&algebra),
                    c.nrows(),
                    c.ncols()
                )));
            }
            p.add_term(m, c);
        }
        Ok(p.normalized())
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        &self.algebra
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Matrix size `ν` of a square polynomial.
    pub fn size(&self) -> usize {
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &DMatrix<T>)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&DMatrix<T>> {
        self.terms.get(m)
    }

    /// Coefficient of `m`, or the zero matrix.
    pub fn coefficient_or_zero(&self, m: &Monomial) -> DMatrix<T> {
        self.terms.get(m).cloned().unwrap_or_else(|| DMatrix::zeros(self.rows, self.cols))
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Monomial::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.terms.values().all(|c| c == &c.transpose())
    }

    /// Accumulates `c · m`, removing the entry if the sum is exactly zero.
    pub(crate) fn add_term(&mut self, m: Monomial, c: DMatrix<T>) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                if c.iter().any(|v| *v != T::zero()) {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().iter().all(|v| *v == T::zero()) {
                    o.remove();
                }
            }
        }
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        self.algebra.check_same(&other.algebra)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::SizeMismatch(format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-T::one()))
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = Self::zero_rect(self.algebra, self.rows, self.cols);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    /// Product `a · b`; torus results are returned in normal form.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.algebra.check_same(&other.algebra)?;
        if self.cols != other.rows {
            return Err(Error::SizeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zero_rect(self.algebra, self.rows, other.cols);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out.normalized())
    }

    /// Multiplies every coefficient by a scalar (`1 × 1`) polynomial.
    pub fn mul_scalar_poly(&self, s: &Self) -> Result<Self> {
        self.algebra.check_same(&s.algebra)?;
        if s.rows != 1 || s.cols != 1 {
            return Err(Error::SizeMismatch("expected a scalar polynomial".into()));
        }
        let mut out = Self::zero_rect(self.algebra, self.rows, self.cols);
        for (ms, cs) in &s.terms {
            for (m, c) in &self.terms {
                out.add_term(ms.mul(m), c * cs[(0, 0)]);
            }
        }
        Ok(out.normalized())
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::SizeMismatch("power of a non-square polynomial".into()));
        }
        let mut acc = Self::identity(self.algebra, self.rows);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Involution: transposes every coefficient.
    pub fn adjoint(&self) -> Self {
        Self {
            algebra: self.algebra,
            rows: self.cols,
            cols: self.rows,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.transpose())).collect(),
        }
    }

    pub fn eval(&self, pt: &Point<T>) -> Result<DMatrix<T>> {
        pt.check(&self.algebra)?;
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for (m, c) in &self.terms {
            out += c * m.eval(pt.coords());
        }
        Ok(out)
    }

    /// Normal form modulo `ci² + si² = 1`: every `s`-exponent at most one.
    pub fn torus_reduce(&self) -> Result<Self> {
        if !self.algebra.is_torus() {
            return Err(Error::NotTorus);
        }
        let mut out = Self::zero_rect(self.algebra, self.rows, self.cols);
        for (m, c) in &self.terms {
            if m.is_torus_normal() {
                out.add_term(m.clone(), c.clone());
            } else {
                for (nm, k) in torus_normal_form(m) {
                    out.add_term(nm, c * T::from_i64(k).expect("small integer"));
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn normalized(self) -> Self {
        if self.algebra.is_torus() && self.terms.keys().any(|m| !m.is_torus_normal()) {
            self.torus_reduce().expect("torus algebra")
        } else {
            self
        }
    }

    /// Largest absolute coefficient entry of `self − other`.
    pub fn max_coeff_diff(&self, other: &Self) -> Result<T> {
        let d = self.sub(other)?;
        Ok(d.terms.values().flat_map(|c| c.iter()).fold(T::zero(), |acc, v| acc.max(v.abs())))
    }

    pub fn max_abs_coeff(&self) -> T {
        self.terms.values().flat_map(|c| c.iter()).fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    /// `x1² + … + xd²` as a scalar polynomial.
    pub fn norm_squared(algebra: AlgebraSpec) -> Self {
        let n = algebra.num_generators();
        let mut p = Self::zero(algebra, 1);
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 2;
            p.add_term(Monomial::new(e), DMatrix::from_element(1, 1, T::one()));
        }
        p.normalized()
    }
}

impl<T: Real> fmt::Display for MatrixPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mono = m.display(&self.algebra);
                if self.rows == 1 && self.cols == 1 {
                    format!("{}*{mono}", c[(0, 0)])
                } else {
                    let rows: Vec<String> =
                        c.row_iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")).collect();
                    format!("[[{}]]*{mono}", rows.join("],["))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn mp_mul<T: Real>(a: &MatrixPoly<T>, b: &MatrixPoly<T>) -> Result<MatrixPoly<T>> {
    if !a.is_square() || !b.is_square() || a.size() != b.size() {
        return Err(Error::SizeMismatch(format!(
            "public product requires equal square sizes, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    a.mul(b)
}

pub fn mp_adjoint<T: Real>(a: &MatrixPoly<T>) -> MatrixPoly<T> {
    a.adjoint()
}

pub fn mp_eval<T: Real>(a: &MatrixPoly<T>, pt: &Point<T>) -> Result<DMatrix<T>> {
    a.eval(pt)
}

pub fn torus_reduce<T: Real>(a: &MatrixPoly<T>) -> Result<MatrixPoly<T>> {
    a.torus_reduce()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn x(alg: AlgebraSpec, i: usize) -> MatrixPoly<f64> {
        MatrixPoly::generator(alg, i)
    }

    fn one(alg: AlgebraSpec) -> MatrixPoly<f64> {
        MatrixPoly::identity(alg, 1)
    }

    #[test]
    fn difference_of_squares() {
        let alg = AlgebraSpec::free(1).unwrap();
        let a = one(alg).add(&x(alg, 0)).unwrap();
        let b = one(alg).sub(&x(alg, 0)).unwrap();
        let prod = mp_mul(&a, &b).unwrap();
        let expected = one(alg).sub(&x(alg, 0).mul(&x(alg, 0)).unwrap()).unwrap();
        assert_eq!(prod, expected);
    }

    #[test]
    fn matrix_unit_product() {
        let alg = AlgebraSpec::free(1).unwrap();
        let xm = Monomial::new(vec![1]);
        let a = MatrixPoly::from_terms(alg, 2, 2, [(xm.clone(), dmatrix![0.0, 1.0; 0.0, 0.0])]).unwrap();
        let b = MatrixPoly::from_terms(alg, 2, 2, [(xm, dmatrix![0.0, 0.0; 1.0, 0.0])]).unwrap();
        let prod = mp_mul(&a, &b).unwrap();
        assert_eq!(prod.num_terms(), 1);
        assert_eq!(prod.coefficient(&Monomial::new(vec![2])).unwrap(), &dmatrix![1.0, 0.0; 0.0, 0.0]);
        assert_eq!(mp_adjoint(&a), b);
    }

    #[test]
    fn torus_relation() {
        let alg = AlgebraSpec::torus(1).unwrap();
        let c = x(alg, 0);
        let s = x(alg, 1);
        let sum = c.mul(&c).unwrap().add(&s.mul(&s).unwrap()).unwrap();
        assert_eq!(sum, one(alg));
    }

    #[test]
    fn torus_rewrites() {
        let alg = AlgebraSpec::torus(1).unwrap();
        let s2 = MatrixPoly::<f64>::zero(alg, 1);
        let mut raw = s2.clone();
        raw.add_term(Monomial::new(vec![0, 2]), DMatrix::from_element(1, 1, 1.0));
        let reduced = raw.torus_reduce().unwrap();
        let expected =
            MatrixPoly::scalar(alg, [(Monomial::new(vec![0, 0]), 1.0), (Monomial::new(vec![2, 0]), -1.0)]).unwrap();
        assert_eq!(reduced, expected);

        let mut raw3 = s2;
        raw3.add_term(Monomial::new(vec![0, 3]), DMatrix::from_element(1, 1, 1.0));
        let expected3 =
            MatrixPoly::scalar(alg, [(Monomial::new(vec![0, 1]), 1.0), (Monomial::new(vec![2, 1]), -1.0)]).unwrap();
        assert_eq!(raw3.torus_reduce().unwrap(), expected3);
    }

    #[test]
    fn torus_reduce_rejects_free() {
        let alg = AlgebraSpec::free(1).unwrap();
        assert_eq!(one(alg).torus_reduce().unwrap_err(), Error::NotTorus);
    }

    #[test]
    fn eval_examples() {
        let alg = AlgebraSpec::free(1).unwrap();
        let p = MatrixPoly::from_terms(
            alg,
            2,
            2,
            [
                (Monomial::new(vec![0]), dmatrix![1.0, 0.0; 0.0, 1.0]),
                (Monomial::new(vec![1]), dmatrix![0.0, 1.0; 1.0, 0.0]),
                (Monomial::new(vec![2]), dmatrix![1.0, 0.0; 0.0, 0.0]),
            ],
        )
        .unwrap();
        assert!(p.is_hermitian());
        assert_eq!(mp_adjoint(&p), p);
        assert_eq!(p.eval(&Point::free(vec![2.0])).unwrap(), dmatrix![5.0, 2.0; 2.0, 1.0]);

        let t = AlgebraSpec::torus(1).unwrap();
        let q = one(t).scale(2.0).add(&x(t, 0)).unwrap();
        let v = q.eval(&Point::torus(&[std::f64::consts::PI])).unwrap();
        assert!((v[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_bad_points() {
        let t = AlgebraSpec::torus(1).unwrap();
        let q = one(t);
        assert!(matches!(q.eval(&Point::from_generators(vec![1.0, 1.0])), Err(Error::InvalidPoint(_))));
        assert!(matches!(q.eval(&Point::free(vec![1.0])), Err(Error::Dimension { .. })));
    }

    #[test]
    fn bases() {
        let a2 = AlgebraSpec::free(2).unwrap();
        let b = monomial_basis(&a2, 1, false).unwrap();
        assert_eq!(b, vec![Monomial::new(vec![0, 0]), Monomial::new(vec![1, 0]), Monomial::new(vec![0, 1])]);
        let h = monomial_basis(&a2, 2, true).unwrap();
        assert_eq!(h, vec![Monomial::new(vec![2, 0]), Monomial::new(vec![1, 1]), Monomial::new(vec![0, 2])]);
        let t1 = AlgebraSpec::torus(1).unwrap();
        let tb = monomial_basis(&t1, 1, false).unwrap();
        assert_eq!(tb, vec![Monomial::new(vec![0, 0]), Monomial::new(vec![1, 0]), Monomial::new(vec![0, 1])]);
        assert_eq!(monomial_basis(&t1, 1, true).unwrap_err(), Error::HomogeneousTorus);
        // C(d + t, t)
        assert_eq!(monomial_basis(&AlgebraSpec::free(3).unwrap(), 3, false).unwrap().len(), 20);
    }

    #[test]
    fn mismatches() {
        let a1 = AlgebraSpec::free(1).unwrap();
        let a2 = AlgebraSpec::free(2).unwrap();
        assert!(matches!(one(a1).mul(&one(a2)), Err(Error::AlgebraMismatch(..))));
        let big = MatrixPoly::<f64>::identity(a1, 2);
        assert!(matches!(mp_mul(&one(a1), &big), Err(Error::SizeMismatch(_))));
        assert!(AlgebraSpec::free(0).is_err());
    }
}
