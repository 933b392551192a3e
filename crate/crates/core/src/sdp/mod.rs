//! Standard-form block semidefinite programs.
//!
//! ```text
//!   optimize  Σ_j ⟨C_j, X_j⟩
//!   s.t.      Σ_j ⟨A_ij, X_j⟩ = b_i      i = 1..m
//!             X_j ⪰ 0
//! ```
//!
//! Free scalars (the ε margin of a strict certificate) are not a separate
//! variable kind: callers model them with shifted `1 × 1` PSD blocks.

mod dump;
mod solver;

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use dump::write_sdpa;
pub use solver::solve;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// One upper-triangular entry (`row ≤ col`) of a symmetric coefficient
/// matrix; the mirrored entry is implied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry<T> {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: T,
}

/// `⟨A, X⟩ = rhs` with `A` stored sparsely.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<T: Real> {
    entries: BTreeMap<(usize, usize, usize), T>,
    rhs: T,
}

impl<T: Real> Constraint<T> {
    pub fn new(rhs: T) -> Self {
        Self { entries: BTreeMap::new(), rhs }
    }

    /// Sets `A[i][j] = A[j][i] += v`.
    pub fn add(&mut self, block: usize, i: usize, j: usize, v: T) -> &mut Self {
        let key = (block, i.min(j), i.max(j));
        let e = self.entries.entry(key).or_insert_with(T::zero);
        *e += v;
        if *e == T::zero() {
            self.entries.remove(&key);
        }
        self
    }

    /// Adds `v · X[i][j]` to the linear form; off-diagonal coefficients are
    /// split evenly over the symmetric pair.
    pub fn add_linear(&mut self, block: usize, i: usize, j: usize, v: T) -> &mut Self {
        if i == j {
            self.add(block, i, j, v)
        } else {
            self.add(block, i, j, v * T::lit(0.5))
        }
    }

    /// Builds a constraint from dense per-block matrices.
    pub fn from_dense(mats: &[DMatrix<T>], rhs: T) -> Result<Self> {
        let mut c = Self::new(rhs);
        for (b, m) in mats.iter().enumerate() {
            if m.nrows() != m.ncols() {
                return Err(Error::MalformedSdp(format!("block {b} coefficient is not square")));
            }
            if m != &m.transpose() {
                return Err(Error::MalformedSdp(format!("block {b} coefficient is not symmetric")));
            }
            for i in 0..m.nrows() {
                for j in i..m.ncols() {
                    if m[(i, j)] != T::zero() {
                        c.add(b, i, j, m[(i, j)]);
                    }
                }
            }
        }
        Ok(c)
    }

    pub fn rhs(&self) -> T {
        self.rhs
    }

    pub fn entries(&self) -> impl Iterator<Item = Entry<T>> + '_ {
        self.entries.iter().map(|(&(block, row, col), &value)| Entry { block, row, col, value })
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `⟨A, X⟩`; `X` need not be symmetric.
    pub fn apply(&self, x: &[DMatrix<T>]) -> T {
        self.entries.iter().fold(T::zero(), |acc, (&(b, i, j), &v)| {
            let s = if i == j { x[b][(i, i)] } else { x[b][(i, j)] + x[b][(j, i)] };
            acc + v * s
        })
    }

    /// Adds `s · A` into dense block matrices.
    pub fn accumulate(&self, s: T, out: &mut [DMatrix<T>]) {
        for (&(b, i, j), &v) in &self.entries {
            out[b][(i, j)] += s * v;
            if i != j {
                out[b][(j, i)] += s * v;
            }
        }
    }

    pub fn dense(&self, blocks: &[usize]) -> Vec<DMatrix<T>> {
        let mut out = zero_blocks(blocks);
        self.accumulate(T::one(), &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem<T: Real> {
    blocks: Vec<usize>,
    sense: Sense,
    objective: Vec<DMatrix<T>>,
    constraints: Vec<Constraint<T>>,
}

impl<T: Real> SdpProblem<T> {
    pub fn new(blocks: Vec<usize>, sense: Sense) -> Self {
        let objective = zero_blocks(&blocks);
        Self { blocks, sense, objective, constraints: Vec::new() }
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &[DMatrix<T>] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn set_objective(&mut self, block: usize, c: DMatrix<T>) -> Result<()> {
        let n = *self
            .blocks
            .get(block)
            .ok_or_else(|| Error::MalformedSdp(format!("objective refers to missing block {block}")))?;
        if c.nrows() != n || c.ncols() != n {
            return Err(Error::MalformedSdp(format!("objective block {block} has wrong dimension")));
        }
        if c != c.transpose() {
            return Err(Error::MalformedSdp(format!("objective block {block} is not symmetric")));
        }
        self.objective[block] = c;
        Ok(())
    }

    /// Adds `v` at `(i, j)` and `(j, i)` of an objective block.
    pub fn add_objective_entry(&mut self, block: usize, i: usize, j: usize, v: T) {
        self.objective[block][(i, j)] += v;
        if i != j {
            self.objective[block][(j, i)] += v;
        }
    }

    pub fn add_constraint(&mut self, c: Constraint<T>) -> usize {
        self.constraints.push(c);
        self.constraints.len() - 1
    }

    pub fn objective_is_zero(&self) -> bool {
        self.objective.iter().all(|c| c.iter().all(|v| *v == T::zero()))
    }

    /// Structural checks performed before any iteration.
    pub fn validate(&self) -> Result<()> {
        if self.blocks.contains(&0) {
            return Err(Error::MalformedSdp("zero-dimensional block".into()));
        }
        for (b, c) in self.objective.iter().enumerate() {
            if c.nrows() != self.blocks[b] || c != &c.transpose() {
                return Err(Error::MalformedSdp(format!("objective block {b} malformed")));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::MalformedSdp(format!("objective block {b} not finite")));
            }
        }
        let mut seen = BTreeSet::new();
        for (k, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(Error::MalformedSdp(format!("constraint {k} has non-finite rhs")));
            }
            let mut key = vec![c.rhs.as_f64().to_bits()];
            for e in c.entries() {
                if e.block >= self.blocks.len() || e.col >= self.blocks[e.block] {
                    return Err(Error::MalformedSdp(format!(
                        "constraint {k} entry ({}, {}, {}) out of range",
                        e.block, e.row, e.col
                    )));
                }
                if !e.value.is_finite() {
                    return Err(Error::MalformedSdp(format!("constraint {k} has a non-finite entry")));
                }
                key.extend([e.block as u64, e.row as u64, e.col as u64, e.value.as_f64().to_bits()]);
            }
            if !seen.insert(key) {
                return Err(Error::MalformedSdp(format!("constraint {k} duplicates an earlier one")));
            }
        }
        Ok(())
    }
}

pub(crate) fn zero_blocks<T: Real>(blocks: &[usize]) -> Vec<DMatrix<T>> {
    blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    /// Converged with a nonzero objective.
    Optimal,
    /// Converged on a pure feasibility problem.
    Feasible,
    /// Carries a verified Farkas ray.
    Infeasible,
    /// Numerical failure or an undecided outcome; never a proof of anything.
    Stalled,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpOptions {
    pub max_iter: usize,
    /// Bound on `‖A(X) − b‖∞` for a converged solution.
    pub tol_eq: f64,
    /// Bound on the dual residual `‖C − Σ y_i A_i − Z‖∞` (minimisation form).
    pub tol_dual: f64,
    /// Bound on `|⟨C, X⟩ − bᵀy|`, relative to `max(1, |⟨C, X⟩|)`.
    pub tol_gap: f64,
    pub tol_psd: f64,
    /// Farkas rays are normalised to `bᵀy = −1` and must satisfy
    /// `Σ y_i A_i ⪰ −tol_farkas · I` on every block.
    pub tol_farkas: f64,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            max_iter: 150,
            tol_eq: 1e-8,
            tol_dual: 1e-8,
            tol_gap: 1e-8,
            tol_psd: 1e-9,
            tol_farkas: 1e-9,
            step_fraction: 0.98,
        }
    }
}

impl SdpOptions {
    /// Defaults loosened to the precision of `T` (identical to
    /// [`Default`] for `f64`).
    pub fn for_scalar<T: Real>() -> Self {
        let floor = T::eps().as_f64().powf(2.0 / 3.0);
        let d = Self::default();
        Self {
            tol_eq: d.tol_eq.max(floor),
            tol_dual: d.tol_dual.max(floor),
            tol_gap: d.tol_gap.max(floor),
            tol_psd: d.tol_psd.max(floor),
            tol_farkas: d.tol_farkas.max(floor),
            ..d
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpSolution<T: Real> {
    pub status: SdpStatus,
    /// Primal blocks; meaningful for `Optimal`/`Feasible`, otherwise the
    /// last normalised iterate.
    pub x: Vec<DMatrix<T>>,
    /// Dual multipliers in the problem's own sense: for a minimisation
    /// `C − Σ y_i A_i ⪰ 0`, for a maximisation `Σ y_i A_i − C ⪰ 0`.
    pub y: Vec<T>,
    pub objective: T,
    pub dual_objective: T,
    pub residuals: Residuals<T>,
    /// Present iff `status == Infeasible`: `bᵀy = −1`, `Σ y_i A_i ⪰ −tol_farkas·I`.
    pub farkas: Option<Vec<T>>,
    pub iterations: usize,
    pub diagnostics: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals<T> {
    pub primal_eq: T,
    pub min_eig: T,
    pub gap: T,
}

/// Recomputes `(‖A(X) − b‖∞, min_j λ_min(X_j), |⟨C,X⟩ − bᵀy|)` directly from
/// the problem data.
pub fn residuals<T: Real>(prob: &SdpProblem<T>, x: &[DMatrix<T>], y: &[T]) -> Result<Residuals<T>> {
    if x.len() != prob.blocks.len() {
        return Err(Error::Dimension { expected: prob.blocks.len(), got: x.len() });
    }
    for (b, xb) in x.iter().enumerate() {
        if xb.nrows() != prob.blocks[b] || xb.ncols() != prob.blocks[b] {
            return Err(Error::Dimension { expected: prob.blocks[b], got: xb.nrows() });
        }
    }
    if y.len() != prob.constraints.len() {
        return Err(Error::Dimension { expected: prob.constraints.len(), got: y.len() });
    }
    let primal_eq = prob.constraints.iter().map(|c| (c.apply(x) - c.rhs).abs()).fold(T::zero(), |a, v| a.max(v));
    let min_eig = x.iter().map(|xb| min_eigenvalue(&symmetrize(xb))).fold(T::max_value().unwrap(), |a: T, v| a.min(v));
    let pobj = x.iter().zip(&prob.objective).fold(T::zero(), |a, (xb, cb)| a + xb.dot(cb));
    let dobj = prob.constraints.iter().zip(y).fold(T::zero(), |a, (c, &yi)| a + c.rhs * yi);
    Ok(Residuals { primal_eq, min_eig, gap: (pobj - dobj).abs() })
}

/// Checks a Farkas ray for `{X ⪰ 0 : A(X) = b}`: returns the smallest
/// eigenvalue of `Σ y_i A_i` after scaling to `bᵀy = −1`, or `None` when
/// `bᵀy ≥ 0`.
pub fn farkas_margin<T: Real>(prob: &SdpProblem<T>, y: &[T]) -> Option<T> {
    let by = prob.constraints.iter().zip(y).fold(T::zero(), |a, (c, &yi)| a + c.rhs * yi);
    if by >= T::zero() {
        return None;
    }
    let mut s = zero_blocks(&prob.blocks);
    for (c, &yi) in prob.constraints.iter().zip(y) {
        c.accumulate(-yi / by, &mut s);
    }
    Some(s.iter().map(min_eigenvalue).fold(T::max_value().unwrap(), |a: T, v| a.min(v)))
}

pub(crate) fn symmetrize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * T::lit(0.5)
}

pub(crate) fn min_eigenvalue<T: Real>(m: &DMatrix<T>) -> T {
    if m.nrows() == 0 {
        return T::zero();
    }
    m.clone().symmetric_eigenvalues().iter().fold(T::max_value().unwrap(), |a: T, &v| a.min(v))
}
