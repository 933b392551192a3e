//! Generator sets, their degree-truncated quadratic modules, and the
//! archimedean probe.

use crate::certify::{putinar_certify, CertifyOptions, CertifyOutcome, LevelReport};
use crate::error::{Error, Result};
use crate::gram::Certificate;
use crate::poly::{monomial_basis, AlgebraSpec, MatrixPoly, Monomial};
use crate::scalar::Real;

/// The generators `p_1..p_m` of a quadratic module in `M_ν(R)`.
///
/// Index 0 always denotes the implicit scalar generator `p_0 = 1`;
/// user generators are numbered from 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSystem<T: Real> {
    algebra: AlgebraSpec,
    ambient_size: usize,
    generators: Vec<MatrixPoly<T>>,
    names: Vec<Option<String>>,
}

impl<T: Real> ConstraintSystem<T> {
    pub fn new(algebra: AlgebraSpec, ambient_size: usize) -> Self {
        Self { algebra, ambient_size, generators: Vec::new(), names: Vec::new() }
    }

    /// Appends a hermitian generator; returns its index (≥ 1).
    pub fn push(&mut self, p: MatrixPoly<T>, name: Option<String>) -> Result<usize> {
        self.algebra.check_same(p.algebra())?;
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(
                name.unwrap_or_else(|| format!("generator {}", self.generators.len() + 1)),
            ));
        }
        let p = if self.algebra.is_torus() { p.torus_reduce()? } else { p };
        self.generators.push(p);
        self.names.push(name);
        Ok(self.generators.len())
    }

    pub fn with(mut self, p: MatrixPoly<T>) -> Result<Self> {
        self.push(p, None)?;
        Ok(self)
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        &self.algebra
    }

    pub fn ambient_size(&self) -> usize {
        self.ambient_size
    }

    /// Number of generators including `p_0 = 1`.
    pub fn len(&self) -> usize {
        self.generators.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generator(&self, k: usize) -> Option<MatrixPoly<T>> {
        match k {
            0 => Some(MatrixPoly::identity(self.algebra, 1)),
            _ => self.generators.get(k - 1).cloned(),
        }
    }

    pub fn user_generators(&self) -> &[MatrixPoly<T>] {
        &self.generators
    }

    pub fn name(&self, k: usize) -> Option<&str> {
        if k == 0 {
            return Some("1");
        }
        self.names.get(k - 1).and_then(|n| n.as_deref())
    }

    /// Same generators, different target size.
    pub fn with_ambient_size(&self, ambient_size: usize) -> Self {
        Self { ambient_size, ..self.clone() }
    }

    /// Reorders user generators: `order[i]` is the old 1-based index placed at `i + 1`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.generators.len() {
            return Err(Error::Dimension { expected: self.generators.len(), got: order.len() });
        }
        let mut out = Self::new(self.algebra, self.ambient_size);
        for &k in order {
            let p = self.generator(k).filter(|_| k > 0).ok_or_else(|| Error::Invalid(format!("bad index {k}")))?;
            out.push(p, self.names[k - 1].clone())?;
        }
        Ok(out)
    }

    /// True when every generator evaluates to a PSD matrix at `pt`.
    pub fn contains_point(&self, pt: &crate::poly::Point<T>, tol: T) -> Result<bool> {
        for g in &self.generators {
            let v = g.eval(pt)?;
            if crate::verify::psd_check(&v, T::lit(1e-9))? < -tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Basis assignment for one multiplier block.
#[derive(Clone, Debug, PartialEq)]
pub struct PlannedBlock {
    pub k: usize,
    /// Multiplier degree (half-degree bound, or exact degree when homogeneous).
    pub degree: u32,
    pub basis: Vec<Monomial>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncationPlan {
    pub level: u32,
    pub homogeneous: bool,
    pub blocks: Vec<PlannedBlock>,
    /// Generators whose degree exceeds `2 · level`.
    pub dropped: Vec<usize>,
}

impl TruncationPlan {
    pub fn block(&self, k: usize) -> Option<&PlannedBlock> {
        self.blocks.iter().find(|b| b.k == k)
    }
}

pub fn half_ceil(d: u32) -> u32 {
    d.div_ceil(2)
}

/// Degree-`2t` truncation of the quadratic module generated by `S`.
pub fn truncate<T: Real>(s: &ConstraintSystem<T>, t: u32, homogeneous: bool) -> Result<TruncationPlan> {
    let mut blocks = Vec::new();
    let mut dropped = Vec::new();
    for k in 0..s.len() {
        let g = s.generator(k).expect("index in range");
        let deg = g.degree();
        if homogeneous && (!g.is_homogeneous() || deg % 2 == 1) {
            return Err(Error::NotHomogeneousEven(format!("generator {k} ({g})")));
        }
        if deg > 2 * t {
            dropped.push(k);
            continue;
        }
        let degree = if homogeneous { t - deg / 2 } else { t - half_ceil(deg) };
        let basis = monomial_basis(s.algebra(), degree, homogeneous)?;
        blocks.push(PlannedBlock { k, degree, basis });
    }
    Ok(TruncationPlan { level: t, homogeneous, blocks, dropped })
}

#[derive(Clone, Debug)]
pub enum ProbeOutcome<T: Real> {
    /// `K² − Σ x_i² ∈ M_S` at the reported level.
    Found { k: T, level: u32, certificate: Certificate<T> },
    /// Inconclusive: no certificate on the tried grid.
    NotFound { tried: Vec<(T, LevelReport<T>)> },
}

/// Searches the grid `K ∈ {1, 2, 4, …, K_max}` × `t ≤ t_max` for a
/// certificate of `K² − Σ x_i² ∈ M_S`, lowest level first.
///
/// On the torus the target reduces to the constant `K² − n`.
pub fn archimedean_probe<T: Real>(
    s: &ConstraintSystem<T>,
    t_max: u32,
    k_max: T,
    opts: &CertifyOptions,
) -> Result<ProbeOutcome<T>> {
    let scalar = s.with_ambient_size(1);
    let norm = MatrixPoly::<T>::norm_squared(*s.algebra());
    let mut grid = Vec::new();
    let mut k = T::one();
    while k <= k_max {
        grid.push(k);
        k *= T::lit(2.0);
    }
    let mut tried = Vec::new();
    for t in 1..=t_max.max(1) {
        for &k in &grid {
            let target = MatrixPoly::identity(*s.algebra(), 1).scale(k * k).sub(&norm)?;
            match putinar_certify(&target, &scalar, t..=t, crate::certify::Margin::Closure, opts)? {
                CertifyOutcome::Found(certificate) => return Ok(ProbeOutcome::Found { k, level: t, certificate }),
                CertifyOutcome::InfeasibleAt(mut r) | CertifyOutcome::Stalled(mut r) => {
                    tried.push((k, r.remove(0)));
                }
            }
        }
    }
    Ok(ProbeOutcome::NotFound { tried })
}
