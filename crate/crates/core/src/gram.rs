//! Lifted Gram parametrisation of weighted matrix sums of squares.
//!
//! A family `q_j ∈ M_{ν_k × ν}(R)` with coefficients on a monomial basis
//! `B` is stacked into vectors `u_j` indexed by `(α, r, c)` (monomial,
//! generator row, ambient column, in that nesting order). The PSD matrix
//! `G = Σ_j u_j u_jᵀ` then represents `Σ_j q_j* p_k q_j` linearly:
//!
//! ```text
//!   coeff_δ[c, c'] = Σ_{α+β+γ=δ} Σ_{r,r'} P_γ[r, r'] · G[(α,r,c), (β,r',c')]
//! ```
//!
//! For `p_0 = 1` (`ν_k = 1`) this is the classical block Gram matrix of size
//! `|B| · ν`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::poly::{AlgebraSpec, MatrixPoly, Monomial};
use crate::qmodule::{half_ceil, ConstraintSystem, TruncationPlan};
use crate::scalar::Real;
use crate::sdp::{Constraint, SdpProblem, SdpSolution, SdpStatus, Sense};

#[derive(Clone, Debug, PartialEq)]
pub struct GramBlock<T: Real> {
    /// Generator index into the constraint system (0 is `p_0 = 1`).
    pub k: usize,
    pub basis: Vec<Monomial>,
    /// Row count `ν_k` of the multipliers.
    pub weight_size: usize,
    /// Column count `ν` of the multipliers.
    pub ambient_size: usize,
    pub gram: DMatrix<T>,
}

impl<T: Real> GramBlock<T> {
    pub fn lift_dim(&self) -> usize {
        self.basis.len() * self.weight_size * self.ambient_size
    }

    pub fn index(&self, alpha: usize, r: usize, c: usize) -> usize {
        (alpha * self.weight_size + r) * self.ambient_size + c
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CertMode<T> {
    /// `p − ε·1 ∈ M`.
    Strict { epsilon: T },
    /// `p ∈ M`.
    Closure,
    /// `(x1² + … + xd²)^θ · p ∈ M` over homogeneous bases.
    Reznick { theta: u32 },
    /// `Σ_i c_i* p c_i ∈ 1 + M`.
    Nnsd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<T: Real> {
    pub mode: CertMode<T>,
    pub level: u32,
    pub blocks: Vec<GramBlock<T>>,
    /// Nnsd only: Gram block of `Σ_i c_i* p c_i` (weight `p`, `k` unused).
    pub transformer: Option<GramBlock<T>>,
    /// Largest multiple of the identity added to a Gram block while decoding.
    pub shift: T,
}

impl<T: Real> Certificate<T> {
    pub fn epsilon(&self) -> Option<T> {
        match self.mode {
            CertMode::Strict { epsilon } => Some(epsilon),
            _ => None,
        }
    }

    pub fn theta(&self) -> Option<u32> {
        match self.mode {
            CertMode::Reznick { theta } => Some(theta),
            _ => None,
        }
    }
}

/// The polynomial `Σ_j q_j* p_k q_j` represented by a Gram block.
pub fn gram_expand<T: Real>(block: &GramBlock<T>, weight: &MatrixPoly<T>) -> Result<MatrixPoly<T>> {
    let (nk, nu) = (block.weight_size, block.ambient_size);
    if weight.rows() != nk || weight.cols() != nk {
        return Err(Error::SizeMismatch(format!(
            "weight is {}x{}, block expects {nk}x{nk}",
            weight.rows(),
            weight.cols()
        )));
    }
    let dim = block.lift_dim();
    if block.gram.nrows() != dim || block.gram.ncols() != dim {
        return Err(Error::Dimension { expected: dim, got: block.gram.nrows() });
    }
    let alg = *weight.algebra();
    if let Some(m) = block.basis.iter().find(|m| m.len() != alg.num_generators()) {
        return Err(Error::Dimension { expected: alg.num_generators(), got: m.len() });
    }
    let g = &block.gram;
    let mut terms: Vec<(Monomial, DMatrix<T>)> = Vec::new();
    for (ai, alpha) in block.basis.iter().enumerate() {
        for (bi, beta) in block.basis.iter().enumerate() {
            let ab = alpha.mul(beta);
            for (gamma, pg) in weight.terms() {
                let mut coef = DMatrix::zeros(nu, nu);
                for r in 0..nk {
                    for r2 in 0..nk {
                        let w = pg[(r, r2)];
                        if w == T::zero() {
                            continue;
                        }
                        for c in 0..nu {
                            for c2 in 0..nu {
                                coef[(c, c2)] += w * g[(block.index(ai, r, c), block.index(bi, r2, c2))];
                            }
                        }
                    }
                }
                terms.push((ab.mul(gamma), coef));
            }
        }
    }
    MatrixPoly::from_terms(alg, nu, nu, terms)
}

/// `G = Σ_j u_j u_jᵀ` for multipliers `q_j ∈ M_{ν_k × ν}(R)` supported on `basis`.
pub fn gram_synthesize<T: Real>(k: usize, qs: &[MatrixPoly<T>], basis: &[Monomial]) -> Result<GramBlock<T>> {
    let first = qs.first().ok_or_else(|| Error::Invalid("no multipliers given".into()))?;
    let (nk, nu) = (first.rows(), first.cols());
    let index: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut block = GramBlock {
        k,
        basis: basis.to_vec(),
        weight_size: nk,
        ambient_size: nu,
        gram: DMatrix::zeros(basis.len() * nk * nu, basis.len() * nk * nu),
    };
    for q in qs {
        first.algebra().check_same(q.algebra())?;
        if q.rows() != nk || q.cols() != nu {
            return Err(Error::SizeMismatch("multipliers must share one shape".into()));
        }
        let mut u = nalgebra::DVector::zeros(block.lift_dim());
        for (m, c) in q.terms() {
            let a = *index.get(m).ok_or_else(|| Error::OutsideBasis(m.display(q.algebra())))?;
            for r in 0..nk {
                for col in 0..nu {
                    u[block.index(a, r, col)] = c[(r, col)];
                }
            }
        }
        block.gram += &u * u.transpose();
    }
    Ok(block)
}

/// Kind of identity a certificate SDP searches for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Strict,
    Closure,
    Reznick { theta: u32 },
    Nnsd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BlockRole {
    Module {
        k: usize,
        plan_index: usize,
    },
    Transformer,
    /// `ε = s − floor`.
    Margin,
    /// `s + w = floor + cap`.
    Cap,
}

/// A certificate search posed as an SDP, with the layout needed to decode it.
#[derive(Clone, Debug)]
pub struct CertificateSdp<T: Real> {
    pub problem: SdpProblem<T>,
    pub mode: SearchMode,
    pub level: u32,
    roles: Vec<BlockRole>,
    bases: Vec<Vec<Monomial>>,
    weight_sizes: Vec<usize>,
    ambient: usize,
    /// Row labels `(monomial, c, c')` in constraint order.
    pub rows: Vec<(Monomial, usize, usize)>,
    epsilon_floor: T,
    epsilon_cap: T,
}

/// Target polynomial of each search mode: `p`, `p` (ε handled separately),
/// `‖x‖^{2θ} p`, or the constant identity for Nnsd.
pub fn target_polynomial<T: Real>(p: &MatrixPoly<T>, mode: SearchMode) -> Result<MatrixPoly<T>> {
    match mode {
        SearchMode::Strict | SearchMode::Closure => Ok(p.clone()),
        SearchMode::Reznick { theta } => p.mul_scalar_poly(&MatrixPoly::norm_squared(*p.algebra()).pow(theta)?),
        SearchMode::Nnsd => Ok(MatrixPoly::identity(*p.algebra(), p.size())),
    }
}

struct NormalForms {
    torus: bool,
    cache: HashMap<Monomial, Vec<(Monomial, i64)>>,
}

impl NormalForms {
    fn get(&mut self, alg: &AlgebraSpec, m: Monomial) -> Vec<(Monomial, i64)> {
        if !self.torus || m.is_torus_normal() {
            return vec![(m, 1)];
        }
        self.cache
            .entry(m.clone())
            .or_insert_with(|| {
                let mut p = MatrixPoly::<f64>::zero(*alg, 1);
                p.add_term(m, DMatrix::from_element(1, 1, 1.0));
                p.torus_reduce().expect("torus algebra").terms().map(|(m, c)| (m.clone(), c[(0, 0)] as i64)).collect()
            })
            .clone()
    }
}

/// Assembles the coefficient-matching SDP for `p` against the truncated
/// module described by `plan`.
pub fn build_certificate_sdp<T: Real>(
    p: &MatrixPoly<T>,
    s: &ConstraintSystem<T>,
    plan: &TruncationPlan,
    mode: SearchMode,
) -> Result<CertificateSdp<T>> {
    let alg = *p.algebra();
    s.algebra().check_same(&alg)?;
    if !p.is_hermitian() {
        return Err(Error::NotHermitian("target polynomial".into()));
    }
    let nu = p.size();
    if s.ambient_size() != nu {
        return Err(Error::SizeMismatch(format!(
            "constraint system targets size {}, polynomial has size {nu}",
            s.ambient_size()
        )));
    }
    let t = plan.level;
    let homogeneous = matches!(mode, SearchMode::Reznick { .. });
    if homogeneous != plan.homogeneous {
        return Err(Error::Invalid("Reznick search needs a homogeneous plan and vice versa".into()));
    }
    let target = target_polynomial(p, mode)?;
    let deg = target.degree().max(p.degree());
    if deg > 2 * t {
        return Err(Error::DegreeOverflow { degree: deg, level: t });
    }
    if homogeneous && (!target.is_homogeneous() || target.degree() != 2 * t) {
        return Err(Error::NotHomogeneousEven(format!("target of degree {} at level {t}", target.degree())));
    }

    // Rows: every normal-form monomial of the right degree, upper triangle.
    let row_monos = crate::poly::monomial_basis(&alg, 2 * t, homogeneous)?;
    let mut rows = Vec::new();
    let mut row_of: HashMap<(Monomial, usize, usize), usize> = HashMap::new();
    for m in &row_monos {
        for c in 0..nu {
            for c2 in c..nu {
                row_of.insert((m.clone(), c, c2), rows.len());
                rows.push((m.clone(), c, c2));
            }
        }
    }
    let mut cons: Vec<Constraint<T>> = rows
        .iter()
        .map(|(m, c, c2)| Constraint::new(target.coefficient(m).map_or(T::zero(), |mat| mat[(*c, *c2)])))
        .collect();

    let mut roles = Vec::new();
    let mut bases = Vec::new();
    let mut weight_sizes = Vec::new();
    let mut dims = Vec::new();
    let mut nf = NormalForms { torus: alg.is_torus(), cache: HashMap::new() };

    let mut add_block = |role: BlockRole,
                         basis: &[Monomial],
                         weight: &MatrixPoly<T>,
                         sign: T,
                         cons: &mut Vec<Constraint<T>>|
     -> Result<()> {
        let b = dims.len();
        let nk = weight.rows();
        let blk = GramBlock::<T> {
            k: 0,
            basis: basis.to_vec(),
            weight_size: nk,
            ambient_size: nu,
            gram: DMatrix::zeros(0, 0),
        };
        dims.push(blk.lift_dim());
        roles.push(role);
        bases.push(basis.to_vec());
        weight_sizes.push(nk);
        for (ai, alpha) in basis.iter().enumerate() {
            for (bi, beta) in basis.iter().enumerate() {
                let ab = alpha.mul(beta);
                for (gamma, pg) in weight.terms() {
                    let forms = nf.get(&alg, ab.mul(gamma));
                    for r in 0..nk {
                        for r2 in 0..nk {
                            let w = pg[(r, r2)];
                            if w == T::zero() {
                                continue;
                            }
                            for (delta, mult) in &forms {
                                let coef = sign * w * T::from_i64(*mult).expect("small integer");
                                for c in 0..nu {
                                    for c2 in c..nu {
                                        let row = *row_of.get(&(delta.clone(), c, c2)).ok_or_else(|| {
                                            Error::DegreeOverflow { degree: delta.degree(), level: t }
                                        })?;
                                        cons[row].add_linear(b, blk.index(ai, r, c), blk.index(bi, r2, c2), coef);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    };

    let module_sign = if mode == SearchMode::Nnsd { -T::one() } else { T::one() };
    for (plan_index, pb) in plan.blocks.iter().enumerate() {
        let weight =
            s.generator(pb.k).ok_or_else(|| Error::Invalid(format!("plan refers to missing generator {}", pb.k)))?;
        add_block(BlockRole::Module { k: pb.k, plan_index }, &pb.basis, &weight, module_sign, &mut cons)?;
    }
    if mode == SearchMode::Nnsd {
        let tdeg =
            t.checked_sub(half_ceil(p.degree())).ok_or(Error::DegreeOverflow { degree: p.degree(), level: t })?;
        let basis = crate::poly::monomial_basis(&alg, tdeg, false)?;
        add_block(BlockRole::Transformer, &basis, p, T::one(), &mut cons)?;
    }

    let scale = T::one() + p.max_abs_coeff();
    let epsilon_floor = scale;
    let epsilon_cap = scale * T::lit(10.0);
    let mut objective_block = None;
    if mode == SearchMode::Strict {
        let one = Monomial::one(alg.num_generators());
        let b = dims.len();
        dims.push(1);
        roles.push(BlockRole::Margin);
        bases.push(Vec::new());
        weight_sizes.push(1);
        for c in 0..nu {
            let row = row_of[&(one.clone(), c, c)];
            let rhs = cons[row].rhs() + epsilon_floor;
            let mut updated = Constraint::new(rhs);
            for e in cons[row].entries() {
                updated.add(e.block, e.row, e.col, e.value);
            }
            updated.add(b, 0, 0, T::one());
            cons[row] = updated;
        }
        dims.push(1);
        roles.push(BlockRole::Cap);
        bases.push(Vec::new());
        weight_sizes.push(1);
        let mut cap = Constraint::new(epsilon_floor + epsilon_cap);
        cap.add(b, 0, 0, T::one()).add(b + 1, 0, 0, T::one());
        cons.push(cap);
        rows.push((Monomial::one(alg.num_generators()), usize::MAX, usize::MAX));
        objective_block = Some(b);
    }

    let sense = if objective_block.is_some() { Sense::Maximize } else { Sense::Minimize };
    let mut problem = SdpProblem::new(dims, sense);
    if let Some(b) = objective_block {
        problem.add_objective_entry(b, 0, 0, T::one());
    }
    for c in cons {
        problem.add_constraint(c);
    }
    Ok(CertificateSdp {
        problem,
        mode,
        level: t,
        roles,
        bases,
        weight_sizes,
        ambient: nu,
        rows,
        epsilon_floor,
        epsilon_cap,
    })
}

impl<T: Real> CertificateSdp<T> {
    /// `ε` carried by a solution of a strict search.
    pub fn epsilon(&self, sol: &SdpSolution<T>) -> Option<T> {
        let b = self.roles.iter().position(|r| *r == BlockRole::Margin)?;
        Some(sol.x[b][(0, 0)] - self.epsilon_floor)
    }

    pub fn epsilon_cap(&self) -> T {
        self.epsilon_cap
    }

    /// Turns a converged solution into a certificate. Gram blocks with a
    /// negative eigenvalue are shifted by `−λ_min · I`.
    pub fn decode(&self, sol: &SdpSolution<T>) -> Result<Certificate<T>> {
        if !matches!(sol.status, SdpStatus::Optimal | SdpStatus::Feasible) {
            return Err(Error::Invalid(format!("cannot decode a {:?} solution", sol.status)));
        }
        let mut blocks = Vec::new();
        let mut transformer = None;
        let mut shift = T::zero();
        for (b, role) in self.roles.iter().enumerate() {
            let mk = |k: usize| -> GramBlock<T> {
                let mut g = crate::sdp::symmetrize(&sol.x[b]);
                let lam = crate::sdp::min_eigenvalue(&g);
                if lam < T::zero() {
                    for i in 0..g.nrows() {
                        g[(i, i)] -= lam;
                    }
                }
                GramBlock {
                    k,
                    basis: self.bases[b].clone(),
                    weight_size: self.weight_sizes[b],
                    ambient_size: self.ambient,
                    gram: g,
                }
            };
            match *role {
                BlockRole::Module { k, .. } => {
                    let blk = mk(k);
                    shift = shift.max(shift_of(&sol.x[b]));
                    blocks.push(blk);
                }
                BlockRole::Transformer => {
                    shift = shift.max(shift_of(&sol.x[b]));
                    transformer = Some(mk(0));
                }
                BlockRole::Margin | BlockRole::Cap => {}
            }
        }
        let mode = match self.mode {
            SearchMode::Strict => CertMode::Strict { epsilon: self.epsilon(sol).expect("margin block") },
            SearchMode::Closure => CertMode::Closure,
            SearchMode::Reznick { theta } => CertMode::Reznick { theta },
            SearchMode::Nnsd => CertMode::Nnsd,
        };
        Ok(Certificate { mode, level: self.level, blocks, transformer, shift })
    }

    /// Module blocks of a Farkas ray / dual vector, as the matrices
    /// `Σ_i y_i A_i` restricted to each block (diagnostics only).
    pub fn block_roles(&self) -> Vec<Option<usize>> {
        self.roles
            .iter()
            .map(|r| match r {
                BlockRole::Module { k, .. } => Some(*k),
                _ => None,
            })
            .collect()
    }

    /// Row labels grouped by monomial, for decoding dual vectors.
    pub(crate) fn row_map(&self) -> BTreeMap<Monomial, Vec<(usize, usize, usize)>> {
        let mut out: BTreeMap<Monomial, Vec<(usize, usize, usize)>> = BTreeMap::new();
        for (i, (m, c, c2)) in self.rows.iter().enumerate() {
            if *c != usize::MAX {
                out.entry(m.clone()).or_default().push((i, *c, *c2));
            }
        }
        out
    }
}

fn shift_of<T: Real>(x: &DMatrix<T>) -> T {
    let lam = crate::sdp::min_eigenvalue(&crate::sdp::symmetrize(x));
    if lam < T::zero() {
        -lam
    } else {
        T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::monomial_basis;
    use crate::qmodule::truncate;
    use crate::sdp::{solve, SdpOptions};
    use nalgebra::dmatrix;

    fn free1() -> AlgebraSpec {
        AlgebraSpec::free(1).unwrap()
    }

    fn scalar(coefs: &[f64]) -> MatrixPoly<f64> {
        MatrixPoly::scalar(free1(), coefs.iter().enumerate().map(|(i, &c)| (Monomial::new(vec![i as u32]), c))).unwrap()
    }

    fn block(g: DMatrix<f64>, basis: Vec<Monomial>) -> GramBlock<f64> {
        GramBlock { k: 0, basis, weight_size: 1, ambient_size: 1, gram: g }
    }

    fn basis1() -> Vec<Monomial> {
        monomial_basis(&free1(), 1, false).unwrap()
    }

    #[test]
    fn diagonal_and_rank_one_grams() {
        let one = scalar(&[1.0]);
        let e = gram_expand(&block(DMatrix::identity(2, 2), basis1()), &one).unwrap();
        assert_eq!(e, scalar(&[1.0, 0.0, 1.0]));
        let e = gram_expand(&block(DMatrix::from_element(2, 2, 1.0), basis1()), &one).unwrap();
        assert_eq!(e, scalar(&[1.0, 2.0, 1.0]));
    }

    #[test]
    fn weight_passthrough() {
        let w = scalar(&[1.0, 0.0, -1.0]);
        let b = block(DMatrix::identity(1, 1), vec![Monomial::new(vec![0])]);
        assert_eq!(gram_expand(&b, &w).unwrap(), w);
    }

    #[test]
    fn synthesize_examples() {
        let q = scalar(&[1.0, 1.0]);
        let g = gram_synthesize(0, &[q], &basis1()).unwrap();
        assert_eq!(g.gram, DMatrix::from_element(2, 2, 1.0));

        let x =
            MatrixPoly::from_terms(free1(), 2, 2, [(Monomial::new(vec![1]), dmatrix![0.0, 1.0; 0.0, 0.0])]).unwrap();
        let g = gram_synthesize(0, &[x], &basis1()).unwrap();
        assert_eq!(g.lift_dim(), 8);
        let nonzero: Vec<_> = g.gram.iter().filter(|v| **v != 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        // x·e12 sits at (α = x, r = 0, c = 1)
        let i = g.index(1, 0, 1);
        assert_eq!(g.gram[(i, i)], 1.0);

        let outside = scalar(&[0.0, 0.0, 1.0]);
        assert!(matches!(gram_synthesize(0, &[outside], &basis1()), Err(Error::OutsideBasis(_))));
    }

    #[test]
    fn sos_problem_shape() {
        let p = scalar(&[1.0, 0.0, 1.0]);
        let s = ConstraintSystem::new(free1(), 1);
        let plan = truncate(&s, 1, false).unwrap();
        let sdp = build_certificate_sdp(&p, &s, &plan, SearchMode::Closure).unwrap();
        assert_eq!(sdp.problem.blocks(), &[2]);
        assert_eq!(sdp.problem.num_constraints(), 3);
        let sol = solve(&sdp.problem, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Feasible);
        // G = I is the only solution.
        assert!((&sol.x[0] - DMatrix::identity(2, 2)).amax() < 1e-7);
    }

    #[test]
    fn strict_interval_margin() {
        // sup ε with 3 + x − ε ∈ M_{1−x²} at level 1 is 2.
        let p = scalar(&[3.0, 1.0]);
        let s = ConstraintSystem::new(free1(), 1).with(scalar(&[1.0, 0.0, -1.0])).unwrap();
        let plan = truncate(&s, 1, false).unwrap();
        let sdp = build_certificate_sdp(&p, &s, &plan, SearchMode::Strict).unwrap();
        assert_eq!(&sdp.problem.blocks()[..2], &[2, 1]);
        let sol = solve(&sdp.problem, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sdp.epsilon(&sol).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn odd_polynomial_is_infeasible() {
        let p = scalar(&[0.0, 1.0]);
        let s = ConstraintSystem::new(free1(), 1);
        for t in 1..3 {
            let plan = truncate(&s, t, false).unwrap();
            let sdp = build_certificate_sdp(&p, &s, &plan, SearchMode::Closure).unwrap();
            let sol = solve(&sdp.problem, &SdpOptions::default()).unwrap();
            assert_eq!(sol.status, SdpStatus::Infeasible, "level {t}");
        }
    }

    #[test]
    fn degree_overflow() {
        let p = scalar(&[1.0, 0.0, 0.0, 0.0, 1.0]);
        let s = ConstraintSystem::new(free1(), 1);
        let plan = truncate(&s, 1, false).unwrap();
        assert!(matches!(build_certificate_sdp(&p, &s, &plan, SearchMode::Closure), Err(Error::DegreeOverflow { .. })));
    }
}
