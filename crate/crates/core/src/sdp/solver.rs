//! Homogeneous self-dual interior point method.
//!
//! The problem is embedded as
//!
//! ```text
//!   A(X) − bτ = 0,   Σ y_i A_i + Z − Cτ = 0,   bᵀy − ⟨C, X⟩ − κ = 0,
//!   X, Z ⪰ 0,  τ, κ ≥ 0
//! ```
//!
//! and solved with HKM search directions and a Mehrotra predictor-corrector
//! step. A limit with `τ > 0` recovers an optimal pair; a limit with `κ > 0`
//! and `bᵀy > 0` yields a Farkas ray for the primal. Every status is
//! re-checked against the original data before it is returned.

use nalgebra::{DMatrix, DVector};

use super::{
    farkas_margin, residuals, symmetrize, zero_blocks, Residuals, SdpOptions, SdpProblem, SdpSolution, SdpStatus, Sense,
};
use crate::error::Result;
use crate::scalar::Real;

type Blocks<T> = Vec<DMatrix<T>>;

/// Full symmetric `(i, j, value)` list of one coefficient matrix.
type Entries<T> = Vec<(usize, usize, T)>;

struct Model<'a, T: Real> {
    prob: &'a SdpProblem<T>,
    /// Indices of the constraints kept after dropping empty `0 = 0` rows.
    rows: Vec<usize>,
    /// Per block: `(local row, full symmetric entry list)`.
    by_block: Vec<Vec<(usize, Entries<T>)>>,
    c: Blocks<T>,
    b: DVector<T>,
}

impl<'a, T: Real> Model<'a, T> {
    fn new(prob: &'a SdpProblem<T>, rows: Vec<usize>) -> Self {
        let nb = prob.blocks().len();
        let mut by_block: Vec<Vec<(usize, Entries<T>)>> = vec![Vec::new(); nb];
        for (local, &k) in rows.iter().enumerate() {
            let mut per: Vec<Vec<(usize, usize, T)>> = vec![Vec::new(); nb];
            for e in prob.constraints()[k].entries() {
                per[e.block].push((e.row, e.col, e.value));
                if e.row != e.col {
                    per[e.block].push((e.col, e.row, e.value));
                }
            }
            for (b, ents) in per.into_iter().enumerate() {
                if !ents.is_empty() {
                    by_block[b].push((local, ents));
                }
            }
        }
        let c = match prob.sense() {
            Sense::Minimize => prob.objective().to_vec(),
            Sense::Maximize => prob.objective().iter().map(|m| -m).collect(),
        };
        let b = DVector::from_iterator(rows.len(), rows.iter().map(|&k| prob.constraints()[k].rhs()));
        Self { prob, rows, by_block, c, b }
    }

    fn m(&self) -> usize {
        self.rows.len()
    }

    fn a_op(&self, x: &[DMatrix<T>]) -> DVector<T> {
        DVector::from_iterator(self.m(), self.rows.iter().map(|&k| self.prob.constraints()[k].apply(x)))
    }

    fn at_op(&self, y: &DVector<T>) -> Blocks<T> {
        let mut out = zero_blocks(self.prob.blocks());
        for (local, &k) in self.rows.iter().enumerate() {
            self.prob.constraints()[k].accumulate(y[local], &mut out);
        }
        out
    }

    /// `M_ij = Σ_blocks tr(A_i X A_j Z⁻¹)`.
    fn schur(&self, x: &[DMatrix<T>], zinv: &[DMatrix<T>]) -> DMatrix<T> {
        let m = self.m();
        let mut out = DMatrix::zeros(m, m);
        for (b, list) in self.by_block.iter().enumerate() {
            let n = x[b].nrows();
            let xb = &x[b];
            let zb = &zinv[b];
            for (jpos, (j, ents_j)) in list.iter().enumerate() {
                let mut w = DMatrix::<T>::zeros(n, n);
                for &(c, d, v) in ents_j {
                    for col in 0..n {
                        let f = v * zb[(d, col)];
                        if f != T::zero() {
                            for row in 0..n {
                                w[(row, col)] += xb[(row, c)] * f;
                            }
                        }
                    }
                }
                for (i, ents_i) in list.iter().take(jpos + 1) {
                    let s = ents_i.iter().fold(T::zero(), |acc, &(a, bb, v)| acc + v * w[(bb, a)]);
                    out[(*i, *j)] += s;
                    if i != j {
                        out[(*j, *i)] += s;
                    }
                }
            }
        }
        out
    }
}

fn inner<T: Real>(a: &[DMatrix<T>], b: &[DMatrix<T>]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.dot(y))
}

fn max_abs<T: Real>(a: &[DMatrix<T>]) -> T {
    a.iter().flat_map(|m| m.iter()).fold(T::zero(), |acc, v| acc.max(v.abs()))
}

fn vmax_abs<T: Real>(v: &DVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

/// Largest `α` with `X + α dX ⪰ 0`, given `X ≻ 0` (infinite if unconstrained).
fn max_step<T: Real>(x: &DMatrix<T>, dx: &DMatrix<T>) -> Option<T> {
    let chol = x.clone().cholesky()?;
    let l = chol.l();
    let a = l.solve_lower_triangular(dx)?;
    let w = l.solve_lower_triangular(&a.transpose())?;
    let lam = super::min_eigenvalue(&symmetrize(&w));
    if lam >= T::zero() {
        Some(T::max_value().unwrap())
    } else {
        Some(-T::one() / lam)
    }
}

struct SchurFactor<T: Real> {
    m: DMatrix<T>,
    chol: Option<nalgebra::Cholesky<T, nalgebra::Dyn>>,
    lu: Option<nalgebra::LU<T, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl<T: Real> SchurFactor<T> {
    fn new(m: DMatrix<T>) -> Self {
        if let Some(c) = m.clone().cholesky() {
            return Self { m, chol: Some(c), lu: None };
        }
        let scale = m.diagonal().iter().fold(T::zero(), |a, v| a.max(v.abs())).max(T::one());
        let reg = scale * T::eps() * T::lit(1e3);
        let mut shifted = m.clone();
        for i in 0..m.nrows() {
            shifted[(i, i)] += reg;
        }
        if let Some(c) = shifted.cholesky() {
            return Self { m, chol: Some(c), lu: None };
        }
        let lu = m.clone().lu();
        Self { m, chol: None, lu: Some(lu) }
    }

    fn solve_once(&self, rhs: &DVector<T>) -> Option<DVector<T>> {
        if let Some(c) = &self.chol {
            return Some(c.solve(rhs));
        }
        self.lu.as_ref()?.solve(rhs)
    }

    /// Solve with a few rounds of iterative refinement against the
    /// unregularised matrix.
    fn solve(&self, rhs: &DVector<T>) -> Option<DVector<T>> {
        let mut u = self.solve_once(rhs)?;
        let mut res = rhs - &self.m * &u;
        for _ in 0..3 {
            let du = self.solve_once(&res)?;
            let cand = &u + du;
            let cres = rhs - &self.m * &cand;
            if cres.amax() >= res.amax() {
                break;
            }
            u = cand;
            res = cres;
        }
        Some(u)
    }
}

struct Direction<T: Real> {
    dx: Blocks<T>,
    dy: DVector<T>,
    dz: Blocks<T>,
    dtau: T,
    dkappa: T,
}

#[derive(Clone)]
struct State<T: Real> {
    x: Blocks<T>,
    y: DVector<T>,
    z: Blocks<T>,
    tau: T,
    kappa: T,
}

pub fn solve<T: Real>(prob: &SdpProblem<T>, opts: &SdpOptions) -> Result<SdpSolution<T>> {
    prob.validate()?;
    let mut rows = Vec::new();
    for (k, c) in prob.constraints().iter().enumerate() {
        if c.is_empty() {
            if c.rhs() != T::zero() {
                // 0 = b with b ≠ 0: the unit ray on this row is a certificate.
                let mut y = vec![T::zero(); prob.num_constraints()];
                y[k] = -T::one() / c.rhs();
                return Ok(infeasible_solution(prob, y, 0, format!("constraint {k} reads 0 = {}", c.rhs())));
            }
        } else {
            rows.push(k);
        }
    }
    let model = Model::new(prob, rows);
    Ok(iterate(&model, opts))
}

fn infeasible_solution<T: Real>(prob: &SdpProblem<T>, y: Vec<T>, iterations: usize, msg: String) -> SdpSolution<T> {
    let x = zero_blocks(prob.blocks());
    let res = residuals(prob, &x, &y).expect("consistent dimensions");
    SdpSolution {
        status: SdpStatus::Infeasible,
        x,
        objective: T::zero(),
        dual_objective: -T::one(),
        y: y.clone(),
        residuals: res,
        farkas: Some(y),
        iterations,
        diagnostics: msg,
    }
}

fn iterate<T: Real>(model: &Model<'_, T>, opts: &SdpOptions) -> SdpSolution<T> {
    let prob = model.prob;
    let blocks = prob.blocks();
    let big_n = T::from_usize(blocks.iter().sum::<usize>() + 1).unwrap();
    let tol_eq = T::lit(opts.tol_eq);
    let tol_dual = T::lit(opts.tol_dual);
    let tol_gap = T::lit(opts.tol_gap);
    let tol_farkas = T::lit(opts.tol_farkas);
    let frac = T::lit(opts.step_fraction);

    let mut st = State {
        x: blocks.iter().map(|&n| DMatrix::identity(n, n)).collect(),
        y: DVector::zeros(model.m()),
        z: blocks.iter().map(|&n| DMatrix::identity(n, n)).collect(),
        tau: T::one(),
        kappa: T::one(),
    };
    let mut small_steps = 0;
    let mut best: Option<(T, State<T>)> = None;
    let mut diag = String::new();

    for iter in 0..=opts.max_iter {
        // Residuals of the homogeneous system.
        let ax = model.a_op(&st.x);
        let aty = model.at_op(&st.y);
        let rp: DVector<T> = &model.b * st.tau - &ax;
        let rd: Blocks<T> = (0..blocks.len()).map(|b| &model.c[b] * st.tau - &aty[b] - &st.z[b]).collect();
        let cx = inner(&model.c, &st.x);
        let by = model.b.dot(&st.y);
        let rg = st.kappa - by + cx;
        let mu = (inner(&st.x, &st.z) + st.tau * st.kappa) / big_n;

        // Convergence on the normalised iterate.
        let pres = vmax_abs(&rp) / st.tau;
        let dres = max_abs(&rd) / st.tau;
        let pobj = cx / st.tau;
        let dobj = by / st.tau;
        let merit = pres.max(dres).max((pobj - dobj).abs() / pobj.abs().max(T::one()));
        if merit.is_finite() && best.as_ref().is_none_or(|(m, _)| merit < *m) {
            best = Some((merit, st.clone()));
        }
        if pres <= tol_eq && dres <= tol_dual && (pobj - dobj).abs() <= tol_gap * pobj.abs().max(T::one()) {
            if let Some(sol) = finish_optimal(model, &st, iter, opts) {
                return sol;
            }
        }

        // Primal infeasibility: bᵀy > 0 with Σ y_i A_i + Z ≈ 0.
        if by > T::zero() {
            let ray_res = aty
                .iter()
                .zip(&st.z)
                .map(|(a, z)| a + z)
                .fold(T::zero(), |acc, m| acc.max(m.iter().fold(T::zero(), |a, v| a.max(v.abs()))))
                / by;
            if ray_res <= tol_farkas * T::lit(10.0) {
                let y_full = expand_y(model, &(&st.y * (-T::one() / by)));
                if let Some(margin) = farkas_margin(prob, &y_full) {
                    if margin >= -tol_farkas {
                        let msg = format!("Farkas ray with margin {:e}", margin.as_f64());
                        return infeasible_solution(prob, y_full, iter, msg);
                    }
                }
            }
        }

        // Dual infeasibility: A(X) ≈ 0 with ⟨C, X⟩ < 0.
        if cx < T::zero() && vmax_abs(&ax) <= tol_eq * (-cx) && st.tau <= tol_eq.sqrt() {
            diag = "dual infeasible: objective unbounded along a primal ray".into();
            return stalled(model, &st, iter, diag);
        }
        if iter == opts.max_iter {
            diag = format!("iteration limit {} reached (μ = {:e})", opts.max_iter, mu.as_f64());
            break;
        }
        if !mu.is_finite() || mu <= T::zero() {
            diag = "complementarity lost finiteness".into();
            break;
        }

        // Newton system.
        let zinv: Option<Blocks<T>> = st.z.iter().map(|z| z.clone().cholesky().map(|c| c.inverse())).collect();
        let Some(zinv) = zinv else {
            diag = "dual slack lost definiteness".into();
            break;
        };
        let factor = SchurFactor::new(model.schur(&st.x, &zinv));
        let xczinv: Blocks<T> = (0..blocks.len()).map(|b| &st.x[b] * &model.c[b] * &zinv[b]).collect();
        let h2 = &model.b + model.a_op(&xczinv);
        let Some(u2) = factor.solve(&h2) else {
            diag = "Schur complement singular".into();
            break;
        };
        let dz2: Blocks<T> = {
            let atu2 = model.at_op(&u2);
            (0..blocks.len()).map(|b| &model.c[b] - &atu2[b]).collect()
        };
        let dx2: Blocks<T> = (0..blocks.len()).map(|b| -symmetrize(&(&st.x[b] * &dz2[b] * &zinv[b]))).collect();
        let denom = -model.b.dot(&u2) + inner(&model.c, &dx2) - st.kappa / st.tau;
        let xrdz: Blocks<T> = (0..blocks.len()).map(|b| &st.x[b] * &rd[b] * &zinv[b]).collect();
        let a_xrdz = model.a_op(&xrdz);

        let direction = |sigma: T, eta: T, corr: Option<&Direction<T>>| -> Option<Direction<T>> {
            let mut rhs_tk = sigma * mu - st.tau * st.kappa;
            let rc: Blocks<T> = (0..blocks.len())
                .map(|b| {
                    let mut r = &zinv[b] * (sigma * mu) - &st.x[b];
                    if let Some(a) = corr {
                        r -= symmetrize(&(&a.dx[b] * &a.dz[b] * &zinv[b]));
                    }
                    r
                })
                .collect();
            if let Some(a) = corr {
                rhs_tk -= a.dtau * a.dkappa;
            }
            let h1 = &rp * eta - model.a_op(&rc) + &a_xrdz * eta;
            let u1 = factor.solve(&h1)?;
            let atu1 = model.at_op(&u1);
            let dz1: Blocks<T> = (0..blocks.len()).map(|b| &rd[b] * eta - &atu1[b]).collect();
            let dx1: Blocks<T> =
                (0..blocks.len()).map(|b| &rc[b] - symmetrize(&(&st.x[b] * &dz1[b] * &zinv[b]))).collect();
            let num = -rg * eta + model.b.dot(&u1) - inner(&model.c, &dx1) - rhs_tk / st.tau;
            let dtau = num / denom;
            let dkappa = (rhs_tk - st.kappa * dtau) / st.tau;
            Some(Direction {
                dx: (0..blocks.len()).map(|b| &dx1[b] + &dx2[b] * dtau).collect(),
                dy: &u1 + &u2 * dtau,
                dz: (0..blocks.len()).map(|b| &dz1[b] + &dz2[b] * dtau).collect(),
                dtau,
                dkappa,
            })
        };

        let step_limit = |d: &Direction<T>| -> Option<T> {
            let mut a = T::max_value().unwrap();
            for b in 0..blocks.len() {
                a = a.min(max_step(&st.x[b], &d.dx[b])?);
                a = a.min(max_step(&st.z[b], &d.dz[b])?);
            }
            if d.dtau < T::zero() {
                a = a.min(-st.tau / d.dtau);
            }
            if d.dkappa < T::zero() {
                a = a.min(-st.kappa / d.dkappa);
            }
            Some(a)
        };

        let Some(aff) = direction(T::zero(), T::one(), None) else {
            diag = "predictor solve failed".into();
            break;
        };
        let Some(a_aff) = step_limit(&aff).map(|a| a.min(T::one())) else {
            diag = "iterate left the cone".into();
            break;
        };
        let mu_aff = {
            let xz: T = (0..blocks.len())
                .map(|b| (&st.x[b] + &aff.dx[b] * a_aff).dot(&(&st.z[b] + &aff.dz[b] * a_aff)))
                .fold(T::zero(), |a, v| a + v);
            (xz + (st.tau + aff.dtau * a_aff) * (st.kappa + aff.dkappa * a_aff)) / big_n
        };
        let ratio = (mu_aff / mu).max(T::zero()).min(T::one());
        let sigma = ratio * ratio * ratio;
        let Some(d) = direction(sigma, T::one() - sigma, Some(&aff)) else {
            diag = "corrector solve failed".into();
            break;
        };
        let Some(amax) = step_limit(&d) else {
            diag = "iterate left the cone".into();
            break;
        };
        let alpha = (amax * frac).min(T::one());
        if alpha < T::lit(1e-10) {
            small_steps += 1;
            if small_steps >= 3 {
                diag = format!("step length collapsed (μ = {:e})", mu.as_f64());
                break;
            }
        } else {
            small_steps = 0;
        }
        for b in 0..blocks.len() {
            st.x[b] += &d.dx[b] * alpha;
            st.z[b] += &d.dz[b] * alpha;
            st.x[b] = symmetrize(&st.x[b]);
            st.z[b] = symmetrize(&st.z[b]);
        }
        st.y += &d.dy * alpha;
        st.tau += d.dtau * alpha;
        st.kappa += d.dkappa * alpha;

        // Keep the homogeneous iterate at a sane scale.
        let scale = st.tau.max(st.kappa).max(max_abs(&st.x)).max(max_abs(&st.z));
        if scale > T::lit(1e8) {
            let s = T::one() / scale;
            for b in 0..blocks.len() {
                st.x[b] *= s;
                st.z[b] *= s;
            }
            st.y *= s;
            st.tau *= s;
            st.kappa *= s;
        }
    }
    let last = best.map_or(st, |(_, b)| b);
    stalled(model, &last, opts.max_iter, diag)
}

fn expand_y<T: Real>(model: &Model<'_, T>, y: &DVector<T>) -> Vec<T> {
    let mut full = vec![T::zero(); model.prob.num_constraints()];
    for (local, &k) in model.rows.iter().enumerate() {
        full[k] = y[local];
    }
    full
}

fn user_y<T: Real>(model: &Model<'_, T>, y: &DVector<T>) -> Vec<T> {
    let y = expand_y(model, y);
    match model.prob.sense() {
        Sense::Minimize => y,
        Sense::Maximize => y.into_iter().map(|v| -v).collect(),
    }
}

fn objectives<T: Real>(prob: &SdpProblem<T>, x: &[DMatrix<T>], y: &[T]) -> (T, T) {
    let pobj = inner(prob.objective(), x);
    let dobj = prob.constraints().iter().zip(y).fold(T::zero(), |a, (c, &v)| a + c.rhs() * v);
    (pobj, dobj)
}

fn finish_optimal<T: Real>(
    model: &Model<'_, T>,
    st: &State<T>,
    iterations: usize,
    opts: &SdpOptions,
) -> Option<SdpSolution<T>> {
    let prob = model.prob;
    let inv = T::one() / st.tau;
    let x: Blocks<T> = st.x.iter().map(|m| m * inv).collect();
    let y = user_y(model, &(&st.y * inv));
    let res = residuals(prob, &x, &y).ok()?;
    let (pobj, dobj) = objectives(prob, &x, &y);
    let ok = res.primal_eq <= T::lit(opts.tol_eq)
        && res.min_eig >= -T::lit(opts.tol_psd)
        && res.gap <= T::lit(opts.tol_gap) * pobj.abs().max(T::one());
    if !ok {
        return None;
    }
    let status = if prob.objective_is_zero() { SdpStatus::Feasible } else { SdpStatus::Optimal };
    Some(SdpSolution {
        status,
        x,
        y,
        objective: pobj,
        dual_objective: dobj,
        residuals: res,
        farkas: None,
        iterations,
        diagnostics: String::new(),
    })
}

fn stalled<T: Real>(model: &Model<'_, T>, st: &State<T>, iterations: usize, diagnostics: String) -> SdpSolution<T> {
    let prob = model.prob;
    let inv = T::one() / st.tau.max(T::lit(f64::MIN_POSITIVE));
    let x: Blocks<T> = st.x.iter().map(|m| m * inv).collect();
    let y = user_y(model, &(&st.y * inv));
    let res = residuals(prob, &x, &y).unwrap_or(Residuals {
        primal_eq: T::max_value().unwrap(),
        min_eig: T::zero(),
        gap: T::max_value().unwrap(),
    });
    let (pobj, dobj) = objectives(prob, &x, &y);
    SdpSolution {
        status: SdpStatus::Stalled,
        x,
        y,
        objective: pobj,
        dual_objective: dobj,
        residuals: res,
        farkas: None,
        iterations,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::super::Constraint;
    use super::*;
    use nalgebra::dmatrix;

    fn eig_min_problem() -> SdpProblem<f64> {
        let mut p = SdpProblem::new(vec![2], Sense::Minimize);
        p.set_objective(0, dmatrix![1.0, 0.0; 0.0, 2.0]).unwrap();
        let mut c = Constraint::new(1.0);
        c.add(0, 0, 0, 1.0).add(0, 1, 1, 1.0);
        p.add_constraint(c);
        p
    }

    #[test]
    fn eigenvalue_minimisation() {
        let p = eig_min_problem();
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-8);
        let expected = dmatrix![1.0, 0.0; 0.0, 0.0];
        assert!((&sol.x[0] - expected).amax() < 1e-8);
        assert!((sol.y[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn maximisation_sense() {
        // max ⟨diag(1,2), X⟩, tr X = 1 → 2
        let mut p = eig_min_problem();
        p.sense = Sense::Maximize;
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - 2.0).abs() < 1e-8);
        assert!((sol.dual_objective - 2.0).abs() < 1e-7);
    }

    #[test]
    fn diagonal_obstruction_is_infeasible() {
        let mut p = SdpProblem::<f64>::new(vec![2], Sense::Minimize);
        let mut c = Constraint::new(-1.0);
        c.add(0, 0, 0, 1.0);
        p.add_constraint(c);
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
        let y = sol.farkas.unwrap();
        // y · E11 ⪰ 0 and b·y = −y < 0
        assert!(y[0] > 0.0);
        assert!((-y[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_row_with_nonzero_rhs() {
        let mut p = SdpProblem::<f64>::new(vec![1], Sense::Minimize);
        p.add_constraint(Constraint::new(2.0));
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
        assert_eq!(sol.farkas.unwrap(), vec![-0.5]);
    }

    #[test]
    fn rank_one_feasibility() {
        let mut p = SdpProblem::<f64>::new(vec![2], Sense::Minimize);
        for (i, j) in [(0, 0), (1, 1)] {
            let mut c = Constraint::new(1.0);
            c.add(0, i, j, 1.0);
            p.add_constraint(c);
        }
        let mut c = Constraint::new(1.0);
        c.add_linear(0, 0, 1, 1.0);
        p.add_constraint(c);
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Feasible);
        assert!((&sol.x[0] - DMatrix::from_element(2, 2, 1.0)).amax() < 1e-8);
    }

    #[test]
    fn f32_problems_solve_at_loosened_tolerance() {
        let mut p = SdpProblem::<f32>::new(vec![2], Sense::Minimize);
        p.set_objective(0, dmatrix![1.0f32, 0.0; 0.0, 2.0]).unwrap();
        let mut c = Constraint::new(1.0f32);
        c.add(0, 0, 0, 1.0).add(0, 1, 1, 1.0);
        p.add_constraint(c);
        let sol = solve(&p, &SdpOptions::for_scalar::<f32>()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-3);
    }
}
