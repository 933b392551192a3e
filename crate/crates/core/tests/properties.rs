use matsos::io::{read_certificate, read_problem, write_certificate, write_problem, Problem};
use matsos::sdp::{residuals, Constraint, Sense};
use matsos::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn sym(n: usize, v: &[f64]) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |i, j| v[(i * n + j) % v.len()]);
    (&a + a.transpose()) * 0.5
}

/// A random polynomial on `monomial_basis(alg, deg)` with `rows × cols`
/// coefficients drawn from `vals`.
fn poly_from(alg: AlgebraSpec, deg: u32, rows: usize, cols: usize, vals: &[f64]) -> MatrixPolyF64 {
    let basis = monomial_basis(&alg, deg, false).unwrap();
    let mut k = 0;
    let terms: Vec<_> = basis
        .into_iter()
        .map(|m| {
            let c = DMatrix::from_fn(rows, cols, |_, _| {
                k += 1;
                vals[k % vals.len()]
            });
            (m, c)
        })
        .collect();
    MatrixPoly::from_terms(alg, rows, cols, terms).unwrap()
}

fn hermitian_from(alg: AlgebraSpec, deg: u32, n: usize, vals: &[f64]) -> MatrixPolyF64 {
    let p = poly_from(alg, deg, n, n, vals);
    p.add(&p.adjoint()).unwrap().scale(0.5)
}

fn free_poly_alg(torus_vars: usize) -> AlgebraSpec {
    AlgebraSpec::free(torus_vars).unwrap()
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 7..40)
}

fn algebra() -> impl Strategy<Value = AlgebraSpec> {
    prop_oneof![
        (1usize..=2).prop_map(|d| AlgebraSpec::free(d).unwrap()),
        (1usize..=2).prop_map(|n| AlgebraSpec::torus(n).unwrap()),
    ]
}

fn point(alg: &AlgebraSpec, raw: &[f64]) -> Point<f64> {
    let coords: Vec<f64> = (0..alg.num_vars()).map(|i| raw[i % raw.len()]).collect();
    if alg.is_torus() {
        Point::torus(&coords)
    } else {
        Point::free(coords)
    }
}

fn rel_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    (a - b).amax() <= tol * (1.0 + a.amax().max(b.amax()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative_and_distributive(
        alg in algebra(), n in 1usize..=2, va in values(), vb in values(), vc in values()
    ) {
        let a = poly_from(alg, 2, n, n, &va);
        let b = poly_from(alg, 1, n, n, &vb);
        let c = poly_from(alg, 2, n, n, &vc);
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(left.max_coeff_diff(&right).unwrap() <= 1e-12 * (1.0 + left.max_abs_coeff()));
        let dist = a.mul(&b.add(&c).unwrap()).unwrap();
        let split = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(dist.max_coeff_diff(&split).unwrap() <= 1e-12 * (1.0 + dist.max_abs_coeff()));
    }

    #[test]
    fn adjoint_is_an_involutive_anti_automorphism(alg in algebra(), va in values(), vb in values()) {
        let a = poly_from(alg, 2, 2, 2, &va);
        let b = poly_from(alg, 2, 2, 2, &vb);
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        let ab = a.mul(&b).unwrap().adjoint();
        let ba = b.adjoint().mul(&a.adjoint()).unwrap();
        prop_assert!(ab.max_coeff_diff(&ba).unwrap() <= 1e-12 * (1.0 + ab.max_abs_coeff()));
        prop_assert!(a.add(&a.adjoint()).unwrap().is_hermitian());
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(
        alg in algebra(), va in values(), vb in values(), raw in prop::collection::vec(-1.5f64..1.5, 2)
    ) {
        let a = poly_from(alg, 2, 2, 2, &va);
        let b = poly_from(alg, 2, 2, 2, &vb);
        let pt = point(&alg, &raw);
        let ea = a.eval(&pt).unwrap();
        let eb = b.eval(&pt).unwrap();
        prop_assert!(rel_close(&a.mul(&b).unwrap().eval(&pt).unwrap(), &(&ea * &eb), 1e-10));
        prop_assert!(rel_close(&a.add(&b).unwrap().eval(&pt).unwrap(), &(&ea + &eb), 1e-10));
    }

    #[test]
    fn torus_reduction_is_idempotent_and_preserves_values(
        n in 1usize..=2, exps in prop::collection::vec(0u32..5, 1..6), vals in values(), angles in prop::collection::vec(0.0f64..6.3, 2)
    ) {
        let alg = AlgebraSpec::torus(n).unwrap();
        let g = alg.num_generators();
        let terms: Vec<(Monomial, f64)> = exps
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let mut ex = vec![0u32; g];
                ex[i % g] = e;
                ex[(i + 1) % g] += (i as u32) % 3;
                (Monomial::new(ex), vals[i % vals.len()])
            })
            .collect();
        // Built on the free algebra with 2n generators, then read on the torus.
        let raw = MatrixPoly::scalar(free_poly_alg(g), terms.clone()).unwrap();
        let reduced = MatrixPoly::scalar(alg, terms).unwrap();
        prop_assert_eq!(reduced.torus_reduce().unwrap(), reduced.clone());
        for t in reduced.terms() {
            prop_assert!(t.0.is_torus_normal());
        }
        let pt = Point::torus(&angles[..n]);
        let direct = raw.eval(&Point::free(pt.coords().to_vec())).unwrap();
        prop_assert!(rel_close(&reduced.eval(&pt).unwrap(), &direct, 1e-10));
    }

    #[test]
    fn monomial_basis_is_strictly_increasing(alg in algebra(), t in 0u32..4, homogeneous in any::<bool>()) {
        let homogeneous = homogeneous && !alg.is_torus();
        let basis = monomial_basis(&alg, t, homogeneous).unwrap();
        prop_assert!(basis.windows(2).all(|w| w[0] < w[1]));
        let in_range = |m: &Monomial| if homogeneous { m.degree() == t } else { m.degree() <= t };
        prop_assert!(basis.iter().all(in_range));
    }

    #[test]
    fn gram_round_trip_matches_symbolic_expansion(
        alg in algebra(), nu in 1usize..=2, nuk in 1usize..=2, t in 0u32..=2, vq in values(), vw in values(), count in 1usize..=3
    ) {
        let basis = monomial_basis(&alg, t, false).unwrap();
        let weight = hermitian_from(alg, 2, nuk, &vw);
        let qs: Vec<_> = (0..count)
            .map(|j| {
                let shifted: Vec<f64> = vq.iter().map(|v| v * (j as f64 + 1.0)).skip(j).collect();
                let shifted = if shifted.is_empty() { vq.clone() } else { shifted };
                poly_from(alg, t, nuk, nu, &shifted)
            })
            .collect();
        let block = gram_synthesize(1, &qs, &basis).unwrap();
        let expanded = gram_expand(&block, &weight).unwrap();
        let mut direct = MatrixPoly::zero(alg, nu);
        for q in &qs {
            direct = direct.add(&q.adjoint().mul(&weight).unwrap().mul(q).unwrap()).unwrap();
        }
        prop_assert!(expanded.max_coeff_diff(&direct).unwrap() <= 1e-10);
        prop_assert!(psd_check(&block.gram, 1e-12).unwrap() >= -1e-9);
    }

    #[test]
    fn gram_expand_is_linear(
        alg in algebra(), va in values(), vb in values(), vw in values(), alpha in -2.0f64..2.0, beta in -2.0f64..2.0
    ) {
        let basis = monomial_basis(&alg, 1, false).unwrap();
        let weight = hermitian_from(alg, 2, 1, &vw);
        let n = basis.len() * 2;
        let block = |g: DMatrix<f64>| GramBlock { k: 1, basis: basis.clone(), weight_size: 1, ambient_size: 2, gram: g };
        let (ga, gb) = (sym(n, &va), sym(n, &vb));
        let combined = gram_expand(&block(&ga * alpha + &gb * beta), &weight).unwrap();
        let separate = gram_expand(&block(ga), &weight)
            .unwrap()
            .scale(alpha)
            .add(&gram_expand(&block(gb), &weight).unwrap().scale(beta))
            .unwrap();
        prop_assert!(combined.max_coeff_diff(&separate).unwrap() <= 1e-12 * (1.0 + combined.max_abs_coeff()));
    }

    #[test]
    fn functional_pairs_gram_with_localizing_matrix(
        vg in values(), vw in values(), vl in values(), d in 1usize..=2
    ) {
        let alg = AlgebraSpec::free(d).unwrap();
        let t = 2;
        let weight = hermitian_from(alg, 2, 1, &vw);
        let basis = monomial_basis(&alg, 1, false).unwrap();
        let n = basis.len() * 2;
        let block = GramBlock { k: 1, basis, weight_size: 1, ambient_size: 2, gram: sym(n, &vg) };
        let mut l = MomentFunctional::new(alg, 2, t);
        for (i, m) in monomial_basis(&alg, 2 * t, false).unwrap().into_iter().enumerate() {
            l.insert(m, sym(2, &vl[i % vl.len()..])).unwrap();
        }
        let lhs = l.apply(&gram_expand(&block, &weight).unwrap()).unwrap();
        let loc = localizing_matrix(&l, &weight).unwrap();
        let rhs = loc.view((0, 0), (n, n)).component_mul(&block.gram).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn point_evaluations_in_the_feasible_set_are_positive(
        raw in prop::collection::vec(-1.0f64..1.0, 2), v in prop::collection::vec(-1.0f64..1.0, 2), t in 1u32..=2
    ) {
        let alg = AlgebraSpec::free(2).unwrap();
        let ball = MatrixPoly::identity(alg, 1).sub(&MatrixPoly::norm_squared(alg)).unwrap();
        let s = ConstraintSystem::new(alg, 2).with(ball).unwrap();
        let pt = Point::free(raw.clone());
        prop_assume!(s.contains_point(&pt, 0.0).unwrap());
        let v = DVector::from_vec(v);
        prop_assume!(v.norm() > 1e-3);
        let l = evaluation_functional(alg, &pt, &v.normalize(), t).unwrap();
        prop_assert!(psd_check(&moment_matrix(&l).unwrap(), 1e-9).unwrap() >= -1e-10);
        for g in s.user_generators() {
            prop_assert!(psd_check(&localizing_matrix(&l, g).unwrap(), 1e-9).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn verifier_rejects_tampered_certificates(entry in 0usize..64, sign in any::<bool>(), mag in 1e-4f64..1.0) {
        let alg = AlgebraSpec::free(1).unwrap();
        let p = MatrixPoly::scalar(alg, [(Monomial::new(vec![0]), 3.0), (Monomial::new(vec![1]), 1.0)]).unwrap();
        let g = MatrixPoly::scalar(alg, [(Monomial::new(vec![0]), 1.0), (Monomial::new(vec![2]), -1.0)]).unwrap();
        let s = ConstraintSystem::new(alg, 1).with(g).unwrap();
        let cert = putinar_certify(&p, &s, 1..=1, Margin::Strict, &CertifyOptions::default()).unwrap();
        let cert = cert.certificate().unwrap().clone();
        prop_assert!(verify_certificate(&p, &s, &cert, 1e-6).accepted);
        let total: usize = cert.blocks.iter().map(|b| b.gram.len()).sum();
        let mut idx = entry % total;
        let mut bad = cert.clone();
        for b in &mut bad.blocks {
            if idx < b.gram.len() {
                let (i, j) = (idx / b.gram.ncols(), idx % b.gram.ncols());
                let delta = if sign { mag } else { -mag } + if sign { 1e-5 } else { -1e-5 };
                b.gram[(i, j)] += delta;
                if i != j {
                    b.gram[(j, i)] += delta;
                }
                break;
            }
            idx -= b.gram.len();
        }
        prop_assert!(!verify_certificate(&p, &s, &bad, 1e-6).accepted);
    }

    #[test]
    fn certificate_files_round_trip_byte_stable(shift in 1.5f64..4.0, slope in -1.0f64..1.0) {
        let alg = AlgebraSpec::free(1).unwrap();
        let p = MatrixPoly::scalar(alg, [(Monomial::new(vec![0]), shift), (Monomial::new(vec![1]), slope)]).unwrap();
        let s = ConstraintSystem::new(alg, 1)
            .with(MatrixPoly::scalar(alg, [(Monomial::new(vec![0]), 1.0), (Monomial::new(vec![2]), -1.0)]).unwrap())
            .unwrap();
        let cert = putinar_certify(&p, &s, 1..=1, Margin::Strict, &CertifyOptions::default()).unwrap();
        let cert = cert.certificate().unwrap().clone();
        let text = write_certificate(&cert);
        let back: CertificateF64 = read_certificate(&text).unwrap();
        prop_assert_eq!(&back, &cert);
        prop_assert_eq!(write_certificate(&back), text);
        let problem = Problem { p, system: s };
        let ptext = write_problem(&problem);
        prop_assert_eq!(write_problem(&read_problem::<f64>(&ptext).unwrap()), ptext);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn strict_success_implies_nnsd_success(shift in 0.2f64..3.0, slope in -1.0f64..1.0, quad in -1.0f64..1.0) {
        let alg = AlgebraSpec::free(1).unwrap();
        let p = MatrixPoly::scalar(
            alg,
            [(Monomial::new(vec![0]), shift), (Monomial::new(vec![1]), slope), (Monomial::new(vec![2]), quad)],
        )
        .unwrap();
        let s = ConstraintSystem::new(alg, 1)
            .with(MatrixPoly::scalar(alg, [(Monomial::new(vec![0]), 1.0), (Monomial::new(vec![2]), -1.0)]).unwrap())
            .unwrap();
        let opts = CertifyOptions::default();
        let strict = putinar_certify(&p, &s, 1..=2, Margin::Strict, &opts).unwrap();
        if let Some(c) = strict.certificate() {
            prop_assume!(c.epsilon().unwrap() > 1e-3);
            let nnsd = nnsd_certify(&p, &s, 1..=2, &opts).unwrap();
            let nc = nnsd.certificate();
            prop_assert!(nc.is_some());
            prop_assert!(verify_certificate(&p, &s, nc.unwrap(), 1e-6).accepted);
        }
    }

    #[test]
    fn feasible_levels_stay_feasible(shift in 0.2f64..3.0, slope in -1.0f64..1.0) {
        let alg = AlgebraSpec::free(1).unwrap();
        let p = MatrixPoly::scalar(alg, [(Monomial::new(vec![0]), shift), (Monomial::new(vec![1]), slope)]).unwrap();
        let s = ConstraintSystem::new(alg, 1)
            .with(MatrixPoly::scalar(alg, [(Monomial::new(vec![0]), 1.0), (Monomial::new(vec![2]), -1.0)]).unwrap())
            .unwrap();
        let opts = CertifyOptions::default();
        if putinar_certify(&p, &s, 1..=1, Margin::Closure, &opts).unwrap().certificate().is_some() {
            prop_assert!(putinar_certify(&p, &s, 2..=2, Margin::Closure, &opts).unwrap().certificate().is_some());
        }
    }

    #[test]
    fn reznick_success_persists_when_theta_grows(a in 0.1f64..2.0, b in 0.1f64..2.0, c in -0.5f64..0.5) {
        let alg = AlgebraSpec::free(2).unwrap();
        let p = MatrixPoly::scalar(
            alg,
            [(Monomial::new(vec![2, 0]), a), (Monomial::new(vec![0, 2]), b), (Monomial::new(vec![1, 1]), c)],
        )
        .unwrap();
        let s = ConstraintSystem::new(alg, 1);
        let opts = CertifyOptions::default();
        if let ReznickOutcome::Found { theta: 0, certificate } = reznick_certify(&p, &s, 0, &opts).unwrap() {
            // Multiply every Gram term by x_i², i.e. substitute q ↦ x_i q.
            let n2 = MatrixPoly::<f64>::norm_squared(alg);
            let lifted = n2.mul(&p).unwrap();
            let mut sum = MatrixPoly::zero(alg, 1);
            for blk in &certificate.blocks {
                for i in 0..2 {
                    let basis: Vec<Monomial> = blk.basis.iter().map(|m| m.mul(&Monomial::var(2, i))).collect();
                    let shifted = GramBlock { basis, ..blk.clone() };
                    let w = MatrixPoly::identity(alg, 1);
                    sum = sum.add(&gram_expand(&shifted, &w).unwrap()).unwrap();
                }
            }
            prop_assert!(sum.max_coeff_diff(&lifted).unwrap() <= 1e-6);
            match reznick_certify(&p, &s, 1, &opts).unwrap() {
                ReznickOutcome::Found { .. } => {}
                ReznickOutcome::Exhausted(_) => prop_assert!(false, "theta=1 lost a theta=0 certificate"),
            }
        }
    }

    #[test]
    fn solver_is_deterministic(vals in prop::collection::vec(-1.0f64..1.0, 9)) {
        let mut prob = SdpProblem::<f64>::new(vec![3], Sense::Minimize);
        prob.set_objective(0, sym(3, &vals)).unwrap();
        let mut tr = Constraint::new(1.0);
        for i in 0..3 {
            tr.add(0, i, i, 1.0);
        }
        prob.add_constraint(tr);
        let opts = SdpOptions::default();
        let a = solve(&prob, &opts).unwrap();
        let b = solve(&prob, &opts).unwrap();
        prop_assert_eq!(a.iterations, b.iterations);
        prop_assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        prop_assert_eq!(a.status, SdpStatus::Optimal);
        let r = residuals(&prob, &a.x, &a.y).unwrap();
        prop_assert!(r.primal_eq <= 1e-8);
        let lam = psd_check(&sym(3, &vals), 1e-12).unwrap();
        prop_assert!((a.objective - lam).abs() <= 1e-7);
    }

    #[test]
    fn residuals_grow_with_perturbation(delta in 1e-3f64..1.0) {
        let mut prob = SdpProblem::<f64>::new(vec![2], Sense::Minimize);
        for (i, j) in [(0, 0), (1, 1), (0, 1)] {
            let mut c = Constraint::new(1.0);
            c.add(0, i, j, if i == j { 1.0 } else { 0.5 });
            prob.add_constraint(c);
        }
        let sol = solve(&prob, &SdpOptions::default()).unwrap();
        let base = residuals(&prob, &sol.x, &sol.y).unwrap().primal_eq;
        let mut x = sol.x.clone();
        x[0][(0, 0)] += delta;
        let bumped = residuals(&prob, &x, &sol.y).unwrap().primal_eq;
        prop_assert!(bumped >= base);
        prop_assert!((bumped - delta).abs() <= 1e-7);
    }
}
