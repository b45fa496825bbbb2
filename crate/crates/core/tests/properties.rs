use std::f64::consts::PI;

use gpme::analysis::{diagnose, Tolerances, Verdict};
use gpme::elliptic::{
    assemble_operator, build_grid, solve_linear, CoefficientField, DomainSpec, EllipticProblem,
    GridFunction, SparseOperator,
};
use gpme::pipeline::{converge, Scheme};
use gpme::series::{
    q_derivative, q_full, q_partial, q_partial_inverse, CoefficientSequence, TailRule,
};
use gpme::spectral::{principal_eigenpair, rayleigh_quotient};
use proptest::prelude::*;

fn fast() -> Tolerances {
    Tolerances {
        coarse_check: false,
        m_max: 4096,
        ..Tolerances::default()
    }
}

fn ramp_operator(dim: usize, n: usize) -> SparseOperator {
    let spec = if dim == 1 {
        DomainSpec::unit_interval(n)
    } else {
        DomainSpec::unit_square(n)
    };
    let g = build_grid(&spec).unwrap();
    let field =
        CoefficientField::from_fn(&g, 0.5, 3.0, |axis, x| 1.0 + x[axis] + 0.5 * x[0] * x[0])
            .unwrap();
    assemble_operator(&g, &field).unwrap()
}

fn builtin() -> impl Strategy<Value = CoefficientSequence> {
    prop_oneof![
        Just(CoefficientSequence::harmonic()),
        Just(CoefficientSequence::log_kind()),
        (0.2f64..3.0).prop_map(|r| CoefficientSequence::geometric(r).unwrap()),
        (-3.0f64..0.5).prop_map(|p| CoefficientSequence::power_law(p).unwrap()),
        (prop::collection::vec(0.05f64..2.0, 2..6), 0.2f64..1.5).prop_map(|(mut v, r)| {
            let last = *v.last().unwrap();
            v.push(last * r);
            CoefficientSequence::custom(v, TailRule::RepeatLastRatio).unwrap()
        }),
    ]
}

proptest! {
    #[test]
    fn partial_sums_increase_in_s_and_n(seq in builtin(), n in 1usize..40, s1 in 0.0f64..2.0, ds in 1e-3f64..1.0) {
        let s2 = s1 + ds;
        prop_assert!(q_partial(&seq, n, s1) < q_partial(&seq, n, s2));
        prop_assert!(q_partial(&seq, n + 1, s1) >= q_partial(&seq, n, s1));
    }

    #[test]
    fn inverse_round_trip_and_nesting(seq in builtin(), n in 1usize..40, s in 0.0f64..3.0) {
        let tol = 1e-10;
        let y = q_partial(&seq, n, s);
        prop_assume!(y.is_finite());
        let back = q_partial_inverse(&seq, n, y, tol).unwrap();
        prop_assert!((back - s).abs() <= tol, "{} vs {}", back, s);
        let next = q_partial_inverse(&seq, n + 1, y, tol).unwrap();
        prop_assert!(next <= back + 2.0 * tol);
    }

    #[test]
    fn maximum_principle_and_linearity(seed in prop::collection::vec(0.0f64..5.0, 31), c in 0.1f64..10.0) {
        let op = ramp_operator(1, 32);
        let mut vals = vec![0.0];
        vals.extend(seed);
        vals.push(0.0);
        let f = GridFunction::new(op.grid().clone(), vals).unwrap();
        let v = solve_linear(&op, &f, 1e-12).unwrap();
        prop_assert!(v.is_nonnegative());
        let w = solve_linear(&op, &f.scaled(c), 1e-12).unwrap();
        prop_assert!(w.max_abs_diff(&v.scaled(c)) <= 2e-10 * c * v.sup_norm().max(1e-300) + 1e-14);
    }

    #[test]
    fn rayleigh_quotient_is_minimal(w in prop::collection::vec(0.01f64..1.0, 15 * 15)) {
        let op = ramp_operator(2, 16);
        let f = GridFunction::from_fn(op.grid(), |x| 1.0 + x[1]);
        let e = principal_eigenpair(&op, &f, 1e-10).unwrap();
        let trial = GridFunction::from_interior(op.grid(), &w);
        prop_assert!(rayleigh_quotient(&op, &f, &trial).unwrap() >= e.lambda1 * (1.0 - 1e-9));
    }
}

#[test]
fn assembled_matrices_are_symmetric() {
    for n in [4, 8, 16, 32] {
        assert!(ramp_operator(2, n).matrix().is_symmetric());
        assert!(ramp_operator(1, n).matrix().is_symmetric());
        assert!(ramp_operator(2, n).has_m_matrix_pattern());
    }
}

#[test]
fn energy_identity() {
    let op = ramp_operator(2, 20);
    let v = GridFunction::from_fn_dirichlet(op.grid(), |x| {
        (3.0 * x[0]).sin() * x[1] * (1.0 - x[1]) + x[0] * x[0]
    });
    let q = op.quadratic_form(&v.interior_values()) * op.grid().cell_volume();
    let e = op.energy(&v, &v);
    assert!((q - e).abs() <= 1e-12 * e);
}

#[test]
fn second_order_convergence() {
    let mut errs = Vec::new();
    for n in [16, 32, 64, 128] {
        let g = build_grid(&DomainSpec::unit_interval(n)).unwrap();
        let op = assemble_operator(&g, &CoefficientField::constant(&g, 1.0).unwrap()).unwrap();
        let f = GridFunction::from_fn(&g, |x| PI * PI * (PI * x[0]).sin());
        let v = solve_linear(&op, &f, 1e-11).unwrap();
        errs.push(v.max_abs_diff(&GridFunction::from_fn_dirichlet(&g, |x| (PI * x[0]).sin())));
    }
    for w in errs.windows(2) {
        assert!(w[0] / w[1] >= 3.8, "{errs:?}");
    }
}

#[test]
fn grid_norms() {
    let g = build_grid(&DomainSpec::unit_interval(256)).unwrap();
    let u = GridFunction::from_fn(&g, |x| x[0] * (1.0 - x[0]));
    assert_eq!(u.sup_norm(), 0.25);
    assert!((u.h1_seminorm() - (1.0f64 / 3.0).sqrt()).abs() < 1e-3);
    assert_eq!(GridFunction::zeros(&g).measure_above(0.1), 0.0);
}

#[test]
fn duality_bound_with_variable_data() {
    let op = ramp_operator(2, 24);
    let f = GridFunction::from_fn(op.grid(), |x| {
        (-((x[0] - 0.3).powi(2) + (x[1] - 0.7).powi(2)) / 0.02).exp()
    });
    let e = principal_eigenpair(&op, &f, 1e-10).unwrap();
    let v = solve_linear(&op, &f, 1e-12).unwrap();
    assert!(e.lambda1 * v.sup_norm() >= 1.0 - 1e-8);
}

#[test]
fn closed_forms_and_central_differences() {
    let h = CoefficientSequence::harmonic();
    let l = CoefficientSequence::log_kind();
    for k in 0..=90 {
        let s = k as f64 / 100.0;
        assert!((q_full(&h, s, 1e-14).unwrap() + (1.0 - s).ln()).abs() < 1e-8);
        assert!((q_derivative(&h, s, 1e-14, None).unwrap() - 1.0 / (1.0 - s)).abs() < 1e-8);
        assert!((q_derivative(&l, s, 1e-14, None).unwrap() - (1.0 - (1.0 - s).ln())).abs() < 1e-8);
    }
    for step in [1e-3, 1e-4] {
        let fd = (q_full(&l, 0.5 + step, 1e-15).unwrap() - q_full(&l, 0.5 - step, 1e-15).unwrap())
            / (2.0 * step);
        let exact = q_derivative(&l, 0.5, 1e-15, None).unwrap();
        assert!(
            (fd - exact).abs() < 10.0 * step * step,
            "{step}: {}",
            fd - exact
        );
    }
    assert!(q_full(&l, 0.999, 1e-12).unwrap() < 2.0);
    assert!(q_full(&h, 1.0, 1e-12).is_err());
}

#[test]
fn verdicts_are_monotone_in_lambda() {
    let p = EllipticProblem::unit_constant(1, 64, 1.0, 1.0).unwrap();
    let r = diagnose(&CoefficientSequence::log_kind(), &p, &fast()).unwrap();
    let order = |v: Verdict| match v {
        Verdict::ExistsCertified => 0,
        Verdict::Indeterminate => 1,
        Verdict::NonexistenceProven => 2,
        other => panic!("{other:?}"),
    };
    let verdicts: Vec<usize> = (1..400)
        .map(|k| order(r.classify(0.1 * k as f64)))
        .collect();
    assert!(verdicts.windows(2).all(|w| w[0] <= w[1]));
    assert!(r.lambda_exist <= r.lambda_nonexist);
    assert_eq!(r.classify(1e-9), Verdict::ExistsCertified);
}

#[test]
fn bracket_ordering_for_varied_problems() {
    let g = build_grid(&DomainSpec::rectangle((0.0, 2.0), (0.0, 1.0), 24, 12)).unwrap();
    let field = CoefficientField::from_fn(&g, 1.0, 4.0, |axis, x| {
        if axis == 0 {
            1.0 + x[0]
        } else {
            4.0 - x[1]
        }
    })
    .unwrap();
    for (cx, cy) in [(0.5, 0.5), (1.5, 0.2), (1.0, 0.8)] {
        let f = GridFunction::from_fn(&g, |x| {
            (-((x[0] - cx).powi(2) + (x[1] - cy).powi(2)) / 0.1).exp()
        });
        let p = EllipticProblem::new(g.clone(), field.clone(), f, 1.0).unwrap();
        let r = diagnose(&CoefficientSequence::power_law(-2.0).unwrap(), &p, &fast()).unwrap();
        assert!(
            r.lambda_exist <= r.lambda_nonexist,
            "{} {}",
            r.lambda_exist,
            r.lambda_nonexist
        );
    }
}

#[test]
fn sup_commutes_with_inverse() {
    let p = EllipticProblem::unit_constant(2, 16, 10.0, 1.0).unwrap();
    let seq = CoefficientSequence::log_kind();
    let scheme = Scheme::new(&seq, &p, &fast()).unwrap();
    for n in [1, 3, 9, 27] {
        let u = scheme.u(n).unwrap();
        let direct = q_partial_inverse(&seq, n, scheme.v().sup_norm(), 1e-12).unwrap();
        assert!((u.sup_norm() - direct).abs() < 1e-10);
        assert!(u.is_nonnegative() && u.boundary_is_zero());
    }
}

#[test]
fn zero_datum_gives_zero_iterates() {
    let p = EllipticProblem::unit_constant(1, 16, 0.0, 1.0).unwrap();
    let run = converge(
        &CoefficientSequence::log_kind(),
        &p,
        &[1, 2, 4],
        1e-12,
        &fast(),
    )
    .unwrap();
    assert_eq!(run.converged_n, 2);
    assert_eq!(run.converged_u.sup_norm(), 0.0);
}

#[test]
fn certified_regime_stays_below_sigma() {
    let p = EllipticProblem::unit_constant(1, 64, 1.0, 10.0).unwrap();
    let seq = CoefficientSequence::log_kind();
    let run = converge(
        &seq,
        &p,
        &[1, 2, 4, 8, 16, 32, 64, 128, 256, 512],
        1e-10,
        &fast(),
    )
    .unwrap();
    assert!(run.converged_u.sup_norm() < 1.0);
    let tests = gpme::pipeline::default_test_set(&p);
    let r = gpme::pipeline::weak_residual_full(&seq, &p, &run.converged_u, 1e-12, &tests).unwrap();
    assert!(r <= 1e-6, "{r}");
}
