use approx::assert_abs_diff_eq;
use jensen_core::checker::identity_residuals;
use jensen_core::functions::standard_suite;
use jensen_core::zoo::{self, Platonic};
use jensen_core::{
    affine_worst_case, centroid_gap, cone_bound_check, insphere_bound_check, jensen_gap, jensen_verdict, suite_for,
    ConvexFunc, Error, Overall, Point, Polytope, QuadratureRequest, Shape, Verdict,
};
use nalgebra::dvector;

fn req() -> QuadratureRequest {
    QuadratureRequest::default()
}

#[test]
fn triangle_t_violates_with_first_coordinate() {
    let shape = Shape::Polytope(zoo::triangle_t());
    let g = jensen_gap(&shape, &ConvexFunc::coord_proj(1, 1.0).unwrap(), &req()).unwrap();
    assert_eq!(g.verdict, Verdict::Violated);
    assert_abs_diff_eq!(g.gap, 1.0 - 2f64.sqrt() / 2.0 - 1.0 / 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(g.gap, -0.0404401, epsilon = 1e-7);

    let report = jensen_verdict(&shape, &suite_for(&shape, 0), &req()).unwrap();
    assert_eq!(report.overall, Overall::CounterexampleFound);
    assert!(report.violations().any(|e| e.function == ConvexFunc::CoordProj { i: 1, sign: 1.0 }));
    assert_eq!(report.count(Verdict::Inconclusive), 0);
}

#[test]
fn centroid_gap_equals_worst_affine_violation() {
    let shape = Shape::Polytope(zoo::triangle_t());
    let (dir, violation) = affine_worst_case(&shape);
    assert_abs_diff_eq!(centroid_gap(&shape), violation, epsilon = 1e-10);
    assert_abs_diff_eq!(violation, 0.0404401, epsilon = 1e-7);
    let f = ConvexFunc::affine(dir, 0.0);
    let g = jensen_gap(&shape, &f, &req()).unwrap();
    assert_abs_diff_eq!(-g.gap, violation, epsilon = 1e-12);
}

#[test]
fn symmetric_bodies_hold_on_the_suite() {
    let shapes = [
        Shape::Parallelotope(zoo::cube(3).unwrap()),
        Shape::Polytope(zoo::make_platonic(Platonic::Octahedron, 1.0).unwrap()),
        Shape::Polytope(zoo::make_regular_polygon(5, 2.0).unwrap()),
        Shape::Ball(zoo::make_ball(2, dvector![1.0, -1.0], 0.5).unwrap()),
    ];
    for shape in &shapes {
        let report = jensen_verdict(shape, &suite_for(shape, 1), &req()).unwrap();
        assert_eq!(report.overall, Overall::ConsistentWithJensenType, "{}", report.shape);
        assert_eq!(report.count(Verdict::Holds), report.entries.len());
        for e in &report.entries {
            assert!(e.result.gap >= -e.result.gap_error_bound);
        }
    }
}

#[test]
fn verdict_matches_gap_and_bound() {
    let shape = Shape::Polytope(zoo::random_tangent_polytope(2, 5, 3).unwrap());
    let report = jensen_verdict(&shape, &suite_for(&shape, 2), &req()).unwrap();
    for e in &report.entries {
        let r = &e.result;
        assert_eq!(r.verdict == Verdict::Violated, r.gap < -r.gap_error_bound);
        assert_abs_diff_eq!(r.gap, r.boundary_mean.value - r.body_mean.value);
    }
}

#[test]
fn inconclusive_only_when_budget_runs_out() {
    let shape = Shape::Polytope(zoo::triangle_t());
    let tight = QuadratureRequest {
        target_error: 1e-15,
        mc_target_error: 1e-12,
        max_subdivisions: 0,
        max_mc_samples: 500,
        ..Default::default()
    };
    let g = jensen_gap(&shape, &ConvexFunc::pnorm(2.0, dvector![0.3, 0.2]).unwrap(), &tight).unwrap();
    assert_eq!(g.verdict, Verdict::Inconclusive);
    assert!(g.diagnostic.unwrap().contains("budget"));
}

#[test]
fn empty_or_mismatched_suites_are_rejected() {
    let shape = Shape::Polytope(zoo::triangle_t());
    assert!(matches!(jensen_verdict(&shape, &[], &req()), Err(Error::InvalidArgument(_))));
    assert!(jensen_verdict(&shape, &[ConvexFunc::squared_norm(3)], &req()).is_err());
}

#[test]
fn identities_are_reported() {
    let ball = Shape::Ball(zoo::make_ball(7, Point::zeros(7), 2.0).unwrap());
    let res = identity_residuals(&ball, None);
    assert!(res[0].1 < 1e-12);
    let tangent = Shape::Polytope(zoo::random_tangent_polytope(3, 6, 1).unwrap());
    let report = jensen_verdict(&tangent, &[ConvexFunc::squared_norm(3)], &req()).unwrap();
    assert!(report.identity_residuals.iter().any(|(name, r)| name.contains("(r/n)") && *r < 1e-9));
}

#[test]
fn cone_hand_case() {
    let cone = zoo::make_cone(&[dvector![-1.0, 0.0], dvector![1.0, 0.0]], dvector![0.0, 1.0]).unwrap();
    let f = ConvexFunc::quad_form(nalgebra::dmatrix![1.0, 0.0], Point::zeros(2), 0.0).unwrap();
    let b = cone_bound_check(&cone, &f, &req()).unwrap();
    assert_abs_diff_eq!(b.lhs.value, 1.0 / 6.0, epsilon = 1e-9);
    assert_abs_diff_eq!(b.rhs, 2.0 / 9.0, epsilon = 1e-12);
    assert!(b.holds);
}

#[test]
fn cone_bound_is_tight_for_affine_functions() {
    for seed in 0..10 {
        for n in [2, 3] {
            let cone = zoo::random_cone(n, seed).unwrap();
            let shape = Shape::Cone(cone.clone());
            for f in suite_for(&shape, seed) {
                let b = cone_bound_check(&cone, &f, &req()).unwrap();
                assert!(b.holds, "n={n} seed={seed} {f}: {} > {} + {}", b.lhs.value, b.rhs, b.error_bound);
                if f.as_affine(n).is_some() {
                    assert!((b.lhs.value - b.rhs).abs() <= 1e-9);
                }
            }
        }
    }
}

#[test]
fn insphere_bound_on_the_square() {
    let square = Polytope::from_vertices(&[dvector![-1.0, -1.0], dvector![1.0, -1.0], dvector![1.0, 1.0], dvector![-1.0, 1.0]])
        .unwrap();
    let b = insphere_bound_check(&square, &ConvexFunc::squared_norm(2), &req()).unwrap();
    assert_abs_diff_eq!(b.lhs.value, 2.0 / 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(b.boundary_mean.value, 4.0 / 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(b.rhs_theorem, 8.0 / 9.0, epsilon = 1e-12);
    assert_abs_diff_eq!(b.rhs_corollary, 4.0 / 3.0, epsilon = 1e-12);
    assert!(b.holds_theorem && b.holds_corollary);
}

#[test]
fn insphere_bound_is_an_equality_for_affine_functions() {
    let t = zoo::triangle_t();
    for f in [ConvexFunc::coord_proj(1, 1.0).unwrap(), ConvexFunc::affine(dvector![0.3, -2.0], 1.0)] {
        let b = insphere_bound_check(&t, &f, &req()).unwrap();
        assert_abs_diff_eq!(b.lhs.value, b.rhs_theorem, epsilon = 1e-12);
        assert!(b.holds_theorem && b.holds_corollary);
    }
}

#[test]
fn insphere_bound_requires_tangency() {
    let rect = Polytope::from_vertices(&[dvector![0.0, 0.0], dvector![2.0, 0.0], dvector![2.0, 1.0], dvector![0.0, 1.0]])
        .unwrap();
    let err = insphere_bound_check(&rect, &ConvexFunc::squared_norm(2), &req()).unwrap_err();
    assert!(matches!(err, Error::HypothesisViolated(_)));
}

#[test]
fn suite_has_expected_size() {
    for n in 2..=5 {
        assert_eq!(standard_suite(n, &Point::zeros(n), 1.0, 0).len(), 4 * n + 24);
    }
}
