use approx::assert_abs_diff_eq;
use jensen_core::insphere::{chebyshev_center_with_tol, TANGENCY_TOL};
use jensen_core::zoo::{self, Platonic};
use jensen_core::{chebyshev_center, tangency_report, Point, Polytope, Shape};
use nalgebra::dvector;

#[test]
fn regular_tetrahedron_inradius() {
    let tet = zoo::make_platonic(Platonic::Tetrahedron, 1.0).unwrap();
    let edge = 2.0 * 2f64.sqrt();
    let r = chebyshev_center(&tet).unwrap();
    assert_abs_diff_eq!(r.radius, edge / (2.0 * 6f64.sqrt()), epsilon = 1e-12);
    assert!(r.center.norm() < 1e-12 && r.tangent_to_all && r.unique);
}

#[test]
fn icosahedron_radius_ratio() {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let ico = zoo::make_platonic(Platonic::Icosahedron, 2.5).unwrap();
    let r = chebyshev_center(&ico).unwrap();
    let circumradius = ico.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert_abs_diff_eq!(r.radius / circumradius, phi * phi / (3f64.sqrt() * (1.0 + phi * phi).sqrt()), epsilon = 1e-12);
}

#[test]
fn rectangle_reports_its_gap() {
    let rect = Polytope::from_vertices(&[dvector![0.0, 0.0], dvector![2.0, 0.0], dvector![2.0, 1.0], dvector![0.0, 1.0]])
        .unwrap();
    let (tangent, gap) = tangency_report(&rect, TANGENCY_TOL).unwrap();
    assert!(!tangent);
    assert_abs_diff_eq!(gap, 0.5, epsilon = 1e-12);
    // A looser tolerance does not change a gap of 0.5.
    assert!(!chebyshev_center_with_tol(&rect, 1e-3).unwrap().tangent_to_all);
}

#[test]
fn multipliers_balance_the_normals() {
    for solid in Platonic::ALL {
        let p = zoo::make_platonic(solid, 1.3).unwrap();
        let r = chebyshev_center(&p).unwrap();
        let sum: f64 = r.multipliers.iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-9);
        let balance = p.halfspaces().iter().zip(&r.multipliers).fold(Point::zeros(3), |acc, (h, w)| acc + h.normal() * *w);
        assert!(balance.amax() < 1e-9);
        assert!(r.facet_gaps.iter().all(|g| *g > -1e-9));
    }
}

#[test]
fn tangent_polytopes_have_the_unit_insphere() {
    for n in [2, 3] {
        for seed in 0..25 {
            let k = n + 1 + seed as usize % 4;
            let p = zoo::random_tangent_polytope(n, k, seed).unwrap();
            assert_eq!(p.facets().len(), k);
            let r = chebyshev_center(&p).unwrap();
            assert!(r.tangent_to_all, "n={n} seed={seed}");
            assert_abs_diff_eq!(r.radius, 1.0, epsilon = 1e-9);
            assert!(r.center.norm() < 1e-7);
            assert!(p.vertices().iter().all(|v| v.norm() <= 10.0));
        }
    }
}

#[test]
fn regular_solids_have_coincident_centers() {
    let mut shapes: Vec<Polytope> = Platonic::ALL.iter().map(|s| zoo::make_platonic(*s, 1.0).unwrap()).collect();
    shapes.extend((3..=12).map(|k| zoo::make_regular_polygon(k, 1.0).unwrap()));
    for p in shapes {
        let r = chebyshev_center(&p).unwrap();
        assert!(r.tangent_to_all);
        assert!((&r.center - p.boundary_centroid()).norm() < 1e-8);
        assert!(jensen_core::centroid_gap(&Shape::Polytope(p)) < 1e-8);
    }
}

#[test]
fn triangle_t_incircle() {
    let t = zoo::triangle_t();
    let r = chebyshev_center(&t).unwrap();
    // Inradius = area / semiperimeter.
    assert_abs_diff_eq!(r.radius, 1.0 / (1.0 + 2f64.sqrt()), epsilon = 1e-12);
    assert!(r.tangent_to_all && r.unique);
}
