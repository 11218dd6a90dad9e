use approx::assert_relative_eq;
use jensen_core::zoo::{self, Platonic};
use jensen_core::{Ball, Cone, Error, HalfSpace, Parallelotope, Point, Polytope, Shape};
use nalgebra::{dvector, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

fn random_points(n: usize, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Point::from_fn(n, |_, _| rng.random_range(-1.0..1.0))).collect()
}

/// Hit-or-miss estimate of volume and centroid inside the bounding box.
fn hit_or_miss(shape: &Shape, samples: usize, seed: u64) -> (f64, f64, Point) {
    let (lo, hi) = shape.bounding_box();
    let n = shape.dim();
    let box_vol: f64 = (0..n).map(|i| hi[i] - lo[i]).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    let mut sum = Point::zeros(n);
    for _ in 0..samples {
        let x = Point::from_fn(n, |i, _| rng.random_range(lo[i]..hi[i]));
        if shape.contains(&x, 0.0) {
            hits += 1;
            sum += &x;
        }
    }
    let p = hits as f64 / samples as f64;
    let se = box_vol * (p * (1.0 - p) / samples as f64).sqrt();
    (box_vol * p, se, sum / hits as f64)
}

#[test]
fn random_hull_volume_matches_hit_or_miss() {
    for (n, seed) in [(2, 1), (3, 2), (4, 3)] {
        let poly = Polytope::from_vertices(&random_points(n, 12, seed)).unwrap();
        let shape = Shape::Polytope(poly.clone());
        let (vol, se, _) = hit_or_miss(&shape, 400_000, seed + 100);
        assert!((poly.volume() - vol).abs() < 4.0 * se, "n={n}: {} vs {vol} +/- {se}", poly.volume());
    }
}

#[test]
fn tetrahedron_centroid_matches_sampling() {
    let poly = Polytope::from_vertices(&random_points(3, 4, 9)).unwrap();
    let shape = Shape::Polytope(poly.clone());
    let (_, _, c) = hit_or_miss(&shape, 600_000, 10);
    assert!((poly.body_centroid() - c).amax() < 5e-3);
    let vertex_mean = poly.vertices().iter().fold(Point::zeros(3), |a, v| a + v) / 4.0;
    assert!((poly.body_centroid() - vertex_mean).amax() < 1e-12);
}

#[test]
fn dodecahedron_measures_match_closed_forms() {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let a = 2.0 / phi;
    let poly = zoo::make_platonic(Platonic::Dodecahedron, 1.0).unwrap();
    let pentagon = 0.25 * (5.0 * (5.0 + 2.0 * 5f64.sqrt())).sqrt() * a * a;
    assert_relative_eq!(poly.surface_measure(), 12.0 * pentagon, max_relative = 1e-12);
    assert_relative_eq!(poly.volume(), (15.0 + 7.0 * 5f64.sqrt()) / 4.0 * a.powi(3), max_relative = 1e-12);
    for f in 0..12 {
        assert_relative_eq!(poly.facet_measure(f), pentagon, max_relative = 1e-12);
    }
}

#[test]
fn triangle_t_centroids() {
    let t = zoo::triangle_t();
    assert_relative_eq!(t.volume(), 1.0, max_relative = 1e-14);
    assert_relative_eq!(t.surface_measure(), 2.0 + 2.0 * 2f64.sqrt(), max_relative = 1e-14);
    assert_relative_eq!(t.body_centroid()[0], 1.0 / 3.0, epsilon = 1e-14);
    // Two slanted edges of length sqrt(2) with midpoints at x = 1/2.
    let m = 2f64.sqrt() / (2.0 + 2.0 * 2f64.sqrt());
    assert_relative_eq!(t.boundary_centroid()[0], m, epsilon = 1e-14);
    assert!(t.body_centroid()[1].abs() < 1e-15 && t.boundary_centroid()[1].abs() < 1e-15);
}

#[test]
fn halfspace_and_vertex_descriptions_agree() {
    let mut hs = Vec::new();
    for i in 0..3 {
        for s in [1.0, -1.0] {
            let mut n = Point::zeros(3);
            n[i] = s;
            hs.push(HalfSpace::new(n, 1.0).unwrap());
        }
    }
    let from_h = Polytope::from_halfspaces(&hs).unwrap();
    let from_v = zoo::make_platonic(Platonic::Cube, 1.0).unwrap();
    assert_eq!(from_h.vertices().len(), 8);
    assert_relative_eq!(from_h.volume(), from_v.volume(), max_relative = 1e-12);
    assert_relative_eq!(from_h.surface_measure(), 24.0, max_relative = 1e-12);
}

#[test]
fn halfspace_failures_are_reported() {
    let open = [HalfSpace::new(dvector![1.0, 0.0], 1.0).unwrap(), HalfSpace::new(dvector![0.0, 1.0], 1.0).unwrap()];
    assert!(matches!(Polytope::from_halfspaces(&open), Err(Error::UnboundedRegion)));
    let empty = [
        HalfSpace::new(dvector![1.0, 0.0], -1.0).unwrap(),
        HalfSpace::new(dvector![-1.0, 0.0], -1.0).unwrap(),
        HalfSpace::new(dvector![0.0, 1.0], 1.0).unwrap(),
        HalfSpace::new(dvector![0.0, -1.0], 1.0).unwrap(),
    ];
    assert!(matches!(Polytope::from_halfspaces(&empty), Err(Error::EmptyRegion)));
}

#[test]
fn degenerate_and_unsupported_inputs() {
    let flat = [dvector![0.0, 0.0, 0.0], dvector![1.0, 0.0, 0.0], dvector![0.0, 1.0, 0.0], dvector![1.0, 1.0, 0.0]];
    assert!(matches!(Polytope::from_vertices(&flat), Err(Error::DegenerateInput(_))));
    let pts = random_points(5, 10, 0);
    assert!(matches!(Polytope::from_vertices(&pts), Err(Error::UnsupportedDimension(5))));
    assert!(Ball::new(2, dvector![0.0, 0.0], 0.0).is_err());
    assert!(Parallelotope::new(dvector![0.0, 0.0], vec![dvector![1.0, 1.0], dvector![2.0, 2.0]]).is_err());
}

#[test]
fn ball_measures_match_gamma_oracle() {
    for n in 2..=10usize {
        let b = Ball::new(n, Point::zeros(n), 1.5).unwrap();
        let unit = std::f64::consts::PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0 + 1.0);
        assert_relative_eq!(b.volume(), unit * 1.5f64.powi(n as i32), max_relative = 1e-12);
        assert_relative_eq!(b.surface_measure(), n as f64 / 1.5 * b.volume(), max_relative = 1e-12);
    }
}

#[test]
fn parallelotope_measures() {
    let edges = vec![dvector![1.0, 0.2, 0.0], dvector![0.3, 2.0, 0.1], dvector![0.0, 0.4, 1.5]];
    let p = Parallelotope::new(dvector![0.5, -1.0, 2.0], edges.clone()).unwrap();
    let m = DMatrix::from_columns(&edges);
    assert_relative_eq!(p.volume(), m.determinant().abs(), max_relative = 1e-12);
    let face = |u: &Point, v: &Point| u.cross(v).norm();
    let surface = 2.0 * (face(&edges[0], &edges[1]) + face(&edges[1], &edges[2]) + face(&edges[0], &edges[2]));
    assert_relative_eq!(p.surface_measure(), surface, max_relative = 1e-12);
    let hull = Shape::Parallelotope(p.clone()).to_polytope().unwrap();
    assert_relative_eq!(hull.volume(), p.volume(), max_relative = 1e-12);
    assert_relative_eq!(hull.surface_measure(), p.surface_measure(), max_relative = 1e-12);
    assert!((hull.body_centroid() - p.center()).amax() < 1e-12);
}

#[test]
fn cone_volume_is_height_times_base_over_n() {
    for seed in 0..10 {
        for n in [2, 3] {
            let c = zoo::random_cone(n, seed).unwrap();
            assert_relative_eq!(c.hull().volume(), c.height() * c.base_measure() / n as f64, max_relative = 1e-9);
        }
    }
    let c = Cone::new(&[dvector![-1.0, 0.0], dvector![1.0, 0.0]], dvector![0.0, 1.0]).unwrap();
    assert_relative_eq!(c.height(), 1.0);
    assert_relative_eq!(c.base_measure(), 2.0);
    assert!(Cone::new(&[dvector![-1.0, 0.0], dvector![1.0, 0.0]], dvector![0.5, 0.0]).is_err());
}

#[test]
fn affine_images_scale_volume_by_determinant() {
    let shape = Shape::Polytope(zoo::make_platonic(Platonic::Octahedron, 1.0).unwrap());
    let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.0, 0.0, 2.0, 0.3, 0.1, 0.0, 0.7]);
    let image = shape.map_affine(&m, &dvector![1.0, 2.0, 3.0]).unwrap();
    let vol = |s: &Shape| s.to_polytope().unwrap().volume();
    assert_relative_eq!(vol(&image), vol(&shape) * m.determinant().abs(), max_relative = 1e-12);
}
