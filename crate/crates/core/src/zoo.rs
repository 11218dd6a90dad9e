//! Named shape families and seeded random generators.

use std::f64::consts::TAU;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{Ball, Cone, HalfSpace, Parallelotope, Point, Polytope, Shape};
use crate::insphere::chebyshev_center;

const TANGENT_RETRIES: u64 = 100;
/// Random facet normals closer than this angle are redrawn.
const MIN_NORMAL_ANGLE_DEG: f64 = 5.0;
/// Tangent polytopes (inradius 1) with a vertex farther out are redrawn.
const MAX_TANGENT_CIRCUMRADIUS: f64 = 10.0;

pub fn make_parallelotope(origin: Point, edges: Vec<Point>) -> Result<Parallelotope> {
    Parallelotope::new(origin, edges)
}

pub fn make_ball(n: usize, center: Point, radius: f64) -> Result<Ball> {
    Ball::new(n, center, radius)
}

/// Regular k-gon centered at the origin with a vertex at angle 0.
pub fn make_regular_polygon(k: usize, circumradius: f64) -> Result<Polytope> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("a polygon needs at least 3 sides, got {k}")));
    }
    if circumradius.is_nan() || circumradius <= 0.0 {
        return Err(Error::InvalidArgument("circumradius must be positive".into()));
    }
    let verts: Vec<Point> = (0..k)
        .map(|j| {
            let t = TAU * j as f64 / k as f64;
            Point::from_vec(vec![circumradius * t.cos(), circumradius * t.sin()])
        })
        .collect();
    Polytope::from_vertices(&verts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Platonic {
    Tetrahedron,
    Cube,
    Octahedron,
    Dodecahedron,
    Icosahedron,
}

impl Platonic {
    pub const ALL: [Platonic; 5] =
        [Platonic::Tetrahedron, Platonic::Cube, Platonic::Octahedron, Platonic::Dodecahedron, Platonic::Icosahedron];

    pub fn name(self) -> &'static str {
        match self {
            Platonic::Tetrahedron => "tetrahedron",
            Platonic::Cube => "cube",
            Platonic::Octahedron => "octahedron",
            Platonic::Dodecahedron => "dodecahedron",
            Platonic::Icosahedron => "icosahedron",
        }
    }
}

impl FromStr for Platonic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Platonic::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown Platonic solid '{s}'")))
    }
}

fn p3(x: f64, y: f64, z: f64) -> Point {
    Point::from_vec(vec![x, y, z])
}

/// The three cyclic shifts of `(0, a, b)` over all sign choices.
fn cyclic(a: f64, b: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for sa in [1.0, -1.0] {
        for sb in [1.0, -1.0] {
            let (u, v) = (sa * a, sb * b);
            out.push(p3(0.0, u, v));
            out.push(p3(u, v, 0.0));
            out.push(p3(v, 0.0, u));
        }
    }
    out
}

/// Platonic solid in its standard position about the origin, scaled by
/// `scale`.
pub fn make_platonic(solid: Platonic, scale: f64) -> Result<Polytope> {
    if scale.is_nan() || scale <= 0.0 {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let signs = [1.0, -1.0];
    let verts: Vec<Point> = match solid {
        Platonic::Tetrahedron => vec![p3(1.0, 1.0, 1.0), p3(1.0, -1.0, -1.0), p3(-1.0, 1.0, -1.0), p3(-1.0, -1.0, 1.0)],
        Platonic::Cube => {
            let mut v = Vec::new();
            for x in signs {
                for y in signs {
                    for z in signs {
                        v.push(p3(x, y, z));
                    }
                }
            }
            v
        }
        Platonic::Octahedron => {
            let mut v = Vec::new();
            for i in 0..3 {
                for s in signs {
                    let mut p = p3(0.0, 0.0, 0.0);
                    p[i] = s;
                    v.push(p);
                }
            }
            v
        }
        Platonic::Icosahedron => cyclic(1.0, phi),
        Platonic::Dodecahedron => {
            let mut v = make_platonic(Platonic::Cube, 1.0)?.vertices().to_vec();
            v.extend(cyclic(1.0 / phi, phi));
            v
        }
    };
    Polytope::from_vertices(&verts.into_iter().map(|p| p * scale).collect::<Vec<_>>())
}

/// The triangle with vertices (0,-1), (0,1), (1,0).
pub fn triangle_t() -> Polytope {
    Polytope::from_vertices(&[
        Point::from_vec(vec![0.0, -1.0]),
        Point::from_vec(vec![0.0, 1.0]),
        Point::from_vec(vec![1.0, 0.0]),
    ])
    .expect("triangle T is a valid polytope")
}

/// `[-1, 1]^n` as a parallelotope.
pub fn cube(n: usize) -> Result<Parallelotope> {
    let edges = (0..n).map(|i| Point::from_fn(n, |r, _| if r == i { 2.0 } else { 0.0 })).collect();
    Parallelotope::new(Point::from_element(n, -1.0), edges)
}

pub fn make_cone(base: &[Point], apex: Point) -> Result<Cone> {
    Cone::new(base, apex)
}

fn derive_seed(seed: u64, attempt: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ attempt.wrapping_mul(0xD1B5_4A32_D192_ED03).rotate_left(17)
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Point {
    Point::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    // Fix column signs so the distribution is uniform.
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Polytope circumscribed about the unit ball at the origin with `k`
/// facets `u_i . x <= 1` for random unit normals `u_i`. Draws with a
/// redundant facet or a vertex beyond radius 10 are retried.
pub fn random_tangent_polytope(n: usize, k: usize, seed: u64) -> Result<Polytope> {
    if !(2..=4).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let cos_min = MIN_NORMAL_ANGLE_DEG.to_radians().cos();
    for attempt in 0..TANGENT_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt));
        let mut normals: Vec<Point> = Vec::with_capacity(k);
        let mut draws = 0;
        while normals.len() < k && draws < 1000 * k.max(1) {
            draws += 1;
            let u = gaussian(&mut rng, n);
            if u.norm() < 1e-12 {
                continue;
            }
            let u = u.normalize();
            if normals.iter().all(|v| v.dot(&u) < cos_min) {
                normals.push(u);
            }
        }
        if normals.len() < k {
            continue;
        }
        let hs: Vec<HalfSpace> = normals.into_iter().map(|u| HalfSpace::new(u, 1.0)).collect::<Result<_>>()?;
        let Ok(poly) = Polytope::from_halfspaces(&hs) else { continue };
        if poly.facets().len() != k || poly.vertices().iter().any(|v| v.norm() > MAX_TANGENT_CIRCUMRADIUS) {
            continue;
        }
        match chebyshev_center(&poly) {
            Ok(ins) if ins.tangent_to_all => return Ok(poly),
            _ => continue,
        }
    }
    Err(Error::GenerationFailed(format!(
        "no bounded tangent polytope with {k} facets in R^{n} after {TANGENT_RETRIES} attempts"
    )))
}

/// Random parallelotope: origin and edges Gaussian, edges rescaled to unit
/// length and redrawn while `|det|` is below 0.2.
pub fn random_parallelotope(n: usize, seed: u64) -> Result<Parallelotope> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let edges: Vec<Point> = (0..n).map(|_| gaussian(&mut rng, n).normalize()).collect();
        if DMatrix::from_columns(&edges).determinant().abs() < 0.2 {
            continue;
        }
        let origin = gaussian(&mut rng, n) * 0.5;
        return Parallelotope::new(origin, edges);
    }
    Err(Error::GenerationFailed("could not draw well-conditioned parallelotope edges".into()))
}

/// Random cone in R^n (n in 2..=4): a random convex base in a random
/// hyperplane and an apex at height in [0.5, 2] above a random base point.
pub fn random_cone(n: usize, seed: u64) -> Result<Cone> {
    if !(2..=4).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rot = random_rotation(&mut rng, n);
    let shift = gaussian(&mut rng, n) * 0.5;
    let m = n - 1;
    let count = if m == 1 { 2 } else { rng.random_range(m + 2..=m + 4) };
    let lift = |u: &Point| {
        let mut x = Point::zeros(n);
        x.rows_mut(0, m).copy_from(u);
        &rot * x + &shift
    };
    let base: Vec<Point> = if m == 1 {
        let a = rng.random_range(-1.0..-0.2);
        let b = rng.random_range(0.2..1.0);
        vec![lift(&Point::from_element(1, a)), lift(&Point::from_element(1, b))]
    } else {
        // Points on an ellipse-like ring keep the base well shaped.
        (0..count)
            .map(|j| {
                let t = TAU * (j as f64 + rng.random_range(-0.3..0.3)) / count as f64;
                let mut u = Point::zeros(m);
                u[0] = t.cos();
                u[1] = t.sin();
                if m == 3 {
                    u[2] = rng.random_range(-1.0..1.0);
                    u[0] *= (1.0 - u[2] * u[2]).sqrt();
                    u[1] *= (1.0 - u[2] * u[2]).sqrt();
                }
                lift(&u)
            })
            .collect()
    };
    let mut foot = Point::zeros(n);
    for i in 0..m {
        foot[i] = rng.random_range(-0.5..0.5);
    }
    foot[m] = rng.random_range(0.5..2.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
    let apex = &rot * foot + &shift;
    Cone::new(&base, apex)
}

/// Example names accepted by [`by_name`].
pub fn names() -> Vec<String> {
    let mut out = vec!["triangle-T".to_string()];
    out.extend((3..=12).map(|k| format!("regular-polygon:{k}")));
    out.extend(Platonic::ALL.iter().map(|p| format!("platonic:{}", p.name())));
    out.extend((2..=5).map(|n| format!("ball:{n}")));
    out.extend((2..=4).map(|n| format!("cube:{n}")));
    out
}

/// Builds a shape from a zoo name: `triangle-T`, `regular-polygon:k`,
/// `platonic:<solid>`, `ball:n` (unit ball at the origin) or `cube:n`
/// (`[-1, 1]^n`).
pub fn by_name(name: &str) -> Result<Shape> {
    let parse_usize = |s: &str| {
        s.parse::<usize>().map_err(|_| Error::InvalidArgument(format!("'{s}' is not a nonnegative integer in zoo name '{name}'")))
    };
    if name == "triangle-T" {
        return Ok(Shape::Polytope(triangle_t()));
    }
    let (family, arg) =
        name.split_once(':').ok_or_else(|| Error::InvalidArgument(format!("unknown zoo shape '{name}'")))?;
    match family {
        "regular-polygon" => Ok(Shape::Polytope(make_regular_polygon(parse_usize(arg)?, 1.0)?)),
        "platonic" => Ok(Shape::Polytope(make_platonic(arg.parse()?, 1.0)?)),
        "ball" => {
            let n = parse_usize(arg)?;
            Ok(Shape::Ball(make_ball(n, Point::zeros(n), 1.0)?))
        }
        "cube" => Ok(Shape::Parallelotope(cube(parse_usize(arg)?)?)),
        _ => Err(Error::InvalidArgument(format!("unknown zoo family '{family}'"))),
    }
}
