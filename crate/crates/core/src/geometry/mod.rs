//! Convex bodies: polytopes, parallelotopes, balls and cones over polytope
//! bases, together with the simplicial decompositions used for integration.

mod ball;
mod cone;
mod parallelotope;
mod polytope;

use nalgebra::DVector;

use crate::error::{Error, Result};

pub use ball::{unit_ball_volume, unit_sphere_area, Ball};
pub use cone::Cone;
pub use parallelotope::{FacetPair, FacetPatch, Parallelotope};
pub use polytope::{enumerate_vertices, Facet, Polytope};

/// A point (or vector) in R^n.
pub type Point = DVector<f64>;

/// Absolute tolerance for hyperplane residuals and vertex deduplication.
pub const GEOM_TOL: f64 = 1e-9;

pub(crate) fn check_point(p: &Point) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidArgument("points need at least one coordinate".into()));
    }
    if p.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("point has a non-finite coordinate".into()));
    }
    Ok(())
}

/// `{x : normal . x <= offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    normal: Point,
    offset: f64,
}

impl HalfSpace {
    /// Normalizes `normal` (and scales `offset` with it).
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        check_point(&normal)?;
        if !offset.is_finite() {
            return Err(Error::InvalidArgument("halfspace offset is not finite".into()));
        }
        let norm = normal.norm();
        if norm < 1e-12 {
            return Err(Error::DegenerateInput("halfspace normal is zero".into()));
        }
        Ok(Self { normal: normal / norm, offset: offset / norm })
    }

    pub fn normal(&self) -> &Point {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `offset - normal . x`; nonnegative inside.
    pub fn slack(&self, x: &Point) -> f64 {
        self.offset - self.normal.dot(x)
    }
}

/// k + 1 affinely independent points in R^n.
#[derive(Debug, Clone)]
pub struct Simplex {
    vertices: Vec<Point>,
    measure: f64,
}

impl Simplex {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidArgument("simplex needs vertices".into()));
        }
        let n = vertices[0].len();
        for v in &vertices {
            check_point(v)?;
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        if vertices.len() > n + 1 {
            return Err(Error::InvalidArgument("too many vertices for a simplex".into()));
        }
        let measure = crate::linalg::simplex_measure(&vertices);
        if vertices.len() > 1 && (measure.is_nan() || measure <= 1e-14) {
            return Err(Error::DegenerateInput("simplex vertices are affinely dependent".into()));
        }
        Ok(Self { vertices, measure })
    }

    pub(crate) fn from_parts(vertices: Vec<Point>, measure: f64) -> Self {
        Self { vertices, measure }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Intrinsic dimension k.
    pub fn kdim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    /// k-dimensional measure.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn centroid(&self) -> Point {
        crate::linalg::mean_point(&self.vertices)
    }
}

/// Any convex body handled by the toolkit.
#[derive(Debug, Clone)]
pub enum Shape {
    Polytope(Polytope),
    Parallelotope(Parallelotope),
    Ball(Ball),
    Cone(Cone),
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Polytope(p) => p.dim(),
            Shape::Parallelotope(p) => p.dim(),
            Shape::Ball(b) => b.dim(),
            Shape::Cone(c) => c.dim(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Shape::Polytope(p) => format!(
                "polytope in R^{} ({} vertices, {} facets)",
                p.dim(),
                p.vertices().len(),
                p.facets().len()
            ),
            Shape::Parallelotope(p) => format!("parallelotope in R^{}", p.dim()),
            Shape::Ball(b) => format!("ball in R^{} (radius {})", b.dim(), b.radius()),
            Shape::Cone(c) => format!(
                "cone in R^{} over a {}-vertex base (height {:.6})",
                c.dim(),
                c.base_vertices().len(),
                c.height()
            ),
        }
    }

    /// Largest distance between two points of the body.
    pub fn diameter(&self) -> f64 {
        match self {
            Shape::Ball(b) => 2.0 * b.radius(),
            Shape::Polytope(p) => diameter_of(p.vertices()),
            Shape::Parallelotope(p) => diameter_of(&p.vertices()),
            Shape::Cone(c) => diameter_of(c.hull().vertices()),
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Shape::Ball(b) => {
                let r = Point::from_element(b.dim(), b.radius());
                (b.center() - &r, b.center() + r)
            }
            Shape::Polytope(p) => bbox_of(p.vertices()),
            Shape::Parallelotope(p) => bbox_of(&p.vertices()),
            Shape::Cone(c) => bbox_of(c.hull().vertices()),
        }
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        match self {
            Shape::Ball(b) => (x - b.center()).norm() <= b.radius() + tol,
            Shape::Polytope(p) => p.contains(x, tol),
            Shape::Parallelotope(p) => p.contains(x, tol),
            Shape::Cone(c) => c.hull().contains(x, tol),
        }
    }

    /// The body as a vertex/facet polytope, when it is one (and n <= 4).
    pub fn to_polytope(&self) -> Result<Polytope> {
        match self {
            Shape::Polytope(p) => Ok(p.clone()),
            Shape::Cone(c) => Ok(c.hull().clone()),
            Shape::Parallelotope(p) => Polytope::from_vertices(&p.vertices()),
            Shape::Ball(_) => Err(Error::InvalidArgument("a ball is not a polytope".into())),
        }
    }

    /// Applies `x -> m x + t` to the body. `m` must be invertible.
    pub fn map_affine(&self, m: &nalgebra::DMatrix<f64>, t: &Point) -> Result<Shape> {
        let f = |p: &Point| m * p + t;
        Ok(match self {
            Shape::Polytope(p) => {
                Shape::Polytope(Polytope::from_vertices(&p.vertices().iter().map(f).collect::<Vec<_>>())?)
            }
            Shape::Parallelotope(p) => Shape::Parallelotope(Parallelotope::new(
                f(p.origin()),
                p.edges().iter().map(|e| m * e).collect(),
            )?),
            Shape::Ball(b) => {
                let mt = m.transpose() * m;
                let identity = nalgebra::DMatrix::<f64>::identity(b.dim(), b.dim());
                let scale = mt[(0, 0)].sqrt();
                if (mt - identity * scale * scale).amax() > 1e-9 * scale * scale {
                    return Err(Error::InvalidArgument("balls only map under similarities".into()));
                }
                Shape::Ball(Ball::new(b.dim(), f(b.center()), b.radius() * scale)?)
            }
            Shape::Cone(c) => Shape::Cone(Cone::new(
                &c.base_vertices().iter().map(f).collect::<Vec<_>>(),
                f(c.apex()),
            )?),
        })
    }
}

fn diameter_of(points: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max((p - q).norm());
        }
    }
    d
}

fn bbox_of(points: &[Point]) -> (Point, Point) {
    let mut lo = points[0].clone();
    let mut hi = points[0].clone();
    for p in points {
        for i in 0..p.len() {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    (lo, hi)
}
