//! Volumes, surface measures and centers of mass of bodies and boundaries.

use crate::geometry::{Point, Shape};

/// Centroid gaps below this are treated as coincident centroids.
pub const CENTROID_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CentroidReport {
    pub body_centroid: Point,
    pub boundary_centroid: Point,
    pub volume: f64,
    pub surface_measure: f64,
    /// Euclidean distance between the two centroids.
    pub centroid_gap: f64,
}

/// `(volume, surface measure)` of the body.
pub fn measures(shape: &Shape) -> (f64, f64) {
    match shape {
        Shape::Polytope(p) => (p.volume(), p.surface_measure()),
        Shape::Cone(c) => (c.hull().volume(), c.hull().surface_measure()),
        Shape::Parallelotope(p) => (p.volume(), p.surface_measure()),
        Shape::Ball(b) => (b.volume(), b.surface_measure()),
    }
}

pub fn body_centroid(shape: &Shape) -> Point {
    match shape {
        Shape::Polytope(p) => p.body_centroid().clone(),
        Shape::Cone(c) => c.hull().body_centroid().clone(),
        Shape::Parallelotope(p) => p.center(),
        Shape::Ball(b) => b.center().clone(),
    }
}

pub fn boundary_centroid(shape: &Shape) -> Point {
    match shape {
        Shape::Polytope(p) => p.boundary_centroid().clone(),
        Shape::Cone(c) => c.hull().boundary_centroid().clone(),
        Shape::Parallelotope(p) => p.center(),
        Shape::Ball(b) => b.center().clone(),
    }
}

/// Distance between the body and boundary centroids. A gap above
/// [`CENTROID_TOL`] rules the body out: some coordinate projection has a
/// larger body mean than boundary mean.
pub fn centroid_gap(shape: &Shape) -> f64 {
    (body_centroid(shape) - boundary_centroid(shape)).norm()
}

pub fn centroid_report(shape: &Shape) -> CentroidReport {
    let (volume, surface_measure) = measures(shape);
    let body_centroid = body_centroid(shape);
    let boundary_centroid = boundary_centroid(shape);
    let centroid_gap = (&body_centroid - &boundary_centroid).norm();
    CentroidReport { body_centroid, boundary_centroid, volume, surface_measure, centroid_gap }
}
