use nalgebra::DMatrix;

use super::{check_point, Point, Polytope, Simplex, GEOM_TOL};
use crate::error::{Error, Result};
use crate::linalg::{affine_frame, affine_rank, fit_hyperplane, simplex_measure};

/// `conv(base, apex)` for a flat (n-1)-dimensional convex base in R^n.
#[derive(Debug, Clone)]
pub struct Cone {
    hull: Polytope,
    apex: Point,
    base_vertices: Vec<Point>,
    base_simplices: Vec<Simplex>,
    base_measure: f64,
    base_centroid: Point,
    height: f64,
}

impl Cone {
    pub fn new(base: &[Point], apex: Point) -> Result<Self> {
        check_point(&apex)?;
        let n = apex.len();
        if !(2..=4).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        for p in base {
            check_point(p)?;
            if p.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.len() });
            }
        }
        let refs: Vec<&Point> = base.iter().collect();
        if base.len() < n || affine_rank(&refs, GEOM_TOL) != n - 1 {
            return Err(Error::DegenerateInput(format!("cone base must span an (n-1)-flat in R^{n}")));
        }
        let (normal, offset, residual) = fit_hyperplane(&refs);
        if residual > GEOM_TOL {
            return Err(Error::DegenerateInput("cone base vertices are not coplanar".into()));
        }
        let height = (normal.dot(&apex) - offset).abs();
        if height <= GEOM_TOL {
            return Err(Error::DegenerateInput("cone apex lies on the base hyperplane".into()));
        }

        let frame = affine_frame(&refs, GEOM_TOL);
        let origin = base[0].clone();
        let local: Vec<Point> = base.iter().map(|p| frame.transpose() * (p - &origin)).collect();
        let lift = |u: &Point| &origin + &frame * u;
        let (base_vertices, base_simplices) = if n == 2 {
            let (lo, hi) = local.iter().enumerate().fold((0, 0), |(lo, hi), (i, u)| {
                (if u[0] < local[lo][0] { i } else { lo }, if u[0] > local[hi][0] { i } else { hi })
            });
            let verts = vec![base[lo].clone(), base[hi].clone()];
            let m = simplex_measure(&verts);
            (verts.clone(), vec![Simplex::from_parts(verts, m)])
        } else {
            let flat = Polytope::from_vertices(&local)?;
            let verts = flat.vertices().iter().map(lift).collect();
            let simplices = flat
                .body_simplices()
                .iter()
                .map(|s| {
                    let v: Vec<Point> = s.vertices().iter().map(lift).collect();
                    let m = simplex_measure(&v);
                    Simplex::from_parts(v, m)
                })
                .collect();
            (verts, simplices)
        };
        let base_measure: f64 = base_simplices.iter().map(Simplex::measure).sum();
        let mut base_centroid = Point::zeros(n);
        for s in &base_simplices {
            base_centroid += s.centroid() * s.measure();
        }
        base_centroid /= base_measure;

        let mut all = base_vertices.clone();
        all.push(apex.clone());
        let hull = Polytope::from_vertices(&all)?;
        Ok(Self { hull, apex, base_vertices, base_simplices, base_measure, base_centroid, height })
    }

    pub fn dim(&self) -> usize {
        self.apex.len()
    }

    pub fn apex(&self) -> &Point {
        &self.apex
    }

    /// Extreme points of the base.
    pub fn base_vertices(&self) -> &[Point] {
        &self.base_vertices
    }

    /// (n-1)-simplices tiling the base.
    pub fn base_simplices(&self) -> &[Simplex] {
        &self.base_simplices
    }

    pub fn base_measure(&self) -> f64 {
        self.base_measure
    }

    pub fn base_centroid(&self) -> &Point {
        &self.base_centroid
    }

    /// Distance from the apex to the base hyperplane.
    pub fn height(&self) -> f64 {
        self.height
    }

    /// The cone as a full-dimensional polytope.
    pub fn hull(&self) -> &Polytope {
        &self.hull
    }

    /// Edge matrix of an orthonormal frame of the base hyperplane.
    pub fn base_frame(&self) -> DMatrix<f64> {
        let refs: Vec<&Point> = self.base_vertices.iter().collect();
        affine_frame(&refs, GEOM_TOL)
    }
}
