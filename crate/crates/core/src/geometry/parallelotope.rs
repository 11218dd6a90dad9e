use itertools::Itertools;
use nalgebra::DMatrix;

use super::{check_point, Point, Simplex};
use crate::error::{Error, Result};
use crate::linalg::{factorial, simplex_measure};

/// Largest dimension for which Kuhn triangulations are materialized
/// (n! body simplices). Above it, integration falls back to sampling.
pub(crate) const MAX_KUHN_DIM: usize = 6;

/// `origin + sum_i t_i v_i`, `t in [0,1]^n`, for n in 2..=10.
#[derive(Debug, Clone)]
pub struct Parallelotope {
    origin: Point,
    edges: Vec<Point>,
    volume: f64,
    facet_measures: Vec<f64>,
    body: Option<Vec<Simplex>>,
    boundary: Option<Vec<(usize, Simplex)>>,
}

/// Affine patch `origin + span(spans)` restricted to the unit cube of
/// coefficients.
#[derive(Debug, Clone)]
pub struct FacetPatch {
    pub origin: Point,
    pub spans: Vec<Point>,
}

/// The facet `S_i` spanned by all edges except `v_i`, and its opposite
/// `S_i + v_i`.
#[derive(Debug, Clone)]
pub struct FacetPair {
    pub index: usize,
    pub base: FacetPatch,
    pub opposite: FacetPatch,
    pub shift: Point,
    /// (n-1)-measure of either facet.
    pub measure: f64,
    /// Distance between the two parallel facet hyperplanes.
    pub distance: f64,
}

impl FacetPatch {
    pub fn point(&self, coeffs: &[f64]) -> Point {
        let mut p = self.origin.clone();
        for (v, t) in self.spans.iter().zip(coeffs) {
            p += v * *t;
        }
        p
    }
}

fn kuhn_simplices(origin: &Point, spans: &[Point]) -> Vec<Simplex> {
    let k = spans.len();
    let measure = if k == 0 { 1.0 } else {
        let mut verts = vec![origin.clone()];
        verts.extend(spans.iter().map(|v| origin + v));
        simplex_measure(&verts)
    };
    // Every Kuhn simplex has the same measure: |Gram|^(1/2) / k!.
    let gram = DMatrix::from_fn(k, k, |i, j| spans[i].dot(&spans[j]));
    let m = if k == 0 { measure } else { gram.determinant().max(0.0).sqrt() / factorial(k) };
    (0..k)
        .permutations(k)
        .map(|perm| {
            let mut verts = Vec::with_capacity(k + 1);
            let mut cur = origin.clone();
            verts.push(cur.clone());
            for &i in &perm {
                cur += &spans[i];
                verts.push(cur.clone());
            }
            Simplex::from_parts(verts, m)
        })
        .collect()
}

impl Parallelotope {
    pub fn new(origin: Point, edges: Vec<Point>) -> Result<Self> {
        check_point(&origin)?;
        let n = origin.len();
        if !(2..=10).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if edges.len() != n {
            return Err(Error::InvalidArgument(format!("expected {n} edge vectors, got {}", edges.len())));
        }
        for e in &edges {
            check_point(e)?;
            if e.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: e.len() });
            }
        }
        let det = DMatrix::from_columns(&edges).determinant();
        if det.abs() < 1e-12 {
            return Err(Error::DegenerateInput("parallelotope edges are linearly dependent".into()));
        }
        let facet_measures = (0..n)
            .map(|i| {
                let others: Vec<&Point> = edges.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v).collect();
                let g = DMatrix::from_fn(n - 1, n - 1, |a, b| others[a].dot(others[b]));
                g.determinant().max(0.0).sqrt()
            })
            .collect();
        let mut p = Self { origin, edges, volume: det.abs(), facet_measures, body: None, boundary: None };
        if n <= MAX_KUHN_DIM {
            p.body = Some(kuhn_simplices(&p.origin, &p.edges));
            let mut boundary = Vec::new();
            for pair in p.facet_pairs() {
                for s in kuhn_simplices(&pair.base.origin, &pair.base.spans) {
                    boundary.push((2 * pair.index, s));
                }
                for s in kuhn_simplices(&pair.opposite.origin, &pair.opposite.spans) {
                    boundary.push((2 * pair.index + 1, s));
                }
            }
            p.boundary = Some(boundary);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &Point {
        &self.origin
    }

    pub fn edges(&self) -> &[Point] {
        &self.edges
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn surface_measure(&self) -> f64 {
        2.0 * self.facet_measures.iter().sum::<f64>()
    }

    /// Center of both the body and the boundary (central symmetry).
    pub fn center(&self) -> Point {
        let mut c = self.origin.clone();
        for v in &self.edges {
            c += v * 0.5;
        }
        c
    }

    pub fn facet_pairs(&self) -> Vec<FacetPair> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let spans: Vec<Point> =
                    self.edges.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.clone()).collect();
                let shift = self.edges[i].clone();
                FacetPair {
                    index: i,
                    base: FacetPatch { origin: self.origin.clone(), spans: spans.clone() },
                    opposite: FacetPatch { origin: &self.origin + &shift, spans },
                    measure: self.facet_measures[i],
                    distance: self.volume / self.facet_measures[i],
                    shift,
                }
            })
            .collect()
    }

    /// All 2^n corners.
    pub fn vertices(&self) -> Vec<Point> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                let mut p = self.origin.clone();
                for (i, v) in self.edges.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        p += v;
                    }
                }
                p
            })
            .collect()
    }

    /// Kuhn triangulation of the body (n! simplices) when n <= 6.
    pub fn body_simplices(&self) -> Option<&[Simplex]> {
        self.body.as_deref()
    }

    /// Kuhn triangulations of the 2n facets; facet id `2i` is `S_i`, `2i+1`
    /// its opposite.
    pub fn boundary_simplices(&self) -> Option<&[(usize, Simplex)]> {
        self.boundary.as_deref()
    }

    /// Coefficients `t` with `x = origin + V t`.
    pub fn coefficients(&self, x: &Point) -> Point {
        let v = DMatrix::from_columns(&self.edges);
        v.lu().solve(&(x - &self.origin)).expect("edges are independent")
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        self.coefficients(x).iter().all(|&t| t >= -tol && t <= 1.0 + tol)
    }

    pub fn point(&self, coeffs: &[f64]) -> Point {
        let mut p = self.origin.clone();
        for (v, t) in self.edges.iter().zip(coeffs) {
            p += v * *t;
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    #[test]
    fn sheared_square() {
        let p = Parallelotope::new(dvector![0.0, 0.0], vec![dvector![1.0, 0.0], dvector![1.0, 1.0]]).unwrap();
        assert_relative_eq!(p.volume(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(p.surface_measure(), 2.0 + 2.0 * 2f64.sqrt(), epsilon = 1e-14);
        let body: f64 = p.body_simplices().unwrap().iter().map(|s| s.measure()).sum();
        assert_relative_eq!(body, 1.0, epsilon = 1e-14);
        for pair in p.facet_pairs() {
            assert_relative_eq!(pair.measure * pair.distance, p.volume(), epsilon = 1e-14);
        }
    }

    #[test]
    fn kuhn_counts() {
        let n = 4;
        let edges: Vec<Point> = (0..n).map(|i| Point::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 })).collect();
        let p = Parallelotope::new(Point::zeros(n), edges).unwrap();
        assert_eq!(p.body_simplices().unwrap().len(), 24);
        assert_eq!(p.boundary_simplices().unwrap().len(), 8 * 6);
        let surf: f64 = p.boundary_simplices().unwrap().iter().map(|(_, s)| s.measure()).sum();
        assert_relative_eq!(surf, 8.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_dependent_edges() {
        let r = Parallelotope::new(dvector![0.0, 0.0], vec![dvector![1.0, 1.0], dvector![2.0, 2.0]]);
        assert!(matches!(r, Err(Error::DegenerateInput(_))));
    }
}
