use itertools::Itertools;
use nalgebra::DMatrix;

use super::{check_point, HalfSpace, Point, Simplex, GEOM_TOL};
use crate::error::{Error, Result};
use crate::linalg::{affine_rank, fit_hyperplane, mean_point, signed_volume, simplex_measure};
use crate::lp::{self, LpOutcome};

/// A facet: its supporting halfspace and the indices of the polytope
/// vertices lying on it (an unordered set).
#[derive(Debug, Clone)]
pub struct Facet {
    pub halfspace: HalfSpace,
    pub vertex_ids: Vec<usize>,
}

/// Full-dimensional convex polytope in R^n, n in 2..=4, with both
/// representations and cached triangulations, measures and centroids.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    body: Vec<Simplex>,
    boundary: Vec<(usize, Simplex)>,
    facet_measures: Vec<f64>,
    volume: f64,
    surface: f64,
    body_centroid: Point,
    boundary_centroid: Point,
}

fn validate_points(points: &[Point]) -> Result<usize> {
    let first = points.first().ok_or_else(|| Error::DegenerateInput("no points given".into()))?;
    let n = first.len();
    for p in points {
        check_point(p)?;
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.len() });
        }
    }
    if !(2..=4).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    Ok(n)
}

fn dedupe(points: &[Point], tol: f64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| (q - p).norm() <= tol) {
            out.push(p.clone());
        }
    }
    out
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|i| big.binary_search(i).is_ok())
}

impl Polytope {
    /// Convex hull of `points` by exhaustive n-subset facet enumeration.
    pub fn from_vertices(points: &[Point]) -> Result<Self> {
        let n = validate_points(points)?;
        let pts = dedupe(points, GEOM_TOL);
        let refs: Vec<&Point> = pts.iter().collect();
        if pts.len() < n + 1 || affine_rank(&refs, GEOM_TOL) < n {
            return Err(Error::DegenerateInput(format!(
                "points do not span a full-dimensional body in R^{n}"
            )));
        }

        let mut facets: Vec<(HalfSpace, Vec<usize>)> = Vec::new();
        for combo in (0..pts.len()).combinations(n) {
            if facets.iter().any(|(_, members)| is_subset(&combo, members)) {
                continue;
            }
            let sub: Vec<&Point> = combo.iter().map(|&i| &pts[i]).collect();
            if affine_rank(&sub, GEOM_TOL) < n - 1 {
                continue;
            }
            let (mut normal, offset, _) = fit_hyperplane(&sub);
            let dist: Vec<f64> = pts.iter().map(|p| normal.dot(p) - offset).collect();
            let hi = dist.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = dist.iter().cloned().fold(f64::INFINITY, f64::min);
            if hi > GEOM_TOL && lo < -GEOM_TOL {
                continue;
            }
            if hi > GEOM_TOL {
                normal = -normal;
            }
            let members: Vec<usize> =
                (0..pts.len()).filter(|&i| dist[i].abs() <= GEOM_TOL).collect();
            // Refit on every member for a least-squares hyperplane.
            let all: Vec<&Point> = members.iter().map(|&i| &pts[i]).collect();
            let (mut rn, mut ro, _) = fit_hyperplane(&all);
            if rn.dot(&normal) < 0.0 {
                rn = -rn;
                ro = -ro;
            }
            facets.push((HalfSpace { normal: rn, offset: ro }, members));
        }
        if facets.len() < n + 1 {
            return Err(Error::DegenerateInput("hull has too few facets".into()));
        }

        // Extreme points are those whose incident facet normals span R^n.
        let mut keep = vec![false; pts.len()];
        for (i, k) in keep.iter_mut().enumerate() {
            let normals: Vec<&Point> = facets
                .iter()
                .filter(|(_, m)| m.binary_search(&i).is_ok())
                .map(|(h, _)| &h.normal)
                .collect();
            if normals.len() >= n {
                let m = DMatrix::from_columns(&normals.iter().map(|v| (*v).clone()).collect::<Vec<_>>());
                let rank = m.singular_values().iter().filter(|&&s| s > 1e-9).count();
                *k = rank == n;
            }
        }
        let mut remap = vec![usize::MAX; pts.len()];
        let mut vertices = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            if keep[i] {
                remap[i] = vertices.len();
                vertices.push(p.clone());
            }
        }
        let facets: Vec<Facet> = facets
            .into_iter()
            .map(|(halfspace, members)| Facet {
                halfspace,
                vertex_ids: members.iter().filter(|&&i| keep[i]).map(|&i| remap[i]).collect(),
            })
            .collect();
        Self::assemble(n, vertices, facets)
    }

    /// Intersection of halfspaces. Redundant halfspaces are dropped.
    pub fn from_halfspaces(halfspaces: &[HalfSpace]) -> Result<Self> {
        let first = halfspaces.first().ok_or(Error::UnboundedRegion)?;
        let n = first.dim();
        if halfspaces.iter().any(|h| h.dim() != n) {
            return Err(Error::InvalidArgument("halfspaces of mixed dimension".into()));
        }
        if !(2..=4).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if has_recession_direction(halfspaces)? {
            return Err(Error::UnboundedRegion);
        }
        match chebyshev_slack(halfspaces)? {
            None => return Err(Error::EmptyRegion),
            Some(t) if t <= GEOM_TOL => {
                return Err(Error::DegenerateInput("halfspace intersection is not full-dimensional".into()))
            }
            Some(_) => {}
        }
        let normals: Vec<Point> = halfspaces.iter().map(|h| h.normal.clone()).collect();
        let offsets: Vec<f64> = halfspaces.iter().map(|h| h.offset).collect();
        let verts = enumerate_vertices(&normals, &offsets, GEOM_TOL);
        Self::from_vertices(&verts)
    }

    fn assemble(dim: usize, vertices: Vec<Point>, facets: Vec<Facet>) -> Result<Self> {
        let mut poly = Polytope {
            dim,
            vertices,
            facets,
            body: Vec::new(),
            boundary: Vec::new(),
            facet_measures: Vec::new(),
            volume: 0.0,
            surface: 0.0,
            body_centroid: Point::zeros(dim),
            boundary_centroid: Point::zeros(dim),
        };
        let center = mean_point(&poly.vertices);
        let mut boundary = Vec::new();
        for (fid, facet) in poly.facets.iter().enumerate() {
            let mut pieces = Vec::new();
            poly.face_simplices(&facet.vertex_ids, dim - 1, &mut pieces);
            for verts in pieces {
                let m = simplex_measure(&verts);
                boundary.push((fid, Simplex::from_parts(verts, m)));
            }
        }
        let mut body = Vec::with_capacity(boundary.len());
        for (_, s) in &boundary {
            let mut verts = Vec::with_capacity(dim + 1);
            verts.push(center.clone());
            verts.extend(s.vertices().iter().cloned());
            if signed_volume(&verts) < 0.0 {
                verts.swap(1, 2);
            }
            let vol = signed_volume(&verts);
            body.push(Simplex::from_parts(verts, vol));
        }

        let mut facet_measures = vec![0.0; poly.facets.len()];
        let mut surface = 0.0;
        let mut bc = Point::zeros(dim);
        for (fid, s) in &boundary {
            facet_measures[*fid] += s.measure();
            surface += s.measure();
            bc += s.centroid() * s.measure();
        }
        let mut volume = 0.0;
        let mut vc = Point::zeros(dim);
        for s in &body {
            volume += s.measure();
            vc += s.centroid() * s.measure();
        }
        if volume.is_nan() || volume <= 0.0 {
            return Err(Error::DegenerateInput("polytope has zero volume".into()));
        }
        poly.body = body;
        poly.boundary = boundary;
        poly.facet_measures = facet_measures;
        poly.volume = volume;
        poly.surface = surface;
        poly.body_centroid = vc / volume;
        poly.boundary_centroid = bc / surface;
        Ok(poly)
    }

    /// Faces of dimension `d - 1` contained in the face `face` (dimension d).
    fn subfaces(&self, face: &[usize], d: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for facet in &self.facets {
            let inter: Vec<usize> =
                face.iter().copied().filter(|i| facet.vertex_ids.binary_search(i).is_ok()).collect();
            if inter.len() < d || inter.len() == face.len() || out.contains(&inter) {
                continue;
            }
            let refs: Vec<&Point> = inter.iter().map(|&i| &self.vertices[i]).collect();
            if affine_rank(&refs, GEOM_TOL) == d - 1 {
                out.push(inter);
            }
        }
        out
    }

    /// Fan triangulation of a d-face from its vertex average, recursively.
    fn face_simplices(&self, face: &[usize], d: usize, out: &mut Vec<Vec<Point>>) {
        if d == 1 {
            out.push(vec![self.vertices[face[0]].clone(), self.vertices[face[1]].clone()]);
            return;
        }
        let pts: Vec<Point> = face.iter().map(|&i| self.vertices[i].clone()).collect();
        let apex = mean_point(&pts);
        for sub in self.subfaces(face, d) {
            let mut inner = Vec::new();
            self.face_simplices(&sub, d - 1, &mut inner);
            for s in inner {
                let mut verts = Vec::with_capacity(d + 1);
                verts.push(apex.clone());
                verts.extend(s);
                out.push(verts);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn halfspaces(&self) -> Vec<HalfSpace> {
        self.facets.iter().map(|f| f.halfspace.clone()).collect()
    }

    /// Simplices (k = n) whose union is the body, positively oriented.
    pub fn body_simplices(&self) -> &[Simplex] {
        &self.body
    }

    /// Boundary simplices (k = n - 1) tagged with their facet index.
    pub fn boundary_simplices(&self) -> &[(usize, Simplex)] {
        &self.boundary
    }

    pub fn facet_measure(&self, facet: usize) -> f64 {
        self.facet_measures[facet]
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn surface_measure(&self) -> f64 {
        self.surface
    }

    pub fn body_centroid(&self) -> &Point {
        &self.body_centroid
    }

    pub fn boundary_centroid(&self) -> &Point {
        &self.boundary_centroid
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        self.facets.iter().all(|f| f.halfspace.slack(x) >= -tol)
    }
}

/// Vertices of `{x : normals_i . x <= offsets_i}` by solving every n-subset
/// of hyperplanes and keeping feasible, deduplicated solutions.
pub fn enumerate_vertices(normals: &[Point], offsets: &[f64], tol: f64) -> Vec<Point> {
    let Some(first) = normals.first() else {
        return Vec::new();
    };
    let n = first.len();
    let mut out: Vec<Point> = Vec::new();
    for combo in (0..normals.len()).combinations(n) {
        let a = DMatrix::from_fn(n, n, |r, c| normals[combo[r]][c]);
        let b = Point::from_iterator(n, combo.iter().map(|&i| offsets[i]));
        let lu = a.lu();
        if lu.determinant().abs() < 1e-12 {
            continue;
        }
        let Some(x) = lu.solve(&b) else { continue };
        let feasible = normals.iter().zip(offsets).all(|(nv, &o)| nv.dot(&x) <= o + tol);
        if feasible && !out.iter().any(|q| (q - &x).norm() <= tol) {
            out.push(x);
        }
    }
    out
}

/// True if some nonzero d satisfies `normal_i . d <= 0` for every halfspace.
fn has_recession_direction(halfspaces: &[HalfSpace]) -> Result<bool> {
    let n = halfspaces[0].dim();
    // Variables d = p - q with p, q >= 0, box |d_k| <= 1.
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for h in halfspaces {
        let mut r: Vec<f64> = h.normal.iter().copied().collect();
        r.extend(h.normal.iter().map(|v| -v));
        rows.push(r);
        rhs.push(0.0);
    }
    for k in 0..n {
        for sign in [1.0, -1.0] {
            let mut r = vec![0.0; 2 * n];
            r[k] = sign;
            r[n + k] = -sign;
            rows.push(r);
            rhs.push(1.0);
        }
    }
    for k in 0..n {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; 2 * n];
            c[k] = sign;
            c[n + k] = -sign;
            match lp::maximize(&c, &rows, &rhs)? {
                LpOutcome::Optimal(s) if s.value > 1e-9 => return Ok(true),
                LpOutcome::Optimal(_) => {}
                LpOutcome::Unbounded => return Ok(true),
                LpOutcome::Infeasible => {
                    return Err(Error::NumericalFailure("recession LP reported infeasible".into()))
                }
            }
        }
    }
    Ok(false)
}

/// Largest t >= 0 with `normal_i . x + t <= offset_i` for some x, or None if
/// the region is empty. Assumes boundedness.
fn chebyshev_slack(halfspaces: &[HalfSpace]) -> Result<Option<f64>> {
    let n = halfspaces[0].dim();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for h in halfspaces {
        let mut r: Vec<f64> = h.normal.iter().copied().collect();
        r.extend(h.normal.iter().map(|v| -v));
        r.push(1.0);
        rows.push(r);
        rhs.push(h.offset);
    }
    let mut cap = vec![0.0; 2 * n + 1];
    cap[2 * n] = 1.0;
    rows.push(cap.clone());
    rhs.push(1.0);
    match lp::maximize(&cap, &rows, &rhs)? {
        LpOutcome::Optimal(s) => Ok(Some(s.value)),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::UnboundedRegion),
    }
}
