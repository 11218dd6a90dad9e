//! Means over unions of simplices.
//!
//! Method ladder, per simplex:
//! 1. affine functions: exact via centroids;
//! 2. quadratic forms: exact with the degree-2 rule;
//! 3. piecewise-affine functions: exact, by clipping the simplex into the
//!    cells where each piece is active;
//! 4. anything else: adaptive Grundmann-Moller cubature (degree 7 with a
//!    degree-5 error estimate) under longest-edge bisection;
//! 5. if (4) runs out of subdivision depth: stratified Monte Carlo.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::montecarlo::{self, sample_simplex, Stratum};
use super::rules::{degree2_mean, gm_mean};
use super::{Estimate, Method, QuadratureRequest};
use crate::error::{Error, Result};
use crate::functions::{AffinePiece, ConvexFunc};
use crate::geometry::{enumerate_vertices, Point, Polytope, Simplex};
use crate::linalg::{affine_rank, edge_matrix, factorial};
use crate::par;

const MAX_CELLS_PER_SIMPLEX: usize = 20_000;

#[derive(Debug, Clone, Copy, Default)]
struct Part {
    integral: f64,
    det_err: f64,
    /// Variance of the Monte Carlo part of `integral`.
    mc_var: f64,
    evals: u64,
    method: Method,
    missed_target: bool,
}

/// Mean of `f` over the union of `simplices` (all of the same dimension).
pub(crate) fn mean_over_simplices(simplices: &[&Simplex], f: &ConvexFunc, req: &QuadratureRequest, stream_base: u64) -> Result<Estimate> {
    let n = simplices[0].ambient_dim();
    let total: f64 = simplices.iter().map(|s| s.measure()).sum();

    if let Some(p) = f.as_affine(n) {
        let integral: f64 = simplices.iter().map(|s| s.measure() * p.eval(&s.centroid())).sum();
        return Ok(Estimate::exact(integral / total, simplices.len() as u64));
    }
    if matches!(f, ConvexFunc::QuadForm { .. }) {
        let eval = |x: &Point| f.eval(x);
        let integral: f64 = simplices.iter().map(|s| s.measure() * degree2_mean(&eval, s.vertices())).sum();
        let evals = simplices.iter().map(|s| s.vertices().len() as u64).sum();
        return Ok(Estimate::exact(integral / total, evals));
    }
    let pieces = f.affine_pieces(n);

    let parts: Vec<Part> = par::map_range(simplices.len(), req.parallel, |i| {
        let s = simplices[i];
        if let Some(ps) = &pieces {
            if let Some((integral, err)) = piecewise_integral(s, ps) {
                let method = if err == 0.0 { Method::Exact } else { Method::Quadrature };
                return Part { integral, det_err: err, evals: 1, method, ..Part::default() };
            }
        }
        let tol = req.target_error * s.measure();
        let max_depth = req.max_subdivisions * s.kdim() as u32;
        match adaptive_simplex(f, s, tol, max_depth) {
            Ok(part) => part,
            Err(_) => monte_carlo_simplex(f, s, req, stream_base + i as u64),
        }
    });

    let mut integral = 0.0;
    let mut det = 0.0;
    let mut var = 0.0;
    let mut evals = 0;
    let mut method = Method::Exact;
    let mut missed = false;
    for p in &parts {
        integral += p.integral;
        det += p.det_err;
        var += p.mc_var;
        evals += p.evals;
        method = method.max(p.method);
        missed |= p.missed_target;
    }
    let error_bound = (det + 3.0 * var.sqrt()) / total;
    let est = Estimate { value: integral / total, error_bound, method, evaluations: evals };
    if missed {
        return Err(Error::BudgetExceeded { partial: est });
    }
    Ok(est)
}

/// Exact integral of `max_j (a_j . x + b_j)` over one simplex. Returns
/// `(integral, error)` where `error` is nonzero only if some active cell was
/// too thin to triangulate and its share had to be bounded instead.
fn piecewise_integral(s: &Simplex, pieces: &[AffinePiece]) -> Option<(f64, f64)> {
    let verts = s.vertices();
    let k = s.kdim();
    let e = edge_matrix(verts);
    // Pieces in barycentric-like coordinates: value = alpha . lambda + beta.
    let local: Vec<(Point, f64)> = pieces.iter().map(|p| (e.transpose() * &p.a, p.eval(&verts[0]))).collect();
    let at_vertices: Vec<Vec<f64>> = verts.iter().map(|v| pieces.iter().map(|p| p.eval(v)).collect()).collect();
    let vmax: Vec<f64> = at_vertices.iter().map(|row| row.iter().cloned().fold(f64::NEG_INFINITY, f64::max)).collect();
    let scale = vmax.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let tie = 1e-13 * scale;

    // A piece that is maximal at every vertex is maximal on the whole simplex.
    if let Some(j) = (0..pieces.len()).find(|&j| at_vertices.iter().zip(&vmax).all(|(row, m)| row[j] >= m - tie)) {
        return Some((s.measure() * pieces[j].eval(&s.centroid()), 0.0));
    }
    // Cell hulls are only built up to dimension 4.
    if k > 4 {
        return None;
    }
    // Drop pieces dominated everywhere by another piece.
    let active: Vec<usize> = (0..pieces.len())
        .filter(|&l| {
            !(0..pieces.len()).any(|j| {
                j != l
                    && at_vertices.iter().all(|row| row[l] <= row[j])
                    && (at_vertices.iter().any(|row| row[l] < row[j]) || j < l)
            })
        })
        .collect();

    let jac = factorial(k) * s.measure();
    let ref_volume = 1.0 / factorial(k);
    let mut integral = 0.0;
    let mut covered = 0.0;
    for &j in &active {
        let (aj, bj) = &local[j];
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        for i in 0..k {
            normals.push(Point::from_fn(k, |r, _| if r == i { -1.0 } else { 0.0 }));
            offsets.push(0.0);
        }
        normals.push(Point::from_element(k, 1.0 / (k as f64).sqrt()));
        offsets.push(1.0 / (k as f64).sqrt());
        for &l in &active {
            if l == j {
                continue;
            }
            let (al, bl) = &local[l];
            let nrm: Point = al - aj;
            let len = nrm.norm();
            if len < 1e-15 {
                if bl > bj || (bl == bj && l < j) {
                    normals.clear();
                    break;
                }
                continue;
            }
            normals.push(nrm / len);
            offsets.push((bj - bl) / len);
        }
        if normals.is_empty() {
            continue;
        }
        let (vol, centroid) = if k == 1 {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for (nv, &o) in normals.iter().zip(&offsets) {
                if nv[0] > 0.0 {
                    hi = hi.min(o / nv[0]);
                } else if nv[0] < 0.0 {
                    lo = lo.max(o / nv[0]);
                } else if o < 0.0 {
                    hi = lo;
                }
            }
            if hi <= lo {
                continue;
            }
            (hi - lo, Point::from_element(1, 0.5 * (lo + hi)))
        } else {
            let cell = enumerate_vertices(&normals, &offsets, 1e-12);
            let refs: Vec<&Point> = cell.iter().collect();
            if cell.len() < k + 1 || affine_rank(&refs, 1e-9) < k {
                continue;
            }
            match Polytope::from_vertices(&cell) {
                Ok(p) => (p.volume(), p.body_centroid().clone()),
                Err(_) => continue,
            }
        };
        covered += vol;
        integral += jac * vol * (aj.dot(&centroid) + bj);
    }
    let missing = (ref_volume - covered) / ref_volume;
    if missing.abs() > 1e-8 {
        return None;
    }
    let bound = vmax.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let err = if missing.abs() > 1e-12 { missing.abs() * s.measure() * bound } else { 0.0 };
    Some((integral, err))
}

struct Cell {
    verts: Vec<Point>,
    measure: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn make_cell(f: &ConvexFunc, verts: Vec<Point>, measure: f64, depth: u32, evals: &mut u64) -> Cell {
    let eval = |x: &Point| f.eval(x);
    let hi = gm_mean(&eval, &verts, 3);
    let lo = gm_mean(&eval, &verts, 2);
    let k = verts.len() - 1;
    *evals += (super::rules::grundmann_moller(k, 3).len() + super::rules::grundmann_moller(k, 2).len()) as u64;
    Cell { verts, measure, value: measure * hi, err: measure * (hi - lo).abs(), depth }
}

fn bisect(cell: &Cell) -> (Vec<Point>, Vec<Point>) {
    let v = &cell.verts;
    let mut best = (0, 1, -1.0);
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = (&v[i] - &v[j]).norm_squared();
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    let (i, j, _) = best;
    let mid = (&v[i] + &v[j]) * 0.5;
    let mut a = v.clone();
    let mut b = v.clone();
    a[j] = mid.clone();
    b[i] = mid;
    (a, b)
}

/// Adaptive cubature on one simplex to absolute integral tolerance `tol`.
fn adaptive_simplex(f: &ConvexFunc, s: &Simplex, tol: f64, max_depth: u32) -> std::result::Result<Part, ()> {
    let mut evals = 0;
    let root = make_cell(f, s.vertices().to_vec(), s.measure(), 0, &mut evals);
    let mut total_err = root.err;
    let mut heap = BinaryHeap::new();
    heap.push(root);
    while total_err > tol {
        if heap.len() >= MAX_CELLS_PER_SIMPLEX {
            return Err(());
        }
        let worst = heap.pop().expect("heap is nonempty");
        if worst.depth >= max_depth {
            return Err(());
        }
        let (a, b) = bisect(&worst);
        let half = 0.5 * worst.measure;
        let ca = make_cell(f, a, half, worst.depth + 1, &mut evals);
        let cb = make_cell(f, b, half, worst.depth + 1, &mut evals);
        total_err += ca.err + cb.err - worst.err;
        heap.push(ca);
        heap.push(cb);
    }
    let cells = heap.into_vec();
    let integral = cells.iter().map(|c| c.value).sum();
    let det_err = cells.iter().map(|c| c.err).sum();
    Ok(Part { integral, det_err, evals, method: Method::Quadrature, ..Part::default() })
}

fn monte_carlo_simplex(f: &ConvexFunc, s: &Simplex, req: &QuadratureRequest, stream: u64) -> Part {
    let verts = s.vertices();
    let strata = [Stratum { weight: 1.0, sampler: Box::new(|rng: &mut rand_chacha::ChaCha8Rng| f.eval(&sample_simplex(rng, verts))) }];
    let out = montecarlo::stratified(&strata, req.mc_target_error, req.max_mc_samples, req.seed, stream, req.parallel);
    Part {
        integral: s.measure() * out.mean,
        det_err: 0.0,
        mc_var: (s.measure() * out.std_error).powi(2),
        evals: out.samples,
        method: Method::MonteCarlo,
        missed_target: 3.0 * out.std_error > req.mc_target_error,
    }
}
