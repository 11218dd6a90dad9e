//! Means of convex functions over bodies, boundaries and segments.

mod montecarlo;
pub mod rules;
mod simplicial;
mod sphere;

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::functions::{AffinePiece, ConvexFunc};
use crate::geometry::{Parallelotope, Point, Shape, Simplex};
use montecarlo::Stratum;

const BODY_STREAM: u64 = 0;
const BOUNDARY_STREAM: u64 = 1 << 40;

/// How an estimate was obtained, ordered from most to least certain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Method {
    #[default]
    Exact,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A mean with an absolute error bound. Monte Carlo bounds are three
/// standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error_bound: f64,
    pub method: Method,
    pub evaluations: u64,
}

impl Estimate {
    pub fn exact(value: f64, evaluations: u64) -> Self {
        Self { value, error_bound: 0.0, method: Method::Exact, evaluations }
    }

    /// Non-exact estimates always carry a positive bound: a computed error
    /// of zero is raised to the roundoff level of `value`.
    pub fn new(value: f64, error_bound: f64, method: Method, evaluations: u64) -> Self {
        let error_bound = if method == Method::Exact {
            0.0
        } else {
            error_bound.max(4.0 * f64::EPSILON * (1.0 + value.abs()))
        };
        Self { value, error_bound, method, evaluations }
    }
}

/// Accuracy targets and budgets for one quadrature call.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRequest {
    /// Absolute target on the mean for deterministic rules.
    pub target_error: f64,
    /// Absolute target (three standard errors) for Monte Carlo.
    pub mc_target_error: f64,
    pub max_subdivisions: u32,
    pub seed: u64,
    pub max_mc_samples: u64,
    pub parallel: bool,
}

impl Default for QuadratureRequest {
    fn default() -> Self {
        Self {
            target_error: 1e-6,
            mc_target_error: 1e-4,
            max_subdivisions: 12,
            seed: 0,
            max_mc_samples: 1 << 22,
            parallel: true,
        }
    }
}

impl QuadratureRequest {
    pub fn with_target(mut self, target_error: f64) -> Self {
        self.target_error = target_error;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.target_error > 0.0 && self.mc_target_error > 0.0) {
            return Err(Error::InvalidArgument("target errors must be positive".into()));
        }
        Ok(())
    }
}

/// Mean of `f` along the segment from `a` to `b`: adaptive 16-point
/// Gauss-Legendre, exact for piecewise-affine `f`.
pub fn mean_over_segment(f: &ConvexFunc, a: &Point, b: &Point, req: &QuadratureRequest) -> Result<Estimate> {
    req.validate()?;
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    f.check_dim(a.len())?;
    if (a - b).norm() == 0.0 {
        return Err(Error::DegenerateInput("segment endpoints coincide".into()));
    }
    if let Some(p) = f.as_affine(a.len()) {
        return Ok(Estimate::exact(p.eval(&((a + b) * 0.5)), 1));
    }
    if let Some(pieces) = f.affine_pieces(a.len()) {
        return Ok(segment_envelope_mean(&pieces, a, b));
    }
    let d = b - a;
    let mut g = |t: f64| f.eval(&(a + &d * t));
    let out = rules::adaptive_gl(&mut g, 0.0, 1.0, req.target_error, req.max_subdivisions);
    let est = Estimate::new(out.value, out.error, Method::Quadrature, out.evaluations);
    if out.converged {
        Ok(est)
    } else {
        Err(Error::BudgetExceeded { partial: est })
    }
}

/// Each piece restricted to the segment is a line in `t`; between
/// consecutive pairwise crossings one line is on top, so the midpoint rule
/// is exact there.
fn segment_envelope_mean(pieces: &[AffinePiece], a: &Point, b: &Point) -> Estimate {
    let lines: Vec<(f64, f64)> = pieces.iter().map(|p| (p.a.dot(&(b - a)), p.eval(a))).collect();
    let mut cuts = vec![0.0, 1.0];
    for (i, &(si, ci)) in lines.iter().enumerate() {
        for &(sj, cj) in &lines[i + 1..] {
            if si != sj {
                let t = (cj - ci) / (si - sj);
                if t > 0.0 && t < 1.0 {
                    cuts.push(t);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let top = |t: f64| lines.iter().map(|(s, c)| s * t + c).fold(f64::NEG_INFINITY, f64::max);
    let mean = cuts.windows(2).map(|w| (w[1] - w[0]) * top(0.5 * (w[0] + w[1]))).sum();
    Estimate::exact(mean, (cuts.len() - 1) as u64)
}

/// Mean of `f` over the body of `shape`.
pub fn mean_over_body(shape: &Shape, f: &ConvexFunc, req: &QuadratureRequest) -> Result<Estimate> {
    req.validate()?;
    f.check_dim(shape.dim())?;
    match shape {
        Shape::Polytope(p) => simplices(p.body_simplices().iter(), f, req, BODY_STREAM),
        Shape::Cone(c) => simplices(c.hull().body_simplices().iter(), f, req, BODY_STREAM),
        Shape::Ball(b) => sphere::body_mean(b, f, req, BODY_STREAM),
        Shape::Parallelotope(p) => {
            if let Some(a) = f.as_affine(shape.dim()) {
                return Ok(Estimate::exact(a.eval(&p.center()), 1));
            }
            match p.body_simplices() {
                Some(s) => simplices(s.iter(), f, req, BODY_STREAM),
                None => Ok(parallelotope_body_mc(p, f, req)),
            }
        }
    }
}

/// Mean of `f` over the boundary of `shape` with respect to surface measure.
pub fn mean_over_boundary(shape: &Shape, f: &ConvexFunc, req: &QuadratureRequest) -> Result<Estimate> {
    req.validate()?;
    f.check_dim(shape.dim())?;
    match shape {
        Shape::Polytope(p) => simplices(p.boundary_simplices().iter().map(|(_, s)| s), f, req, BOUNDARY_STREAM),
        Shape::Cone(c) => simplices(c.hull().boundary_simplices().iter().map(|(_, s)| s), f, req, BOUNDARY_STREAM),
        Shape::Ball(b) => sphere::boundary_mean(b, f, req, BOUNDARY_STREAM),
        Shape::Parallelotope(p) => {
            if let Some(a) = f.as_affine(shape.dim()) {
                return Ok(Estimate::exact(a.eval(&p.center()), 1));
            }
            match p.boundary_simplices() {
                Some(s) => simplices(s.iter().map(|(_, s)| s), f, req, BOUNDARY_STREAM),
                None => Ok(parallelotope_boundary_mc(p, f, req)),
            }
        }
    }
}

/// Measure-weighted mean of `f` over a union of simplices of one common
/// dimension.
pub fn mean_over_simplices(simplices: &[&Simplex], f: &ConvexFunc, req: &QuadratureRequest) -> Result<Estimate> {
    req.validate()?;
    let first = simplices.first().ok_or_else(|| Error::InvalidArgument("no simplices given".into()))?;
    if simplices.iter().any(|s| s.kdim() != first.kdim() || s.ambient_dim() != first.ambient_dim()) {
        return Err(Error::InvalidArgument("simplices must share one dimension".into()));
    }
    f.check_dim(first.ambient_dim())?;
    simplicial::mean_over_simplices(simplices, f, req, BODY_STREAM)
}

fn simplices<'a>(it: impl Iterator<Item = &'a Simplex>, f: &ConvexFunc, req: &QuadratureRequest, stream: u64) -> Result<Estimate> {
    let list: Vec<&Simplex> = it.collect();
    simplicial::mean_over_simplices(&list, f, req, stream)
}

/// Uniform coefficients in the unit cube, paired with their reflection
/// through the center.
fn parallelotope_body_mc(p: &Parallelotope, f: &ConvexFunc, req: &QuadratureRequest) -> Estimate {
    let n = p.dim();
    let strata = [Stratum {
        weight: 1.0,
        sampler: Box::new(move |rng: &mut ChaCha8Rng| {
            let t: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let s: Vec<f64> = t.iter().map(|x| 1.0 - x).collect();
            0.5 * (f.eval(&p.point(&t)) + f.eval(&p.point(&s)))
        }) as Box<_>,
    }];
    let out = montecarlo::stratified(&strata, req.mc_target_error, req.max_mc_samples, req.seed, BODY_STREAM, req.parallel);
    Estimate::new(out.mean, 3.0 * out.std_error, Method::MonteCarlo, out.samples)
}

/// One stratum per pair of opposite facets; a point on `S_i` is paired with
/// its reflection through the center, which lies on the opposite facet.
fn parallelotope_boundary_mc(p: &Parallelotope, f: &ConvexFunc, req: &QuadratureRequest) -> Estimate {
    let center2 = p.center() * 2.0;
    let pairs = p.facet_pairs();
    let strata: Vec<Stratum> = pairs
        .iter()
        .map(|pair| {
            let patch = &pair.base;
            let c2 = &center2;
            Stratum {
                weight: pair.measure,
                sampler: Box::new(move |rng: &mut ChaCha8Rng| {
                    let t: Vec<f64> = (0..patch.spans.len()).map(|_| rng.random::<f64>()).collect();
                    let x = patch.point(&t);
                    0.5 * (f.eval(&x) + f.eval(&(c2 - &x)))
                }) as Box<_>,
            }
        })
        .collect();
    let out = montecarlo::stratified(&strata, req.mc_target_error, req.max_mc_samples, req.seed, BOUNDARY_STREAM, req.parallel);
    Estimate::new(out.mean, 3.0 * out.std_error, Method::MonteCarlo, out.samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn segment_tent() {
        let f = ConvexFunc::pnorm(1.0, dvector![0.5, 0.0]).unwrap();
        let e = mean_over_segment(&f, &dvector![0.0, 0.0], &dvector![1.0, 0.0], &QuadratureRequest::default()).unwrap();
        assert!((e.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn segment_affine_is_exact() {
        let f = ConvexFunc::coord_proj(1, 1.0).unwrap();
        let e = mean_over_segment(&f, &dvector![0.0, 0.0], &dvector![1.0, 0.0], &QuadratureRequest::default()).unwrap();
        assert_eq!(e.value, 0.5);
        assert_eq!(e.method, Method::Exact);
    }

    #[test]
    fn nonexact_bounds_are_positive() {
        let e = Estimate::new(1.0, 0.0, Method::Quadrature, 1);
        assert!(e.error_bound > 0.0);
    }
}
