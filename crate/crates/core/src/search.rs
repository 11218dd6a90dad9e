//! Search for convex functions whose body mean exceeds their boundary mean.
//!
//! The family is max-affine with `k` pieces, written relative to the body
//! centroid `c` as `max_j a_j.(x - c) + b_j` with `|a_j|_inf <= 1` and
//! `|b_j| <= diameter`. The objective (body mean minus boundary mean) is
//! maximized by compass search from seeded random starts.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checker::{jensen_gap, GapResult};
use crate::error::{Error, Result};
use crate::functions::{AffinePiece, ConvexFunc};
use crate::geometry::{Point, Shape};
use crate::measures::{body_centroid, boundary_centroid};
use crate::par;
use crate::quadrature::{mean_over_body, mean_over_boundary, QuadratureRequest};

/// The affine function maximizing the violation over `|a|_2 <= 1`:
/// `(direction, violation)`. Zero direction when the centroids coincide.
pub fn affine_worst_case(shape: &Shape) -> (Point, f64) {
    let d = body_centroid(shape) - boundary_centroid(shape);
    let norm = d.norm();
    if norm == 0.0 {
        (d, 0.0)
    } else {
        (d / norm, norm)
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub pieces: usize,
    pub restarts: usize,
    /// Objective evaluations shared by all restarts.
    pub budget: usize,
    pub seed: u64,
    pub initial_step: f64,
    pub min_step: f64,
    pub search_target: f64,
    pub certificate_target: f64,
    /// Pieces of an earlier (k-1)-piece result; restart 0 starts from them
    /// with the last piece duplicated.
    pub warm_start: Option<Vec<AffinePiece>>,
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            pieces: 1,
            restarts: 8,
            budget: 10_000,
            seed: 0,
            initial_step: 0.25,
            min_step: 1e-4,
            search_target: 1e-5,
            certificate_target: 1e-7,
            warm_start: None,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartTrace {
    pub restart: usize,
    pub start_value: f64,
    pub best_value: f64,
    pub evaluations: usize,
    pub final_step: f64,
    pub warm: bool,
    /// Whether some evaluation ran out of quadrature budget (its partial
    /// estimate was used).
    pub budget_exceeded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_function: ConvexFunc,
    /// Body mean minus boundary mean at search accuracy; positive means a
    /// violation.
    pub best_violation: f64,
    /// The best function re-evaluated at certificate accuracy.
    pub certificate: GapResult,
    pub trace: Vec<RestartTrace>,
}

impl SearchResult {
    /// Violation at certificate accuracy (the negated gap).
    pub fn certified_violation(&self) -> f64 {
        -self.certificate.gap
    }
}

/// Body mean minus boundary mean, with the budget flag.
fn objective(shape: &Shape, f: &ConvexFunc, req: &QuadratureRequest) -> Result<(f64, bool)> {
    let mut exceeded = false;
    let mut settle = |r: Result<crate::quadrature::Estimate>| match r {
        Ok(e) => Ok(e.value),
        Err(Error::BudgetExceeded { partial }) => {
            exceeded = true;
            Ok(partial.value)
        }
        Err(e) => Err(e),
    };
    let body = settle(mean_over_body(shape, f, req))?;
    let boundary = settle(mean_over_boundary(shape, f, req))?;
    Ok((body - boundary, exceeded))
}

struct Problem<'a> {
    shape: &'a Shape,
    n: usize,
    k: usize,
    anchor: Point,
    b_max: f64,
    req: QuadratureRequest,
}

impl Problem<'_> {
    fn dim(&self) -> usize {
        self.k * (self.n + 1)
    }

    fn upper(&self, i: usize) -> f64 {
        if i % (self.n + 1) == self.n {
            self.b_max
        } else {
            1.0
        }
    }

    fn function(&self, theta: &[f64]) -> ConvexFunc {
        let pieces = theta
            .chunks(self.n + 1)
            .map(|c| {
                let a = Point::from_column_slice(&c[..self.n]);
                let b = c[self.n] - a.dot(&self.anchor);
                AffinePiece::new(a, b)
            })
            .collect();
        ConvexFunc::MaxAffine(pieces)
    }

    fn encode(&self, pieces: &[AffinePiece]) -> Vec<f64> {
        let mut theta = Vec::with_capacity(self.dim());
        for p in pieces.iter().take(self.k) {
            theta.extend(p.a.iter().map(|v| v.clamp(-1.0, 1.0)));
            theta.push((p.b + p.a.dot(&self.anchor)).clamp(-self.b_max, self.b_max));
        }
        // Pad by repeating the last piece.
        while theta.len() < self.dim() {
            let last: Vec<f64> = theta[theta.len() - (self.n + 1)..].to_vec();
            theta.extend(last);
        }
        theta
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.dim()).map(|i| self.upper(i) * rng.random_range(-1.0..=1.0)).collect()
    }
}

fn compass_search(p: &Problem<'_>, mut theta: Vec<f64>, cfg: &SearchConfig, budget: usize) -> Result<(Vec<f64>, f64, RestartTrace)> {
    let mut cache: HashMap<Vec<u64>, f64> = HashMap::new();
    let mut evaluations = 0;
    let mut exceeded = false;
    let mut eval = |theta: &[f64], evaluations: &mut usize| -> Result<f64> {
        let key: Vec<u64> = theta.iter().map(|v| v.to_bits()).collect();
        if let Some(&v) = cache.get(&key) {
            return Ok(v);
        }
        *evaluations += 1;
        let (v, ex) = objective(p.shape, &p.function(theta), &p.req)?;
        exceeded |= ex;
        cache.insert(key, v);
        Ok(v)
    };
    let start_value = eval(&theta, &mut evaluations)?;
    let mut best = start_value;
    let mut step = cfg.initial_step;
    'outer: while step >= cfg.min_step {
        let mut improved = false;
        for i in 0..p.dim() {
            for dir in [1.0, -1.0] {
                if evaluations >= budget {
                    break 'outer;
                }
                let hi = p.upper(i);
                let cand = (theta[i] + dir * step * hi).clamp(-hi, hi);
                if cand == theta[i] {
                    continue;
                }
                let mut trial = theta.clone();
                trial[i] = cand;
                let v = eval(&trial, &mut evaluations)?;
                if v > best {
                    best = v;
                    theta = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let trace = RestartTrace {
        restart: 0,
        start_value,
        best_value: best,
        evaluations,
        final_step: step,
        warm: false,
        budget_exceeded: exceeded,
    };
    Ok((theta, best, trace))
}

/// Multistart compass search over `k`-piece max-affine functions.
pub fn maxaffine_search(shape: &Shape, cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.pieces == 0 || cfg.restarts == 0 {
        return Err(Error::InvalidArgument("pieces and restarts must be at least 1".into()));
    }
    let n = shape.dim();
    if let Some(ws) = &cfg.warm_start {
        if ws.iter().any(|p| p.a.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: ws[0].a.len() });
        }
    }
    let req = QuadratureRequest { target_error: cfg.search_target, seed: cfg.seed, parallel: cfg.parallel, ..Default::default() };
    let problem =
        Problem { shape, n, k: cfg.pieces, anchor: body_centroid(shape), b_max: shape.diameter(), req: req.clone() };
    let per_restart = (cfg.budget / cfg.restarts).max(1);

    let runs = par::map_range(cfg.restarts, cfg.parallel, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(r as u64 + 1);
        let (start, warm) = match (&cfg.warm_start, r) {
            (Some(ws), 0) if !ws.is_empty() => (problem.encode(ws), true),
            _ => (problem.random_start(&mut rng), false),
        };
        compass_search(&problem, start, cfg, per_restart).map(|(theta, best, mut trace)| {
            trace.restart = r;
            trace.warm = warm;
            (theta, best, trace)
        })
    });
    let mut trace = Vec::with_capacity(runs.len());
    let mut best: Option<(Vec<f64>, f64)> = None;
    for run in runs {
        let (theta, value, t) = run?;
        trace.push(t);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((theta, value));
        }
    }
    let (theta, best_violation) = best.expect("at least one restart");
    let best_function = problem.function(&theta);
    let cert_req = QuadratureRequest { target_error: cfg.certificate_target, ..req };
    let certificate = jensen_gap(shape, &best_function, &cert_req)?;
    Ok(SearchResult { best_function, best_violation, certificate, trace })
}
