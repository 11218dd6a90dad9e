//! Means over balls and spheres.
//!
//! Circles are handled exactly for piecewise-affine functions (the active
//! piece changes at finitely many angles) and by the periodic trapezoid
//! rule otherwise. The 2-sphere is sliced into latitude circles, which by
//! Archimedes' theorem are uniformly distributed in height. Ball bodies
//! integrate sphere means radially with weight `n r^(n-1) / R^n`. From
//! n = 4 on, both are estimated by antithetic Monte Carlo.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::montecarlo::{self, sample_direction, Stratum};
use super::rules::adaptive_gl;
use super::{Estimate, Method, QuadratureRequest};
use crate::error::{Error, Result};
use crate::functions::{AffinePiece, ConvexFunc};
use crate::geometry::{Ball, Point};

const MAX_TRAPEZOID_NODES: usize = 1 << 17;

#[derive(Debug, Clone, Copy, Default)]
struct Approx {
    value: f64,
    err: f64,
    evals: u64,
    converged: bool,
    exact: bool,
}

/// Circle `center + rho (cos phi u + sin phi v)` with orthonormal `u`, `v`.
struct Circle<'a> {
    center: Point,
    u: &'a Point,
    v: &'a Point,
    rho: f64,
}

impl Circle<'_> {
    fn point(&self, phi: f64) -> Point {
        let mut x = self.center.clone();
        x.axpy(self.rho * phi.cos(), self.u, 1.0);
        x.axpy(self.rho * phi.sin(), self.v, 1.0);
        x
    }
}

/// Exact circle mean of `max_j (a_j . x + b_j)`.
fn circle_mean_pieces(c: &Circle<'_>, pieces: &[AffinePiece]) -> f64 {
    // Piece j restricted to the circle: A + B cos phi + C sin phi.
    let coeffs: Vec<(f64, f64, f64)> = pieces
        .iter()
        .map(|p| (p.eval(&c.center), c.rho * p.a.dot(c.u), c.rho * p.a.dot(c.v)))
        .collect();
    let mut breaks = vec![0.0, TAU];
    for (j, &(aj, bj, cj)) in coeffs.iter().enumerate() {
        for &(al, bl, cl) in &coeffs[j + 1..] {
            let (d, e, f) = (aj - al, bj - bl, cj - cl);
            let amp = e.hypot(f);
            if amp < 1e-300 || d.abs() > amp {
                continue;
            }
            let psi = f.atan2(e);
            let spread = (-d / amp).clamp(-1.0, 1.0).acos();
            for phi in [psi + spread, psi - spread] {
                breaks.push(phi.rem_euclid(TAU));
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (p0, p1) = (w[0], w[1]);
        if p1 - p0 <= 0.0 {
            continue;
        }
        let mid = 0.5 * (p0 + p1);
        let (cm, sm) = (mid.cos(), mid.sin());
        let &(a, b, s) = coeffs
            .iter()
            .max_by(|x, y| (x.0 + x.1 * cm + x.2 * sm).total_cmp(&(y.0 + y.1 * cm + y.2 * sm)))
            .expect("at least one piece");
        total += a * (p1 - p0) + b * (p1.sin() - p0.sin()) - s * (p1.cos() - p0.cos());
    }
    total / TAU
}

/// Periodic trapezoid rule with node doubling until successive means agree
/// to `tol`.
fn circle_mean_trapezoid(c: &Circle<'_>, f: &ConvexFunc, tol: f64) -> Approx {
    let mut m = 16;
    let mut sum: f64 = (0..m).map(|j| f.eval(&c.point(TAU * j as f64 / m as f64))).sum();
    let mut evals = m as u64;
    let mut prev = sum / m as f64;
    loop {
        let odd: f64 = (0..m).map(|j| f.eval(&c.point(TAU * (2 * j + 1) as f64 / (2 * m) as f64))).sum();
        evals += m as u64;
        sum += odd;
        m *= 2;
        let cur = sum / m as f64;
        let diff = (cur - prev).abs();
        if diff <= tol || m >= MAX_TRAPEZOID_NODES {
            return Approx { value: cur, err: diff, evals, converged: diff <= tol, exact: false };
        }
        prev = cur;
    }
}

fn circle_mean(c: &Circle<'_>, f: &ConvexFunc, pieces: Option<&[AffinePiece]>, tol: f64) -> Approx {
    match pieces {
        Some(ps) => Approx { value: circle_mean_pieces(c, ps), err: 0.0, evals: 1, converged: true, exact: true },
        None => circle_mean_trapezoid(c, f, tol),
    }
}

fn unit(n: usize, i: usize) -> Point {
    Point::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 })
}

/// Mean over the sphere of radius `r` about `center` for n in {2, 3}.
fn sphere_mean(center: &Point, r: f64, f: &ConvexFunc, pieces: Option<&[AffinePiece]>, tol: f64, depth: u32) -> Approx {
    let n = center.len();
    let (e1, e2) = (unit(n, 0), unit(n, 1));
    if n == 2 {
        return circle_mean(&Circle { center: center.clone(), u: &e1, v: &e2, rho: r }, f, pieces, tol);
    }
    debug_assert_eq!(n, 3);
    if let ConvexFunc::PNorm { p, center: q } = f {
        if *p == 2.0 {
            // Shell theorem for the distance to a fixed point.
            let d = (q - center).norm();
            let value = if d <= r { r + d * d / (3.0 * r) } else { d + r * r / (3.0 * d) };
            return Approx { value, err: 0.0, evals: 1, converged: true, exact: true };
        }
    }
    let e3 = unit(n, 2);
    let mut inner_err: f64 = 0.0;
    let mut inner_evals = 0;
    let mut inner_ok = true;
    let mut slice = |t: f64| {
        let mut c = center.clone();
        c.axpy(r * t, &e3, 1.0);
        let rho = r * (1.0 - t * t).max(0.0).sqrt();
        let a = circle_mean(&Circle { center: c, u: &e1, v: &e2, rho }, f, pieces, 0.5 * tol);
        inner_err = inner_err.max(a.err);
        inner_evals += a.evals;
        inner_ok &= a.converged;
        a.value
    };
    let out = adaptive_gl(&mut slice, -1.0, 1.0, tol, depth);
    Approx {
        value: 0.5 * out.value,
        err: 0.5 * out.error + inner_err,
        evals: inner_evals,
        converged: out.converged && inner_ok,
        exact: false,
    }
}

/// Closed forms for affine functions and quadratic forms: returns
/// `(boundary mean, body mean)`.
fn closed_form(ball: &Ball, f: &ConvexFunc) -> Option<(f64, f64)> {
    let n = ball.dim();
    let c = ball.center();
    if let Some(p) = f.as_affine(n) {
        let v = p.eval(c);
        return Some((v, v));
    }
    if let ConvexFunc::QuadForm { factor, .. } = f {
        // For y uniform on the unit sphere E|Gy|^2 = tr(G^T G) / n; in the
        // unit ball it is tr(G^T G) / (n + 2). Odd moments vanish.
        let tr = factor.norm_squared();
        let r2 = ball.radius() * ball.radius();
        let at_center = f.eval(c);
        return Some((at_center + tr * r2 / n as f64, at_center + tr * r2 / (n + 2) as f64));
    }
    None
}

fn finish(a: Approx) -> Result<Estimate> {
    let method = if a.exact { Method::Exact } else { Method::Quadrature };
    let est = Estimate::new(a.value, a.err, method, a.evals);
    if a.converged {
        Ok(est)
    } else {
        Err(Error::BudgetExceeded { partial: est })
    }
}

fn depth(req: &QuadratureRequest) -> u32 {
    3 * req.max_subdivisions
}

pub(crate) fn boundary_mean(ball: &Ball, f: &ConvexFunc, req: &QuadratureRequest, stream: u64) -> Result<Estimate> {
    if let Some((boundary, _)) = closed_form(ball, f) {
        return Ok(Estimate::exact(boundary, 1));
    }
    let n = ball.dim();
    let pieces = f.affine_pieces(n);
    if n <= 3 {
        return finish(sphere_mean(ball.center(), ball.radius(), f, pieces.as_deref(), req.target_error, depth(req)));
    }
    let (c, r) = (ball.center(), ball.radius());
    let strata = [Stratum {
        weight: 1.0,
        sampler: Box::new(move |rng: &mut ChaCha8Rng| {
            let u = sample_direction(rng, n) * r;
            0.5 * (f.eval(&(c + &u)) + f.eval(&(c - &u)))
        }),
    }];
    Ok(monte_carlo(&strata, req, stream))
}

pub(crate) fn body_mean(ball: &Ball, f: &ConvexFunc, req: &QuadratureRequest, stream: u64) -> Result<Estimate> {
    if let Some((_, body)) = closed_form(ball, f) {
        return Ok(Estimate::exact(body, 1));
    }
    let n = ball.dim();
    let (c, big_r) = (ball.center(), ball.radius());
    if n <= 3 {
        let pieces = f.affine_pieces(n);
        let mut inner_err: f64 = 0.0;
        let mut evals = 0;
        let mut ok = true;
        let mut radial = |r: f64| {
            if r <= 0.0 {
                return 0.0;
            }
            let a = sphere_mean(c, r, f, pieces.as_deref(), 0.5 * req.target_error, depth(req));
            inner_err = inner_err.max(a.err);
            evals += a.evals;
            ok &= a.converged;
            n as f64 * r.powi(n as i32 - 1) / big_r.powi(n as i32) * a.value
        };
        let out = adaptive_gl(&mut radial, 0.0, big_r, 0.5 * req.target_error, depth(req));
        return finish(Approx { value: out.value, err: out.error + inner_err, evals, converged: out.converged && ok, exact: false });
    }
    let strata = [Stratum {
        weight: 1.0,
        sampler: Box::new(move |rng: &mut ChaCha8Rng| {
            let rad = big_r * rng.random::<f64>().powf(1.0 / n as f64);
            let u = sample_direction(rng, n) * rad;
            0.5 * (f.eval(&(c + &u)) + f.eval(&(c - &u)))
        }),
    }];
    Ok(monte_carlo(&strata, req, stream))
}

/// Monte Carlo is the designated method here, so a bound above the target
/// is reported as is rather than as a failure.
fn monte_carlo(strata: &[Stratum<'_>], req: &QuadratureRequest, stream: u64) -> Estimate {
    let out = montecarlo::stratified(strata, req.mc_target_error, req.max_mc_samples, req.seed, stream, req.parallel);
    Estimate::new(out.mean, 3.0 * out.std_error, Method::MonteCarlo, out.samples)
}
