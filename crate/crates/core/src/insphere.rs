//! Largest inscribed ball of a polytope and tangency to its facets.

use crate::error::{Error, Result};
use crate::geometry::{Point, Polytope};
use crate::lp::{self, LpOutcome};

/// Facet gaps below this count as tangency.
pub const TANGENCY_TOL: f64 = 1e-7;

/// Residual allowed in the optimality certificate.
const CERT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct InsphereResult {
    pub center: Point,
    pub radius: f64,
    /// `offset - normal . center - radius`, one per facet.
    pub facet_gaps: Vec<f64>,
    pub tangent_to_all: bool,
    /// Whether the center is the only center of a largest inscribed ball.
    pub unique: bool,
    /// LP multipliers, one per facet; they sum to one and balance the
    /// facet normals.
    pub multipliers: Vec<f64>,
}

impl InsphereResult {
    pub fn worst_gap(&self) -> f64 {
        self.facet_gaps.iter().cloned().fold(0.0, f64::max)
    }
}

/// Chebyshev center with the default tangency tolerance.
pub fn chebyshev_center(poly: &Polytope) -> Result<InsphereResult> {
    chebyshev_center_with_tol(poly, TANGENCY_TOL)
}

/// Solves `max r  s.t.  normal_i . x + r <= offset_i` and certifies the
/// optimum through the dual multipliers.
pub fn chebyshev_center_with_tol(poly: &Polytope, tol: f64) -> Result<InsphereResult> {
    let n = poly.dim();
    let hs = poly.halfspaces();
    // The LP wants nonnegative variables: x = p + y+ - y-, with p the
    // vertex average, which is interior, so the origin is feasible.
    let p = crate::linalg::mean_point(poly.vertices());
    let rows: Vec<Vec<f64>> = hs
        .iter()
        .map(|h| {
            let mut row = Vec::with_capacity(2 * n + 1);
            row.extend(h.normal().iter());
            row.extend(h.normal().iter().map(|v| -v));
            row.push(1.0);
            row
        })
        .collect();
    let rhs: Vec<f64> = hs.iter().map(|h| h.slack(&p)).collect();
    let mut obj = vec![0.0; 2 * n + 1];
    obj[2 * n] = 1.0;
    let sol = match lp::maximize(&obj, &rows, &rhs)? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Err(Error::EmptyRegion),
        LpOutcome::Unbounded => return Err(Error::UnboundedRegion),
    };
    let center = Point::from_fn(n, |i, _| p[i] + sol.x[i] - sol.x[n + i]);
    let radius = sol.x[2 * n];

    let facet_gaps: Vec<f64> = hs.iter().map(|h| h.slack(&center) - radius).collect();
    let y = &sol.duals;
    let balance = hs.iter().zip(y).fold(Point::zeros(n), |acc, (h, w)| acc + h.normal() * *w);
    let sum: f64 = y.iter().sum();
    let comp = facet_gaps.iter().zip(y).map(|(g, w)| (g * w).abs()).fold(0.0, f64::max);
    let infeasible = facet_gaps.iter().cloned().fold(0.0f64, |a, g| a.max(-g));
    if radius <= 0.0 || infeasible > CERT_TOL || comp > CERT_TOL || balance.amax() > CERT_TOL || (sum - 1.0).abs() > CERT_TOL {
        return Err(Error::NumericalFailure(format!(
            "inscribed-ball LP certificate failed (infeasibility {infeasible:.1e}, complementarity {comp:.1e}, balance {:.1e}, multiplier sum {sum})",
            balance.amax()
        )));
    }
    let unique = center_is_unique(poly, &facet_gaps, tol)?;
    let (center, facet_gaps) = if unique {
        (center, facet_gaps)
    } else {
        let c = recenter(poly, &center, radius, &facet_gaps, y)?;
        let gaps = hs.iter().map(|h| h.slack(&c) - radius).collect();
        (c, gaps)
    };
    let tangent_to_all = facet_gaps.iter().all(|&g| g < tol);
    Ok(InsphereResult { center, radius, facet_gaps, tangent_to_all, unique, multipliers: sol.duals })
}

/// Among all centers of largest inscribed balls, the one farthest from the
/// facets the ball need not touch. Facets with a positive multiplier touch
/// every largest ball; the others get a common extra margin `t` that is
/// maximized. For a rectangle this is the center of the rectangle.
fn recenter(poly: &Polytope, x0: &Point, radius: f64, gaps: &[f64], multipliers: &[f64]) -> Result<Point> {
    let n = poly.dim();
    let hs = poly.halfspaces();
    // Variables: x = x0 + z+ - z-, and t.
    let rows: Vec<Vec<f64>> = hs
        .iter()
        .zip(multipliers)
        .map(|(h, &w)| {
            let mut row: Vec<f64> = h.normal().iter().cloned().chain(h.normal().iter().map(|v| -v)).collect();
            row.push(if w > 1e-12 { 0.0 } else { 1.0 });
            row
        })
        .collect();
    let rhs: Vec<f64> = gaps.iter().map(|g| g.max(0.0)).collect();
    let mut obj = vec![0.0; 2 * n + 1];
    obj[2 * n] = 1.0;
    match lp::maximize(&obj, &rows, &rhs)? {
        LpOutcome::Optimal(s) => Ok(Point::from_fn(n, |i, _| x0[i] + s.x[i] - s.x[n + i])),
        _ => Err(Error::NumericalFailure(format!("recentering LP failed at radius {radius}"))),
    }
}

/// The optimal center can move along `d` iff `normal_i . d <= 0` for every
/// facet touching the ball; it is unique iff that cone is `{0}`.
fn center_is_unique(poly: &Polytope, gaps: &[f64], tol: f64) -> Result<bool> {
    let n = poly.dim();
    let active: Vec<Point> =
        poly.halfspaces().iter().zip(gaps).filter(|(_, g)| **g < tol).map(|(h, _)| h.normal().clone()).collect();
    // Variables d+ and d-, both in [0, 1].
    let mut rows: Vec<Vec<f64>> =
        active.iter().map(|a| a.iter().cloned().chain(a.iter().map(|v| -v)).collect()).collect();
    let mut rhs = vec![0.0; rows.len()];
    for k in 0..2 * n {
        let mut row = vec![0.0; 2 * n];
        row[k] = 1.0;
        rows.push(row);
        rhs.push(1.0);
    }
    for k in 0..n {
        for sign in [1.0, -1.0] {
            let mut obj = vec![0.0; 2 * n];
            obj[k] = sign;
            obj[n + k] = -sign;
            match lp::maximize(&obj, &rows, &rhs)? {
                LpOutcome::Optimal(s) if s.value > 1e-9 => return Ok(false),
                LpOutcome::Optimal(_) => {}
                _ => return Err(Error::NumericalFailure("direction LP did not solve".into())),
            }
        }
    }
    Ok(true)
}

/// `(tangent to all facets, worst facet gap)`.
pub fn tangency_report(poly: &Polytope, tol: f64) -> Result<(bool, f64)> {
    let r = chebyshev_center_with_tol(poly, tol)?;
    Ok((r.tangent_to_all, r.worst_gap()))
}
