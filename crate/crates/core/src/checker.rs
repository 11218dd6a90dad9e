//! Body-versus-boundary comparisons and the cone and inscribed-ball bounds.

use std::fmt;

use crate::error::{Error, Result};
use crate::functions::{standard_suite, ConvexFunc};
use crate::geometry::{unit_ball_volume, unit_sphere_area, Cone, Point, Polytope, Shape};
use crate::insphere::{chebyshev_center, InsphereResult};
use crate::measures::{body_centroid, boundary_centroid, centroid_report, CentroidReport};
use crate::par;
use crate::quadrature::{mean_over_body, mean_over_boundary, mean_over_simplices, Estimate, QuadratureRequest};

/// Relative allowance for floating-point roundoff added to every combined
/// error bound, so that exact equalities computed two ways are not
/// reported as violations.
const ROUNDOFF: f64 = 1e-12;

fn roundoff(values: &[f64]) -> f64 {
    ROUNDOFF * (1.0 + values.iter().map(|v| v.abs()).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// `gap >= -error bound`: no violation beyond the numerical error.
    Holds,
    /// `gap < -error bound`: the body mean exceeds the boundary mean.
    Violated,
    /// A quadrature budget ran out before either could be decided.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapResult {
    pub body_mean: Estimate,
    pub boundary_mean: Estimate,
    /// Boundary mean minus body mean.
    pub gap: f64,
    pub gap_error_bound: f64,
    pub verdict: Verdict,
    /// Set when a quadrature budget was exceeded.
    pub diagnostic: Option<String>,
}

/// Turns a budget failure into its partial estimate plus a message.
fn settle(r: Result<Estimate>, what: &str) -> Result<(Estimate, Option<String>)> {
    match r {
        Ok(e) => Ok((e, None)),
        Err(Error::BudgetExceeded { partial }) => Ok((
            partial,
            Some(format!("{what}: budget exceeded, best {:.6e} +/- {:.1e}", partial.value, partial.error_bound)),
        )),
        Err(e) => Err(e),
    }
}

pub fn jensen_gap(shape: &Shape, f: &ConvexFunc, req: &QuadratureRequest) -> Result<GapResult> {
    let (body_mean, d1) = settle(mean_over_body(shape, f, req), "body mean")?;
    let (boundary_mean, d2) = settle(mean_over_boundary(shape, f, req), "boundary mean")?;
    let gap = boundary_mean.value - body_mean.value;
    let gap_error_bound =
        body_mean.error_bound + boundary_mean.error_bound + roundoff(&[body_mean.value, boundary_mean.value]);
    let diagnostic = match (d1, d2) {
        (None, None) => None,
        (a, b) => Some(a.into_iter().chain(b).collect::<Vec<_>>().join("; ")),
    };
    let verdict = if diagnostic.is_some() {
        Verdict::Inconclusive
    } else if gap < -gap_error_bound {
        Verdict::Violated
    } else {
        Verdict::Holds
    };
    Ok(GapResult { body_mean, boundary_mean, gap, gap_error_bound, verdict, diagnostic })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overall {
    CounterexampleFound,
    ConsistentWithJensenType,
}

impl Overall {
    pub fn as_str(self) -> &'static str {
        match self {
            Overall::CounterexampleFound => "counterexample found",
            Overall::ConsistentWithJensenType => "consistent with Jensen-type",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteEntry {
    pub function: ConvexFunc,
    pub result: GapResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JensenReport {
    pub shape: String,
    pub dim: usize,
    pub entries: Vec<SuiteEntry>,
    pub centroids: CentroidReport,
    pub insphere: Option<InsphereResult>,
    pub identity_residuals: Vec<(String, f64)>,
    pub overall: Overall,
    pub note: String,
}

impl JensenReport {
    pub fn violations(&self) -> impl Iterator<Item = &SuiteEntry> {
        self.entries.iter().filter(|e| e.result.verdict == Verdict::Violated)
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.entries.iter().filter(|e| e.result.verdict == verdict).count()
    }
}

/// The standard suite placed around the body's centroid at half its
/// diameter.
pub fn suite_for(shape: &Shape, seed: u64) -> Vec<ConvexFunc> {
    standard_suite(shape.dim(), &body_centroid(shape), 0.5 * shape.diameter(), seed)
}

/// Polytope view used for the inscribed-ball summary, when there is one.
fn as_polytope(shape: &Shape) -> Option<Polytope> {
    match shape {
        Shape::Polytope(p) => Some(p.clone()),
        Shape::Cone(c) => Some(c.hull().clone()),
        Shape::Parallelotope(p) if p.dim() <= 4 => shape.to_polytope().ok(),
        _ => None,
    }
}

/// Relative residuals of the measure identities that apply to `shape`.
pub fn identity_residuals(shape: &Shape, insphere: Option<&InsphereResult>) -> Vec<(String, f64)> {
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    match shape {
        Shape::Ball(b) => {
            let n = b.dim();
            out.push(("n|B_n| = |S_(n-1)|".to_string(), rel(n as f64 * unit_ball_volume(n), unit_sphere_area(n))));
        }
        Shape::Cone(c) => {
            let n = c.dim() as f64;
            out.push(("|G| = H|base|/n".to_string(), rel(c.hull().volume(), c.height() * c.base_measure() / n)));
        }
        Shape::Parallelotope(p) => {
            if let Some(s) = p.body_simplices() {
                out.push(("sum of simplex volumes = |det V|".to_string(), rel(s.iter().map(|s| s.measure()).sum(), p.volume())));
            }
        }
        Shape::Polytope(_) => {}
    }
    if let (Some(ins), Some(poly)) = (insphere, as_polytope(shape)) {
        if ins.tangent_to_all {
            let n = poly.dim() as f64;
            out.push(("|W| = (r/n)|dW|".to_string(), rel(poly.volume(), ins.radius / n * poly.surface_measure())));
        }
    }
    out
}

/// Runs [`jensen_gap`] for every suite member.
pub fn jensen_verdict(shape: &Shape, suite: &[ConvexFunc], req: &QuadratureRequest) -> Result<JensenReport> {
    if suite.is_empty() {
        return Err(Error::InvalidArgument("the function suite is empty".into()));
    }
    for f in suite {
        f.check_dim(shape.dim())?;
    }
    let results = par::map(suite, req.parallel, |f| jensen_gap(shape, f, req));
    let mut entries = Vec::with_capacity(suite.len());
    for (f, r) in suite.iter().zip(results) {
        entries.push(SuiteEntry { function: f.clone(), result: r? });
    }
    let insphere = as_polytope(shape).and_then(|p| chebyshev_center(&p).ok());
    let identity_residuals = identity_residuals(shape, insphere.as_ref());
    let overall = if entries.iter().any(|e| e.result.verdict == Verdict::Violated) {
        Overall::CounterexampleFound
    } else {
        Overall::ConsistentWithJensenType
    };
    Ok(JensenReport {
        shape: shape.describe(),
        dim: shape.dim(),
        entries,
        centroids: centroid_report(shape),
        insphere,
        identity_residuals,
        overall,
        note: "passing a finite suite is evidence, not a proof".to_string(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeBound {
    /// Mean over the cone body.
    pub lhs: Estimate,
    pub base_mean: Estimate,
    pub apex_value: f64,
    /// `n/(n+1) * base mean + 1/(n+1) * f(apex)`.
    pub rhs: f64,
    pub error_bound: f64,
    pub holds: bool,
}

/// Compares the body mean of a cone with the weighted combination of its
/// base mean and apex value.
pub fn cone_bound_check(cone: &Cone, f: &ConvexFunc, req: &QuadratureRequest) -> Result<ConeBound> {
    f.check_dim(cone.dim())?;
    let n = cone.dim() as f64;
    let (lhs, _) = settle(mean_over_body(&Shape::Cone(cone.clone()), f, req), "cone body")?;
    let base: Vec<_> = cone.base_simplices().iter().collect();
    let (base_mean, _) = settle(mean_over_simplices(&base, f, req), "cone base")?;
    let apex_value = f.eval(cone.apex());
    let rhs = n / (n + 1.0) * base_mean.value + apex_value / (n + 1.0);
    let error_bound = lhs.error_bound + n / (n + 1.0) * base_mean.error_bound + roundoff(&[lhs.value, rhs]);
    Ok(ConeBound { lhs, base_mean, apex_value, rhs, error_bound, holds: lhs.value <= rhs + error_bound })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InsphereBound {
    pub lhs: Estimate,
    pub boundary_mean: Estimate,
    pub insphere_center: Point,
    pub boundary_centroid: Point,
    pub f_center: f64,
    pub f_centroid: f64,
    /// `n/(n+1) * boundary mean + 1/(n+1) * f(s)`.
    pub rhs_theorem: f64,
    /// `boundary mean + 1/(n+1) * (f(s) - f(m))`.
    pub rhs_corollary: f64,
    pub error_theorem: f64,
    pub error_corollary: f64,
    pub holds_theorem: bool,
    pub holds_corollary: bool,
}

/// Bounds for polytopes whose largest inscribed ball touches every facet,
/// with `s` its center and `m` the boundary centroid.
pub fn insphere_bound_check(poly: &Polytope, f: &ConvexFunc, req: &QuadratureRequest) -> Result<InsphereBound> {
    f.check_dim(poly.dim())?;
    let ins = chebyshev_center(poly)?;
    if !ins.tangent_to_all {
        return Err(Error::HypothesisViolated(format!(
            "no inscribed ball touches every facet (worst facet gap {:.3e})",
            ins.worst_gap()
        )));
    }
    let shape = Shape::Polytope(poly.clone());
    let (lhs, _) = settle(mean_over_body(&shape, f, req), "body mean")?;
    let (boundary_mean, _) = settle(mean_over_boundary(&shape, f, req), "boundary mean")?;
    let n = poly.dim() as f64;
    let m = boundary_centroid(&shape);
    let f_center = f.eval(&ins.center);
    let f_centroid = f.eval(&m);
    let rhs_theorem = n / (n + 1.0) * boundary_mean.value + f_center / (n + 1.0);
    let rhs_corollary = boundary_mean.value + (f_center - f_centroid) / (n + 1.0);
    let error_theorem = lhs.error_bound + n / (n + 1.0) * boundary_mean.error_bound + roundoff(&[lhs.value, rhs_theorem]);
    let error_corollary = lhs.error_bound + boundary_mean.error_bound + roundoff(&[lhs.value, rhs_corollary]);
    Ok(InsphereBound {
        holds_theorem: lhs.value <= rhs_theorem + error_theorem,
        holds_corollary: lhs.value <= rhs_corollary + error_corollary,
        lhs,
        boundary_mean,
        insphere_center: ins.center,
        boundary_centroid: m,
        f_center,
        f_centroid,
        rhs_theorem,
        rhs_corollary,
        error_theorem,
        error_corollary,
    })
}
