//! Serializable mirrors of the core result types, plus CSV rows.

use std::io::Write;

use anyhow::Result;
use jensen_core::checker::SuiteEntry;
use jensen_core::search::RestartTrace;
use jensen_core::{
    CentroidReport, ConeBound, Estimate, GapResult, InsphereBound, InsphereResult, JensenReport, Point, SearchResult,
};
use serde::Serialize;

use crate::formats::{describe_function, FuncDesc};

fn coords(p: &Point) -> Vec<f64> {
    p.iter().copied().collect()
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EstimateOut {
    pub value: f64,
    pub error_bound: f64,
    pub method: &'static str,
    pub evaluations: u64,
}

impl From<&Estimate> for EstimateOut {
    fn from(e: &Estimate) -> Self {
        Self { value: e.value, error_bound: e.error_bound, method: e.method.as_str(), evaluations: e.evaluations }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GapOut {
    pub body_mean: EstimateOut,
    pub boundary_mean: EstimateOut,
    pub gap: f64,
    pub gap_error_bound: f64,
    pub verdict: &'static str,
    pub diagnostic: Option<String>,
}

impl From<&GapResult> for GapOut {
    fn from(g: &GapResult) -> Self {
        Self {
            body_mean: (&g.body_mean).into(),
            boundary_mean: (&g.boundary_mean).into(),
            gap: g.gap,
            gap_error_bound: g.gap_error_bound,
            verdict: g.verdict.as_str(),
            diagnostic: g.diagnostic.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EntryOut {
    pub function: FuncDesc,
    pub label: String,
    pub result: GapOut,
}

impl From<&SuiteEntry> for EntryOut {
    fn from(e: &SuiteEntry) -> Self {
        Self { function: describe_function(&e.function), label: e.function.to_string(), result: (&e.result).into() }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CentroidsOut {
    pub body_centroid: Vec<f64>,
    pub boundary_centroid: Vec<f64>,
    pub volume: f64,
    pub surface_measure: f64,
    pub centroid_gap: f64,
}

impl From<&CentroidReport> for CentroidsOut {
    fn from(c: &CentroidReport) -> Self {
        Self {
            body_centroid: coords(&c.body_centroid),
            boundary_centroid: coords(&c.boundary_centroid),
            volume: c.volume,
            surface_measure: c.surface_measure,
            centroid_gap: c.centroid_gap,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InsphereOut {
    pub center: Vec<f64>,
    pub radius: f64,
    pub facet_gaps: Vec<f64>,
    pub tangent_to_all: bool,
    pub unique: bool,
    pub multipliers: Vec<f64>,
    pub worst_gap: f64,
}

impl From<&InsphereResult> for InsphereOut {
    fn from(r: &InsphereResult) -> Self {
        Self {
            center: coords(&r.center),
            radius: r.radius,
            facet_gaps: r.facet_gaps.clone(),
            tangent_to_all: r.tangent_to_all,
            unique: r.unique,
            multipliers: r.multipliers.clone(),
            worst_gap: r.worst_gap(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ResidualOut {
    pub identity: String,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JensenReportOut {
    pub shape: String,
    pub dim: usize,
    pub entries: Vec<EntryOut>,
    pub centroids: CentroidsOut,
    pub insphere: Option<InsphereOut>,
    pub identity_residuals: Vec<ResidualOut>,
    pub overall: &'static str,
    pub note: String,
}

impl From<&JensenReport> for JensenReportOut {
    fn from(r: &JensenReport) -> Self {
        Self {
            shape: r.shape.clone(),
            dim: r.dim,
            entries: r.entries.iter().map(Into::into).collect(),
            centroids: (&r.centroids).into(),
            insphere: r.insphere.as_ref().map(Into::into),
            identity_residuals: r
                .identity_residuals
                .iter()
                .map(|(identity, residual)| ResidualOut { identity: identity.clone(), residual: *residual })
                .collect(),
            overall: r.overall.as_str(),
            note: r.note.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InsphereBoundOut {
    pub function: FuncDesc,
    pub label: String,
    pub lhs: EstimateOut,
    pub boundary_mean: EstimateOut,
    pub insphere_center: Vec<f64>,
    pub boundary_centroid: Vec<f64>,
    pub f_center: f64,
    pub f_centroid: f64,
    pub rhs_theorem: f64,
    pub rhs_corollary: f64,
    pub error_theorem: f64,
    pub error_corollary: f64,
    pub holds_theorem: bool,
    pub holds_corollary: bool,
}

impl InsphereBoundOut {
    pub fn new(f: &jensen_core::ConvexFunc, b: &InsphereBound) -> Self {
        Self {
            function: describe_function(f),
            label: f.to_string(),
            lhs: (&b.lhs).into(),
            boundary_mean: (&b.boundary_mean).into(),
            insphere_center: coords(&b.insphere_center),
            boundary_centroid: coords(&b.boundary_centroid),
            f_center: b.f_center,
            f_centroid: b.f_centroid,
            rhs_theorem: b.rhs_theorem,
            rhs_corollary: b.rhs_corollary,
            error_theorem: b.error_theorem,
            error_corollary: b.error_corollary,
            holds_theorem: b.holds_theorem,
            holds_corollary: b.holds_corollary,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConeBoundOut {
    pub function: FuncDesc,
    pub label: String,
    pub lhs: EstimateOut,
    pub base_mean: EstimateOut,
    pub apex_value: f64,
    pub rhs: f64,
    pub error_bound: f64,
    pub holds: bool,
}

impl ConeBoundOut {
    pub fn new(f: &jensen_core::ConvexFunc, b: &ConeBound) -> Self {
        Self {
            function: describe_function(f),
            label: f.to_string(),
            lhs: (&b.lhs).into(),
            base_mean: (&b.base_mean).into(),
            apex_value: b.apex_value,
            rhs: b.rhs,
            error_bound: b.error_bound,
            holds: b.holds,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceOut {
    pub restart: usize,
    pub start_value: f64,
    pub best_value: f64,
    pub evaluations: usize,
    pub final_step: f64,
    pub warm: bool,
    pub budget_exceeded: bool,
}

impl From<&RestartTrace> for TraceOut {
    fn from(t: &RestartTrace) -> Self {
        Self {
            restart: t.restart,
            start_value: t.start_value,
            best_value: t.best_value,
            evaluations: t.evaluations,
            final_step: t.final_step,
            warm: t.warm,
            budget_exceeded: t.budget_exceeded,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchOut {
    pub shape: String,
    pub best_function: FuncDesc,
    pub best_violation: f64,
    pub certified_violation: f64,
    pub certificate: GapOut,
    pub trace: Vec<TraceOut>,
}

impl SearchOut {
    pub fn new(shape: String, r: &SearchResult) -> Self {
        Self {
            shape,
            best_function: describe_function(&r.best_function),
            best_violation: r.best_violation,
            certified_violation: r.certified_violation(),
            certificate: (&r.certificate).into(),
            trace: r.trace.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CsvRow {
    pub shape: String,
    pub function: String,
    pub body_mean: f64,
    pub boundary_mean: f64,
    pub gap: f64,
    pub error_bound: f64,
    pub verdict: String,
}

pub fn report_rows(r: &JensenReport) -> Vec<CsvRow> {
    r.entries
        .iter()
        .map(|e| CsvRow {
            shape: r.shape.clone(),
            function: e.function.to_string(),
            body_mean: e.result.body_mean.value,
            boundary_mean: e.result.boundary_mean.value,
            gap: e.result.gap,
            error_bound: e.result.gap_error_bound,
            verdict: e.result.verdict.as_str().to_string(),
        })
        .collect()
}

pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
