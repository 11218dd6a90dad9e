use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jensen_core::{
    centroid_report, chebyshev_center, cone_bound_check, insphere_bound_check, jensen_verdict, maxaffine_search,
    suite_for, zoo, ConvexFunc, Overall, QuadratureRequest, SearchConfig, Shape, Verdict,
};
use serde::Serialize;

use crate::formats::{load_functions, load_shape, describe_shape};
use crate::report::{
    report_rows, write_csv, CentroidsOut, ConeBoundOut, InsphereBoundOut, InsphereOut, JensenReportOut, SearchOut,
};

#[derive(Debug, Parser)]
#[command(name = "jensen", version, about = "Compare means of convex functions over bodies and their boundaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ShapeArg {
    /// `zoo:<name>` or a shape file
    #[arg(value_name = "SHAPE")]
    positional: Option<String>,
    #[arg(long = "shape", value_name = "SHAPE")]
    flag: Option<String>,
}

impl ShapeArg {
    fn load(&self) -> Result<Shape> {
        match (&self.positional, &self.flag) {
            (Some(s), None) | (None, Some(s)) => load_shape(s),
            (Some(_), Some(_)) => bail!("give the shape either positionally or with --shape, not both"),
            (None, None) => bail!("missing shape (`zoo:<name>` or a shape file)"),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Output {
    /// Write the result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct Accuracy {
    /// Target error of deterministic quadrature
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Accuracy {
    fn request(&self) -> Result<QuadratureRequest> {
        if self.eps.is_nan() || self.eps <= 0.0 {
            bail!("--eps must be positive, got {}", self.eps);
        }
        Ok(QuadratureRequest::default().with_target(self.eps).with_seed(self.seed))
    }
}

#[derive(Debug, Args)]
struct SuiteArg {
    /// `std` or a function file
    #[arg(long, default_value = "std")]
    suite: String,
}

impl SuiteArg {
    fn load(&self, shape: &Shape, seed: u64) -> Result<Vec<ConvexFunc>> {
        if self.suite == "std" {
            return Ok(suite_for(shape, seed));
        }
        let suite = load_functions(self.suite.as_ref())?;
        for (i, f) in suite.iter().enumerate() {
            f.check_dim(shape.dim()).with_context(|| format!("function {i} of '{}'", self.suite))?;
        }
        Ok(suite)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Volume, surface measure and both centroids
    Centroids {
        #[command(flatten)]
        shape: ShapeArg,
        #[command(flatten)]
        output: Output,
    },
    /// Largest inscribed ball and its tangency to the facets
    Insphere {
        #[command(flatten)]
        shape: ShapeArg,
        #[command(flatten)]
        output: Output,
    },
    /// Boundary mean versus body mean over a function suite
    Check {
        #[command(flatten)]
        shape: ShapeArg,
        #[command(flatten)]
        suite: SuiteArg,
        #[command(flatten)]
        accuracy: Accuracy,
        #[command(flatten)]
        output: Output,
    },
    /// Inscribed-ball upper bounds on the body mean over a function suite
    Bound {
        #[command(flatten)]
        shape: ShapeArg,
        #[command(flatten)]
        suite: SuiteArg,
        #[command(flatten)]
        accuracy: Accuracy,
        #[command(flatten)]
        output: Output,
    },
    /// Base-and-apex upper bound on the body mean of a cone
    Conecheck {
        #[command(flatten)]
        shape: ShapeArg,
        #[command(flatten)]
        suite: SuiteArg,
        #[command(flatten)]
        accuracy: Accuracy,
        #[command(flatten)]
        output: Output,
    },
    /// Search max-affine functions for a body mean above the boundary mean
    Search {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long, default_value_t = 1)]
        pieces: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Objective evaluations shared by all restarts
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Quadrature target used while searching
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Named example shapes
    Zoo {
        #[command(subcommand)]
        command: ZooCommand,
    },
}

#[derive(Debug, Subcommand)]
enum ZooCommand {
    List,
    /// Write a zoo shape as a concrete shape file
    Emit {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code: 0 completed, 1 violation found, 2 bad input or failure.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(true) => 1,
        Ok(false) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("cannot create '{}'", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn emit<J: Serialize, C: Serialize>(output: &Output, json: &J, rows: Option<&[C]>) -> Result<()> {
    match (output.format, rows) {
        (Format::Json, _) => write_json(&output.out, json),
        (Format::Csv, Some(rows)) => write_csv(sink(&output.out)?, rows),
        (Format::Csv, None) => bail!("--format csv is available for check, bound and conecheck"),
    }
}

fn polytope_view(shape: &Shape) -> Result<jensen_core::Polytope> {
    shape.to_polytope().context("this command needs a polytope")
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct BoundRow {
    function: String,
    lhs: f64,
    rhs_theorem: f64,
    rhs_corollary: f64,
    error_theorem: f64,
    error_corollary: f64,
    holds_theorem: bool,
    holds_corollary: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ConeRow {
    function: String,
    lhs: f64,
    rhs: f64,
    error_bound: f64,
    holds: bool,
}

/// Returns whether a violation was found.
fn run(command: Command) -> Result<bool> {
    let none: Option<&[()]> = None;
    match command {
        Command::Centroids { shape, output } => {
            let shape = shape.load()?;
            emit(&output, &CentroidsOut::from(&centroid_report(&shape)), none)?;
            Ok(false)
        }
        Command::Insphere { shape, output } => {
            let poly = polytope_view(&shape.load()?)?;
            emit(&output, &InsphereOut::from(&chebyshev_center(&poly)?), none)?;
            Ok(false)
        }
        Command::Check { shape, suite, accuracy, output } => {
            let shape = shape.load()?;
            let req = accuracy.request()?;
            let suite = suite.load(&shape, accuracy.seed)?;
            let report = jensen_verdict(&shape, &suite, &req)?;
            eprintln!(
                "{}: {} ({} violated, {} inconclusive of {})",
                report.shape,
                report.overall.as_str(),
                report.count(Verdict::Violated),
                report.count(Verdict::Inconclusive),
                report.entries.len()
            );
            emit(&output, &JensenReportOut::from(&report), Some(&report_rows(&report)))?;
            Ok(report.overall == Overall::CounterexampleFound)
        }
        Command::Bound { shape, suite, accuracy, output } => {
            let shape = shape.load()?;
            let poly = polytope_view(&shape)?;
            let req = accuracy.request()?;
            let suite = suite.load(&shape, accuracy.seed)?;
            let mut results = Vec::with_capacity(suite.len());
            for f in &suite {
                results.push(InsphereBoundOut::new(f, &insphere_bound_check(&poly, f, &req)?));
            }
            let rows: Vec<BoundRow> = results
                .iter()
                .map(|b| BoundRow {
                    function: b.label.clone(),
                    lhs: b.lhs.value,
                    rhs_theorem: b.rhs_theorem,
                    rhs_corollary: b.rhs_corollary,
                    error_theorem: b.error_theorem,
                    error_corollary: b.error_corollary,
                    holds_theorem: b.holds_theorem,
                    holds_corollary: b.holds_corollary,
                })
                .collect();
            let failed = rows.iter().filter(|r| !(r.holds_theorem && r.holds_corollary)).count();
            eprintln!("{}: {failed} of {} bounds failed", shape.describe(), rows.len());
            emit(&output, &results, Some(&rows))?;
            Ok(failed > 0)
        }
        Command::Conecheck { shape, suite, accuracy, output } => {
            let shape = shape.load()?;
            let Shape::Cone(cone) = &shape else { bail!("conecheck needs a cone shape (kind \"cone\")") };
            let req = accuracy.request()?;
            let suite = suite.load(&shape, accuracy.seed)?;
            let mut results = Vec::with_capacity(suite.len());
            for f in &suite {
                results.push(ConeBoundOut::new(f, &cone_bound_check(cone, f, &req)?));
            }
            let rows: Vec<ConeRow> = results
                .iter()
                .map(|b| ConeRow {
                    function: b.label.clone(),
                    lhs: b.lhs.value,
                    rhs: b.rhs,
                    error_bound: b.error_bound,
                    holds: b.holds,
                })
                .collect();
            let failed = rows.iter().filter(|r| !r.holds).count();
            eprintln!("{}: {failed} of {} bounds failed", shape.describe(), rows.len());
            emit(&output, &results, Some(&rows))?;
            Ok(failed > 0)
        }
        Command::Search { shape, pieces, restarts, budget, seed, eps, output } => {
            let shape = shape.load()?;
            if eps.is_nan() || eps <= 0.0 {
                bail!("--eps must be positive, got {eps}");
            }
            let cfg = SearchConfig { pieces, restarts, budget, seed, search_target: eps, ..Default::default() };
            let result = maxaffine_search(&shape, &cfg)?;
            let violated = result.certificate.verdict == Verdict::Violated;
            eprintln!(
                "{}: certified violation {:.6e} +/- {:.1e}",
                shape.describe(),
                result.certified_violation(),
                result.certificate.gap_error_bound
            );
            emit(&output, &SearchOut::new(shape.describe(), &result), none)?;
            Ok(violated)
        }
        Command::Zoo { command: ZooCommand::List } => {
            let mut w = std::io::stdout().lock();
            for name in zoo::names() {
                writeln!(w, "{name}")?;
            }
            Ok(false)
        }
        Command::Zoo { command: ZooCommand::Emit { name, out } } => {
            let name = name.strip_prefix("zoo:").unwrap_or(&name);
            let shape = zoo::by_name(name).with_context(|| format!("zoo shape '{name}'"))?;
            write_json(&out, &describe_shape(&shape))?;
            Ok(false)
        }
    }
}
