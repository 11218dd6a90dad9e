//! JSON shape and function files.

use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use jensen_core::zoo;
use jensen_core::{AffinePiece, Ball, Cone, ConvexFunc, HalfSpace, Parallelotope, Point, Polytope, Shape};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ShapeDesc {
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
    Halfspaces {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    Parallelotope {
        origin: Vec<f64>,
        edges: Vec<Vec<f64>>,
    },
    Ball {
        dim: usize,
        center: Vec<f64>,
        radius: f64,
    },
    Cone {
        #[serde(rename = "baseVertices")]
        base_vertices: Vec<Vec<f64>>,
        apex: Vec<f64>,
    },
    Zoo {
        name: String,
    },
}

/// `p` of a p-norm: a number, or the string "inf".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceDesc {
    pub a: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FuncDesc {
    Affine { a: Vec<f64>, b: f64 },
    Maxaffine { pieces: Vec<PieceDesc> },
    Quadform { factor: Vec<Vec<f64>>, a: Vec<f64>, b: f64 },
    Pnorm { p: Exponent, center: Vec<f64> },
    Expaffine { a: Vec<f64>, b: f64 },
    Coordproj { i: usize, sign: f64 },
}

fn point(v: &[f64]) -> Point {
    Point::from_column_slice(v)
}

fn points(field: &str, rows: &[Vec<f64>]) -> Result<Vec<Point>> {
    ensure!(!rows.is_empty(), "'{field}' is empty");
    let n = rows[0].len();
    for (i, r) in rows.iter().enumerate() {
        ensure!(r.len() == n, "'{field}[{i}]' has {} coordinates, expected {n}", r.len());
        ensure!(r.iter().all(|v| v.is_finite()), "'{field}[{i}]' has a non-finite coordinate");
    }
    Ok(rows.iter().map(|r| point(r)).collect())
}

fn same_len(field: &str, v: &[f64], n: usize) -> Result<()> {
    ensure!(v.len() == n, "'{field}' has {} entries, expected {n}", v.len());
    Ok(())
}

/// Resolves `zoo:<name>` or reads a shape file.
pub fn load_shape(arg: &str) -> Result<Shape> {
    if let Some(name) = arg.strip_prefix("zoo:") {
        return zoo::by_name(name).with_context(|| format!("zoo shape '{name}'"));
    }
    let text = std::fs::read_to_string(arg).with_context(|| format!("cannot read shape file '{arg}'"))?;
    let desc: ShapeDesc = serde_json::from_str(&text).with_context(|| format!("shape file '{arg}'"))?;
    build_shape(&desc).with_context(|| format!("shape file '{arg}'"))
}

pub fn build_shape(desc: &ShapeDesc) -> Result<Shape> {
    Ok(match desc {
        ShapeDesc::Polytope { vertices } => Shape::Polytope(Polytope::from_vertices(&points("vertices", vertices)?)?),
        ShapeDesc::Halfspaces { normals, offsets } => {
            let normals = points("normals", normals)?;
            same_len("offsets", offsets, normals.len())?;
            let hs = normals
                .into_iter()
                .zip(offsets)
                .enumerate()
                .map(|(i, (a, &b))| HalfSpace::new(a, b).with_context(|| format!("'normals[{i}]'")))
                .collect::<Result<Vec<_>>>()?;
            Shape::Polytope(Polytope::from_halfspaces(&hs)?)
        }
        ShapeDesc::Parallelotope { origin, edges } => {
            let edges = points("edges", edges)?;
            same_len("origin", origin, edges[0].len())?;
            Shape::Parallelotope(Parallelotope::new(point(origin), edges)?)
        }
        ShapeDesc::Ball { dim, center, radius } => {
            same_len("center", center, *dim)?;
            Shape::Ball(Ball::new(*dim, point(center), *radius)?)
        }
        ShapeDesc::Cone { base_vertices, apex } => {
            let base = points("baseVertices", base_vertices)?;
            same_len("apex", apex, base[0].len())?;
            Shape::Cone(Cone::new(&base, point(apex))?)
        }
        ShapeDesc::Zoo { name } => zoo::by_name(name).with_context(|| format!("'name' = '{name}'"))?,
    })
}

fn coords(p: &Point) -> Vec<f64> {
    p.iter().copied().collect()
}

/// Concrete description of a shape; zoo shapes are expanded.
pub fn describe_shape(shape: &Shape) -> ShapeDesc {
    match shape {
        Shape::Polytope(p) => ShapeDesc::Polytope { vertices: p.vertices().iter().map(coords).collect() },
        Shape::Parallelotope(p) => {
            ShapeDesc::Parallelotope { origin: coords(p.origin()), edges: p.edges().iter().map(coords).collect() }
        }
        Shape::Ball(b) => ShapeDesc::Ball { dim: b.dim(), center: coords(b.center()), radius: b.radius() },
        Shape::Cone(c) => {
            ShapeDesc::Cone { base_vertices: c.base_vertices().iter().map(coords).collect(), apex: coords(c.apex()) }
        }
    }
}

pub fn load_functions(path: &Path) -> Result<Vec<ConvexFunc>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read function file '{}'", path.display()))?;
    let descs: Vec<FuncDesc> =
        serde_json::from_str(&text).with_context(|| format!("function file '{}'", path.display()))?;
    ensure!(!descs.is_empty(), "function file '{}' lists no functions", path.display());
    descs
        .iter()
        .enumerate()
        .map(|(i, s)| build_function(s).with_context(|| format!("function file '{}', entry {i}", path.display())))
        .collect()
}

pub fn build_function(desc: &FuncDesc) -> Result<ConvexFunc> {
    Ok(match desc {
        FuncDesc::Affine { a, b } => ConvexFunc::affine(point(a), *b),
        FuncDesc::Maxaffine { pieces } => {
            ensure!(!pieces.is_empty(), "'pieces' is empty");
            let n = pieces[0].a.len();
            for (i, p) in pieces.iter().enumerate() {
                same_len(&format!("pieces[{i}].a"), &p.a, n)?;
            }
            ConvexFunc::max_affine(pieces.iter().map(|p| AffinePiece::new(point(&p.a), p.b)).collect())?
        }
        FuncDesc::Quadform { factor, a, b } => {
            ensure!(!factor.is_empty(), "'factor' is empty");
            for (i, row) in factor.iter().enumerate() {
                same_len(&format!("factor[{i}]"), row, a.len())?;
            }
            let m = DMatrix::from_fn(factor.len(), a.len(), |r, c| factor[r][c]);
            ConvexFunc::quad_form(m, point(a), *b)?
        }
        FuncDesc::Pnorm { p, center } => {
            let p = match p {
                Exponent::Number(v) => *v,
                Exponent::Text(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => f64::INFINITY,
                Exponent::Text(s) => bail!("'p' must be a number or \"inf\", got \"{s}\""),
            };
            ConvexFunc::pnorm(p, point(center)).context("'p'")?
        }
        FuncDesc::Expaffine { a, b } => ConvexFunc::exp_affine(point(a), *b),
        FuncDesc::Coordproj { i, sign } => ConvexFunc::coord_proj(*i, *sign).context("'i' or 'sign'")?,
    })
}

pub fn describe_function(f: &ConvexFunc) -> FuncDesc {
    let piece = |p: &AffinePiece| PieceDesc { a: coords(&p.a), b: p.b };
    match f {
        ConvexFunc::Affine(p) => FuncDesc::Affine { a: coords(&p.a), b: p.b },
        ConvexFunc::MaxAffine(ps) => FuncDesc::Maxaffine { pieces: ps.iter().map(piece).collect() },
        ConvexFunc::QuadForm { factor, a, b } => FuncDesc::Quadform {
            factor: factor.row_iter().map(|r| r.iter().copied().collect()).collect(),
            a: coords(a),
            b: *b,
        },
        ConvexFunc::PNorm { p, center } => FuncDesc::Pnorm {
            p: if p.is_infinite() { Exponent::Text("inf".into()) } else { Exponent::Number(*p) },
            center: coords(center),
        },
        ConvexFunc::ExpAffine(p) => FuncDesc::Expaffine { a: coords(&p.a), b: p.b },
        ConvexFunc::CoordProj { i, sign } => FuncDesc::Coordproj { i: *i, sign: *sign },
    }
}
