//! Convex test functions and a sampling-based convexity probe.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Largest allowed `|a_i|` for [`ConvexFunc::ExpAffine`].
pub const EXP_COEFF_CLAMP: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AffinePiece {
    pub a: Point,
    pub b: f64,
}

impl AffinePiece {
    pub fn new(a: Point, b: f64) -> Self {
        Self { a, b }
    }

    #[inline]
    pub fn eval(&self, x: &Point) -> f64 {
        self.a.dot(x) + self.b
    }
}

/// A convex function on R^n. Every variant is convex by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexFunc {
    /// `a . x + b`
    Affine(AffinePiece),
    /// `max_j (a_j . x + b_j)`, at least one piece.
    MaxAffine(Vec<AffinePiece>),
    /// `|G x|^2 + a . x + b`; the factor keeps the quadratic part PSD.
    QuadForm { factor: DMatrix<f64>, a: Point, b: f64 },
    /// `|x - center|_p`, `p >= 1` (`p = inf` allowed).
    PNorm { p: f64, center: Point },
    /// `exp(a . x + b)`
    ExpAffine(AffinePiece),
    /// `sign * x_i` with a 1-based coordinate index.
    CoordProj { i: usize, sign: f64 },
}

impl ConvexFunc {
    pub fn affine(a: Point, b: f64) -> Self {
        ConvexFunc::Affine(AffinePiece::new(a, b))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        ConvexFunc::affine(Point::zeros(n), c)
    }

    pub fn max_affine(pieces: Vec<AffinePiece>) -> Result<Self> {
        let n = pieces
            .first()
            .ok_or_else(|| Error::InvalidArgument("max-affine needs at least one piece".into()))?
            .a
            .len();
        if let Some(p) = pieces.iter().find(|p| p.a.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: p.a.len() });
        }
        Ok(ConvexFunc::MaxAffine(pieces))
    }

    pub fn quad_form(factor: DMatrix<f64>, a: Point, b: f64) -> Result<Self> {
        if factor.ncols() != a.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), got: factor.ncols() });
        }
        Ok(ConvexFunc::QuadForm { factor, a, b })
    }

    /// `|x|^2` in R^n.
    pub fn squared_norm(n: usize) -> Self {
        ConvexFunc::QuadForm { factor: DMatrix::identity(n, n), a: Point::zeros(n), b: 0.0 }
    }

    pub fn pnorm(p: f64, center: Point) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidArgument(format!("p-norm needs p >= 1, got {p}")));
        }
        Ok(ConvexFunc::PNorm { p, center })
    }

    /// Coefficients are clamped to `|a_i| <= 2`.
    pub fn exp_affine(a: Point, b: f64) -> Self {
        let a = a.map(|v| v.clamp(-EXP_COEFF_CLAMP, EXP_COEFF_CLAMP));
        ConvexFunc::ExpAffine(AffinePiece::new(a, b))
    }

    /// `sign * x_i`, `i` is 1-based.
    pub fn coord_proj(i: usize, sign: f64) -> Result<Self> {
        if i == 0 {
            return Err(Error::InvalidArgument("coordinate index is 1-based".into()));
        }
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidArgument("coordinate projection sign must be +1 or -1".into()));
        }
        Ok(ConvexFunc::CoordProj { i, sign })
    }

    /// Intrinsic dimension, or None for coordinate projections, which apply
    /// in any dimension `>= i`.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ConvexFunc::Affine(p) | ConvexFunc::ExpAffine(p) => Some(p.a.len()),
            ConvexFunc::MaxAffine(ps) => Some(ps[0].a.len()),
            ConvexFunc::QuadForm { a, .. } => Some(a.len()),
            ConvexFunc::PNorm { center, .. } => Some(center.len()),
            ConvexFunc::CoordProj { .. } => None,
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        match (self, self.dim()) {
            (ConvexFunc::CoordProj { i, .. }, _) if *i > n => {
                Err(Error::DimensionMismatch { expected: n, got: *i })
            }
            (_, Some(d)) if d != n => Err(Error::DimensionMismatch { expected: n, got: d }),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, x: &Point) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.eval(x))
    }

    /// Evaluation without the dimension check.
    #[inline]
    pub fn eval(&self, x: &Point) -> f64 {
        match self {
            ConvexFunc::Affine(p) => p.eval(x),
            ConvexFunc::MaxAffine(ps) => ps.iter().map(|p| p.eval(x)).fold(f64::NEG_INFINITY, f64::max),
            ConvexFunc::QuadForm { factor, a, b } => (factor * x).norm_squared() + a.dot(x) + b,
            ConvexFunc::PNorm { p, center } => {
                if p.is_infinite() {
                    x.iter().zip(center.iter()).map(|(u, c)| (u - c).abs()).fold(0.0, f64::max)
                } else if *p == 1.0 {
                    x.iter().zip(center.iter()).map(|(u, c)| (u - c).abs()).sum()
                } else if *p == 2.0 {
                    (x - center).norm()
                } else {
                    x.iter().zip(center.iter()).map(|(u, c)| (u - c).abs().powf(*p)).sum::<f64>().powf(1.0 / p)
                }
            }
            ConvexFunc::ExpAffine(p) => p.eval(x).exp(),
            ConvexFunc::CoordProj { i, sign } => sign * x[i - 1],
        }
    }

    /// `(a, b)` when the function is affine in R^n.
    pub fn as_affine(&self, n: usize) -> Option<AffinePiece> {
        match self {
            ConvexFunc::Affine(p) => Some(p.clone()),
            ConvexFunc::CoordProj { i, sign } => {
                let mut a = Point::zeros(n);
                a[i - 1] = *sign;
                Some(AffinePiece::new(a, 0.0))
            }
            ConvexFunc::MaxAffine(ps) if ps.len() == 1 => Some(ps[0].clone()),
            _ => None,
        }
    }

    /// Affine pieces when the function is piecewise affine and the piece
    /// count stays small (p-norms with p in {1, inf} for n <= 4).
    pub fn affine_pieces(&self, n: usize) -> Option<Vec<AffinePiece>> {
        match self {
            ConvexFunc::MaxAffine(ps) => Some(ps.clone()),
            ConvexFunc::PNorm { p, center } if *p == 1.0 && n <= 4 => Some(
                (0..1usize << n)
                    .map(|mask| {
                        let a = Point::from_fn(n, |r, _| if mask >> r & 1 == 1 { -1.0 } else { 1.0 });
                        let b = -a.dot(center);
                        AffinePiece::new(a, b)
                    })
                    .collect(),
            ),
            ConvexFunc::PNorm { p, center } if p.is_infinite() && n <= 4 => Some(
                (0..2 * n)
                    .map(|k| {
                        let mut a = Point::zeros(n);
                        a[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
                        let b = -a.dot(center);
                        AffinePiece::new(a, b)
                    })
                    .collect(),
            ),
            _ => self.as_affine(n).map(|p| vec![p]),
        }
    }

    /// `y -> f(m y + t)` when the family is closed under that map.
    /// p-norms other than p = 2 are only closed under signed permutations
    /// and return None; p = 2 requires `m` orthogonal.
    pub fn compose_affine(&self, m: &DMatrix<f64>, t: &Point) -> Option<ConvexFunc> {
        let map_piece = |p: &AffinePiece| AffinePiece::new(m.transpose() * &p.a, p.a.dot(t) + p.b);
        Some(match self {
            ConvexFunc::Affine(p) => ConvexFunc::Affine(map_piece(p)),
            ConvexFunc::MaxAffine(ps) => ConvexFunc::MaxAffine(ps.iter().map(map_piece).collect()),
            ConvexFunc::ExpAffine(p) => ConvexFunc::ExpAffine(map_piece(p)),
            ConvexFunc::CoordProj { i, sign } => {
                let mut a = Point::zeros(m.nrows());
                a[i - 1] = *sign;
                ConvexFunc::Affine(map_piece(&AffinePiece::new(a, 0.0)))
            }
            ConvexFunc::QuadForm { factor, a, b } => {
                let gt = factor * t;
                let gm = factor * m;
                let lin = m.transpose() * a + (gm.transpose() * &gt) * 2.0;
                ConvexFunc::QuadForm { factor: gm, a: lin, b: a.dot(t) + b + gt.norm_squared() }
            }
            ConvexFunc::PNorm { p, center } if *p == 2.0 => {
                let n = m.ncols();
                if (m.transpose() * m - DMatrix::<f64>::identity(n, n)).amax() > 1e-12 {
                    return None;
                }
                ConvexFunc::PNorm { p: 2.0, center: m.transpose() * (center - t) }
            }
            ConvexFunc::PNorm { .. } => return None,
        })
    }
}

impl fmt::Display for ConvexFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vec = |v: &Point| {
            let parts: Vec<String> = v.iter().map(|c| format!("{c:.4}")).collect();
            format!("({})", parts.join(","))
        };
        match self {
            ConvexFunc::Affine(p) => write!(f, "affine(a={}, b={:.4})", vec(&p.a), p.b),
            ConvexFunc::MaxAffine(ps) => write!(f, "maxaffine({} pieces)", ps.len()),
            ConvexFunc::QuadForm { factor, a, b } => {
                write!(f, "quadform({}x{} factor, a={}, b={:.4})", factor.nrows(), factor.ncols(), vec(a), b)
            }
            ConvexFunc::PNorm { p, center } => write!(f, "pnorm(p={p}, center={})", vec(center)),
            ConvexFunc::ExpAffine(p) => write!(f, "expaffine(a={}, b={:.4})", vec(&p.a), p.b),
            ConvexFunc::CoordProj { i, sign } => {
                write!(f, "coordproj({i},{})", if *sign > 0.0 { "+1" } else { "-1" })
            }
        }
    }
}

/// Which inequality a probe witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    /// `f(tx + (1-t)y) <= t f(x) + (1-t) f(y)`
    Jensen,
    /// `f(tx + (1-t)y) + f((1-t)x + ty) <= f(x) + f(y)`
    Wright,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeOutcome {
    Pass { samples: usize },
    Witness { x: Point, y: Point, t: f64, kind: ProbeKind, excess: f64 },
}

impl ProbeOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, ProbeOutcome::Pass { .. })
    }
}

pub const PROBE_SLACK: f64 = 1e-10;

/// Random triples `(x, y, t)` in the box `[lo, hi]` checked against both
/// the two-point convexity inequality and the Wright property.
pub fn convexity_probe(f: &ConvexFunc, lo: &Point, hi: &Point, samples: usize, seed: u64) -> ProbeOutcome {
    probe_with(|x| f.eval(x), lo, hi, samples, seed)
}

/// [`convexity_probe`] for an arbitrary evaluator.
pub fn probe_with<F: Fn(&Point) -> f64>(eval: F, lo: &Point, hi: &Point, samples: usize, seed: u64) -> ProbeOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = lo.len();
    let draw = |rng: &mut ChaCha8Rng| Point::from_fn(n, |i, _| lo[i] + (hi[i] - lo[i]) * rng.random::<f64>());
    for _ in 0..samples {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let t: f64 = rng.random();
        let (fx, fy) = (eval(&x), eval(&y));
        let p = &x * t + &y * (1.0 - t);
        let q = &x * (1.0 - t) + &y * t;
        let fp = eval(&p);
        let excess = fp - (t * fx + (1.0 - t) * fy);
        if excess > PROBE_SLACK {
            return ProbeOutcome::Witness { x, y, t, kind: ProbeKind::Jensen, excess };
        }
        let excess = fp + eval(&q) - (fx + fy);
        if excess > PROBE_SLACK {
            return ProbeOutcome::Witness { x, y, t, kind: ProbeKind::Wright, excess };
        }
    }
    ProbeOutcome::Pass { samples }
}

/// Number of seeded random max-affine members in [`standard_suite`].
pub const SUITE_RANDOM_MAXAFFINE: usize = 20;

/// The default test-function suite for a body in R^n located around
/// `anchor` with length scale `scale`:
///
/// * `+x_i` and `-x_i` for every coordinate,
/// * `|x - c|_2`, `|x - c|_1`, `|x - c|_inf` (the last two as max-affine),
///   with `c` a fixed point a quarter `scale` away from `anchor`,
/// * `|x|^2`,
/// * `exp(+-x_i / 2)`,
/// * 20 random 4-piece max-affine functions `max_j a_j.(x - anchor) + scale b_j`
///   with every coefficient uniform in [-1, 1].
pub fn standard_suite(n: usize, anchor: &Point, scale: f64, seed: u64) -> Vec<ConvexFunc> {
    let mut suite = Vec::new();
    for i in 1..=n {
        for sign in [1.0, -1.0] {
            suite.push(ConvexFunc::CoordProj { i, sign });
        }
    }
    let dir = Point::from_fn(n, |i, _| (i + 1) as f64).normalize();
    let c = anchor + dir * (0.25 * scale);
    suite.push(ConvexFunc::PNorm { p: 2.0, center: c.clone() });
    let as_pieces = |f: ConvexFunc| match f.affine_pieces(n) {
        Some(ps) => ConvexFunc::MaxAffine(ps),
        None => f,
    };
    suite.push(as_pieces(ConvexFunc::PNorm { p: 1.0, center: c.clone() }));
    suite.push(as_pieces(ConvexFunc::PNorm { p: f64::INFINITY, center: c }));
    suite.push(ConvexFunc::squared_norm(n));
    for i in 0..n {
        for sign in [0.5, -0.5] {
            let mut a = Point::zeros(n);
            a[i] = sign;
            suite.push(ConvexFunc::exp_affine(a, 0.0));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SUITE_RANDOM_MAXAFFINE {
        suite.push(random_max_affine(n, 4, anchor, scale, &mut rng));
    }
    suite
}

/// Max-affine function `max_j a_j.(x - anchor) + scale b_j` with
/// coefficients uniform in [-1, 1].
pub fn random_max_affine<R: Rng>(n: usize, pieces: usize, anchor: &Point, scale: f64, rng: &mut R) -> ConvexFunc {
    ConvexFunc::MaxAffine(
        (0..pieces)
            .map(|_| {
                let a = Point::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
                let b = scale * rng.random_range(-1.0..=1.0) - a.dot(anchor);
                AffinePiece::new(a, b)
            })
            .collect(),
    )
}
