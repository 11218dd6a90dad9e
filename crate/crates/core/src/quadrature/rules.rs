//! Fixed rules: Gauss-Legendre on intervals, a degree-2 rule on simplices,
//! and a globally adaptive interval integrator built on the former.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::geometry::Point;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// 16-point Gauss-Legendre integral of `f` over [a, b].
pub fn gl16_integral<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl16();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        s += w * f(mid + half * x);
    }
    s * half
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOutcome {
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
    pub converged: bool,
}

struct Interval {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive GL16 integration of `f` over [a, b] to absolute
/// tolerance `tol`. Each interval's error is `|Q(I) - Q(I_left) - Q(I_right)|`;
/// the worst interval is bisected until the summed error drops below `tol`
/// or every remaining candidate sits at `max_depth`.
pub fn adaptive_gl<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64, max_depth: u32) -> AdaptiveOutcome {
    const MAX_INTERVALS: usize = 1 << 14;
    let mut evaluations = 0u64;
    let make = |f: &mut F, a: f64, b: f64, whole: f64, depth: u32, evals: &mut u64| {
        let m = 0.5 * (a + b);
        let left = gl16_integral(f, a, m);
        let right = gl16_integral(f, m, b);
        *evals += 32;
        Interval { a, b, left, right, err: (whole - left - right).abs(), depth }
    };
    let whole = gl16_integral(f, a, b);
    evaluations += 16;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Interval> = Vec::new();
    let root = make(f, a, b, whole, 0, &mut evaluations);
    let mut total_err = root.err;
    heap.push(root);
    let mut converged = true;
    loop {
        if total_err <= tol {
            break;
        }
        if heap.len() + frozen.len() >= MAX_INTERVALS {
            converged = false;
            break;
        }
        let Some(worst) = heap.pop() else {
            converged = false;
            break;
        };
        if worst.depth >= max_depth {
            frozen.push(worst);
            continue;
        }
        let m = 0.5 * (worst.a + worst.b);
        let l = make(f, worst.a, m, worst.left, worst.depth + 1, &mut evaluations);
        let r = make(f, m, worst.b, worst.right, worst.depth + 1, &mut evaluations);
        total_err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
    }
    let mut parts: Vec<&Interval> = heap.iter().chain(frozen.iter()).collect();
    parts.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = parts.iter().map(|i| i.left + i.right).sum();
    let error = parts.iter().map(|i| i.err).sum();
    AdaptiveOutcome { value, error, evaluations, converged }
}

/// Barycentric weights `(alpha, beta)` of the (k+1)-point degree-2 rule on a
/// k-simplex: node i sits at `alpha v_i + beta sum_{j != i} v_j`, all
/// weights equal.
pub fn degree2_weights(k: usize) -> (f64, f64) {
    let kp2 = (k + 2) as f64;
    let denom = (k + 1) as f64 * kp2;
    let beta = (kp2 - kp2.sqrt()) / denom;
    let alpha = (kp2 + k as f64 * kp2.sqrt()) / denom;
    (alpha, beta)
}

/// Mean of `f` over the simplex with the given vertices by the degree-2
/// rule (exact for polynomials of degree <= 2).
pub fn degree2_mean<F: Fn(&Point) -> f64>(f: &F, vertices: &[Point]) -> f64 {
    let k = vertices.len() - 1;
    if k == 0 {
        return f(&vertices[0]);
    }
    let (alpha, beta) = degree2_weights(k);
    let mut sum = vertices[0].clone() * 0.0;
    for v in vertices {
        sum += v;
    }
    let mut acc = 0.0;
    for v in vertices {
        let node = &sum * beta + v * (alpha - beta);
        acc += f(&node);
    }
    acc / (k + 1) as f64
}

/// Grundmann-Moller rule of degree `2s + 1` on a k-simplex as
/// `(barycentric coordinates, weight)` pairs whose weights sum to one, so
/// that `sum w f(x)` approximates the mean over the simplex.
pub fn grundmann_moller(k: usize, s: usize) -> &'static [(Vec<f64>, f64)] {
    const MAX_K: usize = 10;
    const MAX_S: usize = 4;
    type Rule = Vec<(Vec<f64>, f64)>;
    static RULES: OnceLock<Vec<Vec<OnceLock<Rule>>>> = OnceLock::new();
    assert!(k <= MAX_K && s <= MAX_S, "rule (k={k}, s={s}) out of range");
    let table = RULES.get_or_init(|| (0..=MAX_K).map(|_| (0..=MAX_S).map(|_| OnceLock::new()).collect()).collect());
    table[k][s].get_or_init(|| build_grundmann_moller(k, s))
}

fn build_grundmann_moller(k: usize, s: usize) -> Vec<(Vec<f64>, f64)> {
    let d = 2 * s + 1;
    let fact = |m: usize| (1..=m).fold(1.0f64, |a, i| a * i as f64);
    let mut rule = Vec::new();
    for i in 0..=s {
        let denom = (d + k - 2 * i) as f64;
        let w = (if i % 2 == 0 { 1.0 } else { -1.0 }) * 2f64.powi(-2 * s as i32) * denom.powi(d as i32)
            / (fact(i) * fact(d + k - i))
            * fact(k);
        for beta in compositions(s - i, k + 1) {
            let bary = beta.iter().map(|&b| (2 * b + 1) as f64 / denom).collect();
            rule.push((bary, w));
        }
    }
    rule
}

/// All ways of writing `total` as an ordered sum of `parts` nonnegative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Mean of `f` over a simplex by the Grundmann-Moller rule of degree 2s+1.
pub fn gm_mean<F: Fn(&Point) -> f64>(f: &F, vertices: &[Point], s: usize) -> f64 {
    let k = vertices.len() - 1;
    let n = vertices[0].len();
    let mut x = Point::zeros(n);
    let mut acc = 0.0;
    for (bary, w) in grundmann_moller(k, s) {
        x.fill(0.0);
        for (v, l) in vertices.iter().zip(bary) {
            x.axpy(*l, v, 1.0);
        }
        acc += w * f(&x);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // Degree 30 is exact for 16 nodes.
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        let (x3, w3) = gauss_legendre(3);
        assert!((x3[2] - (0.6f64).sqrt()).abs() < 1e-15);
        assert!((w3[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_kinks_and_sqrt_singularities() {
        let out = adaptive_gl(&mut |x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12, 40);
        assert!(out.converged);
        assert!((out.value - (0.045 + 0.245)).abs() < 1e-12);
        let out = adaptive_gl(&mut |x: f64| x.sqrt(), 0.0, 1.0, 1e-10, 60);
        assert!(out.converged);
        assert!((out.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn grundmann_moller_exactness() {
        let fact = |m: u32| (1..=m).fold(1.0f64, |a, i| a * i as f64);
        let tri = [dvector![0.0, 0.0], dvector![1.0, 0.0], dvector![0.0, 1.0]];
        for s in 0..=3usize {
            let total: f64 = grundmann_moller(2, s).iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-13);
            // Mean of x^a y^b over the unit right triangle: 2 a! b! / (a + b + 2)!.
            let d = 2 * s as u32 + 1;
            for a in 0..=d {
                let b = d - a;
                let exact = 2.0 * fact(a) * fact(b) / fact(a + b + 2);
                let got = gm_mean(&|p: &Point| p[0].powi(a as i32) * p[1].powi(b as i32), &tri, s);
                assert!((got - exact).abs() < 1e-13, "s={s} a={a} b={b}: {got} vs {exact}");
            }
        }
        // Degree 7 in a tetrahedron: mean of x^3 y^2 z^2 = 6 * 3! 2! 2! / 10!.
        let tet = [dvector![0.0, 0.0, 0.0], dvector![1.0, 0.0, 0.0], dvector![0.0, 1.0, 0.0], dvector![0.0, 0.0, 1.0]];
        let exact = 6.0 * 6.0 * 2.0 * 2.0 / fact(10);
        let got = gm_mean(&|p: &Point| p[0].powi(3) * p[1].powi(2) * p[2].powi(2), &tet, 3);
        assert!((got - exact).abs() < 1e-15);
    }

    #[test]
    fn degree2_rule_is_exact_for_quadratics() {
        // Unit right triangle: integral of x^2 is 1/12 over area 1/2.
        let tri = [dvector![0.0, 0.0], dvector![1.0, 0.0], dvector![0.0, 1.0]];
        let m = degree2_mean(&|p: &Point| p[0] * p[0] + p[1] * p[1], &tri);
        assert!((m - 1.0 / 3.0).abs() < 1e-15);
        // Segment [0, 1]: mean of x^2 is 1/3.
        let seg = [dvector![0.0], dvector![1.0]];
        assert!((degree2_mean(&|p: &Point| p[0] * p[0], &seg) - 1.0 / 3.0).abs() < 1e-15);
        // Tetrahedron: mean of x*y over the unit corner tet is 1/20.
        let tet = [dvector![0.0, 0.0, 0.0], dvector![1.0, 0.0, 0.0], dvector![0.0, 1.0, 0.0], dvector![0.0, 0.0, 1.0]];
        assert!((degree2_mean(&|p: &Point| p[0] * p[1], &tet) - 1.0 / 20.0).abs() < 1e-15);
    }
}
