//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

pub(crate) fn mean_point(points: &[DVector<f64>]) -> DVector<f64> {
    let n = points[0].len();
    let mut acc = DVector::zeros(n);
    for p in points {
        acc += p;
    }
    acc / points.len() as f64
}

/// Matrix whose columns are `v_i - v_0`, i = 1..=k.
pub(crate) fn edge_matrix(vertices: &[DVector<f64>]) -> DMatrix<f64> {
    let n = vertices[0].len();
    let k = vertices.len() - 1;
    DMatrix::from_fn(n, k, |r, c| vertices[c + 1][r] - vertices[0][r])
}

/// k-dimensional measure of the simplex spanned by `k + 1` vertices in R^n.
pub(crate) fn simplex_measure(vertices: &[DVector<f64>]) -> f64 {
    let n = vertices[0].len();
    let k = vertices.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let e = edge_matrix(vertices);
    let gram_det = if k == n {
        let d = e.determinant();
        d * d
    } else {
        (e.transpose() * &e).determinant()
    };
    gram_det.max(0.0).sqrt() / factorial(k)
}

/// Signed volume of a full-dimensional simplex (n + 1 vertices in R^n).
pub(crate) fn signed_volume(vertices: &[DVector<f64>]) -> f64 {
    let n = vertices[0].len();
    edge_matrix(vertices).determinant() / factorial(n)
}

/// Number of singular values of the centred point cloud above `tol`.
pub(crate) fn affine_rank(points: &[&DVector<f64>], tol: f64) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let n = points[0].len();
    let rows = (points.len() - 1).max(n);
    let mut m = DMatrix::zeros(rows, n);
    for (r, p) in points.iter().skip(1).enumerate() {
        for c in 0..n {
            m[(r, c)] = p[c] - points[0][c];
        }
    }
    m.singular_values().iter().filter(|&&s| s > tol).count()
}

/// Unit normal and offset of the hyperplane best fitting `points`
/// (smallest right singular vector of the centred cloud). The sign is
/// arbitrary. Returns the residual `max |normal . p - offset|` as well.
pub(crate) fn fit_hyperplane(points: &[&DVector<f64>]) -> (DVector<f64>, f64, f64) {
    let n = points[0].len();
    let owned: Vec<DVector<f64>> = points.iter().map(|p| (*p).clone()).collect();
    let c = mean_point(&owned);
    let rows = points.len().max(n);
    let mut m = DMatrix::zeros(rows, n);
    for (r, p) in points.iter().enumerate() {
        for col in 0..n {
            m[(r, col)] = p[col] - c[col];
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let normal: DVector<f64> = v_t.row(idx).transpose().normalize();
    let offset = normal.dot(&c);
    let residual = points
        .iter()
        .map(|p| (normal.dot(p) - offset).abs())
        .fold(0.0, f64::max);
    (normal, offset, residual)
}

/// Orthonormal basis (columns) of the directions spanned by `p_i - p_0`.
pub(crate) fn affine_frame(points: &[&DVector<f64>], tol: f64) -> DMatrix<f64> {
    let n = points[0].len();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for p in points.iter().skip(1) {
        let mut v: DVector<f64> = *p - points[0];
        for b in &basis {
            let proj = b.dot(&v);
            v -= b * proj;
        }
        let norm = v.norm();
        if norm > tol {
            basis.push(v / norm);
        }
        if basis.len() == n {
            break;
        }
    }
    if basis.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    DMatrix::from_columns(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    #[test]
    fn measures_of_unit_simplices() {
        let tri = [dvector![0.0, 0.0], dvector![1.0, 0.0], dvector![0.0, 1.0]];
        assert_relative_eq!(simplex_measure(&tri), 0.5);
        assert_relative_eq!(signed_volume(&tri), 0.5);
        let seg = [dvector![0.0, 0.0, 0.0], dvector![3.0, 4.0, 0.0]];
        assert_relative_eq!(simplex_measure(&seg), 5.0);
        let flat = [dvector![0.0, 0.0, 1.0], dvector![2.0, 0.0, 1.0], dvector![0.0, 2.0, 1.0]];
        assert_relative_eq!(simplex_measure(&flat), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn rank_and_hyperplane() {
        let pts = [dvector![0.0, 0.0, 2.0], dvector![1.0, 0.0, 2.0], dvector![0.0, 1.0, 2.0], dvector![1.0, 1.0, 2.0]];
        let refs: Vec<&DVector<f64>> = pts.iter().collect();
        assert_eq!(affine_rank(&refs, 1e-9), 2);
        let (normal, offset, residual) = fit_hyperplane(&refs);
        assert!(residual < 1e-12);
        assert_relative_eq!(normal[2].abs(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(offset.abs(), 2.0, epsilon = 1e-12);
        let frame = affine_frame(&refs, 1e-9);
        assert_eq!(frame.ncols(), 2);
    }
}
