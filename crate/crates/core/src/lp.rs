//! Dense two-phase tableau simplex for small linear programs.
//!
//! Solves `maximize c.x  s.t.  A x <= b, x >= 0` with Bland's rule. The
//! problems in this crate have at most a few dozen constraints and a handful
//! of variables, so a dense tableau is all that is needed.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Dual multipliers, one per constraint row (all nonnegative).
    pub duals: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    rhs: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations; columns with `blocked[j]` never enter.
    /// Returns false when the objective is unbounded.
    fn run(&mut self, blocked: &[bool], max_iter: usize) -> Result<bool> {
        for _ in 0..max_iter {
            let entering = (0..self.rhs).find(|&j| !blocked[j] && self.obj[j] < -PIVOT_EPS);
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[c];
                if a > PIVOT_EPS {
                    let ratio = row[self.rhs] / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-12
                                || ((ratio - br).abs() <= 1e-12 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Err(Error::NumericalFailure("simplex iteration budget exhausted".into()))
    }
}

/// Solves `maximize c.x  s.t.  A x <= b, x >= 0`.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpOutcome> {
    let nv = c.len();
    let m = a.len();
    if b.len() != m || a.iter().any(|row| row.len() != nv) {
        return Err(Error::InvalidArgument("LP dimensions are inconsistent".into()));
    }
    // Columns: originals, slacks, one artificial, rhs.
    let art = nv + m;
    let rhs = art + 1;
    let mut rows = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let mut r = vec![0.0; rhs + 1];
        r[..nv].copy_from_slice(row);
        r[nv + i] = 1.0;
        r[art] = -1.0;
        r[rhs] = b[i];
        rows.push(r);
    }
    let mut t = Tableau { rows, obj: vec![0.0; rhs + 1], basis: (nv..nv + m).collect(), rhs };
    let max_iter = 200 * (m + nv) + 1000;
    let mut blocked = vec![false; rhs];

    let worst = (0..m).min_by(|&i, &j| b[i].total_cmp(&b[j]));
    match worst {
        Some(r) if b[r] < 0.0 => {
            t.obj[art] = 1.0;
            t.pivot(r, art);
            t.run(&blocked, max_iter)?;
            if t.obj[rhs] < -FEAS_EPS {
                return Ok(LpOutcome::Infeasible);
            }
            if let Some(r) = t.basis.iter().position(|&bv| bv == art) {
                if let Some(c) = (0..art).find(|&j| t.rows[r][j].abs() > PIVOT_EPS) {
                    t.pivot(r, c);
                }
            }
        }
        _ => {}
    }
    blocked[art] = true;
    for row in t.rows.iter_mut() {
        if row[art] != 0.0 && !t.basis.contains(&art) {
            row[art] = 0.0;
        }
    }

    t.obj = vec![0.0; rhs + 1];
    for (o, cj) in t.obj.iter_mut().zip(&c[..nv]) {
        *o = -cj;
    }
    for i in 0..m {
        let bv = t.basis[i];
        let f = t.obj[bv];
        if f != 0.0 {
            let row = t.rows[i].clone();
            for (v, rv) in t.obj.iter_mut().zip(&row) {
                *v -= f * rv;
            }
        }
    }
    if !t.run(&blocked, max_iter)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![0.0; nv];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < nv {
            x[bv] = t.rows[i][rhs];
        }
    }
    let duals = (0..m).map(|i| t.obj[nv + i].max(0.0)).collect();
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpOutcome::Optimal(LpSolution { x, value, duals }))
}
