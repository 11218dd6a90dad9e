use std::f64::consts::PI;

use super::{check_point, Point};
use crate::error::{Error, Result};

/// Volume of the unit ball in R^n via `w_n = 2 pi / n * w_{n-2}`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// `Gamma(k / 2)` for a positive integer `k`.
fn gamma_half(k: usize) -> f64 {
    match k {
        1 => PI.sqrt(),
        2 => 1.0,
        _ => (k as f64 / 2.0 - 1.0) * gamma_half(k - 2),
    }
}

/// Measure of the unit sphere in R^n, `2 pi^(n/2) / Gamma(n/2)`.
pub fn unit_sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

#[derive(Debug, Clone)]
pub struct Ball {
    center: Point,
    radius: f64,
}

impl Ball {
    pub fn new(dim: usize, center: Point, radius: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        check_point(&center)?;
        if center.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: center.len() });
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument("ball radius must be positive".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }

    /// Measure of the bounding sphere, `n |B_n| / r`.
    pub fn surface_measure(&self) -> f64 {
        self.dim() as f64 * self.volume() / self.radius
    }
}
