use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{sin_cos_deg, MediumSpec};

/// Ghost-cell width on each side of a sweep line.
pub const GHOST: usize = 2;

/// Uniform cell-centred grid on `[x0, x0 + nx dx] x [y0, y0 + ny dy]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, x0: f64, y0: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidGrid(format!(
                "need at least one cell, got {nx} x {ny}"
            )));
        }
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "cell sizes must be positive, got {dx} x {dy}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            dx,
            dy,
            x0,
            y0,
        })
    }

    /// Single row of cells, used for one-dimensional problems.
    pub fn line(nx: usize, length: f64) -> Result<Self> {
        let dx = length / nx as f64;
        Self::new(nx, 1, dx, dx, 0.0, 0.0)
    }

    /// Grid for a plane wave travelling along `x` through `spec`.
    ///
    /// The `y` extent is one projected material period, `period / cos(theta)`,
    /// so that periodic boundaries in `y` are exact. Transverse propagation
    /// (`theta = 90`) uses a strip four cells high.
    pub fn for_medium(spec: &MediumSpec, resolution: f64, length_x: f64) -> Result<Self> {
        if !(resolution > 0.0 && length_x > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "resolution {resolution} and length {length_x} must be positive"
            )));
        }
        let nx = (length_x * resolution).round().max(1.0) as usize;
        let dx = length_x / nx as f64;
        let (_, cos) = sin_cos_deg(spec.theta);
        if cos == 0.0 {
            return Self::new(nx, 4, dx, dx, 0.0, 0.0);
        }
        let length_y = spec.period / cos;
        let ny = (length_y * resolution).round().max(1.0) as usize;
        Self::new(nx, ny, dx, length_y / ny as f64, 0.0, 0.0)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn x_center(&self, i: usize) -> f64 {
        self.x0 + (i as f64 + 0.5) * self.dx
    }

    #[inline]
    pub fn y_center(&self, j: usize) -> f64 {
        self.y0 + (j as f64 + 0.5) * self.dy
    }

    pub fn length_x(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn length_y(&self) -> f64 {
        self.ny as f64 * self.dy
    }

    /// Width a row contributes to `y` integrals. Single-row grids are
    /// measured per unit width.
    pub fn row_width(&self) -> f64 {
        if self.ny == 1 {
            1.0
        } else {
            self.dy
        }
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.row_width()
    }

    pub fn min_spacing(&self) -> f64 {
        self.dx.min(self.dy)
    }
}
