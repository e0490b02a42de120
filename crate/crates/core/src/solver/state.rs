use std::sync::{Arc, OnceLock};

use crate::error::Result;
use crate::media::{ConstitutiveLaw, Material, MediumSpec};
use crate::rh::ShockSetup;

use super::grid::Grid2D;

/// Bulk modulus and density sampled at cell centres.
#[derive(Debug)]
pub struct MaterialField {
    pub(crate) stiffness: Vec<f64>,
    pub(crate) density: Vec<f64>,
    transposed: OnceLock<(Vec<f64>, Vec<f64>)>,
}

impl MaterialField {
    fn new(stiffness: Vec<f64>, density: Vec<f64>) -> Self {
        Self {
            stiffness,
            density,
            transposed: OnceLock::new(),
        }
    }

    /// Column-major copies, used by the `y` sweeps.
    pub(crate) fn transposed(&self, grid: &Grid2D) -> &(Vec<f64>, Vec<f64>) {
        self.transposed.get_or_init(|| {
            (
                transpose(&self.stiffness, grid.nx, grid.ny),
                transpose(&self.density, grid.nx, grid.ny),
            )
        })
    }
}

/// Conserved variables `(eps, rho u, rho v)` on a [`Grid2D`], row-major,
/// with the cell materials they live in.
#[derive(Debug, Clone)]
pub struct StateField {
    pub(crate) grid: Grid2D,
    pub(crate) eps: Vec<f64>,
    pub(crate) mom_x: Vec<f64>,
    pub(crate) mom_y: Vec<f64>,
    pub(crate) material: Arc<MaterialField>,
}

impl StateField {
    /// Zero state in a medium described by `material(x, y)`.
    pub fn with_material(grid: Grid2D, material: impl Fn(f64, f64) -> Material) -> Self {
        let n = grid.len();
        let mut stiffness = Vec::with_capacity(n);
        let mut density = Vec::with_capacity(n);
        for j in 0..grid.ny {
            let y = grid.y_center(j);
            for i in 0..grid.nx {
                let m = material(grid.x_center(i), y);
                stiffness.push(m.stiffness);
                density.push(m.density);
            }
        }
        Self {
            grid,
            eps: vec![0.0; n],
            mom_x: vec![0.0; n],
            mom_y: vec![0.0; n],
            material: Arc::new(MaterialField::new(stiffness, density)),
        }
    }

    /// Zero state with the medium sampled at cell centres.
    pub fn from_medium(grid: Grid2D, spec: &MediumSpec) -> Self {
        Self::with_material(grid, |x, y| spec.material_at(x, y))
    }

    pub fn uniform(grid: Grid2D, material: Material) -> Self {
        Self::with_material(grid, |_, _| material)
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub fn mom_x(&self) -> &[f64] {
        &self.mom_x
    }

    pub fn mom_y(&self) -> &[f64] {
        &self.mom_y
    }

    pub fn stiffness(&self) -> &[f64] {
        &self.material.stiffness
    }

    pub fn density(&self) -> &[f64] {
        &self.material.density
    }

    pub fn material(&self, i: usize, j: usize) -> Material {
        let k = self.grid.index(i, j);
        Material::new(self.material.stiffness[k], self.material.density[k])
    }

    /// `(eps, rho u, rho v)` of cell `(i, j)`.
    pub fn cell(&self, i: usize, j: usize) -> [f64; 3] {
        let k = self.grid.index(i, j);
        [self.eps[k], self.mom_x[k], self.mom_y[k]]
    }

    pub fn set_cell(&mut self, i: usize, j: usize, q: [f64; 3]) {
        let k = self.grid.index(i, j);
        self.eps[k] = q[0];
        self.mom_x[k] = q[1];
        self.mom_y[k] = q[2];
    }

    /// Sets every cell from `f(x, y, material) -> (eps, u, v)`.
    pub fn try_fill(
        &mut self,
        f: impl Fn(f64, f64, Material) -> Result<(f64, f64, f64)>,
    ) -> Result<()> {
        let grid = self.grid;
        for j in 0..grid.ny {
            let y = grid.y_center(j);
            for i in 0..grid.nx {
                let k = grid.index(i, j);
                let m = self.material(i, j);
                let (eps, u, v) = f(grid.x_center(i), y, m)?;
                self.eps[k] = eps;
                self.mom_x[k] = m.density * u;
                self.mom_y[k] = m.density * v;
            }
        }
        Ok(())
    }

    pub fn fill(&mut self, f: impl Fn(f64, f64, Material) -> (f64, f64, f64)) {
        self.try_fill(|x, y, m| Ok(f(x, y, m)))
            .expect("infallible fill");
    }

    /// Right-going shock at `x_front`: uniform stress and velocity on each
    /// side, strain set locally so that `f(K eps)` equals the side's stress.
    pub fn set_shock(
        &mut self,
        setup: &ShockSetup,
        law: &ConstitutiveLaw,
        x_front: f64,
    ) -> Result<()> {
        let w_l = law.stress_hat_inverse(setup.sigma_l)?;
        let w_r = law.stress_hat_inverse(setup.sigma_r)?;
        self.try_fill(|x, _, m| {
            let (w, u) = if x < x_front {
                (w_l, setup.u_l)
            } else {
                (w_r, setup.u_r)
            };
            Ok((w / m.stiffness, u, 0.0))
        })
    }

    /// Cell sums of `(eps, rho u, rho v)` times the cell area, accumulated
    /// row by row in a fixed order.
    pub fn totals(&self) -> [f64; 3] {
        let sum = |v: &[f64]| {
            v.chunks(self.grid.nx)
                .map(|row| row.iter().sum::<f64>())
                .sum::<f64>()
                * self.grid.cell_area()
        };
        [sum(&self.eps), sum(&self.mom_x), sum(&self.mom_y)]
    }

    pub fn is_finite(&self) -> bool {
        self.eps
            .iter()
            .chain(&self.mom_x)
            .chain(&self.mom_y)
            .all(|v| v.is_finite())
    }

    /// Stress in every cell.
    pub fn stress(&self, law: &ConstitutiveLaw) -> Vec<f64> {
        self.eps
            .iter()
            .zip(&self.material.stiffness)
            .map(|(&e, &k)| law.stress(k, e))
            .collect()
    }

    /// `x` velocity in every cell.
    pub fn velocity_x(&self) -> Vec<f64> {
        self.mom_x
            .iter()
            .zip(&self.material.density)
            .map(|(&m, &r)| m / r)
            .collect()
    }
}

/// Row-major `rows x cols` to row-major `cols x rows`.
pub(crate) fn transpose(src: &[f64], cols: usize, rows: usize) -> Vec<f64> {
    let mut dst = vec![0.0; src.len()];
    transpose_into(src, &mut dst, cols, rows);
    dst
}

pub(crate) fn transpose_into(src: &[f64], dst: &mut [f64], cols: usize, rows: usize) {
    const B: usize = 32;
    for jb in (0..rows).step_by(B) {
        for ib in (0..cols).step_by(B) {
            for j in jb..(jb + B).min(rows) {
                for i in ib..(ib + B).min(cols) {
                    dst[i * rows + j] = src[j * cols + i];
                }
            }
        }
    }
}
