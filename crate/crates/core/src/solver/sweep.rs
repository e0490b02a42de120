use std::cell::RefCell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{ConstitutiveLaw, Material};

use super::grid::GHOST;
use super::state::{transpose, transpose_into, StateField};
use super::{BoundaryCondition, Limiter, SolverConfig};

/// Sweep direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    fn momentum_index(self) -> usize {
        match self {
            Axis::X => 1,
            Axis::Y => 2,
        }
    }
}

/// f-wave decomposition at one interface: a left-going and a right-going
/// wave whose sum is the flux difference `f(q_r) - f(q_l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveFan {
    pub speeds: [f64; 2],
    pub waves: [[f64; 3]; 2],
}

impl WaveFan {
    /// Sum of the waves moving left, `A^- dq`.
    pub fn left_fluctuation(&self) -> [f64; 3] {
        self.waves[0]
    }

    /// Sum of the waves moving right, `A^+ dq`.
    pub fn right_fluctuation(&self) -> [f64; 3] {
        self.waves[1]
    }

    pub fn total(&self) -> [f64; 3] {
        let [a, b] = self.waves;
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }
}

#[inline]
fn impedance_and_speed(law: &ConstitutiveLaw, m: Material, eps: f64) -> Result<(f64, f64, f64)> {
    let w = m.stiffness * eps;
    let (sigma, slope) = law.stress_and_slope(w);
    if !(slope > 0.0 && slope.is_finite()) {
        return Err(Error::HyperbolicityLoss { arg: w, slope });
    }
    let c = (m.stiffness * slope / m.density).sqrt();
    Ok((sigma, c, m.density * c))
}

/// Splits the flux jump between two cells along `axis` into the two acoustic
/// f-waves with speeds `-c_l` and `+c_r`.
pub fn riemann_sweep(
    q_l: [f64; 3],
    q_r: [f64; 3],
    mat_l: Material,
    mat_r: Material,
    law: &ConstitutiveLaw,
    axis: Axis,
) -> Result<WaveFan> {
    let mi = axis.momentum_index();
    let (sig_l, c_l, z_l) = impedance_and_speed(law, mat_l, q_l[0])?;
    let (sig_r, c_r, z_r) = impedance_and_speed(law, mat_r, q_r[0])?;
    let d1 = -(q_r[mi] / mat_r.density - q_l[mi] / mat_l.density);
    let d2 = -(sig_r - sig_l);
    let inv = 1.0 / (z_l + z_r);
    let b1 = (d2 + z_r * d1) * inv;
    let b2 = (z_l * d1 - d2) * inv;
    let mut w1 = [b1, 0.0, 0.0];
    let mut w2 = [b2, 0.0, 0.0];
    w1[mi] = b1 * z_l;
    w2[mi] = -b2 * z_r;
    Ok(WaveFan {
        speeds: [-c_l, c_r],
        waves: [w1, w2],
    })
}

/// Padded work arrays for one sweep line.
#[derive(Default)]
pub(crate) struct LineScratch {
    e: Vec<f64>,
    p: Vec<f64>,
    k: Vec<f64>,
    r: Vec<f64>,
    sig: Vec<f64>,
    c: Vec<f64>,
    z: Vec<f64>,
    vel: Vec<f64>,
    b1: Vec<f64>,
    b2: Vec<f64>,
    fe: Vec<f64>,
    fm: Vec<f64>,
}

impl LineScratch {
    fn resize(&mut self, m: usize) {
        if self.e.len() == m {
            return;
        }
        for v in [
            &mut self.e,
            &mut self.p,
            &mut self.k,
            &mut self.r,
            &mut self.sig,
            &mut self.c,
            &mut self.z,
            &mut self.vel,
            &mut self.b1,
            &mut self.b2,
            &mut self.fe,
            &mut self.fm,
        ] {
            v.clear();
            v.resize(m, 0.0);
        }
    }
}

thread_local! {
    static SCRATCH: RefCell<LineScratch> = RefCell::new(LineScratch::default());
}

#[derive(Clone, Copy)]
pub(crate) struct LineParams<'a> {
    pub law: &'a ConstitutiveLaw,
    pub lambda: f64,
    pub limiter: Limiter,
    pub bc: BoundaryCondition,
}

fn fill_padded(dst: &mut [f64], src: &[f64], bc: BoundaryCondition) {
    let n = src.len();
    dst[GHOST..GHOST + n].copy_from_slice(src);
    for g in 0..GHOST {
        let (lo, hi) = match bc {
            BoundaryCondition::Outflow => (src[0], src[n - 1]),
            BoundaryCondition::Periodic => {
                let back = GHOST - g;
                (src[(n - back % n) % n], src[g % n])
            }
        };
        dst[g] = lo;
        dst[GHOST + n + g] = hi;
    }
}

/// Advances one line of cells by `lambda = dt / h` and returns the largest
/// wave speed seen.
pub(crate) fn sweep_line(
    eps: &mut [f64],
    mom: &mut [f64],
    stiffness: &[f64],
    density: &[f64],
    prm: &LineParams,
    s: &mut LineScratch,
) -> Result<f64> {
    let n = eps.len();
    let m = n + 2 * GHOST;
    s.resize(m);
    fill_padded(&mut s.e, eps, prm.bc);
    fill_padded(&mut s.p, mom, prm.bc);
    fill_padded(&mut s.k, stiffness, prm.bc);
    fill_padded(&mut s.r, density, prm.bc);

    let mut cmax = 0.0f64;
    {
        let (e, p, k, r) = (&s.e[..m], &s.p[..m], &s.k[..m], &s.r[..m]);
        let (sig, c, z, vel) = (
            &mut s.sig[..m],
            &mut s.c[..m],
            &mut s.z[..m],
            &mut s.vel[..m],
        );
        for i in 0..m {
            let w = k[i] * e[i];
            let (sg, slope) = prm.law.stress_and_slope(w);
            if !(slope > 0.0 && slope.is_finite()) {
                return Err(Error::HyperbolicityLoss { arg: w, slope });
            }
            let ci = (k[i] * slope / r[i]).sqrt();
            sig[i] = sg;
            c[i] = ci;
            z[i] = r[i] * ci;
            vel[i] = p[i] / r[i];
            cmax = cmax.max(ci);
        }
    }

    // waves at interface i sit between padded cells i - 1 and i
    {
        let (sig, z, vel) = (&s.sig[..m], &s.z[..m], &s.vel[..m]);
        let (b1, b2) = (&mut s.b1[..m], &mut s.b2[..m]);
        for i in 1..m {
            let d1 = vel[i - 1] - vel[i];
            let d2 = sig[i - 1] - sig[i];
            let (zl, zr) = (z[i - 1], z[i]);
            let inv = 1.0 / (zl + zr);
            b1[i] = (d2 + zr * d1) * inv;
            b2[i] = (zl * d1 - d2) * inv;
        }
    }

    let lambda = prm.lambda;
    {
        let (c, z, b1, b2) = (&s.c[..m], &s.z[..m], &s.b1[..m], &s.b2[..m]);
        let (fe, fm) = (&mut s.fe[..m], &mut s.fm[..m]);
        for i in GHOST..=GHOST + n {
            let (zl, zr) = (z[i - 1], z[i]);
            let (w1, w2) = (b1[i], b2[i]);
            let norm1 = w1 * w1 * (1.0 + zl * zl);
            let th1 = if norm1 > 0.0 {
                w1 * b1[i + 1] * (1.0 + zl * zr) / norm1
            } else {
                0.0
            };
            let norm2 = w2 * w2 * (1.0 + zr * zr);
            let th2 = if norm2 > 0.0 {
                w2 * b2[i - 1] * (1.0 + zr * zl) / norm2
            } else {
                0.0
            };
            let a1 = -0.5 * (1.0 - lambda * c[i - 1]) * prm.limiter.phi(th1) * w1;
            let a2 = 0.5 * (1.0 - lambda * c[i]) * prm.limiter.phi(th2) * w2;
            fe[i] = a1 + a2;
            fm[i] = a1 * zl - a2 * zr;
        }
    }

    let mut finite = true;
    let (e0, p0, z, b1, b2, fe, fm) = (
        &s.e[..m],
        &s.p[..m],
        &s.z[..m],
        &s.b1[..m],
        &s.b2[..m],
        &s.fe[..m],
        &s.fm[..m],
    );
    for (j, (eo, po)) in (GHOST..GHOST + n).zip(eps.iter_mut().zip(mom.iter_mut())) {
        let (plus, minus) = (b2[j], b1[j + 1]);
        let e = e0[j] - lambda * (plus + minus) - lambda * (fe[j + 1] - fe[j]);
        let p = p0[j] - lambda * (minus - plus) * z[j] - lambda * (fm[j + 1] - fm[j]);
        finite &= e.is_finite() && p.is_finite();
        *eo = e;
        *po = p;
    }
    if !finite {
        return Err(Error::NonFiniteState { t: f64::NAN });
    }
    Ok(cmax)
}

fn run_lines(
    eps: &mut [f64],
    mom: &mut [f64],
    stiffness: &[f64],
    density: &[f64],
    len: usize,
    prm: &LineParams,
) -> Result<f64> {
    eps.par_chunks_mut(len)
        .zip(mom.par_chunks_mut(len))
        .zip(stiffness.par_chunks(len).zip(density.par_chunks(len)))
        .map(|((e, p), (k, r))| SCRATCH.with(|s| sweep_line(e, p, k, r, prm, &mut s.borrow_mut())))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

fn sweep_x(state: &mut StateField, prm: &LineParams) -> Result<f64> {
    let nx = state.grid.nx;
    let mat = state.material.clone();
    run_lines(
        &mut state.eps,
        &mut state.mom_x,
        &mat.stiffness,
        &mat.density,
        nx,
        prm,
    )
}

fn sweep_y(state: &mut StateField, prm: &LineParams) -> Result<f64> {
    let (nx, ny) = (state.grid.nx, state.grid.ny);
    let mat = state.material.clone();
    let (kt, rt) = mat.transposed(&state.grid);
    let mut et = transpose(&state.eps, nx, ny);
    let mut pt = transpose(&state.mom_y, nx, ny);
    let cmax = run_lines(&mut et, &mut pt, kt, rt, ny, prm)?;
    transpose_into(&et, &mut state.eps, ny, nx);
    transpose_into(&pt, &mut state.mom_y, ny, nx);
    Ok(cmax)
}

/// Advances in place by `dt` (half `y`, full `x`, half `y`) and returns the
/// largest wave speed met during the step, including the state after the
/// `x` sweep. Single-row grids skip `y`.
pub(crate) fn advance(
    state: &mut StateField,
    law: &ConstitutiveLaw,
    config: &SolverConfig,
    dt: f64,
) -> Result<f64> {
    let g = state.grid;
    let px = LineParams {
        law,
        lambda: dt / g.dx,
        limiter: config.limiter,
        bc: config.bc_x,
    };
    if g.ny == 1 {
        let c = sweep_x(state, &px)?;
        return Ok(c.max(max_speed(state, law)?));
    }
    let py = LineParams {
        lambda: 0.5 * dt / g.dy,
        bc: config.bc_y,
        ..px
    };
    let mut cmax = sweep_y(state, &py)?;
    cmax = cmax.max(sweep_x(state, &px)?);
    cmax = cmax.max(sweep_y(state, &py)?);
    Ok(cmax)
}

/// Largest local sound speed in `state`.
pub(crate) fn max_speed(state: &StateField, law: &ConstitutiveLaw) -> Result<f64> {
    state
        .eps
        .par_iter()
        .zip(state.material.stiffness.par_iter())
        .zip(state.material.density.par_iter())
        .map(|((&e, &k), &r)| law.sound_speed(k, r, e))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Courant number `dt c_max / min(dx, dy)` of a step of size `dt` from `state`.
pub fn max_courant(state: &StateField, law: &ConstitutiveLaw, dt: f64) -> Result<f64> {
    let h = if state.grid.ny == 1 {
        state.grid.dx
    } else {
        state.grid.min_spacing()
    };
    Ok(dt * max_speed(state, law)? / h)
}

/// One Strang-split step of size `dt`. The step must satisfy the configured
/// target Courant number.
pub fn step(
    state: &StateField,
    law: &ConstitutiveLaw,
    config: &SolverConfig,
    dt: f64,
) -> Result<StateField> {
    config.validate()?;
    let courant = max_courant(state, law, dt)?;
    if courant > config.cfl_target * (1.0 + 1e-12) {
        return Err(Error::CflViolation {
            courant,
            limit: config.cfl_target,
        });
    }
    let mut next = state.clone();
    advance(&mut next, law, config, dt)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Grid2D;

    #[test]
    fn waves_sum_to_flux_jump() {
        let law = ConstitutiveLaw::Exponential;
        let (ml, mr) = (Material::new(1.0, 1.0), Material::new(4.0, 2.5));
        let (ql, qr) = ([0.3, 0.2, 0.1], [0.05, -0.4, 0.7]);
        for axis in [Axis::X, Axis::Y] {
            let fan = riemann_sweep(ql, qr, ml, mr, &law, axis).unwrap();
            let mi = axis.momentum_index();
            let flux = |q: [f64; 3], m: Material| {
                let mut f = [-q[mi] / m.density, 0.0, 0.0];
                f[mi] = -law.stress(m.stiffness, q[0]);
                f
            };
            let (fl, fr) = (flux(ql, ml), flux(qr, mr));
            let tot = fan.total();
            for c in 0..3 {
                assert!((tot[c] - (fr[c] - fl[c])).abs() < 1e-14);
            }
            assert!(fan.speeds[0] < 0.0 && fan.speeds[1] > 0.0);
        }
    }

    #[test]
    fn constant_state_is_steady() {
        let grid = Grid2D::new(12, 5, 0.1, 0.2, 0.0, 0.0).unwrap();
        let mut state = StateField::uniform(grid, Material::new(2.0, 3.0));
        state.fill(|_, _, _| (0.1, -0.2, 0.3));
        let law = ConstitutiveLaw::Exponential;
        let next = step(&state, &law, &SolverConfig::default(), 0.01).unwrap();
        assert_eq!(next.eps, state.eps);
        assert_eq!(next.mom_x, state.mom_x);
        assert_eq!(next.mom_y, state.mom_y);
    }

    #[test]
    fn step_rejects_large_courant_number() {
        let grid = Grid2D::line(10, 1.0).unwrap();
        let state = StateField::uniform(grid, Material::new(1.0, 1.0));
        let law = ConstitutiveLaw::linear();
        let err = step(&state, &law, &SolverConfig::default(), 0.2).unwrap_err();
        assert!(matches!(err, Error::CflViolation { .. }));
    }

    #[test]
    fn periodic_ghosts_wrap() {
        let mut dst = vec![0.0; 7];
        fill_padded(&mut dst, &[1.0, 2.0, 3.0], BoundaryCondition::Periodic);
        assert_eq!(dst, vec![2.0, 3.0, 1.0, 2.0, 3.0, 1.0, 2.0]);
        fill_padded(&mut dst[..5], &[9.0], BoundaryCondition::Periodic);
        assert_eq!(&dst[..5], &[9.0; 5]);
        fill_padded(&mut dst, &[1.0, 2.0, 3.0], BoundaryCondition::Outflow);
        assert_eq!(dst, vec![1.0, 1.0, 1.0, 2.0, 3.0, 3.0, 3.0]);
    }
}
