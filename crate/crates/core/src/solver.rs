//! Spectral solver on the periodic box `[−L, L)ⁿ`, `n ≤ 3`.
//!
//! Each discrete Fourier mode is advanced with the closed-form fundamental
//! pair, so `evolve(t)` involves no time stepping. Spectral values are
//! stored in the continuous normalization `û(ξ_k) ≈ ∫ e^{−ix·ξ_k} u dx`, with
//! `ξ_k = πk/L`, so they can be compared directly with analytic transforms.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::modes::fundamental_at;
use crate::multiplier::sigma_of;
use crate::profile::InitialDatum;

/// Largest points-per-axis accepted for three-dimensional grids.
pub const MAX_POINTS_3D: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub dim: u32,
    /// Half side `L` of the box `[−L, L)ⁿ`.
    pub half_length: f64,
    /// Points per axis `N`, a power of two.
    pub points_per_dim: usize,
}

impl GridSpec {
    pub fn new(dim: u32, half_length: f64, points_per_dim: usize) -> Result<GridSpec> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Unsupported(format!("grids of dimension {dim}")));
        }
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(domain(format!(
                "half length must be positive, got {half_length}"
            )));
        }
        if points_per_dim < 2 || !points_per_dim.is_power_of_two() {
            return Err(domain(format!(
                "points per axis must be a power of two >= 2, got {points_per_dim}"
            )));
        }
        if dim == 3 && points_per_dim > MAX_POINTS_3D {
            return Err(Error::Unsupported(format!(
                "three-dimensional grids above {MAX_POINTS_3D} points per axis"
            )));
        }
        Ok(GridSpec {
            dim,
            half_length,
            points_per_dim,
        })
    }

    /// Total number of points.
    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dim)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.points_per_dim as f64
    }

    pub fn cell_measure(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Volume `(2L)ⁿ` of the box.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_length).powi(self.dim as i32)
    }

    /// Coordinate of index `i` along an axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_length + i as f64 * self.spacing()
    }

    /// Signed wavenumber of FFT index `k`: `k` for `k < N/2`, else `k − N`.
    /// The Nyquist index maps to `−N/2`.
    pub fn wavenumber(&self, k: usize) -> i64 {
        let n = self.points_per_dim as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Angular frequency `πk/L` of FFT index `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        std::f64::consts::PI * self.wavenumber(k) as f64 / self.half_length
    }

    fn multi_index(&self, mut flat: usize) -> [usize; 3] {
        let n = self.points_per_dim;
        let mut idx = [0usize; 3];
        for axis in (0..self.dim as usize).rev() {
            idx[axis] = flat % n;
            flat /= n;
        }
        idx
    }

    /// `|ξ|` at flat spectral index `flat`.
    pub fn frequency_radius(&self, flat: usize) -> f64 {
        let idx = self.multi_index(flat);
        (0..self.dim as usize)
            .map(|a| self.frequency(idx[a]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `|x|` at flat physical index `flat`.
    pub fn position_radius(&self, flat: usize) -> f64 {
        let idx = self.multi_index(flat);
        (0..self.dim as usize)
            .map(|a| self.coordinate(idx[a]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `(−1)^{Σk}`: the phase from the box starting at `−L`.
    fn shift_sign(&self, flat: usize) -> f64 {
        let idx = self.multi_index(flat);
        if idx[..self.dim as usize].iter().sum::<usize>() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Last time for which the solution is trusted to be unaffected by
    /// periodic wrap-around: `L/2` minus the data support radius.
    pub fn trusted_horizon(&self, support_radius: f64) -> f64 {
        (0.5 * self.half_length - support_radius).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Space {
    Physical,
    Spectral,
}

/// Row-major `Nⁿ` array on a grid; physical fields carry zero imaginary
/// parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    space: Space,
    values: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: GridSpec, space: Space) -> Field {
        Field {
            grid,
            space,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64 + Sync) -> Field {
        let d = grid.dim as usize;
        let values = (0..grid.len())
            .into_par_iter()
            .map(|flat| {
                let idx = grid.multi_index(flat);
                let mut x = [0.0; 3];
                for a in 0..d {
                    x[a] = grid.coordinate(idx[a]);
                }
                Complex64::new(f(&x[..d]), 0.0)
            })
            .collect();
        Field {
            grid,
            space: Space::Physical,
            values,
        }
    }

    /// Samples a radial datum on the grid.
    pub fn radial(grid: GridSpec, datum: &InitialDatum) -> Result<Field> {
        if datum.dim != grid.dim {
            return Err(Error::GridMismatch(format!(
                "datum of dimension {} on a {}-d grid",
                datum.dim, grid.dim
            )));
        }
        datum.physical_value(0.0)?;
        let values = (0..grid.len())
            .into_par_iter()
            .map(|flat| {
                Complex64::new(
                    datum
                        .physical_value(grid.position_radius(flat))
                        .unwrap_or(0.0),
                    0.0,
                )
            })
            .collect();
        Ok(Field {
            grid,
            space: Space::Physical,
            values,
        })
    }

    pub fn from_values(grid: GridSpec, space: Space, values: Vec<Complex64>) -> Result<Field> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field {
            grid,
            space,
            values,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn to_spectral(&self) -> Field {
        match self.space {
            Space::Spectral => self.clone(),
            Space::Physical => {
                let mut values = self.values.clone();
                fft_nd(&self.grid, &mut values, false);
                let cell = self.grid.cell_measure();
                let g = self.grid;
                values
                    .par_iter_mut()
                    .enumerate()
                    .for_each(|(k, z)| *z *= cell * g.shift_sign(k));
                Field {
                    grid: self.grid,
                    space: Space::Spectral,
                    values,
                }
            }
        }
    }

    pub fn to_physical(&self) -> Field {
        match self.space {
            Space::Physical => self.clone(),
            Space::Spectral => {
                let g = self.grid;
                let mut values: Vec<Complex64> = self
                    .values
                    .par_iter()
                    .enumerate()
                    .map(|(k, z)| z * g.shift_sign(k))
                    .collect();
                fft_nd(&self.grid, &mut values, true);
                let scale = 1.0 / self.grid.volume();
                values.par_iter_mut().for_each(|z| *z *= scale);
                Field {
                    grid: self.grid,
                    space: Space::Physical,
                    values,
                }
            }
        }
    }

    /// `max_k |û(k) − conj(û(−k))| / max_k |û(k)|`; zero for the spectrum of
    /// real data.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let spec = self.to_spectral();
        let g = self.grid;
        let n = g.points_per_dim;
        let d = g.dim as usize;
        let scale = spec.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let worst = (0..g.len())
            .map(|flat| {
                let idx = g.multi_index(flat);
                let mut mirror = 0;
                for &i in &idx[..d] {
                    mirror = mirror * n + (n - i) % n;
                }
                (spec.values[flat] - spec.values[mirror].conj()).norm()
            })
            .fold(0.0, f64::max);
        worst / scale
    }

    fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }
}

/// In-place n-dimensional FFT (unnormalized).
fn fft_nd(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let n = grid.points_per_dim;
    let d = grid.dim as usize;
    let mut planner = FftPlanner::<f64>::new();
    let fft: Arc<dyn Fft<f64>> = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        let block = n * stride;
        data.par_chunks_mut(block).for_each(|chunk| {
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            if stride == 1 {
                fft.process_with_scratch(chunk, &mut scratch);
                return;
            }
            for inner in 0..stride {
                for (j, z) in line.iter_mut().enumerate() {
                    *z = chunk[inner + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, z) in line.iter().enumerate() {
                    chunk[inner + j * stride] = *z;
                }
            }
        });
    }
}

/// One output sample of a solver run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub l2_u: f64,
    pub energy: f64,
    pub linf_u: f64,
}

/// Precomputed spectra of `(u₀, u₁)`, evaluated at any `t` in one shot.
#[derive(Debug, Clone)]
pub struct Evolver {
    grid: GridSpec,
    u0_hat: Vec<Complex64>,
    u1_hat: Vec<Complex64>,
    radii: Vec<f64>,
}

impl Evolver {
    pub fn new(u0: &Field, u1: &Field) -> Result<Evolver> {
        u0.check_same_grid(u1)?;
        let grid = u0.grid;
        let radii = (0..grid.len())
            .into_par_iter()
            .map(|k| grid.frequency_radius(k))
            .collect();
        Ok(Evolver {
            grid,
            u0_hat: u0.to_spectral().values,
            u1_hat: u1.to_spectral().values,
            radii,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Spectral `(û(t), û_t(t))`.
    pub fn spectra_at(&self, t: f64) -> Result<(Field, Field)> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(domain(format!("t must be nonnegative, got {t}")));
        }
        let (u, v): (Vec<Complex64>, Vec<Complex64>) = self
            .radii
            .par_iter()
            .zip(self.u0_hat.par_iter().zip(self.u1_hat.par_iter()))
            .map(|(&r, (&a, &b))| fundamental_at(r, t).apply(a, b))
            .unzip();
        Ok((
            Field {
                grid: self.grid,
                space: Space::Spectral,
                values: u,
            },
            Field {
                grid: self.grid,
                space: Space::Spectral,
                values: v,
            },
        ))
    }

    /// Physical `(u(t), u_t(t))`.
    pub fn at(&self, t: f64) -> Result<(Field, Field)> {
        let (u, v) = self.spectra_at(t)?;
        Ok((u.to_physical(), v.to_physical()))
    }

    pub fn snapshot(&self, t: f64) -> Result<Snapshot> {
        let (u, v) = self.spectra_at(t)?;
        let (l2_u, energy) = norms(&u, &v)?;
        let linf_u = u
            .to_physical()
            .values
            .iter()
            .map(|z| z.re.abs())
            .fold(0.0, f64::max);
        Ok(Snapshot {
            t,
            l2_u,
            energy,
            linf_u,
        })
    }

    pub fn series(&self, times: &[f64]) -> Result<Vec<Snapshot>> {
        times.iter().map(|&t| self.snapshot(t)).collect()
    }
}

/// Advances `(u₀, u₁)` to time `t`; returns physical `(u, u_t)`.
pub fn evolve(grid: &GridSpec, u0: &Field, u1: &Field, t: f64) -> Result<(Field, Field)> {
    if u0.grid != *grid {
        return Err(Error::GridMismatch(
            "u0 is not on the requested grid".into(),
        ));
    }
    Evolver::new(u0, u1)?.at(t)
}

/// Physical `‖u‖_{L²}` and energy `½(‖u_t‖² + ‖L^{1/2}u‖²)`, both from the
/// spectra by Parseval.
pub fn norms(u: &Field, ut: &Field) -> Result<(f64, f64)> {
    u.check_same_grid(ut)?;
    let grid = u.grid;
    let (us, vs) = (u.to_spectral(), ut.to_spectral());
    let (l2_sq, en) = us
        .values
        .par_iter()
        .zip(vs.values.par_iter())
        .enumerate()
        .map(|(k, (a, b))| {
            let s = sigma_of(grid.frequency_radius(k));
            (a.norm_sqr(), b.norm_sqr() + s * a.norm_sqr())
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    let inv_vol = 1.0 / grid.volume();
    Ok(((l2_sq * inv_vol).sqrt(), 0.5 * en * inv_vol))
}

/// `‖u‖_{L²}` computed directly from physical samples.
pub fn physical_l2(u: &Field) -> f64 {
    let p = u.to_physical();
    (p.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * u.grid.cell_measure()).sqrt()
}
