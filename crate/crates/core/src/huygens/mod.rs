//! Support laws for solutions of the wave equation in 2+1 dimensions.
//!
//! Conventions: `p.x = p0 x0 - p.x`, positive-energy plane waves are `e^{i p.x}`,
//! and `h` is the time-axis Hilbert transform with `h(cos) = sin`. With these,
//! `Delta_+` is the boundary value from `x0 + i eps` and `h(Im F) = -Re F` for
//! positive-energy `F`.

mod kernels;
mod synth;

pub use kernels::*;
pub use synth::*;

use ndarray::{Array3, Axis};
use rayon::prelude::*;
use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{ModlocError, Result};

/// Uniform box grid in `(x0, x1, x2)`; array axis 0 is time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeGrid23 {
    pub n_t: usize,
    pub n_s: usize,
    /// Time axis covers `[-t_half, t_half)`.
    pub t_half: f64,
    /// Each spatial axis covers `[-x_half, x_half)`.
    pub x_half: f64,
}

impl SpacetimeGrid23 {
    pub fn new(n_t: usize, n_s: usize, t_half: f64, x_half: f64) -> Result<Self> {
        if !n_t.is_power_of_two() || n_t < 4 {
            return Err(ModlocError::ConfigInvalid(format!("time axis length {n_t} is not a power of two")));
        }
        if n_s < 4 || !(t_half > 0.0) || !(x_half > 0.0) {
            return Err(ModlocError::ConfigInvalid("grid extents and sizes must be positive".into()));
        }
        Ok(Self { n_t, n_s, t_half, x_half })
    }

    /// `n^3` grid used by the support experiments.
    pub fn cube(n: usize) -> Result<Self> {
        Self::new(n, n, 4.0, 6.0)
    }

    pub fn dt(&self) -> f64 {
        2.0 * self.t_half / self.n_t as f64
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_half / self.n_s as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        -self.t_half + self.dt() * i as f64
    }

    pub fn space(&self, j: usize) -> f64 {
        -self.x_half + self.dx() * j as f64
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n_t, self.n_s, self.n_s)
    }
}

/// Multiplier `-i sign(k)` on the FFT bins of a length-`n` line; DC and Nyquist zeroed.
fn hilbert_multiplier(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            if k == 0 || 2 * k == n {
                Complex64::new(0.0, 0.0)
            } else if 2 * k < n {
                Complex64::new(0.0, -1.0)
            } else {
                Complex64::new(0.0, 1.0)
            }
        })
        .collect()
}

/// Periodic Hilbert transform of one real line.
pub fn hilbert_line(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mult = hilbert_multiplier(n);
    let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fwd.process(&mut buf);
    for (b, m) in buf.iter_mut().zip(&mult) {
        *b *= m;
    }
    inv.process(&mut buf);
    buf.iter().map(|z| z.re / n as f64).collect()
}

/// Time-axis Hilbert transform of a grid function (axis 0), parallel over spatial lines.
pub fn hilbert_time(f: &Array3<f64>) -> Array3<f64> {
    let (nt, n1, n2) = f.dim();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(nt);
    let inv = planner.plan_fft_inverse(nt);
    let mult = hilbert_multiplier(nt);
    let lines: Vec<Vec<f64>> = (0..n1 * n2)
        .into_par_iter()
        .map(|l| {
            let (a, b) = (l / n2, l % n2);
            let mut buf: Vec<Complex64> = (0..nt).map(|i| Complex64::new(f[[i, a, b]], 0.0)).collect();
            fwd.process(&mut buf);
            for (x, m) in buf.iter_mut().zip(&mult) {
                *x *= m;
            }
            inv.process(&mut buf);
            buf.iter().map(|z| z.re / nt as f64).collect()
        })
        .collect();
    let mut out = Array3::zeros((nt, n1, n2));
    for (l, line) in lines.iter().enumerate() {
        let (a, b) = (l / n2, l % n2);
        for (i, v) in line.iter().enumerate() {
            out[[i, a, b]] = *v;
        }
    }
    out
}

/// Subtract the time average of every spatial line.
pub fn remove_time_mean(f: &mut Array3<f64>) {
    let mean = f.mean_axis(Axis(0)).expect("non-empty time axis");
    for mut slice in f.axis_iter_mut(Axis(0)) {
        slice -= &mean;
    }
}

/// Leakage of a solution outside the causal shadow of the double cone `O_R` (centered at the origin).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub grid: SpacetimeGrid23,
    /// Radius `R` of the double cone whose complements are sampled.
    pub region: f64,
    /// `sup |Im F|` on the spacelike complement over the global sup.
    pub leakage_spacelike: f64,
    /// `sup |h(Im F)|` on the timelike complement over the global sup.
    pub leakage_timelike: f64,
    /// `||box_h Re F|| / ||Re F||` on interior points.
    pub residual_wave: f64,
    pub spacelike_points: usize,
    pub timelike_points: usize,
}

/// Sup-norm leakage of `Im F` on `{|x| > |x0| + R + g}` and of `h(Im F) = -Re F` on
/// `{|x0| > |x| + R + g}`, with a guard band `g` of `guard_cells` cells.
pub fn verify_huygens(f: &Array3<num_complex::Complex64>, grid: &SpacetimeGrid23, region: f64, guard_cells: f64) -> SupportReport {
    let g = guard_cells * grid.dt().max(grid.dx());
    let (mut sup_im, mut sup_h, mut leak_s, mut leak_t) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut ns, mut nt) = (0, 0);
    for ((i, a, b), z) in f.indexed_iter() {
        let t = grid.time(i).abs();
        let rho = grid.space(a).hypot(grid.space(b));
        let (im, hv) = (z.im.abs(), z.re.abs());
        sup_im = sup_im.max(im);
        sup_h = sup_h.max(hv);
        if rho > t + region + g {
            leak_s = leak_s.max(im);
            ns += 1;
        }
        if t > rho + region + g {
            leak_t = leak_t.max(hv);
            nt += 1;
        }
    }
    let rel = |x: f64, s: f64| if s > 0.0 { x / s } else { 0.0 };
    SupportReport {
        grid: *grid,
        region,
        leakage_spacelike: rel(leak_s, sup_im),
        leakage_timelike: rel(leak_t, sup_h),
        residual_wave: wave_residual(&f.mapv(|z| z.re), grid),
        spacelike_points: ns,
        timelike_points: nt,
    }
}

/// `||box_h u||` relative to `||(u_tt, lap u)||` on interior nodes, second-order stencils.
pub fn wave_residual(u: &Array3<f64>, grid: &SpacetimeGrid23) -> f64 {
    let (nt, n1, n2) = u.dim();
    let (dt2, dx2) = (grid.dt().powi(2), grid.dx().powi(2));
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..nt - 1 {
        for a in 1..n1 - 1 {
            for b in 1..n2 - 1 {
                let c = u[[i, a, b]];
                let utt = (u[[i + 1, a, b]] - 2.0 * c + u[[i - 1, a, b]]) / dt2;
                let lap = (u[[i, a + 1, b]] + u[[i, a - 1, b]] + u[[i, a, b + 1]] + u[[i, a, b - 1]] - 4.0 * c) / dx2;
                num += (utt - lap).powi(2);
                den += utt.powi(2) + lap.powi(2);
            }
        }
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Binary grid-function header written before little-endian `f64` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunctionHeader {
    pub grid: SpacetimeGrid23,
    pub name: String,
    pub encoding: String,
}

pub fn write_grid_function<W: std::io::Write>(name: &str, grid: &SpacetimeGrid23, f: &Array3<f64>, mut w: W) -> Result<()> {
    let header = GridFunctionHeader { grid: *grid, name: name.into(), encoding: "f64-le, axis order (t, x1, x2)".into() };
    let js = serde_json::to_string(&header)?;
    w.write_all(&(js.len() as u64).to_le_bytes())?;
    w.write_all(js.as_bytes())?;
    for v in f.iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_grid_function<R: std::io::Read>(mut r: R) -> Result<(GridFunctionHeader, Array3<f64>)> {
    let mut len = [0u8; 8];
    r.read_exact(&mut len)?;
    let mut js = vec![0u8; u64::from_le_bytes(len) as usize];
    r.read_exact(&mut js)?;
    let header: GridFunctionHeader = serde_json::from_slice(&js)?;
    let shape = header.grid.shape();
    let mut data = vec![0.0; shape.0 * shape.1 * shape.2];
    let mut b = [0u8; 8];
    for v in data.iter_mut() {
        r.read_exact(&mut b)?;
        *v = f64::from_le_bytes(b);
    }
    let arr = Array3::from_shape_vec(shape, data).map_err(|e| ModlocError::Numerical(e.to_string()))?;
    Ok((header, arr))
}
