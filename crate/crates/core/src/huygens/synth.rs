use ndarray::{Array2, Array3};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::SpacetimeGrid23;
use crate::error::{ModlocError, Result};

/// Real source function on spacetime with a known Fourier transform
/// `h^(p) = int h(y) e^{-i p.y} dy` on the forward cone.
pub trait Source {
    fn value(&self, y: [f64; 3]) -> f64;
    fn fourier(&self, p: [f64; 3]) -> Complex64;
}

/// Zero-mean Gaussian bump `(3 - |y - c|^2/sigma^2) G_sigma(y - c)` (Euclidean Laplacian profile).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSource {
    pub center: [f64; 3],
    pub sigma: f64,
    pub amplitude: f64,
}

impl GaussianSource {
    pub fn centered(sigma: f64) -> Self {
        Self { center: [0.0; 3], sigma, amplitude: 1.0 }
    }
}

impl Source for GaussianSource {
    fn value(&self, y: [f64; 3]) -> f64 {
        let s2 = self.sigma * self.sigma;
        let d2: f64 = (0..3).map(|k| (y[k] - self.center[k]).powi(2)).sum();
        let norm = (2.0 * std::f64::consts::PI * s2).powf(-1.5);
        self.amplitude * (3.0 - d2 / s2) * norm * (-d2 / (2.0 * s2)).exp()
    }

    fn fourier(&self, p: [f64; 3]) -> Complex64 {
        let s2 = self.sigma * self.sigma;
        let e2: f64 = p.iter().map(|x| x * x).sum();
        let pc = p[0] * self.center[0] - p[1] * self.center[1] - p[2] * self.center[2];
        Complex64::from_polar(self.amplitude * s2 * e2 * (-s2 * e2 / 2.0).exp(), -pc)
    }
}

/// The zero source.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullSource;

impl Source for NullSource {
    fn value(&self, _: [f64; 3]) -> f64 {
        0.0
    }
    fn fourier(&self, _: [f64; 3]) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
}

/// Largest `|h|` sampled on the grid outside `O_r`, relative to the global sample maximum.
pub fn support_excess<S: Source + Sync>(h: &S, r: f64, grid: &SpacetimeGrid23) -> f64 {
    let (mut inside, mut outside) = (0.0f64, 0.0f64);
    for i in 0..grid.n_t {
        for a in 0..grid.n_s {
            for b in 0..grid.n_s {
                let y = [grid.time(i), grid.space(a), grid.space(b)];
                let v = h.value(y).abs();
                if y[0].abs() + y[1].hypot(y[2]) < r {
                    inside = inside.max(v);
                } else {
                    outside = outside.max(v);
                }
            }
        }
    }
    let top = inside.max(outside);
    if top == 0.0 {
        0.0
    } else {
        outside / top
    }
}

/// Cone amplitudes on the lattice of spatial momenta dual to a spatial grid.
///
/// The positive-energy solution is `F(x) = sum_p w_p a(p) e^{i(|p| x0 - p.x)}` with the
/// invariant weights `w_p = dp^2 / |p|` (the `p = 0` node and the Nyquist lines carry no weight).
#[derive(Debug, Clone, PartialEq)]
pub struct ConeAmplitude {
    pub n_s: usize,
    pub x_half: f64,
    pub a: Array2<Complex64>,
    pub weights: Array2<f64>,
}

impl ConeAmplitude {
    fn momenta(n: usize, x_half: f64) -> Vec<f64> {
        let dp = std::f64::consts::PI / x_half;
        (0..n).map(|k| if 2 * k < n { k as f64 * dp } else { (k as f64 - n as f64) * dp }).collect()
    }

    pub fn zero(n_s: usize, x_half: f64) -> Self {
        let mut out = Self::from_fn(n_s, x_half, |_| Complex64::new(0.0, 0.0));
        out.a.fill(Complex64::new(0.0, 0.0));
        out
    }

    pub fn from_fn<F: Fn([f64; 3]) -> Complex64>(n_s: usize, x_half: f64, f: F) -> Self {
        let k = Self::momenta(n_s, x_half);
        let dp = std::f64::consts::PI / x_half;
        let mut a = Array2::zeros((n_s, n_s));
        let mut weights = Array2::zeros((n_s, n_s));
        for i in 0..n_s {
            for j in 0..n_s {
                let r = k[i].hypot(k[j]);
                if r == 0.0 || 2 * i == n_s || 2 * j == n_s {
                    continue;
                }
                a[[i, j]] = f([r, k[i], k[j]]);
                weights[[i, j]] = dp * dp / r;
            }
        }
        Self { n_s, x_half, a, weights }
    }

    /// Amplitudes of `h(F)`: every positive-energy mode is multiplied by `-i`.
    pub fn hilbert(&self) -> Self {
        Self { a: self.a.mapv(|z| z * Complex64::new(0.0, -1.0)), ..self.clone() }
    }

    /// `F` on the grid, one 2D FFT per time slice.
    pub fn evaluate(&self, grid: &SpacetimeGrid23) -> Result<Array3<Complex64>> {
        if grid.n_s != self.n_s || (grid.x_half - self.x_half).abs() > 1e-12 {
            return Err(ModlocError::Mismatch("amplitude lattice does not match the spatial grid".into()));
        }
        let n = self.n_s;
        let k = Self::momenta(n, self.x_half);
        // Shift so that FFT index m corresponds to x = -x_half + m dx.
        let base = Array2::from_shape_fn((n, n), |(i, j)| {
            self.a[[i, j]] * self.weights[[i, j]] * Complex64::from_polar(1.0, (k[i] + k[j]) * self.x_half)
        });
        let radius = Array2::from_shape_fn((n, n), |(i, j)| k[i].hypot(k[j]));
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(n);
        let slices: Vec<Array2<Complex64>> = (0..grid.n_t)
            .into_par_iter()
            .map(|it| {
                let t = grid.time(it);
                let mut m = Array2::from_shape_fn((n, n), |(i, j)| base[[i, j]] * Complex64::from_polar(1.0, radius[[i, j]] * t));
                for mut row in m.rows_mut() {
                    let mut buf = row.to_vec();
                    fft.process(&mut buf);
                    row.iter_mut().zip(buf).for_each(|(x, y)| *x = y);
                }
                for mut col in m.columns_mut() {
                    let mut buf = col.to_vec();
                    fft.process(&mut buf);
                    col.iter_mut().zip(buf).for_each(|(x, y)| *x = y);
                }
                m
            })
            .collect();
        let mut out = Array3::zeros(grid.shape());
        for (it, s) in slices.into_iter().enumerate() {
            out.index_axis_mut(ndarray::Axis(0), it).assign(&s);
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|z| z.norm() == 0.0)
    }
}

/// Largest tolerated `|h|` outside `O_r` relative to its maximum.
pub const SUPPORT_TOL: f64 = 1e-3;

/// Cone amplitude of `F = h * Delta_+`, so that `Im F = (h * D_0)/2` and `Re F = -(h * D'_0)/2`.
pub fn synth_commutator_solution<S: Source + Sync>(h: &S, r: f64, grid: &SpacetimeGrid23) -> Result<ConeAmplitude> {
    let excess = support_excess(h, r, grid);
    if excess > SUPPORT_TOL {
        return Err(ModlocError::SupportViolation(format!("relative value {excess:.2e} outside O_{r}")));
    }
    Ok(ConeAmplitude::from_fn(grid.n_s, grid.x_half, |p| h.fourier(p)))
}
