use num_complex::Complex64;
use std::f64::consts::PI;

use super::{hilbert_line, SpacetimeGrid23};

/// Normalization of `Delta_+` for the measure `d^2p / |p|`: `Delta_+(0, x) -> C_S / |x|`.
pub const C_S: f64 = 2.0 * PI;

/// Regulated massless two-point function `C_S / sqrt(|x|^2 - (x0 + i eps)^2)` (principal branch).
pub fn delta_plus(x: [f64; 3], eps: f64) -> Complex64 {
    let r2 = x[1] * x[1] + x[2] * x[2];
    let z = Complex64::new(x[0], eps);
    C_S / (Complex64::new(r2, 0.0) - z * z).sqrt()
}

/// `Delta_+^eps - Delta_+^lambda`: removes the infrared tail in time.
pub fn delta_plus_bandpass(x: [f64; 3], eps: f64, lambda: f64) -> Complex64 {
    delta_plus(x, eps) - delta_plus(x, lambda)
}

/// Real form of the commutator function, `Delta_0 / i = 2 Im Delta_+`: odd, vanishing for spacelike `x`.
pub fn commutator_kernel(x: [f64; 3], eps: f64) -> f64 {
    2.0 * delta_plus(x, eps).im
}

/// Real form of `Delta'_0 / i = -2 Re Delta_+`: even, vanishing for timelike `x`.
pub fn spacelike_kernel(x: [f64; 3], eps: f64) -> f64 {
    -2.0 * delta_plus(x, eps).re
}

/// Relative `l2` deviation of `h(D_0)` from `D'_0` on the time lines through the given
/// spatial points, with band-pass regulated kernels sampled on `grid`'s time axis.
pub fn kernel_hilbert_check(grid: &SpacetimeGrid23, points: &[[f64; 2]], eps: f64, lambda: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for p in points {
        let x = |i: usize| [grid.time(i), p[0], p[1]];
        let d0: Vec<f64> = (0..grid.n_t).map(|i| 2.0 * delta_plus_bandpass(x(i), eps, lambda).im).collect();
        let d0p: Vec<f64> = (0..grid.n_t).map(|i| -2.0 * delta_plus_bandpass(x(i), eps, lambda).re).collect();
        let h = hilbert_line(&d0);
        num += h.iter().zip(&d0p).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        den += d0p.iter().map(|b| b * b).sum::<f64>();
    }
    (num / den).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacelike_value_and_parity() {
        let v = delta_plus([0.0, 1.0, 0.0], 1e-9);
        assert!((v.re - C_S).abs() < 1e-6 && v.im.abs() < 1e-6);
        for x in [[0.3, 1.0, 0.4], [-0.5, 0.2, -0.9]] {
            let m = [-x[0], -x[1], -x[2]];
            assert!((delta_plus(x, 1e-8) - delta_plus(m, 1e-8)).norm() < 1e-6);
        }
    }

    #[test]
    fn timelike_imaginary_and_odd() {
        let x = [1.5, 0.3, -0.4];
        let a = delta_plus(x, 1e-9);
        let b = delta_plus([-x[0], -x[1], -x[2]], 1e-9);
        assert!(a.re.abs() < 1e-6 && (a + b).norm() < 1e-6);
        assert!(spacelike_kernel(x, 1e-9).abs() < 1e-5);
        assert!(commutator_kernel([0.1, 1.0, 0.0], 1e-9).abs() < 1e-5);
    }
}
