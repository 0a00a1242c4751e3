//! The little group `E~(2)` of a lightlike momentum and its circle representations.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::linalg::{c, C64};

/// `[[u, z], [0, conj u]]` with `|u| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct E2Element {
    pub u: C64,
    pub z: C64,
}

impl E2Element {
    pub fn tau(z: C64) -> Self {
        Self { u: c(1.0, 0.0), z }
    }

    pub fn identity() -> Self {
        Self::tau(c(0.0, 0.0))
    }

    pub fn matrix(&self) -> Matrix2<C64> {
        Matrix2::new(self.u, self.z, c(0.0, 0.0), self.u.conj())
    }

    pub fn compose(&self, o: &Self) -> Self {
        Self { u: self.u * o.u, z: self.u * o.z + self.z * o.u.conj() }
    }
}

/// `alpha(t) = diag(e^{t/2}, e^{-t/2})`.
pub fn alpha(t: f64) -> Matrix2<C64> {
    Matrix2::new(c((t / 2.0).exp(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c((-t / 2.0).exp(), 0.0))
}

/// `alpha(t) tau(z) alpha(-t)`, read back as an `E2Element`.
pub fn e2_boost_conjugation(t: f64, z: C64) -> E2Element {
    let m = alpha(t) * E2Element::tau(z).matrix() * alpha(-t);
    E2Element { u: m[(0, 0)], z: m[(0, 1)] }
}

/// The representation `V_{kappa, eps}` on `l^2` of an `n`-point circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleRepVk {
    pub kappa: f64,
    pub n: usize,
    /// 0 or 1/2: the rotation by `2 pi` is `e^{2 pi i eps}`.
    pub epsilon: f64,
}

impl CircleRepVk {
    pub fn new(kappa: f64, n: usize, epsilon: f64) -> Self {
        Self { kappa, n, epsilon }
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n as f64
    }

    /// Diagonal of `V(tau(z))`: `exp(i kappa Re(conj(z) e^{i theta_j}))`.
    pub fn translation(&self, z: C64) -> Vec<C64> {
        (0..self.n)
            .map(|j| C64::from_polar(1.0, self.kappa * (z.conj() * C64::from_polar(1.0, self.theta(j))).re))
            .collect()
    }

    /// Diagonal of the translation generator along `direction`.
    pub fn translation_generator(&self, direction: C64) -> Vec<f64> {
        let phi = direction.arg();
        (0..self.n).map(|j| self.kappa * (self.theta(j) - phi).cos()).collect()
    }

    /// Rotation by `k` grid steps applied to a vector: index shift with the
    /// statistics phase `e^{i eps psi}`, `psi = 2 pi k / n`.
    pub fn rotate(&self, k: i64, v: &[C64]) -> Vec<C64> {
        let n = self.n as i64;
        let psi = 2.0 * PI * k as f64 / self.n as f64;
        let ph = C64::from_polar(1.0, self.epsilon * psi);
        (0..n).map(|j| ph * v[(j - k).rem_euclid(n) as usize]).collect()
    }
}

/// Sorted spectrum `{kappa cos(theta_j - arg d)}` of the translation generator.
pub fn vk_translation_spectrum(rep: &CircleRepVk, direction: C64) -> Vec<f64> {
    let mut s = rep.translation_generator(direction);
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

/// `V_kappa . beta_t` restricted to the little group, with `beta_t` acting as
/// `tau(z) -> alpha(-t) tau(z) alpha(t) = tau(e^{-t} z)`.
pub fn vk_dilation_rescale(rep: &CircleRepVk, t: f64) -> CircleRepVk {
    let scale = e2_boost_conjugation(-t, c(1.0, 0.0)).z.norm();
    CircleRepVk { kappa: rep.kappa * scale, ..*rep }
}

/// Translation generator of `V . beta_t` evaluated directly through the automorphism.
pub fn composed_translation_generator(rep: &CircleRepVk, t: f64, direction: C64) -> Vec<f64> {
    let zt = e2_boost_conjugation(-t, direction / direction.norm()).z;
    (0..rep.n)
        .map(|j| rep.kappa * (zt.conj() * C64::from_polar(1.0, rep.theta(j))).re)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boost_conjugation_examples() {
        let z = c(0.3, -1.2);
        assert_eq!(e2_boost_conjugation(0.0, z), E2Element::tau(z));
        let id = e2_boost_conjugation(0.7, c(0.0, 0.0));
        assert!((id.u - c(1.0, 0.0)).norm() < 1e-15 && id.z.norm() == 0.0);
        let e = e2_boost_conjugation(2f64.ln(), c(1.0, 0.0));
        assert!((e.z - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn spectrum_kappa_two_n_eight() {
        let s = vk_translation_spectrum(&CircleRepVk::new(2.0, 8, 0.0), c(1.0, 0.0));
        let r2 = 2f64.sqrt();
        let want = [-2.0, -r2, -r2, 0.0, 0.0, r2, r2, 2.0];
        for (a, b) in s.iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(s[0], -2.0);
        assert_eq!(s[7], 2.0);
    }

    #[test]
    fn rescale_halves_kappa() {
        let r = vk_dilation_rescale(&CircleRepVk::new(2.0, 16, 0.0), 2f64.ln());
        assert!((r.kappa - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fermionic_full_turn_is_minus_one() {
        let rep = CircleRepVk::new(1.0, 6, 0.5);
        let v: Vec<C64> = (0..6).map(|j| c(j as f64, 1.0)).collect();
        let w = rep.rotate(6, &v);
        for (a, b) in v.iter().zip(w.iter()) {
            assert!((a + b).norm() < 1e-14);
        }
    }
}
