//! The (2+1)-dimensional Lorentz and Poincaré groups.
//!
//! Metric signature (+, -, -). Vectors are `(x0, x1, x2)`; rotations act on `(x1, x2)`.

use nalgebra::{Matrix3, Vector3};

use crate::error::{ModlocError, Result};

pub type M3 = Matrix3<f64>;
pub type V3 = Vector3<f64>;

/// Reference lightlike momentum.
pub fn q_ref() -> V3 {
    V3::new(1.0, 0.0, 1.0)
}

/// Angle of the reference ray in the momentum plane.
pub const THETA_REF: f64 = std::f64::consts::FRAC_PI_2;

pub fn minkowski(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2]
}

pub fn rotation(phi: f64) -> M3 {
    let (s, c) = phi.sin_cos();
    M3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

/// Boost along `x1` with rapidity `t`.
pub fn boost1(t: f64) -> M3 {
    let (ch, sh) = (t.cosh(), t.sinh());
    M3::new(ch, sh, 0.0, sh, ch, 0.0, 0.0, 0.0, 1.0)
}

/// Boost along `x2` with rapidity `t`.
pub fn boost2(t: f64) -> M3 {
    let (ch, sh) = (t.cosh(), t.sinh());
    M3::new(ch, 0.0, sh, 0.0, 1.0, 0.0, sh, 0.0, ch)
}

pub fn gen_boost1() -> M3 {
    M3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
}

pub fn gen_boost2() -> M3 {
    M3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
}

pub fn gen_rotation() -> M3 {
    M3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0)
}

/// Nilpotent generator of the stabilizer of `q_ref`.
pub fn gen_parabolic() -> M3 {
    gen_boost1() + gen_rotation()
}

/// Stabilizer element `exp(c M)`; `M^3 = 0`.
pub fn parabolic(c: f64) -> M3 {
    let m = gen_parabolic();
    M3::identity() + m * c + m * m * (0.5 * c * c)
}

/// Inverse of a Lorentz matrix via `L^{-1} = eta L^T eta`.
pub fn lorentz_inverse(a: &M3) -> M3 {
    let eta = M3::from_diagonal(&V3::new(1.0, -1.0, -1.0));
    eta * a.transpose() * eta
}

/// Deviation from `L^T eta L = eta`, orthochronous and proper.
pub fn lorentz_defect(a: &M3) -> f64 {
    let eta = M3::from_diagonal(&V3::new(1.0, -1.0, -1.0));
    let d = (a.transpose() * eta * a - eta).abs().max();
    let det = (a.determinant() - 1.0).abs();
    let orth = if a[(0, 0)] >= 1.0 - 1e-12 { 0.0 } else { 1.0 };
    d.max(det).max(orth)
}

/// Polar coordinates `(r, theta)` of a forward lightlike momentum.
pub fn cone_coords(p: &V3) -> (f64, f64) {
    (p[0], p[2].atan2(p[1]))
}

pub fn cone_point(r: f64, theta: f64) -> V3 {
    V3::new(r, r * theta.cos(), r * theta.sin())
}

fn check_on_cone(p: &V3) -> Result<()> {
    let scale = p[0].abs().max(1.0);
    if p[0] <= 0.0 || minkowski(p, p).abs() > 1e-9 * scale * scale {
        return Err(ModlocError::OffCone([p[0], p[1], p[2]]));
    }
    Ok(())
}

/// Section `B_p = R(theta - theta_ref) Lambda_2(log r)`, so `B_p q_ref = p`.
pub fn section(p: &V3) -> M3 {
    let (r, th) = cone_coords(p);
    rotation(th - THETA_REF) * boost2(r.ln())
}

pub fn section_inverse(p: &V3) -> M3 {
    let (r, th) = cone_coords(p);
    boost2(-r.ln()) * rotation(THETA_REF - th)
}

/// Little-group element `W(A, p) = B_p^{-1} A B_{A^{-1} p}`.
pub fn wigner_rotation(a: &M3, p: &V3) -> Result<M3> {
    check_on_cone(p)?;
    let pa = lorentz_inverse(a) * p;
    if pa[0] <= 0.0 || !pa.iter().all(|x| x.is_finite()) {
        return Err(ModlocError::SectionSingular([pa[0], pa[1], pa[2]]));
    }
    Ok(section_inverse(p) * a * section(&pa))
}

/// Parabolic parameter `c(A, p)` with `W(A, p) = exp(c M)`.
pub fn little_group_decompose(a: &M3, p: &V3) -> Result<f64> {
    let w = wigner_rotation(a, p)?;
    let fix = (w * q_ref() - q_ref()).abs().max();
    if fix > 1e-10 * w.abs().max().max(1.0) {
        return Err(ModlocError::Numerical(format!("little-group element moves q by {fix:.3e}")));
    }
    Ok(w[(1, 0)])
}

/// Poincaré element `(a, A)` acting as `x -> A x + a`; `turns` counts full
/// rotations in the universal cover and feeds the center character.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poincare {
    pub a: V3,
    pub lorentz: M3,
    pub turns: i64,
}

impl Poincare {
    pub fn identity() -> Self {
        Self { a: V3::zeros(), lorentz: M3::identity(), turns: 0 }
    }

    pub fn translation(a: V3) -> Self {
        Self { a, ..Self::identity() }
    }

    pub fn lorentz(l: M3) -> Self {
        Self { lorentz: l, ..Self::identity() }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a + self.lorentz * other.a,
            lorentz: self.lorentz * other.lorentz,
            turns: self.turns + other.turns,
        }
    }

    pub fn inverse(&self) -> Self {
        let li = lorentz_inverse(&self.lorentz);
        Self { a: -(li * self.a), lorentz: li, turns: -self.turns }
    }

    pub fn act(&self, x: &V3) -> V3 {
        self.lorentz * x + self.a
    }
}
