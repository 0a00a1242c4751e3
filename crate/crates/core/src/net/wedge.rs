//! Wedges and double cones in 2+1 dimensions.

use std::f64::consts::PI;

use crate::wigner::lorentz::*;

/// `W = g W0` with `W0 = {x1 > |x0|}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wedge23 {
    pub g: Poincare,
}

impl Wedge23 {
    pub fn standard() -> Self {
        Self { g: Poincare::identity() }
    }

    pub fn transformed(&self, h: &Poincare) -> Self {
        Self { g: h.compose(&self.g) }
    }

    pub fn contains(&self, x: &V3) -> bool {
        let y = self.g.inverse().act(x);
        y[1] > y[0].abs()
    }

    /// Boost flow `Lambda_W(t) = g Lambda_1(t) g^{-1}`.
    pub fn boost(&self, t: f64) -> Poincare {
        self.g.compose(&Poincare::lorentz(boost1(t))).compose(&self.g.inverse())
    }

    /// Edge reflection `j_W = g j0 g^{-1}` with `j0 = diag(-1, -1, 1)`.
    pub fn reflection(&self) -> Poincare {
        let j0 = M3::from_diagonal(&V3::new(-1.0, -1.0, 1.0));
        let gi = self.g.inverse();
        Poincare { a: self.g.a + self.g.lorentz * (j0 * gi.a), lorentz: self.g.lorentz * j0 * gi.lorentz, turns: 0 }
    }

    /// Causal complement `W' = g R(pi) W0`.
    pub fn complement(&self) -> Self {
        Self { g: self.g.compose(&Poincare::lorentz(rotation(PI))) }
    }

    /// Future-pointing lightlike direction along which translations map `W` into itself.
    pub fn edge_direction(&self) -> V3 {
        self.g.lorentz * V3::new(1.0, 1.0, 0.0)
    }
}

/// Double cone of given center and radius with a finite family of wedges containing it.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleCone23 {
    pub center: V3,
    pub radius: f64,
    pub wedges: Vec<Wedge23>,
    /// Rotation angles of the family members, `2 pi k / m`.
    pub angles: Vec<f64>,
}

impl DoubleCone23 {
    /// `W_k = T(center) R(2 pi k / m) T(-r e1) W0`, each touching the cone.
    pub fn with_family(center: V3, radius: f64, m: usize) -> Self {
        let mut wedges = Vec::with_capacity(m);
        let mut angles = Vec::with_capacity(m);
        for k in 0..m {
            let phi = 2.0 * PI * k as f64 / m as f64;
            let g = Poincare::translation(center)
                .compose(&Poincare::lorentz(rotation(phi)))
                .compose(&Poincare::translation(V3::new(0.0, -radius, 0.0)));
            wedges.push(Wedge23 { g });
            angles.push(phi);
        }
        Self { center, radius, wedges, angles }
    }

    pub fn contains(&self, x: &V3) -> bool {
        let d = x - self.center;
        d[0].abs() + (d[1] * d[1] + d[2] * d[2]).sqrt() < self.radius
    }

    /// Tips and a ring of equatorial points, shrunk slightly into the open cone.
    pub fn extreme_points(&self, ring: usize) -> Vec<V3> {
        let s = self.radius * (1.0 - 1e-9);
        let mut pts = vec![self.center + V3::new(s, 0.0, 0.0), self.center - V3::new(s, 0.0, 0.0)];
        for k in 0..ring {
            let a = 2.0 * PI * k as f64 / ring as f64;
            pts.push(self.center + V3::new(0.0, s * a.cos(), s * a.sin()));
        }
        pts
    }

    /// Every family member contains every extreme point.
    pub fn family_valid(&self) -> bool {
        let pts = self.extreme_points(64);
        self.wedges.iter().all(|w| pts.iter().all(|p| w.contains(p)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boost_preserves_wedge() {
        let w = Wedge23::standard().transformed(&Poincare::translation(V3::new(0.3, -0.5, 0.2)));
        let pts = [V3::new(0.0, 0.0, 0.2), V3::new(0.5, 0.0, -1.0), V3::new(-0.1, -0.4, 3.0)];
        for p in &pts {
            if w.contains(p) {
                for &t in &[-1.0, 0.4, 2.0] {
                    assert!(w.contains(&w.boost(t).act(p)));
                }
            }
        }
    }

    #[test]
    fn reflection_is_involution() {
        let w = Wedge23::standard().transformed(&Poincare { a: V3::new(0.1, 0.2, 0.3), lorentz: rotation(0.7), turns: 0 });
        let j = w.reflection();
        let jj = j.compose(&j);
        assert!((jj.lorentz - M3::identity()).abs().max() < 1e-14 && jj.a.norm() < 1e-14);
    }

    #[test]
    fn default_family_contains_cone() {
        let o = DoubleCone23::with_family(V3::zeros(), 1.0, 4);
        assert!(o.family_valid());
        let o = DoubleCone23::with_family(V3::new(0.2, 0.1, -0.3), 0.5, 8);
        assert!(o.family_valid());
    }

    #[test]
    fn complement_is_spacelike() {
        let w = Wedge23::standard();
        let wc = w.complement();
        assert!(wc.contains(&V3::new(0.0, -1.0, 0.5)) && !wc.contains(&V3::new(0.0, 1.0, 0.5)));
    }
}
