//! Discretized forward light cone in 2+1 dimensions and the induced
//! representations `U_{kappa, z}` acting on amplitudes over it.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{Read, Write};

use super::lorentz::*;
use crate::error::{ModlocError, Result};
use crate::linalg::{c, C64};

/// Log-radial, uniform-angle grid on the forward cone.
///
/// The invariant measure `d^2p / |p|` equals `dr dtheta = r du dtheta` with
/// `u = log r`, so the trapezoid weight of node `(i, j)` is `r_i h_u h_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeGrid23 {
    pub nr: usize,
    pub nt: usize,
    pub u_min: f64,
    pub u_max: f64,
}

impl ConeGrid23 {
    pub fn new(nr: usize, nt: usize, u_min: f64, u_max: f64) -> Self {
        assert!(nr >= 2 && nt >= 1 && u_max > u_min);
        Self { nr, nt, u_min, u_max }
    }

    /// Square grid used by the experiments: `n x n` on `log r in [-1.5, 1]`.
    pub fn standard(n: usize) -> Self {
        Self::new(n, n, -1.5, 1.0)
    }

    pub fn len(&self) -> usize {
        self.nr * self.nt
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn h_u(&self) -> f64 {
        (self.u_max - self.u_min) / (self.nr - 1) as f64
    }

    pub fn h_theta(&self) -> f64 {
        2.0 * PI / self.nt as f64
    }

    /// Radial ratio `rho = r_{i+1} / r_i`.
    pub fn rho(&self) -> f64 {
        self.h_u().exp()
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u_min + self.h_u() * i as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        self.u(i).exp()
    }

    pub fn theta(&self, j: usize) -> f64 {
        self.h_theta() * j as f64
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nt + j
    }

    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / self.nt, k % self.nt)
    }

    pub fn momentum(&self, k: usize) -> V3 {
        let (i, j) = self.split(k);
        cone_point(self.r(i), self.theta(j))
    }

    pub fn weight(&self, k: usize) -> f64 {
        let (i, _) = self.split(k);
        self.r(i) * self.h_u() * self.h_theta()
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.weight(k)).collect()
    }

    /// Bilinear interpolation stencil at `(u, theta)`; `None` outside the radial range.
    pub fn stencil(&self, u: f64, theta: f64) -> Option<[(usize, f64); 4]> {
        let x = (u - self.u_min) / self.h_u();
        let last = (self.nr - 1) as f64;
        if !(x > -1e-9 && x < last + 1e-9) {
            return None;
        }
        let x = x.clamp(0.0, last);
        let i0 = (x.floor() as usize).min(self.nr - 2);
        let fu = x - i0 as f64;
        let y = (theta / self.h_theta()).rem_euclid(self.nt as f64);
        let j0 = (y.floor() as usize) % self.nt;
        let ft = y - y.floor();
        let j1 = (j0 + 1) % self.nt;
        Some([
            (self.index(i0, j0), (1.0 - fu) * (1.0 - ft)),
            (self.index(i0, j1), (1.0 - fu) * ft),
            (self.index(i0 + 1, j0), fu * (1.0 - ft)),
            (self.index(i0 + 1, j1), fu * ft),
        ])
    }

    /// Bilinear in `u`, trigonometric (periodic sinc) in `theta`; `None` outside the radial range.
    pub fn stencil_spectral(&self, u: f64, theta: f64) -> Option<Vec<(usize, f64)>> {
        let [(a, wa), _, (b, wb), _] = self.stencil(u, 0.0)?;
        let (i0, _) = self.split(a);
        let (i1, _) = self.split(b);
        let (fu0, fu1) = (wa, wb);
        let n = self.nt as f64;
        let mut out = Vec::with_capacity(2 * self.nt);
        for j in 0..self.nt {
            let x = (theta - self.theta(j) + PI).rem_euclid(2.0 * PI) - PI;
            let half = (x / 2.0).sin();
            let d = if half.abs() < 1e-14 {
                1.0
            } else if self.nt % 2 == 0 {
                (n * x / 2.0).sin() * (x / 2.0).cos() / (n * half)
            } else {
                (n * x / 2.0).sin() / (n * half)
            };
            out.push((self.index(i0, j), fu0 * d));
            out.push((self.index(i1, j), fu1 * d));
        }
        Some(out)
    }

    /// Number of grid steps if `phi` is a multiple of the angular step.
    pub fn grid_rotation_steps(&self, phi: f64) -> Option<i64> {
        let k = phi / self.h_theta();
        let kr = k.round();
        if (k - kr).abs() < 1e-9 {
            Some(kr as i64)
        } else {
            None
        }
    }

    pub fn norm2(&self, phi: &[C64]) -> f64 {
        let per = self.len();
        phi.iter().enumerate().map(|(k, z)| self.weight(k % per) * z.norm_sqr()).sum()
    }

    pub fn inner(&self, a: &[C64], b: &[C64]) -> C64 {
        let per = self.len();
        a.iter().zip(b).enumerate().map(|(k, (x, y))| x.conj() * y * self.weight(k % per)).sum()
    }
}

/// Rotation angle of a Lorentz matrix that is a pure spatial rotation.
pub fn as_rotation(a: &M3) -> Option<f64> {
    let phi = a[(2, 1)].atan2(a[(1, 1)]);
    if (a - rotation(phi)).abs().max() < 1e-12 {
        Some(phi)
    } else {
        None
    }
}

/// Angular interpolation used by the pullback in `rep_apply`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AngularInterp {
    #[default]
    Bilinear,
    /// Trigonometric interpolation in `theta` (radial direction stays linear).
    Spectral,
}

/// `U_{kappa, z}` on a cone grid, optionally doubled to `U_{kappa,z} (+) U_{-kappa, conj z}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MasslessRep23 {
    pub grid: ConeGrid23,
    pub kappa: f64,
    pub z_center: C64,
    pub doubled: bool,
    /// Largest tolerated fraction of mass pulled back from outside the grid.
    pub off_grid_limit: f64,
    #[serde(default)]
    pub angular: AngularInterp,
}

/// Output of `rep_apply`.
#[derive(Debug, Clone)]
pub struct Applied {
    pub phi: Vec<C64>,
    /// Fraction of the input mass mapped outside the radial range.
    pub lost_fraction: f64,
    pub exact: bool,
}

impl MasslessRep23 {
    pub fn new(grid: ConeGrid23, kappa: f64) -> Self {
        Self { grid, kappa, z_center: c(1.0, 0.0), doubled: false, off_grid_limit: 0.05, angular: AngularInterp::Bilinear }
    }

    pub fn with_angular(mut self, a: AngularInterp) -> Self {
        self.angular = a;
        self
    }

    pub fn doubled(mut self) -> Self {
        self.doubled = true;
        self
    }

    pub fn with_center(mut self, z: C64) -> Self {
        self.z_center = z;
        self
    }

    pub fn components(&self) -> usize {
        if self.doubled {
            2
        } else {
            1
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.len() * self.components()
    }

    /// `(kappa, z)` of component `comp`.
    pub fn component_label(&self, comp: usize) -> (f64, C64) {
        if comp == 0 {
            (self.kappa, self.z_center)
        } else {
            (-self.kappa, self.z_center.conj())
        }
    }

    /// Cocycle table `c(A, p_k)` over the grid.
    pub fn cocycle_table(&self, a: &M3) -> Result<Vec<f64>> {
        (0..self.grid.len()).map(|k| little_group_decompose(a, &self.grid.momentum(k))).collect()
    }

    /// `(U(g) phi)(p) = e^{i a.p} e^{i kappa c(A,p)} z^turns phi(A^{-1} p)`.
    pub fn rep_apply(&self, g: &Poincare, phi: &[C64]) -> Result<Applied> {
        let grid = &self.grid;
        let n = grid.len();
        assert_eq!(phi.len(), self.dim(), "amplitude length");
        let linv = lorentz_inverse(&g.lorentz);
        let rot_steps = as_rotation(&g.lorentz).and_then(|f| grid.grid_rotation_steps(f));
        let mut out = vec![c(0.0, 0.0); phi.len()];
        let total = grid.norm2(phi);
        let mut lost = 0.0;
        if let Some(k) = rot_steps {
            for comp in 0..self.components() {
                let (_, z) = self.component_label(comp);
                let chi = z.powi(g.turns as i32);
                for idx in 0..n {
                    let (i, j) = grid.split(idx);
                    let src = grid.index(i, (j as i64 - k).rem_euclid(grid.nt as i64) as usize);
                    let ph = C64::from_polar(1.0, minkowski(&g.a, &grid.momentum(idx)));
                    out[comp * n + idx] = ph * chi * phi[comp * n + src];
                }
            }
            return Ok(Applied { phi: out, lost_fraction: 0.0, exact: true });
        }
        // Mass carried outside the grid: input nodes whose image leaves the radial range.
        for idx in 0..n {
            let img = g.lorentz * grid.momentum(idx);
            let u = img[0].ln();
            if u < grid.u_min - 1e-9 || u > grid.u_max + 1e-9 {
                for comp in 0..self.components() {
                    lost += grid.weight(idx) * phi[comp * n + idx].norm_sqr();
                }
            }
        }
        let lost_fraction = if total > 0.0 { lost / total } else { 0.0 };
        if lost_fraction > self.off_grid_limit {
            return Err(ModlocError::OffGrid { fraction: lost_fraction, limit: self.off_grid_limit });
        }
        for idx in 0..n {
            let p = grid.momentum(idx);
            let pb = linv * p;
            let (rb, tb) = cone_coords(&pb);
            let st: Vec<(usize, f64)> = match self.angular {
                AngularInterp::Bilinear => match grid.stencil(rb.ln(), tb) {
                    Some(st) => st.to_vec(),
                    None => continue,
                },
                AngularInterp::Spectral => match grid.stencil_spectral(rb.ln(), tb) {
                    Some(st) => st,
                    None => continue,
                },
            };
            let cval = little_group_decompose(&g.lorentz, &p)?;
            let ph = minkowski(&g.a, &p);
            for comp in 0..self.components() {
                let (kap, z) = self.component_label(comp);
                let chi = z.powi(g.turns as i32);
                let val: C64 = st.iter().map(|&(s, w)| phi[comp * n + s] * w).sum();
                out[comp * n + idx] = C64::from_polar(1.0, ph + kap * cval) * chi * val;
            }
        }
        Ok(Applied { phi: out, lost_fraction, exact: false })
    }

    /// `||U(g1) U(g2) phi - U(g1 g2) phi|| / ||phi||`, both sides through `rep_apply`.
    pub fn group_law_residual(&self, g1: &Poincare, g2: &Poincare, phi: &[C64]) -> Result<f64> {
        let lhs = self.rep_apply(g1, &self.rep_apply(g2, phi)?.phi)?.phi;
        let rhs = self.rep_apply(&g1.compose(g2), phi)?.phi;
        let diff: Vec<C64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        Ok((self.grid.norm2(&diff) / self.grid.norm2(phi)).sqrt())
    }

    /// `| ||U(g) phi|| / ||phi|| - 1 |`.
    pub fn unitarity_residual(&self, g: &Poincare, phi: &[C64]) -> Result<f64> {
        let out = self.rep_apply(g, phi)?.phi;
        Ok(((self.grid.norm2(&out) / self.grid.norm2(phi)).sqrt() - 1.0).abs())
    }

    /// Unitary dilation `(D phi)(p) = e^{t/2} phi(e^t p)` for `t` a multiple of `h_u`.
    pub fn dilation_apply(&self, t: f64, phi: &[C64]) -> Result<Vec<C64>> {
        let grid = &self.grid;
        let k = t / grid.h_u();
        let kr = k.round();
        if (k - kr).abs() > 1e-9 {
            return Err(ModlocError::IncompatibleStep(t));
        }
        let shift = kr as i64;
        let n = grid.len();
        let m = (t / 2.0).exp();
        let mut out = vec![c(0.0, 0.0); phi.len()];
        for comp in 0..self.components() {
            for idx in 0..n {
                let (i, j) = grid.split(idx);
                let src = i as i64 + shift;
                if src >= 0 && (src as usize) < grid.nr {
                    out[comp * n + idx] = phi[comp * n + grid.index(src as usize, j)] * m;
                }
            }
        }
        Ok(out)
    }

    /// `(kappa c(A, e^t p_k), e^{-t} kappa c(A, p_k))` over the grid.
    pub fn dilated_cocycle_tables(&self, a: &M3, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut conj = Vec::with_capacity(self.grid.len());
        let mut resc = Vec::with_capacity(self.grid.len());
        for k in 0..self.grid.len() {
            let p = self.grid.momentum(k);
            conj.push(self.kappa * little_group_decompose(a, &(p * t.exp()))?);
            resc.push((-t).exp() * self.kappa * little_group_decompose(a, &p)?);
        }
        Ok((conj, resc))
    }

    pub fn cocycle_csv<W: Write>(&self, ops: &[(&str, M3)], mut w: W) -> Result<()> {
        writeln!(w, "i,j,A-id,c")?;
        for (name, a) in ops {
            let tab = self.cocycle_table(a)?;
            for (k, cv) in tab.iter().enumerate() {
                let (i, j) = self.grid.split(k);
                writeln!(w, "{i},{j},{name},{cv:e}")?;
            }
        }
        Ok(())
    }
}

/// Smooth probe amplitude: a Gaussian bump in `(log r, theta)`.
pub fn gaussian_probe(grid: &ConeGrid23, u0: f64, th0: f64, su: f64, st: f64) -> Vec<C64> {
    (0..grid.len())
        .map(|k| {
            let (i, j) = grid.split(k);
            let du = (grid.u(i) - u0) / su;
            let mut dt = grid.theta(j) - th0;
            dt = (dt + PI).rem_euclid(2.0 * PI) - PI;
            let dt = dt / st;
            c((-0.5 * (du * du + dt * dt)).exp(), 0.0)
        })
        .collect()
}

/// JSON descriptor of a stored amplitude file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplitudeHeader {
    pub grid: ConeGrid23,
    pub components: usize,
    pub kappa: f64,
    pub encoding: String,
}

/// Write amplitudes as little-endian `(re, im)` f64 pairs.
pub fn write_amplitudes<W: Write>(phi: &[C64], mut w: W) -> Result<()> {
    for z in phi {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_amplitudes<R: Read>(mut r: R) -> Result<Vec<C64>> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    if buf.len() % 16 != 0 {
        return Err(ModlocError::ConfigInvalid("amplitude file length is not a multiple of 16".into()));
    }
    Ok(buf
        .chunks_exact(16)
        .map(|ch| {
            let re = f64::from_le_bytes(ch[..8].try_into().unwrap());
            let im = f64::from_le_bytes(ch[8..].try_into().unwrap());
            c(re, im)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_positive_and_points_on_cone() {
        let g = ConeGrid23::standard(8);
        for k in 0..g.len() {
            let p = g.momentum(k);
            assert!(g.weight(k) > 0.0);
            assert!(minkowski(&p, &p).abs() < 1e-12 * p[0] * p[0]);
        }
    }

    #[test]
    fn identity_is_exact() {
        let rep = MasslessRep23::new(ConeGrid23::standard(8), 1.0);
        let phi = gaussian_probe(&rep.grid, 0.0, 1.0, 0.4, 0.5);
        let out = rep.rep_apply(&Poincare::identity(), &phi).unwrap();
        assert!(out.exact);
        assert_eq!(out.phi, phi);
    }

    #[test]
    fn grid_rotation_is_permutation() {
        let g = ConeGrid23::standard(16);
        let rep = MasslessRep23::new(g, 0.0);
        let phi = gaussian_probe(&g, 0.0, 1.0, 0.4, 0.5);
        let out = rep.rep_apply(&Poincare::lorentz(rotation(g.h_theta())), &phi).unwrap();
        assert!(out.exact);
        assert_eq!(out.phi[g.index(3, 5)], phi[g.index(3, 4)]);
        assert!((g.norm2(&out.phi) - g.norm2(&phi)).abs() < 1e-12);
    }

    #[test]
    fn amplitude_binary_round_trip() {
        let phi = vec![c(1.5, -2.0), c(1e-300, 3.0)];
        let mut buf = Vec::new();
        write_amplitudes(&phi, &mut buf).unwrap();
        assert_eq!(read_amplitudes(&buf[..]).unwrap(), phi);
    }

    #[test]
    fn dilation_requires_grid_step() {
        let rep = MasslessRep23::new(ConeGrid23::standard(8), 0.0);
        let phi = gaussian_probe(&rep.grid, 0.0, 1.0, 0.4, 0.5);
        assert!(rep.dilation_apply(0.123, &phi).is_err());
        assert_eq!(rep.dilation_apply(0.0, &phi).unwrap(), phi);
    }
}
