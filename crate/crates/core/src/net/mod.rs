//! Bisognano-Wichmann net on wedges for the 2+1 dimensional massless representations.

pub mod bw;
pub mod counterexample;
pub mod generator;
pub mod score;
pub mod wedge;

use std::f64::consts::PI;

pub use bw::*;
pub use counterexample::*;
pub use generator::*;
pub use score::*;
pub use wedge::*;

use crate::error::{ModlocError, Result};
use crate::linalg::*;
use crate::subspace::RealSubspace;
use crate::wigner::cone::MasslessRep23;
use crate::wigner::lorentz::*;

/// Canonical net `W -> H(W)` obtained by covariance from the standard wedge.
#[derive(Debug, Clone)]
pub struct BwNet {
    pub rep: MasslessRep23,
    pub policy: CutoffPolicy,
    pub base: WedgeModular,
    pub h0: RealSubspace,
}

impl BwNet {
    pub fn new(rep: MasslessRep23, policy: CutoffPolicy) -> Result<Self> {
        let base = modular_data_bw(&rep, &Wedge23::standard())?;
        let h0 = wedge_subspace(&base, &policy)?;
        Ok(Self { rep, policy, base, h0 })
    }

    /// `H(g W0) = U(g) H(W0)`; `g` must act exactly on the grid.
    pub fn subspace(&self, w: &Wedge23) -> Result<RealSubspace> {
        transport(&self.rep, &w.g, &self.h0)
    }

    /// Twist `Z = (1 + i Gamma)/(1 + i)` with `Gamma` the 2 pi rotation, diagonal per component.
    pub fn twist(&self) -> Vec<C64> {
        let n = self.rep.grid.len();
        (0..self.rep.dim())
            .map(|k| {
                let (_, z) = self.rep.component_label(k / n);
                (c(1.0, 0.0) + I * z) / c(1.0, 1.0)
            })
            .collect()
    }

    /// Localization score of a double cone from its wedge family.
    pub fn localize(&self, o: &DoubleCone23, cfg: &ScoreConfig) -> Result<LocalizationReport> {
        if o.wedges.is_empty() {
            return Err(ModlocError::EmptyFamily);
        }
        let hs: Vec<RealSubspace> = o.wedges.iter().map(|w| self.subspace(w)).collect::<Result<_>>()?;
        let grid = &self.rep.grid;
        let ex = (cfg.edge_fraction * grid.nr as f64).floor() as usize;
        let mask: Vec<bool> = (0..self.rep.dim())
            .map(|k| {
                let (i, _) = grid.split(k % grid.len());
                i >= ex && i + ex < grid.nr
            })
            .collect();
        let (raw, _) = mean_projection_max(&hs, None, cfg)?;
        let (score, _) = mean_projection_max(&hs, Some(&mask), cfg)?;
        let principal_angles = principal_angle_table(&hs);
        let min_angle = principal_angles.iter().map(|e| e.2).fold(f64::INFINITY, f64::min);
        Ok(LocalizationReport {
            kappa: self.rep.kappa,
            grid: grid.nr,
            n_wedges: hs.len(),
            cutoff: self.policy.cutoff,
            score,
            raw_score: raw,
            edge_rings: ex,
            min_principal_angle: if min_angle.is_finite() { min_angle } else { 0.0 },
            principal_angles,
            wedge_dims: hs.iter().map(|h| h.dim()).collect(),
            kept_fraction: self.base.kept_modes(self.policy.cutoff) as f64 / self.base.dim() as f64,
        })
    }

    /// Distance between `U(g) H(W0)` and `H(g W0)` computed from its own modular data.
    pub fn covariance_check(&self, g: &Poincare) -> Result<f64> {
        let w = Wedge23::standard().transformed(g);
        let direct = wedge_subspace(&modular_data_bw(&self.rep, &w)?, &self.policy)?;
        self.subspace(&w)?.distance(&direct)
    }

    /// Twisted duality `H(W') = Z H(W)'` inside the cutoff window.
    ///
    /// Returns the largest of: the symplectic pairing between `Z H(W')` and `H(W)`,
    /// the defect of both subspaces lying in the window, and the dimension mismatch.
    pub fn twisted_duality_check(&self) -> Result<f64> {
        let w = Wedge23::standard();
        let hc = self.subspace(&w.complement())?;
        let z = self.twist();
        let zhc = CMat::from_shape_fn(hc.basis().dim(), |(k, j)| z[k] * hc.basis()[[k, j]]);
        let gram = zhc.t().mapv(|v| v.conj()).dot(self.h0.basis());
        let pairing = opnorm_r(gram.mapv(|v| v.im).view());
        let win = RealSubspace::span(self.rep.dim(), &hstack_c(cutoff_window(&self.base, self.policy.cutoff).view(), (cutoff_window(&self.base, self.policy.cutoff) * I).view()));
        let zhc = RealSubspace::from_orthonormal(self.rep.dim(), zhc, self.h0.tol);
        let contain = zhc.containment_defect(&win)?.max(self.h0.containment_defect(&win)?);
        let dims = if self.h0.dim() + zhc.dim() == win.dim() { 0.0 } else { 1.0 };
        Ok(pairing.max(contain).max(dims))
    }

    /// `max_t dist(Delta^{it} H(W0), H(W0))`.
    pub fn delta_invariance_check(&self, ts: &[f64]) -> Result<f64> {
        let mut d: f64 = 0.0;
        for &t in ts {
            let moved = self.base.delta_it_cols(t, self.h0.basis());
            let moved = RealSubspace::from_orthonormal(self.rep.dim(), moved, self.h0.tol);
            d = d.max(moved.distance(&self.h0)?);
        }
        Ok(d)
    }

    /// `max_g ||J U(g) J x - U(j g j) x||` over grid-exact `g` and probe vectors.
    pub fn j_covariance_check(&self, gs: &[Poincare], probes: &[Vec<C64>]) -> Result<f64> {
        let j = &self.base.j;
        let jw = Wedge23::standard().reflection();
        let mut d: f64 = 0.0;
        for g in gs {
            let u = grid_exact_action(&self.rep, g).ok_or_else(|| ModlocError::Numerical("g is not grid-exact".into()))?;
            let jgj = jw.compose(g).compose(&jw);
            let ur = grid_exact_action(&self.rep, &jgj).ok_or_else(|| ModlocError::Numerical("jgj is not grid-exact".into()))?;
            for x in probes {
                let lhs = j.apply(&u.apply(&j.apply(x)));
                let rhs = ur.apply(x);
                d = d.max(lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
            }
        }
        Ok(d)
    }

    /// Containment defect of `H(W1)` in `H(W0)` for `W1 = T(x) W0`, `x` in the closed wedge.
    pub fn isotony_defect(&self, x: V3) -> Result<f64> {
        let h1 = self.subspace(&Wedge23::standard().transformed(&Poincare::translation(x)))?;
        h1.containment_defect(&self.h0)
    }

    /// `max ||Delta^{it} x - U(Lambda(-2 pi t)) x|| / ||x||` with the boost evaluated by `rep_apply`.
    pub fn bw_residual(&self, ts: &[f64], phis: &[Vec<C64>]) -> Result<f64> {
        let mut d: f64 = 0.0;
        for &t in ts {
            for phi in phis {
                let x = to_weighted(&self.rep, phi);
                let xm = CMat::from_shape_fn((x.len(), 1), |(k, _)| x[k]);
                let lhs = self.base.delta_it_cols(t, &xm);
                let rhs = to_weighted(&self.rep, &self.rep.rep_apply(&Wedge23::standard().boost(-2.0 * PI * t), phi)?.phi);
                d = d.max(rel_dist(lhs.column(0).iter().cloned(), &rhs));
            }
        }
        Ok(d)
    }
}

fn rel_dist<I: Iterator<Item = C64>>(a: I, b: &[C64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.zip(b) {
        num += (x - y).norm_sqr();
        den += y.norm_sqr();
    }
    (num / den.max(1e-300)).sqrt()
}

/// `max_{s,t,phi} ||U(Lambda_W(-2 pi s)) U(t x) U(Lambda_W(2 pi s)) phi - U(e^{-2 pi s} t x) phi|| / ||phi||`.
///
/// `x` must be a future-pointing lightlike vector along the edge direction of `W`.
pub fn borchers_scaling_check(rep: &MasslessRep23, w: &Wedge23, x: V3, ss: &[f64], ts: &[f64], probes: &[Vec<C64>]) -> Result<f64> {
    let e = w.edge_direction();
    let scale = x[0] / e[0];
    if !(scale > 0.0) || (x - e * scale).norm() > 1e-9 * x.norm().max(1.0) {
        return Err(ModlocError::NotEdgeDirection);
    }
    let mut d: f64 = 0.0;
    for &s in ss {
        let fwd = w.boost(-2.0 * PI * s);
        let back = w.boost(2.0 * PI * s);
        for &t in ts {
            if t == 0.0 {
                // Conjugating the identity translation gives the identity operator.
                continue;
            }
            let tx = Poincare::translation(x * t);
            let scaled = Poincare::translation(x * (t * (-2.0 * PI * s).exp()));
            for phi in probes {
                let a = rep.rep_apply(&back, phi)?.phi;
                let a = rep.rep_apply(&tx, &a)?.phi;
                let a = rep.rep_apply(&fwd, &a)?.phi;
                let b = rep.rep_apply(&scaled, phi)?.phi;
                let diff: Vec<C64> = a.iter().zip(&b).map(|(p, q)| p - q).collect();
                d = d.max((rep.grid.norm2(&diff) / rep.grid.norm2(phi)).sqrt());
            }
        }
    }
    Ok(d)
}

/// `||e^{itK_W} x - U(Lambda_W(t)) x|| / ||x||` for a probe amplitude.
pub fn generator_residual(rep: &MasslessRep23, w: &Wedge23, t: f64, phi: &[C64]) -> Result<f64> {
    let k = boost_generator(rep, w);
    let a = k.exp_i_apply(t, &to_weighted(rep, phi));
    let b = to_weighted(rep, &rep.rep_apply(&w.boost(t), phi)?.phi);
    Ok(rel_dist(a.into_iter(), &b))
}
