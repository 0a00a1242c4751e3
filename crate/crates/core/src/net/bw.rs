//! Bisognano-Wichmann modular data and wedge subspaces on the cone grid.

use ndarray::{s, Array2};
use rayon::prelude::*;

use crate::error::{ModlocError, Result};
use crate::linalg::*;
use crate::subspace::{AntiLinear, ModularData, RealSubspace, TolerancePolicy};
use crate::wigner::cone::{as_rotation, MasslessRep23};
use crate::wigner::lorentz::*;

use super::generator::{boost_generator, SparseHermitian};
use super::wedge::Wedge23;

/// Unitary `(Ux)_k = phase_k x_{perm_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermPhase {
    pub perm: Vec<usize>,
    pub phase: Vec<C64>,
}

/// Anti-unitary `(Jx)_k = phase_k conj(x_{perm_k})`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermConj {
    pub perm: Vec<usize>,
    pub phase: Vec<C64>,
}

impl PermPhase {
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.perm.iter().zip(&self.phase).map(|(&p, w)| w * x[p]).collect()
    }

    pub fn apply_cols(&self, b: &CMat) -> CMat {
        Array2::from_shape_fn(b.dim(), |(k, j)| self.phase[k] * b[[self.perm[k], j]])
    }

    pub fn to_dense(&self) -> CMat {
        let n = self.perm.len();
        let mut m = CMat::zeros((n, n));
        for k in 0..n {
            m[[k, self.perm[k]]] = self.phase[k];
        }
        m
    }
}

impl PermConj {
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.perm.iter().zip(&self.phase).map(|(&p, w)| w * x[p].conj()).collect()
    }

    pub fn apply_cols(&self, b: &CMat) -> CMat {
        Array2::from_shape_fn(b.dim(), |(k, j)| self.phase[k] * b[[self.perm[k], j]].conj())
    }

    /// Dense anti-linear representative `A` with `J = A conj`.
    pub fn to_antilinear(&self) -> AntiLinear {
        let n = self.perm.len();
        let mut m = CMat::zeros((n, n));
        for k in 0..n {
            m[[k, self.perm[k]]] = self.phase[k];
        }
        AntiLinear::new(m)
    }

    /// `max |J^2 x - x|` over the coordinate basis.
    pub fn involution_defect(&self) -> f64 {
        (0..self.perm.len())
            .map(|k| {
                let p = self.perm[k];
                if self.perm[p] != k {
                    return f64::INFINITY;
                }
                (self.phase[k] * self.phase[p].conj() - c(1.0, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max |J K J + K|` entrywise.
    pub fn anticommutator_defect(&self, k: &SparseHermitian) -> f64 {
        // (JKJ)_{ab} = phase_a conj(K_{perm a, perm b}) conj(phase_b)
        let n = k.dim();
        let mut inv = vec![0; n];
        for (a, &p) in self.perm.iter().enumerate() {
            inv[p] = a;
        }
        let mut d: f64 = 0.0;
        for a in 0..n {
            let pa = self.perm[a];
            d = d.max((k.diag[pa] + k.diag[a]).abs());
            for &(pb, v) in &k.rows[pa] {
                let b = inv[pb];
                let jkj = self.phase[a] * v.conj() * self.phase[b].conj();
                let kab = k.rows[a].iter().find(|e| e.0 == b).map(|e| e.1).unwrap_or(c(0.0, 0.0));
                d = d.max((jkj + kab).norm());
            }
        }
        d
    }
}

/// Phase-and-permutation form of `U(g)` when `g` rotates by a multiple of the angular step.
pub fn grid_exact_action(rep: &MasslessRep23, g: &Poincare) -> Option<PermPhase> {
    let grid = &rep.grid;
    let steps = as_rotation(&g.lorentz).and_then(|f| grid.grid_rotation_steps(f))?;
    let n = grid.len();
    let mut perm = Vec::with_capacity(rep.dim());
    let mut phase = Vec::with_capacity(rep.dim());
    for comp in 0..rep.components() {
        let (_, z) = rep.component_label(comp);
        let chi = z.powi(g.turns as i32);
        for idx in 0..n {
            let (i, j) = grid.split(idx);
            perm.push(comp * n + grid.index(i, (j as i64 - steps).rem_euclid(grid.nt as i64) as usize));
            phase.push(chi * C64::from_polar(1.0, minkowski(&g.a, &grid.momentum(idx))));
        }
    }
    Some(PermPhase { perm, phase })
}

/// Edge-reflection conjugation `J_W` for `W = T(a) R(phi) W0` with `2 phi` grid-aligned.
pub fn wedge_conjugation(rep: &MasslessRep23, w: &Wedge23) -> Result<PermConj> {
    let grid = &rep.grid;
    let not_aligned = || ModlocError::Numerical("wedge reflection is not aligned with the angular grid".into());
    let phi = as_rotation(&w.g.lorentz).ok_or_else(not_aligned)?;
    let m2 = grid.grid_rotation_steps(2.0 * phi).ok_or_else(not_aligned)?;
    let n = grid.len();
    let alpha: Vec<f64> = (0..n).map(|k| minkowski(&w.g.a, &grid.momentum(k))).collect();
    let mut perm = Vec::with_capacity(rep.dim());
    let mut phase = Vec::with_capacity(rep.dim());
    for comp in 0..rep.components() {
        for idx in 0..n {
            let (i, j) = grid.split(idx);
            let src = grid.index(i, (m2 - j as i64).rem_euclid(grid.nt as i64) as usize);
            perm.push(comp * n + src);
            phase.push(C64::from_polar(1.0, alpha[idx] + alpha[src]));
        }
    }
    Ok(PermConj { perm, phase })
}

/// Modular data of a wedge: generator, per-component spectral data and `J_W`.
#[derive(Debug, Clone)]
pub struct WedgeModular {
    pub wedge: Wedge23,
    pub generator: SparseHermitian,
    /// Eigenpairs of each diagonal block of the generator.
    pub blocks: Vec<(RVec, CMat)>,
    pub j: PermConj,
    pub block_len: usize,
}

/// Modular data `Delta_W = exp(-2 pi K_W)` and the reflection conjugation `J_W`.
pub fn modular_data_bw(rep: &MasslessRep23, w: &Wedge23) -> Result<WedgeModular> {
    if rep.kappa != 0.0 && !rep.doubled {
        return Err(ModlocError::NoPct);
    }
    let j = wedge_conjugation(rep, w)?;
    let generator = boost_generator(rep, w);
    // Spectral data at the untranslated wedge, transported by the translation gauge.
    let w_lin = Wedge23 { g: Poincare { a: V3::zeros(), ..w.g } };
    let k0 = boost_generator(rep, &w_lin);
    let n = rep.grid.len();
    let (v1, e1) = eigh_dc(k0.block_dense(0, n).view())?;
    let mut blocks = vec![(v1, e1)];
    if rep.components() == 2 {
        // K_{-kappa} = -conj(K_kappa) on the untranslated wedge.
        let b1 = k0.block_dense(0, n);
        let b2 = k0.block_dense(n, 2 * n);
        let dev = (&b2 + &b1.mapv(|z| z.conj())).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev < 1e-12 {
            let (v, e) = &blocks[0];
            blocks.push((v.mapv(|x| -x), e.mapv(|z| z.conj())));
        } else {
            blocks.push(eigh_dc(b2.view())?);
        }
    }
    if w.g.a.norm() > 0.0 {
        for (comp, (_, e)) in blocks.iter_mut().enumerate() {
            for k in 0..n {
                let ph = C64::from_polar(1.0, minkowski(&w.g.a, &rep.grid.momentum(k)));
                let _ = comp;
                e.row_mut(k).mapv_inplace(|z| z * ph);
            }
        }
    }
    Ok(WedgeModular { wedge: *w, generator, blocks, j, block_len: n })
}

impl WedgeModular {
    pub fn dim(&self) -> usize {
        self.block_len * self.blocks.len()
    }

    /// Dense `ModularData` (small grids only).
    pub fn to_modular_data(&self) -> ModularData {
        let delta = self.spectral(|l| c((-2.0 * std::f64::consts::PI * l).exp(), 0.0));
        ModularData::new(self.j.to_antilinear(), delta)
    }

    /// Dense `f(K)`.
    pub fn spectral<F: Fn(f64) -> C64 + Copy>(&self, f: F) -> CMat {
        let n = self.block_len;
        let mut m = CMat::zeros((self.dim(), self.dim()));
        for (b, (v, e)) in self.blocks.iter().enumerate() {
            m.slice_mut(s![b * n..(b + 1) * n, b * n..(b + 1) * n]).assign(&spectral_apply(v, e, f));
        }
        m
    }

    /// `f(K) X` for a block of columns.
    pub fn spectral_cols<F: Fn(f64) -> C64 + Copy>(&self, f: F, x: &CMat) -> CMat {
        let n = self.block_len;
        let mut out = CMat::zeros(x.dim());
        for (b, (v, e)) in self.blocks.iter().enumerate() {
            let xb = x.slice(s![b * n..(b + 1) * n, ..]);
            let mut coef = e.t().mapv(|z| z.conj()).dot(&xb);
            for (i, mut row) in coef.rows_mut().into_iter().enumerate() {
                let fv = f(v[i]);
                row.mapv_inplace(|z| z * fv);
            }
            out.slice_mut(s![b * n..(b + 1) * n, ..]).assign(&e.dot(&coef));
        }
        out
    }

    /// `Delta^{it} X = e^{-2 pi i t K} X`.
    pub fn delta_it_cols(&self, t: f64, x: &CMat) -> CMat {
        self.spectral_cols(|l| C64::from_polar(1.0, -2.0 * std::f64::consts::PI * t * l), x)
    }

    /// Number of eigenvalues with `2 pi |lambda| <= cutoff`.
    pub fn kept_modes(&self, cutoff: f64) -> usize {
        let tp = 2.0 * std::f64::consts::PI;
        self.blocks.iter().map(|(v, _)| v.iter().filter(|&&l| tp * l.abs() <= cutoff).count()).sum()
    }

    /// `max |J K J + K|` and `J^2` defect.
    pub fn j_defects(&self) -> (f64, f64) {
        (self.j.anticommutator_defect(&self.generator), self.j.involution_defect())
    }
}

/// Parameters of the spectral truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPolicy {
    /// Eigenvalues of `Delta` outside `[e^{-cutoff}, e^{cutoff}]` are dropped.
    pub cutoff: f64,
    /// `|lambda|` below this counts as a zero mode of the generator.
    pub zero_tol: f64,
    /// Smallest admissible fraction of surviving modes.
    pub min_kept_fraction: f64,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self { cutoff: 20.0, zero_tol: 1e-9, min_kept_fraction: 0.10 }
    }
}

/// Fixed points of `S_W = J_W Delta_W^{1/2}` after spectral truncation.
pub fn wedge_subspace(m: &WedgeModular, pol: &CutoffPolicy) -> Result<RealSubspace> {
    let total = m.dim();
    let kept = m.kept_modes(pol.cutoff);
    if (kept as f64) < pol.min_kept_fraction * total as f64 {
        return Err(ModlocError::CutoffTooAggressive { kept, total });
    }
    let n = m.block_len;
    let tp = 2.0 * std::f64::consts::PI;
    let mut cols: Vec<CMat> = Vec::new();
    for (b, (vals, vecs)) in m.blocks.iter().enumerate() {
        let pos: Vec<usize> = (0..n).filter(|&i| vals[i] > pol.zero_tol && tp * vals[i] <= pol.cutoff).collect();
        let zer: Vec<usize> = (0..n).filter(|&i| vals[i].abs() <= pol.zero_tol).collect();
        let embed = |idx: &[usize]| {
            let mut e = CMat::zeros((total, idx.len()));
            for (c_, &i) in idx.iter().enumerate() {
                e.slice_mut(s![b * n..(b + 1) * n, c_]).assign(&vecs.column(i));
            }
            e
        };
        if !pos.is_empty() {
            let e = embed(&pos);
            let je = m.j.apply_cols(&e);
            let mut plus = CMat::zeros(e.dim());
            let mut minus = CMat::zeros(e.dim());
            for (c_, &i) in pos.iter().enumerate() {
                let mu = (-tp * vals[i]).exp();
                let (sm, nrm) = (mu.sqrt(), (1.0 + mu).sqrt());
                for k in 0..total {
                    plus[[k, c_]] = (e[[k, c_]] + je[[k, c_]] * sm) / nrm;
                    minus[[k, c_]] = I * (e[[k, c_]] - je[[k, c_]] * sm) / nrm;
                }
            }
            cols.push(plus);
            cols.push(minus);
        }
        if !zer.is_empty() {
            let z = embed(&zer);
            let jz = m.j.apply_cols(&z);
            let both = hstack_c((&z + &jz).view(), ((&z - &jz) * I).view());
            cols.push(orth_complex_cols(both.view(), 1e-8));
        }
    }
    let tol = TolerancePolicy::for_dim(total);
    if cols.is_empty() {
        return Ok(RealSubspace::zero(total));
    }
    let views: Vec<_> = cols.iter().map(|c_| c_.view()).collect();
    let basis = ndarray::concatenate(ndarray::Axis(1), &views).map_err(|e| ModlocError::Numerical(e.to_string()))?;
    Ok(RealSubspace::from_orthonormal(total, basis, tol))
}

/// Real-orthonormal basis of the cutoff window `span_C{e : 2 pi |lambda| <= cutoff}`, realified.
pub fn cutoff_window(m: &WedgeModular, cutoff: f64) -> CMat {
    let n = m.block_len;
    let tp = 2.0 * std::f64::consts::PI;
    let mut cols = Vec::new();
    for (b, (vals, vecs)) in m.blocks.iter().enumerate() {
        for i in 0..n {
            if tp * vals[i].abs() <= cutoff {
                let mut col = CVec::zeros(m.dim());
                col.slice_mut(s![b * n..(b + 1) * n]).assign(&vecs.column(i));
                cols.push(col);
            }
        }
    }
    let mut out = CMat::zeros((m.dim(), cols.len()));
    for (j, col) in cols.iter().enumerate() {
        out.column_mut(j).assign(col);
    }
    out
}

/// `U(g) H` for grid-exact `g`.
pub fn transport(rep: &MasslessRep23, g: &Poincare, h: &RealSubspace) -> Result<RealSubspace> {
    let u = grid_exact_action(rep, g).ok_or_else(|| ModlocError::Numerical("transport requires a grid-exact rotation".into()))?;
    Ok(RealSubspace::from_orthonormal(h.ambient_dim(), u.apply_cols(h.basis()), h.tol))
}

/// Weighted-coordinate amplitudes `x_k = sqrt(w_k) phi_k`.
pub fn to_weighted(rep: &MasslessRep23, phi: &[C64]) -> Vec<C64> {
    let n = rep.grid.len();
    phi.iter().enumerate().map(|(k, z)| z * rep.grid.weight(k % n).sqrt()).collect()
}

pub fn from_weighted(rep: &MasslessRep23, x: &[C64]) -> Vec<C64> {
    let n = rep.grid.len();
    x.iter().enumerate().map(|(k, z)| z / rep.grid.weight(k % n).sqrt()).collect()
}

/// Modular data for several wedges in parallel.
pub fn modular_data_many(rep: &MasslessRep23, ws: &[Wedge23]) -> Result<Vec<WedgeModular>> {
    ws.par_iter().map(|w| modular_data_bw(rep, w)).collect()
}
