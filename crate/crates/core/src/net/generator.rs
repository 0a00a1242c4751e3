//! Sparse wedge boost generators on a cone grid.
//!
//! Amplitudes are carried in weighted coordinates `x_k = sqrt(w_k) phi(p_k)`,
//! in which the quadrature inner product is the Euclidean one.

use rayon::prelude::*;

use crate::linalg::{c, CMat, C64};
use crate::wigner::cone::MasslessRep23;
use crate::wigner::lorentz::*;

use super::wedge::Wedge23;

/// Hermitian matrix stored as a diagonal plus sparse off-diagonal rows.
#[derive(Debug, Clone)]
pub struct SparseHermitian {
    pub diag: Vec<f64>,
    pub rows: Vec<Vec<(usize, C64)>>,
}

impl SparseHermitian {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        (0..self.dim())
            .into_par_iter()
            .map(|k| {
                let mut s = x[k] * self.diag[k];
                for &(l, v) in &self.rows[k] {
                    s += v * x[l];
                }
                s
            })
            .collect()
    }

    pub fn to_dense(&self) -> CMat {
        let n = self.dim();
        let mut m = CMat::zeros((n, n));
        for k in 0..n {
            m[[k, k]] = c(self.diag[k], 0.0);
            for &(l, v) in &self.rows[k] {
                m[[k, l]] += v;
            }
        }
        m
    }

    /// Dense copy of the principal block `[lo, hi)`.
    pub fn block_dense(&self, lo: usize, hi: usize) -> CMat {
        let mut m = CMat::zeros((hi - lo, hi - lo));
        for k in lo..hi {
            m[[k - lo, k - lo]] = c(self.diag[k], 0.0);
            for &(l, v) in &self.rows[k] {
                assert!(l >= lo && l < hi, "block is not invariant");
                m[[k - lo, l - lo]] += v;
            }
        }
        m
    }

    /// `max |K_kl - conj(K_lk)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for k in 0..self.dim() {
            for &(l, v) in &self.rows[k] {
                let back = self.rows[l].iter().find(|e| e.0 == k).map(|e| e.1).unwrap_or(c(0.0, 0.0));
                d = d.max((v - back.conj()).norm());
            }
        }
        d
    }

    /// Gershgorin bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim())
            .map(|k| self.diag[k].abs() + self.rows[k].iter().map(|e| e.1.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `e^{itK} x` by a Taylor series on sub-steps of norm at most 1/2.
    pub fn exp_i_apply(&self, t: f64, x: &[C64]) -> Vec<C64> {
        let steps = ((t.abs() * self.norm_bound()) / 0.5).ceil().max(1.0) as usize;
        let dt = t / steps as f64;
        let mut y = x.to_vec();
        for _ in 0..steps {
            let mut term = y.clone();
            let mut acc = y.clone();
            for m in 1..40 {
                term = self.apply(&term);
                let f = c(0.0, dt / m as f64);
                let mut mx: f64 = 0.0;
                for (a, t) in acc.iter_mut().zip(term.iter_mut()) {
                    *t *= f;
                    *a += *t;
                    mx = mx.max(t.norm());
                }
                if mx < 1e-18 {
                    break;
                }
            }
            y = acc;
        }
        y
    }

    /// `D K D*` with `D = diag(e^{i alpha_k})`.
    pub fn gauge(&self, alpha: &[f64]) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(k, r)| r.iter().map(|&(l, v)| (l, v * C64::from_polar(1.0, alpha[k] - alpha[l]))).collect())
            .collect();
        Self { diag: self.diag.clone(), rows }
    }

    /// `P K P` for an involutive permutation `P`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.dim();
        let mut inv = vec![0; n];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k;
        }
        let diag = (0..n).map(|k| self.diag[perm[k]]).collect();
        let rows = (0..n).map(|k| self.rows[perm[k]].iter().map(|&(l, v)| (inv[l], v)).collect()).collect();
        Self { diag, rows }
    }

    /// Entrywise distance to another operator with the same sparsity layout.
    pub fn distance(&self, other: &Self) -> f64 {
        let a = self.to_sorted();
        let b = other.to_sorted();
        let mut d: f64 = 0.0;
        for k in 0..self.dim() {
            d = d.max((self.diag[k] - other.diag[k]).abs());
            if a[k].len() != b[k].len() {
                return f64::INFINITY;
            }
            for (x, y) in a[k].iter().zip(&b[k]) {
                if x.0 != y.0 {
                    return f64::INFINITY;
                }
                d = d.max((x.1 - y.1).norm());
            }
        }
        d
    }

    fn to_sorted(&self) -> Vec<Vec<(usize, C64)>> {
        self.rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.sort_by_key(|e| e.0);
                r
            })
            .collect()
    }
}

/// Lie-algebra derivative `d/dt c(e^{tX}, p)` at `t = 0` with `e^{tX} = L Lambda_1(t) L^{-1}`.
pub fn cocycle_rate(l: &M3, p: &V3) -> f64 {
    let li = lorentz_inverse(l);
    let f = |t: f64| little_group_decompose(&(l * boost1(t) * li), p).unwrap_or(0.0);
    let h = 1e-3;
    (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h)
}

/// Generator `K` of `t -> U(Lambda_W(t))` in weighted coordinates.
///
/// The flow of `X = L G_1 L^{-1}` on `(log r, theta)` is discretized with central
/// differences, antisymmetrized in the weighted inner product, and the translation
/// part of the wedge enters through the gauge `U(a) K U(a)*`.
pub fn boost_generator(rep: &MasslessRep23, w: &Wedge23) -> SparseHermitian {
    let g = &rep.grid;
    assert!(g.nt >= 4, "angular grid too coarse");
    let n = g.len();
    let l = w.g.lorentz;
    let x = l * gen_boost1() * lorentz_inverse(&l);
    let (hu, ht) = (g.h_u(), g.h_theta());
    let wts = g.weights();
    // Vector-field operator rows (one-sided entries, before symmetrization).
    let raw: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|k| {
            let (i, j) = g.split(k);
            let p = g.momentum(k);
            let f = x * p;
            let r = p[0];
            let du = f[0] / r;
            let dt = (p[1] * f[2] - p[2] * f[1]) / (r * r);
            let mut e = Vec::with_capacity(4);
            if i + 1 < g.nr {
                e.push((g.index(i + 1, j), du / (2.0 * hu)));
            }
            if i > 0 {
                e.push((g.index(i - 1, j), -du / (2.0 * hu)));
            }
            e.push((g.index(i, (j + 1) % g.nt), dt / (2.0 * ht)));
            e.push((g.index(i, (j + g.nt - 1) % g.nt), -dt / (2.0 * ht)));
            e
        })
        .collect();
    let lookup = |k: usize, l: usize| raw[k].iter().find(|e| e.0 == l).map(|e| e.1).unwrap_or(0.0);
    let skew: Vec<Vec<(usize, C64)>> = (0..n)
        .map(|k| {
            raw[k]
                .iter()
                .map(|&(l, v)| {
                    let b_kl = (wts[k] / wts[l]).sqrt() * v;
                    let b_lk = (wts[l] / wts[k]).sqrt() * lookup(l, k);
                    (l, c(0.0, 0.5 * (b_kl - b_lk)))
                })
                .collect()
        })
        .collect();
    let rates: Vec<f64> = (0..n).into_par_iter().map(|k| cocycle_rate(&l, &g.momentum(k))).collect();
    let mut diag = Vec::with_capacity(rep.dim());
    let mut rows = Vec::with_capacity(rep.dim());
    for comp in 0..rep.components() {
        let (kap, _) = rep.component_label(comp);
        diag.extend(rates.iter().map(|r| kap * r));
        rows.extend(skew.iter().map(|r| r.iter().map(|&(l, v)| (l + comp * n, v)).collect::<Vec<_>>()));
    }
    let k = SparseHermitian { diag, rows };
    if w.g.a.norm() == 0.0 {
        return k;
    }
    let alpha: Vec<f64> = (0..rep.dim()).map(|k| minkowski(&w.g.a, &g.momentum(k % n))).collect();
    k.gauge(&alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wigner::cone::{gaussian_probe, ConeGrid23};

    fn weighted(rep: &MasslessRep23, phi: &[C64]) -> Vec<C64> {
        let n = rep.grid.len();
        phi.iter().enumerate().map(|(k, z)| z * rep.grid.weight(k % n).sqrt()).collect()
    }

    fn rel_err(a: &[C64], b: &[C64]) -> f64 {
        let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let nb: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (d / nb).sqrt()
    }

    #[test]
    fn hermitian_and_identity_at_zero() {
        let rep = MasslessRep23::new(ConeGrid23::standard(16), 1.5);
        let k = boost_generator(&rep, &Wedge23::standard());
        assert!(k.hermitian_defect() < 1e-12);
        let x: Vec<C64> = (0..rep.dim()).map(|i| c(i as f64, 1.0)).collect();
        assert_eq!(k.exp_i_apply(0.0, &x), x);
    }

    #[test]
    fn matches_finite_boost() {
        let mut errs = vec![];
        for n in [32, 64] {
            let rep = MasslessRep23::new(ConeGrid23::standard(n), 1.0);
            let w = Wedge23::standard().transformed(&Poincare::translation(V3::new(0.1, 0.3, -0.2)));
            let k = boost_generator(&rep, &w);
            let phi = gaussian_probe(&rep.grid, -0.25, 1.0, 0.25, 0.4);
            let a = k.exp_i_apply(0.1, &weighted(&rep, &phi));
            let b = rep.rep_apply(&w.boost(0.1), &phi).unwrap();
            errs.push(rel_err(&a, &weighted(&rep, &b.phi)));
        }
        assert!(errs[1] < errs[0] / 2.0, "{errs:?}");
    }
}
