//! Fermionic second quantization on the finite Fock space `F_-(C^n)`.
//!
//! Basis vectors are indexed by subsets `S` of the modes (bitmasks) and stand for
//! `e_{s_1} ^ ... ^ e_{s_k}` with `s_1 < ... < s_k`. The Jordan-Wigner sign of
//! `a^*_j` counts the occupied modes below `j`; any other ordering gives a unitarily
//! equivalent field.

pub mod algebra;
pub mod bose;

use ndarray::{ArrayView1, Axis};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

pub use algebra::{commutant, generate_algebra, AlgebraTolerance, MatrixStarAlgebra};
pub use bose::{gamma_plus, BoseFock};

use crate::error::{ModlocError, Result};
use crate::linalg::*;
use crate::subspace::{
    classify, join_all, meet, meet_all, polar_tomita, symplectic_complement, tomita_from_subspace, tomita_operator,
    AntiLinear, ModularData, RealSubspace, TolerancePolicy,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FermiFock {
    pub n: usize,
}

impl FermiFock {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn vacuum(&self) -> CVec {
        let mut v = CVec::zeros(self.dim());
        v[0] = c(1.0, 0.0);
        v
    }

    pub fn particle_number(&self, s: usize) -> usize {
        s.count_ones() as usize
    }

    /// `a^*_j`.
    pub fn creation(&self, j: usize) -> CMat {
        assert!(j < self.n);
        let mut m = CMat::zeros((self.dim(), self.dim()));
        for s in 0..self.dim() {
            if s & (1 << j) == 0 {
                let sign = if (s & ((1 << j) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                m[[s | (1 << j), s]] = c(sign, 0.0);
            }
        }
        m
    }

    /// `a^*(xi) = sum_j xi_j a^*_j`, complex linear in `xi`.
    pub fn create(&self, xi: ArrayView1<C64>) -> CMat {
        assert_eq!(xi.len(), self.n);
        let mut m = CMat::zeros((self.dim(), self.dim()));
        for (j, &z) in xi.iter().enumerate() {
            if z != c(0.0, 0.0) {
                m.scaled_add(z, &self.creation(j));
            }
        }
        m
    }

    /// `a(xi) = a^*(xi)^*`, anti-linear in `xi`.
    pub fn annihilate(&self, xi: ArrayView1<C64>) -> CMat {
        adjoint(self.create(xi).view())
    }

    /// `Psi(xi) = a(xi) + a^*(xi)`.
    pub fn field(&self, xi: ArrayView1<C64>) -> CMat {
        let a = self.create(xi);
        &adjoint(a.view()) + &a
    }

    /// `+1` on even, `-1` on odd particle number.
    pub fn grading(&self) -> CMat {
        CMat::from_diag(&CVec::from_shape_fn(self.dim(), |s| c(if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 }, 0.0)))
    }

    /// `R_-(H)`, generated by the fields of a real basis of `H`.
    pub fn field_algebra(&self, h: &RealSubspace, tol: &AlgebraTolerance) -> Result<MatrixStarAlgebra> {
        if h.ambient_dim() != self.n {
            return Err(ModlocError::AmbientMismatch(h.ambient_dim(), self.n));
        }
        let gens: Vec<CMat> = h.basis().axis_iter(Axis(1)).map(|xi| self.field(xi)).collect();
        generate_algebra(self.dim(), &gens, tol)
    }
}

/// Field operator on `F_-(C^n)` with `n = xi.len()`.
pub fn fermi_field(xi: ArrayView1<C64>) -> CMat {
    FermiFock::new(xi.len()).field(xi)
}

/// `Z = (1 + i Gamma)/(1 + i)`: `1` on even and `-i` on odd particle number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistOperator {
    pub fock: FermiFock,
}

impl TwistOperator {
    pub fn new(fock: FermiFock) -> Self {
        Self { fock }
    }

    pub fn matrix(&self) -> CMat {
        let g = self.fock.grading();
        (ceye(self.fock.dim()) + g.mapv(|z| z * c(0.0, 1.0))).mapv(|z| z / c(1.0, 1.0))
    }

    /// `Z x Z^*`.
    pub fn conjugate(&self, x: &CMat) -> CMat {
        let z = self.matrix();
        z.dot(x).dot(&adjoint(z.view()))
    }
}

fn subsets_of_size(n: usize, k: usize) -> Vec<usize> {
    (0..1usize << n).filter(|s| s.count_ones() as usize == k).collect()
}

fn bits(s: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|&j| s & (1 << j) != 0).collect()
}

/// Determinant by partial-pivot elimination (small sizes).
fn det(mut a: Vec<C64>, k: usize) -> C64 {
    let mut d = c(1.0, 0.0);
    for col in 0..k {
        let p = (col..k).max_by(|&x, &y| a[x * k + col].norm().total_cmp(&a[y * k + col].norm())).unwrap();
        if a[p * k + col].norm() == 0.0 {
            return c(0.0, 0.0);
        }
        if p != col {
            for j in 0..k {
                a.swap(p * k + j, col * k + j);
            }
            d = -d;
        }
        let piv = a[col * k + col];
        d *= piv;
        for r in col + 1..k {
            let f = a[r * k + col] / piv;
            for j in col..k {
                let v = a[col * k + j];
                a[r * k + j] -= f * v;
            }
        }
    }
    d
}

/// `Gamma_-(T)` for linear `T` on `C^n`: minors `det T[R, S]` on each particle-number sector.
pub fn gamma_minus(t: &CMat) -> CMat {
    let n = t.nrows();
    assert_eq!(n, t.ncols());
    let fock = FermiFock::new(n);
    let mut out = CMat::zeros((fock.dim(), fock.dim()));
    for k in 0..=n {
        let sets = subsets_of_size(n, k);
        for &s in &sets {
            let cols = bits(s);
            for &r in &sets {
                let rows = bits(r);
                let sub: Vec<C64> = rows.iter().flat_map(|&i| cols.iter().map(move |&j| t[[i, j]])).collect();
                out[[r, s]] = det(sub, k);
            }
        }
    }
    out
}

/// `Gamma_-(A conj) = Gamma_-(A) conj_F`; the wedge basis is real, so `conj_F` is entrywise.
pub fn gamma_minus_antilinear(a: &AntiLinear) -> AntiLinear {
    AntiLinear::new(gamma_minus(&a.matrix))
}

/// Tomita data of `(A, Omega)` from `S x Omega = x^* Omega`.
pub fn vacuum_tomita(a: &MatrixStarAlgebra, omega: ArrayView1<C64>) -> Result<ModularData> {
    let d = a.ambient_dim();
    if a.dim() != d {
        return Err(ModlocError::NotCyclicSeparating);
    }
    let v = a.vacuum_map(omega);
    let sv = singular_values_r(realify_linear(v.view()).view());
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if sv.len() < 2 * d || smin <= 1e-10 * smax.max(1.0) {
        return Err(ModlocError::NotCyclicSeparating);
    }
    let mut vs = CMat::zeros((d, d));
    for (k, x) in a.basis().iter().enumerate() {
        vs.column_mut(k).assign(&adjoint(x.view()).dot(&omega));
    }
    // S conj(V) = V#  =>  A_S = V# conj(V)^{-1}.
    let s = vs.dot(&inverse_c(conj_mat(v.view()).view())?);
    Ok(polar_tomita(&AntiLinear::new(s)))
}

/// Closure of `A_sa Omega` as a real subspace of the Fock space.
pub fn vacuum_subspace(a: &MatrixStarAlgebra, omega: ArrayView1<C64>) -> RealSubspace {
    RealSubspace::span(omega.len(), &algebra::self_adjoint_vacuum_span(a, omega))
}

/// `C^n = K_{-1} + K_0 + K_1` with `K_{-1} = H cap iH`, `K_1 = (H + iH)^perp` and
/// `H = K_{-1} + H_0`, `H_0` standard in `K_0`. Bases are complex orthonormal columns.
#[derive(Debug, Clone)]
pub struct StandardDecomposition {
    pub k_minus: CMat,
    pub k_zero: CMat,
    pub k_one: CMat,
    /// `H_0` in the coordinates of `k_zero`.
    pub h_zero: RealSubspace,
}

fn complex_gram_schmidt(cols: &CMat, start: &CMat, tol: f64) -> CMat {
    let mut out: Vec<CVec> = start.axis_iter(Axis(1)).map(|c| c.to_owned()).collect();
    let base = out.len();
    for v in cols.axis_iter(Axis(1)) {
        let mut v = v.to_owned();
        let scale = vec_norm(v.view()).max(1.0);
        for _ in 0..2 {
            for b in &out {
                let p = inner(b.view(), v.view());
                v.scaled_add(-p, b);
            }
        }
        let nv = vec_norm(v.view());
        if nv > tol * scale {
            out.push(v.mapv(|z| z / nv));
        }
    }
    let mut m = CMat::zeros((cols.nrows(), out.len() - base));
    for (k, v) in out.into_iter().skip(base).enumerate() {
        m.column_mut(k).assign(&v);
    }
    m
}

pub fn standard_decomposition(h: &RealSubspace) -> Result<StandardDecomposition> {
    let n = h.ambient_dim();
    let tol = 1e-8;
    let none = CMat::zeros((n, 0));
    let k_minus = complex_gram_schmidt(meet(h, &h.times_i())?.basis(), &none, tol);
    let span = complex_gram_schmidt(h.basis(), &none, tol);
    let k_one = complex_gram_schmidt(&ceye(n), &span, tol);
    let k_zero = complex_gram_schmidt(&span, &k_minus, tol);
    let proj = k_minus.dot(&adjoint(k_minus.view()));
    let rest = h.basis() - &proj.dot(h.basis());
    let coords = adjoint(k_zero.view()).dot(&rest);
    let m = k_zero.ncols();
    let h_zero = RealSubspace::span_with_tol(m, &coords, TolerancePolicy::for_dim(m.max(1)));
    Ok(StandardDecomposition { k_minus, k_zero, k_one, h_zero })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityDeviation {
    pub identity: String,
    pub deviation: f64,
    pub n: usize,
    pub seed: u64,
}

/// Largest mode count accepted by [`verify_secquant`].
pub const SECQUANT_MAX_MODES: usize = 5;

fn rel(a: &CMat, b: &CMat) -> f64 {
    opnorm_c((a - b).view()) / opnorm_c(b.view()).max(1.0)
}

fn product_on_vacuum(fock: &FermiFock, xs: &[CVec]) -> CVec {
    let mut v = fock.vacuum();
    for x in xs.iter().rev() {
        v = fock.field(x.view()).dot(&v);
    }
    v
}

/// Both sides of the second-quantization identities for `H` and the given families.
///
/// `(a-)` and the reversed-product check need `H` standard and are skipped otherwise;
/// `(b)` is computed directly for any `H`. `samples` reversed products are drawn with `seed`.
pub fn verify_secquant(h: &RealSubspace, families: &[Vec<RealSubspace>], seed: u64, samples: usize) -> Result<Vec<IdentityDeviation>> {
    let n = h.ambient_dim();
    if n > SECQUANT_MAX_MODES {
        return Err(ModlocError::DimensionOverflow(1 << SECQUANT_MAX_MODES));
    }
    let fock = FermiFock::new(n);
    let tol = AlgebraTolerance::default();
    let z = TwistOperator::new(fock);
    let zm = z.matrix();
    let ii = c(0.0, 1.0);
    let mut out = Vec::new();
    let mut push = |identity: &str, deviation: f64| out.push(IdentityDeviation { identity: identity.into(), deviation, n, seed });

    let r = fock.field_algebra(h, &tol)?;
    if classify(h).standard {
        let one = tomita_from_subspace(h)?;
        let s_h = tomita_operator(h)?;
        let many = vacuum_tomita(&r, fock.vacuum().view())?;
        push("a-:S", rel(&many.s().matrix, &zm.dot(&gamma_minus(&s_h.matrix.mapv(|w| w * ii)))));
        push("a-:J", rel(&many.j.matrix, &zm.dot(&gamma_minus(&one.j.matrix.mapv(|w| w * ii)))));
        push("a-:Delta", rel(&many.delta, &gamma_minus(&one.delta)));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let s = many.s();
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let k = rng.gen_range(1..=n.max(1) + 1);
            let xs: Vec<CVec> = (0..k)
                .map(|_| {
                    let coeff = RVec::from_shape_fn(h.dim(), |_| rng.gen_range(-1.0..1.0));
                    h.basis().dot(&coeff.mapv(|x| c(x, 0.0)))
                })
                .collect();
            let fwd = product_on_vacuum(&fock, &xs);
            let rev: Vec<CVec> = xs.iter().rev().cloned().collect();
            let back = product_on_vacuum(&fock, &rev);
            let d = vec_norm((&s.apply(fwd.view()) - &back).view()) / vec_norm(back.view()).max(1.0);
            worst = worst.max(d);
        }
        push("a-:reversed", worst);
    }

    let hp = symplectic_complement(h).times_i();
    let twisted = fock.field_algebra(&hp, &tol)?.conjugated(&zm);
    push("b", commutant(&r, &tol)?.equality_defect(&twisted));

    for fam in families {
        let algs: Vec<MatrixStarAlgebra> = fam.iter().map(|k| fock.field_algebra(k, &tol)).collect::<Result<_>>()?;
        let mut joined = algs[0].clone();
        let mut met = algs[0].clone();
        for a in &algs[1..] {
            joined = joined.join(a, &tol)?;
            met = met.intersection(a, &tol)?;
        }
        push("c", fock.field_algebra(&join_all(fam)?, &tol)?.equality_defect(&joined));
        push("d", fock.field_algebra(&meet_all(fam)?, &tol)?.equality_defect(&met));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_and_number() {
        let f = FermiFock::new(3);
        assert_eq!(f.dim(), 8);
        assert_eq!(vec_norm(f.vacuum().view()), 1.0);
        assert_eq!(f.particle_number(0b101), 2);
    }

    #[test]
    fn twist_is_diagonal_phase() {
        let z = TwistOperator::new(FermiFock::new(2)).matrix();
        assert!((z[[0, 0]] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((z[[1, 1]] - c(0.0, -1.0)).norm() < 1e-15);
        assert!((z[[3, 3]] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn determinant_small() {
        let m = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        assert!((det(m, 2) - c(-2.0, 0.0)).norm() < 1e-14);
        assert_eq!(det(vec![], 0), c(1.0, 0.0));
    }
}
