//! Standard subspaces of `C^n`, their Tomita data and lattice operations.
//!
//! Inner products are conjugate-linear in the first argument. A real subspace is
//! stored by a basis orthonormal for `Re<.,.>`; internally it is handled through
//! its realification in `R^{2n}`.

use ndarray::{s, Array2, ArrayView1, Axis};
use ndarray_linalg::SVD;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ModlocError, Result};
use crate::linalg::*;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub abs_tol: f64,
    /// Relative to the largest singular value.
    pub rank_tol: f64,
}

impl TolerancePolicy {
    pub fn for_dim(n: usize) -> Self {
        Self { abs_tol: 1e-10 * n.max(1) as f64, rank_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub cyclic: bool,
    pub separating: bool,
    pub standard: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealSubspace {
    n: usize,
    basis: CMat,
    pub tol: TolerancePolicy,
}

impl RealSubspace {
    /// Real span of the given complex columns.
    pub fn span(n: usize, vectors: &CMat) -> Self {
        Self::span_with_tol(n, vectors, TolerancePolicy::for_dim(n))
    }

    pub fn span_with_tol(n: usize, vectors: &CMat, tol: TolerancePolicy) -> Self {
        assert_eq!(vectors.nrows(), n, "vector length must equal ambient dimension");
        let basis = orth_complex_cols(vectors.view(), tol.rank_tol);
        Self { n, basis, tol }
    }

    /// Wrap columns already orthonormal for `Re<.,.>`.
    pub fn from_orthonormal(n: usize, basis: CMat, tol: TolerancePolicy) -> Self {
        Self { n, basis, tol }
    }

    pub fn from_realified(n: usize, q: &RMat, tol: TolerancePolicy) -> Self {
        Self { n, basis: complexify_cols(q.view()), tol }
    }

    pub fn zero(n: usize) -> Self {
        Self { n, basis: CMat::zeros((n, 0)), tol: TolerancePolicy::for_dim(n) }
    }

    /// `C^n` as a real `2n`-dimensional space.
    pub fn full(n: usize) -> Self {
        let e = ceye(n);
        let ie = e.mapv(|z| z * I);
        Self { n, basis: hstack_c(e.view(), ie.view()), tol: TolerancePolicy::for_dim(n) }
    }

    /// Fixed points of entrywise conjugation.
    pub fn real_axis(n: usize) -> Self {
        Self { n, basis: ceye(n), tol: TolerancePolicy::for_dim(n) }
    }

    /// Random standard subspace: real span of a random complex basis.
    pub fn random_standard<R: Rng>(n: usize, rng: &mut R) -> Self {
        let e = CMat::from_shape_fn((n, n), |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        Self::span(n, &e)
    }

    /// Random real subspace of real dimension `d`.
    pub fn random<R: Rng>(n: usize, d: usize, rng: &mut R) -> Self {
        let e = CMat::from_shape_fn((n, d), |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        Self::span(n, &e)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn realified(&self) -> RMat {
        realify_cols(self.basis.view())
    }

    pub fn with_tol(mut self, tol: TolerancePolicy) -> Self {
        self.tol = tol;
        self
    }

    /// Max deviation of the `Re`-Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let q = self.realified();
        let g = q.t().dot(&q) - RMat::eye(self.dim());
        g.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Real-orthogonal projection of a vector onto the subspace.
    pub fn project(&self, v: ArrayView1<C64>) -> CVec {
        let q = self.realified();
        let x = realify_vec(v);
        complexify_vec(q.dot(&q.t().dot(&x)).view())
    }

    /// Distance of `v` to the subspace relative to `|v|`.
    pub fn residual(&self, v: ArrayView1<C64>) -> f64 {
        let nv = vec_norm(v);
        if nv == 0.0 {
            return 0.0;
        }
        vec_norm((&v - &self.project(v)).view()) / nv
    }

    /// Image under a complex-linear map.
    pub fn map_linear(&self, u: &CMat) -> Self {
        Self::span_with_tol(self.n, &u.dot(&self.basis), self.tol)
    }

    /// Image under the anti-linear map `xi -> A conj(xi)`.
    pub fn map_antilinear(&self, a: &AntiLinear) -> Self {
        Self::span_with_tol(self.n, &a.apply_cols(&self.basis), self.tol)
    }

    pub fn times_i(&self) -> Self {
        Self::from_orthonormal(self.n, self.basis.mapv(|z| z * I), self.tol)
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(ModlocError::AmbientMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// `||P_self - P_other||`; 1 when dimensions differ.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_ambient(other)?;
        if self.dim() != other.dim() {
            return Ok(1.0);
        }
        if self.dim() == 0 {
            return Ok(0.0);
        }
        // Sine of the largest principal angle, computed from residuals for accuracy.
        Ok(self.containment_defect(other)?.max(other.containment_defect(self)?))
    }

    /// `max_{v in self} dist(v, other)`: zero iff `self` is contained in `other`.
    pub fn containment_defect(&self, other: &Self) -> Result<f64> {
        self.check_ambient(other)?;
        if self.dim() == 0 {
            return Ok(0.0);
        }
        let qa = self.realified();
        let qb = other.realified();
        let resid = &qa - &qb.dot(&qb.t().dot(&qa));
        Ok(opnorm_r(resid.view()))
    }
}

/// Anti-linear map `xi -> A conj(xi)` in the fixed ambient basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiLinear {
    pub matrix: CMat,
}

impl AntiLinear {
    pub fn new(matrix: CMat) -> Self {
        Self { matrix }
    }

    /// Entrywise complex conjugation.
    pub fn conjugation(n: usize) -> Self {
        Self { matrix: ceye(n) }
    }

    pub fn apply(&self, v: ArrayView1<C64>) -> CVec {
        self.matrix.dot(&v.mapv(|z| z.conj()))
    }

    pub fn apply_cols(&self, b: &CMat) -> CMat {
        self.matrix.dot(&conj_mat(b.view()))
    }

    /// `(A conj)(B conj) = A conj(B)`, a linear map.
    pub fn compose(&self, other: &AntiLinear) -> CMat {
        self.matrix.dot(&conj_mat(other.matrix.view()))
    }

    /// `(A conj) L = A conj(L) conj`.
    pub fn after_linear(&self, l: &CMat) -> AntiLinear {
        AntiLinear::new(self.matrix.dot(&conj_mat(l.view())))
    }

    /// `L (A conj)`.
    pub fn before_linear(&self, l: &CMat) -> AntiLinear {
        AntiLinear::new(l.dot(&self.matrix))
    }

    /// Anti-linear adjoint: `<T* phi, psi> = <T psi, phi>`.
    pub fn adjoint(&self) -> AntiLinear {
        AntiLinear::new(self.matrix.t().to_owned())
    }

    /// `|| A conj(A) - 1 ||`.
    pub fn involution_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        opnorm_c((self.compose(self) - ceye(n)).view())
    }

    pub fn realified(&self) -> RMat {
        realify_antilinear(self.matrix.view())
    }
}

#[derive(Debug, Clone)]
pub struct ModularData {
    pub j: AntiLinear,
    pub delta: CMat,
    eig: (RVec, CMat),
}

impl ModularData {
    pub fn new(j: AntiLinear, delta: CMat) -> Self {
        let eig = eigh(delta.view());
        Self { j, delta, eig }
    }

    pub fn dim(&self) -> usize {
        self.delta.nrows()
    }

    pub fn delta_eigenvalues(&self) -> &RVec {
        &self.eig.0
    }

    pub fn delta_pow(&self, p: f64) -> CMat {
        spectral_apply(&self.eig.0, &self.eig.1, |l| c(l.powf(p), 0.0))
    }

    /// `Delta^{it}`.
    pub fn delta_it(&self, t: f64) -> CMat {
        spectral_apply(&self.eig.0, &self.eig.1, |l| C64::from_polar(1.0, t * l.ln()))
    }

    /// `Delta^{a + i b}`.
    pub fn delta_complex_pow(&self, a: f64, b: f64) -> CMat {
        spectral_apply(&self.eig.0, &self.eig.1, |l| C64::from_polar(l.powf(a), b * l.ln()))
    }

    /// `S = J Delta^{1/2}`.
    pub fn s(&self) -> AntiLinear {
        self.j.after_linear(&self.delta_pow(0.5))
    }

    /// `max(||J Delta J - Delta^{-1}||, ||J^2 - 1||, min eig check)`.
    pub fn invariant_defect(&self) -> f64 {
        let jdj = self.j.matrix.dot(&conj_mat(self.delta.view())).dot(&conj_mat(self.j.matrix.view()));
        let a = opnorm_c((jdj - self.delta_pow(-1.0)).view());
        let b = self.j.involution_defect();
        let herm = opnorm_c((&self.delta - &adjoint(self.delta.view())).view());
        a.max(b).max(herm)
    }
}

/// `H' = {xi : Im<xi, eta> = 0 for all eta in H} = (iH)^perp`.
pub fn symplectic_complement(h: &RealSubspace) -> RealSubspace {
    let n = h.ambient_dim();
    let ih = realify_cols(h.basis.mapv(|z| z * I).view());
    let q = null_space(ih.t(), h.tol.rank_tol);
    let q = if q.nrows() == 0 { RMat::eye(2 * n) } else { q };
    RealSubspace::from_realified(n, &q, h.tol)
}

pub fn classify(h: &RealSubspace) -> Classification {
    let n = h.ambient_dim();
    let d = h.dim();
    let both = hstack_c(h.basis.view(), h.basis.mapv(|z| z * I).view());
    let r = rank_r(realify_cols(both.view()).view(), h.tol.rank_tol);
    let cyclic = r == 2 * n;
    let separating = r == 2 * d;
    Classification { cyclic, separating, standard: cyclic && separating }
}

/// Smallest singular value of the complex span map; a continuous cyclicity measure.
pub fn cyclicity_margin(h: &RealSubspace) -> f64 {
    let n = h.ambient_dim();
    let both = hstack_c(h.basis.view(), h.basis.mapv(|z| z * I).view());
    let s = singular_values_r(realify_cols(both.view()).view());
    if s.len() < 2 * n {
        return 0.0;
    }
    s.iter().take(2 * n).cloned().fold(f64::INFINITY, f64::min)
}

fn require_standard(h: &RealSubspace) -> Result<()> {
    let cl = classify(h);
    if !cl.standard {
        return Err(ModlocError::NotStandard { cyclic: cl.cyclic, separating: cl.separating });
    }
    Ok(())
}

/// Tomita operator of a standard subspace: `S = E conj(E^{-1}) conj`.
pub fn tomita_operator(h: &RealSubspace) -> Result<AntiLinear> {
    require_standard(h)?;
    let e = h.basis.clone();
    let einv = inverse_c(e.view())?;
    Ok(AntiLinear::new(e.dot(&conj_mat(einv.view()))))
}

pub fn tomita_from_subspace(h: &RealSubspace) -> Result<ModularData> {
    Ok(polar_tomita(&tomita_operator(h)?))
}

/// Polar decomposition `S = J Delta^{1/2}` of an invertible anti-linear involution.
pub fn polar_tomita(s: &AntiLinear) -> ModularData {
    let delta = hermitian_part(s.adjoint().compose(&s).view());
    let (vals, vecs) = eigh(delta.view());
    let inv_sqrt = spectral_apply(&vals, &vecs, |l| c(l.powf(-0.5), 0.0));
    let j = s.after_linear(&inv_sqrt);
    ModularData { j, delta, eig: (vals, vecs) }
}

pub fn subspace_from_tomita(m: &ModularData) -> Result<RealSubspace> {
    let n = m.dim();
    let tol = TolerancePolicy::for_dim(n);
    let defect = m.invariant_defect();
    if defect > 1e-6 * (1.0 + opnorm_c(m.delta.view())) {
        return Err(ModlocError::InvalidModularData(format!("invariant defect {defect:.3e}")));
    }
    let mut a = m.s().realified();
    for k in 0..2 * n {
        a[[k, k]] -= 1.0;
    }
    let q = null_space(a.view(), 1e-9);
    Ok(RealSubspace::from_realified(n, &q, tol))
}

/// Intersection via principal vectors with cosine above `1 - rank_tol`.
pub fn meet(h: &RealSubspace, k: &RealSubspace) -> Result<RealSubspace> {
    h.check_ambient(k)?;
    let n = h.ambient_dim();
    if h.dim() == 0 || k.dim() == 0 {
        return Ok(RealSubspace::zero(n).with_tol(h.tol));
    }
    let qh = h.realified();
    let qk = k.realified();
    let m: RMat = qh.t().dot(&qk);
    let (u, sv, _) = m.svd(true, false).map_err(|e| ModlocError::Numerical(e.to_string()))?;
    let u = u.unwrap();
    let r = sv.iter().filter(|&&x| x > 1.0 - h.tol.rank_tol).count();
    let q = qh.dot(&u.slice(s![.., ..r]));
    Ok(RealSubspace::from_realified(n, &q, h.tol))
}

pub fn meet_all(hs: &[RealSubspace]) -> Result<RealSubspace> {
    let mut acc = hs[0].clone();
    for h in &hs[1..] {
        acc = meet(&acc, h)?;
    }
    Ok(acc)
}

pub fn join(h: &RealSubspace, k: &RealSubspace) -> Result<RealSubspace> {
    h.check_ambient(k)?;
    let q = orth(hstack_r(h.realified().view(), k.realified().view()).view(), h.tol.rank_tol);
    Ok(RealSubspace::from_realified(h.ambient_dim(), &q, h.tol))
}

pub fn join_all(hs: &[RealSubspace]) -> Result<RealSubspace> {
    let mut acc = hs[0].clone();
    for h in &hs[1..] {
        acc = join(&acc, h)?;
    }
    Ok(acc)
}

/// Deviation between `(cap H_a)'` and `sum H_a'`.
pub fn verify_duality(hs: &[RealSubspace]) -> Result<f64> {
    let lhs = symplectic_complement(&meet_all(hs)?);
    let comps: Vec<_> = hs.iter().map(symplectic_complement).collect();
    let rhs = join_all(&comps)?;
    lhs.distance(&rhs)
}

/// Closed real span of `{xi (x) eta}`.
pub fn tensor_span(h: &RealSubspace, k: &RealSubspace) -> RealSubspace {
    let (n, m) = (h.ambient_dim(), k.ambient_dim());
    let mut prods = CMat::zeros((n * m, h.dim() * k.dim()));
    for a in 0..h.dim() {
        for b in 0..k.dim() {
            let v = kron_vec(h.basis.column(a), k.basis.column(b));
            prods.column_mut(a * k.dim() + b).assign(&v);
        }
    }
    RealSubspace::span_with_tol(n * m, &prods, TolerancePolicy::for_dim(n * m))
}

pub fn tensor(h: &RealSubspace, k: &RealSubspace) -> Result<RealSubspace> {
    require_standard(h)?;
    require_standard(k)?;
    Ok(tensor_span(h, k))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorReport {
    pub dim: usize,
    pub expected_dim: usize,
    /// Distance between the product span and `ker(S_H (x) S_K - 1)`.
    pub fixed_point_deviation: f64,
    /// Distance between `(H (x) K)'` and `H' (x) K'`.
    pub complement_deviation: f64,
}

pub fn tensor_report(h: &RealSubspace, k: &RealSubspace) -> Result<TensorReport> {
    let hk = tensor(h, k)?;
    let sh = tomita_operator(h)?;
    let sk = tomita_operator(k)?;
    let s = AntiLinear::new(kron(sh.matrix.view(), sk.matrix.view()));
    let nm = hk.ambient_dim();
    let mut a = s.realified();
    for i in 0..2 * nm {
        a[[i, i]] -= 1.0;
    }
    let fixed = RealSubspace::from_realified(nm, &null_space(a.view(), 1e-9), hk.tol);
    let lhs = symplectic_complement(&hk);
    let rhs = tensor_span(&symplectic_complement(h), &symplectic_complement(k));
    Ok(TensorReport {
        dim: hk.dim(),
        expected_dim: nm,
        fixed_point_deviation: hk.distance(&fixed)?,
        complement_deviation: lhs.distance(&rhs)?,
    })
}

/// Deviation between `(cap H_a) (x) (cap K_b)` and `cap_{a,b} (H_a (x) K_b)`.
pub fn tensor_meet_deviation(ha: &[RealSubspace], kb: &[RealSubspace]) -> Result<f64> {
    let lhs = tensor_span(&meet_all(ha)?, &meet_all(kb)?);
    let mut pieces = Vec::new();
    for h in ha {
        for k in kb {
            pieces.push(tensor_span(h, k));
        }
    }
    lhs.distance(&meet_all(&pieces)?)
}

/// KMS boundary identities on basis pairs; returns the max deviation.
pub fn kms_surrogate_check(h: &RealSubspace, ts: &[f64]) -> Result<f64> {
    let m = tomita_from_subspace(h)?;
    let b = h.basis();
    let d = h.dim();
    let delta_b = m.delta.dot(b);
    let mut dev: f64 = 0.0;
    for x in 0..d {
        for y in 0..d {
            let lhs = inner(b.column(y), delta_b.column(x));
            let rhs = inner(b.column(x), b.column(y));
            dev = dev.max((lhs - rhs).norm());
        }
    }
    for &t in ts {
        let a = m.delta_complex_pow(1.0, -t).dot(b);
        let bm = m.delta_it(-t).dot(b);
        for x in 0..d {
            for y in 0..d {
                let lhs = inner(b.column(y), a.column(x));
                let rhs = inner(bm.column(x), b.column(y));
                dev = dev.max((lhs - rhs).norm());
            }
        }
    }
    Ok(dev)
}

/// `max(||U Delta - Delta U||, ||U J - J U||)` after asserting `UH = H`.
pub fn commuting_unitary_check(h: &RealSubspace, u: &CMat) -> Result<f64> {
    let img = h.map_linear(u);
    let inv = img.distance(h)?;
    if inv > 1e-8 {
        return Err(ModlocError::NotInvariant(inv));
    }
    let m = tomita_from_subspace(h)?;
    let a = opnorm_c((u.dot(&m.delta) - m.delta.dot(u)).view());
    // U J xi = U A conj(xi); J U xi = A conj(U) conj(xi).
    let uj = u.dot(&m.j.matrix);
    let ju = m.j.matrix.dot(&conj_mat(u.view()));
    let b = opnorm_c((uj - ju).view());
    Ok(a.max(b))
}

/// Degenerate finite-dimensional form of the one-particle Borchers theorem.
///
/// For a positive generator `P` with `e^{itP} H = H` for `t >= 0`, returns the
/// invariance defect at the sampled times and the commutation defect with the
/// modular data at `t = 1`.
pub fn borchers_degenerate_check(h: &RealSubspace, p: &CMat, ts: &[f64]) -> Result<(f64, f64)> {
    let (vals, _) = eigh(p.view());
    if vals.iter().any(|&l| l < -1e-10) {
        return Err(ModlocError::Numerical("generator is not positive".into()));
    }
    let mut inv: f64 = 0.0;
    for &t in ts {
        let u = herm_fn(p.view(), |l| C64::from_polar(1.0, t * l));
        inv = inv.max(h.map_linear(&u).distance(h)?);
    }
    let u1 = herm_fn(p.view(), |l| C64::from_polar(1.0, l));
    let comm = commuting_unitary_check(h, &u1)?;
    Ok((inv, comm))
}

/// Checks that `K ⊆ H`, `Delta_H^{it} K = K` and `K` cyclic imply `K = H`.
pub fn modular_invariant_cyclic_equals(h: &RealSubspace, k: &RealSubspace, ts: &[f64]) -> Result<Option<f64>> {
    let m = tomita_from_subspace(h)?;
    if k.containment_defect(h)? > 1e-8 || !classify(k).cyclic {
        return Ok(None);
    }
    for &t in ts {
        if k.map_linear(&m.delta_it(t)).distance(k)? > 1e-8 {
            return Ok(None);
        }
    }
    Ok(Some(k.distance(h)?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceDoc {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<[f64; 2]>>,
    pub tol: TolerancePolicy,
}

impl RealSubspace {
    pub fn to_doc(&self) -> SubspaceDoc {
        let basis = self
            .basis
            .axis_iter(Axis(1))
            .map(|col| col.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        SubspaceDoc { ambient_dim: self.n, basis, tol: self.tol }
    }

    pub fn from_doc(doc: &SubspaceDoc) -> Result<Self> {
        let n = doc.ambient_dim;
        let d = doc.basis.len();
        let mut b = Array2::zeros((n, d));
        for (j, col) in doc.basis.iter().enumerate() {
            if col.len() != n {
                return Err(ModlocError::ConfigInvalid(format!("basis vector {j} has length {}", col.len())));
            }
            for (i, p) in col.iter().enumerate() {
                b[[i, j]] = c(p[0], p[1]);
            }
        }
        Ok(Self { n, basis: b, tol: doc.tol })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_doc())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(s)?)
    }
}
