use ndarray::{s, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{ModlocError, Result};
use crate::linalg::*;

/// Default bound on the ambient dimension (`2^8`).
pub const D_MAX: usize = 256;

/// Finite-dimensional *-algebra of `D x D` matrices.
///
/// The basis is stored as Frobenius-orthonormal columns of length `D^2` (row-major
/// vectorisation).
#[derive(Debug, Clone)]
pub struct MatrixStarAlgebra {
    d: usize,
    basis: CMat,
    pub generators: Vec<CMat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraTolerance {
    /// Residual above which a candidate counts as new.
    pub span_tol: f64,
    /// Relative eigenvalue threshold for commutant null vectors.
    pub null_tol: f64,
    pub d_max: usize,
}

impl Default for AlgebraTolerance {
    fn default() -> Self {
        Self { span_tol: 1e-9, null_tol: 1e-10, d_max: D_MAX }
    }
}

fn vectorize(x: &CMat) -> CVec {
    x.iter().cloned().collect()
}

fn unvectorize(v: ArrayView1<C64>, d: usize) -> CMat {
    Array2::from_shape_vec((d, d), v.to_vec()).expect("square")
}

fn check_dim(d: usize, tol: &AlgebraTolerance) -> Result<()> {
    if d > tol.d_max {
        return Err(ModlocError::DimensionOverflow(tol.d_max));
    }
    Ok(())
}

/// Orthonormal columns; returns `true` if `v` was added.
fn push_orthogonal(basis: &mut Vec<CVec>, mut v: CVec, tol: f64) -> bool {
    let scale = vec_norm(v.view()).max(1.0);
    for _ in 0..2 {
        for b in basis.iter() {
            let c = inner(b.view(), v.view());
            v.scaled_add(-c, b);
        }
    }
    let nv = vec_norm(v.view());
    if nv <= tol * scale {
        return false;
    }
    basis.push(v.mapv(|z| z / nv));
    true
}

fn stack(d: usize, cols: &[CVec]) -> CMat {
    let mut m = CMat::zeros((d * d, cols.len()));
    for (k, c) in cols.iter().enumerate() {
        m.column_mut(k).assign(c);
    }
    m
}

impl MatrixStarAlgebra {
    /// `C . 1`.
    pub fn scalars(d: usize) -> Self {
        let id = vectorize(&ceye(d)).mapv(|z| z / (d as f64).sqrt());
        Self { d, basis: stack(d, &[id]), generators: Vec::new() }
    }

    /// All `D x D` matrices.
    pub fn full(d: usize) -> Self {
        let mut b = CMat::zeros((d * d, d * d));
        for k in 0..d * d {
            b[[k, k]] = c(1.0, 0.0);
        }
        Self { d, basis: b, generators: Vec::new() }
    }

    /// Linear span of `mats`, assumed closed under products and adjoints.
    pub fn from_span(d: usize, mats: &[CMat], tol: &AlgebraTolerance) -> Self {
        let mut cols = Vec::new();
        for m in mats {
            push_orthogonal(&mut cols, vectorize(m), tol.span_tol);
        }
        Self { d, basis: stack(d, &cols), generators: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis_matrix(&self, k: usize) -> CMat {
        unvectorize(self.basis.column(k), self.d)
    }

    pub fn basis(&self) -> Vec<CMat> {
        (0..self.dim()).map(|k| self.basis_matrix(k)).collect()
    }

    /// Frobenius distance from `x` to the algebra, relative to `||x||`.
    pub fn residual(&self, x: &CMat) -> f64 {
        let v = vectorize(x);
        let nv = vec_norm(v.view());
        if nv == 0.0 {
            return 0.0;
        }
        let coeff = adjoint(self.basis.view()).dot(&v);
        vec_norm((&v - &self.basis.dot(&coeff)).view()) / nv
    }

    /// Largest residual of `other`'s basis in `self`.
    pub fn containment_defect(&self, other: &Self) -> f64 {
        let p = self.basis.dot(&adjoint(self.basis.view()).dot(&other.basis));
        (0..other.dim()).map(|k| vec_norm((&other.basis.column(k) - &p.column(k)).view())).fold(0.0, f64::max)
    }

    /// Mutual containment defect; dimension mismatches show up as defect of order one.
    pub fn equality_defect(&self, other: &Self) -> f64 {
        self.containment_defect(other).max(other.containment_defect(self))
    }

    /// Largest residual of pairwise basis products and adjoints.
    pub fn closure_defect(&self) -> f64 {
        let b = self.basis();
        let mut worst: f64 = 0.0;
        for x in &b {
            worst = worst.max(self.residual(&adjoint(x.view())));
            for y in &b {
                worst = worst.max(self.residual(&x.dot(y)));
            }
        }
        worst
    }

    /// `U A U^*`.
    pub fn conjugated(&self, u: &CMat) -> Self {
        let ud = adjoint(u.view());
        let mut b = CMat::zeros(self.basis.raw_dim());
        for k in 0..self.dim() {
            let m = u.dot(&self.basis_matrix(k)).dot(&ud);
            b.column_mut(k).assign(&vectorize(&m));
        }
        Self { d: self.d, basis: b, generators: self.generators.iter().map(|g| u.dot(g).dot(&ud)).collect() }
    }

    /// Intersection of the two linear spans (again a *-algebra).
    pub fn intersection(&self, other: &Self, tol: &AlgebraTolerance) -> Result<Self> {
        if self.d != other.d {
            return Err(ModlocError::AmbientMismatch(self.d, other.d));
        }
        let m = adjoint(self.basis.view()).dot(&other.basis);
        let (vals, vecs) = eigh(m.dot(&adjoint(m.view())).view());
        let keep: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > 1.0 - 1e3 * tol.span_tol).collect();
        let mut b = CMat::zeros((self.d * self.d, keep.len()));
        for (c, &k) in keep.iter().enumerate() {
            b.column_mut(c).assign(&self.basis.dot(&vecs.column(k)));
        }
        Ok(Self { d: self.d, basis: b, generators: Vec::new() })
    }

    /// Algebra generated by both.
    pub fn join(&self, other: &Self, tol: &AlgebraTolerance) -> Result<Self> {
        if self.d != other.d {
            return Err(ModlocError::AmbientMismatch(self.d, other.d));
        }
        let mut gens = self.basis();
        gens.extend(other.basis());
        let mut out = generate_algebra(self.d, &gens, tol)?;
        out.generators = self.generators.iter().chain(&other.generators).cloned().collect();
        Ok(out)
    }

    /// `x -> x Omega` as a `D x dim` matrix.
    pub fn vacuum_map(&self, omega: ArrayView1<C64>) -> CMat {
        let mut v = CMat::zeros((self.d, self.dim()));
        for k in 0..self.dim() {
            v.column_mut(k).assign(&self.basis_matrix(k).dot(&omega));
        }
        v
    }
}

/// Smallest *-algebra containing `1` and the generators.
pub fn generate_algebra(d: usize, generators: &[CMat], tol: &AlgebraTolerance) -> Result<MatrixStarAlgebra> {
    check_dim(d, tol)?;
    for g in generators {
        if g.dim() != (d, d) {
            return Err(ModlocError::AmbientMismatch(d, g.nrows()));
        }
    }
    let mut gens: Vec<CMat> = Vec::new();
    for g in generators {
        gens.push(g.clone());
        let ga = adjoint(g.view());
        if frob_c((&ga - g).view()) > tol.span_tol * frob_c(g.view()).max(1.0) {
            gens.push(ga);
        }
    }
    let mut cols = vec![vectorize(&ceye(d)).mapv(|z| z / (d as f64).sqrt())];
    let mut next = 0;
    while next < cols.len() {
        let x = unvectorize(cols[next].view(), d);
        next += 1;
        for g in &gens {
            push_orthogonal(&mut cols, vectorize(&g.dot(&x)), tol.span_tol);
            if cols.len() == d * d {
                return Ok(MatrixStarAlgebra { d, basis: stack(d, &cols), generators: generators.to_vec() });
            }
        }
    }
    Ok(MatrixStarAlgebra { d, basis: stack(d, &cols), generators: generators.to_vec() })
}

/// `{X : [X, g] = 0}` over the generators, or over a spanning set if none were retained.
pub fn commutant(a: &MatrixStarAlgebra, tol: &AlgebraTolerance) -> Result<MatrixStarAlgebra> {
    let d = a.d;
    check_dim(d, tol)?;
    let gens = if a.generators.is_empty() { a.basis() } else { a.generators.clone() };
    let n = d * d;
    let mut m = CMat::zeros((n, n));
    for g in &gens {
        // vec(gX - Xg) = (g (x) 1 - 1 (x) g^T) vec(X) in row-major order.
        let cg = kron(g.view(), ceye(d).view()) - kron(ceye(d).view(), g.t());
        m = m + adjoint(cg.view()).dot(&cg);
    }
    let (vals, vecs) = eigh(m.view());
    let top = vals.iter().cloned().fold(0.0, f64::max).max(1.0);
    let r = vals.iter().filter(|&&l| l <= tol.null_tol * top).count();
    let basis = vecs.slice(s![.., ..r]).to_owned();
    let gens_out = (0..r).map(|k| unvectorize(basis.column(k), d)).collect();
    Ok(MatrixStarAlgebra { d, basis, generators: gens_out })
}

/// Real span of `x Omega` over self-adjoint `x` in the algebra.
pub fn self_adjoint_vacuum_span(a: &MatrixStarAlgebra, omega: ArrayView1<C64>) -> CMat {
    let mut vs = Vec::new();
    for x in a.basis() {
        let xa = adjoint(x.view());
        vs.push((&x + &xa).mapv(|z| z * 0.5).dot(&omega));
        vs.push((&x - &xa).mapv(|z| z * c(0.0, 0.5)).dot(&omega));
    }
    let mut m = CMat::zeros((omega.len(), vs.len()));
    for (k, v) in vs.into_iter().enumerate() {
        m.column_mut(k).assign(&v);
    }
    m
}
