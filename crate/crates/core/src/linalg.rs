//! Dense linear-algebra helpers shared by every module.
//!
//! Complex vectors are realified as `[Re; Im]` so that real-linear subspaces of
//! `C^n` become ordinary subspaces of `R^{2n}` with the inner product `Re<.,.>`.

use ndarray::{concatenate, s, Array1, Array2, ArrayView1, ArrayView2, Axis};
use ndarray_linalg::{Eigh, Inverse, SVD, UPLO};
use num_complex::Complex64;

use crate::error::{ModlocError, Result};

pub type C64 = Complex64;
pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;
pub type RMat = Array2<f64>;
pub type RVec = Array1<f64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `[Re v; Im v]`.
pub fn realify_vec(v: ArrayView1<C64>) -> RVec {
    let n = v.len();
    let mut out = RVec::zeros(2 * n);
    for (k, z) in v.iter().enumerate() {
        out[k] = z.re;
        out[n + k] = z.im;
    }
    out
}

pub fn complexify_vec(x: ArrayView1<f64>) -> CVec {
    let n = x.len() / 2;
    CVec::from_shape_fn(n, |k| c(x[k], x[n + k]))
}

/// Realify each column of an `n x d` complex matrix into a `2n x d` real matrix.
pub fn realify_cols(b: ArrayView2<C64>) -> RMat {
    let (n, d) = b.dim();
    let mut out = RMat::zeros((2 * n, d));
    for ((i, j), z) in b.indexed_iter() {
        out[[i, j]] = z.re;
        out[[n + i, j]] = z.im;
    }
    out
}

pub fn complexify_cols(r: ArrayView2<f64>) -> CMat {
    let (m, d) = r.dim();
    let n = m / 2;
    CMat::from_shape_fn((n, d), |(i, j)| c(r[[i, j]], r[[n + i, j]]))
}

/// Real `2n x 2n` matrix of the linear map `xi -> A xi`.
pub fn realify_linear(a: ArrayView2<C64>) -> RMat {
    let n = a.nrows();
    let mut out = RMat::zeros((2 * n, 2 * n));
    for ((i, j), z) in a.indexed_iter() {
        out[[i, j]] = z.re;
        out[[i, n + j]] = -z.im;
        out[[n + i, j]] = z.im;
        out[[n + i, n + j]] = z.re;
    }
    out
}

/// Real `2n x 2n` matrix of the anti-linear map `xi -> A conj(xi)`.
pub fn realify_antilinear(a: ArrayView2<C64>) -> RMat {
    let n = a.nrows();
    let mut out = RMat::zeros((2 * n, 2 * n));
    for ((i, j), z) in a.indexed_iter() {
        out[[i, j]] = z.re;
        out[[i, n + j]] = z.im;
        out[[n + i, j]] = z.im;
        out[[n + i, n + j]] = -z.re;
    }
    out
}

pub fn conj_mat(a: ArrayView2<C64>) -> CMat {
    a.mapv(|z| z.conj())
}

pub fn adjoint(a: ArrayView2<C64>) -> CMat {
    a.t().mapv(|z| z.conj())
}

pub fn ceye(n: usize) -> CMat {
    CMat::eye(n)
}

pub fn to_complex(a: ArrayView2<f64>) -> CMat {
    a.mapv(|x| c(x, 0.0))
}

pub fn kron(a: ArrayView2<C64>, b: ArrayView2<C64>) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMat::zeros((ar * br, ac * bc));
    for ((i, j), x) in a.indexed_iter() {
        if *x == C64::new(0.0, 0.0) {
            continue;
        }
        let mut blk = out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
        blk.zip_mut_with(&b, |o, y| *o = *x * *y);
    }
    out
}

pub fn kron_vec(a: ArrayView1<C64>, b: ArrayView1<C64>) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

pub fn frob_c(a: ArrayView2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frob_r(a: ArrayView2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn vec_norm(v: ArrayView1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a, b>`, conjugate-linear in `a`.
pub fn inner(a: ArrayView1<C64>, b: ArrayView1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Spectral norm of a complex matrix.
pub fn opnorm_c(a: ArrayView2<C64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let (_, s, _) = a.to_owned().svd(false, false).expect("svd");
    s.iter().cloned().fold(0.0, f64::max)
}

/// Spectral norm of a real matrix.
pub fn opnorm_r(a: ArrayView2<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let (_, s, _) = a.to_owned().svd(false, false).expect("svd");
    s.iter().cloned().fold(0.0, f64::max)
}

pub fn singular_values_r(a: ArrayView2<f64>) -> RVec {
    if a.is_empty() {
        return RVec::zeros(0);
    }
    let (_, s, _) = a.to_owned().svd(false, false).expect("svd");
    s
}

/// Numerical rank: singular values above `rank_tol * max(sigma_max, 1)`.
pub fn rank_r(a: ArrayView2<f64>, rank_tol: f64) -> usize {
    let s = singular_values_r(a);
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let thr = rank_tol * smax.max(1.0);
    s.iter().filter(|&&x| x > thr).count()
}

/// Orthonormal basis (columns) of the column space of `a`.
pub fn orth(a: ArrayView2<f64>, rank_tol: f64) -> RMat {
    let (m, k) = a.dim();
    if k == 0 || m == 0 {
        return RMat::zeros((m, 0));
    }
    let (u, s, _) = a.to_owned().svd(true, false).expect("svd");
    let u = u.unwrap();
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let thr = rank_tol * smax.max(1.0);
    let r = s.iter().filter(|&&x| x > thr).count();
    u.slice(s![.., ..r]).to_owned()
}

/// Orthonormal basis (columns) of the kernel of `a`.
pub fn null_space(a: ArrayView2<f64>, rank_tol: f64) -> RMat {
    let (m, k) = a.dim();
    if k == 0 {
        return RMat::zeros((0, 0));
    }
    if m == 0 {
        return RMat::eye(k);
    }
    let (_, s, vt) = a.to_owned().svd(false, true).expect("svd");
    let vt = vt.unwrap();
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let thr = rank_tol * smax.max(1.0);
    let r = s.iter().filter(|&&x| x > thr).count();
    vt.slice(s![r.., ..]).t().to_owned()
}

/// Cosines of the principal angles between two orthonormal column sets.
pub fn principal_cosines(qa: ArrayView2<f64>, qb: ArrayView2<f64>) -> RVec {
    if qa.ncols() == 0 || qb.ncols() == 0 {
        return RVec::zeros(0);
    }
    singular_values_r(qa.t().dot(&qb).view()).mapv(|x| x.min(1.0))
}

pub fn hstack_r(a: ArrayView2<f64>, b: ArrayView2<f64>) -> RMat {
    concatenate(Axis(1), &[a, b]).expect("hstack")
}

pub fn hstack_c(a: ArrayView2<C64>, b: ArrayView2<C64>) -> CMat {
    concatenate(Axis(1), &[a, b]).expect("hstack")
}

pub fn hermitian_part(a: ArrayView2<C64>) -> CMat {
    (&a + &adjoint(a)).mapv(|z| z * 0.5)
}

/// Eigen-decomposition of a Hermitian matrix, ascending eigenvalues.
///
/// Always goes through `zheevd` with an explicit column-major copy: the generic
/// wrapper returns conjugated eigenvectors for row-major complex input.
pub fn eigh(a: ArrayView2<C64>) -> (RVec, CMat) {
    eigh_dc(hermitian_part(a).view()).expect("zheevd")
}

/// Divide-and-conquer Hermitian eigensolver (`zheevd`), reading the lower triangle.
pub fn eigh_dc(a: ArrayView2<C64>) -> Result<(RVec, CMat)> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return Ok((RVec::zeros(0), CMat::zeros((0, 0))));
    }
    // Column-major copy.
    let mut buf: Vec<C64> = vec![C64::new(0.0, 0.0); n * n];
    for ((i, j), z) in a.indexed_iter() {
        buf[i + j * n] = *z;
    }
    let ni = n as i32;
    let mut w = vec![0.0f64; n];
    let mut info = 0i32;
    let mut wq = [C64::new(0.0, 0.0)];
    let mut rwq = [0.0f64];
    let mut iwq = [0i32];
    let (jobz, uplo) = (b'V' as std::os::raw::c_char, b'L' as std::os::raw::c_char);
    unsafe {
        lapack_sys::zheevd_(
            &jobz, &uplo, &ni, buf.as_mut_ptr() as *mut _, &ni, w.as_mut_ptr(),
            wq.as_mut_ptr() as *mut _, &-1, rwq.as_mut_ptr(), &-1, iwq.as_mut_ptr(), &-1, &mut info,
        );
    }
    if info != 0 {
        return Err(ModlocError::Numerical(format!("zheevd workspace query failed: {info}")));
    }
    let lwork = wq[0].re as i32;
    let lrwork = rwq[0] as i32;
    let liwork = iwq[0];
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        lapack_sys::zheevd_(
            &jobz, &uplo, &ni, buf.as_mut_ptr() as *mut _, &ni, w.as_mut_ptr(),
            work.as_mut_ptr() as *mut _, &lwork, rwork.as_mut_ptr(), &lrwork, iwork.as_mut_ptr(), &liwork, &mut info,
        );
    }
    if info != 0 {
        return Err(ModlocError::Numerical(format!("zheevd failed: {info}")));
    }
    let v = CMat::from_shape_fn((n, n), |(i, j)| buf[i + j * n]);
    Ok((RVec::from(w), v))
}

pub fn eigh_r(a: ArrayView2<f64>) -> (RVec, RMat) {
    let sym = (&a + &a.t()) * 0.5;
    sym.eigh(UPLO::Lower).expect("eigh")
}

/// `V f(L) V^*` for eigen-data `(L, V)`.
pub fn spectral_apply<F: Fn(f64) -> C64>(vals: &RVec, vecs: &CMat, f: F) -> CMat {
    let mut scaled = vecs.clone();
    for (j, lam) in vals.iter().enumerate() {
        let fj = f(*lam);
        scaled.column_mut(j).mapv_inplace(|z| z * fj);
    }
    scaled.dot(&adjoint(vecs.view()))
}

/// `f(A)` for Hermitian `A`.
pub fn herm_fn<F: Fn(f64) -> C64>(a: ArrayView2<C64>, f: F) -> CMat {
    let (vals, vecs) = eigh(a);
    spectral_apply(&vals, &vecs, f)
}

pub fn inverse_c(a: ArrayView2<C64>) -> Result<CMat> {
    a.to_owned()
        .inv()
        .map_err(|e| ModlocError::Numerical(format!("inverse failed: {e}")))
}

/// Real orthonormal basis of a real-linear span given by complex columns.
pub fn orth_complex_cols(b: ArrayView2<C64>, rank_tol: f64) -> CMat {
    complexify_cols(orth(realify_cols(b).view(), rank_tol).view())
}

/// Largest eigenvalue of a symmetric positive operator given as a matvec.
///
/// Lanczos with full reorthogonalisation; deterministic start vector.
pub fn lanczos_max<F>(dim: usize, apply: F, max_iter: usize, tol: f64) -> (f64, RVec)
where
    F: Fn(&RVec) -> RVec,
{
    if dim == 0 {
        return (0.0, RVec::zeros(0));
    }
    let k_max = max_iter.min(dim);
    let mut basis: Vec<RVec> = Vec::with_capacity(k_max);
    let mut alpha = Vec::with_capacity(k_max);
    let mut beta: Vec<f64> = Vec::with_capacity(k_max);
    let mut q = RVec::from_shape_fn(dim, |i| 1.0 + ((i * 7919 + 13) % 97) as f64 / 97.0);
    q /= q.dot(&q).sqrt();
    let mut best = (0.0, q.clone());
    let mut prev_theta = f64::NAN;
    for k in 0..k_max {
        let mut w = apply(&q);
        let a = q.dot(&w);
        alpha.push(a);
        basis.push(q.clone());
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dot(&w);
                w.scaled_add(-proj, b);
            }
        }
        let bnorm = w.dot(&w).sqrt();
        let (theta, y) = tridiag_max(&alpha, &beta);
        if k % 5 == 4 || bnorm < 1e-12 || k + 1 == k_max {
            let mut v = RVec::zeros(dim);
            for (c, b) in y.iter().zip(&basis) {
                v.scaled_add(*c, b);
            }
            best = (theta, v);
            let resid = bnorm * y[y.len() - 1].abs();
            if resid < tol || (theta - prev_theta).abs() < tol * 1e-2 || bnorm < 1e-12 {
                break;
            }
            prev_theta = theta;
        }
        beta.push(bnorm);
        q = w / bnorm;
    }
    best
}

fn tridiag_max(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let mut t = RMat::zeros((k, k));
    for i in 0..k {
        t[[i, i]] = alpha[i];
        if i + 1 < k {
            t[[i, i + 1]] = beta[i];
            t[[i + 1, i]] = beta[i];
        }
    }
    let (vals, vecs) = eigh_r(t.view());
    let j = k - 1;
    (vals[j], vecs.column(j).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn realify_round_trip() {
        let v = array![c(1.0, 2.0), c(-0.5, 0.25)];
        assert_eq!(complexify_vec(realify_vec(v.view()).view()), v);
    }

    #[test]
    fn antilinear_realification_matches_action() {
        let a = array![[c(1.0, 2.0), c(0.0, -1.0)], [c(0.5, 0.0), c(2.0, 1.0)]];
        let v = array![c(0.3, -0.7), c(1.1, 0.4)];
        let direct = a.dot(&v.mapv(|z| z.conj()));
        let via = complexify_vec(realify_antilinear(a.view()).dot(&realify_vec(v.view())).view());
        for (x, y) in direct.iter().zip(via.iter()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn null_space_of_rank_one() {
        let a = array![[1.0, 1.0, 0.0]];
        let ns = null_space(a.view(), 1e-10);
        assert_eq!(ns.ncols(), 2);
        assert!(frob_r(a.dot(&ns).view()) < 1e-14);
    }

    #[test]
    fn lanczos_finds_top_eigenvalue() {
        let d = RVec::from_shape_fn(50, |i| i as f64 / 49.0);
        let (lam, _) = lanczos_max(50, |x| &d * x, 60, 1e-12);
        assert!((lam - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kron_matches_definition() {
        let a = array![[c(1.0, 0.0), c(2.0, 0.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
        let b = array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        let k = kron(a.view(), b.view());
        assert_eq!(k[[0, 1]], c(1.0, 0.0));
        assert_eq!(k[[1, 2]], c(2.0, 0.0));
        assert_eq!(k[[3, 0]], c(0.0, 1.0));
    }
}
