//! Tensor-product net `H_I(W) = K (x) H(W)` and the failure of the modular
//! boost identity when the multiplicity space carries a nontrivial `V`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ModlocError, Result};
use crate::linalg::*;
use crate::subspace::*;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleReport {
    /// `||Delta_{K (x) H} - 1 (x) Delta_H||`.
    pub modular_deviation: f64,
    /// Largest `dist(U(Lambda(s)) H_I, H_I)` for `U_I` and `U_V`.
    pub covariance_identity: f64,
    pub covariance_v: f64,
    /// `max_t ||Delta_I^{it} - U_I(Lambda(-2 pi t))||`.
    pub bw_identity: f64,
    /// `max_t ||Delta_I^{it} - U_V(Lambda(-2 pi t))||` and the per-`t` values.
    pub bw_gap: f64,
    pub gap_samples: Vec<(f64, f64)>,
}

/// Real subspace `R^k` of `C^k`, the fixed points of entrywise conjugation.
pub fn real_multiplicity(k: usize) -> RealSubspace {
    RealSubspace::real_axis(k)
}

/// Abstract base wedge subspace `H` with `U(Lambda_W(s)) = Delta_H^{-is/2pi}`; `v(s)` acts on `C^k`.
pub fn counterexample_net<F>(k: usize, v: F, base: &RealSubspace, ts: &[f64]) -> Result<CounterexampleReport>
where
    F: Fn(f64) -> CMat,
{
    let kk = real_multiplicity(k);
    let m = tomita_from_subspace(base)?;
    let rapidities: Vec<f64> = ts.iter().map(|t| -2.0 * PI * t).collect();
    for &s in &rapidities {
        let dev = kk.map_linear(&v(s)).distance(&kk)?;
        if dev > 1e-10 {
            return Err(ModlocError::KNotInvariant(dev));
        }
    }
    let hi = tensor(&kk, base)?;
    let mi = tomita_from_subspace(&hi)?;
    let id = ceye(k);
    let modular_deviation = opnorm_c((&mi.delta - &kron(id.view(), m.delta.view())).view());
    let base_u = |s: f64| m.delta_it(-s / (2.0 * PI));
    let mut cov_i: f64 = 0.0;
    let mut cov_v: f64 = 0.0;
    let mut bw_i: f64 = 0.0;
    let mut gap: f64 = 0.0;
    let mut gap_samples = Vec::new();
    for (&t, &s) in ts.iter().zip(&rapidities) {
        let ui = kron(id.view(), base_u(s).view());
        let uv = kron(v(s).view(), base_u(s).view());
        cov_i = cov_i.max(hi.map_linear(&ui).distance(&hi)?);
        cov_v = cov_v.max(hi.map_linear(&uv).distance(&hi)?);
        let di = mi.delta_it(t);
        bw_i = bw_i.max(opnorm_c((&di - &ui).view()));
        let g = opnorm_c((&di - &uv).view());
        gap = gap.max(g);
        gap_samples.push((t, g));
    }
    Ok(CounterexampleReport {
        modular_deviation,
        covariance_identity: cov_i,
        covariance_v: cov_v,
        bw_identity: bw_i,
        bw_gap: gap,
        gap_samples,
    })
}

/// Rotation of the real plane by angle `s`, as a unitary on `C^2`.
pub fn plane_rotation(s: f64) -> CMat {
    let (sn, cs) = s.sin_cos();
    ndarray::array![[c(cs, 0.0), c(-sn, 0.0)], [c(sn, 0.0), c(cs, 0.0)]]
}

/// `(cyclic(X), cyclic(K (x) X))` for each sample `X`.
pub fn tensor_cyclicity(k: usize, xs: &[RealSubspace]) -> Vec<(bool, bool)> {
    let kk = real_multiplicity(k);
    xs.iter().map(|x| (classify(x).cyclic, classify(&tensor_span(&kk, x)).cyclic)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_v_has_no_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = RealSubspace::random_standard(3, &mut rng);
        let r = counterexample_net(2, |_| ceye(2), &h, &[0.1, 1.0 / (2.0 * PI)]).unwrap();
        assert!(r.bw_gap < 1e-10 && r.bw_identity < 1e-10);
    }

    #[test]
    fn complex_v_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = RealSubspace::random_standard(3, &mut rng);
        let v = |s: f64| ndarray::array![[C64::from_polar(1.0, s), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(counterexample_net(2, v, &h, &[0.3]), Err(ModlocError::KNotInvariant(_))));
    }
}
