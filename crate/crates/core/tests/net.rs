use std::f64::consts::PI;
use std::sync::OnceLock;

use modloc::linalg::*;
use modloc::net::*;
use modloc::subspace::*;
use modloc::wigner::cone::gaussian_probe;
use modloc::wigner::lorentz::*;
use modloc::wigner::{ConeGrid23, MasslessRep23};
use modloc::ModlocError;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = 16;

fn scalar_net() -> &'static BwNet {
    static NET: OnceLock<BwNet> = OnceLock::new();
    NET.get_or_init(|| BwNet::new(MasslessRep23::new(ConeGrid23::standard(N), 0.0), CutoffPolicy::default()).unwrap())
}

fn steps(k: i64) -> f64 {
    2.0 * PI * k as f64 / N as f64
}

#[test]
fn modular_conjugation_invariants() {
    let net = scalar_net();
    let (anti, inv) = net.base.j_defects();
    assert!(anti < 1e-10 && inv < 1e-14);
    let gs = [Poincare::lorentz(rotation(steps(3))), Poincare::translation(V3::new(0.2, 0.1, -0.4))];
    let probes = [gaussian_probe(&net.rep.grid, -0.2, 0.7, 0.3, 0.5)];
    assert!(net.j_covariance_check(&gs, &probes).unwrap() < 1e-12);
}

#[test]
fn net_is_covariant_dual_and_modular_invariant() {
    let net = scalar_net();
    let g = Poincare::translation(V3::new(0.0, 0.3, -0.2)).compose(&Poincare::lorentz(rotation(steps(4))));
    assert!(net.covariance_check(&g).unwrap() < 1e-6);
    assert!(net.twisted_duality_check().unwrap() < 1e-8);
    assert!(net.delta_invariance_check(&[0.1, -0.35]).unwrap() < 1e-8);
}

#[test]
fn wedge_subspace_is_standard_in_its_window() {
    let net = scalar_net();
    let h = &net.h0;
    assert!(h.gram_deviation() < 1e-10);
    let win = cutoff_window(&net.base, net.policy.cutoff);
    assert_eq!(h.dim(), win.ncols());
    // Fixed by S = J Delta^{1/2} on a sampled vector.
    let x = h.basis().column(0).to_owned();
    let xm = CMat::from_shape_fn((x.len(), 1), |(k, _)| x[k]);
    let half = net.base.spectral_cols(|l| c((-PI * l).exp(), 0.0), &xm);
    let sx = net.base.j.apply(&half.column(0).to_vec());
    let d: f64 = sx.iter().zip(x.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    assert!(d < 1e-6, "{d}");
}

#[test]
fn single_wedge_family_scores_one() {
    let net = scalar_net();
    let o = DoubleCone23::with_family(V3::zeros(), 1.0, 1);
    let r = net.localize(&o, &ScoreConfig::default()).unwrap();
    assert!((r.raw_score - 1.0).abs() < 1e-8);
    assert_eq!(r.n_wedges, 1);
}

#[test]
fn larger_family_does_not_raise_the_score() {
    let net = scalar_net();
    let cfg = ScoreConfig::default();
    let two = net.localize(&DoubleCone23::with_family(V3::zeros(), 1.0, 2), &cfg).unwrap();
    let four = net.localize(&DoubleCone23::with_family(V3::zeros(), 1.0, 4), &cfg).unwrap();
    assert!(four.raw_score <= two.raw_score + 1e-9);
    assert!(four.score <= two.score + 1e-9);
    assert_eq!(four.principal_angles.len(), 6);
}

#[test]
fn empty_family_is_rejected() {
    let o = DoubleCone23 { center: V3::zeros(), radius: 1.0, wedges: vec![], angles: vec![] };
    assert!(matches!(scalar_net().localize(&o, &ScoreConfig::default()), Err(ModlocError::EmptyFamily)));
}

#[test]
fn wedge_family_contains_the_double_cone() {
    for m in [3, 4, 8] {
        assert!(DoubleCone23::with_family(V3::new(0.1, 0.0, 0.2), 1.0, m).family_valid());
    }
    let mut o = DoubleCone23::with_family(V3::zeros(), 1.0, 4);
    o.radius = 1.5;
    assert!(!o.family_valid());
}

#[test]
fn massive_spin_without_doubling_has_no_pct() {
    let rep = MasslessRep23::new(ConeGrid23::standard(8), 1.0);
    assert!(matches!(BwNet::new(rep, CutoffPolicy::default()), Err(ModlocError::NoPct)));
    assert!(matches!(modular_data_bw(&rep, &Wedge23::standard()), Err(ModlocError::NoPct)));
}

#[test]
fn doubled_rep_has_valid_conjugation() {
    let rep = MasslessRep23::new(ConeGrid23::standard(8), 2.0).doubled();
    let m = modular_data_bw(&rep, &Wedge23::standard()).unwrap();
    let (anti, inv) = m.j_defects();
    assert!(anti < 1e-10 && inv < 1e-14);
}

#[test]
fn aggressive_cutoff_is_rejected() {
    let rep = MasslessRep23::new(ConeGrid23::standard(8), 0.0);
    // Zero modes of the generator always survive, so the guard needs a high floor to trip.
    let pol = CutoffPolicy { cutoff: 1.0, min_kept_fraction: 0.5, ..CutoffPolicy::default() };
    assert!(matches!(BwNet::new(rep, pol), Err(ModlocError::CutoffTooAggressive { .. })));
}

#[test]
fn borchers_trivial_parameters_give_zero() {
    let rep = MasslessRep23::new(ConeGrid23::standard(N), 0.0);
    let w = Wedge23::standard();
    let x = w.edge_direction();
    let probes = [gaussian_probe(&rep.grid, -0.3, PI / 2.0, 0.3, 0.5)];
    assert!(borchers_scaling_check(&rep, &w, x, &[0.0], &[0.5], &probes).unwrap() < 1e-12);
    assert!(borchers_scaling_check(&rep, &w, x, &[0.2], &[0.0], &probes).unwrap() < 1e-12);
    let bad = V3::new(1.0, 0.0, 1.0);
    assert!(matches!(borchers_scaling_check(&rep, &w, bad, &[0.2], &[0.5], &probes), Err(ModlocError::NotEdgeDirection)));
}

#[test]
fn boost_generator_matches_finite_boosts_under_refinement() {
    let res = |n| {
        let rep = MasslessRep23::new(ConeGrid23::standard(n), 0.0);
        let phi = gaussian_probe(&rep.grid, -0.25, 1.0, 0.25, 0.5);
        generator_residual(&rep, &Wedge23::standard(), 0.1, &phi).unwrap()
    };
    let (coarse, fine) = (res(16), res(32));
    assert!(fine < coarse, "{coarse} -> {fine}");
}

#[test]
fn trivial_multiplicity_action_has_no_gap() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = RealSubspace::random_standard(3, &mut rng);
    let ts = [0.05, 0.3, 1.0];
    let r = counterexample_net(2, |_| ceye(2), &h, &ts).unwrap();
    assert!(r.bw_gap < 1e-10 && r.bw_identity < 1e-10 && r.modular_deviation < 1e-10);
    let r = counterexample_net(2, plane_rotation, &h, &ts).unwrap();
    assert!(r.bw_identity < 1e-10);
    assert!(r.covariance_v < 1e-10);
    assert!(r.bw_gap > 0.5);
}

#[test]
fn non_real_multiplicity_action_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = RealSubspace::random_standard(2, &mut rng);
    let v = |s: f64| CMat::from_diag(&CVec::from(vec![C64::from_polar(1.0, s), c(1.0, 0.0)]));
    assert!(matches!(counterexample_net(2, v, &h, &[0.2]), Err(ModlocError::KNotInvariant(_))));
}

#[test]
fn tensor_with_real_multiplicity_preserves_cyclicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let xs: Vec<_> = (0..=4).map(|d| RealSubspace::random(2, d, &mut rng)).collect();
    for (x, tx) in tensor_cyclicity(2, &xs) {
        assert_eq!(x, tx);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn score_lies_in_unit_interval_and_drops_with_more_members(seed in 0u64..10_000, n in 2usize..5, m in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hs: Vec<_> = (0..=m).map(|_| RealSubspace::random(n, n, &mut rng)).collect();
        let cfg = ScoreConfig::default();
        let (s_small, _) = mean_projection_max(&hs[..m], None, &cfg).unwrap();
        let (s_big, _) = mean_projection_max(&hs, None, &cfg).unwrap();
        prop_assert!((0.0..=1.0).contains(&s_small));
        // Adding a member can only pull the average towards it by 1/(m+1).
        prop_assert!(s_big <= s_small * m as f64 / (m + 1) as f64 + 1.0 / (m + 1) as f64 + 1e-8);
    }
}
