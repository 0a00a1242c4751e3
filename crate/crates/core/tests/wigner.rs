use std::f64::consts::{PI, SQRT_2};

use modloc::linalg::{c, C64};
use modloc::wigner::cone::{gaussian_probe, read_amplitudes, write_amplitudes};
use modloc::wigner::e2::composed_translation_generator;
use modloc::wigner::lorentz::*;
use modloc::wigner::*;
use modloc::ModlocError;
use proptest::prelude::*;

fn eta() -> M3 {
    M3::from_diagonal(&V3::new(1.0, -1.0, -1.0))
}

fn probe_err(grid: &ConeGrid23, a: &[C64], b: &[C64]) -> f64 {
    let d: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    (grid.norm2(&d) / grid.norm2(b)).sqrt()
}

#[test]
fn boost_conjugation_of_translation_is_rescaled_translation() {
    let g = e2_boost_conjugation(0.0, c(0.3, -0.7));
    assert_eq!(g, E2Element::tau(c(0.3, -0.7)));
    let g = e2_boost_conjugation(2f64.ln(), c(1.0, 0.0));
    assert!((g.u - c(1.0, 0.0)).norm() < 1e-12);
    assert!((g.z - c(2.0, 0.0)).norm() < 1e-12);
}

#[test]
fn translation_spectrum_on_eight_point_circle() {
    let rep = CircleRepVk::new(2.0, 8, 0.0);
    let s = vk_translation_spectrum(&rep, c(1.0, 0.0));
    let expected = [-2.0, -SQRT_2, -SQRT_2, 0.0, 0.0, SQRT_2, SQRT_2, 2.0];
    for (a, b) in s.iter().zip(expected) {
        assert!((a - b).abs() < 1e-14, "{s:?}");
    }
    assert_eq!(s[0], -2.0);
    assert_eq!(s[7], 2.0);
    // Rotating the direction by a grid angle permutes the spectrum.
    let r = vk_translation_spectrum(&rep, C64::from_polar(1.0, 3.0 * PI / 4.0));
    for (a, b) in s.iter().zip(&r) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn finer_circle_contains_coarse_spectrum() {
    let coarse = vk_translation_spectrum(&CircleRepVk::new(1.0, 8, 0.0), c(1.0, 0.0));
    let fine = vk_translation_spectrum(&CircleRepVk::new(1.0, 16, 0.0), c(1.0, 0.0));
    for v in &coarse {
        assert!(fine.iter().any(|w| (v - w).abs() < 1e-14));
    }
    let gap = |s: &[f64]| s.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    assert!(gap(&fine) < gap(&coarse));
    assert!(fine.iter().all(|v| v.abs() <= 1.0));
}

#[test]
fn misaligned_grid_misses_the_endpoints() {
    let rep = CircleRepVk::new(1.0, 8, 0.0);
    let s = vk_translation_spectrum(&rep, C64::from_polar(1.0, PI / 8.0));
    assert!(s[7] < 1.0 - 1e-3 && s[0] > -1.0 + 1e-3);
}

#[test]
fn dilation_rescales_kappa() {
    let rep = CircleRepVk::new(2.0, 8, 0.5);
    assert_eq!(vk_dilation_rescale(&rep, 0.0).kappa, 2.0);
    let r = vk_dilation_rescale(&rep, 2f64.ln());
    assert!((r.kappa - 1.0).abs() < 1e-12);
    let direct = composed_translation_generator(&rep, 2f64.ln(), c(1.0, 0.0));
    for (a, b) in direct.iter().zip(r.translation_generator(c(1.0, 0.0))) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn circle_rotation_by_full_turn_carries_statistics_sign() {
    let v: Vec<C64> = (0..6).map(|j| c(j as f64, 1.0)).collect();
    let fermi = CircleRepVk::new(1.0, 6, 0.5).rotate(6, &v);
    let bose = CircleRepVk::new(1.0, 6, 0.0).rotate(6, &v);
    for k in 0..6 {
        assert!((fermi[k] + v[k]).norm() < 1e-14);
        assert!((bose[k] - v[k]).norm() < 1e-14);
    }
}

#[test]
fn section_and_wigner_rotation() {
    assert!((section(&q_ref()) - M3::identity()).abs().max() < 1e-15);
    let p = cone_point(2.5, -1.1);
    assert!((section(&p) * q_ref() - p).abs().max() < 1e-12);
    assert!((section(&p) * section_inverse(&p) - M3::identity()).abs().max() < 1e-12);
    // Pure rotations have trivial Wigner rotation for this section.
    assert!(little_group_decompose(&rotation(0.77), &p).unwrap().abs() < 1e-12);
    let w = wigner_rotation(&boost1(0.4), &p).unwrap();
    assert!((w * q_ref() - q_ref()).abs().max() < 1e-12);
    assert!(lorentz_defect(&w) < 1e-12);
}

#[test]
fn off_cone_momentum_is_rejected() {
    assert!(matches!(wigner_rotation(&boost1(0.1), &V3::new(1.0, 0.5, 0.0)), Err(ModlocError::OffCone(_))));
    assert!(matches!(wigner_rotation(&boost1(0.1), &V3::new(-1.0, 1.0, 0.0)), Err(ModlocError::OffCone(_))));
}

#[test]
fn parabolic_subgroup_stabilizes_reference() {
    for t in [-2.0, 0.3, 5.0] {
        let w = parabolic(t);
        assert!((w * q_ref() - q_ref()).abs().max() < 1e-12);
        assert!(lorentz_defect(&w) < 1e-10);
        assert!((little_group_decompose(&w, &q_ref()).unwrap() - t).abs() < 1e-12);
    }
}

#[test]
fn grid_rotation_is_an_exact_permutation() {
    let grid = ConeGrid23::standard(16);
    let rep = MasslessRep23::new(grid, 0.0);
    let phi = gaussian_probe(&grid, -0.2, 1.0, 0.3, 0.5);
    let out = rep.rep_apply(&Poincare::lorentz(rotation(grid.h_theta())), &phi).unwrap();
    assert!(out.exact);
    assert!((grid.norm2(&out.phi) / grid.norm2(&phi) - 1.0).abs() < 1e-12);
    let shifted = gaussian_probe(&grid, -0.2, 1.0 + grid.h_theta(), 0.3, 0.5);
    assert!(probe_err(&grid, &out.phi, &shifted) < 1e-12);
}

#[test]
fn translations_act_by_phases() {
    let grid = ConeGrid23::standard(12);
    let rep = MasslessRep23::new(grid, 1.0);
    let phi = gaussian_probe(&grid, 0.0, 0.5, 0.4, 0.6);
    let a = V3::new(0.3, -0.2, 0.9);
    let out = rep.rep_apply(&Poincare::translation(a), &phi).unwrap();
    for k in 0..grid.len() {
        let expected = C64::from_polar(1.0, minkowski(&a, &grid.momentum(k))) * phi[k];
        assert!((out.phi[k] - expected).norm() < 1e-14);
    }
}

#[test]
fn center_character_on_full_turn() {
    let grid = ConeGrid23::standard(8);
    let z = C64::from_polar(1.0, 0.7);
    let rep = MasslessRep23::new(grid, 1.0).with_center(z).doubled();
    let phi: Vec<C64> = (0..rep.dim()).map(|k| c(1.0, k as f64 * 0.01)).collect();
    let g = Poincare { turns: 1, ..Poincare::identity() };
    let out = rep.rep_apply(&g, &phi).unwrap().phi;
    let n = grid.len();
    assert!((out[0] - z * phi[0]).norm() < 1e-14);
    assert!((out[n] - z.conj() * phi[n]).norm() < 1e-14);
}

#[test]
fn dilation_is_exact_on_grid_steps() {
    let grid = ConeGrid23::standard(24);
    let rep = MasslessRep23::new(grid, 0.0);
    let phi = gaussian_probe(&grid, -0.3, 0.0, 0.2, 0.5);
    let t = 2.0 * grid.h_u();
    let out = rep.dilation_apply(t, &phi).unwrap();
    let (i, j) = (10, 3);
    assert!((out[grid.index(i, j)] - phi[grid.index(i + 2, j)] * (t / 2.0).exp()).norm() < 1e-15);
    assert!((grid.norm2(&out) / grid.norm2(&phi) - 1.0).abs() < 1e-6);
    assert!(matches!(rep.dilation_apply(0.5 * grid.h_u(), &phi), Err(ModlocError::IncompatibleStep(_))));
}

#[test]
fn dilated_cocycle_equals_rescaled_cocycle() {
    let rep = MasslessRep23::new(ConeGrid23::standard(16), 3.0);
    for a in [boost1(0.3), boost2(-0.2) * rotation(0.5)] {
        let (conj, resc) = rep.dilated_cocycle_tables(&a, 0.7).unwrap();
        let dev = conj.iter().zip(&resc).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-9, "{dev}");
    }
}

#[test]
fn large_boost_leaves_the_grid() {
    let grid = ConeGrid23::standard(16);
    let rep = MasslessRep23::new(grid, 0.0);
    let phi = gaussian_probe(&grid, 0.8, PI / 2.0, 0.2, 0.4);
    assert!(matches!(rep.rep_apply(&Poincare::lorentz(boost2(2.0)), &phi), Err(ModlocError::OffGrid { .. })));
}

#[test]
fn spectral_angular_interpolation_beats_bilinear() {
    let grid = ConeGrid23::standard(32);
    let phi = gaussian_probe(&grid, -0.2, 1.0, 0.3, 0.5);
    let phi_off = 0.37 * grid.h_theta();
    let exact = gaussian_probe(&grid, -0.2, 1.0 + phi_off, 0.3, 0.5);
    let g = Poincare::lorentz(rotation(phi_off));
    let err = |a| {
        let rep = MasslessRep23::new(grid, 0.0).with_angular(a);
        probe_err(&grid, &rep.rep_apply(&g, &phi).unwrap().phi, &exact)
    };
    let (bil, spec) = (err(AngularInterp::Bilinear), err(AngularInterp::Spectral));
    assert!(spec < 1e-6, "{spec}");
    assert!(spec < 1e-3 * bil, "{spec} vs {bil}");
}

#[test]
fn amplitude_binary_round_trip() {
    let phi: Vec<C64> = (0..7).map(|k| c(k as f64 * 0.1, -1.0 / (k + 1) as f64)).collect();
    let mut buf = Vec::new();
    write_amplitudes(&phi, &mut buf).unwrap();
    assert_eq!(read_amplitudes(buf.as_slice()).unwrap(), phi);
    assert!(read_amplitudes(&buf[..15]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_lorentz_matrices_preserve_the_metric(t1 in -2.0f64..2.0, t2 in -2.0f64..2.0, phi in -PI..PI) {
        let a = rotation(phi) * boost1(t1) * boost2(t2);
        prop_assert!((a.transpose() * eta() * a - eta()).abs().max() < 1e-10);
        prop_assert!(lorentz_defect(&a) < 1e-10);
        prop_assert!((lorentz_inverse(&a) * a - M3::identity()).abs().max() < 1e-10);
    }

    #[test]
    fn boost_conjugation_identity(t in -3.0f64..3.0, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let g = e2_boost_conjugation(t, c(x, y));
        prop_assert!((g.u - c(1.0, 0.0)).norm() < 1e-12);
        prop_assert!((g.z - c(x, y) * t.exp()).norm() < 1e-12 * t.exp().max(1.0) * 3.0);
    }

    #[test]
    fn cocycle_is_additive(t1 in -1.0f64..1.0, t2 in -1.0f64..1.0, f1 in -PI..PI, f2 in -PI..PI, r in 0.2f64..4.0, th in -PI..PI) {
        let a = rotation(f1) * boost1(t1);
        let b = boost2(t2) * rotation(f2);
        let p = cone_point(r, th);
        let lhs = little_group_decompose(&(a * b), &p).unwrap();
        let rhs = little_group_decompose(&a, &p).unwrap() + little_group_decompose(&b, &(lorentz_inverse(&a) * p)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn translation_spectrum_endpoints_exact_on_aligned_grids(kappa in 0.1f64..10.0, k in 1usize..6, j in 0usize..32) {
        let n = 4 * k;
        let rep = CircleRepVk::new(kappa, n, 0.0);
        let s = vk_translation_spectrum(&rep, C64::from_polar(1.0, rep.theta(j % n)));
        prop_assert!((s[n - 1] - kappa).abs() < 1e-12 * kappa);
        prop_assert!((s[0] + kappa).abs() < 1e-12 * kappa);
    }

    #[test]
    fn kappa_rescaling_is_exponential(kappa in 0.1f64..10.0, t in -3.0f64..3.0) {
        let r = vk_dilation_rescale(&CircleRepVk::new(kappa, 8, 0.0), t);
        prop_assert!((r.kappa - (-t).exp() * kappa).abs() < 1e-12 * r.kappa.max(1.0));
    }
}
