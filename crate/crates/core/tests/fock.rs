use modloc::fock::*;
use modloc::linalg::*;
use modloc::subspace::{classify, subspace_from_tomita, RealSubspace};
use modloc::ModlocError;
use ndarray::array;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rvec(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    CVec::from_shape_fn(n, |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn rmat(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    CMat::from_shape_fn((n, n), |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn anticomm(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) + b.dot(a)
}

fn block_scalar(fock: &FermiFock, f: impl Fn(usize) -> C64) -> CMat {
    CMat::from_diag(&CVec::from_shape_fn(fock.dim(), |s| f(s.count_ones() as usize)))
}

/// Creation operator built from Pauli factors; mode `n-1` is the leftmost tensor factor.
fn kron_creation(n: usize, j: usize) -> CMat {
    let id = ceye(2);
    let sz = array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
    let sp = array![[c(0.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
    let mut m = ceye(1);
    for mode in (0..n).rev() {
        let f = if mode > j { &id } else if mode == j { &sp } else { &sz };
        m = kron(m.view(), f.view());
    }
    m
}

#[test]
fn creation_matches_pauli_construction() {
    for n in 1..=4 {
        let f = FermiFock::new(n);
        for j in 0..n {
            assert!(frob_c((f.creation(j) - kron_creation(n, j)).view()) < 1e-15);
        }
    }
}

#[test]
fn car_on_seeded_pairs() {
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 + (seed as usize % 3);
        let (x, y) = (rvec(&mut rng, n), rvec(&mut rng, n));
        let f = FermiFock::new(n);
        let expect = ceye(f.dim()).mapv(|z| z * 2.0 * inner(x.view(), y.view()).re);
        assert!(frob_c((anticomm(&f.field(x.view()), &f.field(y.view())) - expect).view()) < 1e-12);
        // {a(x), a*(y)} = <x, y>, {a*(x), a*(y)} = 0.
        let ca = anticomm(&f.annihilate(x.view()), &f.create(y.view()));
        assert!(frob_c((ca - ceye(f.dim()).mapv(|z| z * inner(x.view(), y.view()))).view()) < 1e-12);
        assert!(frob_c(anticomm(&f.create(x.view()), &f.create(y.view())).view()) < 1e-12);
    }
}

#[test]
fn unit_field_squares_to_one_and_orthogonal_fields_anticommute() {
    let f = FermiFock::new(3);
    let x = array![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
    let p = f.field(x.view());
    assert!(frob_c((p.dot(&p) - ceye(8)).view()) < 1e-14);
    let ix = x.mapv(|z| z * c(0.0, 1.0));
    assert!(frob_c(anticomm(&p, &f.field(ix.view())).view()) < 1e-14);
}

#[test]
fn field_is_real_linear_and_self_adjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = FermiFock::new(3);
    let (x, y) = (rvec(&mut rng, 3), rvec(&mut rng, 3));
    let lhs = f.field((x.mapv(|z| z * 2.0) - y.mapv(|z| z * 0.5)).view());
    let rhs = f.field(x.view()).mapv(|z| z * 2.0) - f.field(y.view()).mapv(|z| z * 0.5);
    assert!(frob_c((lhs - &rhs).view()) < 1e-13);
    let p = f.field(x.view());
    assert!(frob_c((&p - &adjoint(p.view())).view()) < 1e-15);
    let pi = f.field(x.mapv(|z| z * c(0.0, 1.0)).view());
    assert!(frob_c((pi - p.mapv(|z| z * c(0.0, 1.0))).view()) > 0.1);
}

#[test]
fn field_on_vacuum_is_one_particle_vector() {
    let x = array![c(0.3, -0.1), c(0.2, 0.5)];
    let v = fermi_field(x.view()).dot(&FermiFock::new(2).vacuum());
    assert!((v[1] - x[0]).norm() < 1e-15 && (v[2] - x[1]).norm() < 1e-15);
    assert!(v[0].norm() + v[3].norm() < 1e-15);
}

#[test]
fn trivial_algebras() {
    let tol = AlgebraTolerance::default();
    let f = FermiFock::new(3);
    let r0 = f.field_algebra(&RealSubspace::zero(3), &tol).unwrap();
    assert_eq!(r0.dim(), 1);
    assert!(r0.equality_defect(&MatrixStarAlgebra::scalars(8)) < 1e-14);
    let c1 = commutant(&generate_algebra(4, &[ceye(4)], &tol).unwrap(), &tol).unwrap();
    assert_eq!(c1.dim(), 16);
}

#[test]
fn full_subspace_gives_full_matrix_algebra() {
    let tol = AlgebraTolerance::default();
    let r = FermiFock::new(2).field_algebra(&RealSubspace::full(2), &tol).unwrap();
    assert_eq!(r.dim(), 16);
    assert!(r.closure_defect() < 1e-12);
}

#[test]
fn bicommutant_is_exact_for_seeded_standard() {
    let tol = AlgebraTolerance::default();
    for seed in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = RealSubspace::random_standard(3, &mut rng);
        let r = FermiFock::new(3).field_algebra(&h, &tol).unwrap();
        assert_eq!(r.dim(), 8);
        assert!(r.closure_defect() < 1e-10);
        let cc = commutant(&commutant(&r, &tol).unwrap(), &tol).unwrap();
        assert_eq!(cc.dim(), r.dim());
        assert!(cc.equality_defect(&r) < 1e-10);
    }
}

#[test]
fn algebra_dimension_guard() {
    let tol = AlgebraTolerance::default();
    assert!(matches!(generate_algebra(512, &[], &tol), Err(ModlocError::DimensionOverflow(256))));
}

#[test]
fn gamma_minus_trivial_cases() {
    let n = 3;
    let f = FermiFock::new(n);
    assert!(frob_c((gamma_minus(&ceye(n)) - ceye(8)).view()) < 1e-15);
    let z = c(0.3, 0.7);
    let g = gamma_minus(&ceye(n).mapv(|x| x * z));
    assert!(frob_c((g - block_scalar(&f, |k| z.powu(k as u32))).view()) < 1e-14);
}

#[test]
fn gamma_minus_implements_one_particle_map_on_creators() {
    // Gamma(T) a*(x) = a*(T x) Gamma(T).
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 3;
    let f = FermiFock::new(n);
    let t = rmat(&mut rng, n);
    let g = gamma_minus(&t);
    let x = rvec(&mut rng, n);
    let lhs = g.dot(&f.create(x.view()));
    let rhs = f.create(t.dot(&x).view()).dot(&g);
    assert!(frob_c((lhs - rhs).view()) < 1e-12);
}

#[test]
fn gamma_minus_functorial_unitary_and_modular() {
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + seed as usize % 4;
        let (s, t) = (rmat(&mut rng, n), rmat(&mut rng, n));
        let d = frob_c((gamma_minus(&s.dot(&t)) - gamma_minus(&s).dot(&gamma_minus(&t))).view());
        assert!(d < 1e-12 * (1.0 + frob_c(gamma_minus(&s.dot(&t)).view())), "{d}");
        let h = hermitian_part(s.view());
        let u = herm_fn(h.view(), |l| C64::from_polar(1.0, l));
        let gu = gamma_minus(&u);
        assert!(frob_c((gu.dot(&adjoint(gu.view())) - ceye(1 << n)).view()) < 1e-12);
        let pos = herm_fn(h.view(), |l| c(l.exp(), 0.0));
        let lhs = herm_fn(gamma_minus(&pos).view(), |l| C64::from_polar(1.0, 0.4 * l.ln()));
        let rhs = gamma_minus(&herm_fn(pos.view(), |l| C64::from_polar(1.0, 0.4 * l.ln())));
        assert!(frob_c((lhs - rhs).view()) < 1e-10);
    }
}

#[test]
fn antilinear_lift_is_lift_then_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = modloc::subspace::AntiLinear::new(rmat(&mut rng, 2));
    let ga = gamma_minus_antilinear(&a);
    let f = FermiFock::new(2);
    let (x, y) = (rvec(&mut rng, 2), rvec(&mut rng, 2));
    // x ^ y = a*(x) a*(y) Omega.
    let wedge = |u: &CVec, v: &CVec| f.create(u.view()).dot(&f.create(v.view())).dot(&f.vacuum());
    let lhs = ga.apply(wedge(&x, &y).view());
    let rhs = wedge(&a.apply(x.view()), &a.apply(y.view()));
    assert!(vec_norm((lhs - rhs).view()) < 1e-13);
}

#[test]
fn twist_conjugation_phases_on_odd_operator() {
    let f = FermiFock::new(2);
    let z = TwistOperator::new(f);
    let x = array![c(0.4, 0.1), c(-0.2, 0.9)];
    let p = f.field(x.view());
    let q = z.conjugate(&p);
    for ((r, s), v) in q.indexed_iter() {
        let phase = match (r.count_ones() % 2, s.count_ones() % 2) {
            (0, 1) => c(0.0, 1.0),
            (1, 0) => c(0.0, -1.0),
            _ => c(1.0, 0.0),
        };
        assert!((v - p[[r, s]] * phase).norm() < 1e-15);
    }
    let zm = z.matrix();
    let via_grading = (ceye(4) + f.grading().mapv(|g| g * c(0.0, 1.0))).mapv(|w| w / c(1.0, 1.0));
    assert!(frob_c((zm.dot(&adjoint(zm.view())) - ceye(4)).view()) < 1e-15);
    assert!(frob_c((zm - via_grading).view()) < 1e-15);
}

#[test]
fn tracial_state_has_trivial_modular_operator() {
    let d = 3;
    let tol = AlgebraTolerance::default();
    let mut mats = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let mut e = CMat::zeros((d, d));
            e[[i, j]] = c(1.0, 0.0);
            mats.push(kron(e.view(), ceye(d).view()));
        }
    }
    let a = MatrixStarAlgebra::from_span(d * d, &mats, &tol);
    let mut omega = CVec::zeros(d * d);
    for i in 0..d {
        omega[i * d + i] = c(1.0 / (d as f64).sqrt(), 0.0);
    }
    let m = vacuum_tomita(&a, omega.view()).unwrap();
    assert!(frob_c((m.delta - ceye(d * d)).view()) < 1e-12);
}

#[test]
fn real_form_has_trivial_modular_operator() {
    let f = FermiFock::new(3);
    let r = f.field_algebra(&RealSubspace::real_axis(3), &AlgebraTolerance::default()).unwrap();
    let m = vacuum_tomita(&r, f.vacuum().view()).unwrap();
    assert!(frob_c((&m.delta - &ceye(8)).view()) < 1e-12);
}

#[test]
fn vacuum_tomita_round_trip_reproduces_self_adjoint_span() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = RealSubspace::random_standard(3, &mut rng);
    let f = FermiFock::new(3);
    let r = f.field_algebra(&h, &AlgebraTolerance::default()).unwrap();
    let m = vacuum_tomita(&r, f.vacuum().view()).unwrap();
    let k = subspace_from_tomita(&m).unwrap();
    let sa = vacuum_subspace(&r, f.vacuum().view());
    assert_eq!(k.dim(), 8);
    assert!(k.distance(&sa).unwrap() < 1e-8);
}

#[test]
fn complex_line_is_not_cyclic() {
    let f = FermiFock::new(2);
    let line = RealSubspace::span(2, &array![[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, 0.0), c(0.0, 0.0)]]);
    let r = f.field_algebra(&line, &AlgebraTolerance::default()).unwrap();
    assert!(matches!(vacuum_tomita(&r, f.vacuum().view()), Err(ModlocError::NotCyclicSeparating)));
}

#[test]
fn secquant_identities_for_real_form() {
    let h = RealSubspace::real_axis(3);
    let fam = vec![vec![RealSubspace::real_axis(3), RealSubspace::full(3)]];
    let rep = verify_secquant(&h, &fam, 0, 8).unwrap();
    assert_eq!(rep.len(), 7);
    for e in &rep {
        assert!(e.deviation < 1e-10, "{e:?}");
    }
}

#[test]
fn generic_pair_has_trivial_meet() {
    let tol = AlgebraTolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let h1 = RealSubspace::random_standard(3, &mut rng);
    let h2 = RealSubspace::random_standard(3, &mut rng);
    let f = FermiFock::new(3);
    let meet = f.field_algebra(&h1, &tol).unwrap().intersection(&f.field_algebra(&h2, &tol).unwrap(), &tol).unwrap();
    assert_eq!(meet.dim(), 1);
    assert!(meet.equality_defect(&MatrixStarAlgebra::scalars(8)) < 1e-10);
    let rep = verify_secquant(&h1, &[vec![h1.clone(), h2]], 21, 4).unwrap();
    assert!(rep.iter().all(|e| e.deviation < 1e-10), "{rep:?}");
}

#[test]
fn shared_vector_survives_the_meet() {
    let tol = AlgebraTolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 3;
    let v = rvec(&mut rng, n);
    let mk = |rng: &mut ChaCha8Rng| {
        let mut b = CMat::zeros((n, n));
        b.column_mut(0).assign(&v);
        for k in 1..n {
            b.column_mut(k).assign(&rvec(rng, n));
        }
        RealSubspace::span(n, &b)
    };
    let (h1, h2) = (mk(&mut rng), mk(&mut rng));
    let f = FermiFock::new(n);
    let meet = f.field_algebra(&h1, &tol).unwrap().intersection(&f.field_algebra(&h2, &tol).unwrap(), &tol).unwrap();
    assert_eq!(meet.dim(), 2);
    let rep = verify_secquant(&h1, &[vec![h1.clone(), h2]], 8, 4).unwrap();
    assert!(rep.iter().all(|e| e.deviation < 1e-10), "{rep:?}");
}

#[test]
fn non_standard_subspace_decomposes_and_satisfies_duality() {
    // H = C e0 + R e1 + {0} on e2 inside C^3.
    let b = array![
        [c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
    ];
    let h = RealSubspace::span(3, &b);
    assert!(!classify(&h).standard);
    let dec = standard_decomposition(&h).unwrap();
    assert_eq!((dec.k_minus.ncols(), dec.k_zero.ncols(), dec.k_one.ncols()), (1, 1, 1));
    assert!(classify(&dec.h_zero).standard);
    let rep = verify_secquant(&h, &[], 0, 0).unwrap();
    assert_eq!(rep.len(), 1);
    assert!(rep[0].identity == "b" && rep[0].deviation < 1e-10, "{rep:?}");
}

#[test]
fn secquant_mode_guard() {
    let h = RealSubspace::real_axis(SECQUANT_MAX_MODES + 1);
    assert!(matches!(verify_secquant(&h, &[], 0, 0), Err(ModlocError::DimensionOverflow(_))));
}

#[test]
fn bose_lift_identities() {
    let fock = BoseFock::new(2, 3);
    assert_eq!(fock.dim(), 10);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (s, t) = (rmat(&mut rng, 2), rmat(&mut rng, 2));
    let st = gamma_plus(&fock, &s.dot(&t));
    let d = frob_c((&st - &gamma_plus(&fock, &s).dot(&gamma_plus(&fock, &t))).view());
    assert!(d < 1e-12 * (1.0 + frob_c(st.view())), "{d}");
    let z = c(0.0, 2.0);
    let g = gamma_plus(&fock, &ceye(2).mapv(|x| x * z));
    for k in 0..fock.dim() {
        assert!((g[[k, k]] - z.powu(fock.particle_number(k) as u32)).norm() < 1e-12);
    }
    let h = hermitian_part(s.view());
    let gu = gamma_plus(&fock, &herm_fn(h.view(), |l| C64::from_polar(1.0, l)));
    assert!(frob_c((gu.dot(&adjoint(gu.view())) - ceye(10)).view()) < 1e-12);
    let pos = herm_fn(h.view(), |l| c(l.exp(), 0.0));
    let lhs = herm_fn(gamma_plus(&fock, &pos).view(), |l| C64::from_polar(1.0, -0.7 * l.ln()));
    let rhs = gamma_plus(&fock, &herm_fn(pos.view(), |l| C64::from_polar(1.0, -0.7 * l.ln())));
    assert!(frob_c((lhs - rhs).view()) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn secquant_identities_hold_for_seeded_standard(seed in 0u64..1_000_000, n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = RealSubspace::random_standard(n, &mut rng);
        let k = RealSubspace::random_standard(n, &mut rng);
        let rep = verify_secquant(&h, &[vec![h.clone(), k]], seed, 4).unwrap();
        for e in rep {
            prop_assert!(e.deviation < 1e-10, "{:?}", e);
        }
    }

    #[test]
    fn car_holds_for_random_vectors(seed in 0u64..1_000_000, n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (rvec(&mut rng, n), rvec(&mut rng, n));
        let f = FermiFock::new(n);
        let a = anticomm(&f.field(x.view()), &f.field(y.view()));
        let e = ceye(f.dim()).mapv(|z| z * 2.0 * inner(x.view(), y.view()).re);
        prop_assert!(opnorm_c((a - e).view()) < 1e-12);
    }

    #[test]
    fn generated_algebras_are_closed(seed in 0u64..1_000_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..3);
        let h = RealSubspace::random(2, d, &mut rng);
        let r = FermiFock::new(2).field_algebra(&h, &AlgebraTolerance::default()).unwrap();
        prop_assert!(r.closure_defect() < 1e-10);
    }
}
