use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use ndarray::Array3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{CheckResult, Experiment, ExperimentConfig, Table};
use crate::error::Result;
use crate::fock::{self, commutant, AlgebraTolerance, FermiFock, MatrixStarAlgebra};
use crate::huygens::{self, GaussianSource, SpacetimeGrid23};
use crate::linalg::*;
use crate::net::{self, BwNet, CutoffPolicy, DoubleCone23, LocalizationReport, ScoreConfig, Wedge23};
use crate::subspace::*;
use crate::wigner::cone::gaussian_probe;
use crate::wigner::e2::{alpha, composed_translation_generator, E2Element};
use crate::wigner::lorentz::*;
use crate::wigner::{vk_dilation_rescale, AngularInterp, vk_translation_spectrum, CircleRepVk, ConeGrid23, MasslessRep23};

/// A check name together with the experiment that produces it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub experiment: Experiment,
    pub check: &'static str,
    pub description: &'static str,
}

const CATALOG: &[(Experiment, &str, &str)] = &[
    (Experiment::LatticeVerify, "s-fixes-h", "Tomita operator S fixes every vector of H"),
    (Experiment::LatticeVerify, "s-complement-adjoint", "S of the symplectic complement equals the adjoint of S"),
    (Experiment::LatticeVerify, "j-delta-j", "J Delta J = Delta^-1"),
    (Experiment::LatticeVerify, "j-maps-to-complement", "J H = H'"),
    (Experiment::LatticeVerify, "delta-it-invariance", "Delta^{it} H = H"),
    (Experiment::LatticeVerify, "round-trip", "H recovered from its modular data"),
    (Experiment::LatticeVerify, "duality", "(cap H_a)' = closed sum of the H_a'"),
    (Experiment::LatticeVerify, "tensor-complement", "(H (x) K)' = H' (x) K'"),
    (Experiment::LatticeVerify, "tensor-fixed-points", "H (x) K is the fixed-point space of S_H (x) S_K"),
    (Experiment::LatticeVerify, "tensor-meet", "(cap H_a) (x) (cap K_b) = cap (H_a (x) K_b) for cyclic intersections"),
    (Experiment::LatticeVerify, "kms", "KMS surrogate <eta, Delta xi> = <xi, eta> on H"),
    (Experiment::LittleGroup, "boost-conjugation", "alpha(t) tau(z) alpha(-t) = tau(e^t z)"),
    (Experiment::LittleGroup, "translation-spectrum", "translation generator spectrum has endpoints +-kappa on aligned grids"),
    (Experiment::LittleGroup, "kappa-rescaling-generator", "V_kappa composed with the dilation automorphism is V_{e^-t kappa}"),
    (Experiment::LittleGroup, "kappa-rescaling-cocycle", "kappa c(A, e^t p) = e^-t kappa c(A, p) on the cone grid"),
    (Experiment::LittleGroup, "cocycle-identity", "c(AB, p) = c(A, p) + c(B, A^-1 p)"),
    (Experiment::Induce, "group-law-refinement", "group-law residual shrinks >= 2x under grid refinement"),
    (Experiment::Induce, "unitarity-refinement", "unitarity residual shrinks >= 2x under grid refinement"),
    (Experiment::Induce, "exact-elements", "grid-aligned rotations and translations are exact representations"),
    (Experiment::Localize, "score-strictly-decreasing", "localization score strictly decreases with kappa"),
    (Experiment::Localize, "score-zero-threshold", "score at kappa = 0 is at least 0.9"),
    (Experiment::Localize, "score-ratio", "score(kappa r = 25) < 0.5 score(0)"),
    (Experiment::Localize, "net-covariance", "U(g) H(W) = H(gW) with H(gW) from its own modular data"),
    (Experiment::Localize, "net-twisted-duality", "H(W') = Z H(W)' inside the spectral window"),
    (Experiment::Localize, "net-delta-invariance", "Delta_W^{it} H(W) = H(W)"),
    (Experiment::Localize, "net-borchers", "boost-translation scaling relation along the wedge edge"),
    (Experiment::Localize, "net-borchers-refinement", "Borchers residual at least halves under grid refinement"),
    (Experiment::Huygens, "hilbert-square", "h^2 = -1 on zero-mean fields"),
    (Experiment::Huygens, "kernel-identity", "regulated Delta'_0 = h(Delta_0)"),
    (Experiment::Huygens, "kernel-identity-refinement", "kernel deviation decreases under refinement"),
    (Experiment::Huygens, "leakage-spacelike-refinement", "spacelike leakage of Im f shrinks >= 2x"),
    (Experiment::Huygens, "leakage-timelike-refinement", "timelike leakage of h(Im f) shrinks >= 2x"),
    (Experiment::FockVerify, "car", "canonical anticommutation relations"),
    (Experiment::FockVerify, "bicommutant", "R'' = R for field algebras"),
    (Experiment::FockVerify, "secquant-a-minus", "S, J, Delta of the vacuum are twisted second quantizations"),
    (Experiment::FockVerify, "secquant-b", "R(H)' = Z R(iH') Z*"),
    (Experiment::FockVerify, "secquant-c", "R(sum H_a) = join of R(H_a)"),
    (Experiment::FockVerify, "secquant-d", "R(cap H_a) = cap R(H_a)"),
    (Experiment::FockVerify, "trivial-subspace", "R({0}) = C 1"),
    (Experiment::FockVerify, "trivial-meet", "trivial meet of one-particle spaces gives the trivial algebra"),
    (Experiment::Counterexample, "bw-gap", "Delta^{it} differs from U_V(boost) by at least 0.1"),
    (Experiment::Counterexample, "bw-identity", "Delta^{it} = U_I(boost)"),
    (Experiment::Counterexample, "modular-tensor", "Delta of K (x) H is 1 (x) Delta_H"),
    (Experiment::Counterexample, "covariance", "both U_I and U_V leave K (x) H invariant"),
    (Experiment::Counterexample, "cyclicity-equivalence", "K (x) X cyclic iff X cyclic"),
    (Experiment::Counterexample, "double-cone-cyclicity", "K (x) H(O) = cap K (x) H(W_a) and is cyclic when H(O) is"),
];

/// Every check each experiment may record.
pub fn check_catalog() -> Vec<CatalogEntry> {
    CATALOG.iter().map(|&(experiment, check, description)| CatalogEntry { experiment, check, description }).collect()
}

pub(super) fn dispatch(cfg: &ExperimentConfig) -> Result<(Vec<CheckResult>, Vec<Table>)> {
    match cfg.experiment {
        Experiment::LatticeVerify => lattice_verify(cfg),
        Experiment::LittleGroup => little_group(cfg),
        Experiment::Induce => induce(cfg),
        Experiment::Localize => localize(cfg),
        Experiment::Huygens => huygens_suite(cfg),
        Experiment::FockVerify => fock_verify(cfg),
        Experiment::Counterexample => counterexample(cfg),
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let t0 = Instant::now();
    let v = f()?;
    Ok((v, t0.elapsed().as_secs_f64()))
}

fn with_time(mut c: CheckResult, secs: f64) -> CheckResult {
    c.runtime_s = secs;
    c
}

/// Same real span, different basis: real invertible recombination of the columns.
fn rebased<R: Rng>(h: &RealSubspace, rng: &mut R) -> RealSubspace {
    let d = h.dim();
    let r = CMat::from_shape_fn((d, d), |(i, j)| c(rng.gen_range(-1.0..1.0) + if i == j { 2.0 } else { 0.0 }, 0.0));
    RealSubspace::span(h.ambient_dim(), &h.basis().dot(&r))
}

fn random_vec<R: Rng>(rng: &mut R, n: usize) -> CVec {
    CVec::from_shape_fn(n, |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

// ---------------------------------------------------------------------------

const LATTICE_TOL: f64 = 1e-8;

fn lattice_one<R: Rng>(n: usize, rng: &mut R) -> Result<[f64; 11]> {
    let h = RealSubspace::random_standard(n, rng);
    let s = tomita_operator(&h)?;
    let m = tomita_from_subspace(&h)?;
    let hc = symplectic_complement(&h);
    let mut v = [0.0; 11];

    let b = h.basis();
    v[0] = frob_c((&s.apply_cols(b) - b).view());
    let sc = tomita_operator(&hc)?;
    v[1] = opnorm_c((&sc.matrix - &s.adjoint().matrix).view()) / opnorm_c(s.matrix.view()).max(1.0);
    let jdj = m.j.matrix.dot(&conj_mat(m.delta.view())).dot(&conj_mat(m.j.matrix.view()));
    let dinv = m.delta_pow(-1.0);
    v[2] = opnorm_c((&jdj - &dinv).view()) / opnorm_c(dinv.view()).max(1.0);
    v[3] = h.map_antilinear(&m.j).distance(&hc)?;
    for t in [-0.7, 0.25, 1.3] {
        v[4] = v[4].max(h.map_linear(&m.delta_it(t)).distance(&h)?);
    }
    v[5] = subspace_from_tomita(&m)?.distance(&h)?;

    let mut fam = vec![h.clone()];
    for _ in 0..2 {
        let d = rng.gen_range(1..=2 * n);
        fam.push(RealSubspace::random(n, d, rng));
    }
    v[6] = verify_duality(&fam)?;

    let k = RealSubspace::random_standard(if n <= 3 { 2 } else { 1 }, rng);
    let rep = tensor_report(&h, &k)?;
    v[7] = rep.complement_deviation;
    v[8] = if rep.dim == rep.expected_dim { rep.fixed_point_deviation } else { 1.0 };
    // Standard members whose intersection is cyclic coincide in finite dimension, so the
    // families are re-based copies of one subspace.
    let ha: Vec<_> = (0..3).map(|_| rebased(&h, rng)).collect();
    let kb: Vec<_> = (0..2).map(|_| rebased(&k, rng)).collect();
    v[9] = tensor_meet_deviation(&ha, &kb)?;
    v[10] = kms_surrogate_check(&h, &[0.3, -1.1])?;
    Ok(v)
}

fn lattice_verify(cfg: &ExperimentConfig) -> Result<(Vec<CheckResult>, Vec<Table>)> {
    let count = cfg.families.unwrap_or(100);
    let tol = cfg.tol.unwrap_or(LATTICE_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let names: Vec<&str> = CATALOG.iter().filter(|e| e.0 == Experiment::LatticeVerify).map(|e| e.1).collect();
    let mut worst = [0.0f64; 11];
    let mut secs = [0.0f64; 11];
    let mut csv = format!("index,n,{}\n", names.join(","));
    for idx in 0..count {
        let n = cfg.dim.unwrap_or(2 + idx % 5);
        let (row, dt) = timed(|| lattice_one(n, &mut rng))?;
        write!(csv, "{idx},{n}").unwrap();
        for (k, x) in row.iter().enumerate() {
            worst[k] = worst[k].max(*x);
            secs[k] += dt / 11.0;
            write!(csv, ",{x:e}").unwrap();
        }
        csv.push('\n');
    }
    let checks = names.iter().enumerate().map(|(k, nm)| with_time(CheckResult::below(nm, worst[k], tol), secs[k])).collect();
    Ok((checks, vec![Table { file: "lattice_verify.csv".into(), csv }]))
}

// ---------------------------------------------------------------------------

fn little_group(cfg: &ExperimentConfig) -> Result<(Vec<CheckResult>, Vec<Table>)> {
    let exact = cfg.tol.unwrap_or(1e-12);
    let kappas = cfg.kappa.clone().unwrap_or_else(|| vec![1.0, 2.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    let t0 = Instant::now();
    let mut dev: f64 = 0.0;
    for _ in 0..50 {
        let t = rng.gen_range(-2.0..2.0);
        let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let lhs = alpha(t) * E2Element::tau(z).matrix() * alpha(-t);
        let rhs = E2Element::tau(z * t.exp()).matrix();
        dev = dev.max((lhs - rhs).iter().map(|x| x.norm()).fold(0.0, f64::max) / (1.0 + z.norm() * t.exp()));
    }
    checks.push(with_time(CheckResult::below("boost-conjugation", dev, exact), t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let mut csv = String::from("kappa,n,direction_index,min,max\n");
    let mut dev: f64 = 0.0;
    for &kappa in &kappas {
        for n in [8usize, 12, 16, 64] {
            let rep = CircleRepVk::new(kappa, n, 0.0);
            for j in [0, 1, n / 4] {
                // Aligned: the direction is itself a grid angle, and n is even.
                let spec = vk_translation_spectrum(&rep, C64::from_polar(1.0, rep.theta(j)));
                let (lo, hi) = (spec[0], spec[n - 1]);
                dev = dev.max((hi - kappa).abs()).max((lo + kappa).abs());
                writeln!(csv, "{kappa},{n},{j},{lo:e},{hi:e}").unwrap();
            }
        }
    }
    checks.push(with_time(CheckResult::below("translation-spectrum", dev, exact), t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let mut dev: f64 = 0.0;
    for &kappa in &kappas {
        let rep = CircleRepVk::new(kappa, 16, 0.0);
        for t in [-1.5, -0.2, 0.7, 2.0] {
            let resc = vk_dilation_rescale(&rep, t);
            for d in [c(1.0, 0.0), c(0.3, -0.8), c(0.0, 1.0)] {
                let a = composed_translation_generator(&rep, t, d);
                let b = resc.translation_generator(d);
                dev = dev.max(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
            }
        }
    }
    checks.push(with_time(CheckResult::below("kappa-rescaling-generator", dev, 1e-9), t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let grid = ConeGrid23::standard(cfg.grid.unwrap_or(32));
    let ops = [boost1(0.4), boost2(-0.3), parabolic(0.7), rotation(0.9) * boost1(-0.25)];
    let mut dev: f64 = 0.0;
    for &kappa in &kappas {
        let rep = MasslessRep23::new(grid, kappa);
        for a in &ops {
            for t in [0.5, -0.8, 1.25] {
                let (conj, resc) = rep.dilated_cocycle_tables(a, t)?;
                dev = dev.max(conj.iter().zip(&resc).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
            }
        }
    }
    checks.push(with_time(CheckResult::below("kappa-rescaling-cocycle", dev, 1e-9), t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let mut dev: f64 = 0.0;
    for (a, b) in [(boost1(0.3), boost2(-0.5)), (parabolic(0.6), rotation(1.1)), (rotation(-0.4) * boost2(0.2), boost1(-0.7))] {
        let ab = a * b;
        for k in (0..grid.len()).step_by(7) {
            let p = grid.momentum(k);
            let lhs = little_group_decompose(&ab, &p)?;
            let rhs = little_group_decompose(&a, &p)? + little_group_decompose(&b, &(lorentz_inverse(&a) * p))?;
            dev = dev.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
        }
    }
    checks.push(with_time(CheckResult::below("cocycle-identity", dev, 1e-9), t0.elapsed().as_secs_f64()));
    Ok((checks, vec![Table { file: "little_group.csv".into(), csv }]))
}

// ---------------------------------------------------------------------------

/// Residuals of the interpolated representation on one grid: (group law, unitarity).
pub fn induce_residuals(n: usize, kappa: f64) -> Result<(f64, f64)> {
    let rep = MasslessRep23::new(ConeGrid23::standard(n), kappa);
    let phi = gaussian_probe(&rep.grid, -0.25, 1.0, 0.2, 0.4);
    let g1 = Poincare { a: V3::new(0.2, 0.1, -0.3), lorentz: boost1(0.3), turns: 0 };
    let g2 = Poincare::lorentz(rotation(0.37) * boost2(0.2));
    let law = rep.group_law_residual(&g1, &g2, &phi)?;
    let mut uni: f64 = 0.0;
    for g in [g1, g2, g1.compose(&g2)] {
        uni = uni.max(rep.unitarity_residual(&g, &phi)?);
    }
    Ok((law, uni))
}

fn exact_elements(n: usize, kappa: f64) -> Result<f64> {
    let rep = MasslessRep23::new(ConeGrid23::standard(n), kappa);
    let phi = gaussian_probe(&rep.grid, -0.25, 1.0, 0.2, 0.4);
    let step = 2.0 * PI / rep.grid.nt as f64;
    let gs = [
        Poincare::lorentz(rotation(3.0 * step)),
        Poincare::translation(V3::new(0.4, -0.2, 0.7)),
        Poincare { a: V3::new(-0.1, 0.3, 0.2), lorentz: rotation(-5.0 * step), turns: 0 },
        Poincare { a: V3::zeros(), lorentz: rotation(0.0), turns: 1 },
    ];
    let mut dev: f64 = 0.0;
    for g in &gs {
        dev = dev.max(rep.unitarity_residual(g, &phi)?);
        for h in &gs {
            dev = dev.max(rep.group_law_residual(g, h, &phi)?);
        }
    }
    Ok(dev)
}

fn induce(cfg: &ExperimentConfig) -> Result<(Vec<CheckResult>, Vec<Table>)> {
    let n = cfg.grid.unwrap_or(64);
    let kappas = cfg.kappa.clone().unwrap_or_else(|| vec![0.0, 1.0]);
    let t0 = Instant::now();
    let rows: Vec<(f64, (f64, f64), (f64, f64))> = kappas
        .par_iter()
        .map(|&k| Ok((k, induce_residuals(n, k)?, induce_residuals(2 * n, k)?)))
        .collect::<Result<_>>()?;
    let secs = t0.elapsed().as_secs_f64();
    let mut csv = String::from("kappa,grid,group_law,unitarity\n");
    let (mut law_ratio, mut uni_ratio) = (f64::INFINITY, f64::INFINITY);
    for (k, coarse, fine) in &rows {
        writeln!(csv, "{k},{n},{:e},{:e}", coarse.0, coarse.1).unwrap();
        writeln!(csv, "{k},{},{:e},{:e}", 2 * n, fine.0, fine.1).unwrap();
        law_ratio = law_ratio.min(coarse.0 / fine.0);
        uni_ratio = uni_ratio.min(coarse.1 / fine.1);
    }
    let mut checks = vec![
        with_time(CheckResult::at_least("group-law-refinement", law_ratio, 2.0), secs / 2.0),
        with_time(CheckResult::at_least("unitarity-refinement", uni_ratio, 2.0), secs / 2.0),
    ];
    let t0 = Instant::now();
    let mut dev: f64 = 0.0;
    for &k in &kappas {
        dev = dev.max(exact_elements(n, k)?);
    }
    checks.push(with_time(CheckResult::below("exact-elements", dev, cfg.tol.unwrap_or(1e-12)), t0.elapsed().as_secs_f64()));
    Ok((checks, vec![Table { file: "induce.csv".into(), csv }]))
}

// ---------------------------------------------------------------------------

/// Net used for the localization sweep: doubled (PCT-covariant) for `kappa > 0`.
pub fn localize_net(n: usize, kappa: f64) -> Result<BwNet> {
    let rep = MasslessRep23::new(ConeGrid23::standard(n), kappa);
    let rep = if kappa > 0.0 { rep.doubled() } else { rep };
    BwNet::new(rep, CutoffPolicy { min_kept_fraction: 0.05, ..Default::default() })
}

/// Borchers scaling residual along the standard wedge's edge (`s = 0.2`, `t = 0.5`).
///
/// The boost of rapidity `0.4 pi` needs a wider radial range than the net grid and
/// trigonometric angular interpolation to resolve the probes at `N = 64`.
pub fn borchers_residual(n: usize) -> Result<f64> {
    let rep = MasslessRep23::new(ConeGrid23::new(n, n, -3.0, 3.0), 0.0).with_angular(AngularInterp::Spectral);
    let w = Wedge23::standard();
    let probes = vec![gaussian_probe(&rep.grid, 0.0, PI / 2.0, 0.4, 0.6), gaussian_probe(&rep.grid, -0.3, 1.2, 0.4, 0.6)];
    net::borchers_scaling_check(&rep, &w, w.edge_direction(), &[0.2], &[0.5], &probes)
}

const NET_TOL: f64 = 1e-2;

/// Checks on the scalar net; the build time is charged to `net-covariance`.
fn net_checks(bw: &BwNet, build_secs: f64, n: usize, diag: &mut String) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let step = 2.0 * PI / bw.rep.grid.nt as f64;
    let g = Poincare { a: V3::new(0.0, 0.3, -0.2), lorentz: rotation(4.0 * step), turns: 0 };
    let (cov, t) = timed(|| bw.covariance_check(&g))?;
    out.push(with_time(CheckResult::below("net-covariance", cov, NET_TOL), build_secs + t));
    let (dual, t) = timed(|| bw.twisted_duality_check())?;
    out.push(with_time(CheckResult::below("net-twisted-duality", dual, NET_TOL), t));
    let (inv, t) = timed(|| bw.delta_invariance_check(&[0.1, -0.35]))?;
    out.push(with_time(CheckResult::below("net-delta-invariance", inv, NET_TOL), t));
    let ((coarse, fine), t) = timed(|| Ok((borchers_residual(n)?, borchers_residual(2 * n)?)))?;
    out.push(with_time(CheckResult::below("net-borchers", coarse, NET_TOL), t));
    out.push(with_time(CheckResult::at_least("net-borchers-refinement", coarse / fine, 2.0), t));
    let iso = bw.isotony_defect(V3::new(0.0, 0.5, 0.0))?;
    writeln!(diag, "isotony_defect,{iso:e}").unwrap();
    writeln!(diag, "borchers_fine,{fine:e}").unwrap();
    Ok(out)
}

fn localize(cfg: &ExperimentConfig) -> Result<(Vec<CheckResult>, Vec<Table>)> {
    let n = cfg.grid.unwrap_or(64);
    let m = cfg.wedges.unwrap_or(4);
    let kappas = cfg.kappa.clone().unwrap_or_else(|| vec![0.0, 1.0, 5.0, 25.0]);
    let cone = DoubleCone23::with_family(V3::zeros(), 1.0, m);
    let score_cfg = ScoreConfig::default();
    let mut diag = String::from("quantity,value\n");
    let mut net_results = Vec::new();
    // Outputs are merged in configuration order; nets are built one at a time to bound memory.
    let mut reports: Vec<(LocalizationReport, f64)> = Vec::new();
    for &kappa in &kappas {
        let t0 = Instant::now();
        let bw = localize_net(n, kappa)?;
        let build = t0.elapsed().as_secs_f64();
        let rep = bw.localize(&cone, &score_cfg)?;
        reports.push((rep, t0.elapsed().as_secs_f64()));
        if kappa == 0.0 && net_results.is_empty() {
            net_results = net_checks(&bw, build, n, &mut diag)?;
        }
    }
    let mut csv = format!("{}\n", LocalizationReport::CSV_HEADER);
    let mut angles = String::from("kappa,i,j,angle\n");
    for (r, _) in &reports {
        writeln!(csv, "{}", r.csv_row()).unwrap();
        for (i, j, a) in &r.principal_angles {
            writeln!(angles, "{},{i},{j},{a:e}", r.kappa).unwrap();
        }
        writeln!(diag, "raw_score_{},{:e}", r.kappa, r.raw_score).unwrap();
        writeln!(diag, "kept_fraction_{},{:e}", r.kappa, r.kept_fraction).unwrap();
    }
    let total: f64 = reports.iter().map(|r| r.1).sum();
    let mut checks = Vec::new();
    let mut sorted: Vec<&LocalizationReport> = reports.iter().map(|r| &r.0).collect();
    sorted.sort_by(|a, b| a.kappa.partial_cmp(&b.kappa).unwrap());
    if sorted.len() >= 2 {
        let gap = sorted.windows(2).map(|w| w[0].score - w[1].score).fold(f64::INFINITY, f64::min);
        let mut c = CheckResult::at_least("score-strictly-decreasing", gap, 0.0);
        c.passed = gap > 0.0;
        c.rule = "> 0 (smallest consecutive drop)".into();
        checks.push(with_time(c, total));
    }
    let find = |k: f64| sorted.iter().find(|r| r.kappa == k).map(|r| r.score);
    if let Some(s0) = find(0.0) {
        checks.push(with_time(CheckResult::at_least("score-zero-threshold", s0, 0.9), reports[0].1));
        if let Some(s25) = find(25.0) {
            let mut c = CheckResult::below("score-ratio", s25 / s0, 0.5);
            c.rule = "score(25)/score(0) < 0.5".into();
            checks.push(with_time(c, total));
        }
    }
    checks.extend(net_results);
    Ok((
        checks,
        vec![
            Table { file: "localize.csv".into(), csv },
            Table { file: "localize_angles.csv".into(), csv: angles },
            Table { file: "localize_diagnostics.csv".into(), csv: diag },
        ],
    ))
}

// ---------------------------------------------------------------------------

/// Seeded zero-mean field with no Nyquist component, the domain on which `h^2 = -1`.
fn hilbert_domain_field(rng: &mut ChaCha8Rng, nt: usize, n1: usize, n2: usize) -> Array3<f64> {
    let mut f = Array3::from_shape_fn((nt, n1, n2), |_| rng.gen_range(-1.0..1.0));
    huygens::remove_time_mean(&mut f);
    for a in 0..n1 {
        for b in 0..n2 {
            let sign = |i: usize| if i % 2 == 0 { 1.0 } else { -1.0 };
            let nyq: f64 = (0..nt).map(|i| sign(i) * f[[i, a, b]]).sum::<f64>() / nt as f64;
            for i in 0..nt {
                f[[i, a, b]] -= sign(i) * nyq;
            }
        }
    }
    f
}

/// Support report for the default bump on the `n^3` cube.
pub fn huygens_report(n: usize) -> Result<huygens::SupportReport> {
    let g = SpacetimeGrid23::cube(n)?;
    let f = huygens::synth_commutator_solution(&GaussianSource::centered(0.15), 1.0, &g)?.evaluate(&g)?;
    Ok(huygens::verify_huygens(&f, &g, 2.0, 2.0))
}

/// Regulated kernel deviation on the time line with `2n` samples over `[-n/4, n/4]`.
pub fn kernel_deviation(n: usize) -> Result<f64> {
    let pts = [[0.5, 0.0], [1.0, 0.0], [0.0, 1.0]];
    Ok(huygens::kernel_hilbert_check(&SpacetimeGrid23::new(2 * n, 4, n as f64 / 4.0, 1.0)?, &pts, 0.5, 1.5))
}

fn huygens_suite(cfg: &ExperimentConfig) -> Result<(Vec<CheckResult>, Vec<Table>)> {
    let n = cfg.grid.unwrap_or(64);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    let t0 = Instant::now();
    let mut dev: f64 = 0.0;
    for _ in 0..8 {
        let f = hilbert_domain_field(&mut rng, n, 3, 2);
        let hh = huygens::hilbert_time(&huygens::hilbert_time(&f));
        dev = dev.max((&hh + &f).iter().fold(0.0f64, |m, x| m.max(x.abs())));
    }
    checks.push(with_time(CheckResult::below("hilbert-square", dev, cfg.tol.unwrap_or(1e-10)), t0.elapsed().as_secs_f64()));

    let ((kc, kf), t) = timed(|| Ok((kernel_deviation(n)?, kernel_deviation(2 * n)?)))?;
    checks.push(with_time(CheckResult::below("kernel-identity", kc, 5e-2), t));
    let mut c = CheckResult::below("kernel-identity-refinement", kf / kc, 1.0);
    c.rule = "fine/coarse < 1".into();
    checks.push(with_time(c, t));

    let ((coarse, fine), t) = timed(|| Ok((huygens_report(n)?, huygens_report(2 * n)?)))?;
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else if a > 0.0 { f64::INFINITY } else { 1.0 };
    checks.push(with_time(CheckResult::at_least("leakage-spacelike-refinement", ratio(coarse.leakage_spacelike, fine.leakage_spacelike), 2.0), t));
    checks.push(with_time(CheckResult::at_least("leakage-timelike-refinement", ratio(coarse.leakage_timelike, fine.leakage_timelike), 2.0), t));

    let mut csv = String::from("grid,leakage_spacelike,leakage_timelike,residual_wave,spacelike_points,timelike_points,kernel_deviation\n");
    for (r, k) in [(&coarse, kc), (&fine, kf)] {
        writeln!(
            csv,
            "{},{:e},{:e},{:e},{},{},{:e}",
            r.grid.n_t, r.leakage_spacelike, r.leakage_timelike, r.residual_wave, r.spacelike_points, r.timelike_points, k
        )
        .unwrap();
    }
    Ok((checks, vec![Table { file: "huygens.csv".into(), csv }]))
}

// ---------------------------------------------------------------------------

fn anticomm(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) + b.dot(a)
}

/// `(secquant rows, car, bicommutant, trivial-subspace, trivial-meet)` for one mode count.
type FockRow = (Vec<fock::IdentityDeviation>, f64, f64, f64, f64);

fn fock_one(n: usize, families: usize, seed: u64) -> Result<FockRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fk = FermiFock::new(n);
    let tol = AlgebraTolerance::default();
    let id = ceye(fk.dim());

    let mut car: f64 = 0.0;
    for _ in 0..10 {
        let (x, y) = (random_vec(&mut rng, n), random_vec(&mut rng, n));
        let ca = anticomm(&fk.annihilate(x.view()), &fk.create(y.view())) - id.mapv(|z| z * inner(x.view(), y.view()));
        let aa = anticomm(&fk.annihilate(x.view()), &fk.annihilate(y.view()));
        let ff = anticomm(&fk.field(x.view()), &fk.field(y.view())) - id.mapv(|z| z * 2.0 * inner(x.view(), y.view()).re);
        car = car.max(frob_c(ca.view())).max(frob_c(aa.view())).max(frob_c(ff.view()));
    }

    let h = RealSubspace::random_standard(n, &mut rng);
    let d = rng.gen_range(1..=2 * n);
    let partial = RealSubspace::random(n, d, &mut rng);
    let mut bic: f64 = 0.0;
    for k in [&h, &partial] {
        let a = fk.field_algebra(k, &tol)?;
        bic = bic.max(commutant(&commutant(&a, &tol)?, &tol)?.equality_defect(&a));
    }

    let mut fams = Vec::new();
    for f in 0..families {
        let len = 2 + f % 2;
        if f % 2 == 0 {
            fams.push((0..len).map(|_| RealSubspace::random_standard(n, &mut rng)).collect::<Vec<_>>());
        } else {
            // Members sharing one vector, so the meet is nontrivial.
            let v = random_vec(&mut rng, n);
            fams.push(
                (0..len)
                    .map(|_| {
                        let mut b = CMat::zeros((n, n));
                        b.column_mut(0).assign(&v);
                        for k in 1..n {
                            b.column_mut(k).assign(&random_vec(&mut rng, n));
                        }
                        RealSubspace::span(n, &b)
                    })
                    .collect(),
            );
        }
    }
    let mut rows = fock::verify_secquant(&h, &fams, seed, 6)?;
    rows.extend(fock::verify_secquant(&partial, &[], seed, 0)?);

    let triv = fk.field_algebra(&RealSubspace::zero(n), &tol)?.equality_defect(&MatrixStarAlgebra::scalars(fk.dim()));
    let h2 = RealSubspace::random_standard(n, &mut rng);
    let trivial_meet = if meet(&h, &h2)?.dim() == 0 {
        let m = fk.field_algebra(&h, &tol)?.intersection(&fk.field_algebra(&h2, &tol)?, &tol)?;
        m.equality_defect(&MatrixStarAlgebra::scalars(fk.dim()))
    } else {
        0.0
    };
    Ok((rows, car, bic, triv, trivial_meet))
}

fn fock_verify(cfg: &ExperimentConfig) -> Result<(Vec<CheckResult>, Vec<Table>)> {
    let tol = cfg.tol.unwrap_or(1e-10);
    let ns: Vec<usize> = match cfg.dim {
        Some(n) => vec![n],
        None => (1..=4).collect(),
    };
    let families = cfg.families.unwrap_or(2);
    let t0 = Instant::now();
    let results: Vec<FockRow> = ns
        .par_iter()
        .map(|&n| fock_one(n, families, cfg.seed.wrapping_add(n as u64)))
        .collect::<Result<_>>()?;
    let secs = t0.elapsed().as_secs_f64() / 8.0;
    let mut worst = std::collections::BTreeMap::<&str, f64>::new();
    let mut csv = String::from("n,identity,deviation\n");
    let (mut car, mut bic, mut triv, mut tm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (rows, a, b, cc, d) in &results {
        for r in rows {
            writeln!(csv, "{},{},{:e}", r.n, r.identity, r.deviation).unwrap();
            let key = match r.identity.as_str() {
                s if s.starts_with("a-") => "secquant-a-minus",
                "b" => "secquant-b",
                "c" => "secquant-c",
                _ => "secquant-d",
            };
            let e = worst.entry(key).or_insert(0.0);
            *e = e.max(r.deviation);
        }
        car = car.max(*a);
        bic = bic.max(*b);
        triv = triv.max(*cc);
        tm = tm.max(*d);
    }
    let mut checks = vec![
        with_time(CheckResult::below("car", car, cfg.tol.unwrap_or(1e-12)), secs),
        with_time(CheckResult::below("bicommutant", bic, tol), secs),
    ];
    for key in ["secquant-a-minus", "secquant-b", "secquant-c", "secquant-d"] {
        if let Some(v) = worst.get(key) {
            checks.push(with_time(CheckResult::below(key, *v, tol), secs));
        }
    }
    checks.push(with_time(CheckResult::below("trivial-subspace", triv, tol), secs));
    checks.push(with_time(CheckResult::below("trivial-meet", tm, tol), secs));
    Ok((checks, vec![Table { file: "fock_verify.csv".into(), csv }]))
}

// ---------------------------------------------------------------------------

fn counterexample(cfg: &ExperimentConfig) -> Result<(Vec<CheckResult>, Vec<Table>)> {
    let tol = cfg.tol.unwrap_or(1e-10);
    let n = cfg.dim.unwrap_or(3);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let base = RealSubspace::random_standard(n, &mut rng);
    let ts: Vec<f64> = (1..=20).map(|k| 0.05 * k as f64).collect();
    let t0 = Instant::now();
    let rep = net::counterexample_net(2, net::plane_rotation, &base, &ts)?;
    let secs = t0.elapsed().as_secs_f64();
    let mut checks = vec![
        with_time(CheckResult::at_least("bw-gap", rep.bw_gap, 0.1), secs),
        with_time(CheckResult::below("bw-identity", rep.bw_identity, tol), secs),
        with_time(CheckResult::below("modular-tensor", rep.modular_deviation, tol), secs),
        with_time(CheckResult::below("covariance", rep.covariance_identity.max(rep.covariance_v), tol), secs),
    ];

    let t0 = Instant::now();
    let mut samples = Vec::new();
    for d in 1..=2 * n {
        samples.push(RealSubspace::random(n, d, &mut rng));
    }
    samples.push(RealSubspace::real_axis(n));
    samples.push(RealSubspace::full(n));
    let pairs = net::tensor_cyclicity(2, &samples);
    let agree = pairs.iter().all(|(a, b)| a == b) && pairs.iter().any(|p| p.0) && pairs.iter().any(|p| !p.0);
    checks.push(with_time(CheckResult::flag("cyclicity-equivalence", agree, "cyclic(K (x) X) == cyclic(X) on every sample"), t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let kk = net::real_multiplicity(2);
    let family: Vec<RealSubspace> = (0..3).map(|_| rebased(&base, &mut rng)).collect();
    let ho = meet_all(&family)?;
    let mut dev = tensor_meet_deviation(&[kk.clone()], &family)?;
    if classify(&ho).cyclic && !classify(&tensor_span(&kk, &ho)).cyclic {
        dev = dev.max(1.0);
    }
    checks.push(with_time(CheckResult::below("double-cone-cyclicity", dev, 1e-8), t0.elapsed().as_secs_f64()));

    let mut csv = String::from("t,bw_gap\n");
    for (t, g) in &rep.gap_samples {
        writeln!(csv, "{t},{g:e}").unwrap();
    }
    Ok((checks, vec![Table { file: "counterexample.csv".into(), csv }]))
}
