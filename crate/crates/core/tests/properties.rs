//! Bulk invariant suites at their full sample counts, plus proptest checks
//! of the structural properties.

use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use rand::Rng;

use bellcert_core::bounds::{epsilon_rho_raw, grad_epsilon_rho, iota_sup, Branch, ReducedPoint};
use bellcert_core::certifier::{certify, Aabb, CertProblem, CertSettings, CertStatus, HyperBox};
use bellcert_core::chsh::{build_state, chsh_score, total_score, StateFamilyParams};
use bellcert_core::linalg::{CMat2, Mat3, Vec3};
use bellcert_core::qubit::{
    affine_from_kraus, affine_from_params, apply_affine, extracted_block_fidelity,
    kraus_from_params, product_singlet_fidelity, TwoQubitOperator,
};
use bellcert_core::sample::{random_params, rng_from_seed};

#[test]
fn completeness_ten_thousand_random_channels() {
    let mut rng = rng_from_seed(101);
    for _ in 0..10_000 {
        let p = random_params::<f64, _>(&mut rng);
        let k = kraus_from_params(&p).unwrap();
        assert!(k.completeness_defect() < 1e-12);
    }
}

#[test]
fn representation_consistency_ten_thousand() {
    let mut rng = rng_from_seed(102);
    for _ in 0..10_000 {
        let p = random_params::<f64, _>(&mut rng);
        let via_kraus = affine_from_kraus(&kraus_from_params(&p).unwrap()).unwrap();
        let closed = affine_from_params(&p);
        assert!(via_kraus.a.max_abs_diff(&closed.a) < 1e-10);
        assert!(via_kraus.m.max_abs_diff(&closed.m) < 1e-10);
    }
}

#[test]
fn relaxation_constraint_ten_thousand() {
    let mut rng = rng_from_seed(103);
    for _ in 0..10_000 {
        let p = random_params::<f64, _>(&mut rng);
        let c = affine_from_params(&p);
        let mut u = Vec3::new(
            rng.random_range(-1.0..1.0f64),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if u.norm() < 1e-9 {
            u = Vec3::x_hat();
        }
        let u = u.scale(1.0 / u.norm());
        assert!(c.a.norm_sq() + c.m.mul_vec(&u).norm_sq() <= 1.0 + 1e-12);
    }
}

#[test]
fn score_independence_hundred_weightings() {
    let mut rng = rng_from_seed(104);
    for _ in 0..100 {
        let p: StateFamilyParams<f64> =
            StateFamilyParams::new(0.3, rng.random(), rng.random()).unwrap();
        assert!((total_score(&build_state(&p).unwrap()) - chsh_score(0.3).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn extracted_fidelity_in_unit_interval_and_product_consistent() {
    let mut rng = rng_from_seed(105);
    for _ in 0..500 {
        let pa = random_params::<f64, _>(&mut rng);
        let pb = random_params::<f64, _>(&mut rng);
        let ka = kraus_from_params(&pa).unwrap();
        let kb = kraus_from_params(&pb).unwrap();
        let va = Vec3::new(
            rng.random_range(-0.57..0.57),
            rng.random_range(-0.57..0.57),
            rng.random_range(-0.57..0.57),
        );
        let vb = Vec3::new(
            rng.random_range(-0.57..0.57),
            rng.random_range(-0.57..0.57),
            rng.random_range(-0.57..0.57),
        );
        let rho = TwoQubitOperator::kron(
            &CMat2::density_from_bloch(&va),
            &CMat2::density_from_bloch(&vb),
        );
        let f = extracted_block_fidelity(&ka, &kb, &rho).unwrap();
        assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        let g = product_singlet_fidelity(
            &apply_affine(&affine_from_params(&pa), &va),
            &apply_affine(&affine_from_params(&pb), &vb),
        );
        assert!((f - g).abs() < 1e-12);
    }
}

#[test]
fn gradient_norm_bounded_on_million_samples() {
    let p = StateFamilyParams::<f64>::published();
    let iota = iota_sup(&p);
    let mut rng = rng_from_seed(106);
    let mut max_norm = 0.0f64;
    for _ in 0..500_000 {
        let x = ReducedPoint::new(
            rng.random_range(0.0..FRAC_PI_2),
            rng.random_range(0.0..FRAC_PI_2),
            rng.random_range(0.0..FRAC_PI_2),
            rng.random_range(0.0..FRAC_PI_2),
            rng.random_range(0.0..FRAC_PI_2),
        )
        .unwrap();
        for branch in [Branch::Plus, Branch::Minus] {
            let g = grad_epsilon_rho(&x, &p, branch);
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            max_norm = max_norm.max(norm);
        }
    }
    assert!(max_norm <= iota, "max |grad| {max_norm} vs iota {iota}");
}

#[test]
fn x_exc_value_is_bit_stable() {
    let p = StateFamilyParams::<f64>::published();
    let x = [0.0, FRAC_PI_2, 0.0, FRAC_PI_2, 0.0];
    let first = epsilon_rho_raw(&x, p.nu, p.p_c, 1.0);
    assert_eq!(first, 1.0);
    for _ in 0..100 {
        assert_eq!(epsilon_rho_raw(&x, p.nu, p.p_c, 1.0), first);
    }
}

#[test]
fn certified_verdict_survives_sampling_attack() {
    // soundness: a certified report can never be contradicted by sampling
    let sin_sum = |x: &[f64; 5]| x.iter().sum::<f64>().sin();
    let mut settings = CertSettings::new(5.0f64.sqrt(), 1.1, "sin-sum");
    settings.workers = 1;
    let problem = CertProblem {
        objective: &sin_sum,
        domain: Aabb::cube(0.0, 0.5).unwrap(),
        exclusions: vec![],
        settings,
    };
    let report = certify(&problem).unwrap();
    assert_eq!(report.status, CertStatus::Certified);
    let mut rng = rng_from_seed(107);
    for _ in 0..1_000_000 {
        let mut x = [0.0; 5];
        for v in &mut x {
            *v = rng.random_range(0.0..0.5);
        }
        assert!(sin_sum(&x) <= 1.1);
    }
}

#[test]
fn partition_accounting_is_exact() {
    // eliminated + excluded + frontier volumes cover the domain exactly
    let sin_sum = |x: &[f64; 5]| x.iter().sum::<f64>().sin();
    let domain = Aabb::<f64, 5>::cube(0.0, 0.5).unwrap();
    let exclusion = Aabb::new([0.3, 0.0, 0.1, 0.0, 0.0], [0.6, 0.2, 0.3, 0.5, 0.4]).unwrap();

    for budget in [u64::MAX, 400] {
        let mut settings = CertSettings::new(5.0f64.sqrt(), 1.1, "sin-sum");
        settings.workers = 1;
        settings.budget = budget;
        let problem = CertProblem {
            objective: &sin_sum,
            domain,
            exclusions: vec![exclusion],
            settings,
        };
        let report = certify(&problem).unwrap();
        let frontier_volume: f64 = report.frontier.iter().map(HyperBox::volume).sum();
        let covered = report.eliminated_volume + report.excluded_volume + frontier_volume;
        let total = domain.volume();
        assert!(
            (covered - total).abs() < 1e-12 * total.max(1.0),
            "covered {covered} vs domain {total} (budget {budget})"
        );
    }
}

proptest! {
    #[test]
    fn subdivision_conserves_volume(
        lo in proptest::array::uniform3(-5.0f64..5.0),
        width in proptest::array::uniform3(1e-6f64..3.0),
        depth in 0u32..20,
    ) {
        let mut hi = [0.0; 3];
        for i in 0..3 {
            hi[i] = lo[i] + width[i];
        }
        let parent = HyperBox::<f64, 3> { lo, hi, depth };
        let kids = parent.subdivide();
        prop_assert_eq!(kids.len(), 8);
        let vol: f64 = kids.iter().map(HyperBox::volume).sum();
        prop_assert!((vol - parent.volume()).abs() <= 1e-12 * parent.volume());
        for k in &kids {
            prop_assert_eq!(k.depth, depth + 1);
        }
        // pairwise disjoint interiors
        for (i, a) in kids.iter().enumerate() {
            for b in kids.iter().skip(i + 1) {
                prop_assert!(!a.region().overlaps(&b.region()));
            }
        }
    }

    #[test]
    fn rotation_round_trip_prop(axis in proptest::array::uniform3(-1.0f64..1.0), angle in -3.1f64..3.1) {
        prop_assume!(axis.iter().map(|v| v * v).sum::<f64>() > 1e-4);
        let r = Mat3::rotation_axis_angle(Vec3(axis), angle);
        prop_assert!(r.is_special_orthogonal(1e-12));
        let q = bellcert_core::linalg::quat_from_rotation(&r);
        let r2 = bellcert_core::linalg::rotation_from_quat(q);
        prop_assert!(r.max_abs_diff(&r2) < 1e-9);
    }

    #[test]
    fn epsilon_plus_bounded_by_three(
        x in proptest::array::uniform5(0.0f64..FRAC_PI_2),
        nu in 0.0f64..1.0,
        pc in 0.0f64..1.0,
    ) {
        // coarse structural sanity: each of the three blocks is bounded
        let v = epsilon_rho_raw(&x, nu, pc, 1.0);
        prop_assert!(v <= 3.0 * nu + (1.0 - nu) + 1e-12);
        prop_assert!(v >= -3.0);
    }
}
