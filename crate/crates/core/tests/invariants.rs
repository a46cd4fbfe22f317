use chyp_core::conngeo::{holonomy_equals_phi_n, metric, parallel_fields_check};
use chyp_core::homdesc::sample::{random_phi, random_unitary};
use chyp_core::ktensor::{alpha_form, build_s, build_s_oracle, project};
use chyp_core::linalg::{realify_action, RANK_TOL};
use chyp_core::{cross_validate, ConnectionData, Frame, KTensor, Tolerances};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn connection(n: usize, seed: u64) -> ConnectionData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ConnectionData::new(random_phi(n, &mut rng, true).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_forms_match_oracles(n in 2usize..=4, seed in any::<u64>()) {
        let conn = connection(n, seed);
        prop_assert!(conn.oracle_residuals().max() < 1e-11);
        let s = build_s(&conn);
        prop_assert!((&s - &build_s_oracle(&conn)).max_abs() < 1e-11 * s.norm().max(1.0));
    }

    #[test]
    fn holonomy_is_phi_n_and_fixes_the_parallel_fields(n in 2usize..=4, seed in any::<u64>()) {
        let conn = connection(n, seed);
        prop_assert!(holonomy_equals_phi_n(&conn, RANK_TOL).equal);
        let p = parallel_fields_check(&conn);
        prop_assert!(p.max_a0 < 1e-12 && p.max_n2 < 1e-12);
    }

    #[test]
    fn decomposition_reassembles(n in 2usize..=4, seed in any::<u64>()) {
        let s = build_s(&connection(n, seed));
        let d = project(&s).unwrap();
        let sum = &(&(&d.s1 + &d.s2) + &d.s3) + &d.s4;
        prop_assert!((&sum - &s).norm() < 1e-10 * d.scale);
        prop_assert!(d.residuals.identities() < 1e-9 * d.scale);
    }

    #[test]
    fn trace_is_proportional_to_alpha(n in 2usize..=4, seed in any::<u64>()) {
        let conn = connection(n, seed);
        let c12 = build_s(&conn).c12();
        let alpha = alpha_form(&conn.frame);
        let k = conn.frame.a0_index();
        let coef = c12[k] / alpha[k];
        prop_assert!((&c12 - &alpha * coef).amax() < 1e-10);
        prop_assert!((coef - 2.0 * n as f64).abs() < 1e-10);
    }

    #[test]
    fn trace_commutes_with_unitary_frames(n in 2usize..=4, seed in any::<u64>()) {
        let conn = connection(n, seed);
        let s = build_s(&conn);
        let o = realify_action(&random_unitary(n, &mut ChaCha8Rng::seed_from_u64(seed ^ 1)));
        prop_assert!((s.change_frame(&o).c12() - o.transpose() * s.c12()).amax() < 1e-11);
    }

    #[test]
    fn classifier_agrees_with_support(n in 2usize..=4, seed in any::<u64>()) {
        let cv = cross_validate(&connection(n, seed), &Tolerances::default()).unwrap();
        prop_assert!(cv.agree, "{} vs {:?}", cv.label, cv.support.indices());
        prop_assert!(!cv.support.forbidden);
    }

    #[test]
    fn frame_is_orthonormal(n in 2usize..=5, mu in 0.1f64..5.0) {
        let f = Frame::new(n, mu).unwrap();
        let e = f.vectors();
        for (a, x) in e.iter().enumerate() {
            for (b, y) in e.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((metric(x, y).unwrap() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn k_space_projection_is_idempotent(n in 2usize..=3, seed in any::<u64>()) {
        let t = KTensor::random(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let p = t.project_k();
        prop_assert!(p.k_residual() < 1e-12 * p.norm().max(1.0));
        prop_assert!((&p.project_k() - &p).norm() < 1e-12 * p.norm().max(1.0));
    }
}
