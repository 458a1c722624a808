use kraus_vqa_core::adversary::{
    concurrence_mixed, concurrence_pure, family_from_concurrence, noisy_cnot_channel, PerturbationParams,
};
use kraus_vqa_core::ansatz::{build_hea, sample_params, ParamInit, Topology};
use kraus_vqa_core::channel::apply_channel;
use kraus_vqa_core::expressibility::haar_moment_coeffs;
use kraus_vqa_core::protocol::run_cat_protocol;
use kraus_vqa_core::seed;
use kraus_vqa_core::state::random_density_matrix;
use kraus_vqa_core::trainability::{cost, grad_analytic, grad_shift_rule};
use kraus_vqa_core::{ComplexMatrix, Observable};
use num_complex::Complex64;
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = PerturbationParams> {
    prop::array::uniform8(-1.0f64..1.0)
        .prop_filter("non-degenerate amplitudes", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
        .prop_map(|v| {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let c = |i: usize| Complex64::new(v[2 * i] / norm, v[2 * i + 1] / norm);
            PerturbationParams::new(c(0), c(1), c(2), c(3)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn noisy_cnot_is_trace_preserving(p in params_strategy()) {
        prop_assert!(noisy_cnot_channel(&p).completeness_defect() < 1e-12);
    }

    #[test]
    fn concurrence_pure_and_mixed_agree(p in params_strategy()) {
        let pure = concurrence_pure(&p);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&pure));
        prop_assert!((pure - concurrence_mixed(&p.state()).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn family_round_trips_concurrence(kappa in 0.0f64..=1.0) {
        let p = family_from_concurrence(kappa).unwrap();
        prop_assert!((concurrence_pure(&p) - kappa).abs() < 1e-12);
    }

    #[test]
    fn channel_output_is_a_state(p in params_strategy(), s in any::<u64>()) {
        let rho = random_density_matrix(2, 2, &mut seed::stream(s));
        let out = apply_channel(&noisy_cnot_channel(&p), &rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.matrix().hermiticity_defect() < 1e-12);
        prop_assert!(out.matrix().hermitian_eigenvalues().unwrap().iter().all(|&e| e > -1e-12));
    }

    #[test]
    fn haar_twirl_preserves_trace_and_purity(s in any::<u64>(), rank in 1usize..=4) {
        let rho = random_density_matrix(2, rank, &mut seed::stream(s));
        let op = haar_moment_coeffs(&rho).unwrap().operator();
        let d = rho.dim();
        prop_assert!((op.trace().re - 1.0).abs() < 1e-12);
        let swap_trace = op.trace_product(&ComplexMatrix::swap(d)).re;
        prop_assert!((swap_trace - rho.purity()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn cat_protocol_realises_the_channel(p in params_strategy(), s in any::<u64>()) {
        let rho = random_density_matrix(2, 2, &mut seed::stream(s));
        let transcript = run_cat_protocol(&rho, &p).unwrap();
        let expected = apply_channel(&noisy_cnot_channel(&p), &rho).unwrap();
        prop_assert!(transcript.deviation_from(&expected) < 1e-10);
        let total: f64 = transcript.branches.iter().map(|b| b.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_gradient_matches_shift_rule(kappa in 0.5f64..=1.0, s in any::<u64>(), k in 0usize..12) {
        let a = build_hea(3, 2, kappa, Topology::Ladder).unwrap();
        let mut rng = seed::stream(s);
        let theta = sample_params(&a, &ParamInit::full(0), &mut rng);
        let rho = random_density_matrix(3, 1, &mut rng);
        let obs = Observable::zz(3, 0, 1).unwrap();
        let g = grad_analytic(&a.split_at(&theta, k).unwrap(), &rho, &obs).unwrap();
        prop_assert!((g - grad_shift_rule(&a, &theta, &rho, &obs, k).unwrap()).abs() < 1e-10);
        let c = cost(&a, &theta, &rho, &obs).unwrap();
        prop_assert!(c.abs() <= 1.0 + 1e-12);
    }
}
