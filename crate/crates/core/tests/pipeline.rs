use kraus_vqa_core::adversary::{family_from_concurrence, noisy_cnot_channel};
use kraus_vqa_core::ansatz::{build_hea, ParamInit, Topology};
use kraus_vqa_core::expressibility::{
    direct_from_outputs, estimate_from_outputs, kraus_norm_fixed, trial_outputs, AnsatzEnsemble, HaarEnsemble,
};
use kraus_vqa_core::trainability::{grad_variance, reference_variance, ReferenceLeft};
use kraus_vqa_core::vqe::{exact_ground_energy, run_vqe, OptimizerConfig, PauliTermHamiltonian};
use kraus_vqa_core::{DensityMatrix, Observable, Pauli};

#[test]
fn vqe_reaches_ground_state_without_adversary() {
    let h = PauliTermHamiltonian::parse("# toy\n0.5 ZI\n0.5 IZ\n0.3 XX\n").unwrap();
    let ground = exact_ground_energy(&h).unwrap();
    let ansatz = build_hea(2, 2, 1.0, Topology::Ladder).unwrap();
    let opt = OptimizerConfig {
        learning_rate: 0.2,
        max_iters: 400,
        grad_tolerance: 1e-9,
        seed: 3,
        init_width: 1.0,
    };
    let rec = run_vqe(&h, &ansatz, &opt, &DensityMatrix::basis(2, 0)).unwrap();
    assert!((rec.ground_energy_exact - ground).abs() < 1e-12);
    assert!(rec.bias >= -1e-9 && rec.bias < 1e-3, "{}", rec.bias);
    let again = run_vqe(&h, &ansatz, &opt, &DensityMatrix::basis(2, 0)).unwrap();
    assert_eq!(rec, again);
}

#[test]
fn adversarial_vqe_ends_above_ground() {
    let h = PauliTermHamiltonian::parse("1.0 ZZ\n").unwrap();
    let ansatz = build_hea(2, 2, 0.5, Topology::Ladder).unwrap();
    let opt = OptimizerConfig {
        learning_rate: 0.2,
        max_iters: 200,
        grad_tolerance: 1e-9,
        seed: 1,
        init_width: 1.0,
    };
    let rec = run_vqe(&h, &ansatz, &opt, &DensityMatrix::basis(2, 0)).unwrap();
    assert!(rec.final_energy > -1.0);
    assert!(rec.steps.iter().all(|s| (-1.0 - 1e-9..=1.0 + 1e-9).contains(&s.energy)));
}

#[test]
fn haar_ensemble_estimators_agree_with_closed_form() {
    let rho = DensityMatrix::basis(1, 0);
    let outputs = trial_outputs(&HaarEnsemble { n: 1 }, &rho, 4000, 5).unwrap();
    let est = estimate_from_outputs(&rho, &outputs).unwrap();
    let direct = direct_from_outputs(&rho, &outputs).unwrap();
    assert!(est.delta_sq.abs() < 4.0 * est.std_err + 1e-3, "{est:?}");
    assert!(direct < 0.01, "{direct}");
    assert!((kraus_norm_fixed(1.0, &rho).unwrap() - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn noisier_circuits_are_less_expressive_at_depth() {
    let rho = DensityMatrix::basis(2, 0);
    let norm = |kappa: f64| {
        let ansatz = build_hea(2, 6, kappa, Topology::Ladder).unwrap();
        let ens = AnsatzEnsemble {
            ansatz: &ansatz,
            init: &ParamInit::full(0),
        };
        let outputs = trial_outputs(&ens, &rho, 300, 9).unwrap();
        direct_from_outputs(&rho, &outputs).unwrap()
    };
    assert!(norm(0.7) > norm(1.0));
}

#[test]
fn gradient_variance_shrinks_with_adversary_strength() {
    let rho = DensityMatrix::basis(3, 0);
    let obs = Observable::zz(3, 0, 1).unwrap();
    let var = |kappa: f64| {
        let a = build_hea(3, 4, kappa, Topology::Ladder).unwrap();
        grad_variance(&a, &ParamInit::full(0), &rho, &obs, 0, 400, 21).unwrap()
    };
    let clean = var(1.0);
    let noisy = var(0.6);
    assert!(noisy.variance + 2.0 * noisy.std_err_variance < clean.variance, "{clean:?} {noisy:?}");
}

#[test]
fn reference_variance_for_identity_left_matches_law() {
    for n in 2..=3 {
        let d = (1usize << n) as f64;
        let rho = DensityMatrix::basis(n, 0);
        let obs = Observable::zz(n, 0, 1).unwrap();
        let left = ReferenceLeft::Identity {
            generator: Pauli::Y,
            qubit: 0,
        };
        let s = reference_variance(&rho, &obs, &left, 4000, 2).unwrap();
        let expected = 4.0 / (d + 1.0);
        assert!((s.variance - expected).abs() < 4.0 * s.std_err_variance, "{n} {s:?}");
    }
}

#[test]
fn strong_adversary_family_is_trace_preserving_across_range() {
    for i in 0..=10 {
        let p = family_from_concurrence(i as f64 / 10.0).unwrap();
        assert!(noisy_cnot_channel(&p).completeness_defect() < 1e-12);
    }
}
