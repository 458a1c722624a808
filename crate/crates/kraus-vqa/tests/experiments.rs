use kraus_vqa::config::{Axis, Regime};
use kraus_vqa::experiments::{final_biases, input_state, select_rows};
use kraus_vqa::hamiltonian::H2_STO3G;
use kraus_vqa::{run_experiment, run_with_threads, Experiment, ExperimentConfig};

fn small(experiment: Experiment) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::defaults(experiment);
    cfg.qubits = vec![2];
    cfg.layers = vec![1, 2];
    cfg.kappa = vec![1.0, 0.8];
    cfg.trials = 12;
    cfg
}

#[test]
fn input_state_is_the_rotated_product_state() {
    let rho = input_state(2);
    let c = (std::f64::consts::PI / 8.0).cos();
    assert!((rho.matrix().get(0, 0).re - c.powi(4)).abs() < 1e-14);
    assert!((rho.purity() - 1.0).abs() < 1e-12);
}

#[test]
fn expressibility_rows_follow_kappa_then_depth() {
    let mut cfg = small(Experiment::ExpressibilitySweep);
    cfg.regime = Regime::Ensemble;
    let t = run_experiment(&cfg).unwrap();
    assert_eq!(t.columns(), ["depth", "kappa", "delta_sq", "std_err", "nu_bar", "n_noise", "trials", "seed"]);
    assert_eq!(t.column("kappa").unwrap(), [1.0, 1.0, 0.8, 0.8]);
    assert_eq!(t.meta("regime"), Some("ensemble"));
    for nu in t.column("nu_bar").unwrap() {
        assert!(nu > 0.25 && nu <= 1.0 + 1e-12);
    }
}

#[test]
fn gradient_sweep_axis_controls_column_order() {
    let mut cfg = small(Experiment::GradvarSweep);
    cfg.axis = Axis::Kappa;
    let t = run_experiment(&cfg).unwrap();
    assert_eq!(t.columns()[0], "kappa");
    assert_eq!(t.column("kappa").unwrap(), [1.0, 0.8, 1.0, 0.8]);
    assert_eq!(select_rows(&t, &[("depth", 2.0)]).count(), 2);
}

#[test]
fn restricted_sweep_reports_windows() {
    let mut cfg = ExperimentConfig::defaults(Experiment::GradvarQubitsRestricted);
    cfg.qubits = vec![2, 3];
    cfg.layers = vec![2];
    cfg.kappa = vec![1.0];
    cfg.r = vec![1.0, 0.01];
    cfg.windows = 3;
    cfg.trials = 10;
    let t = run_experiment(&cfg).unwrap();
    assert_eq!(t.columns()[..4], ["n", "depth", "kappa", "r"]);
    assert_eq!(t.column("n").unwrap(), [2.0, 3.0, 2.0, 3.0]);
    assert!(t.column("windows").unwrap().iter().all(|&w| w == 3.0));
    let var = t.column("variance").unwrap();
    assert!(var[2] < var[0] && var[3] < var[1]);
}

#[test]
fn bound_check_rows_resolve_parameter_indices() {
    let mut cfg = small(Experiment::BoundCheck);
    cfg.trials = 50;
    let t = run_experiment(&cfg).unwrap();
    assert_eq!(t.rows().len(), 8);
    assert_eq!(t.column("param").unwrap()[..2], [0.0, 3.0]);
    assert!(t.column("satisfied").unwrap().iter().all(|&s| s == 1.0));
}

#[test]
fn vqe_sweep_reports_final_bias_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h2.txt");
    std::fs::write(&path, H2_STO3G).unwrap();
    let mut cfg = ExperimentConfig::defaults(Experiment::VqeRun);
    cfg.hamiltonian = Some(path);
    cfg.kappa = vec![1.0, 0.7];
    cfg.seeds = vec![0, 1];
    cfg.max_iters = 30;
    let t = run_experiment(&cfg).unwrap();
    let finals = final_biases(&t).unwrap();
    assert_eq!(finals.iter().map(|f| (f.0, f.1)).collect::<Vec<_>>(), [(1.0, 0), (1.0, 1), (0.7, 0), (0.7, 1)]);
    assert!(finals.iter().all(|f| f.2 > -1e-9));
}

#[test]
fn thread_count_does_not_change_output() {
    let cfg = small(Experiment::GradvarDepth);
    let one = run_with_threads(&cfg, Some(1)).unwrap().to_csv_string();
    let three = run_with_threads(&cfg, Some(3)).unwrap().to_csv_string();
    assert_eq!(one, three);
}
