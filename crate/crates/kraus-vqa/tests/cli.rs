use std::fs;
use std::process::Command;

use kraus_vqa::ResultTable;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kraus-vqa"))
}

#[test]
fn config_file_run_writes_csv_with_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out.csv");
    fs::write(&cfg, "seed = 5\n\n[gradvar-depth]\nn = 2\ndepth = 1..=3\nkappa = 1.0, 0.8\ntrials = 20\n").unwrap();
    let status = bin()
        .args(["gradvar-depth", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--threads", "2"])
        .status()
        .unwrap();
    assert!(status.success());
    let table = ResultTable::parse_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(table.meta("seed"), Some("5"));
    assert_eq!(table.columns()[..4], ["depth", "n", "kappa", "r"]);
    assert_eq!(table.rows().len(), 6);
    assert_eq!(table.column("depth").unwrap(), [1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
    assert!(table.column("trials").unwrap().iter().all(|&t| t == 20.0));
    let cfg_back = table.config().unwrap();
    assert_eq!(cfg_back.layers, vec![1, 2, 3]);
    assert_eq!(cfg_back.master_seed, 5);
}

#[test]
fn vqe_flags_and_relative_hamiltonian_path() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("h.txt"), "# ground_energy = -1\n1.0 ZZ\n").unwrap();
    fs::write(dir.path().join("v.cfg"), "[vqe-run]\nhamiltonian = h.txt\n").unwrap();
    let output = bin()
        .current_dir("/")
        .args(["vqe-run", "--config"])
        .arg(dir.path().join("v.cfg"))
        .args(["--kappa", "1", "--layers", "2", "--lr", "0.2", "--iters", "150", "--seed", "3"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let table = ResultTable::parse_csv(&String::from_utf8(output.stdout).unwrap()).unwrap();
    assert_eq!(table.columns(), ["kappa", "seed", "iteration", "energy", "grad_norm", "bias"]);
    assert_eq!(table.meta("declared_ground_energy"), Some("-1.0"));
    let energy = table.column("energy").unwrap();
    assert!((energy.last().unwrap() + 1.0).abs() < 1e-3);
    assert!(table.column("seed").unwrap().iter().all(|&s| s == 3.0));
}

#[test]
fn invalid_input_is_reported_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "[gradvar-depth]\ndpeth = 3\nkappa = 1.5\n").unwrap();
    let output = bin().args(["gradvar-depth", "--config"]).arg(&cfg).output().unwrap();
    assert!(!output.status.success());
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("dpeth") && err.contains("`depth`"), "{err}");

    let output = bin().args(["protocol-verify", "--kappa", "0.5"]).output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("--kappa"));

    let output = bin().args(["vqe-run"]).output().unwrap();
    assert!(String::from_utf8_lossy(&output.stderr).contains("hamiltonian"));

    let output = bin().args(["no-such-experiment"]).output().unwrap();
    assert!(!output.status.success());
}

#[test]
fn protocol_verify_prints_max_deviation() {
    let output = bin().args(["protocol-verify", "--seed", "1"]).output().unwrap();
    assert!(output.status.success());
    let err = String::from_utf8_lossy(&output.stderr);
    let dev: f64 = err.trim().strip_prefix("max deviation = ").unwrap().parse().unwrap();
    assert!(dev < 1e-10);
    let table = ResultTable::parse_csv(&String::from_utf8(output.stdout).unwrap()).unwrap();
    assert_eq!(table.rows().len(), 70);
}
