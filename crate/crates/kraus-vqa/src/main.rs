use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use kraus_vqa::{run_with_threads, Experiment, ExperimentConfig, HarnessError, Result};

/// Simulate variational circuits whose CNOTs run through an adversarial
/// entanglement resource, and write the results as CSV.
#[derive(Debug, Parser)]
#[command(name = "kraus-vqa", version)]
struct Cli {
    experiment: Experiment,
    /// Configuration file (`key = value` lines with `[experiment]` sections).
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Hamiltonian file (vqe-run).
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
    /// Adversary concurrence (vqe-run).
    #[arg(long)]
    kappa: Option<f64>,
    /// Ansatz depth (vqe-run).
    #[arg(long)]
    layers: Option<usize>,
    /// Learning rate (vqe-run).
    #[arg(long)]
    lr: Option<f64>,
    /// Iteration cap (vqe-run).
    #[arg(long)]
    iters: Option<usize>,
}

impl Cli {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if let Some(s) = self.seed {
            out.push(("seed", s.to_string()));
        }
        if let Some(p) = &self.hamiltonian {
            out.push(("hamiltonian", p.display().to_string()));
        }
        if let Some(k) = self.kappa {
            out.push(("kappa", k.to_string()));
        }
        if let Some(l) = self.layers {
            out.push(("depth", l.to_string()));
        }
        if let Some(lr) = self.lr {
            out.push(("lr", lr.to_string()));
        }
        if let Some(i) = self.iters {
            out.push(("iters", i.to_string()));
        }
        out
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let mut cfg = ExperimentConfig::parse(&read(path)?, Some(cli.experiment))?;
            // paths inside a config file are relative to the file
            let base = path.parent().unwrap_or(Path::new(""));
            if let Some(h) = cfg.hamiltonian.as_mut().filter(|h| h.is_relative()) {
                *h = base.join(&*h);
            }
            cfg
        }
        None => ExperimentConfig::defaults(cli.experiment),
    };
    let mut errors = Vec::new();
    for (key, value) in cli.overrides() {
        if !cli.experiment.keys().contains(&key) {
            errors.push(kraus_vqa::config::FieldError {
                line: None,
                key: format!("--{}", if key == "depth" { "layers" } else { key }),
                message: format!("not used by {}", cli.experiment),
            });
        } else if let Err(message) = cfg.set(key, &value) {
            errors.push(kraus_vqa::config::FieldError {
                line: None,
                key: key.into(),
                message,
            });
        }
    }
    if !errors.is_empty() {
        return Err(kraus_vqa::config::ConfigError { errors }.into());
    }
    if cli.out.is_some() {
        cfg.output = cli.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let table = run_with_threads(&cfg, cli.threads)?;
    match &cfg.output {
        Some(path) => {
            let file = File::create(path).map_err(|source| HarnessError::Io {
                path: path.clone(),
                source,
            })?;
            table.write_csv(BufWriter::new(file))?;
        }
        None => table.write_csv(io::stdout().lock())?,
    }
    if let Some(dev) = table.meta("max_deviation") {
        let _ = writeln!(io::stderr(), "max deviation = {dev}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
