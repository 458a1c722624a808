//! Experiment drivers. Trials run in parallel; every trial draws from its own
//! seed stream and results are reduced in trial order, so tables do not
//! depend on the number of worker threads.

use rayon::prelude::*;

use kraus_vqa_core::adversary::{concurrence_pure, family_from_concurrence, noisy_cnot_channel, PerturbationParams};
use kraus_vqa_core::ansatz::{build_hea, ParamInit, PQChAnsatz};
use kraus_vqa_core::channel::apply_channel;
use kraus_vqa_core::expressibility::{estimate_from_outputs, fixed_parameter_estimate, trial_output, AnsatzEnsemble};
use kraus_vqa_core::gates::rotation;
use kraus_vqa_core::protocol::run_cat_protocol;
use kraus_vqa_core::seed;
use kraus_vqa_core::state::{random_density_matrix, random_ket};
use kraus_vqa_core::trainability::{
    gradient_trial, theorem2_bound, window_init, window_point, BoundReport, GradientStats, WindowedStats,
};
use kraus_vqa_core::vqe::{run_vqe, OptimizerConfig, TrajectoryRecord};
use kraus_vqa_core::{DensityMatrix, Observable, Pauli};

use crate::config::{Experiment, ExperimentConfig, Regime};
use crate::defaults as d;
use crate::error::{HarnessError, Result};
use crate::hamiltonian::{load_hamiltonian, HamiltonianFile};
use crate::table::{Cell, ResultTable};

/// `(exp(−iθY)|0⟩)^{⊗n}` with the default rotation angle.
pub fn input_state(n: usize) -> DensityMatrix {
    let one = DensityMatrix::basis(1, 0)
        .evolve(&rotation(Pauli::Y, d::INPUT_ROTATION))
        .expect("single-qubit rotation is unitary");
    (1..n).fold(one.clone(), |acc, _| acc.tensor(&one))
}

/// `Z ⊗ Z` on the default pair of qubits.
pub fn cost_observable(n: usize) -> Result<Observable> {
    let (a, b) = d::OBSERVABLE_QUBITS;
    Ok(Observable::zz(n, a, b)?)
}

/// Runs `cfg` on a pool of `threads` workers, or on the global pool.
pub fn run_with_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<ResultTable> {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()?
            .install(|| run_experiment(cfg)),
        None => run_experiment(cfg),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let mut table = match cfg.experiment {
        Experiment::ExpressibilitySweep => expressibility_sweep(cfg)?,
        Experiment::GradvarDepth
        | Experiment::GradvarConcurrence
        | Experiment::GradvarQubitsRestricted
        | Experiment::GradvarSweep => gradvar_sweep(cfg)?,
        Experiment::VqeRun => vqe_run(cfg)?,
        Experiment::ProtocolVerify => protocol_verify(cfg)?,
        Experiment::BoundCheck => bound_check(cfg)?,
    };
    let mut head = ResultTable::new(Vec::<String>::new());
    head.set_meta("generator", concat!("kraus-vqa ", env!("CARGO_PKG_VERSION")));
    head.set_meta("experiment", cfg.experiment);
    head.set_meta("seed", cfg.master_seed);
    head.echo_config(cfg);
    head.metadata.append(&mut table.metadata);
    table.metadata = head.metadata;
    Ok(table)
}

fn par_trials<T: Send>(count: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..count).into_par_iter().map(f).collect()
}

fn expressibility_sweep(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::new(["depth", "kappa", "delta_sq", "std_err", "nu_bar", "n_noise", "trials", "seed"]);
    let n = cfg.qubits[0];
    let rho = input_state(n);
    table.set_meta("n", n);
    table.set_meta("regime", if cfg.regime == Regime::Fixed { "fixed" } else { "ensemble" });
    for &kappa in &cfg.kappa {
        for &depth in &cfg.layers {
            let point = seed::point_seed(cfg.master_seed, cfg.experiment.name(), &[n as f64, kappa, depth as f64]);
            let ansatz = build_hea(n, depth, kappa, cfg.topology)?;
            let init = ParamInit::full(point);
            let ens = AnsatzEnsemble {
                ansatz: &ansatz,
                init: &init,
            };
            let outputs = par_trials(cfg.trials, |t| Ok(trial_output(&ens, &rho, point, t)?))?;
            let est = match cfg.regime {
                Regime::Fixed => fixed_parameter_estimate(&rho, &outputs)?,
                Regime::Ensemble => estimate_from_outputs(&rho, &outputs)?,
            };
            table.push_row(vec![
                depth.into(),
                kappa.into(),
                est.delta_sq.into(),
                est.std_err.into(),
                est.nu_bar.into(),
                est.n_noise.into(),
                est.trials.into(),
                point.into(),
            ])?;
        }
    }
    Ok(table)
}

/// One point of a gradient-variance sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub n: usize,
    pub depth: usize,
    pub kappa: f64,
    pub r: f64,
}

impl SweepPoint {
    fn get(&self, name: &str) -> Cell {
        match name {
            "n" => self.n.into(),
            "depth" => self.depth.into(),
            "kappa" => self.kappa.into(),
            _ => self.r.into(),
        }
    }
}

/// Windowed gradient variance at one sweep point.
pub fn gradvar_point(cfg: &ExperimentConfig, p: SweepPoint) -> Result<(WindowedStats, u64)> {
    let point = seed::point_seed(
        cfg.master_seed,
        cfg.experiment.name(),
        &[p.n as f64, p.depth as f64, p.kappa, p.r],
    );
    let ansatz = build_hea(p.n, p.depth, p.kappa, cfg.topology)?;
    let k = cfg.params[0].resolve(ansatz.param_count());
    let rho = input_state(p.n);
    let obs = cost_observable(p.n)?;
    let inits = (0..cfg.windows)
        .map(|w| window_init(p.r, point, w))
        .collect::<kraus_vqa_core::Result<Vec<ParamInit>>>()?;
    let trials = cfg.trials;
    let grads = par_trials(cfg.windows * trials, |i| {
        let (w, t) = (i / trials, i % trials);
        Ok(gradient_trial(&ansatz, &inits[w], &rho, &obs, k, window_point(point, w), t)?)
    })?;
    let per_window = grads
        .chunks(trials)
        .map(|g| GradientStats::from_samples(k, g))
        .collect::<kraus_vqa_core::Result<Vec<_>>>()?;
    Ok((WindowedStats::from_windows(k, &per_window)?, point))
}

fn gradvar_sweep(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let axis = cfg.axis.column();
    let coords: Vec<&str> = std::iter::once(axis)
        .chain(["n", "depth", "kappa", "r"].into_iter().filter(|c| *c != axis))
        .collect();
    let mut columns: Vec<&str> = coords.clone();
    columns.extend(["variance", "std_err", "mean", "windows", "trials", "seed"]);
    let mut table = ResultTable::new(columns);
    table.set_meta("param", cfg.params[0]);
    let names = ["n", "depth", "kappa", "r"];
    let axis_pos = names.iter().position(|c| *c == axis).expect("axis is a coordinate");
    let mut points = Vec::new();
    for (a, &n) in cfg.qubits.iter().enumerate() {
        for (b, &depth) in cfg.layers.iter().enumerate() {
            for (c, &kappa) in cfg.kappa.iter().enumerate() {
                for (e, &r) in cfg.r.iter().enumerate() {
                    points.push(([a, b, c, e], SweepPoint { n, depth, kappa, r }));
                }
            }
        }
    }
    // the swept coordinate varies fastest, so each curve is contiguous
    points.sort_by_key(|(ix, _)| {
        let mut key = ix.to_vec();
        let x = key.remove(axis_pos);
        key.push(x);
        key
    });
    for (_, p) in points {
        let (s, point) = gradvar_point(cfg, p)?;
        let mut row: Vec<Cell> = coords.iter().map(|c| p.get(c)).collect();
        row.extend::<[Cell; 6]>([
            s.variance.into(),
            s.std_err.into(),
            s.mean.into(),
            s.windows.into(),
            s.trials_per_window.into(),
            point.into(),
        ]);
        table.push_row(row)?;
    }
    Ok(table)
}

fn bound_check(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::new([
        "n",
        "depth",
        "kappa",
        "param",
        "lhs",
        "rhs",
        "std_err",
        "satisfied",
        "variance",
        "reference",
        "right_norm",
        "attenuation",
        "trials",
        "seed",
    ]);
    let mut jobs = Vec::new();
    for &n in &cfg.qubits {
        for &depth in &cfg.layers {
            for &kappa in &cfg.kappa {
                for sel in &cfg.params {
                    jobs.push((n, depth, kappa, sel.resolve(2 * n * depth)));
                }
            }
        }
    }
    let reports: Vec<(BoundReport, u64)> = jobs
        .par_iter()
        .map(|&(n, depth, kappa, k)| {
            let point = seed::point_seed(cfg.master_seed, cfg.experiment.name(), &[n as f64, depth as f64, kappa, k as f64]);
            let ansatz = build_hea(n, depth, kappa, cfg.topology)?;
            let rep = theorem2_bound(
                &ansatz,
                &ParamInit::full(point),
                &input_state(n),
                &cost_observable(n)?,
                k,
                cfg.trials,
                point,
            )?;
            Ok((rep, point))
        })
        .collect::<Result<_>>()?;
    for (&(n, depth, kappa, k), (rep, point)) in jobs.iter().zip(reports) {
        table.push_row(vec![
            n.into(),
            depth.into(),
            kappa.into(),
            k.into(),
            rep.lhs.into(),
            rep.rhs.into(),
            rep.combined_std_err.into(),
            rep.satisfied.into(),
            rep.variance.variance.into(),
            rep.reference.variance.into(),
            rep.right_norm.into(),
            rep.attenuation.into(),
            cfg.trials.into(),
            point.into(),
        ])?;
    }
    Ok(table)
}

/// Resource pair of verification point `i`: the symmetric family on an even
/// grid first, then random complex pairs.
pub fn protocol_point(cfg: &ExperimentConfig, i: usize) -> Result<(PerturbationParams, bool)> {
    if i < cfg.grid_points {
        let kappa = i as f64 / (cfg.grid_points - 1) as f64;
        return Ok((family_from_concurrence(kappa)?, false));
    }
    let s = seed::point_seed(cfg.master_seed, cfg.experiment.name(), &[1.0, i as f64]);
    let c = random_ket(4, &mut seed::stream(s));
    Ok((PerturbationParams::new(c[0], c[1], c[2], c[3])?, true))
}

fn protocol_verify(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::new(["point", "is_random", "kappa", "max_deviation"]);
    let total = cfg.grid_points + cfg.random_points;
    let rows = par_trials(total, |i| {
        let (p, is_random) = protocol_point(cfg, i)?;
        let channel = noisy_cnot_channel(&p);
        let point = seed::point_seed(cfg.master_seed, cfg.experiment.name(), &[0.0, i as f64]);
        let mut worst = 0.0f64;
        for s in 0..cfg.states {
            let rank = 1 + s % 4;
            let rho = random_density_matrix(2, rank, &mut seed::trial_stream(point, s as u64));
            let expected = apply_channel(&channel, &rho)?;
            worst = worst.max(run_cat_protocol(&rho, &p)?.deviation_from(&expected));
        }
        Ok((i, is_random, concurrence_pure(&p), worst))
    })?;
    let overall = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    table.set_meta("states_per_point", cfg.states);
    table.set_meta("max_deviation", format!("{overall:?}"));
    for (i, is_random, kappa, worst) in rows {
        table.push_row(vec![i.into(), is_random.into(), kappa.into(), worst.into()])?;
    }
    Ok(table)
}

/// One optimisation run for the given adversary strength and seed.
pub fn vqe_trajectory(cfg: &ExperimentConfig, file: &HamiltonianFile, kappa: f64, run_seed: u64) -> Result<TrajectoryRecord> {
    let h = &file.hamiltonian;
    let ansatz: PQChAnsatz = build_hea(h.qubits(), cfg.layers[0], kappa, cfg.topology)?;
    let opt = OptimizerConfig {
        learning_rate: cfg.learning_rate,
        max_iters: cfg.max_iters,
        grad_tolerance: cfg.grad_tolerance,
        seed: run_seed,
        init_width: cfg.init_width,
    };
    Ok(run_vqe(h, &ansatz, &opt, &DensityMatrix::basis(h.qubits(), 0))?)
}

fn vqe_run(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let path = cfg.hamiltonian.as_ref().expect("validated config names a Hamiltonian");
    let file = load_hamiltonian(path)?;
    let mut table = ResultTable::new(["kappa", "seed", "iteration", "energy", "grad_norm", "bias"]);
    let seeds = cfg.run_seeds();
    let jobs: Vec<(f64, u64)> = cfg.kappa.iter().flat_map(|&k| seeds.iter().map(move |&s| (k, s))).collect();
    let records = jobs
        .par_iter()
        .map(|&(kappa, s)| vqe_trajectory(cfg, &file, kappa, s))
        .collect::<Result<Vec<_>>>()?;
    let ground = records.first().map(|r| r.ground_energy_exact).unwrap_or(f64::NAN);
    table.set_meta("hamiltonian", path.display());
    table.set_meta("qubits", file.hamiltonian.qubits());
    table.set_meta("ground_energy", format!("{ground:?}"));
    if let Some(g) = file.declared_ground {
        table.set_meta("declared_ground_energy", format!("{g:?}"));
    }
    for (&(kappa, s), rec) in jobs.iter().zip(&records) {
        for step in &rec.steps {
            table.push_row(vec![
                kappa.into(),
                s.into(),
                step.iteration.into(),
                step.energy.into(),
                step.grad_norm.into(),
                (step.energy - rec.ground_energy_exact).into(),
            ])?;
        }
    }
    Ok(table)
}

/// Final bias of each `(kappa, seed)` run in a `vqe-run` table.
pub fn final_biases(table: &ResultTable) -> Result<Vec<(f64, u64, f64)>> {
    let col = |name: &str| {
        table
            .column_index(name)
            .ok_or_else(|| HarnessError::Table(format!("missing column {name}")))
    };
    let (ck, cs, cb) = (col("kappa")?, col("seed")?, col("bias")?);
    let mut out: Vec<(f64, u64, f64)> = Vec::new();
    for row in table.rows() {
        let kappa = row[ck].as_f64();
        let s = match row[cs] {
            Cell::Int(v) => v,
            Cell::Float(v) => v as u64,
        };
        match out.last_mut() {
            Some(last) if last.0 == kappa && last.1 == s => last.2 = row[cb].as_f64(),
            _ => out.push((kappa, s, row[cb].as_f64())),
        }
    }
    Ok(out)
}

/// Rows of a gradient sweep whose non-swept coordinates equal `fixed`.
pub fn select_rows<'a>(table: &'a ResultTable, fixed: &'a [(&'a str, f64)]) -> impl Iterator<Item = &'a Vec<Cell>> + 'a {
    let idx: Vec<Option<usize>> = fixed.iter().map(|(c, _)| table.column_index(c)).collect();
    table.rows().iter().filter(move |row| {
        idx.iter()
            .zip(fixed)
            .all(|(i, (_, v))| i.is_some_and(|i| row[i].as_f64() == *v))
    })
}
