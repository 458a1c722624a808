//! Experiment configuration files.
//!
//! ```text
//! # comment
//! seed = 2024
//!
//! [gradvar-depth]
//! n = 6
//! depth = 2, 4, 6..=10 by 2
//! kappa = 1.0, 0.9, 0.8
//! ```
//!
//! Keys before the first section apply to whichever experiment is run, as
//! long as that experiment accepts them. A section applies only to the
//! experiment it names and overrides top-level values.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use kraus_vqa_core::ansatz::Topology;

use crate::defaults as d;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Experiment {
    ExpressibilitySweep,
    GradvarDepth,
    GradvarConcurrence,
    GradvarQubitsRestricted,
    GradvarSweep,
    VqeRun,
    ProtocolVerify,
    BoundCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::ExpressibilitySweep,
        Experiment::GradvarDepth,
        Experiment::GradvarConcurrence,
        Experiment::GradvarQubitsRestricted,
        Experiment::GradvarSweep,
        Experiment::VqeRun,
        Experiment::ProtocolVerify,
        Experiment::BoundCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ExpressibilitySweep => "expressibility-sweep",
            Experiment::GradvarDepth => "gradvar-depth",
            Experiment::GradvarConcurrence => "gradvar-concurrence",
            Experiment::GradvarQubitsRestricted => "gradvar-qubits-restricted",
            Experiment::GradvarSweep => "gradvar-sweep",
            Experiment::VqeRun => "vqe-run",
            Experiment::ProtocolVerify => "protocol-verify",
            Experiment::BoundCheck => "bound-check",
        }
    }

    /// Keys accepted in this experiment's section.
    pub fn keys(self) -> &'static [&'static str] {
        const GRADVAR: &[&str] = &["seed", "output", "n", "depth", "kappa", "r", "trials", "windows", "param", "topology"];
        match self {
            Experiment::ExpressibilitySweep => &["seed", "output", "n", "depth", "kappa", "trials", "regime", "topology"],
            Experiment::GradvarDepth | Experiment::GradvarConcurrence | Experiment::GradvarQubitsRestricted => GRADVAR,
            Experiment::GradvarSweep => &[
                "seed", "output", "n", "depth", "kappa", "r", "trials", "windows", "param", "topology", "axis",
            ],
            Experiment::VqeRun => &[
                "seed",
                "output",
                "hamiltonian",
                "kappa",
                "depth",
                "lr",
                "iters",
                "tolerance",
                "init_width",
                "seeds",
                "topology",
            ],
            Experiment::ProtocolVerify => &["seed", "output", "grid_points", "random_points", "states"],
            Experiment::BoundCheck => &["seed", "output", "n", "depth", "kappa", "param", "trials", "topology"],
        }
    }

    pub fn is_gradvar(self) -> bool {
        matches!(
            self,
            Experiment::GradvarDepth
                | Experiment::GradvarConcurrence
                | Experiment::GradvarQubitsRestricted
                | Experiment::GradvarSweep
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment {s:?}"))
    }
}

/// Which parameter a gradient is taken with respect to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamSelector {
    Index(usize),
    First,
    Last,
}

impl ParamSelector {
    pub fn resolve(self, count: usize) -> usize {
        match self {
            ParamSelector::Index(k) => k,
            ParamSelector::First => 0,
            ParamSelector::Last => count.saturating_sub(1),
        }
    }
}

impl fmt::Display for ParamSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamSelector::Index(k) => write!(f, "{k}"),
            ParamSelector::First => f.write_str("first"),
            ParamSelector::Last => f.write_str("last"),
        }
    }
}

impl FromStr for ParamSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "first" => Ok(ParamSelector::First),
            "last" => Ok(ParamSelector::Last),
            _ => s
                .parse()
                .map(ParamSelector::Index)
                .map_err(|_| format!("expected a parameter index, `first` or `last`, found {s:?}")),
        }
    }
}

/// How the expressibility norm is averaged over parameter draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Each draw is a fixed channel; the closed form is averaged.
    Fixed,
    /// The draws form one channel ensemble.
    Ensemble,
}

impl Regime {
    fn name(self) -> &'static str {
        match self {
            Regime::Fixed => "fixed",
            Regime::Ensemble => "ensemble",
        }
    }
}

/// Swept coordinate of a gradient-variance sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Depth,
    Kappa,
    Qubits,
}

impl Axis {
    pub fn column(self) -> &'static str {
        match self {
            Axis::Depth => "depth",
            Axis::Kappa => "kappa",
            Axis::Qubits => "n",
        }
    }
}

/// One problem with a configuration, tied to a key and, when known, a line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if self.key.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.key, self.message)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    pub errors: Vec<FieldError>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid configuration")?;
        for e in &self.errors {
            write!(f, "\n  {e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub master_seed: u64,
    pub output: Option<PathBuf>,
    pub qubits: Vec<usize>,
    pub layers: Vec<usize>,
    pub kappa: Vec<f64>,
    /// Sampling-window widths as fractions of `2π`.
    pub r: Vec<f64>,
    /// Samples per sweep point, or per window when `windows > 1`.
    pub trials: usize,
    pub windows: usize,
    pub params: Vec<ParamSelector>,
    pub axis: Axis,
    pub regime: Regime,
    pub topology: Topology,
    pub hamiltonian: Option<PathBuf>,
    pub learning_rate: f64,
    pub max_iters: usize,
    pub grad_tolerance: f64,
    pub init_width: f64,
    /// Optimizer seeds; empty means the master seed.
    pub seeds: Vec<u64>,
    pub grid_points: usize,
    pub random_points: usize,
    pub states: usize,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let mut cfg = Self {
            experiment,
            master_seed: d::MASTER_SEED,
            output: None,
            qubits: vec![d::QUBITS],
            layers: d::DEPTH_LAYERS.to_vec(),
            kappa: d::DEPTH_KAPPAS.to_vec(),
            r: vec![1.0],
            trials: d::TRIALS,
            windows: 1,
            params: vec![ParamSelector::Index(d::GRAD_PARAM)],
            axis: Axis::Depth,
            regime: Regime::Fixed,
            topology: Topology::Ladder,
            hamiltonian: None,
            learning_rate: d::VQE_LEARNING_RATE,
            max_iters: d::VQE_ITERS,
            grad_tolerance: d::VQE_TOLERANCE,
            init_width: d::VQE_INIT_WIDTH,
            seeds: Vec::new(),
            grid_points: d::PROTOCOL_GRID_POINTS,
            random_points: d::PROTOCOL_RANDOM_POINTS,
            states: d::PROTOCOL_STATES,
        };
        match experiment {
            Experiment::ExpressibilitySweep => {
                cfg.layers = d::EXPRESSIBILITY_LAYERS.to_vec();
                cfg.kappa = d::EXPRESSIBILITY_KAPPAS.to_vec();
            }
            Experiment::GradvarDepth | Experiment::GradvarSweep => {}
            Experiment::GradvarConcurrence => {
                cfg.layers = vec![d::CONCURRENCE_LAYERS];
                cfg.kappa = d::CONCURRENCE_KAPPAS.to_vec();
                cfg.axis = Axis::Kappa;
            }
            Experiment::GradvarQubitsRestricted => {
                cfg.qubits = d::RESTRICTED_QUBITS.to_vec();
                cfg.layers = vec![d::RESTRICTED_LAYERS];
                cfg.kappa = d::RESTRICTED_KAPPAS.to_vec();
                cfg.r = d::RESTRICTED_WIDTHS.to_vec();
                cfg.windows = d::RESTRICTED_WINDOWS;
                cfg.trials = d::RESTRICTED_TRIALS;
                cfg.axis = Axis::Qubits;
            }
            Experiment::VqeRun => {
                cfg.layers = vec![d::VQE_LAYERS];
                cfg.kappa = vec![1.0];
            }
            Experiment::ProtocolVerify => {}
            Experiment::BoundCheck => {
                cfg.qubits = vec![d::BOUND_QUBITS];
                cfg.layers = d::BOUND_LAYERS.to_vec();
                cfg.kappa = d::BOUND_KAPPAS.to_vec();
                cfg.params = vec![ParamSelector::First, ParamSelector::Last];
                cfg.trials = d::BOUND_TRIALS;
            }
        }
        cfg
    }

    /// Parses a configuration document. `selected` names the experiment to
    /// run; without it the document must name one, either with a top-level
    /// `experiment` key or through a single section.
    pub fn parse(text: &str, selected: Option<Experiment>) -> Result<Self, ConfigError> {
        let doc = Document::read(text)?;
        let experiment = doc.experiment(selected)?;
        let mut cfg = Self::defaults(experiment);
        let mut errors = Vec::new();
        for entry in doc.entries_for(experiment) {
            if let Err(message) = cfg.set(&entry.key, &entry.value) {
                errors.push(FieldError {
                    line: Some(entry.line),
                    key: entry.key.clone(),
                    message,
                });
            }
        }
        if !errors.is_empty() {
            return Err(ConfigError { errors });
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "seed" => self.master_seed = parse_scalar(value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "n" => self.qubits = parse_int_list(value)?,
            "depth" => self.layers = parse_int_list(value)?,
            "kappa" => self.kappa = parse_float_list(value)?,
            "r" => self.r = parse_float_list(value)?,
            "trials" => self.trials = parse_scalar(value)?,
            "windows" => self.windows = parse_scalar(value)?,
            "param" => {
                self.params = split_items(value)
                    .map(ParamSelector::from_str)
                    .collect::<Result<_, _>>()?
            }
            "axis" => {
                self.axis = match value {
                    "depth" => Axis::Depth,
                    "kappa" => Axis::Kappa,
                    "n" => Axis::Qubits,
                    _ => return Err(format!("expected `depth`, `kappa` or `n`, found {value:?}")),
                }
            }
            "regime" => {
                self.regime = match value {
                    "fixed" => Regime::Fixed,
                    "ensemble" => Regime::Ensemble,
                    _ => return Err(format!("expected `fixed` or `ensemble`, found {value:?}")),
                }
            }
            "topology" => {
                if value != "ladder" {
                    return Err(format!("only `ladder` is supported, found {value:?}"));
                }
                self.topology = Topology::Ladder;
            }
            "hamiltonian" => self.hamiltonian = Some(PathBuf::from(value)),
            "lr" => self.learning_rate = parse_scalar(value)?,
            "iters" => self.max_iters = parse_scalar(value)?,
            "tolerance" => self.grad_tolerance = parse_scalar(value)?,
            "init_width" => self.init_width = parse_scalar(value)?,
            "seeds" => self.seeds = parse_int_list(value)?,
            "grid_points" => self.grid_points = parse_scalar(value)?,
            "random_points" => self.random_points = parse_scalar(value)?,
            "states" => self.states = parse_scalar(value)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errors = Vec::new();
        let mut fail = |key: &str, message: String| {
            errors.push(FieldError {
                line: None,
                key: key.into(),
                message,
            })
        };
        let exp = self.experiment;
        let uses = |key: &str| exp.keys().contains(&key);

        if uses("n") {
            let cap = match exp {
                Experiment::BoundCheck => kraus_vqa_core::trainability::BOUND_MAX_QUBITS,
                _ => d::MAX_QUBITS,
            };
            if self.qubits.is_empty() {
                fail("n", "at least one value required".into());
            }
            for &n in &self.qubits {
                if !(2..=cap).contains(&n) {
                    fail("n", format!("{n} outside 2..={cap}"));
                }
            }
        }
        if exp == Experiment::ExpressibilitySweep && self.qubits.len() != 1 {
            fail("n", "expressibility-sweep takes a single register size".into());
        }
        if uses("depth") {
            if self.layers.is_empty() {
                fail("depth", "at least one value required".into());
            }
            for &l in &self.layers {
                if !(1..=d::MAX_LAYERS).contains(&l) {
                    fail("depth", format!("{l} outside 1..={}", d::MAX_LAYERS));
                }
            }
            if exp == Experiment::VqeRun && self.layers.len() != 1 {
                fail("depth", "vqe-run takes a single depth".into());
            }
        }
        if uses("kappa") {
            if self.kappa.is_empty() {
                fail("kappa", "at least one value required".into());
            }
            for &k in &self.kappa {
                if !(0.0..=1.0).contains(&k) {
                    fail("kappa", format!("{k} outside [0, 1]"));
                }
            }
        }
        if uses("r") {
            if self.r.is_empty() {
                fail("r", "at least one value required".into());
            }
            for &r in &self.r {
                if !(r > 0.0 && r <= 1.0) {
                    fail("r", format!("{r} outside (0, 1]"));
                }
            }
        }
        if uses("trials") {
            let min = if exp == Experiment::ExpressibilitySweep && self.regime == Regime::Ensemble {
                4
            } else {
                3
            };
            if self.trials < min {
                fail("trials", format!("at least {min} required, found {}", self.trials));
            }
        }
        if uses("windows") && self.windows == 0 {
            fail("windows", "at least 1 required".into());
        }
        if uses("param") {
            if self.params.is_empty() {
                fail("param", "at least one value required".into());
            }
            if exp.is_gradvar() && self.params.len() != 1 {
                fail("param", "gradient sweeps take a single parameter".into());
            }
            for p in &self.params {
                if let ParamSelector::Index(k) = p {
                    for &n in &self.qubits {
                        for &l in &self.layers {
                            if *k >= 2 * n * l {
                                fail("param", format!("index {k} out of range for n = {n}, layers = {l}"));
                            }
                        }
                    }
                }
            }
        }
        if exp == Experiment::VqeRun {
            if self.hamiltonian.is_none() {
                fail("hamiltonian", "missing required field".into());
            }
            if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
                fail("lr", format!("{} must be positive", self.learning_rate));
            }
            if self.max_iters == 0 {
                fail("iters", "at least 1 required".into());
            }
            if !(self.grad_tolerance > 0.0) {
                fail("tolerance", format!("{} must be positive", self.grad_tolerance));
            }
            if !(self.init_width > 0.0 && self.init_width <= 1.0) {
                fail("init_width", format!("{} outside (0, 1]", self.init_width));
            }
        }
        if exp == Experiment::ProtocolVerify {
            if self.grid_points < 2 {
                fail("grid_points", "at least 2 required".into());
            }
            if self.states == 0 {
                fail("states", "at least 1 required".into());
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { errors })
        }
    }

    /// Optimizer seeds to run.
    pub fn run_seeds(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            vec![self.master_seed]
        } else {
            self.seeds.clone()
        }
    }

    /// Canonical `key = value` text that parses back to this configuration.
    pub fn to_text(&self) -> String {
        let mut lines = vec![format!("experiment = {}", self.experiment)];
        for &key in self.experiment.keys() {
            let value = match key {
                "seed" => self.master_seed.to_string(),
                "output" => match &self.output {
                    Some(p) => p.display().to_string(),
                    None => continue,
                },
                "n" => join(&self.qubits),
                "depth" => join(&self.layers),
                "kappa" => join_floats(&self.kappa),
                "r" => join_floats(&self.r),
                "trials" => self.trials.to_string(),
                "windows" => self.windows.to_string(),
                "param" => join(&self.params),
                "axis" => self.axis.column().into(),
                "regime" => self.regime.name().into(),
                "topology" => "ladder".into(),
                "hamiltonian" => match &self.hamiltonian {
                    Some(p) => p.display().to_string(),
                    None => continue,
                },
                "lr" => format!("{:?}", self.learning_rate),
                "iters" => self.max_iters.to_string(),
                "tolerance" => format!("{:?}", self.grad_tolerance),
                "init_width" => format!("{:?}", self.init_width),
                "seeds" if self.seeds.is_empty() => continue,
                "seeds" => join(&self.seeds),
                "grid_points" => self.grid_points.to_string(),
                "random_points" => self.random_points.to_string(),
                "states" => self.states.to_string(),
                _ => unreachable!("key {key} has no echo"),
            };
            lines.push(format!("{key} = {value}"));
        }
        lines.join("\n") + "\n"
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn join_floats(items: &[f64]) -> String {
    items.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

/// Every key any experiment accepts.
fn all_keys() -> Vec<&'static str> {
    let mut keys: Vec<&str> = Experiment::ALL.iter().flat_map(|e| e.keys().iter().copied()).collect();
    keys.push("experiment");
    keys.sort_unstable();
    keys.dedup();
    keys
}

fn nearest<'a>(key: &str, candidates: &[&'a str]) -> Option<&'a str> {
    candidates
        .iter()
        .map(|c| (strsim::levenshtein(key, c), *c))
        .filter(|(dist, _)| *dist <= 3)
        .min()
        .map(|(_, c)| c)
}

fn unknown_key(line: usize, key: &str, candidates: &[&str]) -> FieldError {
    let message = match nearest(key, candidates) {
        Some(c) => format!("unknown key, did you mean `{c}`?"),
        None => "unknown key".into(),
    };
    FieldError {
        line: Some(line),
        key: key.into(),
        message,
    }
}

fn split_items(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_scalar<T: FromStr>(value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("expected {}, found {value:?}", std::any::type_name::<T>()))
}

/// `lo..=hi` or `lo..=hi by step`.
fn split_range(item: &str) -> Option<(&str, &str, Option<&str>)> {
    let (lo, rest) = item.split_once("..=")?;
    match rest.split_once(" by ") {
        Some((hi, step)) => Some((lo.trim(), hi.trim(), Some(step.trim()))),
        None => Some((lo.trim(), rest.trim(), None)),
    }
}

fn parse_int_list<T: TryFrom<u64>>(value: &str) -> Result<Vec<T>, String> {
    let mut raw = Vec::new();
    for item in split_items(value) {
        match split_range(item) {
            Some((lo, hi, step)) => {
                let lo: u64 = parse_scalar(lo)?;
                let hi: u64 = parse_scalar(hi)?;
                let step: u64 = step.map(parse_scalar).transpose()?.unwrap_or(1);
                if step == 0 || hi < lo {
                    return Err(format!("empty range {item:?}"));
                }
                raw.extend((lo..=hi).step_by(step as usize));
            }
            None => raw.push(parse_scalar(item)?),
        }
    }
    raw.into_iter()
        .map(|v| T::try_from(v).map_err(|_| format!("{v} out of range")))
        .collect()
}

fn parse_float_list(value: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in split_items(value) {
        let x = match split_range(item) {
            Some((lo, hi, step)) => {
                let lo: f64 = parse_scalar(lo)?;
                let hi: f64 = parse_scalar(hi)?;
                let step: f64 = match step {
                    Some(s) => parse_scalar(s)?,
                    None => return Err(format!("float range {item:?} needs `by step`")),
                };
                if !(step > 0.0) || hi < lo {
                    return Err(format!("empty range {item:?}"));
                }
                let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
                // round to 12 decimals so that 0.1-steps print as typed
                out.extend((0..count).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12));
                continue;
            }
            None => parse_scalar::<f64>(item)?,
        };
        if !x.is_finite() {
            return Err(format!("{item:?} is not finite"));
        }
        out.push(x);
    }
    Ok(out)
}

struct Entry {
    line: usize,
    key: String,
    value: String,
}

/// Raw assignments, grouped by section.
struct Document {
    top: Vec<Entry>,
    sections: Vec<(Experiment, usize, Vec<Entry>)>,
}

impl Document {
    fn read(text: &str) -> Result<Self, ConfigError> {
        let mut doc = Document {
            top: Vec::new(),
            sections: Vec::new(),
        };
        let mut errors = Vec::new();
        let known = all_keys();
        let section_names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
                let name = name.trim();
                match name.parse::<Experiment>() {
                    Ok(e) => doc.sections.push((e, line, Vec::new())),
                    Err(_) => {
                        let mut err = unknown_key(line, name, &section_names);
                        err.message = err.message.replace("key", "section");
                        errors.push(err);
                    }
                }
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                errors.push(FieldError {
                    line: Some(line),
                    key: String::new(),
                    message: format!("expected `key = value`, found {body:?}"),
                });
                continue;
            };
            let key = key.trim();
            let entry = Entry {
                line,
                key: key.into(),
                value: value.trim().into(),
            };
            match doc.sections.last_mut() {
                Some((exp, _, entries)) => {
                    if exp.keys().contains(&key) {
                        entries.push(entry);
                    } else {
                        errors.push(unknown_key(line, key, exp.keys()));
                    }
                }
                None => {
                    if known.contains(&key) {
                        doc.top.push(entry);
                    } else {
                        errors.push(unknown_key(line, key, &known));
                    }
                }
            }
        }
        if errors.is_empty() {
            Ok(doc)
        } else {
            Err(ConfigError { errors })
        }
    }

    fn experiment(&self, selected: Option<Experiment>) -> Result<Experiment, ConfigError> {
        let single = |line: Option<usize>, key: &str, message: String| ConfigError {
            errors: vec![FieldError {
                line,
                key: key.into(),
                message,
            }],
        };
        let declared = match self.top.iter().rfind(|e| e.key == "experiment") {
            Some(e) => Some((e.value.parse::<Experiment>().map_err(|m| single(Some(e.line), "experiment", m))?, e.line)),
            None => None,
        };
        match (selected, declared) {
            (Some(s), Some((dec, line))) if s != dec => Err(single(
                Some(line),
                "experiment",
                format!("file declares {dec} but {s} was requested"),
            )),
            (Some(s), _) => Ok(s),
            (None, Some((dec, _))) => Ok(dec),
            (None, None) => match self.sections.as_slice() {
                [(e, _, _)] => Ok(*e),
                _ => Err(single(None, "experiment", "missing required field".into())),
            },
        }
    }

    fn entries_for(&self, experiment: Experiment) -> impl Iterator<Item = &Entry> {
        let top = self
            .top
            .iter()
            .filter(move |e| e.key != "experiment" && experiment.keys().contains(&e.key.as_str()));
        let sections = self
            .sections
            .iter()
            .filter(move |(e, _, _)| *e == experiment)
            .flat_map(|(_, _, entries)| entries.iter());
        top.chain(sections)
    }
}
