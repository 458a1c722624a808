//! Variational eigensolver under attack: gradient descent on
//! `Tr(ℋ 𝓔_θ(ρ₀))` with a Pauli-sum Hamiltonian.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::Rng;

use crate::ansatz::PQChAnsatz;
use crate::error::{Error, Result};
use crate::gates::Pauli;
use crate::matrix::ComplexMatrix;
use crate::seed;
use crate::state::{add_pauli_string, DensityMatrix, Observable};
use crate::trainability::all_gradients;

/// Largest register diagonalised densely.
pub const EXACT_MAX_QUBITS: usize = 10;
/// Slack allowed when checking energies against the spectrum.
const SPECTRUM_SLACK: f64 = 1e-9;

/// `ℋ = Σ_j c_j P_j` with real `c_j` and Pauli words `P_j` on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTermHamiltonian {
    n: usize,
    terms: Vec<(f64, Vec<Pauli>)>,
}

impl PauliTermHamiltonian {
    pub fn new(n: usize, terms: Vec<(f64, Vec<Pauli>)>) -> Result<Self> {
        for (_, word) in &terms {
            if word.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: word.len(),
                });
            }
        }
        Ok(Self { n, terms })
    }

    /// Parses `coefficient word` lines; `#` starts a comment and blank lines
    /// are skipped. The word may be split by whitespace (`1.0 Z I`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut tokens = body.split_whitespace();
            let coeff_text = tokens.next().unwrap();
            let coeff: f64 = coeff_text.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad coefficient {coeff_text:?}"),
            })?;
            if !coeff.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("coefficient {coeff_text:?} is not finite"),
                });
            }
            let letters: String = tokens.collect();
            if letters.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "missing Pauli word".into(),
                });
            }
            let word = letters
                .chars()
                .map(Pauli::try_from)
                .collect::<Result<Vec<_>>>()
                .map_err(|_| Error::Parse {
                    line,
                    message: format!("bad Pauli word {letters:?}"),
                })?;
            match n {
                None => n = Some(word.len()),
                Some(m) if m != word.len() => {
                    return Err(Error::Parse {
                        line,
                        message: format!("word {letters:?} has {} letters, expected {m}", word.len()),
                    })
                }
                _ => {}
            }
            terms.push((coeff, word));
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            message: "no terms".into(),
        })?;
        Ok(Self { n, terms })
    }

    #[inline]
    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, Vec<Pauli>)] {
        &self.terms
    }

    pub fn observable(&self) -> Observable {
        let d = 1 << self.n;
        let mut m = ComplexMatrix::zeros(d, d);
        for (c, word) in &self.terms {
            add_pauli_string(&mut m, word, *c);
        }
        Observable::new(m).expect("real coefficients give a Hermitian sum")
    }

    /// `(λ_min, λ_max)` by dense diagonalisation.
    pub fn spectrum_bounds(&self) -> Result<(f64, f64)> {
        if self.n > EXACT_MAX_QUBITS {
            return Err(Error::ResourceLimit {
                what: "qubits for dense diagonalisation",
                limit: EXACT_MAX_QUBITS,
                found: self.n,
            });
        }
        let values = self.observable().matrix().hermitian_eigenvalues()?;
        Ok((values[0], values[values.len() - 1]))
    }
}

pub fn exact_ground_energy(h: &PauliTermHamiltonian) -> Result<f64> {
    h.spectrum_bounds().map(|(lo, _)| lo)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub max_iters: usize,
    /// Stop once `max_k |∂_k C|` falls below this.
    pub grad_tolerance: f64,
    /// Seeds the initial parameters.
    pub seed: u64,
    /// Initial angles are drawn from `Unif[0, 2π·init_width)`.
    pub init_width: f64,
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::OutOfRange {
                name: "learning rate",
                value: self.learning_rate,
                range: "(0, ∞)",
            });
        }
        if !(self.grad_tolerance > 0.0) {
            return Err(Error::OutOfRange {
                name: "gradient tolerance",
                value: self.grad_tolerance,
                range: "(0, ∞)",
            });
        }
        if !(self.init_width > 0.0 && self.init_width <= 1.0) {
            return Err(Error::OutOfRange {
                name: "initial width",
                value: self.init_width,
                range: "(0, 1]",
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryStep {
    pub iteration: usize,
    pub energy: f64,
    /// `max_k |∂_k C|`.
    pub grad_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub steps: Vec<TrajectoryStep>,
    pub final_energy: f64,
    pub ground_energy_exact: f64,
    /// `final_energy − ground_energy_exact`.
    pub bias: f64,
    pub theta: Vec<f64>,
}

/// Initial parameters for `opt.seed`.
pub fn initial_params(ansatz: &PQChAnsatz, opt: &OptimizerConfig) -> Vec<f64> {
    let mut rng = seed::stream(seed::derive(opt.seed, &[seed::label("vqe-init")]));
    (0..ansatz.param_count()).map(|_| TAU * opt.init_width * rng.random::<f64>()).collect()
}

/// Plain gradient descent with all partial derivatives evaluated in closed form.
pub fn run_vqe(h: &PauliTermHamiltonian, ansatz: &PQChAnsatz, opt: &OptimizerConfig, rho0: &DensityMatrix) -> Result<TrajectoryRecord> {
    opt.validate()?;
    if h.qubits() != ansatz.qubits() {
        return Err(Error::DimensionMismatch {
            expected: ansatz.qubits(),
            found: h.qubits(),
        });
    }
    let obs = h.observable();
    let (lo, hi) = h.spectrum_bounds()?;
    let mut theta = initial_params(ansatz, opt);
    let mut steps = Vec::with_capacity(opt.max_iters + 1);
    let mut iteration = 0;
    let final_energy = loop {
        let (energy, grads) = all_gradients(ansatz, &theta, rho0, &obs)?;
        if energy < lo - SPECTRUM_SLACK || energy > hi + SPECTRUM_SLACK {
            return Err(Error::OutsideSpectrum {
                iteration,
                value: energy,
                min: lo,
                max: hi,
            });
        }
        let grad_norm = grads.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        steps.push(TrajectoryStep {
            iteration,
            energy,
            grad_norm,
        });
        if iteration == opt.max_iters || grad_norm < opt.grad_tolerance {
            break energy;
        }
        for (t, g) in theta.iter_mut().zip(&grads) {
            *t -= opt.learning_rate * g;
        }
        iteration += 1;
    };
    Ok(TrajectoryRecord {
        steps,
        final_energy,
        ground_energy_exact: lo,
        bias: final_energy - lo,
        theta,
    })
}
