//! Cost, gradients and gradient-variance statistics.
//!
//! For the gate `U_k = exp(−iθ_k V_k)` with `ρ_R` the state entering it and
//! `ℋ_L` the observable pulled back to just after it,
//!
//! ```text
//! ∂_k C = cos 2θ_k · i Tr(ρ_R [V_k, ℋ_L]) − sin 2θ_k · Tr(ρ_R (ℋ_L − V_k ℋ_L V_k))
//! ```

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, TAU};

use rand::Rng;

use crate::ansatz::{backward_trace, sample_params, AnsatzSplit, PQChAnsatz, ParamInit};
use crate::error::{Error, Result};
use crate::expressibility::{direct_from_outputs, ChannelEnsemble};
use crate::gates::Pauli;
use crate::haar::haar_unitary;
use crate::local;
use crate::matrix::ComplexMatrix;
use crate::seed::{self, Stream};
use crate::state::{DensityMatrix, Observable};
use crate::stats;

/// Largest register for Haar-random right halves.
pub const REFERENCE_MAX_QUBITS: usize = 6;
/// Largest register for the deviation bound (two-copy norm of the right half).
pub const BOUND_MAX_QUBITS: usize = 3;

/// Imaginary residue tolerated in `Tr(ℋρ)` before it is dropped.
const IMAG_TOL: f64 = 1e-10;

fn real_trace(z: num_complex::Complex64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::NotHermitian(z.im.abs()));
    }
    Ok(z.re)
}

/// `C(θ) = Tr(ℋ 𝓔_θ(ρ₀))`.
pub fn cost(ansatz: &PQChAnsatz, theta: &[f64], rho0: &DensityMatrix, obs: &Observable) -> Result<f64> {
    if obs.dim() != ansatz.dim() {
        return Err(Error::DimensionMismatch {
            expected: ansatz.dim(),
            found: obs.dim(),
        });
    }
    real_trace(ansatz.forward(theta, rho0)?.expectation(obs))
}

/// Closed-form derivative from `ρ_R` and `ℋ_L` (full-register matrices).
pub fn grad_from_parts(rho_r: &ComplexMatrix, h_l: &ComplexMatrix, n: usize, qubit: usize, generator: Pauli, theta_k: f64) -> f64 {
    let v = generator.matrix();
    let mut vh = h_l.clone();
    local::left_apply(&mut vh, n, &[qubit], &v);
    // ρ, ℋ Hermitian: Tr(ρ[V,ℋ]) = 2i·Im Tr(ρVℋ)
    let a = -2.0 * rho_r.trace_product(&vh).im;
    let vhv = local::conjugate(h_l, n, &[qubit], &v);
    let b = rho_r.trace_product(h_l).re - rho_r.trace_product(&vhv).re;
    let t2 = 2.0 * theta_k;
    a * libm::cos(t2) - b * libm::sin(t2)
}

/// `∂C/∂θ_k` for the split's parameter.
pub fn grad_analytic(split: &AnsatzSplit<'_>, rho0: &DensityMatrix, obs: &Observable) -> Result<f64> {
    let rho_r = split.apply_right(rho0)?;
    let h_l = split.adjoint_through_left(obs)?;
    Ok(grad_from_parts(
        rho_r.matrix(),
        h_l.matrix(),
        rho0.qubits(),
        split.qubit(),
        split.generator(),
        split.theta_k(),
    ))
}

/// `C(θ + π/4 e_k) − C(θ − π/4 e_k)`.
pub fn grad_shift_rule(ansatz: &PQChAnsatz, theta: &[f64], rho0: &DensityMatrix, obs: &Observable, k: usize) -> Result<f64> {
    if k >= theta.len() {
        return Err(Error::ParamIndex {
            index: k,
            count: theta.len(),
        });
    }
    let mut shifted = theta.to_vec();
    shifted[k] = theta[k] + FRAC_PI_4;
    let plus = cost(ansatz, &shifted, rho0, obs)?;
    shifted[k] = theta[k] - FRAC_PI_4;
    Ok(plus - cost(ansatz, &shifted, rho0, obs)?)
}

/// Cost and every partial derivative from one forward and one backward sweep.
pub fn all_gradients(ansatz: &PQChAnsatz, theta: &[f64], rho0: &DensityMatrix, obs: &Observable) -> Result<(f64, Vec<f64>)> {
    let states = ansatz.forward_trace(theta, rho0)?;
    let pulled = backward_trace(ansatz, theta, obs)?;
    let energy = real_trace(states.last().unwrap().trace_product(obs.matrix()))?;
    let n = ansatz.qubits();
    let mut grads = alloc::vec![0.0; ansatz.param_count()];
    for (pos, gate) in ansatz.gates().enumerate() {
        if let (Some(v), Some(k)) = (gate.generator(), gate.param_index) {
            grads[k] = grad_from_parts(&states[pos], &pulled[pos + 1], n, gate.qubits[0], v, theta[k]);
        }
    }
    Ok((energy, grads))
}

/// Sample statistics of a partial derivative over random parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradientStats {
    pub param_index: usize,
    pub mean: f64,
    /// Sample variance (divisor `trials − 1`).
    pub variance: f64,
    pub trials: usize,
    /// Jackknife standard error of `variance`.
    pub std_err_variance: f64,
    pub std_err_mean: f64,
}

impl GradientStats {
    pub fn from_samples(param_index: usize, grads: &[f64]) -> Result<Self> {
        if grads.len() < 3 {
            return Err(Error::TooFewTrials { min: 3, found: grads.len() });
        }
        Ok(Self {
            param_index,
            mean: stats::mean(grads),
            variance: stats::sample_variance(grads),
            trials: grads.len(),
            std_err_variance: stats::jackknife_variance_se(grads),
            std_err_mean: stats::std_err_mean(grads),
        })
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < 3 {
        return Err(Error::TooFewTrials { min: 3, found: trials });
    }
    Ok(())
}

/// `∂_k C` at a parameter vector drawn for trial `trial`.
pub fn gradient_trial(
    ansatz: &PQChAnsatz,
    init: &ParamInit,
    rho0: &DensityMatrix,
    obs: &Observable,
    k: usize,
    point_seed: u64,
    trial: usize,
) -> Result<f64> {
    let theta = sample_params(ansatz, init, &mut seed::trial_stream(point_seed, trial as u64));
    grad_analytic(&ansatz.split_at(&theta, k)?, rho0, obs)
}

/// Monte Carlo variance of `∂_k C` over parameters drawn by `init`.
pub fn grad_variance(
    ansatz: &PQChAnsatz,
    init: &ParamInit,
    rho0: &DensityMatrix,
    obs: &Observable,
    k: usize,
    trials: usize,
    point_seed: u64,
) -> Result<GradientStats> {
    check_trials(trials)?;
    let grads = (0..trials)
        .map(|t| gradient_trial(ansatz, init, rho0, obs, k, point_seed, t))
        .collect::<Result<Vec<f64>>>()?;
    GradientStats::from_samples(k, &grads)
}

/// Restricted-mode parameter law for window `w` of a sweep point.
pub fn window_init(r: f64, point_seed: u64, w: usize) -> Result<ParamInit> {
    ParamInit::with_width(r, seed::derive(point_seed, &[seed::label("window-base"), w as u64]))
}

/// Seed of the trials drawn inside window `w`.
pub fn window_point(point_seed: u64, w: usize) -> u64 {
    seed::derive(point_seed, &[seed::label("window-trials"), w as u64])
}

/// Gradient variance inside a sampling window, averaged over independently
/// drawn base points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowedStats {
    pub param_index: usize,
    /// Mean of the per-window sample variances.
    pub variance: f64,
    pub std_err: f64,
    /// Mean gradient over all samples.
    pub mean: f64,
    pub windows: usize,
    pub trials_per_window: usize,
}

impl WindowedStats {
    pub fn from_windows(param_index: usize, per_window: &[GradientStats]) -> Result<Self> {
        let first = per_window.first().ok_or(Error::TooFewTrials { min: 1, found: 0 })?;
        let vars: Vec<f64> = per_window.iter().map(|s| s.variance).collect();
        let means: Vec<f64> = per_window.iter().map(|s| s.mean).collect();
        let std_err = if per_window.len() > 1 {
            stats::std_err_mean(&vars)
        } else {
            first.std_err_variance
        };
        Ok(Self {
            param_index,
            variance: stats::mean(&vars),
            std_err,
            mean: stats::mean(&means),
            windows: per_window.len(),
            trials_per_window: first.trials,
        })
    }

    pub fn total_trials(&self) -> usize {
        self.windows * self.trials_per_window
    }
}

/// Variance of `∂_k C` for parameters drawn from windows of width `2πr`,
/// pooled over `windows` base points.
#[allow(clippy::too_many_arguments)]
pub fn windowed_grad_variance(
    ansatz: &PQChAnsatz,
    r: f64,
    rho0: &DensityMatrix,
    obs: &Observable,
    k: usize,
    windows: usize,
    trials_per_window: usize,
    point_seed: u64,
) -> Result<WindowedStats> {
    let per_window = (0..windows)
        .map(|w| {
            let init = window_init(r, point_seed, w)?;
            grad_variance(ansatz, &init, rho0, obs, k, trials_per_window, window_point(point_seed, w))
        })
        .collect::<Result<Vec<_>>>()?;
    WindowedStats::from_windows(k, &per_window)
}

/// Left half used with a Haar-random right half.
#[derive(Clone, Copy, Debug)]
pub enum ReferenceLeft<'a> {
    /// Nothing after the differentiated rotation; its angle is uniform.
    Identity { generator: Pauli, qubit: usize },
    /// The ansatz after parameter `k`, with parameters drawn by `init`.
    Ensemble {
        ansatz: &'a PQChAnsatz,
        init: &'a ParamInit,
        k: usize,
    },
}

fn check_reference_size(n: usize) -> Result<()> {
    if n > REFERENCE_MAX_QUBITS {
        return Err(Error::ResourceLimit {
            what: "qubits for Haar-random right halves",
            limit: REFERENCE_MAX_QUBITS,
            found: n,
        });
    }
    Ok(())
}

/// One gradient sample with `ρ_R = Uρ₀U†`, `U` Haar-random.
pub fn reference_trial(rho0: &DensityMatrix, obs: &Observable, left: &ReferenceLeft<'_>, point_seed: u64, trial: usize) -> Result<f64> {
    let n = rho0.qubits();
    check_reference_size(n)?;
    if obs.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            found: obs.dim(),
        });
    }
    let mut rng: Stream = seed::trial_stream(point_seed, trial as u64);
    let u = haar_unitary(rho0.dim(), &mut rng);
    let rho_r = rho0.evolve(&u)?;
    match *left {
        ReferenceLeft::Identity { generator, qubit } => {
            local::check_qubits(n, &[qubit])?;
            let theta_k = TAU * rng.random::<f64>();
            Ok(grad_from_parts(rho_r.matrix(), obs.matrix(), n, qubit, generator, theta_k))
        }
        ReferenceLeft::Ensemble { ansatz, init, k } => {
            let theta = sample_params(ansatz, init, &mut rng);
            let split = ansatz.split_at(&theta, k)?;
            let h_l = split.adjoint_through_left(obs)?;
            Ok(grad_from_parts(rho_r.matrix(), h_l.matrix(), n, split.qubit(), split.generator(), split.theta_k()))
        }
    }
}

/// Gradient variance when the right half is replaced by a Haar-random
/// unitary (an exact 2-design).
pub fn reference_variance(
    rho0: &DensityMatrix,
    obs: &Observable,
    left: &ReferenceLeft<'_>,
    trials: usize,
    point_seed: u64,
) -> Result<GradientStats> {
    check_trials(trials)?;
    let k = match left {
        ReferenceLeft::Identity { .. } => 0,
        ReferenceLeft::Ensemble { k, .. } => *k,
    };
    let grads = (0..trials)
        .map(|t| reference_trial(rho0, obs, left, point_seed, t))
        .collect::<Result<Vec<f64>>>()?;
    GradientStats::from_samples(k, &grads)
}

/// The gates before parameter `k`, with parameters drawn by `init`.
#[derive(Clone, Copy, Debug)]
pub struct RightEnsemble<'a> {
    pub ansatz: &'a PQChAnsatz,
    pub init: &'a ParamInit,
    pub k: usize,
}

impl ChannelEnsemble for RightEnsemble<'_> {
    fn dim(&self) -> usize {
        self.ansatz.dim()
    }

    fn realize(&self, rho: &DensityMatrix, rng: &mut Stream) -> Result<DensityMatrix> {
        let theta = sample_params(self.ansatz, self.init, rng);
        self.ansatz.split_at(&theta, self.k)?.apply_right(rho)
    }
}

/// `‖𝓔_L†(ℋ)‖₂²` for the left half drawn in trial `trial`.
pub fn attenuation_trial(ansatz: &PQChAnsatz, init: &ParamInit, obs: &Observable, k: usize, point_seed: u64, trial: usize) -> Result<f64> {
    let theta = sample_params(ansatz, init, &mut seed::trial_stream(point_seed, trial as u64));
    let h = ansatz.split_at(&theta, k)?.adjoint_through_left(obs)?;
    Ok(h.norm() * h.norm())
}

/// Both sides of the deviation bound
/// `|E[var] − var_R| ≤ 4 ‖𝒜²_R(ρ₀⊗²)‖₂ · E‖𝓔_L†(ℋ)‖₂²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    /// Standard error of `lhs`, combining both variance estimates.
    pub combined_std_err: f64,
    pub satisfied: bool,
    pub variance: GradientStats,
    pub reference: GradientStats,
    /// `‖𝒜²_R(ρ₀⊗²)‖₂` of the right half.
    pub right_norm: f64,
    /// `E‖𝓔_L†(ℋ)‖₂²`.
    pub attenuation: f64,
}

/// Estimates both sides of the deviation bound for parameter `k`, each
/// statistic from its own sub-stream of `point_seed`.
pub fn theorem2_bound(
    ansatz: &PQChAnsatz,
    init: &ParamInit,
    rho0: &DensityMatrix,
    obs: &Observable,
    k: usize,
    trials: usize,
    point_seed: u64,
) -> Result<BoundReport> {
    if ansatz.qubits() > BOUND_MAX_QUBITS {
        return Err(Error::ResourceLimit {
            what: "qubits for the deviation bound",
            limit: BOUND_MAX_QUBITS,
            found: ansatz.qubits(),
        });
    }
    check_trials(trials)?;
    let sub = |i: u64| seed::derive(point_seed, &[i]);
    let variance = grad_variance(ansatz, init, rho0, obs, k, trials, sub(0))?;
    let left = ReferenceLeft::Ensemble { ansatz, init, k };
    let reference = reference_variance(rho0, obs, &left, trials, sub(1))?;
    let right = RightEnsemble { ansatz, init, k };
    let outputs = crate::expressibility::trial_outputs(&right, rho0, trials, sub(2))?;
    let right_norm = direct_from_outputs(rho0, &outputs)?;
    let atten = (0..trials)
        .map(|t| attenuation_trial(ansatz, init, obs, k, sub(3), t))
        .collect::<Result<Vec<f64>>>()?;
    let attenuation = stats::mean(&atten);
    Ok(assemble_bound(variance, reference, right_norm, attenuation))
}

/// Combines independently estimated pieces into a [`BoundReport`].
pub fn assemble_bound(variance: GradientStats, reference: GradientStats, right_norm: f64, attenuation: f64) -> BoundReport {
    let lhs = (variance.variance - reference.variance).abs();
    let rhs = 4.0 * right_norm * attenuation;
    let combined_std_err = libm::sqrt(
        variance.std_err_variance * variance.std_err_variance + reference.std_err_variance * reference.std_err_variance,
    );
    BoundReport {
        lhs,
        rhs,
        combined_std_err,
        satisfied: lhs <= rhs + 3.0 * combined_std_err,
        variance,
        reference,
        right_norm,
        attenuation,
    }
}
