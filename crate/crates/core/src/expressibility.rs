//! Kraus expressibility: distance between the two-copy moment of a channel
//! ensemble and the Haar two-copy moment,
//! `Δ = ‖E_𝓔[𝓔(ρ)^{⊗2}] − (α𝟙 + β·SWAP)‖₂`.
//!
//! Every term of `Δ²` is expressed through output states only:
//! `Tr M = 1`, `Tr(SWAP·M) = ν̄ = E[Tr 𝓔(ρ)²]` and
//! `‖M‖₂² = E_{𝓔,𝓕}[(Tr 𝓔(ρ)𝓕(ρ))²]`, so composed channels never need
//! their Kraus sums expanded.

use alloc::vec::Vec;

use crate::ansatz::{sample_params, PQChAnsatz, ParamInit};
use crate::channel::{apply_channel, KrausChannel};
use crate::error::{Error, Result};
use crate::haar::haar_unitary;
use crate::matrix::ComplexMatrix;
use crate::seed::{self, Stream};
use crate::state::DensityMatrix;
use crate::stats;

/// Largest register accepted by [`kraus_norm_direct`].
pub const DIRECT_MAX_QUBITS: usize = 4;

/// Coefficients of the Haar twirl `α𝟙 + β·SWAP` of `ρ⊗ρ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HaarMomentCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub d: usize,
}

impl HaarMomentCoeffs {
    /// `α𝟙 + β·SWAP` on `d² × d²`.
    pub fn operator(&self) -> ComplexMatrix {
        let d2 = self.d * self.d;
        let mut m = ComplexMatrix::swap(self.d).scale_real(self.beta);
        for i in 0..d2 {
            let v = m.get(i, i) + self.alpha;
            m.set(i, i, v);
        }
        m
    }

    /// `‖α𝟙 + β·SWAP‖₂² = (α² + β²)d² + 2αβd`.
    pub fn norm_sq(&self) -> f64 {
        let d = self.d as f64;
        (self.alpha * self.alpha + self.beta * self.beta) * d * d + 2.0 * self.alpha * self.beta * d
    }
}

/// `α = (d − Tr ρ²)/(d(d²−1))`, `β = (d·Tr ρ² − 1)/(d(d²−1))`.
pub fn haar_moment_coeffs(rho: &DensityMatrix) -> Result<HaarMomentCoeffs> {
    let d = rho.dim();
    if d < 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: d });
    }
    let p = rho.purity();
    let df = d as f64;
    let den = df * (df * df - 1.0);
    Ok(HaarMomentCoeffs {
        alpha: (df - p) / den,
        beta: (df * p - 1.0) / den,
        d,
    })
}

/// Monte Carlo average of `(UρU†)^{⊗2}` over `samples` Haar unitaries.
pub fn haar_twirl_estimate(rho: &DensityMatrix, samples: usize, seed: u64) -> ComplexMatrix {
    let d = rho.dim();
    let mut rng = seed::stream(seed);
    let mut acc = ComplexMatrix::zeros(d * d, d * d);
    for _ in 0..samples {
        let u = haar_unitary(d, &mut rng);
        let out = &(&u * rho.matrix()) * &u.adjoint();
        acc += &out.kron(&out);
    }
    acc.scale_real(1.0 / samples as f64)
}

/// A distribution over channels, sampled one realisation at a time.
pub trait ChannelEnsemble {
    fn dim(&self) -> usize;

    /// `𝓔(ρ)` for one realisation `𝓔` drawn with `rng`.
    fn realize(&self, rho: &DensityMatrix, rng: &mut Stream) -> Result<DensityMatrix>;
}

/// A single fixed channel (a point-mass ensemble).
impl ChannelEnsemble for KrausChannel {
    fn dim(&self) -> usize {
        self.dim_in()
    }

    fn realize(&self, rho: &DensityMatrix, _rng: &mut Stream) -> Result<DensityMatrix> {
        apply_channel(self, rho)
    }
}

/// Ansatz realisations with parameters drawn by `init`, noise held fixed.
#[derive(Clone, Copy, Debug)]
pub struct AnsatzEnsemble<'a> {
    pub ansatz: &'a PQChAnsatz,
    pub init: &'a ParamInit,
}

impl ChannelEnsemble for AnsatzEnsemble<'_> {
    fn dim(&self) -> usize {
        self.ansatz.dim()
    }

    fn realize(&self, rho: &DensityMatrix, rng: &mut Stream) -> Result<DensityMatrix> {
        let theta = sample_params(self.ansatz, self.init, rng);
        self.ansatz.forward(&theta, rho)
    }
}

/// Haar-random unitary conjugation on `2^n` dimensions.
#[derive(Clone, Copy, Debug)]
pub struct HaarEnsemble {
    pub n: usize,
}

impl ChannelEnsemble for HaarEnsemble {
    fn dim(&self) -> usize {
        1 << self.n
    }

    fn realize(&self, rho: &DensityMatrix, rng: &mut Stream) -> Result<DensityMatrix> {
        let u = haar_unitary(self.dim(), rng);
        rho.evolve(&u)
    }
}

/// Output of trial `trial`, drawn from its own stream under `point_seed`.
pub fn trial_output<E: ChannelEnsemble + ?Sized>(
    ensemble: &E,
    rho: &DensityMatrix,
    point_seed: u64,
    trial: usize,
) -> Result<DensityMatrix> {
    ensemble.realize(rho, &mut seed::trial_stream(point_seed, trial as u64))
}

pub fn trial_outputs<E: ChannelEnsemble + ?Sized>(
    ensemble: &E,
    rho: &DensityMatrix,
    trials: usize,
    point_seed: u64,
) -> Result<Vec<DensityMatrix>> {
    if ensemble.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: ensemble.dim(),
            found: rho.dim(),
        });
    }
    (0..trials).map(|t| trial_output(ensemble, rho, point_seed, t)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpressibilityEstimate {
    pub delta_sq: f64,
    /// Ensemble-averaged output purity.
    pub nu_bar: f64,
    /// `E[(Tr 𝓔(ρ)𝓕(ρ))²]` over independent pairs.
    pub n_noise: f64,
    pub trials: usize,
    pub std_err: f64,
}

/// `Δ² = (α²+β²)d² + 2αβd − 2(α + βν̄) + 𝒩_noise`.
pub fn kraus_norm_from_terms(coeffs: &HaarMomentCoeffs, nu_bar: f64, n_noise: f64) -> f64 {
    coeffs.norm_sq() - 2.0 * (coeffs.alpha + coeffs.beta * nu_bar) + n_noise
}

/// Closed form for a single fixed channel with output purity `ν`, where the
/// noise term degenerates to `ν²`.
pub fn kraus_norm_fixed(nu: f64, rho: &DensityMatrix) -> Result<f64> {
    if !(nu > 0.0 && nu <= 1.0 + 1e-12) {
        return Err(Error::OutOfRange {
            name: "purity",
            value: nu,
            range: "(0, 1]",
        });
    }
    Ok(kraus_norm_from_terms(&haar_moment_coeffs(rho)?, nu, nu * nu))
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < 2 {
        return Err(Error::TooFewTrials { min: 2, found: trials });
    }
    Ok(())
}

/// Ensemble estimator from sampled outputs. `ν̄` uses every output; the noise
/// term pairs outputs `(2i, 2i+1)`, which keeps each pair independent.
pub fn estimate_from_outputs(rho: &DensityMatrix, outputs: &[DensityMatrix]) -> Result<ExpressibilityEstimate> {
    check_trials(outputs.len())?;
    let coeffs = haar_moment_coeffs(rho)?;
    let purities: Vec<f64> = outputs.iter().map(DensityMatrix::purity).collect();
    let nu_bar = stats::mean(&purities);
    let mut overlaps_sq = Vec::with_capacity(outputs.len() / 2);
    let mut per_pair = Vec::with_capacity(outputs.len() / 2);
    for (i, pair) in outputs.chunks_exact(2).enumerate() {
        let o = pair[0].overlap(&pair[1]);
        overlaps_sq.push(o * o);
        per_pair.push(o * o - coeffs.beta * (purities[2 * i] + purities[2 * i + 1]));
    }
    let n_noise = stats::mean(&overlaps_sq);
    let std_err = if per_pair.len() >= 2 {
        stats::std_err_mean(&per_pair)
    } else {
        0.0
    };
    Ok(ExpressibilityEstimate {
        delta_sq: kraus_norm_from_terms(&coeffs, nu_bar, n_noise),
        nu_bar,
        n_noise,
        trials: outputs.len(),
        std_err,
    })
}

/// Monte Carlo estimate of `Δ²` over `trials` realisations.
pub fn kraus_norm_ensemble<E: ChannelEnsemble + ?Sized>(
    ensemble: &E,
    rho: &DensityMatrix,
    trials: usize,
    point_seed: u64,
) -> Result<ExpressibilityEstimate> {
    check_trials(trials)?;
    estimate_from_outputs(rho, &trial_outputs(ensemble, rho, trials, point_seed)?)
}

/// Per-realisation expressibility: each sampled parameter vector is treated
/// as a fixed channel, and the closed form is averaged over realisations.
pub fn fixed_parameter_estimate(rho: &DensityMatrix, outputs: &[DensityMatrix]) -> Result<ExpressibilityEstimate> {
    check_trials(outputs.len())?;
    let purities: Vec<f64> = outputs.iter().map(DensityMatrix::purity).collect();
    let values = purities
        .iter()
        .map(|&nu| kraus_norm_fixed(nu.min(1.0), rho))
        .collect::<Result<Vec<f64>>>()?;
    let squares: Vec<f64> = purities.iter().map(|p| p * p).collect();
    Ok(ExpressibilityEstimate {
        delta_sq: stats::mean(&values),
        nu_bar: stats::mean(&purities),
        n_noise: stats::mean(&squares),
        trials: outputs.len(),
        std_err: stats::std_err_mean(&values),
    })
}

/// `M = (1/T) Σ 𝓔_t(ρ)^{⊗2}`.
pub fn two_copy_moment(outputs: &[DensityMatrix]) -> ComplexMatrix {
    let d = outputs[0].dim();
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for o in outputs {
        m += &o.matrix().kron(o.matrix());
    }
    m.scale_real(1.0 / outputs.len() as f64)
}

/// `‖M − (α𝟙 + β·SWAP)‖₂` with `M` built explicitly from outputs.
pub fn direct_from_outputs(rho: &DensityMatrix, outputs: &[DensityMatrix]) -> Result<f64> {
    if outputs.is_empty() {
        return Err(Error::TooFewTrials { min: 1, found: 0 });
    }
    check_direct_size(rho)?;
    let haar = haar_moment_coeffs(rho)?.operator();
    Ok((&two_copy_moment(outputs) - &haar).frobenius_norm())
}

fn check_direct_size(rho: &DensityMatrix) -> Result<()> {
    if rho.qubits() > DIRECT_MAX_QUBITS {
        return Err(Error::ResourceLimit {
            what: "qubits for the two-copy superoperator",
            limit: DIRECT_MAX_QUBITS,
            found: rho.qubits(),
        });
    }
    Ok(())
}

/// Two-copy superoperator oracle for `Δ`. Its square is biased upward by
/// `(E[ν²] − 𝒩_noise)/T ≤ 1/T` because `M` includes self-pairs.
pub fn kraus_norm_direct<E: ChannelEnsemble + ?Sized>(
    ensemble: &E,
    rho: &DensityMatrix,
    trials: usize,
    point_seed: u64,
) -> Result<f64> {
    check_direct_size(rho)?;
    direct_from_outputs(rho, &trial_outputs(ensemble, rho, trials.max(1), point_seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_hea, Topology};
    use crate::gates;

    fn zero_state(n: usize) -> DensityMatrix {
        DensityMatrix::basis(n, 0)
    }

    #[test]
    fn coefficient_identities() {
        let mut rng = seed::stream(41);
        for n in 1..=3 {
            let rho = crate::state::random_density_matrix(n, 2, &mut rng);
            let c = haar_moment_coeffs(&rho).unwrap();
            let d = c.d as f64;
            assert!((c.alpha * d * d + c.beta * d - 1.0).abs() < 1e-12);
            assert!((c.alpha * d + c.beta * d * d - rho.purity()).abs() < 1e-12);
            assert!((c.operator().frobenius_norm().powi(2) - c.norm_sq()).abs() < 1e-12);
        }
        let c = haar_moment_coeffs(&zero_state(1)).unwrap();
        assert!((c.alpha - 1.0 / 6.0).abs() < 1e-15 && (c.beta - 1.0 / 6.0).abs() < 1e-15);
        let c = haar_moment_coeffs(&DensityMatrix::maximally_mixed(1)).unwrap();
        assert!((c.alpha - 0.25).abs() < 1e-15 && c.beta.abs() < 1e-15);
        let c = haar_moment_coeffs(&zero_state(3)).unwrap();
        assert!((c.alpha - 1.0 / 72.0).abs() < 1e-15);
    }

    #[test]
    fn fixed_unitary_closed_form() {
        let rho = zero_state(1);
        assert!((kraus_norm_fixed(1.0, &rho).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(kraus_norm_fixed(0.5, &DensityMatrix::maximally_mixed(1)).unwrap().abs() < 1e-15);
        assert!(kraus_norm_fixed(0.0, &rho).is_err());
        assert!(kraus_norm_fixed(1.5, &rho).is_err());
    }

    #[test]
    fn fixed_norm_minimised_at_maximal_mixing() {
        let rho = zero_state(2);
        let grid: Vec<f64> = (0..=30).map(|i| 0.25 + 0.75 * i as f64 / 30.0).collect();
        let values: Vec<f64> = grid.iter().map(|&nu| kraus_norm_fixed(nu, &rho).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
        // fully mixed output: Δ² = (d − 1)/(d²(d + 1)) at d = 4
        assert!((values[0] - 3.0 / 80.0).abs() < 1e-12);
    }

    #[test]
    fn single_channel_routes_agree() {
        let rho = zero_state(1);
        let u = KrausChannel::unitary(gates::hadamard()).unwrap();
        let est = kraus_norm_ensemble(&u, &rho, 10, 1).unwrap();
        assert!((est.delta_sq - 2.0 / 3.0).abs() < 1e-12);
        assert!((est.n_noise - est.nu_bar * est.nu_bar).abs() < 1e-15);
        let direct = kraus_norm_direct(&u, &rho, 1, 1).unwrap();
        assert!((direct - (2.0f64 / 3.0).sqrt()).abs() < 1e-10);
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!(kraus_norm_ensemble(&u, &mixed, 4, 1).unwrap().delta_sq.abs() < 1e-12);
        assert!(kraus_norm_direct(&u, &mixed, 1, 1).unwrap() < 1e-10);
    }

    #[test]
    fn maximally_mixed_input_vanishes_for_unital_ensembles() {
        let a = build_hea(2, 2, 0.8, Topology::Ladder).unwrap();
        let init = ParamInit::full(0);
        let ens = AnsatzEnsemble { ansatz: &a, init: &init };
        let rho = DensityMatrix::maximally_mixed(2);
        let est = kraus_norm_ensemble(&ens, &rho, 20, 3).unwrap();
        assert!(est.delta_sq.abs() < 1e-12);
        assert!(kraus_norm_direct(&ens, &rho, 20, 3).unwrap() < 1e-10);
    }

    #[test]
    fn lemma_twirl_matches_monte_carlo() {
        for rho in [zero_state(1), DensityMatrix::maximally_mixed(1)] {
            let twirl = haar_twirl_estimate(&rho, 20_000, 5);
            let exact = haar_moment_coeffs(&rho).unwrap().operator();
            assert!(twirl.max_abs_diff(&exact) < 0.02);
        }
    }

    #[test]
    fn haar_ensemble_is_nearly_a_design() {
        let rho = zero_state(2);
        let est = kraus_norm_ensemble(&HaarEnsemble { n: 2 }, &rho, 4000, 6).unwrap();
        assert!(est.delta_sq.abs() < 3.0 * est.std_err + 1e-12, "{est:?}");
    }

    #[test]
    fn too_few_trials() {
        let u = KrausChannel::identity(2);
        assert!(matches!(kraus_norm_ensemble(&u, &zero_state(1), 1, 0), Err(Error::TooFewTrials { .. })));
        assert!(kraus_norm_direct(&KrausChannel::identity(32), &zero_state(5), 1, 0).is_err());
    }

    #[test]
    fn fixed_parameter_estimate_reduces_to_closed_form() {
        let rho = zero_state(1);
        let out = rho.evolve(&gates::hadamard()).unwrap();
        let est = fixed_parameter_estimate(&rho, &[out.clone(), out]).unwrap();
        assert!((est.delta_sq - 2.0 / 3.0).abs() < 1e-12 && est.std_err == 0.0);
    }

    #[test]
    fn deeper_noiseless_circuits_are_more_expressive() {
        let rho = zero_state(2);
        let init = ParamInit::full(0);
        let norm = |depth| {
            let a = build_hea(2, depth, 1.0, Topology::Ladder).unwrap();
            kraus_norm_direct(&AnsatzEnsemble { ansatz: &a, init: &init }, &rho, 5000, 7).unwrap()
        };
        let (shallow, deep) = (norm(1), norm(20));
        assert!(deep < shallow, "{deep} vs {shallow}");
        assert!(deep < 0.05, "{deep}");
    }
}
