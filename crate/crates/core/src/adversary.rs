//! Adversarial models for a non-local CNOT.
//!
//! A *strong* adversary replaces the shared Bell pair `(|00⟩+|11⟩)/√2` by an
//! arbitrary two-qubit pure state `Σ c_ij |ij⟩`. Run through the
//! cat-entangler/cat-disentangler protocol, that state turns the CNOT into the
//! four-operator channel built by [`noisy_cnot_channel`]. A *weak* adversary
//! leaves the resource intact and wraps the ideal gate in local Pauli noise
//! ([`weak_adversary_channel`]).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::channel::{choi_matrix, KrausChannel};
use crate::error::{Error, Result};
use crate::gates;
use crate::matrix::{ComplexMatrix, ZERO};
use crate::state::DensityMatrix;

/// Normalisation tolerance on `Σ|c_ij|²`.
pub const NORM_TOL: f64 = 1e-12;

/// Amplitudes `(c00, c01, c10, c11)` of the perturbed shared pair on
/// `(q_A, q_B)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationParams {
    c: [Complex64; 4],
}

impl PerturbationParams {
    /// Rejects amplitudes whose squared norms do not sum to one.
    pub fn new(c00: Complex64, c01: Complex64, c10: Complex64, c11: Complex64) -> Result<Self> {
        let c = [c00, c01, c10, c11];
        let norm: f64 = c.iter().map(|x| x.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { c })
    }

    pub fn real(c00: f64, c01: f64, c10: f64, c11: f64) -> Result<Self> {
        Self::new(c00.into(), c01.into(), c10.into(), c11.into())
    }

    /// The ideal resource `(|00⟩ + |11⟩)/√2`.
    pub fn bell() -> Self {
        Self {
            c: [FRAC_1_SQRT_2.into(), ZERO, ZERO, FRAC_1_SQRT_2.into()],
        }
    }

    #[inline]
    pub fn amplitudes(&self) -> [Complex64; 4] {
        self.c
    }

    #[inline]
    pub fn c(&self, a: usize, b: usize) -> Complex64 {
        self.c[2 * a + b]
    }

    /// The shared pair as a two-qubit state, `q_A` the leading factor.
    pub fn state(&self) -> DensityMatrix {
        DensityMatrix::pure(&self.c).expect("normalised by construction")
    }
}

/// `a·𝟙 + b·σ_X`.
fn id_x(a: Complex64, b: Complex64) -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![a, b, b, a]).unwrap()
}

/// Kraus operators `E_00, E_01, E_10, E_11` of the non-local CNOT realised
/// with the shared pair `p`, indexed by the `(q_A, q_B)` measurement outcomes:
///
/// ```text
/// E_00 = |0⟩⟨0| ⊗ (c00 𝟙 + c01 X)/√2 + |1⟩⟨1| ⊗ (c10 𝟙 + c11 X)/√2
/// E_01 = |0⟩⟨0| ⊗ (c00 𝟙 − c01 X)/√2 − |1⟩⟨1| ⊗ (c10 𝟙 − c11 X)/√2
/// E_10 = |0⟩⟨0| ⊗ (c11 𝟙 + c10 X)/√2 + |1⟩⟨1| ⊗ (c01 𝟙 + c00 X)/√2
/// E_11 = |0⟩⟨0| ⊗ (c11 𝟙 − c10 X)/√2 − |1⟩⟨1| ⊗ (c01 𝟙 − c00 X)/√2
/// ```
pub fn noisy_cnot_channel(p: &PerturbationParams) -> KrausChannel {
    let [c00, c01, c10, c11] = p.c;
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let p0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    let p1 = ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 0.0, 1.0]).unwrap();
    let block = |top: ComplexMatrix, bottom: ComplexMatrix, sign: f64| {
        let upper = p0.kron(&top).scale(s);
        let lower = p1.kron(&bottom).scale(s * sign);
        &upper + &lower
    };
    let ops = vec![
        block(id_x(c00, c01), id_x(c10, c11), 1.0),
        block(id_x(c00, -c01), id_x(c10, -c11), -1.0),
        block(id_x(c11, c10), id_x(c01, c00), 1.0),
        block(id_x(c11, -c10), id_x(c01, -c00), -1.0),
    ];
    KrausChannel::new(ops).expect("complete for normalised amplitudes")
}

/// `2|c00·c11 − c01·c10|`.
pub fn concurrence_pure(p: &PerturbationParams) -> f64 {
    let [c00, c01, c10, c11] = p.c;
    (2.0 * (c00 * c11 - c01 * c10).norm()).min(1.0)
}

/// Wootters concurrence `max{0, λ₁ − λ₂ − λ₃ − λ₄}`, with `λ_s` the
/// descending square roots of the eigenvalues of `ρ (σ_Y⊗σ_Y) ρ* (σ_Y⊗σ_Y)`.
///
/// With `ρ = W W†`, `W = V·√Λ`, the `λ_s` are the singular values of
/// `Wᵀ (σ_Y⊗σ_Y) W`, which avoids square roots of near-zero eigenvalues
/// amplifying round-off.
pub fn concurrence_mixed(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let yy = gates::pauli_y().kron(&gates::pauli_y());
    let (values, vectors) = rho.matrix().hermitian_eigen()?;
    let roots: Vec<Complex64> = values.iter().map(|&v| Complex64::new(libm::sqrt(v.max(0.0)), 0.0)).collect();
    let w = &vectors * &ComplexMatrix::diagonal(&roots);
    let tau = &(&w.transpose() * &yy) * &w;
    let l = tau.singular_values();
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Symmetric real family `(a, b, b, a)`, `a = √((1+κ)/4)`, `b = √((1−κ)/4)`,
/// whose concurrence is `κ`. `κ = 1` is the Bell pair, `κ = 0` the product
/// state `|++⟩`.
pub fn family_from_concurrence(kappa: f64) -> Result<PerturbationParams> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::OutOfRange {
            name: "concurrence",
            value: kappa,
            range: "[0, 1]",
        });
    }
    let a = libm::sqrt((1.0 + kappa) / 4.0);
    let b = libm::sqrt((1.0 - kappa) / 4.0);
    PerturbationParams::real(a, b, b, a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseModel {
    Depolarizing,
    BitFlip,
    PhaseFlip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Placement {
    Before,
    After,
    Both,
}

/// Local noise injected around an ideal CNOT by a weak adversary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakNoiseSpec {
    pub model: NoiseModel,
    pub strength: f64,
    pub placement: Placement,
}

impl WeakNoiseSpec {
    pub fn new(model: NoiseModel, strength: f64, placement: Placement) -> Result<Self> {
        if !(0.0..=1.0).contains(&strength) {
            return Err(Error::OutOfRange {
                name: "noise strength",
                value: strength,
                range: "[0, 1]",
            });
        }
        Ok(Self {
            model,
            strength,
            placement,
        })
    }

    fn single_qubit(&self) -> KrausChannel {
        match self.model {
            NoiseModel::Depolarizing => KrausChannel::depolarizing(self.strength),
            NoiseModel::BitFlip => KrausChannel::bit_flip(self.strength),
            NoiseModel::PhaseFlip => KrausChannel::phase_flip(self.strength),
        }
        .expect("strength validated")
    }
}

/// `N ∘ CNOT ∘ N` with `N = noise ⊗ noise` on `(q_c, q_t)`, stages present
/// according to `placement`, reduced to a minimal Kraus set.
pub fn weak_adversary_channel(spec: &WeakNoiseSpec) -> KrausChannel {
    let local = spec.single_qubit();
    let pair = local.tensor(&local);
    let mut ch = KrausChannel::unitary(gates::cnot()).expect("unitary");
    if matches!(spec.placement, Placement::Before | Placement::Both) {
        ch = ch.after(&pair).expect("4x4");
    }
    if matches!(spec.placement, Placement::After | Placement::Both) {
        ch = pair.after(&ch).expect("4x4");
    }
    ch.canonical().expect("valid channel")
}

/// Interval on the single-shot discrimination probability
/// `p_guess = ½(1 + ½‖𝒰 − 𝒦‖_⋄)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectabilityBounds {
    pub p_guess_lower: f64,
    pub p_guess_upper: f64,
    /// `‖J(𝒦) − J(𝒰)‖₁` of the unnormalised Choi matrices.
    pub choi_distance: f64,
}

impl DetectabilityBounds {
    /// Whether the stealth constraint `p_guess ≤ ε` is certainly met
    /// (`Some(true)`), certainly violated (`Some(false)`) or undecided.
    pub fn stealthy(&self, epsilon: f64) -> Option<bool> {
        if self.p_guess_upper <= epsilon {
            Some(true)
        } else if self.p_guess_lower > epsilon {
            Some(false)
        } else {
            None
        }
    }
}

/// Brackets `p_guess` using `Δ/d ≤ ‖𝒰 − 𝒦‖_⋄ ≤ Δ` with
/// `Δ = ‖J(noisy) − J(ideal)‖₁`.
pub fn detectability_bounds(noisy: &KrausChannel, ideal: &KrausChannel) -> Result<DetectabilityBounds> {
    if noisy.dim_in() != ideal.dim_in() || noisy.dim_out() != ideal.dim_out() {
        return Err(Error::DimensionMismatch {
            expected: ideal.dim_in(),
            found: noisy.dim_in(),
        });
    }
    let delta = choi_distance(noisy, ideal);
    let d = noisy.dim_in() as f64;
    Ok(DetectabilityBounds {
        p_guess_lower: 0.5 * (1.0 + delta / (2.0 * d)),
        p_guess_upper: (0.5 * (1.0 + delta / 2.0)).min(1.0),
        choi_distance: delta,
    })
}

/// Trace distance of unnormalised Choi matrices.
pub fn choi_distance(a: &KrausChannel, b: &KrausChannel) -> f64 {
    (&choi_matrix(a) - &choi_matrix(b)).trace_norm()
}

/// `U_CNOT` as a channel.
pub fn ideal_cnot_channel() -> KrausChannel {
    KrausChannel::unitary(gates::cnot()).expect("unitary")
}
