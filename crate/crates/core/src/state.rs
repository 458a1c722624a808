//! Density matrices and observables.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gates::Pauli;
use crate::local::qubit_count;
use crate::matrix::{ComplexMatrix, ONE, ZERO};

/// Tolerance on Hermiticity and unit trace of a [`DensityMatrix`].
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalue floor accepted as positive semidefinite.
pub const PSD_FLOOR: f64 = -1e-9;

/// A trace-one positive semidefinite Hermitian operator on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity. Never renormalises.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::ShapeMismatch {
                left: matrix.shape(),
                right: (matrix.rows(), matrix.rows()),
            });
        }
        let n = qubit_count(matrix.rows())?;
        let defect = matrix.hermiticity_defect();
        if defect > STATE_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = matrix.hermitian_eigenvalues()?[0];
        if min < PSD_FLOOR {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { n, matrix })
    }

    /// Wraps a matrix produced by a trace-preserving map of a valid state.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        let n = qubit_count(matrix.rows()).expect("register dimension");
        debug_assert!(matrix.hermiticity_defect() < 1e-8);
        Self { n, matrix }
    }

    /// `|ψ⟩⟨ψ|`; the ket must be normalised.
    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        qubit_count(ket.len())?;
        let norm: f64 = ket.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self::from_trusted(ComplexMatrix::outer(ket, ket)))
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut ket = alloc::vec![ZERO; 1 << n];
        ket[index] = ONE;
        Self::from_trusted(ComplexMatrix::outer(&ket, &ket))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1 << n;
        Self::from_trusted(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    /// `ρ ⊗ σ` with `ρ` on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_trusted(self.matrix.kron(&other.matrix))
    }

    #[inline]
    pub fn qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Hermitian: Tr ρ² = Σ |ρ_ij|²
        self.matrix.as_slice().iter().map(|x| x.norm_sqr()).sum()
    }

    /// `Tr(ρσ)`, real for Hermitian arguments.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.matrix.trace_product(&other.matrix).re
    }

    /// `Tr(Hρ)`.
    pub fn expectation(&self, obs: &Observable) -> Complex64 {
        obs.matrix().trace_product(&self.matrix)
    }

    /// `U ρ U†` for a unitary acting on the whole register.
    pub fn evolve(&self, unitary: &ComplexMatrix) -> Result<Self> {
        let m = unitary.checked_mul(&self.matrix)?.checked_mul(&unitary.adjoint())?;
        Ok(Self::from_trusted(m))
    }
}

/// A Hermitian operator on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    n: usize,
    matrix: ComplexMatrix,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::ShapeMismatch {
                left: matrix.shape(),
                right: (matrix.rows(), matrix.rows()),
            });
        }
        let n = qubit_count(matrix.rows())?;
        let defect = matrix.hermiticity_defect();
        if defect > STATE_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { n, matrix })
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        let n = qubit_count(matrix.rows()).expect("register dimension");
        Self { n, matrix }
    }

    /// Tensor product of Paulis, `word[q]` acting on qubit `q`.
    pub fn pauli_string(word: &[Pauli]) -> Self {
        Self::from_trusted(pauli_string_matrix(word, 1.0))
    }

    /// `Z ⊗ Z` on qubits `q1`, `q2`, identity elsewhere.
    pub fn zz(n: usize, q1: usize, q2: usize) -> Result<Self> {
        crate::local::check_qubits(n, &[q1, q2])?;
        let mut word = alloc::vec![Pauli::I; n];
        word[q1] = Pauli::Z;
        word[q2] = Pauli::Z;
        Ok(Self::pauli_string(&word))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(1 << n))
    }

    #[inline]
    pub fn qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Hilbert–Schmidt norm `‖H‖₂`.
    pub fn norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }
}

/// `coeff · P_0 ⊗ … ⊗ P_{n−1}`, built column by column from the Pauli action.
pub(crate) fn pauli_string_matrix(word: &[Pauli], coeff: f64) -> ComplexMatrix {
    let n = word.len();
    let d = 1usize << n;
    let mut m = ComplexMatrix::zeros(d, d);
    add_pauli_string(&mut m, word, coeff);
    m
}

pub(crate) fn add_pauli_string(m: &mut ComplexMatrix, word: &[Pauli], coeff: f64) {
    let n = word.len();
    let d = 1usize << n;
    for col in 0..d {
        let mut row = col;
        let mut phase = Complex64::new(coeff, 0.0);
        for (q, p) in word.iter().enumerate() {
            let shift = n - 1 - q;
            let bit = (col >> shift) & 1;
            let (flip, ph) = p.action(bit);
            row ^= flip << shift;
            phase *= ph;
        }
        let v = m.get(row, col) + phase;
        m.set(row, col, v);
    }
}

/// Normalised complex-Gaussian ket (Haar-random pure state).
pub fn random_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = libm::sqrt(v.iter().map(|a| a.norm_sqr()).sum::<f64>());
    for a in &mut v {
        *a /= norm;
    }
    v
}

pub fn random_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::pure(&random_ket(1 << n, rng)).expect("normalised")
}

/// Random mixed state `G G† / Tr(G G†)` with a `dim × rank` Gaussian `G`.
pub fn random_density_matrix<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let d = 1 << n;
    let g = ComplexMatrix::from_fn(d, rank.max(1), |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_trusted(m.scale_real(1.0 / tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream;

    #[test]
    fn purity_of_standard_states() {
        let mut rng = stream(1);
        assert!((random_pure_state(3, &mut rng).purity() - 1.0).abs() < 1e-12);
        assert!((DensityMatrix::maximally_mixed(3).purity() - 0.125).abs() < 1e-15);
        let half = ComplexMatrix::from_real(2, 2, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((DensityMatrix::new(half).unwrap().purity() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn validation_rejects_bad_states() {
        let not_unit = ComplexMatrix::from_real(2, 2, &[0.6, 0.0, 0.0, 0.6]).unwrap();
        assert!(matches!(DensityMatrix::new(not_unit), Err(Error::InvalidState(_))));
        let negative = ComplexMatrix::from_real(2, 2, &[1.2, 0.0, 0.0, -0.2]).unwrap();
        assert!(matches!(DensityMatrix::new(negative), Err(Error::InvalidState(_))));
        let non_herm = ComplexMatrix::from_real(2, 2, &[0.5, 0.3, 0.0, 0.5]).unwrap();
        assert!(matches!(DensityMatrix::new(non_herm), Err(Error::NotHermitian(_))));
        let three = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        assert!(matches!(DensityMatrix::new(three), Err(Error::NotPowerOfTwo(3))));
        assert!(matches!(DensityMatrix::pure(&[ONE, ONE]), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn random_mixed_states_are_valid() {
        let mut rng = stream(2);
        for rank in 1..4 {
            let rho = random_density_matrix(2, rank, &mut rng);
            DensityMatrix::new(rho.matrix().clone()).unwrap();
        }
    }

    #[test]
    fn pauli_string_matches_kron() {
        let word = [Pauli::X, Pauli::Y, Pauli::Z];
        let kron = Pauli::X.matrix().kron(&Pauli::Y.matrix()).kron(&Pauli::Z.matrix());
        assert_eq!(pauli_string_matrix(&word, 1.0), kron);
    }

    #[test]
    fn zz_is_diagonal_sign() {
        let zz = Observable::zz(2, 0, 1).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| zz.matrix().get(i, i).re).collect();
        assert_eq!(diag, [1.0, -1.0, -1.0, 1.0]);
    }
}
