//! Branch-by-branch simulation of the cat-entangler/cat-disentangler
//! non-local CNOT on the register `(q_c, q_A, q_B, q_t)`.
//!
//! Every measurement outcome is enumerated exactly, so averaging the branches
//! gives the channel the protocol implements, independent of any closed form.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::adversary::PerturbationParams;
use crate::error::{Error, Result};
use crate::gates;
use crate::local::{conjugate, left_apply, partial_trace, right_apply_adjoint};
use crate::matrix::ComplexMatrix;
use crate::state::DensityMatrix;

const C: usize = 0;
const A: usize = 1;
const B: usize = 2;
const T: usize = 3;

/// Branches below this probability carry no post-measurement state.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolBranch {
    /// Outcome of the measurement on `q_A`.
    pub outcome_a: u8,
    /// Outcome of the measurement on `q_B`.
    pub outcome_b: u8,
    pub probability: f64,
    /// Normalised state of `(q_c, q_t)`; `None` for a branch that never occurs.
    pub post_state: Option<DensityMatrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolTranscript {
    pub input_state: DensityMatrix,
    pub bell: PerturbationParams,
    /// Ordered `(0,0), (0,1), (1,0), (1,1)`.
    pub branches: Vec<ProtocolBranch>,
    pub averaged_output: DensityMatrix,
}

fn projector(bit: u8) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(2, 2);
    p.set(bit as usize, bit as usize, Complex64::new(1.0, 0.0));
    p
}

fn project(m: &mut ComplexMatrix, qubit: usize, bit: u8) {
    let p = projector(bit);
    left_apply(m, 4, &[qubit], &p);
    right_apply_adjoint(m, 4, &[qubit], &p);
}

/// Joint state with the input on `(q_c, q_t)` and the shared pair on
/// `(q_A, q_B)`.
fn initial_register(rho_ct: &DensityMatrix, bell: &PerturbationParams) -> ComplexMatrix {
    let ct = rho_ct.matrix();
    let ab = bell.state().into_matrix();
    let bit = |i: usize, q: usize| (i >> (3 - q)) & 1;
    ComplexMatrix::from_fn(16, 16, |i, j| {
        let (ci, ai, bi, ti) = (bit(i, C), bit(i, A), bit(i, B), bit(i, T));
        let (cj, aj, bj, tj) = (bit(j, C), bit(j, A), bit(j, B), bit(j, T));
        ct.get(2 * ci + ti, 2 * cj + tj) * ab.get(2 * ai + bi, 2 * aj + bj)
    })
}

/// Unnormalised `(q_c, q_t)` states for the four outcome pairs.
fn branch_operators(rho_ct: &DensityMatrix, bell: &PerturbationParams) -> Result<[ComplexMatrix; 4]> {
    if rho_ct.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho_ct.dim(),
        });
    }
    let mut reg = initial_register(rho_ct, bell);
    reg = conjugate(&reg, 4, &[C, A], &gates::cnot());
    let mut out = [(); 4].map(|_| ComplexMatrix::zeros(4, 4));
    for m in 0..2u8 {
        let mut after_a = reg.clone();
        project(&mut after_a, A, m);
        if m == 1 {
            after_a = conjugate(&after_a, 4, &[B], &gates::pauli_x());
        }
        after_a = conjugate(&after_a, 4, &[B, T], &gates::cnot());
        after_a = conjugate(&after_a, 4, &[B], &gates::hadamard());
        for s in 0..2u8 {
            let mut after_b = after_a.clone();
            project(&mut after_b, B, s);
            if s == 1 {
                after_b = conjugate(&after_b, 4, &[C], &gates::pauli_z());
            }
            out[(2 * m + s) as usize] = partial_trace(&after_b, 4, &[C, T])?;
        }
    }
    Ok(out)
}

/// Runs the protocol on `rho_ct` with the shared pair `bell`, enumerating
/// all four measurement branches.
pub fn run_cat_protocol(rho_ct: &DensityMatrix, bell: &PerturbationParams) -> Result<ProtocolTranscript> {
    let ops = branch_operators(rho_ct, bell)?;
    let mut sum = ComplexMatrix::zeros(4, 4);
    let mut branches = Vec::with_capacity(4);
    for (idx, op) in ops.into_iter().enumerate() {
        sum += &op;
        let probability = op.trace().re.max(0.0);
        let post_state = (probability > NEGLIGIBLE_PROBABILITY)
            .then(|| DensityMatrix::from_trusted(op.scale_real(1.0 / probability)));
        branches.push(ProtocolBranch {
            outcome_a: (idx >> 1) as u8,
            outcome_b: (idx & 1) as u8,
            probability,
            post_state,
        });
    }
    Ok(ProtocolTranscript {
        input_state: rho_ct.clone(),
        bell: *bell,
        branches,
        averaged_output: DensityMatrix::from_trusted(sum),
    })
}

/// Probabilities of the outcome pairs `(0,0), (0,1), (1,0), (1,1)`.
pub fn branch_probabilities(rho_ct: &DensityMatrix, bell: &PerturbationParams) -> Result<[f64; 4]> {
    let ops = branch_operators(rho_ct, bell)?;
    Ok(ops.map(|op| op.trace().re.max(0.0)))
}

impl ProtocolTranscript {
    /// Frobenius distance between the averaged output and `target`.
    pub fn deviation_from(&self, target: &DensityMatrix) -> f64 {
        (self.averaged_output.matrix() - target.matrix()).frobenius_norm()
    }
}
