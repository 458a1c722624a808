//! Register-level kernels: applying a k-qubit operator to selected qubits of
//! an n-qubit operator without materialising the 2^n × 2^n embedding.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};

/// Number of qubits of a `dim`-dimensional register.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

#[inline]
fn mask(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

pub(crate) fn check_qubits(n: usize, qubits: &[usize]) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::RepeatedQubit(q));
        }
    }
    Ok(())
}

/// Index offsets addressed by a local operator, in the operator's own basis
/// order (first listed qubit most significant).
fn offsets(n: usize, qubits: &[usize]) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|j| {
            qubits
                .iter()
                .enumerate()
                .filter(|(pos, _)| j & (1 << (k - 1 - pos)) != 0)
                .map(|(_, &q)| mask(n, q))
                .sum()
        })
        .collect()
}

fn bases(n: usize, qubits: &[usize]) -> impl Iterator<Item = usize> {
    let all: usize = qubits.iter().map(|&q| mask(n, q)).sum();
    (0..1usize << n).filter(move |i| i & all == 0)
}

/// `m ← A_q · m` where `A` acts on `qubits` of an n-qubit register.
pub fn left_apply(m: &mut ComplexMatrix, n: usize, qubits: &[usize], op: &ComplexMatrix) {
    let k = 1usize << qubits.len();
    debug_assert_eq!(op.shape(), (k, k));
    let cols = m.cols();
    let offs = offsets(n, qubits);
    let mut buf = vec![ZERO; k];
    let data = m.as_mut_slice();
    for base in bases(n, qubits) {
        for c in 0..cols {
            for (b, &o) in buf.iter_mut().zip(&offs) {
                *b = data[(base + o) * cols + c];
            }
            for (r, &o) in offs.iter().enumerate() {
                let row = op.row(r);
                let mut acc = ZERO;
                for (a, b) in row.iter().zip(&buf) {
                    acc += a * b;
                }
                data[(base + o) * cols + c] = acc;
            }
        }
    }
}

/// `m ← m · A_q†` where `A` acts on `qubits` of an n-qubit register.
pub fn right_apply_adjoint(m: &mut ComplexMatrix, n: usize, qubits: &[usize], op: &ComplexMatrix) {
    let k = 1usize << qubits.len();
    debug_assert_eq!(op.shape(), (k, k));
    let cols = m.cols();
    let rows = m.rows();
    let offs = offsets(n, qubits);
    let mut buf = vec![ZERO; k];
    let data = m.as_mut_slice();
    for base in bases(n, qubits) {
        for r in 0..rows {
            let row = &mut data[r * cols..(r + 1) * cols];
            for (b, &o) in buf.iter_mut().zip(&offs) {
                *b = row[base + o];
            }
            for (j, &o) in offs.iter().enumerate() {
                let op_row = op.row(j);
                let mut acc = ZERO;
                for (a, b) in op_row.iter().zip(&buf) {
                    acc += b * a.conj();
                }
                row[base + o] = acc;
            }
        }
    }
}

/// `A_q · m · A_q†`.
pub fn conjugate(m: &ComplexMatrix, n: usize, qubits: &[usize], op: &ComplexMatrix) -> ComplexMatrix {
    let mut out = m.clone();
    left_apply(&mut out, n, qubits, op);
    right_apply_adjoint(&mut out, n, qubits, op);
    out
}

/// Places a two-qubit operator on qubits `(q1, q2)` of an n-qubit register;
/// `q1` addresses the more significant factor of `op`. Qubits need not be
/// adjacent or ordered.
pub fn embed_two_qubit(op: &ComplexMatrix, n: usize, q1: usize, q2: usize) -> Result<ComplexMatrix> {
    if op.shape() != (4, 4) {
        return Err(Error::ShapeMismatch {
            left: op.shape(),
            right: (4, 4),
        });
    }
    check_qubits(n, &[q1, q2])?;
    let mut m = ComplexMatrix::identity(1 << n);
    left_apply(&mut m, n, &[q1, q2], op);
    Ok(m)
}

/// Places a single-qubit operator on qubit `q` of an n-qubit register.
pub fn embed_one_qubit(op: &ComplexMatrix, n: usize, q: usize) -> Result<ComplexMatrix> {
    if op.shape() != (2, 2) {
        return Err(Error::ShapeMismatch {
            left: op.shape(),
            right: (2, 2),
        });
    }
    check_qubits(n, &[q])?;
    let mut m = ComplexMatrix::identity(1 << n);
    left_apply(&mut m, n, &[q], op);
    Ok(m)
}

/// Partial trace keeping `keep` (in the listed order) of an n-qubit operator.
pub fn partial_trace(m: &ComplexMatrix, n: usize, keep: &[usize]) -> Result<ComplexMatrix> {
    check_qubits(n, keep)?;
    if m.shape() != (1 << n, 1 << n) {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            found: m.rows(),
        });
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let keep_offs = offsets(n, keep);
    let trace_offs = offsets(n, &traced);
    let k = keep_offs.len();
    Ok(ComplexMatrix::from_fn(k, k, |a, b| {
        trace_offs
            .iter()
            .map(|&t| m.get(keep_offs[a] + t, keep_offs[b] + t))
            .sum::<Complex64>()
    }))
}
