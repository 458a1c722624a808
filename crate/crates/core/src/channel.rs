//! Kraus-represented CPTP maps.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::Pauli;
use crate::local;
use crate::matrix::{ComplexMatrix, ZERO};
use crate::state::{DensityMatrix, Observable};

/// Completeness tolerance `‖Σ E†E − 𝟙‖_F`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// A channel `ρ ↦ Σ_k E_k ρ E_k†` with `Σ_k E_k†E_k = 𝟙`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidState("a channel needs at least one Kraus operator".into()))?;
        let (dim_out, dim_in) = first.shape();
        for op in &ops {
            if op.shape() != (dim_out, dim_in) {
                return Err(Error::ShapeMismatch {
                    left: first.shape(),
                    right: op.shape(),
                });
            }
        }
        let channel = Self { dim_in, dim_out, ops };
        let defect = channel.completeness_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::NotTracePreserving(defect));
        }
        Ok(channel)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim_in: dim,
            dim_out: dim,
            ops: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        if !u.is_unitary(COMPLETENESS_TOL) {
            return Err(Error::NotTracePreserving((&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(u.rows()))));
        }
        Ok(Self {
            dim_in: u.cols(),
            dim_out: u.rows(),
            ops: vec![u],
        })
    }

    /// Single-qubit depolarizing channel `ρ ↦ (1−p)ρ + p·𝟙/2`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_probability("depolarizing strength", p)?;
        Self::pauli_mixture(&[(Pauli::I, 1.0 - 0.75 * p), (Pauli::X, p / 4.0), (Pauli::Y, p / 4.0), (Pauli::Z, p / 4.0)])
    }

    pub fn bit_flip(p: f64) -> Result<Self> {
        check_probability("bit-flip probability", p)?;
        Self::pauli_mixture(&[(Pauli::I, 1.0 - p), (Pauli::X, p)])
    }

    pub fn phase_flip(p: f64) -> Result<Self> {
        check_probability("phase-flip probability", p)?;
        Self::pauli_mixture(&[(Pauli::I, 1.0 - p), (Pauli::Z, p)])
    }

    fn pauli_mixture(weights: &[(Pauli, f64)]) -> Result<Self> {
        let ops = weights
            .iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|&(p, w)| p.matrix().scale_real(libm::sqrt(w)))
            .collect();
        Self::new(ops)
    }

    #[inline]
    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    #[inline]
    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    #[inline]
    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    /// `‖Σ_k E_k†E_k − 𝟙‖_F`.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for op in &self.ops {
            sum += &(&op.adjoint() * op);
        }
        (&sum - &ComplexMatrix::identity(self.dim_in)).frobenius_norm()
    }

    fn check_square(&self) -> Result<()> {
        if self.dim_in != self.dim_out {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: self.dim_out,
            });
        }
        Ok(())
    }

    /// `Σ_k E_k X E_k†` for an arbitrary operator `X`.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: x.rows(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for op in &self.ops {
            out += &(&(op * x) * &op.adjoint());
        }
        Ok(out)
    }

    /// `Σ_k E_k† X E_k`.
    pub fn adjoint_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim_out, self.dim_out) {
            return Err(Error::DimensionMismatch {
                expected: self.dim_out,
                found: x.rows(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for op in &self.ops {
            out += &(&(&op.adjoint() * x) * op);
        }
        Ok(out)
    }

    /// Applies this channel to qubits `qubits` of an n-qubit operator.
    pub fn apply_local(&self, x: &ComplexMatrix, n: usize, qubits: &[usize]) -> ComplexMatrix {
        debug_assert_eq!(self.dim_in, 1 << qubits.len());
        if let [only] = self.ops.as_slice() {
            return local::conjugate(x, n, qubits, only);
        }
        let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
        for op in &self.ops {
            out += &local::conjugate(x, n, qubits, op);
        }
        out
    }

    /// Heisenberg-picture counterpart of [`apply_local`](Self::apply_local).
    pub fn adjoint_local(&self, x: &ComplexMatrix, n: usize, qubits: &[usize]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
        for op in &self.ops {
            out += &local::conjugate(x, n, qubits, &op.adjoint());
        }
        out
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &KrausChannel) -> Result<Self> {
        if first.dim_out != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: first.dim_out,
            });
        }
        let mut ops = Vec::with_capacity(self.ops.len() * first.ops.len());
        for a in &self.ops {
            for b in &first.ops {
                ops.push(a * b);
            }
        }
        Ok(Self {
            dim_in: first.dim_in,
            dim_out: self.dim_out,
            ops,
        })
    }

    /// `self ⊗ other` acting on a product space.
    pub fn tensor(&self, other: &KrausChannel) -> Self {
        let mut ops = Vec::with_capacity(self.ops.len() * other.ops.len());
        for a in &self.ops {
            for b in &other.ops {
                ops.push(a.kron(b));
            }
        }
        Self {
            dim_in: self.dim_in * other.dim_in,
            dim_out: self.dim_out * other.dim_out,
            ops,
        }
    }

    /// Minimal Kraus form from the eigen-decomposition of the Choi matrix.
    pub fn canonical(&self) -> Result<Self> {
        let choi = choi_matrix(self);
        let (values, vectors) = choi.hermitian_eigen()?;
        let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut ops = Vec::new();
        for (k, &lambda) in values.iter().enumerate() {
            if lambda <= 1e-13 * scale {
                continue;
            }
            let s = libm::sqrt(lambda);
            // Choi column v = Σ_i E|i⟩ ⊗ |i⟩, so E[a][i] = v[a·d_in + i].
            ops.push(ComplexMatrix::from_fn(self.dim_out, self.dim_in, |a, i| {
                vectors.get(a * self.dim_in + i, k) * s
            }));
        }
        Self::new(ops)
    }
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name,
            value: p,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// `Σ_k E_k ρ E_k†`.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    ch.check_square()?;
    Ok(DensityMatrix::from_trusted(ch.apply_operator(rho.matrix())?))
}

/// Heisenberg picture `Σ_k E_k† H E_k`.
pub fn adjoint_apply(ch: &KrausChannel, obs: &Observable) -> Result<Observable> {
    ch.check_square()?;
    Ok(Observable::from_trusted(ch.adjoint_operator(obs.matrix())?))
}

/// `Σ_ij Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|`, output factor first. Unnormalised: trace `d_in`.
pub fn choi_matrix(ch: &KrausChannel) -> ComplexMatrix {
    let (din, dout) = (ch.dim_in, ch.dim_out);
    let n = dout * din;
    let mut out = ComplexMatrix::zeros(n, n);
    for op in &ch.ops {
        // vec(E) = Σ_i E|i⟩ ⊗ |i⟩
        let v: Vec<Complex64> = (0..n).map(|idx| op.get(idx / din, idx % din)).collect();
        for (r, &a) in v.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            for (c, &b) in v.iter().enumerate() {
                let cur = out.get(r, c);
                out.set(r, c, cur + a * b.conj());
            }
        }
    }
    out
}
