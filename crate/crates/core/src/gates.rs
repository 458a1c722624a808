//! Standard one- and two-qubit operators.
//!
//! Qubit ordering: qubit 0 is the leftmost tensor factor, i.e. the most
//! significant bit of a computational-basis index. For two-qubit operators
//! the first qubit argument is the more significant factor.

use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::Error;
use crate::matrix::{ComplexMatrix, I, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => pauli_x(),
            Pauli::Y => pauli_y(),
            Pauli::Z => pauli_z(),
        }
    }

    /// Action on a basis bit: `P|b⟩ = phase · |b ⊕ flip⟩`.
    #[inline]
    pub(crate) fn action(self, bit: usize) -> (usize, Complex64) {
        match self {
            Pauli::I => (0, ONE),
            Pauli::X => (1, ONE),
            // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
            Pauli::Y => (1, if bit == 0 { I } else { -I }),
            Pauli::Z => (0, if bit == 0 { ONE } else { -ONE }),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = Error;

    fn try_from(c: char) -> Result<Self, Error> {
        match c {
            'I' | 'i' => Ok(Pauli::I),
            'X' | 'x' => Ok(Pauli::X),
            'Y' | 'y' => Ok(Pauli::Y),
            'Z' | 'z' => Ok(Pauli::Z),
            other => Err(Error::InvalidPauli(alloc::format!("unknown letter {other:?}"))),
        }
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Pauli::try_from(c),
            _ => Err(Error::InvalidPauli(s.into())),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, alloc::vec![ZERO, ONE, ONE, ZERO]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, alloc::vec![ZERO, -I, I, ZERO]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, alloc::vec![ONE, ZERO, ZERO, -ONE]).unwrap()
}

pub fn hadamard() -> ComplexMatrix {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).unwrap()
}

/// `|0⟩⟨0| ⊗ 𝟙 + |1⟩⟨1| ⊗ σ_X`.
pub fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
    .unwrap()
}

/// `|0⟩⟨0| ⊗ σ_X + |1⟩⟨1| ⊗ 𝟙`, the CNOT that fires on a control in `|0⟩`.
pub fn flipped_cnot() -> ComplexMatrix {
    ComplexMatrix::from_real(
        4,
        4,
        &[
            0.0, 1.0, 0.0, 0.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
    .unwrap()
}

pub fn swap() -> ComplexMatrix {
    ComplexMatrix::swap(2)
}

/// `exp(−iθV) = cos θ·𝟙 − i sin θ·V` for a Pauli generator `V` (so `V² = 𝟙`).
pub fn rotation(generator: Pauli, theta: f64) -> ComplexMatrix {
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    let id = ComplexMatrix::identity(2).scale_real(c);
    let v = generator.matrix().scale(Complex64::new(0.0, -s));
    &id + &v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paulis_square_to_identity() {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let m = p.matrix();
            assert_eq!(&m * &m, ComplexMatrix::identity(2));
        }
    }

    #[test]
    fn pauli_action_matches_matrix() {
        for p in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
            let m = p.matrix();
            for bit in 0..2 {
                let (flip, phase) = p.action(bit);
                assert_eq!(m.get(bit ^ flip, bit), phase);
            }
        }
    }

    #[test]
    fn rotation_is_unitary_with_expected_derivative_period() {
        let r = rotation(Pauli::Y, 0.37);
        assert!(r.is_unitary(1e-14));
        // exp(−iπY) = −𝟙
        let r = rotation(Pauli::Z, core::f64::consts::PI);
        assert!(r.max_abs_diff(&ComplexMatrix::identity(2).scale_real(-1.0)) < 1e-15);
    }

    #[test]
    fn parse_pauli_letters() {
        assert_eq!("Z".parse::<Pauli>().unwrap(), Pauli::Z);
        assert!("Q".parse::<Pauli>().is_err());
        assert!("XY".parse::<Pauli>().is_err());
    }
}
