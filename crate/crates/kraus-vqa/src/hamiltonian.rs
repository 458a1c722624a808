//! Hamiltonian files: one `coefficient pauli-word` term per line, `#`
//! comments, and an optional `# ground_energy = value` header line.

use std::path::Path;

use kraus_vqa_core::vqe::PauliTermHamiltonian;

use crate::error::{HarnessError, Result};

/// Molecular hydrogen in a minimal basis, four qubits.
pub const H2_STO3G: &str = include_str!("../data/h2_sto3g_jw.txt");

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianFile {
    pub hamiltonian: PauliTermHamiltonian,
    /// Ground energy stated in the file header, if any.
    pub declared_ground: Option<f64>,
}

pub fn parse_hamiltonian_file(text: &str) -> Result<HamiltonianFile> {
    let hamiltonian = PauliTermHamiltonian::parse(text)?;
    let mut declared_ground = None;
    for (idx, line) in text.lines().enumerate() {
        let Some(comment) = line.trim_start().strip_prefix('#') else { continue };
        let Some((key, value)) = comment.split_once('=') else { continue };
        if key.trim() == "ground_energy" {
            let v = value.trim().parse().map_err(|_| kraus_vqa_core::Error::Parse {
                line: idx + 1,
                message: format!("bad ground energy {:?}", value.trim()),
            })?;
            declared_ground = Some(v);
        }
    }
    Ok(HamiltonianFile {
        hamiltonian,
        declared_ground,
    })
}

pub fn load_hamiltonian(path: &Path) -> Result<HamiltonianFile> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_hamiltonian_file(&text)
}
