//! Configuration, file formats and experiment drivers around
//! [`kraus_vqa_core`].

pub mod config;
pub mod defaults;
pub mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod table;

pub use config::{Experiment, ExperimentConfig};
pub use error::{HarnessError, Result};
pub use experiments::{run_experiment, run_with_threads};
pub use table::ResultTable;
