//! Default experiment settings in one place.

use std::f64::consts::PI;

pub const MASTER_SEED: u64 = 2024;

/// Register size of the depth and concurrence sweeps.
pub const QUBITS: usize = 6;
/// Every qubit starts in `exp(−iθY)|0⟩` with this `θ`.
pub const INPUT_ROTATION: f64 = PI / 8.0;
/// Cost observable `Z ⊗ Z` on these qubits, identity elsewhere.
pub const OBSERVABLE_QUBITS: (usize, usize) = (0, 1);
/// Differentiated parameter: the `R_y` angle on qubit 0 in layer 1.
pub const GRAD_PARAM: usize = 0;
pub const TRIALS: usize = 100;

pub const EXPRESSIBILITY_LAYERS: [usize; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
pub const EXPRESSIBILITY_KAPPAS: [f64; 3] = [1.0, 0.9, 0.8];

pub const DEPTH_LAYERS: [usize; 10] = [2, 4, 6, 8, 10, 15, 20, 30, 40, 50];
pub const DEPTH_KAPPAS: [f64; 3] = [1.0, 0.9, 0.8];

pub const CONCURRENCE_LAYERS: usize = 10;
pub const CONCURRENCE_KAPPAS: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

pub const RESTRICTED_QUBITS: [usize; 3] = [2, 4, 6];
pub const RESTRICTED_LAYERS: usize = 10;
pub const RESTRICTED_KAPPAS: [f64; 2] = [1.0, 0.8];
pub const RESTRICTED_WIDTHS: [f64; 3] = [1.0, 0.1, 0.01];
/// Base points drawn per restricted sweep point.
pub const RESTRICTED_WINDOWS: usize = 20;
/// Samples inside each window.
pub const RESTRICTED_TRIALS: usize = 50;

pub const BOUND_QUBITS: usize = 2;
pub const BOUND_LAYERS: [usize; 2] = [2, 4];
pub const BOUND_KAPPAS: [f64; 3] = [1.0, 0.9, 0.8];
pub const BOUND_TRIALS: usize = 5000;

pub const VQE_LAYERS: usize = 3;
pub const VQE_LEARNING_RATE: f64 = 0.2;
pub const VQE_ITERS: usize = 300;
pub const VQE_TOLERANCE: f64 = 1e-9;
pub const VQE_INIT_WIDTH: f64 = 1.0;

pub const PROTOCOL_GRID_POINTS: usize = 20;
pub const PROTOCOL_RANDOM_POINTS: usize = 50;
pub const PROTOCOL_STATES: usize = 20;

/// Largest register accepted by the sweeps.
pub const MAX_QUBITS: usize = 8;
pub const MAX_LAYERS: usize = 200;
