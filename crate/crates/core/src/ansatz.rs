//! Layered parameterised-channel ansatz: single-qubit rotations followed by a
//! ladder of (possibly adversarial) non-local CNOTs.
//!
//! Rotations are `R_V(θ) = exp(−iθV) = cos θ·𝟙 − i sin θ·V` with `V` a bare
//! Pauli, so `V² = 𝟙` and the shift rule reads
//! `∂C(θ) = C(θ + π/4) − C(θ − π/4)`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::Rng;

use crate::adversary::{family_from_concurrence, noisy_cnot_channel, weak_adversary_channel, PerturbationParams, WeakNoiseSpec};
use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::gates::{self, Pauli};
use crate::local;
use crate::matrix::ComplexMatrix;
use crate::seed;
use crate::state::{DensityMatrix, Observable};

/// Noise attached to an entangling gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CnotNoise {
    /// Strong adversary: perturbed shared pair.
    Strong(PerturbationParams),
    /// Weak adversary: local noise around an ideal CNOT.
    Weak(WeakNoiseSpec),
}

impl CnotNoise {
    pub fn channel(&self) -> KrausChannel {
        match self {
            CnotNoise::Strong(p) => noisy_cnot_channel(p),
            CnotNoise::Weak(spec) => weak_adversary_channel(spec),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    RotY,
    RotZ,
    NoisyCnot,
    WeakNoisyCnot,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    /// One qubit for rotations; `(control, target)` for entangling gates.
    pub qubits: Vec<usize>,
    pub param_index: Option<usize>,
    pub noise: Option<CnotNoise>,
    channel: Option<KrausChannel>,
}

impl GateSpec {
    pub fn rotation(kind: GateKind, qubit: usize, param_index: usize) -> Result<Self> {
        if !matches!(kind, GateKind::RotY | GateKind::RotZ) {
            return Err(Error::InvalidAnsatz(format!("{kind:?} is not a rotation")));
        }
        Ok(Self {
            kind,
            qubits: alloc::vec![qubit],
            param_index: Some(param_index),
            noise: None,
            channel: None,
        })
    }

    pub fn cnot(control: usize, target: usize, noise: CnotNoise) -> Self {
        Self::cnot_with_channel(control, target, noise, noise.channel())
    }

    fn cnot_with_channel(control: usize, target: usize, noise: CnotNoise, channel: KrausChannel) -> Self {
        let kind = match noise {
            CnotNoise::Strong(_) => GateKind::NoisyCnot,
            CnotNoise::Weak(_) => GateKind::WeakNoisyCnot,
        };
        Self {
            kind,
            qubits: alloc::vec![control, target],
            param_index: None,
            channel: Some(channel),
            noise: Some(noise),
        }
    }

    /// Rotation generator; `None` for entangling gates.
    pub fn generator(&self) -> Option<Pauli> {
        match self.kind {
            GateKind::RotY => Some(Pauli::Y),
            GateKind::RotZ => Some(Pauli::Z),
            _ => None,
        }
    }

    /// `ρ ↦ G(ρ)`.
    fn apply(&self, m: &ComplexMatrix, n: usize, theta: &[f64]) -> ComplexMatrix {
        match (&self.channel, self.generator(), self.param_index) {
            (Some(ch), _, _) => ch.apply_local(m, n, &self.qubits),
            (None, Some(v), Some(k)) => local::conjugate(m, n, &self.qubits, &gates::rotation(v, theta[k])),
            _ => unreachable!("validated at construction"),
        }
    }

    /// Heisenberg picture `H ↦ G†(H)`.
    fn adjoint(&self, m: &ComplexMatrix, n: usize, theta: &[f64]) -> ComplexMatrix {
        match (&self.channel, self.generator(), self.param_index) {
            (Some(ch), _, _) => ch.adjoint_local(m, n, &self.qubits),
            (None, Some(v), Some(k)) => {
                local::conjugate(m, n, &self.qubits, &gates::rotation(v, theta[k]).adjoint())
            }
            _ => unreachable!("validated at construction"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Open chain `i → i+1`.
    Ladder,
}

/// A layered composition of rotation gates and noisy entangling gates.
#[derive(Clone, Debug, PartialEq)]
pub struct PQChAnsatz {
    n: usize,
    layers: Vec<Vec<GateSpec>>,
    param_count: usize,
    /// `(layer, position)` of the gate carrying each parameter.
    param_gate: Vec<(usize, usize)>,
}

impl PQChAnsatz {
    /// Validates qubit indices and that every parameter index is used once.
    pub fn new(n: usize, layers: Vec<Vec<GateSpec>>) -> Result<Self> {
        let mut seen: Vec<Option<(usize, usize)>> = Vec::new();
        for (l, layer) in layers.iter().enumerate() {
            for (g, gate) in layer.iter().enumerate() {
                local::check_qubits(n, &gate.qubits)?;
                let arity = if gate.generator().is_some() { 1 } else { 2 };
                if gate.qubits.len() != arity {
                    return Err(Error::InvalidAnsatz(format!("gate {g} of layer {l} has the wrong arity")));
                }
                match (gate.generator(), gate.param_index) {
                    (Some(_), Some(k)) => {
                        if k >= seen.len() {
                            seen.resize(k + 1, None);
                        }
                        if seen[k].replace((l, g)).is_some() {
                            return Err(Error::InvalidAnsatz(format!("parameter {k} used twice")));
                        }
                    }
                    (None, None) => {}
                    _ => return Err(Error::InvalidAnsatz(format!("gate {g} of layer {l} has a bad parameter slot"))),
                }
            }
        }
        let param_gate = seen
            .iter()
            .enumerate()
            .map(|(k, s)| s.ok_or_else(|| Error::InvalidAnsatz(format!("parameter {k} unused"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            param_count: param_gate.len(),
            layers,
            param_gate,
        })
    }

    /// No gates at all.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            layers: Vec::new(),
            param_count: 0,
            param_gate: Vec::new(),
        }
    }

    #[inline]
    pub fn qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn layers(&self) -> &[Vec<GateSpec>] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn gates(&self) -> impl Iterator<Item = &GateSpec> {
        self.layers.iter().flatten()
    }

    pub fn entangling_gate_count(&self) -> usize {
        self.gates().filter(|g| g.channel.is_some()).count()
    }

    /// Flat position of the gate carrying parameter `k`.
    fn flat_position(&self, k: usize) -> usize {
        let (l, g) = self.param_gate[k];
        self.layers[..l].iter().map(Vec::len).sum::<usize>() + g
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_count {
            return Err(Error::ParamLength {
                expected: self.param_count,
                found: theta.len(),
            });
        }
        Ok(())
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(())
    }

    /// Applies every layer in order to `rho0`.
    pub fn forward(&self, theta: &[f64], rho0: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_theta(theta)?;
        self.check_dim(rho0.dim())?;
        let mut m = rho0.matrix().clone();
        for gate in self.gates() {
            m = gate.apply(&m, self.n, theta);
        }
        Ok(DensityMatrix::from_trusted(m))
    }

    /// States entering each gate, followed by the final output.
    pub(crate) fn forward_trace(&self, theta: &[f64], rho0: &DensityMatrix) -> Result<Vec<ComplexMatrix>> {
        self.check_theta(theta)?;
        self.check_dim(rho0.dim())?;
        let mut states = Vec::with_capacity(self.gates().count() + 1);
        states.push(rho0.matrix().clone());
        for gate in self.gates() {
            let next = gate.apply(states.last().unwrap(), self.n, theta);
            states.push(next);
        }
        Ok(states)
    }

    /// Splits the ansatz around the gate carrying parameter `k`.
    pub fn split_at<'a>(&'a self, theta: &'a [f64], k: usize) -> Result<AnsatzSplit<'a>> {
        self.check_theta(theta)?;
        if k >= self.param_count {
            return Err(Error::ParamIndex {
                index: k,
                count: self.param_count,
            });
        }
        Ok(AnsatzSplit {
            ansatz: self,
            theta,
            k,
            position: self.flat_position(k),
        })
    }

    /// Generator and qubit of the rotation carrying parameter `k`.
    pub fn parameter_gate(&self, k: usize) -> Result<&GateSpec> {
        let &(l, g) = self.param_gate.get(k).ok_or(Error::ParamIndex {
            index: k,
            count: self.param_count,
        })?;
        Ok(&self.layers[l][g])
    }
}

/// Hardware-efficient ansatz: each of `depth` layers is `R_y` on every qubit,
/// `R_z` on every qubit, then noisy CNOT(i → i+1) for `i = 0 … n−2`, all
/// entangling gates realised with the shared pair of concurrence `kappa`.
///
/// In layer `l` the parameter of `R_y` on qubit `q` is `2nl + q` and that of
/// `R_z` on qubit `q` is `2nl + n + q`.
pub fn build_hea(n: usize, depth: usize, kappa: f64, topology: Topology) -> Result<PQChAnsatz> {
    build_hea_with_noise(n, depth, CnotNoise::Strong(family_from_concurrence(kappa)?), topology)
}

pub fn build_hea_with_noise(n: usize, depth: usize, noise: CnotNoise, topology: Topology) -> Result<PQChAnsatz> {
    if n < 2 {
        return Err(Error::InvalidAnsatz(format!("need at least 2 qubits, got {n}")));
    }
    if depth < 1 {
        return Err(Error::InvalidAnsatz("need at least one layer".into()));
    }
    let Topology::Ladder = topology;
    let channel = noise.channel();
    let layers = (0..depth)
        .map(|l| {
            let base = 2 * n * l;
            let mut layer = Vec::with_capacity(3 * n - 1);
            for q in 0..n {
                layer.push(GateSpec::rotation(GateKind::RotY, q, base + q)?);
            }
            for q in 0..n {
                layer.push(GateSpec::rotation(GateKind::RotZ, q, base + n + q)?);
            }
            for q in 0..n - 1 {
                layer.push(GateSpec::cnot_with_channel(q, q + 1, noise, channel.clone()));
            }
            Ok(layer)
        })
        .collect::<Result<Vec<_>>>()?;
    PQChAnsatz::new(n, layers)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InitMode {
    Full,
    Restricted,
}

/// How parameter vectors are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamInit {
    pub mode: InitMode,
    /// Width of the sampling window as a fraction of `2π`.
    pub r: f64,
    /// Fixes the restricted-mode base points.
    pub seed: u64,
}

impl ParamInit {
    pub fn full(seed: u64) -> Self {
        Self {
            mode: InitMode::Full,
            r: 1.0,
            seed,
        }
    }

    /// Restricted window of width `2πr`; `r = 1` is full-range sampling.
    pub fn with_width(r: f64, seed: u64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::OutOfRange {
                name: "r",
                value: r,
                range: "(0, 1]",
            });
        }
        let mode = if r == 1.0 { InitMode::Full } else { InitMode::Restricted };
        Ok(Self { mode, r, seed })
    }

    /// Base point of parameter `index` in restricted mode.
    pub fn base_point(&self, index: usize) -> f64 {
        TAU * seed::unit_interval(seed::derive(self.seed, &[index as u64]))
    }
}

/// Full mode: `θ ∼ Unif[0, 2π)`. Restricted mode: `θ ∼ Unif[b, b + 2πr)`
/// reduced mod `2π`, with base point `b` fixed per parameter by `init.seed`.
pub fn sample_params<R: Rng + ?Sized>(ansatz: &PQChAnsatz, init: &ParamInit, rng: &mut R) -> Vec<f64> {
    sample_angles(ansatz.param_count(), init, rng)
}

pub(crate) fn sample_angles<R: Rng + ?Sized>(count: usize, init: &ParamInit, rng: &mut R) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let u: f64 = rng.random();
            match init.mode {
                InitMode::Full => TAU * u,
                InitMode::Restricted => (init.base_point(i) + TAU * init.r * u) % TAU,
            }
        })
        .collect()
}

/// The ansatz seen from one parameter: `𝓔 = left ∘ gate_k ∘ right`.
#[derive(Clone, Copy, Debug)]
pub struct AnsatzSplit<'a> {
    ansatz: &'a PQChAnsatz,
    theta: &'a [f64],
    k: usize,
    position: usize,
}

impl<'a> AnsatzSplit<'a> {
    pub fn param_index(&self) -> usize {
        self.k
    }

    pub fn theta_k(&self) -> f64 {
        self.theta[self.k]
    }

    pub fn gate(&self) -> &'a GateSpec {
        self.ansatz.gates().nth(self.position).unwrap()
    }

    pub fn qubit(&self) -> usize {
        self.gate().qubits[0]
    }

    pub fn generator(&self) -> Pauli {
        self.gate().generator().unwrap()
    }

    /// `V_k` embedded on the full register.
    pub fn generator_matrix(&self) -> ComplexMatrix {
        local::embed_one_qubit(&self.generator().matrix(), self.ansatz.n, self.qubit()).unwrap()
    }

    pub fn right_gates(&self) -> impl Iterator<Item = &'a GateSpec> {
        self.ansatz.gates().take(self.position)
    }

    pub fn left_gates(&self) -> impl Iterator<Item = &'a GateSpec> {
        self.ansatz.gates().skip(self.position + 1)
    }

    /// `ρ_R = 𝓔_R(ρ)`.
    pub fn apply_right(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.ansatz.check_dim(rho.dim())?;
        let mut m = rho.matrix().clone();
        for gate in self.right_gates() {
            m = gate.apply(&m, self.ansatz.n, self.theta);
        }
        Ok(DensityMatrix::from_trusted(m))
    }

    /// The `k`-th gate alone.
    pub fn apply_gate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.ansatz.check_dim(rho.dim())?;
        Ok(DensityMatrix::from_trusted(self.gate().apply(rho.matrix(), self.ansatz.n, self.theta)))
    }

    /// `𝓔_L(ρ)`.
    pub fn apply_left(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.ansatz.check_dim(rho.dim())?;
        let mut m = rho.matrix().clone();
        for gate in self.left_gates() {
            m = gate.apply(&m, self.ansatz.n, self.theta);
        }
        Ok(DensityMatrix::from_trusted(m))
    }

    /// `ℋ_L = 𝓔_L†(ℋ)`, pulled back gate by gate from the output end. Its
    /// [`norm`](Observable::norm) is the attenuation factor `‖𝓔_L†(ℋ)‖₂`.
    pub fn adjoint_through_left(&self, obs: &Observable) -> Result<Observable> {
        self.ansatz.check_dim(obs.dim())?;
        let gates: Vec<&GateSpec> = self.left_gates().collect();
        let mut m = obs.matrix().clone();
        for gate in gates.iter().rev() {
            m = gate.adjoint(&m, self.ansatz.n, self.theta);
        }
        Ok(Observable::from_trusted(m))
    }
}

/// Backward sweep: the observable pulled back to just after each gate, plus
/// the fully pulled-back observable at index 0.
pub(crate) fn backward_trace(ansatz: &PQChAnsatz, theta: &[f64], obs: &Observable) -> Result<Vec<ComplexMatrix>> {
    ansatz.check_theta(theta)?;
    ansatz.check_dim(obs.dim())?;
    let gates: Vec<&GateSpec> = ansatz.gates().collect();
    let mut out = alloc::vec![ComplexMatrix::zeros(0, 0); gates.len() + 1];
    out[gates.len()] = obs.matrix().clone();
    for (i, gate) in gates.iter().enumerate().rev() {
        out[i] = gate.adjoint(&out[i + 1], ansatz.n, theta);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ONE, ZERO};
    use crate::seed::stream;
    use crate::state::random_pure_state;
    use num_complex::Complex64;

    /// Independent state-vector simulator for noiseless circuits.
    fn statevector(ansatz: &PQChAnsatz, theta: &[f64], ket: &[Complex64]) -> Vec<Complex64> {
        let n = ansatz.qubits();
        let mut psi = ket.to_vec();
        for gate in ansatz.gates() {
            match gate.generator() {
                Some(v) => {
                    let (c, s) = (libm::cos(theta[gate.param_index.unwrap()]), libm::sin(theta[gate.param_index.unwrap()]));
                    let bit = n - 1 - gate.qubits[0];
                    let mut next = alloc::vec![ZERO; psi.len()];
                    for (i, &a) in psi.iter().enumerate() {
                        let b = (i >> bit) & 1;
                        next[i] += a * c;
                        // −i sinθ V|b⟩
                        let (j, ph) = match v {
                            Pauli::Y => (i ^ (1 << bit), if b == 0 { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, -1.0) }),
                            Pauli::Z => (i, if b == 0 { ONE } else { -ONE }),
                            _ => unreachable!(),
                        };
                        next[j] += a * ph * Complex64::new(0.0, -s);
                    }
                    psi = next;
                }
                None => {
                    let (cb, tb) = (n - 1 - gate.qubits[0], n - 1 - gate.qubits[1]);
                    let mut next = alloc::vec![ZERO; psi.len()];
                    for (i, &a) in psi.iter().enumerate() {
                        let j = if (i >> cb) & 1 == 1 { i ^ (1 << tb) } else { i };
                        next[j] = a;
                    }
                    psi = next;
                }
            }
        }
        psi
    }

    fn random_theta(a: &PQChAnsatz, seed: u64) -> Vec<f64> {
        sample_params(a, &ParamInit::full(0), &mut stream(seed))
    }

    #[test]
    fn counts() {
        let a = build_hea(2, 1, 1.0, Topology::Ladder).unwrap();
        assert_eq!((a.param_count(), a.entangling_gate_count()), (4, 1));
        let a = build_hea(6, 10, 0.8, Topology::Ladder).unwrap();
        assert_eq!((a.param_count(), a.entangling_gate_count()), (120, 50));
        assert!(build_hea(1, 1, 1.0, Topology::Ladder).is_err());
        assert!(build_hea(2, 0, 1.0, Topology::Ladder).is_err());
        assert!(build_hea(2, 1, 1.2, Topology::Ladder).is_err());
    }

    #[test]
    fn parameter_layout() {
        let a = build_hea(3, 2, 1.0, Topology::Ladder).unwrap();
        let g = a.parameter_gate(6 + 4).unwrap();
        assert_eq!((g.kind, g.qubits[0]), (GateKind::RotZ, 1));
        let g = a.parameter_gate(2).unwrap();
        assert_eq!((g.kind, g.qubits[0]), (GateKind::RotY, 2));
    }

    #[test]
    fn rejects_duplicate_or_missing_parameters() {
        let r = |k| GateSpec::rotation(GateKind::RotY, 0, k).unwrap();
        assert!(PQChAnsatz::new(2, alloc::vec![alloc::vec![r(0), r(0)]]).is_err());
        assert!(PQChAnsatz::new(2, alloc::vec![alloc::vec![r(1)]]).is_err());
        assert!(PQChAnsatz::new(2, alloc::vec![alloc::vec![r(0), r(1)]]).is_ok());
        assert!(GateSpec::rotation(GateKind::NoisyCnot, 0, 0).is_err());
    }

    #[test]
    fn empty_ansatz_is_identity() {
        let a = PQChAnsatz::empty(2);
        let rho = random_pure_state(2, &mut stream(1));
        assert_eq!(a.forward(&[], &rho).unwrap(), rho);
    }

    #[test]
    fn zero_angles_give_cnot() {
        let a = build_hea(2, 1, 1.0, Topology::Ladder).unwrap();
        let rho = random_pure_state(2, &mut stream(2));
        let out = a.forward(&[0.0; 4], &rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.evolve(&gates::cnot()).unwrap().matrix()) < 1e-12);
    }

    #[test]
    fn noiseless_matches_statevector() {
        let mut rng = stream(3);
        for n in 2..=4 {
            let a = build_hea(n, 3, 1.0, Topology::Ladder).unwrap();
            for t in 0..3 {
                let theta = random_theta(&a, 100 + t);
                let ket = crate::state::random_ket(1 << n, &mut rng);
                let psi = statevector(&a, &theta, &ket);
                let expected = ComplexMatrix::outer(&psi, &psi);
                let out = a.forward(&theta, &DensityMatrix::pure(&ket).unwrap()).unwrap();
                assert!(out.matrix().max_abs_diff(&expected) < 1e-10);
                assert!((out.purity() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn noise_lowers_purity() {
        let clean = build_hea(2, 1, 1.0, Topology::Ladder).unwrap();
        let noisy = build_hea(2, 1, 0.8, Topology::Ladder).unwrap();
        let rho = DensityMatrix::pure(&[ONE, ZERO, ZERO, ZERO]).unwrap();
        for s in 0..20 {
            let theta = random_theta(&clean, s);
            let p1 = clean.forward(&theta, &rho).unwrap().purity();
            let p2 = noisy.forward(&theta, &rho).unwrap().purity();
            assert!(p2 < p1 - 1e-9, "{p2} vs {p1}");
        }
    }

    #[test]
    fn split_recomposes() {
        let a = build_hea(3, 2, 0.8, Topology::Ladder).unwrap();
        let mut rng = stream(4);
        for s in 0..20 {
            let theta = random_theta(&a, s);
            let rho = random_pure_state(3, &mut rng);
            let full = a.forward(&theta, &rho).unwrap();
            let k = (s as usize * 7) % a.param_count();
            let sp = a.split_at(&theta, k).unwrap();
            let composed = sp.apply_left(&sp.apply_gate(&sp.apply_right(&rho).unwrap()).unwrap()).unwrap();
            assert!(composed.matrix().max_abs_diff(full.matrix()) < 1e-12);
        }
        let theta = random_theta(&a, 0);
        assert_eq!(a.split_at(&theta, 0).unwrap().right_gates().count(), 0);
        let last = a.split_at(&theta, a.param_count() - 1).unwrap();
        // last parameter is R_z on the last qubit, followed by the ladder
        assert_eq!(last.left_gates().count(), 2);
        assert!(a.split_at(&theta, a.param_count()).is_err());
    }

    #[test]
    fn generators_square_to_identity() {
        let a = build_hea(3, 1, 1.0, Topology::Ladder).unwrap();
        let theta = random_theta(&a, 5);
        for k in 0..a.param_count() {
            let v = a.split_at(&theta, k).unwrap().generator_matrix();
            assert!((&v * &v).max_abs_diff(&ComplexMatrix::identity(8)) == 0.0);
        }
    }

    #[test]
    fn adjoint_through_left_norms() {
        let obs = Observable::zz(3, 0, 1).unwrap();
        let clean = build_hea(3, 3, 1.0, Topology::Ladder).unwrap();
        let theta = random_theta(&clean, 6);
        let h = clean.split_at(&theta, 0).unwrap().adjoint_through_left(&obs).unwrap();
        assert!((h.norm() - obs.norm()).abs() < 1e-10);
        // an ansatz whose last gate is a parameter has an empty left part
        let r = GateSpec::rotation(GateKind::RotY, 0, 0).unwrap();
        let single = PQChAnsatz::new(3, alloc::vec![alloc::vec![r]]).unwrap();
        let h = single.split_at(&[0.3], 0).unwrap().adjoint_through_left(&obs).unwrap();
        assert_eq!(h, obs);
    }

    #[test]
    fn attenuation_grows_with_depth() {
        // Prepending layers on the input side keeps earlier pull-backs nested.
        let n = 3;
        let obs = Observable::zz(n, 0, 1).unwrap();
        let deep = build_hea(n, 10, 0.8, Topology::Ladder).unwrap();
        let theta = random_theta(&deep, 7);
        let per_layer = 2 * n;
        let mut last = f64::INFINITY;
        for depth in 1..=10 {
            let a = build_hea(n, depth, 0.8, Topology::Ladder).unwrap();
            let suffix = &theta[(10 - depth) * per_layer..];
            let mut m = obs.matrix().clone();
            for gate in a.gates().collect::<Vec<_>>().iter().rev() {
                m = gate.adjoint(&m, n, suffix);
            }
            let norm = m.frobenius_norm();
            assert!(norm < last, "depth {depth}: {norm} !< {last}");
            last = norm;
        }
    }

    #[test]
    fn cost_is_sinusoidal_in_each_angle() {
        let a = build_hea(2, 2, 0.8, Topology::Ladder).unwrap();
        let obs = Observable::zz(2, 0, 1).unwrap();
        let rho = random_pure_state(2, &mut stream(8));
        let mut theta = random_theta(&a, 9);
        let cost = |t: &[f64]| a.forward(t, &rho).unwrap().expectation(&obs).re;
        for k in 0..a.param_count() {
            // three samples fix A sin2θ + B cos2θ + c; the rest must agree
            let at = |x: f64, theta: &mut Vec<f64>| {
                theta[k] = x;
                cost(theta)
            };
            let (f0, f1, f2) = (at(0.0, &mut theta), at(core::f64::consts::FRAC_PI_4, &mut theta), at(core::f64::consts::FRAC_PI_2, &mut theta));
            let c = (f0 + f2) / 2.0;
            let b = (f0 - f2) / 2.0;
            let amp = f1 - c;
            for i in 0..10 {
                let x = 0.37 * i as f64;
                let model = amp * libm::sin(2.0 * x) + b * libm::cos(2.0 * x) + c;
                assert!((at(x, &mut theta) - model).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn restricted_sampling() {
        let a = build_hea(2, 2, 1.0, Topology::Ladder).unwrap();
        let init = ParamInit::with_width(0.01, 42).unwrap();
        assert_eq!(init.mode, InitMode::Restricted);
        assert_eq!(ParamInit::with_width(1.0, 42).unwrap().mode, InitMode::Full);
        assert!(ParamInit::with_width(0.0, 1).is_err());
        let mut rng = stream(10);
        for _ in 0..200 {
            let theta = sample_params(&a, &init, &mut rng);
            for (i, t) in theta.iter().enumerate() {
                let offset = (t - init.base_point(i)).rem_euclid(TAU);
                assert!((0.0..TAU * 0.01).contains(&offset));
            }
        }
        let x = sample_params(&a, &init, &mut stream(11));
        let y = sample_params(&a, &init, &mut stream(11));
        assert_eq!(x, y);
    }

    #[test]
    fn full_sampling_is_uniform() {
        // Kolmogorov–Smirnov against Unif[0, 2π) on 10⁵ draws.
        let init = ParamInit::full(0);
        let mut rng = stream(12);
        let mut xs: Vec<f64> = (0..25_000).flat_map(|_| sample_angles(4, &init, &mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let f = x / TAU;
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max);
        // p = 0.01 critical value 1.628/√n
        assert!(d < 1.628 / libm::sqrt(n), "{d}");
    }

    #[test]
    fn weak_noise_ansatz() {
        use crate::adversary::{NoiseModel, Placement};
        let spec = WeakNoiseSpec::new(NoiseModel::Depolarizing, 0.1, Placement::After).unwrap();
        let a = build_hea_with_noise(2, 1, CnotNoise::Weak(spec), Topology::Ladder).unwrap();
        assert_eq!(a.gates().last().unwrap().kind, GateKind::WeakNoisyCnot);
        let rho = random_pure_state(2, &mut stream(13));
        assert!(a.forward(&[0.1, 0.2, 0.3, 0.4], &rho).unwrap().purity() < 1.0 - 1e-6);
    }
}
