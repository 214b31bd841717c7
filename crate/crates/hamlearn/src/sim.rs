//! Dense statevector simulation.
//!
//! Conventions, fixed once for reproducibility:
//!
//! - qubit 0 is the leftmost tensor factor / most significant bit of the
//!   basis index;
//! - Rz(φ) = diag(e^{-iφ/2}, e^{iφ/2});
//! - Ry(φ) = [[cos φ/2, -sin φ/2], [sin φ/2, cos φ/2]].
//!
//! The layered circuit applies one rotation layer (Rz·Ry·Rz per qubit),
//! then `depth` blocks of a CNOT ring (0→1, 1→2, …, n-1→0) followed by
//! another rotation layer, for 3n(depth+1) angles in total. For a single
//! qubit the ring is empty.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliHamiltonian, PauliString};
use crate::rng;

/// How expectation values are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Infinite-shot expectation values (deterministic).
    #[default]
    Exact,
    /// Finite measurement statistics with Hoeffding-sized shot counts.
    Shots,
}

/// Normalized pure state on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state |j⟩.
    pub fn basis_state(n: usize, j: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("need at least one qubit"));
        }
        let dim = 1usize << n;
        if j >= dim {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[j] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Build from raw amplitudes; must be normalized within 1e-9.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << n {
            return Err(Error::invalid("amplitude count must be 2^n"));
        }
        let state = StateVector { n, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "state is not normalized: |ψ| = {norm}"
            )));
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Bit of qubit `q` in basis index `j` (qubit 0 = most significant).
    fn bit(&self, j: usize, q: usize) -> bool {
        j & self.qubit_mask(q) != 0
    }

    fn qubit_mask(&self, q: usize) -> usize {
        1usize << (self.n - 1 - q)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::InvalidQubit { qubit: q, n: self.n });
        }
        Ok(())
    }

    fn apply_gate_in_place(&mut self, gate: Gate) -> Result<()> {
        match gate {
            Gate::Rz { qubit, angle } => {
                self.check_qubit(qubit)?;
                let half = angle / 2.0;
                let lo = Complex64::from_polar(1.0, -half);
                let hi = Complex64::from_polar(1.0, half);
                let mask = self.qubit_mask(qubit);
                for (j, a) in self.amps.iter_mut().enumerate() {
                    *a *= if j & mask == 0 { lo } else { hi };
                }
            }
            Gate::Ry { qubit, angle } => {
                self.check_qubit(qubit)?;
                let (s, c) = (angle / 2.0).sin_cos();
                let mask = self.qubit_mask(qubit);
                for j in 0..self.amps.len() {
                    if j & mask == 0 {
                        let a0 = self.amps[j];
                        let a1 = self.amps[j | mask];
                        self.amps[j] = c * a0 - s * a1;
                        self.amps[j | mask] = s * a0 + c * a1;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                self.check_qubit(control)?;
                self.check_qubit(target)?;
                if control == target {
                    return Err(Error::invalid("cnot control equals target"));
                }
                let cmask = self.qubit_mask(control);
                let tmask = self.qubit_mask(target);
                for j in 0..self.amps.len() {
                    if j & cmask != 0 && j & tmask == 0 {
                        self.amps.swap(j, j | tmask);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Simulator primitive gates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rz { qubit: usize, angle: f64 },
    Ry { qubit: usize, angle: f64 },
    Cnot { control: usize, target: usize },
}

/// Apply a gate, returning the new state.
pub fn apply_gate(state: &StateVector, gate: Gate) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_gate_in_place(gate)?;
    Ok(out)
}

/// Layered hardware-efficient circuit U(θ).
///
/// Angles are indexed by (layer d ∈ 0..=depth, qubit q, slot k ∈ {0,1,2} for
/// Rz, Ry, Rz), flattened as `3·(d·n + q) + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzCircuit {
    n: usize,
    depth: usize,
    theta: Vec<f64>,
}

impl AnsatzCircuit {
    pub fn parameter_count(n: usize, depth: usize) -> usize {
        3 * n * (depth + 1)
    }

    pub fn new(n: usize, depth: usize, theta: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("need at least one qubit"));
        }
        if theta.len() != Self::parameter_count(n, depth) {
            return Err(Error::invalid(format!(
                "expected {} angles for n = {n}, depth = {depth}, got {}",
                Self::parameter_count(n, depth),
                theta.len()
            )));
        }
        if theta.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("non-finite angle"));
        }
        Ok(AnsatzCircuit { n, depth, theta })
    }

    /// All angles zero (every rotation is the identity).
    pub fn zeroed(n: usize, depth: usize) -> Result<Self> {
        Self::new(n, depth, vec![0.0; Self::parameter_count(n, depth)])
    }

    /// Angles drawn uniformly from [0, 2π).
    pub fn random(n: usize, depth: usize, rng: &mut rng::Stream) -> Result<Self> {
        let theta = (0..Self::parameter_count(n, depth))
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        Self::new(n, depth, theta)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Copy with one angle shifted by `delta` (parameter-shift evaluations).
    pub fn with_shifted(&self, index: usize, delta: f64) -> Result<Self> {
        if index >= self.theta.len() {
            return Err(Error::IndexOutOfRange {
                index,
                n: self.theta.len(),
            });
        }
        let mut theta = self.theta.clone();
        theta[index] += delta;
        Self::new(self.n, self.depth, theta)
    }

    /// Copy with all angles replaced.
    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        Self::new(self.n, self.depth, theta)
    }

    fn angle(&self, layer: usize, qubit: usize, slot: usize) -> f64 {
        self.theta[3 * (layer * self.n + qubit) + slot]
    }

    fn apply_layer(&self, state: &mut StateVector, layer: usize) -> Result<()> {
        for q in 0..self.n {
            state.apply_gate_in_place(Gate::Rz {
                qubit: q,
                angle: self.angle(layer, q, 0),
            })?;
            state.apply_gate_in_place(Gate::Ry {
                qubit: q,
                angle: self.angle(layer, q, 1),
            })?;
            state.apply_gate_in_place(Gate::Rz {
                qubit: q,
                angle: self.angle(layer, q, 2),
            })?;
        }
        Ok(())
    }

    fn apply_ring(&self, state: &mut StateVector) -> Result<()> {
        if self.n == 1 {
            return Ok(());
        }
        for q in 0..self.n {
            state.apply_gate_in_place(Gate::Cnot {
                control: q,
                target: (q + 1) % self.n,
            })?;
        }
        Ok(())
    }
}

/// Apply the full circuit to a state.
pub fn apply_ansatz(circuit: &AnsatzCircuit, state: &StateVector) -> Result<StateVector> {
    if circuit.n() != state.n() {
        return Err(Error::QubitMismatch {
            left: circuit.n(),
            right: state.n(),
        });
    }
    let mut out = state.clone();
    circuit.apply_layer(&mut out, 0)?;
    for d in 1..=circuit.depth() {
        circuit.apply_ring(&mut out)?;
        circuit.apply_layer(&mut out, d)?;
    }
    Ok(out)
}

/// ⟨ψ|P|ψ⟩, exact, clamped to [-1, 1] against roundoff.
pub fn pauli_expectation(state: &StateVector, string: &PauliString) -> Result<f64> {
    if state.n() != string.n() {
        return Err(Error::QubitMismatch {
            left: state.n(),
            right: string.n(),
        });
    }
    // P|j⟩ = phase(j) |j ^ flip⟩ with per-qubit phases X: 1, Y: i(-1)^b,
    // Z: (-1)^b, where b is the qubit's bit in j.
    let mut flip = 0usize;
    for (q, &op) in string.ops().iter().enumerate() {
        if matches!(op, Pauli::X | Pauli::Y) {
            flip |= state.qubit_mask(q);
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &aj) in state.amps.iter().enumerate() {
        if aj == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut phase = Complex64::new(1.0, 0.0);
        for (q, &op) in string.ops().iter().enumerate() {
            let b = state.bit(j, q);
            match op {
                Pauli::I | Pauli::X => {}
                Pauli::Y => {
                    phase *= Complex64::new(0.0, if b { -1.0 } else { 1.0 });
                }
                Pauli::Z => {
                    if b {
                        phase = -phase;
                    }
                }
            }
        }
        acc += state.amps[j ^ flip].conj() * phase * aj;
    }
    Ok(acc.re.clamp(-1.0, 1.0))
}

/// ⟨ψ|H|ψ⟩ = Σ_ℓ ν_ℓ ⟨ψ|E_ℓ|ψ⟩, exact.
pub fn hamiltonian_expectation(state: &StateVector, h: &PauliHamiltonian) -> Result<f64> {
    if state.n() != h.n() {
        return Err(Error::QubitMismatch {
            left: state.n(),
            right: h.n(),
        });
    }
    let mut sum = 0.0;
    for term in h.terms() {
        if term.coefficient == 0.0 {
            continue;
        }
        sum += term.coefficient * pauli_expectation(state, &term.string)?;
    }
    Ok(sum)
}

/// Sample mean of `shots` single-shot ±1 measurements of `P` on `state`.
pub fn shot_pauli_estimate(
    state: &StateVector,
    string: &PauliString,
    shots: u64,
    rng: &mut rng::Stream,
) -> Result<f64> {
    if shots == 0 {
        return Err(Error::invalid("shot count must be positive"));
    }
    let expectation = pauli_expectation(state, string)?;
    let p_plus = ((1.0 + expectation) / 2.0).clamp(0.0, 1.0);
    let dist = Binomial::new(shots, p_plus)
        .map_err(|e| Error::invalid(format!("binomial sampling: {e}")))?;
    let plus = dist.sample(rng);
    Ok((2.0 * plus as f64 - shots as f64) / shots as f64)
}

/// Hoeffding shot count so one term reaches precision ε/‖ν‖₁ with
/// failure probability η/m: ⌈2 ln(2m/η) ‖ν‖₁² / ε²⌉.
pub fn hoeffding_shots_per_term(l1: f64, m: usize, epsilon: f64, eta: f64) -> u64 {
    let shots = 2.0 * (2.0 * m as f64 / eta).ln() * l1 * l1 / (epsilon * epsilon);
    shots.ceil().max(1.0) as u64
}

/// Estimate ⟨ψ|H|ψ⟩ from finite shots: each term is measured on its own
/// substream of `seed` with Hoeffding-sized counts, so the combined error is
/// at most ε with probability at least 1-η. Zero-coefficient terms consume
/// no shots.
pub fn shot_hamiltonian_estimate(
    state: &StateVector,
    h: &PauliHamiltonian,
    epsilon: f64,
    eta: f64,
    seed: u64,
) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid("eta must lie in (0, 1)"));
    }
    if state.n() != h.n() {
        return Err(Error::QubitMismatch {
            left: state.n(),
            right: h.n(),
        });
    }
    let (l1, _) = h.coefficient_norms();
    if l1 == 0.0 {
        return Ok(0.0);
    }
    let shots = hoeffding_shots_per_term(l1, h.term_count(), epsilon, eta);
    let mut sum = 0.0;
    for (index, term) in h.terms().iter().enumerate() {
        if term.coefficient == 0.0 {
            continue;
        }
        let mut stream = rng::substream(seed, index as u64);
        sum += term.coefficient * shot_pauli_estimate(state, &term.string, shots, &mut stream)?;
    }
    Ok(sum)
}

/// Anything that maps computational basis states to (approximate)
/// eigenvectors: a trained circuit, or an explicit unitary in tests.
pub trait EigenbasisMap {
    fn qubit_count(&self) -> usize;
    /// U|ψ_j⟩ for basis index `j`.
    fn map_basis(&self, j: usize) -> Result<StateVector>;
}

impl EigenbasisMap for AnsatzCircuit {
    fn qubit_count(&self) -> usize {
        self.n()
    }

    fn map_basis(&self, j: usize) -> Result<StateVector> {
        apply_ansatz(self, &StateVector::basis_state(self.n(), j)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::tests::table1_row1;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn overlap(a: &StateVector, b: &StateVector) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| x.conj() * y)
            .sum::<Complex64>()
            .norm()
    }

    #[test]
    fn basis_states() {
        let s = StateVector::basis_state(1, 0).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));

        // |101⟩ with qubit 0 as most significant bit.
        let s = StateVector::basis_state(3, 5).unwrap();
        assert_eq!(s.amplitudes()[5], Complex64::new(1.0, 0.0));
        assert!(s.bit(5, 0) && !s.bit(5, 1) && s.bit(5, 2));

        assert!(matches!(
            StateVector::basis_state(2, 4),
            Err(Error::IndexOutOfRange { index: 4, n: 2 })
        ));
    }

    #[test]
    fn ry_pi_flips_and_rz_keeps_eigenstates() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let flipped = apply_gate(&zero, Gate::Ry { qubit: 0, angle: PI }).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        assert!((overlap(&flipped, &one) - 1.0).abs() < 1e-12);

        let phased = apply_gate(&zero, Gate::Rz { qubit: 0, angle: 1.234 }).unwrap();
        assert!((overlap(&phased, &zero) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let s = StateVector::basis_state(2, 0b10).unwrap();
        let t = apply_gate(&s, Gate::Cnot { control: 0, target: 1 }).unwrap();
        assert!((overlap(&t, &StateVector::basis_state(2, 0b11).unwrap()) - 1.0).abs() < 1e-12);

        assert!(apply_gate(&s, Gate::Cnot { control: 0, target: 0 }).is_err());
        assert!(apply_gate(&s, Gate::Ry { qubit: 2, angle: 0.1 }).is_err());
    }

    #[test]
    fn zero_angles_reduce_to_the_cnot_rings() {
        let circuit = AnsatzCircuit::zeroed(3, 2).unwrap();
        let input = StateVector::basis_state(3, 3).unwrap();
        let out = apply_ansatz(&circuit, &input).unwrap();

        let mut expect = input.clone();
        for _ in 0..2 {
            for q in 0..3 {
                expect
                    .apply_gate_in_place(Gate::Cnot { control: q, target: (q + 1) % 3 })
                    .unwrap();
            }
        }
        assert!((overlap(&out, &expect) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn depth_zero_applies_single_rotation_layer() {
        let mut theta = vec![0.0; 3];
        theta[1] = PI; // Ry(π) on the only qubit
        let circuit = AnsatzCircuit::new(1, 0, theta).unwrap();
        let out = apply_ansatz(&circuit, &StateVector::basis_state(1, 0).unwrap()).unwrap();
        assert!((overlap(&out, &StateVector::basis_state(1, 1).unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ansatz_preserves_norm() {
        let mut rng = rng::master(3);
        for _ in 0..10 {
            let circuit = AnsatzCircuit::random(3, 4, &mut rng).unwrap();
            let out = apply_ansatz(&circuit, &StateVector::basis_state(3, 2).unwrap()).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn pauli_expectations_on_reference_states() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let z = PauliString::parse(&[3]).unwrap();
        let x = PauliString::parse(&[1]).unwrap();
        assert_eq!(pauli_expectation(&zero, &z).unwrap(), 1.0);
        assert_eq!(pauli_expectation(&zero, &x).unwrap(), 0.0);

        // |+⟩ via the pinned Ry convention.
        let plus = apply_gate(&zero, Gate::Ry { qubit: 0, angle: FRAC_PI_2 }).unwrap();
        assert!((pauli_expectation(&plus, &x).unwrap() - 1.0).abs() < 1e-12);

        let one = StateVector::basis_state(1, 1).unwrap();
        let y = PauliString::parse(&[2]).unwrap();
        assert_eq!(pauli_expectation(&one, &y).unwrap(), 0.0);
    }

    #[test]
    fn hamiltonian_expectation_on_basis_states() {
        let z = PauliString::parse(&[3]).unwrap();
        let h = PauliHamiltonian::new(1, [(1.0, z)]).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        assert_eq!(hamiltonian_expectation(&one, &h).unwrap(), -1.0);

        // Only the I⊗Z⊗Z term survives on |000⟩.
        let h = table1_row1();
        let zero3 = StateVector::basis_state(3, 0).unwrap();
        assert!((hamiltonian_expectation(&zero3, &h).unwrap() - (-0.4988)).abs() < 1e-12);

        let zero_h = h.with_coefficients(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(hamiltonian_expectation(&zero3, &zero_h).unwrap(), 0.0);
    }

    #[test]
    fn shot_estimates_on_eigenstates_are_exact() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let z = PauliString::parse(&[3]).unwrap();
        let mut rng = rng::master(0);
        for shots in [1, 7, 1000] {
            assert_eq!(shot_pauli_estimate(&zero, &z, shots, &mut rng).unwrap(), 1.0);
        }
        assert!(shot_pauli_estimate(&zero, &z, 0, &mut rng).is_err());
    }

    #[test]
    fn shot_estimate_is_seed_deterministic_and_concentrated() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let plus = apply_gate(&zero, Gate::Ry { qubit: 0, angle: FRAC_PI_2 }).unwrap();
        let z = PauliString::parse(&[3]).unwrap();

        let a = shot_pauli_estimate(&plus, &z, 100_000, &mut rng::master(11)).unwrap();
        let b = shot_pauli_estimate(&plus, &z, 100_000, &mut rng::master(11)).unwrap();
        assert_eq!(a, b);
        // ⟨Z⟩ = 0 on |+⟩; 3σ = 3/√shots ≈ 0.0095.
        assert!(a.abs() < 0.02);
    }

    #[test]
    fn shot_estimator_is_unbiased() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let tilted = apply_gate(&zero, Gate::Ry { qubit: 0, angle: 1.0 }).unwrap();
        let z = PauliString::parse(&[3]).unwrap();
        let exact = pauli_expectation(&tilted, &z).unwrap();

        let shots = 16u64;
        let runs = 10_000usize;
        let mean = (0..runs)
            .map(|i| shot_pauli_estimate(&tilted, &z, shots, &mut rng::master(i as u64)).unwrap())
            .sum::<f64>()
            / runs as f64;
        assert!((mean - exact).abs() <= 4.0 / ((runs as f64) * shots as f64).sqrt());
    }

    #[test]
    fn shot_hamiltonian_estimate_concentrates() {
        let h = table1_row1();
        let zero3 = StateVector::basis_state(3, 0).unwrap();
        let exact = hamiltonian_expectation(&zero3, &h).unwrap();
        let (epsilon, eta) = (0.05, 0.05);
        let hits = (0..100)
            .filter(|&s| {
                let est = shot_hamiltonian_estimate(&zero3, &h, epsilon, eta, s).unwrap();
                (est - exact).abs() <= epsilon
            })
            .count();
        assert!(hits >= 95, "only {hits}/100 runs within ε");

        let zero_h = h.with_coefficients(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(
            shot_hamiltonian_estimate(&zero3, &zero_h, 0.1, 0.1, 1).unwrap(),
            0.0
        );
        assert!(shot_hamiltonian_estimate(&zero3, &h, 0.0, 0.1, 1).is_err());
        assert!(shot_hamiltonian_estimate(&zero3, &h, 0.1, 1.0, 1).is_err());
    }

    #[test]
    fn eigenstate_hamiltonian_shot_estimate_is_exact() {
        let z = PauliString::parse(&[3]).unwrap();
        let h = PauliHamiltonian::new(1, [(1.0, z)]).unwrap();
        let zero = StateVector::basis_state(1, 0).unwrap();
        assert_eq!(
            shot_hamiltonian_estimate(&zero, &h, 0.1, 0.05, 3).unwrap(),
            1.0
        );
    }
}
