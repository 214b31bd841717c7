//! Stochastic variational eigensolver: train U(θ) so that computational
//! basis states map to eigenvectors of H(ν).
//!
//! The objective is the weighted diagonal sum
//!
//!   M(θ) = Σ_j q_j ⟨ψ_j| U†(θ) H(ν) U(θ) |ψ_j⟩
//!
//! with a strictly increasing weight distribution q. Eigenvalues majorize
//! diagonal elements, so M(θ) ≥ Σ_j q_j λ_j^↓ with equality when the
//! circuit diagonalizes H; training therefore pairs the largest weight with
//! the smallest eigenvalue. Angles are updated by plain gradient descent on
//! parameter-shift gradients. When the index space is small the weighted
//! sum is evaluated in full; otherwise indices are drawn from q and the
//! objective is a median of sample means.

use rand::distr::Distribution;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::pauli::PauliHamiltonian;
use crate::rng;
use crate::sim::{
    hamiltonian_expectation, shot_hamiltonian_estimate, AnsatzCircuit, Backend, EigenbasisMap,
    StateVector,
};

/// Strictly increasing positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDistribution {
    values: Vec<f64>,
}

impl WeightDistribution {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("weight distribution cannot be empty"));
        }
        if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid("weights must be positive and finite"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("weights must be strictly increasing"));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(WeightDistribution { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Linear ramp q_j = 2j / (N(N+1)), j = 1..N: strictly increasing with a
/// bounded max/min ratio, which keeps importance-sampling variance tame.
pub fn default_weights(count: usize) -> Result<WeightDistribution> {
    if count == 0 {
        return Err(Error::invalid("need at least one weight"));
    }
    let denom = (count * (count + 1)) as f64;
    WeightDistribution::new((1..=count).map(|j| 2.0 * j as f64 / denom).collect())
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvqeConfig {
    /// Entangling-block count of the circuit.
    pub depth: usize,
    /// Gradient-descent iterations.
    pub iterations: usize,
    /// Samples per median group (T) in sampled mode.
    pub sample_count: usize,
    /// Median group count (D) in sampled mode.
    pub median_groups: usize,
    /// Step size r_θ.
    pub learning_rate: f64,
    pub backend: Backend,
    /// Per-evaluation precision for the shots backend.
    pub shot_epsilon: f64,
    /// Per-evaluation failure probability for the shots backend.
    pub shot_eta: f64,
    pub seed: u64,
    /// Largest dimension for which the exact backend sums all N diagonal
    /// values instead of sampling.
    pub full_sum_threshold: usize,
}

impl Default for SvqeConfig {
    fn default() -> Self {
        SvqeConfig {
            depth: 10,
            iterations: 400,
            sample_count: 64,
            median_groups: 5,
            learning_rate: 0.25,
            backend: Backend::Exact,
            shot_epsilon: 0.1,
            shot_eta: 0.05,
            seed: 0,
            full_sum_threshold: 4096,
        }
    }
}

impl SvqeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.sample_count == 0 || self.median_groups == 0 {
            return Err(Error::invalid(
                "iterations, sample count and median groups must be at least 1",
            ));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        if !(self.shot_epsilon > 0.0) || !(self.shot_eta > 0.0 && self.shot_eta < 1.0) {
            return Err(Error::invalid("invalid shot precision parameters"));
        }
        Ok(())
    }
}

/// Trained angles with the diagonal values λ̂_j they produce.
///
/// With ascending weights the highest basis index trains toward the ground
/// state, so λ̂ is approximately descending in j; consumers must treat
/// (j, λ̂_j) as an opaque pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub lambda_hat: Vec<f64>,
    pub circuit: AnsatzCircuit,
}

/// Training result: the estimate plus the exact objective after each step.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingOutcome {
    pub estimate: SpectrumEstimate,
    pub objective_trace: Vec<f64>,
}

pub(crate) fn median_of(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// How one objective evaluation obtains its indices; drawn once per
/// gradient so the ±π/2 evaluations share samples and shot streams.
enum SamplePlan {
    FullSum,
    Sampled { indices: Vec<usize>, shot_seed: u64 },
}

fn make_plan(
    weights: &[f64],
    cfg: &SvqeConfig,
    rng: &mut rng::Stream,
) -> Result<SamplePlan> {
    let full_sum = cfg.backend == Backend::Exact && weights.len() <= cfg.full_sum_threshold;
    if full_sum {
        return Ok(SamplePlan::FullSum);
    }
    let dist = rand::distr::weighted::WeightedIndex::new(weights)
        .map_err(|e| Error::invalid(format!("weight sampling: {e}")))?;
    let indices = (0..cfg.sample_count * cfg.median_groups)
        .map(|_| dist.sample(rng))
        .collect();
    Ok(SamplePlan::Sampled {
        indices,
        shot_seed: rng.next_u64(),
    })
}

fn diagonal_value(
    circuit: &AnsatzCircuit,
    h: &PauliHamiltonian,
    state: &StateVector,
    backend: Backend,
    cfg: &SvqeConfig,
    shot_seed: u64,
) -> Result<f64> {
    let mapped = crate::sim::apply_ansatz(circuit, state)?;
    match backend {
        Backend::Exact => hamiltonian_expectation(&mapped, h),
        Backend::Shots => {
            shot_hamiltonian_estimate(&mapped, h, cfg.shot_epsilon, cfg.shot_eta, shot_seed)
        }
    }
}

fn evaluate_objective(
    circuit: &AnsatzCircuit,
    h: &PauliHamiltonian,
    weights: &[f64],
    plan: &SamplePlan,
    cfg: &SvqeConfig,
) -> Result<f64> {
    let n = circuit.n();
    match plan {
        SamplePlan::FullSum => {
            let mut sum = 0.0;
            for (j, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let state = StateVector::basis_state(n, j)?;
                sum += w * diagonal_value(circuit, h, &state, Backend::Exact, cfg, 0)?;
            }
            Ok(sum)
        }
        SamplePlan::Sampled { indices, shot_seed } => {
            // Evolved states are cached per distinct index; shot noise stays
            // per-position via substreams of the shared seed.
            let mut states: std::collections::HashMap<usize, StateVector> =
                std::collections::HashMap::new();
            let mut exact_cache: std::collections::HashMap<usize, f64> =
                std::collections::HashMap::new();
            let mut values = Vec::with_capacity(indices.len());
            for (position, &j) in indices.iter().enumerate() {
                let value = match cfg.backend {
                    Backend::Exact => match exact_cache.get(&j) {
                        Some(&v) => v,
                        None => {
                            let state = StateVector::basis_state(n, j)?;
                            let v =
                                diagonal_value(circuit, h, &state, Backend::Exact, cfg, 0)?;
                            exact_cache.insert(j, v);
                            v
                        }
                    },
                    Backend::Shots => {
                        if !states.contains_key(&j) {
                            let state = crate::sim::apply_ansatz(
                                circuit,
                                &StateVector::basis_state(n, j)?,
                            )?;
                            states.insert(j, state);
                        }
                        shot_hamiltonian_estimate(
                            &states[&j],
                            h,
                            cfg.shot_epsilon,
                            cfg.shot_eta,
                            rng::substream(*shot_seed, position as u64).next_u64(),
                        )?
                    }
                };
                values.push(value);
            }
            let means: Vec<f64> = values
                .chunks(cfg.sample_count)
                .map(|chunk| chunk.iter().sum::<f64>() / chunk.len() as f64)
                .collect();
            Ok(median_of(means))
        }
    }
}

fn check_problem(circuit: &AnsatzCircuit, h: &PauliHamiltonian, weights: usize) -> Result<()> {
    if circuit.n() != h.n() {
        return Err(Error::QubitMismatch {
            left: circuit.n(),
            right: h.n(),
        });
    }
    let dim = 1usize << h.n();
    if weights != dim {
        return Err(Error::invalid(format!(
            "weight distribution has {weights} entries, expected {dim}"
        )));
    }
    Ok(())
}

/// Evaluate M(θ).
///
/// Exact backend with dimension within the full-sum threshold evaluates the
/// weighted sum over all indices; otherwise T·D indices are drawn i.i.d.
/// from q and the result is the median of D group means.
pub fn objective_m(
    circuit: &AnsatzCircuit,
    h: &PauliHamiltonian,
    q: &WeightDistribution,
    cfg: &SvqeConfig,
    rng: &mut rng::Stream,
) -> Result<f64> {
    cfg.validate()?;
    check_problem(circuit, h, q.len())?;
    let plan = make_plan(q.values(), cfg, rng)?;
    evaluate_objective(circuit, h, q.values(), &plan, cfg)
}

/// Parameter-shift gradient: ∂M/∂θ_i = (M(θ + π/2·e_i) − M(θ − π/2·e_i)) / 2.
///
/// Both shifted evaluations of every component reuse one sampling plan
/// (indices and shot streams), pairing the noise.
pub fn parameter_shift_gradient(
    circuit: &AnsatzCircuit,
    h: &PauliHamiltonian,
    q: &WeightDistribution,
    cfg: &SvqeConfig,
    rng: &mut rng::Stream,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    check_problem(circuit, h, q.len())?;
    let plan = make_plan(q.values(), cfg, rng)?;
    gradient_with_plan(circuit, h, q.values(), &plan, cfg)
}

fn gradient_with_plan(
    circuit: &AnsatzCircuit,
    h: &PauliHamiltonian,
    weights: &[f64],
    plan: &SamplePlan,
    cfg: &SvqeConfig,
) -> Result<Vec<f64>> {
    let mut grad = Vec::with_capacity(circuit.theta().len());
    for i in 0..circuit.theta().len() {
        let plus = evaluate_objective(&circuit.with_shifted(i, FRAC_PI_2)?, h, weights, plan, cfg)?;
        let minus =
            evaluate_objective(&circuit.with_shifted(i, -FRAC_PI_2)?, h, weights, plan, cfg)?;
        grad.push((plus - minus) / 2.0);
    }
    Ok(grad)
}

/// Train from a random initialization drawn from `cfg.seed`.
pub fn train_svqe(h: &PauliHamiltonian, cfg: &SvqeConfig) -> Result<TrainingOutcome> {
    cfg.validate()?;
    let mut rng = rng::master(cfg.seed);
    let circuit = AnsatzCircuit::random(h.n(), cfg.depth, &mut rng)?;
    train_loop(h, cfg, circuit, &mut rng)
}

/// Warm start: resume from an existing circuit (the outer learning loop
/// retrains on slightly changed Hamiltonians).
pub fn train_svqe_from(
    h: &PauliHamiltonian,
    cfg: &SvqeConfig,
    circuit: AnsatzCircuit,
) -> Result<TrainingOutcome> {
    cfg.validate()?;
    let mut rng = rng::master(cfg.seed);
    train_loop(h, cfg, circuit, &mut rng)
}

fn train_loop(
    h: &PauliHamiltonian,
    cfg: &SvqeConfig,
    mut circuit: AnsatzCircuit,
    rng: &mut rng::Stream,
) -> Result<TrainingOutcome> {
    let dim = 1usize << h.n();
    let q = default_weights(dim)?;
    check_problem(&circuit, h, q.len())?;
    let log_exact = dim <= cfg.full_sum_threshold;

    let mut trace = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        let plan = make_plan(q.values(), cfg, rng)?;
        let grad = gradient_with_plan(&circuit, h, q.values(), &plan, cfg)?;
        let theta: Vec<f64> = circuit
            .theta()
            .iter()
            .zip(&grad)
            .map(|(t, g)| t - cfg.learning_rate * g)
            .collect();
        circuit = circuit.with_theta(theta)?;

        let logged = if log_exact {
            evaluate_objective(&circuit, h, q.values(), &SamplePlan::FullSum, cfg)?
        } else {
            evaluate_objective(&circuit, h, q.values(), &plan, cfg)?
        };
        trace.push(logged);
    }

    let lambda_hat = extract_spectrum(&circuit, h)?;
    Ok(TrainingOutcome {
        estimate: SpectrumEstimate {
            lambda_hat,
            circuit,
        },
        objective_trace: trace,
    })
}

/// All diagonal values λ̂_j = ⟨ψ_j| U† H U |ψ_j⟩, exact backend.
pub fn extract_spectrum(map: &impl EigenbasisMap, h: &PauliHamiltonian) -> Result<Vec<f64>> {
    if map.qubit_count() != h.n() {
        return Err(Error::QubitMismatch {
            left: map.qubit_count(),
            right: h.n(),
        });
    }
    (0..1usize << h.n())
        .map(|j| hamiltonian_expectation(&map.map_basis(j)?, h))
        .collect()
}
