//! Brute-force ground truth: dense matrices, exact diagonalization, exact
//! log-partition values, Gibbs states and their measurement statistics.
//!
//! Everything here is classical test scaffolding for the stochastic
//! pipeline, so dense operations are capped at [`DENSE_QUBIT_CAP`] qubits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logz::ProbabilityVector;
use crate::pauli::{PauliHamiltonian, PauliString};
use crate::sim::{pauli_expectation, EigenbasisMap, StateVector};

/// Largest qubit count for which dense 2^n × 2^n operations are attempted.
pub const DENSE_QUBIT_CAP: usize = 12;

fn check_cap(n: usize) -> Result<()> {
    if n > DENSE_QUBIT_CAP {
        return Err(Error::DimensionCap {
            n,
            cap: DENSE_QUBIT_CAP,
        });
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::invalid(format!(
            "inverse temperature must be positive and finite, got {beta}"
        )));
    }
    Ok(())
}

/// Dense Hermitian matrix Σ_ℓ ν_ℓ · (P_1 ⊗ … ⊗ P_n).
pub fn dense_matrix(h: &PauliHamiltonian) -> Result<DMatrix<Complex64>> {
    check_cap(h.n())?;
    let dim = 1usize << h.n();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for term in h.terms() {
        if term.coefficient == 0.0 {
            continue;
        }
        let mut kron = DMatrix::<Complex64>::identity(1, 1);
        for op in term.string.ops() {
            let m = op.matrix();
            let factor = DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]);
            kron = kron.kronecker(&factor);
        }
        out += kron * Complex64::new(term.coefficient, 0.0);
    }
    Ok(out)
}

/// Full Hermitian eigendecomposition, eigenvalues ascending.
///
/// Each eigenvector's phase is fixed so its first component of magnitude
/// above 1e-12 is real and positive, making the decomposition reproducible.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    fn qubit_count(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// Eigenvector `j` as a state vector.
    pub fn eigenvector_state(&self, j: usize) -> Result<StateVector> {
        if j >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: j,
                n: self.qubit_count(),
            });
        }
        StateVector::from_amplitudes(
            self.qubit_count(),
            self.eigenvectors.column(j).iter().copied().collect(),
        )
    }

    /// The diagonalizing unitary whose column `j` is eigenvector `j`.
    pub fn unitary(&self) -> UnitaryMatrix {
        UnitaryMatrix {
            n: self.qubit_count(),
            matrix: self.eigenvectors.clone(),
        }
    }
}

pub fn exact_eigensystem(h: &PauliHamiltonian) -> Result<Spectrum> {
    let matrix = dense_matrix(h)?;
    let dim = matrix.nrows();
    let eigen = matrix.symmetric_eigen();

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));

    let mut eigenvalues = Vec::with_capacity(dim);
    let mut eigenvectors = DMatrix::<Complex64>::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(eigen.eigenvalues[src]);
        let mut column = eigen.eigenvectors.column(src).clone_owned();
        if let Some(first) = column.iter().find(|c| c.norm() > 1e-12) {
            let phase = first.conj() / first.norm();
            column *= phase;
        }
        eigenvectors.set_column(dst, &column);
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// log tr(e^{-βH}) = logsumexp(-βλ), computed with a max shift.
pub fn exact_log_partition(h: &PauliHamiltonian, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let spectrum = exact_eigensystem(h)?;
    Ok(log_sum_exp_neg_beta(spectrum.eigenvalues(), beta))
}

fn log_sum_exp_neg_beta(eigenvalues: &[f64], beta: f64) -> f64 {
    let top = eigenvalues
        .iter()
        .map(|&l| -beta * l)
        .fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = eigenvalues.iter().map(|&l| (-beta * l - top).exp()).sum();
    top + sum.ln()
}

/// Gibbs eigenvalue distribution softmax(-βλ); strictly positive, sums to 1.
pub fn gibbs_probabilities(eigenvalues: &[f64], beta: f64) -> Result<ProbabilityVector> {
    check_beta(beta)?;
    if eigenvalues.is_empty() {
        return Err(Error::invalid("empty spectrum"));
    }
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::invalid("non-finite eigenvalue"));
    }
    let top = eigenvalues
        .iter()
        .map(|&l| -beta * l)
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = eigenvalues.iter().map(|&l| (-beta * l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    ProbabilityVector::new(weights.into_iter().map(|w| w / total).collect())
}

/// Unit-trace positive semidefinite Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates squareness, Hermiticity and unit trace (both within 1e-9).
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::invalid("density matrix must be square"));
        }
        let trace: Complex64 = matrix.diagonal().iter().sum();
        if (trace - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
            return Err(Error::invalid(format!("trace must be 1, got {trace}")));
        }
        let herm_defect = (&matrix - matrix.adjoint()).norm();
        if herm_defect > 1e-9 {
            return Err(Error::invalid(format!(
                "matrix is not Hermitian (defect {herm_defect:e})"
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Smallest eigenvalue; ≥ -1e-9 for a valid state.
    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |acc, &l| acc.min(l))
    }
}

/// ρ_β = e^{-βH} / tr(e^{-βH}).
pub fn exact_gibbs_state(h: &PauliHamiltonian, beta: f64) -> Result<DensityMatrix> {
    let spectrum = exact_eigensystem(h)?;
    let probabilities = gibbs_probabilities(spectrum.eigenvalues(), beta)?;
    gibbs_from_eigenbasis(&spectrum.eigenvectors, probabilities.as_slice())
}

fn gibbs_from_eigenbasis(
    vectors: &DMatrix<Complex64>,
    probabilities: &[f64],
) -> Result<DensityMatrix> {
    let mut scaled = vectors.clone();
    for (j, &p) in probabilities.iter().enumerate() {
        scaled.column_mut(j).scale_mut(p);
    }
    DensityMatrix::new(scaled * vectors.adjoint())
}

/// One observed Pauli expectation tr(ρ_β E_ℓ).
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub string: PauliString,
    pub value: f64,
}

/// Gibbs-state measurement data {e_ℓ} at inverse temperature β: the input
/// of the learning problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RecordJson", into = "RecordJson")]
pub struct MeasurementRecord {
    beta: f64,
    observations: Vec<Observation>,
}

impl MeasurementRecord {
    pub fn new(beta: f64, observations: Vec<Observation>) -> Result<Self> {
        check_beta(beta)?;
        if observations.is_empty() {
            return Err(Error::invalid("a measurement record needs observations"));
        }
        let n = observations[0].string.n();
        let mut seen = std::collections::HashSet::new();
        for obs in &observations {
            if obs.string.n() != n {
                return Err(Error::QubitMismatch {
                    left: obs.string.n(),
                    right: n,
                });
            }
            if obs.value.abs() > 1.0 + 1e-9 {
                return Err(Error::invalid(format!(
                    "Pauli expectation {} outside [-1, 1]",
                    obs.value
                )));
            }
            if !seen.insert(obs.string.clone()) {
                return Err(Error::invalid(format!(
                    "duplicate observable {}",
                    obs.string
                )));
            }
        }
        Ok(MeasurementRecord { beta, observations })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn n(&self) -> usize {
        self.observations[0].string.n()
    }

    pub fn values(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.value).collect()
    }

    /// Checks the record's observables align term-by-term with `h`.
    pub fn check_alignment(&self, h: &PauliHamiltonian) -> Result<()> {
        if self.len() != h.term_count() {
            return Err(Error::invalid(format!(
                "record has {} observations, Hamiltonian has {} terms",
                self.len(),
                h.term_count()
            )));
        }
        for (obs, term) in self.observations.iter().zip(h.terms()) {
            if obs.string != term.string {
                return Err(Error::invalid(format!(
                    "observable {} does not match term {}",
                    obs.string, term.string
                )));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RecordJson {
    beta: f64,
    observations: Vec<ObservationJson>,
}

#[derive(Serialize, Deserialize)]
struct ObservationJson {
    codes: Vec<u8>,
    value: f64,
}

impl TryFrom<RecordJson> for MeasurementRecord {
    type Error = Error;
    fn try_from(raw: RecordJson) -> Result<Self> {
        MeasurementRecord::new(
            raw.beta,
            raw.observations
                .into_iter()
                .map(|o| {
                    Ok(Observation {
                        string: PauliString::parse(&o.codes)?,
                        value: o.value,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

impl From<MeasurementRecord> for RecordJson {
    fn from(record: MeasurementRecord) -> Self {
        RecordJson {
            beta: record.beta,
            observations: record
                .observations
                .into_iter()
                .map(|o| ObservationJson {
                    codes: o.string.emit(),
                    value: o.value,
                })
                .collect(),
        }
    }
}

/// Synthetic measurement data: e_ℓ = tr(ρ_β E_ℓ), clamped to [-1, 1].
pub fn exact_gibbs_expectations(
    h: &PauliHamiltonian,
    beta: f64,
    strings: &[PauliString],
) -> Result<MeasurementRecord> {
    let spectrum = exact_eigensystem(h)?;
    let probabilities = gibbs_probabilities(spectrum.eigenvalues(), beta)?;
    let states: Vec<StateVector> = (0..spectrum.dim())
        .map(|j| spectrum.eigenvector_state(j))
        .collect::<Result<Vec<_>>>()?;
    let observations = strings
        .iter()
        .map(|string| {
            if string.n() != h.n() {
                return Err(Error::QubitMismatch {
                    left: string.n(),
                    right: h.n(),
                });
            }
            let mut value = 0.0;
            for (state, &p) in states.iter().zip(probabilities.as_slice()) {
                value += p * pauli_expectation(state, string)?;
            }
            Ok(Observation {
                string: string.clone(),
                value: value.clamp(-1.0, 1.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementRecord::new(beta, observations)
}

/// (1/2) Σ singular values of ρ₁ - ρ₂.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::QubitMismatch {
            left: rho1.dim(),
            right: rho2.dim(),
        });
    }
    let diff = rho1.matrix() - rho2.matrix();
    let eigenvalues = diff.symmetric_eigen().eigenvalues;
    Ok((0.5 * eigenvalues.iter().map(|l| l.abs()).sum::<f64>()).clamp(0.0, 1.0))
}

/// Explicit unitary acting as a basis-to-eigenvector map; test scaffolding
/// for "perfectly trained" circuits.
#[derive(Debug, Clone)]
pub struct UnitaryMatrix {
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl UnitaryMatrix {
    pub fn new(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::invalid("unitary dimension must be 2^n"));
        }
        for j in 0..dim {
            let norm = matrix.column(j).norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "column {j} has norm {norm}, expected 1"
                )));
            }
        }
        Ok(UnitaryMatrix { n, matrix })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

impl EigenbasisMap for UnitaryMatrix {
    fn qubit_count(&self) -> usize {
        self.n
    }

    fn map_basis(&self, j: usize) -> Result<StateVector> {
        if j >= self.matrix.ncols() {
            return Err(Error::IndexOutOfRange { index: j, n: self.n });
        }
        StateVector::from_amplitudes(self.n, self.matrix.column(j).iter().copied().collect())
    }
}
