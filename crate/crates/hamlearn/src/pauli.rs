//! Pauli strings and weighted Pauli-sum Hamiltonians.
//!
//! A Hamiltonian is represented as
//!
//!   H(ν) = Σ_ℓ ν_ℓ · E_ℓ
//!
//! where each E_ℓ is a tensor product of single-qubit Pauli operators and
//! ν_ℓ ∈ ℝ. Strings are encoded as one code per qubit with 0, 1, 2, 3
//! standing for I, X, Y, Z; qubit 0 is the leftmost tensor factor.
//!
//! The module also provides the periodic spin-chain builders (Ising, XY,
//! Heisenberg) and seeded random instances used by the experiments.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::rng;

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    /// Numeric code (0, 1, 2, 3 for I, X, Y, Z).
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Pauli::I),
            1 => Ok(Pauli::X),
            2 => Ok(Pauli::Y),
            3 => Ok(Pauli::Z),
            other => Err(Error::InvalidPauliCode(other)),
        }
    }

    /// Dense 2x2 matrix, row major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[one, zero], [zero, one]],
            Pauli::X => [[zero, one], [one, zero]],
            Pauli::Y => [[zero, -i], [i, zero]],
            Pauli::Z => [[one, zero], [zero, -one]],
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Paulis on `n` qubits.
///
/// The represented operator is Hermitian, unitary and involutory.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    /// Parse a code sequence (one entry per qubit, codes in 0..=3).
    pub fn parse(codes: &[u8]) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::EmptyPauliString);
        }
        let ops = codes
            .iter()
            .map(|&c| Pauli::from_code(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString { ops })
    }

    pub fn from_ops(ops: Vec<Pauli>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::EmptyPauliString);
        }
        Ok(PauliString { ops })
    }

    /// Identity on `n` qubits.
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_ops(vec![Pauli::I; n])
    }

    /// All-identity string except `op` on qubit `q`.
    pub fn single(n: usize, q: usize, op: Pauli) -> Result<Self> {
        if q >= n {
            return Err(Error::InvalidQubit { qubit: q, n });
        }
        let mut ops = vec![Pauli::I; n];
        ops[q] = op;
        Self::from_ops(ops)
    }

    /// `op` on qubits `a` and `b`, identity elsewhere.
    pub fn pair(n: usize, a: usize, b: usize, op: Pauli) -> Result<Self> {
        if a >= n {
            return Err(Error::InvalidQubit { qubit: a, n });
        }
        if b >= n {
            return Err(Error::InvalidQubit { qubit: b, n });
        }
        let mut ops = vec![Pauli::I; n];
        ops[a] = op;
        ops[b] = op;
        Self::from_ops(ops)
    }

    /// Qubit count.
    pub fn n(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    /// Emit the code sequence; `parse(emit(s)) == s`.
    pub fn emit(&self) -> Vec<u8> {
        self.ops.iter().map(|p| p.code()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == Pauli::I)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            write!(f, "{}", op.symbol())?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<u8>> for PauliString {
    type Error = Error;
    fn try_from(codes: Vec<u8>) -> Result<Self> {
        PauliString::parse(&codes)
    }
}

impl From<PauliString> for Vec<u8> {
    fn from(s: PauliString) -> Vec<u8> {
        s.emit()
    }
}

/// One weighted term ν_ℓ · E_ℓ.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

/// Real coefficient vector aligned with a Hamiltonian's term order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoefficientVector(Vec<f64>);

impl CoefficientVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("coefficient vector has non-finite entries"));
        }
        Ok(CoefficientVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// ‖self − other‖∞.
    pub fn inf_distance(&self, other: &CoefficientVector) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::QubitMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Weighted sum of distinct Pauli strings on a fixed qubit count.
///
/// Duplicate strings passed to the constructor are merged by summing their
/// coefficients; term order is construction order and is stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HamiltonianJson", into = "HamiltonianJson")]
pub struct PauliHamiltonian {
    n: usize,
    terms: Vec<PauliTerm>,
}

impl PauliHamiltonian {
    pub fn new(n: usize, terms: impl IntoIterator<Item = (f64, PauliString)>) -> Result<Self> {
        let mut merged: Vec<PauliTerm> = Vec::new();
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        for (coefficient, string) in terms {
            if !coefficient.is_finite() {
                return Err(Error::invalid("non-finite coefficient"));
            }
            if string.n() != n {
                return Err(Error::QubitMismatch {
                    left: string.n(),
                    right: n,
                });
            }
            match index.get(&string) {
                Some(&i) => merged[i].coefficient += coefficient,
                None => {
                    index.insert(string.clone(), merged.len());
                    merged.push(PauliTerm {
                        coefficient,
                        string,
                    });
                }
            }
        }
        if merged.is_empty() {
            return Err(Error::invalid("a Hamiltonian needs at least one term"));
        }
        Ok(PauliHamiltonian { n, terms: merged })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of (merged) terms, `m`.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn strings(&self) -> impl Iterator<Item = &PauliString> {
        self.terms.iter().map(|t| &t.string)
    }

    pub fn coefficients(&self) -> CoefficientVector {
        CoefficientVector(self.terms.iter().map(|t| t.coefficient).collect())
    }

    /// Same strings, new coefficients (the H(ν) rebuild of the outer loop).
    pub fn with_coefficients(&self, nu: &[f64]) -> Result<Self> {
        if nu.len() != self.terms.len() {
            return Err(Error::QubitMismatch {
                left: nu.len(),
                right: self.terms.len(),
            });
        }
        if nu.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        let terms = self
            .terms
            .iter()
            .zip(nu)
            .map(|(t, &coefficient)| PauliTerm {
                coefficient,
                string: t.string.clone(),
            })
            .collect();
        Ok(PauliHamiltonian {
            n: self.n,
            terms,
        })
    }

    /// (‖ν‖₁, ‖ν‖₂) of the coefficient vector.
    pub fn coefficient_norms(&self) -> (f64, f64) {
        let l1 = self.terms.iter().map(|t| t.coefficient.abs()).sum();
        let l2 = self
            .terms
            .iter()
            .map(|t| t.coefficient * t.coefficient)
            .sum::<f64>()
            .sqrt();
        (l1, l2)
    }

    /// Upper bound √m · ‖ν‖₂ on the spectral norm ‖H(ν)‖.
    pub fn spectral_norm_bound(&self) -> f64 {
        let (_, l2) = self.coefficient_norms();
        (self.terms.len() as f64).sqrt() * l2
    }
}

/// Interchange schema: `{"n": int, "terms": [{"coeff": float, "codes": [int, ...]}, ...]}`.
#[derive(Serialize, Deserialize)]
struct HamiltonianJson {
    n: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: f64,
    codes: Vec<u8>,
}

impl TryFrom<HamiltonianJson> for PauliHamiltonian {
    type Error = Error;
    fn try_from(raw: HamiltonianJson) -> Result<Self> {
        PauliHamiltonian::new(
            raw.n,
            raw.terms
                .into_iter()
                .map(|t| Ok((t.coeff, PauliString::parse(&t.codes)?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

impl From<PauliHamiltonian> for HamiltonianJson {
    fn from(h: PauliHamiltonian) -> Self {
        HamiltonianJson {
            n: h.n,
            terms: h
                .terms
                .into_iter()
                .map(|t| TermJson {
                    coeff: t.coefficient,
                    codes: t.string.emit(),
                })
                .collect(),
        }
    }
}

/// A periodic spin-chain model with its couplings.
///
/// Sites wrap around (site n+1 = site 1), so chains need n ≥ 3 to keep the
/// wraparound bonds distinct.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum ManyBodyModel {
    /// J Σ Z_l Z_{l+1} + h Σ X_l
    Ising { coupling: f64, field: f64 },
    /// J Σ (X_l X_{l+1} + Y_l Y_{l+1})
    Xy { coupling: f64 },
    /// J Σ (X_l X_{l+1} + Y_l Y_{l+1} + Z_l Z_{l+1}) + h Σ Z_l
    Heisenberg { coupling: f64, field: f64 },
}

/// Model family without couplings; used where parameters are drawn from a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ising,
    Xy,
    Heisenberg,
}

impl ModelKind {
    /// Draw couplings uniformly from [-1, 1].
    pub fn sample_params(self, rng: &mut rng::Stream) -> ManyBodyModel {
        let mut draw = || rng.random_range(-1.0..=1.0);
        match self {
            ModelKind::Ising => ManyBodyModel::Ising {
                coupling: draw(),
                field: draw(),
            },
            ModelKind::Xy => ManyBodyModel::Xy { coupling: draw() },
            ModelKind::Heisenberg => ManyBodyModel::Heisenberg {
                coupling: draw(),
                field: draw(),
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ising => "ising",
            ModelKind::Xy => "xy",
            ModelKind::Heisenberg => "heisenberg",
        }
    }
}

impl ManyBodyModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            ManyBodyModel::Ising { .. } => ModelKind::Ising,
            ManyBodyModel::Xy { .. } => ModelKind::Xy,
            ManyBodyModel::Heisenberg { .. } => ModelKind::Heisenberg,
        }
    }
}

/// Build a periodic many-body Hamiltonian on `n` sites.
///
/// Term counts are 2n (Ising), 2n (XY) and 4n (Heisenberg); term order
/// follows the model formula as written.
pub fn build_many_body(model: ManyBodyModel, n: usize) -> Result<PauliHamiltonian> {
    if n < 3 {
        return Err(Error::invalid(format!(
            "periodic chains need n >= 3 sites, got {n}"
        )));
    }
    let mut terms = Vec::new();
    match model {
        ManyBodyModel::Ising { coupling, field } => {
            for l in 0..n {
                terms.push((coupling, PauliString::pair(n, l, (l + 1) % n, Pauli::Z)?));
            }
            for l in 0..n {
                terms.push((field, PauliString::single(n, l, Pauli::X)?));
            }
        }
        ManyBodyModel::Xy { coupling } => {
            for l in 0..n {
                terms.push((coupling, PauliString::pair(n, l, (l + 1) % n, Pauli::X)?));
                terms.push((coupling, PauliString::pair(n, l, (l + 1) % n, Pauli::Y)?));
            }
        }
        ManyBodyModel::Heisenberg { coupling, field } => {
            for l in 0..n {
                for op in [Pauli::X, Pauli::Y, Pauli::Z] {
                    terms.push((coupling, PauliString::pair(n, l, (l + 1) % n, op)?));
                }
            }
            for l in 0..n {
                terms.push((field, PauliString::single(n, l, Pauli::Z)?));
            }
        }
    }
    PauliHamiltonian::new(n, terms)
}

/// Seeded random instance: `m` distinct non-identity strings with
/// coefficients uniform on [-1, 1].
///
/// The identity string is excluded; it only shifts log Z by a constant and
/// cannot be identified from normalized Gibbs data.
pub fn random_instance(n: usize, m: usize, seed: u64) -> Result<PauliHamiltonian> {
    if m == 0 {
        return Err(Error::invalid("need at least one term"));
    }
    let max_strings = 4usize
        .checked_pow(n as u32)
        .map(|t| t - 1)
        .unwrap_or(usize::MAX);
    if m > max_strings {
        return Err(Error::invalid(format!(
            "cannot draw {m} distinct non-identity strings on {n} qubit(s); only {max_strings} exist"
        )));
    }
    let mut rng = rng::master(seed);
    let mut seen = std::collections::HashSet::new();
    let mut terms = Vec::with_capacity(m);
    while terms.len() < m {
        let codes: Vec<u8> = (0..n).map(|_| rng.random_range(0..4u8)).collect();
        let string = PauliString::parse(&codes)?;
        if string.is_identity() || !seen.insert(string.clone()) {
            continue;
        }
        let coefficient = rng.random_range(-1.0..=1.0);
        terms.push((coefficient, string));
    }
    PauliHamiltonian::new(n, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_table_code_rows() {
        let s = PauliString::parse(&[0, 2, 1]).unwrap();
        assert_eq!(s.n(), 3);
        assert_eq!(s.ops(), &[Pauli::I, Pauli::Y, Pauli::X]);
        assert_eq!(s.to_string(), "IYX");

        let id = PauliString::parse(&[0, 0]).unwrap();
        assert!(id.is_identity());

        let zzz = PauliString::parse(&[3, 3, 3]).unwrap();
        assert_eq!(zzz.ops(), &[Pauli::Z, Pauli::Z, Pauli::Z]);
    }

    #[test]
    fn rejects_bad_codes_and_empty_strings() {
        assert!(matches!(
            PauliString::parse(&[0, 4]),
            Err(Error::InvalidPauliCode(4))
        ));
        assert!(matches!(
            PauliString::parse(&[]),
            Err(Error::EmptyPauliString)
        ));
    }

    #[test]
    fn emit_round_trips() {
        for codes in [vec![0u8], vec![1, 2, 3, 0], vec![3, 3, 3]] {
            let s = PauliString::parse(&codes).unwrap();
            assert_eq!(s.emit(), codes);
        }
    }

    #[test]
    fn merges_duplicate_terms() {
        let s = PauliString::parse(&[3, 0]).unwrap();
        let h = PauliHamiltonian::new(2, [(0.5, s.clone()), (0.25, s.clone())]).unwrap();
        assert_eq!(h.term_count(), 1);
        assert_eq!(h.terms()[0].coefficient, 0.75);
    }

    #[test]
    fn coefficient_norms_match_hand_arithmetic() {
        // Row-one coefficients: |0.3408| + |-0.6384| + |-0.4988| and the
        // root of the squared sum, both worked out by hand.
        let h = table1_row1();
        let (l1, l2) = h.coefficient_norms();
        assert!((l1 - 1.4780).abs() < 1e-12);
        assert!((l2 - 0.8789201556455513).abs() < 1e-12);
        assert!((h.spectral_norm_bound() - 1.5223343653744403).abs() < 1e-12);
    }

    #[test]
    fn norms_handle_degenerate_vectors() {
        let z = PauliString::parse(&[3]).unwrap();
        let h = PauliHamiltonian::new(1, [(0.0, z)]).unwrap();
        assert_eq!(h.coefficient_norms(), (0.0, 0.0));

        let ones = PauliHamiltonian::new(
            1,
            [
                (1.0, PauliString::parse(&[1]).unwrap()),
                (1.0, PauliString::parse(&[2]).unwrap()),
                (1.0, PauliString::parse(&[3]).unwrap()),
                (1.0, PauliString::parse(&[0]).unwrap()),
            ],
        )
        .unwrap();
        assert_eq!(ones.coefficient_norms(), (4.0, 2.0));
    }

    #[test]
    fn single_term_bound_is_tight() {
        let z = PauliString::parse(&[3]).unwrap();
        let h = PauliHamiltonian::new(1, [(1.0, z)]).unwrap();
        assert!((h.spectral_norm_bound() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ising_layout_matches_model_formula() {
        let h = build_many_body(
            ManyBodyModel::Ising {
                coupling: 0.1981,
                field: 0.7544,
            },
            3,
        )
        .unwrap();
        assert_eq!(h.term_count(), 6);
        let zz: Vec<_> = h.terms()[..3].iter().collect();
        for t in &zz {
            assert_eq!(t.coefficient, 0.1981);
            assert_eq!(t.string.ops().iter().filter(|&&p| p == Pauli::Z).count(), 2);
        }
        for t in &h.terms()[3..] {
            assert_eq!(t.coefficient, 0.7544);
            assert_eq!(t.string.ops().iter().filter(|&&p| p == Pauli::X).count(), 1);
        }
    }

    #[test]
    fn model_term_counts() {
        let xy = build_many_body(ManyBodyModel::Xy { coupling: 0.0 }, 3).unwrap();
        assert_eq!(xy.term_count(), 6);
        assert!(xy.terms().iter().all(|t| t.coefficient == 0.0));

        let heis = build_many_body(
            ManyBodyModel::Heisenberg {
                coupling: -0.5831,
                field: -0.0366,
            },
            4,
        )
        .unwrap();
        assert_eq!(heis.term_count(), 16);
    }

    #[test]
    fn rejects_degenerate_chains() {
        assert!(build_many_body(
            ManyBodyModel::Ising {
                coupling: 1.0,
                field: 1.0
            },
            2
        )
        .is_err());
    }

    #[test]
    fn random_instances_are_deterministic_and_distinct() {
        let a = random_instance(3, 3, 99).unwrap();
        let b = random_instance(3, 3, 99).unwrap();
        assert_eq!(a, b);

        let c = random_instance(3, 6, 5).unwrap();
        let mut strings: Vec<_> = c.strings().cloned().collect();
        strings.sort_by_key(|s| s.emit());
        strings.dedup();
        assert_eq!(strings.len(), 6);
        assert!(c.strings().all(|s| !s.is_identity()));
        assert!(c
            .coefficients()
            .values()
            .iter()
            .all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn random_instance_rejects_exhausted_code_space() {
        assert!(random_instance(2, 16, 1).is_err());
        assert!(random_instance(2, 15, 1).is_ok());
    }

    #[test]
    fn hamiltonian_json_schema_round_trips() {
        let h = table1_row1();
        let json = serde_json::to_string(&h).unwrap();
        assert!(json.contains("\"n\":3"));
        assert!(json.contains("\"coeff\":0.3408"));
        assert!(json.contains("\"codes\":[0,2,1]"));
        let back: PauliHamiltonian = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
    }

    pub(crate) fn table1_row1() -> PauliHamiltonian {
        PauliHamiltonian::new(
            3,
            [
                (0.3408, PauliString::parse(&[0, 2, 1]).unwrap()),
                (-0.6384, PauliString::parse(&[2, 1, 3]).unwrap()),
                (-0.4988, PauliString::parse(&[0, 3, 3]).unwrap()),
            ],
        )
        .unwrap()
    }
}
