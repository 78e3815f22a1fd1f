//! Instance, solution, and strategy documents, plus the built-in example
//! generators.
//!
//! Documents are JSON with an explicit schema version. Complex numbers are
//! `[re, im]` pairs and a state is a nested row-major array of them, so
//! fixtures stay diffable and round-trip bit-exactly (serde prints the
//! shortest representation that reparses to the same float). Omitted
//! probabilities default to uniform; an omitted cost vector defaults to the
//! standard costs `(1, 2, ..., |X|)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::{CostVector, CqEnsemble, GuessOrder, OutcomeLabel, Povm};
use crate::error::{Error, Result};
use crate::linalg::{C64, CMatrix, CVector, HermitianMatrix};
use crate::solver::GuessworkSolution;
use crate::strategy::SequentialStrategy;

pub const SCHEMA_VERSION: u32 = 1;

/// Threshold below which POVM elements are omitted from solution documents.
pub const POVM_WRITE_THRESHOLD: f64 = 1e-6;

type MatrixField = Vec<Vec<[f64; 2]>>;

fn matrix_to_field(m: &HermitianMatrix) -> MatrixField {
    let d = m.dim();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let e = m.get(i, j);
                    [e.re, e.im]
                })
                .collect()
        })
        .collect()
}

fn cmatrix_to_field(m: &CMatrix) -> MatrixField {
    let d = m.dim();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let e = m.get(i, j);
                    [e.re, e.im]
                })
                .collect()
        })
        .collect()
}

fn field_to_cmatrix(field: &MatrixField, context: &str) -> Result<CMatrix> {
    let d = field.len();
    let mut data = Vec::with_capacity(d * d);
    for row in field {
        if row.len() != d {
            return Err(Error::Parse(format!(
                "{context}: matrix is not square ({d} rows, a row of {} entries)",
                row.len()
            )));
        }
        for &[re, im] in row {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Parse(format!("{context}: non-finite entry")));
            }
            data.push(C64::new(re, im));
        }
    }
    Ok(CMatrix::new(d, data))
}

fn field_to_hermitian(field: &MatrixField, context: &str) -> Result<HermitianMatrix> {
    let m = field_to_cmatrix(field, context)?;
    if !m.is_hermitian(1e-12 * (1.0 + m.max_abs())) {
        return Err(Error::Parse(format!("{context}: matrix is not Hermitian")));
    }
    Ok(HermitianMatrix::from_cmatrix(&m))
}

/// The tail cost field: a number or the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CostInfField {
    Number(f64),
    Text(String),
}

/// On-disk problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub schema: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub letters: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
    pub states: Vec<MatrixField>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub costs: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_inf: Option<CostInfField>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prob_sum_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_tol: Option<f64>,
}

impl InstanceDocument {
    pub fn from_parts(name: Option<String>, ens: &CqEnsemble, cv: &CostVector) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            name,
            letters: ens.letters().to_vec(),
            probabilities: Some(ens.probs().to_vec()),
            states: ens.states().iter().map(matrix_to_field).collect(),
            costs: Some(cv.costs().to_vec()),
            cost_inf: cv.cost_inf().map(CostInfField::Number),
            k: Some(cv.k()),
            prob_sum_tol: None,
            trace_tol: None,
        }
    }

    pub fn to_instance(&self) -> Result<(CqEnsemble, CostVector)> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        let n = self.letters.len();
        if self.states.len() != n {
            return Err(Error::Parse(format!(
                "{} letters but {} states",
                n,
                self.states.len()
            )));
        }
        let probs = match &self.probabilities {
            Some(p) => p.clone(),
            None => vec![1.0 / n as f64; n],
        };
        let states = self
            .letters
            .iter()
            .zip(&self.states)
            .map(|(letter, field)| field_to_hermitian(field, &format!("state of letter '{letter}'")))
            .collect::<Result<Vec<_>>>()?;
        let ens = CqEnsemble::with_tolerances(
            self.letters.clone(),
            probs,
            states,
            self.prob_sum_tol.unwrap_or(crate::ensemble::DEFAULT_PROB_SUM_TOL),
            self.trace_tol.unwrap_or(crate::ensemble::DEFAULT_TRACE_TOL),
        )?;

        let cost_inf = match &self.cost_inf {
            None => None,
            Some(CostInfField::Number(v)) if v.is_finite() => Some(*v),
            Some(CostInfField::Number(v)) if v.is_infinite() && *v > 0.0 => None,
            Some(CostInfField::Number(v)) => {
                return Err(Error::Parse(format!("invalid tail cost {v}")))
            }
            Some(CostInfField::Text(t)) if t == "inf" => None,
            Some(CostInfField::Text(t)) => {
                return Err(Error::Parse(format!(
                    "invalid tail cost '{t}' (expected a number or \"inf\")"
                )))
            }
        };
        let costs = match &self.costs {
            Some(c) => c.clone(),
            None => match self.k {
                Some(k) => (1..=k).map(|v| v as f64).collect(),
                None => (1..=n).map(|v| v as f64).collect(),
            },
        };
        if let Some(k) = self.k {
            if k != costs.len() {
                return Err(Error::Parse(format!(
                    "k = {k} disagrees with {} costs",
                    costs.len()
                )));
            }
        }
        if costs.len() > n {
            return Err(Error::Parse(format!(
                "{} costs for {} letters",
                costs.len(),
                n
            )));
        }
        let cv = CostVector::new(costs, cost_inf)?;
        Ok((ens, cv))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

/// Parses an instance document from JSON text.
pub fn parse_instance(text: &str) -> Result<(CqEnsemble, CostVector)> {
    let doc: InstanceDocument =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_instance()
}

/// On-disk solver output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub schema: u32,
    pub value: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub gap: f64,
    pub certificate_margin: f64,
    pub iterations: usize,
    pub support: Vec<SupportEntry>,
    /// POVM elements with trace above [`POVM_WRITE_THRESHOLD`].
    pub povm: Vec<PovmEntry>,
    pub povm_omitted_below: f64,
    pub dual_y: MatrixField,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportEntry {
    pub order: Vec<String>,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmEntry {
    pub order: Vec<String>,
    pub matrix: MatrixField,
}

impl SolutionDocument {
    pub fn from_solution(sol: &GuessworkSolution, ens: &CqEnsemble, seed: Option<u64>) -> Self {
        let name_order =
            |g: &GuessOrder| -> Vec<String> { g.letters(ens).iter().map(|s| s.to_string()).collect() };
        let mut povm = Vec::new();
        for (label, e) in sol.povm.outcomes() {
            if e.trace() <= POVM_WRITE_THRESHOLD {
                continue;
            }
            if let OutcomeLabel::Order(g) = label {
                povm.push(PovmEntry {
                    order: name_order(g),
                    matrix: matrix_to_field(e),
                });
            }
        }
        let support = sol
            .support
            .iter()
            .map(|g| {
                let weight = sol
                    .povm
                    .outcomes()
                    .iter()
                    .find(|(l, _)| l.as_order() == Some(g))
                    .map(|(_, e)| e.trace())
                    .unwrap_or(0.0);
                SupportEntry {
                    order: name_order(g),
                    weight,
                }
            })
            .collect();
        Self {
            schema: SCHEMA_VERSION,
            value: sol.value,
            tolerance: sol.tolerance,
            seed,
            gap: sol.gap,
            certificate_margin: sol.certificate_margin,
            iterations: sol.iterations,
            support,
            povm,
            povm_omitted_below: POVM_WRITE_THRESHOLD,
            dual_y: matrix_to_field(&sol.dual_y),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

/// On-disk sequential strategy, for replay.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrategyDocument {
    pub schema: u32,
    pub dim: usize,
    pub letters: Vec<String>,
    pub depth: usize,
    pub steps: Vec<StrategyStep>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrategyStep {
    pub history: Vec<String>,
    /// One operator per letter, in alphabet order.
    pub operators: Vec<MatrixField>,
}

impl StrategyDocument {
    pub fn from_strategy(s: &SequentialStrategy, letters: &[String]) -> Self {
        let steps = s
            .steps()
            .iter()
            .map(|(history, ops)| StrategyStep {
                history: history.iter().map(|&x| letters[x].clone()).collect(),
                operators: ops.iter().map(cmatrix_to_field).collect(),
            })
            .collect();
        Self {
            schema: SCHEMA_VERSION,
            dim: s.dim(),
            letters: letters.to_vec(),
            depth: s.depth(),
            steps,
        }
    }

    pub fn to_strategy(&self) -> Result<SequentialStrategy> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema version {}",
                self.schema
            )));
        }
        let index = |letter: &str| -> Result<usize> {
            self.letters
                .iter()
                .position(|l| l == letter)
                .ok_or_else(|| Error::UnknownLetter(letter.to_string()))
        };
        let mut steps = std::collections::BTreeMap::new();
        for step in &self.steps {
            let history = step
                .history
                .iter()
                .map(|l| index(l))
                .collect::<Result<Vec<_>>>()?;
            let ops = step
                .operators
                .iter()
                .map(|f| field_to_cmatrix(f, "strategy operator"))
                .collect::<Result<Vec<_>>>()?;
            steps.insert(history, ops);
        }
        SequentialStrategy::new(self.dim, self.letters.len(), self.depth, steps)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

pub fn parse_strategy(text: &str) -> Result<StrategyDocument> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

// ---------------------------------------------------------------------------
// seeded randomness

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn ginibre<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    let mut data = Vec::with_capacity(d * d);
    for _ in 0..d * d {
        data.push(C64::new(standard_normal(rng), standard_normal(rng)) * std::f64::consts::FRAC_1_SQRT_2);
    }
    CMatrix::new(d, data)
}

/// Haar-random pure state: a normalized complex Gaussian vector.
pub fn haar_random_pure<R: Rng>(d: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::new(
            (0..d)
                .map(|_| C64::new(standard_normal(rng), standard_normal(rng)))
                .collect(),
        );
        if v.norm() > 1e-6 {
            return v.normalized();
        }
    }
}

/// Random density matrix from the Hilbert-Schmidt ensemble:
/// `G G^dagger / tr(G G^dagger)` for Ginibre G.
pub fn haar_random_state<R: Rng>(d: usize, rng: &mut R) -> HermitianMatrix {
    let g = ginibre(d, rng);
    let gg = HermitianMatrix::from_cmatrix(&g.matmul(&g.adjoint()));
    gg.scale(1.0 / gg.trace())
}

/// Projective POVM onto a Haar-random orthonormal basis (Gram-Schmidt of a
/// Ginibre matrix's columns).
pub fn haar_basis_povm<R: Rng>(d: usize, rng: &mut R) -> Result<Povm> {
    let g = ginibre(d, rng);
    let mut cols: Vec<CVector> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v: Vec<C64> = (0..d).map(|i| g.get(i, j)).collect();
        for prev in &cols {
            let overlap: C64 = prev
                .as_slice()
                .iter()
                .zip(&v)
                .map(|(p, x)| p.conj() * x)
                .sum();
            for (x, p) in v.iter_mut().zip(prev.as_slice()) {
                *x -= overlap * p;
            }
        }
        let v = CVector::new(v).normalized();
        cols.push(v);
    }
    Povm::new(
        cols.into_iter()
            .enumerate()
            .map(|(i, v)| {
                (
                    OutcomeLabel::Opaque(format!("b{i}")),
                    HermitianMatrix::pure_state(&v),
                )
            })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// example generators

/// The built-in instance families.
#[derive(Debug, Clone, PartialEq)]
pub enum ExampleSpec {
    /// The four conjugate-basis qubit states (the phi-family at pi/2).
    Bb84,
    /// `{|0>, |1>, psi(phi), psi(-phi)}` with `psi(phi) = cos(phi/2)|0> + sin(phi/2)|1>`.
    Bb84Family { phi: f64 },
    /// Three pure qubits equally spaced in one plane of the Bloch sphere.
    Trine,
    RandomQubits { n: usize, seed: u64 },
    RandomQutrits { n: usize, seed: u64 },
    /// Two copies of an inner instance: product alphabet and states.
    Tensor2(Box<ExampleSpec>),
}

impl ExampleSpec {
    pub fn name(&self) -> String {
        match self {
            ExampleSpec::Bb84 => "bb84".into(),
            ExampleSpec::Bb84Family { phi } => format!("bb84-family({phi})"),
            ExampleSpec::Trine => "trine".into(),
            ExampleSpec::RandomQubits { n, seed } => format!("random-qubits({n},{seed})"),
            ExampleSpec::RandomQutrits { n, seed } => format!("random-qutrits({n},{seed})"),
            ExampleSpec::Tensor2(inner) => format!("tensor2({})", inner.name()),
        }
    }
}

/// Builds the ensemble (uniform probabilities, standard costs) for a named
/// example family. Deterministic for a fixed seed.
pub fn generate_example(spec: &ExampleSpec) -> Result<InstanceDocument> {
    let ens = example_ensemble(spec)?;
    let cv = CostVector::standard(ens.len());
    Ok(InstanceDocument::from_parts(
        Some(spec.name()),
        &ens,
        &cv,
    ))
}

pub fn example_ensemble(spec: &ExampleSpec) -> Result<CqEnsemble> {
    match spec {
        ExampleSpec::Bb84 => example_ensemble(&ExampleSpec::Bb84Family {
            phi: std::f64::consts::FRAC_PI_2,
        }),
        ExampleSpec::Bb84Family { phi } => {
            let half = 0.5 * phi;
            let states = vec![
                HermitianMatrix::diag(&[1.0, 0.0]),
                HermitianMatrix::diag(&[0.0, 1.0]),
                HermitianMatrix::pure_state(&CVector::from_real(&[half.cos(), half.sin()])),
                HermitianMatrix::pure_state(&CVector::from_real(&[half.cos(), -half.sin()])),
            ];
            CqEnsemble::uniform(
                vec!["0".into(), "1".into(), "+".into(), "-".into()],
                states,
            )
        }
        ExampleSpec::Trine => {
            let states = (1..=3)
                .map(|k| {
                    let a = k as f64 * 2.0 * std::f64::consts::PI / 3.0;
                    HermitianMatrix::pure_state(&CVector::from_real(&[a.cos(), a.sin()]))
                })
                .collect();
            CqEnsemble::uniform(vec!["y1".into(), "y2".into(), "y3".into()], states)
        }
        ExampleSpec::RandomQubits { n, seed } => random_ensemble(2, *n, *seed),
        ExampleSpec::RandomQutrits { n, seed } => random_ensemble(3, *n, *seed),
        ExampleSpec::Tensor2(inner) => {
            let base = example_ensemble(inner)?;
            base.tensor(&base)
        }
    }
}

fn random_ensemble(d: usize, n: usize, seed: u64) -> Result<CqEnsemble> {
    if n == 0 {
        return Err(Error::InvalidEnsemble("need at least one state".into()));
    }
    let mut rng = seeded_rng(seed);
    let states = (0..n).map(|_| haar_random_state(d, &mut rng)).collect();
    CqEnsemble::uniform((0..n).map(|i| format!("r{i}")).collect(), states)
}
