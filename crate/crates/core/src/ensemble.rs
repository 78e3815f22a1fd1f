//! Data model for a guesswork instance: classical-quantum ensembles, cost
//! vectors, guess orders, POVMs, and the per-order cost operators
//! `R_g = sum_x p(x) c_{N(g,x)} rho_x`.
//!
//! Letters are strings at the API surface; all computation uses integer
//! indices through the stable letter table held by [`CqEnsemble`]. The
//! classical-quantum state itself is never materialized as one big matrix:
//! the block structure is kept factored, so e.g. trace distances are sums
//! of `d_B`-sized trace norms.

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, trace_norm, HermitianMatrix};

pub const DEFAULT_PROB_SUM_TOL: f64 = 1e-10;
pub const DEFAULT_TRACE_TOL: f64 = 1e-8;
pub const POVM_PSD_TOL: f64 = 1e-9;
pub const POVM_SUM_TOL: f64 = 1e-8;

/// Classical-quantum ensemble: letters with probabilities and one state of
/// common dimension per letter.
#[derive(Debug, Clone)]
pub struct CqEnsemble {
    letters: Vec<String>,
    probs: Vec<f64>,
    states: Vec<HermitianMatrix>,
}

impl CqEnsemble {
    pub fn new(letters: Vec<String>, probs: Vec<f64>, states: Vec<HermitianMatrix>) -> Result<Self> {
        Self::with_tolerances(
            letters,
            probs,
            states,
            DEFAULT_PROB_SUM_TOL,
            DEFAULT_TRACE_TOL,
        )
    }

    /// As [`CqEnsemble::new`] with per-load validation tolerances, for
    /// hand-authored files that carry rounding.
    pub fn with_tolerances(
        letters: Vec<String>,
        probs: Vec<f64>,
        states: Vec<HermitianMatrix>,
        prob_sum_tol: f64,
        trace_tol: f64,
    ) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidEnsemble("alphabet is empty".into()));
        }
        if letters.len() != probs.len() || letters.len() != states.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} letters, {} probabilities, {} states",
                letters.len(),
                probs.len(),
                states.len()
            )));
        }
        for (i, a) in letters.iter().enumerate() {
            for b in letters.iter().skip(i + 1) {
                if a == b {
                    return Err(Error::InvalidEnsemble(format!("duplicate letter '{a}'")));
                }
            }
        }
        for (letter, &p) in letters.iter().zip(&probs) {
            if !(p >= 0.0) {
                return Err(Error::InvalidEnsemble(format!(
                    "probability of letter '{letter}' is {p}"
                )));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > prob_sum_tol {
            return Err(Error::InvalidEnsemble(format!(
                "probabilities sum to {total} (tolerance {prob_sum_tol:.1e})"
            )));
        }
        let dim = states[0].dim();
        for (letter, state) in letters.iter().zip(&states) {
            if state.dim() != dim {
                return Err(Error::InvalidEnsemble(format!(
                    "state for letter '{letter}' has dimension {} but expected {dim}",
                    state.dim()
                )));
            }
            if (state.trace() - 1.0).abs() > trace_tol {
                return Err(Error::InvalidEnsemble(format!(
                    "state for letter '{letter}' has trace {:.10} (tolerance {trace_tol:.1e})",
                    state.trace()
                )));
            }
            let min = min_eigenvalue(state)?;
            if min < -trace_tol {
                return Err(Error::InvalidEnsemble(format!(
                    "state for letter '{letter}' is not PSD (min eigenvalue {min:.3e})"
                )));
            }
        }
        Ok(Self {
            letters,
            probs,
            states,
        })
    }

    /// Uniform distribution over the given states.
    pub fn uniform(letters: Vec<String>, states: Vec<HermitianMatrix>) -> Result<Self> {
        let n = letters.len();
        Self::new(letters, vec![1.0 / n as f64; n], states)
    }

    /// Alphabet size |X|.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Side-information dimension d_B.
    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[HermitianMatrix] {
        &self.states
    }

    pub fn prob(&self, x: usize) -> f64 {
        self.probs[x]
    }

    pub fn state(&self, x: usize) -> &HermitianMatrix {
        &self.states[x]
    }

    pub fn letter_index(&self, letter: &str) -> Result<usize> {
        self.letters
            .iter()
            .position(|l| l == letter)
            .ok_or_else(|| Error::UnknownLetter(letter.to_string()))
    }

    /// Ensemble average state `rho_B = sum_x p(x) rho_x`.
    pub fn average_state(&self) -> HermitianMatrix {
        let mut acc = HermitianMatrix::zeros(self.dim());
        for (p, s) in self.probs.iter().zip(&self.states) {
            acc = acc.add(&s.scale(*p));
        }
        acc
    }

    /// Convex mixture of the classical-quantum states:
    /// `t * rho_XB + (1 - t) * sigma_XB` for ensembles over the same alphabet.
    /// Probabilities mix affinely and each letter's state mixes with weights
    /// `t p(x)` and `(1 - t) q(x)`.
    pub fn mix(&self, other: &CqEnsemble, t: f64) -> Result<CqEnsemble> {
        self.check_shared_alphabet(other)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidEnsemble(format!("mixing weight {t}")));
        }
        let mut probs = Vec::with_capacity(self.len());
        let mut states = Vec::with_capacity(self.len());
        for x in 0..self.len() {
            let p = t * self.probs[x] + (1.0 - t) * other.probs[x];
            let blended = self.states[x]
                .scale(t * self.probs[x])
                .add(&other.states[x].scale((1.0 - t) * other.probs[x]));
            let state = if p > 1e-300 {
                blended.scale(1.0 / p)
            } else {
                HermitianMatrix::identity(self.dim()).scale(1.0 / self.dim() as f64)
            };
            probs.push(p);
            states.push(state);
        }
        CqEnsemble::new(self.letters.clone(), probs, states)
    }

    /// Trace distance `|| rho_XB - sigma_XB ||_1` for a shared alphabet,
    /// computed blockwise as `sum_x || p(x) rho_x - q(x) sigma_x ||_1`.
    pub fn trace_distance(&self, other: &CqEnsemble) -> Result<f64> {
        self.check_shared_alphabet(other)?;
        let mut total = 0.0;
        for x in 0..self.len() {
            let diff = self.states[x]
                .scale(self.probs[x])
                .sub(&other.states[x].scale(other.probs[x]));
            total += trace_norm(&diff)?;
        }
        Ok(total)
    }

    fn check_shared_alphabet(&self, other: &CqEnsemble) -> Result<()> {
        if self.letters != other.letters {
            return Err(Error::InvalidEnsemble(
                "ensembles do not share an alphabet".into(),
            ));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    /// Tensor product of two ensembles: product alphabet (letters joined
    /// with `⊗`), product probabilities, tensor-product states.
    pub fn tensor(&self, other: &CqEnsemble) -> Result<CqEnsemble> {
        let mut letters = Vec::with_capacity(self.len() * other.len());
        let mut probs = Vec::with_capacity(self.len() * other.len());
        let mut states = Vec::with_capacity(self.len() * other.len());
        for a in 0..self.len() {
            for b in 0..other.len() {
                letters.push(format!("{}⊗{}", self.letters[a], other.letters[b]));
                probs.push(self.probs[a] * other.probs[b]);
                states.push(self.states[a].kron(&other.states[b]));
            }
        }
        CqEnsemble::new(letters, probs, states)
    }

    /// n-fold tensor power, capped at `letter_cap` product letters.
    pub fn tensor_power(&self, n: usize, letter_cap: usize) -> Result<CqEnsemble> {
        if n == 0 {
            return Err(Error::InvalidEnsemble("tensor power with n = 0".into()));
        }
        let mut size: u128 = 1;
        for _ in 0..n {
            size = size.saturating_mul(self.len() as u128);
        }
        if size > letter_cap as u128 {
            return Err(Error::SizeCapExceeded {
                actual: size,
                cap: letter_cap as u128,
            });
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }
}

/// Nondecreasing guess costs `c_1 <= ... <= c_K` plus the cost charged when
/// all `K` guesses miss. `None` tail cost means infinity; it is never
/// encoded as a large float. When `K` equals the alphabet size the tail
/// outcome cannot occur and the tail cost is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector {
    costs: Vec<f64>,
    cost_inf: Option<f64>,
}

impl CostVector {
    pub fn new(costs: Vec<f64>, cost_inf: Option<f64>) -> Result<Self> {
        if costs.is_empty() {
            return Err(Error::InvalidCostVector("no guess costs".into()));
        }
        if !(costs[0] >= 0.0) {
            return Err(Error::InvalidCostVector(format!(
                "c_1 = {} is negative",
                costs[0]
            )));
        }
        for w in costs.windows(2) {
            if !(w[1] >= w[0]) {
                return Err(Error::InvalidCostVector(format!(
                    "costs are not nondecreasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if let Some(ci) = cost_inf {
            if !(ci >= *costs.last().unwrap()) {
                return Err(Error::InvalidCostVector(format!(
                    "tail cost {ci} is below c_K = {}",
                    costs.last().unwrap()
                )));
            }
        }
        Ok(Self { costs, cost_inf })
    }

    /// The standard cost vector `(1, 2, ..., n)`.
    pub fn standard(n: usize) -> Self {
        Self {
            costs: (1..=n).map(|k| k as f64).collect(),
            cost_inf: None,
        }
    }

    /// Number of allowed guesses K.
    pub fn k(&self) -> usize {
        self.costs.len()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Cost of succeeding on the k-th guess (1-based).
    pub fn cost_at(&self, k: usize) -> f64 {
        self.costs[k - 1]
    }

    /// Tail cost; `None` means infinite.
    pub fn cost_inf(&self) -> Option<f64> {
        self.cost_inf
    }

    pub fn max_finite_cost(&self) -> f64 {
        self.cost_inf.unwrap_or(*self.costs.last().unwrap())
    }
}

/// Number of guesses a fixed order needs for a given letter: the 1-based
/// position of the letter in the order, or infinity when absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuessCount {
    Finite(usize),
    Infinite,
}

/// A sequence of K pairwise-distinct letter indices: one element of the
/// outcome space over which the optimization runs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GuessOrder {
    entries: Vec<usize>,
}

impl GuessOrder {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidOrder("empty guess order".into()));
        }
        for (i, a) in entries.iter().enumerate() {
            for b in entries.iter().skip(i + 1) {
                if a == b {
                    return Err(Error::InvalidOrder(format!(
                        "repeated letter index {a} in {entries:?}"
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_letters(ens: &CqEnsemble, letters: &[&str]) -> Result<Self> {
        let entries = letters
            .iter()
            .map(|l| ens.letter_index(l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// `N(g, x)`: 1-based position of the letter index in this order, or
    /// infinity when the order never guesses it.
    pub fn guess_count(&self, x: usize) -> GuessCount {
        match self.entries.iter().position(|&e| e == x) {
            Some(j) => GuessCount::Finite(j + 1),
            None => GuessCount::Infinite,
        }
    }

    pub fn letters<'a>(&self, ens: &'a CqEnsemble) -> Vec<&'a str> {
        self.entries
            .iter()
            .map(|&i| ens.letters()[i].as_str())
            .collect()
    }
}

/// `N(g, x)` by letter name.
pub fn guess_count(ens: &CqEnsemble, order: &GuessOrder, letter: &str) -> Result<GuessCount> {
    Ok(order.guess_count(ens.letter_index(letter)?))
}

/// Lazy lexicographic iterator over all length-`k` arrangements of
/// `0..x_size` without repeats.
pub fn enumerate_orders(x_size: usize, k: usize) -> Orders {
    assert!(k >= 1 && k <= x_size, "need 1 <= k <= x_size");
    Orders {
        x_size,
        k,
        current: Vec::new(),
        done: false,
    }
}

/// `x_size! / (x_size - k)!` as an exact count.
pub fn count_orders(x_size: usize, k: usize) -> u128 {
    let mut n = 1u128;
    for i in 0..k {
        n = n.saturating_mul((x_size - i) as u128);
    }
    n
}

pub struct Orders {
    x_size: usize,
    k: usize,
    current: Vec<usize>,
    done: bool,
}

impl Orders {
    fn first(&mut self) -> Option<Vec<usize>> {
        self.current = (0..self.k).collect();
        Some(self.current.clone())
    }

    /// Advances to the next arrangement in lexicographic order by treating
    /// positions as an odometer over unused letters.
    fn advance(&mut self) -> Option<Vec<usize>> {
        let k = self.k;
        let n = self.x_size;
        let mut pos = k;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            let used: Vec<usize> = self.current[..pos].to_vec();
            let mut next = self.current[pos] + 1;
            while next < n && used.contains(&next) {
                next += 1;
            }
            if next < n {
                self.current[pos] = next;
                // fill the tail with the smallest unused letters
                for fill in (pos + 1)..k {
                    let taken: Vec<usize> = self.current[..fill].to_vec();
                    let smallest = (0..n).find(|c| !taken.contains(c)).unwrap();
                    self.current[fill] = smallest;
                }
                return Some(self.current.clone());
            }
        }
    }
}

impl Iterator for Orders {
    type Item = GuessOrder;

    fn next(&mut self) -> Option<GuessOrder> {
        if self.done {
            return None;
        }
        let entries = if self.current.is_empty() {
            self.first()
        } else {
            self.advance()
        };
        match entries {
            Some(e) => Some(GuessOrder { entries: e }),
            None => {
                self.done = true;
                None
            }
        }
    }
}

/// Outcome label of a POVM element: either a guess order or an opaque id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutcomeLabel {
    Order(GuessOrder),
    Opaque(String),
}

impl OutcomeLabel {
    pub fn as_order(&self) -> Option<&GuessOrder> {
        match self {
            OutcomeLabel::Order(g) => Some(g),
            OutcomeLabel::Opaque(_) => None,
        }
    }
}

/// A finite family of PSD matrices summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    outcomes: Vec<(OutcomeLabel, HermitianMatrix)>,
}

impl Povm {
    pub fn new(outcomes: Vec<(OutcomeLabel, HermitianMatrix)>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidPovm("no outcomes".into()));
        }
        let dim = outcomes[0].1.dim();
        let mut sum = HermitianMatrix::zeros(dim);
        for (label, e) in &outcomes {
            if e.dim() != dim {
                return Err(Error::InvalidPovm(format!(
                    "outcome {label:?} has dimension {} but expected {dim}",
                    e.dim()
                )));
            }
            let min = min_eigenvalue(e)?;
            if min < -POVM_PSD_TOL {
                return Err(Error::InvalidPovm(format!(
                    "outcome {label:?} is not PSD (min eigenvalue {min:.3e})"
                )));
            }
            sum = sum.add(e);
        }
        let resid = sum.sub(&HermitianMatrix::identity(dim)).frobenius_norm();
        if resid > POVM_SUM_TOL {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {resid:.3e}"
            )));
        }
        Ok(Self { outcomes })
    }

    /// Two-outcome projective measurement `{|v><v|, 1 - |v><v|}` with opaque
    /// labels "0" and "1".
    pub fn projective_pair(v: &crate::linalg::CVector) -> Result<Self> {
        let p = HermitianMatrix::pure_state(v);
        let q = HermitianMatrix::identity(p.dim()).sub(&p);
        Povm::new(vec![
            (OutcomeLabel::Opaque("0".into()), p),
            (OutcomeLabel::Opaque("1".into()), q),
        ])
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].1.dim()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[(OutcomeLabel, HermitianMatrix)] {
        &self.outcomes
    }

    pub fn element(&self, i: usize) -> &HermitianMatrix {
        &self.outcomes[i].1
    }

    /// Outcome probabilities `tr(E_y rho)`, clipped of negative rounding dust.
    pub fn outcome_probs(&self, rho: &HermitianMatrix) -> Vec<f64> {
        self.outcomes
            .iter()
            .map(|(_, e)| e.hs_inner(rho).max(0.0))
            .collect()
    }
}

/// The cost operator `R_g` attached to one guess order.
#[derive(Debug, Clone)]
pub struct CostOperator {
    pub order: GuessOrder,
    pub matrix: HermitianMatrix,
}

/// Builds `R_g = sum_x p(x) c_{N(g,x)} rho_x`.
///
/// Fails when the tail cost is infinite while some letter is missing from
/// the order (K < |X|); see [`Error::InfiniteCost`].
pub fn cost_operator(ens: &CqEnsemble, cv: &CostVector, order: &GuessOrder) -> Result<CostOperator> {
    let mut m = HermitianMatrix::zeros(ens.dim());
    for x in 0..ens.len() {
        let c = match order.guess_count(x) {
            GuessCount::Finite(k) => cv.cost_at(k),
            GuessCount::Infinite => cv.cost_inf().ok_or_else(|| Error::InfiniteCost {
                k: cv.k(),
                letters: ens.len(),
                context: format!(
                    "letter '{}' is outside order {:?} and the tail cost is infinite; \
                     a finite value requires a POVM with tr[E_g rho_x] = 0 for every \
                     letter x outside its order g, which this library does not decide",
                    ens.letters()[x],
                    order.letters(ens)
                ),
            })?,
        };
        m = m.add(&ens.state(x).scale(ens.prob(x) * c));
    }
    debug_assert!({
        let expected: f64 = (0..ens.len())
            .map(|x| match order.guess_count(x) {
                GuessCount::Finite(k) => ens.prob(x) * cv.cost_at(k),
                GuessCount::Infinite => ens.prob(x) * cv.cost_inf().unwrap_or(f64::NAN),
            })
            .sum();
        (m.trace() - expected).abs() <= 1e-10 * (1.0 + expected.abs())
    });
    Ok(CostOperator {
        order: order.clone(),
        matrix: m,
    })
}

/// Expected cost `sum_g tr(R_g E_g)` of an ordered strategy given as a POVM
/// whose labels are guess orders over the ensemble's alphabet.
pub fn expected_cost(ens: &CqEnsemble, cv: &CostVector, povm: &Povm) -> Result<f64> {
    if povm.dim() != ens.dim() {
        return Err(Error::DimensionMismatch(format!(
            "POVM dimension {} vs ensemble dimension {}",
            povm.dim(),
            ens.dim()
        )));
    }
    let mut total = 0.0;
    for (label, e) in povm.outcomes() {
        let order = label.as_order().ok_or_else(|| {
            Error::InvalidPovm("expected guess-order labels, found opaque outcome".into())
        })?;
        for &x in order.entries() {
            if x >= ens.len() {
                return Err(Error::InvalidPovm(format!(
                    "order refers to letter index {x} outside the alphabet"
                )));
            }
        }
        let r = cost_operator(ens, cv, order)?;
        total += r.matrix.hs_inner(e);
    }
    Ok(total)
}

/// Classical joint distribution p(x, y) over a finite product alphabet.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    nx: usize,
    ny: usize,
    p: Vec<f64>, // row-major: p[x * ny + y]
}

impl JointDistribution {
    pub fn new(nx: usize, ny: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != nx * ny {
            return Err(Error::InvalidDistribution(format!(
                "{} entries for a {nx}x{ny} table",
                p.len()
            )));
        }
        if p.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidDistribution("negative entry".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Self { nx, ny, p })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.ny + y]
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.nx)
            .map(|x| (0..self.ny).map(|y| self.prob(x, y)).sum())
            .collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        (0..self.ny)
            .map(|y| (0..self.nx).map(|x| self.prob(x, y)).sum())
            .collect()
    }

    /// Conditional column p(x | y); uniform if the outcome has zero mass.
    pub fn posterior(&self, y: usize) -> Vec<f64> {
        let py: f64 = (0..self.nx).map(|x| self.prob(x, y)).sum();
        if py <= 0.0 {
            return vec![1.0 / self.nx as f64; self.nx];
        }
        (0..self.nx).map(|x| self.prob(x, y) / py).collect()
    }

    /// The joint induced by measuring the B side of an ensemble:
    /// `p(x, y) = p(x) tr(E_y rho_x)`, renormalized of rounding dust.
    pub fn from_measurement(ens: &CqEnsemble, povm: &Povm) -> Result<Self> {
        if povm.dim() != ens.dim() {
            return Err(Error::DimensionMismatch(
                "POVM dimension differs from ensemble dimension".into(),
            ));
        }
        let nx = ens.len();
        let ny = povm.len();
        let mut p = vec![0.0; nx * ny];
        for x in 0..nx {
            for (y, (_, e)) in povm.outcomes().iter().enumerate() {
                p[x * ny + y] = (ens.prob(x) * e.hs_inner(ens.state(x))).max(0.0);
            }
        }
        let total: f64 = p.iter().sum();
        for v in &mut p {
            *v /= total;
        }
        Self::new(nx, ny, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVector;

    pub(crate) fn two_orthogonal() -> CqEnsemble {
        CqEnsemble::uniform(
            vec!["a".into(), "b".into()],
            vec![
                HermitianMatrix::diag(&[1.0, 0.0]),
                HermitianMatrix::diag(&[0.0, 1.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn guess_count_examples() {
        let ens = CqEnsemble::uniform(
            vec!["a".into(), "b".into(), "c".into()],
            vec![HermitianMatrix::identity(2).scale(0.5); 3],
        )
        .unwrap();
        let order = GuessOrder::from_letters(&ens, &["a", "b", "c"]).unwrap();
        assert_eq!(guess_count(&ens, &order, "b").unwrap(), GuessCount::Finite(2));
        let short = GuessOrder::from_letters(&ens, &["a", "b"]).unwrap();
        assert_eq!(guess_count(&ens, &short, "c").unwrap(), GuessCount::Infinite);
        let single = GuessOrder::from_letters(&ens, &["a"]).unwrap();
        assert_eq!(guess_count(&ens, &single, "a").unwrap(), GuessCount::Finite(1));
        assert!(guess_count(&ens, &single, "z").is_err());
    }

    #[test]
    fn enumerate_orders_counts() {
        assert_eq!(enumerate_orders(3, 3).count(), 6);
        assert_eq!(enumerate_orders(4, 1).count(), 4);
        assert_eq!(enumerate_orders(4, 2).count(), 12);
        assert_eq!(count_orders(4, 2), 12);
        assert_eq!(count_orders(16, 16), 20922789888000);
        // lexicographic and distinct
        let all: Vec<_> = enumerate_orders(4, 2).collect();
        assert_eq!(all[0].entries(), &[0, 1]);
        assert_eq!(all[1].entries(), &[0, 2]);
        assert_eq!(all.last().unwrap().entries(), &[3, 2]);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
    }

    #[test]
    fn cost_operator_trace_is_mean_cost() {
        let plus = HermitianMatrix::pure_state(&CVector::from_real(&[1.0, 1.0]));
        let minus = HermitianMatrix::pure_state(&CVector::from_real(&[1.0, -1.0]));
        let ens = CqEnsemble::uniform(
            vec!["0".into(), "1".into(), "+".into(), "-".into()],
            vec![
                HermitianMatrix::diag(&[1.0, 0.0]),
                HermitianMatrix::diag(&[0.0, 1.0]),
                plus,
                minus,
            ],
        )
        .unwrap();
        let cv = CostVector::standard(4);
        let order = GuessOrder::from_letters(&ens, &["1", "+", "-", "0"]).unwrap();
        let r = cost_operator(&ens, &cv, &order).unwrap();
        assert!((r.matrix.trace() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn cost_operator_single_letter_is_state() {
        let rho = HermitianMatrix::diag(&[0.25, 0.75]);
        let ens = CqEnsemble::new(vec!["a".into()], vec![1.0], vec![rho.clone()]).unwrap();
        let cv = CostVector::new(vec![1.0], None).unwrap();
        let order = GuessOrder::new(vec![0]).unwrap();
        let r = cost_operator(&ens, &cv, &order).unwrap();
        assert!(r.matrix.sub(&rho).frobenius_norm() < 1e-14);
    }

    #[test]
    fn cost_operator_orthogonal_pair() {
        let ens = two_orthogonal();
        let cv = CostVector::new(vec![1.0, 2.0], None).unwrap();
        let order = GuessOrder::new(vec![0, 1]).unwrap();
        let r = cost_operator(&ens, &cv, &order).unwrap();
        let expected = HermitianMatrix::diag(&[0.5, 1.0]);
        assert!(r.matrix.sub(&expected).frobenius_norm() < 1e-13);
        let evs = crate::linalg::eigenvalues(&r.matrix).unwrap();
        assert!((evs[0] - 1.0).abs() < 1e-12 && (evs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn infinite_tail_cost_is_an_error() {
        let ens = two_orthogonal();
        let cv = CostVector::new(vec![1.0], None).unwrap();
        let order = GuessOrder::new(vec![0]).unwrap();
        match cost_operator(&ens, &cv, &order) {
            Err(Error::InfiniteCost { .. }) => {}
            other => panic!("expected InfiniteCost, got {other:?}"),
        }
    }

    #[test]
    fn expected_cost_trivial_povm() {
        let states = vec![HermitianMatrix::identity(2).scale(0.5); 4];
        let ens = CqEnsemble::uniform(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            states,
        )
        .unwrap();
        let cv = CostVector::standard(4);
        let povm = Povm::new(vec![(
            OutcomeLabel::Order(GuessOrder::new(vec![0, 1, 2, 3]).unwrap()),
            HermitianMatrix::identity(2),
        )])
        .unwrap();
        assert!((expected_cost(&ens, &cv, &povm).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn povm_validation_rejects_bad_sums() {
        let half = HermitianMatrix::identity(2).scale(0.4);
        let err = Povm::new(vec![
            (OutcomeLabel::Opaque("a".into()), half.clone()),
            (OutcomeLabel::Opaque("b".into()), half),
        ]);
        assert!(err.is_err());
    }

    #[test]
    fn tensor_power_shapes() {
        let ens = two_orthogonal();
        let t1 = ens.tensor_power(1, 1000).unwrap();
        assert_eq!(t1.len(), 2);
        assert_eq!(t1.dim(), 2);
        let t2 = ens.tensor_power(2, 1000).unwrap();
        assert_eq!(t2.len(), 4);
        assert_eq!(t2.dim(), 4);
        assert!((t2.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(ens.tensor_power(2, 3).is_err());
    }

    #[test]
    fn joint_posteriors() {
        // classical analogue table of the four-state example
        let j = JointDistribution::new(
            4,
            2,
            vec![0.25, 0.0, 0.125, 0.125, 0.125, 0.125, 0.0, 0.25],
        )
        .unwrap();
        let post = j.posterior(0);
        assert!((post[0] - 0.5).abs() < 1e-12);
        assert!((post[1] - 0.25).abs() < 1e-12);
        assert!((j.marginal_y()[0] - 0.5).abs() < 1e-12);
    }
}
