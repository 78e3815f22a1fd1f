//! The three equivalent guessing-strategy forms and the constructive
//! compilations between them.
//!
//! An *ordered* strategy measures once with a POVM indexed by guess orders.
//! A *measured* strategy measures with an arbitrary POVM and picks an order
//! classically per outcome. A *sequential* strategy applies one generalized
//! measurement per guess, adapted to the history of previous outcomes. All
//! three realize the same set of guess-number distributions; the
//! compilations here are explicit, and the round trip ordered -> sequential
//! -> ordered reproduces the joint distribution `p(g | x)` entrywise.
//!
//! Where the sequential construction inverts intermediate operators we use
//! the PSD pseudo-inverse on the support (partial sums of a POVM over orders
//! dominate each other, so supports nest); the compilation verifies the
//! reconstruction identity as a postcondition and errors if it fails.

use std::collections::BTreeMap;

use crate::ensemble::{
    CostVector, CqEnsemble, GuessCount, GuessOrder, OutcomeLabel, Povm,
};
use crate::error::{Error, Result};
use crate::linalg::{psd_project, sqrt_psd, CMatrix, HermitianMatrix};

/// Branches with partial-sum trace at or below this are unreachable and
/// pruned from the history tree.
const REACH_TOL: f64 = 1e-14;

/// Round-trip reconstruction tolerance for the sequential compilation.
const ROUNDTRIP_TOL: f64 = 1e-8;

/// A guess-by-guess protocol: for every reachable history of previous
/// outcomes, one generalized measurement operator per letter, satisfying
/// `sum_x M_x^dagger M_x = 1` at each stored node.
#[derive(Debug, Clone)]
pub struct SequentialStrategy {
    dim: usize,
    num_letters: usize,
    depth: usize,
    steps: BTreeMap<Vec<usize>, Vec<CMatrix>>,
}

impl SequentialStrategy {
    pub fn new(
        dim: usize,
        num_letters: usize,
        depth: usize,
        steps: BTreeMap<Vec<usize>, Vec<CMatrix>>,
    ) -> Result<Self> {
        if depth == 0 || num_letters == 0 {
            return Err(Error::InvalidStrategy("empty strategy".into()));
        }
        if !steps.contains_key(&Vec::new()) {
            return Err(Error::InvalidStrategy("missing root measurement".into()));
        }
        for (history, ops) in &steps {
            if history.len() >= depth {
                return Err(Error::InvalidStrategy(format!(
                    "history {history:?} at or beyond depth {depth}"
                )));
            }
            if history.iter().any(|&x| x >= num_letters) {
                return Err(Error::InvalidStrategy(format!(
                    "history {history:?} uses an out-of-range letter"
                )));
            }
            if ops.len() != num_letters {
                return Err(Error::InvalidStrategy(format!(
                    "history {history:?} has {} operators for {num_letters} letters",
                    ops.len()
                )));
            }
            let mut sum = CMatrix::zeros(dim);
            for m in ops {
                if m.dim() != dim {
                    return Err(Error::InvalidStrategy(
                        "operator dimension mismatch".into(),
                    ));
                }
                sum = sum.add(&m.adjoint().matmul(m));
            }
            let resid = sum.sub(&CMatrix::identity(dim)).frobenius_norm();
            if resid > 1e-8 {
                return Err(Error::InvalidStrategy(format!(
                    "operators at history {history:?} resolve the identity only within {resid:.3e}"
                )));
            }
        }
        Ok(Self {
            dim,
            num_letters,
            depth,
            steps,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_letters(&self) -> usize {
        self.num_letters
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn steps(&self) -> &BTreeMap<Vec<usize>, Vec<CMatrix>> {
        &self.steps
    }

    pub fn operators(&self, history: &[usize]) -> Option<&Vec<CMatrix>> {
        self.steps.get(history)
    }

    /// Joint outcome distribution over full guess tuples for one state:
    /// walks the stored history tree propagating `sigma -> M sigma M^dagger`.
    /// Tuples may repeat letters for hand-built strategies; missing branches
    /// carry zero probability.
    pub fn tuple_distribution(&self, rho: &HermitianMatrix) -> Vec<(Vec<usize>, f64)> {
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<usize>, HermitianMatrix)> = vec![(Vec::new(), rho.clone())];
        while let Some((history, sigma)) = stack.pop() {
            if history.len() == self.depth {
                let p = sigma.trace();
                if p > REACH_TOL {
                    out.push((history, p));
                }
                continue;
            }
            let Some(ops) = self.steps.get(&history) else {
                continue;
            };
            for (x, m) in ops.iter().enumerate() {
                let next = sigma.conj_by(m);
                if next.trace() <= REACH_TOL {
                    continue;
                }
                let mut h = history.clone();
                h.push(x);
                stack.push((h, next));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

/// A POVM with opaque outcomes plus a classical post-processing row per
/// outcome: conditional probabilities over guess orders.
#[derive(Debug, Clone)]
pub struct MeasuredStrategy {
    povm: Povm,
    postprocess: Vec<Vec<(GuessOrder, f64)>>,
}

impl MeasuredStrategy {
    pub fn new(povm: Povm, postprocess: Vec<Vec<(GuessOrder, f64)>>) -> Result<Self> {
        if postprocess.len() != povm.len() {
            return Err(Error::InvalidStrategy(format!(
                "{} post-processing rows for {} POVM outcomes",
                postprocess.len(),
                povm.len()
            )));
        }
        for (y, row) in postprocess.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::InvalidStrategy(format!("outcome {y} has no orders")));
            }
            let total: f64 = row.iter().map(|(_, p)| p).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidStrategy(format!(
                    "post-processing row {y} sums to {total}"
                )));
            }
            if row.iter().any(|(_, p)| *p < 0.0) {
                return Err(Error::InvalidStrategy(format!(
                    "negative post-processing weight at outcome {y}"
                )));
            }
        }
        Ok(Self { povm, postprocess })
    }

    /// Deterministic post-processing: outcome i maps to orders[i].
    pub fn deterministic(povm: Povm, orders: Vec<GuessOrder>) -> Result<Self> {
        let rows = orders.into_iter().map(|g| vec![(g, 1.0)]).collect();
        Self::new(povm, rows)
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn postprocess(&self) -> &[Vec<(GuessOrder, f64)>] {
        &self.postprocess
    }
}

/// Distribution of the number of guesses `N`: `probs[k-1] = p(N = k)` for
/// `k = 1..K` plus the mass of never guessing correctly.
#[derive(Debug, Clone)]
pub struct GuessDistribution {
    pub probs: Vec<f64>,
    pub p_inf: f64,
}

impl GuessDistribution {
    fn validated(probs: Vec<f64>, p_inf: f64) -> Result<Self> {
        let total: f64 = probs.iter().sum::<f64>() + p_inf;
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!(
                "guess distribution sums to {total}"
            )));
        }
        if probs.iter().any(|&p| p < -1e-12) || p_inf < -1e-12 {
            return Err(Error::InvalidDistribution(
                "negative guess probability".into(),
            ));
        }
        Ok(Self {
            probs: probs.into_iter().map(|p| p.max(0.0)).collect(),
            p_inf: p_inf.max(0.0),
        })
    }
}

/// Any of the three strategy forms, for evaluation under one interface.
#[derive(Debug, Clone)]
pub enum Strategy {
    Ordered(Povm),
    Measured(MeasuredStrategy),
    Sequential(SequentialStrategy),
}

/// Compiles an ordered-POVM strategy into a sequential protocol.
///
/// The first-step operators are PSD square roots of partial sums
/// `M_x = sqrt(sum over orders starting with x of E_g)`; deeper steps
/// conjugate by pseudo-inverses of the operators along the history before
/// taking the square root. Letters already guessed get the zero operator;
/// any completeness defect left by rank-deficient branches is absorbed into
/// the first such slot, which reachable states never excite. The compiled
/// tree is verified to reproduce every `E_g` from the operator products
/// (equivalently: the joint distribution `tr(E_g rho)` for every state)
/// before it is returned.
pub fn ordered_to_sequential(povm: &Povm, num_letters: usize) -> Result<SequentialStrategy> {
    let dim = povm.dim();
    let mut depth = None;
    for (label, _) in povm.outcomes() {
        let order = label
            .as_order()
            .ok_or_else(|| Error::InvalidPovm("ordered strategy needs order labels".into()))?;
        if order.entries().iter().any(|&x| x >= num_letters) {
            return Err(Error::InvalidPovm(
                "order refers to a letter outside the alphabet".into(),
            ));
        }
        match depth {
            None => depth = Some(order.len()),
            Some(k) if k != order.len() => {
                return Err(Error::InvalidPovm("orders of mixed length".into()))
            }
            _ => {}
        }
    }
    let depth = depth.expect("validated POVM is nonempty");

    // partial sum over orders extending the given history
    let partial = |history: &[usize]| -> HermitianMatrix {
        let mut acc = HermitianMatrix::zeros(dim);
        for (label, e) in povm.outcomes() {
            let g = label.as_order().expect("labels checked above");
            if g.entries().starts_with(history) {
                acc = acc.add(e);
            }
        }
        acc
    };

    let mut steps: BTreeMap<Vec<usize>, Vec<CMatrix>> = BTreeMap::new();
    // (history, conjugator Q = product of pseudo-inverse roots along it)
    let mut frontier: Vec<(Vec<usize>, CMatrix)> = vec![(Vec::new(), CMatrix::identity(dim))];

    while let Some((history, q)) = frontier.pop() {
        let mut ops: Vec<CMatrix> = Vec::with_capacity(num_letters);
        // (sqrt of the block, pseudo-inverse of that sqrt), both from one
        // eigendecomposition so the pinv cutoff sees the block's noise
        // floor rather than its square root
        let mut roots: Vec<Option<(HermitianMatrix, HermitianMatrix)>> =
            Vec::with_capacity(num_letters);
        let mut sum_sq = CMatrix::zeros(dim);
        for x in 0..num_letters {
            if history.contains(&x) {
                ops.push(CMatrix::zeros(dim));
                roots.push(None);
                continue;
            }
            let mut h = history.clone();
            h.push(x);
            let block = partial(&h).conj_by(&q);
            let dec = crate::linalg::eig(&block)?;
            let cutoff = crate::linalg::PINV_CUTOFF * dec.max_eigenvalue().max(0.0).max(1e-300);
            let m = dec.rebuild(|l| l.max(0.0).sqrt());
            let m_pinv = dec.rebuild(|l| if l >= cutoff { 1.0 / l.sqrt() } else { 0.0 });
            sum_sq = sum_sq.add(&m.to_cmatrix().matmul(&m.to_cmatrix()));
            ops.push(m.to_cmatrix());
            roots.push(Some((m, m_pinv)));
        }
        // absorb the completeness defect into the first used-letter slot
        // (zero there by construction); at the root the defect vanishes
        // because the POVM resolves the identity
        let defect = HermitianMatrix::from_cmatrix(&CMatrix::identity(dim).sub(&sum_sq));
        if defect.frobenius_norm() > 1e-12 {
            match history.first() {
                Some(&slot) => {
                    ops[slot] = sqrt_psd(&psd_project(&defect)?)?.to_cmatrix();
                }
                None => {
                    return Err(Error::InvalidPovm(format!(
                        "root completeness defect of norm {:.3e}",
                        defect.frobenius_norm()
                    )));
                }
            }
        }

        if history.len() + 1 < depth {
            for x in 0..num_letters {
                let Some((root, root_pinv)) = &roots[x] else {
                    continue;
                };
                if root.trace() <= REACH_TOL {
                    continue;
                }
                let mut h = history.clone();
                h.push(x);
                // conjugator extends on the left: Q_{h+x} = M_x^+ Q_h
                frontier.push((h, root_pinv.to_cmatrix().matmul(&q)));
            }
        }
        steps.insert(history, ops);
    }

    let strategy = SequentialStrategy::new(dim, num_letters, depth, steps)?;

    // postcondition: products along each labeled order rebuild E_g
    let scale = 1.0 + povm.dim() as f64;
    for (label, e) in povm.outcomes() {
        let g = label.as_order().expect("labels checked above");
        let mut chain = CMatrix::identity(dim);
        let mut ok = true;
        for (j, &x) in g.entries().iter().enumerate() {
            match strategy.operators(&g.entries()[..j]) {
                Some(ops) => chain = ops[x].matmul(&chain),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        let rebuilt = if ok {
            HermitianMatrix::from_cmatrix(&chain.adjoint().matmul(&chain))
        } else {
            HermitianMatrix::zeros(dim)
        };
        let err = rebuilt.sub(e).frobenius_norm();
        if err > ROUNDTRIP_TOL * scale {
            return Err(Error::Numerical(format!(
                "sequential compilation failed to reproduce an outcome (error {err:.3e})"
            )));
        }
    }
    Ok(strategy)
}

/// Recasts a sequential protocol as a single order-indexed POVM via
/// `E_{x_1..x_K} = (M_K ... M_1)^dagger (M_K ... M_1)`.
///
/// Paths that repeat a letter (possible for hand-built strategies) are
/// merged into their deduplicated order: first occurrences keep their
/// positions, repeated slots are refilled with the smallest unused letters.
/// The merge never increases the expected cost under a nondecreasing cost
/// vector, and carries zero weight for strategies compiled from ordered
/// POVMs, where the round trip preserves the joint distribution exactly.
pub fn sequential_to_ordered(s: &SequentialStrategy) -> Result<Povm> {
    let dim = s.dim();
    let mut acc: BTreeMap<Vec<usize>, HermitianMatrix> = BTreeMap::new();
    let mut stack: Vec<(Vec<usize>, CMatrix)> = vec![(Vec::new(), CMatrix::identity(dim))];
    while let Some((history, chain)) = stack.pop() {
        if history.len() == s.depth() {
            let e = HermitianMatrix::from_cmatrix(&chain.adjoint().matmul(&chain));
            if e.frobenius_norm() <= REACH_TOL {
                continue;
            }
            let target = dedup_tuple(&history, s.num_letters());
            match acc.get_mut(&target) {
                Some(existing) => *existing = existing.add(&e),
                None => {
                    acc.insert(target, e);
                }
            }
            continue;
        }
        let Some(ops) = s.operators(&history) else {
            continue;
        };
        for (x, m) in ops.iter().enumerate() {
            let next = m.matmul(&chain);
            if next.frobenius_norm() <= REACH_TOL {
                continue;
            }
            let mut h = history.clone();
            h.push(x);
            stack.push((h, next));
        }
    }
    let outcomes = acc
        .into_iter()
        .map(|(entries, e)| Ok((OutcomeLabel::Order(GuessOrder::new(entries)?), e)))
        .collect::<Result<Vec<_>>>()?;
    Povm::new(outcomes)
}

/// Canonical repeated-entry removal: keep first occurrences in place,
/// refill repeated slots with the smallest unused letters.
pub fn dedup_tuple(tuple: &[usize], num_letters: usize) -> Vec<usize> {
    let mut seen = vec![false; num_letters];
    let mut out = tuple.to_vec();
    for slot in out.iter_mut() {
        if !seen[*slot] {
            seen[*slot] = true;
            *slot = usize::MAX - *slot; // mark kept entries, sign-free
        }
    }
    // second pass: restore kept entries, replace the rest
    for slot in out.iter_mut() {
        if *slot > usize::MAX / 2 {
            *slot = usize::MAX - *slot;
        } else {
            let fresh = (0..num_letters)
                .find(|&c| !seen[c])
                .expect("a tuple no longer than the alphabet always has unused letters");
            seen[fresh] = true;
            *slot = fresh;
        }
    }
    out
}

/// Regroups a measured strategy into an ordered POVM:
/// `E_g = sum_y p(g | y) E_y`. Expected cost is preserved exactly by
/// linearity.
pub fn measured_to_ordered(m: &MeasuredStrategy) -> Result<Povm> {
    let mut acc: BTreeMap<GuessOrder, HermitianMatrix> = BTreeMap::new();
    for ((_, e), row) in m.povm().outcomes().iter().zip(m.postprocess()) {
        for (g, p) in row {
            if *p == 0.0 {
                continue;
            }
            let term = e.scale(*p);
            match acc.get_mut(g) {
                Some(existing) => *existing = existing.add(&term),
                None => {
                    acc.insert(g.clone(), term);
                }
            }
        }
    }
    Povm::new(
        acc.into_iter()
            .map(|(g, e)| (OutcomeLabel::Order(g), e))
            .collect(),
    )
}

/// Distribution of the number of guesses and the expected cost for any
/// strategy form. The expected cost is infinite when the strategy leaves
/// positive mass past the last allowed guess and the tail cost is infinite.
pub fn guess_distribution(
    ens: &CqEnsemble,
    strategy: &Strategy,
    cv: &CostVector,
) -> Result<(GuessDistribution, f64)> {
    let k = cv.k();
    let mut probs = vec![0.0; k];
    let mut p_inf = 0.0;

    let add_tuple = |x: usize, tuple: &[usize], weight: f64, probs: &mut Vec<f64>, p_inf: &mut f64| {
        let n = tuple
            .iter()
            .position(|&g| g == x)
            .map(|j| j + 1)
            .filter(|&j| j <= k);
        match n {
            Some(j) => probs[j - 1] += weight,
            None => *p_inf += weight,
        }
    };

    match strategy {
        Strategy::Ordered(povm) => {
            if povm.dim() != ens.dim() {
                return Err(Error::DimensionMismatch(
                    "POVM dimension differs from ensemble".into(),
                ));
            }
            for x in 0..ens.len() {
                for (label, e) in povm.outcomes() {
                    let g = label.as_order().ok_or_else(|| {
                        Error::InvalidPovm("ordered strategy needs order labels".into())
                    })?;
                    let w = ens.prob(x) * e.hs_inner(ens.state(x)).max(0.0);
                    match g.guess_count(x) {
                        GuessCount::Finite(j) if j <= k => probs[j - 1] += w,
                        _ => p_inf += w,
                    }
                }
            }
        }
        Strategy::Measured(m) => {
            if m.povm().dim() != ens.dim() {
                return Err(Error::DimensionMismatch(
                    "POVM dimension differs from ensemble".into(),
                ));
            }
            for x in 0..ens.len() {
                let py = m.povm().outcome_probs(ens.state(x));
                for (py_x, row) in py.iter().zip(m.postprocess()) {
                    for (g, pg) in row {
                        let w = ens.prob(x) * py_x * pg;
                        match g.guess_count(x) {
                            GuessCount::Finite(j) if j <= k => probs[j - 1] += w,
                            _ => p_inf += w,
                        }
                    }
                }
            }
        }
        Strategy::Sequential(s) => {
            if s.dim() != ens.dim() || s.num_letters() != ens.len() {
                return Err(Error::DimensionMismatch(
                    "strategy shape differs from ensemble".into(),
                ));
            }
            for x in 0..ens.len() {
                for (tuple, p) in s.tuple_distribution(ens.state(x)) {
                    add_tuple(x, &tuple, ens.prob(x) * p, &mut probs, &mut p_inf);
                }
            }
        }
    }

    // rounding dust below resolution never counts as tail mass
    if p_inf < 1e-14 {
        p_inf = 0.0;
    }
    let dist = GuessDistribution::validated(probs, p_inf)?;
    let mut cost = 0.0;
    for (j, p) in dist.probs.iter().enumerate() {
        cost += cv.cost_at(j + 1) * p;
    }
    if dist.p_inf > 0.0 {
        match cv.cost_inf() {
            Some(ci) => cost += ci * dist.p_inf,
            None => cost = f64::INFINITY,
        }
    }
    Ok((dist, cost))
}
