//! Exact computation of the guesswork with quantum side information.
//!
//! The primal program optimizes a POVM indexed by guess orders,
//!
//! ```text
//!   minimize    sum_g tr(R_g E_g)     over g in X^K_(distinct)
//!   subject to  E_g PSD,  sum_g E_g = 1_B
//! ```
//!
//! and the dual maximizes `tr(Y)` subject to `Y <= R_g` for every order.
//! Both are built in the conic engine's canonical form; the dual's
//! semi-definite inequalities become per-order slack blocks `S_g = R_g - Y`.
//! Strong duality holds (the uniform POVM is strictly feasible), so the two
//! routes agree to solver tolerance and `Y` doubles as an optimality
//! certificate: a POVM is optimal iff `Y = sum_g R_g E_g` satisfies
//! `Y <= R_g` for all orders.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ensemble::{
    cost_operator, count_orders, enumerate_orders, CostVector, CqEnsemble, GuessOrder,
    JointDistribution, OutcomeLabel, Povm,
};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, pinv_sqrt_psd, psd_project, C64, HermitianMatrix};
use crate::sdp::{ConicProblem, ConicSolution, Constraint, InitialIterate, SolveOptions};

/// Options shared by every exact solve.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Certified accuracy of the reported value. The conic engine runs at a
    /// quarter of this so packaged POVMs meet their own validation
    /// tolerances with margin.
    pub tol: f64,
    pub max_iter: usize,
    /// Refuse exhaustive builds with more than this many orders.
    pub size_cap: u128,
    /// Orders with tr(E_g) above this are reported as the support.
    pub support_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200_000,
            size_cap: 50_000,
            support_threshold: 1e-6,
        }
    }
}

/// Result of an exact solve: optimal value, an optimal POVM over guess
/// orders, the dual certificate, and diagnostics.
#[derive(Debug, Clone)]
pub struct GuessworkSolution {
    pub value: f64,
    pub povm: Povm,
    pub dual_y: HermitianMatrix,
    pub gap: f64,
    /// min over checked orders of the smallest eigenvalue of `R_g - Y`.
    pub certificate_margin: f64,
    pub support: Vec<GuessOrder>,
    pub iterations: usize,
    pub tolerance: f64,
}

/// Orthonormal basis of the real vector space of `dim x dim` Hermitian
/// matrices: diagonal units first, then for each p < q the real and
/// imaginary off-diagonal elements, scaled by 1/sqrt(2).
pub fn hermitian_basis(dim: usize) -> Vec<HermitianMatrix> {
    let mut basis = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        data[i * dim + i] = C64::new(1.0, 0.0);
        basis.push(HermitianMatrix::new(dim, data));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for p in 0..dim {
        for q in (p + 1)..dim {
            let mut re = vec![C64::new(0.0, 0.0); dim * dim];
            re[p * dim + q] = C64::new(s, 0.0);
            re[q * dim + p] = C64::new(s, 0.0);
            basis.push(HermitianMatrix::new(dim, re));
            let mut im = vec![C64::new(0.0, 0.0); dim * dim];
            im[p * dim + q] = C64::new(0.0, s);
            im[q * dim + p] = C64::new(0.0, -s);
            basis.push(HermitianMatrix::new(dim, im));
        }
    }
    basis
}

/// `sum_i coeffs[i] basis[i]` over [`hermitian_basis`].
pub fn assemble_from_basis(dim: usize, coeffs: &[f64]) -> HermitianMatrix {
    let basis = hermitian_basis(dim);
    assert_eq!(coeffs.len(), basis.len(), "coefficient count mismatch");
    let mut out = HermitianMatrix::zeros(dim);
    for (c, h) in coeffs.iter().zip(&basis) {
        if *c != 0.0 {
            out = out.add(&h.scale(*c));
        }
    }
    out
}

/// The two supported regimes: all letters guessable, or a finite tail cost.
pub(crate) fn check_restriction_pub(ens: &CqEnsemble, cv: &CostVector) -> Result<()> {
    check_restriction(ens, cv)
}

fn check_restriction(ens: &CqEnsemble, cv: &CostVector) -> Result<()> {
    if cv.k() > ens.len() {
        return Err(Error::InvalidCostVector(format!(
            "{} guesses but only {} letters",
            cv.k(),
            ens.len()
        )));
    }
    if cv.k() < ens.len() && cv.cost_inf().is_none() {
        return Err(Error::InfiniteCost {
            k: cv.k(),
            letters: ens.len(),
            context: "exact solves support K = |X| or a finite tail cost; \
                      a finite value with an infinite tail requires a POVM with \
                      tr[E_g rho_x] = 0 for every letter x outside its order g, \
                      which this library does not decide"
                .into(),
        });
    }
    Ok(())
}

fn cost_operators(
    ens: &CqEnsemble,
    cv: &CostVector,
    orders: &[GuessOrder],
) -> Result<Vec<HermitianMatrix>> {
    orders
        .iter()
        .map(|g| Ok(cost_operator(ens, cv, g)?.matrix))
        .collect()
}

/// POVM cleanup: project each element onto the PSD cone, then conjugate by
/// `S^{-1/2}` of the sum so the family resolves the identity exactly.
fn package_povm(outcomes: Vec<(OutcomeLabel, HermitianMatrix)>) -> Result<Povm> {
    let dim = outcomes[0].1.dim();
    let mut projected = Vec::with_capacity(outcomes.len());
    let mut sum = HermitianMatrix::zeros(dim);
    for (label, e) in outcomes {
        let p = psd_project(&e)?;
        sum = sum.add(&p);
        projected.push((label, p));
    }
    let corr = pinv_sqrt_psd(&sum, 1e-12)?.to_cmatrix();
    let cleaned = projected
        .into_iter()
        .map(|(label, e)| (label, e.conj_by(&corr)))
        .collect();
    Povm::new(cleaned)
}

fn build_primal_problem(
    ens: &CqEnsemble,
    rs: &[HermitianMatrix],
) -> ConicProblem {
    let d = ens.dim();
    let identity = HermitianMatrix::identity(d);
    let constraints = hermitian_basis(d)
        .into_iter()
        .map(|h| Constraint {
            rhs: h.hs_inner(&identity),
            terms: (0..rs.len()).map(|b| (b, h.clone())).collect(),
        })
        .collect();
    ConicProblem {
        blocks: vec![d; rs.len()],
        objective: rs.to_vec(),
        constraints,
    }
}

fn engine_options(opts: &SolverOptions) -> SolveOptions {
    SolveOptions {
        tol: opts.tol / 4.0,
        max_iter: opts.max_iter,
        ..SolveOptions::default()
    }
}

/// Exact guesswork via the primal SDP over all distinct guess orders.
pub fn solve_primal(ens: &CqEnsemble, cv: &CostVector) -> Result<GuessworkSolution> {
    solve_primal_with(ens, cv, &SolverOptions::default())
}

pub fn solve_primal_with(
    ens: &CqEnsemble,
    cv: &CostVector,
    opts: &SolverOptions,
) -> Result<GuessworkSolution> {
    check_restriction(ens, cv)?;
    let count = count_orders(ens.len(), cv.k());
    if count > opts.size_cap {
        return Err(Error::SizeCapExceeded {
            actual: count,
            cap: opts.size_cap,
        });
    }
    let orders: Vec<GuessOrder> = enumerate_orders(ens.len(), cv.k()).collect();
    solve_over_orders(ens, cv, &orders, opts, None)
}

/// Primal restricted to a caller-chosen set of orders: always an upper
/// bound on the guesswork, tight when the set contains a support.
pub fn solve_restricted(
    ens: &CqEnsemble,
    cv: &CostVector,
    orders: &[GuessOrder],
) -> Result<GuessworkSolution> {
    solve_restricted_with(ens, cv, orders, &SolverOptions::default(), None)
}

pub fn solve_restricted_with(
    ens: &CqEnsemble,
    cv: &CostVector,
    orders: &[GuessOrder],
    opts: &SolverOptions,
    warm: Option<&InitialIterate>,
) -> Result<GuessworkSolution> {
    if orders.is_empty() {
        return Err(Error::InvalidOrder("restricted solve with no orders".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for g in orders {
        if !seen.insert(g.clone()) {
            return Err(Error::InvalidOrder(format!(
                "duplicate order {:?} in restriction",
                g.entries()
            )));
        }
        if g.len() != cv.k() {
            return Err(Error::InvalidOrder(format!(
                "order of length {} under a cost vector with K = {}",
                g.len(),
                cv.k()
            )));
        }
    }
    solve_over_orders(ens, cv, orders, opts, warm)
}

fn solve_over_orders(
    ens: &CqEnsemble,
    cv: &CostVector,
    orders: &[GuessOrder],
    opts: &SolverOptions,
    warm: Option<&InitialIterate>,
) -> Result<GuessworkSolution> {
    // One-outcome case: the POVM is forced to the identity.
    if orders.len() == 1 {
        let r = cost_operator(ens, cv, &orders[0])?.matrix;
        let povm = Povm::new(vec![(
            OutcomeLabel::Order(orders[0].clone()),
            HermitianMatrix::identity(ens.dim()),
        )])?;
        return Ok(GuessworkSolution {
            value: r.trace(),
            povm,
            dual_y: r,
            gap: 0.0,
            certificate_margin: 0.0,
            support: vec![orders[0].clone()],
            iterations: 0,
            tolerance: opts.tol,
        });
    }
    let (packaged, _) = solve_restricted_raw(ens, cv, orders, opts, warm)?;
    Ok(packaged)
}

/// Keeps the raw engine solution alongside the packaged result, for warm
/// starts across related solves.
pub(crate) fn solve_restricted_raw(
    ens: &CqEnsemble,
    cv: &CostVector,
    orders: &[GuessOrder],
    opts: &SolverOptions,
    warm: Option<&InitialIterate>,
) -> Result<(GuessworkSolution, ConicSolution)> {
    let rs = cost_operators(ens, cv, orders)?;
    let d = ens.dim();
    let problem = build_primal_problem(ens, &rs);
    let mut engine_opts = engine_options(opts);
    engine_opts.initial = warm.cloned();
    let sol = problem.solve_with(&engine_opts)?.into_optimal()?;
    let dual_y = assemble_from_basis(d, &sol.dual);
    let mut margin = f64::INFINITY;
    for r in &rs {
        margin = margin.min(min_eigenvalue(&r.sub(&dual_y))?);
    }
    let mut support = Vec::new();
    let mut outcomes = Vec::with_capacity(orders.len());
    for (g, e) in orders.iter().zip(&sol.primal) {
        if e.trace() > opts.support_threshold {
            support.push(g.clone());
        }
        outcomes.push((OutcomeLabel::Order(g.clone()), e.clone()));
    }
    let povm = package_povm(outcomes)?;
    let packaged = GuessworkSolution {
        value: sol.value,
        povm,
        dual_y,
        gap: sol.gap,
        certificate_margin: margin,
        support,
        iterations: sol.iterations,
        tolerance: opts.tol,
    };
    Ok((packaged, sol))
}

/// Exact guesswork via the dual SDP `max tr(Y) s.t. Y <= R_g for all g`,
/// built with per-order slack blocks `S_g = R_g - Y`.
pub fn solve_dual(ens: &CqEnsemble, cv: &CostVector) -> Result<GuessworkSolution> {
    solve_dual_with(ens, cv, &SolverOptions::default())
}

pub fn solve_dual_with(
    ens: &CqEnsemble,
    cv: &CostVector,
    opts: &SolverOptions,
) -> Result<GuessworkSolution> {
    check_restriction(ens, cv)?;
    let count = count_orders(ens.len(), cv.k());
    if count > opts.size_cap {
        return Err(Error::SizeCapExceeded {
            actual: count,
            cap: opts.size_cap,
        });
    }
    let orders: Vec<GuessOrder> = enumerate_orders(ens.len(), cv.k()).collect();
    let rs = cost_operators(ens, cv, &orders)?;
    let d = ens.dim();

    if orders.len() == 1 {
        // Only constraint is Y <= R; trace is maximized by Y = R.
        let povm = Povm::new(vec![(
            OutcomeLabel::Order(orders[0].clone()),
            HermitianMatrix::identity(d),
        )])?;
        return Ok(GuessworkSolution {
            value: rs[0].trace(),
            povm,
            dual_y: rs[0].clone(),
            gap: 0.0,
            certificate_margin: 0.0,
            support: vec![orders[0].clone()],
            iterations: 0,
            tolerance: opts.tol,
        });
    }

    // Eliminate Y: with reference order g0, S_g - S_g0 = R_g - R_g0 for all
    // g != g0, and max tr(Y) becomes tr(R_g0) - min tr(S_g0).
    let basis = hermitian_basis(d);
    let mut constraints = Vec::with_capacity((orders.len() - 1) * basis.len());
    for g_idx in 1..orders.len() {
        let diff = rs[g_idx].sub(&rs[0]);
        for h in &basis {
            constraints.push(Constraint {
                rhs: h.hs_inner(&diff),
                terms: vec![(g_idx, h.clone()), (0, h.scale(-1.0))],
            });
        }
    }
    let mut objective = vec![HermitianMatrix::zeros(d); orders.len()];
    objective[0] = HermitianMatrix::identity(d);
    let problem = ConicProblem {
        blocks: vec![d; orders.len()],
        objective,
        constraints,
    };
    let sol = problem.solve_with(&engine_options(opts))?.into_optimal()?;

    let value = rs[0].trace() - sol.value;
    let dual_y = rs[0].sub(&sol.primal[0]);

    // The engine multipliers assemble to the optimal POVM: for g != g0 the
    // multiplier matrix Z_g satisfies E_g = -Z_g, and completeness fixes E_g0.
    let mut outcomes = Vec::with_capacity(orders.len());
    let mut e_sum = HermitianMatrix::zeros(d);
    for g_idx in 1..orders.len() {
        let coeffs = &sol.dual[(g_idx - 1) * basis.len()..g_idx * basis.len()];
        let e = assemble_from_basis(d, coeffs).scale(-1.0);
        e_sum = e_sum.add(&e);
        outcomes.push((OutcomeLabel::Order(orders[g_idx].clone()), e));
    }
    outcomes.insert(
        0,
        (
            OutcomeLabel::Order(orders[0].clone()),
            HermitianMatrix::identity(d).sub(&e_sum),
        ),
    );
    let povm = package_povm(outcomes)?;

    let mut margin = f64::INFINITY;
    let mut support = Vec::new();
    for ((label, e), r) in povm.outcomes().iter().zip(&rs) {
        margin = margin.min(min_eigenvalue(&r.sub(&dual_y))?);
        if e.trace() > opts.support_threshold {
            if let Some(g) = label.as_order() {
                support.push(g.clone());
            }
        }
    }

    Ok(GuessworkSolution {
        value,
        povm,
        dual_y,
        gap: sol.gap,
        certificate_margin: margin,
        support,
        iterations: sol.iterations,
        tolerance: opts.tol,
    })
}

/// How [`verify_optimality`] walks the order space.
#[derive(Debug, Clone, Copy)]
pub enum CertificateMode {
    /// Every order in `X^K` without repeats (size-capped).
    Exhaustive,
    /// A seeded random subset of the given size, plus the solution support.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub worst_margin: f64,
    pub witness: Option<GuessOrder>,
    pub orders_checked: usize,
    pub mode: CertificateMode,
}

impl CertificateReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.worst_margin >= -tol
    }
}

/// Checks the optimality certificate `Y <= R_g` by scanning orders and
/// recording the worst margin `lambda_min(R_g - Y)` with its witness.
pub fn verify_optimality(
    ens: &CqEnsemble,
    cv: &CostVector,
    sol: &GuessworkSolution,
    mode: CertificateMode,
) -> Result<CertificateReport> {
    verify_optimality_with(ens, cv, sol, mode, &SolverOptions::default())
}

pub fn verify_optimality_with(
    ens: &CqEnsemble,
    cv: &CostVector,
    sol: &GuessworkSolution,
    mode: CertificateMode,
    opts: &SolverOptions,
) -> Result<CertificateReport> {
    let mut worst = f64::INFINITY;
    let mut witness = None;
    let mut checked = 0usize;
    let consider = |g: GuessOrder,
                        worst: &mut f64,
                        witness: &mut Option<GuessOrder>,
                        checked: &mut usize|
     -> Result<()> {
        let r = cost_operator(ens, cv, &g)?.matrix;
        let margin = min_eigenvalue(&r.sub(&sol.dual_y))?;
        if margin < *worst {
            *worst = margin;
            *witness = Some(g);
        }
        *checked += 1;
        Ok(())
    };

    match mode {
        CertificateMode::Exhaustive => {
            let count = count_orders(ens.len(), cv.k());
            if count > opts.size_cap {
                return Err(Error::SizeCapExceeded {
                    actual: count,
                    cap: opts.size_cap,
                });
            }
            for g in enumerate_orders(ens.len(), cv.k()) {
                consider(g, &mut worst, &mut witness, &mut checked)?;
            }
        }
        CertificateMode::Sampled { samples, seed } => {
            for g in &sol.support {
                consider(g.clone(), &mut worst, &mut witness, &mut checked)?;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let g = random_order(&mut rng, ens.len(), cv.k());
                consider(g, &mut worst, &mut witness, &mut checked)?;
            }
        }
    }
    Ok(CertificateReport {
        worst_margin: worst,
        witness,
        orders_checked: checked,
        mode,
    })
}

/// Uniformly random distinct guess order via a partial Fisher-Yates pass.
pub fn random_order<R: Rng>(rng: &mut R, x_size: usize, k: usize) -> GuessOrder {
    let mut pool: Vec<usize> = (0..x_size).collect();
    for i in 0..k {
        let j = rng.random_range(i..x_size);
        pool.swap(i, j);
    }
    GuessOrder::new(pool[..k].to_vec()).expect("sampled entries are distinct")
}

/// Classical guesswork without side information: sort the distribution in
/// nonincreasing order (ties: lowest index first) and charge `c_k` for the
/// k-th guess; the tail mass beyond `K` costs `c_inf` (infinite tail cost
/// on positive tail mass makes the value infinite).
pub fn classical_guesswork(probs: &[f64], cv: &CostVector) -> Result<(f64, GuessOrder)> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("empty distribution".into()));
    }
    if probs.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::InvalidDistribution("negative probability".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}"
        )));
    }
    if cv.k() > probs.len() {
        return Err(Error::InvalidCostVector(format!(
            "{} guesses but only {} letters",
            cv.k(),
            probs.len()
        )));
    }
    let mut idx: Vec<usize> = (0..probs.len()).collect();
    idx.sort_by(|&i, &j| probs[j].partial_cmp(&probs[i]).unwrap().then(i.cmp(&j)));

    let k = cv.k();
    let mut value = 0.0;
    for (pos, &i) in idx.iter().take(k).enumerate() {
        value += cv.cost_at(pos + 1) * probs[i];
    }
    let tail: f64 = idx.iter().skip(k).map(|&i| probs[i]).sum();
    if tail > 0.0 {
        match cv.cost_inf() {
            Some(ci) => value += ci * tail,
            None => value = f64::INFINITY,
        }
    }
    let order = GuessOrder::new(idx[..k].to_vec())?;
    Ok((value, order))
}

/// Classical conditional guesswork `sum_y p(y) G(X | Y = y)`.
pub fn classical_conditional_guesswork(joint: &JointDistribution, cv: &CostVector) -> Result<f64> {
    let py = joint.marginal_y();
    let mut total = 0.0;
    for (y, &p) in py.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        let (g, _) = classical_guesswork(&joint.posterior(y), cv)?;
        if g.is_infinite() {
            return Ok(f64::INFINITY);
        }
        total += p * g;
    }
    Ok(total)
}
