//! Anytime upper bounds on the guesswork via constraint generation on the
//! dual `max tr(Y) s.t. Y <= R_g`.
//!
//! Dropping constraints relaxes the maximization, so solving over a working
//! set L of orders always yields an upper bound. The loop grows L one
//! violated constraint at a time: simulated annealing searches the order
//! space for `lambda_min(R_g - Y) < 0`, the relaxed problem is re-solved,
//! and the search repeats. When no violated order can be found for a
//! relaxed maximizer, that maximizer is feasible for the full dual and the
//! bound is exact.
//!
//! The relaxed dual over L is solved as the primal restricted to L (the two
//! agree by strong duality) so the conic engine's multipliers hand back Y
//! directly and each solve warm-starts from the previous iterate.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ensemble::{CostVector, CqEnsemble, GuessOrder};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, HermitianMatrix};
use crate::sdp::InitialIterate;
use crate::solver::{solve_restricted_raw, SolverOptions};

/// Constraints with `lambda_min(R_g - Y)` below this count as violated.
pub const VIOLATION_TOL: f64 = 1e-7;

/// Geometric annealing schedule. Each run starts at `initial_temperature`
/// and multiplies by `decay` after `steps_per_temperature` proposals, until
/// the temperature falls below `1e-3 * initial_temperature`.
#[derive(Debug, Clone)]
pub struct SaSchedule {
    pub initial_temperature: f64,
    pub decay: f64,
    pub steps_per_temperature: usize,
}

impl Default for SaSchedule {
    fn default() -> Self {
        Self {
            initial_temperature: 1.0,
            decay: 0.95,
            steps_per_temperature: 50,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ActiveSetConfig {
    /// Maximum number of constraints to impose; `None` means `d_B^2`.
    pub kappa: Option<usize>,
    /// Wall-clock budget in seconds.
    pub t_max: f64,
    /// Annealing runs per constraint search.
    pub sa_restarts: usize,
    pub sa_schedule: SaSchedule,
    pub rng_seed: u64,
    /// Emit one machine-parseable progress line per outer iteration.
    pub verbose: bool,
    pub solver: SolverOptions,
}

impl Default for ActiveSetConfig {
    fn default() -> Self {
        Self {
            kappa: None,
            t_max: 300.0,
            sa_restarts: 50,
            sa_schedule: SaSchedule::default(),
            rng_seed: crate::DEFAULT_SEED,
            verbose: false,
            solver: SolverOptions::default(),
        }
    }
}

impl ActiveSetConfig {
    fn validate(&self, dim: usize) -> Result<usize> {
        let kappa = self.kappa.unwrap_or(dim * dim);
        if kappa < 1 {
            return Err(Error::InvalidProblem("kappa must be at least 1".into()));
        }
        if !(self.sa_schedule.decay > 0.0 && self.sa_schedule.decay < 1.0) {
            return Err(Error::InvalidProblem(format!(
                "annealing decay {} outside (0, 1)",
                self.sa_schedule.decay
            )));
        }
        Ok(kappa)
    }
}

#[derive(Debug, Clone)]
pub struct ActiveSetResult {
    pub upper_bound: f64,
    pub working_set: Vec<GuessOrder>,
    pub dual_y: HermitianMatrix,
    /// No violated constraint was found for the final relaxed maximizer, so
    /// the bound equals the guesswork to solver tolerance.
    pub converged_exact: bool,
    pub iterations: usize,
    pub elapsed: f64,
    /// Bound after each relaxed solve (nonincreasing).
    pub bound_trace: Vec<f64>,
}

/// Prescaled instance data for the annealer's energy evaluations.
struct Energy<'a> {
    weighted: Vec<HermitianMatrix>, // p(x) rho_x
    cv: &'a CostVector,
    y: &'a HermitianMatrix,
    n: usize,
}

impl<'a> Energy<'a> {
    fn new(ens: &CqEnsemble, cv: &'a CostVector, y: &'a HermitianMatrix) -> Self {
        Self {
            weighted: (0..ens.len())
                .map(|x| ens.state(x).scale(ens.prob(x)))
                .collect(),
            cv,
            y,
            n: ens.len(),
        }
    }

    /// `lambda_min(R_g - Y)`; negative means the constraint is violated.
    fn eval(&self, order: &[usize]) -> f64 {
        let mut r = self.y.scale(-1.0);
        let mut seen = vec![false; self.n];
        for (pos, &x) in order.iter().enumerate() {
            r = r.add(&self.weighted[x].scale(self.cv.cost_at(pos + 1)));
            seen[x] = true;
        }
        if order.len() < self.n {
            let ci = self
                .cv
                .cost_inf()
                .expect("missing letters need a finite tail cost");
            for x in 0..self.n {
                if !seen[x] {
                    r = r.add(&self.weighted[x].scale(ci));
                }
            }
        }
        min_eigenvalue(&r).expect("energy eigensolve")
    }
}

/// One annealing run from a random initial order. Returns the best state
/// visited.
fn anneal_once(
    energy: &Energy,
    k: usize,
    schedule: &SaSchedule,
    rng: &mut ChaCha8Rng,
) -> (f64, Vec<usize>) {
    let n = energy.n;
    let mut current = crate::solver::random_order(rng, n, k).entries().to_vec();
    let mut current_e = energy.eval(&current);
    let mut best = current.clone();
    let mut best_e = current_e;

    if k == n && k == 1 {
        return (best_e, best);
    }

    let t_floor = 1e-3 * schedule.initial_temperature;
    let mut t = schedule.initial_temperature;
    while t >= t_floor {
        for _ in 0..schedule.steps_per_temperature {
            let mut proposal = current.clone();
            let do_replace = k < n && (k == 1 || rng.random_range(0..2) == 0);
            if do_replace {
                // swap one entry for an unused letter
                let pos = rng.random_range(0..k);
                let unused: Vec<usize> = (0..n).filter(|x| !proposal.contains(x)).collect();
                proposal[pos] = unused[rng.random_range(0..unused.len())];
            } else {
                let i = rng.random_range(0..k);
                let mut j = rng.random_range(0..k - 1);
                if j >= i {
                    j += 1;
                }
                proposal.swap(i, j);
            }
            let e = energy.eval(&proposal);
            let delta = e - current_e;
            if delta <= 0.0 || rng.random::<f64>() < (-delta / t).exp() {
                current = proposal;
                current_e = e;
                if current_e < best_e || (current_e == best_e && current < best) {
                    best = current.clone();
                    best_e = current_e;
                }
            }
        }
        t *= schedule.decay;
    }
    (best_e, best)
}

fn find_violated_with_base(
    ens: &CqEnsemble,
    cv: &CostVector,
    y: &HermitianMatrix,
    cfg: &ActiveSetConfig,
    stream_base: u64,
) -> Result<Option<GuessOrder>> {
    let energy = Energy::new(ens, cv, y);
    let k = cv.k();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for restart in 0..cfg.sa_restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        rng.set_stream(stream_base + restart as u64);
        let (e, order) = anneal_once(&energy, k, &cfg.sa_schedule, &mut rng);
        let better = match &best {
            None => true,
            Some((be, border)) => e < *be || (e == *be && order < *border),
        };
        if better {
            best = Some((e, order));
        }
    }
    match best {
        Some((e, order)) if e < -VIOLATION_TOL => Ok(Some(GuessOrder::new(order)?)),
        _ => Ok(None),
    }
}

/// Searches for an order with `lambda_min(R_g - Y) < -tol` using the
/// configured annealing restarts. Returns the worst-energy find (ties
/// broken lexicographically), or `None` when every restart comes up empty
/// (inconclusive: the annealer carries no guarantee of finding a violation
/// when one exists).
pub fn find_violated_order(
    ens: &CqEnsemble,
    cv: &CostVector,
    y: &HermitianMatrix,
    cfg: &ActiveSetConfig,
) -> Result<Option<GuessOrder>> {
    cfg.validate(ens.dim())?;
    crate::solver::check_restriction_pub(ens, cv)?;
    find_violated_with_base(ens, cv, y, cfg, 0)
}

/// Deterministic fallback constraint when the initial identity guess is
/// already feasible: the classically optimal order for the letter
/// probabilities.
fn fallback_order(ens: &CqEnsemble, cv: &CostVector) -> Result<GuessOrder> {
    let (_, order) = crate::solver::classical_guesswork(ens.probs(), cv)?;
    Ok(order)
}

/// The constraint-generation upper-bound loop.
///
/// Stops when the working set reaches kappa, when every annealing restart
/// fails to find a violated constraint (the bound is then exact), or when
/// the projected time of another search/solve round would exceed `t_max`
/// (the budget can still be overshot: at least one round always runs).
pub fn active_set_upper_bound(
    ens: &CqEnsemble,
    cv: &CostVector,
    cfg: &ActiveSetConfig,
) -> Result<ActiveSetResult> {
    let kappa = cfg.validate(ens.dim())?;
    crate::solver::check_restriction_pub(ens, cv)?;
    let start = Instant::now();
    if cfg.t_max <= 0.0 {
        return Err(Error::BudgetExhausted {
            budget: cfg.t_max,
            context: "no time to run a single active-set iteration".into(),
        });
    }

    let mut working: Vec<GuessOrder> = Vec::new();
    let mut y = HermitianMatrix::identity(ens.dim());
    let mut bound_trace: Vec<f64> = Vec::new();
    let mut warm: Option<InitialIterate> = None;
    let mut upper_bound = f64::INFINITY;
    let mut converged_exact = false;
    let mut iterations = 0usize;
    let mut round_time = 0.0f64;

    loop {
        let elapsed = start.elapsed().as_secs_f64();
        if iterations > 0 && elapsed + round_time > cfg.t_max {
            break;
        }
        let round_start = Instant::now();
        iterations += 1;

        let found = find_violated_with_base(
            ens,
            cv,
            &y,
            cfg,
            (iterations as u64 - 1) * cfg.sa_restarts.max(1) as u64,
        )?;
        let next = match found {
            None if working.is_empty() => fallback_order(ens, cv)?,
            None => {
                converged_exact = true;
                break;
            }
            Some(g) => {
                if working.contains(&g) || working.len() >= kappa {
                    break;
                }
                g
            }
        };
        working.push(next);

        let (sol, raw) = solve_restricted_raw(ens, cv, &working, &cfg.solver, warm.as_ref())?;
        upper_bound = sol.value;
        y = sol.dual_y;
        bound_trace.push(sol.value);
        let mut primal = raw.primal.clone();
        primal.push(HermitianMatrix::zeros(ens.dim()));
        warm = Some(InitialIterate {
            primal,
            dual: raw.dual,
        });

        if cfg.verbose {
            eprintln!(
                "active-set iter={} working_set={} bound={:.12} elapsed={:.3}",
                iterations,
                working.len(),
                upper_bound,
                start.elapsed().as_secs_f64()
            );
        }
        round_time = round_start.elapsed().as_secs_f64().max(round_time);
    }

    if working.is_empty() {
        return Err(Error::BudgetExhausted {
            budget: cfg.t_max,
            context: "budget exhausted before the first relaxed solve".into(),
        });
    }
    Ok(ActiveSetResult {
        upper_bound,
        working_set: working,
        dual_y: y,
        converged_exact,
        iterations,
        elapsed: start.elapsed().as_secs_f64(),
        bound_trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Inconclusive,
}

/// Sufficient feasibility check for `Y <= R_pi` over all permutations
/// without touching them individually: if for every distinct k-tuple
/// `(x_1..x_k)`
///
/// ```text
///   Y <= sum_{i=1..k} c_{|X|-i+1} p(x_i) rho_{x_i} + c_1 sum_{rest} p(x) rho_x
/// ```
///
/// then Y is feasible for the full dual: reading `x_1..x_k` as the last k
/// guesses of a permutation in reverse, the right-hand side lower-bounds
/// that permutation's cost operator (tail costs exact, head letters at
/// `c_1`), so every one of the |X|!/(|X|-k)! comparisons dominates a family
/// of permutations and together they cover all of them. At k = |X|-1 the
/// comparison set is exactly the full constraint set. A failed comparison
/// is inconclusive, not a refutation.
pub fn k_subset_feasibility_check(
    ens: &CqEnsemble,
    cv: &CostVector,
    y: &HermitianMatrix,
    k: usize,
) -> Result<Feasibility> {
    let n = ens.len();
    if cv.k() != n {
        return Err(Error::InvalidCostVector(
            "k-subset check needs K = |X|".into(),
        ));
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidProblem(format!(
            "k-subset check needs 1 <= k < |X| (got k = {k}, |X| = {n})"
        )));
    }
    let weighted: Vec<HermitianMatrix> =
        (0..n).map(|x| ens.state(x).scale(ens.prob(x))).collect();
    let c1 = cv.cost_at(1);
    let base: HermitianMatrix = {
        let mut acc = HermitianMatrix::zeros(ens.dim());
        for w in &weighted {
            acc = acc.add(&w.scale(c1));
        }
        acc
    };
    for tuple in crate::ensemble::enumerate_orders(n, k) {
        let mut m = base.clone();
        for (i, &x) in tuple.entries().iter().enumerate() {
            // x_i plays the (i+1)-th guess from the end, so its exact cost in
            // any permutation with this tail is c_{|X|-i} (i 0-based here)
            let c = cv.cost_at(n - i);
            m = m.add(&weighted[x].scale(c - c1));
        }
        if min_eigenvalue(&m.sub(y))? < -VIOLATION_TOL {
            return Ok(Feasibility::Inconclusive);
        }
    }
    Ok(Feasibility::Feasible)
}
