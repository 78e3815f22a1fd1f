//! In-repo solver for small dense SDPs in standard primal conic form
//!
//! ```text
//!   minimize    sum_b tr(C_b X_b)
//!   subject to  sum_b tr(A_{i,b} X_b) = rhs_i      (i = 1..m)
//!               X_b  PSD                            (b = 1..#blocks)
//! ```
//!
//! over complex Hermitian blocks (no real embedding). The method is an
//! alternating-direction augmented Lagrangian on the dual: each iteration
//! solves the affine subproblem through a cached Cholesky factorization of
//! the constraint Gram matrix and projects every block onto the PSD cone
//! through one eigendecomposition. The multiplier update recovers the
//! primal variable, so primal blocks are exact cone-projection outputs
//! (PSD by construction) and convergence is certified by the residuals and
//! the duality gap. The iteration is deterministic: identical problems
//! produce identical iterate sequences.

use std::io::Write;

use crate::error::{Error, Result};
use crate::linalg::{eig, min_eigenvalue, C64, HermitianMatrix};

/// One linear equality `sum over terms of tr(A_{i,b} X_b) = rhs`.
/// Terms are sparse over blocks: `(block index, coefficient matrix)`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub terms: Vec<(usize, HermitianMatrix)>,
    pub rhs: f64,
}

/// Conic problem in the canonical form above.
#[derive(Debug, Clone)]
pub struct ConicProblem {
    pub blocks: Vec<usize>,
    pub objective: Vec<HermitianMatrix>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    InfeasibleSuspected,
}

#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub primal: Vec<HermitianMatrix>,
    pub dual: Vec<f64>,
    pub value: f64,
    pub dual_value: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

impl ConicSolution {
    /// Converts a non-optimal outcome into the corresponding error, with
    /// the best iterate attached.
    pub fn into_optimal(self) -> Result<ConicSolution> {
        match self.status {
            SolveStatus::Optimal => Ok(self),
            SolveStatus::MaxIterations => Err(Error::SolverStalled {
                iterations: self.iterations,
                primal_residual: self.primal_residual,
                dual_residual: self.dual_residual,
                gap: self.gap,
                best: Box::new(self),
            }),
            SolveStatus::InfeasibleSuspected => Err(Error::Numerical(format!(
                "conic solve diverged after {} iterations; the problem may be infeasible",
                self.iterations
            ))),
        }
    }
}

/// Warm-start iterate. Primal blocks are projected onto the PSD cone
/// before use; dual multipliers are taken as-is.
#[derive(Debug, Clone)]
pub struct InitialIterate {
    pub primal: Vec<HermitianMatrix>,
    pub dual: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Cap on the total number of primal scalars (sum of squared block dims).
    pub scalar_cap: usize,
    pub initial: Option<InitialIterate>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200_000,
            scalar_cap: 1_000_000,
            initial: None,
        }
    }
}

impl ConicProblem {
    fn validate(&self, opts: &SolveOptions) -> Result<()> {
        if self.blocks.len() != self.objective.len() {
            return Err(Error::InvalidProblem(format!(
                "{} blocks but {} objective matrices",
                self.blocks.len(),
                self.objective.len()
            )));
        }
        if self.blocks.is_empty() {
            return Err(Error::InvalidProblem("no blocks".into()));
        }
        if self.constraints.is_empty() {
            return Err(Error::InvalidProblem("no equality constraints".into()));
        }
        let scalars: usize = self.blocks.iter().map(|d| d * d).sum();
        if scalars > opts.scalar_cap {
            return Err(Error::SizeCapExceeded {
                actual: scalars as u128,
                cap: opts.scalar_cap as u128,
            });
        }
        for (b, (&d, c)) in self.blocks.iter().zip(&self.objective).enumerate() {
            if c.dim() != d {
                return Err(Error::InvalidProblem(format!(
                    "objective for block {b} has dim {} instead of {d}",
                    c.dim()
                )));
            }
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if con.terms.is_empty() {
                return Err(Error::InvalidProblem(format!(
                    "constraint {i} has no terms"
                )));
            }
            for (b, a) in &con.terms {
                if *b >= self.blocks.len() || a.dim() != self.blocks[*b] {
                    return Err(Error::InvalidProblem(format!(
                        "constraint {i} references block {b} with a {0}x{0} coefficient",
                        a.dim()
                    )));
                }
            }
        }
        Ok(())
    }

    /// `A(X)`.
    pub fn apply_a(&self, x: &[HermitianMatrix]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|c| c.terms.iter().map(|(b, a)| a.hs_inner(&x[*b])).sum())
            .collect()
    }

    /// `A*(y)` assembled per block.
    pub fn apply_at(&self, y: &[f64]) -> Vec<HermitianMatrix> {
        let mut out: Vec<HermitianMatrix> = self
            .blocks
            .iter()
            .map(|&d| HermitianMatrix::zeros(d))
            .collect();
        for (c, &yi) in self.constraints.iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            for (b, a) in &c.terms {
                out[*b] = out[*b].add(&a.scale(yi));
            }
        }
        out
    }

    pub fn objective_value(&self, x: &[HermitianMatrix]) -> f64 {
        self.objective
            .iter()
            .zip(x)
            .map(|(c, xb)| c.hs_inner(xb))
            .sum()
    }

    pub fn solve(&self, tol: f64, max_iter: usize) -> Result<ConicSolution> {
        self.solve_with(&SolveOptions {
            tol,
            max_iter,
            ..SolveOptions::default()
        })
    }

    pub fn solve_with(&self, opts: &SolveOptions) -> Result<ConicSolution> {
        self.validate(opts)?;
        let m = self.constraints.len();
        let nb = self.blocks.len();
        let rhs: Vec<f64> = self.constraints.iter().map(|c| c.rhs).collect();
        let c_norm: f64 = self
            .objective
            .iter()
            .map(|c| c.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt();

        // Gram matrix of the constraint map, factorized once.
        let mut per_block: Vec<Vec<(usize, &HermitianMatrix)>> = vec![Vec::new(); nb];
        for (i, c) in self.constraints.iter().enumerate() {
            for (b, a) in &c.terms {
                per_block[*b].push((i, a));
            }
        }
        let mut gram = vec![0.0; m * m];
        for terms in &per_block {
            for (pos, &(i, ai)) in terms.iter().enumerate() {
                for &(j, aj) in &terms[pos..] {
                    let v = ai.hs_inner(aj);
                    gram[i * m + j] += v;
                    if i != j {
                        gram[j * m + i] += v;
                    }
                }
            }
        }
        let chol = cholesky(&gram, m).ok_or_else(|| {
            Error::InvalidProblem(
                "constraint Gram matrix is not positive definite (dependent constraints)".into(),
            )
        })?;

        // Initial iterate: uniform PSD point unless warm-started.
        let mut x: Vec<HermitianMatrix> = match &opts.initial {
            Some(init) if init.primal.len() == nb => init
                .primal
                .iter()
                .map(crate::linalg::psd_project)
                .collect::<Result<Vec<_>>>()?,
            _ => self
                .blocks
                .iter()
                .map(|&d| HermitianMatrix::identity(d).scale(1.0 / nb as f64))
                .collect(),
        };
        let mut y: Vec<f64> = match &opts.initial {
            Some(init) if init.dual.len() == m => init.dual.clone(),
            _ => vec![0.0; m],
        };

        let mut mu: f64 = 1.0;
        let mut ax = self.apply_a(&x);
        let mut s: Vec<HermitianMatrix> = Vec::with_capacity(nb);
        {
            let aty = self.apply_at(&y);
            for b in 0..nb {
                s.push(psd_part(&self.objective[b].sub(&aty[b]))?);
            }
        }

        let mut best: Option<(f64, ConicSolution)> = None;
        let mut status = SolveStatus::MaxIterations;
        let mut iterations = opts.max_iter;
        let mut final_dual_residual = f64::NAN;

        for iter in 0..opts.max_iter {
            // y-update: (A A*) y = mu (b - A(X)) + A(C - S)
            let c_minus_s: Vec<HermitianMatrix> = self
                .objective
                .iter()
                .zip(&s)
                .map(|(c, sb)| c.sub(sb))
                .collect();
            let a_cs = self.apply_a(&c_minus_s);
            let mut lin = vec![0.0; m];
            for i in 0..m {
                lin[i] = mu * (rhs[i] - ax[i]) + a_cs[i];
            }
            chol_solve(&chol, m, &mut lin);
            y.copy_from_slice(&lin);

            // Cone step: V = C - A*(y) - mu X; S = P_psd(V); X <- (S - V)/mu
            let aty = self.apply_at(&y);
            let mut dual_res_sq = 0.0;
            for b in 0..nb {
                let v = self.objective[b].sub(&aty[b]).sub(&x[b].scale(mu));
                let sb = psd_part(&v)?;
                let xb = sb.sub(&v).scale(1.0 / mu);
                // C - A*y - S = mu (X_old - X_new), accumulated per block
                dual_res_sq += x[b].sub(&xb).frobenius_norm().powi(2);
                s[b] = sb;
                x[b] = xb;
            }
            let dual_residual = mu * dual_res_sq.sqrt() / (1.0 + c_norm);

            ax = self.apply_a(&x);
            let primal_residual = ax
                .iter()
                .zip(&rhs)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();

            let pobj = self.objective_value(&x);
            let dobj: f64 = y.iter().zip(&rhs).map(|(yi, bi)| yi * bi).sum();
            let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

            // Weak duality at the iterate, up to residual-sized slack
            // (iterates are only approximately feasible while converging).
            debug_assert!(
                pobj - dobj
                    >= -(opts.tol
                        + 1e-6
                        + 1e3
                            * (primal_residual + dual_residual)
                            * (1.0 + pobj.abs() + dobj.abs())),
                "weak duality violated at iteration {iter}: primal {pobj}, dual {dobj}"
            );

            let err = primal_residual.max(dual_residual).max(gap);
            if best.as_ref().is_none_or(|(e, _)| err < *e) {
                best = Some((
                    err,
                    ConicSolution {
                        primal: x.clone(),
                        dual: y.clone(),
                        value: pobj,
                        dual_value: dobj,
                        primal_residual,
                        dual_residual,
                        gap,
                        iterations: iter + 1,
                        status: SolveStatus::MaxIterations,
                    },
                ));
            }

            if primal_residual <= opts.tol && dual_residual <= opts.tol && gap <= opts.tol {
                status = SolveStatus::Optimal;
                iterations = iter + 1;
                final_dual_residual = dual_residual;
                break;
            }

            let x_scale: f64 = x.iter().map(|b| b.frobenius_norm()).sum();
            if !x_scale.is_finite() || x_scale > 1e12 {
                status = SolveStatus::InfeasibleSuspected;
                iterations = iter + 1;
                break;
            }

            // Penalty balancing, every 50 iterations.
            if iter % 50 == 49 {
                if primal_residual > 10.0 * dual_residual {
                    mu = (mu * 2.0).min(1e6);
                } else if dual_residual > 10.0 * primal_residual {
                    mu = (mu / 2.0).max(1e-6);
                }
            }
        }

        match status {
            SolveStatus::Optimal => {
                let pobj = self.objective_value(&x);
                let dobj: f64 = y.iter().zip(&rhs).map(|(yi, bi)| yi * bi).sum();
                let primal_residual = ax
                    .iter()
                    .zip(&rhs)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                Ok(ConicSolution {
                    primal: x,
                    dual: y,
                    value: pobj,
                    dual_value: dobj,
                    primal_residual,
                    dual_residual: final_dual_residual,
                    gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
                    iterations,
                    status,
                })
            }
            other => {
                let (_, mut sol) = best.ok_or_else(|| {
                    Error::Numerical("conic solve produced no iterate".into())
                })?;
                sol.status = other;
                sol.iterations = iterations;
                Ok(sol)
            }
        }
    }

    /// Writes the problem in the plain-text conic dump format (for
    /// cross-checking against external solvers): one block per section,
    /// row-major complex entries as "re im" pairs.
    pub fn write_text<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "CONIC 1")?;
        writeln!(w, "SENSE MIN")?;
        writeln!(w, "BLOCKS {}", self.blocks.len())?;
        for (b, (&d, c)) in self.blocks.iter().zip(&self.objective).enumerate() {
            writeln!(w, "BLOCK {b} DIM {d}")?;
            write_matrix(w, c)?;
        }
        writeln!(w, "CONSTRAINTS {}", self.constraints.len())?;
        for (i, con) in self.constraints.iter().enumerate() {
            writeln!(w, "CONSTRAINT {i} RHS {} TERMS {}", con.rhs, con.terms.len())?;
            for (b, a) in &con.terms {
                writeln!(w, "TERM BLOCK {b}")?;
                write_matrix(w, a)?;
            }
        }
        writeln!(w, "END")
    }
}

fn write_matrix<W: Write>(w: &mut W, m: &HermitianMatrix) -> std::io::Result<()> {
    let d = m.dim();
    for i in 0..d {
        let mut line = String::new();
        for j in 0..d {
            let e = m.get(i, j);
            if j > 0 {
                line.push(' ');
            }
            line.push_str(&format!("{} {}", e.re, e.im));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Positive part of a Hermitian matrix (projection onto the PSD cone),
/// with a closed form for dims 1 and 2.
fn psd_part(v: &HermitianMatrix) -> Result<HermitianMatrix> {
    match v.dim() {
        1 => {
            let a = v.get(0, 0).re;
            Ok(HermitianMatrix::diag(&[a.max(0.0)]))
        }
        2 => {
            let a = v.get(0, 0).re;
            let c = v.get(1, 1).re;
            let b = v.get(0, 1);
            let mean = 0.5 * (a + c);
            let r = (0.25 * (a - c) * (a - c) + b.norm_sqr()).sqrt();
            let lo = mean - r;
            let hi = mean + r;
            if lo >= 0.0 {
                return Ok(v.clone());
            }
            if hi <= 0.0 {
                return Ok(HermitianMatrix::zeros(2));
            }
            // rank-one positive part hi * |u><u|
            let cand1 = (b, C64::new(hi - a, 0.0));
            let cand2 = (C64::new(hi - c, 0.0), b.conj());
            let n1 = cand1.0.norm_sqr() + cand1.1.norm_sqr();
            let n2 = cand2.0.norm_sqr() + cand2.1.norm_sqr();
            let ((u0, u1), nsq) = if n1 >= n2 { (cand1, n1) } else { (cand2, n2) };
            if nsq <= 1e-300 {
                return Ok(HermitianMatrix::zeros(2));
            }
            let scale = hi / nsq;
            let p00 = scale * u0.norm_sqr();
            let p11 = scale * u1.norm_sqr();
            let p01 = u0 * u1.conj() * scale;
            Ok(HermitianMatrix::new(
                2,
                vec![C64::new(p00, 0.0), p01, p01.conj(), C64::new(p11, 0.0)],
            ))
        }
        _ => {
            let dec = eig(v)?;
            Ok(dec.rebuild(|l| l.max(0.0)))
        }
    }
}

/// Dense Cholesky factorization (lower triangular), row-major.
fn cholesky(a: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..=i {
            let mut sum = a[i * m + j];
            for k in 0..j {
                sum -= l[i * m + k] * l[j * m + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * m + i] = sum.sqrt();
            } else {
                l[i * m + j] = sum / l[j * m + j];
            }
        }
    }
    Some(l)
}

/// Solves `(L L^T) x = b` in place.
fn chol_solve(l: &[f64], m: usize, b: &mut [f64]) {
    for i in 0..m {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * m + k] * b[k];
        }
        b[i] = sum / l[i * m + i];
    }
    for i in (0..m).rev() {
        let mut sum = b[i];
        for k in (i + 1)..m {
            sum -= l[k * m + i] * b[k];
        }
        b[i] = sum / l[i * m + i];
    }
}

/// Independent recomputation of every certificate quantity for a solution.
#[derive(Debug, Clone)]
pub struct ConicCertificate {
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub min_primal_eigenvalue: f64,
    pub min_slack_eigenvalue: f64,
    pub violations: Vec<String>,
}

impl ConicCertificate {
    pub fn clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Recomputes residuals, gap, and cone memberships from scratch and lists
/// every tolerance the solution violates.
pub fn check_certificate(
    p: &ConicProblem,
    s: &ConicSolution,
    tol: f64,
) -> Result<ConicCertificate> {
    let rhs: Vec<f64> = p.constraints.iter().map(|c| c.rhs).collect();
    let ax = p.apply_a(&s.primal);
    let primal_residual = ax
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();

    let aty = p.apply_at(&s.dual);
    let mut min_primal = f64::INFINITY;
    let mut min_slack = f64::INFINITY;
    for (b, xb) in s.primal.iter().enumerate() {
        min_primal = min_primal.min(min_eigenvalue(xb)?);
        let slack = p.objective[b].sub(&aty[b]);
        min_slack = min_slack.min(min_eigenvalue(&slack)?);
    }
    let pobj = p.objective_value(&s.primal);
    let dobj: f64 = s.dual.iter().zip(&rhs).map(|(y, b)| y * b).sum();
    let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
    // Dual residual in this form measures how far the slack C - A*(y) is
    // from the PSD cone.
    let dual_residual = (-min_slack).max(0.0);

    let mut violations = Vec::new();
    if primal_residual > tol {
        violations.push(format!(
            "equality residual {primal_residual:.3e} exceeds {tol:.1e}"
        ));
    }
    if min_primal < -tol {
        violations.push(format!(
            "primal block has eigenvalue {min_primal:.3e} below -{tol:.1e}"
        ));
    }
    if min_slack < -tol {
        violations.push(format!(
            "dual slack has eigenvalue {min_slack:.3e} below -{tol:.1e}"
        ));
    }
    if gap > tol {
        violations.push(format!("duality gap {gap:.3e} exceeds {tol:.1e}"));
    }
    Ok(ConicCertificate {
        primal_residual,
        dual_residual,
        gap,
        min_primal_eigenvalue: min_primal,
        min_slack_eigenvalue: min_slack,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVector;

    /// min tr(X) s.t. tr(X) = 1 over 2x2 PSD.
    fn trace_one_problem() -> ConicProblem {
        ConicProblem {
            blocks: vec![2],
            objective: vec![HermitianMatrix::identity(2)],
            constraints: vec![Constraint {
                terms: vec![(0, HermitianMatrix::identity(2))],
                rhs: 1.0,
            }],
        }
    }

    #[test]
    fn minimize_trace_unit() {
        let sol = trace_one_problem().solve(1e-9, 50_000).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-7);
        assert!((sol.dual_value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn minimize_weighted_trace() {
        // min tr(diag(1,2) X) s.t. tr X = 1  ->  X = |0><0|, value 1
        let p = ConicProblem {
            blocks: vec![2],
            objective: vec![HermitianMatrix::diag(&[1.0, 2.0])],
            constraints: vec![Constraint {
                terms: vec![(0, HermitianMatrix::identity(2))],
                rhs: 1.0,
            }],
        };
        let sol = p.solve(1e-9, 100_000).unwrap().into_optimal().unwrap();
        assert!((sol.value - 1.0).abs() < 1e-7);
        assert!((sol.primal[0].get(0, 0).re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn two_block_assignment() {
        // min tr(C0 X0) + tr(C1 X1) s.t. X0 + X1 = I with C0 = diag(0, 1),
        // C1 = diag(1, 0): optimum picks the cheap subspace in each block.
        let c0 = HermitianMatrix::diag(&[0.0, 1.0]);
        let c1 = HermitianMatrix::diag(&[1.0, 0.0]);
        let mut constraints = Vec::new();
        // X0 + X1 = I entrywise over the Hermitian basis of dim 2
        for basis in crate::solver::hermitian_basis(2) {
            let rhs = basis.hs_inner(&HermitianMatrix::identity(2));
            constraints.push(Constraint {
                terms: vec![(0, basis.clone()), (1, basis)],
                rhs,
            });
        }
        let p = ConicProblem {
            blocks: vec![2, 2],
            objective: vec![c0, c1],
            constraints,
        };
        let sol = p.solve(1e-9, 100_000).unwrap().into_optimal().unwrap();
        assert!(sol.value.abs() < 1e-7);
        assert!((sol.primal[0].get(0, 0).re - 1.0).abs() < 1e-6);
        assert!((sol.primal[1].get(1, 1).re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn certificate_passes_and_detects_injection() {
        let p = trace_one_problem();
        let sol = p.solve(1e-9, 50_000).unwrap();
        let cert = check_certificate(&p, &sol, 1e-6).unwrap();
        assert!(cert.clean(), "violations: {:?}", cert.violations);

        // inject a negative eigenvalue (trace preserved)
        let mut bad = sol.clone();
        bad.primal[0] = HermitianMatrix::diag(&[1.0 + 1e-3, -1e-3]);
        let cert = check_certificate(&p, &bad, 1e-6).unwrap();
        assert!(cert
            .violations
            .iter()
            .any(|v| v.contains("primal block has eigenvalue")));

        // perturb the rhs
        let mut shifted = p.clone();
        shifted.constraints[0].rhs += 1e-2;
        let cert = check_certificate(&shifted, &sol, 1e-6).unwrap();
        assert!(cert
            .violations
            .iter()
            .any(|v| v.contains("equality residual")));
    }

    #[test]
    fn self_duality_smoke() {
        // Primal: min tr(X) s.t. tr(X) = 1 -> 1.
        // Hand-dualized: max y s.t. y <= 1, written as a conic problem over
        // blocks (S 2x2, u 1x1, v 1x1) with y = u - v and S = I - y I:
        // minimize (v - u) s.t. S + (u - v) I = I.
        let primal = trace_one_problem();
        let psol = primal.solve(1e-9, 50_000).unwrap();

        let mut constraints = Vec::new();
        for basis in crate::solver::hermitian_basis(2) {
            let rhs = basis.hs_inner(&HermitianMatrix::identity(2));
            let diag_weight = basis.trace();
            let mut terms = vec![(0, basis)];
            if diag_weight.abs() > 0.0 {
                terms.push((1, HermitianMatrix::diag(&[diag_weight])));
                terms.push((2, HermitianMatrix::diag(&[-diag_weight])));
            }
            constraints.push(Constraint { terms, rhs });
        }
        let dualized = ConicProblem {
            blocks: vec![2, 1, 1],
            objective: vec![
                HermitianMatrix::zeros(2),
                HermitianMatrix::diag(&[-1.0]),
                HermitianMatrix::diag(&[1.0]),
            ],
            constraints,
        };
        let dsol = dualized.solve(1e-9, 100_000).unwrap();
        assert_eq!(dsol.status, SolveStatus::Optimal);
        // dual optimum y* = 1 -> minimized objective v - u = -1
        assert!((psol.value - (-dsol.value)).abs() < 2e-7);
    }

    #[test]
    fn deterministic_iterates() {
        let p = ConicProblem {
            blocks: vec![2],
            objective: vec![HermitianMatrix::pure_state(&CVector::from_real(&[1.0, 2.0]))],
            constraints: vec![Constraint {
                terms: vec![(0, HermitianMatrix::identity(2))],
                rhs: 1.0,
            }],
        };
        let a = p.solve(1e-9, 20_000).unwrap();
        let b = p.solve(1e-9, 20_000).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn dump_format_is_stable() {
        let p = trace_one_problem();
        let mut buf = Vec::new();
        p.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("CONIC 1\nSENSE MIN\nBLOCKS 1\nBLOCK 0 DIM 2\n"));
        assert!(text.contains("CONSTRAINT 0 RHS 1 TERMS 1"));
        assert!(text.trim_end().ends_with("END"));
    }
}
