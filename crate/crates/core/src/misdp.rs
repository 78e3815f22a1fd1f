//! Mixed-integer SDP reformulation of the guesswork (formulation and
//! export only; no solving).
//!
//! For K = |X| the optimization over an M-outcome POVM `{F_j}` and one
//! guessing permutation per outcome can be written with binary permutation
//! matrices `P^(j)` and a big-M linearization: each product
//! `P^(j)[x][y] * F_j[l][k]` is replaced by a real scalar `y[x][y][l][k][j]`
//! tied down by four affine inequalities with bounds +-d_B/2 (valid because
//! every entry of a PSD matrix with trace at most d_B has modulus at most
//! d_B/2). With M >= d_B^2 outcomes the formulation attains the exact
//! guesswork; smaller M yields an upper bound.
//!
//! Hermitian matrix entries are flattened to real coordinates: the scalar
//! `F[j][l][k]` denotes `Re F_j[l][k]` when `l <= k` and `Im F_j[k][l]`
//! when `l > k`, which keeps one linearization variable per index tuple and
//! makes every coefficient in the document real.

use std::io::Write;

use crate::ensemble::{CostVector, CqEnsemble};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MisdpMode {
    /// M >= d_B^2: optimal value equals the guesswork.
    ExactValue,
    /// Fewer outcomes: optimal value is an upper bound.
    UpperBound,
}

impl MisdpMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            MisdpMode::ExactValue => "exact-value",
            MisdpMode::UpperBound => "upper-bound",
        }
    }
}

/// One term of the linear objective: `coeff * y[x][y][l][k][j]`.
#[derive(Debug, Clone, Copy)]
pub struct ObjectiveTerm {
    pub x: usize,
    pub y: usize,
    pub l: usize,
    pub k: usize,
    pub j: usize,
    pub coeff: f64,
}

/// Full variable/constraint description of the mixed-integer program.
#[derive(Debug, Clone)]
pub struct MisdpFormulation {
    pub letters: usize,
    pub dim: usize,
    pub outcomes: usize,
    pub mode: MisdpMode,
    pub psd_blocks: usize,
    pub binary_matrices: usize,
    pub binary_scalars: usize,
    pub linearization_scalars: usize,
    pub linearization_inequalities: usize,
    pub row_col_constraints: usize,
    pub completeness_constraints: usize,
    pub objective: Vec<ObjectiveTerm>,
}

/// Builds the mixed-integer reformulation for an M-outcome measurement.
/// Requires K = |X| (orders are then permutations and the tail outcome
/// never occurs).
pub fn export_misdp(ens: &CqEnsemble, cv: &CostVector, outcomes: usize) -> Result<MisdpFormulation> {
    let n = ens.len();
    let d = ens.dim();
    if cv.k() != n {
        return Err(Error::InvalidCostVector(format!(
            "mixed-integer reformulation needs K = |X| (got K = {}, |X| = {n})",
            cv.k()
        )));
    }
    if outcomes == 0 {
        return Err(Error::InvalidProblem("at least one POVM outcome".into()));
    }
    let mode = if outcomes >= d * d {
        MisdpMode::ExactValue
    } else {
        MisdpMode::UpperBound
    };

    // objective: sum over x, y, l, k, j of p(x) c_y rho^x_{coordinate} y-var,
    // with tr(F rho) expanded in real Hermitian coordinates:
    //   sum_l F_ll rho_ll + sum_{l<k} 2 [Re F_lk Re rho_lk + Im F_lk Im rho_lk]
    let mut objective = Vec::new();
    for x in 0..n {
        let rho = ens.state(x);
        let px = ens.prob(x);
        for y in 0..n {
            let cy = cv.cost_at(y + 1);
            for l in 0..d {
                for k in 0..d {
                    let rho_coord = if l == k {
                        rho.get(l, l).re
                    } else if l < k {
                        2.0 * rho.get(l, k).re
                    } else {
                        2.0 * rho.get(k, l).im
                    };
                    let coeff = px * cy * rho_coord;
                    for j in 0..outcomes {
                        objective.push(ObjectiveTerm {
                            x,
                            y,
                            l,
                            k,
                            j,
                            coeff,
                        });
                    }
                }
            }
        }
    }

    let tuples = n * n * d * d * outcomes;
    Ok(MisdpFormulation {
        letters: n,
        dim: d,
        outcomes,
        mode,
        psd_blocks: outcomes,
        binary_matrices: outcomes,
        binary_scalars: outcomes * n * n,
        linearization_scalars: tuples,
        linearization_inequalities: 4 * tuples,
        row_col_constraints: 2 * outcomes * n,
        completeness_constraints: d * d,
        objective,
    })
}

impl MisdpFormulation {
    /// Writes the line-oriented document (sections BLOCKS, BINARIES,
    /// LINEAR, OBJECTIVE) with deterministic ordering so files diff
    /// cleanly.
    pub fn write_text<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let d = self.dim;
        let half = d as f64 / 2.0;
        writeln!(w, "MISDP 1")?;
        writeln!(
            w,
            "META letters={} dim={} outcomes={} mode={}",
            self.letters,
            d,
            self.outcomes,
            self.mode.as_str()
        )?;
        writeln!(
            w,
            "# F[j][l][k] denotes Re F_j[l][k] for l<=k and Im F_j[k][l] for l>k"
        )?;
        writeln!(w, "# Y[x][y][l][k][j] linearizes P[j][x][y] * F[j][l][k]")?;

        writeln!(w, "BLOCKS {}", self.psd_blocks)?;
        for j in 0..self.outcomes {
            writeln!(w, "PSD F {j} DIM {d}")?;
        }

        writeln!(w, "BINARIES {}", self.binary_matrices)?;
        for j in 0..self.outcomes {
            writeln!(w, "PERM P {j} DIM {}", self.letters)?;
        }

        let linear_lines = self.row_col_constraints
            + self.completeness_constraints
            + self.linearization_inequalities;
        writeln!(w, "LINEAR {linear_lines}")?;
        for j in 0..self.outcomes {
            for x in 0..self.letters {
                writeln!(w, "ROWSUM {j} {x}")?;
            }
            for y in 0..self.letters {
                writeln!(w, "COLSUM {j} {y}")?;
            }
        }
        for l in 0..d {
            for k in 0..d {
                let rhs = if l == k { 1.0 } else { 0.0 };
                writeln!(w, "COMPLETE {l} {k} {rhs}")?;
            }
        }
        for x in 0..self.letters {
            for y in 0..self.letters {
                for l in 0..d {
                    for k in 0..d {
                        for j in 0..self.outcomes {
                            // Y + P d/2 >= 0 ; Y - P d/2 >= F - d/2
                            // Y - P d/2 <= 0 ; Y + P d/2 <= F + d/2
                            writeln!(w, "LIN1 {x} {y} {l} {k} {j} {half}")?;
                            writeln!(w, "LIN2 {x} {y} {l} {k} {j} {half}")?;
                            writeln!(w, "LIN3 {x} {y} {l} {k} {j} {half}")?;
                            writeln!(w, "LIN4 {x} {y} {l} {k} {j} {half}")?;
                        }
                    }
                }
            }
        }

        let nonzero = self.objective.iter().filter(|t| t.coeff != 0.0);
        writeln!(w, "OBJECTIVE {}", nonzero.clone().count())?;
        for t in nonzero {
            writeln!(w, "TERM {} {} {} {} {} {}", t.x, t.y, t.l, t.k, t.j, t.coeff)?;
        }
        writeln!(w, "END")
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("document is UTF-8")
    }
}
