//! Complex Hermitian eigendecomposition via cyclic Jacobi, plus the
//! spectral operations built on it: PSD projection, square roots,
//! pseudo-inverses, the trace norm, and Uhlmann fidelity.
//!
//! The solver is fully deterministic for a given input (fixed cyclic pivot
//! order, no randomness), which keeps every numeric baseline in the test
//! suite reproducible.

use super::hermitian::HermitianMatrix;
use super::matrix::{C64, CMatrix};
use crate::error::{Error, Result};

/// Relative PSD tolerance: eigenvalues above `-PSD_TOL * scale` count as
/// nonnegative and are clipped to zero where a PSD result is required.
pub const PSD_TOL: f64 = 1e-10;

/// Inputs with eigenvalues below `-NOT_PSD_TOL * scale` are rejected by the
/// operations that require a PSD argument.
pub const NOT_PSD_TOL: f64 = 1e-8;

/// Default pseudo-inverse cutoff, relative to the largest eigenvalue.
pub const PINV_CUTOFF: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Result of [`eig`]: eigenvalues in nonincreasing order and matching
/// orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    /// Rebuilds `U diag(f(lambda)) U^dagger`.
    pub fn rebuild(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let d = self.eigenvalues.len();
        let u = &self.eigenvectors;
        let mut out = CMatrix::zeros(d);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..d {
                let ui = u.get(i, k) * w;
                for j in 0..d {
                    let v = out.get(i, j) + ui * u.get(j, k).conj();
                    out.set(i, j, v);
                }
            }
        }
        HermitianMatrix::from_cmatrix(&out)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("empty decomposition")
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.first().expect("empty decomposition")
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn eig(m: &HermitianMatrix) -> Result<EigenDecomposition> {
    let d = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut v = CMatrix::identity(d).as_slice().to_vec();
    let values = jacobi(&mut a, Some(&mut v), d)?;

    // Sort nonincreasing; ties keep the lower original position first.
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap().then(i.cmp(&j)));

    let eigenvalues: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
    let mut cols = CMatrix::zeros(d);
    for (new, &old) in idx.iter().enumerate() {
        for r in 0..d {
            cols.set(r, new, v[r * d + old]);
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: cols,
    })
}

/// Eigenvalues only (unsorted work skipped; result nonincreasing).
pub fn eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>> {
    let d = m.dim();
    if d == 1 {
        return Ok(vec![m.get(0, 0).re]);
    }
    if d == 2 {
        let (lo, hi) = eig2_values(m);
        return Ok(vec![hi, lo]);
    }
    let mut a = m.as_slice().to_vec();
    let mut values = jacobi(&mut a, None, d)?;
    values.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(values)
}

/// Smallest eigenvalue; closed form for dim <= 2, values-only Jacobi above.
pub fn min_eigenvalue(m: &HermitianMatrix) -> Result<f64> {
    match m.dim() {
        1 => Ok(m.get(0, 0).re),
        2 => Ok(eig2_values(m).0),
        _ => Ok(*eigenvalues(m)?
            .last()
            .expect("eigenvalues of empty matrix")),
    }
}

#[inline]
fn eig2_values(m: &HermitianMatrix) -> (f64, f64) {
    let a = m.get(0, 0).re;
    let c = m.get(1, 1).re;
    let b2 = m.get(0, 1).norm_sqr();
    let mean = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b2).sqrt();
    (mean - r, mean + r)
}

/// Cyclic Jacobi on a row-major Hermitian matrix. `v`, when present,
/// accumulates the eigenvector columns.
fn jacobi(a: &mut [C64], mut v: Option<&mut Vec<C64>>, d: usize) -> Result<Vec<f64>> {
    if d == 0 {
        return Ok(Vec::new());
    }
    let scale = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let tol = 1e-14 * (1.0 + scale);

    let off = |a: &[C64]| -> f64 {
        let mut s = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                s += a[p * d + q].norm_sqr();
            }
        }
        s.sqrt()
    };

    let mut residual = off(a);
    let mut sweeps = 0;
    while residual > tol {
        if sweeps >= MAX_SWEEPS {
            return Err(Error::EigenFailure {
                sweeps,
                residual,
            });
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let beta = a[p * d + q];
                let beta_abs = beta.norm();
                if beta_abs <= 1e-300 {
                    continue;
                }
                let phase = beta / beta_abs;
                let alpha = a[p * d + p].re;
                let gamma = a[q * d + q].re;
                // tan(2 theta) = 2|beta| / (alpha - gamma), smaller rotation.
                let tau = (alpha - gamma) / (2.0 * beta_abs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // A <- U^dagger A U with U[p,p]=c, U[p,q]=-phase*s,
                // U[q,p]=conj(phase)*s, U[q,q]=c.
                let app = alpha * c * c + 2.0 * beta_abs * s * c + gamma * s * s;
                let aqq = alpha * s * s - 2.0 * beta_abs * s * c + gamma * c * c;
                a[p * d + p] = C64::new(app, 0.0);
                a[q * d + q] = C64::new(aqq, 0.0);
                a[p * d + q] = C64::new(0.0, 0.0);
                a[q * d + p] = C64::new(0.0, 0.0);
                for k in 0..d {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    let new_kp = akp * c + akq * phase.conj() * s;
                    let new_kq = -akp * phase * s + akq * c;
                    a[k * d + p] = new_kp;
                    a[p * d + k] = new_kp.conj();
                    a[k * d + q] = new_kq;
                    a[q * d + k] = new_kq.conj();
                }
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..d {
                        let vkp = v[k * d + p];
                        let vkq = v[k * d + q];
                        v[k * d + p] = vkp * c + vkq * phase.conj() * s;
                        v[k * d + q] = -vkp * phase * s + vkq * c;
                    }
                }
            }
        }
        sweeps += 1;
        residual = off(a);
    }
    Ok((0..d).map(|i| a[i * d + i].re).collect())
}

/// Frobenius-nearest PSD matrix: negative eigenvalues clipped to zero.
pub fn psd_project(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let dec = eig(m)?;
    Ok(dec.rebuild(|l| l.max(0.0)))
}

/// PSD square root. Fails if the input has an eigenvalue below
/// `-NOT_PSD_TOL * scale`; mildly negative eigenvalues are clipped.
pub fn sqrt_psd(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let dec = eig(m)?;
    let scale = dec.max_eigenvalue().abs().max(1.0);
    let min = dec.min_eigenvalue();
    if min < -NOT_PSD_TOL * scale {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(dec.rebuild(|l| l.max(0.0).sqrt()))
}

/// Moore-Penrose pseudo-inverse of a PSD matrix: eigenvalues at or above
/// `cutoff` are inverted, the rest zeroed.
pub fn pinv_psd(m: &HermitianMatrix, cutoff: f64) -> Result<HermitianMatrix> {
    let dec = eig(m)?;
    Ok(dec.rebuild(|l| if l >= cutoff && l > 0.0 { 1.0 / l } else { 0.0 }))
}

/// PSD pseudo square-root inverse on the support: `m^{-1/2}` restricted to
/// eigenvalues at or above `cutoff`.
pub fn pinv_sqrt_psd(m: &HermitianMatrix, cutoff: f64) -> Result<HermitianMatrix> {
    let dec = eig(m)?;
    Ok(dec.rebuild(|l| if l >= cutoff && l > 0.0 { 1.0 / l.sqrt() } else { 0.0 }))
}

/// Trace norm: sum of absolute eigenvalues.
pub fn trace_norm(m: &HermitianMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|l| l.abs()).sum())
}

/// Uhlmann fidelity `F(rho, sigma) = tr |sqrt(rho) sqrt(sigma)|`.
///
/// Both arguments must be PSD with trace at most `1 + 1e-8` (subnormalized
/// states allowed).
pub fn fidelity(rho: &HermitianMatrix, sigma: &HermitianMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity arguments have dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    for m in [rho, sigma] {
        if m.trace() > 1.0 + 1e-8 {
            return Err(Error::Numerical(format!(
                "fidelity argument has trace {:.6} > 1",
                m.trace()
            )));
        }
    }
    let root = sqrt_psd(rho)?;
    // tr|sqrt(rho) sqrt(sigma)| = sum_i sqrt(lambda_i(sqrt(rho) sigma sqrt(rho)))
    let inner = sigma.conj_by(&root.to_cmatrix());
    let sig_scale = sigma.frobenius_norm().max(1.0);
    let vals = eigenvalues(&inner)?;
    if let Some(&min) = vals.last() {
        if min < -NOT_PSD_TOL * sig_scale {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
    }
    Ok(vals.iter().map(|l| l.max(0.0).sqrt()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::CVector;

    fn plus_projector() -> HermitianMatrix {
        HermitianMatrix::pure_state(&CVector::from_real(&[1.0, 1.0]))
    }

    #[test]
    fn diagonal_input() {
        let dec = eig(&HermitianMatrix::diag(&[2.0, 1.0])).unwrap();
        assert_eq!(dec.eigenvalues, vec![2.0, 1.0]);
        assert!((dec.eigenvectors.get(0, 0).norm() - 1.0).abs() < 1e-12);
        assert!((dec.eigenvectors.get(1, 1).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_spectrum() {
        let dec = eig(&HermitianMatrix::identity(3)).unwrap();
        for l in dec.eigenvalues {
            assert!((l - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rank_one_projector() {
        let dec = eig(&plus_projector()).unwrap();
        assert!((dec.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!(dec.eigenvalues[1].abs() < 1e-12);
        let v0 = dec.eigenvectors.get(0, 0);
        let v1 = dec.eigenvectors.get(1, 0);
        // eigenvector (1,1)/sqrt(2) up to phase
        assert!((v0.norm() - 1.0 / 2f64.sqrt()).abs() < 1e-10);
        assert!((v0 - v1).norm() < 1e-10);
    }

    #[test]
    fn psd_project_clips() {
        let p = psd_project(&HermitianMatrix::diag(&[1.0, -1.0])).unwrap();
        assert!(p.sub(&HermitianMatrix::diag(&[1.0, 0.0])).frobenius_norm() < 1e-12);
        let z = psd_project(&HermitianMatrix::identity(2).scale(-1.0)).unwrap();
        assert!(z.frobenius_norm() < 1e-12);
        // fixed point on PSD input
        let fixed = psd_project(&plus_projector()).unwrap();
        assert!(fixed.sub(&plus_projector()).frobenius_norm() < 1e-10);
    }

    #[test]
    fn sqrt_psd_examples() {
        let r = sqrt_psd(&HermitianMatrix::diag(&[4.0, 9.0])).unwrap();
        assert!(r.sub(&HermitianMatrix::diag(&[2.0, 3.0])).frobenius_norm() < 1e-12);
        let id = sqrt_psd(&HermitianMatrix::identity(3)).unwrap();
        assert!(id.sub(&HermitianMatrix::identity(3)).frobenius_norm() < 1e-12);
        let p = plus_projector();
        assert!(sqrt_psd(&p).unwrap().sub(&p).frobenius_norm() < 1e-9);
        assert!(sqrt_psd(&HermitianMatrix::diag(&[1.0, -0.5])).is_err());
    }

    #[test]
    fn pinv_psd_examples() {
        let p = pinv_psd(&HermitianMatrix::diag(&[2.0, 0.0]), 1e-10).unwrap();
        assert!(p.sub(&HermitianMatrix::diag(&[0.5, 0.0])).frobenius_norm() < 1e-12);
        let id = pinv_psd(&HermitianMatrix::identity(2), 1e-10).unwrap();
        assert!(id.sub(&HermitianMatrix::identity(2)).frobenius_norm() < 1e-12);
        let below = pinv_psd(&HermitianMatrix::diag(&[1e-14, 1.0]), 1e-10).unwrap();
        assert!(below.sub(&HermitianMatrix::diag(&[0.0, 1.0])).frobenius_norm() < 1e-12);
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&HermitianMatrix::diag(&[1.0, -1.0])).unwrap() - 2.0).abs() < 1e-12);
        let zero = trace_norm(&HermitianMatrix::zeros(3)).unwrap();
        assert!(zero.abs() < 1e-14);
        // orthogonal pure qubit states
        let d = HermitianMatrix::diag(&[1.0, 0.0]).sub(&HermitianMatrix::diag(&[0.0, 1.0]));
        assert!((trace_norm(&d).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let rho = plus_projector();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
        let zero = HermitianMatrix::diag(&[1.0, 0.0]);
        let one = HermitianMatrix::diag(&[0.0, 1.0]);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-10);
        assert!((fidelity(&zero, &rho).unwrap() - 1.0 / 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn min_eigenvalue_matches_full_solve() {
        let m = HermitianMatrix::new(
            3,
            vec![
                C64::new(1.0, 0.0),
                C64::new(0.2, 0.3),
                C64::new(0.0, -0.1),
                C64::new(0.2, -0.3),
                C64::new(-0.5, 0.0),
                C64::new(0.4, 0.0),
                C64::new(0.0, 0.1),
                C64::new(0.4, 0.0),
                C64::new(2.0, 0.0),
            ],
        );
        let full = eig(&m).unwrap();
        let fast = min_eigenvalue(&m).unwrap();
        assert!((full.min_eigenvalue() - fast).abs() < 1e-12);
    }
}
