//! Hermitian matrices with symmetrization enforced at construction.
//!
//! Every constructor stores `(A + A^dagger)/2`, so downstream code (the
//! eigensolver in particular) can rely on exact Hermiticity: diagonal
//! entries have zero imaginary part and `a[j][i] == conj(a[i][j])` holds
//! bit-for-bit.

use super::matrix::{C64, CMatrix, CVector, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl HermitianMatrix {
    /// Builds from row-major entries, symmetrizing as `(A + A^dagger)/2`.
    pub fn new(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "data length must be dim^2");
        let mut m = Self { dim, data };
        m.symmetrize();
        m
    }

    pub fn from_cmatrix(m: &CMatrix) -> Self {
        Self::new(m.dim(), m.as_slice().to_vec())
    }

    fn symmetrize(&mut self) {
        let d = self.dim;
        for i in 0..d {
            let v = self.data[i * d + i];
            self.data[i * d + i] = C64::new(v.re, 0.0);
            for j in (i + 1)..d {
                let a = self.data[i * d + j];
                let b = self.data[j * d + i];
                let s = (a + b.conj()) * 0.5;
                self.data[i * d + j] = s;
                self.data[j * d + i] = s.conj();
            }
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let d = values.len();
        let mut m = Self::zeros(d);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * d + i] = C64::new(v, 0.0);
        }
        m
    }

    /// Projector `|v><v|` onto a (normalized) pure state.
    pub fn pure_state(v: &CVector) -> Self {
        Self::from_cmatrix(&v.normalized().outer())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::new(self.dim, self.data.clone())
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.dim, other.dim, "add dimension mismatch");
        HermitianMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.dim, other.dim, "sub dimension mismatch");
        HermitianMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> HermitianMatrix {
        HermitianMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Real Hilbert-Schmidt inner product `tr(A B)`.
    pub fn hs_inner(&self, other: &HermitianMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "hs_inner dimension mismatch");
        // tr(AB) = sum_ij A_ij conj(B_ij) for Hermitian A, B; real by symmetry.
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// Conjugation `M A M^dagger`, re-symmetrized.
    pub fn conj_by(&self, m: &CMatrix) -> HermitianMatrix {
        let prod = m.matmul(&self.to_cmatrix()).matmul(&m.adjoint());
        HermitianMatrix::from_cmatrix(&prod)
    }

    pub fn kron(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix::from_cmatrix(&self.to_cmatrix().kron(&other.to_cmatrix()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_symmetrizes() {
        let a = HermitianMatrix::new(
            2,
            vec![
                C64::new(1.0, 0.5),
                C64::new(2.0, 1.0),
                C64::new(2.0, 3.0),
                C64::new(4.0, 0.0),
            ],
        );
        assert_eq!(a.get(0, 0), C64::new(1.0, 0.0));
        assert_eq!(a.get(0, 1), C64::new(2.0, -1.0));
        assert_eq!(a.get(1, 0), C64::new(2.0, 1.0));
    }

    #[test]
    fn hs_inner_matches_trace_of_product() {
        let a = HermitianMatrix::diag(&[1.0, -2.0, 0.5]);
        let b = HermitianMatrix::diag(&[3.0, 1.0, 4.0]);
        assert!((a.hs_inner(&b) - (3.0 - 2.0 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn pure_state_projector() {
        let plus = CVector::from_real(&[1.0, 1.0]);
        let p = HermitianMatrix::pure_state(&plus);
        assert!((p.trace() - 1.0).abs() < 1e-12);
        assert!((p.get(0, 1).re - 0.5).abs() < 1e-12);
    }
}
