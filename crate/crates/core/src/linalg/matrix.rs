//! Dense complex vectors and square matrices.
//!
//! These are the raw containers beneath [`super::HermitianMatrix`]; general
//! (non-Hermitian) matrices show up as measurement operators and as
//! eigenvector frames. Dimensions in this crate stay tiny (<= ~16), so
//! everything is a plain row-major `Vec` with no blocking or sparsity.

use num_complex::Complex;

/// Complex double-precision scalar used throughout the crate.
pub type C64 = Complex<f64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    data: Vec<C64>,
}

impl CVector {
    pub fn new(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![ZERO; dim],
        }
    }

    /// Computational basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut data = vec![ZERO; dim];
        data[index] = ONE;
        Self { data }
    }

    /// Vector with the given real amplitudes.
    pub fn from_real(amps: &[f64]) -> Self {
        Self {
            data: amps.iter().map(|&a| C64::new(a, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 1e-300, "cannot normalize the zero vector");
        Self {
            data: self.data.iter().map(|c| c / n).collect(),
        }
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &CVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Outer product `|self><self|`.
    pub fn outer(&self) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, self.data[i] * self.data[j].conj());
            }
        }
        m
    }

    /// Tensor product `|self> (x) |other>`.
    pub fn kron(&self, other: &CVector) -> CVector {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Self { data }
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "data length must be dim^2");
        Self { dim, data }
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
            m.set(i, i, ONE);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim, "matrix add dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim, "matrix sub dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        self.scale_c(C64::new(s, 0.0))
    }

    pub fn scale_c(&self, s: C64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let d = self.dim;
        let mut m = CMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.set(j, i, self.get(i, j).conj());
            }
        }
        m
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let d = self.dim;
        let mut out = CMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Applies the matrix to a vector.
    pub fn apply(&self, v: &CVector) -> CVector {
        assert_eq!(self.dim, v.dim(), "apply dimension mismatch");
        let d = self.dim;
        let mut out = vec![ZERO; d];
        for i in 0..d {
            let mut acc = ZERO;
            for j in 0..d {
                acc += self.get(i, j) * v.as_slice()[j];
            }
            out[i] = acc;
        }
        CVector::new(out)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Kronecker (tensor) product.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let da = self.dim;
        let db = other.dim;
        let d = da * db;
        let mut out = CMatrix::zeros(d);
        for i in 0..da {
            for j in 0..da {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        out.set(i * db + k, j * db + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in i..self.dim {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_and_outer() {
        let plus = CVector::from_real(&[1.0, 1.0]).normalized();
        let zero = CVector::basis(2, 0);
        assert!((plus.inner(&zero).norm() - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        let proj = plus.outer();
        assert!((proj.trace().re - 1.0).abs() < 1e-12);
        assert!(proj.is_hermitian(1e-15));
    }

    #[test]
    fn matmul_identity() {
        let id = CMatrix::identity(3);
        let mut a = CMatrix::zeros(3);
        a.set(0, 1, C64::new(2.0, -1.0));
        a.set(2, 0, C64::new(0.0, 3.0));
        assert_eq!(id.matmul(&a), a);
        assert_eq!(a.matmul(&id), a);
    }

    #[test]
    fn kron_dims_and_trace() {
        let a = CMatrix::identity(2).scale(2.0);
        let b = CMatrix::identity(3);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 6);
        assert!((k.trace().re - 12.0).abs() < 1e-12);
    }

    #[test]
    fn adjoint_is_involution() {
        let mut a = CMatrix::zeros(2);
        a.set(0, 1, C64::new(1.0, 2.0));
        a.set(1, 0, C64::new(-3.0, 0.5));
        assert_eq!(a.adjoint().adjoint(), a);
    }
}
