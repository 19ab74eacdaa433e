//! Dense complex linear algebra for the small matrices used throughout the
//! crate.
//!
//! Tensor products follow one fixed index convention: `E_ij ⊗ E_kl` sits at
//! row `i * m + k`, column `j * m + l` of an `nm × nm` matrix (0-based), which
//! is exactly what [`ComplexMatrix::kron`] produces.

mod eigen;
mod schmidt;
mod svd;

pub use eigen::{hermitian_eigen, min_eigenvalue_hermitian, HermitianEigen};
pub use schmidt::{reshape_vector, schmidt, SchmidtDecomposition, SCHMIDT_CUTOFF};
pub use svd::{svd, Svd};

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
///
/// Serializes as `{rows, cols, entries: [[re, im], ...]}`; deserialization
/// re-checks the length and finiteness of the entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    #[serde(rename = "entries")]
    data: Vec<C64>,
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl TryFrom<RawMatrix> for ComplexMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        Self::from_row_major(raw.rows, raw.cols, raw.entries)
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting bad lengths and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Column vector with the given entries.
    pub fn column(entries: &[C64]) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            data: entries.to_vec(),
        }
    }

    /// Matrix unit `E_ij` of size `rows × cols`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, values: &[C64]) {
        for (i, v) in values.iter().enumerate() {
            self[(i, j)] = *v;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} does not match {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Kronecker product: entry `(a * B.rows + c, b * B.cols + d)` is `A_ab * B_cd`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for a in 0..self.rows {
            for b in 0..self.cols {
                let s = self[(a, b)];
                if s == ZERO {
                    continue;
                }
                for c in 0..other.rows {
                    for d in 0..other.cols {
                        out[(a * other.rows + c, b * other.cols + d)] = s * other[(c, d)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute entry of `self - other`; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> Result<f64> {
        operator_norm(self)
    }

    /// Distance of `M†M` from the identity, measured entrywise.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let g = self.adjoint().matmul(self).expect("square");
        g.max_abs_diff(&Self::identity(self.rows))
    }

    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Reinterprets the data with a new shape of the same size.
    pub fn reshape(&self, rows: usize, cols: usize) -> Result<Self> {
        Self::from_row_major(rows, cols, self.data.clone())
    }

    /// Direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix shapes must agree")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product of two matrices.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Largest singular value of `m` (0 for an empty matrix).
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    let s = svd(m)?;
    Ok(s.singular_values[0])
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(svd(m)?.singular_values.iter().sum())
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨a, b⟩`, linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Extends the given orthonormal vectors to an orthonormal basis of `C^dim`
/// and returns the basis as the columns of a unitary matrix, with the input
/// vectors first.
pub fn complete_basis(vectors: &[Vec<C64>], dim: usize) -> Result<ComplexMatrix> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for v in vectors {
        if v.len() != dim {
            return Err(Error::Shape(format!(
                "basis vector of length {} in dimension {dim}",
                v.len()
            )));
        }
        basis.push(v.clone());
    }
    let mut candidate = 0;
    while basis.len() < dim && candidate < dim {
        let mut w = vec![ZERO; dim];
        w[candidate] = ONE;
        candidate += 1;
        // two passes of Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let c = inner(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let norm = vec_norm(&w);
        if norm > 1e-8 {
            basis.push(w.into_iter().map(|z| z / norm).collect());
        }
    }
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (j, b) in basis.iter().enumerate() {
        out.set_col(j, b);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_of_matrix_units() {
        let e12 = ComplexMatrix::unit(2, 2, 0, 1);
        let e21 = ComplexMatrix::unit(2, 2, 1, 0);
        let k = e12.kron(&e21);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i, j) == (1, 2) { ONE } else { ZERO };
                assert_eq!(k[(i, j)], expected);
            }
        }
    }

    #[test]
    fn rejects_wrong_length_and_nan() {
        assert!(ComplexMatrix::from_row_major(2, 2, vec![ONE; 3]).is_err());
        let bad = vec![c(1.0), c(f64::NAN), c(0.0), c(0.0)];
        assert!(matches!(
            ComplexMatrix::from_row_major(2, 2, bad),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn operator_norm_of_identity() {
        assert!((operator_norm(&ComplexMatrix::identity(4)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn completes_basis() {
        let s = 1.0 / 2f64.sqrt();
        let u = complete_basis(&[vec![c(s), c(s), ZERO]], 3).unwrap();
        assert!(u.unitarity_residual() < 1e-12);
        assert!((u[(0, 0)] - c(s)).norm() < 1e-15);
    }
}
