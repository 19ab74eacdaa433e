use super::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Hermiticity tolerance for inputs, relative to the largest entry (with an
/// absolute floor of `1e-10`).
const HERMITIAN_TOL: f64 = 1e-10;

/// Eigendecomposition `A = V diag(values) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in increasing order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

/// Complex rotation `G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]` that
/// diagonalises the 2×2 Hermitian block `[[app, apq], [conj(apq), aqq]]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Rotation {
    pub c: f64,
    pub s: f64,
    pub phase: C64,
}

impl Rotation {
    pub(crate) fn for_block(app: f64, aqq: f64, apq: C64) -> Self {
        let mag = apq.norm();
        let phase = apq / mag;
        let tau = (aqq - app) / (2.0 * mag);
        let t = if tau >= 0.0 {
            1.0 / (tau + (1.0 + tau * tau).sqrt())
        } else {
            -1.0 / (-tau + (1.0 + tau * tau).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        Self { c, s: t * c, phase }
    }

    /// Replaces columns `p`, `q` of `m` by `m · G` restricted to them.
    pub(crate) fn apply_right(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        let conj_phase = self.phase.conj();
        for i in 0..m.rows() {
            let xp = m[(i, p)];
            let xq = m[(i, q)] * conj_phase;
            m[(i, p)] = xp * self.c - xq * self.s;
            m[(i, q)] = xp * self.s + xq * self.c;
        }
    }

    /// Replaces rows `p`, `q` of `m` by `G† · m` restricted to them.
    fn apply_left_adjoint(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for j in 0..m.cols() {
            let xp = m[(p, j)];
            let xq = m[(q, j)] * self.phase;
            m[(p, j)] = xp * self.c - xq * self.s;
            m[(q, j)] = xp * self.s + xq * self.c;
        }
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let residual = m.hermiticity_residual();
    let tol = HERMITIAN_TOL * m.max_abs().max(1.0);
    if residual > tol {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Runs at most `10 · dim` sweeps and fails with [`Error::NoConvergence`]
/// rather than returning a partially diagonalised result.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let n = m.rows();
    // symmetrise so the iteration works on an exactly Hermitian matrix
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(m[(i, i)].re, 0.0)
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }
    });
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if n <= 1 || scale == 0.0 {
        return Ok(finish(a, v));
    }
    let target = f64::EPSILON * scale;
    let max_sweeps = 10 * n;
    for _ in 0..max_sweeps {
        let off = off_diagonal_norm(&a);
        if off <= target {
            return Ok(finish(a, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let rot = Rotation::for_block(a[(p, p)].re, a[(q, q)].re, apq);
                rot.apply_right(&mut a, p, q);
                rot.apply_left_adjoint(&mut a, p, q);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                rot.apply_right(&mut v, p, q);
            }
        }
    }
    if off_diagonal_norm(&a) <= target {
        return Ok(finish(a, v));
    }
    Err(Error::NoConvergence {
        routine: "hermitian_eigen",
        sweeps: max_sweeps,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn finish(a: ComplexMatrix, v: ComplexMatrix) -> HermitianEigen {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue_hermitian(m: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eigen(m)?;
    eig.values
        .first()
        .copied()
        .ok_or_else(|| Error::Shape("empty matrix has no eigenvalues".into()))
}
