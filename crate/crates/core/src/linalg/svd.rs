use super::eigen::Rotation;
use super::{complete_basis, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Thin singular value decomposition `M = U · diag(S) · V†`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows × k` with orthonormal columns, `k = min(rows, cols)`.
    pub u: ComplexMatrix,
    /// Non-negative, decreasing.
    pub singular_values: Vec<f64>,
    /// `cols × k` with orthonormal columns.
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        ComplexMatrix::from_fn(self.u.rows(), self.v.rows(), |i, j| {
            (0..k)
                .map(|t| self.u[(i, t)] * self.singular_values[t] * self.v[(j, t)].conj())
                .sum()
        })
    }

    pub fn rank(&self, cutoff: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > cutoff).count()
    }
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
///
/// Each rotation is a Jacobi step on the Gram matrix `M†M`, applied
/// implicitly to the columns of `M`, so the small singular values keep full
/// relative accuracy. At most `10 · cols` sweeps are attempted before
/// [`Error::NoConvergence`] is returned.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if m.rows() < m.cols() {
        let t = svd_tall(&m.adjoint())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    svd_tall(m)
}

fn svd_tall(m: &ComplexMatrix) -> Result<Svd> {
    let rows = m.rows();
    let cols = m.cols();
    let mut g = m.clone();
    let mut v = ComplexMatrix::identity(cols);
    let max_sweeps = (10 * cols).max(10);
    let mut converged = cols <= 1;
    // pairs below this coupling are rounding noise and never settle
    let noise = (f64::EPSILON * m.frobenius_norm()).powi(2);
    let tol = rows.max(2) as f64 * f64::EPSILON;
    for _ in 0..max_sweeps {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..cols.saturating_sub(1) {
            for q in p + 1..cols {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for i in 0..rows {
                    let gp = g[(i, p)];
                    let gq = g[(i, q)];
                    alpha += gp.norm_sqr();
                    beta += gq.norm_sqr();
                    gamma += gp.conj() * gq;
                }
                let mag = gamma.norm();
                if mag <= noise || mag <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = Rotation::for_block(alpha, beta, gamma);
                rot.apply_right(&mut g, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "svd",
            sweeps: max_sweeps,
        });
    }

    let norms: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|i| g[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let largest = norms.iter().copied().fold(0.0, f64::max);
    let floor = largest * f64::EPSILON * (rows.max(cols) as f64);
    let mut singular_values = Vec::with_capacity(cols);
    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for &j in &order {
        let s = norms[j];
        if s > floor && s > 0.0 {
            u_cols.push((0..rows).map(|i| g[(i, j)] / s).collect());
        }
        singular_values.push(s);
    }
    // Columns for (numerically) zero singular values come from completing
    // the basis; their contribution to the product is below `floor`.
    let full = complete_basis(&u_cols, rows)?;
    let u = ComplexMatrix::from_fn(rows, cols, |i, j| full[(i, j)]);
    let v_sorted = ComplexMatrix::from_fn(cols, cols, |i, j| v[(i, order[j])]);
    Ok(Svd {
        u,
        singular_values,
        v: v_sorted,
    })
}
