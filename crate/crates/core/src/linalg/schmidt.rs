use serde::{Deserialize, Serialize};

use super::{kron_vec, svd, vec_norm, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Singular values at or below this are treated as zero when counting
/// Schmidt rank.
pub const SCHMIDT_CUTOFF: f64 = 1e-12;

/// `α = Σ_t d_t · left_t ⊗ right_t` with orthonormal families and
/// decreasing positive coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtDecomposition {
    pub n: usize,
    pub m: usize,
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<Vec<C64>>,
    pub right_vectors: Vec<Vec<C64>>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// `Σ_t d_t`, the projective (trace) norm of the decomposed vector.
    pub fn coefficient_sum(&self) -> f64 {
        self.coefficients.iter().sum()
    }

    pub fn reconstruct(&self) -> Vec<C64> {
        let mut out = vec![ZERO; self.n * self.m];
        for ((d, u), v) in self
            .coefficients
            .iter()
            .zip(&self.left_vectors)
            .zip(&self.right_vectors)
        {
            for (o, x) in out.iter_mut().zip(kron_vec(u, v)) {
                *o += x * d;
            }
        }
        out
    }
}

/// The `n × m` matrix `T_α` with `T[i][j] = α_{ij}` for `α ∈ C^n ⊗ C^m`.
pub fn reshape_vector(alpha: &[C64], n: usize, m: usize) -> Result<ComplexMatrix> {
    if alpha.len() != n * m {
        return Err(Error::Shape(format!(
            "vector of length {} is not in C^{n} ⊗ C^{m}",
            alpha.len()
        )));
    }
    ComplexMatrix::from_row_major(n, m, alpha.to_vec())
}

/// Schmidt decomposition of `α ∈ C^n ⊗ C^m` read from the SVD of `T_α`.
pub fn schmidt(alpha: &[C64], n: usize, m: usize) -> Result<SchmidtDecomposition> {
    let t = reshape_vector(alpha, n, m)?;
    if vec_norm(alpha) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let s = svd(&t)?;
    let mut out = SchmidtDecomposition {
        n,
        m,
        coefficients: Vec::new(),
        left_vectors: Vec::new(),
        right_vectors: Vec::new(),
    };
    for (k, &d) in s.singular_values.iter().enumerate() {
        if d <= SCHMIDT_CUTOFF {
            break;
        }
        out.coefficients.push(d);
        out.left_vectors.push(s.u.col(k));
        // T = Σ d u v†, so the right factor of α is conj(v)
        out.right_vectors
            .push(s.v.col(k).iter().map(|z| z.conj()).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_tensor_has_rank_one() {
        // e_1 ⊗ e_2 in C^2 ⊗ C^2
        let alpha = vec![ZERO, C64::new(1.0, 0.0), ZERO, ZERO];
        let s = schmidt(&alpha, 2, 2).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.coefficients[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_entangled_pair() {
        let h = 1.0 / 2f64.sqrt();
        let alpha = vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        let s = schmidt(&alpha, 2, 2).unwrap();
        assert_eq!(s.rank(), 2);
        for d in &s.coefficients {
            assert!((d - h).abs() < 1e-15);
        }
        let back = s.reconstruct();
        for (a, b) in back.iter().zip(&alpha) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(schmidt(&[ZERO; 6], 2, 3), Err(Error::ZeroVector)));
    }
}
