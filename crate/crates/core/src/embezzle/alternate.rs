//! A second embezzlement correlation for targets that are not maximally
//! entangled.
//!
//! With Schmidt rank `p < min(n, m)`, embezzle `β = Σ d_i e_i ⊗ e_i` with a
//! `p × p` protocol, pad both block unitaries with identity, average out the
//! marginals, and rotate `e_i ⊗ e_i` onto the Schmidt pairs `u_i ⊗ v_i`.

use super::{build_protocol, closed_form_correlation, limit_correlation, TargetVector};
use crate::correlation::{phase_twirl, ClaimedClass, CorrelationMatrix, Generator};
use crate::error::{Error, Result};
use crate::linalg::{complete_basis, ComplexMatrix, C64, ZERO};

const TWIRL_ROOTS: u32 = 4;

fn compressed_target(alpha: &TargetVector) -> Result<TargetVector> {
    if alpha.is_maximally_entangled() {
        return Err(Error::MaximallyEntangled);
    }
    let s = alpha.schmidt();
    let p = s.rank();
    let mut beta = vec![ZERO; p * p];
    for (i, d) in s.coefficients.iter().enumerate() {
        beta[i * p + i] = C64::new(*d, 0.0);
    }
    // Schmidt coefficients of a unit vector square-sum to 1 up to rounding
    let norm = crate::linalg::vec_norm(&beta);
    beta.iter_mut().for_each(|b| *b /= norm);
    TargetVector::with_any_dims(beta, p, p)
}

/// `(A ⊗ B)(Y ⊕ I)` where `Y` is `p × p` block data read through `y`.
fn assemble(
    alpha: &TargetVector,
    p: usize,
    y: impl Fn(usize, usize, usize, usize) -> C64,
) -> Result<CorrelationMatrix> {
    let (n, m) = (alpha.n(), alpha.m());
    let inner = ComplexMatrix::from_fn(n * m, n * m, |row, col| {
        let (i, k) = (row / m, row % m);
        let (j, l) = (col / m, col % m);
        if i < p && j < p && k < p && l < p {
            y(i, j, k, l)
        } else if i == j && k == l && i >= p && k >= p {
            C64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });
    let s = alpha.schmidt();
    let a = complete_basis(&s.left_vectors, n)?;
    let b = complete_basis(&s.right_vectors, m)?;
    let matrix = a.kron(&b).matmul(&inner)?;
    CorrelationMatrix::new(n, m, matrix, ClaimedClass::QaApprox)
}

/// The alternate correlation at protocol length `r`.
pub fn alternate_correlation(alpha: &TargetVector, r: usize) -> Result<CorrelationMatrix> {
    let beta = compressed_target(alpha)?;
    let p = beta.n();
    let proto = build_protocol(&beta, r)?;
    let full = phase_twirl(&closed_form_correlation(&proto), TWIRL_ROOTS)?;
    assemble(alpha, p, |i, j, k, l| {
        full.get(Generator::U(i, j), Generator::U(k, l))
    })
}

/// The `r → ∞` limit of [`alternate_correlation`].
pub fn alternate_limit(alpha: &TargetVector) -> Result<CorrelationMatrix> {
    let beta = compressed_target(alpha)?;
    let p = beta.n();
    let y = limit_correlation(&beta);
    assemble(alpha, p, |i, j, k, l| y.matrix[(i * p + k, j * p + l)])
}
