use serde::{Deserialize, Serialize};

use super::{
    aligned_form, check_square, injective_norm, InjectiveOptions, LowerWitness, NormBound,
    NormKind, UpperWitness,
};
use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::linalg::{
    operator_norm, reshape_vector, schmidt, svd, vec_norm, ComplexMatrix, SchmidtDecomposition,
    C64, ONE, ZERO,
};

/// Slack on `π(α) = 1` when deciding local membership.
pub const LOC_TOL: f64 = 1e-9;
/// Entries off the first column must be below this for the pattern to apply.
pub const PATTERN_TOL: f64 = 1e-10;
/// Unit-norm slack for the first column in [`loc_membership`].
pub const COLUMN_NORM_TOL: f64 = 1e-9;

/// Exact projective norm of a vector: the trace norm of its `n × m`
/// reshape, certified on both sides.
pub fn pi_norm_vector(alpha: &[C64], n: usize, m: usize) -> Result<NormBound> {
    let t = reshape_vector(alpha, n, m)?;
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let empty = SchmidtDecomposition {
        n,
        m,
        coefficients: Vec::new(),
        left_vectors: Vec::new(),
        right_vectors: Vec::new(),
    };
    if vec_norm(alpha) == 0.0 {
        return Ok(NormBound {
            kind: NormKind::PiVector,
            lower: 0.0,
            upper: 0.0,
            lower_witness: LowerWitness::BilinearForm {
                w: ComplexMatrix::zeros(n, m),
            },
            upper_witness: UpperWitness::Schmidt(empty),
        });
    }
    let decomposition = schmidt(alpha, n, m)?;
    let w = aligned_form(&t)?;
    let witness = LowerWitness::BilinearForm { w };
    let lower = witness.evaluate_vector(alpha, n, m)?;
    let upper = decomposition.coefficient_sum().max(lower);
    Ok(NormBound {
        kind: NormKind::PiVector,
        lower,
        upper,
        lower_witness: witness,
        upper_witness: UpperWitness::Schmidt(decomposition),
    })
}

/// `R[(i,j),(k,l)] = X[(i,k),(j,l)]`, the realignment whose SVD is the
/// operator-Schmidt decomposition across `M_n | M_m`.
fn realign(x: &ComplexMatrix, n: usize, m: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n * n, m * m, |row, col| {
        let (i, j) = (row / n, row % n);
        let (k, l) = (col / m, col % m);
        x[(i * m + k, j * m + l)]
    })
}

fn operator_schmidt(x: &ComplexMatrix, n: usize, m: usize) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>> {
    let s = svd(&realign(x, n, m))?;
    let cutoff = s.singular_values.first().copied().unwrap_or(0.0) * 1e-14;
    let mut terms = Vec::new();
    for (t, &sigma) in s.singular_values.iter().enumerate() {
        if sigma <= cutoff || sigma == 0.0 {
            break;
        }
        let a = ComplexMatrix::from_fn(n, n, |i, j| s.u[(i * n + j, t)] * sigma);
        let b = ComplexMatrix::from_fn(m, m, |k, l| s.v[(k * m + l, t)].conj());
        terms.push((a, b));
    }
    Ok(terms)
}

fn cost(terms: &[(ComplexMatrix, ComplexMatrix)]) -> Result<Vec<f64>> {
    terms
        .iter()
        .map(|(a, b)| Ok(operator_norm(a)? * operator_norm(b)?))
        .collect()
}

/// Local search over sum-preserving moves
/// `A_t ⊗ B_t + A_s ⊗ B_s = (A_t + λA_s) ⊗ B_t + A_s ⊗ (B_s − λB_t)`.
fn refine(terms: &mut [(ComplexMatrix, ComplexMatrix)], iters: usize) -> Result<()> {
    if terms.len() < 2 {
        return Ok(());
    }
    let mut costs = cost(terms)?;
    let mut step = 0.5;
    let directions = [ONE, -ONE, C64::new(0.0, 1.0), C64::new(0.0, -1.0)];
    for _ in 0..iters {
        let mut improved = false;
        for t in 0..terms.len() {
            for s in 0..terms.len() {
                if s == t {
                    continue;
                }
                for dir in directions {
                    let lambda = dir * step;
                    let a_t = &terms[t].0 + &terms[s].0.scale(lambda);
                    let b_s = &terms[s].1 - &terms[t].1.scale(lambda);
                    let new_t = operator_norm(&a_t)? * operator_norm(&terms[t].1)?;
                    let new_s = operator_norm(&terms[s].0)? * operator_norm(&b_s)?;
                    if new_t + new_s < costs[t] + costs[s] - 1e-15 {
                        terms[t].0 = a_t;
                        terms[s].1 = b_s;
                        costs[t] = new_t;
                        costs[s] = new_s;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-6 {
                break;
            }
        }
    }
    Ok(())
}

/// Best vector-pushforward witness from a deterministic family of starts,
/// by alternating over `x`, `y` and the aligned form `W`.
fn pushforward_witness(x: &ComplexMatrix, n: usize, m: usize) -> Result<LowerWitness> {
    let mut best: Option<(f64, LowerWitness)> = None;
    for s0 in 0..n {
        for t0 in 0..m {
            let mut xv = vec![ZERO; n];
            let mut yv = vec![ZERO; m];
            xv[s0] = ONE;
            yv[t0] = ONE;
            let mut value = -1.0;
            for _ in 0..100 {
                let out = x.apply(&crate::linalg::kron_vec(&xv, &yv))?;
                let t = reshape_vector(&out, n, m)?;
                let w = aligned_form(&t)?;
                let current = svd(&t)?.singular_values.iter().sum::<f64>();
                // F(x', y) = Σ_a x'_a g_a is linear in x'
                let g: Vec<C64> = (0..n)
                    .map(|a| {
                        let mut acc = ZERO;
                        for row in 0..n * m {
                            let wr = w[(row / m, row % m)];
                            for b in 0..m {
                                acc += wr * x[(row, a * m + b)] * yv[b];
                            }
                        }
                        acc
                    })
                    .collect();
                let gn = vec_norm(&g);
                if gn > 0.0 {
                    xv = g.iter().map(|z| z.conj() / gn).collect();
                }
                let h: Vec<C64> = (0..m)
                    .map(|b| {
                        let mut acc = ZERO;
                        for row in 0..n * m {
                            let wr = w[(row / m, row % m)];
                            for a in 0..n {
                                acc += wr * x[(row, a * m + b)] * xv[a];
                            }
                        }
                        acc
                    })
                    .collect();
                let hn = vec_norm(&h);
                if hn > 0.0 {
                    yv = h.iter().map(|z| z.conj() / hn).collect();
                }
                if current - value <= 1e-13 {
                    break;
                }
                value = current;
            }
            let out = x.apply(&crate::linalg::kron_vec(&xv, &yv))?;
            let w = aligned_form(&reshape_vector(&out, n, m)?)?;
            let witness = LowerWitness::VectorPushforward {
                x: xv,
                y: yv,
                w,
            };
            let v = witness.evaluate_matrix(x, n, m)?;
            if best.as_ref().map_or(true, |(b, _)| v > *b) {
                best = Some((v, witness));
            }
        }
    }
    Ok(best.expect("n, m ≥ 1").1)
}

/// Certified interval for the projective norm of an `nm × nm` matrix.
///
/// The upper end is an explicit decomposition `X = Σ A_t ⊗ B_t` (the
/// operator-Schmidt one, then `refine_iters` rounds of local search); the
/// lower end is the best of the product functional found by the injective
/// search, the vector pushforward forms and the trace pairing.
pub fn pi_norm_matrix(x: &ComplexMatrix, n: usize, m: usize, refine_iters: usize) -> Result<NormBound> {
    check_square(x, n, m)?;
    let mut terms = operator_schmidt(x, n, m)?;
    refine(&mut terms, refine_iters)?;
    let upper_witness = UpperWitness::Decomposition { terms };
    let (upper, _) = upper_witness.evaluate_matrix(x, n, m)?;

    let mut candidates = vec![
        injective_norm(x, n, m, &InjectiveOptions::default())?.lower_witness,
        pushforward_witness(x, n, m)?,
        LowerWitness::TracePairing { p: n.min(m) },
    ];
    let mut best = (-1.0, 0);
    for (k, w) in candidates.iter().enumerate() {
        let v = w.evaluate_matrix(x, n, m)?;
        if v > best.0 {
            best = (v, k);
        }
    }
    let lower_witness = candidates.swap_remove(best.1);
    Ok(NormBound {
        kind: NormKind::Projective,
        lower: best.0,
        upper: upper.max(best.0),
        lower_witness,
        upper_witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocCertificate {
    pub member: bool,
    /// `π(α)` for the first column `α`.
    pub pi: NormBound,
    pub schmidt: SchmidtDecomposition,
}

/// Local membership for matrices supported on the first column: such a
/// matrix is local exactly when its first column `α` has `π(α) = 1`.
pub fn loc_membership(x: &CorrelationMatrix) -> Result<LocCertificate> {
    let max_off = x.max_off_first_column();
    if max_off > PATTERN_TOL {
        return Err(Error::PatternMismatch { max_off });
    }
    let alpha = x.first_column();
    let norm = vec_norm(&alpha);
    if (norm - 1.0).abs() > COLUMN_NORM_TOL {
        return Err(Error::NotUnitVector { norm });
    }
    let pi = pi_norm_vector(&alpha, x.n, x.m)?;
    let schmidt = match &pi.upper_witness {
        UpperWitness::Schmidt(s) => s.clone(),
        _ => unreachable!("vector bounds carry a Schmidt witness"),
    };
    Ok(LocCertificate {
        member: pi.upper <= 1.0 + LOC_TOL,
        pi,
        schmidt,
    })
}
