//! Cross norms on `M_n ⊗ M_m` and `C^n ⊗ C^m`.
//!
//! Values are reported as intervals `[lower, upper]` together with the
//! objects that certify each end, so a bound can be re-checked without
//! trusting the optimizer that found it.

mod injective;
mod projective;

pub use injective::{injective_norm, InjectiveOptions};
pub use projective::{loc_membership, pi_norm_matrix, pi_norm_vector, LocCertificate};

use serde::{Deserialize, Serialize};

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, svd, ComplexMatrix, SchmidtDecomposition, C64, ZERO};

/// Slack allowed in `ε ≤ ‖·‖ ≤ π` before the report flags a violation.
pub const SANDWICH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Operator,
    Injective,
    Projective,
    PiVector,
}

/// A functional that is contractive on simple tensors, so `|F(X)|` bounds
/// the norm from below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LowerWitness {
    /// `|⟨X(a ⊗ c), b ⊗ d⟩|` with unit `a, b ∈ C^n`, `c, d ∈ C^m`.
    ProductFunctional {
        a: Vec<C64>,
        b: Vec<C64>,
        c: Vec<C64>,
        d: Vec<C64>,
    },
    /// `|Σ_ik W_ik (X(x ⊗ y))_ik|` with unit `x, y` and `‖W‖ ≤ 1`.
    VectorPushforward {
        x: Vec<C64>,
        y: Vec<C64>,
        w: ComplexMatrix,
    },
    /// `|(1/p) Σ_{i,j<p} X[(i,i),(j,j)]|`, `p = min(n, m)`.
    TracePairing { p: usize },
    /// `|Σ_ik W_ik α_ik|` with `‖W‖ ≤ 1`, for vectors.
    BilinearForm { w: ComplexMatrix },
    /// The exact operator norm.
    OperatorNorm,
}

impl LowerWitness {
    /// Value of the witness on an `nm × nm` matrix.
    pub fn evaluate_matrix(&self, x: &ComplexMatrix, n: usize, m: usize) -> Result<f64> {
        check_square(x, n, m)?;
        match self {
            LowerWitness::ProductFunctional { a, b, c, d } => {
                let mut acc = ZERO;
                for i in 0..n {
                    for k in 0..m {
                        let bra = (b[i] * d[k]).conj();
                        if bra == ZERO {
                            continue;
                        }
                        for j in 0..n {
                            for l in 0..m {
                                acc += bra * x[(i * m + k, j * m + l)] * a[j] * c[l];
                            }
                        }
                    }
                }
                Ok(acc.norm())
            }
            LowerWitness::VectorPushforward { x: xv, y, w } => {
                let v = x.apply(&crate::linalg::kron_vec(xv, y))?;
                Ok(pair(w, &v, m).norm())
            }
            LowerWitness::TracePairing { p } => {
                let mut acc = ZERO;
                for i in 0..*p {
                    for j in 0..*p {
                        acc += x[(i * m + i, j * m + j)];
                    }
                }
                Ok(acc.norm() / *p as f64)
            }
            LowerWitness::OperatorNorm => operator_norm(x),
            LowerWitness::BilinearForm { .. } => Err(Error::InvalidParameter(
                "bilinear-form witness applies to vectors".into(),
            )),
        }
    }

    /// Value of the witness on a vector in `C^n ⊗ C^m`.
    pub fn evaluate_vector(&self, alpha: &[C64], n: usize, m: usize) -> Result<f64> {
        if alpha.len() != n * m {
            return Err(Error::Shape(format!(
                "vector of length {} is not in C^{n} ⊗ C^{m}",
                alpha.len()
            )));
        }
        match self {
            LowerWitness::BilinearForm { w } => Ok(pair(w, alpha, m).norm()),
            _ => Err(Error::InvalidParameter(
                "only bilinear-form witnesses apply to vectors".into(),
            )),
        }
    }
}

/// `Σ_ik W_ik v_{i·m+k}`.
fn pair(w: &ComplexMatrix, v: &[C64], m: usize) -> C64 {
    let mut acc = ZERO;
    for i in 0..w.rows() {
        for k in 0..w.cols() {
            acc += w[(i, k)] * v[i * m + k];
        }
    }
    acc
}

/// `conj(U) Vᵀ` from the SVD of `T`: the contractive form with
/// `Σ W_ik T_ik = ‖T‖_1`.
pub(crate) fn aligned_form(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    let s = svd(t)?;
    let k = s.singular_values.len();
    Ok(ComplexMatrix::from_fn(t.rows(), t.cols(), |i, j| {
        (0..k).map(|q| s.u[(i, q)].conj() * s.v[(j, q)]).sum()
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UpperWitness {
    /// `X = Σ_t A_t ⊗ B_t`; the bound is `Σ ‖A_t‖ ‖B_t‖`.
    Decomposition {
        terms: Vec<(ComplexMatrix, ComplexMatrix)>,
    },
    /// `α = Σ d_t u_t ⊗ v_t`; the bound is `Σ d_t`.
    Schmidt(SchmidtDecomposition),
    /// The exact operator norm, which dominates the injective norm.
    OperatorNorm,
}

impl UpperWitness {
    /// Bound certified by this witness together with the reconstruction
    /// error against `x` (zero for the operator norm).
    pub fn evaluate_matrix(&self, x: &ComplexMatrix, n: usize, m: usize) -> Result<(f64, f64)> {
        check_square(x, n, m)?;
        match self {
            UpperWitness::Decomposition { terms } => {
                let mut bound = 0.0;
                let mut sum = ComplexMatrix::zeros(n * m, n * m);
                for (a, b) in terms {
                    bound += operator_norm(a)? * operator_norm(b)?;
                    sum = &sum + &a.kron(b);
                }
                Ok((bound, sum.max_abs_diff(x)))
            }
            UpperWitness::OperatorNorm => Ok((operator_norm(x)?, 0.0)),
            UpperWitness::Schmidt(_) => Err(Error::InvalidParameter(
                "Schmidt witness applies to vectors".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormBound {
    pub kind: NormKind,
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: LowerWitness,
    pub upper_witness: UpperWitness,
}

impl NormBound {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

fn check_square(x: &ComplexMatrix, n: usize, m: usize) -> Result<()> {
    if x.rows() != n * m || x.cols() != n * m {
        return Err(Error::Shape(format!(
            "expected a {0}x{0} matrix for (n, m) = ({n}, {m}), got {1}x{2}",
            n * m,
            x.rows(),
            x.cols()
        )));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub injective_lower: f64,
    pub operator: f64,
    pub projective_upper: f64,
    pub projective_lower: f64,
    /// Empty when `ε ≤ ‖·‖ ≤ π` holds within [`SANDWICH_TOL`].
    pub violations: Vec<String>,
}

impl SandwichReport {
    pub fn ordered(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `ε`-lower, operator norm and `π`-upper, with their ordering checked.
pub fn sandwich_report(
    x: &CorrelationMatrix,
    injective: &InjectiveOptions,
    refine_iters: usize,
) -> Result<SandwichReport> {
    let (n, m) = (x.n, x.m);
    let eps = injective_norm(&x.matrix, n, m, injective)?;
    let op = operator_norm(&x.matrix)?;
    let pi = pi_norm_matrix(&x.matrix, n, m, refine_iters)?;
    let mut violations = Vec::new();
    if eps.lower > op + SANDWICH_TOL {
        violations.push(format!("injective lower {} exceeds operator {}", eps.lower, op));
    }
    if op > pi.upper + SANDWICH_TOL {
        violations.push(format!("operator {} exceeds projective upper {}", op, pi.upper));
    }
    if pi.lower > pi.upper + SANDWICH_TOL {
        violations.push(format!(
            "projective lower {} exceeds projective upper {}",
            pi.lower, pi.upper
        ));
    }
    Ok(SandwichReport {
        injective_lower: eps.lower,
        operator: op,
        projective_upper: pi.upper,
        projective_lower: pi.lower,
        violations,
    })
}
