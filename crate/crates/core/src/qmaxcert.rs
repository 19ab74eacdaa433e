//! Choi-matrix certificates for the operator-norm ball.
//!
//! `φ_n : M_2n → span{1, u_ij, u_ij*}` sends the diagonal to `1/2n` and the
//! off-diagonal corners to the generators. For a contraction `X` the matrix
//! `P = I + χ + χ*`, with `χ = Σ x_ijkl E_12 ⊗ E_ij ⊗ E_12 ⊗ E_kl`, is
//! positive and annihilates `ker(φ_n ⊗ φ_m)`, so it defines a state whose
//! `u ⊗ v` block is `X`.

use serde::{Deserialize, Serialize};

use crate::correlation::{ClaimedClass, FullCorrelation, Generator};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue_hermitian, svd, ComplexMatrix, C64, ONE, ZERO};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientMapRep {
    pub n: usize,
    /// `coefficients[i * 2n + j]` is `φ_n(E_ij)` as `(generator, weight)`,
    /// or `None` when `E_ij` lies in the kernel.
    pub coefficients: Vec<Option<(Generator, f64)>>,
    pub kernel_basis: Vec<ComplexMatrix>,
}

/// The matrix unit `E_ab` of `M_2n` lifting a generator.
fn lift(g: Generator, n: usize) -> (usize, usize) {
    match g {
        Generator::One => (0, 0),
        Generator::U(i, j) => (i, n + j),
        Generator::UStar(i, j) => (n + j, i),
    }
}

pub fn build_quotient_rep(n: usize) -> Result<QuotientMapRep> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    let d = 2 * n;
    let w = 1.0 / d as f64;
    let mut coefficients = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            coefficients.push(if i == j {
                Some((Generator::One, w))
            } else if i < n && j >= n {
                Some((Generator::U(i, j - n), w))
            } else if j < n && i >= n {
                Some((Generator::UStar(j, i - n), w))
            } else {
                None
            });
        }
    }
    let mut kernel_basis = Vec::with_capacity(2 * n * n - 1);
    for a in 0..d {
        for b in 0..d {
            if a != b && (a < n) == (b < n) {
                kernel_basis.push(ComplexMatrix::unit(d, d, a, b));
            }
        }
    }
    for i in 1..d {
        let mut k = ComplexMatrix::unit(d, d, 0, 0);
        k[(i, i)] = -ONE;
        kernel_basis.push(k);
    }
    Ok(QuotientMapRep {
        n,
        coefficients,
        kernel_basis,
    })
}

impl QuotientMapRep {
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn phi_unit(&self, i: usize, j: usize) -> Option<(Generator, f64)> {
        self.coefficients[i * self.dim() + j]
    }

    /// `φ_n(C)` as coefficients over [`Generator::all`].
    pub fn apply(&self, c: &ComplexMatrix) -> Vec<C64> {
        let d = self.dim();
        let mut out = vec![ZERO; Generator::count(self.n)];
        for i in 0..d {
            for j in 0..d {
                if let Some((g, w)) = self.phi_unit(i, j) {
                    out[g.index(self.n)] += c[(i, j)] * w;
                }
            }
        }
        out
    }

    /// `(rank φ_n, rank of the kernel basis)`; the two sum to `(2n)²` exactly
    /// when the basis spans the kernel.
    pub fn ranks(&self) -> Result<(usize, usize)> {
        let d = self.dim();
        let phi = ComplexMatrix::from_fn(Generator::count(self.n), d * d, |g, col| {
            match self.phi_unit(col / d, col % d) {
                Some((h, w)) if h.index(self.n) == g => C64::new(w, 0.0),
                _ => ZERO,
            }
        });
        let kernel = ComplexMatrix::from_fn(self.kernel_basis.len(), d * d, |k, col| {
            self.kernel_basis[k][(col / d, col % d)]
        });
        Ok((svd(&phi)?.rank(1e-12), svd(&kernel)?.rank(1e-12)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QmaxCertificate {
    pub n: usize,
    pub m: usize,
    pub x: ComplexMatrix,
    /// In `M_2n ⊗ M_2m`, row `a·2m + b`.
    pub chi: ComplexMatrix,
    pub p: ComplexMatrix,
    pub min_eig: f64,
    pub kernel_residual: f64,
    pub recovery_residual: f64,
}

/// Tolerances a certificate must meet to be accepted.
pub const MIN_EIG_TOL: f64 = 1e-9;
pub const RESIDUAL_TOL: f64 = 1e-10;

impl QmaxCertificate {
    pub fn valid(&self) -> bool {
        self.min_eig >= -MIN_EIG_TOL
            && self.kernel_residual <= RESIDUAL_TOL
            && self.recovery_residual <= RESIDUAL_TOL
    }

    /// `γ_P(C) = Σ_uv P_uv C_uv`.
    pub fn gamma(&self, c: &ComplexMatrix) -> C64 {
        self.p
            .as_slice()
            .iter()
            .zip(c.as_slice())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// The state `γ_P / 4nm` pulled back through `φ_n ⊗ φ_m`, on every pair
    /// of generators.
    pub fn induced_correlation(&self) -> FullCorrelation {
        let (n, m) = (self.n, self.m);
        let dm = 2 * m;
        FullCorrelation::from_fn(n, m, ClaimedClass::Qmax, |x, y| {
            let (rx, cx) = lift(x, n);
            let (ry, cy) = lift(y, m);
            self.p[(rx * dm + ry, cx * dm + cy)]
        })
    }

    /// `γ_P` over `J_2n ⊗ {E_uv}` and `{E_uv} ⊗ J_2m`; largest modulus.
    pub fn kernel_annihilation_check(&self, rep_n: &QuotientMapRep, rep_m: &QuotientMapRep) -> f64 {
        let (dn, dm) = (rep_n.dim(), rep_m.dim());
        let mut worst = 0.0f64;
        let nonzeros = |k: &ComplexMatrix, d: usize| -> Vec<(usize, usize, C64)> {
            let mut out = Vec::new();
            for a in 0..d {
                for b in 0..d {
                    if k[(a, b)] != ZERO {
                        out.push((a, b, k[(a, b)]));
                    }
                }
            }
            out
        };
        for k in &rep_n.kernel_basis {
            let nz = nonzeros(k, dn);
            for u in 0..dm {
                for v in 0..dm {
                    let g: C64 = nz
                        .iter()
                        .map(|&(a, b, c)| c * self.p[(a * dm + u, b * dm + v)])
                        .sum();
                    worst = worst.max(g.norm());
                }
            }
        }
        for k in &rep_m.kernel_basis {
            let nz = nonzeros(k, dm);
            for u in 0..dn {
                for v in 0..dn {
                    let g: C64 = nz
                        .iter()
                        .map(|&(a, b, c)| c * self.p[(u * dm + a, v * dm + b)])
                        .sum();
                    worst = worst.max(g.norm());
                }
            }
        }
        worst
    }

    fn recovery(&self) -> f64 {
        let (n, m) = (self.n, self.m);
        let dm = 2 * m;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..m {
                    for l in 0..m {
                        let got = self.p[(i * dm + k, (n + j) * dm + m + l)];
                        worst = worst.max((got - self.x[(i * m + k, j * m + l)]).norm());
                    }
                }
            }
        }
        worst
    }

    /// Recomputes the eigenvalue and both residuals from the stored `P`.
    pub fn recheck(&mut self) -> Result<()> {
        let rep_n = build_quotient_rep(self.n)?;
        let rep_m = build_quotient_rep(self.m)?;
        self.min_eig = min_eigenvalue_hermitian(&self.p)?;
        self.kernel_residual = self.kernel_annihilation_check(&rep_n, &rep_m);
        self.recovery_residual = self.recovery();
        Ok(())
    }
}

/// Builds `χ` and `P` for `X` and evaluates the certificate. Works for any
/// `X`; the certificate is valid exactly when `‖X‖ ≤ 1`, and then
/// `min_eig = 1 − ‖X‖`.
pub fn certify(x: &ComplexMatrix, n: usize, m: usize) -> Result<QmaxCertificate> {
    if x.rows() != n * m || x.cols() != n * m {
        return Err(Error::Shape(format!(
            "expected a {0}x{0} matrix for (n, m) = ({n}, {m})",
            n * m
        )));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    let dm = 2 * m;
    let dim = 4 * n * m;
    let mut chi = ComplexMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    chi[(i * dm + k, (n + j) * dm + m + l)] = x[(i * m + k, j * m + l)];
                }
            }
        }
    }
    let p = &(&ComplexMatrix::identity(dim) + &chi) + &chi.adjoint();
    let mut cert = QmaxCertificate {
        n,
        m,
        x: x.clone(),
        chi,
        p,
        min_eig: 0.0,
        kernel_residual: 0.0,
        recovery_residual: 0.0,
    };
    cert.recheck()?;
    Ok(cert)
}
