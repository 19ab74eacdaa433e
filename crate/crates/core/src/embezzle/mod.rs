//! Finite embezzlement protocols.
//!
//! For a unit target `α ∈ C^n ⊗ C^m` the resource state is
//! `ψ = h_1 ⊗ … ⊗ h_r`, where the `h_j` rotate from `e_1 ⊗ e_1` to `z·α` in
//! `r` equal steps of angle `θ/r`. Alice and Bob apply cyclic shifts of their
//! halves; the resulting correlation has `s(u_i1 ⊗ v_k1) → α_ik` and every
//! other `u ⊗ v` coordinate tending to zero.

mod alternate;
mod closed_form;
mod dense;

pub use alternate::{alternate_correlation, alternate_limit};
pub use closed_form::{closed_form_correlation, closed_form_matrix};
pub use dense::{dense_correlation, dense_correlation_twisted, DenseModel, DENSE_CAP};

use serde::{Deserialize, Serialize};

use crate::correlation::{ClaimedClass, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::linalg::{inner, schmidt, vec_norm, ComplexMatrix, SchmidtDecomposition, C64, ONE, ZERO};

/// `sin θ` at or below this is treated as `θ = 0`.
pub const DEGENERATE_SIN: f64 = 1e-9;
pub const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetVector {
    n: usize,
    m: usize,
    alpha: Vec<C64>,
    z: C64,
    theta: f64,
    schmidt: SchmidtDecomposition,
}

impl TargetVector {
    /// Validates `alpha` as a unit vector in `C^n ⊗ C^m`, `n, m ≥ 2`.
    pub fn new(alpha: Vec<C64>, n: usize, m: usize) -> Result<Self> {
        if n < 2 || m < 2 {
            return Err(Error::InvalidParameter(format!(
                "target dimensions must be at least 2, got ({n}, {m})"
            )));
        }
        Self::with_any_dims(alpha, n, m)
    }

    /// Rescales `alpha` to unit length first.
    pub fn normalized(alpha: Vec<C64>, n: usize, m: usize) -> Result<Self> {
        let norm = vec_norm(&alpha);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Self::new(alpha.into_iter().map(|a| a / norm).collect(), n, m)
    }

    /// Allows `n` or `m` equal to 1; used for the compressed protocols
    /// behind alternate correlations.
    pub(crate) fn with_any_dims(alpha: Vec<C64>, n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 || alpha.len() != n * m {
            return Err(Error::Shape(format!(
                "target of length {} is not in C^{n} ⊗ C^{m}",
                alpha.len()
            )));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = vec_norm(&alpha);
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnitVector { norm });
        }
        let a11 = alpha[0];
        let z = if a11.norm() > 0.0 {
            a11.conj() / a11.norm()
        } else {
            ONE
        };
        let cos = a11.norm();
        let sin = alpha[1..].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let theta = if sin <= DEGENERATE_SIN {
            0.0
        } else {
            sin.atan2(cos)
        };
        let schmidt = schmidt(&alpha, n, m)?;
        Ok(Self {
            n,
            m,
            alpha,
            z,
            theta,
            schmidt,
        })
    }

    /// `e_1 ⊗ e_1`.
    pub fn product(n: usize, m: usize) -> Result<Self> {
        let mut alpha = vec![ZERO; n * m];
        alpha[0] = ONE;
        Self::new(alpha, n, m)
    }

    /// `(1/√k) Σ_{i<k} e_i ⊗ e_i` with `k = min(n, m)`.
    pub fn maximally_entangled(n: usize, m: usize) -> Result<Self> {
        let k = n.min(m);
        let d = 1.0 / (k as f64).sqrt();
        let mut alpha = vec![ZERO; n * m];
        for i in 0..k {
            alpha[i * m + i] = C64::new(d, 0.0);
        }
        Self::new(alpha, n, m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> &[C64] {
        &self.alpha
    }

    /// `α_ik`, 0-based.
    pub fn entry(&self, i: usize, k: usize) -> C64 {
        self.alpha[i * self.m + k]
    }

    /// Unimodular `z` with `z·α_11 ≥ 0`.
    pub fn phase(&self) -> C64 {
        self.z
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn schmidt(&self) -> &SchmidtDecomposition {
        &self.schmidt
    }

    pub fn schmidt_rank(&self) -> usize {
        self.schmidt.rank()
    }

    pub fn is_maximally_entangled(&self) -> bool {
        self.schmidt_rank() == self.n.min(self.m)
    }

    /// `cos(θ/r)^r`.
    pub fn overlap_at(&self, r: u64) -> f64 {
        assert!(r >= 1, "r must be positive");
        let c = (self.theta / r as f64).cos();
        match i32::try_from(r) {
            Ok(k) => c.powi(k),
            Err(_) => c.powf(r as f64),
        }
    }

    /// `1 - cos(θ/r)^r`, evaluated as `-expm1(r · ln(1 - 2 sin²(θ/2r)))` so
    /// that deficits far below machine epsilon relative to 1 stay resolved.
    pub fn overlap_deficit_at(&self, r: u64) -> f64 {
        assert!(r >= 1, "r must be positive");
        let half = (self.theta / (2.0 * r as f64)).sin();
        -(r as f64 * (-2.0 * half * half).ln_1p()).exp_m1()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbezzlementProtocol {
    pub target: TargetVector,
    pub r: usize,
    /// `h_0, …, h_r`, each in `C^n ⊗ C^m`.
    pub interpolants: Vec<Vec<C64>>,
    pub cos_step: f64,
}

impl EmbezzlementProtocol {
    pub fn n(&self) -> usize {
        self.target.n
    }

    pub fn m(&self) -> usize {
        self.target.m
    }

    pub fn h(&self, j: usize) -> &[C64] {
        &self.interpolants[j]
    }

    /// Largest deviation among the chain invariants: unit norms, consecutive
    /// overlaps equal to `cos(θ/r)`, and `h_r = z·α`.
    pub fn chain_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for h in &self.interpolants {
            worst = worst.max((vec_norm(h) - 1.0).abs());
        }
        for j in 1..=self.r {
            let ov = inner(&self.interpolants[j], &self.interpolants[j - 1]);
            worst = worst.max((ov - C64::new(self.cos_step, 0.0)).norm());
        }
        let z = self.target.z;
        for (h, a) in self.interpolants[self.r].iter().zip(&self.target.alpha) {
            worst = worst.max((h - z * a).norm());
        }
        worst
    }
}

pub fn build_protocol(target: &TargetVector, r: usize) -> Result<EmbezzlementProtocol> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    let dim = target.n * target.m;
    let mut h0 = vec![ZERO; dim];
    h0[0] = ONE;
    let theta = target.theta;
    let interpolants = if theta == 0.0 {
        vec![h0; r + 1]
    } else {
        let hr: Vec<C64> = target.alpha.iter().map(|a| target.z * a).collect();
        let sin = theta.sin();
        let mut g: Vec<C64> = hr.iter().map(|x| x / sin).collect();
        g[0] = ZERO;
        (0..=r)
            .map(|j| {
                let phi = j as f64 * theta / r as f64;
                let (s, c) = phi.sin_cos();
                h0.iter().zip(&g).map(|(a, b)| a * c + b * s).collect()
            })
            .collect()
    };
    Ok(EmbezzlementProtocol {
        target: target.clone(),
        r,
        interpolants,
        cos_step: (theta / r as f64).cos(),
    })
}

/// `⟨ψ, ψ_r⟩ = cos(θ/r)^r`.
pub fn overlap(p: &EmbezzlementProtocol) -> f64 {
    p.target.overlap_at(p.r as u64)
}

/// The `r → ∞` correlation: `α` in the first column, zero elsewhere.
pub fn limit_correlation(target: &TargetVector) -> CorrelationMatrix {
    let (n, m) = (target.n, target.m);
    let mut x = ComplexMatrix::zeros(n * m, n * m);
    for (row, a) in target.alpha.iter().enumerate() {
        x[(row, 0)] = *a;
    }
    CorrelationMatrix {
        n,
        m,
        matrix: x,
        claimed_class: ClaimedClass::QaApprox,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    #[test]
    fn product_target_is_fixed_point() {
        let t = TargetVector::product(2, 2).unwrap();
        assert_eq!(t.theta(), 0.0);
        let p = build_protocol(&t, 5).unwrap();
        for h in &p.interpolants {
            assert_eq!(h, &vec![ONE, ZERO, ZERO, ZERO]);
        }
        assert_eq!(overlap(&p), 1.0);
    }

    #[test]
    fn maximally_entangled_angle() {
        let t = TargetVector::maximally_entangled(2, 2).unwrap();
        assert!((t.theta() - FRAC_PI_4).abs() < 1e-15);
        for r in [1, 2, 7] {
            let p = build_protocol(&t, r).unwrap();
            assert!(p.chain_residual() < 1e-12);
            assert!((p.cos_step - (FRAC_PI_4 / r as f64).cos()).abs() < 1e-15);
        }
        assert!((overlap(&build_protocol(&t, 1).unwrap()) - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn negative_phase_is_reduced() {
        let h = FRAC_1_SQRT_2;
        let t = TargetVector::new(
            vec![C64::new(-h, 0.0), ZERO, ZERO, C64::new(h, 0.0)],
            2,
            2,
        )
        .unwrap();
        assert_eq!(t.phase(), C64::new(-1.0, 0.0));
        assert!((t.theta() - FRAC_PI_4).abs() < 1e-15);
        let p = build_protocol(&t, 3).unwrap();
        assert!(p.chain_residual() < 1e-12);
    }

    #[test]
    fn rejects_bad_targets() {
        assert!(matches!(
            TargetVector::new(vec![C64::new(2.0, 0.0), ZERO, ZERO, ZERO], 2, 2),
            Err(Error::NotUnitVector { .. })
        ));
        assert!(TargetVector::new(vec![ONE, ZERO], 1, 2).is_err());
        assert!(TargetVector::with_any_dims(vec![ONE], 1, 1).is_ok());
    }

    #[test]
    fn deficit_matches_direct_difference() {
        let t = TargetVector::maximally_entangled(2, 2).unwrap();
        for r in [1u64, 3, 40] {
            let direct = 1.0 - t.overlap_at(r);
            assert!((t.overlap_deficit_at(r) - direct).abs() < 1e-15 + 1e-12 * direct);
        }
        assert!(t.overlap_deficit_at(1_000_000) > 0.0);
    }

    #[test]
    fn limit_pattern() {
        let t = TargetVector::maximally_entangled(2, 2).unwrap();
        let x = limit_correlation(&t);
        let col = x.first_column();
        assert!((col[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((col[3].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(x.max_off_first_column(), 0.0);
    }
}
