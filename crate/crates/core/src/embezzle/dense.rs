//! Explicit state-vector model of the protocol, used as an oracle.
//!
//! The space is `C^n ⊗ (C^n ⊗ C^m)^{⊗r} ⊗ C^m`, ordered
//! `A_0 | (A_1 B_1) … (A_r B_r) | B_0` with `A_0` most significant. `U` and
//! `V` cyclically shift the `A` and `B` digits; `A_0`, `B_0` carry the matrix
//! indices, so `s(x ⊗ y) = ⟨(X ⊗ Y)(e_a ⊗ ψ ⊗ e_b), e_c ⊗ ψ ⊗ e_d⟩`.

use rayon::prelude::*;

use super::EmbezzlementProtocol;
use crate::correlation::{ClaimedClass, FullCorrelation, Generator};
use crate::error::{Error, Result};
use crate::linalg::{svd, ComplexMatrix, C64, ZERO};

/// Largest number of amplitudes the dense model will allocate.
pub const DENSE_CAP: usize = 1 << 20;

#[derive(Debug, Clone)]
pub struct DenseModel {
    n: usize,
    m: usize,
    r: usize,
    z: C64,
    psi: Vec<C64>,
    /// `idx ↦` index of the image basis vector under the forward A shift.
    shift_a: Vec<usize>,
    shift_b: Vec<usize>,
}

impl DenseModel {
    pub fn new(p: &EmbezzlementProtocol) -> Result<Self> {
        let (n, m, r) = (p.n(), p.m(), p.r);
        let required = ((n * m) as u128).pow(r as u32 + 1);
        if required > DENSE_CAP as u128 {
            return Err(Error::DenseCapExceeded {
                required,
                cap: DENSE_CAP,
            });
        }
        let pair = n * m;
        let mut psi = vec![C64::new(1.0, 0.0)];
        for pos in 1..=r {
            let h = p.h(pos);
            let mut next = Vec::with_capacity(psi.len() * pair);
            for a in &psi {
                for b in h {
                    next.push(a * b);
                }
            }
            psi = next;
        }
        let mut model = Self {
            n,
            m,
            r,
            z: p.target.phase(),
            psi,
            shift_a: Vec::new(),
            shift_b: Vec::new(),
        };
        let dim = model.dim();
        let mut shift_a = vec![0; dim];
        let mut shift_b = vec![0; dim];
        let mut a = vec![0; r + 1];
        let mut b = vec![0; r + 1];
        for idx in 0..dim {
            model.decode(idx, &mut a, &mut b);
            a.rotate_right(1);
            shift_a[idx] = model.encode(&a, &b);
            a.rotate_left(1);
            b.rotate_right(1);
            shift_b[idx] = model.encode(&a, &b);
        }
        model.shift_a = shift_a;
        model.shift_b = shift_b;
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.n * self.psi.len() * self.m
    }

    /// Digits `a[0..=r]`, `b[0..=r]`, position 0 being the matrix index.
    fn decode(&self, idx: usize, a: &mut [usize], b: &mut [usize]) {
        b[0] = idx % self.m;
        let mut rest = idx / self.m;
        for pos in (1..=self.r).rev() {
            let d = rest % (self.n * self.m);
            rest /= self.n * self.m;
            a[pos] = d / self.m;
            b[pos] = d % self.m;
        }
        a[0] = rest;
    }

    fn encode(&self, a: &[usize], b: &[usize]) -> usize {
        let mut idx = a[0];
        for pos in 1..=self.r {
            idx = idx * self.n * self.m + a[pos] * self.m + b[pos];
        }
        idx * self.m + b[0]
    }

    /// `e_a ⊗ ψ ⊗ e_b`.
    pub fn embed(&self, a: usize, b: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.dim()];
        let block = self.psi.len();
        for (t, amp) in self.psi.iter().enumerate() {
            v[(a * block + t) * self.m + b] = *amp;
        }
        v
    }

    /// `⟨v, e_c ⊗ ψ ⊗ e_d⟩`.
    pub fn project(&self, v: &[C64], c: usize, d: usize) -> C64 {
        let block = self.psi.len();
        self.psi
            .iter()
            .enumerate()
            .map(|(t, amp)| v[(c * block + t) * self.m + d] * amp.conj())
            .sum()
    }

    fn permute(v: &[C64], map: &[usize], inverse: bool, phase: C64) -> Vec<C64> {
        let mut out = vec![ZERO; v.len()];
        for (idx, &to) in map.iter().enumerate() {
            if inverse {
                out[idx] = v[to] * phase;
            } else {
                out[to] = v[idx] * phase;
            }
        }
        out
    }

    /// `U = z̄ · S_A`, or its adjoint.
    pub fn apply_u(&self, v: &[C64], adjoint: bool) -> Vec<C64> {
        let phase = if adjoint { self.z } else { self.z.conj() };
        Self::permute(v, &self.shift_a, adjoint, phase)
    }

    /// `V = S_B`, or its adjoint.
    pub fn apply_v(&self, v: &[C64], adjoint: bool) -> Vec<C64> {
        Self::permute(v, &self.shift_b, adjoint, C64::new(1.0, 0.0))
    }

    /// `M` acting on the `A_0` digit.
    pub fn apply_local_a(&self, v: &[C64], mat: &ComplexMatrix) -> Vec<C64> {
        let stride = v.len() / self.n;
        let mut out = vec![ZERO; v.len()];
        for row in 0..self.n {
            for col in 0..self.n {
                let c = mat[(row, col)];
                if c == ZERO {
                    continue;
                }
                for t in 0..stride {
                    out[row * stride + t] += c * v[col * stride + t];
                }
            }
        }
        out
    }

    /// `M` acting on the `B_0` digit.
    pub fn apply_local_b(&self, v: &[C64], mat: &ComplexMatrix) -> Vec<C64> {
        let blocks = v.len() / self.m;
        let mut out = vec![ZERO; v.len()];
        for t in 0..blocks {
            for row in 0..self.m {
                out[t * self.m + row] = (0..self.m)
                    .map(|col| mat[(row, col)] * v[t * self.m + col])
                    .sum();
            }
        }
        out
    }

    /// Schmidt coefficients of `v` across `(A_0 … A_r) | (B_1 … B_r B_0)`.
    pub fn cut_schmidt_coefficients(&self, v: &[C64]) -> Result<Vec<f64>> {
        let rows = self.n.pow(self.r as u32 + 1);
        let cols = self.m.pow(self.r as u32 + 1);
        let mut mat = ComplexMatrix::zeros(rows, cols);
        let mut a = vec![0; self.r + 1];
        let mut b = vec![0; self.r + 1];
        for (idx, amp) in v.iter().enumerate() {
            self.decode(idx, &mut a, &mut b);
            let row = a.iter().fold(0, |acc, &d| acc * self.n + d);
            let col = b[1..]
                .iter()
                .chain(std::iter::once(&b[0]))
                .fold(0, |acc, &d| acc * self.m + d);
            mat[(row, col)] = *amp;
        }
        Ok(svd(&mat)?.singular_values)
    }

    /// `s(x ⊗ y)` for the protocol with `U` replaced by `U(T_A ⊗ I)` and `V`
    /// by `V(T_B ⊗ I)` when twists are given.
    pub fn coordinate(
        &self,
        x: Generator,
        y: Generator,
        twist_a: Option<&ComplexMatrix>,
        twist_b: Option<&ComplexMatrix>,
    ) -> C64 {
        let (a, c) = match x {
            Generator::One => (0, 0),
            Generator::U(i, j) => (j, i),
            Generator::UStar(i, j) => (i, j),
        };
        let (b, d) = match y {
            Generator::One => (0, 0),
            Generator::U(k, l) => (l, k),
            Generator::UStar(k, l) => (k, l),
        };
        let mut v = self.embed(a, b);
        match y {
            Generator::One => {}
            Generator::U(..) => {
                if let Some(t) = twist_b {
                    v = self.apply_local_b(&v, t);
                }
                v = self.apply_v(&v, false);
            }
            Generator::UStar(..) => {
                v = self.apply_v(&v, true);
                if let Some(t) = twist_b {
                    v = self.apply_local_b(&v, &t.adjoint());
                }
            }
        }
        match x {
            Generator::One => {}
            Generator::U(..) => {
                if let Some(t) = twist_a {
                    v = self.apply_local_a(&v, t);
                }
                v = self.apply_u(&v, false);
            }
            Generator::UStar(..) => {
                v = self.apply_u(&v, true);
                if let Some(t) = twist_a {
                    v = self.apply_local_a(&v, &t.adjoint());
                }
            }
        }
        self.project(&v, c, d)
    }

    pub fn correlation(
        &self,
        twist_a: Option<&ComplexMatrix>,
        twist_b: Option<&ComplexMatrix>,
    ) -> FullCorrelation {
        let pairs: Vec<(Generator, Generator)> = Generator::all(self.n)
            .flat_map(|x| Generator::all(self.m).map(move |y| (x, y)))
            .collect();
        let coords: Vec<C64> = pairs
            .par_iter()
            .map(|&(x, y)| self.coordinate(x, y, twist_a, twist_b))
            .collect();
        FullCorrelation::from_coords(self.n, self.m, coords, ClaimedClass::QaApprox)
            .expect("coordinate count matches")
    }
}

/// Every coordinate by direct contraction in the dense model.
pub fn dense_correlation(p: &EmbezzlementProtocol) -> Result<FullCorrelation> {
    Ok(DenseModel::new(p)?.correlation(None, None))
}

/// As [`dense_correlation`], with Alice's unitary replaced by
/// `Û_ij = Σ_q U_iq T_A[q, j]` and Bob's likewise.
pub fn dense_correlation_twisted(
    p: &EmbezzlementProtocol,
    twist_a: &ComplexMatrix,
    twist_b: &ComplexMatrix,
) -> Result<FullCorrelation> {
    for (t, dim) in [(twist_a, p.n()), (twist_b, p.m())] {
        if t.rows() != dim || t.cols() != dim {
            return Err(Error::Shape(format!(
                "twist must be {dim}x{dim}, got {}x{}",
                t.rows(),
                t.cols()
            )));
        }
    }
    Ok(DenseModel::new(p)?.correlation(Some(twist_a), Some(twist_b)))
}

#[cfg(test)]
mod tests {
    use super::super::{build_protocol, TargetVector};
    use super::*;

    #[test]
    fn unit_coordinate_and_cap() {
        let t = TargetVector::maximally_entangled(2, 2).unwrap();
        let p = build_protocol(&t, 2).unwrap();
        let f = dense_correlation(&p).unwrap();
        assert!((f.get(Generator::One, Generator::One).re - 1.0).abs() < 1e-14);
        let big = build_protocol(&t, 10).unwrap();
        assert!(matches!(
            dense_correlation(&big),
            Err(Error::DenseCapExceeded { .. })
        ));
    }

    #[test]
    fn shifts_are_unitary_permutations() {
        let t = TargetVector::maximally_entangled(2, 3).unwrap();
        let p = build_protocol(&t, 2).unwrap();
        let model = DenseModel::new(&p).unwrap();
        let v = model.embed(1, 2);
        let back = model.apply_u(&model.apply_u(&v, false), true);
        let back = model.apply_v(&model.apply_v(&back, true), false);
        for (x, y) in back.iter().zip(&v) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn product_target_correlation() {
        let t = TargetVector::product(2, 2).unwrap();
        let p = build_protocol(&t, 2).unwrap();
        let f = dense_correlation(&p).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let v = f.get(Generator::U(i, 0), Generator::U(k, 0));
                assert!((v - t.entry(i, k)).norm() < 1e-15);
            }
        }
    }
}
