//! Reference computations for the integration tests. These deliberately avoid
//! the library's own decompositions so that agreement means something.

#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ucorr::ComplexMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_unit(rng: &mut impl Rng, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn dense(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Number of eigenvalues of the Hermitian `h` strictly below `shift`, by
/// Sylvester's law of inertia: the signs of the pivots of an `LDL†`
/// factorization of `h − shift·I`. Zero pivots are nudged, which only moves
/// the count at exact eigenvalues.
pub fn count_below(h: &[Vec<C64>], shift: f64) -> usize {
    let n = h.len();
    let mut a: Vec<Vec<C64>> = h.to_vec();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= shift;
    }
    let scale = h
        .iter()
        .flat_map(|r| r.iter().map(|z| z.norm()))
        .fold(1.0, f64::max);
    let mut negatives = 0;
    for k in 0..n {
        let mut pivot = a[k][k].re;
        if pivot.abs() < 1e-300 {
            pivot = -1e-14 * scale;
        }
        if pivot < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let l = a[i][k] / pivot;
            for j in k + 1..n {
                let akj = a[k][j];
                a[i][j] -= l * akj;
            }
        }
    }
    negatives
}

/// All eigenvalues of a Hermitian matrix by bisection on the inertia count.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let h = dense(m);
    let n = h.len();
    let radius = h
        .iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    (0..n)
        .map(|k| {
            // the (k+1)-th smallest eigenvalue is the smallest λ with count_below(λ) > k
            let (mut lo, mut hi) = (-radius, radius);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(&h, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-15 * radius {
                    break;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

fn gram(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.cols(), m.cols(), |i, j| {
        (0..m.rows()).map(|t| m[(t, i)].conj() * m[(t, j)]).sum()
    })
}

/// Singular values, decreasing, as square roots of the eigenvalues of the
/// smaller of `M†M` and `MM†`.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let g = if m.rows() < m.cols() { gram(&m.adjoint()) } else { gram(m) };
    let mut ev: Vec<f64> = hermitian_eigenvalues(&g)
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Largest singular value by power iteration on `M†M`.
pub fn power_norm(m: &ComplexMatrix, iters: usize) -> f64 {
    let g = gram(m);
    let n = g.rows();
    let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + i as f64 * 0.37, 0.1 * i as f64)).collect();
    let mut lambda = 0.0;
    for _ in 0..iters {
        let w: Vec<C64> = (0..n).map(|i| (0..n).map(|j| g[(i, j)] * v[j]).sum()).collect();
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm;
        v = w.into_iter().map(|z| z / norm).collect();
    }
    lambda.sqrt()
}

fn norm_2x2(a: C64, b: C64, c: C64, d: C64) -> f64 {
    let f = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
    let det = (a * d - b * c).norm();
    (0.5 * (f + (f * f - 4.0 * det * det).max(0.0).sqrt())).sqrt()
}

/// `max |⟨X(a⊗c), b⊗d⟩|` for `n = m = 2` by exhaustive search over a grid of
/// `(a, b)` on the Bloch sphere; the inner maximum over `(c, d)` is the
/// exact norm of a 2×2 matrix.
pub fn injective_grid_2x2(x: &ComplexMatrix, steps: usize) -> f64 {
    assert_eq!((x.rows(), x.cols()), (4, 4));
    let mut points = Vec::with_capacity(steps * steps);
    for s in 0..steps {
        let t = std::f64::consts::FRAC_PI_2 * s as f64 / (steps - 1) as f64;
        for p in 0..steps {
            let phi = 2.0 * std::f64::consts::PI * p as f64 / steps as f64;
            points.push([C64::new(t.cos(), 0.0), C64::from_polar(t.sin(), phi)]);
        }
    }
    let mut best: f64 = 0.0;
    for a in &points {
        // y[row][l] = Σ_i X[row, i·2 + l] a_i
        let mut y = [[C64::new(0.0, 0.0); 2]; 4];
        for (row, yr) in y.iter_mut().enumerate() {
            for (l, v) in yr.iter_mut().enumerate() {
                *v = x[(row, l)] * a[0] + x[(row, 2 + l)] * a[1];
            }
        }
        for b in &points {
            // M[k][l] = Σ_i conj(b_i) y[i·2 + k][l]
            let m = |k: usize, l: usize| b[0].conj() * y[k][l] + b[1].conj() * y[2 + k][l];
            best = best.max(norm_2x2(m(0, 0), m(0, 1), m(1, 0), m(1, 1)));
        }
    }
    best
}

/// Largest `|Σ W_ij α_ij|` over `samples` random contractions `W`; a lower
/// bound for the projective norm of `α`.
pub fn pi_dual_sampling(alpha: &[C64], n: usize, m: usize, samples: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let w = random_matrix(&mut r, n, m);
        let norm = power_norm(&w, 200);
        let pairing: C64 = (0..n)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .map(|(i, j)| w[(i, j)] * alpha[i * m + j])
            .sum();
        best = best.max(pairing.norm() / norm);
    }
    best
}

/// Kronecker product written out from the index rule.
pub fn kron_oracle(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * rb, a.cols() * cb, |row, col| {
        a[(row / rb, col / cb)] * b[(row % rb, col % cb)]
    })
}

/// CHSH value `Σ_{x,y} (−1)^{xy} E(x,y)` of a two-input, two-output box in
/// the flat layout `((a·2 + b)·2 + x)·2 + y`.
pub fn chsh_oracle(p: &[f64]) -> f64 {
    let mut total = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let mut e = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    let sign = if a == b { 1.0 } else { -1.0 };
                    e += sign * p[((a * 2 + b) * 2 + x) * 2 + y];
                }
            }
            total += if x * y == 1 { -e } else { e };
        }
    }
    total
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
