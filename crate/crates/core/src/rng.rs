//! Seeded randomness. Every randomized routine takes a `u64` seed and derives
//! independent streams from it, so results never depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{complete_basis, svd, vec_norm, ComplexMatrix, C64};

pub type SeededRng = ChaCha8Rng;

/// SplitMix64 finalizer, used to derive per-stream seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64, stream: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, stream))
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    (0..dim).map(|_| gaussian_complex(rng)).collect()
}

/// Uniformly distributed unit vector in `C^dim`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    loop {
        let v = gaussian_vector(rng, dim);
        let norm = vec_norm(&v);
        if norm > 1e-6 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Haar-distributed unitary, from Gram-Schmidt on Gaussian columns.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut w = g.col(j);
        for _ in 0..2 {
            for b in &cols {
                let c: C64 = w.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let norm = vec_norm(&w);
        cols.push(w.into_iter().map(|z| z / norm).collect());
    }
    complete_basis(&cols, dim).expect("dimensions agree")
}

/// Contraction obtained by clipping the singular values of a scaled Gaussian
/// matrix at 1. Typically some singular values saturate, so the result has
/// operator norm exactly 1.
pub fn contraction<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, dim, dim).scale_real(1.5 / (dim as f64).sqrt());
    let s = svd(&g).expect("finite gaussian matrix");
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        (0..dim)
            .map(|t| s.u[(i, t)] * s.singular_values[t].min(1.0) * s.v[(j, t)].conj())
            .sum()
    })
}
