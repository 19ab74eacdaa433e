use rayon::prelude::*;

use super::{check_square, LowerWitness, NormBound, NormKind, UpperWitness};
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, svd, ComplexMatrix, C64, ZERO};
use crate::rng::{rng_for, unit_vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectiveOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Stop a restart once a sweep improves the value by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for InjectiveOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            tol: 1e-12,
            max_sweeps: 500,
        }
    }
}

struct Quad {
    a: Vec<C64>,
    b: Vec<C64>,
    c: Vec<C64>,
    d: Vec<C64>,
    value: f64,
}

/// Top singular triple of `M`: returns `(σ, u, v)` with `M v = σ u`.
fn top_pair(mat: &ComplexMatrix) -> Result<(f64, Vec<C64>, Vec<C64>)> {
    let s = svd(mat)?;
    Ok((s.singular_values[0], s.u.col(0), s.v.col(0)))
}

fn climb(x: &ComplexMatrix, n: usize, m: usize, c0: Vec<C64>, d0: Vec<C64>, opts: &InjectiveOptions) -> Result<Quad> {
    let (mut c, mut d) = (c0, d0);
    let mut a = vec![ZERO; n];
    let mut b = vec![ZERO; n];
    let mut best = -1.0;
    for _ in 0..opts.max_sweeps {
        // fix (c, d): maximize over (a, b)
        let left = ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for k in 0..m {
                for l in 0..m {
                    acc += x[(i * m + k, j * m + l)] * d[k].conj() * c[l];
                }
            }
            acc
        });
        let (_, bb, aa) = top_pair(&left)?;
        a = aa;
        b = bb;
        // fix (a, b): maximize over (c, d)
        let right = ComplexMatrix::from_fn(m, m, |k, l| {
            let mut acc = ZERO;
            for i in 0..n {
                for j in 0..n {
                    acc += x[(i * m + k, j * m + l)] * b[i].conj() * a[j];
                }
            }
            acc
        });
        let (value, dd, cc) = top_pair(&right)?;
        c = cc;
        d = dd;
        let improved = value - best;
        best = value;
        if improved <= opts.tol {
            break;
        }
    }
    Ok(Quad {
        a,
        b,
        c,
        d,
        value: best,
    })
}

/// Lower bound by alternating maximization of `|⟨X(a ⊗ c), b ⊗ d⟩|` from
/// seeded starts; upper bound the operator norm.
///
/// Restart `k` draws its start from stream `k` of the seed, so the result
/// does not depend on thread scheduling and only improves as `restarts`
/// grows.
pub fn injective_norm(
    x: &ComplexMatrix,
    n: usize,
    m: usize,
    opts: &InjectiveOptions,
) -> Result<NormBound> {
    check_square(x, n, m)?;
    if opts.restarts < 1 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let upper = operator_norm(x)?;
    let runs: Vec<Result<Quad>> = (0..opts.restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_for(opts.seed, k as u64);
            let c = unit_vector(&mut rng, m);
            let d = unit_vector(&mut rng, m);
            climb(x, n, m, c, d, opts)
        })
        .collect();
    let mut best: Option<Quad> = None;
    for run in runs {
        let q = run?;
        // strict comparison keeps the lowest restart index on ties
        if best.as_ref().map_or(true, |b| q.value > b.value) {
            best = Some(q);
        }
    }
    let q = best.expect("at least one restart");
    Ok(NormBound {
        kind: NormKind::Injective,
        lower: q.value.min(upper),
        upper,
        lower_witness: LowerWitness::ProductFunctional {
            a: q.a,
            b: q.b,
            c: q.c,
            d: q.d,
        },
        upper_witness: UpperWitness::OperatorNorm,
    })
}
