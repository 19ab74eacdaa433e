//! Exact coordinates of the shift protocol without materializing `ψ`.
//!
//! With `ψ = h_1 ⊗ … ⊗ h_r` and each side applying either the identity, a
//! right cyclic shift (`u_ij`) or a left one (`u_ij*`), the matrix elements
//! `⟨a'| X |a⟩` are products of Kronecker deltas linking neighbouring
//! positions. Sweeping the positions left to right with the linked index
//! carried in a small state gives every coordinate in `O(r · n²m² · nm)`.

use super::EmbezzlementProtocol;
use crate::correlation::{ClaimedClass, CorrelationMatrix, FullCorrelation, Generator};
use crate::linalg::{ComplexMatrix, C64, ZERO};

#[derive(Clone, Copy)]
enum Shift {
    None,
    Right,
    Left,
}

fn shift_of(g: Generator) -> (Shift, usize, usize) {
    match g {
        Generator::One => (Shift::None, 0, 0),
        Generator::U(i, j) => (Shift::Right, i, j),
        Generator::UStar(i, j) => (Shift::Left, i, j),
    }
}

/// `(ket, bra)` local indices for carry `c` in and carry `nc` out.
fn local(shift: Shift, c: usize, nc: usize) -> (usize, usize) {
    match shift {
        Shift::Right => (nc, c),
        Shift::Left => (c, nc),
        Shift::None => unreachable!(),
    }
}

fn coordinate(p: &EmbezzlementProtocol, x: Generator, y: Generator) -> C64 {
    let (n, m) = (p.n(), p.m());
    let (sa, ia, ja) = shift_of(x);
    let (sb, ib, jb) = shift_of(y);
    let da = if matches!(sa, Shift::None) { 1 } else { n };
    let db = if matches!(sb, Shift::None) { 1 } else { m };

    let mut state = vec![ZERO; da * db];
    state[(ja % da) * db + (jb % db)] = C64::new(1.0, 0.0);
    let mut next = vec![ZERO; da * db];

    for pos in 1..=p.r {
        let h = p.h(pos);
        next.iter_mut().for_each(|v| *v = ZERO);
        for ca in 0..da {
            for cb in 0..db {
                let s = state[ca * db + cb];
                if s == ZERO {
                    continue;
                }
                for na in 0..da {
                    for nb in 0..db {
                        let mut acc = ZERO;
                        // free sums only over sides that do not shift
                        let a_pairs: Vec<(usize, usize)> = match sa {
                            Shift::None => (0..n).map(|a| (a, a)).collect(),
                            _ => vec![local(sa, ca, na)],
                        };
                        let b_pairs: Vec<(usize, usize)> = match sb {
                            Shift::None => (0..m).map(|b| (b, b)).collect(),
                            _ => vec![local(sb, cb, nb)],
                        };
                        for &(a, a2) in &a_pairs {
                            for &(b, b2) in &b_pairs {
                                acc += h[a * m + b] * h[a2 * m + b2].conj();
                            }
                        }
                        next[na * db + nb] += s * acc;
                    }
                }
            }
        }
        std::mem::swap(&mut state, &mut next);
    }

    let z = p.target.phase();
    let phase = match sa {
        Shift::Right => z.conj(),
        Shift::Left => z,
        Shift::None => C64::new(1.0, 0.0),
    };
    phase * state[(ia % da) * db + (ib % db)]
}

/// Every coordinate of the protocol's correlation.
pub fn closed_form_correlation(p: &EmbezzlementProtocol) -> FullCorrelation {
    FullCorrelation::from_fn(p.n(), p.m(), ClaimedClass::QaApprox, |x, y| {
        coordinate(p, x, y)
    })
}

/// The `u ⊗ v` block only:
/// `s(u_ij ⊗ v_kl) = z̄·h_r[i,k] · conj(h_1[j,l]) · cos(θ/r)^{r-1}`.
pub fn closed_form_matrix(p: &EmbezzlementProtocol) -> CorrelationMatrix {
    let (n, m) = (p.n(), p.m());
    let chain = p.cos_step.powi(p.r as i32 - 1);
    let zbar = p.target.phase().conj();
    let hr = p.h(p.r);
    let h1 = p.h(1);
    let matrix = ComplexMatrix::from_fn(n * m, n * m, |row, col| {
        zbar * hr[row] * h1[col].conj() * chain
    });
    CorrelationMatrix {
        n,
        m,
        matrix,
        claimed_class: ClaimedClass::QaApprox,
    }
}
