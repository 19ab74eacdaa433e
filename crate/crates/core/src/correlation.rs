//! Unitary correlations at two granularities.
//!
//! A [`FullCorrelation`] stores `s(x ⊗ y)` for every `x ∈ {1, u_ij, u_ij*}`
//! and `y ∈ {1, v_kl, v_kl*}`. A [`CorrelationMatrix`] keeps only the
//! `u_ij ⊗ v_kl` block as the `nm × nm` matrix `X = Σ s(u_ij ⊗ v_kl) E_ij ⊗ E_kl`,
//! laid out with row `i*m + k` and column `j*m + l`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{operator_norm, ComplexMatrix, C64, ONE, ZERO};

/// Modulus / norm slack used by [`validate`].
pub const INVARIANT_TOL: f64 = 1e-9;

/// Generator of one side: the unit, `u_ij`, or `u_ij*` (0-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    One,
    U(usize, usize),
    UStar(usize, usize),
}

impl Generator {
    /// Number of generators for an `n × n` unitary: `2n² + 1`.
    pub fn count(n: usize) -> usize {
        2 * n * n + 1
    }

    /// Position in the order `1`, then `u_ij` row-major, then `u_ij*` row-major.
    pub fn index(self, n: usize) -> usize {
        match self {
            Generator::One => 0,
            Generator::U(i, j) => 1 + i * n + j,
            Generator::UStar(i, j) => 1 + n * n + i * n + j,
        }
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        let nn = n * n;
        match index {
            0 => Generator::One,
            k if k <= nn => Generator::U((k - 1) / n, (k - 1) % n),
            k => Generator::UStar((k - 1 - nn) / n, (k - 1 - nn) % n),
        }
    }

    pub fn all(n: usize) -> impl Iterator<Item = Generator> {
        (0..Self::count(n)).map(move |k| Self::from_index(k, n))
    }

    pub fn adjoint(self) -> Self {
        match self {
            Generator::One => Generator::One,
            Generator::U(i, j) => Generator::UStar(i, j),
            Generator::UStar(i, j) => Generator::U(i, j),
        }
    }

    /// Charge under `u ↦ e^{iθ} u`: `+1` for `u`, `-1` for `u*`, `0` for `1`.
    pub fn charge(self) -> i32 {
        match self {
            Generator::One => 0,
            Generator::U(..) => 1,
            Generator::UStar(..) => -1,
        }
    }
}

/// Which correlation set the producer claims the data came from. Advisory only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimedClass {
    QaApprox,
    QcLimit,
    Qmax,
    Loc,
    Unclassified,
}

/// Every coordinate `s(x ⊗ y)` over both generator families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullCorrelation {
    n: usize,
    m: usize,
    coords: Vec<C64>,
    pub claimed_class: ClaimedClass,
}

impl FullCorrelation {
    /// All coordinates zero except `s(1 ⊗ 1) = 1`.
    pub fn trivial(n: usize, m: usize, claimed_class: ClaimedClass) -> Self {
        let mut coords = vec![ZERO; Generator::count(n) * Generator::count(m)];
        coords[0] = ONE;
        Self {
            n,
            m,
            coords,
            claimed_class,
        }
    }

    pub fn from_coords(
        n: usize,
        m: usize,
        coords: Vec<C64>,
        claimed_class: ClaimedClass,
    ) -> Result<Self> {
        let expected = Generator::count(n) * Generator::count(m);
        if coords.len() != expected {
            return Err(Error::Shape(format!(
                "expected {expected} coordinates for (n, m) = ({n}, {m}), got {}",
                coords.len()
            )));
        }
        Ok(Self {
            n,
            m,
            coords,
            claimed_class,
        })
    }

    /// Builds a correlation from a coordinate function.
    pub fn from_fn(
        n: usize,
        m: usize,
        claimed_class: ClaimedClass,
        mut f: impl FnMut(Generator, Generator) -> C64,
    ) -> Self {
        let mut coords = Vec::with_capacity(Generator::count(n) * Generator::count(m));
        for x in Generator::all(n) {
            for y in Generator::all(m) {
                coords.push(f(x, y));
            }
        }
        Self {
            n,
            m,
            coords,
            claimed_class,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    fn slot(&self, x: Generator, y: Generator) -> usize {
        x.index(self.n) * Generator::count(self.m) + y.index(self.m)
    }

    pub fn get(&self, x: Generator, y: Generator) -> C64 {
        self.coords[self.slot(x, y)]
    }

    pub fn set(&mut self, x: Generator, y: Generator, value: C64) {
        let k = self.slot(x, y);
        self.coords[k] = value;
    }

    /// Largest `|s(x*, y*) - conj(s(x, y))|` together with `|s(1,1) - 1|`.
    pub fn state_residual(&self) -> f64 {
        let mut worst = (self.get(Generator::One, Generator::One) - ONE).norm();
        for x in Generator::all(self.n) {
            for y in Generator::all(self.m) {
                let d = self.get(x.adjoint(), y.adjoint()) - self.get(x, y).conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.n, self.m), (other.n, other.m));
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// The `u ⊗ v` block of a correlation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub n: usize,
    pub m: usize,
    pub matrix: ComplexMatrix,
    pub claimed_class: ClaimedClass,
}

impl CorrelationMatrix {
    pub fn new(
        n: usize,
        m: usize,
        matrix: ComplexMatrix,
        claimed_class: ClaimedClass,
    ) -> Result<Self> {
        if matrix.rows() != n * m || matrix.cols() != n * m {
            return Err(Error::Shape(format!(
                "a correlation on M_{n} ⊗ M_{m} is {0}x{0}, got {1}x{2}",
                n * m,
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self {
            n,
            m,
            matrix,
            claimed_class,
        })
    }

    /// `s(u_ij ⊗ v_kl)`.
    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.matrix[(i * self.m + k, j * self.m + l)]
    }

    /// The column `(j, l) = (0, 0)` as a vector in `C^n ⊗ C^m`.
    pub fn first_column(&self) -> Vec<C64> {
        self.matrix.col(0)
    }

    /// Largest modulus over entries with `j ≠ 0` or `l ≠ 0`.
    pub fn max_off_first_column(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.matrix.rows() {
            for c in 1..self.matrix.cols() {
                worst = worst.max(self.matrix[(r, c)].norm());
            }
        }
        worst
    }
}

/// Keeps the `u_ij ⊗ v_kl` block.
pub fn compress(full: &FullCorrelation) -> CorrelationMatrix {
    let (n, m) = (full.n, full.m);
    let matrix = ComplexMatrix::from_fn(n * m, n * m, |row, col| {
        let (i, k) = (row / m, row % m);
        let (j, l) = (col / m, col % m);
        full.get(Generator::U(i, j), Generator::U(k, l))
    });
    CorrelationMatrix {
        n,
        m,
        matrix,
        claimed_class: full.claimed_class,
    }
}

/// Average of the correlation over `u ↦ e^{iθ_t} u`, `v ↦ e^{-iθ_t} v` with
/// `θ_t = 2πt / K`, `t = 0..K`.
///
/// A coordinate of total charge `q ∈ {-2, …, 2}` picks up `e^{iqθ}`, and the
/// average of `e^{iqθ_t}` over the `K`-th roots of unity is exactly 1 when
/// `K | q` and exactly 0 otherwise, so the multiplier is applied in closed
/// form. With `K ≥ 3` every coordinate except the unit and the `u ⊗ v`,
/// `u* ⊗ v*` blocks vanishes.
pub fn phase_twirl(full: &FullCorrelation, k: u32) -> Result<FullCorrelation> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!(
            "phase twirl needs K >= 3 roots of unity, got {k}"
        )));
    }
    let mut out = full.clone();
    for x in Generator::all(full.n) {
        for y in Generator::all(full.m) {
            let q = x.charge() - y.charge();
            if q.rem_euclid(k as i32) != 0 {
                out.set(x, y, ZERO);
            }
        }
    }
    Ok(out)
}

/// Which side a local unitary acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Unitary tolerance for local transforms.
pub const UNITARY_TOL: f64 = 1e-10;

/// `(A ⊗ B) · X` or `X · (A ⊗ B)`.
pub fn local_unitary_transform(
    x: &CorrelationMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    side: Side,
) -> Result<CorrelationMatrix> {
    for (u, dim) in [(a, x.n), (b, x.m)] {
        if u.rows() != dim || u.cols() != dim {
            return Err(Error::Shape(format!(
                "local factor must be {dim}x{dim}, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let residual = u.unitarity_residual();
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
    }
    let ab = a.kron(b);
    let matrix = match side {
        Side::Left => ab.matmul(&x.matrix)?,
        Side::Right => x.matrix.matmul(&ab)?,
    };
    Ok(CorrelationMatrix {
        n: x.n,
        m: x.m,
        matrix,
        claimed_class: x.claimed_class,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    /// Amount by which the bound is exceeded (0 when within it).
    pub residual: f64,
    pub value: f64,
}

impl Check {
    fn at_most_one(value: f64) -> Self {
        Self {
            passed: value <= 1.0 + INVARIANT_TOL,
            residual: (value - 1.0).max(0.0),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub entry_modulus: Check,
    /// Skipped (`None`) for matrices claimed to be qmax.
    pub operator_norm: Option<Check>,
    pub first_column: Check,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.entry_modulus.passed
            && self.operator_norm.map_or(true, |c| c.passed)
            && self.first_column.passed
    }
}

/// Checks the necessary conditions every correlation matrix satisfies.
/// Never fails; numerical trouble in the norm computation is reported as a
/// failed check with infinite residual.
pub fn validate(x: &CorrelationMatrix) -> ValidationReport {
    let entry_modulus = Check::at_most_one(x.matrix.max_abs());
    let operator_norm = (x.claimed_class != ClaimedClass::Qmax).then(|| {
        match operator_norm(&x.matrix) {
            Ok(v) => Check::at_most_one(v),
            Err(_) => Check {
                passed: false,
                residual: f64::INFINITY,
                value: f64::NAN,
            },
        }
    });
    let col = x.first_column();
    let first_column =
        Check::at_most_one(col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
    ValidationReport {
        entry_modulus,
        operator_norm,
        first_column,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_enumeration_round_trips() {
        for n in 1..4 {
            for (k, g) in Generator::all(n).enumerate() {
                assert_eq!(g.index(n), k);
            }
            assert_eq!(Generator::all(n).count(), 2 * n * n + 1);
        }
    }

    #[test]
    fn zero_state_compresses_to_zero() {
        let f = FullCorrelation::trivial(2, 3, ClaimedClass::Unclassified);
        let x = compress(&f);
        assert_eq!(x.matrix, ComplexMatrix::zeros(6, 6));
        assert!(validate(&x).passed());
    }

    #[test]
    fn single_coordinate_pattern() {
        let mut f = FullCorrelation::trivial(2, 2, ClaimedClass::Unclassified);
        f.set(Generator::U(0, 0), Generator::U(0, 0), ONE);
        let x = compress(&f);
        assert_eq!(x.matrix, ComplexMatrix::unit(4, 4, 0, 0));
    }

    #[test]
    fn twirl_kills_marginals() {
        let half = C64::new(0.5, 0.0);
        let mut f = FullCorrelation::from_fn(2, 2, ClaimedClass::Unclassified, |_, _| half);
        f.set(Generator::One, Generator::One, ONE);
        let t = phase_twirl(&f, 4).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(t.get(Generator::U(i, j), Generator::One), ZERO);
                assert_eq!(t.get(Generator::One, Generator::U(i, j)), ZERO);
                assert_eq!(t.get(Generator::U(i, j), Generator::UStar(i, j)), ZERO);
                assert_eq!(t.get(Generator::U(i, j), Generator::U(j, i)), half);
            }
        }
        assert_eq!(compress(&t), compress(&f));
    }

    #[test]
    fn twirl_needs_three_roots() {
        let f = FullCorrelation::trivial(2, 2, ClaimedClass::Unclassified);
        assert!(phase_twirl(&f, 2).is_err());
        assert!(phase_twirl(&f, 3).is_ok());
    }

    #[test]
    fn starred_pair_killed_with_four_roots() {
        let mut f = FullCorrelation::trivial(2, 2, ClaimedClass::Unclassified);
        f.set(Generator::U(0, 0), Generator::UStar(0, 0), ONE);
        let t = phase_twirl(&f, 4).unwrap();
        assert_eq!(t.get(Generator::U(0, 0), Generator::UStar(0, 0)), ZERO);
    }

    #[test]
    fn validate_flags_large_entry() {
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(1, 2)] = C64::new(1.5, 0.0);
        let x = CorrelationMatrix::new(2, 2, m, ClaimedClass::Unclassified).unwrap();
        let r = validate(&x);
        assert!(!r.entry_modulus.passed);
        assert!((r.entry_modulus.residual - 0.5).abs() < 1e-15);
    }

    #[test]
    fn validate_flags_operator_norm() {
        let x = CorrelationMatrix::new(
            2,
            2,
            ComplexMatrix::identity(4).scale_real(2.0),
            ClaimedClass::QcLimit,
        )
        .unwrap();
        let r = validate(&x);
        assert!(!r.operator_norm.unwrap().passed);
        // qmax skips the norm check
        let q = CorrelationMatrix {
            claimed_class: ClaimedClass::Qmax,
            ..x
        };
        assert!(validate(&q).operator_norm.is_none());
    }

    #[test]
    fn identity_local_transform_is_noop() {
        let x = CorrelationMatrix::new(
            2,
            3,
            ComplexMatrix::from_fn(6, 6, |i, j| C64::new(i as f64 * 0.01, j as f64 * 0.02)),
            ClaimedClass::Unclassified,
        )
        .unwrap();
        let i2 = ComplexMatrix::identity(2);
        let i3 = ComplexMatrix::identity(3);
        for side in [Side::Left, Side::Right] {
            let y = local_unitary_transform(&x, &i2, &i3, side).unwrap();
            assert_eq!(y.matrix, x.matrix);
        }
        let bad = i2.scale_real(2.0);
        assert!(matches!(
            local_unitary_transform(&x, &bad, &i3, Side::Left),
            Err(Error::NotUnitary { .. })
        ));
    }
}
