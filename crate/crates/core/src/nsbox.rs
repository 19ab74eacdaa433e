//! Non-signalling boxes `p(a, b | x, y)` with `n` inputs and `m` outputs
//! per party, and their identification with functionals
//! `s(e_ax ⊗ f_by) = p(a, b | x, y)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NONNEG_TOL: f64 = 1e-12;
pub const EQUALITY_TOL: f64 = 1e-10;
pub const MAX_SIZE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NsCondition {
    /// `p(a, b | x, y) ≥ 0`.
    Nonnegativity,
    /// `Σ_ab p(a, b | x, y) = 1`.
    Normalization,
    /// `Σ_a p(a, b | x, y)` does not depend on `x`.
    BobMarginal,
    /// `Σ_b p(a, b | x, y)` does not depend on `y`.
    AliceMarginal,
}

impl NsCondition {
    /// Position in the usual list of four conditions, 1-based.
    pub fn number(self) -> u8 {
        match self {
            NsCondition::Nonnegativity => 1,
            NsCondition::Normalization => 2,
            NsCondition::BobMarginal => 3,
            NsCondition::AliceMarginal => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: NsCondition,
    pub amount: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsReport {
    pub nonsignalling: bool,
    /// First failed condition, checked in order 1 to 4.
    pub violation: Option<Violation>,
}

fn idx(n: usize, m: usize, a: usize, b: usize, x: usize, y: usize) -> usize {
    ((a * m + b) * n + x) * n + y
}

fn check_dims(n: usize, m: usize, len: usize) -> Result<()> {
    if n == 0 || m == 0 || n > MAX_SIZE || m > MAX_SIZE {
        return Err(Error::InvalidParameter(format!(
            "box sizes must be in 1..={MAX_SIZE}, got n = {n}, m = {m}"
        )));
    }
    if len != m * m * n * n {
        return Err(Error::Shape(format!(
            "a box with {n} inputs and {m} outputs has {} entries, got {len}",
            m * m * n * n
        )));
    }
    Ok(())
}

/// Checks the four non-signalling conditions on a raw table indexed
/// `((a·m + b)·n + x)·n + y`.
pub fn is_nonsignalling(n: usize, m: usize, p: &[f64]) -> Result<NsReport> {
    check_dims(n, m, p.len())?;
    let fail = |condition, amount, detail| NsReport {
        nonsignalling: false,
        violation: Some(Violation {
            condition,
            amount,
            detail,
        }),
    };
    for a in 0..m {
        for b in 0..m {
            for x in 0..n {
                for y in 0..n {
                    let v = p[idx(n, m, a, b, x, y)];
                    if !v.is_finite() || v < -NONNEG_TOL {
                        return Ok(fail(
                            NsCondition::Nonnegativity,
                            -v,
                            format!("p({a},{b}|{x},{y}) = {v}"),
                        ));
                    }
                }
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            let total: f64 = (0..m)
                .flat_map(|a| (0..m).map(move |b| (a, b)))
                .map(|(a, b)| p[idx(n, m, a, b, x, y)])
                .sum();
            if (total - 1.0).abs() > EQUALITY_TOL {
                return Ok(fail(
                    NsCondition::Normalization,
                    (total - 1.0).abs(),
                    format!("total probability {total} at inputs ({x},{y})"),
                ));
            }
        }
    }
    for b in 0..m {
        for y in 0..n {
            let reference: f64 = (0..m).map(|a| p[idx(n, m, a, b, 0, y)]).sum();
            for x in 1..n {
                let s: f64 = (0..m).map(|a| p[idx(n, m, a, b, x, y)]).sum();
                if (s - reference).abs() > EQUALITY_TOL {
                    return Ok(fail(
                        NsCondition::BobMarginal,
                        (s - reference).abs(),
                        format!("marginal of output {b} at input {y} changes with the other input ({x} vs 0)"),
                    ));
                }
            }
        }
    }
    for a in 0..m {
        for x in 0..n {
            let reference: f64 = (0..m).map(|b| p[idx(n, m, a, b, x, 0)]).sum();
            for y in 1..n {
                let s: f64 = (0..m).map(|b| p[idx(n, m, a, b, x, y)]).sum();
                if (s - reference).abs() > EQUALITY_TOL {
                    return Ok(fail(
                        NsCondition::AliceMarginal,
                        (s - reference).abs(),
                        format!("marginal of output {a} at input {x} changes with the other input ({y} vs 0)"),
                    ));
                }
            }
        }
    }
    Ok(NsReport {
        nonsignalling: true,
        violation: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NSBox {
    n: usize,
    m: usize,
    p: Vec<f64>,
}

impl NSBox {
    /// Validates the table; an invalid one is rejected with the first
    /// violated condition.
    pub fn new(n: usize, m: usize, p: Vec<f64>) -> Result<Self> {
        let report = is_nonsignalling(n, m, &p)?;
        if let Some(v) = report.violation {
            return Err(Error::InvalidBox(format!(
                "condition {} fails: {}",
                v.condition.number(),
                v.detail
            )));
        }
        Ok(Self { n, m, p })
    }

    pub fn uniform(n: usize, m: usize) -> Result<Self> {
        check_dims(n, m, m * m * n * n)?;
        Self::new(n, m, vec![1.0 / (m * m) as f64; m * m * n * n])
    }

    /// Outputs `(f(x), g(y))` with certainty.
    pub fn deterministic(n: usize, m: usize, f: &[usize], g: &[usize]) -> Result<Self> {
        if f.len() != n || g.len() != n || f.iter().chain(g).any(|&o| o >= m) {
            return Err(Error::InvalidParameter(
                "response functions must map each input to an output".into(),
            ));
        }
        check_dims(n, m, m * m * n * n)?;
        let mut p = vec![0.0; m * m * n * n];
        for x in 0..n {
            for y in 0..n {
                p[idx(n, m, f[x], g[y], x, y)] = 1.0;
            }
        }
        Self::new(n, m, p)
    }

    /// All `m^{2n}` deterministic boxes.
    pub fn all_deterministic(n: usize, m: usize) -> Result<Vec<Self>> {
        let count = m.pow(n as u32);
        let decode = |mut k: usize| -> Vec<usize> {
            (0..n)
                .map(|_| {
                    let d = k % m;
                    k /= m;
                    d
                })
                .collect()
        };
        let mut out = Vec::with_capacity(count * count);
        for fi in 0..count {
            for gi in 0..count {
                out.push(Self::deterministic(n, m, &decode(fi), &decode(gi))?);
            }
        }
        Ok(out)
    }

    /// Convex combination of `boxes` with weights normalized to sum 1.
    pub fn mixture(boxes: &[Self], weights: &[f64]) -> Result<Self> {
        let first = boxes
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        if boxes.len() != weights.len() || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidParameter("weights must be non-negative, one per box".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParameter("weights sum to zero".into()));
        }
        let mut p = vec![0.0; first.p.len()];
        for (bx, w) in boxes.iter().zip(weights) {
            if (bx.n, bx.m) != (first.n, first.m) {
                return Err(Error::Shape("boxes of different sizes".into()));
            }
            for (acc, v) in p.iter_mut().zip(&bx.p) {
                *acc += v * w / total;
            }
        }
        Self::new(first.n, first.m, p)
    }

    /// Random convex combination of `k` random deterministic boxes.
    pub fn random_local<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize, k: usize) -> Result<Self> {
        let boxes: Vec<Self> = (0..k.max(1))
            .map(|_| {
                let f: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
                let g: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
                Self::deterministic(n, m, &f, &g)
            })
            .collect::<Result<_>>()?;
        let weights: Vec<f64> = boxes.iter().map(|_| rng.gen_range(0.01..1.0)).collect();
        Self::mixture(&boxes, &weights)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[idx(self.n, self.m, a, b, x, y)]
    }

    /// `Σ_b p(a, b | x, y)`, independent of `y`.
    pub fn alice_marginal(&self, a: usize, x: usize) -> f64 {
        (0..self.m).map(|b| self.get(a, b, x, 0)).sum()
    }

    /// `Σ_a p(a, b | x, y)`, independent of `x`.
    pub fn bob_marginal(&self, b: usize, y: usize) -> f64 {
        (0..self.m).map(|a| self.get(a, b, 0, y)).sum()
    }

    /// Raw table with `delta` moved from `(a, b)` to `(a2, b2)` at inputs
    /// `(x, y)`; the result is generally not a valid box.
    pub fn moved_mass(&self, from: (usize, usize), to: (usize, usize), x: usize, y: usize, delta: f64) -> Vec<f64> {
        let mut p = self.p.clone();
        p[idx(self.n, self.m, from.0, from.1, x, y)] -= delta;
        p[idx(self.n, self.m, to.0, to.1, x, y)] += delta;
        p
    }
}

/// `p(a, b | x, y) = 1/2` when `a ⊕ b = x·y`, else 0.
pub fn pr_box() -> NSBox {
    let mut p = vec![0.0; 16];
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    if a ^ b == x & y {
                        p[idx(2, 2, a, b, x, y)] = 0.5;
                    }
                }
            }
        }
    }
    NSBox::new(2, 2, p).expect("PR box is non-signalling")
}

/// `Σ_{x,y} (−1)^{xy} E(x, y)` with `E = Σ_{a,b} (−1)^{a⊕b} p(a, b | x, y)`,
/// for two inputs and two outputs.
pub fn chsh_value(bx: &NSBox) -> Result<f64> {
    if (bx.n, bx.m) != (2, 2) {
        return Err(Error::InvalidParameter("CHSH needs two inputs and two outputs".into()));
    }
    let mut s = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let sign = if x & y == 1 { -1.0 } else { 1.0 };
            for a in 0..2 {
                for b in 0..2 {
                    let parity = if a ^ b == 1 { -1.0 } else { 1.0 };
                    s += sign * parity * bx.get(a, b, x, y);
                }
            }
        }
    }
    Ok(s)
}

/// Largest CHSH value over the deterministic boxes, which bounds every
/// local box because the value is linear.
pub fn chsh_local_bound() -> f64 {
    NSBox::all_deterministic(2, 2)
        .expect("2x2 boxes")
        .iter()
        .map(|b| chsh_value(b).expect("2x2"))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The functional `s(e_ax ⊗ f_by) = p(a, b | x, y)` on the coproduct pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsFunctional {
    pub n: usize,
    pub m: usize,
    /// Same layout as the box table.
    pub coefficients: Vec<f64>,
    /// `s(1)`, the common value of `Σ_ab s(e_ax ⊗ f_by)` over all `(x, y)`.
    pub unit: f64,
}

impl NsFunctional {
    pub fn coefficient(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.coefficients[idx(self.n, self.m, a, b, x, y)]
    }

    /// Positive exactly when every coordinate is non-negative.
    pub fn is_positive(&self) -> bool {
        self.coefficients.iter().all(|c| *c >= -NONNEG_TOL)
    }
}

pub fn to_functional(bx: &NSBox) -> Result<NsFunctional> {
    let report = is_nonsignalling(bx.n, bx.m, &bx.p)?;
    if let Some(v) = report.violation {
        return Err(Error::InvalidBox(v.detail));
    }
    let (n, m) = (bx.n, bx.m);
    let mut units = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let mut s = 0.0;
            for a in 0..m {
                for b in 0..m {
                    s += bx.get(a, b, x, y);
                }
            }
            units.push(s);
        }
    }
    let unit = units[0];
    if units.iter().any(|u| (u - unit).abs() > EQUALITY_TOL) {
        return Err(Error::InvalidBox("s(1) depends on the inputs".into()));
    }
    Ok(NsFunctional {
        n,
        m,
        coefficients: bx.p.clone(),
        unit,
    })
}

pub fn from_functional(f: &NsFunctional) -> Result<NSBox> {
    NSBox::new(f.n, f.m, f.coefficients.clone())
}
