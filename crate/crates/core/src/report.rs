//! The reproduction report: every desk-scale result in one JSON document.

use rand::SeedableRng;
use serde::Serialize;

use crate::correlation::{validate, CorrelationMatrix};
use crate::embezzle::{build_protocol, closed_form_matrix, limit_correlation, overlap, TargetVector};
use crate::error::Result;
use crate::io::{correlation_csv, to_json_string};
use crate::linalg::{inner, operator_norm, svd, ComplexMatrix, C64};
use crate::norms::{loc_membership, pi_norm_matrix, sandwich_report, InjectiveOptions};
use crate::nsbox::{chsh_local_bound, chsh_value, is_nonsignalling, pr_box, to_functional, from_functional, NSBox};
use crate::qmaxcert::certify;
use crate::rng::{contraction, rng_for, unitary};

pub const REPORT_DIMS: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 3)];

#[derive(Debug, Clone, Copy)]
pub struct ReportConfig {
    pub seed: u64,
    pub r_max: usize,
    pub contractions: usize,
    /// Unitaries sampled for the convex-fit evidence.
    pub sampled_unitaries: usize,
    pub refine_iters: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            r_max: 12,
            contractions: 20,
            sampled_unitaries: 64,
            refine_iters: 8,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbezzleRow {
    pub r: usize,
    pub overlap: f64,
    pub overlap_deficit: f64,
    pub frobenius_to_limit: f64,
    pub max_off_first_column: f64,
    pub operator_norm: f64,
    pub invariants_pass: bool,
}

/// Per-`r` convergence data for the closed-form protocol.
pub fn embezzle_table(target: &TargetVector, rs: impl IntoIterator<Item = usize>) -> Result<Vec<EmbezzleRow>> {
    let limit = limit_correlation(target);
    rs.into_iter()
        .map(|r| {
            let p = build_protocol(target, r)?;
            let x = closed_form_matrix(&p);
            Ok(EmbezzleRow {
                r,
                overlap: overlap(&p),
                overlap_deficit: target.overlap_deficit_at(r as u64),
                frobenius_to_limit: (&x.matrix - &limit.matrix).frobenius_norm(),
                max_off_first_column: x.max_off_first_column(),
                operator_norm: operator_norm(&x.matrix)?,
                invariants_pass: validate(&x).passed(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LocSeparation {
    pub member: bool,
    pub pi_first_column: f64,
    pub sqrt_n: f64,
    pub pi_matrix_lower: f64,
    pub pi_matrix_upper: f64,
    pub injective_lower: f64,
    pub operator_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSummary {
    pub operator_norm: f64,
    pub min_eig: f64,
    pub kernel_residual: f64,
    pub recovery_residual: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremePointEvidence {
    pub operator_norm: f64,
    pub singular_values: Vec<f64>,
    /// Largest `|W†W − I|` entry; zero would mean `X` is unitary.
    pub unitarity_residual: f64,
    pub operator_norm_strictly_below_one: bool,
    /// `X = (W_1 + W_2)/2` with unitary `W_i`, so `X` is not extreme in the
    /// operator-norm ball.
    pub midpoint_unitarity_residual: f64,
    pub midpoint_reconstruction_error: f64,
    pub sampled_unitaries: usize,
    /// Frobenius distance from `X` to the best convex combination of the
    /// sampled unitaries.
    pub sampled_fit_distance: f64,
    pub reproduced_within_1e_3: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionSection {
    pub n: usize,
    pub m: usize,
    pub embezzlement: Vec<EmbezzleRow>,
    pub loc_separation: LocSeparation,
    pub qmax_certificates: Vec<CertificateSummary>,
    pub all_certificates_valid: bool,
    pub extreme_point_evidence: ExtremePointEvidence,
}

#[derive(Debug, Clone, Serialize)]
pub struct NsbSection {
    pub pr_box_nonsignalling: bool,
    pub pr_box_chsh: f64,
    pub deterministic_chsh_bound: f64,
    pub pr_box_local: bool,
    pub signalling_example_condition: Option<u8>,
    pub round_trip_exact: bool,
    pub mixtures_checked: usize,
    pub mixtures_nonsignalling: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub seed: u64,
    pub r_max: usize,
    pub dimensions: Vec<DimensionSection>,
    pub nsb: NsbSection,
}

/// Every contraction is the midpoint of two unitaries: with
/// `X = U diag(cos φ_t) V†`, take `W_± = U diag(e^{±iφ_t}) V†`.
pub fn midpoint_unitaries(x: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let s = svd(x)?;
    let k = s.singular_values.len();
    let build = |sign: f64| {
        ComplexMatrix::from_fn(x.rows(), x.cols(), |i, j| {
            (0..k)
                .map(|t| {
                    let phi = s.singular_values[t].clamp(0.0, 1.0).acos();
                    s.u[(i, t)] * C64::from_polar(1.0, sign * phi) * s.v[(j, t)].conj()
                })
                .sum()
        })
    };
    Ok((build(1.0), build(-1.0)))
}

fn frob_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    inner(b.as_slice(), a.as_slice()).re
}

/// Frank-Wolfe on the simplex for `min ‖Σ w_i W_i − X‖_F`.
pub fn convex_fit_distance(x: &ComplexMatrix, atoms: &[ComplexMatrix], iters: usize) -> f64 {
    let mut y = atoms[0].clone();
    for _ in 0..iters {
        let resid = &y - x;
        let (best, _) = atoms
            .iter()
            .enumerate()
            .map(|(i, w)| (i, frob_inner(w, &resid)))
            .fold((0, f64::INFINITY), |acc, (i, g)| if g < acc.1 { (i, g) } else { acc });
        let dir = &atoms[best] - &y;
        let dd = frob_inner(&dir, &dir);
        if dd == 0.0 {
            break;
        }
        let gamma = (-frob_inner(&resid, &dir) / dd).clamp(0.0, 1.0);
        if gamma == 0.0 {
            break;
        }
        y = &y + &dir.scale_real(gamma);
    }
    (&y - x).frobenius_norm()
}

fn dimension_section(n: usize, m: usize, cfg: &ReportConfig) -> Result<DimensionSection> {
    let target = TargetVector::maximally_entangled(n, m)?;
    let embezzlement = embezzle_table(&target, 1..=cfg.r_max)?;

    let limit = limit_correlation(&target);
    let cert = loc_membership(&limit)?;
    let sandwich = sandwich_report(&limit, &InjectiveOptions { seed: cfg.seed, ..Default::default() }, cfg.refine_iters)?;
    let pi = pi_norm_matrix(&limit.matrix, n, m, cfg.refine_iters)?;
    let loc_separation = LocSeparation {
        member: cert.member,
        pi_first_column: cert.pi.upper,
        sqrt_n: (n.min(m) as f64).sqrt(),
        pi_matrix_lower: pi.lower,
        pi_matrix_upper: pi.upper,
        injective_lower: sandwich.injective_lower,
        operator_norm: sandwich.operator,
    };

    let stream = (n * 10 + m) as u64;
    let mut rng = rng_for(cfg.seed, stream);
    let mut qmax_certificates = Vec::with_capacity(cfg.contractions);
    for _ in 0..cfg.contractions {
        let x = contraction(&mut rng, n * m);
        let c = certify(&x, n, m)?;
        qmax_certificates.push(CertificateSummary {
            operator_norm: operator_norm(&x)?,
            min_eig: c.min_eig,
            kernel_residual: c.kernel_residual,
            recovery_residual: c.recovery_residual,
            valid: c.valid(),
        });
    }
    let all_certificates_valid = qmax_certificates.iter().all(|c| c.valid);

    let x = &limit.matrix;
    let op = operator_norm(x)?;
    let (w1, w2) = midpoint_unitaries(x)?;
    let mid = (&w1 + &w2).scale_real(0.5);
    let mut urng = rand_chacha::ChaCha8Rng::seed_from_u64(crate::rng::mix_seed(cfg.seed, 1000 + stream));
    let atoms: Vec<ComplexMatrix> = (0..cfg.sampled_unitaries.max(1))
        .map(|_| unitary(&mut urng, n * m))
        .collect();
    let fit = convex_fit_distance(x, &atoms, 500);
    let extreme_point_evidence = ExtremePointEvidence {
        operator_norm: op,
        singular_values: svd(x)?.singular_values,
        unitarity_residual: x.unitarity_residual(),
        operator_norm_strictly_below_one: op < 1.0 - crate::correlation::INVARIANT_TOL,
        midpoint_unitarity_residual: w1.unitarity_residual().max(w2.unitarity_residual()),
        midpoint_reconstruction_error: mid.max_abs_diff(x),
        sampled_unitaries: atoms.len(),
        sampled_fit_distance: fit,
        reproduced_within_1e_3: fit <= 1e-3,
    };

    Ok(DimensionSection {
        n,
        m,
        embezzlement,
        loc_separation,
        qmax_certificates,
        all_certificates_valid,
        extreme_point_evidence,
    })
}

fn nsb_section(cfg: &ReportConfig) -> Result<NsbSection> {
    let pr = pr_box();
    let pr_report = is_nonsignalling(2, 2, pr.probabilities())?;
    let pr_chsh = chsh_value(&pr)?;
    let bound = chsh_local_bound();
    let signalling = pr.moved_mass((0, 0), (1, 0), 0, 0, 0.1);
    let sig_report = is_nonsignalling(2, 2, &signalling)?;
    let round_trip_exact = from_functional(&to_functional(&pr)?)? == pr;
    let mut rng = rng_for(cfg.seed, 77);
    let mut ok = 0;
    let count = 20;
    for _ in 0..count {
        let b = NSBox::random_local(&mut rng, 2, 2, 4)?;
        if is_nonsignalling(2, 2, b.probabilities())?.nonsignalling {
            ok += 1;
        }
    }
    Ok(NsbSection {
        pr_box_nonsignalling: pr_report.nonsignalling,
        pr_box_chsh: pr_chsh,
        deterministic_chsh_bound: bound,
        pr_box_local: pr_chsh <= bound + 1e-8,
        signalling_example_condition: sig_report.violation.map(|v| v.condition.number()),
        round_trip_exact,
        mixtures_checked: count,
        mixtures_nonsignalling: ok,
    })
}

pub fn build_report(cfg: &ReportConfig) -> Result<Report> {
    let dimensions = REPORT_DIMS
        .iter()
        .map(|&(n, m)| dimension_section(n, m, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        seed: cfg.seed,
        r_max: cfg.r_max,
        dimensions,
        nsb: nsb_section(cfg)?,
    })
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }

    /// Anything in the report that contradicts a proven statement.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for d in &self.dimensions {
            if d.embezzlement.iter().any(|row| !row.invariants_pass) {
                out.push(format!("({}, {}): embezzlement correlation fails an invariant", d.n, d.m));
            }
            if !d.all_certificates_valid {
                out.push(format!("({}, {}): a contraction failed certification", d.n, d.m));
            }
            if d.loc_separation.member {
                out.push(format!("({}, {}): entangled limit reported local", d.n, d.m));
            }
        }
        if !self.nsb.pr_box_nonsignalling || self.nsb.pr_box_local {
            out.push("PR box checks failed".into());
        }
        out
    }
}

/// CSV companion: the `(2, 2)` maximally entangled correlation at `r_max`.
pub fn report_csv(cfg: &ReportConfig) -> Result<String> {
    let target = TargetVector::maximally_entangled(2, 2)?;
    let p = build_protocol(&target, cfg.r_max)?;
    let x: CorrelationMatrix = closed_form_matrix(&p);
    Ok(correlation_csv(&x))
}
