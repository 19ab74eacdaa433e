use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Command, Format, RunConfig, EXIT_OK, EXIT_VIOLATION};
use crate::correlation::{compress, ClaimedClass, CorrelationMatrix};
use crate::embezzle::{
    build_protocol, closed_form_correlation, closed_form_matrix, dense_correlation, TargetVector,
    DENSE_CAP,
};
use crate::error::Error;
use crate::io::{correlation_csv, matrix_from_json, to_json_string, vector_from_json};
use crate::linalg::{operator_norm, C64};
use crate::norms::{
    injective_norm, loc_membership, pi_norm_matrix, InjectiveOptions, LocCertificate, NormBound,
    SANDWICH_TOL,
};
use crate::nsbox::{chsh_value, is_nonsignalling, pr_box, NSBox, NsReport};
use crate::qmaxcert::certify;
use crate::report::{build_report, embezzle_table, report_csv, EmbezzleRow, ReportConfig};

pub enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(violations: Vec<String>) -> CmdResult {
    if violations.is_empty() {
        Ok(EXIT_OK)
    } else {
        for v in &violations {
            eprintln!("invariant violation: {v}");
        }
        Ok(EXIT_VIOLATION)
    }
}

pub fn dispatch(cmd: Command) -> CmdResult {
    match cmd {
        Command::Embezzle {
            common,
            r,
            alpha,
            dense,
        } => embezzle(&RunConfig::from_common(&common).map_err(usage)?, r, alpha, dense),
        Command::Norm {
            common,
            matrix,
            restarts,
        } => norm(&RunConfig::from_common(&common).map_err(usage)?, &matrix, restarts),
        Command::QmaxCert { common, matrix } => {
            qmax_cert(&RunConfig::from_common(&common).map_err(usage)?, &matrix)
        }
        Command::Nsb { common, box_file } => {
            nsb(&RunConfig::from_common(&common).map_err(usage)?, box_file)
        }
        Command::Report { common, r } => report(&RunConfig::from_common(&common).map_err(usage)?, r),
    }
}

#[derive(Serialize)]
struct EmbezzleOutput {
    n: usize,
    m: usize,
    alpha: Vec<C64>,
    theta: f64,
    rows: Vec<EmbezzleRow>,
    /// Largest coordinate difference between closed form and dense model, per r.
    #[serde(skip_serializing_if = "Option::is_none")]
    dense_max_diff: Option<Vec<f64>>,
}

fn embezzle(cfg: &RunConfig, r: usize, alpha: Option<PathBuf>, dense: bool) -> CmdResult {
    if r == 0 {
        return Err(usage("--r must be at least 1"));
    }
    let target = match alpha {
        Some(path) => {
            let v = vector_from_json(&read(&path)?)?;
            if v.len() != cfg.n * cfg.m {
                return Err(usage(format!(
                    "target has {} entries but n·m = {}",
                    v.len(),
                    cfg.n * cfg.m
                )));
            }
            TargetVector::new(v, cfg.n, cfg.m)?
        }
        None => TargetVector::maximally_entangled(cfg.n, cfg.m)?,
    };
    if dense {
        let required = ((cfg.n * cfg.m) as u128).checked_pow(r as u32 + 1);
        if required.map_or(true, |q| q > DENSE_CAP as u128) {
            return Err(usage(format!(
                "--dense at r = {r} exceeds the dense cap of {DENSE_CAP} amplitudes"
            )));
        }
    }
    let tol = cfg.tol.unwrap_or(1e-10);
    let rows = embezzle_table(&target, 1..=r)?;
    let mut violations: Vec<String> = rows
        .iter()
        .filter(|row| !row.invariants_pass)
        .map(|row| format!("r = {}: correlation fails an invariant", row.r))
        .collect();
    let dense_max_diff = if dense {
        let mut diffs = Vec::with_capacity(r);
        for k in 1..=r {
            let p = build_protocol(&target, k)?;
            let d = closed_form_correlation(&p).max_abs_diff(&dense_correlation(&p)?);
            if d > tol {
                violations.push(format!("r = {k}: closed form and dense model differ by {d:e}"));
            }
            diffs.push(d);
        }
        Some(diffs)
    } else {
        None
    };
    let text = match cfg.format {
        Format::Json => to_json_string(&EmbezzleOutput {
            n: cfg.n,
            m: cfg.m,
            alpha: target.alpha().to_vec(),
            theta: target.theta(),
            rows,
            dense_max_diff,
        })?,
        Format::Csv => correlation_csv(&closed_form_matrix(&build_protocol(&target, r)?)),
    };
    emit(cfg, &text)?;
    finish(violations)
}

#[derive(Serialize)]
struct NormOutput {
    n: usize,
    m: usize,
    injective: NormBound,
    operator: f64,
    projective: NormBound,
    #[serde(skip_serializing_if = "Option::is_none")]
    loc: Option<LocCertificate>,
    sandwich_ordered: bool,
}

fn load_matrix(cfg: &RunConfig, path: &Path) -> Result<crate::linalg::ComplexMatrix, Failure> {
    let x = matrix_from_json(&read(path)?)?;
    let nm = cfg.n * cfg.m;
    if x.rows() != nm || x.cols() != nm {
        return Err(usage(format!(
            "matrix is {}x{} but (n, m) = ({}, {}) needs {nm}x{nm}",
            x.rows(),
            x.cols(),
            cfg.n,
            cfg.m
        )));
    }
    Ok(x)
}

fn norm(cfg: &RunConfig, path: &Path, restarts: usize) -> CmdResult {
    let x = load_matrix(cfg, path)?;
    let (n, m) = (cfg.n, cfg.m);
    let tol = cfg.tol.unwrap_or(SANDWICH_TOL);
    let opts = InjectiveOptions {
        restarts,
        seed: cfg.seed,
        ..Default::default()
    };
    let eps = injective_norm(&x, n, m, &opts)?;
    let op = operator_norm(&x)?;
    let pi = pi_norm_matrix(&x, n, m, 8)?;
    let corr = CorrelationMatrix::new(n, m, x, ClaimedClass::Unclassified)?;
    let loc = loc_membership(&corr).ok();
    let mut violations = Vec::new();
    if eps.lower > op + tol || op > pi.upper + tol || pi.lower > pi.upper + tol {
        violations.push(format!(
            "norm ordering broken: injective {} / operator {} / projective [{}, {}]",
            eps.lower, op, pi.lower, pi.upper
        ));
    }
    let text = match cfg.format {
        Format::Json => to_json_string(&NormOutput {
            n,
            m,
            injective: eps,
            operator: op,
            projective: pi,
            loc,
            sandwich_ordered: violations.is_empty(),
        })?,
        Format::Csv => {
            let mut s = String::from("quantity,lower,upper\n");
            s += &format!("injective,{:.16e},{:.16e}\n", eps.lower, eps.upper);
            s += &format!("operator,{op:.16e},{op:.16e}\n");
            s += &format!("projective,{:.16e},{:.16e}\n", pi.lower, pi.upper);
            if let Some(l) = &loc {
                s += &format!("pi_first_column,{:.16e},{:.16e}\n", l.pi.lower, l.pi.upper);
            }
            s
        }
    };
    emit(cfg, &text)?;
    finish(violations)
}

#[derive(Serialize)]
struct CertOutput {
    n: usize,
    m: usize,
    operator_norm: f64,
    min_eig: f64,
    kernel_residual: f64,
    recovery_residual: f64,
    trace_p: f64,
    valid: bool,
}

fn qmax_cert(cfg: &RunConfig, path: &Path) -> CmdResult {
    let x = load_matrix(cfg, path)?;
    let cert = certify(&x, cfg.n, cfg.m)?;
    let text = match cfg.format {
        Format::Json => to_json_string(&CertOutput {
            n: cfg.n,
            m: cfg.m,
            operator_norm: operator_norm(&x)?,
            min_eig: cert.min_eig,
            kernel_residual: cert.kernel_residual,
            recovery_residual: cert.recovery_residual,
            trace_p: cert.p.trace().re,
            valid: cert.valid(),
        })?,
        Format::Csv => correlation_csv(&compress(&cert.induced_correlation())),
    };
    emit(cfg, &text)?;
    let violations = if cert.valid() {
        Vec::new()
    } else {
        vec![format!(
            "certificate rejected: min eigenvalue {:e}, kernel residual {:e}, recovery residual {:e}",
            cert.min_eig, cert.kernel_residual, cert.recovery_residual
        )]
    };
    finish(violations)
}

#[derive(Deserialize)]
struct BoxFile {
    n: usize,
    m: usize,
    p: Vec<f64>,
}

#[derive(Serialize)]
struct NsbOutput {
    n: usize,
    m: usize,
    report: NsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    chsh: Option<f64>,
}

fn nsb(cfg: &RunConfig, box_file: Option<PathBuf>) -> CmdResult {
    let (n, m, p) = match box_file {
        Some(path) => {
            let b: BoxFile = serde_json::from_str(&read(&path)?)
                .map_err(|e| usage(format!("bad box JSON: {e}")))?;
            (b.n, b.m, b.p)
        }
        None => {
            let pr = pr_box();
            (2, 2, pr.probabilities().to_vec())
        }
    };
    let report = is_nonsignalling(n, m, &p)?;
    let chsh = if (n, m) == (2, 2) && report.nonsignalling {
        Some(chsh_value(&NSBox::new(n, m, p)?)?)
    } else {
        None
    };
    let violations = match &report.violation {
        Some(v) => vec![format!("condition {} fails: {}", v.condition.number(), v.detail)],
        None => Vec::new(),
    };
    let text = match cfg.format {
        Format::Json => to_json_string(&NsbOutput { n, m, report, chsh })?,
        Format::Csv => {
            let mut s = String::from("nonsignalling,condition,amount\n");
            match &report.violation {
                Some(v) => s += &format!("false,{},{:.16e}\n", v.condition.number(), v.amount),
                None => s += "true,,\n",
            }
            s
        }
    };
    emit(cfg, &text)?;
    finish(violations)
}

fn report(cfg: &RunConfig, r: usize) -> CmdResult {
    if r == 0 {
        return Err(usage("--r must be at least 1"));
    }
    let rc = ReportConfig {
        seed: cfg.seed,
        r_max: r,
        ..Default::default()
    };
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    let rep = build_report(&rc)?;
    let json = rep.to_json()?;
    let csv = report_csv(&rc)?;
    for (name, text) in [("report.json", &json), ("report.csv", &csv)] {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    finish(rep.violations())
}
