//! C ABI for `ucorr`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` functions
//! and released by the matching `*_free`. Every fallible call returns a
//! [`UcorrStatus`]; on failure [`ucorr_last_error`] describes what happened.
//! Results are written through out-pointers, which are left untouched on
//! failure. Matrices are row-major arrays of [`UcorrComplex`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ucorr::embezzle::{self, EmbezzlementProtocol, TargetVector};
use ucorr::norms::{self, InjectiveOptions};
use ucorr::{ClaimedClass, ComplexMatrix, CorrelationMatrix, Error, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UcorrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Shape = 3,
    NoConvergence = 4,
    NotUnitVector = 5,
    MaximallyEntangled = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcorrComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for UcorrComplex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<UcorrComplex> for C64 {
    fn from(z: UcorrComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// A unit vector in `C^n ⊗ C^m`.
pub struct UcorrTarget(TargetVector);

/// An embezzlement protocol of fixed length.
pub struct UcorrProtocol(EmbezzlementProtocol);

/// A dense complex matrix.
pub struct UcorrMatrix(ComplexMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> UcorrStatus {
    match err {
        Error::Shape(_) | Error::DenseCapExceeded { .. } | Error::PatternMismatch { .. } => {
            UcorrStatus::Shape
        }
        Error::NoConvergence { .. } => UcorrStatus::NoConvergence,
        Error::NotUnitVector { .. } | Error::ZeroVector => UcorrStatus::NotUnitVector,
        Error::MaximallyEntangled => UcorrStatus::MaximallyEntangled,
        _ => UcorrStatus::InvalidArgument,
    }
}

struct Fail(UcorrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(UcorrStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> UcorrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UcorrStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            UcorrStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn square_matrix(x: &ComplexMatrix, n: usize, m: usize) -> Result<CorrelationMatrix, Fail> {
    Ok(CorrelationMatrix::new(n, m, x.clone(), ClaimedClass::Unclassified)?)
}

/// Message for the most recent failure on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ucorr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ucorr_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(
        concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes(),
    ) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Target from `n·m` row-major amplitudes `α_ik` at index `i·m + k`. The
/// vector must have unit norm to within 1e-12.
///
/// # Safety
/// `entries` must point to `n·m` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ucorr_target_new(
    entries: *const UcorrComplex,
    n: usize,
    m: usize,
    out: *mut *mut UcorrTarget,
) -> UcorrStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let len = n.checked_mul(m).ok_or_else(|| {
            Fail(UcorrStatus::InvalidArgument, "n·m overflows".into())
        })?;
        let alpha = slice(entries, len, "entries")?.iter().map(|&z| z.into()).collect();
        *out = Box::into_raw(Box::new(UcorrTarget(TargetVector::new(alpha, n, m)?)));
        Ok(())
    })
}

/// `Σ_i e_i ⊗ e_i / √min(n, m)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ucorr_target_maximally_entangled(
    n: usize,
    m: usize,
    out: *mut *mut UcorrTarget,
) -> UcorrStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let t = TargetVector::maximally_entangled(n, m)?;
        *out = Box::into_raw(Box::new(UcorrTarget(t)));
        Ok(())
    })
}

/// # Safety
/// `target` must come from a `ucorr_target_*` constructor, or be null.
#[no_mangle]
pub unsafe extern "C" fn ucorr_target_free(target: *mut UcorrTarget) {
    if !target.is_null() {
        drop(Box::from_raw(target));
    }
}

/// The rotation angle `θ` of the target.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ucorr_target_theta(
    target: *const UcorrTarget,
    theta: *mut f64,
) -> UcorrStatus {
    guard(|| {
        let t = get(target, "target")?;
        *out(theta, "theta")? = t.0.theta();
        Ok(())
    })
}

/// `1 − cos(θ/r)^r`, resolved below machine epsilon.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ucorr_target_overlap_deficit(
    target: *const UcorrTarget,
    r: u64,
    deficit: *mut f64,
) -> UcorrStatus {
    guard(|| {
        let t = get(target, "target")?;
        if r == 0 {
            return Err(Fail(UcorrStatus::InvalidArgument, "r must be positive".into()));
        }
        *out(deficit, "deficit")? = t.0.overlap_deficit_at(r);
        Ok(())
    })
}

/// Protocol of length `r ≥ 1` embezzling `target`.
///
/// # Safety
/// `target` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ucorr_protocol_new(
    target: *const UcorrTarget,
    r: usize,
    out: *mut *mut UcorrProtocol,
) -> UcorrStatus {
    guard(|| {
        let t = get(target, "target")?;
        let out = out_ptr(out)?;
        let p = embezzle::build_protocol(&t.0, r)?;
        *out = Box::into_raw(Box::new(UcorrProtocol(p)));
        Ok(())
    })
}

/// # Safety
/// `protocol` must come from [`ucorr_protocol_new`], or be null.
#[no_mangle]
pub unsafe extern "C" fn ucorr_protocol_free(protocol: *mut UcorrProtocol) {
    if !protocol.is_null() {
        drop(Box::from_raw(protocol));
    }
}

/// `|⟨e_1 ⊗ ψ ⊗ e_1, (U ⊗ V)(α ⊗ ψ)⟩|`, the embezzlement fidelity.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ucorr_protocol_overlap(
    protocol: *const UcorrProtocol,
    overlap: *mut f64,
) -> UcorrStatus {
    guard(|| {
        let p = get(protocol, "protocol")?;
        *out(overlap, "overlap")? = embezzle::overlap(&p.0);
        Ok(())
    })
}

/// The `nm × nm` correlation matrix of the protocol, from the closed form.
///
/// # Safety
/// `protocol` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ucorr_protocol_correlation(
    protocol: *const UcorrProtocol,
    out: *mut *mut UcorrMatrix,
) -> UcorrStatus {
    guard(|| {
        let p = get(protocol, "protocol")?;
        let out = out_ptr(out)?;
        let x = embezzle::closed_form_matrix(&p.0).matrix;
        *out = Box::into_raw(Box::new(UcorrMatrix(x)));
        Ok(())
    })
}

/// The `r → ∞` limit: `α` in the first column, zeros elsewhere.
///
/// # Safety
/// `target` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ucorr_limit_correlation(
    target: *const UcorrTarget,
    out: *mut *mut UcorrMatrix,
) -> UcorrStatus {
    guard(|| {
        let t = get(target, "target")?;
        let out = out_ptr(out)?;
        let x = embezzle::limit_correlation(&t.0).matrix;
        *out = Box::into_raw(Box::new(UcorrMatrix(x)));
        Ok(())
    })
}

/// Matrix from `rows·cols` row-major entries.
///
/// # Safety
/// `entries` must point to `rows·cols` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ucorr_matrix_new(
    entries: *const UcorrComplex,
    rows: usize,
    cols: usize,
    out: *mut *mut UcorrMatrix,
) -> UcorrStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let len = rows.checked_mul(cols).ok_or_else(|| {
            Fail(UcorrStatus::InvalidArgument, "rows·cols overflows".into())
        })?;
        let data = slice(entries, len, "entries")?.iter().map(|&z| z.into()).collect();
        let x = ComplexMatrix::from_row_major(rows, cols, data)?;
        *out = Box::into_raw(Box::new(UcorrMatrix(x)));
        Ok(())
    })
}

/// # Safety
/// `matrix` must come from a constructor in this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn ucorr_matrix_free(matrix: *mut UcorrMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Writes the matrix dimensions.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ucorr_matrix_shape(
    matrix: *const UcorrMatrix,
    rows: *mut usize,
    cols: *mut usize,
) -> UcorrStatus {
    guard(|| {
        let x = get(matrix, "matrix")?;
        *out(rows, "rows")? = x.0.rows();
        *out(cols, "cols")? = x.0.cols();
        Ok(())
    })
}

/// Copies the entries row-major into `buffer`, which holds `len` values.
/// Fails with `Shape` if `len` is not exactly `rows·cols`.
///
/// # Safety
/// `buffer` must be writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn ucorr_matrix_entries(
    matrix: *const UcorrMatrix,
    buffer: *mut UcorrComplex,
    len: usize,
) -> UcorrStatus {
    guard(|| {
        let x = get(matrix, "matrix")?;
        let data = x.0.as_slice();
        if len != data.len() {
            return Err(Fail(
                UcorrStatus::Shape,
                format!("buffer holds {len} values, matrix has {}", data.len()),
            ));
        }
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        let dst = std::slice::from_raw_parts_mut(buffer, len);
        for (d, s) in dst.iter_mut().zip(data) {
            *d = (*s).into();
        }
        Ok(())
    })
}

/// Largest singular value.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ucorr_operator_norm(
    matrix: *const UcorrMatrix,
    norm: *mut f64,
) -> UcorrStatus {
    guard(|| {
        let x = get(matrix, "matrix")?;
        let v = x.0.operator_norm()?;
        *out(norm, "norm")? = v;
        Ok(())
    })
}

/// Bounds on the injective norm of an `nm × nm` matrix viewed in
/// `M_n ⊗ M_m`, from `restarts` seeded alternating maximizations.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ucorr_injective_norm(
    matrix: *const UcorrMatrix,
    n: usize,
    m: usize,
    restarts: usize,
    seed: u64,
    lower: *mut f64,
    upper: *mut f64,
) -> UcorrStatus {
    guard(|| {
        let x = get(matrix, "matrix")?;
        let opts = InjectiveOptions {
            restarts,
            seed,
            ..Default::default()
        };
        let b = norms::injective_norm(&x.0, n, m, &opts)?;
        *out(lower, "lower")? = b.lower;
        *out(upper, "upper")? = b.upper;
        Ok(())
    })
}

/// Bounds on the projective norm of an `nm × nm` matrix.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ucorr_projective_norm(
    matrix: *const UcorrMatrix,
    n: usize,
    m: usize,
    lower: *mut f64,
    upper: *mut f64,
) -> UcorrStatus {
    guard(|| {
        let x = get(matrix, "matrix")?;
        let b = norms::pi_norm_matrix(&x.0, n, m, 2)?;
        *out(lower, "lower")? = b.lower;
        *out(upper, "upper")? = b.upper;
        Ok(())
    })
}

/// Local membership of a matrix supported on its first column. Writes
/// whether it is local and the projective norm of that column.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ucorr_loc_membership(
    matrix: *const UcorrMatrix,
    n: usize,
    m: usize,
    member: *mut bool,
    pi: *mut f64,
) -> UcorrStatus {
    guard(|| {
        let x = get(matrix, "matrix")?;
        let c = norms::loc_membership(&square_matrix(&x.0, n, m)?)?;
        *out(member, "member")? = c.member;
        *out(pi, "pi")? = c.pi.upper;
        Ok(())
    })
}

/// Choi certificate for membership in the operator-norm ball. Writes the
/// smallest eigenvalue of the certificate and whether it is valid.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ucorr_qmax_certify(
    matrix: *const UcorrMatrix,
    n: usize,
    m: usize,
    min_eig: *mut f64,
    valid: *mut bool,
) -> UcorrStatus {
    guard(|| {
        let x = get(matrix, "matrix")?;
        let c = ucorr::qmaxcert::certify(&x.0, n, m)?;
        *out(min_eig, "min_eig")? = c.min_eig;
        *out(valid, "valid")? = c.valid();
        Ok(())
    })
}

/// Checks a box `p(a, b | x, y)` with `n` inputs and `m` outputs per side,
/// flat index `((a·m + b)·n + x)·n + y`. `condition` receives 0 when the
/// box is non-signalling, otherwise the number (1 to 4) of the first
/// failed condition: non-negativity, normalization, Bob's marginal,
/// Alice's marginal.
///
/// # Safety
/// `probabilities` must point to `len` values; `condition` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ucorr_nsb_check(
    n: usize,
    m: usize,
    probabilities: *const f64,
    len: usize,
    condition: *mut u8,
) -> UcorrStatus {
    guard(|| {
        let p = slice(probabilities, len, "probabilities")?;
        let report = ucorr::nsbox::is_nonsignalling(n, m, p)?;
        *out(condition, "condition")? = report.violation.map_or(0, |v| v.condition.number());
        Ok(())
    })
}

unsafe fn out_ptr<'a, T>(p: *mut *mut T) -> Result<&'a mut *mut T, Fail> {
    out(p, "out")
}
