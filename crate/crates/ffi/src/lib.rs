//! C interface to `philap`.
//!
//! Families are built into opaque handles and released with the matching
//! `_free` function. Every fallible call returns a [`PhilapStatus`]; on
//! failure the message is available from [`philap_last_error`] on the same
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use philap::families::{OddRational, PhiSpec, PowerSum, PowerTerm, PsiSpec};
use philap::radial::{sweep_radii, ModelSpace};
use philap::verdict::{classify, critical_dimensions, Condition, LiouvilleConclusion, Verdict};
use philap::Error;

/// Opaque operator function `phi`.
pub struct PhilapPhi(PhiSpec);

/// Opaque reaction coefficient `psi`.
pub struct PhilapPsi(PsiSpec);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhilapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidSpec = 2,
    Unsupported = 3,
    Precondition = 4,
    Numeric = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhilapVerdictKind {
    NotApplicable = 0,
    EstimateHolds = 1,
    Liouville = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhilapCondition {
    None = 0,
    Phi1 = 1,
    Phi2 = 2,
    Psi2 = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhilapConclusion {
    None = 0,
    /// Constant, equal to one of the square roots of the zeros of `psi`.
    Constant = 1,
    AnyConstant = 2,
    NoPositiveBoundedSolution = 3,
}

/// Infinite values are IEEE infinities; `theta_big` is NaN when the reaction
/// condition was not reached.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhilapVerdict {
    pub kind: PhilapVerdictKind,
    pub failed: PhilapCondition,
    pub conclusion: PhilapConclusion,
    pub boundary: bool,
    pub margin: f64,
    pub l: f64,
    pub d: f64,
    pub gamma: f64,
    pub big_gamma: f64,
    pub theta_big: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhilapSweepRow {
    pub radius: f64,
    pub c_hat: f64,
    pub harnack_log: f64,
    pub positive_ok: bool,
    pub residual_max: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> PhilapStatus {
    match e {
        Error::InvalidSpec(_) => PhilapStatus::InvalidSpec,
        Error::UnsupportedFamily(_) => PhilapStatus::Unsupported,
        Error::Precondition(_) => PhilapStatus::Precondition,
        _ => PhilapStatus::Numeric,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (PhilapStatus, String)>) -> PhilapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PhilapStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PhilapStatus::Panic
        }
    }
}

fn lib(e: Error) -> (PhilapStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PhilapStatus, String) {
    (PhilapStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `out` must be null or valid for a pointer write.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), (PhilapStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length, or 0 when there
/// is none.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn philap_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn philap_phi_constant_one(out: *mut *mut PhilapPhi) -> PhilapStatus {
    guard(|| emit(out, PhilapPhi(PhiSpec::ConstantOne)))
}

/// `phi(t) = t^{p/2-1}`, the p-Laplacian.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn philap_phi_power_law(p: f64, out: *mut *mut PhilapPhi) -> PhilapStatus {
    guard(|| emit(out, PhilapPhi(PhiSpec::power_law(p).map_err(lib)?)))
}

/// `phi(t) = sum w_i t^{p_i/2-1}` over `len` terms.
///
/// # Safety
/// `weights` and `exponents` must be valid for `len` reads, `out` for a
/// pointer write.
#[no_mangle]
pub unsafe extern "C" fn philap_phi_sum_of_powers(
    weights: *const f64,
    exponents: *const f64,
    len: usize,
    out: *mut *mut PhilapPhi,
) -> PhilapStatus {
    guard(|| {
        if weights.is_null() || exponents.is_null() {
            return Err(null("weights or exponents"));
        }
        let ws = std::slice::from_raw_parts(weights, len);
        let ps = std::slice::from_raw_parts(exponents, len);
        let terms = ws.iter().zip(ps).map(|(&weight, &exponent)| PowerTerm { weight, exponent }).collect();
        emit(out, PhilapPhi(PhiSpec::SumOfPowers(PowerSum::normalized(terms).map_err(lib)?)))
    })
}

/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn philap_phi_exponential(out: *mut *mut PhilapPhi) -> PhilapStatus {
    guard(|| emit(out, PhilapPhi(PhiSpec::Exponential)))
}

/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn philap_phi_mean_curvature(out: *mut *mut PhilapPhi) -> PhilapStatus {
    guard(|| emit(out, PhilapPhi(PhiSpec::MeanCurvature)))
}

/// # Safety
/// `phi` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn philap_phi_free(phi: *mut PhilapPhi) {
    if !phi.is_null() {
        drop(Box::from_raw(phi));
    }
}

fn psi_handle(psi: PsiSpec) -> Result<PhilapPsi, (PhilapStatus, String)> {
    psi.validate().map_err(lib)?;
    Ok(PhilapPsi(psi))
}

/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn philap_psi_zero(out: *mut *mut PhilapPsi) -> PhilapStatus {
    guard(|| emit(out, PhilapPsi(PsiSpec::Zero)))
}

/// `psi(u^2) u = a u^q`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn philap_psi_power(a: f64, q: f64, out: *mut *mut PhilapPsi) -> PhilapStatus {
    guard(|| emit(out, psi_handle(PsiSpec::Power { a, q })?))
}

/// `psi(u^2) u = u^m - u^k` with `m < k`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn philap_psi_double_power(m: f64, k: f64, out: *mut *mut PhilapPsi) -> PhilapStatus {
    guard(|| emit(out, psi_handle(PsiSpec::DoublePower { m, k })?))
}

/// `psi(u^2) u = a u^q (log u)^m` with `m = m_num/m_den` (both odd) and
/// `a m < 0`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn philap_psi_log_power(a: f64, q: f64, m_num: i64, m_den: i64, out: *mut *mut PhilapPsi) -> PhilapStatus {
    guard(|| {
        let m = OddRational::new(m_num, m_den).map_err(lib)?;
        emit(out, psi_handle(PsiSpec::LogPower { a, q, m })?)
    })
}

/// `psi(t) = A t^p + B t^q + C t log t + D`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn philap_psi_general_sum(
    a: f64,
    p: f64,
    b: f64,
    q: f64,
    c: f64,
    d: f64,
    out: *mut *mut PhilapPsi,
) -> PhilapStatus {
    guard(|| emit(out, psi_handle(PsiSpec::GeneralSum { a, p, b, q, c, d })?))
}

/// # Safety
/// `psi` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn philap_psi_free(psi: *mut PhilapPsi) {
    if !psi.is_null() {
        drop(Box::from_raw(psi));
    }
}

fn verdict_record(v: &Verdict) -> PhilapVerdict {
    let d = v.degree();
    let (kind, failed, conclusion) = match v {
        Verdict::NotApplicable { failed, .. } => {
            let c = match failed {
                Condition::Phi1 => PhilapCondition::Phi1,
                Condition::Phi2 => PhilapCondition::Phi2,
                Condition::Psi2 => PhilapCondition::Psi2,
            };
            (PhilapVerdictKind::NotApplicable, c, PhilapConclusion::None)
        }
        Verdict::EstimateHolds(_) => (PhilapVerdictKind::EstimateHolds, PhilapCondition::None, PhilapConclusion::None),
        Verdict::Liouville { conclusion, .. } => {
            let c = match conclusion {
                LiouvilleConclusion::ConstantSolution { .. } => PhilapConclusion::Constant,
                LiouvilleConclusion::AnyConstant => PhilapConclusion::AnyConstant,
                LiouvilleConclusion::NoPositiveBoundedSolution => PhilapConclusion::NoPositiveBoundedSolution,
            };
            (PhilapVerdictKind::Liouville, PhilapCondition::None, c)
        }
    };
    PhilapVerdict {
        kind,
        failed,
        conclusion,
        boundary: v.is_boundary(),
        margin: v.margin().to_f64(),
        l: d.l.to_f64(),
        d: d.d.to_f64(),
        gamma: d.gamma.to_f64(),
        big_gamma: d.big_gamma.to_f64(),
        theta_big: v.coupling().map_or(f64::NAN, |c| c.theta_big.to_f64()),
    }
}

/// Classifies the equation `div(phi(|grad u|^2) grad u) + psi(u^2) u = 0` in
/// dimension `n`. With `liouville` set, nonnegative Ricci curvature and
/// bounded solutions are assumed and the conclusion is filled in.
///
/// # Safety
/// `phi` and `psi` must be live handles, `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn philap_classify(
    phi: *const PhilapPhi,
    psi: *const PhilapPsi,
    n: u32,
    liouville: bool,
    out: *mut PhilapVerdict,
) -> PhilapStatus {
    guard(|| {
        if phi.is_null() || psi.is_null() || out.is_null() {
            return Err(null("phi, psi or out"));
        }
        let v = classify(&(*phi).0, &(*psi).0, n, liouville).map_err(lib)?;
        *out = verdict_record(&v);
        Ok(())
    })
}

/// Critical dimensions `N1 >= N2` for extreme exponents `p_min <= p_max`;
/// infinite when the exponents coincide.
///
/// # Safety
/// `n1` and `n2` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn philap_critical_dimensions(p_min: f64, p_max: f64, n1: *mut f64, n2: *mut f64) -> PhilapStatus {
    guard(|| {
        if n1.is_null() || n2.is_null() {
            return Err(null("n1 or n2"));
        }
        if !(p_min > 1.0 && p_min <= p_max && p_max.is_finite()) {
            return Err((PhilapStatus::InvalidSpec, format!("need 1 < p_min <= p_max, got {p_min}, {p_max}")));
        }
        let (a, b) = critical_dimensions(p_min, p_max);
        *n1 = a.to_f64();
        *n2 = b.to_f64();
        Ok(())
    })
}

/// Radial solutions with `u(0) = u0` on the model space of dimension `n` and
/// curvature `-k`, one per radius, each integrated over `[0, 2R]` with step
/// about `h`. Writes `len` rows.
///
/// # Safety
/// `phi` and `psi` must be live handles; `radii` valid for `len` reads and
/// `rows` for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn philap_radial_sweep(
    phi: *const PhilapPhi,
    psi: *const PhilapPsi,
    n: u32,
    k: f64,
    u0: f64,
    radii: *const f64,
    len: usize,
    h: f64,
    rows: *mut PhilapSweepRow,
) -> PhilapStatus {
    guard(|| {
        if phi.is_null() || psi.is_null() || radii.is_null() || rows.is_null() {
            return Err(null("phi, psi, radii or rows"));
        }
        let space = ModelSpace::new(n, k).map_err(lib)?;
        let radii = std::slice::from_raw_parts(radii, len);
        let out = sweep_radii(&(*phi).0, &(*psi).0, space, u0, radii, h).map_err(lib)?;
        for (i, r) in out.iter().enumerate() {
            *rows.add(i) = PhilapSweepRow {
                radius: r.radius,
                c_hat: r.c_hat,
                harnack_log: r.harnack_log,
                positive_ok: r.positive_ok,
                residual_max: r.residual_max,
            };
        }
        Ok(())
    })
}
