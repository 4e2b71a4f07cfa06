//! C interface to the `qnahm` engine.
//!
//! Every function returns a [`QnStatus`] or a pointer that is null on
//! failure; the message of the last failure on the calling thread is
//! available from [`qn_last_error`]. Strings returned to the caller are
//! owned by the caller and released with [`qn_string_free`]. Series and
//! reports are opaque handles released with their own `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qnahm::cartan::RationalMatrix;
use qnahm::dsl::load_spec;
use qnahm::identities::{run_builtin, verify_case, BuiltinParams, VerifyReport};
use qnahm::nahm::{nahm_sum, NahmSpec};
use qnahm::qseries::{SeriesDump, XSeries};
use qnahm::rational::{fmt_rational, int, parse_rational, Rational};
use serde_json::Value;

/// Result codes. The first five agree with the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QnStatus {
    Ok = 0,
    Mismatch = 1,
    ParseError = 2,
    InvalidSpec = 3,
    Insufficient = 4,
    NullPointer = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

impl QnStatus {
    fn from_code(code: i32) -> QnStatus {
        match code {
            0 => QnStatus::Ok,
            1 => QnStatus::Mismatch,
            2 => QnStatus::ParseError,
            4 => QnStatus::Insufficient,
            _ => QnStatus::InvalidSpec,
        }
    }
}

/// A truncated series in `x` and fractional powers of `q`.
pub struct QnSeries(XSeries);

/// The outcome of verifying one identity.
pub struct QnReport(VerifyReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

struct Fail(QnStatus, String);

type FResult<T> = Result<T, Fail>;

fn fail<T>(st: QnStatus, msg: impl Into<String>) -> FResult<T> {
    Err(Fail(st, msg.into()))
}

fn engine(e: qnahm::Error) -> Fail {
    Fail(QnStatus::from_code(e.exit_code()), e.to_string())
}

/// Runs `f`, turning failures and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> FResult<QnStatus>) -> QnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(st)) => st,
        Ok(Err(Fail(st, msg))) => {
            set_error(msg);
            st
        }
        Err(_) => {
            set_error("internal panic");
            QnStatus::Panic
        }
    }
}

fn guard_ptr<T>(f: impl FnOnce() -> FResult<*mut T>) -> *mut T {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(p)) => p,
        Ok(Err(Fail(_, msg))) => {
            set_error(msg);
            ptr::null_mut()
        }
        Err(_) => {
            set_error("internal panic");
            ptr::null_mut()
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FResult<&'a str> {
    if p.is_null() {
        return fail(QnStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p).to_str().or_else(|_| fail(QnStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn out_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

unsafe fn rationals(num: *const i64, den: *const i64, n: usize, what: &str) -> FResult<Vec<Rational>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if num.is_null() {
        return fail(QnStatus::NullPointer, format!("{what} numerators are null"));
    }
    let nums = std::slice::from_raw_parts(num, n);
    let dens = if den.is_null() { None } else { Some(std::slice::from_raw_parts(den, n)) };
    (0..n)
        .map(|i| {
            let d = dens.map_or(1, |d| d[i]);
            if d == 0 {
                return fail(QnStatus::InvalidSpec, format!("{what}[{i}] has a zero denominator"));
            }
            Ok(Rational::new(nums[i].into(), d.into()))
        })
        .collect()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread. Valid until the next call
/// into the library from the same thread; never null.
#[no_mangle]
pub extern "C" fn qn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Nahm sum `Σ q^{½nᵀAn + bᵀn + c} / Π (q)_{n_i}` below `q^order`.
///
/// `a_num`/`a_den` hold the `k×k` matrix row by row, `b_num`/`b_den` hold
/// `k` entries. Any denominator array may be null, meaning all ones; `b_num`
/// may be null for `b = 0`. The matrix must be positive definite.
///
/// # Safety
/// Non-null arrays must hold the stated number of elements; `out` must be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qn_nahm_sum(
    k: usize,
    a_num: *const i64,
    a_den: *const i64,
    b_num: *const i64,
    b_den: *const i64,
    c_num: i64,
    c_den: i64,
    order: i64,
    out: *mut *mut QnSeries,
) -> QnStatus {
    guard(|| {
        if out.is_null() {
            return fail(QnStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        if k == 0 {
            return fail(QnStatus::InvalidSpec, "matrix dimension must be positive");
        }
        if c_den == 0 {
            return fail(QnStatus::InvalidSpec, "c has a zero denominator");
        }
        let flat = rationals(a_num, a_den, k * k, "a")?;
        let rows: Vec<Vec<Rational>> = flat.chunks(k).map(<[Rational]>::to_vec).collect();
        let b = if b_num.is_null() { vec![int(0); k] } else { rationals(b_num, b_den, k, "b")? };
        let a = RationalMatrix::from_rows(rows).map_err(engine)?;
        let spec = NahmSpec::new(a)
            .and_then(|s| s.with_b(b))
            .map_err(engine)?
            .with_c(Rational::new(c_num.into(), c_den.into()));
        *out = Box::into_raw(Box::new(QnSeries(nahm_sum(&spec, &int(order)))));
        Ok(QnStatus::Ok)
    })
}

/// One side (`side` 0 for the left, 1 for the right) of the single identity
/// in a `.qid` text, below `q^order`; `order <= 0` uses the file's order.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qn_expand_spec(text: *const c_char, side: i32, order: i64, out: *mut *mut QnSeries) -> QnStatus {
    guard(|| {
        if out.is_null() {
            return fail(QnStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let text = str_arg(text, "text")?;
        let mut cases = load_spec(text).map_err(|d| Fail(QnStatus::from_code(d.exit_code()), d.to_string()))?;
        if cases.len() != 1 {
            return fail(QnStatus::InvalidSpec, format!("expected one identity, found {}", cases.len()));
        }
        let case = cases.remove(0);
        let t = if order > 0 { int(order) } else { case.trunc.clone() };
        let s = match side {
            0 => case.lhs_series(&t),
            1 => case.rhs_series(&t),
            _ => return fail(QnStatus::InvalidSpec, "side must be 0 (lhs) or 1 (rhs)"),
        }
        .map_err(engine)?;
        *out = Box::into_raw(Box::new(QnSeries(s)));
        Ok(QnStatus::Ok)
    })
}

/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qn_series_free(s: *mut QnSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// The series as JSON: `{"trunc": {"num", "den"}, "terms": [[x, e_num, e_den, c_num, c_den], ...]}`.
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qn_series_json(s: *const QnSeries) -> *mut c_char {
    guard_ptr(|| {
        let Some(s) = s.as_ref() else { return fail(QnStatus::NullPointer, "series is null") };
        let json = serde_json::to_string(&SeriesDump::from_xseries(&s.0)).map_err(|e| Fail(QnStatus::Panic, e.to_string()))?;
        Ok(out_string(json))
    })
}

/// Coefficient of `x^x_deg q^(exp_num/exp_den)` as `p` or `p/q`; null when
/// the exponent is at or beyond the truncation.
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qn_series_coeff_str(s: *const QnSeries, x_deg: i64, exp_num: i64, exp_den: i64) -> *mut c_char {
    guard_ptr(|| {
        let Some(s) = s.as_ref() else { return fail(QnStatus::NullPointer, "series is null") };
        if exp_den == 0 {
            return fail(QnStatus::InvalidSpec, "zero exponent denominator");
        }
        match s.0.coeff(x_deg, &Rational::new(exp_num.into(), exp_den.into())) {
            Some(c) => Ok(out_string(fmt_rational(&c))),
            None => fail(QnStatus::Insufficient, "exponent is beyond the truncation"),
        }
    })
}

/// 1 when both series agree below the smaller truncation, 0 when they do
/// not, -1 if either handle is null.
///
/// # Safety
/// Both arguments must be live handles or null.
#[no_mangle]
pub unsafe extern "C" fn qn_series_equal(a: *const QnSeries, b: *const QnSeries) -> i32 {
    match (a.as_ref(), b.as_ref()) {
        (Some(a), Some(b)) => i32::from(a.0.first_mismatch(&b.0).is_none()),
        _ => {
            set_error("series is null");
            -1
        }
    }
}

fn params_from_json(v: &Value) -> FResult<BuiltinParams> {
    let obj = match v {
        Value::Null => return Ok(BuiltinParams::default()),
        Value::Object(o) => o,
        _ => return fail(QnStatus::InvalidSpec, "params must be a JSON object"),
    };
    let bad = |k: &str| Fail(QnStatus::InvalidSpec, format!("bad value for `{k}`"));
    let text = |k: &str, v: &Value| -> FResult<String> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(bad(k)),
        }
    };
    let mut p = BuiltinParams::default();
    for (k, v) in obj {
        let s = text(k, v)?;
        let rat = || parse_rational(&s).ok_or_else(|| bad(k));
        let uint = || s.parse::<usize>().map_err(|_| bad(k));
        match k.as_str() {
            "k" => p.k = Some(uint()?),
            "lambda" => p.lambda = Some(rat()?),
            "which" => p.which = Some(s),
            "a" => p.a = Some(rat()?),
            "s" => p.s = Some(uint()?),
            "i" => p.i = Some(uint()?),
            "n" => p.n = Some(s.parse().map_err(|_| bad(k))?),
            "r" => p.r = Some(s.parse().map_err(|_| bad(k))?),
            "case" => p.case = Some(s),
            "reading" => p.reading = Some(s.parse().map_err(engine)?),
            other => return fail(QnStatus::InvalidSpec, format!("unknown parameter `{other}`")),
        }
    }
    Ok(p)
}

/// Verifies a builtin family. `params_json` is a JSON object such as
/// `{"k": 3, "lambda": "1/2", "which": "3"}` or null; `order <= 0` uses the
/// family default; `raw` keeps eta-style prefactors. On return `*out` holds
/// a report even when the identity does not match; the status is the
/// report's.
///
/// # Safety
/// `family` must be a NUL-terminated string, `params_json` one or null, and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qn_verify_builtin(
    family: *const c_char,
    params_json: *const c_char,
    order: i64,
    raw: bool,
    out: *mut *mut QnReport,
) -> QnStatus {
    guard(|| {
        if out.is_null() {
            return fail(QnStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let family = str_arg(family, "family")?;
        let params = if params_json.is_null() {
            BuiltinParams::default()
        } else {
            let v: Value = serde_json::from_str(str_arg(params_json, "params_json")?)
                .map_err(|e| Fail(QnStatus::ParseError, format!("params_json: {e}")))?;
            params_from_json(&v)?
        };
        let t = (order > 0).then(|| int(order));
        let rep = run_builtin(family, &params, t.as_ref(), raw);
        let st = QnStatus::from_code(rep.exit_code());
        if let Some(e) = &rep.error {
            set_error(e.message.clone());
        }
        *out = Box::into_raw(Box::new(QnReport(rep)));
        Ok(st)
    })
}

/// # Safety
/// `r` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qn_report_status(r: *const QnReport) -> QnStatus {
    match r.as_ref() {
        Some(r) => QnStatus::from_code(r.0.exit_code()),
        None => {
            set_error("report is null");
            QnStatus::NullPointer
        }
    }
}

/// The report as JSON.
///
/// # Safety
/// `r` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qn_report_json(r: *const QnReport) -> *mut c_char {
    guard_ptr(|| {
        let Some(r) = r.as_ref() else { return fail(QnStatus::NullPointer, "report is null") };
        Ok(out_string(serde_json::to_string(&r.0).map_err(|e| Fail(QnStatus::Panic, e.to_string()))?))
    })
}

/// # Safety
/// `r` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qn_report_free(r: *mut QnReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Verifies every identity of a `.qid` text. `*json_out` receives a JSON
/// array of reports, or null when the text does not parse or bind; the
/// status is the worst over all identities.
///
/// # Safety
/// `text` must be a NUL-terminated string and `json_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qn_verify_spec_json(text: *const c_char, order: i64, json_out: *mut *mut c_char) -> QnStatus {
    guard(|| {
        if json_out.is_null() {
            return fail(QnStatus::NullPointer, "json_out is null");
        }
        *json_out = ptr::null_mut();
        let text = str_arg(text, "text")?;
        let cases = load_spec(text).map_err(|d| Fail(QnStatus::from_code(d.exit_code()), d.to_string()))?;
        let t = (order > 0).then(|| int(order));
        let reports: Vec<VerifyReport> = cases.iter().map(|c| verify_case(c, t.as_ref())).collect();
        let code = reports.iter().map(VerifyReport::exit_code).max().unwrap_or(0);
        *json_out = out_string(serde_json::to_string(&reports).map_err(|e| Fail(QnStatus::Panic, e.to_string()))?);
        Ok(QnStatus::from_code(code))
    })
}
