//! C ABI for the graphcert library.
//!
//! The surface mirrors the CLI: analyze a graph (text or file), verify
//! a certificate against a graph, and evaluate fidelity bounds. Results
//! travel through an opaque analysis handle; strings returned from
//! accessor functions are owned by the handle and stay valid until
//! `gc_analysis_free`. Error details for the most recent failed call on
//! the current thread are available via `gc_last_error`.
//!
//! Status codes match the CLI exit codes: 0 ok, 1 parse, 2 not covered,
//! 3 internal, 4 rejected, plus 5 for null or non-UTF-8 arguments.

use graphcert::analysis;
use graphcert::bounds;
use graphcert::certificate::{self, Verdict};
use graphcert::graph::parse_graph;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

pub const GC_OK: i32 = 0;
pub const GC_ERR_PARSE: i32 = 1;
pub const GC_NOT_COVERED: i32 = 2;
pub const GC_ERR_INTERNAL: i32 = 3;
pub const GC_REJECTED: i32 = 4;
pub const GC_ERR_ARGUMENT: i32 = 5;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("interior NUL removed");
    });
}

/// Message for the most recent failure on this thread. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn gc_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Result of analyzing one graph. Opaque; free with `gc_analysis_free`.
pub struct GcAnalysis {
    covered: bool,
    report_json: CString,
    certificate_json: Option<CString>,
    case_label: CString,
    delta_max: f64,
    f_min: f64,
}

unsafe fn c_str_arg<'a>(ptr: *const c_char) -> Result<&'a str, i32> {
    if ptr.is_null() {
        set_error("null pointer argument");
        return Err(GC_ERR_ARGUMENT);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        GC_ERR_ARGUMENT
    })
}

fn run_analysis(graph_text: &str, source: Option<String>) -> Result<Box<GcAnalysis>, i32> {
    let graph = parse_graph(graph_text).map_err(|e| {
        set_error(&e.to_string());
        GC_ERR_PARSE
    })?;
    let report = analysis::analyze(&graph, source).map_err(|e| {
        set_error(&e.to_string());
        GC_ERR_INTERNAL
    })?;
    let covered = report.covered;
    let case_label = report
        .normalization
        .as_ref()
        .map(|n| n.case.to_string())
        .unwrap_or_else(|| "not_applicable".to_string());
    let (delta_max, f_min) = report
        .fidelity
        .as_ref()
        .map(|f| (f.delta_max, f.f_min))
        .unwrap_or((f64::NAN, f64::NAN));
    let certificate_json = report
        .certificate
        .as_ref()
        .map(|c| CString::new(certificate::to_json(c)).expect("JSON has no NUL"));
    let report_json = CString::new(report.to_json()).expect("JSON has no NUL");
    Ok(Box::new(GcAnalysis {
        covered,
        report_json,
        certificate_json,
        case_label: CString::new(case_label).expect("label has no NUL"),
        delta_max,
        f_min,
    }))
}

/// Analyzes a graph given as text in the graph file format.
///
/// On success writes a handle to `out` and returns 0. Returns 2 (and
/// still writes a handle carrying the report) when the graph is not
/// covered. Other codes leave `out` untouched.
///
/// # Safety
/// `graph_text` must point to a NUL-terminated string and `out` to a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn gc_analyze_text(
    graph_text: *const c_char,
    out: *mut *mut GcAnalysis,
) -> i32 {
    if out.is_null() {
        set_error("null output pointer");
        return GC_ERR_ARGUMENT;
    }
    let text = match c_str_arg(graph_text) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match run_analysis(text, None) {
        Ok(handle) => {
            let covered = handle.covered;
            *out = Box::into_raw(handle);
            if covered {
                GC_OK
            } else {
                set_error("graph not covered by the non-preparability argument");
                GC_NOT_COVERED
            }
        }
        Err(code) => code,
    }
}

/// Like `gc_analyze_text`, reading the graph from a file.
///
/// # Safety
/// `path` must point to a NUL-terminated string and `out` to a writable
/// pointer slot.
#[no_mangle]
pub unsafe extern "C" fn gc_analyze_file(path: *const c_char, out: *mut *mut GcAnalysis) -> i32 {
    if out.is_null() {
        set_error("null output pointer");
        return GC_ERR_ARGUMENT;
    }
    let path = match c_str_arg(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            set_error(&format!("cannot read {path}: {e}"));
            return GC_ERR_PARSE;
        }
    };
    match run_analysis(&text, Some(path.to_string())) {
        Ok(handle) => {
            let covered = handle.covered;
            *out = Box::into_raw(handle);
            if covered {
                GC_OK
            } else {
                set_error("graph not covered by the non-preparability argument");
                GC_NOT_COVERED
            }
        }
        Err(code) => code,
    }
}

/// Frees an analysis handle. Passing NULL is a no-op.
///
/// # Safety
/// `handle` must come from an analyze call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gc_analysis_free(handle: *mut GcAnalysis) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// 1 when the analysis produced a certificate, 0 otherwise.
///
/// # Safety
/// `handle` must be a live analysis handle.
#[no_mangle]
pub unsafe extern "C" fn gc_analysis_covered(handle: *const GcAnalysis) -> i32 {
    i32::from((*handle).covered)
}

/// The JSON report; owned by the handle.
///
/// # Safety
/// `handle` must be a live analysis handle.
#[no_mangle]
pub unsafe extern "C" fn gc_analysis_report_json(handle: *const GcAnalysis) -> *const c_char {
    (*handle).report_json.as_ptr()
}

/// The certificate JSON, or NULL when the graph was not covered; owned
/// by the handle.
///
/// # Safety
/// `handle` must be a live analysis handle.
#[no_mangle]
pub unsafe extern "C" fn gc_analysis_certificate_json(handle: *const GcAnalysis) -> *const c_char {
    match &(*handle).certificate_json {
        Some(json) => json.as_ptr(),
        None => ptr::null(),
    }
}

/// The case family label ("case1" ... "case4"); owned by the handle.
///
/// # Safety
/// `handle` must be a live analysis handle.
#[no_mangle]
pub unsafe extern "C" fn gc_analysis_case(handle: *const GcAnalysis) -> *const c_char {
    (*handle).case_label.as_ptr()
}

/// Fidelity floor above which nearby states are excluded; NaN when the
/// graph was not covered.
///
/// # Safety
/// `handle` must be a live analysis handle.
#[no_mangle]
pub unsafe extern "C" fn gc_analysis_f_min(handle: *const GcAnalysis) -> f64 {
    (*handle).f_min
}

/// Largest excluded deviation; NaN when the graph was not covered.
///
/// # Safety
/// `handle` must be a live analysis handle.
#[no_mangle]
pub unsafe extern "C" fn gc_analysis_delta_max(handle: *const GcAnalysis) -> f64 {
    (*handle).delta_max
}

fn run_verification(cert_text: &str, graph_text: &str) -> i32 {
    let graph = match parse_graph(graph_text) {
        Ok(g) => g,
        Err(e) => {
            set_error(&e.to_string());
            return GC_ERR_PARSE;
        }
    };
    let cert = match certificate::from_json(cert_text) {
        Ok(c) => c,
        Err(e) => {
            set_error(&e.to_string());
            return GC_REJECTED;
        }
    };
    match certificate::verify_against_graph(&cert, &graph) {
        Verdict::Accept => GC_OK,
        Verdict::Reject(r) => {
            set_error(&r.to_string());
            GC_REJECTED
        }
    }
}

/// Verifies a certificate (JSON text) against a graph (format text).
/// Returns 0 on acceptance, 4 with `gc_last_error` detail on rejection.
///
/// # Safety
/// Both pointers must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn gc_verify_text(
    certificate_json: *const c_char,
    graph_text: *const c_char,
) -> i32 {
    let cert = match c_str_arg(certificate_json) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let graph = match c_str_arg(graph_text) {
        Ok(t) => t,
        Err(code) => return code,
    };
    run_verification(cert, graph)
}

/// Verifies a certificate file against a graph file.
///
/// # Safety
/// Both pointers must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn gc_verify_files(
    certificate_path: *const c_char,
    graph_path: *const c_char,
) -> i32 {
    let cert_path = match c_str_arg(certificate_path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let graph_path = match c_str_arg(graph_path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let cert = match std::fs::read_to_string(cert_path) {
        Ok(t) => t,
        Err(e) => {
            set_error(&format!("cannot read {cert_path}: {e}"));
            return GC_ERR_PARSE;
        }
    };
    let graph = match std::fs::read_to_string(graph_path) {
        Ok(t) => t,
        Err(e) => {
            set_error(&format!("cannot read {graph_path}: {e}"));
            return GC_ERR_PARSE;
        }
    };
    run_verification(&cert, &graph)
}

/// Fidelity radius for prime dimension `d` and overlap parameter
/// `q_overlap`; writes delta_max and f_min through the output pointers.
///
/// # Safety
/// Output pointers must be writable or NULL (the value is then
/// discarded).
#[no_mangle]
pub unsafe extern "C" fn gc_fidelity_bound(
    d: u32,
    q_overlap: u32,
    out_delta_max: *mut f64,
    out_f_min: *mut f64,
) -> i32 {
    match bounds::fidelity_threshold(d, q_overlap) {
        Ok(b) => {
            if !out_delta_max.is_null() {
                *out_delta_max = b.delta_max;
            }
            if !out_f_min.is_null() {
                *out_f_min = b.f_min;
            }
            GC_OK
        }
        Err(e) => {
            set_error(&e.to_string());
            GC_ERR_ARGUMENT
        }
    }
}

/// Fidelity radius in the large-dimension limit.
///
/// # Safety
/// Output pointers must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn gc_fidelity_bound_limit(
    q_overlap: u32,
    out_delta_max: *mut f64,
    out_f_min: *mut f64,
) -> i32 {
    match bounds::fidelity_threshold_limit(q_overlap) {
        Ok(b) => {
            if !out_delta_max.is_null() {
                *out_delta_max = b.delta_max;
            }
            if !out_f_min.is_null() {
                *out_f_min = b.f_min;
            }
            GC_OK
        }
        Err(e) => {
            set_error(&e.to_string());
            GC_ERR_ARGUMENT
        }
    }
}
