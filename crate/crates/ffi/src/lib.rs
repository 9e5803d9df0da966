//! C bindings for the thaiprep normalizer, tokenizer and metrics.
//!
//! Every fallible function returns a [`ThaiprepStatus`]; on failure the
//! message is available from `thaiprep_last_error()` on the same thread.
//! Strings returned through out-pointers are owned by the caller and must
//! be released with `thaiprep_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use thaiprep::corpus_io::PipelineConfig;
use thaiprep::metrics::{boundary_prf, perplexity, BoundaryLabels};
use thaiprep::normalizer::Normalizer;
use thaiprep::tokenizer::Tokenizer;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThaiprepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Panic = 5,
}

/// Boundary precision/recall/F1 with raw counts.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ThaiprepPrf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

/// Opaque normalizer handle.
pub struct ThaiprepNormalizer(Normalizer);

/// Opaque tokenizer handle.
pub struct ThaiprepTokenizer(Tokenizer);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    let message = message.into().replace('\0', "\\0");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(message).expect("NULs replaced")));
}

fn fail(status: ThaiprepStatus, message: impl Into<String>) -> ThaiprepStatus {
    set_last_error(message);
    status
}

fn from_core(err: thaiprep::Error) -> ThaiprepStatus {
    let status = if err.is_user_error() {
        match err {
            thaiprep::Error::Read { .. } => ThaiprepStatus::Io,
            _ => ThaiprepStatus::InvalidArgument,
        }
    } else {
        ThaiprepStatus::Io
    };
    fail(status, err.to_string())
}

/// Runs `f`, turning panics into `ThaiprepStatus::Panic`.
fn guard(f: impl FnOnce() -> ThaiprepStatus) -> ThaiprepStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(ThaiprepStatus::Panic, format!("internal error: {message}"))
        }
    }
}

/// # Safety
/// `ptr` must be null or point to a NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, ThaiprepStatus> {
    if ptr.is_null() {
        return Err(fail(ThaiprepStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(ThaiprepStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn write_string(out: *mut *mut c_char, s: String) -> ThaiprepStatus {
    if out.is_null() {
        return fail(ThaiprepStatus::NullPointer, "output pointer is null");
    }
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            ThaiprepStatus::Ok
        }
        Err(_) => fail(ThaiprepStatus::InvalidArgument, "result contains a NUL byte"),
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn thaiprep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn thaiprep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn thaiprep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `config_toml` must be null (defaults) or NUL-terminated.
unsafe fn config_from(config_toml: *const c_char) -> Result<PipelineConfig, ThaiprepStatus> {
    if config_toml.is_null() {
        return Ok(PipelineConfig::default());
    }
    PipelineConfig::from_toml_str(read_str(config_toml, "config")?).map_err(from_core)
}

/// Creates a normalizer. `config_toml` is the text of a config file, or
/// null for defaults.
///
/// # Safety
/// `config_toml` must be null or NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thaiprep_normalizer_new(
    config_toml: *const c_char,
    out: *mut *mut ThaiprepNormalizer,
) -> ThaiprepStatus {
    guard(|| {
        if out.is_null() {
            return fail(ThaiprepStatus::NullPointer, "output pointer is null");
        }
        let config = match config_from(config_toml) {
            Ok(c) => c,
            Err(status) => return status,
        };
        match Normalizer::new(&config) {
            Ok(n) => {
                *out = Box::into_raw(Box::new(ThaiprepNormalizer(n)));
                ThaiprepStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `normalizer` must be null or a handle from `thaiprep_normalizer_new`.
#[no_mangle]
pub unsafe extern "C" fn thaiprep_normalizer_free(normalizer: *mut ThaiprepNormalizer) {
    if !normalizer.is_null() {
        drop(Box::from_raw(normalizer));
    }
}

/// Normalizes `text`; the result goes to `*out`.
///
/// # Safety
/// `normalizer` must be a live handle, `text` NUL-terminated, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thaiprep_normalize(
    normalizer: *const ThaiprepNormalizer,
    text: *const c_char,
    out: *mut *mut c_char,
) -> ThaiprepStatus {
    guard(|| {
        let Some(normalizer) = normalizer.as_ref() else {
            return fail(ThaiprepStatus::NullPointer, "normalizer is null");
        };
        match read_str(text, "text") {
            Ok(text) => write_string(out, normalizer.0.normalize_text(text)),
            Err(status) => status,
        }
    })
}

/// Creates a tokenizer over the lexicon files in `lexicon_paths`.
///
/// # Safety
/// `lexicon_paths` must point to `n_paths` NUL-terminated strings (it may
/// be null when `n_paths` is 0); `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thaiprep_tokenizer_new(
    lexicon_paths: *const *const c_char,
    n_paths: usize,
    out: *mut *mut ThaiprepTokenizer,
) -> ThaiprepStatus {
    guard(|| {
        if out.is_null() {
            return fail(ThaiprepStatus::NullPointer, "output pointer is null");
        }
        if lexicon_paths.is_null() && n_paths > 0 {
            return fail(ThaiprepStatus::NullPointer, "lexicon path list is null");
        }
        let mut config = PipelineConfig::default();
        for i in 0..n_paths {
            match read_str(*lexicon_paths.add(i), "lexicon path") {
                Ok(p) => config.lexicon_paths.push(PathBuf::from(p)),
                Err(status) => return status,
            }
        }
        match Tokenizer::from_config(&config) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(ThaiprepTokenizer(t)));
                ThaiprepStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `tokenizer` must be null or a handle from `thaiprep_tokenizer_new`.
#[no_mangle]
pub unsafe extern "C" fn thaiprep_tokenizer_free(tokenizer: *mut ThaiprepTokenizer) {
    if !tokenizer.is_null() {
        drop(Box::from_raw(tokenizer));
    }
}

/// Tokenizes `text` into a JSON array of `{surface, kind, start, end}`
/// objects (char offsets).
///
/// # Safety
/// `tokenizer` must be a live handle, `text` NUL-terminated, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thaiprep_tokenize_json(
    tokenizer: *const ThaiprepTokenizer,
    text: *const c_char,
    out: *mut *mut c_char,
) -> ThaiprepStatus {
    guard(|| {
        let Some(tokenizer) = tokenizer.as_ref() else {
            return fail(ThaiprepStatus::NullPointer, "tokenizer is null");
        };
        match read_str(text, "text") {
            Ok(text) => {
                let stream = tokenizer.0.tokenize(text);
                let json = serde_json::to_string(&stream.tokens).expect("tokens serialize");
                write_string(out, json)
            }
            Err(status) => status,
        }
    })
}

/// Tokenizes `text` into segmented form: tokens joined by `|`, or by a
/// space where the text had whitespace.
///
/// # Safety
/// `tokenizer` must be a live handle, `text` NUL-terminated, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thaiprep_tokenize_segmented(
    tokenizer: *const ThaiprepTokenizer,
    text: *const c_char,
    out: *mut *mut c_char,
) -> ThaiprepStatus {
    guard(|| {
        let Some(tokenizer) = tokenizer.as_ref() else {
            return fail(ThaiprepStatus::NullPointer, "tokenizer is null");
        };
        match read_str(text, "text") {
            Ok(text) => write_string(out, tokenizer.0.tokenize(text).segmented()),
            Err(status) => status,
        }
    })
}

/// `exp(mean_nll)`; fails on negative or non-finite input.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thaiprep_perplexity(mean_nll: f64, out: *mut f64) -> ThaiprepStatus {
    guard(|| {
        if out.is_null() {
            return fail(ThaiprepStatus::NullPointer, "output pointer is null");
        }
        match perplexity(mean_nll) {
            Ok(p) => {
                *out = p;
                ThaiprepStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Boundary P/R/F1 of two label arrays of length `len` (nonzero = boundary).
///
/// # Safety
/// `predicted` and `gold` must point to `len` bytes each (or be null when
/// `len` is 0); `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn thaiprep_boundary_prf(
    predicted: *const u8,
    gold: *const u8,
    len: usize,
    out: *mut ThaiprepPrf,
) -> ThaiprepStatus {
    guard(|| {
        if out.is_null() || (len > 0 && (predicted.is_null() || gold.is_null())) {
            return fail(ThaiprepStatus::NullPointer, "label or output pointer is null");
        }
        let labels = |ptr: *const u8| -> BoundaryLabels {
            if len == 0 {
                BoundaryLabels::default()
            } else {
                std::slice::from_raw_parts(ptr, len).iter().map(|&b| b != 0).collect()
            }
        };
        match boundary_prf(&labels(predicted), &labels(gold)) {
            Ok(r) => {
                *out = ThaiprepPrf {
                    precision: r.precision,
                    recall: r.recall,
                    f1: r.f1,
                    tp: r.tp,
                    fp: r.fp,
                    fn_: r.fn_,
                };
                ThaiprepStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}
