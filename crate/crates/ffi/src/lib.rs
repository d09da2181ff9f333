//! C ABI for `zhstance`.
//!
//! Every function returns a [`ZsStatus`]. On failure a message is available
//! from [`zs_last_error`] on the same thread until the next call. Strings
//! handed out by the library must be released with [`zs_string_free`];
//! handles with their matching `_free` function. Panics never cross the
//! boundary; they are reported as [`ZsStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use zhstance::evaluate::{metrics, ConfusionMatrix};
use zhstance::pipeline::{Pipeline, PipelineConfig};
use zhstance::segmenter::{load_hmm, load_lexicon, Segmenter};
use zhstance::zh_convert::{load_conversion_table, to_simplified, ConversionTable};
use zhstance::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Invalid = 5,
    Panic = 6,
}

/// One-vs-rest metrics for a single positive class.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZsMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Dictionary segmenter with optional HMM and conversion table.
pub struct ZsSegmenter {
    segmenter: Segmenter,
    convert: Option<ConversionTable>,
}

pub struct ZsConverter(ConversionTable);

/// Pipeline with its lexicon, HMM and conversion table loaded.
pub struct ZsPipeline(Pipeline);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(ZsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io { .. } => ZsStatus::Io,
            Error::Parse { .. } | Error::Json(_) => ZsStatus::Parse,
            _ => ZsStatus::Invalid,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ZsStatus::NullArgument, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ZsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ZsStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(&format!("internal panic: {message}"));
            ZsStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a NUL-terminated string valid for the duration of the call.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(ZsStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

/// # Safety
/// As [`str_arg`]; a null pointer yields `None`.
unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

/// # Safety
/// `out` is null or valid for one pointer write.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(ZsStatus::Invalid, "output contains a NUL byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn put_handle<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn zs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn zs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a segmenter. `hmm_path` and `convert_table_path` may be null.
///
/// # Safety
/// String arguments are null or NUL-terminated; `out` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn zs_segmenter_new(
    dict_path: *const c_char,
    hmm_path: *const c_char,
    convert_table_path: *const c_char,
    out: *mut *mut ZsSegmenter,
) -> ZsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let lexicon = load_lexicon(str_arg(dict_path, "dict_path")?)?;
        let hmm = opt_str_arg(hmm_path, "hmm_path")?.map(load_hmm).transpose()?;
        let convert = opt_str_arg(convert_table_path, "convert_table_path")?
            .map(load_conversion_table)
            .transpose()?;
        put_handle(
            out,
            ZsSegmenter {
                segmenter: Segmenter::new(lexicon, hmm),
                convert,
            },
        );
        Ok(())
    })
}

/// Segments `text` and writes the space-joined tokens to `*out`.
///
/// # Safety
/// `seg` comes from [`zs_segmenter_new`]; `text` is NUL-terminated; `out` is
/// valid for writing.
#[no_mangle]
pub unsafe extern "C" fn zs_segmenter_cut(
    seg: *const ZsSegmenter,
    text: *const c_char,
    out: *mut *mut c_char,
) -> ZsStatus {
    guard(|| {
        let seg = seg.as_ref().ok_or_else(|| null("seg"))?;
        let text = str_arg(text, "text")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let tokens = match &seg.convert {
            Some(t) => seg.segmenter.cut(&to_simplified(text, t)),
            None => seg.segmenter.cut(text),
        };
        put_string(out, tokens.join(" "))
    })
}

/// # Safety
/// `seg` is null or comes from [`zs_segmenter_new`] and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn zs_segmenter_free(seg: *mut ZsSegmenter) {
    if !seg.is_null() {
        drop(Box::from_raw(seg));
    }
}

/// # Safety
/// `path` is NUL-terminated; `out` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn zs_converter_new(path: *const c_char, out: *mut *mut ZsConverter) -> ZsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        put_handle(out, ZsConverter(load_conversion_table(str_arg(path, "path")?)?));
        Ok(())
    })
}

/// Converts traditional characters in `text` to simplified.
///
/// # Safety
/// `conv` comes from [`zs_converter_new`]; `text` is NUL-terminated; `out`
/// is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn zs_converter_convert(
    conv: *const ZsConverter,
    text: *const c_char,
    out: *mut *mut c_char,
) -> ZsStatus {
    guard(|| {
        let conv = conv.as_ref().ok_or_else(|| null("conv"))?;
        let text = str_arg(text, "text")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, to_simplified(text, &conv.0))
    })
}

/// # Safety
/// `conv` is null or comes from [`zs_converter_new`] and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn zs_converter_free(conv: *mut ZsConverter) {
    if !conv.is_null() {
        drop(Box::from_raw(conv));
    }
}

/// Metrics for class `positive` of an `n` x `n` confusion matrix given
/// row-major in `counts` (rows are true labels, columns predictions).
///
/// # Safety
/// `counts` points to `n * n` values; `out` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn zs_metrics(counts: *const u64, n: usize, positive: usize, out: *mut ZsMetrics) -> ZsStatus {
    guard(|| {
        if counts.is_null() {
            return Err(null("counts"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if positive >= n {
            return Err(Failure(
                ZsStatus::Invalid,
                format!("positive class {positive} out of range for {n} labels"),
            ));
        }
        let cells = n
            .checked_mul(n)
            .ok_or_else(|| Failure(ZsStatus::Invalid, "matrix too large".into()))?;
        let flat = std::slice::from_raw_parts(counts, cells);
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let m = ConfusionMatrix::from_counts(labels.clone(), flat.chunks(n.max(1)).map(<[u64]>::to_vec).collect())?;
        let b = metrics(&m, &labels[positive])?;
        *out = ZsMetrics {
            accuracy: b.accuracy,
            precision: b.precision,
            recall: b.recall,
            f1: b.f1,
        };
        Ok(())
    })
}

/// Builds a pipeline from a JSON config of the same shape as the `config`
/// field of a report. Unset fields take their defaults.
///
/// # Safety
/// `config_json` is NUL-terminated; `out` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn zs_pipeline_new(config_json: *const c_char, out: *mut *mut ZsPipeline) -> ZsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config: PipelineConfig = serde_json::from_str(str_arg(config_json, "config_json")?)
            .map_err(|e| Failure(ZsStatus::Parse, format!("config: {e}")))?;
        put_handle(out, ZsPipeline(Pipeline::from_config(config)?));
        Ok(())
    })
}

/// Runs cross-validation and writes the JSON report to `*out`.
///
/// # Safety
/// `p` comes from [`zs_pipeline_new`]; `out` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn zs_pipeline_crossval(p: *const ZsPipeline, out: *mut *mut c_char) -> ZsStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("p"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = p.0.crossval_report()?;
        put_string(out, serde_json::to_string_pretty(&report).map_err(Error::from)?)
    })
}

/// Trains on the non-test accounts, scores the test accounts and writes the
/// JSON report to `*out`. The config must name a test-id file.
///
/// # Safety
/// `p` comes from [`zs_pipeline_new`]; `out` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn zs_pipeline_test(p: *const ZsPipeline, out: *mut *mut c_char) -> ZsStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("p"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = p.0.test_report()?;
        put_string(out, serde_json::to_string_pretty(&report).map_err(Error::from)?)
    })
}

/// # Safety
/// `p` is null or comes from [`zs_pipeline_new`] and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn zs_pipeline_free(p: *mut ZsPipeline) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}
