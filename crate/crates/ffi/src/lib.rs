//! C ABI for evomine.
//!
//! Every fallible call returns an [`EvmStatus`]; on failure the message is
//! available from [`evm_last_error`] on the same thread. Handles are opaque
//! and must be released with their `_free` function. Strings returned
//! through out-pointers are owned by the caller and released with
//! [`evm_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use evomine::config::{from_settings, RunConfig};
use evomine::pipeline;
use evomine::stream::{load_stream, parse_stream};
use evomine::{is_subgraph, Error, Pattern, Snapshot};
use libc::c_char;

/// Status codes. `EVM_STATUS_CONFIG`, `EVM_STATUS_PARSE` and
/// `EVM_STATUS_INTERNAL` match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvmStatus {
    Ok = 0,
    Config = 1,
    Parse = 2,
    Internal = 3,
    NullArgument = 4,
    InvalidUtf8 = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// A loaded snapshot stream.
pub struct EvmStream {
    snapshots: Vec<Snapshot>,
}

/// Accumulated `key=value` settings, validated on every set.
pub struct EvmConfig {
    settings: Vec<(String, String)>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: EvmStatus, msg: impl Into<String>) -> EvmStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> EvmStatus {
    let status = match e.exit_code() {
        1 => EvmStatus::Config,
        2 => EvmStatus::Parse,
        _ => EvmStatus::Internal,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> EvmStatus) -> EvmStatus {
    panic::catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| fail(EvmStatus::Panic, "panic inside evomine"))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, EvmStatus> {
    if s.is_null() {
        return Err(fail(EvmStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(EvmStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn resolve(config: &EvmConfig) -> Result<RunConfig, EvmStatus> {
    from_settings(
        config
            .settings
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str())),
    )
    .map_err(from_error)
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn evm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn evm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a stream file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evm_stream_load(
    path: *const c_char,
    out: *mut *mut EvmStream,
) -> EvmStatus {
    guard(|| {
        if out.is_null() {
            return fail(EvmStatus::NullArgument, "out is null");
        }
        let path = tri!(text(path, "path"));
        let snapshots = tri!(load_stream(Path::new(path)).map_err(|e| from_error(e.into())));
        *out = Box::into_raw(Box::new(EvmStream { snapshots }));
        EvmStatus::Ok
    })
}

/// Parses stream text held in memory.
///
/// # Safety
/// `data` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evm_stream_parse(
    data: *const c_char,
    out: *mut *mut EvmStream,
) -> EvmStatus {
    guard(|| {
        if out.is_null() {
            return fail(EvmStatus::NullArgument, "out is null");
        }
        let data = tri!(text(data, "data"));
        let snapshots = tri!(parse_stream(data.as_bytes()).map_err(|e| from_error(e.into())));
        *out = Box::into_raw(Box::new(EvmStream { snapshots }));
        EvmStatus::Ok
    })
}

/// Number of snapshots, 0 for a null handle.
///
/// # Safety
/// `stream` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn evm_stream_len(stream: *const EvmStream) -> usize {
    stream.as_ref().map_or(0, |s| s.snapshots.len())
}

/// # Safety
/// `stream` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn evm_stream_free(stream: *mut EvmStream) {
    if !stream.is_null() {
        drop(Box::from_raw(stream));
    }
}

/// A config holding the defaults.
#[no_mangle]
pub extern "C" fn evm_config_new() -> *mut EvmConfig {
    Box::into_raw(Box::new(EvmConfig {
        settings: Vec::new(),
    }))
}

/// Applies one setting, using the command-line flag names without dashes
/// (`alpha`, `window-size`, `theta-bins`, ...). A setting that makes the
/// config invalid is rejected and leaves it unchanged.
///
/// # Safety
/// `config` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn evm_config_set(
    config: *mut EvmConfig,
    key: *const c_char,
    value: *const c_char,
) -> EvmStatus {
    guard(|| {
        let Some(config) = config.as_mut() else {
            return fail(EvmStatus::NullArgument, "config is null");
        };
        let key = tri!(text(key, "key"));
        let value = tri!(text(value, "value"));
        config.settings.push((key.to_string(), value.to_string()));
        if let Err(status) = resolve(config) {
            config.settings.pop();
            return status;
        }
        EvmStatus::Ok
    })
}

/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn evm_config_free(config: *mut EvmConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the full pipeline and writes the four report files to `out_dir`.
/// A null `out_dir` uses the config's `out` setting.
///
/// # Safety
/// `stream` and `config` must be live handles; `out_dir` null or a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn evm_run(
    stream: *const EvmStream,
    config: *const EvmConfig,
    out_dir: *const c_char,
) -> EvmStatus {
    guard(|| {
        let (Some(stream), Some(config)) = (stream.as_ref(), config.as_ref()) else {
            return fail(EvmStatus::NullArgument, "stream or config is null");
        };
        let mut run = tri!(resolve(config));
        if !out_dir.is_null() {
            run.output_dir = tri!(text(out_dir, "out_dir")).into();
        }
        let analysis = tri!(pipeline::analyze(&stream.snapshots, &run).map_err(from_error));
        tri!(pipeline::write_analysis(&run.output_dir, &analysis).map_err(from_error));
        EvmStatus::Ok
    })
}

/// Canonical form of a DFS code such as `(0,1,A,x,B)(1,2,B,y,C)`.
///
/// # Safety
/// `code` must be a NUL-terminated string; `out` must be writable. On
/// success `*out` must be released with [`evm_string_free`].
#[no_mangle]
pub unsafe extern "C" fn evm_canonical_code(
    code: *const c_char,
    out: *mut *mut c_char,
) -> EvmStatus {
    guard(|| {
        if out.is_null() {
            return fail(EvmStatus::NullArgument, "out is null");
        }
        let code = tri!(text(code, "code"));
        let pattern = tri!(Pattern::from_code(code).map_err(|e| from_error(e.into())));
        let s = CString::new(pattern.code()).expect("codes contain no NUL");
        *out = s.into_raw();
        EvmStatus::Ok
    })
}

/// Whether the pattern given by `code` occurs in snapshot `index` of `stream`.
///
/// # Safety
/// `code` must be a NUL-terminated string, `stream` a live handle and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn evm_is_subgraph(
    code: *const c_char,
    stream: *const EvmStream,
    index: usize,
    out: *mut bool,
) -> EvmStatus {
    guard(|| {
        let Some(stream) = stream.as_ref() else {
            return fail(EvmStatus::NullArgument, "stream is null");
        };
        if out.is_null() {
            return fail(EvmStatus::NullArgument, "out is null");
        }
        let Some(snapshot) = stream.snapshots.get(index) else {
            return fail(
                EvmStatus::OutOfRange,
                format!("snapshot {index} of {}", stream.snapshots.len()),
            );
        };
        let code = tri!(text(code, "code"));
        let pattern = tri!(Pattern::from_code(code).map_err(|e| from_error(e.into())));
        *out = is_subgraph(&pattern, snapshot);
        EvmStatus::Ok
    })
}
