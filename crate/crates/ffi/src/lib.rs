//! C ABI over `spdh-core`.
//!
//! Elements cross the boundary as their canonical byte encoding. Every function returns an
//! [`SpdhStatus`]; on failure the message is available from [`spdh_last_error_message`] on
//! the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spdh_core::action::GadlpMethod;
use spdh_core::formats;
use spdh_core::platform::Element;
use spdh_core::protocol::{self, KeyPair, ProfileMethod, PublicParams, SdlpInstance, DEFAULT_ORBIT_CAP};
use spdh_core::Error;

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpdhStatus {
    Ok = 0,
    /// A solver ran but did not find an answer.
    Fail = 1,
    InvalidInput = 2,
    NullPointer = 3,
    /// The output buffer is shorter than the element width.
    BufferTooSmall = 4,
    Panic = 5,
}

/// GADLP solver selector for [`spdh_solve_sdlp`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpdhGadlp {
    Brute = 0,
    Bsgs = 1,
    HiddenShift = 2,
}

/// A base pair with its orbit profile.
pub struct SpdhContext {
    params: PublicParams,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: SpdhStatus, msg: impl Into<String>) -> SpdhStatus {
    set_error(msg);
    status
}

fn from_core(e: Error) -> SpdhStatus {
    let status = if e.is_solver_failure() { SpdhStatus::Fail } else { SpdhStatus::InvalidInput };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> SpdhStatus) -> SpdhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == SpdhStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(SpdhStatus::Panic, "internal panic"),
    }
}

unsafe fn context<'a>(ctx: *const SpdhContext) -> Result<&'a SpdhContext, SpdhStatus> {
    ctx.as_ref().ok_or_else(|| fail(SpdhStatus::NullPointer, "null context"))
}

unsafe fn read_element(ctx: &SpdhContext, bytes: *const u8, len: usize) -> Result<Element, SpdhStatus> {
    if bytes.is_null() {
        return Err(fail(SpdhStatus::NullPointer, "null element buffer"));
    }
    let slice = std::slice::from_raw_parts(bytes, len);
    ctx.params.pair().platform().decode(slice).map_err(from_core)
}

unsafe fn write_element(a: &Element, out: *mut u8, out_len: usize) -> SpdhStatus {
    if out.is_null() {
        return fail(SpdhStatus::NullPointer, "null output buffer");
    }
    let bytes = a.encode();
    if out_len < bytes.len() {
        return fail(SpdhStatus::BufferTooSmall, format!("need {} bytes, got {out_len}", bytes.len()));
    }
    ptr::copy_nonoverlapping(bytes.as_ptr(), out, bytes.len());
    SpdhStatus::Ok
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Builds a context from platform file text and an optional hex base element.
///
/// # Safety
/// `platform_text` must be a NUL-terminated string; `g_hex` may be null or NUL-terminated;
/// `out` must be writable. Release the result with [`spdh_context_free`].
#[no_mangle]
pub unsafe extern "C" fn spdh_context_new(
    platform_text: *const c_char,
    g_hex: *const c_char,
    out: *mut *mut SpdhContext,
) -> SpdhStatus {
    guard(|| {
        if platform_text.is_null() || out.is_null() {
            return fail(SpdhStatus::NullPointer, "null argument");
        }
        let text = tri!(CStr::from_ptr(platform_text)
            .to_str()
            .map_err(|_| fail(SpdhStatus::InvalidInput, "platform text is not UTF-8")));
        let spec = tri!(formats::parse_platform_file(text).map_err(from_core));
        let g = if g_hex.is_null() {
            None
        } else {
            let hex =
                tri!(CStr::from_ptr(g_hex).to_str().map_err(|_| fail(SpdhStatus::InvalidInput, "g is not UTF-8")));
            Some(tri!(spec.platform.element_from_hex(hex).map_err(from_core)))
        };
        let pair = tri!(spec.pair(g).map_err(from_core));
        let params = tri!(PublicParams::derive(pair, DEFAULT_ORBIT_CAP).map_err(from_core));
        *out = Box::into_raw(Box::new(SpdhContext { params }));
        SpdhStatus::Ok
    })
}

/// # Safety
/// `ctx` must come from [`spdh_context_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn spdh_context_free(ctx: *mut SpdhContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Byte length of every encoded element on the context's platform.
///
/// # Safety
/// `ctx` must be a live context and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spdh_element_width(ctx: *const SpdhContext, out: *mut usize) -> SpdhStatus {
    guard(|| {
        let ctx = tri!(context(ctx));
        if out.is_null() {
            return fail(SpdhStatus::NullPointer, "null output");
        }
        *out = ctx.params.pair().g().encode().len();
        SpdhStatus::Ok
    })
}

/// Orbit profile of the base pair; `out_bound` receives `N = n + r - 1`.
///
/// # Safety
/// `ctx` must be a live context; each output must be writable.
#[no_mangle]
pub unsafe extern "C" fn spdh_profile(
    ctx: *const SpdhContext,
    out_n: *mut u64,
    out_r: *mut u64,
    out_bound: *mut u64,
) -> SpdhStatus {
    guard(|| {
        let ctx = tri!(context(ctx));
        if out_n.is_null() || out_r.is_null() || out_bound.is_null() {
            return fail(SpdhStatus::NullPointer, "null output");
        }
        let profile = ctx.params.profile();
        *out_n = profile.n;
        *out_r = profile.r;
        *out_bound = ctx.params.bound();
        SpdhStatus::Ok
    })
}

/// Writes `s(g, φ, x)` for `x ≥ 1`.
///
/// # Safety
/// `ctx` must be a live context and `out` valid for `out_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn spdh_s_eval(ctx: *const SpdhContext, x: u64, out: *mut u8, out_len: usize) -> SpdhStatus {
    guard(|| {
        let ctx = tri!(context(ctx));
        let value = tri!(ctx.params.pair().s_eval(x).map_err(from_core));
        write_element(&value, out, out_len)
    })
}

/// Draws a secret from `1..=N` with a seeded generator and writes the public value.
///
/// # Safety
/// `ctx` must be a live context, `out_secret` writable, `out_public` valid for `out_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn spdh_keygen(
    ctx: *const SpdhContext,
    seed: u64,
    out_secret: *mut u64,
    out_public: *mut u8,
    out_len: usize,
) -> SpdhStatus {
    guard(|| {
        let ctx = tri!(context(ctx));
        if out_secret.is_null() {
            return fail(SpdhStatus::NullPointer, "null output");
        }
        let keys = protocol::spdke_keygen(&ctx.params, &mut ChaCha8Rng::seed_from_u64(seed));
        let status = write_element(keys.public(), out_public, out_len);
        if status == SpdhStatus::Ok {
            *out_secret = keys.secret();
        }
        status
    })
}

/// Shared key `secret ∗ peer`.
///
/// # Safety
/// `ctx` must be a live context, `peer` valid for `peer_len` bytes, `out` for `out_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn spdh_derive(
    ctx: *const SpdhContext,
    secret: u64,
    peer: *const u8,
    peer_len: usize,
    out: *mut u8,
    out_len: usize,
) -> SpdhStatus {
    guard(|| {
        let ctx = tri!(context(ctx));
        let keys = tri!(KeyPair::from_secret(&ctx.params, secret).map_err(from_core));
        let peer = tri!(read_element(ctx, peer, peer_len));
        let key = tri!(protocol::spdke_derive(ctx.params.pair(), &keys, &peer).map_err(from_core));
        write_element(&key, out, out_len)
    })
}

/// Recovers `x` with `s(g, φ, x) = target`, profiling by cycle detection. `gadlp` is a
/// [`SpdhGadlp`] value.
///
/// # Safety
/// `ctx` must be a live context, `target` valid for `target_len` bytes, `out_x` writable.
#[no_mangle]
pub unsafe extern "C" fn spdh_solve_sdlp(
    ctx: *const SpdhContext,
    target: *const u8,
    target_len: usize,
    gadlp: u32,
    out_x: *mut u64,
) -> SpdhStatus {
    guard(|| {
        let ctx = tri!(context(ctx));
        if out_x.is_null() {
            return fail(SpdhStatus::NullPointer, "null output");
        }
        let target = tri!(read_element(ctx, target, target_len));
        let method = match gadlp {
            x if x == SpdhGadlp::Brute as u32 => GadlpMethod::Brute,
            x if x == SpdhGadlp::Bsgs as u32 => GadlpMethod::Bsgs,
            x if x == SpdhGadlp::HiddenShift as u32 => GadlpMethod::HiddenShift,
            other => return fail(SpdhStatus::InvalidInput, format!("unknown GADLP selector {other}")),
        };
        let inst = SdlpInstance { pair: ctx.params.pair().clone(), target, bound: ctx.params.bound(), planted: None };
        let solution = tri!(protocol::solve_sdlp(&inst, ProfileMethod::Brent, method).map_err(from_core));
        *out_x = solution.x;
        SpdhStatus::Ok
    })
}

/// Copies the calling thread's last error message, NUL-terminated, into `buf`.
///
/// `*out_len` receives the full message length excluding the terminator. If `buf` is null
/// or too short, nothing is copied and `BufferTooSmall` is returned.
///
/// # Safety
/// `buf` must be null or valid for `buf_len` bytes; `out_len` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn spdh_last_error_message(buf: *mut c_char, buf_len: usize, out_len: *mut usize) -> SpdhStatus {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !out_len.is_null() {
            *out_len = msg.len();
        }
        if buf.is_null() || buf_len < msg.len() + 1 {
            return SpdhStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, msg.len());
        *buf.add(msg.len()) = 0;
        SpdhStatus::Ok
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn spdh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
