use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use spdh_core::fixtures;
use spdh_core::platform::Endomorphism;
use spdh_ffi::*;

struct Ctx(*mut SpdhContext);

impl Drop for Ctx {
    fn drop(&mut self) {
        unsafe { spdh_context_free(self.0) }
    }
}

fn m3_context() -> Ctx {
    let pair = fixtures::m3_z101_inner();
    let Endomorphism::Inner { h, .. } = pair.endo() else { unreachable!() };
    let text = CString::new(format!("matrix d=3 m=101 endo=inner h={}", h.to_hex())).unwrap();
    let g = CString::new(pair.g().to_hex()).unwrap();
    let mut ctx = ptr::null_mut();
    assert_eq!(unsafe { spdh_context_new(text.as_ptr(), g.as_ptr(), &mut ctx) }, SpdhStatus::Ok);
    Ctx(ctx)
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let mut len = 0;
    unsafe { spdh_last_error_message(buf.as_mut_ptr(), buf.len(), &mut len) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn width(ctx: &Ctx) -> usize {
    let mut w = 0;
    assert_eq!(unsafe { spdh_element_width(ctx.0, &mut w) }, SpdhStatus::Ok);
    w
}

#[test]
fn profile_and_evaluation_match_core() {
    let ctx = m3_context();
    let (mut n, mut r, mut bound) = (0, 0, 0);
    assert_eq!(unsafe { spdh_profile(ctx.0, &mut n, &mut r, &mut bound) }, SpdhStatus::Ok);
    assert_eq!((n, r, bound), (1, 60, 60));

    let mut buf = vec![0u8; width(&ctx)];
    assert_eq!(unsafe { spdh_s_eval(ctx.0, 7, buf.as_mut_ptr(), buf.len()) }, SpdhStatus::Ok);
    assert_eq!(buf, fixtures::m3_z101_inner().s_eval(7).unwrap().encode());
}

#[test]
fn exchange_and_attack_round_trip() {
    let ctx = m3_context();
    let w = width(&ctx);
    let (mut xa, mut xb) = (0, 0);
    let (mut a, mut b) = (vec![0u8; w], vec![0u8; w]);
    unsafe {
        assert_eq!(spdh_keygen(ctx.0, 1, &mut xa, a.as_mut_ptr(), w), SpdhStatus::Ok);
        assert_eq!(spdh_keygen(ctx.0, 2, &mut xb, b.as_mut_ptr(), w), SpdhStatus::Ok);
    }
    let (mut ka, mut kb) = (vec![0u8; w], vec![0u8; w]);
    unsafe {
        assert_eq!(spdh_derive(ctx.0, xa, b.as_ptr(), w, ka.as_mut_ptr(), w), SpdhStatus::Ok);
        assert_eq!(spdh_derive(ctx.0, xb, a.as_ptr(), w, kb.as_mut_ptr(), w), SpdhStatus::Ok);
    }
    assert_eq!(ka, kb);

    for method in [SpdhGadlp::Brute, SpdhGadlp::Bsgs, SpdhGadlp::HiddenShift] {
        let mut x = 0;
        assert_eq!(unsafe { spdh_solve_sdlp(ctx.0, a.as_ptr(), w, method as u32, &mut x) }, SpdhStatus::Ok);
        assert_eq!(x, xa);
    }
}

#[test]
fn error_codes() {
    let ctx = m3_context();
    let w = width(&ctx);
    let mut small = vec![0u8; w - 1];
    assert_eq!(unsafe { spdh_s_eval(ctx.0, 3, small.as_mut_ptr(), small.len()) }, SpdhStatus::BufferTooSmall);
    assert!(last_error().contains("bytes"));

    let mut out = vec![0u8; w];
    assert_eq!(unsafe { spdh_s_eval(ctx.0, 0, out.as_mut_ptr(), w) }, SpdhStatus::InvalidInput);
    assert_eq!(unsafe { spdh_s_eval(ptr::null(), 1, out.as_mut_ptr(), w) }, SpdhStatus::NullPointer);
    assert_eq!(unsafe { spdh_derive(ctx.0, 61, out.as_ptr(), w, out.as_mut_ptr(), w) }, SpdhStatus::InvalidInput);

    let mut x = 0;
    assert_eq!(unsafe { spdh_solve_sdlp(ctx.0, out.as_ptr(), w, 9, &mut x) }, SpdhStatus::InvalidInput);
    assert!(last_error().contains("selector"));
    // The zero matrix is never in the orbit of an invertible base pair.
    let zero = vec![0u8; w];
    assert_eq!(unsafe { spdh_solve_sdlp(ctx.0, zero.as_ptr(), w, 1, &mut x) }, SpdhStatus::InvalidInput);

    let bad = CString::new("matrix d=0 m=5").unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { spdh_context_new(bad.as_ptr(), ptr::null(), &mut c) }, SpdhStatus::InvalidInput);
    assert!(c.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn error_message_reports_required_length() {
    let mut x = 0;
    assert_eq!(unsafe { spdh_solve_sdlp(ptr::null(), ptr::null(), 0, 0, &mut x) }, SpdhStatus::NullPointer);
    let mut len = 0;
    assert_eq!(unsafe { spdh_last_error_message(ptr::null_mut(), 0, &mut len) }, SpdhStatus::BufferTooSmall);
    assert_eq!(len, "null context".len());
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(spdh_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export_and_compiles() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/spdh.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "spdh_context_new",
        "spdh_context_free",
        "spdh_element_width",
        "spdh_profile",
        "spdh_s_eval",
        "spdh_keygen",
        "spdh_derive",
        "spdh_solve_sdlp",
        "spdh_last_error_message",
        "spdh_version",
        "SPDH_STATUS_BUFFER_TOO_SMALL",
        "SPDH_GADLP_HIDDEN_SHIFT",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c", header]).output() else {
        eprintln!("no C compiler found; header syntax not checked");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
