use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use variaccel_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

struct Ctx(*mut VaContext);

impl Ctx {
    fn new(target: u32) -> Self {
        let mut p = ptr::null_mut();
        assert_eq!(unsafe { va_context_new(target, 10, &mut p) }, VaStatus::Ok);
        Ctx(p)
    }
}

impl Drop for Ctx {
    fn drop(&mut self) {
        unsafe { va_context_free(self.0) }
    }
}

fn take(n: *mut VaNumber) -> (f64, f64, String) {
    unsafe {
        let s = va_number_to_string(n, 0);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        va_string_free(s);
        let out = (va_number_re(n), va_number_im(n), text);
        va_number_free(n);
        out
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(va_last_error()).to_str().unwrap().to_owned() }
}

#[test]
fn zeta_at_two() {
    let ctx = Ctx::new(30);
    let mut n = ptr::null_mut();
    let status = unsafe { va_zeta_accel(ctx.0, c("2").as_ptr(), c("0").as_ptr(), c("1").as_ptr(), 120, &mut n) };
    assert_eq!(status, VaStatus::Ok);
    let (re, im, text) = take(n);
    assert!((re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);
    assert_eq!(im, 0.0);
    assert!(text.starts_with("1.6449340668482264364724151666"), "{text}");
}

#[test]
fn critical_line_reference_is_complex() {
    let ctx = Ctx::new(20);
    let mut n = ptr::null_mut();
    let status = unsafe { va_zeta_reference(ctx.0, c("0.5").as_ptr(), c("50").as_ptr(), &mut n) };
    assert_eq!(status, VaStatus::Ok);
    let (re, im, text) = take(n);
    assert!((re + 0.081_712_108_320_979_98).abs() < 1e-15);
    assert!((im - 0.330_792_194_038_661_3).abs() < 1e-15);
    assert!(text.ends_with('i'));
}

#[test]
fn pi_catalan_and_hurwitz() {
    let ctx = Ctx::new(20);
    let mut n = ptr::null_mut();
    assert_eq!(
        unsafe { va_pi_accel(ctx.0, c("-0.365381").as_ptr(), 60, &mut n) },
        VaStatus::Ok
    );
    assert!((take(n).0 - std::f64::consts::PI).abs() < 1e-10);
    assert_eq!(
        unsafe { va_catalan_accel(ctx.0, c("-0.365381").as_ptr(), 60, &mut n) },
        VaStatus::Ok
    );
    assert!((take(n).0 - 0.915965594177219).abs() < 1e-10);
    let status = unsafe {
        va_hurwitz_accel(
            ctx.0,
            c("3").as_ptr(),
            c("1").as_ptr(),
            c("1").as_ptr(),
            c("1").as_ptr(),
            60,
            &mut n,
        )
    };
    assert_eq!(status, VaStatus::Ok);
    assert!((take(n).0 - 1.2020569031595942).abs() < 1e-14);
}

#[test]
fn stationary_point_of_zeta() {
    let ctx = Ctx::new(20);
    let mut n = ptr::null_mut();
    let mut found = false;
    let status = unsafe {
        va_find_stationary_zeta(
            ctx.0,
            c("2").as_ptr(),
            1,
            c("0").as_ptr(),
            c("1").as_ptr(),
            &mut found,
            &mut n,
        )
    };
    assert_eq!(status, VaStatus::Ok);
    assert!(found);
    assert!((take(n).0 - 0.25).abs() < 1e-9);
    let status = unsafe {
        va_find_stationary_zeta(
            ctx.0,
            c("2").as_ptr(),
            2,
            c("0").as_ptr(),
            c("1").as_ptr(),
            &mut found,
            &mut n,
        )
    };
    assert_eq!(status, VaStatus::Ok);
    assert!(!found);
    take(n);
}

#[test]
fn errors_map_to_status_codes() {
    let ctx = Ctx::new(20);
    let mut n = ptr::null_mut();
    assert_eq!(
        unsafe { va_pi_accel(ctx.0, c("-0.6").as_ptr(), 5, &mut n) },
        VaStatus::Domain
    );
    assert!(last_error().contains("lambda must exceed -1/2"));
    assert!(n.is_null());
    assert_eq!(
        unsafe { va_pi_accel(ctx.0, c("abc").as_ptr(), 5, &mut n) },
        VaStatus::Parse
    );
    assert_eq!(
        unsafe { va_pi_accel(ptr::null(), c("0").as_ptr(), 5, &mut n) },
        VaStatus::NullPointer
    );
    assert!(last_error().contains("ctx"));
    assert_eq!(
        unsafe { va_pi_accel(ctx.0, ptr::null(), 5, &mut n) },
        VaStatus::NullPointer
    );
    assert_eq!(
        unsafe { va_pi_accel(ctx.0, c("0").as_ptr(), 5, ptr::null_mut()) },
        VaStatus::NullPointer
    );
    let status = unsafe { va_zeta_accel(ctx.0, c("1").as_ptr(), c("0").as_ptr(), c("1").as_ptr(), 5, &mut n) };
    assert_eq!(status, VaStatus::Pole);
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { va_context_new(0, 10, &mut p) }, VaStatus::Domain);
    assert!(unsafe { va_number_re(ptr::null()) }.is_nan());
    assert!(unsafe { va_number_to_string(ptr::null(), 5) }.is_null());
    unsafe {
        va_number_free(ptr::null_mut());
        va_string_free(ptr::null_mut());
        va_context_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/variaccel.h")).unwrap();
    for name in [
        "va_context_new",
        "va_zeta_accel",
        "va_zeta_reference",
        "va_find_stationary_zeta",
        "va_number_to_string",
        "va_last_error",
        "VA_STATUS_NOT_CONVERGED",
        "typedef struct VaContext VaContext",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Compiles and runs a C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libvariaccel_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lmpfr", "-lgmp", "-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("cc runs");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("1.644934066848226436"));
}
