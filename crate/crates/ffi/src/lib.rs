//! C ABI over `variaccel`.
//!
//! Every fallible call returns a [`VaStatus`] and writes its result through
//! an out-pointer. On failure the message is available from
//! [`va_last_error`] on the same thread. Numbers are passed in as decimal
//! strings so they are read at the context's precision.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rug::Float;
use variaccel::constants::{catalan_accel_partial, pi_accel_partial, CatalanSeriesParams, PiSeriesParams};
use variaccel::hurwitz::{hurwitz_accel_partial, HurwitzParams};
use variaccel::pms::{find_stationary, ZetaFamily};
use variaccel::riemann::{zeta_accel_partial, zeta_alternating_partials, zeta_reference_complex, ZetaSeriesParams};
use variaccel::{Complex, Error, PrecisionContext};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VaStatus {
    Ok = 0,
    Domain = 1,
    Pole = 2,
    Consistency = 3,
    NotConverged = 4,
    Io = 5,
    Parse = 6,
    NullPointer = 7,
    Panic = 8,
}

/// Precision policy handle.
pub struct VaContext {
    inner: PrecisionContext,
}

/// A real or complex result.
pub struct VaNumber {
    value: Complex,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(error: &Error) -> VaStatus {
    match error {
        Error::Domain(_) => VaStatus::Domain,
        Error::Pole(_) => VaStatus::Pole,
        Error::Consistency(_) => VaStatus::Consistency,
        Error::NotConverged { .. } => VaStatus::NotConverged,
        Error::Io { .. } => VaStatus::Io,
        Error::Parse(_) => VaStatus::Parse,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Utf8(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VaStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(&format!("{name} is null"));
            VaStatus::NullPointer
        }
        Ok(Err(Failure::Utf8(name))) => {
            set_error(&format!("{name} is not valid UTF-8"));
            VaStatus::Parse
        }
        Err(_) => {
            set_error("internal panic");
            VaStatus::Panic
        }
    }
}

unsafe fn context<'a>(ctx: *const VaContext) -> Result<&'a PrecisionContext, Failure> {
    ctx.as_ref().map(|c| &c.inner).ok_or(Failure::Null("ctx"))
}

unsafe fn text<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8(name))
}

unsafe fn number(p: *const c_char, name: &'static str, ctx: &PrecisionContext) -> Result<Float, Failure> {
    Ok(ctx.parse(text(p, name)?)?)
}

unsafe fn store(out: *mut *mut VaNumber, value: Complex) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(VaNumber { value }));
    Ok(())
}

/// Message for the most recent failure on this thread. Valid until the next
/// call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn va_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a context with `target_digits` requested and `guard_digits` extra
/// working digits.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn va_context_new(target_digits: u32, guard_digits: u32, out: *mut *mut VaContext) -> VaStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let inner = PrecisionContext::new(target_digits, guard_digits)?;
        *out = Box::into_raw(Box::new(VaContext { inner }));
        Ok(())
    })
}

/// # Safety
/// `ctx` must come from [`va_context_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn va_context_free(ctx: *mut VaContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Accelerated zeta partial sum of order `order` at `s = s_re + i s_im`.
/// `lambda = 0` gives the alternating series.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn va_zeta_accel(
    ctx: *const VaContext,
    s_re: *const c_char,
    s_im: *const c_char,
    lambda: *const c_char,
    order: usize,
    out: *mut *mut VaNumber,
) -> VaStatus {
    guard(|| {
        let c = context(ctx)?;
        let s = Complex::new(number(s_re, "s_re", c)?, number(s_im, "s_im", c)?);
        let lambda = number(lambda, "lambda", c)?;
        let value = if lambda.is_zero() {
            zeta_alternating_partials(&s, order, c)?.pop().expect("non-empty")
        } else {
            zeta_accel_partial(&ZetaSeriesParams::new(s, lambda, order)?, c)?
        };
        store(out, value)
    })
}

/// Certified `zeta(s)` for `Re(s) > 0`, `s != 1`.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn va_zeta_reference(
    ctx: *const VaContext,
    s_re: *const c_char,
    s_im: *const c_char,
    out: *mut *mut VaNumber,
) -> VaStatus {
    guard(|| {
        let c = context(ctx)?;
        let s = Complex::new(number(s_re, "s_re", c)?, number(s_im, "s_im", c)?);
        store(out, zeta_reference_complex(&s, c)?)
    })
}

/// Accelerated pi partial sum of order `order`.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn va_pi_accel(
    ctx: *const VaContext,
    lambda: *const c_char,
    order: usize,
    out: *mut *mut VaNumber,
) -> VaStatus {
    guard(|| {
        let c = context(ctx)?;
        let params = PiSeriesParams::new(number(lambda, "lambda", c)?, order)?;
        store(out, Complex::from_real(pi_accel_partial(&params, c)?))
    })
}

/// Accelerated Catalan partial sum of order `order`.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn va_catalan_accel(
    ctx: *const VaContext,
    lambda: *const c_char,
    order: usize,
    out: *mut *mut VaNumber,
) -> VaStatus {
    guard(|| {
        let c = context(ctx)?;
        let params = CatalanSeriesParams::unshifted(number(lambda, "lambda", c)?, order)?;
        store(out, Complex::from_real(catalan_accel_partial(&params, c)?))
    })
}

/// Accelerated generalized Hurwitz partial sum of
/// `sum_{n>=0} 1/(n^u + xi)^s`.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn va_hurwitz_accel(
    ctx: *const VaContext,
    s: *const c_char,
    u: *const c_char,
    xi: *const c_char,
    lambda: *const c_char,
    order: usize,
    out: *mut *mut VaNumber,
) -> VaStatus {
    guard(|| {
        let c = context(ctx)?;
        let params = HurwitzParams::new(
            number(s, "s", c)?,
            number(u, "u", c)?,
            number(xi, "xi", c)?,
            number(lambda, "lambda", c)?,
            order,
        )?;
        store(out, Complex::from_real(hurwitz_accel_partial(&params, c)?))
    })
}

/// Stationary point of the order-`order` zeta partial sum at real `s`,
/// searched in `(lo, hi)`. `*found` is false when there is none; `*out`
/// then holds the grid point of smallest derivative.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn va_find_stationary_zeta(
    ctx: *const VaContext,
    s: *const c_char,
    order: usize,
    lo: *const c_char,
    hi: *const c_char,
    found: *mut bool,
    out: *mut *mut VaNumber,
) -> VaStatus {
    guard(|| {
        let c = context(ctx)?;
        if found.is_null() {
            return Err(Failure::Null("found"));
        }
        let family = ZetaFamily::new(number(s, "s", c)?)?;
        let (lo, hi) = (number(lo, "lo", c)?, number(hi, "hi", c)?);
        let r = find_stationary(&family, order, (&lo, &hi), c)?;
        *found = r.found;
        store(out, Complex::from_real(r.lambda_star))
    })
}

/// Real part rounded to double; NaN for a null handle.
///
/// # Safety
/// `n` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn va_number_re(n: *const VaNumber) -> f64 {
    n.as_ref().map_or(f64::NAN, |n| n.value.re.to_f64())
}

/// Imaginary part rounded to double; NaN for a null handle.
///
/// # Safety
/// `n` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn va_number_im(n: *const VaNumber) -> f64 {
    n.as_ref().map_or(f64::NAN, |n| n.value.im.to_f64())
}

/// Decimal form with `digits` significant digits (`0` for all). Free with
/// [`va_string_free`]. Null for a null handle.
///
/// # Safety
/// `n` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn va_number_to_string(n: *const VaNumber, digits: usize) -> *mut c_char {
    let Some(n) = n.as_ref() else {
        return ptr::null_mut();
    };
    let digits = (digits > 0).then_some(digits);
    let re = n.value.re.to_string_radix(10, digits);
    let text = if n.value.is_real() {
        re
    } else {
        let im = n.value.im.to_string_radix(10, digits);
        if im.starts_with('-') {
            format!("{re}{im}i")
        } else {
            format!("{re}+{im}i")
        }
    };
    CString::new(text).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must come from [`va_number_to_string`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn va_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `n` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn va_number_free(n: *mut VaNumber) {
    if !n.is_null() {
        drop(Box::from_raw(n));
    }
}
