//! C ABI over the coefficient tables.
//!
//! A table is computed once into an opaque handle and read back as decimal
//! strings. Every entry point returns a [`BlStatus`]; the message of the last
//! failure on the calling thread is available from [`bl_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bilattice::painleve::PrecisionPolicy;
use bilattice::params::{parse_mix, parse_rational, FamilyParams, Lattice};
use bilattice::precision::to_decimal;
use bilattice::verify::cross_pipeline;
use bilattice::{Error, PrecisionContext, Real};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validity = 4,
    Pole = 5,
    Singularity = 6,
    Rank = 7,
    Precision = 8,
    Degenerate = 9,
    OutOfRange = 10,
    BufferTooSmall = 11,
    Internal = 12,
}

/// Which sequence of a table to read.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlColumn {
    ASqPainleve = 0,
    BPainleve = 1,
    ASqOracle = 2,
    BOracle = 3,
}

/// Both pipelines' coefficients for `n = 0..=N`.
pub struct BlTable {
    a_sq_painleve: Vec<Real>,
    b_painleve: Vec<Real>,
    a_sq_oracle: Vec<Real>,
    b_oracle: Vec<Real>,
    painleve_digits: u32,
    certified_through: Option<usize>,
    agrees: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> BlStatus {
    match e {
        Error::Parse { .. } => BlStatus::Parse,
        Error::Validity(_) | Error::Length { .. } | Error::Monotonicity { .. } => BlStatus::Validity,
        Error::Pole(_) => BlStatus::Pole,
        Error::Singularity { .. } => BlStatus::Singularity,
        Error::Rank { .. } | Error::ZeroCount { .. } => BlStatus::Rank,
        Error::Precision(_) => BlStatus::Precision,
        Error::Degenerate(_) => BlStatus::Degenerate,
    }
}

fn fail(status: BlStatus, msg: impl Into<String>) -> BlStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> BlStatus) -> BlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(BlStatus::Internal, "panic inside the library"),
    }
}

/// # Safety
/// `p` is null or a NUL-terminated string.
unsafe fn opt_str<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, BlStatus> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| fail(BlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// `p` is a NUL-terminated string.
unsafe fn req_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, BlStatus> {
    opt_str(p, what)?.ok_or_else(|| fail(BlStatus::NullPointer, format!("{what} is null")))
}

/// Copies `s` plus a NUL into `buf`, reporting the needed size in `needed`.
///
/// # Safety
/// `buf` is null or valid for `buf_len` bytes; `needed` is null or writable.
unsafe fn write_str(s: &str, buf: *mut c_char, buf_len: usize, needed: *mut usize) -> BlStatus {
    let n = s.len() + 1;
    if !needed.is_null() {
        *needed = n;
    }
    if buf.is_null() || buf_len < n {
        return fail(BlStatus::BufferTooSmall, format!("need {n} bytes"));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    *buf.add(s.len()) = 0;
    BlStatus::Ok
}

struct Request<'a> {
    family: &'a str,
    a: &'a str,
    beta: &'a str,
    gamma: Option<&'a str>,
    lattice: &'a str,
    t: Option<&'a str>,
}

fn compute(req: Request<'_>, n: usize, digits: u32) -> Result<BlTable, BlStatus> {
    let Request { family, a, beta, gamma, lattice, t } = req;
    let core = |e: Error| fail(status_of(&e), e.to_string());
    let a = parse_rational(a).map_err(core)?;
    let beta = parse_rational(beta).map_err(core)?;
    let params = match (family, gamma) {
        ("charlier", None) => FamilyParams::charlier(a, beta),
        ("meixner", Some(g)) => FamilyParams::meixner(a, beta, parse_rational(g).map_err(core)?),
        ("charlier", Some(_)) => return Err(fail(BlStatus::Validity, "gamma applies only to meixner")),
        ("meixner", None) => return Err(fail(BlStatus::NullPointer, "meixner needs gamma")),
        (other, _) => return Err(fail(BlStatus::Parse, format!("unknown family {other:?}"))),
    };
    let lattice = match (lattice, t) {
        ("plain", None) => Lattice::Plain,
        ("shifted", None) => Lattice::Shifted,
        ("bi", Some(t)) => Lattice::Bi(parse_mix(t).map_err(core)?),
        ("bi", None) => return Err(fail(BlStatus::NullPointer, "bi lattice needs t")),
        ("plain" | "shifted", Some(_)) => return Err(fail(BlStatus::Validity, "t applies only to the bi lattice")),
        (other, _) => return Err(fail(BlStatus::Parse, format!("unknown lattice {other:?}"))),
    };
    if n == 0 {
        return Err(fail(BlStatus::OutOfRange, "n must be at least 1"));
    }
    let ctx = PrecisionContext::new(digits).map_err(core)?;
    params.validate(&lattice).map_err(core)?;
    let cross = cross_pipeline(&params, &lattice, n, None, PrecisionPolicy::default(), &ctx).map_err(core)?;
    let agrees = cross.agrees();
    let p = cross.painleve.run.coeffs;
    Ok(BlTable {
        a_sq_painleve: p.a_sq,
        b_painleve: p.b,
        a_sq_oracle: cross.oracle.coeffs.a_sq,
        b_oracle: cross.oracle.coeffs.b,
        painleve_digits: cross.painleve.digits,
        certified_through: cross.painleve.certified_through,
        agrees,
    })
}

/// Computes the table for indices `0..=n` with the oracle at `digits` digits.
///
/// `family` is `"charlier"` or `"meixner"`; `lattice` is `"plain"`,
/// `"shifted"` or `"bi"`. `a`, `beta`, `gamma` and `t` are decimal or `p/q`
/// strings; `gamma` is null for Charlier and `t` is null unless the lattice
/// is `"bi"` (where `"inf"` is allowed). On success `*out` owns a table to be
/// released with [`bl_table_free`].
///
/// # Safety
/// String arguments are null or NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bl_table_compute(
    family: *const c_char,
    a: *const c_char,
    beta: *const c_char,
    gamma: *const c_char,
    lattice: *const c_char,
    t: *const c_char,
    n: usize,
    digits: u32,
    out: *mut *mut BlTable,
) -> BlStatus {
    guard(|| {
        if out.is_null() {
            return fail(BlStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let req = (|| {
            Ok::<_, BlStatus>(Request {
                family: req_str(family, "family")?,
                a: req_str(a, "a")?,
                beta: req_str(beta, "beta")?,
                gamma: opt_str(gamma, "gamma")?,
                lattice: req_str(lattice, "lattice")?,
                t: opt_str(t, "t")?,
            })
        })();
        let req = match req {
            Ok(r) => r,
            Err(s) => return s,
        };
        match compute(req, n, digits) {
            Ok(table) => {
                *out = Box::into_raw(Box::new(table));
                BlStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Releases a table. Null is ignored.
///
/// # Safety
/// `table` is null or came from [`bl_table_compute`] and was not freed before.
#[no_mangle]
pub unsafe extern "C" fn bl_table_free(table: *mut BlTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of rows, `N + 1`; 0 for a null table.
///
/// # Safety
/// `table` is null or a live table.
#[no_mangle]
pub unsafe extern "C" fn bl_table_len(table: *const BlTable) -> usize {
    table.as_ref().map_or(0, |t| t.b_oracle.len())
}

/// Digits used by the forward iteration; 0 for a null table.
///
/// # Safety
/// `table` is null or a live table.
#[no_mangle]
pub unsafe extern "C" fn bl_table_painleve_digits(table: *const BlTable) -> u32 {
    table.as_ref().map_or(0, |t| t.painleve_digits)
}

/// Last index certified by the precision-doubling rerun, or -1 if none.
///
/// # Safety
/// `table` is null or a live table.
#[no_mangle]
pub unsafe extern "C" fn bl_table_certified_through(table: *const BlTable) -> i64 {
    table
        .as_ref()
        .and_then(|t| t.certified_through)
        .map_or(-1, |c| i64::try_from(c).unwrap_or(i64::MAX))
}

/// Whether both pipelines agree to 1e-20 on every row and the iteration is
/// certified throughout.
///
/// # Safety
/// `table` is null or a live table.
#[no_mangle]
pub unsafe extern "C" fn bl_table_agrees(table: *const BlTable) -> bool {
    table.as_ref().is_some_and(|t| t.agrees)
}

/// Writes entry `index` of `column` with `sig_digits` significant digits as a
/// NUL-terminated decimal string. `*needed` receives the required buffer size
/// even when the buffer is too small.
///
/// # Safety
/// `table` is a live table; `buf` is null or valid for `buf_len` bytes;
/// `needed` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn bl_table_value(
    table: *const BlTable,
    column: BlColumn,
    index: usize,
    sig_digits: u32,
    buf: *mut c_char,
    buf_len: usize,
    needed: *mut usize,
) -> BlStatus {
    guard(|| {
        let Some(t) = table.as_ref() else {
            return fail(BlStatus::NullPointer, "table is null");
        };
        let col = match column {
            BlColumn::ASqPainleve => &t.a_sq_painleve,
            BlColumn::BPainleve => &t.b_painleve,
            BlColumn::ASqOracle => &t.a_sq_oracle,
            BlColumn::BOracle => &t.b_oracle,
        };
        let Some(x) = col.get(index) else {
            return fail(BlStatus::OutOfRange, format!("index {index} beyond {}", col.len() - 1));
        };
        if sig_digits == 0 {
            return fail(BlStatus::OutOfRange, "sig_digits must be positive");
        }
        write_str(&to_decimal(x, sig_digits as usize), buf, buf_len, needed)
    })
}

/// Copies the message of the last failure on this thread.
///
/// # Safety
/// `buf` is null or valid for `buf_len` bytes; `needed` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn bl_last_error(buf: *mut c_char, buf_len: usize, needed: *mut usize) -> BlStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    let n = msg.len() + 1;
    if !needed.is_null() {
        *needed = n;
    }
    if buf.is_null() || buf_len < n {
        return BlStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), msg.len());
    *buf.add(msg.len()) = 0;
    BlStatus::Ok
}
