//! C ABI for wallkit.
//!
//! Every function returns a `WallkitStatus`; on failure the message is
//! available from `wallkit_last_error` on the same thread. Strings returned
//! through out-parameters are owned by the caller and released with
//! `wallkit_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wallkit::catalog::verify_fixture;
use wallkit::cli::{run_chamber_query, wall_types_json};
use wallkit::k3n::{enumerate_wall_types, make_context, same_orbit, wall_test, Condition, NContext};
use wallkit::lattice::LatticeVector;
use wallkit::num::Int;
use wallkit::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WallkitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Input = 3,
    Degenerate = 4,
    Configuration = 5,
    OnWall = 6,
    LimitExceeded = 7,
    Parse = 8,
    UnknownFixture = 9,
    Overflow = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WallkitCondition {
    None = 0,
    MkMinus2 = 1,
    MkIsotropic = 2,
    BmOrthRoot = 3,
    BmIsotropic = 4,
    BmBoundedRoot = 5,
    BmSumDecomposition = 6,
}

impl From<Condition> for WallkitCondition {
    fn from(c: Condition) -> Self {
        match c {
            Condition::MkMinus2 => WallkitCondition::MkMinus2,
            Condition::MkIsotropic => WallkitCondition::MkIsotropic,
            Condition::BmOrthRoot => WallkitCondition::BmOrthRoot,
            Condition::BmIsotropic => WallkitCondition::BmIsotropic,
            Condition::BmBoundedRoot => WallkitCondition::BmBoundedRoot,
            Condition::BmSumDecomposition => WallkitCondition::BmSumDecomposition,
        }
    }
}

/// A wall type (D², div D) with ray square ray_num / ray_den.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WallkitWallType {
    pub square: i64,
    pub div: i64,
    pub ray_num: i64,
    pub ray_den: i64,
}

/// Opaque handle on the lattice data for one n.
pub struct WallkitContext {
    ctx: NContext,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(WallkitStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Input(_) => WallkitStatus::Input,
            Error::Degenerate(_) => WallkitStatus::Degenerate,
            Error::Configuration(_) => WallkitStatus::Configuration,
            Error::OnWall { .. } => WallkitStatus::OnWall,
            Error::LimitExceeded(_) => WallkitStatus::LimitExceeded,
            Error::Parse(_) => WallkitStatus::Parse,
            Error::UnknownFixture(_) => WallkitStatus::UnknownFixture,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: WallkitStatus, msg: &str) -> Failure {
    Failure(status, msg.to_string())
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WallkitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            WallkitStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            WallkitStatus::Panic
        }
    }
}

unsafe fn context<'a>(ctx: *const WallkitContext) -> Result<&'a NContext, Failure> {
    ctx.as_ref()
        .map(|c| &c.ctx)
        .ok_or_else(|| fail(WallkitStatus::NullPointer, "null context"))
}

unsafe fn vector(coords: *const i64, len: usize) -> Result<LatticeVector, Failure> {
    if coords.is_null() {
        return Err(fail(WallkitStatus::NullPointer, "null coordinate array"));
    }
    Ok(LatticeVector::from_i64(std::slice::from_raw_parts(coords, len)))
}

unsafe fn string<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(fail(WallkitStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(WallkitStatus::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(WallkitStatus::NullPointer, "null output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    let c = CString::new(text).map_err(|_| fail(WallkitStatus::InvalidUtf8, "interior NUL"))?;
    put(out, c.into_raw())
}

fn small(x: &Int) -> Result<i64, Failure> {
    i64::try_from(x).map_err(|_| fail(WallkitStatus::Overflow, "value does not fit in 64 bits"))
}

/// Message of the last failed call on this thread, or "" after a success.
/// The pointer stays valid until the next wallkit call on this thread.
#[no_mangle]
pub extern "C" fn wallkit_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates the context for K3^[n]-type lattices, n ≥ 2.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wallkit_context_new(n: u64, out: *mut *mut WallkitContext) -> WallkitStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(WallkitStatus::NullPointer, "null output pointer"));
        }
        let ctx = make_context(n)?;
        put(out, Box::into_raw(Box::new(WallkitContext { ctx })))
    })
}

/// # Safety
/// `ctx` must come from `wallkit_context_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wallkit_context_free(ctx: *mut WallkitContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// # Safety
/// `ctx` must be a live context or null.
#[no_mangle]
pub unsafe extern "C" fn wallkit_context_n(ctx: *const WallkitContext) -> u64 {
    ctx.as_ref().map_or(0, |c| c.ctx.n())
}

/// Rank of L_n; vectors passed to this library have this many coordinates.
///
/// # Safety
/// `ctx` must be a live context or null.
#[no_mangle]
pub unsafe extern "C" fn wallkit_context_rank(ctx: *const WallkitContext) -> usize {
    ctx.as_ref().map_or(0, |c| c.ctx.ln().rank())
}

/// Writes the candidate wall types into `out` (capacity `cap`) and their
/// number into `len`. With `out` null only `len` is written; a short buffer
/// yields `BufferTooSmall` with `len` set.
///
/// # Safety
/// `ctx` must be live, `len` valid, and `out` valid for `cap` elements.
#[no_mangle]
pub unsafe extern "C" fn wallkit_wall_types(
    ctx: *const WallkitContext,
    out: *mut WallkitWallType,
    cap: usize,
    len: *mut usize,
) -> WallkitStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let rows = enumerate_wall_types(ctx)
            .iter()
            .map(|t| {
                Ok(WallkitWallType {
                    square: small(&t.square)?,
                    div: small(&t.div)?,
                    ray_num: small(t.ray_square.numer())?,
                    ray_den: small(t.ray_square.denom())?,
                })
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        put(len, rows.len())?;
        if out.is_null() {
            return Ok(());
        }
        if cap < rows.len() {
            return Err(fail(WallkitStatus::BufferTooSmall, "buffer holds fewer rows than needed"));
        }
        ptr::copy_nonoverlapping(rows.as_ptr(), out, rows.len());
        Ok(())
    })
}

/// Wall test for D ∈ L_n. `condition` is `None` when no criterion fires.
///
/// # Safety
/// `ctx` must be live, `coords` valid for `len` elements, `condition` valid.
#[no_mangle]
pub unsafe extern "C" fn wallkit_wall_test(
    ctx: *const WallkitContext,
    coords: *const i64,
    len: usize,
    condition: *mut WallkitCondition,
) -> WallkitStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let d = vector(coords, len)?;
        let c = wall_test(ctx, &d)?.map_or(WallkitCondition::None, |w| w.condition.into());
        put(condition, c)
    })
}

/// Whether v and w have equal (square, div, discriminant class).
///
/// # Safety
/// `ctx` must be live, `v` and `w` valid for `len` elements, `same` valid.
#[no_mangle]
pub unsafe extern "C" fn wallkit_same_orbit(
    ctx: *const WallkitContext,
    v: *const i64,
    w: *const i64,
    len: usize,
    same: *mut bool,
) -> WallkitStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let (v, w) = (vector(v, len)?, vector(w, len)?);
        put(same, same_orbit(ctx.ln(), &v, &w)?)
    })
}

/// Candidate wall types as a JSON array.
///
/// # Safety
/// `ctx` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wallkit_tabulate_json(ctx: *const WallkitContext, out: *mut *mut c_char) -> WallkitStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let rows = enumerate_wall_types(ctx);
        put_string(out, wall_types_json(&rows, ctx.n()).to_string())
    })
}

/// Chamber report for a JSON query (the format accepted by `wallkit chamber`).
///
/// # Safety
/// `query` must be a NUL-terminated string and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wallkit_chamber_json(
    query: *const c_char,
    bound: u64,
    out: *mut *mut c_char,
) -> WallkitStatus {
    guard(|| {
        if bound == 0 {
            return Err(fail(WallkitStatus::Input, "bound must be at least 1"));
        }
        let report = run_chamber_query(string(query)?, bound)?;
        put_string(out, report.to_json().to_string())
    })
}

/// JSON report of one fixture; `n` = 0 keeps the stored n.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wallkit_verify_fixture_json(
    name: *const c_char,
    n: u64,
    out: *mut *mut c_char,
) -> WallkitStatus {
    guard(|| {
        let report = verify_fixture(string(name)?, (n != 0).then_some(n))?;
        put_string(out, report.to_json().to_string())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wallkit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
