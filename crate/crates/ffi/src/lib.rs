//! C interface to the genpos library.
//!
//! Functions return a [`GenposStatus`]; results go through out-pointers. On failure the
//! message is kept per thread and can be read with [`genpos_last_error_message`].
//! Systems are opaque handles released with [`genpos_system_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use genpos::cases::{build_exact_overlap, build_one_point, ExactOverlapParams, OnePointParams};
use genpos::separation::{check_pair_disjoint, check_ssc};
use genpos::{GenposError, IFSystem, RatioVector, Status, Word};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenposStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Precondition = 4,
    Hypothesis = 5,
    Bracket = 6,
    NonMonotone = 7,
    RationalLogRatio = 8,
    Descriptor = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenposSeparation {
    Disjoint = 0,
    Undecided = 1,
}

/// Outcome of a piece-pair separation check.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GenposVerdict {
    pub status: GenposSeparation,
    /// Certified lower bound on the distance between the pieces; 0 when undecided.
    pub gap: f64,
    /// Largest leaf diameter left when undecided; 0 when disjoint.
    pub overlap_diameter: f64,
    pub depth_used: usize,
    pub pairs_examined: usize,
}

/// Opaque iterated function system.
pub struct GenposSystem(IFSystem);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn code_of(e: &GenposError) -> GenposStatus {
    match e {
        GenposError::Domain { .. } => GenposStatus::Domain,
        GenposError::Precondition(_) => GenposStatus::Precondition,
        GenposError::Hypothesis(_) => GenposStatus::Hypothesis,
        GenposError::Bracket { .. } => GenposStatus::Bracket,
        GenposError::NonMonotone { .. } => GenposStatus::NonMonotone,
        GenposError::RationalLogRatio { .. } => GenposStatus::RationalLogRatio,
        GenposError::Descriptor(_) => GenposStatus::Descriptor,
    }
}

struct Fail(GenposStatus, String);

impl From<GenposError> for Fail {
    fn from(e: GenposError) -> Self {
        Fail(code_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GenposStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            GenposStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            GenposStatus::Panic
        }
    }
}

fn null(name: &str) -> Fail {
    Fail(GenposStatus::NullPointer, format!("{name}: null pointer"))
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn system_ref<'a>(p: *const GenposSystem) -> Result<&'a IFSystem, Fail> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null("system"))
}

fn publish(out: *mut *mut GenposSystem, sys: IFSystem) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(GenposSystem(sys))) };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn genpos_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated) and returns the
/// size needed including the terminator. With a null `buf` or too small `len` nothing is copied.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn genpos_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let need = msg.len() + 1;
        if !buf.is_null() && len >= need {
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), msg.len());
            *buf.add(msg.len()) = 0;
        }
        need
    })
}

/// Parses a system descriptor (`{"dim", "maps", "hull"}`) from JSON.
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn genpos_system_from_json(json: *const c_char, out: *mut *mut GenposSystem) -> GenposStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Fail(GenposStatus::InvalidUtf8, format!("json: {e}")))?;
        publish(out, IFSystem::from_json(text)?)
    })
}

/// Builds the exact-overlap family member at `(t, b)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn genpos_exact_overlap_new(t: f64, b: f64, out: *mut *mut GenposSystem) -> GenposStatus {
    guard(|| publish(out, build_exact_overlap(&ExactOverlapParams::new(t, b)?)?))
}

/// Builds the one-point family member at `(p, q, r)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn genpos_one_point_new(p: f64, q: f64, r: f64, out: *mut *mut GenposSystem) -> GenposStatus {
    guard(|| publish(out, build_one_point(&OnePointParams::new(p, q, r)?)?))
}

/// Releases a system. Null is ignored.
///
/// # Safety
/// `system` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn genpos_system_free(system: *mut GenposSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Number of maps, or 0 for a null handle.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn genpos_system_len(system: *const GenposSystem) -> usize {
    system.as_ref().map_or(0, |s| s.0.len())
}

/// Ambient dimension, or 0 for a null handle.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn genpos_system_dim(system: *const GenposSystem) -> usize {
    system.as_ref().map_or(0, |s| s.0.dim())
}

/// Root of `Σ r_i^s = 1`.
///
/// # Safety
/// `ratios` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn genpos_similarity_dimension(ratios: *const f64, len: usize, out: *mut f64) -> GenposStatus {
    guard(|| {
        let r = RatioVector::new(slice(ratios, len, "ratios")?.to_vec())?;
        *out_ref(out, "out")? = genpos::moran::similarity_dimension(&r);
        Ok(())
    })
}

/// Decides whether the pieces of the 1-based words `j` and `k` are disjoint.
///
/// # Safety
/// `system` must be a live handle; `j`/`k` must point to `j_len`/`k_len` entries; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn genpos_check_pair_disjoint(
    system: *const GenposSystem,
    j: *const usize,
    j_len: usize,
    k: *const usize,
    k_len: usize,
    tol: f64,
    max_depth: usize,
    out: *mut GenposVerdict,
) -> GenposStatus {
    guard(|| {
        let sys = system_ref(system)?;
        let j = Word::new(slice(j, j_len, "j")?.to_vec());
        let k = Word::new(slice(k, k_len, "k")?.to_vec());
        let v = check_pair_disjoint(sys, &j, &k, tol, max_depth)?;
        *out_ref(out, "out")? = GenposVerdict {
            status: match v.status {
                Status::Disjoint => GenposSeparation::Disjoint,
                Status::Undecided => GenposSeparation::Undecided,
            },
            gap: v.gap,
            overlap_diameter: v.overlap_diameter,
            depth_used: v.depth_used,
            pairs_examined: v.pairs_examined,
        };
        Ok(())
    })
}

/// Checks all first-level pieces; `holds` receives 1 if every pair is certified disjoint and
/// `min_gap` the smallest certified gap (0 when none).
///
/// # Safety
/// `system` must be a live handle; `holds` and `min_gap` must be writable.
#[no_mangle]
pub unsafe extern "C" fn genpos_check_ssc(
    system: *const GenposSystem,
    tol: f64,
    max_depth: usize,
    holds: *mut i32,
    min_gap: *mut f64,
) -> GenposStatus {
    guard(|| {
        let rep = check_ssc(system_ref(system)?, tol, max_depth)?;
        *out_ref(holds, "holds")? = i32::from(rep.holds);
        *out_ref(min_gap, "min_gap")? = rep.min_gap.unwrap_or(0.0);
        Ok(())
    })
}

/// `C · dist / (1 − r̄)`, rounded up: motion bound for a point at coding distance `dist`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn genpos_displacement_bound(c: f64, rbar: f64, dist: f64, out: *mut f64) -> GenposStatus {
    guard(|| {
        *out_ref(out, "out")? = genpos::certify::displacement_bound(c, rbar, dist)?;
        Ok(())
    })
}

/// Transversality margin of the exact-overlap family for the pair `(1^m, 2^n)`.
#[no_mangle]
pub extern "C" fn genpos_margin_exact_overlap(n: usize, b: f64) -> f64 {
    genpos::cases::margin_exact_overlap(n, b)
}

/// Transversality margin of the one-point family for the pair `(1^m, ·)`.
#[no_mangle]
pub extern "C" fn genpos_margin_one_point(m: usize, p: f64) -> f64 {
    genpos::cases::margin_one_point(m, p)
}
