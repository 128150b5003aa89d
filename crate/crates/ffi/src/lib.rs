//! C ABI over the lensfocus estimator.
//!
//! Every entry point returns an `LfStatus`; results come back through out
//! pointers. On failure the message for the calling thread is available from
//! `lf_last_error` until the next failing call on that thread. Handles are
//! opaque and must be released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lensfocus::estimation::MonteCarloResult;
use lensfocus::optics::{focal_from_magnification, image_distance, width_two_position};
use lensfocus::sensor::pixels_to_width;
use lensfocus::{
    emit_report, parse_session, AggregateResult, BundledTable, Error, Magnification, NoiseSpec,
    PixelCount, ReportFormat, RoundingMode, Session, SignedDistance, TransverseWidth,
};

/// Status code returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    Degenerate = 5,
    InsufficientData = 6,
    Panic = 7,
}

/// Unrounded arithmetic throughout.
pub const LF_MODE_FULL_PRECISION: u32 = 0;
/// Rounds intermediate cells the way the bundled tables were printed.
pub const LF_MODE_TABLE_REPRODUCTION: u32 = 1;

pub const LF_FORMAT_TEXT: u32 = 0;
pub const LF_FORMAT_CSV: u32 = 1;
pub const LF_FORMAT_PLOTDATA: u32 = 2;

/// A parsed measurement session.
pub struct LfSession(Session);

/// Per-row estimates plus their mean and standard error.
pub struct LfEstimate(AggregateResult);

/// One estimated row. Distances and widths in cm.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LfRow {
    pub obs_no: u32,
    pub d1_cm: f64,
    pub pixel1: u32,
    pub i1_cm: f64,
    pub d_cm: f64,
    pub pixel2: u32,
    pub i2_cm: f64,
    pub width_cm: f64,
    pub magnification: f64,
    pub focal_length_cm: f64,
}

/// Half-widths of the uniform jitter applied in Monte Carlo trials.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LfNoise {
    pub pixel_halfwidth: f64,
    pub d_halfwidth_cm: f64,
    pub u_halfwidth_cm: f64,
    pub seed: u64,
}

/// Summary of a Monte Carlo focal-length distribution.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LfUncertainty {
    pub n: usize,
    pub failed: usize,
    pub mean_f: f64,
    pub sd_f: f64,
    pub q025: f64,
    pub q500: f64,
    pub q975: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(LfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse(_) => LfStatus::ParseError,
            Error::InsufficientData { .. } => LfStatus::InsufficientData,
            e if e.is_degenerate() => LfStatus::Degenerate,
            _ => LfStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: LfStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> LfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            LfStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(LfStatus::NullPointer, "null output pointer"))
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(LfStatus::NullPointer, "null handle"))
}

fn mode(m: u32) -> Result<RoundingMode, Failure> {
    match m {
        LF_MODE_FULL_PRECISION => Ok(RoundingMode::FullPrecision),
        LF_MODE_TABLE_REPRODUCTION => Ok(RoundingMode::TableReproduction),
        _ => Err(fail(
            LfStatus::InvalidArgument,
            format!("unknown rounding mode {m}"),
        )),
    }
}

fn report_format(f: u32) -> Result<ReportFormat, Failure> {
    match f {
        LF_FORMAT_TEXT => Ok(ReportFormat::TextTable),
        LF_FORMAT_CSV => Ok(ReportFormat::Csv),
        LF_FORMAT_PLOTDATA => Ok(ReportFormat::PlotData),
        _ => Err(fail(
            LfStatus::InvalidArgument,
            format!("unknown report format {f}"),
        )),
    }
}

fn distance(x: f64) -> Result<SignedDistance, Failure> {
    Ok(SignedDistance::new(x)?)
}

/// Message of the last failure on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses session text. On success `*out_session` owns a new session.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out_session` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_session_parse(
    text: *const c_char,
    out_session: *mut *mut LfSession,
) -> LfStatus {
    guard(|| {
        let slot = out(out_session)?;
        *slot = ptr::null_mut();
        if text.is_null() {
            return Err(fail(LfStatus::NullPointer, "null session text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| fail(LfStatus::InvalidUtf8, e.to_string()))?;
        let session = parse_session(text).map_err(Error::from)?;
        *slot = Box::into_raw(Box::new(LfSession(session)));
        Ok(())
    })
}

/// Loads one of the bundled datasets: 1 for the concave lens, 2 for the convex lens.
///
/// # Safety
/// `out_session` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_session_bundled(
    table: u32,
    out_session: *mut *mut LfSession,
) -> LfStatus {
    guard(|| {
        let slot = out(out_session)?;
        *slot = ptr::null_mut();
        let table = BundledTable::from_number(table).ok_or_else(|| {
            fail(
                LfStatus::InvalidArgument,
                format!("no bundled table {table}"),
            )
        })?;
        *slot = Box::into_raw(Box::new(LfSession(table.session())));
        Ok(())
    })
}

/// Releases a session. NULL is ignored.
///
/// # Safety
/// `session` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lf_session_free(session: *mut LfSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// # Safety
/// `session` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_session_row_count(
    session: *const LfSession,
    count: *mut usize,
) -> LfStatus {
    guard(|| {
        *out(count)? = borrow(session)?.0.rows.len();
        Ok(())
    })
}

/// Estimates every row of a session and aggregates them.
///
/// # Safety
/// `session` must be a live handle; `out_estimate` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_session_estimate(
    session: *const LfSession,
    rounding: u32,
    out_estimate: *mut *mut LfEstimate,
) -> LfStatus {
    guard(|| {
        let slot = out(out_estimate)?;
        *slot = ptr::null_mut();
        let result = borrow(session)?.0.aggregate(mode(rounding)?)?;
        *slot = Box::into_raw(Box::new(LfEstimate(result)));
        Ok(())
    })
}

/// Monte Carlo spread of one row's focal length. `noise` may be NULL for defaults with seed 0.
///
/// # Safety
/// `session` must be a live handle; `noise` NULL or readable; `out_summary` writable.
#[no_mangle]
pub unsafe extern "C" fn lf_session_uncertainty(
    session: *const LfSession,
    row_index: usize,
    noise: *const LfNoise,
    trials: usize,
    out_summary: *mut LfUncertainty,
) -> LfStatus {
    guard(|| {
        let slot = out(out_summary)?;
        let session = &borrow(session)?.0;
        let row = session.rows.get(row_index).ok_or_else(|| {
            fail(
                LfStatus::InvalidArgument,
                format!(
                    "row {row_index} out of range for {} rows",
                    session.rows.len()
                ),
            )
        })?;
        let noise = match noise.as_ref() {
            Some(n) => NoiseSpec {
                pixel_halfwidth: n.pixel_halfwidth,
                d_halfwidth: n.d_halfwidth_cm,
                u_halfwidth: n.u_halfwidth_cm,
                seed: n.seed,
            },
            None => NoiseSpec::with_seed(0),
        };
        let MonteCarloResult {
            failed, summary, ..
        } = lensfocus::propagate_uncertainty(
            &session.camera,
            &session.object,
            row,
            &noise,
            trials,
        )?;
        *slot = LfUncertainty {
            n: summary.n,
            failed,
            mean_f: summary.mean_f,
            sd_f: summary.sd_f,
            q025: summary.q025,
            q500: summary.q500,
            q975: summary.q975,
        };
        Ok(())
    })
}

/// Default measurement noise with the given seed.
#[no_mangle]
pub extern "C" fn lf_noise_default(seed: u64) -> LfNoise {
    let n = NoiseSpec::with_seed(seed);
    LfNoise {
        pixel_halfwidth: n.pixel_halfwidth,
        d_halfwidth_cm: n.d_halfwidth,
        u_halfwidth_cm: n.u_halfwidth,
        seed,
    }
}

/// Releases an estimate. NULL is ignored.
///
/// # Safety
/// `estimate` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lf_estimate_free(estimate: *mut LfEstimate) {
    if !estimate.is_null() {
        drop(Box::from_raw(estimate));
    }
}

/// # Safety
/// `estimate` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_estimate_row_count(
    estimate: *const LfEstimate,
    count: *mut usize,
) -> LfStatus {
    guard(|| {
        *out(count)? = borrow(estimate)?.0.n;
        Ok(())
    })
}

/// Mean focal length in cm; negative for a diverging lens.
///
/// # Safety
/// `estimate` must be a live handle; `mean_f` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_estimate_mean_f(
    estimate: *const LfEstimate,
    mean_f: *mut f64,
) -> LfStatus {
    guard(|| {
        *out(mean_f)? = borrow(estimate)?.0.mean_f;
        Ok(())
    })
}

/// Standard error of the mean focal length in cm.
///
/// # Safety
/// `estimate` must be a live handle; `sem_f` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_estimate_sem_f(
    estimate: *const LfEstimate,
    sem_f: *mut f64,
) -> LfStatus {
    guard(|| {
        *out(sem_f)? = borrow(estimate)?.0.sem_f;
        Ok(())
    })
}

/// # Safety
/// `estimate` must be a live handle; `row` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_estimate_row(
    estimate: *const LfEstimate,
    index: usize,
    row: *mut LfRow,
) -> LfStatus {
    guard(|| {
        let slot = out(row)?;
        let rows = &borrow(estimate)?.0.per_row;
        let r = rows.get(index).ok_or_else(|| {
            fail(
                LfStatus::InvalidArgument,
                format!("row {index} out of range for {} rows", rows.len()),
            )
        })?;
        *slot = LfRow {
            obs_no: r.obs.obs_no,
            d1_cm: r.obs.d1_cm,
            pixel1: r.obs.pixel1.get(),
            i1_cm: r.i1_cm,
            d_cm: r.obs.d_cm,
            pixel2: r.obs.pixel2.get(),
            i2_cm: r.i2_cm,
            width_cm: r.width_cm,
            magnification: r.magnification,
            focal_length_cm: r.focal_length_cm,
        };
        Ok(())
    })
}

/// Renders a report. `*out_text` receives a string to be released with `lf_string_free`.
///
/// # Safety
/// `estimate` must be a live handle; `out_text` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_estimate_report(
    estimate: *const LfEstimate,
    format: u32,
    out_text: *mut *mut c_char,
) -> LfStatus {
    guard(|| {
        let slot = out(out_text)?;
        *slot = ptr::null_mut();
        let text = emit_report(&borrow(estimate)?.0, report_format(format)?);
        let c = CString::new(text).map_err(|e| fail(LfStatus::InvalidArgument, e.to_string()))?;
        *slot = c.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Image distance v for object distance u and focal length f, all signed cm.
///
/// # Safety
/// `v_cm` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_image_distance(u_cm: f64, f_cm: f64, v_cm: *mut f64) -> LfStatus {
    guard(|| {
        *out(v_cm)? = image_distance(distance(u_cm)?, distance(f_cm)?)?.get();
        Ok(())
    })
}

/// Focal length from object distance and lateral magnification.
///
/// # Safety
/// `f_cm` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_focal_from_magnification(
    u_cm: f64,
    m: f64,
    f_cm: *mut f64,
) -> LfStatus {
    guard(|| {
        *out(f_cm)? = focal_from_magnification(distance(u_cm)?, Magnification::new(m)?)?.get();
        Ok(())
    })
}

/// Virtual-image width from two sensor widths taken a displacement `d_cm` apart.
///
/// # Safety
/// `width_cm` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_width_two_position(
    d_cm: f64,
    camera_focal_cm: f64,
    i1_cm: f64,
    i2_cm: f64,
    width_cm: *mut f64,
) -> LfStatus {
    guard(|| {
        let w = width_two_position(
            d_cm,
            camera_focal_cm,
            TransverseWidth::new(i1_cm)?,
            TransverseWidth::new(i2_cm)?,
        )?;
        *out(width_cm)? = w.get();
        Ok(())
    })
}

/// Sensor width in cm of a span of `count` pixels at `pitch_um` micrometres.
///
/// # Safety
/// `width_cm` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_pixels_to_width(
    count: u32,
    pitch_um: f64,
    width_cm: *mut f64,
) -> LfStatus {
    guard(|| {
        *out(width_cm)? = pixels_to_width(PixelCount(count), pitch_um)?.get();
        Ok(())
    })
}
