//! C ABI for `purichaos`.
//!
//! Every function returns a [`PurichaosStatus`]. On failure a message is kept
//! per thread and can be read with [`purichaos_last_error_message`]. Heap
//! objects are opaque handles released with their `*_free` function; freeing
//! `NULL` is a no-op. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use purichaos::basin::{self, BasinGrid, BasinLabel, Classifier, GridSpec};
use purichaos::complexdyn::{self, Parity};
use purichaos::protocol::{self, LocalUnitary};
use purichaos::qstate::{self, DensityMatrix2Q};
use purichaos::{Complex64, Error, RiemannPoint};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurichaosStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    ComputationFailed = 3,
    IoError = 4,
    Panic = 5,
    BufferTooSmall = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurichaosLabel {
    Bell = 0,
    SeparableCycle = 1,
    MixedCycle = 2,
    Unresolved = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurichaosParity {
    EvenZero = 0,
    OddZero = 1,
    Unresolved = 2,
}

/// A point of the Riemann sphere; `re`/`im` are ignored when `is_infinite` is nonzero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurichaosPoint {
    pub re: f64,
    pub im: f64,
    pub is_infinite: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PurichaosConstants {
    pub a: f64,
    pub zeta_a: f64,
    pub zeta_b: f64,
    pub zeta_c: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurichaosGridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub width: usize,
    pub height: usize,
    pub lambda: f64,
    /// 0 selects the default for `lambda`.
    pub max_iters: usize,
    pub tol: f64,
    pub supersample: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PurichaosLabelCounts {
    pub cells: usize,
    pub bell: usize,
    pub separable: usize,
    pub mixed: usize,
    pub unresolved: usize,
}

/// One trajectory step; `fano` holds the 16 Pauli-product coordinates of the state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PurichaosStepRecord {
    pub step: usize,
    pub fano: [f64; 16],
    pub entropy: f64,
    pub purity: f64,
    pub success_probability: f64,
    pub cumulative_yield: f64,
}

pub struct PurichaosBasin {
    grid: BasinGrid,
}

pub struct PurichaosClassifier {
    inner: Classifier,
}

pub struct PurichaosTrajectory {
    records: Vec<PurichaosStepRecord>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(PurichaosStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidParameter { .. } | Error::Parse { .. } | Error::InvalidState(_) => {
                PurichaosStatus::InvalidArgument
            }
            Error::Io(_) => PurichaosStatus::IoError,
            _ => PurichaosStatus::ComputationFailed,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PurichaosStatus::NullPointer, format!("{what} is NULL"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PurichaosStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            PurichaosStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            PurichaosStatus::Panic
        }
    }
}

/// Writes `value` through `out` after a NULL check.
///
/// # Safety
/// `out` must be NULL or valid for writes of `T`.
unsafe fn store<T>(out: *mut T, what: &str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn point_in(p: PurichaosPoint) -> Result<RiemannPoint, Failure> {
    if p.is_infinite != 0 {
        return Ok(RiemannPoint::Infinity);
    }
    if !p.re.is_finite() || !p.im.is_finite() {
        return Err(Failure(PurichaosStatus::InvalidArgument, "point coordinates must be finite".into()));
    }
    Ok(RiemannPoint::new(p.re, p.im))
}

fn point_out(z: RiemannPoint) -> PurichaosPoint {
    match z.finite() {
        Some(Complex64 { re, im }) => PurichaosPoint { re, im, is_infinite: 0 },
        None => PurichaosPoint {
            re: 0.0,
            im: 0.0,
            is_infinite: 1,
        },
    }
}

fn label_out(l: BasinLabel) -> PurichaosLabel {
    match l {
        BasinLabel::Bell => PurichaosLabel::Bell,
        BasinLabel::SeparableCycle => PurichaosLabel::SeparableCycle,
        BasinLabel::MixedCycle => PurichaosLabel::MixedCycle,
        BasinLabel::Unresolved => PurichaosLabel::Unresolved,
    }
}

/// Path argument as UTF-8.
///
/// # Safety
/// `path` must be NULL or a NUL-terminated string.
unsafe fn path_in<'a>(path: *const c_char) -> Result<&'a str, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map_err(|_| Failure(PurichaosStatus::InvalidArgument, "path is not UTF-8".into()))
}

/// Message of the last failed call on this thread (empty after a success).
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn purichaos_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn purichaos_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn purichaos_constants(out: *mut PurichaosConstants) -> PurichaosStatus {
    guard(|| {
        let c = complexdyn::compute_constants();
        store(
            out,
            "out",
            PurichaosConstants {
                a: c.a,
                zeta_a: c.zeta_a,
                zeta_b: c.zeta_b,
                zeta_c: c.zeta_c,
            },
        )
    })
}

/// `f(ζ) = (1 - ζ²)/(1 + ζ²)` on the Riemann sphere.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn purichaos_eval_f(z: PurichaosPoint, out: *mut PurichaosPoint) -> PurichaosStatus {
    guard(|| store(out, "out", point_out(complexdyn::eval_f(point_in(z)?))))
}

/// `g = f∘f` on the Riemann sphere.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn purichaos_eval_g(z: PurichaosPoint, out: *mut PurichaosPoint) -> PurichaosStatus {
    guard(|| store(out, "out", point_out(complexdyn::eval_g(point_in(z)?))))
}

/// Parity of the first iterate of `f` that enters `|ζ| < tol`.
///
/// # Safety
/// `parity` and `steps` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn purichaos_iterate_reduced(
    z: PurichaosPoint,
    max_iters: usize,
    tol: f64,
    parity: *mut PurichaosParity,
    steps: *mut usize,
) -> PurichaosStatus {
    guard(|| {
        if parity.is_null() || steps.is_null() {
            return Err(null("output"));
        }
        let o = complexdyn::iterate_reduced(point_in(z)?, max_iters, tol)?;
        let p = match o.label {
            Parity::EvenZero => PurichaosParity::EvenZero,
            Parity::OddZero => PurichaosParity::OddZero,
            Parity::Unresolved => PurichaosParity::Unresolved,
        };
        store(parity, "parity", p)?;
        store(steps, "steps", o.steps)
    })
}

/// Prepares attractor targets for `lambda`. For `lambda < 1` this runs the
/// mixed-cycle search once, so reuse the handle for many points.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn purichaos_classifier_new(
    lambda: f64,
    max_iters: usize,
    tol: f64,
    out: *mut *mut PurichaosClassifier,
) -> PurichaosStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let iters = if max_iters == 0 { basin::default_max_iters(lambda) } else { max_iters };
        let inner = Classifier::new(lambda, iters, tol)?;
        store(out, "out", Box::into_raw(Box::new(PurichaosClassifier { inner })))
    })
}

/// # Safety
/// `classifier` must come from [`purichaos_classifier_new`]; outputs NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn purichaos_classifier_classify(
    classifier: *const PurichaosClassifier,
    z: PurichaosPoint,
    label: *mut PurichaosLabel,
    steps: *mut usize,
) -> PurichaosStatus {
    guard(|| {
        let c = classifier.as_ref().ok_or_else(|| null("classifier"))?;
        if label.is_null() || steps.is_null() {
            return Err(null("output"));
        }
        let r = c.inner.classify(point_in(z)?);
        store(label, "label", label_out(r.label))?;
        store(steps, "steps", r.steps)
    })
}

/// # Safety
/// `classifier` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn purichaos_classifier_free(classifier: *mut PurichaosClassifier) {
    if !classifier.is_null() {
        drop(Box::from_raw(classifier));
    }
}

/// Convenience wrapper building a throw-away classifier.
///
/// # Safety
/// `label` and `steps` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn purichaos_classify_point(
    z: PurichaosPoint,
    lambda: f64,
    max_iters: usize,
    tol: f64,
    label: *mut PurichaosLabel,
    steps: *mut usize,
) -> PurichaosStatus {
    guard(|| {
        if label.is_null() || steps.is_null() {
            return Err(null("output"));
        }
        let iters = if max_iters == 0 { basin::default_max_iters(lambda) } else { max_iters };
        let r = basin::classify_point(point_in(z)?, lambda, iters, tol)?;
        store(label, "label", label_out(r.label))?;
        store(steps, "steps", r.steps)
    })
}

/// Computes a basin grid with `threads` workers (0 = default pool).
///
/// # Safety
/// `spec` must be NULL or point to a valid spec; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn purichaos_basin_compute(
    spec: *const PurichaosGridSpec,
    threads: usize,
    out: *mut *mut PurichaosBasin,
) -> PurichaosStatus {
    guard(|| {
        let s = spec.as_ref().ok_or_else(|| null("spec"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let gs = GridSpec {
            re_min: s.re_min,
            re_max: s.re_max,
            im_min: s.im_min,
            im_max: s.im_max,
            width: s.width,
            height: s.height,
            lambda: s.lambda,
            max_iters: if s.max_iters == 0 { basin::default_max_iters(s.lambda) } else { s.max_iters },
            tol: s.tol,
            supersample: s.supersample != 0,
        };
        gs.width
            .checked_mul(gs.height)
            .ok_or_else(|| Failure(PurichaosStatus::InvalidArgument, "grid too large".into()))?;
        let grid = basin::compute_basin_with_threads(&gs, (threads > 0).then_some(threads))?;
        store(out, "out", Box::into_raw(Box::new(PurichaosBasin { grid })))
    })
}

/// Width of the grid, 0 for NULL.
///
/// # Safety
/// `basin` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn purichaos_basin_width(basin: *const PurichaosBasin) -> usize {
    basin.as_ref().map_or(0, |b| b.grid.width())
}

/// Height of the grid, 0 for NULL.
///
/// # Safety
/// `basin` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn purichaos_basin_height(basin: *const PurichaosBasin) -> usize {
    basin.as_ref().map_or(0, |b| b.grid.height())
}

/// Copies `width*height` label codes (row-major from top-left) into `buf`.
///
/// # Safety
/// `buf` must be NULL or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn purichaos_basin_labels(
    basin: *const PurichaosBasin,
    buf: *mut u8,
    len: usize,
) -> PurichaosStatus {
    guard(|| {
        let b = basin.as_ref().ok_or_else(|| null("basin"))?;
        let codes: Vec<u8> = b.grid.labels.iter().map(|l| l.code()).collect();
        copy_out(&codes, buf, len)
    })
}

/// Copies the per-cell first-detection steps into `buf`.
///
/// # Safety
/// `buf` must be NULL or valid for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn purichaos_basin_steps(
    basin: *const PurichaosBasin,
    buf: *mut u32,
    len: usize,
) -> PurichaosStatus {
    guard(|| {
        let b = basin.as_ref().ok_or_else(|| null("basin"))?;
        copy_out(&b.grid.steps, buf, len)
    })
}

unsafe fn copy_out<T: Copy>(src: &[T], buf: *mut T, len: usize) -> Result<(), Failure> {
    if buf.is_null() {
        return Err(null("buf"));
    }
    if len < src.len() {
        return Err(Failure(
            PurichaosStatus::BufferTooSmall,
            format!("buffer holds {len} elements, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// # Safety
/// `basin` NULL or live; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn purichaos_basin_counts(
    basin: *const PurichaosBasin,
    out: *mut PurichaosLabelCounts,
) -> PurichaosStatus {
    guard(|| {
        let b = basin.as_ref().ok_or_else(|| null("basin"))?;
        let c = b.grid.counts();
        store(
            out,
            "out",
            PurichaosLabelCounts {
                cells: c.cells,
                bell: c.bell,
                separable: c.separable,
                mixed: c.mixed,
                unresolved: c.unresolved,
            },
        )
    })
}

/// Box-counting dimension of the label boundary.
///
/// # Safety
/// `basin` NULL or live; outputs NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn purichaos_basin_boundary_dimension(
    basin: *const PurichaosBasin,
    dimension: *mut f64,
    r2: *mut f64,
) -> PurichaosStatus {
    guard(|| {
        let b = basin.as_ref().ok_or_else(|| null("basin"))?;
        if dimension.is_null() || r2.is_null() {
            return Err(null("output"));
        }
        let d = basin::boundary_dimension(&b.grid)?;
        store(dimension, "dimension", d.dimension)?;
        store(r2, "r2", d.r2)
    })
}

/// # Safety
/// `basin` NULL or live; `path` NULL or a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn purichaos_basin_write_ppm(basin: *const PurichaosBasin, path: *const c_char) -> PurichaosStatus {
    guard(|| {
        let b = basin.as_ref().ok_or_else(|| null("basin"))?;
        let p = path_in(path)?;
        std::fs::write(p, basin::render_ppm(&b.grid)).map_err(|e| Failure::from(Error::from(e)))
    })
}

/// # Safety
/// `basin` NULL or live; `path` NULL or a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn purichaos_basin_write_csv(basin: *const PurichaosBasin, path: *const c_char) -> PurichaosStatus {
    guard(|| {
        let b = basin.as_ref().ok_or_else(|| null("basin"))?;
        let p = path_in(path)?;
        let file = std::fs::File::create(p).map_err(|e| Failure::from(Error::from(e)))?;
        Ok(b.grid.write_csv(file)?)
    })
}

/// # Safety
/// `basin` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn purichaos_basin_free(basin: *mut PurichaosBasin) {
    if !basin.is_null() {
        drop(Box::from_raw(basin));
    }
}

/// Runs `steps` protocol rounds from `ρ(ζ, λ)`; record `k` is the state after round `k+1`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn purichaos_trajectory_run(
    z: PurichaosPoint,
    lambda: f64,
    steps: usize,
    out: *mut *mut PurichaosTrajectory,
) -> PurichaosStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let rho: DensityMatrix2Q = qstate::werner_mix(point_in(z)?, lambda)?;
        let traj = protocol::run_trajectory(&rho, &LocalUnitary::hadamard(), steps)?;
        let records = traj
            .records
            .iter()
            .map(|r| PurichaosStepRecord {
                step: r.step,
                fano: purichaos::fano::to_fano(&r.state).0,
                entropy: r.entropy,
                purity: r.purity,
                success_probability: r.success_probability,
                cumulative_yield: r.cumulative_yield,
            })
            .collect();
        store(out, "out", Box::into_raw(Box::new(PurichaosTrajectory { records })))
    })
}

/// Number of records, 0 for NULL.
///
/// # Safety
/// `traj` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn purichaos_trajectory_len(traj: *const PurichaosTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.records.len())
}

/// # Safety
/// `traj` NULL or live; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn purichaos_trajectory_record(
    traj: *const PurichaosTrajectory,
    index: usize,
    out: *mut PurichaosStepRecord,
) -> PurichaosStatus {
    guard(|| {
        let t = traj.as_ref().ok_or_else(|| null("trajectory"))?;
        let r = t.records.get(index).ok_or_else(|| {
            Failure(
                PurichaosStatus::InvalidArgument,
                format!("index {index} out of range ({} records)", t.records.len()),
            )
        })?;
        store(out, "out", *r)
    })
}

/// # Safety
/// `traj` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn purichaos_trajectory_free(traj: *mut PurichaosTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Compares the selection formula with the two-pair circuit on seeded random states.
/// `passed` is set to 1 when both deviations are within tolerance.
///
/// # Safety
/// Outputs must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn purichaos_oracle_check(
    samples: usize,
    seed: u64,
    max_deviation: *mut f64,
    passed: *mut i32,
) -> PurichaosStatus {
    guard(|| {
        if max_deviation.is_null() || passed.is_null() {
            return Err(null("output"));
        }
        let s = purichaos::cli::oracle_check(samples, seed)?;
        store(max_deviation, "max_deviation", s.max_deviation)?;
        store(passed, "passed", i32::from(s.passed()))
    })
}
