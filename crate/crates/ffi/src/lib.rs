//! C interface to heatlab.
//!
//! Models and kernels are opaque handles created and released through this
//! interface. Every fallible call returns an [`HlStatus`]; the message of the
//! last failure on the calling thread is available from [`hl_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::Arc;

use heatlab::fractal_ops::build_gasket;
use heatlab::graph_ops::{discretize_graph, MetricGraph};
use heatlab::kernel::{chapman_kolmogorov_residual, heat_kernel, symmetry_residual, KernelMatrix, SpectralData};
use heatlab::space::{disjoint_union, SampledSpace};
use heatlab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Numerical = 4,
    Config = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Self-adjoint generator with its spectral data.
pub struct HlModel {
    spec: SpectralData,
    space: Arc<SampledSpace>,
}

pub struct HlKernel {
    kernel: KernelMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> HlStatus {
    match e {
        Error::Config(_) | Error::Json(_) | Error::Graph(_) | Error::Disconnected(_) => HlStatus::Config,
        Error::Domain(_) | Error::Ellipticity { .. } => HlStatus::Domain,
        Error::Dimension(_) | Error::InvalidSpace(_) | Error::Contract(_) | Error::Capacity(_) => {
            HlStatus::InvalidArgument
        }
        Error::Io(_) => HlStatus::Io,
        _ => HlStatus::Numerical,
    }
}

/// Runs `f`, recording errors and panics for [`hl_last_error`].
fn guard(f: impl FnOnce() -> Result<(), (HlStatus, String)>) -> HlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HlStatus::Panic
        }
    }
}

fn lift(e: Error) -> (HlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (HlStatus, String) {
    (HlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (HlStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (HlStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn hl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn model_from_graph(text: &str, h: f64) -> heatlab::Result<HlModel> {
    let g = MetricGraph::from_json(text)?;
    let d = discretize_graph(&g, h)?;
    let (op, space) = if d.op.is_magnetic() {
        (d.op.real_embedding()?, disjoint_union(&d.space, &d.space))
    } else {
        (d.op, d.space)
    };
    Ok(HlModel {
        spec: SpectralData::from_operator(&op)?,
        space: Arc::new(space),
    })
}

/// Discretizes a graph document with mesh size `h`.
///
/// # Safety
/// `graph_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hl_graph_model_new(graph_json: *const c_char, h: f64, out: *mut *mut HlModel) -> HlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(graph_json, "graph_json")?;
        let m = model_from_graph(text, h).map_err(lift)?;
        *out = Box::into_raw(Box::new(m));
        Ok(())
    })
}

/// Gasket approximation at `level` with the resistance metric.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hl_gasket_model_new(level: u32, out: *mut *mut HlModel) -> HlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let b = build_gasket(level).map_err(lift)?;
        let spec = SpectralData::from_operator(&b.op).map_err(lift)?;
        *out = Box::into_raw(Box::new(HlModel {
            spec,
            space: Arc::new(b.resistance_space),
        }));
        Ok(())
    })
}

/// # Safety
/// `model` must come from a constructor of this library and not be used
/// afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hl_model_free(model: *mut HlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hl_model_dimension(model: *const HlModel, out: *mut usize) -> HlStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = m.spec.dim();
        Ok(())
    })
}

/// Copies up to `len` ascending eigenvalues into `buf` and stores the total
/// count in `count`. Returns `HL_STATUS_BUFFER_TOO_SMALL` when `len` is
/// short; the copied prefix is still valid.
///
/// # Safety
/// `buf` must hold `len` doubles; `model` and `count` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hl_model_eigenvalues(
    model: *const HlModel,
    buf: *mut f64,
    len: usize,
    count: *mut usize,
) -> HlStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let count = count.as_mut().ok_or_else(|| null("count"))?;
        let ev = m.spec.eigenvalues();
        *count = ev.len();
        let k = ev.len().min(len);
        if k > 0 {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(ev.as_ptr(), buf, k);
        }
        if len < ev.len() {
            return Err((HlStatus::BufferTooSmall, format!("{} eigenvalues, buffer holds {len}", ev.len())));
        }
        Ok(())
    })
}

/// Heat kernel at time `t`.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hl_heat_kernel(model: *const HlModel, t: f64, out: *mut *mut HlKernel) -> HlStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let kernel = heat_kernel(&m.spec, m.space.clone(), t, None).map_err(lift)?;
        *out = Box::into_raw(Box::new(HlKernel { kernel }));
        Ok(())
    })
}

/// # Safety
/// `kernel` must come from [`hl_heat_kernel`] and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hl_kernel_free(kernel: *mut HlKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// Copies the kernel matrix, row-major, into `buf` of `len` doubles
/// (`len ≥ n²`).
///
/// # Safety
/// `kernel` must be valid and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hl_kernel_values(kernel: *const HlKernel, buf: *mut f64, len: usize) -> HlStatus {
    guard(|| {
        let k = &kernel.as_ref().ok_or_else(|| null("kernel"))?.kernel;
        let v = k.values.as_slice();
        if len < v.len() {
            return Err((HlStatus::BufferTooSmall, format!("kernel has {} entries, buffer holds {len}", v.len())));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        Ok(())
    })
}

/// Kernel entry `p(x_i, x_j)`.
///
/// # Safety
/// `kernel` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hl_kernel_value(kernel: *const HlKernel, i: usize, j: usize, out: *mut f64) -> HlStatus {
    guard(|| {
        let k = &kernel.as_ref().ok_or_else(|| null("kernel"))?.kernel;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let n = k.dim();
        if i >= n || j >= n {
            return Err((HlStatus::InvalidArgument, format!("index ({i}, {j}) outside {n}×{n}")));
        }
        *out = k.values[(i, j)];
        Ok(())
    })
}

/// `max |p − pᵀ| / max |p|`.
///
/// # Safety
/// `kernel` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hl_kernel_symmetry_residual(kernel: *const HlKernel, out: *mut f64) -> HlStatus {
    guard(|| {
        let k = &kernel.as_ref().ok_or_else(|| null("kernel"))?.kernel;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = symmetry_residual(k).map_err(lift)?;
        Ok(())
    })
}

/// `max_x |Σ_y p(x, y) w(y) − 1|`.
///
/// # Safety
/// `kernel` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hl_kernel_mass_defect(kernel: *const HlKernel, out: *mut f64) -> HlStatus {
    guard(|| {
        let k = &kernel.as_ref().ok_or_else(|| null("kernel"))?.kernel;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = k.mass_defect();
        Ok(())
    })
}

/// `max |p_{s+t} − p_t W p_s| / max |p_{s+t}|`.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hl_chapman_kolmogorov_residual(
    model: *const HlModel,
    s: f64,
    t: f64,
    out: *mut f64,
) -> HlStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let k = |t: f64| heat_kernel(&m.spec, m.space.clone(), t, None).map_err(lift);
        *out = chapman_kolmogorov_residual(&k(t)?, &k(s)?, &k(s + t)?).map_err(lift)?;
        Ok(())
    })
}

/// Runs a scenario file like `heatlab run`; `out_dir` may be null. The
/// command-line exit code (0, 2, 3 or 4) is stored in `exit_code`.
///
/// # Safety
/// `scenario_path` must be a NUL-terminated string, `out_dir` null or
/// NUL-terminated, and `exit_code` valid.
#[no_mangle]
pub unsafe extern "C" fn hl_run_scenario(
    scenario_path: *const c_char,
    out_dir: *const c_char,
    exit_code: *mut i32,
) -> HlStatus {
    guard(|| {
        let code = exit_code.as_mut().ok_or_else(|| null("exit_code"))?;
        let path = read_str(scenario_path, "scenario_path")?;
        let out = if out_dir.is_null() {
            None
        } else {
            Some(read_str(out_dir, "out_dir")?)
        };
        match heatlab::cli::run(Path::new(path), out.map(Path::new), true) {
            Ok(s) => {
                *code = s.exit_code();
                Ok(())
            }
            Err(e) => {
                *code = heatlab::cli::error_exit_code(&e);
                Err(lift(e))
            }
        }
    })
}
