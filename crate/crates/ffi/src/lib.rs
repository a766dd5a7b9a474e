//! C ABI over `sharpgrad`.
//!
//! Every entry point returns an [`SgStatus`]. Results go through out
//! pointers. Settings and the last error message live in an opaque
//! [`SgContext`] created with [`sg_context_new`] and released with
//! [`sg_context_free`]. A context must not be shared between threads
//! without external locking; separate contexts are independent.
//!
//! Exponents are passed as `double`; `p = +INFINITY` selects `p = ∞`.
//! Points of the ball and sphere are arrays of `n` doubles.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sharpgrad::constants::{
    c_at_angle, c_optimal, AngleGamma, ConstantOptions, ConstantReport, DirectionKind, Exponent, ExponentPair, Regime,
};
use sharpgrad::kernel::{kernel_gradient, mobius_phi, poisson_kernel, BallPoint, Direction, EvalPath};
use sharpgrad::quadrature::QuadratureSpec;
use sharpgrad::special::SeriesControl;
use sharpgrad::verify::{run_suite, SuiteName, VerifySettings};
use sharpgrad::Error;

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// An argument was outside the domain of the routine.
    InvalidArgument = 2,
    /// A series hit its term limit.
    Convergence = 3,
    /// A quadrature hit its refinement limit.
    Accuracy = 4,
    /// An internal panic was caught at the boundary.
    Internal = 5,
}

/// Evaluation route of a result; `Auto` is only meaningful as an input.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgPath {
    Auto = 0,
    SphereQuadrature = 1,
    DiscReduction = 2,
    ClosedForm = 3,
    MonteCarlo = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgRegime {
    Below = 0,
    AtN = 1,
    Above = 2,
    Infinity = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgDirection {
    Radial = 0,
    Tangential = 1,
    Oblique = 2,
    Any = 3,
}

/// A sharp constant together with its `K` factor and provenance.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgConstant {
    pub value: f64,
    pub k: f64,
    /// Reduced angle in `[0, π/2]` that was evaluated.
    pub gamma: f64,
    pub err_est: f64,
    pub path: SgPath,
    pub regime: SgRegime,
    pub direction: SgDirection,
}

/// Summary of one verification suite.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgSuiteResult {
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    pub worst: f64,
    pub tolerance: f64,
}

/// Opaque evaluation context.
pub struct SgContext {
    options: ConstantOptions,
    last_error: CString,
}

impl SgContext {
    fn fail(&mut self, status: SgStatus, msg: String) -> SgStatus {
        self.last_error = CString::new(msg.replace('\0', " ")).unwrap_or_default();
        status
    }

    fn fail_with(&mut self, e: Error) -> SgStatus {
        let status = match e {
            Error::Convergence { .. } => SgStatus::Convergence,
            Error::Accuracy { .. } => SgStatus::Accuracy,
            Error::Domain { .. } | Error::Usage(_) => SgStatus::InvalidArgument,
        };
        self.fail(status, e.to_string())
    }
}

fn guarded(ctx: *mut SgContext, body: impl FnOnce(&mut SgContext) -> Result<(), SgStatus>) -> SgStatus {
    // SAFETY: callers pass either null or a pointer from `sg_context_new`.
    let Some(ctx) = (unsafe { ctx.as_mut() }) else {
        return SgStatus::NullPointer;
    };
    ctx.last_error = CString::default();
    match catch_unwind(AssertUnwindSafe(|| body(ctx))) {
        Ok(Ok(())) => SgStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => ctx.fail(SgStatus::Internal, "internal panic".to_string()),
    }
}

fn exponent_pair(ctx: &mut SgContext, p: f64) -> Result<ExponentPair, SgStatus> {
    let e = if p == f64::INFINITY {
        Exponent::Infinity
    } else {
        Exponent::Finite(p)
    };
    ExponentPair::new(e).map_err(|e| ctx.fail_with(e))
}

/// # Safety
/// `ptr` must be null or point to `len` readable doubles.
unsafe fn slice<'a>(ctx: &mut SgContext, ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], SgStatus> {
    if ptr.is_null() {
        return Err(ctx.fail(SgStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn out_ref<'a, T>(ctx: &mut SgContext, ptr: *mut T, what: &str) -> Result<&'a mut T, SgStatus> {
    // SAFETY: callers pass either null or a writable pointer.
    unsafe { ptr.as_mut() }.ok_or_else(|| ctx.fail(SgStatus::NullPointer, format!("{what} is null")))
}

fn to_path(p: EvalPath) -> SgPath {
    match p {
        EvalPath::SphereQuadrature => SgPath::SphereQuadrature,
        EvalPath::DiscReduction => SgPath::DiscReduction,
        EvalPath::ClosedForm => SgPath::ClosedForm,
        EvalPath::MonteCarlo => SgPath::MonteCarlo,
    }
}

fn to_constant(r: &ConstantReport) -> SgConstant {
    SgConstant {
        value: r.value,
        k: r.k,
        gamma: r.gamma,
        err_est: r.err_est,
        path: to_path(r.path),
        regime: match r.regime {
            Regime::Below => SgRegime::Below,
            Regime::AtN => SgRegime::AtN,
            Regime::Above => SgRegime::Above,
            Regime::Infinity => SgRegime::Infinity,
        },
        direction: match r.direction_kind {
            DirectionKind::Radial => SgDirection::Radial,
            DirectionKind::Tangential => SgDirection::Tangential,
            DirectionKind::Oblique => SgDirection::Oblique,
            DirectionKind::Any => SgDirection::Any,
        },
    }
}

/// Creates a context with default tolerances. Never returns null.
#[no_mangle]
pub extern "C" fn sg_context_new() -> *mut SgContext {
    Box::into_raw(Box::new(SgContext {
        options: ConstantOptions::default(),
        last_error: CString::default(),
    }))
}

/// Releases a context. Null is ignored.
///
/// # Safety
/// `ctx` must be null or come from [`sg_context_new`], and must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn sg_context_free(ctx: *mut SgContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Message of the last failed call on `ctx`; empty after a success. The
/// pointer stays valid until the next call on `ctx`.
///
/// # Safety
/// `ctx` must be null or a live context.
#[no_mangle]
pub unsafe extern "C" fn sg_context_last_error(ctx: *const SgContext) -> *const c_char {
    match ctx.as_ref() {
        Some(c) => c.last_error.as_ptr(),
        None => c"null context".as_ptr(),
    }
}

/// Sets the adaptive Gauss–Legendre controls.
///
/// # Safety
/// `ctx` must be null or a live context.
#[no_mangle]
pub unsafe extern "C" fn sg_context_set_quadrature(
    ctx: *mut SgContext,
    rel_tol: f64,
    abs_tol: f64,
    base_order: usize,
    max_refinements: usize,
) -> SgStatus {
    guarded(ctx, |c| {
        let spec = QuadratureSpec {
            base_order,
            max_refinements,
            abs_tol,
            rel_tol,
        };
        spec.validate().map_err(|e| c.fail_with(e))?;
        c.options.quadrature = spec;
        Ok(())
    })
}

/// Sets the hypergeometric series controls.
///
/// # Safety
/// `ctx` must be null or a live context.
#[no_mangle]
pub unsafe extern "C" fn sg_context_set_series(ctx: *mut SgContext, rel_tol: f64, max_terms: usize) -> SgStatus {
    guarded(ctx, |c| {
        c.options.series = SeriesControl::new(rel_tol, max_terms).map_err(|e| c.fail_with(e))?;
        Ok(())
    })
}

/// Sets the Monte-Carlo fallback sample count and seed.
///
/// # Safety
/// `ctx` must be null or a live context.
#[no_mangle]
pub unsafe extern "C" fn sg_context_set_monte_carlo(ctx: *mut SgContext, samples: usize, seed: u64) -> SgStatus {
    guarded(ctx, |c| {
        if samples < 2 {
            return Err(c.fail(SgStatus::InvalidArgument, "need at least 2 samples".to_string()));
        }
        c.options.monte_carlo.samples = samples;
        c.options.monte_carlo.seed = seed;
        Ok(())
    })
}

/// Forces an evaluation path for constants; `SG_PATH_AUTO` restores the
/// automatic choice.
///
/// # Safety
/// `ctx` must be null or a live context.
#[no_mangle]
pub unsafe extern "C" fn sg_context_set_path(ctx: *mut SgContext, path: SgPath) -> SgStatus {
    guarded(ctx, |c| {
        c.options.path = match path {
            SgPath::Auto => None,
            SgPath::SphereQuadrature => Some(EvalPath::SphereQuadrature),
            SgPath::DiscReduction => Some(EvalPath::DiscReduction),
            SgPath::ClosedForm => Some(EvalPath::ClosedForm),
            SgPath::MonteCarlo => Some(EvalPath::MonteCarlo),
        };
        Ok(())
    })
}

/// The hyperbolic Poisson kernel `P_h(x, ζ)`.
///
/// # Safety
/// `x` and `zeta` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_poisson_kernel(
    ctx: *mut SgContext,
    n: usize,
    x: *const f64,
    zeta: *const f64,
    out: *mut f64,
) -> SgStatus {
    guarded(ctx, |c| {
        let xs = slice(c, x, n, "x")?;
        let zs = slice(c, zeta, n, "zeta")?;
        let out = out_ref(c, out, "out")?;
        let x = BallPoint::new(xs.to_vec()).map_err(|e| c.fail_with(e))?;
        let z = Direction::new(zs.to_vec()).map_err(|e| c.fail_with(e))?;
        *out = poisson_kernel(&x, &z);
        Ok(())
    })
}

/// `∇ₓ P_h(x, ζ)`, written to `out[0..n]`.
///
/// # Safety
/// `x` and `zeta` must point to `n` doubles; `out` to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sg_kernel_gradient(
    ctx: *mut SgContext,
    n: usize,
    x: *const f64,
    zeta: *const f64,
    out: *mut f64,
) -> SgStatus {
    guarded(ctx, |c| {
        let xs = slice(c, x, n, "x")?;
        let zs = slice(c, zeta, n, "zeta")?;
        if out.is_null() {
            return Err(c.fail(SgStatus::NullPointer, "out is null".to_string()));
        }
        let x = BallPoint::new(xs.to_vec()).map_err(|e| c.fail_with(e))?;
        let z = Direction::new(zs.to_vec()).map_err(|e| c.fail_with(e))?;
        let g = kernel_gradient(&x, &z);
        ptr::copy_nonoverlapping(g.as_ptr(), out, n);
        Ok(())
    })
}

/// The Möbius involution `φ_x(y)`, written to `out[0..n]`.
///
/// # Safety
/// `x` and `y` must point to `n` doubles; `out` to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sg_mobius(
    ctx: *mut SgContext,
    n: usize,
    x: *const f64,
    y: *const f64,
    out: *mut f64,
) -> SgStatus {
    guarded(ctx, |c| {
        let xs = slice(c, x, n, "x")?;
        let ys = slice(c, y, n, "y")?;
        if out.is_null() {
            return Err(c.fail(SgStatus::NullPointer, "out is null".to_string()));
        }
        let x = BallPoint::new(xs.to_vec()).map_err(|e| c.fail_with(e))?;
        let y = BallPoint::new(ys.to_vec()).map_err(|e| c.fail_with(e))?;
        let r = mobius_phi(&x, &y);
        ptr::copy_nonoverlapping(r.coords().as_ptr(), out, n);
        Ok(())
    })
}

/// `sup_ℓ C_p(x; ℓ)` at `x = x_norm e₁` in dimension `n`.
///
/// # Safety
/// `ctx` must be null or a live context; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_constant_optimal(
    ctx: *mut SgContext,
    n: usize,
    p: f64,
    x_norm: f64,
    out: *mut SgConstant,
) -> SgStatus {
    guarded(ctx, |c| {
        let out = out_ref(c, out, "out")?;
        let pq = exponent_pair(c, p)?;
        let x = BallPoint::on_axis(n, x_norm).map_err(|e| c.fail_with(e))?;
        let r = c_optimal(&pq, &x, &c.options).map_err(|e| c.fail_with(e))?;
        *out = to_constant(&r);
        Ok(())
    })
}

/// `C_p(x; ℓ)` where `ℓ` makes angle `gamma` with `x = x_norm e₁`.
///
/// # Safety
/// `ctx` must be null or a live context; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_constant_at_angle(
    ctx: *mut SgContext,
    n: usize,
    p: f64,
    x_norm: f64,
    gamma: f64,
    out: *mut SgConstant,
) -> SgStatus {
    guarded(ctx, |c| {
        let out = out_ref(c, out, "out")?;
        if !gamma.is_finite() {
            return Err(c.fail(SgStatus::InvalidArgument, format!("gamma must be finite, got {gamma}")));
        }
        let pq = exponent_pair(c, p)?;
        let r = c_at_angle(&pq, x_norm, AngleGamma::reduce(gamma), n, &c.options).map_err(|e| c.fail_with(e))?;
        *out = to_constant(&r);
        Ok(())
    })
}

/// Runs one named verification suite over `dims[0..n_dims]`, using the
/// context's quadrature and series controls. A suite that runs but fails
/// still returns `SG_STATUS_OK` with `passed = false`.
///
/// # Safety
/// `name` must be a NUL-terminated string, `dims` must point to `n_dims`
/// values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_run_suite(
    ctx: *mut SgContext,
    name: *const c_char,
    dims: *const usize,
    n_dims: usize,
    seed: u64,
    out: *mut SgSuiteResult,
) -> SgStatus {
    guarded(ctx, |c| {
        if name.is_null() || dims.is_null() {
            return Err(c.fail(SgStatus::NullPointer, "name or dims is null".to_string()));
        }
        let out = out_ref(c, out, "out")?;
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| c.fail(SgStatus::InvalidArgument, "suite name is not UTF-8".to_string()))?;
        let suite: SuiteName = name.parse().map_err(|e| c.fail_with(e))?;
        let dims = std::slice::from_raw_parts(dims, n_dims).to_vec();
        if dims.is_empty() || dims.iter().any(|&n| n < 3) {
            return Err(c.fail(SgStatus::InvalidArgument, "dims must be nonempty and at least 3".to_string()));
        }
        let settings = VerifySettings {
            dims,
            quadrature: c.options.quadrature,
            series: c.options.series,
            seed,
        };
        let r = run_suite(suite, &settings);
        *out = SgSuiteResult {
            passed: r.passed,
            cases: r.cases,
            failures: r.failures.len(),
            worst: r.worst,
            tolerance: r.tolerance,
        };
        Ok(())
    })
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn sg_status_name(status: SgStatus) -> *const c_char {
    match status {
        SgStatus::Ok => c"ok",
        SgStatus::NullPointer => c"null pointer",
        SgStatus::InvalidArgument => c"invalid argument",
        SgStatus::Convergence => c"series did not converge",
        SgStatus::Accuracy => c"quadrature tolerance not met",
        SgStatus::Internal => c"internal error",
    }
    .as_ptr()
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sg_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
