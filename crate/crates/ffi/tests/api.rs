use std::ffi::{CStr, CString};
use std::ptr;

use sharpgrad_ffi::*;

struct Ctx(*mut SgContext);

impl Ctx {
    fn new() -> Ctx {
        Ctx(sg_context_new())
    }

    fn last_error(&self) -> String {
        unsafe { CStr::from_ptr(sg_context_last_error(self.0)) }
            .to_string_lossy()
            .into_owned()
    }
}

impl Drop for Ctx {
    fn drop(&mut self) {
        unsafe { sg_context_free(self.0) }
    }
}

fn empty_constant() -> SgConstant {
    SgConstant {
        value: f64::NAN,
        k: f64::NAN,
        gamma: f64::NAN,
        err_est: f64::NAN,
        path: SgPath::Auto,
        regime: SgRegime::Below,
        direction: SgDirection::Any,
    }
}

#[test]
fn origin_constant_at_p_two() {
    // n = 3, p = 2: K = 1/3, C = 4 / √3.
    let ctx = Ctx::new();
    let mut c = empty_constant();
    let st = unsafe { sg_constant_optimal(ctx.0, 3, 2.0, 0.0, &mut c) };
    assert_eq!(st, SgStatus::Ok);
    assert!((c.k - 1.0 / 3.0).abs() < 1e-14);
    assert!((c.value - 4.0 / 3f64.sqrt()).abs() < 1e-13);
    assert_eq!(c.direction, SgDirection::Any);
    assert!(ctx.last_error().is_empty());
}

#[test]
fn forced_paths_agree() {
    let ctx = Ctx::new();
    let mut auto = empty_constant();
    let mut disc = empty_constant();
    unsafe {
        assert_eq!(sg_constant_at_angle(ctx.0, 4, 6.0, 0.6, std::f64::consts::FRAC_PI_2, &mut auto), SgStatus::Ok);
        assert_eq!(sg_context_set_path(ctx.0, SgPath::DiscReduction), SgStatus::Ok);
        assert_eq!(sg_constant_at_angle(ctx.0, 4, 6.0, 0.6, std::f64::consts::FRAC_PI_2, &mut disc), SgStatus::Ok);
    }
    assert_eq!(auto.path, SgPath::ClosedForm);
    assert_eq!(disc.path, SgPath::DiscReduction);
    assert_eq!(disc.regime, SgRegime::Above);
    assert!((auto.value - disc.value).abs() <= 1e-10 * auto.value);
}

#[test]
fn forced_closed_form_without_one_is_rejected() {
    let ctx = Ctx::new();
    let mut c = empty_constant();
    let st = unsafe {
        sg_context_set_path(ctx.0, SgPath::ClosedForm);
        sg_constant_at_angle(ctx.0, 3, 2.0, 0.5, 0.7, &mut c)
    };
    assert_eq!(st, SgStatus::InvalidArgument);
    assert!(!ctx.last_error().is_empty());
}

#[test]
fn kernel_gradient_and_mobius() {
    let ctx = Ctx::new();
    let x = [0.3, -0.2, 0.1];
    let zeta = [0.0, 0.6, 0.8];
    let mut p = 0.0;
    let mut g = [0.0; 3];
    let mut back = [0.0; 3];
    let mut y = [0.0; 3];
    unsafe {
        assert_eq!(sg_poisson_kernel(ctx.0, 3, x.as_ptr(), zeta.as_ptr(), &mut p), SgStatus::Ok);
        assert_eq!(sg_kernel_gradient(ctx.0, 3, x.as_ptr(), zeta.as_ptr(), g.as_mut_ptr()), SgStatus::Ok);
        // φ_x is an involution.
        let w = [0.1, 0.4, -0.3];
        assert_eq!(sg_mobius(ctx.0, 3, x.as_ptr(), w.as_ptr(), y.as_mut_ptr()), SgStatus::Ok);
        assert_eq!(sg_mobius(ctx.0, 3, x.as_ptr(), y.as_ptr(), back.as_mut_ptr()), SgStatus::Ok);
        for (a, b) in back.iter().zip(w) {
            assert!((a - b).abs() < 1e-14);
        }
    }
    let xx: f64 = x.iter().map(|v| v * v).sum();
    let d2: f64 = x.iter().zip(zeta).map(|(a, b)| (a - b) * (a - b)).sum();
    assert!((p - ((1.0 - xx) / d2).powi(2)).abs() < 1e-13 * p);
    assert!(g.iter().all(|v| v.is_finite()));
}

#[test]
fn invalid_inputs_report_status() {
    let ctx = Ctx::new();
    let mut c = empty_constant();
    let mut out = 0.0;
    let outside = [1.2, 0.0, 0.0];
    let zeta = [1.0, 0.0, 0.0];
    unsafe {
        assert_eq!(sg_constant_optimal(ctx.0, 3, 1.0, 0.5, &mut c), SgStatus::InvalidArgument);
        assert_eq!(sg_constant_optimal(ctx.0, 3, 2.0, 1.0, &mut c), SgStatus::InvalidArgument);
        assert_eq!(sg_constant_optimal(ctx.0, 3, 2.0, 0.5, ptr::null_mut()), SgStatus::NullPointer);
        assert_eq!(
            sg_poisson_kernel(ctx.0, 3, outside.as_ptr(), zeta.as_ptr(), &mut out),
            SgStatus::InvalidArgument
        );
        assert_eq!(sg_poisson_kernel(ctx.0, 3, ptr::null(), zeta.as_ptr(), &mut out), SgStatus::NullPointer);
        assert_eq!(sg_context_set_quadrature(ctx.0, -1.0, 1e-15, 20, 100), SgStatus::InvalidArgument);
        assert_eq!(sg_context_set_series(ctx.0, 1e-14, 0), SgStatus::InvalidArgument);
        assert_eq!(sg_context_set_monte_carlo(ctx.0, 1, 7), SgStatus::InvalidArgument);
        assert_eq!(sg_constant_optimal(ptr::null_mut(), 3, 2.0, 0.5, &mut c), SgStatus::NullPointer);
    }
    assert!(!ctx.last_error().is_empty());
}

#[test]
fn tight_refinement_budget_surfaces_accuracy() {
    let ctx = Ctx::new();
    let mut c = empty_constant();
    let st = unsafe {
        sg_context_set_quadrature(ctx.0, 1e-15, 1e-300, 2, 1);
        sg_context_set_path(ctx.0, SgPath::SphereQuadrature);
        sg_constant_at_angle(ctx.0, 4, 1.5, 0.9, 0.4, &mut c)
    };
    assert_eq!(st, SgStatus::Accuracy, "{}", ctx.last_error());
}

#[test]
fn suite_runs_through_the_abi() {
    let ctx = Ctx::new();
    let name = CString::new("kummer").unwrap();
    let dims = [3usize];
    let mut r = SgSuiteResult {
        passed: false,
        cases: 0,
        failures: 0,
        worst: f64::NAN,
        tolerance: f64::NAN,
    };
    let st = unsafe { sg_run_suite(ctx.0, name.as_ptr(), dims.as_ptr(), dims.len(), 1, &mut r) };
    assert_eq!(st, SgStatus::Ok);
    assert!(r.passed);
    assert!(r.cases > 0);
    assert_eq!(r.failures, 0);

    let bogus = CString::new("bogus").unwrap();
    let st = unsafe { sg_run_suite(ctx.0, bogus.as_ptr(), dims.as_ptr(), dims.len(), 1, &mut r) };
    assert_eq!(st, SgStatus::InvalidArgument);
}

#[test]
fn status_names_are_static() {
    for s in [
        SgStatus::Ok,
        SgStatus::NullPointer,
        SgStatus::InvalidArgument,
        SgStatus::Convergence,
        SgStatus::Accuracy,
        SgStatus::Internal,
    ] {
        let name = unsafe { CStr::from_ptr(sg_status_name(s)) };
        assert!(!name.to_bytes().is_empty());
    }
    let v = unsafe { CStr::from_ptr(sg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
