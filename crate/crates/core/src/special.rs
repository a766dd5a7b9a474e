//! Scalar special functions: log-gamma, Beta, Pochhammer symbols and
//! truncated hypergeometric series.
//!
//! Every series here is summed term by term with the ratio recurrence
//!
//! ```text
//! t_{k+1} / t_k = Π (a_i + k) / Π (b_j + k) · z / (k + 1)
//! ```
//!
//! and stopped by [`SeriesControl`]. A series that has not settled within
//! `max_terms` returns [`Error::Convergence`] with the partial sum; nothing is
//! silently truncated.
//!
//! The series are only valid inside the unit disc. Close to `|z| = 1` the
//! number of terms grows like `1 / (1 - |z|)`; [`SOFT_DOMAIN_LIMIT`] marks the
//! point past which callers are expected to prefer quadrature.

use crate::error::{Error, Result};

/// Largest `|z|` for which the closed-form paths are used by default.
pub const SOFT_DOMAIN_LIMIT: f64 = 0.9975;

/// Number of consecutive negligible terms required before a series is
/// declared converged.
const SETTLED_TERMS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-14,
            max_terms: 100_000,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        let ctl = SeriesControl { rel_tol, max_terms };
        ctl.validate()?;
        Ok(ctl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::domain(
                "SeriesControl",
                format!("rel_tol must be positive, got {}", self.rel_tol),
            ));
        }
        if self.max_terms == 0 {
            return Err(Error::domain("SeriesControl", "max_terms must be at least 1"));
        }
        Ok(())
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Parameters of a generalized hypergeometric series `pFq(upper; lower; z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergeometricArgs {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub z: f64,
}

impl HypergeometricArgs {
    pub fn new(upper: Vec<f64>, lower: Vec<f64>, z: f64) -> Result<Self> {
        let args = HypergeometricArgs { upper, lower, z };
        args.validate("hypergeometric")?;
        Ok(args)
    }

    fn validate(&self, op: &'static str) -> Result<()> {
        if let Some(b) = self.lower.iter().find(|b| is_nonpositive_integer(**b)) {
            return Err(Error::domain(
                op,
                format!("lower parameter {b} is a non-positive integer"),
            ));
        }
        if self.upper.iter().chain(&self.lower).any(|v| !v.is_finite()) {
            return Err(Error::domain(op, "parameters must be finite"));
        }
        if !(self.z.abs() < 1.0) {
            return Err(Error::domain(
                op,
                format!("|z| must be < 1, got z = {}", self.z),
            ));
        }
        Ok(())
    }

    /// Sums the series under `ctl`.
    pub fn eval(&self, ctl: &SeriesControl) -> Result<f64> {
        self.eval_named("hypergeometric", ctl)
    }

    fn eval_named(&self, op: &'static str, ctl: &SeriesControl) -> Result<f64> {
        self.validate(op)?;
        ctl.validate()?;

        let mut term = 1.0_f64;
        let mut sum = 1.0_f64;
        let mut settled = 0usize;
        for k in 0..ctl.max_terms {
            let kf = k as f64;
            let num: f64 = self.upper.iter().map(|a| a + kf).product();
            let den: f64 = self.lower.iter().map(|b| b + kf).product();
            let next = term * num / den * self.z / (kf + 1.0);
            sum += next;

            // A terminating series (some upper parameter hit a non-positive
            // integer) has every later term equal to zero.
            if next == 0.0 {
                return Ok(sum);
            }
            let negligible = next.abs() <= ctl.rel_tol * sum.abs();
            let shrinking = next.abs() <= term.abs();
            if negligible && shrinking {
                settled += 1;
                if settled >= SETTLED_TERMS {
                    return Ok(sum);
                }
            } else {
                settled = 0;
            }
            if !sum.is_finite() {
                break;
            }
            term = next;
        }
        Err(Error::Convergence {
            op,
            partial_sum: sum,
            terms: ctl.max_terms,
        })
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "log_gamma",
            format!("argument must be positive and finite, got {x}"),
        ));
    }
    Ok(libm::lgamma(x))
}

/// `Γ(x)` for `x > 0`, through [`log_gamma`].
pub fn gamma(x: f64) -> Result<f64> {
    log_gamma(x).map(f64::exp)
}

/// `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`, evaluated in log space.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::domain(
            "beta",
            format!("parameters must be positive, got ({a}, {b})"),
        ));
    }
    // Sum the two smaller terms first so that beta(a, b) == beta(b, a) bit for bit.
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Ok((log_gamma(lo)? + log_gamma(hi)? - log_gamma(lo + hi)?).exp())
}

/// Rising factorial `(x)_k = x (x+1) ... (x+k-1)`, with `(x)_0 = 1`.
pub fn pochhammer(x: f64, k: u32) -> f64 {
    (0..k).map(|i| x + f64::from(i)).product()
}

/// Gauss hypergeometric series `2F1(a, b; c; z)` for `|z| < 1`.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    HypergeometricArgs {
        upper: vec![a, b],
        lower: vec![c],
        z,
    }
    .eval_named("gauss_2f1", ctl)
}

/// `3F2(a1, a2, a3; b1, b2; z)` for `|z| < 1`.
pub fn hyp_3f2(
    a1: f64,
    a2: f64,
    a3: f64,
    b1: f64,
    b2: f64,
    z: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    HypergeometricArgs {
        upper: vec![a1, a2, a3],
        lower: vec![b1, b2],
        z,
    }
    .eval_named("hyp_3f2", ctl)
}

/// Residual of the quadratic transformation
///
/// ```text
/// 2F1(a, a+1/2; c; 4v/(1+v)^2) = (1+v)^(2a) 2F1(2a, 2a-c+1; c; v)
/// ```
///
/// returned as left minus right.
pub fn kummer_residual(a: f64, c: f64, v: f64, ctl: &SeriesControl) -> Result<f64> {
    if !(v.abs() < 1.0) {
        return Err(Error::domain(
            "kummer_residual",
            format!("|v| must be < 1, got {v}"),
        ));
    }
    let z = 4.0 * v / ((1.0 + v) * (1.0 + v));
    let left = gauss_2f1(a, a + 0.5, c, z, ctl)?;
    let right = (1.0 + v).powf(2.0 * a) * gauss_2f1(2.0 * a, 2.0 * a - c + 1.0, c, v, ctl)?;
    Ok(left - right)
}

/// The `v` at which `4v/(1+v)^2` reaches [`SOFT_DOMAIN_LIMIT`].
pub fn kummer_soft_limit() -> f64 {
    // 4v/(1+v)^2 = s  <=>  s v^2 + (2s - 4) v + s = 0, smaller root.
    let s = SOFT_DOMAIN_LIMIT;
    let disc = (2.0 * s - 4.0).powi(2) - 4.0 * s * s;
    ((4.0 - 2.0 * s) - disc.sqrt()) / (2.0 * s)
}
