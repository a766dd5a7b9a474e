//! Sharp pointwise gradient constants for hyperbolic harmonic functions.
//!
//! For `u = P_h[φ]` with `φ ∈ L^p(S^(n-1))`, the optimal constant in
//! `|⟨∇u(x), ℓ⟩| ≤ C_p(x; ℓ) ‖φ‖_p` is
//!
//! ```text
//! C_p(x; ℓ) = 2(n-1) / (1-|x|²)^((n(q-1)+1)/q) · K_p(x; ℓ)^(1/q)
//! K_p(x; ℓ) = ∫_{S^(n-1)} |η - x|^(2(n-1)(q-1)) |⟨η, ℓ⟩|^q dσ(η)
//! ```
//!
//! with `q` the conjugate exponent. By rotation invariance only `|x|` and the
//! angle `γ` between `ℓ` and `x/|x|` matter. `K_p` is computed three ways:
//!
//! * sphere quadrature of the definition through the two-coordinate slice,
//! * the disc reduction `K = (n-2)/(2π) ∫₀¹ (1-r²)^((n-4)/2) r^(q+1) J_q(r, |x|; γ) dr`
//!   with `J_q` an angular integral of the family
//!   `I_{a,b}(γ) = ∫_{-π}^{π} (A - B cos θ)^a |cos(θ-γ)|^b dθ`,
//! * closed forms, available for `p = ∞`, `p = n`, the radial direction when
//!   `p < n`, and the tangential direction when `p > n`.
//!
//! `γ ↦ I_{a,b}(γ)` is monotone on `[0, π/2]`: constant for `a ∈ {0, 1}`,
//! increasing for `0 < a < 1`, decreasing for `a > 1`. With
//! `a = (n-1)(q-1)` this puts the maximizing direction of `C_p(x; ·)` at the
//! radial direction for `p < n` and at any tangential direction for `p > n`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{dot, BallPoint, Direction, EvalPath, MonteCarloConfig};
use crate::quadrature::{
    integrate_interval_with_breaks, monte_carlo_sphere, slice_integral_2var, try_integrate,
    unit_ball_volume, wrap_angle, Quadrature, QuadratureSpec, SphereDim,
};
use crate::special::{beta, gauss_2f1, hyp_3f2, log_gamma, SeriesControl};

/// Largest `|x|` for which the automatic path selection trusts the closed
/// forms. Beyond it the series arguments exceed [`crate::special::SOFT_DOMAIN_LIMIT`].
pub const CLOSED_FORM_MAX_NORM: f64 = 0.95;

/// Lebesgue exponent `p ∈ (1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") {
            return Ok(Exponent::Infinity);
        }
        let p: f64 = t
            .parse()
            .map_err(|_| Error::Usage(format!("cannot parse exponent {s:?}; use a number > 1 or \"inf\"")))?;
        if !p.is_finite() {
            return Err(Error::Usage(format!(
                "exponent {s:?} is not finite; spell p = ∞ as \"inf\""
            )));
        }
        Ok(Exponent::Finite(p))
    }
}

/// `(p, q)` with `1/p + 1/q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    p: Exponent,
    q: f64,
}

impl ExponentPair {
    pub fn new(p: Exponent) -> Result<Self> {
        Ok(ExponentPair {
            p,
            q: conjugate_exponent(p)?,
        })
    }

    pub fn finite(p: f64) -> Result<Self> {
        ExponentPair::new(Exponent::Finite(p))
    }

    pub fn infinity() -> Self {
        ExponentPair {
            p: Exponent::Infinity,
            q: 1.0,
        }
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `a = (n-1)(q-1)`, the power of `|η - x|²` in `K_p`. Evaluated as
    /// `(n-1)/(p-1)` so that `p = n` gives exactly `1`.
    pub fn kernel_exponent(&self, n: usize) -> f64 {
        match self.p {
            Exponent::Infinity => 0.0,
            Exponent::Finite(p) => (n as f64 - 1.0) / (p - 1.0),
        }
    }

    pub fn regime(&self, n: usize) -> Regime {
        Regime::classify(self, n)
    }
}

/// `q = p/(p-1)`, with `q = 1` for `p = ∞`.
pub fn conjugate_exponent(p: Exponent) -> Result<f64> {
    match p {
        Exponent::Infinity => Ok(1.0),
        Exponent::Finite(p) if p > 1.0 && p.is_finite() => Ok(p / (p - 1.0)),
        Exponent::Finite(p) => Err(Error::domain(
            "conjugate_exponent",
            format!("p must lie in (1, ∞], got {p}"),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    /// `1 < p < n`
    Below,
    /// `p = n`
    AtN,
    /// `n < p < ∞`
    Above,
    Infinity,
}

impl Regime {
    /// Exact comparison against `n`; `p` near but not equal to `n` is
    /// classified by which side it falls on.
    pub fn classify(pq: &ExponentPair, n: usize) -> Regime {
        match pq.p {
            Exponent::Infinity => Regime::Infinity,
            Exponent::Finite(p) => {
                let nf = n as f64;
                if p < nf {
                    Regime::Below
                } else if p == nf {
                    Regime::AtN
                } else {
                    Regime::Above
                }
            }
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::Below => "BELOW",
            Regime::AtN => "AT_N",
            Regime::Above => "ABOVE",
            Regime::Infinity => "INFINITY",
        }
    }

    /// Direction kind that maximizes `C_p(x; ·)` in this regime.
    pub fn maximizing_direction(self) -> DirectionKind {
        match self {
            Regime::Below => DirectionKind::Radial,
            Regime::Above => DirectionKind::Tangential,
            Regime::AtN | Regime::Infinity => DirectionKind::Any,
        }
    }

    /// Direction kind that minimizes `C_p(x; ·)` in this regime.
    pub fn minimizing_direction(self) -> DirectionKind {
        match self {
            Regime::Below => DirectionKind::Tangential,
            Regime::Above => DirectionKind::Radial,
            Regime::AtN | Regime::Infinity => DirectionKind::Any,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionKind {
    Radial,
    Tangential,
    /// Neither radial nor tangential.
    Oblique,
    /// The value does not depend on the direction.
    Any,
}

impl DirectionKind {
    pub fn label(self) -> &'static str {
        match self {
            DirectionKind::Radial => "radial",
            DirectionKind::Tangential => "tangential",
            DirectionKind::Oblique => "oblique",
            DirectionKind::Any => "any",
        }
    }
}

impl fmt::Display for DirectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Angle between `ℓ` and the radial direction, reduced to `[0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct AngleGamma(f64);

impl AngleGamma {
    /// Reduces an arbitrary angle using the `π`-periodicity and evenness of
    /// `γ ↦ I_{a,b}(γ)`.
    pub fn reduce(gamma: f64) -> AngleGamma {
        let r = gamma.rem_euclid(PI);
        AngleGamma(if r > 0.5 * PI { PI - r } else { r })
    }

    pub const RADIAL: AngleGamma = AngleGamma(0.0);
    pub const TANGENTIAL: AngleGamma = AngleGamma(0.5 * PI);

    pub fn get(self) -> f64 {
        self.0
    }

    /// Angle of `ℓ` against `x/|x|`; `None` at the origin.
    pub fn between(x: &BallPoint, l: &Direction) -> Option<AngleGamma> {
        let xhat = x.radial()?;
        let c = dot(xhat.coords(), l.coords()).clamp(-1.0, 1.0);
        Some(AngleGamma::reduce(c.acos()))
    }

    pub fn kind(self) -> DirectionKind {
        if self.0 <= 1e-12 {
            DirectionKind::Radial
        } else if (0.5 * PI - self.0) <= 1e-12 {
            DirectionKind::Tangential
        } else {
            DirectionKind::Oblique
        }
    }
}

/// A computed constant with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub value: f64,
    pub path: EvalPath,
    pub err_est: f64,
    pub regime: Regime,
    pub direction_kind: DirectionKind,
    /// The `K_p(x; ℓ)` factor behind `value`.
    pub k: f64,
    /// Reduced angle `γ ∈ [0, π/2]` that was evaluated.
    pub gamma: f64,
}

/// Settings shared by the constant computations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstantOptions {
    pub quadrature: QuadratureSpec,
    pub series: SeriesControl,
    /// Forces a path instead of the automatic choice.
    pub path: Option<EvalPath>,
    pub monte_carlo: MonteCarloConfig,
}


fn require_main_dim(op: &'static str, n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::domain(op, format!("dimension must be at least 3, got {n}")));
    }
    Ok(())
}

fn require_norm(op: &'static str, x_norm: f64) -> Result<()> {
    if !(0.0..1.0).contains(&x_norm) {
        return Err(Error::domain(op, format!("|x| must lie in [0, 1), got {x_norm}")));
    }
    Ok(())
}

/// `I_{a,b}(γ) = ∫_{-π}^{π} (A - B cos θ)^a |cos(θ - γ)|^b dθ` for
/// `0 ≤ B < A`, `b > 0`. `γ` is used as given (no reduction).
#[allow(non_snake_case)]
pub fn integral_I(a: f64, b: f64, A: f64, B: f64, gamma: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    check_i_params("integral_I", b, A, B)?;
    let breaks = [wrap_angle(gamma - 0.5 * PI), wrap_angle(gamma + 0.5 * PI)];
    integrate_interval_with_breaks(
        |t| (A - B * t.cos()).powf(a) * (t - gamma).cos().abs().powf(b),
        -PI,
        PI,
        &breaks,
        spec,
    )
}

#[allow(non_snake_case)]
fn check_i_params(op: &'static str, b: f64, A: f64, B: f64) -> Result<()> {
    if !(b > 0.0) {
        return Err(Error::domain(op, format!("b must be positive, got {b}")));
    }
    if !(B >= 0.0 && B < A) {
        return Err(Error::domain(op, format!("need 0 <= B < A, got A = {A}, B = {B}")));
    }
    Ok(())
}

/// `dI_{a,b}/dγ` through the folded representation
///
/// ```text
/// a B ∫₀^{π/2} cos θ [(A + B sin θ)^(a-1) - (A - B sin θ)^(a-1)]
///              · [|sin(θ - γ)|^b - |sin(θ + γ)|^b] dθ
/// ```
///
/// On `(0, π/2)` it vanishes for `a ∈ {0, 1}`, is positive for `0 < a < 1`
/// and negative for `a > 1`.
#[allow(non_snake_case)]
pub fn integral_I_derivative(
    a: f64,
    b: f64,
    A: f64,
    B: f64,
    gamma: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    check_i_params("integral_I_derivative", b, A, B)?;
    if a == 0.0 || B == 0.0 {
        return Ok(Quadrature {
            value: 0.0,
            err_est: 0.0,
        });
    }
    let q = integrate_interval_with_breaks(
        |t| {
            let (s, c) = t.sin_cos();
            let base = (A + B * s).powf(a - 1.0) - (A - B * s).powf(a - 1.0);
            let kink = (t - gamma).sin().abs().powf(b) - (t + gamma).sin().abs().powf(b);
            c * base * kink
        },
        0.0,
        0.5 * PI,
        &[gamma, PI - gamma],
        spec,
    )?;
    let scale = (a * B).abs();
    Ok(Quadrature {
        value: a * B * q.value,
        err_est: scale * q.err_est,
    })
}

/// `J_q(r, ρ; γ) = ∫_{-π}^{π} (1 + ρ² - 2ρ r cos θ)^((n-1)(q-1)) |cos(θ-γ)|^q dθ`.
#[allow(non_snake_case)]
pub fn integral_J(q: f64, r: f64, rho: f64, gamma: AngleGamma, n: usize, spec: &QuadratureSpec) -> Result<Quadrature> {
    if !(q >= 1.0) {
        return Err(Error::domain("integral_J", format!("q must be >= 1, got {q}")));
    }
    j_with_exponent((n as f64 - 1.0) * (q - 1.0), q, r, rho, gamma, spec)
}

fn j_with_exponent(a: f64, q: f64, r: f64, rho: f64, gamma: AngleGamma, spec: &QuadratureSpec) -> Result<Quadrature> {
    if !(0.0..=1.0).contains(&r) || !(0.0..1.0).contains(&rho) {
        return Err(Error::domain(
            "integral_J",
            format!("need r in [0, 1] and rho in [0, 1), got r = {r}, rho = {rho}"),
        ));
    }
    integral_I(a, q, 1.0 + rho * rho, 2.0 * rho * r, gamma.get(), spec)
}

/// `K_p(|x| e₁; ℓ_γ)` by the disc reduction: an outer radial integral (in
/// `r = sin ψ`) of the angular integral [`integral_J`].
pub fn k_disc(pq: &ExponentPair, x_norm: f64, gamma: AngleGamma, n: usize, spec: &QuadratureSpec) -> Result<Quadrature> {
    require_main_dim("k_disc", n)?;
    require_norm("k_disc", x_norm)?;
    let q = pq.q();
    let a = pq.kernel_exponent(n);
    let power = (n - 3) as i32;
    let inner = spec.nested();
    let mut inner_err = 0.0_f64;
    let outer = try_integrate(
        |psi| {
            let (s, c) = psi.sin_cos();
            if s == 0.0 {
                return Ok(0.0);
            }
            let j = j_with_exponent(a, q, s, x_norm, gamma, &inner)?;
            inner_err = inner_err.max(j.err_est);
            Ok(c.powi(power) * s.powf(q + 1.0) * j.value)
        },
        0.0,
        0.5 * PI,
        &[],
        spec,
    )?;
    let scale = (n as f64 - 2.0) / (2.0 * PI);
    Ok(Quadrature {
        value: scale * outer.value,
        err_est: scale * (outer.err_est + 0.5 * PI * inner_err),
    })
}

/// `K_p(|x| e₁; ℓ_γ)` straight from its definition as a sphere integral,
/// reduced through the two-coordinate slice formula.
pub fn k_sphere(pq: &ExponentPair, x_norm: f64, gamma: AngleGamma, n: usize, spec: &QuadratureSpec) -> Result<Quadrature> {
    require_main_dim("k_sphere", n)?;
    require_norm("k_sphere", x_norm)?;
    let q = pq.q();
    let a = pq.kernel_exponent(n);
    let (sg, cg) = gamma.get().sin_cos();
    let breaks = [gamma.get() - 0.5 * PI, gamma.get() + 0.5 * PI];
    slice_integral_2var(
        |e1, e2| {
            // |η - x|² on the sphere: (η₁ - |x|)² + (1 - η₁²)
            let dist2 = (e1 - x_norm) * (e1 - x_norm) + (1.0 - e1 * e1);
            dist2.powf(a) * (e1 * cg + e2 * sg).abs().powf(q)
        },
        SphereDim::new(n)?,
        &breaks,
        spec,
    )
}

/// Monte-Carlo estimate of `K_p(|x| e₁; ℓ_γ)`.
pub fn k_monte_carlo(
    pq: &ExponentPair,
    x_norm: f64,
    gamma: AngleGamma,
    n: usize,
    mc: &MonteCarloConfig,
) -> Result<Quadrature> {
    require_main_dim("k_monte_carlo", n)?;
    require_norm("k_monte_carlo", x_norm)?;
    let q = pq.q();
    let a = pq.kernel_exponent(n);
    let (sg, cg) = gamma.get().sin_cos();
    let r = monte_carlo_sphere(
        |eta| {
            let dist2 = 1.0 + x_norm * x_norm - 2.0 * x_norm * eta[0];
            dist2.powf(a) * (eta[0] * cg + eta[1] * sg).abs().powf(q)
        },
        SphereDim::new(n)?,
        mc.samples,
        mc.seed,
    )?;
    Ok(Quadrature {
        value: r.estimate,
        err_est: r.std_err,
    })
}

/// Whether a closed form exists for `(regime, direction)`.
pub fn closed_form_available(regime: Regime, direction: DirectionKind, x_norm: f64) -> bool {
    if x_norm == 0.0 {
        return true;
    }
    matches!(
        (regime, direction),
        (Regime::Infinity, _)
            | (Regime::AtN, _)
            | (Regime::Below, DirectionKind::Radial)
            | (Regime::Above, DirectionKind::Tangential)
    )
}

/// Closed-form `K_p(x; ℓ)`:
///
/// ```text
/// p = ∞          : (2/n) V(B^(n-1)) / V(B^n)
/// p = n          : (n-2)/(2√π) Γ(n/2-1) Γ((q+1)/2) / Γ((n+q)/2) · (1+|x|²)
/// p < n, radial  : (1+|x|²)^((n-1)(q-1)) Γ((q+1)/2) Γ(n/2) / (Γ((q+n)/2) √π)
///                  · 3F2(α/2, (α+1)/2, (q+1)/2; 1/2, (q+n)/2; 4|x|²/(1+|x|²)²)
/// p > n, tangent : (n-2)/(2√π) Γ((n-2)/2) Γ((q+1)/2) / Γ((q+n)/2)
///                  · 2F1(α, n/2 + q(1/2 - n); (q+n)/2; |x|²)
/// ```
///
/// with `α = (n-1)(1-q)`. At `|x| = 0` every direction is accepted.
pub fn k_closed_form(
    pq: &ExponentPair,
    x_norm: f64,
    direction: DirectionKind,
    n: usize,
    ctl: &SeriesControl,
) -> Result<f64> {
    require_main_dim("k_closed_form", n)?;
    require_norm("k_closed_form", x_norm)?;
    let regime = pq.regime(n);
    if !closed_form_available(regime, direction, x_norm) {
        return Err(Error::Usage(format!(
            "no closed form for regime {regime} in the {direction} direction; \
             use a quadrature path"
        )));
    }
    let nf = n as f64;
    let q = pq.q();
    let rho2 = x_norm * x_norm;
    let lg = |v: f64| log_gamma(v);
    match regime {
        Regime::Infinity => Ok(2.0 / nf * unit_ball_volume(n - 1) / unit_ball_volume(n)),
        Regime::AtN => {
            let log_c = lg(nf / 2.0 - 1.0)? + lg((q + 1.0) / 2.0)? - lg((nf + q) / 2.0)?;
            Ok((nf - 2.0) / (2.0 * PI.sqrt()) * log_c.exp() * (1.0 + rho2))
        }
        Regime::Below => {
            // At the origin both radial and tangential reduce to ∫|η₁|^q dσ,
            // which is this formula with a zero series argument.
            let alpha = (nf - 1.0) * (1.0 - q);
            let log_c = lg((q + 1.0) / 2.0)? + lg(nf / 2.0)? - lg((q + nf) / 2.0)?;
            let z = 4.0 * rho2 / ((1.0 + rho2) * (1.0 + rho2));
            let f = hyp_3f2(
                alpha / 2.0,
                (alpha + 1.0) / 2.0,
                (q + 1.0) / 2.0,
                0.5,
                (q + nf) / 2.0,
                z,
                ctl,
            )?;
            Ok((1.0 + rho2).powf(-alpha) * log_c.exp() / PI.sqrt() * f)
        }
        Regime::Above => {
            let alpha = (nf - 1.0) * (1.0 - q);
            let log_c = lg((nf - 2.0) / 2.0)? + lg((q + 1.0) / 2.0)? - lg((q + nf) / 2.0)?;
            let f = gauss_2f1(alpha, nf / 2.0 + q * (0.5 - nf), (q + nf) / 2.0, rho2, ctl)?;
            Ok((nf - 2.0) / (2.0 * PI.sqrt()) * log_c.exp() * f)
        }
    }
}

/// `C = 2(n-1) / (1-|x|²)^((n(q-1)+1)/q) · K^(1/q)`.
pub fn c_from_k(k: f64, pq: &ExponentPair, x_norm: f64, n: usize) -> f64 {
    let q = pq.q();
    let nf = n as f64;
    let power = c_power(pq, n);
    let kq = if q == 1.0 { k } else { k.powf(1.0 / q) };
    2.0 * (nf - 1.0) * kq / (1.0 - x_norm * x_norm).powf(power)
}

/// The exponent `(n(q-1)+1)/q` of `1/(1-|x|²)` in [`c_from_k`].
pub fn c_power(pq: &ExponentPair, n: usize) -> f64 {
    match pq.p() {
        Exponent::Infinity => 1.0,
        Exponent::Finite(_) => {
            let q = pq.q();
            (n as f64 * (q - 1.0) + 1.0) / q
        }
    }
}

/// `K_p(|x| e₁; ℓ_γ)` along `path`, or along the automatic choice when
/// `path` is `None`: closed form where one exists and `|x| ≤ 0.95`, then
/// the disc reduction, then Monte Carlo if the disc quadrature fails.
pub fn k_value(
    pq: &ExponentPair,
    x_norm: f64,
    gamma: AngleGamma,
    n: usize,
    opts: &ConstantOptions,
) -> Result<(Quadrature, EvalPath)> {
    let regime = pq.regime(n);
    let kind = if x_norm == 0.0 { DirectionKind::Any } else { gamma.kind() };
    let eval = |path: EvalPath| -> Result<Quadrature> {
        match path {
            EvalPath::ClosedForm => {
                let v = k_closed_form(pq, x_norm, kind, n, &opts.series)?;
                Ok(Quadrature {
                    value: v,
                    err_est: v.abs() * opts.series.rel_tol,
                })
            }
            EvalPath::DiscReduction => k_disc(pq, x_norm, gamma, n, &opts.quadrature),
            EvalPath::SphereQuadrature => k_sphere(pq, x_norm, gamma, n, &opts.quadrature),
            EvalPath::MonteCarlo => k_monte_carlo(pq, x_norm, gamma, n, &opts.monte_carlo),
        }
    };
    if let Some(path) = opts.path {
        return Ok((eval(path)?, path));
    }
    if closed_form_available(regime, kind, x_norm) && x_norm <= CLOSED_FORM_MAX_NORM {
        return Ok((eval(EvalPath::ClosedForm)?, EvalPath::ClosedForm));
    }
    match eval(EvalPath::DiscReduction) {
        Ok(q) => Ok((q, EvalPath::DiscReduction)),
        Err(e) if e.is_numerical() => Ok((eval(EvalPath::MonteCarlo)?, EvalPath::MonteCarlo)),
        Err(e) => Err(e),
    }
}

/// `C_p(x; ℓ)`.
pub fn c_directional(pq: &ExponentPair, x: &BallPoint, l: &Direction, opts: &ConstantOptions) -> Result<ConstantReport> {
    let n = x.dim();
    require_main_dim("c_directional", n)?;
    if l.dim() != n {
        return Err(Error::domain("c_directional", "direction and point dimensions differ"));
    }
    let gamma = AngleGamma::between(x, l).unwrap_or(AngleGamma::RADIAL);
    c_at_angle(pq, x.norm(), gamma, n, opts)
}

/// `C_p(|x| e₁; ℓ_γ)`, the rotation-reduced form of [`c_directional`].
pub fn c_at_angle(pq: &ExponentPair, x_norm: f64, gamma: AngleGamma, n: usize, opts: &ConstantOptions) -> Result<ConstantReport> {
    require_main_dim("c_directional", n)?;
    require_norm("c_directional", x_norm)?;
    let regime = pq.regime(n);
    let direction_kind = if x_norm == 0.0 || matches!(regime, Regime::AtN | Regime::Infinity) {
        DirectionKind::Any
    } else {
        gamma.kind()
    };
    let (k, path) = k_value(pq, x_norm, gamma, n, opts)?;
    let value = c_from_k(k.value, pq, x_norm, n);
    let err_est = if k.value > 0.0 {
        value * k.err_est / (pq.q() * k.value)
    } else {
        f64::INFINITY
    };
    Ok(ConstantReport {
        value,
        path,
        err_est,
        regime,
        direction_kind,
        k: k.value,
        gamma: gamma.get(),
    })
}

fn angle_for(kind: DirectionKind) -> AngleGamma {
    match kind {
        DirectionKind::Tangential => AngleGamma::TANGENTIAL,
        _ => AngleGamma::RADIAL,
    }
}

/// `C_p(x) = sup_ℓ C_p(x; ℓ)`, evaluated in the maximizing direction of the
/// regime: radial for `p < n`, tangential for `p > n`, any for `p ∈ {n, ∞}`.
pub fn c_optimal(pq: &ExponentPair, x: &BallPoint, opts: &ConstantOptions) -> Result<ConstantReport> {
    extremal(pq, x, opts, Regime::maximizing_direction)
}

/// `inf_ℓ C_p(x; ℓ)`, evaluated in the minimizing direction of the regime.
pub fn c_minimal(pq: &ExponentPair, x: &BallPoint, opts: &ConstantOptions) -> Result<ConstantReport> {
    extremal(pq, x, opts, Regime::minimizing_direction)
}

fn extremal(
    pq: &ExponentPair,
    x: &BallPoint,
    opts: &ConstantOptions,
    pick: fn(Regime) -> DirectionKind,
) -> Result<ConstantReport> {
    let n = x.dim();
    require_main_dim("c_optimal", n)?;
    let kind = pick(pq.regime(n));
    let mut report = c_at_angle(pq, x.norm(), angle_for(kind), n, opts)?;
    if !x.is_origin() {
        report.direction_kind = kind;
    }
    Ok(report)
}

/// A unit vector orthogonal to `x/|x|` (or `e₂` at the origin).
pub fn tangential_direction(x: &BallPoint) -> Result<Direction> {
    let n = x.dim();
    let Some(xhat) = x.radial() else {
        return Direction::axis(n, 1);
    };
    // Orthogonalize the coordinate axis least aligned with x̂.
    let (i, _) = xhat
        .coords()
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("n >= 2");
    let e = Direction::axis(n, i)?;
    let (_, t) = e.decompose(&xhat);
    t.ok_or_else(|| Error::domain("tangential_direction", "degenerate frame"))
}

/// Both sides of
///
/// ```text
/// ∫₋₁¹ (1 - ut)^(-α) |t|^a (1-t²)^b dt = B((a+1)/2, b+1) · 3F2(α/2, (α+1)/2, (a+1)/2; 1/2, (a+3)/2 + b; u²)
/// ```
///
/// the left by adaptive quadrature, the right by the series.
pub fn hypergeometric_identity_check(
    a: f64,
    b: f64,
    alpha: f64,
    u: f64,
    spec: &QuadratureSpec,
    ctl: &SeriesControl,
) -> Result<(Quadrature, f64)> {
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::domain(
            "hypergeometric_identity_check",
            format!("need a, b > -1, got a = {a}, b = {b}"),
        ));
    }
    if !(u.abs() < 1.0) {
        return Err(Error::domain("hypergeometric_identity_check", format!("need |u| < 1, got {u}")));
    }
    // Fold onto t ∈ [0, 1], then t = cos φ, which keeps the nodes off both
    // algebraic endpoint singularities.
    let lhs = integrate_interval_with_breaks(
        |phi| {
            let (s, t) = phi.sin_cos();
            let w = t.powf(a) * s.powf(2.0 * b + 1.0);
            ((1.0 - u * t).powf(-alpha) + (1.0 + u * t).powf(-alpha)) * w
        },
        0.0,
        0.5 * PI,
        &[],
        spec,
    )?;
    let rhs = beta((a + 1.0) / 2.0, b + 1.0)?
        * hyp_3f2(
            alpha / 2.0,
            (alpha + 1.0) / 2.0,
            (a + 1.0) / 2.0,
            0.5,
            (a + 3.0) / 2.0 + b,
            u * u,
            ctl,
        )?;
    Ok((lhs, rhs))
}

/// Closed form of `∫_{S^(n-1)} η₁^k |η₂|^q dσ(η)`:
///
/// ```text
/// k odd        : 0
/// k = 2m, n≥3  : (n-2)/(2π) · B(n/2 - 1, m + q/2 + 1) · B(m + 1/2, (q+1)/2)
/// k = 2m, n=2  : B(m + 1/2, (q+1)/2) / π
/// ```
pub fn moment_integral(k: u32, q: f64, n: usize) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::domain("moment_integral", format!("q must be >= 0, got {q}")));
    }
    if n < 2 {
        return Err(Error::domain("moment_integral", format!("n must be >= 2, got {n}")));
    }
    if k % 2 == 1 {
        return Ok(0.0);
    }
    let m = f64::from(k / 2);
    let angular = beta(m + 0.5, (q + 1.0) / 2.0)?;
    if n == 2 {
        return Ok(angular / PI);
    }
    let nf = n as f64;
    Ok((nf - 2.0) / (2.0 * PI) * beta(nf / 2.0 - 1.0, m + q / 2.0 + 1.0)? * angular)
}

/// Quadrature value of the same moment, for cross-checking
/// [`moment_integral`].
pub fn moment_integral_quadrature(k: u32, q: f64, n: usize, spec: &QuadratureSpec) -> Result<Quadrature> {
    let ki = k as i32;
    if n == 2 {
        let r = integrate_interval_with_breaks(
            |t| t.cos().powi(ki) * t.sin().abs().powf(q),
            -PI,
            PI,
            &[0.0, -0.5 * PI, 0.5 * PI],
            spec,
        )?;
        return Ok(Quadrature {
            value: r.value / (2.0 * PI),
            err_est: r.err_est / (2.0 * PI),
        });
    }
    slice_integral_2var(
        |e1, e2| e1.powi(ki) * e2.abs().powf(q),
        SphereDim::new(n)?,
        &[],
        spec,
    )
}
