//! Deterministic integration on intervals, the unit disc and the sphere, plus
//! a seeded Monte-Carlo estimator for sphere integrals.
//!
//! The interval engine is globally adaptive: every panel carries a Gauss–
//! Legendre value and the value of the same rule on its two halves, and the
//! panel whose halves disagree most is bisected next. The error estimate is
//! the summed disagreement, i.e. the difference between the last two
//! refinement levels. Kinks and integrable endpoint singularities are handled
//! by geometric bisection towards them; callers who know where kinks are pass
//! them as break points so that no panel straddles one.
//!
//! Sphere integrals of integrands that depend on one or two coordinates are
//! reduced to weighted interval and disc integrals:
//!
//! ```text
//! ∫ f(η₁) dσ       = c_n ∫₀^π sin^(n-2)θ f(cos θ) dθ,      c_n = Γ(n/2) / (√π Γ((n-1)/2))
//! ∫ f(η₁, η₂) dσ   = (n-2)/(2π) ∫_{-π}^{π} ∫₀^{π/2} cos^(n-3)ψ sin ψ f(sin ψ cos θ, sin ψ sin θ) dψ dθ
//! ```
//!
//! The substitutions `t = cos θ` and `r = sin ψ` remove the endpoint weights
//! `(1-t²)^((n-3)/2)` and `(1-r²)^((n-4)/2)`, so one engine covers every `n`.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::PI;
use std::rc::Rc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::log_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per panel.
    pub base_order: usize,
    /// Maximum number of panel bisections.
    pub max_refinements: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            base_order: 20,
            max_refinements: 2000,
            abs_tol: 1e-15,
            rel_tol: 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base_order < 2 {
            return Err(Error::domain(
                "QuadratureSpec",
                format!("base_order must be at least 2, got {}", self.base_order),
            ));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::domain("QuadratureSpec", "tolerances must be positive"));
        }
        Ok(())
    }

    /// Tolerances for integrals nested inside an outer integral. They are a
    /// decade tighter so that inner noise stays below the outer estimate.
    pub fn nested(&self) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.abs_tol * 0.1,
            rel_tol: (self.rel_tol * 0.1).max(1e-15),
            ..*self
        }
    }

    /// Inner tolerance of a nested integral once inner integrands of size
    /// `scale` have been seen: absolute accuracy finer than the outer
    /// relative tolerance times that size cannot change the outer result.
    fn scaled_to(&self, outer: &QuadratureSpec, scale: f64) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.abs_tol.max(0.1 * outer.rel_tol * scale),
            ..*self
        }
    }

    /// Same rule with `levels` doublings of the node count.
    pub fn refined(&self, levels: u32) -> QuadratureSpec {
        QuadratureSpec {
            base_order: self.base_order << levels,
            ..*self
        }
    }
}

/// Value of a deterministic integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    pub err_est: f64,
}

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes in increasing order.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_m.
        let mut x = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                dp = legendre_with_derivative(m, x).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

thread_local! {
    static RULES: RefCell<HashMap<usize, Rc<GaussRule>>> = RefCell::new(HashMap::new());
}

fn rule(m: usize) -> Rc<GaussRule> {
    RULES.with(|cache| {
        cache
            .borrow_mut()
            .entry(m)
            .or_insert_with(|| {
                let (nodes, weights) = gauss_legendre(m);
                Rc::new(GaussRule { nodes, weights })
            })
            .clone()
    })
}

impl GaussRule {
    /// `(∫f, ∫|f|)` on `[a, b]`.
    fn apply<F>(&self, f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
    where
        F: FnMut(f64) -> Result<(f64, f64)>,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        let mut mag = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let (v, m) = f(mid + half * x)?;
            if !v.is_finite() {
                return Err(Error::domain(
                    "integrate_interval",
                    format!("integrand is not finite at t = {}", mid + half * x),
                ));
            }
            acc += w * v;
            mag += w * m.max(v.abs());
        }
        Ok((acc * half, mag * half.abs()))
    }
}

/// Relative rounding floor per Gauss node, applied to the cancelled part of
/// an integral. A 20-node rule gets 64ε.
const CANCELLATION_FLOOR_PER_NODE: f64 = 3.2 * f64::EPSILON;

struct Panel {
    a: f64,
    b: f64,
    coarse: f64,
    left: f64,
    right: f64,
    magnitude: f64,
}

impl Panel {
    fn new<F>(rule: &GaussRule, f: &mut F, a: f64, b: f64, coarse: f64) -> Result<Panel>
    where
        F: FnMut(f64) -> Result<(f64, f64)>,
    {
        let mid = 0.5 * (a + b);
        let (left, lm) = rule.apply(f, a, mid)?;
        let (right, rm) = rule.apply(f, mid, b)?;
        Ok(Panel {
            a,
            b,
            coarse,
            left,
            right,
            magnitude: lm + rm,
        })
    }

    fn fine(&self) -> f64 {
        self.left + self.right
    }

    fn err(&self) -> f64 {
        (self.fine() - self.coarse).abs()
    }

    fn splittable(&self) -> bool {
        let mid = 0.5 * (self.a + self.b);
        mid > self.a && mid < self.b
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Unsplittable panels sink so the heap top is always actionable
        // while anything actionable remains.
        self.splittable()
            .cmp(&other.splittable())
            .then(self.err().total_cmp(&other.err()))
    }
}

/// `∫_a^b f(t) dt`.
pub fn integrate_interval<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|t| Ok(f(t)), a, b, &[], spec)
}

/// `∫_a^b f(t) dt` with panels never straddling any of `breaks`.
pub fn integrate_interval_with_breaks<F>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|t| Ok(f(t)), a, b, breaks, spec)
}

/// Fallible-integrand form of [`integrate_interval_with_breaks`]; used for
/// nested integrals whose inner evaluations can fail.
pub fn try_integrate<F>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    try_integrate_scaled(
        |t| {
            let v = f(t)?;
            Ok((v, v.abs(), 0.0))
        },
        a,
        b,
        breaks,
        spec,
    )
    .map(|(q, _)| q)
}

/// Like [`try_integrate`], but the integrand returns `(value, magnitude,
/// noise)`: the magnitude its value was cancelled from (for a nested
/// integral, the inner `∫|g|`) and the error its value may carry (for a
/// nested integral, the inner tolerance). The magnitude sets the rounding
/// floor; the largest noise times the interval length bounds the accuracy
/// the outer integral can reach. Returns the integral and `∫ magnitude`.
pub(crate) fn try_integrate_scaled<F>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<(Quadrature, f64)>
where
    F: FnMut(f64) -> Result<(f64, f64, f64)>,
{
    spec.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(
            "integrate_interval",
            format!("need finite a < b, got [{a}, {b}]"),
        ));
    }
    let rule = rule(spec.base_order);
    let noise = Cell::new(0.0_f64);
    let mut f = |t: f64| {
        let (v, m, e) = f(t)?;
        noise.set(noise.get().max(e));
        Ok((v, m))
    };

    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|t| *t > a && *t < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        let (coarse, _) = rule.apply(&mut f, w[0], w[1])?;
        heap.push(Panel::new(&rule, &mut f, w[0], w[1], coarse)?);
    }

    // Cancellation between positive and negative parts leaves rounding noise
    // of order ε ∫|f| that no refinement removes.
    let floor = CANCELLATION_FLOOR_PER_NODE * spec.base_order.max(20) as f64;
    let tolerance = |value: f64, magnitude: f64| {
        let cancelled = (magnitude - value.abs()).max(0.0);
        spec.abs_tol
            .max(spec.rel_tol * value.abs())
            .max(floor * cancelled)
            .max(noise.get() * (b - a))
    };
    let mut refinements = 0usize;
    loop {
        let value: f64 = heap.iter().map(Panel::fine).sum();
        let err_est: f64 = heap.iter().map(Panel::err).sum();
        let magnitude: f64 = heap.iter().map(|p| p.magnitude).sum();
        if err_est <= tolerance(value, magnitude) {
            return Ok((Quadrature { value, err_est }, magnitude));
        }
        let exhausted = refinements >= spec.max_refinements
            || heap.peek().is_none_or(|p| !p.splittable());
        if exhausted {
            return Err(Error::Accuracy {
                op: "integrate_interval",
                value,
                err_est,
                refinements,
            });
        }
        // Split a batch of the worst panels before re-summing; this keeps the
        // bookkeeping linear in the panel count.
        let batch = (heap.len() / 8).max(1);
        for _ in 0..batch {
            if refinements >= spec.max_refinements {
                break;
            }
            let Some(worst) = heap.pop() else { break };
            if !worst.splittable() {
                heap.push(worst);
                break;
            }
            let mid = 0.5 * (worst.a + worst.b);
            heap.push(Panel::new(&rule, &mut f, worst.a, mid, worst.left)?);
            heap.push(Panel::new(&rule, &mut f, mid, worst.b, worst.right)?);
            refinements += 1;
        }
    }
}

/// Ambient dimension `n` of the sphere `S^(n-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereDim(usize);

impl SphereDim {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(
                "SphereDim",
                format!("dimension must be at least 2, got {n}"),
            ));
        }
        Ok(SphereDim(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    fn require_two_variable(self, op: &'static str) -> Result<()> {
        if self.0 < 3 {
            return Err(Error::domain(
                op,
                format!("two-coordinate slices need n >= 3, got {}", self.0),
            ));
        }
        Ok(())
    }
}

/// `V(B^n) = π^(n/2) / Γ(n/2 + 1)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    assert!(n >= 1, "unit_ball_volume needs n >= 1");
    let half = n as f64 / 2.0;
    (half * PI.ln() - log_gamma(half + 1.0).expect("positive argument")).exp()
}

/// `(n-1)/n · V(B^(n-1)) / V(B^n)`, the density of `η₁` on `S^(n-1)`
/// against `(1-t²)^((n-3)/2) dt`.
pub fn slice_constant_1var(n: usize) -> f64 {
    let nf = n as f64;
    (log_gamma(nf / 2.0).expect("n >= 2") - 0.5 * PI.ln() - log_gamma((nf - 1.0) / 2.0).expect("n >= 2"))
        .exp()
}

/// `∫_{S^(n-1)} f(η₁) dσ(η)` for normalized surface measure.
pub fn slice_integral_1var<F>(f: F, dim: SphereDim, spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    slice_integral_1var_with_breaks(f, dim, &[], spec)
}

/// As [`slice_integral_1var`], with kinks of `f` given as values of `t = η₁`.
pub fn slice_integral_1var_with_breaks<F>(
    mut f: F,
    dim: SphereDim,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    let n = dim.get();
    let power = (n - 2) as i32;
    let mut angles: Vec<f64> = breaks
        .iter()
        .filter(|t| t.abs() < 1.0)
        .map(|t| t.acos())
        .collect();
    angles.push(0.5 * PI);
    let q = integrate_interval_with_breaks(
        |theta| theta.sin().powi(power) * f(theta.cos()),
        0.0,
        PI,
        &angles,
        spec,
    )?;
    let c = slice_constant_1var(n);
    Ok(Quadrature {
        value: c * q.value,
        err_est: c * q.err_est,
    })
}

/// `∫_{S^(n-1)} f(η₁, η₂) dσ(η)` for `n >= 3`. `angle_breaks` lists polar
/// angles (in the `(η₁, η₂)` plane) where `f` has kinks; they are reduced
/// modulo `2π` into `[-π, π]`.
pub fn slice_integral_2var<F>(
    f: F,
    dim: SphereDim,
    angle_breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Quadrature>
where
    F: FnMut(f64, f64) -> f64,
{
    let mut f = f;
    try_slice_integral_2var(|a, b| Ok(f(a, b)), dim, angle_breaks, spec)
}

pub(crate) fn try_slice_integral_2var<F>(
    mut f: F,
    dim: SphereDim,
    angle_breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Quadrature>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    dim.require_two_variable("slice_integral_2var")?;
    let n = dim.get();
    let power = (n - 3) as i32;
    let inner_spec = spec.nested();

    let mut breaks: Vec<f64> = angle_breaks.iter().map(|t| wrap_angle(*t)).collect();
    breaks.extend([-0.5 * PI, 0.0, 0.5 * PI]);

    let mut inner_err = 0.0_f64;
    let mut scale = 0.0_f64;
    let (outer, _) = try_integrate_scaled(
        |theta| {
            let (s, c) = theta.sin_cos();
            let inner = inner_spec.scaled_to(spec, scale);
            let (q, mag) = try_integrate_scaled(
                |psi| {
                    let (sp, cp) = psi.sin_cos();
                    let v = cp.powi(power) * sp * f(sp * c, sp * s)?;
                    Ok((v, v.abs(), 0.0))
                },
                0.0,
                0.5 * PI,
                &[],
                &inner,
            )?;
            inner_err = inner_err.max(q.err_est);
            scale = scale.max(mag);
            Ok((q.value, mag, q.err_est.max(inner.abs_tol)))
        },
        -PI,
        PI,
        &breaks,
        spec,
    )?;
    let c = (n as f64 - 2.0) / (2.0 * PI);
    Ok(Quadrature {
        value: c * outer.value,
        err_est: c * (outer.err_est + 2.0 * PI * inner_err),
    })
}

/// The line `a η₁ + b η₂ = c`, along which a two-coordinate integrand jumps
/// or kinks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineCut {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LineCut {
    /// `η₁` where the line meets the unit circle (or crosses it vertically).
    fn circle_crossings(&self) -> Vec<f64> {
        let norm = self.a.hypot(self.b);
        if norm == 0.0 {
            return Vec::new();
        }
        let d = self.c / norm;
        if d.abs() >= 1.0 {
            return Vec::new();
        }
        let (nx, ny) = (self.a / norm, self.b / norm);
        let h = (1.0 - d * d).sqrt();
        vec![d * nx - h * ny, d * nx + h * ny]
    }

    fn is_vertical(&self) -> bool {
        self.b.abs() <= 1e-14 * self.a.abs()
    }
}

/// [`slice_integral_2var`] in Cartesian slice coordinates
/// `η₁ = cos ω`, `η₂ = sin ω sin φ`, splitting both integrals exactly at the
/// given lines. Suited to integrands with jumps across straight lines.
pub fn slice_integral_2var_cut<F>(f: F, dim: SphereDim, cuts: &[LineCut], spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: FnMut(f64, f64) -> f64,
{
    let mut f = f;
    try_slice_integral_2var_cut(|a, b| Ok(f(a, b)), dim, cuts, spec)
}

pub(crate) fn try_slice_integral_2var_cut<F>(
    mut f: F,
    dim: SphereDim,
    cuts: &[LineCut],
    spec: &QuadratureSpec,
) -> Result<Quadrature>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    dim.require_two_variable("slice_integral_2var")?;
    let n = dim.get();
    let outer_power = (n - 2) as i32;
    let inner_power = (n - 3) as i32;
    let inner_spec = spec.nested();

    let mut omega_breaks = vec![0.5 * PI];
    for cut in cuts {
        let xs = if cut.is_vertical() {
            vec![cut.c / cut.a]
        } else {
            cut.circle_crossings()
        };
        omega_breaks.extend(xs.into_iter().filter(|s| s.abs() < 1.0).map(f64::acos));
    }

    let mut inner_err = 0.0_f64;
    let mut scale = 0.0_f64;
    let (outer, _) = try_integrate_scaled(
        |omega| {
            let (so, co) = omega.sin_cos();
            let phi_breaks: Vec<f64> = cuts
                .iter()
                .filter(|cut| !cut.is_vertical())
                .map(|cut| (cut.c - cut.a * co) / (cut.b * so))
                .filter(|v| v.abs() < 1.0)
                .map(f64::asin)
                .collect();
            let inner = inner_spec.scaled_to(spec, scale);
            let (q, mag) = try_integrate_scaled(
                |phi| {
                    let (sp, cp) = phi.sin_cos();
                    let v = cp.powi(inner_power) * f(co, so * sp)?;
                    Ok((v, v.abs(), 0.0))
                },
                -0.5 * PI,
                0.5 * PI,
                &phi_breaks,
                &inner,
            )?;
            inner_err = inner_err.max(q.err_est);
            scale = scale.max(mag);
            let w = so.powi(outer_power);
            Ok((w * q.value, w * mag, w * q.err_est.max(inner.abs_tol)))
        },
        0.0,
        PI,
        &omega_breaks,
        spec,
    )?;
    let c = (n as f64 - 2.0) / (2.0 * PI);
    Ok(Quadrature {
        value: c * outer.value,
        err_est: c * (outer.err_est + PI * inner_err),
    })
}

/// Reduces an angle into `(-π, π]`.
pub fn wrap_angle(t: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let r = t.rem_euclid(two_pi);
    if r > PI {
        r - two_pi
    } else {
        r
    }
}

/// Monte-Carlo estimate with its sample standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub estimate: f64,
    pub std_err: f64,
}

/// Seeded generator used by every stochastic routine in the crate
/// (ChaCha20, stream fixed by the 64-bit seed).
pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Writes a uniformly distributed point of `S^(n-1)` into `out` by
/// normalizing independent standard Gaussian coordinates.
pub fn sample_sphere<R: rand::Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
            norm2 += *v * *v;
        }
        if norm2 > 1e-300 {
            let inv = norm2.sqrt().recip();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

/// Sample mean of `f` over `samples` uniform points of `S^(n-1)`.
pub fn monte_carlo_sphere<F>(mut f: F, dim: SphereDim, samples: usize, seed: u64) -> Result<MonteCarlo>
where
    F: FnMut(&[f64]) -> f64,
{
    if samples < 2 {
        return Err(Error::domain(
            "monte_carlo_sphere",
            format!("need at least 2 samples, got {samples}"),
        ));
    }
    let mut rng = seeded_rng(seed);
    let mut point = vec![0.0; dim.get()];
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 1..=samples {
        sample_sphere(&mut rng, &mut point);
        let v = f(&point);
        let delta = v - mean;
        mean += delta / k as f64;
        m2 += delta * (v - mean);
    }
    let variance = m2 / (samples - 1) as f64;
    Ok(MonteCarlo {
        estimate: mean,
        std_err: (variance / samples as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::beta;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn small_rules() {
        let (x, w) = gauss_legendre(1);
        assert_eq!(x, vec![0.0]);
        assert!((w[0] - 2.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(2);
        let r = 1.0 / 3f64.sqrt();
        assert!((x[0] + r).abs() < 1e-15 && (x[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rules_are_exact_to_degree_2m_minus_1() {
        for m in [3usize, 7, 20, 64] {
            let (x, w) = gauss_legendre(m);
            assert!(x.iter().all(|t| t.abs() < 1.0));
            assert!(w.iter().all(|v| *v > 0.0));
            assert!(rel(w.iter().sum::<f64>(), 2.0) < 1e-13);
            let deg = 2 * m - 2; // even monomial, highest even degree <= 2m-1
            let got: f64 = x.iter().zip(&w).map(|(t, v)| v * t.powi(deg as i32)).sum();
            assert!(rel(got, 2.0 / (deg as f64 + 1.0)) < 1e-12, "m = {m}");
        }
        let (x, w) = gauss_legendre(3);
        let quartic: f64 = x.iter().zip(&w).map(|(t, v)| v * t.powi(4)).sum();
        assert!((quartic - 0.4).abs() < 1e-14);
    }

    #[test]
    fn interval_examples() {
        let spec = QuadratureSpec::default();
        let q = integrate_interval(f64::sin, 0.0, PI, &spec).unwrap();
        assert!((q.value - 2.0).abs() < 1e-13);
        let q = integrate_interval_with_breaks(f64::abs, -1.0, 1.0, &[0.0], &spec).unwrap();
        assert!((q.value - 1.0).abs() < 1e-14);
        // ∫₋₁¹ |t|^1.5 dt = 2/2.5 = B(1.25, 1)
        let q = integrate_interval_with_breaks(|t: f64| t.abs().powf(1.5), -1.0, 1.0, &[0.0], &spec)
            .unwrap();
        assert!(rel(q.value, 0.8) < 1e-12);
        assert!(rel(q.value, beta(1.25, 1.0).unwrap()) < 1e-12);
    }

    #[test]
    fn interval_handles_endpoint_singularity() {
        // ∫₀¹ t^(-1/2) dt = 2
        let q = integrate_interval(|t: f64| t.powf(-0.5), 0.0, 1.0, &QuadratureSpec::default())
            .unwrap();
        assert!(rel(q.value, 2.0) < 1e-11);
    }

    #[test]
    fn interval_reports_accuracy_failure() {
        let spec = QuadratureSpec {
            rel_tol: 1e-20,
            abs_tol: 1e-30,
            max_refinements: 50,
            ..Default::default()
        };
        match integrate_interval(|t: f64| t.abs().sqrt(), -1.0, 1.0, &spec) {
            Err(Error::Accuracy { value, .. }) => assert!((value - 4.0 / 3.0).abs() < 1e-6),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn interval_rejects_bad_input() {
        let spec = QuadratureSpec::default();
        assert!(integrate_interval(|t| t, 1.0, 0.0, &spec).is_err());
        assert!(integrate_interval(|t: f64| 1.0 / t.abs(), -1.0, 1.0, &spec).is_err());
        let bad = QuadratureSpec {
            base_order: 1,
            ..spec
        };
        assert!(integrate_interval(|t| t, 0.0, 1.0, &bad).is_err());
    }

    #[test]
    fn ball_volumes() {
        assert!(rel(unit_ball_volume(2), PI) < 1e-14);
        assert!(rel(unit_ball_volume(3), 4.0 * PI / 3.0) < 1e-14);
        assert!(rel(unit_ball_volume(5), 8.0 * PI * PI / 15.0) < 1e-14);
    }

    #[test]
    fn one_variable_slices() {
        let spec = QuadratureSpec::default();
        for n in 2..8 {
            let dim = SphereDim::new(n).unwrap();
            let one = slice_integral_1var(|_| 1.0, dim, &spec).unwrap();
            assert!(rel(one.value, 1.0) < 1e-13, "n = {n}");
            let odd = slice_integral_1var(|t| t, dim, &spec).unwrap();
            assert!(odd.value.abs() < 1e-14);
        }
        let dim = SphereDim::new(3).unwrap();
        let v = slice_integral_1var(f64::abs, dim, &spec).unwrap();
        assert!(rel(v.value, 0.5) < 1e-13);
    }

    #[test]
    fn two_variable_slices() {
        let spec = QuadratureSpec::default();
        let d4 = SphereDim::new(4).unwrap();
        let d3 = SphereDim::new(3).unwrap();
        assert!(rel(slice_integral_2var(|_, _| 1.0, d4, &[], &spec).unwrap().value, 1.0) < 1e-12);
        assert!(rel(slice_integral_2var(|_, _| 1.0, d3, &[], &spec).unwrap().value, 1.0) < 1e-12);
        let v = slice_integral_2var(|_, b: f64| b.abs(), d3, &[], &spec).unwrap();
        assert!(rel(v.value, 0.5) < 1e-12);
        // (1/(2π))·B(1/2, 5/2)·B(3/2, 1) = 1/8
        let v = slice_integral_2var(|a, b: f64| a * a * b.abs(), d3, &[], &spec).unwrap();
        assert!(rel(v.value, 0.125) < 1e-12);
        assert!(slice_integral_2var(|_, _| 1.0, SphereDim::new(2).unwrap(), &[], &spec).is_err());
    }

    #[test]
    fn sphere_dim_bounds() {
        assert!(SphereDim::new(1).is_err());
        assert_eq!(SphereDim::new(2).unwrap().get(), 2);
    }

    #[test]
    fn angle_wrapping() {
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_angle(-PI / 4.0) + PI / 4.0).abs() < 1e-15);
        assert!((wrap_angle(PI) - PI).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_constant_and_determinism() {
        let dim = SphereDim::new(5).unwrap();
        let mc = monte_carlo_sphere(|_| 2.5, dim, 1000, 7).unwrap();
        assert_eq!(mc.estimate, 2.5);
        assert_eq!(mc.std_err, 0.0);
        let a = monte_carlo_sphere(|x| x[0].abs(), dim, 5000, 99).unwrap();
        let b = monte_carlo_sphere(|x| x[0].abs(), dim, 5000, 99).unwrap();
        assert_eq!(a, b);
        assert!(monte_carlo_sphere(|_| 1.0, dim, 1, 0).is_err());
    }

    #[test]
    fn sampled_points_are_unit() {
        let mut rng = seeded_rng(3);
        let mut p = [0.0; 6];
        for _ in 0..100 {
            sample_sphere(&mut rng, &mut p);
            let norm: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cut_slices_match_polar_slices() {
        let spec = QuadratureSpec::default();
        for n in 3..7 {
            let dim = SphereDim::new(n).unwrap();
            let smooth = |a: f64, b: f64| (1.0 + 0.3 * a - 0.2 * b).powi(3) * (a * a + 0.5 * b);
            let p = slice_integral_2var(smooth, dim, &[], &spec).unwrap().value;
            let c = slice_integral_2var_cut(smooth, dim, &[], &spec).unwrap().value;
            assert!(rel(c, p) < 1e-12, "n = {n}: {c} vs {p}");
        }
    }

    #[test]
    fn cut_slice_integrates_half_spaces() {
        let spec = QuadratureSpec::default();
        let dim = SphereDim::new(3).unwrap();
        // On S², the cap η₁ > h has measure (1 - h)/2, whatever the direction.
        let cut = LineCut { a: 0.6, b: 0.8, c: 0.3 };
        let v = slice_integral_2var_cut(
            |a, b| if 0.6 * a + 0.8 * b > 0.3 { 1.0 } else { 0.0 },
            dim,
            &[cut],
            &spec,
        )
        .unwrap();
        assert!((v.value - 0.35).abs() < 1e-12);
        let vertical = LineCut { a: 1.0, b: 0.0, c: -0.4 };
        let v = slice_integral_2var_cut(|a, _| if a > -0.4 { 1.0 } else { 0.0 }, dim, &[vertical], &spec).unwrap();
        assert!((v.value - 0.7).abs() < 1e-12);
    }
}
