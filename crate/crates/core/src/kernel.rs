//! The invariant Poisson kernel of the hyperbolic Laplacian on `B^n`,
//! Poisson integrals of boundary data, ball automorphisms, and
//! finite-difference operators used as verification instruments.
//!
//! ```text
//! P_h(x, ζ) = ((1 - |x|²) / |x - ζ|²)^(n-1)
//! Δ_h u     = (1 - |x|²)² Δu + 2(n-2)(1 - |x|²) ⟨x, ∇u⟩
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_interval, monte_carlo_sphere, slice_integral_1var_with_breaks, try_slice_integral_2var,
    try_slice_integral_2var_cut, LineCut, QuadratureSpec, SphereDim,
};

/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Tolerance on `| |ℓ| - 1 |` accepted by [`Direction::new`].
pub const UNIT_TOL: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A point of the open unit ball `B^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    coords: Vec<f64>,
}

impl BallPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::domain(
                "BallPoint",
                format!("dimension must be at least 2, got {}", coords.len()),
            ));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("BallPoint", "coordinates must be finite"));
        }
        let r = norm(&coords);
        if !(r < 1.0) {
            return Err(Error::domain(
                "BallPoint",
                format!("|x| must be < 1, got {r}"),
            ));
        }
        Ok(BallPoint { coords })
    }

    pub fn origin(n: usize) -> Result<Self> {
        BallPoint::new(vec![0.0; n])
    }

    /// `r · e₁` in `B^n`.
    pub fn on_axis(n: usize, r: f64) -> Result<Self> {
        let mut coords = vec![0.0; n];
        if n > 0 {
            coords[0] = r;
        }
        BallPoint::new(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.coords, &self.coords)
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|c| *c == 0.0)
    }

    /// Radial unit vector `x / |x|`, `None` at the origin.
    pub fn radial(&self) -> Option<Direction> {
        if self.is_origin() {
            None
        } else {
            Direction::normalize(self.coords.clone()).ok()
        }
    }
}

/// A unit vector of `S^(n-1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    coords: Vec<f64>,
}

impl Direction {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::domain("Direction", "dimension must be at least 2"));
        }
        let r = norm(&coords);
        if !((r - 1.0).abs() <= UNIT_TOL) {
            return Err(Error::domain(
                "Direction",
                format!("expected a unit vector, |ℓ| = {r}"),
            ));
        }
        Ok(Direction { coords })
    }

    /// Scales a non-zero vector onto the sphere.
    pub fn normalize(mut coords: Vec<f64>) -> Result<Self> {
        let r = norm(&coords);
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::domain("Direction", "cannot normalize a zero vector"));
        }
        coords.iter_mut().for_each(|c| *c /= r);
        Direction::new(coords)
    }

    /// The coordinate vector `e_i` (zero-based).
    pub fn axis(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::domain("Direction", format!("axis {i} out of range for n = {n}")));
        }
        let mut coords = vec![0.0; n];
        coords[i] = 1.0;
        Direction::new(coords)
    }

    /// `cos γ e₁ + sin γ e₂`.
    pub fn in_first_plane(n: usize, gamma: f64) -> Result<Self> {
        let mut coords = vec![0.0; n];
        let (s, c) = gamma.sin_cos();
        coords[0] = c;
        if n > 1 {
            coords[1] = s;
        }
        Direction::new(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn negated(&self) -> Direction {
        Direction {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    /// Splits `self` into components along and across `axis`:
    /// returns `(⟨self, axis⟩, unit tangential part)`; the tangential part
    /// is `None` when `self` is parallel to `axis`.
    pub fn decompose(&self, axis: &Direction) -> (f64, Option<Direction>) {
        let c = dot(&self.coords, &axis.coords);
        let rest: Vec<f64> = self
            .coords
            .iter()
            .zip(&axis.coords)
            .map(|(l, a)| l - c * a)
            .collect();
        if norm(&rest) <= 1e-14 {
            (c.clamp(-1.0, 1.0), None)
        } else {
            (c.clamp(-1.0, 1.0), Direction::normalize(rest).ok())
        }
    }
}

type Profile1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Profile2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type ProfileN = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// The declared symmetry of boundary data, which selects the integration
/// strategy. Declarations are trusted: a profile that does not really
/// factor through its coordinates gives wrong integrals.
#[derive(Clone)]
pub enum Symmetry {
    /// `φ(ζ) = g(⟨ζ, axis⟩)`.
    OneCoordinate { axis: Direction, profile: Profile1 },
    /// `φ(ζ) = g(⟨ζ, e1⟩, ⟨ζ, e2⟩)` for orthonormal `e1`, `e2`.
    TwoCoordinates {
        e1: Direction,
        e2: Direction,
        profile: Profile2,
        /// Polar angles in the `(e1, e2)` plane where `g` has kinks.
        angle_breaks: Vec<f64>,
        /// Lines in the `(e1, e2)` coordinates where `g` jumps or kinks.
        line_cuts: Vec<LineCut>,
    },
    General(ProfileN),
}

/// Boundary data `φ: S^(n-1) → R`.
#[derive(Clone)]
pub struct BoundaryFunction {
    n: usize,
    symmetry: Symmetry,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match &self.symmetry {
            Symmetry::OneCoordinate { .. } => "one-coordinate",
            Symmetry::TwoCoordinates { .. } => "two-coordinates",
            Symmetry::General(_) => "general",
        };
        f.debug_struct("BoundaryFunction")
            .field("n", &self.n)
            .field("symmetry", &tag)
            .finish()
    }
}

impl BoundaryFunction {
    pub fn one_coordinate<G>(axis: Direction, profile: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        BoundaryFunction {
            n: axis.dim(),
            symmetry: Symmetry::OneCoordinate {
                axis,
                profile: Arc::new(profile),
            },
        }
    }

    pub fn two_coordinates<G>(
        e1: Direction,
        e2: Direction,
        angle_breaks: Vec<f64>,
        profile: G,
    ) -> Result<Self>
    where
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        if e1.dim() != e2.dim() {
            return Err(Error::domain("BoundaryFunction", "frame dimensions differ"));
        }
        if dot(e1.coords(), e2.coords()).abs() > 1e-12 {
            return Err(Error::domain("BoundaryFunction", "frame vectors must be orthogonal"));
        }
        Ok(BoundaryFunction {
            n: e1.dim(),
            symmetry: Symmetry::TwoCoordinates {
                e1,
                e2,
                profile: Arc::new(profile),
                angle_breaks,
                line_cuts: Vec::new(),
            },
        })
    }

    /// Declares lines `a⟨ζ,e1⟩ + b⟨ζ,e2⟩ = c` across which two-coordinate
    /// data is discontinuous; integration then splits exactly there.
    pub fn with_line_cuts(mut self, cuts: Vec<LineCut>) -> Result<Self> {
        match &mut self.symmetry {
            Symmetry::TwoCoordinates { line_cuts, .. } => {
                *line_cuts = cuts;
                Ok(self)
            }
            _ => Err(Error::domain(
                "BoundaryFunction",
                "line cuts need two-coordinate data",
            )),
        }
    }

    pub fn general<G>(n: usize, profile: G) -> Self
    where
        G: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        BoundaryFunction {
            n,
            symmetry: Symmetry::General(Arc::new(profile)),
        }
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Ok(BoundaryFunction::one_coordinate(Direction::axis(n, 0)?, move |_| value))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn symmetry(&self) -> &Symmetry {
        &self.symmetry
    }

    pub fn eval(&self, zeta: &[f64]) -> f64 {
        match &self.symmetry {
            Symmetry::OneCoordinate { axis, profile } => profile(dot(zeta, axis.coords())),
            Symmetry::TwoCoordinates {
                e1, e2, profile, ..
            } => profile(dot(zeta, e1.coords()), dot(zeta, e2.coords())),
            Symmetry::General(g) => g(zeta),
        }
    }
}

/// `P_h(x, ζ)`.
pub fn poisson_kernel(x: &BallPoint, zeta: &Direction) -> f64 {
    assert_eq!(x.dim(), zeta.dim(), "dimension mismatch");
    let dist2: f64 = x
        .coords()
        .iter()
        .zip(zeta.coords())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    kernel_from_parts(x.norm_sq(), dist2, x.dim())
}

fn kernel_from_parts(x_norm_sq: f64, dist2: f64, n: usize) -> f64 {
    ((1.0 - x_norm_sq) / dist2).powi(n as i32 - 1)
}

/// `∇_x P_h(x, ζ) = (n-1) P_h(x, ζ) (-2x/(1-|x|²) - 2(x-ζ)/|x-ζ|²)`.
pub fn kernel_gradient(x: &BallPoint, zeta: &Direction) -> Vec<f64> {
    assert_eq!(x.dim(), zeta.dim(), "dimension mismatch");
    let n = x.dim();
    let diff: Vec<f64> = x
        .coords()
        .iter()
        .zip(zeta.coords())
        .map(|(a, b)| a - b)
        .collect();
    let dist2 = dot(&diff, &diff);
    let one_minus = 1.0 - x.norm_sq();
    let p = kernel_from_parts(x.norm_sq(), dist2, n);
    let scale = (n as f64 - 1.0) * p;
    x.coords()
        .iter()
        .zip(&diff)
        .map(|(xi, di)| scale * (-2.0 * xi / one_minus - 2.0 * di / dist2))
        .collect()
}

/// The involutive automorphism `φ_x` of `B^n` with `φ_x(0) = x` and
/// `φ_x(x) = 0`:
///
/// ```text
/// φ_x(y) = (x |y - x|² + (1 - |x|²)(x - y)) / (1 - 2⟨x, y⟩ + |x|²|y|²)
/// ```
pub fn mobius_phi(x: &BallPoint, y: &BallPoint) -> BallPoint {
    assert_eq!(x.dim(), y.dim(), "dimension mismatch");
    let xs = x.coords();
    let ys = y.coords();
    let xx = x.norm_sq();
    let yy = y.norm_sq();
    let xy = dot(xs, ys);
    let dist2: f64 = xs.iter().zip(ys).map(|(a, b)| (a - b) * (a - b)).sum();
    let den = 1.0 - 2.0 * xy + xx * yy;
    let coords: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(a, b)| (a * dist2 + (1.0 - xx) * (a - b)) / den)
        .collect();
    // The map preserves the open ball; rounding can only push |φ| onto the
    // boundary for inputs already within an ulp of it.
    BallPoint { coords }
}

/// A numerical value tagged with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// Quadrature error estimate, or the standard error for Monte-Carlo.
    pub err_est: f64,
    pub path: EvalPath,
}

/// Evaluation route of a reported number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalPath {
    SphereQuadrature,
    DiscReduction,
    ClosedForm,
    MonteCarlo,
}

impl EvalPath {
    pub fn label(self) -> &'static str {
        match self {
            EvalPath::SphereQuadrature => "sphere-quadrature",
            EvalPath::DiscReduction => "disc-reduction",
            EvalPath::ClosedForm => "closed-form",
            EvalPath::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for EvalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Sample count and seed for the Monte-Carlo fallback of
/// [`poisson_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig {
            samples: 200_000,
            seed: 0x5eed,
        }
    }
}

/// `P_h[φ](x) = ∫ P_h(x, ζ) φ(ζ) dσ(ζ)`, with the default Monte-Carlo
/// configuration for data that has no usable symmetry.
pub fn poisson_integral(phi: &BoundaryFunction, x: &BallPoint, spec: &QuadratureSpec) -> Result<Estimate> {
    poisson_integral_with(phi, x, spec, &MonteCarloConfig::default())
}

/// [`poisson_integral`] with an explicit Monte-Carlo configuration.
pub fn poisson_integral_with(
    phi: &BoundaryFunction,
    x: &BallPoint,
    spec: &QuadratureSpec,
    mc: &MonteCarloConfig,
) -> Result<Estimate> {
    sphere_integral(phi, x, spec, mc, |rho2, t, n| {
        kernel_from_parts(rho2, 1.0 + rho2 - 2.0 * t, n)
    })
}

/// Splits `∇_x P_h(x, ζ) = α x + β ζ` into its two scalar weights, as
/// functions of `|x|²` and `t = ⟨ζ, x⟩`.
pub fn kernel_gradient_weights(x_norm_sq: f64, t: f64, n: usize) -> (f64, f64) {
    let dist2 = 1.0 + x_norm_sq - 2.0 * t;
    let scale = (n as f64 - 1.0) * kernel_from_parts(x_norm_sq, dist2, n);
    let beta = 2.0 * scale / dist2;
    (-2.0 * scale / (1.0 - x_norm_sq) - beta, beta)
}

/// `∇P_h[φ](x)` by differentiating under the integral sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientEstimate {
    pub value: Vec<f64>,
    /// Euclidean combination of the component error estimates.
    pub err_est: f64,
    pub path: EvalPath,
}

/// `∇P_h[φ](x) = x ∫ α φ dσ + ∫ β ζ φ dσ`. The `ζ`-moment is reduced to
/// scalar integrals in an orthonormal frame carrying both `φ` and `x`, so
/// symmetric data stays on the quadrature paths.
pub fn poisson_gradient(
    phi: &BoundaryFunction,
    x: &BallPoint,
    spec: &QuadratureSpec,
    mc: &MonteCarloConfig,
) -> Result<GradientEstimate> {
    let n = x.dim();
    let radial = sphere_integral(phi, x, spec, mc, |r2, t, n| kernel_gradient_weights(r2, t, n).0)?;
    let mut value: Vec<f64> = x.coords().iter().map(|xi| xi * radial.value).collect();
    let mut err2 = (radial.err_est * x.norm()).powi(2);
    let mut path = radial.path;

    let beta = |r2: f64, t: f64, n: usize| kernel_gradient_weights(r2, t, n).1;
    let mut add = |dir: &[f64], est: Estimate| {
        for (v, d) in value.iter_mut().zip(dir) {
            *v += d * est.value;
        }
        err2 += est.err_est * est.err_est;
        if est.path == EvalPath::MonteCarlo {
            path = EvalPath::MonteCarlo;
        }
    };

    match moment_frame(phi, x)? {
        Some(frame) => {
            for (dir, weighted) in frame {
                let est = sphere_integral(&weighted, x, spec, mc, beta)?;
                add(dir.coords(), est);
            }
        }
        None => {
            for i in 0..n {
                let coord = {
                    let phi = phi.clone();
                    BoundaryFunction::general(n, move |z: &[f64]| z[i] * phi.eval(z))
                };
                let est = sphere_integral(&coord, x, spec, mc, beta)?;
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                add(&e, est);
            }
        }
    }
    Ok(GradientEstimate {
        value,
        err_est: err2.sqrt(),
        path,
    })
}

/// Orthonormal directions `f_i` spanning `∫ β ζ φ dσ`, each paired with
/// `⟨ζ, f_i⟩ φ(ζ)` declared in a frame that keeps the quadrature reduction.
/// `None` when only the coordinate-wise Monte-Carlo route applies.
fn moment_frame(phi: &BoundaryFunction, x: &BallPoint) -> Result<Option<Vec<(Direction, BoundaryFunction)>>> {
    let n = x.dim();
    if n == 2 {
        return Ok(None);
    }
    let xhat = x.radial();
    match &phi.symmetry {
        Symmetry::OneCoordinate { axis, profile } => {
            let c = xhat.as_ref().map_or(1.0, |h| dot(h.coords(), axis.coords()));
            if c.abs() >= 1.0 - 1e-14 {
                let g = Arc::clone(profile);
                let w = BoundaryFunction::one_coordinate(axis.clone(), move |t| t * g(t));
                return Ok(Some(vec![(axis.clone(), w)]));
            }
            let h = xhat.expect("x is off the origin here");
            let (_, perp) = axis.decompose(&h);
            let perp = perp.ok_or_else(|| Error::domain("poisson_gradient", "degenerate frame"))?;
            let s = dot(axis.coords(), perp.coords());
            let mut out = Vec::with_capacity(2);
            for k in 0..2 {
                let g = Arc::clone(profile);
                let w = BoundaryFunction::two_coordinates(h.clone(), perp.clone(), Vec::new(), move |a, b| {
                    let m = if k == 0 { a } else { b };
                    m * g(c * a + s * b)
                })?;
                out.push((if k == 0 { h.clone() } else { perp.clone() }, w));
            }
            Ok(Some(out))
        }
        Symmetry::TwoCoordinates {
            e1,
            e2,
            profile,
            angle_breaks,
            line_cuts,
        } => {
            if let Some(h) = &xhat {
                let c1 = dot(h.coords(), e1.coords());
                let c2 = dot(h.coords(), e2.coords());
                if (c1 * c1 + c2 * c2 - 1.0).abs() > 1e-12 {
                    return Ok(None);
                }
            }
            let mut out = Vec::with_capacity(2);
            for k in 0..2 {
                let g = Arc::clone(profile);
                let w = BoundaryFunction::two_coordinates(e1.clone(), e2.clone(), angle_breaks.clone(), move |a, b| {
                    let m = if k == 0 { a } else { b };
                    m * g(a, b)
                })?
                .with_line_cuts(line_cuts.clone())?;
                out.push((if k == 0 { e1.clone() } else { e2.clone() }, w));
            }
            Ok(Some(out))
        }
        Symmetry::General(_) => Ok(None),
    }
}

/// Integrates `w(|x|², ⟨ζ, x⟩, n) · φ(ζ)` over the sphere, choosing the
/// cheapest exact reduction allowed by the symmetry of `φ` relative to `x`.
fn sphere_integral<W>(
    phi: &BoundaryFunction,
    x: &BallPoint,
    spec: &QuadratureSpec,
    mc: &MonteCarloConfig,
    weight: W,
) -> Result<Estimate>
where
    W: Fn(f64, f64, usize) -> f64,
{
    let n = x.dim();
    if phi.dim() != n {
        return Err(Error::domain(
            "poisson_integral",
            format!("boundary data lives in dimension {}, point in {n}", phi.dim()),
        ));
    }
    let rho = x.norm();
    let rho2 = x.norm_sq();
    let xhat = x.radial();

    if n == 2 {
        // S¹ is one-dimensional; integrate the angle directly.
        let q = integrate_interval(
            |t| {
                let (s, c) = t.sin_cos();
                let zeta = [c, s];
                let xz = dot(x.coords(), &zeta);
                weight(rho2, xz, n) * phi.eval(&zeta)
            },
            -PI,
            PI,
            spec,
        )?;
        return Ok(Estimate {
            value: q.value / (2.0 * PI),
            err_est: q.err_est / (2.0 * PI),
            path: EvalPath::SphereQuadrature,
        });
    }
    let dim = SphereDim::new(n)?;

    let done = |q: crate::quadrature::Quadrature| Estimate {
        value: q.value,
        err_est: q.err_est,
        path: EvalPath::SphereQuadrature,
    };

    match &phi.symmetry {
        Symmetry::OneCoordinate { axis, profile } => {
            let along = xhat.as_ref().map(|h| dot(h.coords(), axis.coords()));
            match along {
                None => {
                    let q = slice_integral_1var_with_breaks(
                        |t| weight(rho2, 0.0, n) * profile(t),
                        dim,
                        &[],
                        spec,
                    )?;
                    Ok(done(q))
                }
                Some(c) if c.abs() >= 1.0 - 1e-14 => {
                    let s = c.signum();
                    let q = slice_integral_1var_with_breaks(
                        |t| weight(rho2, rho * t, n) * profile(s * t),
                        dim,
                        &[],
                        spec,
                    )?;
                    Ok(done(q))
                }
                Some(c) => {
                    // Frame (x̂, a⊥): ⟨ζ, a⟩ = c η₁ + s η₂.
                    let s = (1.0 - c * c).sqrt();
                    let q = try_slice_integral_2var(
                        |e1, e2| Ok(weight(rho2, rho * e1, n) * profile(c * e1 + s * e2)),
                        dim,
                        &[],
                        spec,
                    )?;
                    Ok(done(q))
                }
            }
        }
        Symmetry::TwoCoordinates {
            e1,
            e2,
            profile,
            angle_breaks,
            line_cuts,
        } => {
            let (c1, c2) = match &xhat {
                None => (0.0, 0.0),
                Some(h) => (dot(h.coords(), e1.coords()), dot(h.coords(), e2.coords())),
            };
            let in_plane = xhat.is_none() || (c1 * c1 + c2 * c2 - 1.0).abs() <= 1e-12;
            if in_plane && !line_cuts.is_empty() {
                let q = try_slice_integral_2var_cut(
                    |a, b| Ok(weight(rho2, rho * (c1 * a + c2 * b), n) * profile(a, b)),
                    dim,
                    line_cuts,
                    spec,
                )?;
                Ok(done(q))
            } else if in_plane {
                let q = try_slice_integral_2var(
                    |a, b| Ok(weight(rho2, rho * (c1 * a + c2 * b), n) * profile(a, b)),
                    dim,
                    angle_breaks,
                    spec,
                )?;
                Ok(done(q))
            } else {
                monte_carlo_path(phi, x, mc, &weight)
            }
        }
        Symmetry::General(_) => monte_carlo_path(phi, x, mc, &weight),
    }
}

fn monte_carlo_path<W>(
    phi: &BoundaryFunction,
    x: &BallPoint,
    mc: &MonteCarloConfig,
    weight: &W,
) -> Result<Estimate>
where
    W: Fn(f64, f64, usize) -> f64,
{
    let n = x.dim();
    let rho2 = x.norm_sq();
    let r = monte_carlo_sphere(
        |zeta| weight(rho2, dot(x.coords(), zeta), n) * phi.eval(zeta),
        SphereDim::new(n)?,
        mc.samples,
        mc.seed,
    )?;
    Ok(Estimate {
        value: r.estimate,
        err_est: r.std_err,
        path: EvalPath::MonteCarlo,
    })
}

/// A function on the ball, as consumed by the finite-difference operators.
pub type BallFn<'a> = dyn Fn(&[f64]) -> f64 + 'a;

fn check_stencil(op: &'static str, x: &BallPoint, h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::domain(op, format!("step must be positive, got {h}")));
    }
    let xx = x.norm_sq();
    for &xi in x.coords() {
        // |x ± h e_i|² = |x|² ± 2h x_i + h²
        let worst = xx + 2.0 * h * xi.abs() + h * h;
        if !(worst < 1.0) {
            return Err(Error::domain(
                op,
                format!("stencil of step {h} around |x| = {} leaves the ball", xx.sqrt()),
            ));
        }
    }
    Ok(())
}

/// `Δ_h u(x)` with every derivative replaced by a second-order central
/// difference of step `h`.
pub fn hyperbolic_laplacian_residual(u: &BallFn<'_>, x: &BallPoint, h: f64) -> Result<f64> {
    check_stencil("hyperbolic_laplacian_residual", x, h)?;
    let n = x.dim();
    let xs = x.coords();
    let u0 = u(xs);
    let mut point = xs.to_vec();
    let mut laplacian = 0.0;
    let mut radial = 0.0;
    for i in 0..n {
        point[i] = xs[i] + h;
        let up = u(&point);
        point[i] = xs[i] - h;
        let um = u(&point);
        point[i] = xs[i];
        laplacian += (up - 2.0 * u0 + um) / (h * h);
        radial += xs[i] * (up - um) / (2.0 * h);
    }
    let one_minus = 1.0 - x.norm_sq();
    Ok(one_minus * one_minus * laplacian + 2.0 * (n as f64 - 2.0) * one_minus * radial)
}

/// Central-difference gradient of `u` at `x`.
pub fn gradient_fd(u: &BallFn<'_>, x: &BallPoint, h: f64) -> Result<Vec<f64>> {
    check_stencil("gradient_fd", x, h)?;
    let xs = x.coords();
    let mut point = xs.to_vec();
    let mut grad = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        point[i] = xs[i] + h;
        let up = u(&point);
        point[i] = xs[i] - h;
        let um = u(&point);
        point[i] = xs[i];
        grad.push((up - um) / (2.0 * h));
    }
    Ok(grad)
}

/// Richardson-extrapolated central-difference gradient from steps `h` and
/// `h/2`, with the max-norm change between the two as an error indicator.
pub fn gradient_fd_richardson(u: &BallFn<'_>, x: &BallPoint, h: f64) -> Result<(Vec<f64>, f64)> {
    let coarse = gradient_fd(u, x, h)?;
    let fine = gradient_fd(u, x, 0.5 * h)?;
    let mut change = 0.0_f64;
    let grad = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| {
            change = change.max((f - c).abs());
            (4.0 * f - c) / 3.0
        })
        .collect();
    Ok((grad, change))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn ball_point_validation() {
        assert!(BallPoint::new(vec![0.6, 0.8]).is_err());
        assert!(BallPoint::new(vec![0.5]).is_err());
        assert!(BallPoint::new(vec![f64::NAN, 0.0]).is_err());
        let x = BallPoint::on_axis(3, 0.5).unwrap();
        assert_eq!(x.coords(), &[0.5, 0.0, 0.0]);
        assert!(BallPoint::origin(4).unwrap().radial().is_none());
    }

    #[test]
    fn direction_validation() {
        assert!(Direction::new(vec![1.0, 1.0]).is_err());
        assert!(Direction::normalize(vec![0.0, 0.0, 0.0]).is_err());
        let d = Direction::normalize(vec![3.0, 4.0]).unwrap();
        assert!((d.coords()[0] - 0.6).abs() < 1e-15);
        assert!(Direction::axis(3, 3).is_err());
    }

    #[test]
    fn direction_decomposition() {
        let axis = Direction::axis(3, 0).unwrap();
        let l = Direction::in_first_plane(3, 0.3).unwrap();
        let (c, t) = l.decompose(&axis);
        assert!((c - 0.3f64.cos()).abs() < 1e-15);
        let t = t.unwrap();
        assert!((t.coords()[1] - 1.0).abs() < 1e-14);
        assert!(axis.decompose(&axis).1.is_none());
    }

    #[test]
    fn kernel_values() {
        let e1 = Direction::axis(3, 0).unwrap();
        for n in 2..6 {
            let z = Direction::axis(n, n - 1).unwrap();
            assert_eq!(poisson_kernel(&BallPoint::origin(n).unwrap(), &z), 1.0);
        }
        let x = BallPoint::on_axis(3, 0.5).unwrap();
        assert!(rel(poisson_kernel(&x, &e1), 9.0) < 1e-14);
        assert!(rel(poisson_kernel(&x, &e1.negated()), 1.0 / 9.0) < 1e-14);
    }

    #[test]
    fn kernel_gradient_at_origin() {
        let e1 = Direction::axis(3, 0).unwrap();
        let g = kernel_gradient(&BallPoint::origin(3).unwrap(), &e1);
        assert!((g[0] - 4.0).abs() < 1e-15);
        assert_eq!(&g[1..], &[0.0, 0.0]);
    }

    #[test]
    fn kernel_gradient_stays_in_span() {
        let x = BallPoint::new(vec![0.3, 0.1, 0.0, 0.0]).unwrap();
        let z = Direction::normalize(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let g = kernel_gradient(&x, &z);
        assert_eq!(g[2], 0.0);
        assert_eq!(g[3], 0.0);
    }

    #[test]
    fn kernel_gradient_matches_central_differences() {
        let x = BallPoint::new(vec![0.3, 0.2, 0.0, 0.0]).unwrap();
        let z = Direction::axis(4, 1).unwrap();
        let analytic = kernel_gradient(&x, &z);
        let u = |y: &[f64]| poisson_kernel(&BallPoint::new(y.to_vec()).unwrap(), &z);
        let fd = gradient_fd(&u, &x, 1e-5).unwrap();
        for (a, f) in analytic.iter().zip(&fd) {
            assert!((a - f).abs() <= 1e-6 * a.abs().max(1.0), "{a} vs {f}");
        }
    }

    #[test]
    fn mobius_basics() {
        let x = BallPoint::on_axis(3, 0.5).unwrap();
        let o = BallPoint::origin(3).unwrap();
        assert_eq!(mobius_phi(&x, &o), x);
        assert!(mobius_phi(&x, &x).norm() < 1e-15);
        let y = BallPoint::new(vec![0.1, -0.2, 0.3]).unwrap();
        let neg: Vec<f64> = y.coords().iter().map(|v| -v).collect();
        assert_eq!(mobius_phi(&o, &y).coords(), neg.as_slice());
        let back = mobius_phi(&x, &mobius_phi(&x, &y));
        for (a, b) in back.coords().iter().zip(y.coords()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_data_reproduces_constant() {
        let spec = QuadratureSpec::default();
        for n in 2..6 {
            let one = BoundaryFunction::constant(n, 1.0).unwrap();
            let x = BallPoint::on_axis(n, 0.6).unwrap();
            let v = poisson_integral(&one, &x, &spec).unwrap();
            assert!(rel(v.value, 1.0) < 1e-10, "n = {n}: {}", v.value);
            assert_eq!(v.path, EvalPath::SphereQuadrature);
        }
    }

    #[test]
    fn odd_data_vanishes_at_origin() {
        let e1 = Direction::axis(3, 0).unwrap();
        let phi = BoundaryFunction::one_coordinate(e1, f64::signum);
        let v = poisson_integral(&phi, &BallPoint::origin(3).unwrap(), &QuadratureSpec::default())
            .unwrap();
        assert!(v.value.abs() < 1e-14);
    }

    #[test]
    fn symmetric_paths_agree() {
        // The same data declared three ways must integrate to the same value.
        let spec = QuadratureSpec::default();
        let x = BallPoint::new(vec![0.2, 0.3, -0.1, 0.0]).unwrap();
        let a = Direction::normalize(vec![1.0, -1.0, 0.5, 0.2]).unwrap();
        let ac = a.coords().to_vec();
        let g = |t: f64| 1.0 + t - 2.0 * t * t * t;
        let zonal = BoundaryFunction::one_coordinate(a.clone(), g);
        let general = BoundaryFunction::general(4, move |z| g(dot(z, &ac)));
        let v1 = poisson_integral(&zonal, &x, &spec).unwrap();
        let v2 = poisson_integral_with(
            &general,
            &x,
            &spec,
            &MonteCarloConfig {
                samples: 400_000,
                seed: 11,
            },
        )
        .unwrap();
        assert_eq!(v2.path, EvalPath::MonteCarlo);
        assert!((v1.value - v2.value).abs() < 4.0 * v2.err_est);
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let x = BallPoint::on_axis(3, 0.4).unwrap();
        let r = hyperbolic_laplacian_residual(&|_: &[f64]| 2.0, &x, 1e-3).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn planar_harmonic_polynomial() {
        let x = BallPoint::new(vec![0.3, -0.2]).unwrap();
        let u = |y: &[f64]| y[0] * y[0] - y[1] * y[1];
        let r = hyperbolic_laplacian_residual(&u, &x, 1e-3).unwrap();
        assert!(r.abs() < 1e-8);
    }

    #[test]
    fn kernel_is_hyperbolic_harmonic() {
        let z = Direction::normalize(vec![0.3, 0.9, -0.2]).unwrap();
        let x = BallPoint::on_axis(3, 0.4).unwrap();
        let u = |y: &[f64]| poisson_kernel(&BallPoint::new(y.to_vec()).unwrap(), &z);
        let scale = u(x.coords());
        let r = hyperbolic_laplacian_residual(&u, &x, 1e-3).unwrap();
        assert!(r.abs() <= 1e-4 * scale, "{r}");
    }

    #[test]
    fn stencil_leaving_ball_is_rejected() {
        let x = BallPoint::on_axis(3, 0.9999).unwrap();
        assert!(gradient_fd(&|_: &[f64]| 0.0, &x, 1e-3).is_err());
        assert!(hyperbolic_laplacian_residual(&|_: &[f64]| 0.0, &x, 1e-3).is_err());
        assert!(gradient_fd(&|_: &[f64]| 0.0, &x, 0.0).is_err());
    }

    #[test]
    fn gradient_of_linear_function() {
        let c = [0.5, -1.5, 2.0];
        let x = BallPoint::new(vec![0.1, 0.2, 0.3]).unwrap();
        let g = gradient_fd(&|y: &[f64]| dot(&c, y), &x, DEFAULT_FD_STEP).unwrap();
        for (a, b) in g.iter().zip(&c) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn richardson_improves_fd() {
        let x = BallPoint::new(vec![0.2, 0.1, 0.0]).unwrap();
        let u = |y: &[f64]| (3.0 * y[0]).sin() * y[1].exp();
        let exact = [3.0 * 0.6f64.cos() * 0.1f64.exp(), 0.6f64.sin() * 0.1f64.exp(), 0.0];
        let (g, change) = gradient_fd_richardson(&u, &x, 1e-2).unwrap();
        assert!(change < 1e-3);
        for (a, b) in g.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn gradient_weights_reassemble_kernel_gradient() {
        let x = BallPoint::new(vec![0.2, -0.1, 0.4]).unwrap();
        let z = Direction::normalize(vec![0.3, 0.9, -0.2]).unwrap();
        let (a, b) = kernel_gradient_weights(x.norm_sq(), dot(x.coords(), z.coords()), 3);
        let g = kernel_gradient(&x, &z);
        for (i, gi) in g.iter().enumerate() {
            assert!(rel(a * x.coords()[i] + b * z.coords()[i], *gi) < 1e-13);
        }
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let spec = QuadratureSpec::default();
        let mc = MonteCarloConfig::default();
        let one = BoundaryFunction::constant(4, 1.0).unwrap();
        let x = BallPoint::new(vec![0.1, 0.3, -0.2, 0.1]).unwrap();
        let g = poisson_gradient(&one, &x, &spec, &mc).unwrap();
        assert_eq!(g.path, EvalPath::SphereQuadrature);
        assert!(norm(&g.value) < 1e-11);
    }

    #[test]
    fn poisson_gradient_matches_differences_of_integral() {
        let spec = QuadratureSpec::default();
        let mc = MonteCarloConfig::default();
        let axis = Direction::normalize(vec![0.6, 0.8, 0.0]).unwrap();
        let phi = BoundaryFunction::one_coordinate(axis, |t| t * t * t - 0.4 * t + 0.2);
        let x = BallPoint::new(vec![0.3, -0.2, 0.1]).unwrap();
        let g = poisson_gradient(&phi, &x, &spec, &mc).unwrap();
        let h = 1e-4;
        for i in 0..3 {
            let mut up = x.coords().to_vec();
            let mut dn = x.coords().to_vec();
            up[i] += h;
            dn[i] -= h;
            let fu = poisson_integral(&phi, &BallPoint::new(up).unwrap(), &spec).unwrap().value;
            let fd = poisson_integral(&phi, &BallPoint::new(dn).unwrap(), &spec).unwrap().value;
            let d = (fu - fd) / (2.0 * h);
            assert!((g.value[i] - d).abs() < 1e-7, "component {i}: {} vs {d}", g.value[i]);
        }
    }

    #[test]
    fn general_data_gradient_uses_monte_carlo() {
        let spec = QuadratureSpec::default();
        let mc = MonteCarloConfig::default();
        let phi = BoundaryFunction::general(3, |z: &[f64]| z[2]);
        let x = BallPoint::origin(3).unwrap();
        let g = poisson_gradient(&phi, &x, &spec, &mc).unwrap();
        assert_eq!(g.path, EvalPath::MonteCarlo);
        // ∇P_h[ζ₃](0) = 2(n-1)/n e₃
        assert!((g.value[2] - 4.0 / 3.0).abs() < 5.0 * g.err_est);
    }
}
