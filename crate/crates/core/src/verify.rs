//! Named invariant suites behind `sharpgrad verify`.
//!
//! Each suite walks a fixed grid, compares independent evaluations of the
//! same quantity and records every case that misses its tolerance (or fails
//! numerically) together with its inputs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::{
    closed_form_available, k_closed_form, k_disc, k_sphere, hypergeometric_identity_check, moment_integral,
    moment_integral_quadrature, AngleGamma, Exponent, ExponentPair,
};
use crate::error::{Error, Result};
use crate::kernel::{
    gradient_fd_richardson, mobius_phi, poisson_gradient, poisson_integral, BallPoint, BoundaryFunction, Direction,
    MonteCarloConfig,
};
use crate::quadrature::{sample_sphere, seeded_rng, QuadratureSpec};
use crate::special::{kummer_residual, kummer_soft_limit, SeriesControl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    Normalization,
    PathAgreement,
    Kummer,
    Hypergeometric,
    Moments,
    MonotoneDispatch,
    MobiusGradient,
}

impl SuiteName {
    pub const ALL: [SuiteName; 7] = [
        SuiteName::Normalization,
        SuiteName::PathAgreement,
        SuiteName::Kummer,
        SuiteName::Hypergeometric,
        SuiteName::Moments,
        SuiteName::MonotoneDispatch,
        SuiteName::MobiusGradient,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SuiteName::Normalization => "normalization",
            SuiteName::PathAgreement => "path-agreement",
            SuiteName::Kummer => "kummer",
            SuiteName::Hypergeometric => "hypergeometric",
            SuiteName::Moments => "moments",
            SuiteName::MonotoneDispatch => "monotone-dispatch",
            SuiteName::MobiusGradient => "mobius-gradient",
        }
    }

    /// Evaluation paths whose values the suite compares.
    pub fn paths(self) -> &'static str {
        match self {
            SuiteName::Normalization => "sphere-quadrature",
            SuiteName::PathAgreement => "sphere-quadrature|disc-reduction|closed-form",
            SuiteName::Kummer => "closed-form",
            SuiteName::Hypergeometric => "sphere-quadrature|closed-form",
            SuiteName::Moments => "sphere-quadrature|closed-form",
            SuiteName::MonotoneDispatch => "disc-reduction",
            SuiteName::MobiusGradient => "sphere-quadrature",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.label() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = SuiteName::ALL.iter().map(|n| n.label()).collect();
                Error::Usage(format!("unknown suite {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifySettings {
    pub dims: Vec<usize>,
    pub quadrature: QuadratureSpec,
    pub series: SeriesControl,
    pub seed: u64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings {
            dims: vec![3, 4],
            quadrature: QuadratureSpec::default(),
            series: SeriesControl::default(),
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseFailure {
    pub inputs: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub passed: bool,
    pub cases: usize,
    /// Largest observed discrepancy, in the suite's own metric.
    pub worst: f64,
    pub tolerance: f64,
    pub path: String,
    pub failures: Vec<CaseFailure>,
}

struct Tally {
    suite: SuiteName,
    tolerance: f64,
    cases: usize,
    worst: f64,
    failures: Vec<CaseFailure>,
}

impl Tally {
    fn new(suite: SuiteName, tolerance: f64) -> Tally {
        Tally {
            suite,
            tolerance,
            cases: 0,
            worst: 0.0,
            failures: Vec::new(),
        }
    }

    /// Records a discrepancy `metric` that must not exceed the tolerance.
    fn check(&mut self, inputs: impl FnOnce() -> String, metric: Result<f64>) {
        self.cases += 1;
        match metric {
            Ok(m) if m <= self.tolerance => self.worst = self.worst.max(m),
            Ok(m) => {
                self.worst = self.worst.max(if m.is_nan() { f64::INFINITY } else { m });
                self.failures.push(CaseFailure {
                    inputs: inputs(),
                    detail: format!("discrepancy {m:e} exceeds {:e}", self.tolerance),
                });
            }
            Err(e) => self.failures.push(CaseFailure {
                inputs: inputs(),
                detail: e.to_string(),
            }),
        }
    }

    /// Records a qualitative condition.
    fn require(&mut self, inputs: impl FnOnce() -> String, ok: Result<bool>, what: &str) {
        self.cases += 1;
        match ok {
            Ok(true) => {}
            Ok(false) => self.failures.push(CaseFailure {
                inputs: inputs(),
                detail: what.to_string(),
            }),
            Err(e) => self.failures.push(CaseFailure {
                inputs: inputs(),
                detail: e.to_string(),
            }),
        }
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            suite: self.suite,
            passed: self.failures.is_empty(),
            cases: self.cases,
            worst: self.worst,
            tolerance: self.tolerance,
            path: self.suite.paths().to_string(),
            failures: self.failures,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Exponents of the standard grids: `1.5, 2, n, n+2, ∞`.
pub fn standard_exponents(n: usize) -> Vec<ExponentPair> {
    let nf = n as f64;
    let mut out: Vec<ExponentPair> = [1.5, 2.0, nf, nf + 2.0]
        .into_iter()
        .map(|p| ExponentPair::finite(p).expect("grid exponents exceed 1"))
        .collect();
    out.push(ExponentPair::infinity());
    out
}

pub fn run_suite(suite: SuiteName, s: &VerifySettings) -> SuiteReport {
    match suite {
        SuiteName::Normalization => normalization(s),
        SuiteName::PathAgreement => path_agreement(s),
        SuiteName::Kummer => kummer(s),
        SuiteName::Hypergeometric => hypergeometric(s),
        SuiteName::Moments => moments(s),
        SuiteName::MonotoneDispatch => monotone_dispatch(s),
        SuiteName::MobiusGradient => mobius_gradient(s),
    }
}

pub fn run_suites(names: &[SuiteName], s: &VerifySettings) -> Vec<SuiteReport> {
    names.iter().map(|n| run_suite(*n, s)).collect()
}

fn normalization(s: &VerifySettings) -> SuiteReport {
    let mut t = Tally::new(SuiteName::Normalization, 1e-9);
    for &n in &s.dims {
        let one = BoundaryFunction::constant(n, 1.0);
        for r in [0.0, 0.3, 0.6, 0.9] {
            let metric = one.clone().and_then(|phi| {
                // An oblique point so the integral runs in a rotated frame.
                let dir = Direction::normalize((0..n).map(|i| 1.0 + i as f64).collect())?;
                let x = BallPoint::new(dir.coords().iter().map(|c| r * c).collect())?;
                Ok(rel(poisson_integral(&phi, &x, &s.quadrature)?.value, 1.0))
            });
            t.check(|| format!("n={n} |x|={r}"), metric);
        }
    }
    t.finish()
}

fn path_agreement(s: &VerifySettings) -> SuiteReport {
    let mut t = Tally::new(SuiteName::PathAgreement, 1e-8);
    for &n in &s.dims {
        for pq in standard_exponents(n) {
            for r in [0.1, 0.5, 0.9] {
                for g in [0.0, PI / 6.0, PI / 2.0] {
                    let gamma = AngleGamma::reduce(g);
                    let metric = (|| {
                        let sphere = k_sphere(&pq, r, gamma, n, &s.quadrature)?.value;
                        let disc = k_disc(&pq, r, gamma, n, &s.quadrature)?.value;
                        let mut worst = rel(sphere, disc);
                        if closed_form_available(pq.regime(n), gamma.kind(), r) {
                            let cf = k_closed_form(&pq, r, gamma.kind(), n, &s.series)?;
                            worst = worst.max(rel(sphere, cf)).max(rel(disc, cf));
                        }
                        Ok(worst)
                    })();
                    t.check(|| format!("n={n} p={} |x|={r} gamma={g}", pq.p()), metric);
                }
            }
        }
    }
    t.finish()
}

fn kummer(s: &VerifySettings) -> SuiteReport {
    let mut t = Tally::new(SuiteName::Kummer, 1e-10);
    for a in [-3.0, -1.5, -0.4, 0.7] {
        for c in [1.75, 2.5, 4.0] {
            for v in [0.1, 0.5, 0.9 * kummer_soft_limit()] {
                t.check(
                    || format!("a={a} c={c} v={v}"),
                    kummer_residual(a, c, v, &s.series).map(f64::abs),
                );
            }
        }
    }
    t.finish()
}

fn hypergeometric(s: &VerifySettings) -> SuiteReport {
    let mut t = Tally::new(SuiteName::Hypergeometric, 1e-9);
    for a in [0.0, 1.0, 2.5] {
        for b in [-0.5, 0.0, 0.5] {
            for alpha in [-1.3, 0.5, 2.0] {
                for u in [0.0, 0.6, 0.9] {
                    let metric = hypergeometric_identity_check(a, b, alpha, u, &s.quadrature, &s.series)
                        .map(|(lhs, rhs)| rel(lhs.value, rhs));
                    t.check(|| format!("a={a} b={b} alpha={alpha} u={u}"), metric);
                }
            }
        }
    }
    t.finish()
}

fn moments(s: &VerifySettings) -> SuiteReport {
    // Odd moments are compared in absolute terms, even ones relatively.
    let mut odd = Tally::new(SuiteName::Moments, 1e-10);
    let mut even = Tally::new(SuiteName::Moments, 1e-8);
    let mut dims = vec![2];
    dims.extend(s.dims.iter().copied());
    for &n in &dims {
        for k in 0..6u32 {
            for q in [0.5, 1.0, 1.7, 3.0] {
                let inputs = || format!("n={n} k={k} q={q}");
                let num = moment_integral_quadrature(k, q, n, &s.quadrature);
                if k % 2 == 1 {
                    odd.check(inputs, num.map(|v| v.value.abs()));
                } else {
                    let metric = num.and_then(|v| Ok(rel(v.value, moment_integral(k, q, n)?)));
                    even.check(inputs, metric);
                }
            }
        }
    }
    let mut t = even;
    t.cases += odd.cases;
    t.failures.extend(odd.failures);
    t.finish()
}

/// Shape of a sequence: strictly decreasing, strictly increasing, or
/// constant to `rel_spread`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Decreasing,
    Increasing,
    Constant,
    Mixed,
}

pub fn classify_profile(values: &[f64], rel_spread: f64) -> Profile {
    let (lo, hi) = values.iter().fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(*v), b.max(*v)));
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if hi - lo <= rel_spread * mean.abs() {
        Profile::Constant
    } else if values.windows(2).all(|w| w[1] < w[0]) {
        Profile::Decreasing
    } else if values.windows(2).all(|w| w[1] > w[0]) {
        Profile::Increasing
    } else {
        Profile::Mixed
    }
}

/// `γ_k = kπ/(2 steps)`, `k = 0..=steps`.
pub fn gamma_grid(steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| k as f64 * PI / (2 * steps) as f64).collect()
}

fn monotone_dispatch(s: &VerifySettings) -> SuiteReport {
    let mut t = Tally::new(SuiteName::MonotoneDispatch, 1e-9);
    let r = 0.5;
    for &n in &s.dims {
        let nf = n as f64;
        let cases: [(Exponent, Profile); 6] = [
            (Exponent::Finite(1.5), Profile::Decreasing),
            (Exponent::Finite(2.0), Profile::Decreasing),
            (Exponent::Finite(nf + 1.0), Profile::Increasing),
            (Exponent::Finite(2.0 * nf), Profile::Increasing),
            (Exponent::Finite(nf), Profile::Constant),
            (Exponent::Infinity, Profile::Constant),
        ];
        for (p, expected) in cases {
            let observed = (|| {
                let pq = ExponentPair::new(p)?;
                let ks = gamma_grid(10)
                    .into_iter()
                    .map(|g| Ok(k_disc(&pq, r, AngleGamma::reduce(g), n, &s.quadrature)?.value))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(classify_profile(&ks, t.tolerance) == expected)
            })();
            t.require(
                || format!("n={n} p={p} |x|={r}"),
                observed,
                &format!("K(γ) is not {expected:?}"),
            );
        }
    }
    t.finish()
}

/// `∇(u∘φ_x)(0) = -(1-|x|²)∇u(x)` for Poisson integrals of random cubic
/// profiles along random axes.
fn mobius_gradient(s: &VerifySettings) -> SuiteReport {
    let mut t = Tally::new(SuiteName::MobiusGradient, 1e-5);
    let mut rng = seeded_rng(s.seed);
    for &n in &s.dims {
        for trial in 0..4 {
            let mut axis = vec![0.0; n];
            sample_sphere(&mut rng, &mut axis);
            let mut xdir = vec![0.0; n];
            sample_sphere(&mut rng, &mut xdir);
            let coef: Vec<f64> = (0..4).map(|_| rand::RngExt::random_range(&mut rng, -1.0..1.0)).collect();
            let r = 0.2 + 0.15 * trial as f64;
            let metric = (|| {
                let axis = Direction::new(axis.clone())?;
                let c = coef.clone();
                let phi = BoundaryFunction::one_coordinate(axis, move |t| c[0] + t * (c[1] + t * (c[2] + t * c[3])));
                let x = BallPoint::new(xdir.iter().map(|v| r * v).collect())?;
                let scale = 1.0 - x.norm_sq();
                let direct = poisson_gradient(&phi, &x, &s.quadrature, &MonteCarloConfig::default())?.value;
                let spec = s.quadrature;
                let composed = |y: &[f64]| -> f64 {
                    BallPoint::new(y.to_vec())
                        .map(|y| mobius_phi(&x, &y))
                        .and_then(|z| poisson_integral(&phi, &z, &spec))
                        .map_or(f64::NAN, |e| e.value)
                };
                let (fd, _) = gradient_fd_richardson(&composed, &BallPoint::origin(n)?, 1e-3)?;
                let norm = direct.iter().map(|v| v * v).sum::<f64>().sqrt() * scale;
                let err = fd
                    .iter()
                    .zip(&direct)
                    .map(|(a, b)| (a + scale * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                Ok(if norm == 0.0 { err } else { err / norm })
            })();
            t.check(|| format!("n={n} |x|={r} trial={trial}"), metric);
        }
    }
    t.finish()
}
