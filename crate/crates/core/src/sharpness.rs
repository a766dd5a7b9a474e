//! Attainment experiments for the directional gradient bound.
//!
//! `φ ↦ ⟨∇P_h[φ](x), ℓ⟩ = ∫ g φ dσ` with `g(ζ) = ⟨∇_x P_h(x, ζ), ℓ⟩` is a
//! linear functional on `L^p`, so its norm `C_p(x; ℓ)` is approached by the
//! Hölder-equality function `φ* = sign(g)|g|^(q-1)`. The ratio
//! `|⟨∇u(x), ℓ⟩| / (C_p(x; ℓ) ‖φ*‖_p)` should then be 1 up to quadrature
//! error, while arbitrary data must stay below 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{c_directional, c_optimal, ConstantOptions, Exponent, ExponentPair};
use crate::error::{Error, Result};
use crate::kernel::{
    dot, kernel_gradient_weights, norm, poisson_gradient, BallPoint, BoundaryFunction, Direction, EvalPath,
    MonteCarloConfig, Symmetry,
};
use crate::quadrature::{
    monte_carlo_sphere, seeded_rng, slice_integral_1var, slice_integral_2var, slice_integral_2var_cut, LineCut,
    QuadratureSpec, SphereDim,
};

/// Sample grid used for sup norms of symmetric data.
const SUP_GRID: usize = 4096;

/// Where the bound is probed.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessTarget {
    pub x: BallPoint,
    pub l: Direction,
    pub pq: ExponentPair,
}

#[derive(Debug, Clone)]
pub struct ExtremalCandidate {
    pub boundary: BoundaryFunction,
    pub p_norm: f64,
    pub p_norm_err: f64,
    pub target: SharpnessTarget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub ratio: f64,
    /// `|⟨∇u(x), ℓ⟩|`
    pub numerator: f64,
    pub constant: f64,
    pub p_norm: f64,
    pub path: EvalPath,
    pub constant_path: EvalPath,
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Orthonormal frame `(e1, e2)` with `x ∈ span(e1)` and `ℓ ∈ span(e1, e2)`.
fn target_frame(x: &BallPoint, l: &Direction) -> Result<(Direction, Direction)> {
    let n = x.dim();
    let e1 = x.radial().unwrap_or_else(|| l.clone());
    let (_, perp) = l.decompose(&e1);
    let e2 = match perp {
        Some(t) => t,
        None => {
            let (i, _) = e1
                .coords()
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .expect("n >= 2");
            Direction::axis(n, i)?
                .decompose(&e1)
                .1
                .ok_or_else(|| Error::domain("extremal_boundary", "degenerate frame"))?
        }
    };
    Ok((e1, e2))
}

/// `φ*(ζ) = sign(g)|g|^(q-1)` for `g(ζ) = ⟨∇_x P_h(x, ζ), ℓ⟩`, declared in the
/// frame `(x/|x|, ℓ⊥)`; `φ* = sign(g)` for `p = ∞`.
pub fn extremal_boundary(
    pq: &ExponentPair,
    x: &BallPoint,
    l: &Direction,
    spec: &QuadratureSpec,
) -> Result<ExtremalCandidate> {
    let n = x.dim();
    if n < 3 || l.dim() != n {
        return Err(Error::domain(
            "extremal_boundary",
            format!("need matching dimensions n >= 3, got point {n} and direction {}", l.dim()),
        ));
    }
    let (e1, e2) = target_frame(x, l)?;
    let rho = x.norm();
    let rho2 = x.norm_sq();
    let cl = dot(l.coords(), e1.coords());
    let sl = dot(l.coords(), e2.coords());
    let q = pq.q();
    let g = move |a: f64, b: f64| {
        let (alpha, beta) = kernel_gradient_weights(rho2, rho * a, n);
        alpha * rho * cl + beta * (cl * a + sl * b)
    };
    // g vanishes exactly on the line (1+|x|²)cℓ a + (1-|x|²)sℓ b = 2|x|cℓ.
    let cut = LineCut {
        a: (1.0 + rho2) * cl,
        b: (1.0 - rho2) * sl,
        c: 2.0 * rho * cl,
    };
    let cuts = if cut.a == 0.0 && cut.b == 0.0 { Vec::new() } else { vec![cut] };
    let power = q - 1.0;
    let boundary = BoundaryFunction::two_coordinates(e1, e2, Vec::new(), move |a, b| {
        let v = g(a, b);
        if power == 0.0 {
            sign(v)
        } else {
            sign(v) * v.abs().powf(power)
        }
    })?
    .with_line_cuts(cuts.clone())?;
    let (p_norm, p_norm_err) = match pq.p() {
        Exponent::Infinity => (1.0, 0.0),
        Exponent::Finite(p) => {
            // |φ*|^p = |g|^q
            let r = slice_integral_2var_cut(|a, b| g(a, b).abs().powf(q), SphereDim::new(n)?, &cuts, spec)?;
            let v = r.value.powf(1.0 / p);
            (v, v * r.err_est / (p * r.value))
        }
    };
    if !(p_norm > 0.0) {
        return Err(Error::domain("extremal_boundary", "candidate has zero norm"));
    }
    Ok(ExtremalCandidate {
        boundary,
        p_norm,
        p_norm_err,
        target: SharpnessTarget {
            x: x.clone(),
            l: l.clone(),
            pq: *pq,
        },
    })
}

/// `|⟨∇P_h[φ*](x), ℓ⟩| / (C_p(x; ℓ) ‖φ*‖_p)`, with the gradient obtained by
/// quadrature of the kernel gradient against `φ*`.
pub fn sharpness_ratio(cand: &ExtremalCandidate, spec: &QuadratureSpec, opts: &ConstantOptions) -> Result<SharpnessReport> {
    let t = &cand.target;
    directional_ratio(&cand.boundary, cand.p_norm, t, spec, opts)
}

/// Same ratio for arbitrary data with a known `‖φ‖_p`.
pub fn directional_ratio(
    phi: &BoundaryFunction,
    p_norm: f64,
    t: &SharpnessTarget,
    spec: &QuadratureSpec,
    opts: &ConstantOptions,
) -> Result<SharpnessReport> {
    let c = c_directional(&t.pq, &t.x, &t.l, opts)?;
    let grad = poisson_gradient(phi, &t.x, spec, &opts.monte_carlo)?;
    let numerator = dot(&grad.value, t.l.coords()).abs();
    Ok(SharpnessReport {
        ratio: numerator / (c.value * p_norm),
        numerator,
        constant: c.value,
        p_norm,
        path: grad.path,
        constant_path: c.path,
    })
}

/// Ratios of the extremal candidate at `spec.refined(k)`, `k = 0..=levels`.
pub fn sharpness_refinement(
    pq: &ExponentPair,
    x: &BallPoint,
    l: &Direction,
    spec: &QuadratureSpec,
    levels: u32,
    opts: &ConstantOptions,
) -> Result<Vec<SharpnessReport>> {
    (0..=levels)
        .map(|k| {
            let s = spec.refined(k);
            let cand = extremal_boundary(pq, x, l, &s)?;
            let o = ConstantOptions {
                quadrature: s,
                ..*opts
            };
            sharpness_ratio(&cand, &s, &o)
        })
        .collect()
}

/// `‖φ‖_p` over the sphere. Symmetric data uses the slice reductions (sup
/// norms a dense grid on the slice); general data uses Monte Carlo (sup
/// norms the sample maximum).
pub fn lp_norm(
    phi: &BoundaryFunction,
    p: Exponent,
    spec: &QuadratureSpec,
    mc: &MonteCarloConfig,
) -> Result<f64> {
    let n = phi.dim();
    let dim = SphereDim::new(n)?;
    match (p, phi.symmetry()) {
        (Exponent::Infinity, Symmetry::OneCoordinate { profile, .. }) => Ok((0..=SUP_GRID)
            .map(|k| profile(-1.0 + 2.0 * k as f64 / SUP_GRID as f64).abs())
            .fold(0.0, f64::max)),
        (Exponent::Infinity, Symmetry::TwoCoordinates { profile, .. }) if n >= 3 => {
            // The image of (⟨ζ,e1⟩, ⟨ζ,e2⟩) is the closed unit disc.
            let m = 256;
            let mut best = 0.0_f64;
            for i in 0..=m {
                let r = i as f64 / m as f64;
                for j in 0..SUP_GRID {
                    let th = 2.0 * std::f64::consts::PI * j as f64 / SUP_GRID as f64;
                    best = best.max(profile(r * th.cos(), r * th.sin()).abs());
                }
            }
            Ok(best)
        }
        (Exponent::Infinity, _) => {
            let mut best = 0.0_f64;
            let mut rng = seeded_rng(mc.seed);
            let mut z = vec![0.0; n];
            for _ in 0..mc.samples {
                crate::quadrature::sample_sphere(&mut rng, &mut z);
                best = best.max(phi.eval(&z).abs());
            }
            Ok(best)
        }
        (Exponent::Finite(p), Symmetry::OneCoordinate { profile, .. }) => {
            let r = slice_integral_1var(|t| profile(t).abs().powf(p), dim, spec)?;
            Ok(r.value.powf(1.0 / p))
        }
        (Exponent::Finite(p), Symmetry::TwoCoordinates { profile, angle_breaks, line_cuts, .. }) if n >= 3 => {
            let r = if line_cuts.is_empty() {
                slice_integral_2var(|a, b| profile(a, b).abs().powf(p), dim, angle_breaks, spec)?
            } else {
                slice_integral_2var_cut(|a, b| profile(a, b).abs().powf(p), dim, line_cuts, spec)?
            };
            Ok(r.value.powf(1.0 / p))
        }
        (Exponent::Finite(p), _) => {
            let r = monte_carlo_sphere(|z| phi.eval(z).abs().powf(p), dim, mc.samples, mc.seed)?;
            Ok(r.estimate.powf(1.0 / p))
        }
    }
}

/// One draw of the random family: a combination of the coordinate
/// monomials `ζ^α`, `|α| ≤ 3`, with standard normal coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialData {
    pub n: usize,
    pub terms: Vec<(Vec<u8>, f64)>,
}

impl MonomialData {
    pub fn random(n: usize, seed: u64) -> MonomialData {
        use rand::RngExt;
        let mut rng = seeded_rng(seed);
        let terms = monomial_exponents(n, 3)
            .into_iter()
            .map(|e| (e, rng.sample(rand_distr::StandardNormal)))
            .collect();
        MonomialData { n, terms }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(z).map(|(k, zi)| zi.powi(i32::from(*k))).product::<f64>())
            .sum()
    }

    pub fn boundary(&self) -> BoundaryFunction {
        let d = self.clone();
        BoundaryFunction::general(self.n, move |z: &[f64]| d.eval(z))
    }
}

fn monomial_exponents(n: usize, degree: u8) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; n];
    fn rec(i: usize, left: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, degree, &mut cur, &mut out);
    out
}

/// `|∇P_h[φ](x)| / (C_p(x) ‖φ‖_p)` for one boundary function.
pub fn gradient_ratio(phi: &BoundaryFunction, pq: &ExponentPair, x: &BallPoint, spec: &QuadratureSpec, opts: &ConstantOptions) -> Result<f64> {
    let c = c_optimal(pq, x, opts)?;
    let grad = poisson_gradient(phi, x, spec, &opts.monte_carlo)?;
    let pn = lp_norm(phi, pq.p(), spec, &opts.monte_carlo)?;
    if pn == 0.0 {
        return Ok(0.0);
    }
    Ok(norm(&grad.value) / (c.value * pn))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub max_ratio: f64,
    pub worst_trial: usize,
    pub ratios: Vec<f64>,
}

/// Seed of trial `k` in a scan seeded with `seed`.
pub fn trial_seed(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Largest [`gradient_ratio`] over `trials` draws of [`MonomialData`].
/// Each trial is seeded independently, so results do not depend on order.
pub fn bound_violation_scan(
    pq: &ExponentPair,
    x: &BallPoint,
    trials: usize,
    seed: u64,
    spec: &QuadratureSpec,
    opts: &ConstantOptions,
) -> Result<ScanReport> {
    if trials == 0 {
        return Err(Error::domain("bound_violation_scan", "need at least one trial"));
    }
    let ratios = (0..trials)
        .into_par_iter()
        .map(|k| {
            let data = MonomialData::random(x.dim(), trial_seed(seed, k));
            gradient_ratio(&data.boundary(), pq, x, spec, opts)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (worst_trial, max_ratio) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    Ok(ScanReport {
        max_ratio,
        worst_trial,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_infinity_candidate_is_sign_of_projection() {
        let spec = QuadratureSpec::default();
        let x = BallPoint::origin(3).unwrap();
        let l = Direction::normalize(vec![0.3, -0.4, 0.5]).unwrap();
        let cand = extremal_boundary(&ExponentPair::infinity(), &x, &l, &spec).unwrap();
        assert_eq!(cand.p_norm, 1.0);
        let mut rng = seeded_rng(3);
        let mut z = vec![0.0; 3];
        for _ in 0..50 {
            crate::quadrature::sample_sphere(&mut rng, &mut z);
            assert_eq!(cand.boundary.eval(&z), sign(dot(&z, l.coords())));
        }
    }

    #[test]
    fn candidate_is_odd_in_direction() {
        let spec = QuadratureSpec::default();
        let pq = ExponentPair::finite(2.5).unwrap();
        let x = BallPoint::new(vec![0.2, 0.3, -0.1]).unwrap();
        let l = Direction::normalize(vec![1.0, 0.2, 0.4]).unwrap();
        let a = extremal_boundary(&pq, &x, &l, &spec).unwrap();
        let b = extremal_boundary(&pq, &x, &l.negated(), &spec).unwrap();
        let mut rng = seeded_rng(4);
        let mut z = vec![0.0; 3];
        for _ in 0..50 {
            crate::quadrature::sample_sphere(&mut rng, &mut z);
            let (u, v) = (a.boundary.eval(&z), b.boundary.eval(&z));
            assert!((u + v).abs() <= 1e-12 * u.abs().max(1.0));
        }
    }

    #[test]
    fn origin_infinity_ratio_is_one() {
        let spec = QuadratureSpec {
            base_order: 64,
            ..QuadratureSpec::default()
        };
        let x = BallPoint::origin(3).unwrap();
        let l = Direction::axis(3, 0).unwrap();
        let cand = extremal_boundary(&ExponentPair::infinity(), &x, &l, &spec).unwrap();
        let r = sharpness_ratio(&cand, &spec, &ConstantOptions::default()).unwrap();
        assert!(r.ratio >= 0.9999 && r.ratio <= 1.0 + 1e-9, "{}", r.ratio);
    }

    #[test]
    fn mismatched_candidate_has_small_ratio() {
        let spec = QuadratureSpec::default();
        let x = BallPoint::origin(3).unwrap();
        let t = SharpnessTarget {
            x,
            l: Direction::axis(3, 0).unwrap(),
            pq: ExponentPair::infinity(),
        };
        let one = BoundaryFunction::constant(3, 1.0).unwrap();
        let r = directional_ratio(&one, 1.0, &t, &spec, &ConstantOptions::default()).unwrap();
        assert!(r.ratio <= 1e-10);
    }

    #[test]
    fn constant_data_has_zero_gradient_ratio() {
        let spec = QuadratureSpec::default();
        let x = BallPoint::on_axis(3, 0.5).unwrap();
        let one = BoundaryFunction::constant(3, 1.0).unwrap();
        let r = gradient_ratio(&one, &ExponentPair::finite(2.0).unwrap(), &x, &spec, &ConstantOptions::default())
            .unwrap();
        assert!(r < 1e-10);
    }

    #[test]
    fn monomial_family_size() {
        assert_eq!(monomial_exponents(3, 3).len(), 20);
        assert_eq!(monomial_exponents(4, 3).len(), 35);
        let a = MonomialData::random(3, 9);
        assert_eq!(a, MonomialData::random(3, 9));
        assert_ne!(a, MonomialData::random(3, 10));
    }

    #[test]
    fn lp_norms_of_constants() {
        let spec = QuadratureSpec::default();
        let mc = MonteCarloConfig::default();
        let c = BoundaryFunction::constant(4, -2.0).unwrap();
        assert!((lp_norm(&c, Exponent::Finite(3.0), &spec, &mc).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(lp_norm(&c, Exponent::Infinity, &spec, &mc).unwrap(), 2.0);
        let g = BoundaryFunction::general(4, |_| -2.0);
        assert!((lp_norm(&g, Exponent::Finite(3.0), &spec, &mc).unwrap() - 2.0).abs() < 1e-12);
    }
}
