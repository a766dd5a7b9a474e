use std::f64::consts::PI;

use proptest::prelude::*;
use sharpgrad::constants::{
    c_at_angle, c_directional, c_minimal, c_optimal, conjugate_exponent, integral_I, k_closed_form, k_disc,
    k_monte_carlo, k_sphere, moment_integral, AngleGamma, ConstantOptions, DirectionKind, Exponent, ExponentPair,
    Regime,
};
use sharpgrad::kernel::{BallPoint, Direction, EvalPath, MonteCarloConfig};
use sharpgrad::quadrature::QuadratureSpec;
use sharpgrad::special::SeriesControl;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn reflect(w: &[f64], v: &[f64]) -> Vec<f64> {
    let d: f64 = w.iter().zip(v).map(|(a, b)| a * b).sum();
    v.iter().zip(w).map(|(a, b)| a - 2.0 * d * b).collect()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.iter().map(|a| a / r).collect()
}

#[test]
fn origin_value_at_p_two() {
    // K = ∫ |η₁|² dσ = 1/n; C = 2(n-1) K^(1/2).
    let opts = ConstantOptions::default();
    for n in [3usize, 4, 5] {
        let r = c_optimal(&ExponentPair::finite(2.0).unwrap(), &BallPoint::origin(n).unwrap(), &opts).unwrap();
        assert!(rel(r.k, 1.0 / n as f64) < 1e-13);
        assert!(rel(r.value, 2.0 * (n as f64 - 1.0) / (n as f64).sqrt()) < 1e-13);
        assert_eq!(r.direction_kind, DirectionKind::Any);
    }
}

#[test]
fn infinity_constant_in_three_dimensions() {
    // C_∞(x) = 2 / (1 - |x|²) for n = 3.
    let opts = ConstantOptions::default();
    for r in [0.0, 0.25, 0.5, 0.8] {
        let c = c_optimal(&ExponentPair::infinity(), &BallPoint::on_axis(3, r).unwrap(), &opts).unwrap();
        assert!(rel(c.value, 2.0 / (1.0 - r * r)) < 1e-12, "|x| = {r}: {}", c.value);
    }
}

#[test]
fn p_equals_n_origin_value() {
    let pq = ExponentPair::finite(3.0).unwrap();
    let k = k_closed_form(&pq, 0.0, DirectionKind::Any, 3, &SeriesControl::default()).unwrap();
    assert!(rel(k, 0.4) < 1e-14);
}

#[test]
fn moment_example() {
    // ∫ η₁² |η₂| dσ on S² is 1/8.
    assert!(rel(moment_integral(2, 1.0, 3).unwrap(), 0.125) < 1e-14);
    assert_eq!(moment_integral(3, 1.0, 3).unwrap(), 0.0);
}

#[test]
fn regime_boundaries_are_exact() {
    let n = 4;
    let at = |p: f64| ExponentPair::finite(p).unwrap().regime(n);
    assert_eq!(at(3.999_999_999), Regime::Below);
    assert_eq!(at(4.0), Regime::AtN);
    assert_eq!(at(4.000_000_001), Regime::Above);
    assert_eq!(ExponentPair::infinity().regime(n), Regime::Infinity);
    assert_eq!(Regime::Below.maximizing_direction(), DirectionKind::Radial);
    assert_eq!(Regime::Above.maximizing_direction(), DirectionKind::Tangential);
}

#[test]
fn exponent_parsing() {
    assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
    assert_eq!("2.5".parse::<Exponent>().unwrap(), Exponent::Finite(2.5));
    assert!("nan".parse::<Exponent>().is_err());
    assert!(ExponentPair::finite(1.0).is_err());
    assert!(ExponentPair::finite(0.5).is_err());
}

#[test]
fn forced_closed_form_without_one_fails() {
    let opts = ConstantOptions {
        path: Some(EvalPath::ClosedForm),
        ..ConstantOptions::default()
    };
    let pq = ExponentPair::finite(2.0).unwrap();
    assert!(c_at_angle(&pq, 0.5, AngleGamma::reduce(0.6), 3, &opts).is_err());
    assert!(c_at_angle(&pq, 0.5, AngleGamma::RADIAL, 3, &opts).is_ok());
}

#[test]
fn monte_carlo_agrees_with_quadrature() {
    let pq = ExponentPair::finite(2.0).unwrap();
    let g = AngleGamma::reduce(0.6);
    let mc = k_monte_carlo(&pq, 0.4, g, 3, &MonteCarloConfig::default()).unwrap();
    let q = k_disc(&pq, 0.4, g, 3, &QuadratureSpec::default()).unwrap();
    assert!((mc.value - q.value).abs() < 5.0 * mc.err_est, "{} vs {} ± {}", mc.value, q.value, mc.err_est);
}

#[test]
fn optimal_dominates_minimal() {
    let opts = ConstantOptions::default();
    for p in [1.5, 2.0, 6.0] {
        let pq = ExponentPair::finite(p).unwrap();
        let x = BallPoint::on_axis(4, 0.6).unwrap();
        let hi = c_optimal(&pq, &x, &opts).unwrap().value;
        let lo = c_minimal(&pq, &x, &opts).unwrap().value;
        assert!(hi > lo, "p = {p}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugate_exponents(p in 1.01f64..50.0) {
        let q = conjugate_exponent(Exponent::Finite(p)).unwrap();
        prop_assert!((1.0 / p + 1.0 / q - 1.0).abs() < 1e-14);
    }

    #[test]
    fn angle_reduction_lands_in_quarter_turn(g in -20.0f64..20.0) {
        let r = AngleGamma::reduce(g).get();
        prop_assert!((0.0..=PI / 2.0).contains(&r));
        prop_assert!((r - g.cos().abs().acos()).abs() < 1e-9);
    }

    #[test]
    fn angular_integral_is_even_and_pi_periodic(
        a in -2.0f64..3.0, b in 0.2f64..3.0, big_a in 1.0f64..3.0, frac in 0.0f64..0.95, g in 0.0f64..PI,
    ) {
        let spec = QuadratureSpec::default();
        let big_b = frac * big_a;
        let base = integral_I(a, b, big_a, big_b, g, &spec).unwrap().value;
        let neg = integral_I(a, b, big_a, big_b, -g, &spec).unwrap().value;
        let shifted = integral_I(a, b, big_a, big_b, g + PI, &spec).unwrap().value;
        prop_assert!(rel(neg, base) < 1e-10);
        prop_assert!(rel(shifted, base) < 1e-10);
    }

    #[test]
    fn sphere_and_disc_paths_agree(p in 1.2f64..8.0, r in 0.0f64..0.9, g in 0.0f64..PI / 2.0, n in 3usize..6) {
        let spec = QuadratureSpec::default();
        let pq = ExponentPair::finite(p).unwrap();
        let gamma = AngleGamma::reduce(g);
        let s = k_sphere(&pq, r, gamma, n, &spec).unwrap().value;
        let d = k_disc(&pq, r, gamma, n, &spec).unwrap().value;
        prop_assert!(rel(s, d) < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn directional_constant_is_rotation_invariant(
        p in prop::sample::select(vec![1.5, 2.0, 4.0, 7.0]),
        dir in prop::collection::vec(-1.0f64..1.0, 4),
        lv in prop::collection::vec(-1.0f64..1.0, 4),
        w in prop::collection::vec(-1.0f64..1.0, 4),
        r in 0.05f64..0.85,
    ) {
        prop_assume!(dir.iter().map(|a| a * a).sum::<f64>() > 1e-2);
        prop_assume!(lv.iter().map(|a| a * a).sum::<f64>() > 1e-2);
        prop_assume!(w.iter().map(|a| a * a).sum::<f64>() > 1e-2);
        let opts = ConstantOptions::default();
        let pq = ExponentPair::finite(p).unwrap();
        let x: Vec<f64> = unit(&dir).iter().map(|a| a * r).collect();
        let l = unit(&lv);
        let w = unit(&w);
        let direct = c_directional(&pq, &BallPoint::new(x.clone()).unwrap(), &Direction::new(l.clone()).unwrap(), &opts)
            .unwrap();
        let rotated = c_directional(
            &pq,
            &BallPoint::new(reflect(&w, &x)).unwrap(),
            &Direction::new(reflect(&w, &l)).unwrap(),
            &opts,
        )
        .unwrap();
        let cosg: f64 = unit(&x).iter().zip(&l).map(|(a, b)| a * b).sum();
        let by_angle = c_at_angle(&pq, r, AngleGamma::reduce(cosg.clamp(-1.0, 1.0).acos()), 4, &opts).unwrap();
        prop_assert!(rel(rotated.value, direct.value) < 1e-9);
        prop_assert!(rel(by_angle.value, direct.value) < 1e-9);
    }
}
