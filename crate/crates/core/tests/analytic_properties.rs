use std::f64::consts::PI;

use copula_transport::analytic::{
    certify_uckelmann, h_alpha, solve_monotone, solve_uckelmann, solve_uckelmann_unchecked, Branch, PhiSpec,
    UckelmannSolution,
};
use copula_transport::copula::{integrate_against_shuffle, Orientation, ShuffleOfM};
use copula_transport::grid::{bound, GridSpec, Mode};
use copula_transport::{parse_cost, registry_cost, Error, Sense};

/// Newton's method on `sin 2πβ − sin πβ − βπ cos πβ` with its exact derivative.
fn sine_root_by_newton() -> f64 {
    let g = |b: f64| (2.0 * PI * b).sin() - (PI * b).sin() - b * PI * (PI * b).cos();
    let dg = |b: f64| 2.0 * PI * (2.0 * PI * b).cos() - 2.0 * PI * (PI * b).cos() + b * PI * PI * (PI * b).sin();
    let mut b = 0.75;
    for _ in 0..50 {
        b -= g(b) / dg(b);
    }
    b
}

/// `β sin πβ + (cos 2πβ − 1) / 2π`, the shuffle objective in closed form.
fn sine_value(beta: f64) -> f64 {
    beta * (PI * beta).sin() + ((2.0 * PI * beta).cos() - 1.0) / (2.0 * PI)
}

#[test]
fn sine_root_and_value_match_independent_forms() {
    let sol = solve_uckelmann(&PhiSpec::sine(), 1e-15).unwrap();
    let beta = sol.beta.unwrap();
    assert_eq!(sol.branch, Branch::Shuffle);
    assert!((beta - sine_root_by_newton()).abs() < 1e-13);
    assert!((beta - 0.7541996008265638).abs() < 1e-12);
    assert!((sol.value - sine_value(beta)).abs() < 1e-12);
}

#[test]
fn solution_value_equals_integral_over_its_shuffle() {
    let sol = solve_uckelmann(&PhiSpec::sine(), 1e-15).unwrap();
    let beta = sol.beta.unwrap();
    let shuffle = ShuffleOfM::new(vec![0.0, beta, 1.0], vec![0, 1], vec![Orientation::Antidiagonal, Orientation::Diagonal]).unwrap();
    for x in [0.0, 0.3, 0.7, 0.8, 0.99] {
        assert!((shuffle.support_map(x) - sol.support_map(x)).abs() < 1e-15);
    }
    let v = integrate_against_shuffle(&registry_cost("sin_sum").unwrap(), &shuffle, 48).unwrap();
    assert!((v - sol.value).abs() < 1e-12);
}

#[test]
fn one_parameter_family_peaks_at_beta() {
    let c = registry_cost("sin_sum").unwrap();
    let sol = solve_uckelmann(&PhiSpec::sine(), 1e-15).unwrap();
    let beta = sol.beta.unwrap();
    assert!((h_alpha(&c, beta).unwrap() - sol.value).abs() < 1e-12);
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..=1000 {
        let a = k as f64 / 1000.0;
        let h = h_alpha(&c, a).unwrap();
        assert!(h <= sol.value + 1e-12, "H({}) = {} exceeds {}", a, h, sol.value);
        if h > best.1 {
            best = (a, h);
        }
    }
    assert!((best.0 - beta).abs() <= 1e-3);
}

#[test]
fn grid_bound_approaches_the_analytic_optimum() {
    let sol = solve_uckelmann(&PhiSpec::sine(), 1e-15).unwrap();
    let c = registry_cost("sin_sum").unwrap();
    let mut last_gap = f64::INFINITY;
    for n in [4, 6, 8] {
        let b = bound(&c, &GridSpec::new(n, Mode::Midpoint), Sense::Max).unwrap();
        let gap = (b.value - sol.value).abs();
        assert!(gap < last_gap);
        last_gap = gap;
    }
    assert!(last_gap < 5e-3);
}

#[test]
fn certificate_passes_and_detects_a_wrong_beta() {
    let spec = PhiSpec::sine();
    let sol = solve_uckelmann(&spec, 1e-15).unwrap();
    let report = certify_uckelmann(&spec, &sol, 256).unwrap();
    assert!(report.pass, "{:?}", report.violations);
    assert!(report.worst_diagonal_gap < 1e-12);

    let shifted = UckelmannSolution {
        beta: Some(sol.beta.unwrap() + 0.05),
        ..sol
    };
    let bad = certify_uckelmann(&spec, &shifted, 256).unwrap();
    assert!(!bad.pass);
    // The contact condition holds for every beta; the inequality is what fails.
    assert_eq!(bad.diagonal_violations, 0);
    assert!(bad.inequality_violations > 0);
    assert!(bad.violations.len() <= 10);
}

#[test]
fn derivative_of_parsed_phi_matches_exact() {
    let parsed = PhiSpec::parse("sin(pi*z)", 1.0).unwrap();
    let exact = PhiSpec::sine();
    assert!(!parsed.has_exact_derivative());
    for k in 0..=40 {
        let z = 0.05 * k as f64;
        assert!((parsed.derivative(z) - exact.derivative(z)).abs() < 1e-8, "z = {}", z);
    }
    let beta = solve_uckelmann(&parsed, 1e-15).unwrap().beta.unwrap();
    assert!((beta - 0.7541996008265638).abs() < 1e-9);
}

#[test]
fn perturbed_sine_family() {
    // sin(πz) + a z² has φ″(0) = 2a > 0, so for a > 0 it is not concave on
    // [0, k]. The checked solver refuses it, and the unchecked shuffle is
    // indeed not certifiable.
    for a in [0.0, 0.05, 0.1] {
        let text = format!("sin(pi*z) + {}*z^2", a);
        let spec = PhiSpec::parse(&text, 1.0).unwrap();
        let k = spec.locate_inflection(0.5, 1.5).unwrap();
        let spec = spec.with_inflection(k);
        let sol = solve_uckelmann_unchecked(&spec, 1e-14).unwrap();
        assert_eq!(sol.branch, Branch::Shuffle);
        let h = h_alpha(&spec.to_cost(), sol.beta.unwrap()).unwrap();
        assert!((h - sol.value).abs() < 1e-9);
        let report = certify_uckelmann(&spec, &sol, 128).unwrap();
        match solve_uckelmann(&spec, 1e-14) {
            Ok(checked) => {
                assert_eq!(a, 0.0);
                assert_eq!(checked, sol);
                assert!(report.pass, "a = {}: {:?}", a, report.violations);
            }
            Err(Error::InvalidPhi(_)) => {
                assert!(a > 0.0);
                assert!(!report.pass);
            }
            Err(e) => panic!("a = {}: {}", a, e),
        }
    }
}

#[test]
fn invalid_phi_is_rejected() {
    let concave = PhiSpec::parse("-(z-1)^2", 1.0).unwrap();
    assert!(matches!(solve_uckelmann(&concave, 1e-12), Err(Error::InvalidPhi(_))));
    let out_of_range = PhiSpec::parse("(z-1)^3", 2.5).unwrap();
    assert!(matches!(solve_uckelmann(&out_of_range, 1e-12), Err(Error::InvalidPhi(_))));
}

#[test]
fn antidiagonal_branch_value_is_phi_of_one() {
    let spec = PhiSpec::parse("(z-1.9)^3", 1.9).unwrap();
    let sol = solve_uckelmann(&spec, 1e-14).unwrap();
    assert_eq!(sol.branch, Branch::Antidiagonal);
    assert_eq!(sol.beta, None);
    assert!((sol.value - spec.phi(1.0)).abs() < 1e-15);
    let anti = integrate_against_shuffle(&spec.to_cost(), &ShuffleOfM::antidiagonal(), 8).unwrap();
    assert!((anti - sol.value).abs() < 1e-12);
    assert!(certify_uckelmann(&spec, &sol, 16).is_err());
}

#[test]
fn monotone_costs() {
    let product = registry_cost("product").unwrap();
    assert!((solve_monotone(&product, Sense::Max, 32).unwrap().value - 1.0 / 3.0).abs() < 1e-10);
    assert!((solve_monotone(&product, Sense::Min, 32).unwrap().value - 1.0 / 6.0).abs() < 1e-10);
    // ∫ e^{x²} and ∫ e^{x(1−x)} by independent fine midpoint sums.
    let c = parse_cost("exp(x*y)").unwrap();
    let n = 200_000;
    let mid = |f: &dyn Fn(f64) -> f64| (0..n).map(|k| f((k as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64;
    let max = solve_monotone(&c, Sense::Max, 32).unwrap().value;
    let min = solve_monotone(&c, Sense::Min, 32).unwrap().value;
    assert!((max - mid(&|x| (x * x).exp())).abs() < 1e-9);
    assert!((min - mid(&|x| (x * (1.0 - x)).exp())).abs() < 1e-9);
    assert!(matches!(
        solve_monotone(&registry_cost("sincos").unwrap(), Sense::Max, 32),
        Err(Error::CrossDerivative { .. })
    ));
}
