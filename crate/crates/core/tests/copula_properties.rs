use copula_transport::copula::{
    empirical_copula, integrate_against_shuffle, validate_copula, Copula, FrechetLower, FrechetUpper, Orientation,
    ShuffleOfM,
};
use copula_transport::grid::{bound, GridSpec, Mode};
use copula_transport::{parse_cost, registry_cost, Sense};
use proptest::prelude::*;

fn shuffle_strategy() -> impl Strategy<Value = ShuffleOfM> {
    (1usize..=6).prop_flat_map(|n| {
        (
            prop::collection::vec(1u32..=20, n),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(|(widths, pi, flips)| {
                let total: u32 = widths.iter().sum();
                let mut s = vec![0.0];
                let mut acc = 0;
                for w in &widths {
                    acc += w;
                    s.push(acc as f64 / total as f64);
                }
                let omega = flips
                    .into_iter()
                    .map(|f| if f { Orientation::Antidiagonal } else { Orientation::Diagonal })
                    .collect();
                ShuffleOfM::new(s, pi, omega).unwrap()
            })
    })
}

/// Mass of the shuffle measure in `[0,x]×[0,y]`, by fine sampling of its support.
fn cdf_by_sampling(s: &ShuffleOfM, x: f64, y: f64, samples: usize) -> f64 {
    let hits = (0..samples)
        .filter(|&k| {
            let u = (k as f64 + 0.5) / samples as f64;
            u <= x && s.support_map(u) <= y
        })
        .count();
    hits as f64 / samples as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn shuffles_are_copulas(s in shuffle_strategy()) {
        let report = validate_copula(&s, 64);
        prop_assert!(report.pass, "{:?}", report.violation);
    }

    #[test]
    fn shuffle_cdf_matches_its_support(s in shuffle_strategy(), x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        prop_assert!((s.cdf(x, y) - cdf_by_sampling(&s, x, y, 20_000)).abs() < 2e-4);
    }

    #[test]
    fn integrals_are_linear(s in shuffle_strategy(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let f = registry_cost("sincos").unwrap();
        let g = registry_cost("product").unwrap();
        let combo = f.linear_combination(a, &g, b);
        let lhs = integrate_against_shuffle(&combo, &s, 16).unwrap();
        let rhs = a * integrate_against_shuffle(&f, &s, 16).unwrap() + b * integrate_against_shuffle(&g, &s, 16).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn uniform_margins_fix_additive_integrals(s in shuffle_strategy()) {
        let v = integrate_against_shuffle(&parse_cost("x + y").unwrap(), &s, 8).unwrap();
        prop_assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn integrals_sit_between_frechet_extremes(s in shuffle_strategy()) {
        let v = integrate_against_shuffle(&registry_cost("product").unwrap(), &s, 16).unwrap();
        prop_assert!(v >= 1.0 / 6.0 - 1e-12 && v <= 1.0 / 3.0 + 1e-12);
    }
}

#[test]
fn frechet_bounds_are_copulas() {
    assert!(validate_copula(&FrechetUpper, 64).pass);
    assert!(validate_copula(&FrechetLower, 64).pass);
    let product = |x: f64, y: f64| x * y;
    assert!(validate_copula(&product, 64).pass);
}

#[test]
fn grid_optimum_as_shuffle_reproduces_its_value() {
    for name in ["sincos", "sinsin", "product"] {
        let c = registry_cost(name).unwrap();
        let b = bound(&c, &GridSpec::new(6, Mode::Midpoint), Sense::Max).unwrap();
        let shuffle = ShuffleOfM::from_coupling(&b.coupling);
        let exact = integrate_against_shuffle(&c, &shuffle, 8).unwrap();
        assert!((exact - b.value).abs() < 1e-2, "{}: {} vs {}", name, exact, b.value);
        assert!(validate_copula(&shuffle, 64).pass);
    }
}

#[test]
fn empirical_copula_of_shuffle_samples_approaches_it() {
    let s = ShuffleOfM::new(vec![0.0, 0.4, 1.0], vec![1, 0], vec![Orientation::Antidiagonal, Orientation::Diagonal]).unwrap();
    let n = 4096;
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let u = (k as f64 + 0.5) / n as f64;
            (u, s.support_map(u).min(1.0 - 1e-12))
        })
        .collect();
    let emp = empirical_copula(&pts, 8).unwrap();
    for a in 0..=8 {
        for b in 0..=8 {
            let (x, y) = (a as f64 / 8.0, b as f64 / 8.0);
            assert!((emp.at_node(a, b) - s.cdf(x, y)).abs() < 2.0 / n as f64 + 1e-12, "({}, {})", x, y);
        }
    }
}
