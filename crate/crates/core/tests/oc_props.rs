use powerbasket::numerics::BetaShape;
use powerbasket::{
    calibrate_lambda, ecd, exact_oc, simulate_oc, DesignSpec, Engine, OcResult, Scenario,
    TrialConfig,
};
use proptest::prelude::*;

const P0: f64 = 0.15;

fn spec() -> impl Strategy<Value = DesignSpec> {
    prop_oneof![
        (0.5f64..3.0, 0.0f64..0.5).prop_map(|(epsilon, tau)| DesignSpec::Fujikawa { epsilon, tau }),
        (-2.0f64..3.0, 0.5f64..3.0).prop_map(|(a, b)| DesignSpec::Cpp { a, b }),
        (-2.0f64..3.0, 0.5f64..3.0, 0.5f64..3.0)
            .prop_map(|(a, b, epsilon_star)| DesignSpec::CppGlobal { a, b, epsilon_star }),
        (-2.0f64..3.0, 0.5f64..3.0, 0.1f64..1.0)
            .prop_map(|(a, b, omega_star)| DesignSpec::CppNex { a, b, omega_star }),
        (-3.0f64..3.0).prop_map(|psi| DesignSpec::Bma { psi }),
    ]
}

fn trial() -> impl Strategy<Value = (TrialConfig, Scenario)> {
    (2usize..=3, 3u32..=10).prop_flat_map(|(k, n)| {
        (
            Just(TrialConfig::uniform(k, n, P0, BetaShape::new(0.5, 0.5).unwrap()).unwrap()),
            proptest::collection::vec(prop_oneof![Just(P0), 0.05f64..0.7], k)
                .prop_map(|rates| Scenario::new("random", rates).unwrap()),
        )
    })
}

fn check_result(res: &OcResult, scenario: &Scenario) -> Result<(), TestCaseError> {
    let identity = ecd(&res.rejection_rates, scenario, P0).unwrap();
    prop_assert!(
        (res.ecd - identity).abs() <= 1e-9,
        "{} vs {identity}",
        res.ecd
    );
    let nulls = scenario.null_baskets(P0);
    let union: f64 = res
        .rejection_rates
        .iter()
        .zip(&nulls)
        .filter(|(_, &n)| n)
        .map(|(r, _)| r)
        .sum();
    match res.fwer {
        Some(f) => {
            prop_assert!(nulls.iter().any(|&n| n));
            prop_assert!(f <= union + 1e-12, "fwer {f} above union bound {union}");
            let max = res
                .rejection_rates
                .iter()
                .zip(&nulls)
                .filter(|(_, &n)| n)
                .map(|(r, _)| *r)
                .fold(0.0, f64::max);
            prop_assert!(f >= max - 1e-12);
        }
        None => prop_assert!(nulls.iter().all(|&n| !n)),
    }
    for r in res.rejection_rates.iter().chain(&res.mean_posterior_means) {
        prop_assert!((0.0..=1.0).contains(r));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_results_are_consistent((config, scenario) in trial(), spec in spec(), lambda in 0.6f64..0.99) {
        // exact_oc fails when the outcome probabilities do not sum to one.
        let res = exact_oc(&config, &spec, &scenario, lambda).unwrap();
        check_result(&res, &scenario)?;
    }

    #[test]
    fn simulated_results_are_consistent((config, scenario) in trial(), spec in spec(), lambda in 0.6f64..0.99, seed in any::<u64>()) {
        let res = simulate_oc(&config, &spec, &scenario, lambda, 500, seed).unwrap();
        check_result(&res, &scenario)?;
        let again = simulate_oc(&config, &spec, &scenario, lambda, 500, seed).unwrap();
        prop_assert_eq!(res, again);
    }

    #[test]
    fn null_fwer_falls_with_threshold((config, _) in trial(), spec in spec(), lo in 0.6f64..0.98, gap in 0.0f64..0.02) {
        let null = Scenario::global_null(&config);
        let f = |l: f64| exact_oc(&config, &spec, &null, l).unwrap().fwer.unwrap();
        prop_assert!(f(lo + gap) <= f(lo));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn larger_alpha_never_raises_threshold((config, _) in trial(), spec in spec(), alpha in 0.01f64..0.2, extra in 0.0f64..0.1) {
        let tight = calibrate_lambda(&config, &spec, alpha, Engine::Exact);
        let loose = calibrate_lambda(&config, &spec, alpha + extra, Engine::Exact);
        if let (Ok(t), Ok(l)) = (&tight, &loose) {
            prop_assert!(l.lambda <= t.lambda, "{} > {}", l.lambda, t.lambda);
        }
        if tight.is_ok() {
            prop_assert!(loose.is_ok());
        }
    }

    #[test]
    fn calibration_is_tight((config, _) in trial(), spec in spec(), alpha in 0.02f64..0.2) {
        if let Ok(cal) = calibrate_lambda(&config, &spec, alpha, Engine::Exact) {
            let null = Scenario::global_null(&config);
            let at = exact_oc(&config, &spec, &null, cal.lambda).unwrap().fwer.unwrap();
            prop_assert!(at <= alpha);
            prop_assert_eq!(at, cal.achieved_fwer);
            let below = cal.lambda - 1e-5;
            if below >= 0.5 {
                prop_assert!(exact_oc(&config, &spec, &null, below).unwrap().fwer.unwrap() > alpha);
            }
        }
    }
}

#[test]
fn oversized_exact_runs_report_capacity() {
    let config = TrialConfig::uniform(8, 200, P0, BetaShape::new(1.0, 1.0).unwrap()).unwrap();
    let spec = DesignSpec::Cpp { a: 2.0, b: 1.5 };
    let null = Scenario::global_null(&config);
    let err = calibrate_lambda(&config, &spec, 0.05, Engine::Exact).unwrap_err();
    assert!(matches!(err, powerbasket::Error::Capacity(_)), "{err}");
    let err = exact_oc(&config, &spec, &null, 0.99).unwrap_err();
    assert!(matches!(err, powerbasket::Error::Capacity(_)), "{err}");
}
