//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when
//! any criterion fails.

use std::time::Instant;

use powerbasket::numerics::{
    beta_log_pdf, beta_tail, generalized_jsd, integrate_interval, ln_choose, log_beta_binomial_pmf,
    BetaShape, CompensatedSum,
};
use powerbasket::oc::{Method, SimulatedData};
use powerbasket::posterior::{decide, fujikawa_posterior, power_prior_posterior};
use powerbasket::presets::{self as p, published};
use powerbasket::tune::{run_design, DesignRun};
use powerbasket::weights::{effective_weight_matrix, heterogeneity_h, pairwise_jsd};
use powerbasket::{
    calibrate_with, CalibrationTarget, DesignContext, DesignEvaluator, DesignSpec, Engine,
    EvaluationSettings, Family, OcResult, ResponseVector, Scenario, SharedData, TrialConfig,
};

/// Absolute tolerance on exactly computed published cells.
const EXACT_TOL: f64 = 0.003;
/// Monte Carlo standard errors allowed between simulated and published cells.
const MC_SES: f64 = 3.0;
/// Half a unit in the third decimal of a published value.
const ROUNDING: f64 = 0.0005;
const ECD_IDENTITY_TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(failures: Vec<String>, ok: impl Into<String>) -> Self {
        if failures.is_empty() {
            Self {
                pass: true,
                detail: ok.into(),
            }
        } else {
            let shown = failures.len().min(12);
            let mut detail = failures[..shown].join("; ");
            if failures.len() > shown {
                detail.push_str(&format!("; ... {} more", failures.len() - shown));
            }
            Self {
                pass: false,
                detail,
            }
        }
    }
}

fn paper_settings(engine: Engine) -> EvaluationSettings {
    let mut s = EvaluationSettings::new(p::ALPHA, engine);
    s.target = s.target.with_lambda_digits(p::LAMBDA_DIGITS);
    s
}

fn simulated() -> Engine {
    Engine::Simulated {
        n_sims: p::N_SIMS,
        seed: p::SEED,
    }
}

fn run_preset(family: Family, engine: Engine) -> DesignRun {
    let config = p::trial_for(family);
    let scenarios = p::scenarios();
    let data = SharedData::generate(&config, &scenarios, engine).expect("data");
    run_design(
        &DesignContext::new(config),
        p::design(family),
        &scenarios,
        &paper_settings(engine),
        &data,
    )
    .expect("design run")
}

fn ecd_identity(r: &OcResult, scenario: &Scenario, p0: f64) -> f64 {
    let direct: f64 = r
        .rejection_rates
        .iter()
        .zip(&scenario.true_rates)
        .map(|(&x, &t)| if t > p0 { x } else { 1.0 - x })
        .sum();
    (direct - r.ecd).abs()
}

/// Exact calibrated operating characteristics of the four pairwise designs
/// against the published rejection rates, FWERs and ECDs.
fn criterion_1(runs: &[(Family, DesignRun)]) -> Outcome {
    let mut bad = Vec::new();
    let mut cells = 0;
    for (family, run) in runs {
        let ecds = published::ecd(*family);
        for (i, r) in run.results.iter().enumerate() {
            let want = published::rejection(&r.scenario, *family);
            let mut pairs: Vec<(String, f64, f64)> = (0..4)
                .map(|k| {
                    (
                        format!("basket {}", k + 1),
                        r.rejection_rates[k],
                        want.rates[k],
                    )
                })
                .collect();
            match (r.fwer, want.fwer) {
                (Some(g), Some(e)) => pairs.push(("FWER".into(), g, e)),
                (None, None) => {}
                _ => bad.push(format!("{family} {}: FWER presence differs", r.scenario)),
            }
            pairs.push(("ECD".into(), r.ecd, ecds[i]));
            for (what, got, exp) in pairs {
                cells += 1;
                if (got - exp).abs() > EXACT_TOL {
                    bad.push(format!(
                        "{family} {} {what}: {got:.4} vs {exp:.3}",
                        r.scenario
                    ));
                }
            }
        }
    }
    Outcome::new(bad, format!("{cells} cells within {EXACT_TOL}"))
}

fn criterion_2(all: &[(Family, DesignRun)]) -> Outcome {
    let scenarios = p::scenarios();
    let mut bad = Vec::new();
    let mut n = 0;
    for (family, run) in all {
        for (r, s) in run.results.iter().zip(&scenarios) {
            n += 1;
            let d = ecd_identity(r, s, p::NULL_RATE);
            if d > ECD_IDENTITY_TOL {
                bad.push(format!("{family} {}: off by {d:e}", s.name));
            }
        }
    }
    let cpp = &all
        .iter()
        .find(|(f, _)| *f == Family::Cpp)
        .expect("CPP run")
        .1
        .results[0];
    let spot = 4.0 - cpp.rejection_rates.iter().sum::<f64>();
    if (cpp.ecd - spot).abs() > ECD_IDENTITY_TOL || (cpp.ecd - 3.916).abs() > EXACT_TOL {
        bad.push(format!("CPP Global Null ECD {:.4}", cpp.ecd));
    }
    Outcome::new(
        bad,
        format!(
            "{n} results satisfy the identity; CPP Global Null ECD {:.3}",
            cpp.ecd
        ),
    )
}

fn criterion_3() -> Outcome {
    let config = p::trial();
    let ctx = DesignContext::new(config.clone());
    let null = Scenario::global_null(&config);
    let mut bad = Vec::new();
    let mut lambdas = Vec::new();
    for family in p::EXACT_FAMILIES {
        let ev = DesignEvaluator::new(ctx.clone(), p::design(family)).expect("evaluator");
        let cal = calibrate_with(&ev, CalibrationTarget::new(p::ALPHA), Engine::Exact, None)
            .expect("calibration");
        let at = ev
            .exact_oc(&null, cal.lambda)
            .expect("oc")
            .fwer
            .expect("null FWER");
        let below = ev
            .exact_oc(&null, cal.lambda - 1e-5)
            .expect("oc")
            .fwer
            .expect("null FWER");
        if at > p::ALPHA || (cal.lambda > powerbasket::calibrate::LAMBDA_MIN && below <= p::ALPHA) {
            bad.push(format!(
                "{family}: FWER {at} at {}, {below} just below",
                cal.lambda
            ));
        }
        let mut last = f64::INFINITY;
        for i in 0..100 {
            let lambda = 0.9 + 0.099 * i as f64 / 99.0;
            let f = ev
                .exact_oc(&null, lambda)
                .expect("oc")
                .fwer
                .expect("null FWER");
            if f > last {
                bad.push(format!("{family}: FWER rises at {lambda}"));
            }
            last = f;
        }
        lambdas.push(format!("{family} {:.6}", cal.lambda));
    }
    Outcome::new(
        bad,
        format!(
            "tight at 1e-5 and monotone on 100 points ({})",
            lambdas.join(", ")
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut bad = Vec::new();
    let mut found = Vec::new();
    for family in p::EXACT_FAMILIES {
        let config = p::trial_for(family);
        let scenarios = p::scenarios();
        let data = SharedData::generate(&config, &scenarios, Engine::Exact).expect("data");
        let report = powerbasket::grid_search_with(
            &DesignContext::new(config),
            &p::grid(family),
            &scenarios,
            &paper_settings(Engine::Exact),
            &data,
        )
        .expect("grid search");
        let winner = report.winner().expect("a winner");
        let expected = published::winner(family).expect("published winner");
        found.push(format!("{}", winner.spec));
        if winner.spec != expected {
            let theirs = report
                .records
                .iter()
                .find(|r| r.spec == expected)
                .and_then(|r| r.mean_ecd)
                .unwrap_or(f64::NEG_INFINITY);
            if winner.mean_ecd.expect("mean") <= theirs {
                bad.push(format!(
                    "{family}: winner {} does not beat {expected}",
                    winner.spec
                ));
            }
        }
    }
    Outcome::new(bad, format!("winners {}", found.join(", ")))
}

fn criterion_5(runs: &[(Family, DesignRun)]) -> Outcome {
    let mut bad = Vec::new();
    let mut cells = 0;
    for (family, run) in runs {
        let ecds = published::ecd(*family);
        for (i, r) in run.results.iter().enumerate() {
            let se = r.mc_se.as_ref().expect("standard errors");
            let want = published::rejection(&r.scenario, *family);
            let mut check = |what: String, got: f64, exp: f64, se: f64| {
                cells += 1;
                if (got - exp).abs() > MC_SES * se + ROUNDING {
                    bad.push(format!(
                        "{family} {} {what}: {got:.3} vs {exp:.3} (se {se:.4})",
                        r.scenario
                    ));
                }
            };
            for k in 0..4 {
                check(
                    format!("basket {}", k + 1),
                    r.rejection_rates[k],
                    want.rates[k],
                    se.rejection_rates[k],
                );
            }
            if let (Some(g), Some(e), Some(s)) = (r.fwer, want.fwer, se.fwer) {
                check("FWER".into(), g, e, s);
            }
            check("ECD".into(), r.ecd, ecds[i], se.ecd);
        }
    }
    // Model averaging: exact against simulated on a small trial.
    let config = TrialConfig::uniform(3, 10, 0.2, BetaShape::uniform()).expect("config");
    let ev = DesignEvaluator::new(
        DesignContext::new(config.clone()),
        DesignSpec::Bma { psi: -2.0 },
    )
    .expect("evaluator");
    let lambda = calibrate_with(&ev, CalibrationTarget::new(p::ALPHA), Engine::Exact, None)
        .expect("calibration")
        .lambda;
    for rates in [
        [0.2, 0.2, 0.2],
        [0.5, 0.5, 0.5],
        [0.2, 0.35, 0.5],
        [0.2, 0.2, 0.5],
    ] {
        let s = Scenario::new(format!("{rates:?}"), rates.to_vec()).expect("scenario");
        let exact = ev.exact_oc(&s, lambda).expect("exact");
        let data = SimulatedData::generate(&config, &s, p::N_SIMS, p::SEED).expect("data");
        let sim = ev.simulated_oc(&data, lambda).expect("simulated");
        let se = sim.mc_se.as_ref().expect("standard errors");
        for k in 0..3 {
            cells += 1;
            if (exact.rejection_rates[k] - sim.rejection_rates[k]).abs()
                > MC_SES * se.rejection_rates[k]
            {
                bad.push(format!(
                    "BMA K=3 {}: basket {} exact {:.4} sim {:.4}",
                    s.name,
                    k + 1,
                    exact.rejection_rates[k],
                    sim.rejection_rates[k]
                ));
            }
        }
        cells += 1;
        if (exact.ecd - sim.ecd).abs() > MC_SES * se.ecd {
            bad.push(format!(
                "BMA K=3 {}: ECD exact {:.4} sim {:.4}",
                s.name, exact.ecd, sim.ecd
            ));
        }
    }
    Outcome::new(bad, format!("{cells} cells within {MC_SES} MC SE"))
}

/// Rejection rates recomputed outcome by outcome through the public weight,
/// posterior and decision functions, with no caching.
fn naive_rejection_rates(
    config: &TrialConfig,
    spec: DesignSpec,
    rates: &[f64],
    lambda: f64,
) -> Vec<f64> {
    let n = config.sample_sizes();
    let pmf = |x: u32, m: u32, p: f64| {
        (ln_choose(m, x) + x as f64 * p.ln() + (m - x) as f64 * (-p).ln_1p()).exp()
    };
    let mut out = [CompensatedSum::default(); 2];
    for r0 in 0..=n[0] {
        for r1 in 0..=n[1] {
            let r = ResponseVector::new(vec![r0, r1]);
            let w = effective_weight_matrix(config, &r, &spec).expect("weights");
            let post = match spec.family() {
                Family::Fujikawa => fujikawa_posterior(config, &r, &w),
                _ => power_prior_posterior(config, &r, &w),
            }
            .expect("posterior");
            let d = decide(
                &post,
                config.null_rate(),
                lambda,
                spec.family().decision_rule(),
            )
            .expect("decision");
            let prob = 1.0 * pmf(r0, n[0], rates[0]) * pmf(r1, n[1], rates[1]);
            for k in 0..2 {
                if d.rejects[k] {
                    out[k].add(prob);
                }
            }
        }
    }
    out.iter().map(|s| s.value().clamp(0.0, 1.0)).collect()
}

fn criterion_6() -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    let u = BetaShape::uniform();
    let configs = [
        TrialConfig::new(vec![3, 5], 0.2, vec![u, u]).expect("config"),
        TrialConfig::new(vec![5, 5], 0.2, vec![u, u]).expect("config"),
        TrialConfig::new(
            vec![3, 3],
            0.3,
            vec![u, BetaShape::new(0.5, 1.5).expect("shape")],
        )
        .expect("config"),
    ];
    let specs = [
        DesignSpec::Cpp { a: 2.0, b: 1.5 },
        DesignSpec::Cpp { a: 0.5, b: 3.0 },
        DesignSpec::Fujikawa {
            epsilon: 1.5,
            tau: 0.0,
        },
        DesignSpec::Fujikawa {
            epsilon: 3.0,
            tau: 0.3,
        },
    ];
    for config in &configs {
        let ctx = DesignContext::new(config.clone());
        for spec in specs {
            let ev = DesignEvaluator::new(ctx.clone(), spec).expect("evaluator");
            for rates in [[0.2, 0.2], [0.2, 0.5], [0.6, 0.35]] {
                let s = Scenario::new("s", rates.to_vec()).expect("scenario");
                for lambda in [0.5, 0.7, 0.85, 0.95] {
                    n += 1;
                    let got = ev.exact_oc(&s, lambda).expect("oc").rejection_rates;
                    let want = naive_rejection_rates(config, spec, &rates, lambda);
                    if got
                        .iter()
                        .zip(&want)
                        .any(|(a, b)| a.to_bits() != b.to_bits())
                    {
                        bad.push(format!(
                            "{spec} n={:?} {rates:?} λ={lambda}: {got:?} vs {want:?}",
                            config.sample_sizes()
                        ));
                    }
                }
            }
        }
    }
    Outcome::new(bad, format!("{n} cases bit-identical"))
}

fn criterion_7() -> Outcome {
    let mut bad = Vec::new();
    let shapes: Vec<BetaShape> = [
        (0.5, 0.5),
        (1.0, 1.0),
        (2.0, 3.0),
        (0.3, 7.0),
        (11.0, 11.0),
        (4.5, 0.8),
        (25.0, 60.0),
    ]
    .iter()
    .map(|&(a, b)| BetaShape::new(a, b).expect("shape"))
    .collect();
    for s in &shapes {
        for n in [1u32, 5, 20, 60] {
            let total: f64 = (0..=n)
                .map(|r| log_beta_binomial_pmf(r, n, s).expect("pmf").exp())
                .sum();
            if (total - 1.0).abs() > 1e-10 {
                bad.push(format!("beta-binomial {s:?} n={n} sums to {total}"));
            }
        }
        for p0 in [0.05, 0.15, 0.5, 0.85] {
            let tail = beta_tail(p0, s).expect("tail");
            // x = 1 - (1 - p0)(1 - u)^m with m = 1/min(b, 1) removes the pole at x = 1.
            let m = 1.0 / s.beta().min(1.0);
            let w = 1.0 - p0;
            let integrand = |u: f64| {
                let v = 1.0 - u;
                let x = 1.0 - w * v.powf(m);
                beta_log_pdf(x, s)
                    .map(|l| (l + (w * m).ln() + (m - 1.0) * v.ln()).exp())
                    .unwrap_or(0.0)
            };
            match integrate_interval(integrand, 0.0, 1.0, 1e-12) {
                Ok(quad) if (tail - quad).abs() <= 1e-10 => {}
                Ok(quad) => bad.push(format!("tail {s:?} at {p0}: {tail} vs quadrature {quad}")),
                Err(e) => bad.push(format!("tail {s:?} at {p0}: quadrature failed: {e}")),
            }
        }
    }
    for a in &shapes {
        for b in &shapes {
            let j = pairwise_jsd(a, b).expect("jsd");
            let identical = a == b;
            if !(-1e-8..=1.0).contains(&j)
                || (identical && j.abs() > 1e-8)
                || (!identical && j <= 1e-8)
            {
                bad.push(format!("JSD {a:?} {b:?} = {j}"));
            }
        }
    }
    let all = generalized_jsd(&shapes[..4], 4.0).expect("jsd");
    if !(0.0..=1.0).contains(&all) {
        bad.push(format!("generalised JSD {all}"));
    }
    let u = BetaShape::uniform();
    let h = |n: u32, r: Vec<u32>| {
        let c = TrialConfig::new(vec![n; r.len()], 0.15, vec![u; r.len()]).expect("config");
        heterogeneity_h(&c, &ResponseVector::new(r), 1.0).expect("h")
    };
    for (got, want, what) in [
        (h(20, vec![7, 7, 7, 7]), 1.0, "equal rates"),
        (h(20, vec![0, 10, 20]), 0.0, "K=3 equidistant"),
        (h(3, vec![0, 1, 2, 3]), 0.0, "K=4 equidistant"),
    ] {
        if got != want {
            bad.push(format!("h for {what} is {got}"));
        }
    }
    Outcome::new(bad, "normalisation, tails, JSD bounds and h anchors hold")
}

fn simulated_table(threads: usize) -> String {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("pool");
    pool.install(|| {
        let mut out = String::new();
        for family in [Family::Bma, Family::JsdGlobal, Family::Cpp] {
            let config = p::trial_for(family);
            let scenarios = p::scenarios();
            let engine = Engine::Simulated {
                n_sims: 3000,
                seed: p::SEED,
            };
            let data = SharedData::generate(&config, &scenarios, engine).expect("data");
            let run = run_design(
                &DesignContext::new(config),
                p::design(family),
                &scenarios,
                &paper_settings(engine),
                &data,
            )
            .expect("run");
            out.push_str(&serde_json::to_string(&run).expect("json"));
            out.push('\n');
        }
        out
    })
}

fn criterion_8() -> Outcome {
    let a = simulated_table(1);
    let b = simulated_table(1);
    let c = simulated_table(4);
    let mut bad = Vec::new();
    if a != b {
        bad.push("repeat run differs".to_string());
    }
    if a != c {
        bad.push("four workers differ from one".to_string());
    }
    Outcome::new(
        bad,
        format!("{} bytes identical across runs and worker counts", a.len()),
    )
}

fn main() {
    let start = Instant::now();
    let exact: Vec<(Family, DesignRun)> = p::EXACT_FAMILIES
        .iter()
        .map(|&f| (f, run_preset(f, Engine::Exact)))
        .collect();
    let sim: Vec<(Family, DesignRun)> = p::SIMULATED_FAMILIES
        .iter()
        .map(|&f| (f, run_preset(f, simulated())))
        .collect();
    assert!(sim
        .iter()
        .all(|(_, r)| r.results.iter().all(|o| o.method == Method::Simulated)));
    let all: Vec<(Family, DesignRun)> = exact.iter().chain(&sim).cloned().collect();

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        (
            "exact reproduction of published operating characteristics",
            Box::new(|| criterion_1(&exact)),
        ),
        ("ECD cross-footing identity", Box::new(|| criterion_2(&all))),
        ("calibration soundness", Box::new(criterion_3)),
        ("tuning winners", Box::new(criterion_4)),
        ("simulated designs", Box::new(|| criterion_5(&sim))),
        ("oracle equivalence", Box::new(criterion_6)),
        ("numerics properties", Box::new(criterion_7)),
        ("determinism", Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name} [{:.1}s] {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.0}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
