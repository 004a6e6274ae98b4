use powerbasket::numerics::BetaShape;
use powerbasket::{grid_search, Engine, Family, GridAxis, Scenario, TrialConfig, TuningGrid};

fn setup() -> (TrialConfig, Vec<Scenario>) {
    let config = TrialConfig::uniform(3, 10, 0.15, BetaShape::uniform()).unwrap();
    let scenarios = vec![
        Scenario::new("Null", vec![0.15; 3]).unwrap(),
        Scenario::new("Alt", vec![0.45; 3]).unwrap(),
        Scenario::new("Mixed", vec![0.15, 0.3, 0.45]).unwrap(),
    ];
    (config, scenarios)
}

fn cpp_grid() -> TuningGrid {
    TuningGrid::new(
        Family::Cpp,
        vec![
            GridAxis::new("a", vec![-1.0, 0.5, 2.0]),
            GridAxis::new("b", vec![0.5, 1.5, 3.0]),
        ],
    )
    .unwrap()
}

#[test]
fn reruns_are_identical() {
    let (config, scenarios) = setup();
    for engine in [
        Engine::Exact,
        Engine::Simulated {
            n_sims: 2000,
            seed: 7,
        },
    ] {
        let first = grid_search(&config, &cpp_grid(), &scenarios, 0.05, engine).unwrap();
        let second = grid_search(&config, &cpp_grid(), &scenarios, 0.05, engine).unwrap();
        assert_eq!(first, second);
        assert_eq!(
            serde_json::to_string(&first).unwrap(),
            serde_json::to_string(&second).unwrap()
        );
    }
}

#[test]
fn mean_ecd_recomputes_from_results() {
    let (config, scenarios) = setup();
    let report = grid_search(&config, &cpp_grid(), &scenarios, 0.05, Engine::Exact).unwrap();
    let winner = report.winner().expect("winner");
    for record in &report.records {
        let mean = record.results.iter().map(|r| r.ecd).sum::<f64>() / record.results.len() as f64;
        assert!((record.mean_ecd.unwrap() - mean).abs() < 1e-9);
        assert!(record.mean_ecd.unwrap() <= winner.mean_ecd.unwrap());
    }
}
