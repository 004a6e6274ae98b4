//! Built-in comparison-study setup: trial, scenarios, tuning grids, selected
//! designs and the published values they are checked against.

use crate::design::{DesignSpec, Family, TrialConfig};
use crate::numerics::BetaShape;
use crate::oc::Scenario;
use crate::tune::{GridAxis, TuningGrid};

pub const BASKETS: usize = 4;
pub const SAMPLE_SIZE: u32 = 20;
pub const NULL_RATE: f64 = 0.15;
pub const ALPHA: f64 = 0.05;
/// Published thresholds are consistent with calibration on a `1e-3` grid.
pub const LAMBDA_DIGITS: u32 = 3;
pub const N_SIMS: usize = 10_000;
pub const SEED: u64 = 20_240_607;

/// Scenario names in reporting order.
pub const SCENARIO_NAMES: [&str; 7] = [
    "Global Null",
    "Global Alt",
    "One in the Middle",
    "Linear",
    "Good Nugget",
    "Bad Nugget",
    "Half",
];

const SCENARIO_RATES: [[f64; 4]; 7] = [
    [0.15, 0.15, 0.15, 0.15],
    [0.4, 0.4, 0.4, 0.4],
    [0.4, 0.4, 0.3, 0.5],
    [0.15, 0.25, 0.35, 0.45],
    [0.15, 0.15, 0.15, 0.4],
    [0.15, 0.4, 0.4, 0.4],
    [0.15, 0.15, 0.4, 0.4],
];

/// Scenarios with a single common alternative rate.
pub const COMMON_ALTERNATIVE: [&str; 5] = [
    "Global Null",
    "Global Alt",
    "Good Nugget",
    "Bad Nugget",
    "Half",
];

/// Scenarios used one at a time for per-scenario tuning.
pub const SINGLE_SCENARIO_TARGETS: [&str; 3] = ["Linear", "Bad Nugget", "Half"];

/// Four baskets of 20 patients, null rate 0.15, Beta(1, 1) priors.
pub fn trial() -> TrialConfig {
    TrialConfig::uniform(BASKETS, SAMPLE_SIZE, NULL_RATE, BetaShape::uniform())
        .expect("valid preset")
}

/// Trial used for BMA. The published BMA results agree with Beta(0.5, 0.5)
/// priors rather than uniform ones.
pub fn bma_trial() -> TrialConfig {
    TrialConfig::uniform(
        BASKETS,
        SAMPLE_SIZE,
        NULL_RATE,
        BetaShape::new(0.5, 0.5).expect("valid shape"),
    )
    .expect("valid preset")
}

/// Trial a family is evaluated on.
pub fn trial_for(family: Family) -> TrialConfig {
    match family {
        Family::Bma => bma_trial(),
        _ => trial(),
    }
}

pub fn scenarios() -> Vec<Scenario> {
    SCENARIO_NAMES
        .iter()
        .zip(SCENARIO_RATES)
        .map(|(name, rates)| Scenario::new(*name, rates.to_vec()).expect("valid preset"))
        .collect()
}

/// The named preset scenarios, in the given order.
pub fn scenario_subset(names: &[&str]) -> Vec<Scenario> {
    let all = scenarios();
    names
        .iter()
        .map(|n| {
            all.iter()
                .find(|s| s.name == *n)
                .cloned()
                .expect("preset scenario")
        })
        .collect()
}

fn steps(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step).round() as usize;
    (0..=n)
        .map(|i| ((from + i as f64 * step) * 1e6).round() / 1e6)
        .collect()
}

/// Tuning grid searched for `family`.
pub fn grid(family: Family) -> TuningGrid {
    let half = || steps(0.5, 3.0, 0.5);
    let tau = || steps(0.0, 0.5, 0.1);
    let axes = match family {
        Family::Fujikawa => vec![
            GridAxis::new("epsilon", half()),
            GridAxis::new("tau", tau()),
        ],
        Family::Cpp => vec![GridAxis::new("a", half()), GridAxis::new("b", half())],
        Family::CppGlobal => vec![
            GridAxis::new("a", half()),
            GridAxis::new("b", half()),
            GridAxis::new("epsilon_star", half()),
        ],
        Family::CppNex => vec![
            GridAxis::new("a", half()),
            GridAxis::new("b", half()),
            GridAxis::new("omega_star", steps(0.2, 0.9, 0.1)),
        ],
        Family::JsdGlobal => vec![
            GridAxis::new("epsilon", half()),
            GridAxis::new("tau", tau()),
            GridAxis::new("epsilon_star", half()),
        ],
        Family::Mml => vec![],
        Family::Bma => vec![GridAxis::new("psi", steps(-4.0, 4.0, 0.5))],
    };
    TuningGrid::new(family, axes).expect("valid preset")
}

/// Selected design of each family.
pub fn design(family: Family) -> DesignSpec {
    match family {
        Family::Fujikawa => DesignSpec::Fujikawa {
            epsilon: 1.5,
            tau: 0.0,
        },
        Family::Cpp => DesignSpec::Cpp { a: 2.0, b: 1.5 },
        Family::CppGlobal => DesignSpec::CppGlobal {
            a: 1.5,
            b: 1.0,
            epsilon_star: 0.5,
        },
        Family::CppNex => DesignSpec::CppNex {
            a: 2.0,
            b: 2.0,
            omega_star: 0.8,
        },
        Family::JsdGlobal => DesignSpec::JsdGlobal {
            epsilon: 0.5,
            tau: 0.0,
            epsilon_star: 3.0,
        },
        Family::Mml => DesignSpec::Mml,
        Family::Bma => DesignSpec::Bma { psi: -2.0 },
    }
}

/// Families whose operating characteristics are enumerated exactly.
pub const EXACT_FAMILIES: [Family; 4] = [
    Family::Cpp,
    Family::CppGlobal,
    Family::CppNex,
    Family::Fujikawa,
];

/// Families evaluated by simulation.
pub const SIMULATED_FAMILIES: [Family; 3] = [Family::Bma, Family::JsdGlobal, Family::Mml];

/// Published values, rounded to three decimals.
pub mod published {
    use crate::design::{DesignSpec, Family};

    /// ECD per scenario (scenario order of [`super::SCENARIO_NAMES`]) for
    /// the selected designs.
    pub const ECD: [(Family, [f64; 7]); 7] = [
        (
            Family::Bma,
            [3.904, 3.871, 3.719, 2.964, 3.342, 3.451, 3.319],
        ),
        (
            Family::Cpp,
            [3.916, 3.910, 3.817, 3.066, 3.403, 3.497, 3.321],
        ),
        (
            Family::CppGlobal,
            [3.922, 3.909, 3.819, 3.056, 3.410, 3.486, 3.323],
        ),
        (
            Family::CppNex,
            [3.919, 3.910, 3.816, 3.066, 3.420, 3.494, 3.336],
        ),
        (
            Family::Fujikawa,
            [3.908, 3.882, 3.738, 3.068, 3.340, 3.520, 3.352],
        ),
        (
            Family::JsdGlobal,
            [3.925, 3.878, 3.731, 2.906, 3.476, 3.414, 3.325],
        ),
        (
            Family::Mml,
            [3.932, 3.640, 3.469, 2.985, 3.489, 3.528, 3.527],
        ),
    ];

    /// Rejection rates and FWER (`None` where no basket is null).
    pub struct Rejection {
        pub scenario: &'static str,
        pub family: Family,
        pub rates: [f64; 4],
        pub fwer: Option<f64>,
    }

    const fn rej(
        scenario: &'static str,
        family: Family,
        rates: [f64; 4],
        fwer: Option<f64>,
    ) -> Rejection {
        Rejection {
            scenario,
            family,
            rates,
            fwer,
        }
    }

    use Family::*;

    pub const REJECTION: [Rejection; 49] = [
        rej(
            "Global Null",
            Bma,
            [0.024, 0.023, 0.024, 0.024],
            Some(0.049),
        ),
        rej(
            "Global Null",
            Cpp,
            [0.021, 0.021, 0.021, 0.021],
            Some(0.048),
        ),
        rej(
            "Global Null",
            CppGlobal,
            [0.019, 0.019, 0.019, 0.019],
            Some(0.048),
        ),
        rej(
            "Global Null",
            CppNex,
            [0.020, 0.020, 0.020, 0.020],
            Some(0.049),
        ),
        rej(
            "Global Null",
            Fujikawa,
            [0.023, 0.023, 0.023, 0.023],
            Some(0.048),
        ),
        rej(
            "Global Null",
            JsdGlobal,
            [0.019, 0.018, 0.020, 0.019],
            Some(0.049),
        ),
        rej(
            "Global Null",
            Mml,
            [0.018, 0.016, 0.017, 0.017],
            Some(0.049),
        ),
        rej("Global Alt", Bma, [0.967, 0.970, 0.968, 0.967], None),
        rej("Global Alt", Cpp, [0.977, 0.977, 0.977, 0.977], None),
        rej("Global Alt", CppGlobal, [0.977, 0.977, 0.977, 0.977], None),
        rej("Global Alt", CppNex, [0.978, 0.978, 0.978, 0.978], None),
        rej("Global Alt", Fujikawa, [0.970, 0.970, 0.970, 0.970], None),
        rej("Global Alt", JsdGlobal, [0.970, 0.972, 0.968, 0.968], None),
        rej("Global Alt", Mml, [0.907, 0.912, 0.910, 0.910], None),
        rej("One in the Middle", Bma, [0.955, 0.955, 0.812, 0.996], None),
        rej("One in the Middle", Cpp, [0.972, 0.972, 0.877, 0.996], None),
        rej(
            "One in the Middle",
            CppGlobal,
            [0.972, 0.972, 0.878, 0.996],
            None,
        ),
        rej(
            "One in the Middle",
            CppNex,
            [0.971, 0.971, 0.877, 0.996],
            None,
        ),
        rej(
            "One in the Middle",
            Fujikawa,
            [0.959, 0.959, 0.824, 0.996],
            None,
        ),
        rej(
            "One in the Middle",
            JsdGlobal,
            [0.965, 0.953, 0.818, 0.995],
            None,
        ),
        rej("One in the Middle", Mml, [0.906, 0.904, 0.673, 0.980], None),
        rej("Linear", Bma, [0.240, 0.492, 0.781, 0.931], Some(0.240)),
        rej("Linear", Cpp, [0.247, 0.566, 0.805, 0.942], Some(0.247)),
        rej(
            "Linear",
            CppGlobal,
            [0.245, 0.558, 0.805, 0.939],
            Some(0.245),
        ),
        rej("Linear", CppNex, [0.248, 0.564, 0.808, 0.942], Some(0.248)),
        rej(
            "Linear",
            Fujikawa,
            [0.236, 0.553, 0.807, 0.944],
            Some(0.236),
        ),
        rej(
            "Linear",
            JsdGlobal,
            [0.245, 0.462, 0.762, 0.927],
            Some(0.245),
        ),
        rej("Linear", Mml, [0.092, 0.391, 0.760, 0.926], Some(0.092)),
        rej(
            "Good Nugget",
            Bma,
            [0.076, 0.077, 0.080, 0.575],
            Some(0.152),
        ),
        rej(
            "Good Nugget",
            Cpp,
            [0.075, 0.075, 0.075, 0.629],
            Some(0.154),
        ),
        rej(
            "Good Nugget",
            CppGlobal,
            [0.072, 0.072, 0.072, 0.627],
            Some(0.152),
        ),
        rej(
            "Good Nugget",
            CppNex,
            [0.077, 0.077, 0.077, 0.651],
            Some(0.161),
        ),
        rej(
            "Good Nugget",
            Fujikawa,
            [0.087, 0.087, 0.087, 0.602],
            Some(0.178),
        ),
        rej(
            "Good Nugget",
            JsdGlobal,
            [0.065, 0.057, 0.060, 0.658],
            Some(0.129),
        ),
        rej(
            "Good Nugget",
            Mml,
            [0.059, 0.060, 0.061, 0.669],
            Some(0.159),
        ),
        rej("Bad Nugget", Bma, [0.269, 0.904, 0.907, 0.908], Some(0.269)),
        rej("Bad Nugget", Cpp, [0.322, 0.940, 0.940, 0.940], Some(0.322)),
        rej(
            "Bad Nugget",
            CppGlobal,
            [0.322, 0.936, 0.936, 0.936],
            Some(0.322),
        ),
        rej(
            "Bad Nugget",
            CppNex,
            [0.323, 0.939, 0.939, 0.939],
            Some(0.323),
        ),
        rej(
            "Bad Nugget",
            Fujikawa,
            [0.288, 0.936, 0.936, 0.936],
            Some(0.288),
        ),
        rej(
            "Bad Nugget",
            JsdGlobal,
            [0.302, 0.899, 0.908, 0.910],
            Some(0.302),
        ),
        rej("Bad Nugget", Mml, [0.116, 0.881, 0.880, 0.883], Some(0.116)),
        rej("Half", Bma, [0.158, 0.157, 0.818, 0.816], Some(0.222)),
        rej("Half", Cpp, [0.179, 0.179, 0.839, 0.839], Some(0.278)),
        rej("Half", CppGlobal, [0.173, 0.173, 0.835, 0.835], Some(0.270)),
        rej("Half", CppNex, [0.178, 0.178, 0.846, 0.846], Some(0.276)),
        rej("Half", Fujikawa, [0.176, 0.176, 0.852, 0.852], Some(0.274)),
        rej("Half", JsdGlobal, [0.143, 0.144, 0.808, 0.805], Some(0.210)),
        rej("Half", Mml, [0.080, 0.079, 0.844, 0.843], Some(0.144)),
    ];

    /// Mean posterior means per scenario (scenario order) and basket.
    pub const POSTERIOR_MEANS: [(Family, [[f64; 4]; 7]); 7] = [
        (
            Bma,
            [
                [0.155, 0.154, 0.155, 0.155],
                [0.401, 0.402, 0.402, 0.402],
                [0.403, 0.402, 0.369, 0.436],
                [0.232, 0.278, 0.331, 0.375],
                [0.184, 0.184, 0.184, 0.317],
                [0.248, 0.373, 0.374, 0.373],
                [0.208, 0.207, 0.352, 0.351],
            ],
        ),
        (
            Cpp,
            [
                [0.161, 0.161, 0.161, 0.161],
                [0.403, 0.403, 0.403, 0.403],
                [0.403, 0.403, 0.358, 0.450],
                [0.234, 0.280, 0.332, 0.384],
                [0.185, 0.185, 0.185, 0.315],
                [0.256, 0.379, 0.379, 0.379],
                [0.215, 0.215, 0.350, 0.350],
            ],
        ),
        (
            CppGlobal,
            [
                [0.162, 0.162, 0.162, 0.162],
                [0.404, 0.404, 0.404, 0.404],
                [0.404, 0.404, 0.359, 0.449],
                [0.238, 0.282, 0.332, 0.382],
                [0.189, 0.189, 0.189, 0.311],
                [0.259, 0.377, 0.377, 0.377],
                [0.220, 0.220, 0.348, 0.348],
            ],
        ),
        (
            CppNex,
            [
                [0.162, 0.162, 0.162, 0.162],
                [0.404, 0.404, 0.404, 0.404],
                [0.404, 0.404, 0.359, 0.449],
                [0.238, 0.282, 0.332, 0.382],
                [0.189, 0.189, 0.189, 0.311],
                [0.259, 0.377, 0.377, 0.377],
                [0.220, 0.220, 0.348, 0.348],
            ],
        ),
        (
            Fujikawa,
            [
                [0.182, 0.182, 0.182, 0.182],
                [0.409, 0.409, 0.409, 0.409],
                [0.409, 0.409, 0.362, 0.456],
                [0.231, 0.291, 0.347, 0.403],
                [0.198, 0.198, 0.198, 0.347],
                [0.242, 0.392, 0.392, 0.392],
                [0.217, 0.217, 0.373, 0.373],
            ],
        ),
        (
            JsdGlobal,
            [
                [0.163, 0.162, 0.163, 0.163],
                [0.403, 0.404, 0.404, 0.405],
                [0.408, 0.403, 0.357, 0.454],
                [0.233, 0.280, 0.341, 0.403],
                [0.200, 0.190, 0.189, 0.341],
                [0.246, 0.386, 0.387, 0.387],
                [0.212, 0.211, 0.369, 0.368],
            ],
        ),
        (
            Mml,
            [
                [0.160, 0.158, 0.159, 0.159],
                [0.402, 0.403, 0.403, 0.404],
                [0.404, 0.403, 0.335, 0.474],
                [0.196, 0.263, 0.343, 0.421],
                [0.170, 0.170, 0.171, 0.373],
                [0.203, 0.388, 0.390, 0.389],
                [0.182, 0.181, 0.379, 0.379],
            ],
        ),
    ];

    /// Winners by mean ECD over all seven scenarios.
    pub const WINNERS: [DesignSpec; 6] = [
        DesignSpec::Bma { psi: -2.0 },
        DesignSpec::Cpp { a: 2.0, b: 1.5 },
        DesignSpec::CppGlobal {
            a: 1.5,
            b: 1.0,
            epsilon_star: 0.5,
        },
        DesignSpec::CppNex {
            a: 2.0,
            b: 2.0,
            omega_star: 0.8,
        },
        DesignSpec::Fujikawa {
            epsilon: 1.5,
            tau: 0.0,
        },
        DesignSpec::JsdGlobal {
            epsilon: 0.5,
            tau: 0.0,
            epsilon_star: 3.0,
        },
    ];

    /// Winners over the common-alternative scenarios.
    pub const COMMON_ALTERNATIVE_WINNERS: [DesignSpec; 6] = [
        DesignSpec::Bma { psi: -1.0 },
        DesignSpec::Cpp { a: 2.5, b: 1.5 },
        DesignSpec::CppGlobal {
            a: 2.0,
            b: 1.0,
            epsilon_star: 0.5,
        },
        DesignSpec::CppNex {
            a: 2.5,
            b: 2.5,
            omega_star: 0.6,
        },
        DesignSpec::Fujikawa {
            epsilon: 2.0,
            tau: 0.1,
        },
        DesignSpec::JsdGlobal {
            epsilon: 1.0,
            tau: 0.3,
            epsilon_star: 2.5,
        },
    ];

    /// ECD over the common-alternative scenarios (order of
    /// [`super::COMMON_ALTERNATIVE`]) at those winners.
    pub const COMMON_ALTERNATIVE_ECD: [(Family, [f64; 5]); 7] = [
        (Bma, [3.926, 3.768, 3.465, 3.463, 3.397]),
        (Cpp, [3.919, 3.779, 3.482, 3.527, 3.433]),
        (CppGlobal, [3.930, 3.777, 3.503, 3.507, 3.410]),
        (CppNex, [3.930, 3.813, 3.483, 3.520, 3.409]),
        (Fujikawa, [3.920, 3.780, 3.434, 3.540, 3.405]),
        (JsdGlobal, [3.930, 3.803, 3.502, 3.425, 3.377]),
        (Mml, [3.932, 3.640, 3.489, 3.528, 3.527]),
    ];

    /// Winners when tuning on one scenario: (scenario, winner).
    pub const SINGLE_SCENARIO_WINNERS: [(&str, DesignSpec); 18] = [
        ("Linear", DesignSpec::Bma { psi: -3.5 }),
        ("Linear", DesignSpec::Cpp { a: 2.0, b: 2.0 }),
        (
            "Linear",
            DesignSpec::CppGlobal {
                a: 1.5,
                b: 2.5,
                epsilon_star: 0.5,
            },
        ),
        (
            "Linear",
            DesignSpec::CppNex {
                a: 1.5,
                b: 3.0,
                omega_star: 0.8,
            },
        ),
        (
            "Linear",
            DesignSpec::Fujikawa {
                epsilon: 0.5,
                tau: 0.4,
            },
        ),
        (
            "Linear",
            DesignSpec::JsdGlobal {
                epsilon: 0.5,
                tau: 0.0,
                epsilon_star: 2.0,
            },
        ),
        ("Bad Nugget", DesignSpec::Bma { psi: -1.0 }),
        ("Bad Nugget", DesignSpec::Cpp { a: 2.5, b: 1.5 }),
        (
            "Bad Nugget",
            DesignSpec::CppGlobal {
                a: 3.0,
                b: 2.0,
                epsilon_star: 0.5,
            },
        ),
        (
            "Bad Nugget",
            DesignSpec::CppNex {
                a: 2.5,
                b: 2.0,
                omega_star: 0.8,
            },
        ),
        (
            "Bad Nugget",
            DesignSpec::Fujikawa {
                epsilon: 2.0,
                tau: 0.0,
            },
        ),
        (
            "Bad Nugget",
            DesignSpec::JsdGlobal {
                epsilon: 1.0,
                tau: 0.3,
                epsilon_star: 2.5,
            },
        ),
        ("Half", DesignSpec::Bma { psi: 4.0 }),
        ("Half", DesignSpec::Cpp { a: 3.0, b: 0.5 }),
        (
            "Half",
            DesignSpec::CppGlobal {
                a: 2.5,
                b: 0.5,
                epsilon_star: 2.0,
            },
        ),
        (
            "Half",
            DesignSpec::CppNex {
                a: 3.0,
                b: 2.0,
                omega_star: 0.9,
            },
        ),
        (
            "Half",
            DesignSpec::Fujikawa {
                epsilon: 3.0,
                tau: 0.2,
            },
        ),
        (
            "Half",
            DesignSpec::JsdGlobal {
                epsilon: 2.0,
                tau: 0.5,
                epsilon_star: 1.0,
            },
        ),
    ];

    /// ECD over all seven scenarios at the single-scenario winners:
    /// (tuning scenario, family, ECDs).
    pub const SINGLE_SCENARIO_ECD: [(&str, Family, [f64; 7]); 18] = [
        (
            "Linear",
            Bma,
            [3.835, 3.959, 3.870, 3.009, 3.003, 3.349, 3.051],
        ),
        (
            "Linear",
            Cpp,
            [3.908, 3.928, 3.840, 3.088, 3.343, 3.484, 3.293],
        ),
        (
            "Linear",
            CppGlobal,
            [3.890, 3.976, 3.935, 3.071, 3.225, 3.338, 3.097],
        ),
        (
            "Linear",
            CppNex,
            [3.891, 3.979, 3.942, 3.078, 3.208, 3.322, 3.046],
        ),
        (
            "Linear",
            Fujikawa,
            [3.878, 3.973, 3.916, 3.111, 3.124, 3.356, 2.996],
        ),
        (
            "Linear",
            JsdGlobal,
            [3.906, 3.941, 3.839, 2.922, 3.379, 3.356, 3.260],
        ),
        (
            "Bad Nugget",
            Bma,
            [3.926, 3.768, 3.587, 2.920, 3.465, 3.463, 3.397],
        ),
        (
            "Bad Nugget",
            Cpp,
            [3.919, 3.779, 3.619, 2.985, 3.482, 3.527, 3.433],
        ),
        (
            "Bad Nugget",
            CppGlobal,
            [3.922, 3.766, 3.594, 2.963, 3.486, 3.513, 3.438],
        ),
        (
            "Bad Nugget",
            CppNex,
            [3.921, 3.810, 3.649, 3.017, 3.468, 3.535, 3.406],
        ),
        (
            "Bad Nugget",
            Fujikawa,
            [3.924, 3.794, 3.611, 3.007, 3.412, 3.541, 3.396],
        ),
        (
            "Bad Nugget",
            JsdGlobal,
            [3.930, 3.803, 3.605, 2.850, 3.502, 3.425, 3.377],
        ),
        (
            "Half",
            Bma,
            [3.948, 3.001, 2.858, 2.638, 3.598, 3.244, 3.429],
        ),
        (
            "Half",
            Cpp,
            [3.935, 3.388, 3.183, 2.733, 3.556, 3.300, 3.451],
        ),
        (
            "Half",
            CppGlobal,
            [3.937, 3.431, 3.209, 2.735, 3.563, 3.309, 3.448],
        ),
        (
            "Half",
            CppNex,
            [3.924, 3.765, 3.596, 2.962, 3.485, 3.510, 3.445],
        ),
        (
            "Half",
            Fujikawa,
            [3.931, 3.600, 3.366, 2.895, 3.484, 3.490, 3.435],
        ),
        (
            "Half",
            JsdGlobal,
            [3.935, 3.610, 3.378, 2.749, 3.493, 3.396, 3.449],
        ),
    ];

    pub fn ecd(family: Family) -> [f64; 7] {
        ECD.iter()
            .find(|(f, _)| *f == family)
            .expect("published family")
            .1
    }

    pub fn rejection(scenario: &str, family: Family) -> &'static Rejection {
        REJECTION
            .iter()
            .find(|r| r.scenario == scenario && r.family == family)
            .expect("published cell")
    }

    pub fn posterior_means(family: Family) -> [[f64; 4]; 7] {
        POSTERIOR_MEANS
            .iter()
            .find(|(f, _)| *f == family)
            .expect("published family")
            .1
    }

    pub fn winner(family: Family) -> Option<DesignSpec> {
        WINNERS.iter().copied().find(|s| s.family() == family)
    }
}
