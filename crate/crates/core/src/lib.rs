pub mod bma;
pub mod calibrate;
pub mod design;
pub mod error;
pub mod numerics;
pub mod oc;
pub mod optimize;
pub mod posterior;
pub mod presets;
pub mod tune;
pub mod weights;

pub use calibrate::{
    calibrate_lambda, calibrate_with, CalibrationResult, CalibrationTarget, Engine,
};
pub use design::{DecisionRule, DesignSpec, Family, PosteriorKind, ResponseVector, TrialConfig};
pub use error::{Error, Result};
pub use numerics::BetaShape;
pub use oc::{ecd, exact_oc, simulate_oc, DesignContext, DesignEvaluator, OcResult, Scenario};
pub use tune::{
    grid_search, grid_search_with, EvaluationSettings, GridAxis, SharedData, TuningGrid,
    TuningReport,
};
