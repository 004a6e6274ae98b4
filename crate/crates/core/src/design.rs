//! Trial configuration, observed data and design specifications.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numerics::BetaShape;

/// Fixed design of a single-stage basket trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrialConfig", into = "RawTrialConfig")]
pub struct TrialConfig {
    sample_sizes: Vec<u32>,
    null_rate: f64,
    priors: Vec<BetaShape>,
}

#[derive(Serialize, Deserialize)]
struct RawTrialConfig {
    sample_sizes: Vec<u32>,
    null_rate: f64,
    priors: Vec<BetaShape>,
}

impl TryFrom<RawTrialConfig> for TrialConfig {
    type Error = crate::Error;

    fn try_from(raw: RawTrialConfig) -> Result<Self> {
        TrialConfig::new(raw.sample_sizes, raw.null_rate, raw.priors)
    }
}

impl From<TrialConfig> for RawTrialConfig {
    fn from(c: TrialConfig) -> Self {
        RawTrialConfig {
            sample_sizes: c.sample_sizes,
            null_rate: c.null_rate,
            priors: c.priors,
        }
    }
}

impl TrialConfig {
    pub fn new(sample_sizes: Vec<u32>, null_rate: f64, priors: Vec<BetaShape>) -> Result<Self> {
        if sample_sizes.len() < 2 {
            return Err(domain(format!(
                "a basket trial needs at least two baskets, got {}",
                sample_sizes.len()
            )));
        }
        if sample_sizes.len() != priors.len() {
            return Err(domain(format!(
                "{} sample sizes but {} priors",
                sample_sizes.len(),
                priors.len()
            )));
        }
        if sample_sizes.contains(&0) {
            return Err(domain("sample sizes must be positive"));
        }
        if !(null_rate > 0.0 && null_rate < 1.0) {
            return Err(domain(format!(
                "null rate must lie in (0, 1), got {null_rate}"
            )));
        }
        Ok(Self {
            sample_sizes,
            null_rate,
            priors,
        })
    }

    /// `k` baskets sharing sample size and prior.
    pub fn uniform(k: usize, n: u32, null_rate: f64, prior: BetaShape) -> Result<Self> {
        Self::new(vec![n; k], null_rate, vec![prior; k])
    }

    pub fn k(&self) -> usize {
        self.sample_sizes.len()
    }

    pub fn sample_sizes(&self) -> &[u32] {
        &self.sample_sizes
    }

    pub fn null_rate(&self) -> f64 {
        self.null_rate
    }

    pub fn priors(&self) -> &[BetaShape] {
        &self.priors
    }

    /// True when all baskets share sample size and prior, so that every
    /// design treats them symmetrically.
    pub fn is_exchangeable(&self) -> bool {
        self.sample_sizes.iter().all(|&n| n == self.sample_sizes[0])
            && self.priors.iter().all(|p| p == &self.priors[0])
    }

    /// Number of outcomes in the joint sample space.
    pub fn outcome_count(&self) -> u128 {
        self.sample_sizes.iter().map(|&n| n as u128 + 1).product()
    }

    /// Posterior of basket `k` analysed on its own.
    pub fn individual_posterior(&self, k: usize, r: u32) -> BetaShape {
        let prior = &self.priors[k];
        let n = self.sample_sizes[k];
        BetaShape::new_unchecked(prior.alpha() + r as f64, prior.beta() + (n - r) as f64)
    }

    pub fn validate_responses(&self, r: &ResponseVector) -> Result<()> {
        if r.len() != self.k() {
            return Err(domain(format!(
                "response vector has {} entries, trial has {} baskets",
                r.len(),
                self.k()
            )));
        }
        for (k, (&rk, &nk)) in r.counts().iter().zip(&self.sample_sizes).enumerate() {
            if rk > nk {
                return Err(domain(format!(
                    "basket {k}: {rk} responses exceed sample size {nk}"
                )));
            }
        }
        Ok(())
    }
}

/// Observed number of responses per basket.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResponseVector(Vec<u32>);

impl ResponseVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<u32>> for ResponseVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

/// Design families without their tuning parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Fujikawa,
    Cpp,
    CppGlobal,
    CppNex,
    JsdGlobal,
    Mml,
    Bma,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Bma,
        Family::Cpp,
        Family::CppGlobal,
        Family::CppNex,
        Family::Fujikawa,
        Family::JsdGlobal,
        Family::Mml,
    ];

    /// Display name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            Family::Fujikawa => "Fujikawa",
            Family::Cpp => "CPP",
            Family::CppGlobal => "CPP-Global",
            Family::CppNex => "CPP-Nex",
            Family::JsdGlobal => "JSD-Global",
            Family::Mml => "MML",
            Family::Bma => "BMA",
        }
    }

    /// Identifier used in config files and file names.
    pub fn slug(self) -> &'static str {
        match self {
            Family::Fujikawa => "fujikawa",
            Family::Cpp => "cpp",
            Family::CppGlobal => "cpp-global",
            Family::CppNex => "cpp-nex",
            Family::JsdGlobal => "jsd-global",
            Family::Mml => "mml",
            Family::Bma => "bma",
        }
    }

    pub fn from_slug(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.slug() == s)
    }

    /// Fujikawa's design and the power-prior family use `>=`; BMA uses `>`.
    pub fn decision_rule(self) -> DecisionRule {
        match self {
            Family::Bma => DecisionRule::Above,
            _ => DecisionRule::AtLeast,
        }
    }

    pub fn posterior_kind(self) -> PosteriorKind {
        match self {
            Family::Fujikawa => PosteriorKind::Fujikawa,
            _ => PosteriorKind::PowerPrior,
        }
    }

    /// Whether operating characteristics are computed by full enumeration
    /// by default.
    pub fn exact_by_default(self) -> bool {
        !matches!(self, Family::JsdGlobal | Family::Mml)
    }

    /// Names of the tuning parameters, in declaration order.
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            Family::Fujikawa => &["epsilon", "tau"],
            Family::Cpp => &["a", "b"],
            Family::CppGlobal => &["a", "b", "epsilon_star"],
            Family::CppNex => &["a", "b", "omega_star"],
            Family::JsdGlobal => &["epsilon", "tau", "epsilon_star"],
            Family::Mml => &[],
            Family::Bma => &["psi"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Comparison of the posterior probability against the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecisionRule {
    /// Reject when `P(p > p0 | r) >= lambda`.
    AtLeast,
    /// Reject when `P(p > p0 | r) > lambda`.
    Above,
}

impl DecisionRule {
    #[inline]
    pub fn rejects(self, tail: f64, lambda: f64) -> bool {
        match self {
            DecisionRule::AtLeast => tail >= lambda,
            DecisionRule::Above => tail > lambda,
        }
    }
}

/// How borrowed data enter the posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PosteriorKind {
    /// Prior parameters stay with their own basket.
    PowerPrior,
    /// Prior parameters are shared along with the data.
    Fujikawa,
}

/// A design family together with its tuning parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DesignSpec {
    Fujikawa {
        epsilon: f64,
        tau: f64,
    },
    Cpp {
        a: f64,
        b: f64,
    },
    CppGlobal {
        a: f64,
        b: f64,
        epsilon_star: f64,
    },
    CppNex {
        a: f64,
        b: f64,
        omega_star: f64,
    },
    JsdGlobal {
        epsilon: f64,
        tau: f64,
        epsilon_star: f64,
    },
    Mml,
    Bma {
        psi: f64,
    },
}

impl DesignSpec {
    pub fn family(&self) -> Family {
        match self {
            DesignSpec::Fujikawa { .. } => Family::Fujikawa,
            DesignSpec::Cpp { .. } => Family::Cpp,
            DesignSpec::CppGlobal { .. } => Family::CppGlobal,
            DesignSpec::CppNex { .. } => Family::CppNex,
            DesignSpec::JsdGlobal { .. } => Family::JsdGlobal,
            DesignSpec::Mml => Family::Mml,
            DesignSpec::Bma { .. } => Family::Bma,
        }
    }

    /// Tuning parameter values in the order of [`Family::parameter_names`].
    pub fn parameters(&self) -> Vec<f64> {
        match *self {
            DesignSpec::Fujikawa { epsilon, tau } => vec![epsilon, tau],
            DesignSpec::Cpp { a, b } => vec![a, b],
            DesignSpec::CppGlobal { a, b, epsilon_star } => vec![a, b, epsilon_star],
            DesignSpec::CppNex { a, b, omega_star } => vec![a, b, omega_star],
            DesignSpec::JsdGlobal {
                epsilon,
                tau,
                epsilon_star,
            } => vec![epsilon, tau, epsilon_star],
            DesignSpec::Mml => vec![],
            DesignSpec::Bma { psi } => vec![psi],
        }
    }

    /// Builds a spec from parameter values ordered as [`Family::parameter_names`].
    pub fn from_parameters(family: Family, values: &[f64]) -> Result<Self> {
        let expected = family.parameter_names().len();
        if values.len() != expected {
            return Err(domain(format!(
                "{family} takes {expected} parameters, got {}",
                values.len()
            )));
        }
        let v = values;
        let spec = match family {
            Family::Fujikawa => DesignSpec::Fujikawa {
                epsilon: v[0],
                tau: v[1],
            },
            Family::Cpp => DesignSpec::Cpp { a: v[0], b: v[1] },
            Family::CppGlobal => DesignSpec::CppGlobal {
                a: v[0],
                b: v[1],
                epsilon_star: v[2],
            },
            Family::CppNex => DesignSpec::CppNex {
                a: v[0],
                b: v[1],
                omega_star: v[2],
            },
            Family::JsdGlobal => DesignSpec::JsdGlobal {
                epsilon: v[0],
                tau: v[1],
                epsilon_star: v[2],
            },
            Family::Mml => DesignSpec::Mml,
            Family::Bma => DesignSpec::Bma { psi: v[0] },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(domain(format!("{name} must be positive, got {v}")))
            }
        }
        fn unit(name: &str, v: f64) -> Result<()> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(domain(format!("{name} must lie in [0, 1], got {v}")))
            }
        }
        fn finite(name: &str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(domain(format!("{name} must be finite, got {v}")))
            }
        }
        match *self {
            DesignSpec::Fujikawa { epsilon, tau } => {
                positive("epsilon", epsilon)?;
                unit("tau", tau)
            }
            DesignSpec::Cpp { a, b } => {
                finite("a", a)?;
                positive("b", b)
            }
            DesignSpec::CppGlobal { a, b, epsilon_star } => {
                finite("a", a)?;
                positive("b", b)?;
                positive("epsilon_star", epsilon_star)
            }
            DesignSpec::CppNex { a, b, omega_star } => {
                finite("a", a)?;
                positive("b", b)?;
                if omega_star > 0.0 && omega_star <= 1.0 {
                    Ok(())
                } else {
                    Err(domain(format!(
                        "omega_star must lie in (0, 1], got {omega_star}"
                    )))
                }
            }
            DesignSpec::JsdGlobal {
                epsilon,
                tau,
                epsilon_star,
            } => {
                positive("epsilon", epsilon)?;
                unit("tau", tau)?;
                positive("epsilon_star", epsilon_star)
            }
            DesignSpec::Mml => Ok(()),
            DesignSpec::Bma { psi } => finite("psi", psi),
        }
    }

    /// Compact `name=value` rendering of the tuning parameters.
    pub fn parameter_label(&self) -> String {
        self.family()
            .parameter_names()
            .iter()
            .zip(self.parameters())
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for DesignSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.parameter_label();
        if params.is_empty() {
            write!(f, "{}", self.family())
        } else {
            write!(f, "{} ({params})", self.family())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let u = BetaShape::uniform();
        assert!(TrialConfig::new(vec![20], 0.15, vec![u]).is_err());
        assert!(TrialConfig::new(vec![20, 20], 0.15, vec![u]).is_err());
        assert!(TrialConfig::new(vec![20, 0], 0.15, vec![u, u]).is_err());
        assert!(TrialConfig::new(vec![20, 20], 1.0, vec![u, u]).is_err());
        let c = TrialConfig::uniform(4, 20, 0.15, u).unwrap();
        assert_eq!(c.outcome_count(), 194_481);
        assert!(c.is_exchangeable());
        assert!(c
            .validate_responses(&ResponseVector::new(vec![0, 20, 3, 4]))
            .is_ok());
        assert!(c
            .validate_responses(&ResponseVector::new(vec![0, 21, 3, 4]))
            .is_err());
        assert!(c
            .validate_responses(&ResponseVector::new(vec![0, 2, 3]))
            .is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(DesignSpec::Fujikawa {
            epsilon: 0.0,
            tau: 0.0
        }
        .validate()
        .is_err());
        assert!(DesignSpec::Fujikawa {
            epsilon: 1.0,
            tau: 1.1
        }
        .validate()
        .is_err());
        assert!(DesignSpec::Cpp { a: -3.0, b: 0.5 }.validate().is_ok());
        assert!(DesignSpec::Cpp { a: 1.0, b: 0.0 }.validate().is_err());
        assert!(DesignSpec::CppNex {
            a: 1.0,
            b: 1.0,
            omega_star: 0.0
        }
        .validate()
        .is_err());
        assert!(DesignSpec::Bma { psi: -2.0 }.validate().is_ok());
    }

    #[test]
    fn parameters_round_trip() {
        let specs = [
            DesignSpec::Fujikawa {
                epsilon: 1.5,
                tau: 0.0,
            },
            DesignSpec::CppGlobal {
                a: 1.5,
                b: 1.0,
                epsilon_star: 0.5,
            },
            DesignSpec::JsdGlobal {
                epsilon: 0.5,
                tau: 0.0,
                epsilon_star: 3.0,
            },
            DesignSpec::Mml,
            DesignSpec::Bma { psi: -2.0 },
        ];
        for s in specs {
            assert_eq!(
                DesignSpec::from_parameters(s.family(), &s.parameters()).unwrap(),
                s
            );
        }
    }

    #[test]
    fn decision_rules() {
        assert!(DecisionRule::AtLeast.rejects(0.9, 0.9));
        assert!(!DecisionRule::Above.rejects(0.9, 0.9));
        assert_eq!(Family::Bma.decision_rule(), DecisionRule::Above);
        assert_eq!(Family::CppNex.decision_rule(), DecisionRule::AtLeast);
    }
}
