//! Posterior distributions after information sharing, and decisions.

use crate::design::{DecisionRule, PosteriorKind, ResponseVector, TrialConfig};
use crate::error::{domain, Result};
use crate::numerics::{beta_tail, BetaShape};
use crate::weights::WeightMatrix;

/// One beta posterior per basket.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorParams {
    pub shapes: Vec<BetaShape>,
}

/// `true` where a basket is declared active.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionVector {
    pub rejects: Vec<bool>,
}

fn check(config: &TrialConfig, r: &ResponseVector, w: &WeightMatrix) -> Result<()> {
    config.validate_responses(r)?;
    if w.k() != config.k() {
        return Err(domain(format!(
            "weight matrix is {}x{}, trial has {} baskets",
            w.k(),
            w.k(),
            config.k()
        )));
    }
    Ok(())
}

/// Power prior posterior: each basket keeps its own prior and adds
/// `w[k][i]` times the data of basket `i` (with `w[k][k] = 1`).
pub fn power_prior_posterior(
    config: &TrialConfig,
    r: &ResponseVector,
    w: &WeightMatrix,
) -> Result<PosteriorParams> {
    check(config, r, w)?;
    Ok(posterior_unchecked(
        config,
        r.counts(),
        w,
        PosteriorKind::PowerPrior,
    ))
}

/// Fujikawa's posterior: the prior parameters are shared together with the
/// data, `alpha_k = Σ_i w[k][i] (s1_k + r_i)`.
pub fn fujikawa_posterior(
    config: &TrialConfig,
    r: &ResponseVector,
    w: &WeightMatrix,
) -> Result<PosteriorParams> {
    check(config, r, w)?;
    Ok(posterior_unchecked(
        config,
        r.counts(),
        w,
        PosteriorKind::Fujikawa,
    ))
}

pub(crate) fn posterior_unchecked(
    config: &TrialConfig,
    counts: &[u32],
    w: &WeightMatrix,
    kind: PosteriorKind,
) -> PosteriorParams {
    let n = config.sample_sizes();
    let shapes = config
        .priors()
        .iter()
        .enumerate()
        .map(|(k, prior)| {
            let (s1, s2) = (prior.alpha(), prior.beta());
            let row = w.row(k);
            let (mut alpha, mut beta) = match kind {
                PosteriorKind::PowerPrior => (s1, s2),
                PosteriorKind::Fujikawa => (0.0, 0.0),
            };
            for (i, &wi) in row.iter().enumerate() {
                let succ = counts[i] as f64;
                let fail = (n[i] - counts[i]) as f64;
                match kind {
                    PosteriorKind::PowerPrior => {
                        alpha += wi * succ;
                        beta += wi * fail;
                    }
                    PosteriorKind::Fujikawa => {
                        alpha += wi * (s1 + succ);
                        beta += wi * (s2 + fail);
                    }
                }
            }
            BetaShape::new_unchecked(alpha, beta)
        })
        .collect();
    PosteriorParams { shapes }
}

/// Declares basket `k` active when `P(p_k > p0 | data)` passes `lambda`.
pub fn decide(
    post: &PosteriorParams,
    p0: f64,
    lambda: f64,
    rule: DecisionRule,
) -> Result<DecisionVector> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(domain(format!(
            "threshold must lie in (0, 1), got {lambda}"
        )));
    }
    let rejects = post
        .shapes
        .iter()
        .map(|s| Ok(rule.rejects(beta_tail(p0, s)?, lambda)))
        .collect::<Result<_>>()?;
    Ok(DecisionVector { rejects })
}

pub fn posterior_means(post: &PosteriorParams) -> Vec<f64> {
    post.shapes.iter().map(BetaShape::mean).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (TrialConfig, ResponseVector, WeightMatrix) {
        let c = TrialConfig::uniform(2, 20, 0.15, BetaShape::uniform()).unwrap();
        let r = ResponseVector::new(vec![4, 8]);
        let w = WeightMatrix::from_fn(2, |_, _| 0.5);
        (c, r, w)
    }

    #[test]
    fn power_prior_example() {
        let (c, r, w) = setup();
        let p = power_prior_posterior(&c, &r, &w).unwrap();
        assert_eq!(p.shapes[0], BetaShape::new(9.0, 23.0).unwrap());
        assert_eq!(posterior_means(&p)[0], 0.28125);
    }

    #[test]
    fn fujikawa_example() {
        let (c, r, w) = setup();
        let p = fujikawa_posterior(&c, &r, &w).unwrap();
        assert_eq!(p.shapes[0], BetaShape::new(9.5, 23.5).unwrap());
    }

    #[test]
    fn identity_and_full_pooling() {
        let c = TrialConfig::uniform(3, 20, 0.15, BetaShape::new(0.5, 2.0).unwrap()).unwrap();
        let r = ResponseVector::new(vec![1, 7, 12]);
        let id = WeightMatrix::identity(3);
        let a = power_prior_posterior(&c, &r, &id).unwrap();
        let b = fujikawa_posterior(&c, &r, &id).unwrap();
        assert_eq!(a, b);
        for k in 0..3 {
            assert_eq!(a.shapes[k], c.individual_posterior(k, r.counts()[k]));
        }
        let ones = WeightMatrix::ones(3);
        let pp = power_prior_posterior(&c, &r, &ones).unwrap();
        let fj = fujikawa_posterior(&c, &r, &ones).unwrap();
        for k in 0..3 {
            assert_eq!(
                pp.shapes[k],
                BetaShape::new(0.5 + 20.0, 2.0 + 40.0).unwrap()
            );
            assert_eq!(fj.shapes[k].alpha(), 3.0 * 0.5 + 20.0);
        }
    }

    #[test]
    fn decisions() {
        let u = PosteriorParams {
            shapes: vec![BetaShape::uniform()],
        };
        assert_eq!(
            decide(&u, 0.15, 0.9, DecisionRule::AtLeast)
                .unwrap()
                .rejects,
            vec![false]
        );
        let tail = beta_tail(0.15, &BetaShape::uniform()).unwrap();
        assert!(
            decide(&u, 0.15, tail, DecisionRule::AtLeast)
                .unwrap()
                .rejects[0]
        );
        assert!(!decide(&u, 0.15, tail, DecisionRule::Above).unwrap().rejects[0]);
        // P(p > 0.15) = 0.99798... for Beta(9, 13).
        let p = PosteriorParams {
            shapes: vec![BetaShape::new(9.0, 13.0).unwrap()],
        };
        assert!(
            decide(&p, 0.15, 0.95, DecisionRule::AtLeast)
                .unwrap()
                .rejects[0]
        );
        assert!(
            !decide(&p, 0.15, 0.998, DecisionRule::AtLeast)
                .unwrap()
                .rejects[0]
        );
        assert!(decide(&p, 0.15, 1.0, DecisionRule::AtLeast).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let (c, r, _) = setup();
        assert!(power_prior_posterior(&c, &r, &WeightMatrix::ones(3)).is_err());
    }
}
