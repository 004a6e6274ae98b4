use crate::design::{ResponseVector, TrialConfig};
use crate::error::{domain, Error, Result};
use crate::numerics::ln_beta;
use crate::optimize::{maximize_in_box, NelderMeadOptions};

/// Values closer than this are treated as tied between optimizer starts.
const TIE_TOL: f64 = 1e-12;

struct Objective {
    own_success: f64,
    own_failure: f64,
    prior_alpha: f64,
    prior_beta: f64,
    other_success: Vec<f64>,
    other_failure: Vec<f64>,
}

impl Objective {
    fn new(config: &TrialConfig, r: &ResponseVector, k: usize) -> Self {
        let counts = r.counts();
        let n = config.sample_sizes();
        let mut other_success = Vec::with_capacity(config.k() - 1);
        let mut other_failure = Vec::with_capacity(config.k() - 1);
        for i in (0..config.k()).filter(|&i| i != k) {
            other_success.push(counts[i] as f64);
            other_failure.push((n[i] - counts[i]) as f64);
        }
        Self {
            own_success: counts[k] as f64,
            own_failure: (n[k] - counts[k]) as f64,
            prior_alpha: config.priors()[k].alpha(),
            prior_beta: config.priors()[k].beta(),
            other_success,
            other_failure,
        }
    }

    /// Log marginal likelihood up to the binomial coefficient.
    fn eval(&self, w: &[f64]) -> f64 {
        let mut alpha = self.prior_alpha;
        let mut beta = self.prior_beta;
        for ((wi, s), f) in w.iter().zip(&self.other_success).zip(&self.other_failure) {
            alpha += wi * s;
            beta += wi * f;
        }
        ln_beta(alpha + self.own_success, beta + self.own_failure) - ln_beta(alpha, beta)
    }
}

fn check_basket(config: &TrialConfig, r: &ResponseVector, k: usize) -> Result<()> {
    config.validate_responses(r)?;
    if k >= config.k() {
        return Err(domain(format!(
            "basket index {k} out of range for {} baskets",
            config.k()
        )));
    }
    Ok(())
}

/// Log marginal likelihood of basket `k`'s data given weights on the other
/// baskets (in index order, skipping `k`), without the binomial coefficient.
pub fn mml_log_likelihood(
    config: &TrialConfig,
    r: &ResponseVector,
    k: usize,
    others: &[f64],
) -> Result<f64> {
    check_basket(config, r, k)?;
    if others.len() != config.k() - 1 {
        return Err(domain(format!(
            "expected {} weights, got {}",
            config.k() - 1,
            others.len()
        )));
    }
    if others.iter().any(|w| !(0.0..=1.0).contains(w)) {
        return Err(domain("weights must lie in [0, 1]"));
    }
    Ok(Objective::new(config, r, k).eval(others))
}

/// Weights of row `k` maximising basket `k`'s marginal likelihood over
/// `[0, 1]^(K-1)`; entry `k` is one.
pub fn mml_weights(config: &TrialConfig, r: &ResponseVector, k: usize) -> Result<Vec<f64>> {
    mml_weights_with(config, r, k, &NelderMeadOptions::default())
}

/// [`mml_weights`] with explicit optimizer settings.
///
/// Runs the optimizer from every vertex of the box and from its centre.
/// The best final value wins; near-ties go to the smallest weight vector.
pub fn mml_weights_with(
    config: &TrialConfig,
    r: &ResponseVector,
    k: usize,
    opts: &NelderMeadOptions,
) -> Result<Vec<f64>> {
    check_basket(config, r, k)?;
    let objective = Objective::new(config, r, k);
    let f = |w: &[f64]| objective.eval(w);
    let dim = config.k() - 1;
    let lower = vec![0.0; dim];
    let upper = vec![1.0; dim];

    let mut starts: Vec<Vec<f64>> = (0..1usize << dim)
        .map(|mask| (0..dim).map(|j| ((mask >> j) & 1) as f64).collect())
        .collect();
    starts.push(vec![0.5; dim]);

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut any_converged = false;
    for start in &starts {
        let opt = maximize_in_box(&f, start, &lower, &upper, opts);
        any_converged |= opt.converged;
        let better = match &best {
            None => true,
            Some((bx, bv)) => {
                opt.value > bv + TIE_TOL
                    || ((opt.value - bv).abs() <= TIE_TOL && norm2(&opt.x) < norm2(bx))
            }
        };
        if better {
            best = Some((opt.x, opt.value));
        }
    }
    let (x, value) = best.expect("at least one start");
    if !any_converged {
        return Err(Error::Numeric {
            message: format!("marginal likelihood optimisation for basket {k} did not converge"),
            best_estimate: value,
        });
    }
    let mut row = Vec::with_capacity(config.k());
    row.extend_from_slice(&x[..k]);
    row.push(1.0);
    row.extend_from_slice(&x[k..]);
    Ok(row)
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::BetaShape;

    fn config(n: Vec<u32>) -> TrialConfig {
        let k = n.len();
        TrialConfig::new(n, 0.15, vec![BetaShape::uniform(); k]).unwrap()
    }

    #[test]
    fn identical_data_borrow_fully() {
        let c = config(vec![20; 4]);
        let r = ResponseVector::new(vec![6, 6, 6, 6]);
        for k in 0..4 {
            let w = mml_weights(&c, &r, k).unwrap();
            let others: Vec<f64> = w
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != k)
                .map(|(_, v)| *v)
                .collect();
            let at_opt = mml_log_likelihood(&c, &r, k, &others).unwrap();
            let at_ones = mml_log_likelihood(&c, &r, k, &[1.0; 3]).unwrap();
            assert!(at_opt >= at_ones - 1e-9);
            assert_eq!(w[k], 1.0);
        }
    }

    #[test]
    fn opposite_extremes_do_not_borrow() {
        let c = config(vec![20, 20]);
        let r = ResponseVector::new(vec![0, 20]);
        let w = mml_weights(&c, &r, 0).unwrap();
        assert!(w[1] <= 0.01, "{w:?}");
        // Grid scan: the maximum sits at zero borrowing.
        let best = (0..=10_000)
            .map(|i| i as f64 * 1e-4)
            .max_by(|a, b| {
                let fa = mml_log_likelihood(&c, &r, 0, &[*a]).unwrap();
                let fb = mml_log_likelihood(&c, &r, 0, &[*b]).unwrap();
                fa.total_cmp(&fb)
            })
            .unwrap();
        assert_eq!(best, 0.0);
    }

    #[test]
    fn vertices_dominated() {
        let c = config(vec![20, 20, 20, 20]);
        for counts in [vec![2, 5, 9, 14], vec![0, 20, 10, 3], vec![7, 8, 8, 9]] {
            let r = ResponseVector::new(counts);
            for k in 0..4 {
                let w = mml_weights(&c, &r, k).unwrap();
                let others: Vec<f64> = w
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != k)
                    .map(|(_, v)| *v)
                    .collect();
                let v = mml_log_likelihood(&c, &r, k, &others).unwrap();
                for mask in 0..8usize {
                    let vertex: Vec<f64> = (0..3).map(|j| ((mask >> j) & 1) as f64).collect();
                    assert!(v >= mml_log_likelihood(&c, &r, k, &vertex).unwrap() - 1e-12);
                }
            }
        }
    }

    #[test]
    fn argument_checks() {
        let c = config(vec![20, 20]);
        let r = ResponseVector::new(vec![1, 2]);
        assert!(mml_weights(&c, &r, 2).is_err());
        assert!(mml_log_likelihood(&c, &r, 0, &[1.5]).is_err());
        assert!(mml_log_likelihood(&c, &r, 0, &[0.5, 0.5]).is_err());
    }
}
