use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;

use super::context::{advance, DesignContext};
use super::simulate::SimulatedData;
use super::{ecd_unchecked, McStandardErrors, Method, OcResult, Scenario};
use crate::bma::BmaModelSpace;
use crate::design::{DecisionRule, DesignSpec, ResponseVector};
use crate::error::{domain, usage, Error, Result};
use crate::numerics::{ln_choose, upper_tail_unchecked, CompensatedSum};
use crate::posterior::posterior_unchecked;
use crate::weights::{
    cpp_weight_unchecked, global_weight_from_divergence, heterogeneity_from_rates,
    jsd_weight_from_divergence, mml_weights, WeightMatrix,
};

/// Evaluates one design on one trial.
///
/// For every outcome the evaluator computes a summary (posterior tail
/// probability and posterior mean per basket) once and caches it; operating
/// characteristics for any scenario and threshold are then weighted sums of
/// those summaries.
#[derive(Debug)]
pub struct DesignEvaluator {
    ctx: Arc<DesignContext>,
    spec: DesignSpec,
    bma: Option<BmaModelSpace>,
    allow_costly_exact: bool,
    exact_table: OnceLock<Result<Arc<Vec<f64>>>>,
    sim_cache: RwLock<HashMap<u128, Box<[f64]>>>,
}

/// Probability-weighted maximum tail over the null baskets of every outcome
/// under the global null, the input to threshold calibration.
#[derive(Debug, Clone)]
pub(crate) struct NullProfile {
    /// Outcome probabilities; `None` for equally weighted replicates.
    pub(crate) probs: Option<Vec<f64>>,
    pub(crate) max_tails: Vec<f64>,
}

impl NullProfile {
    pub(crate) fn fwer(&self, lambda: f64, rule: DecisionRule) -> f64 {
        match &self.probs {
            Some(probs) => {
                let mut s = CompensatedSum::default();
                for (p, &t) in probs.iter().zip(&self.max_tails) {
                    if rule.rejects(t, lambda) {
                        s.add(*p);
                    }
                }
                s.value()
            }
            None => {
                let hits = self
                    .max_tails
                    .iter()
                    .filter(|&&t| rule.rejects(t, lambda))
                    .count();
                hits as f64 / self.max_tails.len() as f64
            }
        }
    }
}

impl DesignEvaluator {
    pub fn new(ctx: Arc<DesignContext>, spec: DesignSpec) -> Result<Self> {
        spec.validate()?;
        let bma = match spec {
            DesignSpec::Bma { .. } => Some(BmaModelSpace::new(ctx.config())?),
            _ => None,
        };
        Ok(Self {
            ctx,
            spec,
            bma,
            allow_costly_exact: false,
            exact_table: OnceLock::new(),
            sim_cache: RwLock::new(HashMap::new()),
        })
    }

    /// Permits exact enumeration for JSD-Global and MML, whose per-outcome
    /// weights need quadrature or optimisation.
    pub fn allow_costly_exact(mut self, allow: bool) -> Self {
        self.allow_costly_exact = allow;
        self
    }

    pub fn spec(&self) -> &DesignSpec {
        &self.spec
    }

    pub fn context(&self) -> &Arc<DesignContext> {
        &self.ctx
    }

    pub fn decision_rule(&self) -> DecisionRule {
        self.spec.family().decision_rule()
    }

    fn weights(&self, counts: &[u32]) -> Result<WeightMatrix> {
        let config = self.ctx.config();
        let k = config.k();
        let n = config.sample_sizes();
        let cpp = |a: f64, b: f64, scale: f64| {
            WeightMatrix::from_fn(k, |i, j| {
                scale * cpp_weight_unchecked(counts[i], n[i], counts[j], n[j], a, b)
            })
        };
        Ok(match self.spec {
            DesignSpec::Cpp { a, b } => cpp(a, b, 1.0),
            DesignSpec::CppNex { a, b, omega_star } => cpp(a, b, omega_star),
            DesignSpec::CppGlobal { a, b, epsilon_star } => {
                let rates: Vec<f64> = counts
                    .iter()
                    .zip(n)
                    .map(|(&r, &m)| r as f64 / m as f64)
                    .collect();
                cpp(a, b, heterogeneity_from_rates(&rates, epsilon_star))
            }
            DesignSpec::Fujikawa { epsilon, tau } => {
                let table = self.ctx.pair_table()?;
                WeightMatrix::from_fn(k, |i, j| {
                    jsd_weight_from_divergence(table.get(i, j, counts[i], counts[j]), epsilon, tau)
                })
            }
            DesignSpec::JsdGlobal {
                epsilon,
                tau,
                epsilon_star,
            } => {
                let table = self.ctx.pair_table()?;
                let global =
                    global_weight_from_divergence(self.ctx.global_jsd(counts)?, epsilon_star);
                WeightMatrix::from_fn(k, |i, j| {
                    global
                        * jsd_weight_from_divergence(
                            table.get(i, j, counts[i], counts[j]),
                            epsilon,
                            tau,
                        )
                })
            }
            DesignSpec::Mml => {
                let r = ResponseVector::new(counts.to_vec());
                let rows = (0..k)
                    .map(|b| mml_weights(config, &r, b))
                    .collect::<Result<Vec<_>>>()?;
                WeightMatrix::from_rows(&rows)?
            }
            DesignSpec::Bma { .. } => unreachable!("model averaging has no weight matrix"),
        })
    }

    /// Tails `P(p_k > p0 | r)` followed by posterior means, `2K` values.
    fn summarize(&self, counts: &[u32], out: &mut [f64]) -> Result<()> {
        let config = self.ctx.config();
        let k = config.k();
        let p0 = config.null_rate();
        let (tails, means) = out.split_at_mut(k);
        if let (Some(space), DesignSpec::Bma { psi }) = (&self.bma, self.spec) {
            space.evaluate(config, counts, psi, p0, tails, means);
            return Ok(());
        }
        let w = self.weights(counts)?;
        let post = posterior_unchecked(config, counts, &w, self.spec.family().posterior_kind());
        for ((t, m), s) in tails.iter_mut().zip(means.iter_mut()).zip(&post.shapes) {
            *t = upper_tail_unchecked(p0, s);
            *m = s.mean();
        }
        Ok(())
    }

    /// Summary of a single outcome in basket order.
    pub fn outcome_summary(&self, r: &ResponseVector) -> Result<(Vec<f64>, Vec<f64>)> {
        self.ctx.config().validate_responses(r)?;
        let k = r.len();
        let mut out = vec![0.0; 2 * k];
        self.summarize(r.counts(), &mut out)?;
        let means = out.split_off(k);
        Ok((out, means))
    }

    fn check_exact(&self) -> Result<()> {
        if !self.spec.family().exact_by_default() && !self.allow_costly_exact {
            return Err(usage(format!(
                "{} is evaluated by simulation unless exact enumeration is explicitly enabled",
                self.spec.family()
            )));
        }
        Ok(())
    }

    fn exact_table(&self) -> Result<Arc<Vec<f64>>> {
        self.check_exact()?;
        self.exact_table
            .get_or_init(|| {
                let space = self.ctx.outcome_space()?;
                let k = space.k;
                let mut table = vec![0.0; space.rep_count() * 2 * k];
                table
                    .par_chunks_mut(2 * k)
                    .enumerate()
                    .try_for_each(|(i, chunk)| {
                        let mut r = vec![0u32; k];
                        space.representative(i, &mut r);
                        self.summarize(&r, chunk)
                    })?;
                Ok(Arc::new(table))
            })
            .clone()
    }

    /// Visits every outcome in lexicographic order with its probability
    /// under `rates` and its tails and posterior means in basket order.
    fn for_each_outcome(
        &self,
        rates: &[f64],
        mut visit: impl FnMut(f64, &[f64], &[f64]),
    ) -> Result<()> {
        let table = self.exact_table()?;
        let space = self.ctx.outcome_space()?;
        let canon = self.ctx.canonicalizer();
        let k = space.k;
        let pmfs: Vec<Vec<f64>> = self
            .ctx
            .config()
            .sample_sizes()
            .iter()
            .zip(rates)
            .map(|(&n, &p)| {
                let (lp, lq) = (p.ln(), (-p).ln_1p());
                (0..=n)
                    .map(|r| (ln_choose(n, r) + r as f64 * lp + (n - r) as f64 * lq).exp())
                    .collect()
            })
            .collect();
        let mut r = vec![0u32; k];
        let mut rep = vec![0u32; k];
        let mut slot = vec![0usize; k];
        let mut tails = vec![0.0; k];
        let mut means = vec![0.0; k];
        let mut total = CompensatedSum::default();
        for _ in 0..space.total {
            let prob: f64 = r
                .iter()
                .zip(&pmfs)
                .map(|(&x, pmf)| pmf[x as usize])
                .product();
            let key = canon.canonicalize(&r, &mut rep, &mut slot);
            let s = &table[space.rep_of_key(key) * 2 * k..][..2 * k];
            for j in 0..k {
                tails[j] = s[slot[j]];
                means[j] = s[k + slot[j]];
            }
            total.add(prob);
            visit(prob, &tails, &means);
            advance(&mut r, &space.radix);
        }
        if (total.value() - 1.0).abs() > 1e-10 {
            return Err(Error::Numeric {
                message: "outcome probabilities do not sum to one".into(),
                best_estimate: total.value(),
            });
        }
        Ok(())
    }

    fn check_lambda(lambda: f64) -> Result<()> {
        if lambda > 0.0 && lambda < 1.0 {
            Ok(())
        } else {
            Err(domain(format!(
                "threshold must lie in (0, 1), got {lambda}"
            )))
        }
    }

    /// Exact operating characteristics at threshold `lambda`.
    pub fn exact_oc(&self, scenario: &Scenario, lambda: f64) -> Result<OcResult> {
        let config = self.ctx.config();
        scenario.check(config)?;
        Self::check_lambda(lambda)?;
        let k = config.k();
        let p0 = config.null_rate();
        let rule = self.decision_rule();
        let null = scenario.null_baskets(p0);
        let mut rej = vec![CompensatedSum::default(); k];
        let mut mean = vec![CompensatedSum::default(); k];
        let mut fwer = CompensatedSum::default();
        self.for_each_outcome(&scenario.true_rates, |prob, tails, means| {
            let mut any_null = false;
            for j in 0..k {
                if rule.rejects(tails[j], lambda) {
                    rej[j].add(prob);
                    any_null |= null[j];
                }
                mean[j].add(prob * means[j]);
            }
            if any_null {
                fwer.add(prob);
            }
        })?;
        let rejection_rates: Vec<f64> = rej.iter().map(|s| s.value().clamp(0.0, 1.0)).collect();
        Ok(OcResult {
            scenario: scenario.name.clone(),
            lambda,
            ecd: ecd_unchecked(&rejection_rates, &scenario.true_rates, p0),
            rejection_rates,
            fwer: null
                .iter()
                .any(|&b| b)
                .then(|| fwer.value().clamp(0.0, 1.0)),
            mean_posterior_means: mean.iter().map(CompensatedSum::value).collect(),
            method: Method::Exact,
            n_sims: None,
            seed: None,
            mc_se: None,
        })
    }

    pub(crate) fn exact_null_profile(&self) -> Result<NullProfile> {
        let config = self.ctx.config();
        let total = self.ctx.outcome_space()?.total;
        let mut probs = Vec::with_capacity(total);
        let mut max_tails = Vec::with_capacity(total);
        self.for_each_outcome(&vec![config.null_rate(); config.k()], |prob, tails, _| {
            probs.push(prob);
            max_tails.push(tails.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        })?;
        Ok(NullProfile {
            probs: Some(probs),
            max_tails,
        })
    }

    /// Makes sure every replicate of `data` has a cached summary.
    fn fill_sim_cache(&self, data: &SimulatedData) -> Result<()> {
        let canon = self.ctx.canonicalizer();
        let k = data.k();
        let mut rep = vec![0u32; k];
        let mut slot = vec![0usize; k];
        let mut missing: Vec<(u128, Vec<u32>)> = {
            let cache = self.sim_cache.read().expect("cache lock");
            data.replicates()
                .filter_map(|r| {
                    let key = canon.canonicalize(r, &mut rep, &mut slot);
                    (!cache.contains_key(&key)).then(|| (key, rep.clone()))
                })
                .collect()
        };
        missing.sort_unstable_by_key(|(key, _)| *key);
        missing.dedup_by_key(|(key, _)| *key);
        let computed = missing
            .par_iter()
            .map(|(key, r)| {
                let mut out = vec![0.0; 2 * k];
                self.summarize(r, &mut out)?;
                Ok((*key, out.into_boxed_slice()))
            })
            .collect::<Result<Vec<_>>>()?;
        self.sim_cache.write().expect("cache lock").extend(computed);
        Ok(())
    }

    /// Visits the tails and posterior means of every replicate in order.
    fn for_each_replicate(
        &self,
        data: &SimulatedData,
        mut visit: impl FnMut(&[f64], &[f64]),
    ) -> Result<()> {
        if data.k() != self.ctx.config().k() {
            return Err(domain("simulated data do not match the trial"));
        }
        self.fill_sim_cache(data)?;
        let canon = self.ctx.canonicalizer();
        let k = data.k();
        let (mut rep, mut slot) = (vec![0u32; k], vec![0usize; k]);
        let (mut tails, mut means) = (vec![0.0; k], vec![0.0; k]);
        let cache = self.sim_cache.read().expect("cache lock");
        for r in data.replicates() {
            let s = &cache[&canon.canonicalize(r, &mut rep, &mut slot)];
            for j in 0..k {
                tails[j] = s[slot[j]];
                means[j] = s[k + slot[j]];
            }
            visit(&tails, &means);
        }
        Ok(())
    }

    /// Operating characteristics estimated from simulated data.
    pub fn simulated_oc(&self, data: &SimulatedData, lambda: f64) -> Result<OcResult> {
        let config = self.ctx.config();
        let scenario = &data.scenario;
        scenario.check(config)?;
        Self::check_lambda(lambda)?;
        let k = config.k();
        let p0 = config.null_rate();
        let rule = self.decision_rule();
        let null = scenario.null_baskets(p0);
        let mut rej = vec![0u64; k];
        let mut fwer = 0u64;
        let (mut correct, mut correct_sq) = (0u64, 0u64);
        let mut mean = vec![CompensatedSum::default(); k];
        let mut mean_sq = vec![CompensatedSum::default(); k];
        self.for_each_replicate(data, |tails, means| {
            let mut any_null = false;
            let mut c = 0u64;
            for j in 0..k {
                let hit = rule.rejects(tails[j], lambda);
                rej[j] += hit as u64;
                any_null |= hit && null[j];
                c += (hit != null[j]) as u64;
                mean[j].add(means[j]);
                mean_sq[j].add(means[j] * means[j]);
            }
            fwer += any_null as u64;
            correct += c;
            correct_sq += c * c;
        })?;
        let n = data.n_sims as f64;
        let prop_se = |p: f64| (p * (1.0 - p) / n).sqrt();
        // Standard error of a mean from its first two sample moments.
        let mean_se = |s: f64, sq: f64| {
            if data.n_sims < 2 {
                return 0.0;
            }
            let m = s / n;
            ((sq - n * m * m).max(0.0) / (n - 1.0) / n).sqrt()
        };
        let rejection_rates: Vec<f64> = rej.iter().map(|&c| c as f64 / n).collect();
        let fwer = null.iter().any(|&b| b).then(|| fwer as f64 / n);
        let mean_posterior_means: Vec<f64> = mean.iter().map(|s| s.value() / n).collect();
        let mc_se = McStandardErrors {
            rejection_rates: rejection_rates.iter().map(|&p| prop_se(p)).collect(),
            fwer: fwer.map(prop_se),
            ecd: mean_se(correct as f64, correct_sq as f64),
            mean_posterior_means: mean
                .iter()
                .zip(&mean_sq)
                .map(|(s, sq)| mean_se(s.value(), sq.value()))
                .collect(),
        };
        Ok(OcResult {
            scenario: scenario.name.clone(),
            lambda,
            ecd: ecd_unchecked(&rejection_rates, &scenario.true_rates, p0),
            rejection_rates,
            fwer,
            mean_posterior_means,
            method: Method::Simulated,
            n_sims: Some(data.n_sims),
            seed: Some(data.seed),
            mc_se: Some(mc_se),
        })
    }

    pub(crate) fn simulated_null_profile(&self, data: &SimulatedData) -> Result<NullProfile> {
        let p0 = self.ctx.config().null_rate();
        let null = data.scenario.null_baskets(p0);
        let mut max_tails = Vec::with_capacity(data.n_sims);
        self.for_each_replicate(data, |tails, _| {
            let m = tails
                .iter()
                .zip(&null)
                .filter(|(_, &is_null)| is_null)
                .map(|(&t, _)| t)
                .fold(f64::NEG_INFINITY, f64::max);
            max_tails.push(m);
        })?;
        Ok(NullProfile {
            probs: None,
            max_tails,
        })
    }
}
