use super::quadrature::integrate_interval;
use super::special::{BetaShape, LogDensity};
use crate::error::{domain, Result};

/// Absolute quadrature tolerance for divergence integrals.
pub const DEFAULT_DIVERGENCE_TOL: f64 = 1e-8;

/// Densities below this contribute nothing (limit of x ln x at 0).
const LN_DENSITY_FLOOR: f64 = -690.775_527_898_213_7; // ln(1e-300)

fn check_base(log_base: f64) -> Result<f64> {
    if !(log_base > 1.0 && log_base.is_finite()) {
        return Err(domain(format!("log base must exceed 1, got {log_base}")));
    }
    Ok(log_base.ln())
}

/// Kullback-Leibler divergence `KL(p || Σ w_j q_j)` in units of `log_base`.
pub fn kld_beta_to_mixture(
    p: &BetaShape,
    components: &[BetaShape],
    mix_weights: &[f64],
    log_base: f64,
) -> Result<f64> {
    let ln_base = check_base(log_base)?;
    if components.is_empty() || components.len() != mix_weights.len() {
        return Err(domain(format!(
            "mixture needs matching non-empty components and weights ({} vs {})",
            components.len(),
            mix_weights.len()
        )));
    }
    if mix_weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(domain("mixture weights must be non-negative"));
    }
    let total: f64 = mix_weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(domain(format!("mixture weights sum to {total}, not 1")));
    }
    if components.iter().all(|c| c == p) {
        return Ok(0.0);
    }

    let target = LogDensity::new(p);
    let mixture: Vec<(f64, LogDensity)> = components
        .iter()
        .zip(mix_weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(c, w)| (w.ln(), LogDensity::new(c)))
        .collect();

    let integrand = |ln_x: f64, ln_1mx: f64| {
        let lp = target.eval_logs(ln_x, ln_1mx);
        if lp < LN_DENSITY_FLOOR {
            return 0.0;
        }
        let mut buf = vec![0.0; mixture.len()];
        for (slot, (lw, dens)) in buf.iter_mut().zip(&mixture) {
            *slot = lw + dens.eval_logs(ln_x, ln_1mx);
        }
        lp.exp() * (lp - super::log_sum_exp(&buf))
    };
    Ok(integrate_halves(integrand, DEFAULT_DIVERGENCE_TOL * ln_base)? / ln_base)
}

/// `∫₀¹ f(ln x, ln(1 - x)) dx`, with the upper half integrated in `1 - x`.
///
/// Shapes below one put visible mass within one ulp of `x = 1`, which a
/// bisection in `x` cannot resolve.
fn integrate_halves<F: Fn(f64, f64) -> f64>(f: F, tol: f64) -> Result<f64> {
    let lower = integrate_interval(|x| f(x.ln(), (-x).ln_1p()), 0.0, 0.5, 0.5 * tol)?;
    let upper = integrate_interval(|t| f((-t).ln_1p(), t.ln()), 0.0, 0.5, 0.5 * tol)?;
    Ok(lower + upper)
}

/// Jensen-Shannon divergence of equally weighted beta distributions,
/// `(1/K) Σ KL(P_i || P̄)`, in units of `log_base`.
///
/// With `log_base = K` the value lies in `[0, 1]`.
pub fn generalized_jsd(shapes: &[BetaShape], log_base: f64) -> Result<f64> {
    let ln_base = check_base(log_base)?;
    if shapes.len() < 2 {
        return Err(domain("divergence needs at least two distributions"));
    }
    if shapes.iter().all(|s| s == &shapes[0]) {
        return Ok(0.0);
    }
    let k = shapes.len() as f64;
    let ln_k = k.ln();
    let dens: Vec<LogDensity> = shapes.iter().map(LogDensity::new).collect();

    let integrand = |ln_x: f64, ln_1mx: f64| {
        let mut logs = [0.0f64; 16];
        let mut heap;
        let logs: &mut [f64] = if dens.len() <= logs.len() {
            &mut logs[..dens.len()]
        } else {
            heap = vec![0.0; dens.len()];
            &mut heap
        };
        for (l, d) in logs.iter_mut().zip(&dens) {
            *l = d.eval_logs(ln_x, ln_1mx);
        }
        let lm = super::log_sum_exp(logs) - ln_k;
        let mut acc = 0.0;
        for &l in logs.iter() {
            if l >= LN_DENSITY_FLOOR {
                acc += l.exp() * (l - lm);
            }
        }
        acc / k
    };
    Ok(integrate_halves(integrand, DEFAULT_DIVERGENCE_TOL * ln_base)? / ln_base)
}
