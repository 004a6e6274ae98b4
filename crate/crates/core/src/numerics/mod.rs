//! Special functions, quadrature and divergences between beta distributions.
//!
//! Everything here is pure and stateless.

mod divergence;
mod quadrature;
mod special;

pub use divergence::{generalized_jsd, kld_beta_to_mixture, DEFAULT_DIVERGENCE_TOL};
pub use quadrature::{integrate, integrate_interval, MAX_SUBDIVISIONS};
pub use special::{
    beta_log_pdf, beta_tail, ln_beta, ln_choose, ln_gamma, log_beta_binomial_pmf, log_beta_fn,
    BetaShape,
};

pub(crate) use special::upper_tail_unchecked;

/// Numerically stable `ln(sum(exp(xs)))`; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
