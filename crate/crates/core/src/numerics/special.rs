use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Shape parameters of a beta distribution, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct BetaShape {
    alpha: f64,
    beta: f64,
}

impl BetaShape {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
            return Err(domain(format!(
                "beta shape parameters must be positive and finite, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Caller guarantees positivity (posterior updates of a valid prior).
    pub(crate) fn new_unchecked(alpha: f64, beta: f64) -> Self {
        debug_assert!(alpha > 0.0 && beta > 0.0, "invalid shape ({alpha}, {beta})");
        Self { alpha, beta }
    }

    pub const fn uniform() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    /// Bit pattern of both parameters, used as an exact cache key.
    pub(crate) fn key(&self) -> (u64, u64) {
        (self.alpha.to_bits(), self.beta.to_bits())
    }
}

impl TryFrom<(f64, f64)> for BetaShape {
    type Error = Error;

    fn try_from((alpha, beta): (f64, f64)) -> Result<Self> {
        Self::new(alpha, beta)
    }
}

impl From<BetaShape> for (f64, f64) {
    fn from(s: BetaShape) -> Self {
        (s.alpha, s.beta)
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln(sqrt(2 pi))
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Arguments at or above this use the Stirling series.
const STIRLING_CUTOFF: f64 = 10.0;

/// Remainder of Stirling's series, `ln Γ(x) - [(x - 1/2) ln x - x + ln sqrt(2π)]`, for x >= 10.
fn stirling_correction(x: f64) -> f64 {
    const COEF: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut sum = 0.0;
    for c in COEF.iter().rev() {
        sum = sum * inv2 + c;
    }
    sum * inv
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the series in its accurate range.
        return (PI / (PI * x).sin()).ln() - lanczos_ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x >= STIRLING_CUTOFF {
        (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_correction(x)
    } else {
        lanczos_ln_gamma(x)
    }
}

/// `ln B(a, b)` without the cancellation of the naive three-term sum when
/// one argument is large.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    let (p, q) = if a <= b { (a, b) } else { (b, a) };
    let sum = p + q;
    if p >= STIRLING_CUTOFF {
        let corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(sum);
        LN_SQRT_2PI - 0.5 * sum.ln()
            + (p - 0.5) * (p / sum).ln()
            + (q - 0.5) * (-p / sum).ln_1p()
            + corr
    } else if q >= STIRLING_CUTOFF {
        let corr = stirling_correction(q) - stirling_correction(sum);
        ln_gamma(p) + corr + p - p * sum.ln() + (q - 0.5) * (-p / sum).ln_1p()
    } else {
        ln_gamma(p) + ln_gamma(q) - ln_gamma(sum)
    }
}

/// Checked `ln B(a, b)`.
pub fn log_beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(domain(format!(
            "beta function needs positive arguments, got ({a}, {b})"
        )));
    }
    Ok(ln_beta(a, b))
}

/// `ln C(n, r)` for `r <= n`.
pub fn ln_choose(n: u32, r: u32) -> f64 {
    debug_assert!(r <= n);
    if r == 0 || r == n {
        return 0.0;
    }
    -((n as f64) + 1.0).ln() - ln_beta(r as f64 + 1.0, (n - r) as f64 + 1.0)
}

const CF_MAX_ITER: usize = 10_000;
const CF_EPS: f64 = 1e-16;
const CF_FPMIN: f64 = 1e-300;

/// Continued fraction for the incomplete beta function (modified Lentz).
fn incbeta_cf(a: f64, b: f64, x: f64) -> std::result::Result<f64, f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_FPMIN {
        d = CF_FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_FPMIN {
            d = CF_FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_FPMIN {
            c = CF_FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_FPMIN {
            d = CF_FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_FPMIN {
            c = CF_FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            return Ok(h);
        }
    }
    Err(h)
}

/// `P(X > x)` for `X ~ Beta(a, b)`, `0 < x < 1`. Errors carry the best estimate.
fn upper_tail(x: f64, a: f64, b: f64) -> std::result::Result<f64, f64> {
    let front = (a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b)).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        incbeta_cf(a, b, x)
            .map(|cf| 1.0 - front * cf / a)
            .map_err(|cf| 1.0 - front * cf / a)
    } else {
        incbeta_cf(b, a, 1.0 - x)
            .map(|cf| front * cf / b)
            .map_err(|cf| front * cf / b)
    }
}

/// Hot-path tail for already validated inputs; falls back to the best
/// continued-fraction estimate (never observed for shapes in this crate).
pub(crate) fn upper_tail_unchecked(x: f64, shape: &BetaShape) -> f64 {
    match upper_tail(x, shape.alpha, shape.beta) {
        Ok(v) | Err(v) => v.clamp(0.0, 1.0),
    }
}

/// Posterior probability `P(X > p0)` for `X ~ Beta(shape)`.
pub fn beta_tail(p0: f64, shape: &BetaShape) -> Result<f64> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(domain(format!("threshold must lie in (0, 1), got {p0}")));
    }
    upper_tail(p0, shape.alpha, shape.beta)
        .map(|v| v.clamp(0.0, 1.0))
        .map_err(|best| Error::Numeric {
            message: "incomplete beta continued fraction did not converge".into(),
            best_estimate: best,
        })
}

/// Log density of a beta distribution on the open unit interval.
pub fn beta_log_pdf(x: f64, shape: &BetaShape) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(domain(format!(
            "density argument must lie in (0, 1), got {x}"
        )));
    }
    Ok(LogDensity::new(shape).eval(x))
}

/// `ln P(R = r)` for `R ~ BetaBinomial(n, alpha, beta)`.
pub fn log_beta_binomial_pmf(r: u32, n: u32, shape: &BetaShape) -> Result<f64> {
    if r > n {
        return Err(domain(format!("count {r} exceeds sample size {n}")));
    }
    let (a, b) = (shape.alpha, shape.beta);
    Ok(ln_choose(n, r) + ln_beta(r as f64 + a, (n - r) as f64 + b) - ln_beta(a, b))
}

/// Beta log density with its normalising constant precomputed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogDensity {
    am1: f64,
    bm1: f64,
    ln_norm: f64,
}

impl LogDensity {
    pub(crate) fn new(shape: &BetaShape) -> Self {
        Self {
            am1: shape.alpha - 1.0,
            bm1: shape.beta - 1.0,
            ln_norm: ln_beta(shape.alpha, shape.beta),
        }
    }

    #[inline]
    pub(crate) fn eval(&self, x: f64) -> f64 {
        self.eval_logs(x.ln(), (-x).ln_1p())
    }

    /// Log density from `ln x` and `ln(1 - x)`, which keeps full precision
    /// near either end of the unit interval.
    #[inline]
    pub(crate) fn eval_logs(&self, ln_x: f64, ln_1mx: f64) -> f64 {
        // Avoid 0 * -inf when a shape parameter equals one.
        let lx = if self.am1 == 0.0 {
            0.0
        } else {
            self.am1 * ln_x
        };
        let l1x = if self.bm1 == 0.0 {
            0.0
        } else {
            self.bm1 * ln_1mx
        };
        lx + l1x - self.ln_norm
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn log_beta_trivial_values() {
        assert_eq!(log_beta_fn(1.0, 1.0).unwrap(), 0.0);
        assert!(rel(log_beta_fn(2.0, 3.0).unwrap(), (1.0f64 / 12.0).ln()) < 1e-14);
    }

    // Reference values from a 40-digit gamma implementation.
    #[test]
    fn log_beta_matches_high_precision() {
        let cases = [
            (11.0, 11.0, -15.171_313_752_325_877),
            (1e6, 1.0, -13.815_510_557_964_274),
            (1e6, 1e6, -1_386_300.003_362_921_1),
            (0.5, 12.5, -0.680_502_040_800_740_4),
            (250.5, 3.25, -17.029_982_239_551_989),
        ];
        for (a, b, want) in cases {
            let got = log_beta_fn(a, b).unwrap();
            assert!(rel(got, want) < 1e-12, "lnB({a},{b}) = {got}, want {want}");
        }
    }

    #[test]
    fn log_beta_rejects_nonpositive() {
        assert!(matches!(log_beta_fn(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(log_beta_fn(1.0, -2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn ln_gamma_integers() {
        let mut fact = 1.0f64;
        for n in 1..30u32 {
            assert!((ln_gamma(n as f64) - fact.ln()).abs() < 1e-12 * fact.ln().max(1.0));
            fact *= n as f64;
        }
    }

    #[test]
    fn tail_examples() {
        assert!((beta_tail(0.15, &BetaShape::uniform()).unwrap() - 0.85).abs() < 1e-14);
        for a in [0.3, 1.0, 7.5, 40.0, 2500.0] {
            let s = BetaShape::new(a, a).unwrap();
            assert!((beta_tail(0.5, &s).unwrap() - 0.5).abs() < 1e-12, "a = {a}");
        }
    }

    #[test]
    fn tail_matches_high_precision() {
        let cases = [
            (11.0, 11.0, 0.15, 0.999_929_904_865_579_5),
            (9.0, 13.0, 0.15, 0.997_982_256_038_280_3),
            (21.0, 1.0, 0.15, 1.0),
            (2.5, 40.75, 0.3, 1.780_330_747_746_009e-5),
            (500.0, 2000.0, 0.15, 0.999_999_999_990_338_2),
            (0.5, 0.5, 0.9, 0.204_832_764_699_133_45),
            (4.0, 18.0, 0.15, 0.611_300_839_734_312_9),
        ];
        for (a, b, x, want) in cases {
            let got = beta_tail(x, &BetaShape::new(a, b).unwrap()).unwrap();
            assert!(
                (got - want).abs() < 1e-12,
                "tail({x}; {a},{b}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn tail_rejects_bad_threshold() {
        let s = BetaShape::uniform();
        for p0 in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(beta_tail(p0, &s), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn log_pdf_examples() {
        assert_eq!(beta_log_pdf(0.3, &BetaShape::uniform()).unwrap(), 0.0);
        let s = BetaShape::new(2.0, 2.0).unwrap();
        assert!((beta_log_pdf(0.5, &s).unwrap() - 1.5f64.ln()).abs() < 1e-14);
        let s = BetaShape::new(3.0, 7.0).unwrap();
        assert!((beta_log_pdf(0.2, &s).unwrap() - 0.971_691_954_757_964).abs() < 1e-13);
        assert!(beta_log_pdf(0.0, &s).is_err());
        assert!(beta_log_pdf(1.0, &s).is_err());
    }

    #[test]
    fn beta_binomial_examples() {
        assert_eq!(
            log_beta_binomial_pmf(0, 0, &BetaShape::new(2.0, 5.0).unwrap()).unwrap(),
            0.0
        );
        for n in [1u32, 5, 20, 57] {
            for r in 0..=n {
                let got = log_beta_binomial_pmf(r, n, &BetaShape::uniform()).unwrap();
                assert!((got + ((n + 1) as f64).ln()).abs() < 1e-12);
            }
        }
        let got = log_beta_binomial_pmf(7, 20, &BetaShape::new(2.0, 3.0).unwrap()).unwrap();
        assert!((got + 2.537_657_215_173_529).abs() < 1e-12);
        assert!(matches!(
            log_beta_binomial_pmf(4, 3, &BetaShape::uniform()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn shape_validation() {
        assert!(BetaShape::new(0.0, 1.0).is_err());
        assert!(BetaShape::new(1.0, f64::INFINITY).is_err());
        assert!(BetaShape::new(f64::NAN, 1.0).is_err());
        assert!((BetaShape::new(9.0, 23.0).unwrap().mean() - 0.28125).abs() < 1e-15);
    }
}
