use crate::error::{Error, Result};

/// Upper bound on the number of subintervals before giving up.
pub const MAX_SUBDIVISIONS: usize = 2000;

/// Intervals the domain is split into before adaptation starts, so narrow
/// peaks are not missed by the first rule application.
const INITIAL_PIECES: usize = 8;

// 15-point Kronrod abscissae on [-1, 1] (non-negative half) with the
// embedded 7-point Gauss rule at the odd indices.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Adaptive Gauss-Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// The rule never evaluates `f` at the endpoints. The interval with the
/// largest error estimate is bisected until the summed estimate is within
/// `tol`; the result depends only on `f`, the bounds and `tol`.
pub fn integrate_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !(b > a) {
        return Err(Error::Domain(format!(
            "integration needs tol > 0 and a < b, got tol = {tol}, [{a}, {b}]"
        )));
    }
    let width = (b - a) / INITIAL_PIECES as f64;
    let mut segments: Vec<Segment> = (0..INITIAL_PIECES)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == INITIAL_PIECES {
                b
            } else {
                lo + width
            };
            gauss_kronrod(&f, lo, hi)
        })
        .collect();

    loop {
        let total_error: f64 = segments.iter().map(|s| s.error).sum();
        if total_error <= tol {
            break;
        }
        if total_error.is_nan() {
            return Err(Error::Numeric {
                message: "integrand produced NaN".into(),
                best_estimate: f64::NAN,
            });
        }
        if segments.len() >= MAX_SUBDIVISIONS {
            return Err(Error::Numeric {
                message: format!(
                    "quadrature error estimate {total_error:e} above tolerance {tol:e} after {MAX_SUBDIVISIONS} subdivisions"
                ),
                best_estimate: segments.iter().map(|s| s.value).sum(),
            });
        }
        let (worst, _) =
            segments
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, s)| {
                    if s.error > best.1 {
                        (i, s.error)
                    } else {
                        best
                    }
                });
        let seg = segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        let scale = seg.a.abs().max(seg.b.abs());
        if seg.b - seg.a <= (4.0 * f64::EPSILON * scale).max(1e-250) {
            // Interval can no longer be split in floating point.
            return Err(Error::Numeric {
                message: "quadrature interval collapsed below machine resolution".into(),
                best_estimate: segments.iter().map(|s| s.value).sum(),
            });
        }
        segments[worst] = gauss_kronrod(&f, seg.a, mid);
        segments.push(gauss_kronrod(&f, mid, seg.b));
    }
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(segments.iter().map(|s| s.value).sum())
}

/// `∫₀¹ f(x) dx` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<f64> {
    integrate_interval(f, 0.0, 1.0, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{beta_log_pdf, BetaShape};

    #[test]
    fn constants_and_polynomials() {
        assert!((integrate(|_| 1.0, 1e-10).unwrap() - 1.0).abs() < 1e-10);
        assert!((integrate(|x| x * x, 1e-10).unwrap() - 1.0 / 3.0).abs() < 1e-10);
        for deg in 0..12 {
            let got = integrate(|x: f64| x.powi(deg), 1e-12).unwrap();
            assert!(
                (got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-12,
                "degree {deg}"
            );
        }
    }

    #[test]
    fn density_normalises() {
        let s = BetaShape::new(3.0, 5.0).unwrap();
        let got = integrate(|x| beta_log_pdf(x, &s).unwrap().exp(), 1e-10).unwrap();
        assert!((got - 1.0).abs() < 1e-10);
        // Integrable endpoint singularities converge too.
        let s = BetaShape::new(0.5, 0.7).unwrap();
        let got = integrate(|x| beta_log_pdf(x, &s).unwrap().exp(), 1e-6).unwrap();
        assert!((got - 1.0).abs() < 1e-5);
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (10.0 * x).sin().abs();
        let a = integrate(f, 1e-9).unwrap();
        let b = integrate(f, 1e-9).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn non_convergence_reports_best_estimate() {
        let err = integrate(|x| 1.0 / x, 1e-12).unwrap_err();
        match err {
            Error::Numeric { best_estimate, .. } => assert!(best_estimate > 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(integrate(|x| x, 0.0).is_err());
        assert!(integrate_interval(|x| x, 1.0, 0.0, 1e-8).is_err());
    }
}
