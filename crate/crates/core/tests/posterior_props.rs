use powerbasket::numerics::BetaShape;
use powerbasket::posterior::{decide, fujikawa_posterior, posterior_means, power_prior_posterior};
use powerbasket::weights::WeightMatrix;
use powerbasket::{DecisionRule, ResponseVector, TrialConfig};
use proptest::prelude::*;

const K: usize = 4;
const N: u32 = 20;

fn config(prior: (f64, f64)) -> TrialConfig {
    TrialConfig::uniform(K, N, 0.15, BetaShape::new(prior.0, prior.1).unwrap()).unwrap()
}

fn symmetric_weights() -> impl Strategy<Value = WeightMatrix> {
    proptest::collection::vec(0.0f64..=1.0, K * (K - 1) / 2).prop_map(|upper| {
        let mut m = vec![vec![1.0; K]; K];
        let mut it = upper.into_iter();
        for i in 0..K {
            for j in (i + 1)..K {
                let w = it.next().unwrap();
                m[i][j] = w;
                m[j][i] = w;
            }
        }
        WeightMatrix::from_rows(&m).unwrap()
    })
}

fn inputs() -> impl Strategy<Value = ((f64, f64), Vec<u32>, WeightMatrix)> {
    (
        (0.5f64..3.0, 0.5f64..3.0),
        proptest::collection::vec(0..=N, K),
        symmetric_weights(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fujikawa_adds_shared_prior((prior, r, w) in inputs()) {
        let c = config(prior);
        let rv = ResponseVector::new(r);
        let pp = power_prior_posterior(&c, &rv, &w).unwrap();
        let fj = fujikawa_posterior(&c, &rv, &w).unwrap();
        for k in 0..K {
            let off: f64 = (0..K).filter(|&i| i != k).map(|i| w.get(k, i)).sum();
            let a = pp.shapes[k].alpha() + off * prior.0;
            let b = pp.shapes[k].beta() + off * prior.1;
            prop_assert!((fj.shapes[k].alpha() - a).abs() <= 1e-12 * a);
            prop_assert!((fj.shapes[k].beta() - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn no_borrowing_makes_forms_agree(prior in (0.5f64..3.0, 0.5f64..3.0), r in proptest::collection::vec(0..=N, K)) {
        let c = config(prior);
        let rv = ResponseVector::new(r);
        let w = WeightMatrix::identity(K);
        prop_assert_eq!(power_prior_posterior(&c, &rv, &w).unwrap(), fujikawa_posterior(&c, &rv, &w).unwrap());
    }

    #[test]
    fn pooling_pulls_toward_richer_data(
        prior in (0.5f64..3.0, 0.5f64..3.0),
        r in proptest::collection::vec(0..=N, 2),
        w in 0.0f64..0.9,
        dw in 0.01f64..0.1,
    ) {
        let c = TrialConfig::uniform(2, N, 0.15, BetaShape::new(prior.0, prior.1).unwrap()).unwrap();
        let rv = ResponseVector::new(r.clone());
        let mean = |x: f64| {
            let m = WeightMatrix::from_rows(&[vec![1.0, x], vec![x, 1.0]]).unwrap();
            posterior_means(&power_prior_posterior(&c, &rv, &m).unwrap())[0]
        };
        prop_assume!(r[1] as f64 / N as f64 > mean(w));
        prop_assert!(mean(w + dw) > mean(w));
    }

    #[test]
    fn higher_threshold_never_adds_rejections(
        (prior, r, w) in inputs(),
        lo in 0.5f64..0.99,
        gap in 0.0f64..0.0099,
        above in any::<bool>(),
    ) {
        let rule = if above { DecisionRule::Above } else { DecisionRule::AtLeast };
        let post = power_prior_posterior(&config(prior), &ResponseVector::new(r), &w).unwrap();
        let at_lo = decide(&post, 0.15, lo, rule).unwrap();
        let at_hi = decide(&post, 0.15, lo + gap, rule).unwrap();
        for k in 0..K {
            prop_assert!(at_lo.rejects[k] || !at_hi.rejects[k]);
        }
    }

    #[test]
    fn relabelling_permutes_posteriors(
        (prior, r, w) in inputs(),
        perm in Just((0..K).collect::<Vec<_>>()).prop_shuffle(),
        lambda in 0.5f64..0.99,
    ) {
        let c = config(prior);
        let moved_r: Vec<u32> = perm.iter().map(|&p| r[p]).collect();
        let moved_w = WeightMatrix::from_fn(K, |i, j| w.get(perm[i], perm[j]));
        for fujikawa in [false, true] {
            let f = if fujikawa { fujikawa_posterior } else { power_prior_posterior };
            let post = f(&c, &ResponseVector::new(r.clone()), &w).unwrap();
            let moved = f(&c, &ResponseVector::new(moved_r.clone()), &moved_w).unwrap();
            let d = decide(&post, 0.15, lambda, DecisionRule::AtLeast).unwrap();
            let dm = decide(&moved, 0.15, lambda, DecisionRule::AtLeast).unwrap();
            for k in 0..K {
                let (a, b) = (moved.shapes[k], post.shapes[perm[k]]);
                prop_assert!((a.alpha() - b.alpha()).abs() <= 1e-12 * b.alpha());
                prop_assert!((a.beta() - b.beta()).abs() <= 1e-12 * b.beta());
                if a == b {
                    prop_assert_eq!(dm.rejects[k], d.rejects[perm[k]]);
                }
            }
        }
    }
}
