use proptest::prelude::*;

use stubborn_mining::analytic::{
    breakeven_reward, combined_revenue, double_spend_probs, revenue, CombinedRevenueParams,
    ModelParams, RewardBound, Strategy as Mining, StubbornLevel,
};
use stubborn_mining::optimize::{self, DEFAULT_CAP};
use stubborn_mining::report::ReportValue;
use stubborn_mining::sim::{self, SimConfig};

fn params() -> impl Strategy<Value = ModelParams> {
    (0.01f64..0.49, 0.0f64..=1.0).prop_map(|(a, g)| ModelParams::new(a, g).unwrap())
}

fn strategy() -> impl Strategy<Value = Mining> {
    prop_oneof![Just(Mining::Stubborn), Just(Mining::Stealth)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ratio_is_a_share(params in params(), s in strategy(), level in 1u32..40) {
        let r = revenue(params, s, level.into()).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.ratio));
        prop_assert!(r.denominator() > 0.0);
    }

    #[test]
    fn level_one_earns_alpha(params in params(), s in strategy()) {
        let r = revenue(params, s, 1.into()).unwrap().ratio;
        prop_assert!((r - params.alpha()).abs() < 1e-12);
    }

    #[test]
    fn stealth_never_beats_stubborn(params in params(), level in 1u32..30) {
        let stubborn = revenue(params, Mining::Stubborn, level.into()).unwrap().ratio;
        let stealth = revenue(params, Mining::Stealth, level.into()).unwrap().ratio;
        prop_assert!(stealth <= stubborn + 1e-12);
    }

    #[test]
    fn events_partition(params in params(), s in strategy(), k in 1u32..30) {
        let e = double_spend_probs(params, s, k).unwrap();
        for v in [e.double_spending, e.move_funds, e.service] {
            prop_assert!((-1e-15..=1.0 + 1e-15).contains(&v));
        }
        prop_assert!((e.double_spending + e.move_funds + e.service - 1.0).abs() < 1e-12);
        if s == Mining::Stealth {
            prop_assert_eq!(e.move_funds, 0.0);
        }
    }

    #[test]
    fn optimum_dominates_every_level(params in params(), s in strategy()) {
        let best = optimize::optimal(params, s, DEFAULT_CAP).unwrap();
        for level in 1u32..40 {
            let r = revenue(params, s, level.into()).unwrap().ratio;
            prop_assert!(r <= best.best_ratio + 1e-12, "level {level}: {r} > {}", best.best_ratio);
        }
        let at = revenue(params, s, best.best_level).unwrap().ratio;
        prop_assert!((at - best.best_ratio).abs() < 1e-12);
    }

    #[test]
    fn combined_revenue_is_monotone_in_reward(params in params(), s in strategy(), k in 1u32..12, r in 0.0f64..20.0) {
        let at = |reward| combined_revenue(params, s, CombinedRevenueParams::new(k, reward).unwrap()).unwrap();
        let (lo, mid, hi) = (at(r), at(r + 1.0), at(r + 2.0));
        prop_assert!(lo <= mid + 1e-12 && mid <= hi + 1e-12);
        prop_assert!((2.0 * mid - lo - hi).abs() < 1e-9);
    }

    #[test]
    fn breakeven_is_a_root(params in params(), s in strategy(), k in 1u32..12) {
        match breakeven_reward(params, k, s).unwrap() {
            RewardBound::Finite(r) if r > 0.0 => {
                let back = combined_revenue(params, s, CombinedRevenueParams::new(k, r).unwrap()).unwrap();
                prop_assert!((back - params.alpha()).abs() < 1e-10);
            }
            RewardBound::Finite(_) => {
                prop_assert!(revenue(params, s, (k + 1).into()).unwrap().ratio >= params.alpha());
            }
            RewardBound::Infinite => {
                let big = combined_revenue(params, s, CombinedRevenueParams::new(k, 1e6).unwrap()).unwrap();
                prop_assert!(big < params.alpha());
            }
        }
    }

    #[test]
    fn level_text_round_trips(level in prop_oneof![Just(StubbornLevel::Infinite), (1u32..10_000).prop_map(StubbornLevel::Finite)]) {
        let parsed: StubbornLevel = level.to_string().parse().unwrap();
        prop_assert_eq!(parsed, level);
        let json = serde_json::to_string(&level).unwrap();
        prop_assert_eq!(serde_json::from_str::<StubbornLevel>(&json).unwrap(), level);
    }

    #[test]
    fn report_value_json_round_trips(v in prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()).prop_map(ReportValue::Real),
        any::<u32>().prop_map(ReportValue::Level),
        Just(ReportValue::Infinite),
    ]) {
        let json = serde_json::to_string(&v).unwrap();
        let back: ReportValue = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn simulation_ignores_worker_count(params in params(), s in strategy(), level in 1u32..8, seed in any::<u64>()) {
        let cfg = SimConfig::new(params, s, level.into(), 3).cycles(20_000).seed(seed);
        let one = sim::simulate(cfg.workers(1)).unwrap();
        let many = sim::simulate(cfg.workers(4)).unwrap();
        prop_assert_eq!(one.totals, many.totals);
        prop_assert_eq!(one.batches, many.batches);
    }
}
