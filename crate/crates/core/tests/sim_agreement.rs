//! Simulator estimates against the closed forms.

use stubborn_mining::analytic::{
    combined_revenue, double_spend_probs, revenue, CombinedRevenueParams, ModelParams, Strategy,
    StubbornLevel,
};
use stubborn_mining::sim::{
    self, chunk_rng, run_cycle_stealth, CycleEnd, DoubleSpendEvent, SimConfig, SimEstimate,
};

fn p(alpha: f64, gamma: f64) -> ModelParams {
    ModelParams::new(alpha, gamma).unwrap()
}

fn assert_within(est: &SimEstimate, analytic: f64, sigmas: f64, ctx: &str) {
    let d = (est.mean - analytic).abs();
    if est.std_error == 0.0 {
        assert!(
            d < 1e-12,
            "{ctx}: {} vs {analytic} with zero spread",
            est.mean
        );
    } else {
        assert!(
            d < sigmas * est.std_error,
            "{ctx}: {} ± {} vs {analytic}",
            est.mean,
            est.std_error
        );
    }
}

#[test]
fn revenue_agrees_on_coarse_grid() {
    let mut seed = 0;
    for alpha in [0.1, 0.25, 0.4] {
        for gamma in [0.0, 0.5, 1.0] {
            for strategy in [Strategy::Stubborn, Strategy::Stealth] {
                for level in [1u32, 2, 3, 5, 8] {
                    seed += 1;
                    let params = p(alpha, gamma);
                    let cfg = SimConfig::new(params, strategy, level.into(), 1)
                        .cycles(100_000)
                        .seed(seed);
                    let run = sim::simulate(cfg).unwrap();
                    assert_eq!(run.totals.truncated, 0);
                    let analytic = revenue(params, strategy, level.into()).unwrap().ratio;
                    let ctx = format!("{strategy} α={alpha} γ={gamma} level {level}");
                    assert_within(&run.revenue_ratio(), analytic, 4.5, &ctx);
                }
            }
        }
    }
}

#[test]
fn events_and_combined_agree() {
    let mut seed = 500;
    for (alpha, gamma) in [(0.2, 0.3), (0.35, 0.0), (0.35, 1.0), (0.45, 0.6)] {
        for strategy in [Strategy::Stubborn, Strategy::Stealth] {
            for k in [3u32, 6] {
                seed += 1;
                let params = p(alpha, gamma);
                let cfg = SimConfig::new(params, strategy, (k + 1).into(), k)
                    .cycles(200_000)
                    .seed(seed);
                let run = sim::simulate(cfg).unwrap();
                let ctx = format!("{strategy} α={alpha} γ={gamma} k={k}");
                let est = run.event_probs();
                let exact = double_spend_probs(params, strategy, k).unwrap();
                assert_within(&est.double_spending, exact.double_spending, 4.5, &ctx);
                assert_within(&est.move_funds, exact.move_funds, 4.5, &ctx);
                assert_within(&est.service, exact.service, 4.5, &ctx);
                let reward = CombinedRevenueParams::new(k, 3.0).unwrap();
                let analytic = combined_revenue(params, strategy, reward).unwrap();
                assert_within(&run.combined_reward(3.0).unwrap(), analytic, 4.5, &ctx);
            }
        }
    }
}

#[test]
fn accounting_matches_cycle_endings() {
    let cfg = SimConfig::new(p(0.3, 0.5), Strategy::Stubborn, 3.into(), 2)
        .cycles(100_000)
        .seed(9);
    let run = sim::simulate(cfg).unwrap();
    let t = run.totals;
    assert_eq!(t.adopts + t.overrides, t.cycles);
    assert_eq!(
        t.double_spending + t.move_funds + t.service + t.not_applicable,
        t.cycles
    );
    // every cycle credits at least one block to someone
    assert!(t.adversary_blocks + t.honest_blocks >= t.cycles);
}

#[test]
fn stealth_two_matches_stubborn_two() {
    for (alpha, gamma) in [(0.2, 0.4), (0.4, 0.9)] {
        let params = p(alpha, gamma);
        let stubborn = SimConfig::new(params, Strategy::Stubborn, 2.into(), 1)
            .cycles(50_000)
            .seed(77);
        let stealth = SimConfig::new(params, Strategy::Stealth, 2.into(), 1)
            .cycles(50_000)
            .seed(77);
        assert_eq!(
            sim::simulate(stubborn).unwrap().totals,
            sim::simulate(stealth).unwrap().totals
        );
    }
}

#[test]
fn stealth_never_moves_funds() {
    let params = p(0.4, 0.7);
    let mut rng = chunk_rng(3, 0);
    for level in [2u32, 4, 7] {
        for _ in 0..20_000 {
            let o = run_cycle_stealth(params, StubbornLevel::Finite(level), level - 1, &mut rng)
                .unwrap();
            assert_ne!(o.event, DoubleSpendEvent::MoveFunds);
            assert_ne!(o.end, CycleEnd::Truncated);
        }
    }
}

#[test]
fn stealth_double_spend_spot_value() {
    let params = p(0.41, 1.0);
    let run = sim::simulate(
        SimConfig::new(params, Strategy::Stealth, 7.into(), 6)
            .cycles(1_000_000)
            .seed(21),
    )
    .unwrap();
    let est = run.event_probs().double_spending;
    assert_within(&est, 0.107666, 4.0, "stealth DS");
    assert!((est.mean - 0.108).abs() < 3e-3);
}

#[test]
fn long_run_selfish_mining_ratio() {
    let params = p(0.35, 0.0);
    let run = sim::simulate(
        SimConfig::new(params, Strategy::Stubborn, 2.into(), 1)
            .cycles(10_000_000)
            .seed(4),
    )
    .unwrap();
    let est = run.revenue_ratio();
    assert_within(&est, 0.366509, 4.0, "ρ_2");
    assert!(est.std_error < 5e-4);
}
