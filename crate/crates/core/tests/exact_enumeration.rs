//! Exact probability propagation over the attack-cycle state machine,
//! independent of both the closed forms and the simulator.
//!
//! Probability mass is pushed through every reachable `(A, H, C, fork, confirmed)`
//! state one arrival at a time until the mass still inside the cycle is
//! negligible; terminal states are scored directly.

use std::collections::HashMap;

use stubborn_mining::analytic::{
    combined_affine, double_spend_probs, revenue, ModelParams, Strategy, StubbornLevel,
};

#[derive(Default, Debug)]
struct Expectations {
    adversarial: f64,
    total: f64,
    replaced: f64,
    double_spending: f64,
    move_funds: f64,
    service: f64,
    residual: f64,
}

/// (a, h, c, fork_active, honest_last, confirmed_run)
type State = (u32, u32, u32, bool, bool, u32);

fn propagate(alpha: f64, gamma: f64, strategy: Strategy, level: u32, k: u32) -> Expectations {
    let beta = 1.0 - alpha;
    let may_match = |a: u32, h: u32| match strategy {
        Strategy::Stubborn => h <= a && a < level,
        Strategy::Stealth => a == h && a + 1 == level,
    };
    let mut out = Expectations::default();
    let mut layer: HashMap<State, f64> = HashMap::from([((0, 0, 0, false, false, 0), 1.0)]);

    let finish =
        |out: &mut Expectations, p: f64, adopt: bool, a: u32, h: u32, c: u32, confirmed: u32| {
            let (x, y) = if adopt { (c, h - c) } else { (a, 0) };
            out.adversarial += p * x as f64;
            out.total += p * (x + y) as f64;
            if h == 0 {
                return;
            }
            let lost = if adopt { c > 0 } else { true };
            if !lost {
                out.service += p;
            } else if confirmed > 0 {
                out.double_spending += p;
                out.replaced += p * confirmed as f64;
            } else {
                out.move_funds += p;
            }
        };

    for _ in 0..20_000 {
        let mut next: HashMap<State, f64> = HashMap::new();
        for (&(a, h, c, active, _, confirmed), &p) in &layer {
            // adversarial block
            let (na, pa) = (a + 1, p * alpha);
            if na == h + 1 && na >= level {
                finish(&mut out, pa, false, na, h, c, confirmed);
            } else {
                *next
                    .entry((na, h, c, active, false, confirmed))
                    .or_default() += pa;
            }
            // honest block, possibly on the released adversarial branch
            let branches: &[(f64, bool)] = if active {
                &[(gamma, true), (1.0 - gamma, false)]
            } else {
                &[(1.0, false)]
            };
            for &(w, switch) in branches {
                let ph = p * beta * w;
                if ph == 0.0 {
                    continue;
                }
                let nc = if switch { h } else { c };
                let nh = h + 1;
                let nconf = if nc == 0 && nh >= k {
                    confirmed.max(nh - k + 1)
                } else {
                    confirmed
                };
                if nh == a + 1 {
                    finish(&mut out, ph, true, a, nh, nc, nconf);
                } else if a == nh + 1 && a >= level {
                    finish(&mut out, ph, false, a, nh, nc, nconf);
                } else {
                    let key = (a, nh, nc, may_match(a, nh), true, nconf);
                    *next.entry(key).or_default() += ph;
                }
            }
        }
        layer = next;
        let alive: f64 = layer.values().sum();
        if alive < 1e-15 {
            break;
        }
    }
    out.residual = layer.values().sum();
    out
}

fn params(alpha: f64, gamma: f64) -> ModelParams {
    ModelParams::new(alpha, gamma).unwrap()
}

#[test]
fn revenue_ratios_match_state_propagation() {
    for alpha in [0.1, 0.25, 0.35] {
        for gamma in [0.0, 0.3, 0.7, 1.0] {
            for strategy in [Strategy::Stubborn, Strategy::Stealth] {
                for level in 1..=6 {
                    let e = propagate(alpha, gamma, strategy, level, 1);
                    assert!(e.residual < 1e-13);
                    let oracle = e.adversarial / e.total;
                    let closed =
                        revenue(params(alpha, gamma), strategy, StubbornLevel::Finite(level))
                            .unwrap();
                    assert!(
                        (closed.ratio - oracle).abs() < 1e-9,
                        "{strategy} α={alpha} γ={gamma} level {level}: {} vs {oracle}",
                        closed.ratio
                    );
                    assert!((closed.denominator() - e.total).abs() < 1e-9);
                    assert!((closed.numerator() - e.adversarial).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn event_probabilities_match_state_propagation() {
    for alpha in [0.1, 0.25, 0.35] {
        for gamma in [0.0, 0.3, 0.7, 1.0] {
            for strategy in [Strategy::Stubborn, Strategy::Stealth] {
                for k in 1..=6 {
                    let e = propagate(alpha, gamma, strategy, k + 1, k);
                    let closed = double_spend_probs(params(alpha, gamma), strategy, k).unwrap();
                    let ctx = format!("{strategy} α={alpha} γ={gamma} k={k}: {closed:?} vs {e:?}");
                    assert!(
                        (closed.double_spending - e.double_spending).abs() < 1e-10,
                        "{ctx}"
                    );
                    assert!((closed.move_funds - e.move_funds).abs() < 1e-10, "{ctx}");
                    // cycles whose first block is adversarial and never contested
                    // count as service in the closed forms
                    let uncontested = 1.0 - e.double_spending - e.move_funds - e.service;
                    assert!(
                        (closed.service - e.service - uncontested).abs() < 1e-10,
                        "{ctx}"
                    );
                }
            }
        }
    }
}

#[test]
fn combined_reward_slope_matches_state_propagation() {
    for alpha in [0.1, 0.25, 0.35] {
        for gamma in [0.0, 0.3, 0.7, 1.0] {
            for strategy in [Strategy::Stubborn, Strategy::Stealth] {
                for k in 1..=6 {
                    let e = propagate(alpha, gamma, strategy, k + 1, k);
                    let affine = combined_affine(params(alpha, gamma), strategy, k).unwrap();
                    assert!(
                        (affine.slope - e.replaced).abs() < 1e-9,
                        "{strategy} α={alpha} γ={gamma} k={k}: {} vs {}",
                        affine.slope,
                        e.replaced
                    );
                }
            }
        }
    }
}
