//! Optimal and maximal profitable stubbornness levels.
//!
//! Both revenue sequences `ρ_1, ρ_2, ...` and `σ_1, σ_2, ...` are
//! quasiconcave in the level, so a fixed-point iteration on a closed-form
//! "is the next level still better" test finds the maximiser quickly. A plain
//! ascending scan doubles as the fallback for the boundary values of `γ` and
//! as the cross-check in tests.

use serde::{Deserialize, Serialize};

use crate::analytic::{revenue_stealth, revenue_stubborn, ModelParams, Strategy, StubbornLevel};
use crate::error::{Error, Result};

/// Default upper bound on scanned levels.
pub const DEFAULT_CAP: u32 = 512;

/// Two revenue ratios closer than this are treated as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

const SNAP_TOLERANCE: f64 = 1e-9;
const MAX_PASSES: u32 = 10;
const MEMBERSHIP_STEP: f64 = 1e-6;
const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    FixedPoint,
    ScanFallback,
}

impl std::fmt::Display for SearchMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchMethod::FixedPoint => "fixed_point",
            SearchMethod::ScanFallback => "scan_fallback",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerResult {
    pub best_level: StubbornLevel,
    pub best_ratio: f64,
    /// Fixed-point passes, or levels evaluated when the scan was used.
    pub iterations: u32,
    pub method: SearchMethod,
}

/// The quantities `u = 1 - γ` and `v_a = (1 - γ(1 - ρ_a)/(1 - 2α)) / u`
/// deciding whether stubbornness beyond level `a` still pays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NarrowDecision {
    pub u: f64,
    pub v: f64,
}

impl NarrowDecision {
    /// Only meaningful for `0 < γ < 1`.
    pub fn new(params: ModelParams, ratio: f64) -> Self {
        let u = 1.0 - params.gamma();
        let v = (1.0 - params.gamma() * (1.0 - ratio) / (1.0 - 2.0 * params.alpha())) / u;
        NarrowDecision { u, v }
    }

    /// `ceil(log v / log u)` clamped to at least 1, or `None` when `v ≤ 0`.
    pub fn next_level(&self) -> Option<u32> {
        if self.v <= 0.0 {
            return None;
        }
        Some(snapped_ceil(self.v.ln() / self.u.ln()))
    }
}

/// Ceiling that first snaps values within [`SNAP_TOLERANCE`] of an integer.
fn snapped_ceil(x: f64) -> u32 {
    if x.is_nan() {
        return u32::MAX;
    }
    let r = x.round();
    let c = if (x - r).abs() < SNAP_TOLERANCE {
        r
    } else {
        x.ceil()
    };
    c.clamp(1.0, u32::MAX as f64) as u32
}

fn stubborn_ratio(params: ModelParams, level: StubbornLevel) -> f64 {
    revenue_stubborn(params, level)
        .map(|r| r.ratio)
        .unwrap_or(f64::NAN)
}

fn stealth_ratio(params: ModelParams, level: u32) -> f64 {
    revenue_stealth(params, StubbornLevel::Finite(level))
        .map(|r| r.ratio)
        .unwrap_or(f64::NAN)
}

fn check_cap(cap: u32) -> Result<()> {
    if cap < 2 {
        Err(Error::InvalidRequest(format!(
            "search cap must be at least 2, got {cap}"
        )))
    } else {
        Ok(())
    }
}

/// Moves a finite maximiser up through ties, then to infinity if the
/// unbounded level is at least as good.
fn resolve_ties(
    ratio: &impl Fn(u32) -> f64,
    infinite_ratio: f64,
    mut level: u32,
    mut best: f64,
    cap: u32,
) -> (StubbornLevel, f64) {
    if infinite_ratio >= best - TIE_TOLERANCE {
        return (StubbornLevel::Infinite, infinite_ratio);
    }
    while level < cap {
        let next = ratio(level + 1);
        if next < best - TIE_TOLERANCE {
            break;
        }
        level += 1;
        best = best.max(next);
    }
    (StubbornLevel::Finite(level), ratio(level))
}

/// Ascending scan that stops at the first level falling below the running
/// maximum; exact for quasiconcave sequences.
fn scan(ratio: impl Fn(u32) -> f64, infinite_ratio: f64, cap: u32) -> Result<OptimizerResult> {
    let mut level = 1;
    let mut best = ratio(1);
    let mut evaluated = 1;
    let mut decreased = false;
    while level < cap {
        let next = ratio(level + 1);
        evaluated += 1;
        if next < best - TIE_TOLERANCE {
            decreased = true;
            break;
        }
        level += 1;
        best = best.max(next);
    }
    let at_level = ratio(level);
    if !decreased && infinite_ratio < at_level - TIE_TOLERANCE {
        return Err(Error::CapExceeded {
            cap,
            best_level: level,
            best_ratio: at_level,
            infinite_ratio,
        });
    }
    let (best_level, best_ratio) = if infinite_ratio >= at_level - TIE_TOLERANCE {
        (StubbornLevel::Infinite, infinite_ratio)
    } else {
        (StubbornLevel::Finite(level), at_level)
    };
    Ok(OptimizerResult {
        best_level,
        best_ratio,
        iterations: evaluated,
        method: SearchMethod::ScanFallback,
    })
}

/// Exhaustive quasiconcave scan for `L*`.
pub fn scan_optimal_l(params: ModelParams, cap: u32) -> Result<OptimizerResult> {
    check_cap(cap)?;
    scan(
        |l| stubborn_ratio(params, StubbornLevel::Finite(l)),
        stubborn_ratio(params, StubbornLevel::Infinite),
        cap,
    )
}

/// Exhaustive quasiconcave scan for `S*`.
pub fn scan_optimal_s(params: ModelParams, cap: u32) -> Result<OptimizerResult> {
    check_cap(cap)?;
    scan(|s| stealth_ratio(params, s), 0.0, cap)
}

/// Revenue-maximising stubbornness level `L*`.
pub fn optimal_l(params: ModelParams, cap: u32) -> Result<OptimizerResult> {
    check_cap(cap)?;
    let gamma = params.gamma();
    if gamma == 0.0 || gamma == 1.0 {
        return scan_optimal_l(params, cap);
    }
    let ratio = |l: u32| stubborn_ratio(params, StubbornLevel::Finite(l));
    let infinite_ratio = stubborn_ratio(params, StubbornLevel::Infinite);

    let mut current = StubbornLevel::Finite(1);
    let mut current_ratio = ratio(1);
    for (level, r) in [
        (StubbornLevel::Finite(2), ratio(2)),
        (StubbornLevel::Infinite, infinite_ratio),
    ] {
        if r >= current_ratio - TIE_TOLERANCE {
            current = level;
            current_ratio = current_ratio.max(r);
        }
    }

    let finish = |level: StubbornLevel, iterations: u32| {
        let (best_level, best_ratio) = match level {
            StubbornLevel::Finite(l) => resolve_ties(&ratio, infinite_ratio, l, ratio(l), cap),
            StubbornLevel::Infinite => (StubbornLevel::Infinite, infinite_ratio),
        };
        OptimizerResult {
            best_level,
            best_ratio,
            iterations,
            method: SearchMethod::FixedPoint,
        }
    };

    let seed_ratio = match current {
        StubbornLevel::Finite(l) => ratio(l),
        StubbornLevel::Infinite => infinite_ratio,
    };
    if NarrowDecision::new(params, seed_ratio).v <= 0.0 {
        return Ok(finish(StubbornLevel::Infinite, 0));
    }
    if current == StubbornLevel::Finite(1) {
        return Ok(finish(current, 0));
    }

    for pass in 1..=MAX_PASSES {
        let r = match current {
            StubbornLevel::Finite(l) => ratio(l),
            StubbornLevel::Infinite => infinite_ratio,
        };
        let next = match NarrowDecision::new(params, r).next_level() {
            None => return Ok(finish(StubbornLevel::Infinite, pass)),
            Some(l) if l > cap => return scan_optimal_l(params, cap),
            Some(l) => StubbornLevel::Finite(l),
        };
        if next == current {
            return Ok(finish(current, pass));
        }
        current = next;
    }
    scan_optimal_l(params, cap)
}

/// Largest `x` with `g(x) ≥ σ`, where `g` is the closed-form upper estimate
/// of stealth revenue as a function of a continuous level.
pub fn stealth_threshold(params: ModelParams, sigma: f64) -> Option<f64> {
    let (a, g) = (params.alpha(), params.gamma());
    let d = 1.0 - 2.0 * a;
    let p = 1.0 - sigma - d;
    if g == 0.0 {
        return Some((1.0 - sigma) / d - 1.0);
    }
    let q = d * (1.0 - g);
    let k = g * d / (a * (1.0 - a));
    let qa = -(4.0 * q + k);
    let qb = 4.0 * p + 2.0 * q;
    let qc = k - 2.0 * p;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return None;
    }
    // qa < 0, so this is the larger root
    let root = (-qb - disc.sqrt()) / (2.0 * qa);
    (root > 0.5).then_some(root)
}

fn stealth_bound(params: ModelParams, x: f64) -> f64 {
    let (a, g) = (params.alpha(), params.gamma());
    let d = 1.0 - 2.0 * a;
    1.0 - g * d / (a * (1.0 - a)) * (x * x - 1.0) / (2.0 * (2.0 * x - 1.0)) - d * (x + 1.0 - g * x)
}

/// `f(σ)` with a direct check that the returned point is the supremum.
fn checked_threshold(params: ModelParams, sigma: f64) -> Option<f64> {
    let x = stealth_threshold(params, sigma)?;
    let on_boundary = (stealth_bound(params, x) - sigma).abs() < MEMBERSHIP_TOLERANCE;
    let beyond = stealth_bound(params, x + MEMBERSHIP_STEP) < sigma;
    (on_boundary && beyond).then_some(x)
}

/// Revenue-maximising stealth level `S*`.
pub fn optimal_s(params: ModelParams, cap: u32) -> Result<OptimizerResult> {
    check_cap(cap)?;
    let ratio = |s: u32| stealth_ratio(params, s);
    let mut current = if ratio(2) >= ratio(1) - TIE_TOLERANCE {
        2
    } else {
        1
    };

    let finish = |level: u32, iterations: u32| {
        let (best_level, best_ratio) = resolve_ties(&ratio, 0.0, level, ratio(level), cap);
        OptimizerResult {
            best_level,
            best_ratio,
            iterations,
            method: SearchMethod::FixedPoint,
        }
    };

    if current == 1 {
        return Ok(finish(1, 0));
    }
    for pass in 1..=MAX_PASSES {
        let Some(x) = checked_threshold(params, ratio(current)) else {
            return scan_optimal_s(params, cap);
        };
        let next = snapped_ceil(x);
        if next > cap {
            return scan_optimal_s(params, cap);
        }
        if next == current {
            return Ok(finish(current, pass));
        }
        current = next;
    }
    scan_optimal_s(params, cap)
}

pub fn optimal(params: ModelParams, strategy: Strategy, cap: u32) -> Result<OptimizerResult> {
    match strategy {
        Strategy::Stubborn => optimal_l(params, cap),
        Strategy::Stealth => optimal_s(params, cap),
    }
}

/// Upward scan from `start` for the last level whose ratio is at least `α`.
fn last_profitable(
    ratio: impl Fn(u32) -> f64,
    alpha: f64,
    start: u32,
    infinite_ratio: f64,
    cap: u32,
) -> Result<StubbornLevel> {
    let mut level = start;
    while level < cap {
        if ratio(level + 1) < alpha {
            return Ok(StubbornLevel::Finite(level));
        }
        level += 1;
    }
    Err(Error::CapExceeded {
        cap,
        best_level: level,
        best_ratio: ratio(level),
        infinite_ratio,
    })
}

/// Largest stubbornness level `L̄` whose revenue is still at least `α`.
pub fn max_profitable_l(params: ModelParams, cap: u32) -> Result<StubbornLevel> {
    check_cap(cap)?;
    let infinite_ratio = stubborn_ratio(params, StubbornLevel::Infinite);
    if infinite_ratio >= params.alpha() {
        return Ok(StubbornLevel::Infinite);
    }
    let start = match optimal_l(params, cap) {
        Ok(OptimizerResult {
            best_level: StubbornLevel::Finite(l),
            ..
        }) => l,
        Ok(_) => 1,
        Err(e) if e.is_cap_exceeded() => 1,
        Err(e) => return Err(e),
    };
    last_profitable(
        |l| stubborn_ratio(params, StubbornLevel::Finite(l)),
        params.alpha(),
        start,
        infinite_ratio,
        cap,
    )
}

/// Largest stealth level `S̄` whose revenue is still at least `α`.
pub fn max_profitable_s(params: ModelParams, cap: u32) -> Result<StubbornLevel> {
    check_cap(cap)?;
    let start = match optimal_s(params, cap)?.best_level {
        StubbornLevel::Finite(s) => s,
        StubbornLevel::Infinite => 1,
    };
    last_profitable(
        |s| stealth_ratio(params, s),
        params.alpha(),
        start,
        0.0,
        cap,
    )
}

pub fn max_profitable(params: ModelParams, strategy: Strategy, cap: u32) -> Result<StubbornLevel> {
    match strategy {
        Strategy::Stubborn => max_profitable_l(params, cap),
        Strategy::Stealth => max_profitable_s(params, cap),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, gamma: f64) -> ModelParams {
        ModelParams::new(alpha, gamma).unwrap()
    }

    #[test]
    fn snapping() {
        assert_eq!(snapped_ceil(2.0000000001), 2);
        assert_eq!(snapped_ceil(2.00001), 3);
        assert_eq!(snapped_ceil(-3.5), 1);
        assert_eq!(snapped_ceil(f64::INFINITY), u32::MAX);
    }

    #[test]
    fn honest_mining_is_optimal_for_small_alpha() {
        for gamma in [0.0, 0.2, 0.5] {
            let r = optimal_l(p(0.1, gamma), DEFAULT_CAP).unwrap();
            assert_eq!(r.best_level, StubbornLevel::Finite(1));
            assert_eq!(r.best_ratio, 0.1);
            assert_eq!(
                optimal_s(p(0.1, gamma), DEFAULT_CAP).unwrap().best_level,
                StubbornLevel::Finite(1)
            );
            assert_eq!(
                max_profitable_l(p(0.1, gamma), DEFAULT_CAP).unwrap(),
                StubbornLevel::Finite(1)
            );
            assert_eq!(
                max_profitable_s(p(0.1, gamma), DEFAULT_CAP).unwrap(),
                StubbornLevel::Finite(1)
            );
        }
    }

    #[test]
    fn exact_tie_prefers_larger_level() {
        // ρ_1 = ρ_2 = 0.25 exactly at this point
        let params = p(0.25, 0.5);
        let fixed = optimal_l(params, DEFAULT_CAP).unwrap();
        let scanned = scan_optimal_l(params, DEFAULT_CAP).unwrap();
        assert_eq!(fixed.best_level, scanned.best_level);
        assert_eq!(fixed.best_level, StubbornLevel::Finite(2));
    }

    #[test]
    fn gamma_one_is_infinite() {
        let r = optimal_l(p(0.41, 1.0), DEFAULT_CAP).unwrap();
        assert_eq!(r.best_level, StubbornLevel::Infinite);
        assert_eq!(r.method, SearchMethod::ScanFallback);
        assert_eq!(
            max_profitable_l(p(0.41, 1.0), DEFAULT_CAP).unwrap(),
            StubbornLevel::Infinite
        );
    }

    #[test]
    fn cap_validation() {
        assert!(matches!(
            optimal_l(p(0.3, 0.5), 1),
            Err(Error::InvalidRequest(_))
        ));
    }

    #[test]
    fn cap_exceeded_reports_diagnostics() {
        // increasing well past a tiny cap, while the equal-fork ratio is lower
        let params = p(0.475, 0.0);
        match scan_optimal_l(params, 2) {
            Err(Error::CapExceeded {
                cap, best_level, ..
            }) => {
                assert_eq!(cap, 2);
                assert_eq!(best_level, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn threshold_is_the_supremum() {
        for a in 1..=9 {
            for g in 1..=9 {
                let params = p(a as f64 * 0.05, g as f64 * 0.1);
                let sigma = stealth_ratio(params, 2);
                if let Some(x) = stealth_threshold(params, sigma) {
                    assert!((stealth_bound(params, x) - sigma).abs() < 1e-9);
                    assert!(stealth_bound(params, x + 1e-3) < sigma);
                }
            }
        }
    }
}
