//! Closed-form attack-cycle analysis.
//!
//! An attack cycle starts at an offset event and ends when either the honest
//! chain overtakes the private chain (adopt) or the private chain is released
//! one block ahead (override). Every quantity here is an expectation over a
//! single cycle; the long-run revenue ratio is the ratio of expected
//! adversarial blocks to expected total blocks entering the offset chain.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combinatorics::{
    catalan, catalan_generating, pre_dyck_count, truncated_series, wald_extension,
};
use crate::error::{Error, Result};

/// Below this γ the infinite-level ratio is summed term by term, since the
/// closed form divides by γ.
const SMALL_GAMMA: f64 = 1e-6;

/// The `(α, γ)` point of a query. `β = 1 - α` is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    alpha: f64,
    gamma: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::Alpha(alpha));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Gamma(gamma));
        }
        Ok(ModelParams { alpha, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        1.0 - self.alpha
    }

    fn drift(&self) -> f64 {
        1.0 - 2.0 * self.alpha
    }

    fn wald(&self, gap: u32) -> f64 {
        // alpha was validated at construction
        wald_extension(gap, self.alpha).unwrap_or(f64::NAN)
    }

    /// `(1 - γ)^e` with `0^0 = 1`.
    fn stay(&self, e: u32) -> f64 {
        pow(1.0 - self.gamma, e)
    }
}

impl<'de> Deserialize<'de> for ModelParams {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            alpha: f64,
            gamma: f64,
        }
        let raw = Raw::deserialize(d)?;
        ModelParams::new(raw.alpha, raw.gamma).map_err(serde::de::Error::custom)
    }
}

fn pow(x: f64, e: u32) -> f64 {
    if e <= i32::MAX as u32 {
        x.powi(e as i32)
    } else {
        x.powf(e as f64)
    }
}

/// A stubbornness parameter `L` or `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StubbornLevel {
    Finite(u32),
    Infinite,
}

impl StubbornLevel {
    pub fn finite(level: u32) -> Result<Self> {
        if level == 0 {
            Err(Error::ZeroLevel)
        } else {
            Ok(StubbornLevel::Finite(level))
        }
    }

    pub fn as_finite(&self) -> Option<u32> {
        match *self {
            StubbornLevel::Finite(l) => Some(l),
            StubbornLevel::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, StubbornLevel::Infinite)
    }

    fn validated(self) -> Result<Self> {
        match self {
            StubbornLevel::Finite(0) => Err(Error::ZeroLevel),
            other => Ok(other),
        }
    }
}

impl Ord for StubbornLevel {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (StubbornLevel::Finite(a), StubbornLevel::Finite(b)) => a.cmp(b),
            (StubbornLevel::Finite(_), StubbornLevel::Infinite) => Ordering::Less,
            (StubbornLevel::Infinite, StubbornLevel::Finite(_)) => Ordering::Greater,
            (StubbornLevel::Infinite, StubbornLevel::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for StubbornLevel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u32> for StubbornLevel {
    fn from(level: u32) -> Self {
        StubbornLevel::Finite(level)
    }
}

impl fmt::Display for StubbornLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StubbornLevel::Finite(l) => write!(f, "{l}"),
            StubbornLevel::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for StubbornLevel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let t = s.trim();
        if matches!(
            t.to_ascii_lowercase().as_str(),
            "inf" | "infinite" | "infinity"
        ) || t == "∞"
        {
            return Ok(StubbornLevel::Infinite);
        }
        match t.parse::<u32>() {
            Ok(0) => Err("level must be at least 1".to_string()),
            Ok(l) => Ok(StubbornLevel::Finite(l)),
            Err(_) => Err(format!("expected a positive integer or \"inf\", got {s:?}")),
        }
    }
}

impl Serialize for StubbornLevel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StubbornLevel::Finite(l) => s.serialize_u32(*l),
            StubbornLevel::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for StubbornLevel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;

        impl serde::de::Visitor<'_> for Visitor {
            type Value = StubbornLevel;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive integer or \"inf\"")
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
                match u32::try_from(v) {
                    Ok(l) if l >= 1 => Ok(StubbornLevel::Finite(l)),
                    _ => Err(E::custom(format!("invalid level {v}"))),
                }
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Self::Value, E> {
                self.visit_u64(u64::try_from(v).map_err(|_| E::custom("negative level"))?)
            }

            fn visit_str<E: serde::de::Error>(
                self,
                v: &str,
            ) -> std::result::Result<Self::Value, E> {
                v.parse().map_err(E::custom)
            }
        }

        d.deserialize_any(Visitor)
    }
}

/// Which withholding rule the adversary follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Match whenever a fork is relevant and the private chain is below the level.
    Stubborn,
    /// Match only when both chains sit exactly one block below the level.
    Stealth,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Stubborn => "stubborn",
            Strategy::Stealth => "stealth",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "stubborn" => Ok(Strategy::Stubborn),
            "stealth" => Ok(Strategy::Stealth),
            _ => Err(format!(
                "unknown strategy {s:?} (expected stubborn or stealth)"
            )),
        }
    }
}

/// Revenue ratio with its per-cycle decomposition.
///
/// For the stubborn strategy the fields are `L_s`, `L_{u,a}` and `L_u`; for
/// stealth they are `S_s`, `S_{u,s}` and `S_u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevenueReport {
    pub ratio: f64,
    /// Expected blocks entering the offset chain from successful cycles.
    pub successful_blocks: f64,
    /// Expected adversarial blocks entering the offset chain from unsuccessful cycles.
    pub unsuccessful_adversarial_blocks: f64,
    /// Expected total blocks entering the offset chain from unsuccessful cycles.
    pub total_unsuccessful_blocks: f64,
}

impl RevenueReport {
    pub fn numerator(&self) -> f64 {
        self.successful_blocks + self.unsuccessful_adversarial_blocks
    }

    pub fn denominator(&self) -> f64 {
        self.successful_blocks + self.total_unsuccessful_blocks
    }

    fn from_parts(successful: f64, adversarial: f64, total: f64) -> Self {
        RevenueReport {
            ratio: (successful + adversarial) / (successful + total),
            successful_blocks: successful,
            unsuccessful_adversarial_blocks: adversarial,
            total_unsuccessful_blocks: total,
        }
    }
}

/// Outcome probabilities for the first-height block pair of one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventProbs {
    pub double_spending: f64,
    pub move_funds: f64,
    pub service: f64,
}

/// Confirmation depth and double-spend value for combined revenue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinedRevenueParams {
    pub k: u32,
    /// Value of one replaced confirmed block, in block rewards.
    pub reward_r: f64,
}

impl CombinedRevenueParams {
    pub fn new(k: u32, reward_r: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroConfirmations);
        }
        if !(reward_r.is_finite() && reward_r >= 0.0) {
            return Err(Error::Reward(reward_r));
        }
        Ok(CombinedRevenueParams { k, reward_r })
    }
}

/// The break-even double-spend value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RewardBound {
    Finite(f64),
    /// No finite reward makes the attack beat honest mining.
    Infinite,
}

impl RewardBound {
    pub fn as_finite(&self) -> Option<f64> {
        match *self {
            RewardBound::Finite(r) => Some(r),
            RewardBound::Infinite => None,
        }
    }
}

impl fmt::Display for RewardBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewardBound::Finite(r) => write!(f, "{r}"),
            RewardBound::Infinite => f.write_str("inf"),
        }
    }
}

/// Combined revenue at level `k + 1` written as `(base + slope · R) / denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineRevenue {
    pub base: f64,
    pub slope: f64,
    pub denominator: f64,
}

impl AffineRevenue {
    pub fn at(&self, reward_r: f64) -> f64 {
        (self.base + self.slope * reward_r) / self.denominator
    }
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        Err(Error::ZeroConfirmations)
    } else {
        Ok(())
    }
}

/// Probability that the private chain reaches `level` while the honest chain
/// has height `m`: `P[L-1, m] · α^L · β^m`.
pub fn success_prob(params: ModelParams, level: u32, m: u32) -> Result<f64> {
    if level == 0 {
        return Err(Error::ZeroLevel);
    }
    if m >= level {
        return Err(Error::HonestHeight { level, m });
    }
    Ok(pre_dyck_count(level - 1, m).weighted(params.alpha, level, params.beta(), m))
}

/// Probability that a cycle ends unsuccessfully with the honest chain at
/// height `n + 1`: `C_n · α^n · β^(n+1)`.
pub fn unsuccess_prob(params: ModelParams, n: u32) -> f64 {
    catalan(n).weighted(params.alpha, n, params.beta(), n + 1)
}

/// Probability of ending unsuccessfully at height `n + 1` with exactly `i`
/// adversarial blocks in the winning chain's prefix.
pub fn unsuccess_prefix_prob(params: ModelParams, n: u32, i: u32) -> Result<f64> {
    if i > n {
        return Err(Error::PrefixCount { n, i });
    }
    let switch = if i == 0 { 1.0 } else { params.gamma };
    Ok(unsuccess_prob(params, n) * params.stay(n - i) * switch)
}

/// Expected adversarial prefix length of an unsuccessful cycle ending at
/// height `n + 1`: `Σ_i i · P_u(n, i) / P_u(n) = Σ_{j=1..n} (1 - (1-γ)^j)`.
fn expected_prefix(params: ModelParams, n: u32) -> f64 {
    if params.gamma == 0.0 {
        return 0.0;
    }
    if params.gamma == 1.0 {
        return n as f64;
    }
    let ln_stay = (-params.gamma).ln_1p();
    (1..=n).map(|j| -(j as f64 * ln_stay).exp_m1()).sum()
}

/// `Σ_{m<L} P_s(L, m) · (L + (L-m-1)α/(1-2α))`.
fn successful_blocks(params: ModelParams, level: u32) -> f64 {
    (0..level)
        .map(|m| {
            let p = pre_dyck_count(level - 1, m).weighted(params.alpha, level, params.beta(), m);
            p * (level as f64 + params.wald(level - m - 1))
        })
        .sum()
}

/// `Σ_{n<L} P_u(n) · (n + 1)`.
fn unsuccessful_blocks(params: ModelParams, level: u32) -> f64 {
    (0..level)
        .map(|n| unsuccess_prob(params, n) * (n + 1) as f64)
        .sum()
}

/// Expected offset-chain growth from unsuccessful cycles when no cycle ever
/// succeeds: `Σ_n C_n (n+1) α^n β^(n+1) = β / (1 - 2α)`.
fn unsuccessful_blocks_unbounded(params: ModelParams) -> f64 {
    params.beta() / params.drift()
}

/// Selfish-mining revenue ratio in closed form, independent of the cycle sums.
pub fn selfish_mining_ratio(params: ModelParams) -> f64 {
    let (a, g) = (params.alpha, params.gamma);
    let b = params.beta();
    (a * b * b * (4.0 * a + g * (1.0 - 2.0 * a)) - a * a * a) / (1.0 - a * (1.0 + (2.0 - a) * a))
}

/// Revenue ratio of L-stubborn mining.
pub fn revenue_stubborn(params: ModelParams, level: StubbornLevel) -> Result<RevenueReport> {
    match level.validated()? {
        StubbornLevel::Finite(l) => {
            let s = successful_blocks(params, l);
            let ua: f64 = (0..l)
                .map(|n| unsuccess_prob(params, n) * expected_prefix(params, n))
                .sum();
            let u = unsuccessful_blocks(params, l);
            let mut report = RevenueReport::from_parts(s, ua, u);
            if l == 1 {
                report.ratio = params.alpha;
            }
            Ok(report)
        }
        StubbornLevel::Infinite => Ok(equal_fork_revenue(params)),
    }
}

fn equal_fork_revenue(params: ModelParams) -> RevenueReport {
    if params.gamma < SMALL_GAMMA {
        equal_fork_series(params)
    } else {
        equal_fork_closed(params)
    }
}

fn equal_fork_series(params: ModelParams) -> RevenueReport {
    let ua = truncated_series(|n| unsuccess_prob(params, n) * expected_prefix(params, n));
    RevenueReport::from_parts(0.0, ua, unsuccessful_blocks_unbounded(params))
}

fn equal_fork_closed(params: ModelParams) -> RevenueReport {
    let (a, g) = (params.alpha, params.gamma);
    let b = params.beta();
    let u = unsuccessful_blocks_unbounded(params);
    let x = (1.0 - g) * a * b;
    // (1-γ)αβ ≤ 1/4 always holds for α < 1/2
    let c = catalan_generating(x.min(0.25)).unwrap_or(f64::NAN);
    let ratio = a / b - params.drift() * (1.0 - g) / (b * g) * (1.0 - b * c);
    RevenueReport {
        ratio,
        successful_blocks: 0.0,
        unsuccessful_adversarial_blocks: ratio * u,
        total_unsuccessful_blocks: u,
    }
}

/// Revenue ratio of S-stealth mining.
pub fn revenue_stealth(params: ModelParams, level: StubbornLevel) -> Result<RevenueReport> {
    match level.validated()? {
        StubbornLevel::Finite(s_level) => {
            let s = successful_blocks(params, s_level);
            let n = s_level - 1;
            let us = unsuccess_prob(params, n) * params.gamma * n as f64;
            let u = unsuccessful_blocks(params, s_level);
            let mut report = RevenueReport::from_parts(s, us, u);
            if s_level == 1 {
                report.ratio = params.alpha;
            }
            Ok(report)
        }
        StubbornLevel::Infinite => Ok(RevenueReport {
            ratio: 0.0,
            successful_blocks: 0.0,
            unsuccessful_adversarial_blocks: 0.0,
            total_unsuccessful_blocks: unsuccessful_blocks_unbounded(params),
        }),
    }
}

pub fn revenue(
    params: ModelParams,
    strategy: Strategy,
    level: StubbornLevel,
) -> Result<RevenueReport> {
    match strategy {
        Strategy::Stubborn => revenue_stubborn(params, level),
        Strategy::Stealth => revenue_stealth(params, level),
    }
}

/// `Σ_{m=0..k} P_s(k+1, m) · w(m)`.
fn success_sum(params: ModelParams, k: u32, mut weight: impl FnMut(u32) -> f64) -> f64 {
    (0..=k)
        .map(|m| pre_dyck_count(k, m).weighted(params.alpha, k + 1, params.beta(), m) * weight(m))
        .sum()
}

/// Switch-free probability for a successful cycle at honest height `m`: the
/// last honest block of an `m = k` cycle is mined while no match is possible.
fn no_switch_exponent(m: u32, k: u32) -> u32 {
    if m == k {
        m - 1
    } else {
        m
    }
}

/// Event probabilities of (k+1)-stubborn mining under k-confirmation.
pub fn double_spend_probs_stubborn(params: ModelParams, k: u32) -> Result<EventProbs> {
    check_k(k)?;
    let ds = success_sum(params, k, |m| params.stay(no_switch_exponent(m, k)))
        + unsuccess_prob(params, k) * params.stay(k - 1) * params.gamma;
    let service: f64 = (0..=k)
        .map(|m| unsuccess_prob(params, m) * params.stay(m))
        .sum();
    let rest = 1.0 - ds - service;
    Ok(EventProbs {
        double_spending: ds,
        move_funds: if rest < 0.0 && rest > -1e-14 {
            0.0
        } else {
            rest
        },
        service,
    })
}

/// Event probabilities of (k+1)-stealth mining under k-confirmation.
pub fn double_spend_probs_stealth(params: ModelParams, k: u32) -> Result<EventProbs> {
    check_k(k)?;
    let ds = success_sum(params, k, |_| 1.0) + unsuccess_prob(params, k) * params.gamma;
    Ok(EventProbs {
        double_spending: ds,
        move_funds: 0.0,
        service: 1.0 - ds,
    })
}

pub fn double_spend_probs(params: ModelParams, strategy: Strategy, k: u32) -> Result<EventProbs> {
    match strategy {
        Strategy::Stubborn => double_spend_probs_stubborn(params, k),
        Strategy::Stealth => double_spend_probs_stealth(params, k),
    }
}

/// Combined revenue of the level-(k+1) attack as an affine function of the
/// double-spend value.
pub fn combined_affine(params: ModelParams, strategy: Strategy, k: u32) -> Result<AffineRevenue> {
    check_k(k)?;
    let plain = revenue(params, strategy, StubbornLevel::Finite(k + 1))?;
    // Blocks replaced by a successful cycle: the first-height block plus every
    // honest block mined while the lead shrinks back to one.
    let replaced = |m: u32| 1.0 + params.wald(k - m);
    let slope = match strategy {
        Strategy::Stubborn => {
            success_sum(params, k, |m| {
                params.stay(no_switch_exponent(m, k)) * replaced(m)
            }) + unsuccess_prob(params, k) * params.stay(k - 1) * params.gamma
        }
        Strategy::Stealth => {
            success_sum(params, k, replaced) + unsuccess_prob(params, k) * params.gamma
        }
    };
    Ok(AffineRevenue {
        base: plain.numerator(),
        slope,
        denominator: plain.denominator(),
    })
}

/// Combined revenue ratio of (k+1)-stubborn mining.
pub fn combined_revenue_stubborn(params: ModelParams, cfg: CombinedRevenueParams) -> Result<f64> {
    combined_revenue(params, Strategy::Stubborn, cfg)
}

/// Combined revenue ratio of (k+1)-stealth mining.
pub fn combined_revenue_stealth(params: ModelParams, cfg: CombinedRevenueParams) -> Result<f64> {
    combined_revenue(params, Strategy::Stealth, cfg)
}

pub fn combined_revenue(
    params: ModelParams,
    strategy: Strategy,
    cfg: CombinedRevenueParams,
) -> Result<f64> {
    let cfg = CombinedRevenueParams::new(cfg.k, cfg.reward_r)?;
    if cfg.reward_r == 0.0 {
        return Ok(revenue(params, strategy, StubbornLevel::Finite(cfg.k + 1))?.ratio);
    }
    Ok(combined_affine(params, strategy, cfg.k)?.at(cfg.reward_r))
}

/// Smallest double-spend value at which the level-(k+1) attack earns at
/// least the honest share `α`.
pub fn breakeven_reward(params: ModelParams, k: u32, strategy: Strategy) -> Result<RewardBound> {
    check_k(k)?;
    let plain = revenue(params, strategy, StubbornLevel::Finite(k + 1))?;
    if plain.ratio >= params.alpha {
        return Ok(RewardBound::Finite(0.0));
    }
    let affine = combined_affine(params, strategy, k)?;
    if affine.slope <= 0.0 {
        return Ok(RewardBound::Infinite);
    }
    let r = (params.alpha * affine.denominator - affine.base) / affine.slope;
    Ok(RewardBound::Finite(r.max(0.0)))
}

/// Whether the level-(k+1) attack beats honest mining when each cycle carries
/// one purchase of service value `v` paid with fee `f`.
pub fn service_profitability(
    params: ModelParams,
    k: u32,
    v: f64,
    f: f64,
    strategy: Strategy,
) -> Result<bool> {
    check_k(k)?;
    if !(v >= 0.0 && f >= v && f.is_finite()) {
        return Err(Error::ServiceFee { value: v, fee: f });
    }
    let plain = revenue(params, strategy, StubbornLevel::Finite(k + 1))?;
    let events = double_spend_probs(params, strategy, k)?;
    let honest = params.alpha * plain.denominator();
    Ok(match strategy {
        Strategy::Stubborn => {
            plain.numerator() + v * events.double_spending >= honest + (f - v) * events.service
        }
        Strategy::Stealth => plain.numerator() + v >= honest + f * events.service,
    })
}
