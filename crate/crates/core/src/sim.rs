//! Monte Carlo simulation of attack cycles.
//!
//! A cycle is driven by a stream of arrival labels (adversarial with
//! probability `α`) and, for honest blocks mined while a match is live, a
//! switch draw (probability `γ`) deciding whether the block extends the
//! adversary's released branch. Only the chain lengths and the shared prefix
//! length are tracked.
//!
//! Estimates are reproducible: cycles are cut into fixed-size chunks, chunk
//! `c` draws from its own ChaCha stream keyed by `(seed, c)`, and chunk tallies
//! are integer sums, so the result does not depend on the worker count.

use std::ops::AddAssign;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{ModelParams, Strategy, StubbornLevel};
use crate::error::{Error, Result};

/// Cycles simulated per random stream.
pub const CHUNK_CYCLES: u64 = 4096;
/// Default bound on arrivals within one cycle.
pub const DEFAULT_MAX_ARRIVALS: u64 = 1_000_000;
/// Number of batches used for batch-means standard errors.
pub const BATCHES: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForkStatus {
    /// The last block was adversarial.
    Irrelevant,
    /// The last block was honest and was not matched.
    Relevant,
    /// The adversary has released a competing block at the honest height.
    Active,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleState {
    pub a_len: u64,
    pub h_len: u64,
    /// Length of the adversarial prefix shared by the honest chain.
    pub common_prefix: u64,
    pub fork_status: ForkStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoubleSpendEvent {
    Service,
    MoveFunds,
    DoubleSpending,
    /// No honest block was mined at the first height.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleEnd {
    Adopt,
    Override,
    /// The arrival bound was hit before either action fired.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleOutcome {
    pub adversary_blocks_to_offset: u64,
    pub honest_blocks_to_offset: u64,
    pub event: DoubleSpendEvent,
    /// Honest blocks that were `k` deep on the honest branch and later lost.
    pub replaced_confirmed_blocks: u64,
    pub end: CycleEnd,
    pub final_state: CycleState,
}

/// Source of the two kinds of random decisions a cycle needs.
pub trait ArrivalSource {
    fn next_is_adversarial(&mut self) -> bool;
    /// Whether an honest block mined during a live match extends the
    /// adversary's branch.
    fn next_switches(&mut self) -> bool;
}

pub struct RngArrivals<'a, R: Rng> {
    rng: &'a mut R,
    alpha: f64,
    gamma: f64,
}

impl<'a, R: Rng> RngArrivals<'a, R> {
    pub fn new(params: ModelParams, rng: &'a mut R) -> Self {
        RngArrivals {
            rng,
            alpha: params.alpha(),
            gamma: params.gamma(),
        }
    }
}

impl<R: Rng> ArrivalSource for RngArrivals<'_, R> {
    fn next_is_adversarial(&mut self) -> bool {
        self.rng.random::<f64>() < self.alpha
    }

    fn next_switches(&mut self) -> bool {
        self.rng.random::<f64>() < self.gamma
    }
}

/// Replays fixed decision sequences; panics when a sequence runs out.
#[derive(Debug, Clone, Default)]
pub struct ScriptedArrivals {
    arrivals: Vec<bool>,
    switches: Vec<bool>,
    next_arrival: usize,
    next_switch: usize,
}

impl ScriptedArrivals {
    /// `arrivals` is a string over `A` (adversarial) and `H` (honest);
    /// `switches` over `S` (switch) and `-` (stay).
    pub fn new(arrivals: &str, switches: &str) -> Self {
        ScriptedArrivals {
            arrivals: arrivals.chars().map(|c| c == 'A').collect(),
            switches: switches.chars().map(|c| c == 'S').collect(),
            ..Default::default()
        }
    }

    pub fn arrivals_used(&self) -> usize {
        self.next_arrival
    }

    pub fn switches_used(&self) -> usize {
        self.next_switch
    }
}

impl ArrivalSource for ScriptedArrivals {
    fn next_is_adversarial(&mut self) -> bool {
        let v = *self
            .arrivals
            .get(self.next_arrival)
            .expect("arrival script exhausted");
        self.next_arrival += 1;
        v
    }

    fn next_switches(&mut self) -> bool {
        let v = *self
            .switches
            .get(self.next_switch)
            .expect("switch script exhausted");
        self.next_switch += 1;
        v
    }
}

fn level_limit(level: StubbornLevel) -> Result<u64> {
    match level {
        StubbornLevel::Finite(0) => Err(Error::ZeroLevel),
        StubbornLevel::Finite(l) => Ok(l as u64),
        StubbornLevel::Infinite => Ok(u64::MAX),
    }
}

fn matches(strategy: Strategy, a: u64, h: u64, limit: u64) -> bool {
    match strategy {
        Strategy::Stubborn => a >= h && a < limit,
        Strategy::Stealth => a == h && a.checked_add(1) == Some(limit),
    }
}

/// Runs one attack cycle from an offset event.
pub fn run_cycle(
    strategy: Strategy,
    level: StubbornLevel,
    k: u32,
    max_arrivals: u64,
    source: &mut impl ArrivalSource,
) -> Result<CycleOutcome> {
    let limit = level_limit(level)?;
    if k == 0 {
        return Err(Error::ZeroConfirmations);
    }
    let k = k as u64;
    let (mut a, mut h, mut c) = (0u64, 0u64, 0u64);
    let mut fork = ForkStatus::Irrelevant;
    // how many honest-rooted blocks have been k deep so far
    let mut confirmed_run = 0u64;
    let mut arrivals = 0u64;

    let end = loop {
        if arrivals == max_arrivals {
            break CycleEnd::Truncated;
        }
        arrivals += 1;
        if source.next_is_adversarial() {
            a += 1;
            if fork == ForkStatus::Relevant {
                fork = ForkStatus::Irrelevant;
            }
        } else {
            if fork == ForkStatus::Active && source.next_switches() {
                c = h;
            }
            h += 1;
            if c == 0 && h >= k {
                confirmed_run = confirmed_run.max(h - k + 1);
            }
            if h == a + 1 {
                break CycleEnd::Adopt;
            }
            fork = if matches(strategy, a, h, limit) {
                ForkStatus::Active
            } else {
                ForkStatus::Relevant
            };
        }
        if a == h + 1 && a >= limit {
            break CycleEnd::Override;
        }
    };

    let final_state = CycleState {
        a_len: a,
        h_len: h,
        common_prefix: c,
        fork_status: fork,
    };
    let (x, y) = match end {
        CycleEnd::Adopt => (c, h - c),
        CycleEnd::Override => (a, 0),
        CycleEnd::Truncated => (0, 0),
    };
    let (event, replaced) = match end {
        _ if h == 0 => (DoubleSpendEvent::NotApplicable, 0),
        CycleEnd::Truncated => (DoubleSpendEvent::NotApplicable, 0),
        CycleEnd::Override if confirmed_run > 0 => {
            (DoubleSpendEvent::DoubleSpending, confirmed_run)
        }
        CycleEnd::Override => (DoubleSpendEvent::MoveFunds, 0),
        CycleEnd::Adopt if c == 0 => (DoubleSpendEvent::Service, 0),
        CycleEnd::Adopt if confirmed_run > 0 => {
            (DoubleSpendEvent::DoubleSpending, confirmed_run.min(c))
        }
        CycleEnd::Adopt => (DoubleSpendEvent::MoveFunds, 0),
    };
    Ok(CycleOutcome {
        adversary_blocks_to_offset: x,
        honest_blocks_to_offset: y,
        event,
        replaced_confirmed_blocks: replaced,
        end,
        final_state,
    })
}

/// One L-stubborn cycle driven by `rng`.
pub fn run_cycle_stubborn<R: Rng>(
    params: ModelParams,
    level: StubbornLevel,
    k: u32,
    rng: &mut R,
) -> Result<CycleOutcome> {
    run_cycle(
        Strategy::Stubborn,
        level,
        k,
        DEFAULT_MAX_ARRIVALS,
        &mut RngArrivals::new(params, rng),
    )
}

/// One S-stealth cycle driven by `rng`.
pub fn run_cycle_stealth<R: Rng>(
    params: ModelParams,
    level: StubbornLevel,
    k: u32,
    rng: &mut R,
) -> Result<CycleOutcome> {
    run_cycle(
        Strategy::Stealth,
        level,
        k,
        DEFAULT_MAX_ARRIVALS,
        &mut RngArrivals::new(params, rng),
    )
}

/// The random stream used for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ModelParams,
    pub strategy: Strategy,
    pub level: StubbornLevel,
    pub k: u32,
    pub cycles: u64,
    pub seed: u64,
    /// Worker threads; 0 lets the thread pool decide.
    pub workers: usize,
    pub max_arrivals: u64,
}

impl SimConfig {
    pub fn new(params: ModelParams, strategy: Strategy, level: StubbornLevel, k: u32) -> Self {
        SimConfig {
            params,
            strategy,
            level,
            k,
            cycles: 1_000_000,
            seed: 0,
            workers: 0,
            max_arrivals: DEFAULT_MAX_ARRIVALS,
        }
    }

    pub fn cycles(mut self, cycles: u64) -> Self {
        self.cycles = cycles;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn max_arrivals(mut self, max_arrivals: u64) -> Self {
        self.max_arrivals = max_arrivals;
        self
    }
}

/// Integer aggregates over a set of cycles. Truncated cycles only bump
/// `truncated`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tallies {
    pub cycles: u64,
    pub adversary_blocks: u64,
    pub honest_blocks: u64,
    pub replaced_confirmed_blocks: u64,
    pub double_spending: u64,
    pub move_funds: u64,
    pub service: u64,
    pub not_applicable: u64,
    pub overrides: u64,
    pub adopts: u64,
    pub truncated: u64,
}

impl Tallies {
    fn record(&mut self, o: &CycleOutcome) {
        if o.end == CycleEnd::Truncated {
            self.truncated += 1;
            return;
        }
        self.cycles += 1;
        self.adversary_blocks += o.adversary_blocks_to_offset;
        self.honest_blocks += o.honest_blocks_to_offset;
        self.replaced_confirmed_blocks += o.replaced_confirmed_blocks;
        match o.event {
            DoubleSpendEvent::DoubleSpending => self.double_spending += 1,
            DoubleSpendEvent::MoveFunds => self.move_funds += 1,
            DoubleSpendEvent::Service => self.service += 1,
            DoubleSpendEvent::NotApplicable => self.not_applicable += 1,
        }
        match o.end {
            CycleEnd::Adopt => self.adopts += 1,
            CycleEnd::Override => self.overrides += 1,
            CycleEnd::Truncated => {}
        }
    }
}

impl AddAssign for Tallies {
    fn add_assign(&mut self, o: Self) {
        self.cycles += o.cycles;
        self.adversary_blocks += o.adversary_blocks;
        self.honest_blocks += o.honest_blocks;
        self.replaced_confirmed_blocks += o.replaced_confirmed_blocks;
        self.double_spending += o.double_spending;
        self.move_funds += o.move_funds;
        self.service += o.service;
        self.not_applicable += o.not_applicable;
        self.overrides += o.overrides;
        self.adopts += o.adopts;
        self.truncated += o.truncated;
    }
}

/// Monte Carlo point estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub cycles: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventEstimate {
    pub double_spending: SimEstimate,
    pub move_funds: SimEstimate,
    pub service: SimEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Metric {
    RevenueRatio,
    EventProbs,
    /// Revenue with each replaced confirmed block worth the given reward.
    CombinedReward(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricEstimate {
    Scalar(SimEstimate),
    Events(EventEstimate),
}

/// Result of a simulation run: totals plus per-batch totals for standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub config: SimConfig,
    pub totals: Tallies,
    pub batches: Vec<Tallies>,
}

impl SimRun {
    fn estimate(&self, f: impl Fn(&Tallies) -> f64) -> SimEstimate {
        let used: Vec<f64> = self
            .batches
            .iter()
            .filter(|b| b.cycles > 0)
            .map(&f)
            .collect();
        let n = used.len();
        let std_error = if n < 2 {
            0.0
        } else {
            let mean = used.iter().sum::<f64>() / n as f64;
            let var = used.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        SimEstimate {
            mean: f(&self.totals),
            std_error,
            cycles: self.totals.cycles,
            seed: self.config.seed,
        }
    }

    /// `Σx / Σ(x + y)`.
    pub fn revenue_ratio(&self) -> SimEstimate {
        self.estimate(|t| {
            ratio(
                t.adversary_blocks as f64,
                (t.adversary_blocks + t.honest_blocks) as f64,
            )
        })
    }

    pub fn event_probs(&self) -> EventEstimate {
        let freq = |count: fn(&Tallies) -> u64| {
            self.estimate(move |t| ratio(count(t) as f64, t.cycles as f64))
        };
        EventEstimate {
            double_spending: freq(|t| t.double_spending),
            move_funds: freq(|t| t.move_funds),
            service: freq(|t| t.service),
        }
    }

    /// `Σ(x + R · replaced) / Σ(x + y)`; defined for level `k + 1` only.
    pub fn combined_reward(&self, reward_r: f64) -> Result<SimEstimate> {
        if !(reward_r.is_finite() && reward_r >= 0.0) {
            return Err(Error::Reward(reward_r));
        }
        if self.config.level != StubbornLevel::Finite(self.config.k + 1) {
            return Err(Error::InvalidRequest(format!(
                "combined reward is defined for level k + 1 = {}, got level {}",
                self.config.k + 1,
                self.config.level
            )));
        }
        Ok(self.estimate(|t| {
            ratio(
                t.adversary_blocks as f64 + reward_r * t.replaced_confirmed_blocks as f64,
                (t.adversary_blocks + t.honest_blocks) as f64,
            )
        }))
    }

    pub fn metric(&self, metric: Metric) -> Result<MetricEstimate> {
        Ok(match metric {
            Metric::RevenueRatio => MetricEstimate::Scalar(self.revenue_ratio()),
            Metric::EventProbs => MetricEstimate::Events(self.event_probs()),
            Metric::CombinedReward(r) => MetricEstimate::Scalar(self.combined_reward(r)?),
        })
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

#[derive(Debug, Clone, Default)]
struct ChunkResult {
    totals: Tallies,
    batches: Vec<Tallies>,
}

impl ChunkResult {
    fn merge(mut self, other: ChunkResult) -> ChunkResult {
        self.totals += other.totals;
        if self.batches.is_empty() {
            return ChunkResult {
                totals: self.totals,
                batches: other.batches,
            };
        }
        for (b, o) in self.batches.iter_mut().zip(other.batches) {
            *b += o;
        }
        self
    }
}

fn run_chunk(config: &SimConfig, chunk: u64, batch_count: u64) -> Result<ChunkResult> {
    let mut rng = chunk_rng(config.seed, chunk);
    let mut source = RngArrivals::new(config.params, &mut rng);
    let mut result = ChunkResult {
        totals: Tallies::default(),
        batches: vec![Tallies::default(); batch_count as usize],
    };
    let start = chunk * CHUNK_CYCLES;
    let end = (start + CHUNK_CYCLES).min(config.cycles);
    for i in start..end {
        let outcome = run_cycle(
            config.strategy,
            config.level,
            config.k,
            config.max_arrivals,
            &mut source,
        )?;
        result.totals.record(&outcome);
        let batch = (i as u128 * batch_count as u128 / config.cycles as u128) as usize;
        result.batches[batch].record(&outcome);
    }
    Ok(result)
}

/// Simulates `config.cycles` cycles.
pub fn simulate(config: SimConfig) -> Result<SimRun> {
    if config.cycles == 0 {
        return Err(Error::InvalidRequest("cycles must be at least 1".into()));
    }
    if config.max_arrivals == 0 {
        return Err(Error::InvalidRequest(
            "max arrivals must be at least 1".into(),
        ));
    }
    level_limit(config.level)?;
    if config.k == 0 {
        return Err(Error::ZeroConfirmations);
    }
    let batch_count = BATCHES.min(config.cycles);
    let chunks = config.cycles.div_ceil(CHUNK_CYCLES);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidRequest(format!("cannot start worker pool: {e}")))?;
    let merged = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| run_chunk(&config, c, batch_count))
            .try_reduce(ChunkResult::default, |a, b| Ok(a.merge(b)))
    })?;
    Ok(SimRun {
        config,
        totals: merged.totals,
        batches: merged.batches,
    })
}

/// Simulates and reduces to one metric.
pub fn estimate(config: SimConfig, metric: Metric) -> Result<MetricEstimate> {
    if let Metric::CombinedReward(r) = metric {
        // reject before spending any time simulating
        if config.level != StubbornLevel::Finite(config.k + 1) {
            return Err(Error::InvalidRequest(format!(
                "combined reward is defined for level k + 1 = {}, got level {}",
                config.k + 1,
                config.level
            )));
        }
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::Reward(r));
        }
    }
    simulate(config)?.metric(metric)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scripted(
        strategy: Strategy,
        level: u32,
        k: u32,
        arrivals: &str,
        switches: &str,
    ) -> CycleOutcome {
        let mut s = ScriptedArrivals::new(arrivals, switches);
        let o = run_cycle(strategy, StubbornLevel::Finite(level), k, 1000, &mut s).unwrap();
        assert_eq!(s.arrivals_used(), arrivals.len(), "unused arrivals");
        assert_eq!(s.switches_used(), switches.len(), "unused switches");
        o
    }

    #[test]
    fn honest_first_block_adopts_immediately() {
        for level in 1..5 {
            let o = scripted(Strategy::Stubborn, level, 3, "H", "");
            assert_eq!(
                (o.adversary_blocks_to_offset, o.honest_blocks_to_offset),
                (0, 1)
            );
            assert_eq!(o.end, CycleEnd::Adopt);
            assert_eq!(o.event, DoubleSpendEvent::Service);
        }
    }

    #[test]
    fn all_adversarial_overrides_at_level() {
        let o = scripted(Strategy::Stubborn, 1, 2, "A", "");
        assert_eq!(o.end, CycleEnd::Override);
        assert_eq!(
            (o.adversary_blocks_to_offset, o.honest_blocks_to_offset),
            (1, 0)
        );
        assert_eq!(o.event, DoubleSpendEvent::NotApplicable);
        // above level one the lead must shrink back to one before releasing
        let mut s = ScriptedArrivals::new(&"A".repeat(40), "");
        let o = run_cycle(Strategy::Stubborn, StubbornLevel::Finite(3), 2, 40, &mut s).unwrap();
        assert_eq!(o.end, CycleEnd::Truncated);
        let o = scripted(Strategy::Stubborn, 3, 2, "AAAHH", "");
        assert_eq!(o.end, CycleEnd::Override);
        assert_eq!(o.adversary_blocks_to_offset, 3);
        assert_eq!(o.event, DoubleSpendEvent::DoubleSpending);
        assert_eq!(o.replaced_confirmed_blocks, 1);
    }

    #[test]
    fn matched_switch_then_adopt() {
        // A H(match) H(switch onto the adversarial block): adopt with prefix 1
        let o = scripted(Strategy::Stubborn, 3, 6, "AHH", "S");
        assert_eq!(o.end, CycleEnd::Adopt);
        assert_eq!(
            (o.adversary_blocks_to_offset, o.honest_blocks_to_offset),
            (1, 1)
        );
        assert_eq!(o.event, DoubleSpendEvent::MoveFunds);
        let o = scripted(Strategy::Stubborn, 3, 6, "AHH", "-");
        assert_eq!(
            (o.adversary_blocks_to_offset, o.honest_blocks_to_offset),
            (0, 2)
        );
        assert_eq!(o.event, DoubleSpendEvent::Service);
    }

    #[test]
    fn confirmed_then_switched_is_double_spend() {
        // k = 1: the honest block is confirmed as soon as it is mined
        let o = scripted(Strategy::Stubborn, 2, 1, "AHH", "S");
        assert_eq!(o.event, DoubleSpendEvent::DoubleSpending);
        assert_eq!(o.replaced_confirmed_blocks, 1);
    }

    #[test]
    fn stealth_only_matches_below_level() {
        // S = 3: the A H step at heights (1, 1) is not a match, so no switch draw
        let o = scripted(Strategy::Stealth, 3, 2, "AHAHH", "S");
        assert_eq!(o.end, CycleEnd::Adopt);
        assert_eq!(
            (o.adversary_blocks_to_offset, o.honest_blocks_to_offset),
            (2, 1)
        );
        assert_eq!(o.event, DoubleSpendEvent::DoubleSpending);
        let o = scripted(Strategy::Stealth, 3, 2, "AHH", "");
        assert_eq!(
            (o.adversary_blocks_to_offset, o.honest_blocks_to_offset),
            (0, 2)
        );
        let o = scripted(Strategy::Stealth, 3, 2, "AHAHA", "");
        assert_eq!(o.end, CycleEnd::Override);
        assert_eq!(o.adversary_blocks_to_offset, 3);
    }

    #[test]
    fn infinite_level_truncates() {
        let mut s = ScriptedArrivals::new(&"A".repeat(50), "");
        let o = run_cycle(Strategy::Stubborn, StubbornLevel::Infinite, 6, 50, &mut s).unwrap();
        assert_eq!(o.end, CycleEnd::Truncated);
        assert_eq!(o.event, DoubleSpendEvent::NotApplicable);
    }

    #[test]
    fn config_validation() {
        let params = ModelParams::new(0.3, 0.5).unwrap();
        let cfg =
            SimConfig::new(params, Strategy::Stubborn, StubbornLevel::Finite(4), 2).cycles(10);
        assert!(matches!(
            estimate(cfg, Metric::CombinedReward(5.0)),
            Err(Error::InvalidRequest(_))
        ));
        assert!(matches!(
            simulate(cfg.cycles(0)),
            Err(Error::InvalidRequest(_))
        ));
        assert!(matches!(
            simulate(SimConfig { k: 0, ..cfg }),
            Err(Error::ZeroConfirmations)
        ));
        assert!(matches!(
            simulate(SimConfig {
                level: StubbornLevel::Finite(0),
                ..cfg
            }),
            Err(Error::ZeroLevel)
        ));
    }

    #[test]
    fn single_honest_cycle_estimate() {
        // find a seed whose first cycle starts with an honest block
        let params = ModelParams::new(0.3, 0.0).unwrap();
        let seed = (0..100)
            .find(|&s| !RngArrivals::new(params, &mut chunk_rng(s, 0)).next_is_adversarial())
            .unwrap();
        let cfg = SimConfig::new(params, Strategy::Stubborn, StubbornLevel::Finite(2), 1)
            .cycles(1)
            .seed(seed);
        let run = simulate(cfg).unwrap();
        assert_eq!(run.revenue_ratio().mean, 0.0);
        assert_eq!(run.totals.honest_blocks, 1);
        assert_eq!(run.revenue_ratio().std_error, 0.0);
    }
}
