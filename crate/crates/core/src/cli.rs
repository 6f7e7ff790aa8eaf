//! The `stubborn` command-line front end.
//!
//! [`run`] parses arguments, writes results to `out` and diagnostics to
//! `err`, and returns the process exit code: 0 on success, 2 for invalid
//! parameters, 3 when a level search hits its cap or simulated cycles were
//! truncated, 1 for I/O failures.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::analytic::{
    breakeven_reward, combined_revenue, double_spend_probs, revenue, service_profitability,
    CombinedRevenueParams, ModelParams, Strategy, StubbornLevel,
};
use crate::error::Error;
use crate::optimize::{self, DEFAULT_CAP};
use crate::report::{fixed6, write_csv, write_json, Aux, ReportRow, ReportValue};
use crate::sim::{
    self, EventEstimate, Metric, SimConfig, SimEstimate, SimRun, DEFAULT_MAX_ARRIVALS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "stubborn",
    version,
    about = "Stubborn / stealth mining revenue and double-spend analysis"
)]
struct Cli {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Simulator seed
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Revenue ratio at one level
    Revenue(RevenueArgs),
    /// Optimal and maximal profitable levels
    Optimal(OptimalArgs),
    /// Double-spend event probabilities, combined revenue and break-even reward
    Doublespend(DoublespendArgs),
    /// Evaluate a metric over an (alpha, gamma) grid
    Sweep(SweepArgs),
    /// Monte Carlo estimate next to the closed form
    Simulate(SimulateArgs),
    /// Regenerate the closed-form reference tables
    Tables(TablesArgs),
}

#[derive(Debug, Args)]
struct PointArgs {
    /// Adversarial hash fraction, decimal or fraction such as 1/3
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    alpha: f64,
    /// Fraction of honest miners that build on a matched adversarial block
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    gamma: f64,
}

impl PointArgs {
    fn params(&self) -> Result<ModelParams, Error> {
        ModelParams::new(self.alpha, self.gamma)
    }
}

#[derive(Debug, Args)]
struct RevenueArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, default_value = "stubborn")]
    strategy: Strategy,
    /// Positive integer or "inf"
    #[arg(long)]
    level: StubbornLevel,
}

#[derive(Debug, Args)]
struct OptimalArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, default_value = "stubborn")]
    strategy: Strategy,
    /// Largest level a scan may visit
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u32,
}

#[derive(Debug, Args)]
struct DoublespendArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Confirmation depth
    #[arg(long)]
    k: u32,
    #[arg(long, default_value = "stubborn")]
    strategy: Strategy,
    /// Double-spend value per replaced confirmed block, in block rewards
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    reward: Option<f64>,
    /// Value of the purchased service, in block rewards
    #[arg(long, value_parser = parse_number, requires = "fee", allow_hyphen_values = true)]
    service_value: Option<f64>,
    /// Fee paid for the service, in block rewards
    #[arg(long, value_parser = parse_number, requires = "service_value", allow_hyphen_values = true)]
    fee: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[allow(non_camel_case_types)]
#[value(rename_all = "verbatim")]
pub enum SweepMetric {
    rho_L,
    sigma_S,
    L_star,
    S_star,
    L_bar,
    S_bar,
    ds_prob_stubborn,
    ds_prob_stealth,
    move_funds,
    service,
    r_star,
    normalized_ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    metric: SweepMetric,
    /// start:stop:step, or a single value
    #[arg(long, value_parser = parse_range)]
    alpha: GridRange,
    /// start:stop:step, or a single value
    #[arg(long, value_parser = parse_range)]
    gamma: GridRange,
    #[arg(long)]
    level: Option<StubbornLevel>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    strategy: Option<Strategy>,
    #[arg(long)]
    cap: Option<u32>,
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimMetric {
    Revenue,
    Events,
    Combined,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, default_value = "stubborn")]
    strategy: Strategy,
    /// Positive integer or "inf"
    #[arg(long)]
    level: StubbornLevel,
    /// Confirmation depth used to classify events
    #[arg(long, default_value_t = 6)]
    k: u32,
    #[arg(long, default_value_t = 1_000_000)]
    cycles: u64,
    #[arg(long, value_enum, default_value = "revenue")]
    metric: SimMetric,
    /// Reward per replaced confirmed block for the combined metric
    #[arg(long, value_parser = parse_number, default_value = "0", allow_hyphen_values = true)]
    reward: f64,
    /// Arrivals after which a cycle is abandoned as truncated
    #[arg(long, default_value_t = DEFAULT_MAX_ARRIVALS)]
    max_arrivals: u64,
}

#[derive(Debug, Args)]
struct TablesArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    table: u8,
}

/// Accepts decimals and fractions `p/q`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in {s:?}"))?;
            let d: f64 = d
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in {s:?}"))?;
            if d == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            n / d
        }
        None => s.parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not a finite number: {s:?}"))
    }
}

/// An inclusive arithmetic grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridRange {
    pub fn values(&self) -> Vec<f64> {
        if self.step == 0.0 {
            return vec![self.start];
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as u64;
        (0..=n)
            .map(|i| {
                let v = self.start + i as f64 * self.step;
                // strip accumulated binary noise such as 0.30000000000000004
                (v * 1e12).round() / 1e12
            })
            .collect()
    }
}

pub fn parse_range(s: &str) -> Result<GridRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => {
            let v = parse_number(single)?;
            Ok(GridRange {
                start: v,
                stop: v,
                step: 0.0,
            })
        }
        [start, stop, step] => {
            let (start, stop, step) = (
                parse_number(start)?,
                parse_number(stop)?,
                parse_number(step)?,
            );
            if step <= 0.0 {
                return Err(format!("step must be positive in {s:?}"));
            }
            if stop < start {
                return Err(format!("stop is below start in {s:?}"));
            }
            if (stop - start) / step > 1e6 {
                return Err(format!("range {s:?} has too many points"));
            }
            Ok(GridRange { start, stop, step })
        }
        _ => Err(format!(
            "expected start:stop:step or a single value, got {s:?}"
        )),
    }
}

#[derive(Debug)]
enum Failure {
    Domain(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DOMAIN } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let ctx = Context {
        json: cli.json,
        seed: cli.seed,
        workers: cli.workers,
    };
    let result = match &cli.command {
        Command::Revenue(a) => cmd_revenue(&ctx, a, out),
        Command::Optimal(a) => cmd_optimal(&ctx, a, out),
        Command::Doublespend(a) => cmd_doublespend(&ctx, a, out),
        Command::Sweep(a) => cmd_sweep(&ctx, a, out),
        Command::Simulate(a) => cmd_simulate(&ctx, a, out, err),
        Command::Tables(a) => cmd_tables(&ctx, a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_cap_exceeded() {
                EXIT_CAP
            } else {
                EXIT_DOMAIN
            }
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_IO
        }
    }
}

struct Context {
    json: bool,
    seed: u64,
    workers: usize,
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

fn cmd_revenue(ctx: &Context, a: &RevenueArgs, out: &mut dyn Write) -> CmdResult {
    let params = a.point.params()?;
    let r = revenue(params, a.strategy, a.level)?;
    let normalized = r.ratio / params.alpha();
    if ctx.json {
        emit_json(
            out,
            &json!({
                "alpha": params.alpha(),
                "gamma": params.gamma(),
                "strategy": a.strategy,
                "level": a.level,
                "ratio": r.ratio,
                "normalized_ratio": normalized,
                "successful_blocks": r.successful_blocks,
                "unsuccessful_adversarial_blocks": r.unsuccessful_adversarial_blocks,
                "total_unsuccessful_blocks": r.total_unsuccessful_blocks,
            }),
        )?;
    } else {
        writeln!(out, "strategy                         {}", a.strategy)?;
        writeln!(out, "alpha                            {}", params.alpha())?;
        writeln!(out, "gamma                            {}", params.gamma())?;
        writeln!(out, "level                            {}", a.level)?;
        writeln!(out, "ratio                            {}", fixed6(r.ratio))?;
        writeln!(
            out,
            "normalized_ratio                 {}",
            fixed6(normalized)
        )?;
        writeln!(
            out,
            "successful_blocks                {}",
            fixed6(r.successful_blocks)
        )?;
        writeln!(
            out,
            "unsuccessful_adversarial_blocks  {}",
            fixed6(r.unsuccessful_adversarial_blocks)
        )?;
        writeln!(
            out,
            "total_unsuccessful_blocks        {}",
            fixed6(r.total_unsuccessful_blocks)
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_optimal(ctx: &Context, a: &OptimalArgs, out: &mut dyn Write) -> CmdResult {
    let params = a.point.params()?;
    let best = optimize::optimal(params, a.strategy, a.cap)?;
    let bar = optimize::max_profitable(params, a.strategy, a.cap)?;
    let (opt_name, bar_name) = match a.strategy {
        Strategy::Stubborn => ("L_star", "L_bar"),
        Strategy::Stealth => ("S_star", "S_bar"),
    };
    if ctx.json {
        emit_json(
            out,
            &json!({
                "alpha": params.alpha(),
                "gamma": params.gamma(),
                "strategy": a.strategy,
                opt_name: best.best_level,
                "best_ratio": best.best_ratio,
                "normalized_ratio": best.best_ratio / params.alpha(),
                bar_name: bar,
                "method": best.method,
                "iterations": best.iterations,
            }),
        )?;
    } else {
        writeln!(out, "strategy          {}", a.strategy)?;
        writeln!(out, "{opt_name:<17} {}", best.best_level)?;
        writeln!(out, "best_ratio        {}", fixed6(best.best_ratio))?;
        writeln!(
            out,
            "normalized_ratio  {}",
            fixed6(best.best_ratio / params.alpha())
        )?;
        writeln!(out, "{bar_name:<17} {bar}")?;
        writeln!(out, "method            {}", best.method)?;
        writeln!(out, "iterations        {}", best.iterations)?;
    }
    Ok(EXIT_OK)
}

fn cmd_doublespend(ctx: &Context, a: &DoublespendArgs, out: &mut dyn Write) -> CmdResult {
    let params = a.point.params()?;
    let events = double_spend_probs(params, a.strategy, a.k)?;
    let combined = match a.reward {
        Some(r) => {
            let cfg = CombinedRevenueParams::new(a.k, r)?;
            Some((
                combined_revenue(params, a.strategy, cfg)?,
                breakeven_reward(params, a.k, a.strategy)?,
            ))
        }
        None => None,
    };
    let profitable = match (a.service_value, a.fee) {
        (Some(v), Some(f)) => Some(service_profitability(params, a.k, v, f, a.strategy)?),
        _ => None,
    };
    if ctx.json {
        let mut doc = json!({
            "alpha": params.alpha(),
            "gamma": params.gamma(),
            "strategy": a.strategy,
            "k": a.k,
            "double_spending": events.double_spending,
            "move_funds": events.move_funds,
            "service": events.service,
        });
        if let Some((ratio, r_star)) = combined {
            doc["reward"] = json!(a.reward);
            doc["combined_ratio"] = json!(ratio);
            doc["r_star"] = serde_json::to_value(ReportValue::from(r_star)).unwrap_or_default();
        }
        if let Some(p) = profitable {
            doc["service_value"] = json!(a.service_value);
            doc["fee"] = json!(a.fee);
            doc["profitable"] = json!(p);
        }
        emit_json(out, &doc)?;
    } else {
        writeln!(out, "strategy         {}", a.strategy)?;
        writeln!(out, "k                {}", a.k)?;
        writeln!(out, "double_spending  {}", fixed6(events.double_spending))?;
        writeln!(out, "move_funds       {}", fixed6(events.move_funds))?;
        writeln!(out, "service          {}", fixed6(events.service))?;
        if let Some((ratio, r_star)) = combined {
            writeln!(out, "combined_ratio   {}", fixed6(ratio))?;
            writeln!(out, "r_star           {}", ReportValue::from(r_star))?;
        }
        if let Some(p) = profitable {
            writeln!(out, "profitable       {p}")?;
        }
    }
    Ok(EXIT_OK)
}

/// A validated sweep request.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub metric: SweepMetric,
    pub level: Option<StubbornLevel>,
    pub k: Option<u32>,
    pub strategy: Strategy,
    pub cap: u32,
}

impl SweepSpec {
    fn from_args(a: &SweepArgs) -> Result<Self, Error> {
        use SweepMetric::*;
        let needs_level = matches!(a.metric, rho_L | sigma_S | normalized_ratio);
        let needs_k = matches!(
            a.metric,
            ds_prob_stubborn | ds_prob_stealth | move_funds | service | r_star
        );
        let takes_strategy = matches!(a.metric, move_funds | service | r_star | normalized_ratio);
        let takes_cap = matches!(a.metric, L_star | S_star | L_bar | S_bar);
        let name = a
            .metric
            .to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default();
        let reject =
            |flag: &str| Error::InvalidRequest(format!("--{flag} does not apply to metric {name}"));
        let require =
            |flag: &str| Error::InvalidRequest(format!("metric {name} requires --{flag}"));
        match (needs_level, a.level) {
            (true, None) => return Err(require("level")),
            (false, Some(_)) => return Err(reject("level")),
            _ => {}
        }
        match (needs_k, a.k) {
            (true, None) => return Err(require("k")),
            (false, Some(_)) => return Err(reject("k")),
            (true, Some(0)) => return Err(Error::ZeroConfirmations),
            _ => {}
        }
        if !takes_strategy && a.strategy.is_some() {
            return Err(reject("strategy"));
        }
        if !takes_cap && a.cap.is_some() {
            return Err(reject("cap"));
        }
        let alphas = a.alpha.values();
        let gammas = a.gamma.values();
        for &alpha in &alphas {
            ModelParams::new(alpha, 0.0)?;
        }
        for &gamma in &gammas {
            ModelParams::new(0.25, gamma)?;
        }
        Ok(SweepSpec {
            alphas,
            gammas,
            metric: a.metric,
            level: a.level,
            k: a.k,
            strategy: a.strategy.unwrap_or(Strategy::Stubborn),
            cap: a.cap.unwrap_or(DEFAULT_CAP),
        })
    }

    fn cell(&self, alpha: f64, gamma: f64) -> Result<ReportRow, Error> {
        use SweepMetric::*;
        let params = ModelParams::new(alpha, gamma)?;
        let k = self.k.unwrap_or(1);
        let level = self.level.unwrap_or(StubbornLevel::Finite(1));
        let mut aux = Aux::default();
        let value = match self.metric {
            rho_L | sigma_S => {
                let strategy = if self.metric == rho_L {
                    Strategy::Stubborn
                } else {
                    Strategy::Stealth
                };
                let r = revenue(params, strategy, level)?;
                aux.numerator = Some(r.numerator());
                aux.denominator = Some(r.denominator());
                ReportValue::Real(r.ratio)
            }
            normalized_ratio => {
                ReportValue::Real(revenue(params, self.strategy, level)?.ratio / alpha)
            }
            L_star => optimize::optimal_l(params, self.cap)?.best_level.into(),
            S_star => optimize::optimal_s(params, self.cap)?.best_level.into(),
            L_bar => optimize::max_profitable_l(params, self.cap)?.into(),
            S_bar => optimize::max_profitable_s(params, self.cap)?.into(),
            ds_prob_stubborn => double_spend_probs(params, Strategy::Stubborn, k)?
                .double_spending
                .into(),
            ds_prob_stealth => double_spend_probs(params, Strategy::Stealth, k)?
                .double_spending
                .into(),
            move_funds => double_spend_probs(params, self.strategy, k)?
                .move_funds
                .into(),
            service => double_spend_probs(params, self.strategy, k)?.service.into(),
            r_star => breakeven_reward(params, k, self.strategy)?.into(),
        };
        Ok(ReportRow {
            alpha,
            gamma,
            value,
            aux,
        })
    }

    /// Rows with alpha ascending in the outer loop and gamma in the inner one.
    pub fn evaluate(&self) -> Result<Vec<ReportRow>, Error> {
        let cells: Vec<(f64, f64)> = self
            .alphas
            .iter()
            .flat_map(|&a| self.gammas.iter().map(move |&g| (a, g)))
            .collect();
        cells.par_iter().map(|&(a, g)| self.cell(a, g)).collect()
    }
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidRequest(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn cmd_sweep(ctx: &Context, a: &SweepArgs, out: &mut dyn Write) -> CmdResult {
    let spec = SweepSpec::from_args(a)?;
    let rows = with_pool(ctx.workers, || spec.evaluate())??;
    let format = a
        .format
        .unwrap_or(if ctx.json { Format::Json } else { Format::Csv });
    let write = |w: &mut dyn Write| match format {
        Format::Csv => write_csv(&rows, w),
        Format::Json => write_json(&rows, w),
    };
    match &a.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write(&mut file)?;
        }
        None => write(out)?,
    }
    Ok(EXIT_OK)
}

fn estimate_json(e: &SimEstimate, analytic: f64) -> serde_json::Value {
    json!({
        "mean": e.mean,
        "std_error": e.std_error,
        "cycles": e.cycles,
        "seed": e.seed,
        "analytic": analytic,
        "z_score": z_score(e, analytic),
    })
}

fn z_score(e: &SimEstimate, analytic: f64) -> f64 {
    let diff = (analytic - e.mean).abs();
    if e.std_error > 0.0 {
        diff / e.std_error
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn write_estimate(
    out: &mut dyn Write,
    name: &str,
    e: &SimEstimate,
    analytic: f64,
) -> io::Result<()> {
    writeln!(
        out,
        "{name:<16} estimate {}  std_error {}  analytic {}  z {:.3}",
        fixed6(e.mean),
        fixed6(e.std_error),
        fixed6(analytic),
        z_score(e, analytic)
    )
}

fn cmd_simulate(
    ctx: &Context,
    a: &SimulateArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let params = a.point.params()?;
    let config = SimConfig::new(params, a.strategy, a.level, a.k)
        .cycles(a.cycles)
        .seed(ctx.seed)
        .workers(ctx.workers)
        .max_arrivals(a.max_arrivals);
    let metric = match a.metric {
        SimMetric::Revenue => Metric::RevenueRatio,
        SimMetric::Events => Metric::EventProbs,
        SimMetric::Combined => Metric::CombinedReward(a.reward),
    };
    if let Metric::CombinedReward(r) = metric {
        CombinedRevenueParams::new(a.k, r)?;
        if a.level != StubbornLevel::Finite(a.k + 1) {
            return Err(Error::InvalidRequest(format!(
                "the combined metric is defined for level k + 1 = {}, got {}",
                a.k + 1,
                a.level
            ))
            .into());
        }
    }
    if metric == Metric::EventProbs && a.level != StubbornLevel::Finite(a.k + 1) {
        return Err(Error::InvalidRequest(format!(
            "the closed-form event probabilities are defined for level k + 1 = {}, got {}",
            a.k + 1,
            a.level
        ))
        .into());
    }
    let run: SimRun = sim::simulate(config)?;

    let header = json!({
        "alpha": params.alpha(),
        "gamma": params.gamma(),
        "strategy": a.strategy,
        "level": a.level,
        "k": a.k,
        "cycles": a.cycles,
        "seed": ctx.seed,
        "truncated": run.totals.truncated,
    });
    match metric {
        Metric::RevenueRatio => {
            let est = run.revenue_ratio();
            let analytic = revenue(params, a.strategy, a.level)?.ratio;
            if ctx.json {
                let mut doc = header;
                doc["revenue_ratio"] = estimate_json(&est, analytic);
                emit_json(out, &doc)?;
            } else {
                write_simulation_header(out, a, ctx.seed)?;
                write_estimate(out, "revenue_ratio", &est, analytic)?;
            }
        }
        Metric::EventProbs => {
            let est: EventEstimate = run.event_probs();
            let analytic = double_spend_probs(params, a.strategy, a.k)?;
            let pairs = [
                (
                    "double_spending",
                    est.double_spending,
                    analytic.double_spending,
                ),
                ("move_funds", est.move_funds, analytic.move_funds),
                ("service", est.service, analytic.service),
            ];
            if ctx.json {
                let mut doc = header;
                for (name, e, v) in pairs {
                    doc[name] = estimate_json(&e, v);
                }
                emit_json(out, &doc)?;
            } else {
                write_simulation_header(out, a, ctx.seed)?;
                for (name, e, v) in pairs {
                    write_estimate(out, name, &e, v)?;
                }
            }
        }
        Metric::CombinedReward(r) => {
            let est = run.combined_reward(r)?;
            let analytic =
                combined_revenue(params, a.strategy, CombinedRevenueParams::new(a.k, r)?)?;
            if ctx.json {
                let mut doc = header;
                doc["reward"] = json!(r);
                doc["combined_ratio"] = estimate_json(&est, analytic);
                emit_json(out, &doc)?;
            } else {
                write_simulation_header(out, a, ctx.seed)?;
                write_estimate(out, "combined_ratio", &est, analytic)?;
            }
        }
    }
    if run.totals.truncated > 0 {
        writeln!(
            err,
            "warning: {} cycles hit the {}-arrival bound and were excluded",
            run.totals.truncated, a.max_arrivals
        )?;
        return Ok(EXIT_CAP);
    }
    Ok(EXIT_OK)
}

fn write_simulation_header(out: &mut dyn Write, a: &SimulateArgs, seed: u64) -> io::Result<()> {
    writeln!(
        out,
        "{} level {} k {} alpha {} gamma {} cycles {} seed {}",
        a.strategy, a.level, a.k, a.point.alpha, a.point.gamma, a.cycles, seed
    )
}

/// Adversarial fractions of the `γ = 0` reference table.
pub const TABLE1_ALPHAS: [f64; 7] = [1.0 / 3.0, 0.35, 0.375, 0.4, 0.425, 0.45, 0.475];
/// Adversarial fractions of the two-parameter reference table.
pub const TABLE2_ALPHAS: [f64; 8] = [0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45];
/// Network influences of the two-parameter reference table.
pub const TABLE2_GAMMAS: [f64; 5] = [0.2, 0.4, 0.5, 0.6, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub alpha: f64,
    pub rho_2: f64,
    pub rho_l_star: f64,
    pub l_star: StubbornLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table2Cell {
    pub alpha: f64,
    pub gamma: f64,
    pub rho_l_star: f64,
    pub l_star: StubbornLevel,
}

pub fn table1() -> Result<Vec<Table1Row>, Error> {
    TABLE1_ALPHAS
        .iter()
        .map(|&alpha| {
            let params = ModelParams::new(alpha, 0.0)?;
            let best = optimize::optimal_l(params, DEFAULT_CAP)?;
            Ok(Table1Row {
                alpha,
                rho_2: revenue(params, Strategy::Stubborn, StubbornLevel::Finite(2))?.ratio,
                rho_l_star: best.best_ratio,
                l_star: best.best_level,
            })
        })
        .collect()
}

pub fn table2() -> Result<Vec<Table2Cell>, Error> {
    let mut cells = Vec::new();
    for &alpha in &TABLE2_ALPHAS {
        for &gamma in &TABLE2_GAMMAS {
            let best = optimize::optimal_l(ModelParams::new(alpha, gamma)?, DEFAULT_CAP)?;
            cells.push(Table2Cell {
                alpha,
                gamma,
                rho_l_star: best.best_ratio,
                l_star: best.best_level,
            });
        }
    }
    Ok(cells)
}

const TABLE_NOTE: &str = "note: MDP-baseline columns (optimal-policy and prior stubborn-mining results) are not computed";

fn cmd_tables(ctx: &Context, a: &TablesArgs, out: &mut dyn Write) -> CmdResult {
    if a.table == 1 {
        let rows = table1()?;
        if ctx.json {
            emit_json(out, &rows)?;
            return Ok(EXIT_OK);
        }
        writeln!(
            out,
            "{:<9} {:>9} {:>9} {:>5}",
            "alpha", "rho_2", "rho_L*", "L*"
        )?;
        for r in &rows {
            let alpha = if r.alpha == 1.0 / 3.0 {
                "1/3".to_string()
            } else {
                format!("{}", r.alpha)
            };
            writeln!(
                out,
                "{alpha:<9} {:>9.5} {:>9.5} {:>5}",
                r.rho_2,
                r.rho_l_star,
                r.l_star.to_string()
            )?;
        }
    } else {
        let cells = table2()?;
        if ctx.json {
            emit_json(out, &cells)?;
            return Ok(EXIT_OK);
        }
        write!(out, "{:<7}", "alpha")?;
        for g in TABLE2_GAMMAS {
            write!(out, " {:>9}", format!("g={g}"))?;
        }
        writeln!(out)?;
        for row in cells.chunks(TABLE2_GAMMAS.len()) {
            write!(out, "{:<7}", row[0].alpha)?;
            for c in row {
                write!(out, " {:>9.3}", c.rho_l_star)?;
            }
            writeln!(out)?;
        }
    }
    writeln!(out, "{TABLE_NOTE}")?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_parsing() {
        assert_eq!(parse_number("1/3").unwrap(), 1.0 / 3.0);
        assert_eq!(parse_number("0.35").unwrap(), 0.35);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
        assert!(parse_number("inf").is_err());
    }

    #[test]
    fn ranges() {
        let r = parse_range("0.05:0.45:0.05").unwrap();
        let v = r.values();
        assert_eq!(v.len(), 9);
        assert_eq!(v[5], 0.3);
        assert_eq!(v[8], 0.45);
        assert_eq!(parse_range("0.3").unwrap().values(), vec![0.3]);
        assert_eq!(parse_range("0:1:0.1").unwrap().values().len(), 11);
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("1:0:0.1").is_err());
        assert!(parse_range("0:1").is_err());
    }
}
