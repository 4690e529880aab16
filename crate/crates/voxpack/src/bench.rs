//! Seeded experiment batches, packing metrics, and report emission.
//!
//! An experiment rolls one policy over problem sequences emitted for a list
//! of seeds and collects per-episode metrics plus aggregates. The CSV
//! contains only deterministic columns, so identical seeds and config give
//! byte-identical files; wall-clock timing lives in the JSON report.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::buffered::ObjectOrder;
use crate::candgen::CandConfig;
use crate::learner::{CurvePoint, LearnedPolicy, ValueModel};
use crate::packenv::{ItemView, PackEnv, PackError};
use crate::policies::{Heuristic, HeuristicPolicy, Policy};
use crate::shapelib::{emit_problem, Dataset, ShapeError};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("reference utility must be positive, got {0}")]
    BadReference(f64),
    #[error("comparison needs at least one report")]
    NothingToCompare,
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Pack(#[from] PackError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Performance discrepancy of mean utility `u` against a reference `u_star`.
pub fn gap(u_star: f64, u: f64) -> Result<f64, BenchError> {
    if !(u_star > 0.0) {
        return Err(BenchError::BadReference(u_star));
    }
    Ok((u_star - u) / u_star)
}

/// Summed bounding-box volume of every placed item over container capacity.
/// May exceed 1, and always dominates the fill fraction (a box contains its
/// shape).
pub fn product_utility(env: &PackEnv) -> f64 {
    env.placed_aabb_cells() as f64 / env.capacity() as f64
}

/// What acts in an experiment: a named heuristic or a trained ranker.
#[derive(Clone)]
pub enum Method {
    Heuristic(Heuristic),
    Learned(ValueModel),
}

/// Decorrelates policy randomness from the problem stream, which is seeded
/// with the raw episode seed.
const POLICY_SEED_SALT: u64 = 0x517C_C1B7_2722_0A95;

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Heuristic(h) => h.to_string(),
            Method::Learned(_) => "learned".to_owned(),
        }
    }

    fn policy(&self, cand: &CandConfig, seed: u64) -> Box<dyn Policy> {
        match self {
            Method::Heuristic(h) => {
                Box::new(HeuristicPolicy::new(*h, cand.clone(), seed ^ POLICY_SEED_SALT))
            }
            Method::Learned(model) => {
                Box::new(LearnedPolicy::greedy(model.clone(), cand.clone()))
            }
        }
    }

    /// Buffered runs order slots by volume for heuristics and by best
    /// candidate value for a ranker.
    fn ordering(&self, cand: &CandConfig) -> ObjectOrder {
        match self {
            Method::Heuristic(_) => ObjectOrder::LargestFirst,
            Method::Learned(model) => {
                ObjectOrder::Learned { model: model.clone(), cand: cand.clone() }
            }
        }
    }
}

pub struct Experiment<'a> {
    pub method: Method,
    pub dataset: &'a Dataset,
    pub dataset_label: String,
    pub container: (u32, u32, u32),
    pub dh_cm: f64,
    /// Lookahead slots; 1 is plain online packing.
    pub buffer_k: usize,
    pub cand: CandConfig,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub seed: u64,
    pub utility: f64,
    /// Items placed.
    pub count: usize,
    pub product_utility: f64,
    /// Decision-making seconds over the episode: slot selection, candidate
    /// generation, and policy inference. Kept out of the CSV.
    pub seconds: f64,
    /// Decisions taken, including a final one that ends the episode.
    pub decisions: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub method: String,
    pub dataset: String,
    pub container: (u32, u32, u32),
    pub dh_cm: f64,
    pub buffer_k: usize,
    pub episodes: Vec<EpisodeRow>,
    pub mean_utility: f64,
    /// Population variance of per-episode utility (divisor n).
    pub utility_variance: f64,
    pub mean_count: f64,
    pub mean_seconds_per_decision: f64,
}

impl RunReport {
    fn assemble(exp: &Experiment, episodes: Vec<EpisodeRow>) -> Self {
        let n = episodes.len() as f64;
        let mean_utility = episodes.iter().map(|e| e.utility).sum::<f64>() / n;
        let utility_variance = episodes
            .iter()
            .map(|e| (e.utility - mean_utility).powi(2))
            .sum::<f64>()
            / n;
        let mean_count = episodes.iter().map(|e| e.count as f64).sum::<f64>() / n;
        let seconds: f64 = episodes.iter().map(|e| e.seconds).sum();
        let decisions: usize = episodes.iter().map(|e| e.decisions).sum();
        RunReport {
            method: exp.method.label(),
            dataset: exp.dataset_label.clone(),
            container: exp.container,
            dh_cm: exp.dh_cm,
            buffer_k: exp.buffer_k,
            episodes,
            mean_utility,
            utility_variance,
            mean_count,
            mean_seconds_per_decision: seconds / decisions.max(1) as f64,
        }
    }
}

/// One decision over the current item, with the decision time accounted.
fn decide_plain(
    env: &mut PackEnv,
    policy: &mut dyn Policy,
    seconds: &mut f64,
) -> Option<(u8, usize, usize)> {
    let view = env.current()?;
    let t = Instant::now();
    let decision = policy.decide(env, &view);
    *seconds += t.elapsed().as_secs_f64();
    if decision.is_none() {
        env.abandon();
    }
    decision
}

/// Rolls one episode to termination, timing only the decision work.
/// Mirrors `policies::run_episode` and `BufferedEnv::step` exactly — the
/// unit tests hold the trajectories bit-equal.
fn roll(
    env: &mut PackEnv,
    buffer_k: usize,
    order: &ObjectOrder,
    policy: &mut dyn Policy,
) -> (f64, usize) {
    let mut seconds = 0.0;
    let mut decisions = 0;
    if buffer_k <= 1 {
        while !env.is_done() {
            decisions += 1;
            if let Some((spin, x, y)) = decide_plain(env, policy, &mut seconds) {
                env.place(spin, x, y).expect("policies only return feasible actions");
            }
        }
        return (seconds, decisions);
    }
    while !env.is_done() {
        decisions += 1;
        let t = Instant::now();
        let choice = {
            let slots: Vec<ItemView<'_>> =
                (0..buffer_k).map_while(|i| env.pending(i)).collect();
            order.select(env, &slots)
        };
        let Some(idx) = choice else {
            seconds += t.elapsed().as_secs_f64();
            env.abandon();
            break;
        };
        env.promote(idx);
        let view = env.current().expect("episode is live");
        let decision = policy.decide(env, &view);
        seconds += t.elapsed().as_secs_f64();
        match decision {
            Some((spin, x, y)) => {
                env.place(spin, x, y).expect("policies only return feasible actions");
            }
            None => env.abandon(),
        }
    }
    (seconds, decisions)
}

/// Runs every seed to termination and assembles the report. Episodes run in
/// parallel; rows come back in seed order regardless of completion order.
pub fn run_experiment(exp: &Experiment) -> Result<RunReport, BenchError> {
    assert!(!exp.seeds.is_empty(), "an experiment needs at least one seed");
    assert!(exp.buffer_k >= 1);
    let episodes = exp
        .seeds
        .par_iter()
        .map(|&seed| -> Result<EpisodeRow, BenchError> {
            let seq = emit_problem(exp.dataset, exp.container, exp.dh_cm, seed)?;
            let mut env = PackEnv::new(exp.dataset, &seq)?;
            let mut policy = exp.method.policy(&exp.cand, seed);
            let order = exp.method.ordering(&exp.cand);
            let (seconds, decisions) = roll(&mut env, exp.buffer_k, &order, policy.as_mut());
            Ok(EpisodeRow {
                seed,
                utility: env.utility(),
                count: env.records().len(),
                product_utility: product_utility(&env),
                seconds,
                decisions,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RunReport::assemble(exp, episodes))
}

/// Replays one seed under the experiment's method and renders the placement
/// trace as JSON lines, one object per placed item.
pub fn trace_episode(exp: &Experiment, seed: u64) -> Result<String, BenchError> {
    let seq = emit_problem(exp.dataset, exp.container, exp.dh_cm, seed)?;
    let mut env = PackEnv::new(exp.dataset, &seq)?;
    let mut policy = exp.method.policy(&exp.cand, seed);
    let order = exp.method.ordering(&exp.cand);
    roll(&mut env, exp.buffer_k, &order, policy.as_mut());
    Ok(crate::packenv::trace_lines(env.records()))
}

/// Per-episode rows, deterministic columns only: identical seeds and config
/// must give byte-identical files, so wall-clock stays out.
pub fn write_episode_csv(report: &RunReport, path: &Path) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["seed", "utility", "count", "product_utility"])?;
    for row in &report.episodes {
        w.write_record([
            row.seed.to_string(),
            row.utility.to_string(),
            row.count.to_string(),
            row.product_utility.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Full report with aggregates and timing.
pub fn write_report_json(report: &RunReport, path: &Path) -> Result<(), BenchError> {
    fs::write(path, serde_json::to_vec_pretty(report)?)?;
    Ok(())
}

pub fn read_report_json(path: &Path) -> Result<RunReport, BenchError> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

/// Training curve rows: frame, loss, eval_utility.
pub fn write_curve_csv(curve: &[CurvePoint], path: &Path) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["frame", "loss", "eval_utility"])?;
    for p in curve {
        w.write_record([p.frame.to_string(), p.loss.to_string(), p.eval_utility.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub method: String,
    pub mean_utility: f64,
    /// Discrepancy against the best method in the table; the best scores 0.
    pub gap: f64,
    pub utility_variance: f64,
    pub mean_count: f64,
    pub mean_seconds_per_decision: f64,
}

/// Side-by-side table with each method's gap against the best mean utility.
pub fn compare(reports: &[RunReport]) -> Result<Vec<CompareRow>, BenchError> {
    if reports.is_empty() {
        return Err(BenchError::NothingToCompare);
    }
    let best = reports
        .iter()
        .map(|r| r.mean_utility)
        .fold(f64::NEG_INFINITY, f64::max);
    reports
        .iter()
        .map(|r| {
            Ok(CompareRow {
                method: r.method.clone(),
                mean_utility: r.mean_utility,
                gap: gap(best, r.mean_utility)?,
                utility_variance: r.utility_variance,
                mean_count: r.mean_count,
                mean_seconds_per_decision: r.mean_seconds_per_decision,
            })
        })
        .collect()
}

pub fn write_compare_csv(rows: &[CompareRow], path: &Path) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "method",
        "mean_utility",
        "gap",
        "utility_variance",
        "mean_count",
        "mean_seconds_per_decision",
    ])?;
    for r in rows {
        w.write_record([
            r.method.clone(),
            r.mean_utility.to_string(),
            r.gap.to_string(),
            r.utility_variance.to_string(),
            r.mean_count.to_string(),
            r.mean_seconds_per_decision.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests;
