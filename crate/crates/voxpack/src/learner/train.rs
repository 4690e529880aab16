//! Training loops: asynchronous actor/learner and a deterministic
//! single-thread interleaved mode.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::RwLock;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::candgen::{generate_candidates, CandConfig, CandidateSet};
use crate::packenv::PackEnv;
use crate::policies::run_episode;
use crate::shapelib::{emit_problem, Dataset};

use super::features::{decision_features, state_features, CandFeat, StateFeat};
use super::model::ValueModel;
use super::policy::{qvalues, select_action, LearnedPolicy};
use super::replay::{ReplayMemory, Transition};
use super::update::{td_update, Adam};
use super::LearnError;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Total environment decisions to train for.
    pub frames: usize,
    pub seed: u64,
    /// Actor threads in asynchronous mode.
    pub workers: usize,
    /// Single-thread mode: one actor, one learner step every
    /// `env_steps_per_update` decisions, bit-reproducible for a fixed seed.
    pub interleaved: bool,
    /// Environment decisions per gradient update. Interleaved mode applies
    /// it in lockstep; asynchronous mode enforces it as a floor, catching up
    /// on the frozen replay after the frame budget when workers outpaced
    /// the learner.
    pub env_steps_per_update: usize,
    pub batch: usize,
    pub gamma: f64,
    pub lr: f64,
    pub replay_capacity: usize,
    /// Updates wait until the replay holds at least this many transitions.
    pub min_replay: usize,
    /// Target model refresh period, in updates.
    pub target_sync: usize,
    pub eps_start: f64,
    pub eps_end: f64,
    /// Fraction of the frame budget over which ε anneals.
    pub anneal_frac: f64,
    /// Frames between evaluation checkpoints.
    pub checkpoint_every: usize,
    pub eval_seeds: Vec<u64>,
    pub cand: CandConfig,
    /// Asynchronous mode only: a worker whose decision takes longer than
    /// this abandons the episode instead of trusting a stale reaction.
    /// Ignored in interleaved mode, where wall time must not matter.
    pub detach_threshold: Option<Duration>,
}

impl TrainConfig {
    pub fn new(frames: usize) -> Self {
        TrainConfig {
            frames,
            seed: 0,
            workers: 16,
            interleaved: false,
            env_steps_per_update: 2,
            batch: 64,
            gamma: 0.99,
            lr: 1e-4,
            replay_capacity: 100_000,
            min_replay: 1000,
            target_sync: 1000,
            eps_start: 1.0,
            eps_end: 0.05,
            anneal_frac: 0.2,
            checkpoint_every: 5000,
            eval_seeds: (1..=8).map(|i| 1_000_000 + i).collect(),
            cand: CandConfig::default(),
            detach_threshold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub frame: usize,
    pub loss: f64,
    pub eval_utility: f64,
}

#[derive(Debug)]
pub struct TrainResult {
    pub model: ValueModel,
    pub curve: Vec<CurvePoint>,
    /// Episodes cut short by the slow-reaction detach hook.
    pub detached_episodes: usize,
}

/// Atomically published parameter snapshots: workers adopt whole `Arc`s, so
/// an adopted model always equals some exact published state.
pub(super) struct ParamBoard {
    slot: RwLock<Arc<ValueModel>>,
}

impl ParamBoard {
    pub(super) fn new(model: &ValueModel) -> Self {
        ParamBoard { slot: RwLock::new(Arc::new(model.clone())) }
    }

    pub(super) fn publish(&self, model: &ValueModel) {
        *self.slot.write().unwrap() = Arc::new(model.clone());
    }

    pub(super) fn adopt(&self) -> Arc<ValueModel> {
        self.slot.read().unwrap().clone()
    }
}

fn epsilon_at(cfg: &TrainConfig, frame: usize) -> f64 {
    let horizon = (cfg.anneal_frac * cfg.frames as f64).max(1.0);
    let t = (frame as f64 / horizon).min(1.0);
    cfg.eps_start + (cfg.eps_end - cfg.eps_start) * t
}

/// What the actor sees before a decision: state features, per-candidate
/// features, and the candidate set itself.
struct Observation {
    state: StateFeat,
    cand_feats: Vec<CandFeat>,
    set: CandidateSet,
}

/// Prepares the next decision, abandoning the episode when the current item
/// has nowhere to go. `None` means the episode is over.
fn observe(env: &mut PackEnv, cand: &CandConfig) -> Option<Observation> {
    if env.is_done() {
        return None;
    }
    let view = env.current()?;
    let set = generate_candidates(env, &view, cand);
    if set.is_empty() {
        env.abandon();
        return None;
    }
    let (state, cand_feats) = decision_features(env, &view, &set.candidates);
    Some(Observation { state, cand_feats, set })
}

fn f32_state(s: &StateFeat) -> [f32; super::STATE_DIM] {
    std::array::from_fn(|i| s[i] as f32)
}

fn f32_cands(cs: &[CandFeat]) -> Vec<[f32; super::CAND_DIM]> {
    cs.iter().map(|c| std::array::from_fn(|i| c[i] as f32)).collect()
}

/// Acts once: ε-greedy over the observation's candidates, places, and
/// observes the successor. Returns the transition and the next observation
/// (shared with the next call so candidates are generated once per item).
fn step_episode(
    env: &mut PackEnv,
    obs: Observation,
    model: &ValueModel,
    epsilon: f64,
    rng: &mut ChaCha8Rng,
    cand: &CandConfig,
) -> (Transition, Option<Observation>) {
    let dummy = vec![false; obs.cand_feats.len()];
    let qs = qvalues(model, &obs.state, &obs.cand_feats, &dummy);
    let idx = select_action(&qs, epsilon, rng);
    let c = obs.set.candidates[idx];
    let report = env.place(c.spin, c.x, c.y).expect("candidate was probe-feasible");

    let next = observe(env, cand);
    let (next_state, next_cands, done) = match &next {
        Some(o) => (f32_state(&o.state), f32_cands(&o.cand_feats), false),
        None => (f32_state(&state_features(env)), Vec::new(), true),
    };
    let transition = Transition {
        state: f32_state(&obs.state),
        cands: f32_cands(&obs.cand_feats),
        chosen: idx as u32,
        reward: report.reward as f32,
        next_state,
        next_cands,
        done,
    };
    (transition, next)
}

/// Mean greedy-rollout utility of `model` over the given problem seeds.
pub fn evaluate(
    model: &ValueModel,
    dataset: &Dataset,
    container: (u32, u32, u32),
    dh_cm: f64,
    cand: &CandConfig,
    seeds: &[u64],
) -> Result<f64, LearnError> {
    assert!(!seeds.is_empty());
    let mut total = 0.0;
    for &seed in seeds {
        let seq = emit_problem(dataset, container, dh_cm, seed)?;
        let mut env = PackEnv::new(dataset, &seq)?;
        let mut policy = LearnedPolicy::greedy(model.clone(), cand.clone());
        total += run_episode(&mut env, &mut policy);
    }
    Ok(total / seeds.len() as f64)
}

/// Trains a ranker on problems emitted from `dataset`. Asynchronous by
/// default; `cfg.interleaved` selects the deterministic single-thread mode.
/// Divergence (non-finite loss) aborts with the last checkpointed model.
pub fn train(
    dataset: &Dataset,
    container: (u32, u32, u32),
    dh_cm: f64,
    cfg: &TrainConfig,
) -> Result<TrainResult, LearnError> {
    assert!(cfg.env_steps_per_update >= 1);
    // Fail on an impossible setup before spawning anything.
    emit_problem(dataset, container, dh_cm, cfg.seed)?;
    if cfg.interleaved {
        train_interleaved(dataset, container, dh_cm, cfg)
    } else {
        train_async(dataset, container, dh_cm, cfg)
    }
}

fn train_interleaved(
    dataset: &Dataset,
    container: (u32, u32, u32),
    dh_cm: f64,
    cfg: &TrainConfig,
) -> Result<TrainResult, LearnError> {
    let mut online = ValueModel::init(cfg.seed);
    let mut target = online.clone();
    let mut adam = Adam::new();
    let replay = ReplayMemory::new(cfg.replay_capacity);

    let mut problem_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9E37_79B9_7F4A_7C15);
    let mut action_rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut sample_rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));

    let mut curve = Vec::new();
    let mut last_good = online.clone();
    let mut last_loss = f64::NAN;
    let mut next_checkpoint = cfg.checkpoint_every;
    let mut frames = 0usize;
    let mut updates = 0usize;

    'training: while frames < cfg.frames {
        let seq = emit_problem(dataset, container, dh_cm, problem_rng.next_u64())?;
        let mut env = PackEnv::new(dataset, &seq)?;
        let mut obs = observe(&mut env, &cfg.cand);
        while let Some(o) = obs {
            let eps = epsilon_at(cfg, frames);
            let (transition, next) =
                step_episode(&mut env, o, &online, eps, &mut action_rng, &cfg.cand);
            replay.push(transition);
            obs = next;
            frames += 1;

            if frames.is_multiple_of(cfg.env_steps_per_update) && replay.len() >= cfg.min_replay.max(1) {
                let batch = replay.sample(cfg.batch, &mut sample_rng);
                match td_update(&mut online, &target, &batch, cfg.gamma, cfg.lr, &mut adam) {
                    Ok(loss) => last_loss = loss,
                    Err(_) => {
                        return Err(LearnError::Diverged {
                            frame: frames,
                            last_good: Box::new(last_good),
                            curve,
                        })
                    }
                }
                updates += 1;
                if updates.is_multiple_of(cfg.target_sync) {
                    target = online.clone();
                }
            }
            if frames >= next_checkpoint {
                let util =
                    evaluate(&online, dataset, container, dh_cm, &cfg.cand, &cfg.eval_seeds)?;
                curve.push(CurvePoint { frame: frames, loss: last_loss, eval_utility: util });
                last_good = online.clone();
                next_checkpoint += cfg.checkpoint_every;
            }
            if frames >= cfg.frames {
                break 'training;
            }
        }
    }

    // Final checkpoint, unless a periodic one already landed on this frame.
    if curve.last().map(|p| p.frame) != Some(frames) {
        let util = evaluate(&online, dataset, container, dh_cm, &cfg.cand, &cfg.eval_seeds)?;
        curve.push(CurvePoint { frame: frames, loss: last_loss, eval_utility: util });
    }
    Ok(TrainResult { model: online, curve, detached_episodes: 0 })
}

fn train_async(
    dataset: &Dataset,
    container: (u32, u32, u32),
    dh_cm: f64,
    cfg: &TrainConfig,
) -> Result<TrainResult, LearnError> {
    assert!(cfg.workers >= 1);
    let init = ValueModel::init(cfg.seed);
    let board = ParamBoard::new(&init);
    let replay = ReplayMemory::new(cfg.replay_capacity);
    let frames = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let detached = AtomicUsize::new(0);

    // A worker that unwound would leave the learner waiting forever; make
    // any worker exit release everyone (redundant for normal exits, vital
    // for panics — the scope then propagates the panic itself).
    struct StopOnDrop<'a>(&'a AtomicBool);
    impl Drop for StopOnDrop<'_> {
        fn drop(&mut self) {
            self.0.store(true, Ordering::Release);
        }
    }

    let learner_out = std::thread::scope(|scope| {
        for w in 0..cfg.workers {
            let (board, replay, frames, stop, detached) =
                (&board, &replay, &frames, &stop, &detached);
            scope.spawn(move || {
                let _guard = StopOnDrop(stop);
                let mut problem_rng = ChaCha8Rng::seed_from_u64(
                    cfg.seed ^ (w as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                );
                let mut action_rng =
                    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x1000 + w as u64));
                while !stop.load(Ordering::Acquire) {
                    let seq = emit_problem(dataset, container, dh_cm, problem_rng.next_u64())
                        .expect("setup was validated before spawning");
                    let mut env =
                        PackEnv::new(dataset, &seq).expect("setup was validated before spawning");
                    let mut obs = observe(&mut env, &cfg.cand);
                    while let Some(o) = obs {
                        if stop.load(Ordering::Acquire) {
                            return;
                        }
                        let started = Instant::now();
                        let snapshot = board.adopt();
                        let frame = frames.load(Ordering::Relaxed);
                        let eps = epsilon_at(cfg, frame);
                        let (transition, next) = step_episode(
                            &mut env,
                            o,
                            &snapshot,
                            eps,
                            &mut action_rng,
                            &cfg.cand,
                        );
                        let slow = cfg
                            .detach_threshold
                            .is_some_and(|limit| started.elapsed() > limit);
                        if slow {
                            env.abandon();
                            detached.fetch_add(1, Ordering::Relaxed);
                            obs = None;
                        } else {
                            replay.push(transition);
                            obs = next;
                        }
                        if frames.fetch_add(1, Ordering::Relaxed) + 1 >= cfg.frames {
                            stop.store(true, Ordering::Release);
                        }
                    }
                }
            });
        }

        let (board, replay, frames, stop) = (&board, &replay, &frames, &stop);
        let mut online = init.clone();
        scope.spawn(move || {
            let mut target = online.clone();
            let mut adam = Adam::new();
            let mut sample_rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));
            let mut curve = Vec::new();
            let mut last_good = online.clone();
            let mut last_loss = f64::NAN;
            let mut next_checkpoint = cfg.checkpoint_every;
            let mut updates = 0usize;
            let mut diverged_at = None;
            while !stop.load(Ordering::Acquire) {
                if replay.len() >= cfg.min_replay.max(1) {
                    let batch = replay.sample(cfg.batch, &mut sample_rng);
                    match td_update(&mut online, &target, &batch, cfg.gamma, cfg.lr, &mut adam) {
                        Ok(loss) => last_loss = loss,
                        Err(_) => {
                            diverged_at = Some(frames.load(Ordering::Relaxed));
                            stop.store(true, Ordering::Release);
                            break;
                        }
                    }
                    updates += 1;
                    if updates.is_multiple_of(cfg.target_sync) {
                        target = online.clone();
                    }
                    board.publish(&online);
                } else {
                    std::thread::sleep(Duration::from_micros(200));
                }
                // Checkpoints wait for the first update so the recorded loss
                // is always a real one.
                let now = frames.load(Ordering::Relaxed);
                if now >= next_checkpoint && updates > 0 {
                    let util = evaluate(&online, dataset, container, dh_cm, &cfg.cand, &cfg.eval_seeds)
                        .expect("setup was validated before spawning");
                    curve.push(CurvePoint { frame: now, loss: last_loss, eval_utility: util });
                    last_good = online.clone();
                    next_checkpoint += cfg.checkpoint_every;
                }
            }
            // Workers can exhaust the frame budget faster than gradients get
            // computed; settle the promised decisions-per-update ratio on the
            // frozen replay so total gradient work never depends on thread
            // scheduling luck.
            let floor = cfg.frames / cfg.env_steps_per_update;
            while diverged_at.is_none()
                && updates < floor
                && replay.len() >= cfg.min_replay.max(1)
            {
                let batch = replay.sample(cfg.batch, &mut sample_rng);
                match td_update(&mut online, &target, &batch, cfg.gamma, cfg.lr, &mut adam) {
                    Ok(loss) => last_loss = loss,
                    Err(_) => {
                        diverged_at = Some(frames.load(Ordering::Relaxed));
                        break;
                    }
                }
                updates += 1;
                if updates.is_multiple_of(cfg.target_sync) {
                    target = online.clone();
                }
            }
            (online, curve, last_good, last_loss, diverged_at)
        })
        .join()
        .expect("learner thread panicked")
    });

    let (online, mut curve, last_good, last_loss, diverged_at) = learner_out;
    if let Some(frame) = diverged_at {
        return Err(LearnError::Diverged { frame, last_good: Box::new(last_good), curve });
    }
    // Final checkpoint, unless a periodic one already landed on this frame.
    let final_frame = frames.load(Ordering::Relaxed);
    if curve.last().map(|p| p.frame) != Some(final_frame) {
        let util = evaluate(&online, dataset, container, dh_cm, &cfg.cand, &cfg.eval_seeds)?;
        curve.push(CurvePoint { frame: final_frame, loss: last_loss, eval_utility: util });
    }
    Ok(TrainResult {
        model: online,
        curve,
        detached_episodes: detached.load(Ordering::Relaxed),
    })
}
