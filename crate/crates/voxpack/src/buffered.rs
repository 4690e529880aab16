//! K-slot buffered packing: hold up to K pending items in view, pick which
//! one goes into the container next, and hand it to a placement policy.
//!
//! The buffer is a window over the arrival stream — the next ≤K items, kept
//! full whenever the stream allows. Selecting a slot rotates that item to
//! the front ([`PackEnv::promote`]) and places it normally, so the
//! environment keeps all episode bookkeeping and the arrival order of the
//! unselected items is preserved. With K = 1 the pipeline degenerates to
//! plain online packing, step for step.

use crate::candgen::{generate_candidates, CandConfig};
use crate::learner::{decision_features, qvalues, ValueModel};
use crate::packenv::{ItemView, PackEnv, StepReport};
use crate::policies::Policy;

/// How the buffer picks the next item to pass on.
pub enum ObjectOrder {
    /// Earliest arrival first — plain streaming order.
    Arrival,
    /// Largest scaled volume first, ties to the earliest arrival.
    LargestFirst,
    /// The slot whose best placement candidate prices highest under a
    /// ranker, ties to the earliest arrival. Slots with no feasible
    /// candidate score −∞; when every slot is infeasible the episode ends.
    Learned { model: ValueModel, cand: CandConfig },
}

impl ObjectOrder {
    /// Index of the slot to pass on, or `None` when nothing in the buffer
    /// can be placed at all. Panics on an empty buffer.
    pub fn select(&self, env: &PackEnv, slots: &[ItemView<'_>]) -> Option<usize> {
        match self {
            ObjectOrder::Arrival => {
                assert!(!slots.is_empty(), "selection over an empty buffer");
                Some(0)
            }
            ObjectOrder::LargestFirst => Some(select_largest_first(slots)),
            ObjectOrder::Learned { model, cand } => {
                select_best_candidate(env, slots, model, cand)
            }
        }
    }
}

/// Slot with the greatest scaled volume; ties go to the earliest arrival.
pub fn select_largest_first(slots: &[ItemView<'_>]) -> usize {
    assert!(!slots.is_empty(), "selection over an empty buffer");
    let mut best = 0;
    for (i, view) in slots.iter().enumerate().skip(1) {
        if view.volume() > slots[best].volume() {
            best = i;
        }
    }
    best
}

/// Slot whose best placement candidate scores highest under `model`; ties go
/// to the earliest arrival. A slot with no feasible candidates scores −∞,
/// and `None` means every slot is stuck — the episode cannot continue.
pub fn select_best_candidate(
    env: &PackEnv,
    slots: &[ItemView<'_>],
    model: &ValueModel,
    cand: &CandConfig,
) -> Option<usize> {
    assert!(!slots.is_empty(), "selection over an empty buffer");
    let mut best: Option<(usize, f64)> = None;
    for (i, view) in slots.iter().enumerate() {
        let set = generate_candidates(env, view, cand);
        if set.is_empty() {
            continue;
        }
        let (state, feats) = decision_features(env, view, &set.candidates);
        let dummy = vec![false; feats.len()];
        let score = qvalues(model, &state, &feats, &dummy)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((i, score));
        }
    }
    best.map(|(i, _)| i)
}

/// A packing environment with a K-item lookahead buffer over its stream.
pub struct BufferedEnv {
    env: PackEnv,
    k: usize,
}

impl BufferedEnv {
    pub fn new(env: PackEnv, k: usize) -> Self {
        assert!(k >= 1, "buffer needs at least one slot");
        BufferedEnv { env, k }
    }

    pub fn slot_capacity(&self) -> usize {
        self.k
    }

    pub fn env(&self) -> &PackEnv {
        &self.env
    }

    pub fn into_env(self) -> PackEnv {
        self.env
    }

    /// The refilled buffer: the next ≤K pending items, in arrival order.
    /// Shorter than K only once the stream is nearly drained.
    pub fn slots(&self) -> Vec<ItemView<'_>> {
        (0..self.k).map_while(|i| self.env.pending(i)).collect()
    }

    /// One buffered decision: refill, select a slot, rotate it to the front,
    /// and let the placement policy drop it. `None` means no placement
    /// happened — the episode was already over, or it just ended because the
    /// selected item (or, under a ranker, every buffered item) has no
    /// feasible move. Items are never silently skipped: an unplaceable
    /// selection ends the episode.
    pub fn step(&mut self, order: &ObjectOrder, placement: &mut dyn Policy) -> Option<StepReport> {
        if self.env.is_done() {
            return None;
        }
        let choice = order.select(&self.env, &self.slots());
        let Some(idx) = choice else {
            self.env.abandon();
            return None;
        };
        self.env.promote(idx);
        let decision = {
            let view = self.env.current().expect("episode is live");
            placement.decide(&self.env, &view)
        };
        match decision {
            Some((spin, x, y)) => {
                Some(self.env.place(spin, x, y).expect("policies only return feasible actions"))
            }
            None => {
                self.env.abandon();
                None
            }
        }
    }
}

/// Rolls a buffered episode to termination; returns the final fill fraction.
pub fn run_buffered_episode(
    pack: &mut BufferedEnv,
    order: &ObjectOrder,
    placement: &mut dyn Policy,
) -> f64 {
    while pack.step(order, placement).is_some() {}
    pack.env().utility()
}
