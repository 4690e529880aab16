//! Masked Q scoring and the learned placement policy.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::candgen::{generate_candidates, CandConfig};
use crate::packenv::{ItemView, PackEnv};
use crate::policies::Policy;

use super::features::{decision_features, CandFeat, StateFeat};
use super::model::ValueModel;

/// Q_i = V + A_i − mean(non-dummy A); dummy slots pinned to −∞ so no
/// selection rule can pick them. Centering subtracts the same mean from
/// every real slot, which keeps the scores invariant to a constant shift
/// of all advantages.
pub fn masked_q_from_advantages(v: f64, advs: &[f64], dummy: &[bool]) -> Vec<f64> {
    assert_eq!(advs.len(), dummy.len());
    let real = dummy.iter().filter(|&&d| !d).count();
    assert!(real > 0, "all-dummy candidate set; the episode should have ended");
    let mean = advs
        .iter()
        .zip(dummy)
        .filter(|(_, &d)| !d)
        .map(|(a, _)| a)
        .sum::<f64>()
        / real as f64;
    advs.iter()
        .zip(dummy)
        .map(|(a, &d)| if d { f64::NEG_INFINITY } else { v + (a - mean) })
        .collect()
}

/// Scores `cands` against `state`; `dummy[i]` marks padding slots.
pub fn qvalues(
    model: &ValueModel,
    state: &StateFeat,
    cands: &[CandFeat],
    dummy: &[bool],
) -> Vec<f64> {
    assert_eq!(cands.len(), dummy.len());
    let v = model.value(state);
    let advs: Vec<f64> = cands
        .iter()
        .zip(dummy)
        .map(|(c, &d)| if d { 0.0 } else { model.advantage(state, c) })
        .collect();
    masked_q_from_advantages(v, &advs, dummy)
}

/// ε-greedy over the masked scores: with probability ε a uniform non-dummy
/// index, otherwise the lowest-index maximizer.
pub fn select_action(qs: &[f64], epsilon: f64, rng: &mut ChaCha8Rng) -> usize {
    let valid: Vec<usize> = (0..qs.len()).filter(|&i| qs[i].is_finite()).collect();
    assert!(!valid.is_empty(), "no finite Q value to select from");
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        return valid[rng.gen_range(0..valid.len())];
    }
    // Strict improvement only, so ties resolve to the lowest index.
    let mut best = valid[0];
    for &i in &valid[1..] {
        if qs[i] > qs[best] {
            best = i;
        }
    }
    best
}

/// Placement policy that ranks candidates with a value model.
pub struct LearnedPolicy {
    model: ValueModel,
    cfg: CandConfig,
    epsilon: f64,
    rng: ChaCha8Rng,
}

impl LearnedPolicy {
    pub fn new(model: ValueModel, cfg: CandConfig, epsilon: f64, seed: u64) -> Self {
        use rand::SeedableRng;
        LearnedPolicy { model, cfg, epsilon, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn greedy(model: ValueModel, cfg: CandConfig) -> Self {
        Self::new(model, cfg, 0.0, 0)
    }

    pub fn model(&self) -> &ValueModel {
        &self.model
    }
}

impl Policy for LearnedPolicy {
    fn decide(&mut self, env: &PackEnv, view: &ItemView<'_>) -> Option<(u8, usize, usize)> {
        let set = generate_candidates(env, view, &self.cfg);
        if set.is_empty() {
            return None;
        }
        let (state, cands) = decision_features(env, view, &set.candidates);
        let dummy = vec![false; cands.len()];
        let qs = qvalues(&self.model, &state, &cands, &dummy);
        let c = &set.candidates[select_action(&qs, self.epsilon, &mut self.rng)];
        Some((c.spin, c.x, c.y))
    }
}
