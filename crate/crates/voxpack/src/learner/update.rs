//! Double-DQN updates over replay batches.

use super::features::{CandFeat, StateFeat, CAND_DIM, STATE_DIM};
use super::model::ValueModel;
use super::policy::{masked_q_from_advantages, qvalues};
use super::replay::Transition;
use super::LearnError;
use super::PARAM_COUNT;

/// Adaptive-moment optimizer state for the flat parameter vector.
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Adam {
    pub fn new() -> Self {
        Adam {
            m: vec![0.0; PARAM_COUNT],
            v: vec![0.0; PARAM_COUNT],
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn updates(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let mhat = self.m[i] / bc1;
            let vhat = self.v[i] / bc2;
            params[i] -= lr * mhat / (vhat.sqrt() + self.eps);
        }
    }
}

impl Default for Adam {
    fn default() -> Self {
        Self::new()
    }
}

fn upcast_state(s: &[f32; STATE_DIM]) -> StateFeat {
    std::array::from_fn(|i| s[i] as f64)
}

fn upcast_cands(cs: &[[f32; CAND_DIM]]) -> Vec<CandFeat> {
    cs.iter().map(|c| std::array::from_fn(|i| c[i] as f64)).collect()
}

fn argmax_lowest(qs: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..qs.len() {
        if qs[i] > qs[best] {
            best = i;
        }
    }
    best
}

/// Double-DQN regression target: the online model picks the successor
/// action, the target model prices it.
fn td_target(model: &ValueModel, target: &ValueModel, t: &Transition, gamma: f64) -> f64 {
    if t.done {
        return t.reward as f64;
    }
    let ns = upcast_state(&t.next_state);
    let ncands = upcast_cands(&t.next_cands);
    let dummy = vec![false; ncands.len()];
    let a = argmax_lowest(&qvalues(model, &ns, &ncands, &dummy));
    t.reward as f64 + gamma * qvalues(target, &ns, &ncands, &dummy)[a]
}

/// Mean squared Bellman error of the batch, no gradients.
pub fn td_loss(model: &ValueModel, target: &ValueModel, batch: &[Transition], gamma: f64) -> f64 {
    assert!(!batch.is_empty());
    assert!((0.0..1.0).contains(&gamma));
    batch
        .iter()
        .map(|t| {
            let state = upcast_state(&t.state);
            let cands = upcast_cands(&t.cands);
            let dummy = vec![false; cands.len()];
            let q = qvalues(model, &state, &cands, &dummy)[t.chosen as usize];
            (q - td_target(model, target, t, gamma)).powi(2)
        })
        .sum::<f64>()
        / batch.len() as f64
}

/// Analytic gradient of [`td_loss`] in the online model's parameters, plus
/// the loss itself. The chosen Q value is V + A_chosen − mean(A), so the
/// gradient flows through the value trunk and through every candidate's
/// advantage trunk with coefficient δ_chosen − 1/M.
pub fn td_gradient(
    model: &ValueModel,
    target: &ValueModel,
    batch: &[Transition],
    gamma: f64,
) -> (Vec<f64>, f64) {
    assert!(!batch.is_empty());
    assert!((0.0..1.0).contains(&gamma));
    let mut grad = vec![0.0; PARAM_COUNT];
    let mut loss_sum = 0.0;
    for t in batch {
        let state = upcast_state(&t.state);
        let cands = upcast_cands(&t.cands);
        let m = cands.len();
        let (v, v_trunk) = model.forward_value(&state);
        let mut advs = Vec::with_capacity(m);
        let mut trunks = Vec::with_capacity(m);
        for c in &cands {
            let (a, tr) = model.forward_advantage(&state, c);
            advs.push(a);
            trunks.push(tr);
        }
        let dummy = vec![false; m];
        let q = masked_q_from_advantages(v, &advs, &dummy)[t.chosen as usize];

        let residual = q - td_target(model, target, t, gamma);
        loss_sum += residual * residual;
        let dq = 2.0 * residual / batch.len() as f64;

        model.backprop_value(&v_trunk, dq, &mut grad);
        for (j, tr) in trunks.iter().enumerate() {
            let coeff = if j == t.chosen as usize { 1.0 } else { 0.0 } - 1.0 / m as f64;
            model.backprop_advantage(tr, dq * coeff, &mut grad);
        }
    }
    (grad, loss_sum / batch.len() as f64)
}

/// One optimizer step on the batch; returns the pre-step loss.
pub fn td_update(
    model: &mut ValueModel,
    target: &ValueModel,
    batch: &[Transition],
    gamma: f64,
    lr: f64,
    opt: &mut Adam,
) -> Result<f64, LearnError> {
    let (grad, loss) = td_gradient(model, target, batch, gamma);
    if !loss.is_finite() {
        return Err(LearnError::NonFiniteLoss { update: opt.updates() as usize + 1 });
    }
    opt.step(model.params_mut(), &grad, lr);
    Ok(loss)
}
