//! The dueling value model: a shared two-layer tanh trunk over
//! state ⊕ candidate features, a scalar V head for the state alone (candidate
//! block zeroed), and a scalar A head per candidate.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{CandFeat, StateFeat, CAND_DIM, FEATURE_SCHEMA, STATE_DIM};
use super::LearnError;

pub const HIDDEN: usize = 64;
const INPUT: usize = STATE_DIM + CAND_DIM;

// Flat parameter layout: one contiguous vector so the optimizer, the
// finite-difference tests, and serialization all address parameters by
// plain index.
const W1: usize = 0; // HIDDEN × INPUT, row-major
const B1: usize = W1 + HIDDEN * INPUT;
const W2: usize = B1 + HIDDEN; // HIDDEN × HIDDEN
const B2: usize = W2 + HIDDEN * HIDDEN;
const VW: usize = B2 + HIDDEN;
const VB: usize = VW + HIDDEN;
const AW: usize = VB + 1;
const AB: usize = AW + HIDDEN;
pub const PARAM_COUNT: usize = AB + 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ValueModel {
    params: Vec<f64>,
}

impl ValueModel {
    /// All-zero parameters: V = 0 and every centered advantage 0, so all
    /// real candidates tie and selection falls to the lowest index.
    pub fn zeroed() -> Self {
        ValueModel { params: vec![0.0; PARAM_COUNT] }
    }

    /// Uniform init in ±1/√fan_in per layer, in a fixed draw order.
    pub fn init(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = vec![0.0; PARAM_COUNT];
        let mut fill = |range: std::ops::Range<usize>, fan_in: usize, rng: &mut ChaCha8Rng| {
            let bound = 1.0 / (fan_in as f64).sqrt();
            for p in &mut params[range] {
                *p = rng.gen::<f64>() * 2.0 * bound - bound;
            }
        };
        fill(W1..B1, INPUT, &mut rng);
        fill(B1..W2, INPUT, &mut rng);
        fill(W2..B2, HIDDEN, &mut rng);
        fill(B2..VW, HIDDEN, &mut rng);
        fill(VW..VB, HIDDEN, &mut rng);
        fill(VB..AW, HIDDEN, &mut rng);
        fill(AW..AB, HIDDEN, &mut rng);
        fill(AB..PARAM_COUNT, HIDDEN, &mut rng);
        ValueModel { params }
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Raw access for optimizers and gradient checks; callers keep entries
    /// finite.
    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Trunk activations for `state ⊕ cand` (`cand = None` zeroes the
    /// candidate block, the V-head convention). Returns both layers; the
    /// backward pass needs them.
    pub(super) fn trunk(&self, state: &StateFeat, cand: Option<&CandFeat>) -> Trunk {
        let p = &self.params;
        let mut x = [0.0f64; INPUT];
        x[..STATE_DIM].copy_from_slice(state);
        if let Some(c) = cand {
            x[STATE_DIM..].copy_from_slice(c);
        }
        let mut h1 = [0.0f64; HIDDEN];
        for (i, h) in h1.iter_mut().enumerate() {
            let row = &p[W1 + i * INPUT..W1 + (i + 1) * INPUT];
            let z: f64 = row.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>() + p[B1 + i];
            *h = z.tanh();
        }
        let mut h2 = [0.0f64; HIDDEN];
        for (i, h) in h2.iter_mut().enumerate() {
            let row = &p[W2 + i * HIDDEN..W2 + (i + 1) * HIDDEN];
            let z: f64 = row.iter().zip(&h1).map(|(w, v)| w * v).sum::<f64>() + p[B2 + i];
            *h = z.tanh();
        }
        Trunk { x, h1, h2 }
    }

    pub fn value(&self, state: &StateFeat) -> f64 {
        self.forward_value(state).0
    }

    pub fn advantage(&self, state: &StateFeat, cand: &CandFeat) -> f64 {
        self.forward_advantage(state, cand).0
    }

    pub(super) fn forward_value(&self, state: &StateFeat) -> (f64, Trunk) {
        let t = self.trunk(state, None);
        (self.head(VW, VB, &t.h2), t)
    }

    pub(super) fn forward_advantage(&self, state: &StateFeat, cand: &CandFeat) -> (f64, Trunk) {
        let t = self.trunk(state, Some(cand));
        (self.head(AW, AB, &t.h2), t)
    }

    pub(super) fn backprop_value(&self, t: &Trunk, d: f64, grad: &mut [f64]) {
        backprop(self, t, VW, VB, d, grad);
    }

    pub(super) fn backprop_advantage(&self, t: &Trunk, d: f64, grad: &mut [f64]) {
        backprop(self, t, AW, AB, d, grad);
    }

    pub(super) fn head(&self, w: usize, b: usize, h2: &[f64; HIDDEN]) -> f64 {
        self.params[w..w + HIDDEN]
            .iter()
            .zip(h2)
            .map(|(w, v)| w * v)
            .sum::<f64>()
            + self.params[b]
    }
}

/// Cached forward activations of one trunk pass.
pub(super) struct Trunk {
    pub x: [f64; INPUT],
    pub h1: [f64; HIDDEN],
    pub h2: [f64; HIDDEN],
}

/// Backpropagates `d` (∂L/∂head) through one head + trunk pass, adding into
/// the flat gradient.
pub(super) fn backprop(
    model: &ValueModel,
    t: &Trunk,
    head_w: usize,
    head_b: usize,
    d: f64,
    grad: &mut [f64],
) {
    let p = &model.params;
    grad[head_b] += d;
    let mut dh2 = [0.0f64; HIDDEN];
    for i in 0..HIDDEN {
        grad[head_w + i] += d * t.h2[i];
        dh2[i] = d * p[head_w + i];
    }
    let mut dh1 = [0.0f64; HIDDEN];
    for i in 0..HIDDEN {
        let dz = dh2[i] * (1.0 - t.h2[i] * t.h2[i]);
        grad[B2 + i] += dz;
        let row = W2 + i * HIDDEN;
        for j in 0..HIDDEN {
            grad[row + j] += dz * t.h1[j];
            dh1[j] += dz * p[row + j];
        }
    }
    for i in 0..HIDDEN {
        let dz = dh1[i] * (1.0 - t.h1[i] * t.h1[i]);
        grad[B1 + i] += dz;
        let row = W1 + i * INPUT;
        for j in 0..INPUT {
            grad[row + j] += dz * t.x[j];
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    feature_schema: u32,
    state_dim: usize,
    cand_dim: usize,
    hidden: usize,
    params: Vec<f64>,
}

pub fn save_model(model: &ValueModel, path: &Path) -> Result<(), LearnError> {
    let file = ModelFile {
        format_version: 1,
        feature_schema: FEATURE_SCHEMA,
        state_dim: STATE_DIM,
        cand_dim: CAND_DIM,
        hidden: HIDDEN,
        params: model.params.clone(),
    };
    fs::write(path, serde_json::to_vec(&file)?)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ValueModel, LearnError> {
    let file: ModelFile = serde_json::from_slice(&fs::read(path)?)?;
    if file.feature_schema != FEATURE_SCHEMA {
        return Err(LearnError::SchemaMismatch {
            found: file.feature_schema,
            expected: FEATURE_SCHEMA,
        });
    }
    if file.params.len() != PARAM_COUNT
        || file.state_dim != STATE_DIM
        || file.cand_dim != CAND_DIM
        || file.hidden != HIDDEN
    {
        return Err(LearnError::BadParamCount {
            found: file.params.len(),
            expected: PARAM_COUNT,
        });
    }
    Ok(ValueModel { params: file.params })
}
