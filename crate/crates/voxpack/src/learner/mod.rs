//! Trainable candidate ranker.
//!
//! A dueling value model scores each placement candidate from handcrafted
//! features: a state value V computed from the container summary plus a
//! per-candidate advantage A, centered over the real (non-dummy) candidates
//! so the decomposition is identifiable. Training is double-DQN over a FIFO
//! replay memory, either asynchronously (worker threads acting, one learner
//! thread updating and publishing parameter snapshots) or in a single-thread
//! interleaved mode that reproduces bit-identical learning curves for a
//! fixed seed.

mod features;
mod model;
mod policy;
mod replay;
mod train;
mod update;

pub use features::{
    decision_features, state_features, CandFeat, StateFeat, CAND_DIM, FEATURE_SCHEMA, STATE_DIM,
};
pub use model::{load_model, save_model, ValueModel, HIDDEN, PARAM_COUNT};
pub use policy::{masked_q_from_advantages, qvalues, select_action, LearnedPolicy};
pub use replay::{ReplayMemory, Transition};
pub use train::{evaluate, train, CurvePoint, TrainConfig, TrainResult};
pub use update::{td_gradient, td_loss, td_update, Adam};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("loss became non-finite at update {update}")]
    NonFiniteLoss { update: usize },
    #[error("training diverged at frame {frame}; last good checkpoint attached")]
    Diverged {
        frame: usize,
        last_good: Box<ValueModel>,
        curve: Vec<CurvePoint>,
    },
    #[error("model file has feature schema {found}, this build expects {expected}")]
    SchemaMismatch { found: u32, expected: u32 },
    #[error("model file declares {found} parameters, architecture has {expected}")]
    BadParamCount { found: usize, expected: usize },
    #[error(transparent)]
    Shape(#[from] crate::shapelib::ShapeError),
    #[error(transparent)]
    Pack(#[from] crate::packenv::PackError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
