//! Bounded FIFO experience memory with uniform sampling.

use std::collections::VecDeque;
use std::sync::Mutex;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One decision: features of the state and its real candidates (padding
/// slots are implicit — everything past `cands.len()` is dummy), the chosen
/// index, the observed reward, and the successor's features. `next_cands`
/// is empty exactly when `done`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: [f32; super::STATE_DIM],
    pub cands: Vec<[f32; super::CAND_DIM]>,
    pub chosen: u32,
    pub reward: f32,
    pub next_state: [f32; super::STATE_DIM],
    pub next_cands: Vec<[f32; super::CAND_DIM]>,
    pub done: bool,
}

/// Concurrent appenders, one sampler; the mutex makes every push/sample
/// linearizable. Feature blocks are stored f32 and only for real
/// candidates, which keeps a 100k-transition memory in the tens of
/// megabytes instead of gigabytes.
pub struct ReplayMemory {
    inner: Mutex<Inner>,
}

struct Inner {
    buf: VecDeque<Transition>,
    capacity: usize,
}

impl ReplayMemory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        ReplayMemory {
            inner: Mutex::new(Inner { buf: VecDeque::with_capacity(capacity.min(1 << 16)), capacity }),
        }
    }

    /// Appends, evicting the oldest transition once full.
    pub fn push(&self, t: Transition) {
        debug_assert!((t.chosen as usize) < t.cands.len());
        debug_assert_eq!(t.next_cands.is_empty(), t.done);
        let mut inner = self.inner.lock().unwrap();
        if inner.buf.len() == inner.capacity {
            inner.buf.pop_front();
        }
        inner.buf.push_back(t);
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Uniform sample with replacement over the current contents.
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<Transition> {
        let inner = self.inner.lock().unwrap();
        assert!(!inner.buf.is_empty(), "sampling from an empty replay memory");
        (0..n)
            .map(|_| inner.buf[rng.gen_range(0..inner.buf.len())].clone())
            .collect()
    }

    #[cfg(test)]
    pub(crate) fn contents(&self) -> Vec<Transition> {
        self.inner.lock().unwrap().buf.iter().cloned().collect()
    }
}
