//! Packing policies behind one interface.
//!
//! A policy maps the container state and the current item to an action
//! `(spin, x, y)`, or `None` when it finds nowhere to put the item. All
//! heuristics here are deterministic given their seed, so whole episodes
//! reproduce bit-identically.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::candgen::{generate_candidates, CandConfig};
use crate::packenv::{ItemView, PackEnv};
use crate::shapelib::{FootprintMaps, SPIN_COUNT};

pub trait Policy {
    /// Decides where to put the current item; `None` abandons the episode.
    fn decide(&mut self, env: &PackEnv, view: &ItemView<'_>) -> Option<(u8, usize, usize)>;
}

/// Expected pile potential energy of a placement: landing altitude plus the
/// item's own center-of-mass height. Lower is better.
pub fn mtpe_score(maps: &FootprintMaps, lz: u32) -> f64 {
    lz as f64 + maps.com_z()
}

/// Cells the placement adds above the current surface, buried voids
/// included: the growth of the heightmap integral. Lower is better; the
/// item's volume is the floor of the score, reached exactly when nothing
/// is buried.
pub fn hm_score(env: &PackEnv, maps: &FootprintMaps, x: usize, y: usize, lz: u32) -> u64 {
    let hm = env.heightmap();
    maps.mask
        .iter_true()
        .map(|(a, b)| {
            let h = hm.get(x + a, y + b);
            (lz + maps.top(a, b)).max(h) as u64 - h as u64
        })
        .sum()
}

/// Spin choices whose footprints are mutually distinct, first occurrence
/// kept, mirroring candidate generation.
fn distinct_spins<'a>(view: &ItemView<'a>) -> Vec<(u8, &'a FootprintMaps)> {
    let mut out: Vec<(u8, &FootprintMaps)> = Vec::with_capacity(SPIN_COUNT as usize);
    for choice in 0..SPIN_COUNT {
        let maps = view.maps_for(choice);
        if !out.iter().any(|(_, m)| *m == maps) {
            out.push((choice, maps));
        }
    }
    out
}

/// Feasible stride-lattice actions in (spin, y, x) scan order.
fn feasible_grid(
    env: &PackEnv,
    view: &ItemView<'_>,
    stride: usize,
) -> Vec<(u8, usize, usize, u32)> {
    let (cx, cy, _) = env.dims();
    let mut out = Vec::new();
    for (choice, maps) in distinct_spins(view) {
        let (w, d) = (maps.width(), maps.depth());
        if w > cx as usize || d > cy as usize {
            continue;
        }
        for y in (0..=cy as usize - d).step_by(stride) {
            for x in (0..=cx as usize - w).step_by(stride) {
                if let Some(lz) = env.probe(maps, x, y) {
                    out.push((choice, x, y, lz));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    /// First feasible lattice anchor in (spin, y, x) scan order.
    FirstFit,
    /// Bottom-left-back-first: the first candidate in (lz, y, x, spin) order.
    Blbf,
    /// Candidate minimizing the placed item's potential energy.
    Mtpe,
    /// Candidate minimizing heightmap growth.
    HeightmapMin,
    /// Uniformly random feasible lattice anchor.
    RandomGrid,
    /// Uniformly random candidate.
    RandomCand,
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ff" => Ok(Heuristic::FirstFit),
            "blbf" => Ok(Heuristic::Blbf),
            "mtpe" => Ok(Heuristic::Mtpe),
            "hm" => Ok(Heuristic::HeightmapMin),
            "random" => Ok(Heuristic::RandomGrid),
            "random-pi" => Ok(Heuristic::RandomCand),
            other => Err(format!("unknown policy {other:?}")),
        }
    }
}

impl std::fmt::Display for Heuristic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Heuristic::FirstFit => "ff",
            Heuristic::Blbf => "blbf",
            Heuristic::Mtpe => "mtpe",
            Heuristic::HeightmapMin => "hm",
            Heuristic::RandomGrid => "random",
            Heuristic::RandomCand => "random-pi",
        })
    }
}

pub struct HeuristicPolicy {
    kind: Heuristic,
    cfg: CandConfig,
    rng: ChaCha8Rng,
}

impl HeuristicPolicy {
    pub fn new(kind: Heuristic, cfg: CandConfig, seed: u64) -> Self {
        HeuristicPolicy { kind, cfg, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Policy for HeuristicPolicy {
    fn decide(&mut self, env: &PackEnv, view: &ItemView<'_>) -> Option<(u8, usize, usize)> {
        match self.kind {
            Heuristic::FirstFit => feasible_grid(env, view, self.cfg.stride)
                .first()
                .map(|&(s, x, y, _)| (s, x, y)),
            Heuristic::RandomGrid => {
                let grid = feasible_grid(env, view, self.cfg.stride);
                (!grid.is_empty()).then(|| {
                    let (s, x, y, _) = grid[self.rng.gen_range(0..grid.len())];
                    (s, x, y)
                })
            }
            Heuristic::Blbf => {
                let set = generate_candidates(env, view, &self.cfg);
                set.candidates.first().map(|c| (c.spin, c.x, c.y))
            }
            Heuristic::Mtpe => {
                let set = generate_candidates(env, view, &self.cfg);
                set.candidates
                    .iter()
                    .min_by(|a, b| {
                        mtpe_score(view.maps_for(a.spin), a.lz)
                            .total_cmp(&mtpe_score(view.maps_for(b.spin), b.lz))
                    })
                    .map(|c| (c.spin, c.x, c.y))
            }
            Heuristic::HeightmapMin => {
                let set = generate_candidates(env, view, &self.cfg);
                set.candidates
                    .iter()
                    .min_by_key(|c| hm_score(env, view.maps_for(c.spin), c.x, c.y, c.lz))
                    .map(|c| (c.spin, c.x, c.y))
            }
            Heuristic::RandomCand => {
                let set = generate_candidates(env, view, &self.cfg);
                (!set.is_empty()).then(|| {
                    let c = &set.candidates[self.rng.gen_range(0..set.len())];
                    (c.spin, c.x, c.y)
                })
            }
        }
    }
}

/// Plays one episode to the end and returns the final fill fraction.
pub fn run_episode(env: &mut PackEnv, policy: &mut dyn Policy) -> f64 {
    while let Some(view) = env.current() {
        match policy.decide(env, &view) {
            Some((spin, x, y)) => {
                env.place(spin, x, y).expect("policies only return feasible actions");
            }
            None => env.abandon(),
        }
    }
    env.utility()
}
