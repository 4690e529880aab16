//! Handcrafted feature extraction for the value model.

use crate::candgen::Candidate;
use crate::packenv::{ItemView, PackEnv};
use crate::policies::hm_score;

/// Bumped whenever the meaning, order, or count of features changes; saved
/// models carry it so a stale model cannot be scored with fresh features.
pub const FEATURE_SCHEMA: u32 = 1;

pub const STATE_DIM: usize = 6;
pub const CAND_DIM: usize = 10;

pub type StateFeat = [f64; STATE_DIM];
pub type CandFeat = [f64; CAND_DIM];

/// (sin θ, cos θ) for θ = spin · 90°, held exact instead of via trig.
const SPIN_TRIG: [(f64, f64); 4] = [(0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0)];

/// Container summary: fill ratio; mean, peak, and standard deviation of the
/// column heights over the container height; fraction of columns standing at
/// the current peak (1.0 means a flat surface); remaining items over the
/// episode's initial count.
pub fn state_features(env: &PackEnv) -> StateFeat {
    let (_, _, sz) = env.dims();
    let hm = env.heightmap();
    let cols = hm.cols();
    let n = cols.len() as f64;
    let peak = cols.iter().copied().max().unwrap_or(0);
    let mean = cols.iter().map(|&h| h as f64).sum::<f64>() / n;
    let var = cols.iter().map(|&h| (h as f64 - mean).powi(2)).sum::<f64>() / n;
    let at_peak = cols.iter().filter(|&&h| h == peak).count() as f64 / n;
    let remaining = (env.items_total() - env.records().len()) as f64 / env.items_total() as f64;
    let f = [
        env.utility(),
        mean / sz as f64,
        peak as f64 / sz as f64,
        var.sqrt() / sz as f64,
        at_peak,
        remaining,
    ];
    debug_assert!(f.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)));
    f
}

/// Features for every candidate of one decision, sharing the per-state work.
pub fn decision_features(
    env: &PackEnv,
    view: &ItemView<'_>,
    candidates: &[Candidate],
) -> (StateFeat, Vec<CandFeat>) {
    let state = state_features(env);
    let (sx, sy, sz) = env.dims();
    let capacity = env.capacity() as f64;
    let peak = env.heightmap().cols().iter().copied().max().unwrap_or(0);
    let cands = candidates
        .iter()
        .map(|c| {
            let maps = view.maps_for(c.spin);
            let (sin, cos) = SPIN_TRIG[c.spin as usize];
            let contact = support_contact(env, maps, c.x, c.y, c.lz);
            let f = [
                sin,
                cos,
                c.x as f64 / sx as f64,
                c.y as f64 / sy as f64,
                c.lz as f64 / sz as f64,
                peak.max(c.lz + maps.height) as f64 / sz as f64,
                contact,
                hm_score(env, maps, c.x, c.y, c.lz) as f64 / capacity,
                c.tightness / std::f64::consts::PI,
                maps.volume as f64 / capacity,
            ];
            debug_assert!(f.iter().all(|v| v.is_finite() && (-1.0..=1.0).contains(v)));
            f
        })
        .collect();
    (state, cands)
}

/// Fraction of footprint columns the item actually rests on. The landing
/// altitude is the max of per-column support heights, so at least one column
/// touches — except when the probe clamped a would-be negative altitude to
/// the floor, where the item may rest on the floor through its z=0 columns
/// alone.
fn support_contact(
    env: &PackEnv,
    maps: &crate::shapelib::FootprintMaps,
    x: usize,
    y: usize,
    lz: u32,
) -> f64 {
    let hm = env.heightmap();
    let mut touching = 0usize;
    let mut total = 0usize;
    for (a, b) in maps.mask.iter_true() {
        total += 1;
        if hm.get(x + a, y + b) == lz + maps.bottom(a, b) {
            touching += 1;
        }
    }
    touching as f64 / total as f64
}
