//! Placement candidate generation.
//!
//! For each distinct vertical spin of the current item, the container is
//! probed on a stride lattice of anchors to build a landing-altitude map.
//! Feasible lattice cells are grouped into 4-connected regions of similar
//! altitude; each region's outer contour is simplified to a polygon, and the
//! polygon's convex corners become candidates — placements where the item
//! nestles against something. A region too small or too thin to form a
//! polygon still contributes its raster-first cell, so no reachable ledge is
//! ever invisible to the policy.

use crate::gridgeom::{
    analyze_vertices, connected_regions, simplify_rdp, trace_contour, AltitudeMap,
};
use crate::packenv::{ItemView, PackEnv};
use crate::shapelib::{FootprintMaps, SPIN_COUNT};

/// One feasible placement: spin the presented item by `spin` quarter-turns
/// and drop it with its footprint's minimum corner over `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub spin: u8,
    pub x: usize,
    pub y: usize,
    /// Landing altitude in heightmap cells.
    pub lz: u32,
    /// Corner tightness in radians: π − interior angle, 0 for fallback
    /// candidates of degenerate regions.
    pub tightness: f64,
}

#[derive(Debug, Clone, Default)]
pub struct CandidateSet {
    /// Sorted by (lz, y, x, spin): lowest first, then closest to the origin.
    pub candidates: Vec<Candidate>,
    /// True when the list was cut to `max_candidates`.
    pub truncated: bool,
}

impl CandidateSet {
    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }
}

#[derive(Debug, Clone)]
pub struct CandConfig {
    /// Anchor lattice stride in heightmap cells.
    pub stride: usize,
    /// Altitude difference allowed between adjacent cells of one region.
    pub delta_z: u32,
    /// Contour simplification tolerance, in lattice units.
    pub epsilon: f64,
    pub max_candidates: usize,
}

impl Default for CandConfig {
    fn default() -> Self {
        CandConfig { stride: 1, delta_z: 0, epsilon: 1.0, max_candidates: 500 }
    }
}

/// Generates the candidate set for `item` against the container's current
/// heightmap. Every candidate is probe-feasible at generation time.
pub fn generate_candidates(env: &PackEnv, item: &ItemView, cfg: &CandConfig) -> CandidateSet {
    assert!(cfg.stride >= 1, "stride must be positive");
    assert!(cfg.epsilon > 0.0, "epsilon must be positive");
    let mut seen: Vec<&FootprintMaps> = Vec::with_capacity(SPIN_COUNT as usize);
    let mut candidates = Vec::new();
    for choice in 0..SPIN_COUNT {
        let maps = item.maps_for(choice);
        // Spins with identical maps land identically; keep the first.
        if seen.contains(&maps) {
            continue;
        }
        seen.push(maps);
        if let Some(alt) = altitude_lattice(env, maps, cfg.stride) {
            collect_spin_candidates(&alt, cfg, choice, &mut candidates);
        }
    }
    candidates.sort_by(|a, b| {
        (a.lz, a.y, a.x, a.spin).cmp(&(b.lz, b.y, b.x, b.spin))
    });
    let truncated = candidates.len() > cfg.max_candidates;
    candidates.truncate(cfg.max_candidates);
    CandidateSet { candidates, truncated }
}

/// Landing altitudes over the anchor lattice; `None` when the footprint is
/// wider or deeper than the container.
fn altitude_lattice(env: &PackEnv, maps: &FootprintMaps, stride: usize) -> Option<AltitudeMap> {
    let (cx, cy, _) = env.dims();
    let (w, d) = (maps.width(), maps.depth());
    if w > cx as usize || d > cy as usize {
        return None;
    }
    let nx = (cx as usize - w) / stride + 1;
    let ny = (cy as usize - d) / stride + 1;
    let mut alt = AltitudeMap::new(nx, ny);
    for j in 0..ny {
        for i in 0..nx {
            if let Some(lz) = env.probe(maps, i * stride, j * stride) {
                alt.set(i, j, lz);
            }
        }
    }
    Some(alt)
}

fn collect_spin_candidates(
    alt: &AltitudeMap,
    cfg: &CandConfig,
    spin: u8,
    out: &mut Vec<Candidate>,
) {
    let regions = connected_regions(alt, cfg.delta_z);
    for label in 1..=regions.region_count() {
        let contour = trace_contour(&regions, label).expect("label came from the labeling");
        let emit = |i: usize, j: usize, tightness: f64, out: &mut Vec<Candidate>| {
            out.push(Candidate {
                spin,
                x: i * cfg.stride,
                y: j * cfg.stride,
                lz: alt.get(i, j),
                tightness,
            });
        };
        let corners = simplify_rdp(&contour, cfg.epsilon).and_then(|poly| {
            analyze_vertices(&poly).map(|analysis| (poly, analysis))
        });
        match corners {
            Ok((poly, analysis)) => {
                for v in analysis.iter().filter(|v| v.convex) {
                    let (i, j) = poly.vertices[v.index];
                    emit(i as usize, j as usize, v.tightness, out);
                }
            }
            Err(_) => {
                // Region with no simple polygon (a dot, line, or sliver):
                // fall back to its raster-first cell.
                let mask = regions.region_mask(label);
                let (i, j) = mask.iter_true().next().expect("region is nonempty");
                emit(i, j, 0.0, out);
            }
        }
    }
}

#[cfg(test)]
mod tests;
