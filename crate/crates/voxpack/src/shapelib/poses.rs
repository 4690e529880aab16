use serde::{Deserialize, Serialize};

use super::rotate::{rotate24, spin_z_index, ORIENTATION_COUNT, SPIN_COUNT};
use super::shape::OccGrid;
use super::ShapeError;

/// A resting orientation, identified by its index in the rotation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pose {
    pub orientation: usize,
}

/// Orientations in which the shape rests on a flat floor without tipping:
/// the center of mass must project strictly inside the convex hull of the
/// bottom-layer cell squares. Computed in exact integer arithmetic — the
/// center of mass scaled by `2n` is `(Σ(2x+1), Σ(2y+1))` over all `n`
/// voxels, compared against hull corners scaled by the same factor — so
/// a center of mass exactly over an edge counts as tipping.
pub fn stable_poses(grid: &OccGrid) -> Result<Vec<Pose>, ShapeError> {
    if grid.volume() == 0 {
        return Err(ShapeError::EmptyShape);
    }
    let mut out = Vec::new();
    for orientation in 0..ORIENTATION_COUNT {
        if rests_on_floor(&rotate24(grid, orientation)?) {
            out.push(Pose { orientation });
        }
    }
    Ok(out)
}

fn rests_on_floor(grid: &OccGrid) -> bool {
    let vox = grid.voxels();
    let n = vox.len() as i64;
    let px: i64 = vox.iter().map(|v| 2 * v.0 as i64 + 1).sum();
    let py: i64 = vox.iter().map(|v| 2 * v.1 as i64 + 1).sum();

    let mut corners: Vec<(i64, i64)> = Vec::new();
    for &(x, y, z) in &vox {
        if z == 0 {
            for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                corners.push((2 * n * (x as i64 + dx), 2 * n * (y as i64 + dy)));
            }
        }
    }
    corners.sort_unstable();
    corners.dedup();

    let hull = convex_hull(&corners);
    // Cell squares guarantee a hull with positive area.
    debug_assert!(hull.len() >= 3);
    hull.iter().enumerate().all(|(i, &a)| {
        let b = hull[(i + 1) % hull.len()];
        cross(a, b, (px, py)) > 0
    })
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone-chain hull, counter-clockwise, collinear points dropped.
/// Input must be sorted and deduplicated.
fn convex_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Fraction of disagreeing cells when two grids are overlaid at the origin
/// on their combined bounding box, relative to the larger occupied volume.
/// Identical grids score 0; disjoint equal-volume grids score 2.
pub fn xor_ratio(a: &OccGrid, b: &OccGrid) -> f64 {
    let dims = (
        a.dims.0.max(b.dims.0),
        a.dims.1.max(b.dims.1),
        a.dims.2.max(b.dims.2),
    );
    let mut diff = 0u64;
    for z in 0..dims.2 {
        for y in 0..dims.1 {
            for x in 0..dims.0 {
                let av = x < a.dims.0 && y < a.dims.1 && z < a.dims.2 && a.get(x, y, z);
                let bv = x < b.dims.0 && y < b.dims.1 && z < b.dims.2 && b.get(x, y, z);
                if av != bv {
                    diff += 1;
                }
            }
        }
    }
    diff as f64 / a.volume().max(b.volume()) as f64
}

/// Drops poses that match an earlier kept pose up to a vertical spin,
/// within a disagreement budget of `c` (see [`xor_ratio`]). The first pose
/// of each equivalence class, in input order, is the one kept.
pub fn dedup_poses(grid: &OccGrid, poses: &[Pose], c: f64) -> Result<Vec<Pose>, ShapeError> {
    let mut kept: Vec<Pose> = Vec::new();
    let mut kept_grids: Vec<OccGrid> = Vec::new();
    for &pose in poses {
        let g = rotate24(grid, pose.orientation)?;
        let mut spins = Vec::with_capacity(SPIN_COUNT as usize);
        for s in 0..SPIN_COUNT {
            spins.push(rotate24(&g, spin_z_index(s)?)?);
        }
        let duplicate = kept_grids
            .iter()
            .any(|kg| spins.iter().any(|sg| xor_ratio(sg, kg) <= c));
        if !duplicate {
            kept.push(pose);
            kept_grids.push(g);
        }
    }
    Ok(kept)
}
