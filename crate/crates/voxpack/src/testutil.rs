//! Scene-building helpers shared by the unit tests.

use crate::packenv::PackEnv;
use crate::shapelib::{Dataset, OccGrid, ProblemItem, ProblemSequence, VoxelShape, DEFAULT_DEDUP_C};

pub fn shape(name: &str, cell_cm: f64, voxels: &[(u32, u32, u32)]) -> VoxelShape {
    let dims = voxels.iter().fold((1, 1, 1), |d: (u32, u32, u32), v| {
        (d.0.max(v.0 + 1), d.1.max(v.1 + 1), d.2.max(v.2 + 1))
    });
    VoxelShape::new(name, cell_cm, OccGrid::from_voxels(dims, voxels).unwrap()).unwrap()
}

/// A solid cuboid of the given dimensions.
pub fn block(name: &str, cell_cm: f64, dims: (u32, u32, u32)) -> VoxelShape {
    let mut voxels = Vec::new();
    for z in 0..dims.2 {
        for y in 0..dims.1 {
            for x in 0..dims.0 {
                voxels.push((x, y, z));
            }
        }
    }
    shape(name, cell_cm, &voxels)
}

pub fn dataset(shapes: Vec<VoxelShape>) -> Dataset {
    Dataset::new(shapes, DEFAULT_DEDUP_C).unwrap()
}

pub fn problem(
    container: (u32, u32, u32),
    dh_cm: f64,
    items: &[(&str, usize, u8)],
) -> ProblemSequence {
    ProblemSequence {
        container,
        dh_cm,
        seed: 0,
        items: items
            .iter()
            .map(|&(shape, orientation, spin)| ProblemItem {
                shape: shape.to_string(),
                orientation,
                spin,
            })
            .collect(),
    }
}

/// Index of the shape's flat pose (unit footprint height), which exists for
/// every test shape used with this helper.
pub fn flat_pose(ds: &Dataset, shape: &str) -> usize {
    let prepared = &ds.shapes[ds.shape_index(shape).unwrap()];
    (0..prepared.poses.len())
        .find(|&p| prepared.maps[p][0].height == 1)
        .unwrap()
}

/// Rotation-table orientation of a prepared pose.
pub fn pose_orientation(ds: &Dataset, shape: &str, pose_idx: usize) -> usize {
    ds.shapes[ds.shape_index(shape).unwrap()].poses[pose_idx].orientation
}

/// Places scripted `(spin, x, y)` actions, one per queued item.
pub fn place_all(env: &mut PackEnv, actions: &[(u8, usize, usize)]) {
    for &(spin, x, y) in actions {
        env.place(spin, x, y).unwrap();
    }
}
