//! Voxel shapes, their rotations and stable poses, and problem emission.

mod dataset;
mod emit;
mod footprint;
mod poses;
mod rotate;
mod shape;

pub use dataset::{
    gen_polycubes, load_dataset, load_manifest, Dataset, PreparedShape, DEFAULT_DEDUP_C,
};
pub use emit::{emit_problem, integer_scale, ProblemItem, ProblemSequence};
pub use footprint::{footprint_maps, FootprintMaps};
pub use poses::{dedup_poses, stable_poses, Pose};
pub use rotate::{
    compose_orientations, inverse_orientation, orientations, rotate24, spin_z_index, Mat3,
    ORIENTATION_COUNT, SPIN_COUNT,
};
pub use shape::{load_shape, save_shape, OccGrid, VoxelShape};

#[derive(Debug, thiserror::Error)]
pub enum ShapeError {
    #[error("shape has no voxels")]
    EmptyShape,
    #[error("duplicate voxel ({0}, {1}, {2})")]
    DuplicateVoxel(u32, u32, u32),
    #[error("voxel ({0}, {1}, {2}) outside declared dims")]
    VoxelOutOfBounds(u32, u32, u32),
    #[error("orientation index {0} out of range (0..24)")]
    BadOrientation(usize),
    #[error("spin index {0} out of range (0..4)")]
    BadSpin(u8),
    #[error("shape {0:?} has no stable pose")]
    NoStablePose(String),
    #[error("shape {0:?} does not fit the container in any stable pose")]
    ShapeTooLarge(String),
    #[error("dataset has no shapes")]
    EmptyDataset,
    #[error("cell size {cell_cm} cm is not an integer multiple of the heightmap resolution {dh_cm} cm")]
    BadScale { cell_cm: f64, dh_cm: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed shape file: {0}")]
    Json(#[from] serde_json::Error),
}
