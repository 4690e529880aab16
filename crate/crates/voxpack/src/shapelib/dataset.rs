use std::path::Path;

use serde::Deserialize;

use super::footprint::{footprint_maps, FootprintMaps};
use super::poses::{dedup_poses, stable_poses, Pose};
use super::shape::{load_shape, OccGrid, VoxelShape};
use super::ShapeError;
use super::SPIN_COUNT;

/// Default disagreement budget for pose deduplication.
pub const DEFAULT_DEDUP_C: f64 = 0.05;

/// A shape with its usable poses and per-(pose, spin) footprint maps
/// precomputed at shape-cell resolution.
#[derive(Debug, Clone)]
pub struct PreparedShape {
    pub shape: VoxelShape,
    pub poses: Vec<Pose>,
    /// `maps[pose_index][spin]`.
    pub maps: Vec<[FootprintMaps; SPIN_COUNT as usize]>,
}

impl PreparedShape {
    pub fn prepare(shape: VoxelShape, dedup_c: f64) -> Result<Self, ShapeError> {
        let stable = stable_poses(&shape.grid)?;
        let poses = dedup_poses(&shape.grid, &stable, dedup_c)?;
        if poses.is_empty() {
            return Err(ShapeError::NoStablePose(shape.name.clone()));
        }
        let mut maps = Vec::with_capacity(poses.len());
        for &pose in &poses {
            maps.push([
                footprint_maps(&shape, pose, 0)?,
                footprint_maps(&shape, pose, 1)?,
                footprint_maps(&shape, pose, 2)?,
                footprint_maps(&shape, pose, 3)?,
            ]);
        }
        Ok(PreparedShape { shape, poses, maps })
    }

    pub fn pose_index(&self, orientation: usize) -> Option<usize> {
        self.poses.iter().position(|p| p.orientation == orientation)
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub shapes: Vec<PreparedShape>,
}

impl Dataset {
    pub fn new(shapes: Vec<VoxelShape>, dedup_c: f64) -> Result<Self, ShapeError> {
        if shapes.is_empty() {
            return Err(ShapeError::EmptyDataset);
        }
        let shapes = shapes
            .into_iter()
            .map(|s| PreparedShape::prepare(s, dedup_c))
            .collect::<Result<_, _>>()?;
        Ok(Dataset { shapes })
    }

    pub fn shape_index(&self, name: &str) -> Option<usize> {
        self.shapes.iter().position(|s| s.shape.name == name)
    }
}

pub fn load_dataset(shapes: Vec<VoxelShape>, dedup_c: f64) -> Result<Dataset, ShapeError> {
    Dataset::new(shapes, dedup_c)
}

/// The built-in item set: the eight polycubes of up to four cells that
/// pack interestingly, voxelized at 6 cm per cell.
pub fn gen_polycubes() -> Vec<VoxelShape> {
    let defs: [(&str, &[(u32, u32, u32)]); 8] = [
        ("cube-1", &[(0, 0, 0)]),
        ("domino-2", &[(0, 0, 0), (1, 0, 0)]),
        ("line-3", &[(0, 0, 0), (1, 0, 0), (2, 0, 0)]),
        ("ell-3", &[(0, 0, 0), (1, 0, 0), (0, 1, 0)]),
        ("line-4", &[(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0)]),
        ("square-4", &[(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)]),
        ("ess-4", &[(1, 0, 0), (2, 0, 0), (0, 1, 0), (1, 1, 0)]),
        ("tee-4", &[(0, 0, 0), (1, 0, 0), (2, 0, 0), (1, 1, 0)]),
    ];
    defs.iter()
        .map(|(name, voxels)| {
            let dims = voxels.iter().fold((1, 1, 1), |d: (u32, u32, u32), v| {
                (d.0.max(v.0 + 1), d.1.max(v.1 + 1), d.2.max(v.2 + 1))
            });
            let grid = OccGrid::from_voxels(dims, voxels).expect("built-in shape is well-formed");
            VoxelShape::new(*name, 6.0, grid).expect("built-in shape is well-formed")
        })
        .collect()
}

#[derive(Deserialize)]
struct Manifest {
    shapes: Vec<String>,
}

/// Loads shapes listed in a manifest file `{"shapes": ["a.json", ...]}`;
/// relative entries resolve against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<VoxelShape>, ShapeError> {
    let manifest: Manifest = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let base = path.parent().unwrap_or(Path::new("."));
    manifest
        .shapes
        .iter()
        .map(|entry| load_shape(&base.join(entry)))
        .collect()
}
