use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ShapeError;

/// Dense boolean voxel grid. Indexing is `(x, y, z)` with `x` fastest,
/// then `y`, then `z`, so a slice at fixed `z` is raster order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccGrid {
    pub dims: (u32, u32, u32),
    cells: Vec<bool>,
}

impl OccGrid {
    pub fn new(dims: (u32, u32, u32)) -> Self {
        let n = dims.0 as usize * dims.1 as usize * dims.2 as usize;
        OccGrid {
            dims,
            cells: vec![false; n],
        }
    }

    fn index(&self, x: u32, y: u32, z: u32) -> usize {
        debug_assert!(x < self.dims.0 && y < self.dims.1 && z < self.dims.2);
        (z as usize * self.dims.1 as usize + y as usize) * self.dims.0 as usize + x as usize
    }

    pub fn get(&self, x: u32, y: u32, z: u32) -> bool {
        self.cells[self.index(x, y, z)]
    }

    pub fn set(&mut self, x: u32, y: u32, z: u32, v: bool) {
        let i = self.index(x, y, z);
        self.cells[i] = v;
    }

    pub fn volume(&self) -> u64 {
        self.cells.iter().filter(|&&c| c).count() as u64
    }

    /// Occupied voxels in `(x, y, z)` order sorted by `(z, y, x)`.
    pub fn voxels(&self) -> Vec<(u32, u32, u32)> {
        let mut out = Vec::new();
        for z in 0..self.dims.2 {
            for y in 0..self.dims.1 {
                for x in 0..self.dims.0 {
                    if self.get(x, y, z) {
                        out.push((x, y, z));
                    }
                }
            }
        }
        out
    }

    /// Translates the occupied set so its bounding box touches the origin
    /// and shrinks `dims` to the bounding box. Errors on an empty grid.
    pub fn trimmed(&self) -> Result<OccGrid, ShapeError> {
        let vox = self.voxels();
        if vox.is_empty() {
            return Err(ShapeError::EmptyShape);
        }
        let min = vox.iter().fold((u32::MAX, u32::MAX, u32::MAX), |m, v| {
            (m.0.min(v.0), m.1.min(v.1), m.2.min(v.2))
        });
        let max = vox
            .iter()
            .fold((0, 0, 0), |m: (u32, u32, u32), v| (m.0.max(v.0), m.1.max(v.1), m.2.max(v.2)));
        let mut out = OccGrid::new((max.0 - min.0 + 1, max.1 - min.1 + 1, max.2 - min.2 + 1));
        for (x, y, z) in vox {
            out.set(x - min.0, y - min.1, z - min.2, true);
        }
        Ok(out)
    }

    pub fn from_voxels(
        dims: (u32, u32, u32),
        voxels: &[(u32, u32, u32)],
    ) -> Result<OccGrid, ShapeError> {
        if voxels.is_empty() {
            return Err(ShapeError::EmptyShape);
        }
        let mut grid = OccGrid::new(dims);
        for &(x, y, z) in voxels {
            if x >= dims.0 || y >= dims.1 || z >= dims.2 {
                return Err(ShapeError::VoxelOutOfBounds(x, y, z));
            }
            if grid.get(x, y, z) {
                return Err(ShapeError::DuplicateVoxel(x, y, z));
            }
            grid.set(x, y, z, true);
        }
        Ok(grid)
    }
}

/// A named shape voxelized at `cell_cm` centimeters per cell. The grid is
/// always trimmed: every axis touches at least one occupied voxel.
#[derive(Debug, Clone)]
pub struct VoxelShape {
    pub name: String,
    pub cell_cm: f64,
    pub grid: OccGrid,
}

impl VoxelShape {
    pub fn new(name: impl Into<String>, cell_cm: f64, grid: OccGrid) -> Result<Self, ShapeError> {
        Ok(VoxelShape {
            name: name.into(),
            cell_cm,
            grid: grid.trimmed()?,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ShapeFile {
    name: String,
    cell_cm: f64,
    dims: (u32, u32, u32),
    voxels: Vec<(u32, u32, u32)>,
}

pub fn save_shape(shape: &VoxelShape, path: &Path) -> Result<(), ShapeError> {
    let file = ShapeFile {
        name: shape.name.clone(),
        cell_cm: shape.cell_cm,
        dims: shape.grid.dims,
        voxels: shape.grid.voxels(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn load_shape(path: &Path) -> Result<VoxelShape, ShapeError> {
    let file: ShapeFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let grid = OccGrid::from_voxels(file.dims, &file.voxels)?;
    VoxelShape::new(file.name, file.cell_cm, grid)
}
