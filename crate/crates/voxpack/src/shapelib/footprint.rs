use crate::gridgeom::BinaryGrid;

use super::poses::Pose;
use super::rotate::{compose_orientations, rotate24, spin_z_index, ORIENTATION_COUNT};
use super::shape::{OccGrid, VoxelShape};
use super::ShapeError;

/// Column-wise summary of an oriented shape, the unit of all placement
/// arithmetic. `bottom(x, y)` is the lowest occupied layer in a column and
/// `top(x, y)` one past the highest; interior vertical gaps are treated as
/// solid, matching how a heightmap buries them once the shape lands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FootprintMaps {
    pub mask: BinaryGrid,
    bottom: Vec<u32>,
    top: Vec<u32>,
    pub height: u32,
    pub volume: u64,
    /// Center-of-mass height above the item's floor, stored exactly as
    /// `sum(2z + 1)` over voxels so that scaling never rounds.
    com_z_numer: u64,
}

impl FootprintMaps {
    pub fn from_grid(grid: &OccGrid) -> Self {
        let (w, d, h) = grid.dims;
        let mut mask = BinaryGrid::new(w as usize, d as usize);
        let mut bottom = vec![0u32; (w * d) as usize];
        let mut top = vec![0u32; (w * d) as usize];
        let mut com_z_numer = 0u64;
        for y in 0..d {
            for x in 0..w {
                let mut lo = None;
                let mut hi = 0;
                for z in 0..h {
                    if grid.get(x, y, z) {
                        lo.get_or_insert(z);
                        hi = z + 1;
                        com_z_numer += 2 * z as u64 + 1;
                    }
                }
                if let Some(lo) = lo {
                    mask.set(x as usize, y as usize, true);
                    bottom[(y * w + x) as usize] = lo;
                    top[(y * w + x) as usize] = hi;
                }
            }
        }
        FootprintMaps { mask, bottom, top, height: h, volume: grid.volume(), com_z_numer }
    }

    pub fn width(&self) -> usize {
        self.mask.width()
    }

    pub fn depth(&self) -> usize {
        self.mask.height()
    }

    /// Lowest occupied layer of a masked column.
    #[inline]
    pub fn bottom(&self, x: usize, y: usize) -> u32 {
        debug_assert!(self.mask.get(x, y));
        self.bottom[y * self.width() + x]
    }

    /// One past the highest occupied layer of a masked column.
    #[inline]
    pub fn top(&self, x: usize, y: usize) -> u32 {
        debug_assert!(self.mask.get(x, y));
        self.top[y * self.width() + x]
    }

    /// Center-of-mass height above the item's floor, in heightmap cells.
    /// Unlike the column maps this sees interior gaps exactly.
    pub fn com_z(&self) -> f64 {
        self.com_z_numer as f64 / (2 * self.volume) as f64
    }

    /// Re-expresses the maps on a lattice `s` times finer: every shape cell
    /// becomes an `s`×`s`×`s` block of heightmap cells.
    pub fn scaled(&self, s: u32) -> Self {
        assert!(s >= 1);
        let (w, d) = (self.width(), self.depth());
        let (sw, sd) = (w * s as usize, d * s as usize);
        let mut mask = BinaryGrid::new(sw, sd);
        let mut bottom = vec![0u32; sw * sd];
        let mut top = vec![0u32; sw * sd];
        for y in 0..sd {
            for x in 0..sw {
                let (cx, cy) = (x / s as usize, y / s as usize);
                if self.mask.get(cx, cy) {
                    mask.set(x, y, true);
                    bottom[y * sw + x] = self.bottom[cy * w + cx] * s;
                    top[y * sw + x] = self.top[cy * w + cx] * s;
                }
            }
        }
        FootprintMaps {
            mask,
            bottom,
            top,
            height: self.height * s,
            volume: self.volume * (s as u64).pow(3),
            // Each voxel's s^3 block sums (2z'+1) to s^4 times the original
            // term, keeping com_z = numer / (2 * volume) exactly s times
            // larger.
            com_z_numer: self.com_z_numer * (s as u64).pow(4),
        }
    }
}

/// Maps for a shape resting in `pose`, then spun about the vertical axis
/// by `spin` counter-clockwise quarter-turns.
pub fn footprint_maps(
    shape: &VoxelShape,
    pose: Pose,
    spin: u8,
) -> Result<FootprintMaps, ShapeError> {
    if pose.orientation >= ORIENTATION_COUNT {
        return Err(ShapeError::BadOrientation(pose.orientation));
    }
    let idx = compose_orientations(spin_z_index(spin)?, pose.orientation);
    Ok(FootprintMaps::from_grid(&rotate24(&shape.grid, idx)?))
}
