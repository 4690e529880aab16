//! 2D grid geometry underneath candidate generation.
//!
//! Coordinate conventions used across the crate: `x` indexes columns,
//! `y` indexes rows, raster order iterates `y` in the outer loop and `x`
//! in the inner loop. Polygon orientation is counter-clockwise in the
//! mathematical sense: positive signed area under the shoelace formula
//! with `x` right and `y` up.

mod contour;
mod erosion;
mod simplify;
mod tightness;
mod vertices;

pub use contour::trace_contour;
pub use erosion::erode_feasible;
pub use simplify::simplify_rdp;
pub use tightness::tightness_oracle;
pub use vertices::{analyze_vertices, VertexAnalysis};

use serde::{Deserialize, Serialize};

/// Sentinel altitude marking a cell where the footprint cannot land.
pub const INFEASIBLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("footprint has no occupied cells")]
    EmptyFootprint,
    #[error("no region carries label {0}")]
    UnknownLabel(u32),
    #[error("contour has fewer than 3 cells")]
    DegenerateContour,
    #[error("simplified contour does not form a simple polygon")]
    DegeneratePolygon,
    #[error("point ({0}, {1}) lies outside the region")]
    OutsideRegion(i32, i32),
    #[error("{0}")]
    BadParameter(&'static str),
}

/// Dense boolean grid, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryGrid {
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl BinaryGrid {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, cells: vec![false; width * height] }
    }

    pub fn filled(width: usize, height: usize) -> Self {
        Self { width, height, cells: vec![true; width * height] }
    }

    /// Builds a grid from `"#"`/`"."` rows; row 0 is `y = 0`.
    pub fn from_rows(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut g = Self::new(width, height);
        for (y, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), width, "ragged rows");
            for (x, ch) in row.bytes().enumerate() {
                if ch == b'#' {
                    g.set(x, y, true);
                }
            }
        }
        g
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn contains(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.cells[y * self.width + x]
    }

    /// Out-of-bounds coordinates read as `false`.
    #[inline]
    pub fn get_clipped(&self, x: i32, y: i32) -> bool {
        self.contains(x, y) && self.get(x as usize, y as usize)
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.cells[y * self.width + x] = v;
    }

    pub fn count_true(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// True cells in raster order.
    pub fn iter_true(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height).flat_map(move |y| {
            (0..self.width).filter_map(move |x| self.get(x, y).then_some((x, y)))
        })
    }

    /// Axis-aligned bounding box of true cells as `(min_x, min_y, max_x, max_y)`,
    /// inclusive; `None` when the grid is empty.
    pub fn aabb(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bb: Option<(usize, usize, usize, usize)> = None;
        for (x, y) in self.iter_true() {
            bb = Some(match bb {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
        bb
    }
}

/// Per-cell landing altitudes over a sampling lattice.
///
/// Candidate generation samples the container at a fixed stride, so one
/// altitude cell corresponds to one stride point; `INFEASIBLE` marks
/// lattice points the footprint cannot occupy. Off-lattice positions are
/// not represented at all, which is what makes 4-adjacency meaningful on
/// this grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AltitudeMap {
    width: usize,
    height: usize,
    values: Vec<u32>,
}

impl AltitudeMap {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, values: vec![INFEASIBLE; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u32) {
        self.values[y * self.width + x] = v;
    }

    #[inline]
    pub fn is_feasible(&self, x: usize, y: usize) -> bool {
        self.get(x, y) != INFEASIBLE
    }

    pub fn feasible_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != INFEASIBLE).count()
    }
}

/// Connected-region labels over an [`AltitudeMap`]; label 0 means unlabeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionLabeling {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    region_count: u32,
}

impl RegionLabeling {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn region_count(&self) -> u32 {
        self.region_count
    }

    #[inline]
    pub fn has_label(&self, x: i32, y: i32, label: u32) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.label(x as usize, y as usize) == label
    }

    /// Cells of one region as a mask, for neighborhood queries.
    pub fn region_mask(&self, label: u32) -> BinaryGrid {
        let mut g = BinaryGrid::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.label(x, y) == label {
                    g.set(x, y, true);
                }
            }
        }
        g
    }
}

/// Groups feasible lattice cells into 4-connected regions whose adjacent
/// cells differ in altitude by at most `delta_z`.
///
/// Labels are assigned in raster-scan discovery order starting at 1;
/// `INFEASIBLE` cells stay unlabeled. The bound applies per adjacent pair,
/// so a region may span a larger total altitude range than `delta_z`.
pub fn connected_regions(alt: &AltitudeMap, delta_z: u32) -> RegionLabeling {
    let (w, h) = (alt.width(), alt.height());
    let mut labels = vec![0u32; w * h];
    let mut region_count = 0u32;
    let mut queue = std::collections::VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if !alt.is_feasible(x, y) || labels[y * w + x] != 0 {
                continue;
            }
            region_count += 1;
            labels[y * w + x] = region_count;
            queue.push_back((x, y));
            while let Some((cx, cy)) = queue.pop_front() {
                let cv = alt.get(cx, cy);
                let neighbors = [
                    (cx.wrapping_sub(1), cy),
                    (cx + 1, cy),
                    (cx, cy.wrapping_sub(1)),
                    (cx, cy + 1),
                ];
                for (nx, ny) in neighbors {
                    if nx >= w || ny >= h || labels[ny * w + nx] != 0 || !alt.is_feasible(nx, ny) {
                        continue;
                    }
                    let nv = alt.get(nx, ny);
                    if cv.abs_diff(nv) <= delta_z {
                        labels[ny * w + nx] = region_count;
                        queue.push_back((nx, ny));
                    }
                }
            }
        }
    }
    RegionLabeling { width: w, height: h, labels, region_count }
}

/// Simple polygon over lattice cell coordinates, counter-clockwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<(i32, i32)>,
}

impl Polygon {
    /// Twice the signed area (shoelace); positive for counter-clockwise.
    pub fn signed_area_doubled(&self) -> i64 {
        let n = self.vertices.len();
        let mut acc = 0i64;
        for i in 0..n {
            let (x0, y0) = self.vertices[i];
            let (x1, y1) = self.vertices[(i + 1) % n];
            acc += x0 as i64 * y1 as i64 - x1 as i64 * y0 as i64;
        }
        acc
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[cfg(test)]
mod tests;
