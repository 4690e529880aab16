//! The packing container: heightmap state, quasi-static drop physics, and
//! episode bookkeeping.
//!
//! An episode consumes a [`ProblemSequence`] item by item. For each item the
//! acting policy picks a vertical spin and an anchor — the cell under the
//! footprint's minimum corner — and the item drops straight down until some
//! column of its underside meets the heap. The episode ends when every item
//! is placed or the current one cannot be placed anywhere.

use serde::{Deserialize, Serialize};

use crate::shapelib::{
    integer_scale, Dataset, FootprintMaps, ProblemSequence, ShapeError, SPIN_COUNT,
};

#[derive(Debug, thiserror::Error)]
pub enum PackError {
    #[error("container must have nonzero dimensions")]
    BadContainer,
    #[error("problem references unknown shape {0:?}")]
    UnknownShape(String),
    #[error("shape {shape:?} has no prepared pose with orientation {orientation}")]
    UnknownPose { shape: String, orientation: usize },
    #[error("spin {0} out of range (0..4)")]
    BadSpin(u8),
    #[error("footprint does not fit at anchor ({x}, {y})")]
    DoesNotFit { x: usize, y: usize },
    #[error("episode is over")]
    EpisodeOver,
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Column heights over the container floor, in heightmap cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Heightmap {
    width: usize,
    depth: usize,
    cols: Vec<u32>,
}

impl Heightmap {
    pub fn new(width: usize, depth: usize) -> Self {
        Self { width, depth, cols: vec![0; width * depth] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.cols[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u32) {
        self.cols[y * self.width + x] = v;
    }

    /// All columns, row-major.
    pub fn cols(&self) -> &[u32] {
        &self.cols
    }
}

#[derive(Debug, Clone, Copy)]
struct ItemRef {
    shape_idx: usize,
    pose_idx: usize,
    orientation: usize,
    presented_spin: u8,
}

/// One placed item, with everything a trace line needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub step: usize,
    pub shape: String,
    pub orientation: usize,
    /// Spin chosen by the policy, relative to the presented orientation.
    pub spin: u8,
    pub x: usize,
    pub y: usize,
    pub lz: u32,
    pub reward: f64,
    /// Fill fraction after this placement.
    pub utility: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct StepReport {
    pub reward: f64,
    pub utility: f64,
    pub lz: u32,
    pub done: bool,
}

/// The current item as the policy sees it.
#[derive(Clone, Copy)]
pub struct ItemView<'a> {
    pub shape: &'a str,
    pub shape_idx: usize,
    pub pose_idx: usize,
    pub presented_spin: u8,
    maps: &'a [FootprintMaps; SPIN_COUNT as usize],
}

impl<'a> ItemView<'a> {
    /// Footprint maps after spinning the presented item by `choice`
    /// quarter-turns.
    pub fn maps_for(&self, choice: u8) -> &'a FootprintMaps {
        &self.maps[((self.presented_spin + choice) % SPIN_COUNT) as usize]
    }

    pub fn volume(&self) -> u64 {
        self.maps[0].volume
    }
}

pub struct PackEnv {
    dims: (u32, u32, u32),
    heightmap: Heightmap,
    /// `tables[shape][pose][absolute spin]`, scaled to heightmap cells.
    tables: Vec<Vec<[FootprintMaps; SPIN_COUNT as usize]>>,
    names: Vec<String>,
    items: Vec<ItemRef>,
    cursor: usize,
    done: bool,
    placed_cells: u64,
    placed_aabb_cells: u64,
    initial_volume: u64,
    remaining_volume: u64,
    records: Vec<PlacementRecord>,
}

impl PackEnv {
    pub fn new(dataset: &Dataset, problem: &ProblemSequence) -> Result<Self, PackError> {
        let dims = problem.container;
        if dims.0 == 0 || dims.1 == 0 || dims.2 == 0 {
            return Err(PackError::BadContainer);
        }
        let mut tables = Vec::with_capacity(dataset.shapes.len());
        let mut names = Vec::with_capacity(dataset.shapes.len());
        for prepared in &dataset.shapes {
            let s = integer_scale(prepared.shape.cell_cm, problem.dh_cm)?;
            tables.push(
                prepared
                    .maps
                    .iter()
                    .map(|per_spin| std::array::from_fn(|i| per_spin[i].scaled(s)))
                    .collect::<Vec<_>>(),
            );
            names.push(prepared.shape.name.clone());
        }
        let mut items = Vec::with_capacity(problem.items.len());
        let mut total = 0u64;
        for item in &problem.items {
            let shape_idx = dataset
                .shape_index(&item.shape)
                .ok_or_else(|| PackError::UnknownShape(item.shape.clone()))?;
            let pose_idx = dataset.shapes[shape_idx]
                .pose_index(item.orientation)
                .ok_or_else(|| PackError::UnknownPose {
                    shape: item.shape.clone(),
                    orientation: item.orientation,
                })?;
            if item.spin >= SPIN_COUNT {
                return Err(PackError::BadSpin(item.spin));
            }
            total += tables[shape_idx][pose_idx][0].volume;
            items.push(ItemRef {
                shape_idx,
                pose_idx,
                orientation: item.orientation,
                presented_spin: item.spin,
            });
        }
        Ok(PackEnv {
            dims,
            heightmap: Heightmap::new(dims.0 as usize, dims.1 as usize),
            tables,
            names,
            items,
            cursor: 0,
            done: false,
            placed_cells: 0,
            placed_aabb_cells: 0,
            initial_volume: total,
            remaining_volume: total,
            records: Vec::new(),
        })
    }

    pub fn dims(&self) -> (u32, u32, u32) {
        self.dims
    }

    pub fn capacity(&self) -> u64 {
        self.dims.0 as u64 * self.dims.1 as u64 * self.dims.2 as u64
    }

    pub fn heightmap(&self) -> &Heightmap {
        &self.heightmap
    }

    pub fn step(&self) -> usize {
        self.cursor
    }

    pub fn items_total(&self) -> usize {
        self.items.len()
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn placed_cells(&self) -> u64 {
        self.placed_cells
    }

    /// Total bounding-box cells of every placed item in its placed pose.
    /// Exceeds `placed_cells` whenever shapes have concavities.
    pub fn placed_aabb_cells(&self) -> u64 {
        self.placed_aabb_cells
    }

    /// Fill fraction of the container so far.
    pub fn utility(&self) -> f64 {
        self.placed_cells as f64 / self.capacity() as f64
    }

    /// Scaled volume of the current and all future items.
    pub fn remaining_volume(&self) -> u64 {
        self.remaining_volume
    }

    /// Scaled volume of the whole arrival sequence.
    pub fn initial_volume(&self) -> u64 {
        self.initial_volume
    }

    pub fn records(&self) -> &[PlacementRecord] {
        &self.records
    }

    pub fn current(&self) -> Option<ItemView<'_>> {
        self.pending(0)
    }

    /// View of the `offset`-th not-yet-consumed item; `pending(0)` is the
    /// current one. `None` once the episode is over or past the stream end.
    /// A buffer of size K is exactly the views at offsets `0..K`.
    pub fn pending(&self, offset: usize) -> Option<ItemView<'_>> {
        if self.done {
            return None;
        }
        let item = *self.items.get(self.cursor.checked_add(offset)?)?;
        Some(ItemView {
            shape: &self.names[item.shape_idx],
            shape_idx: item.shape_idx,
            pose_idx: item.pose_idx,
            presented_spin: item.presented_spin,
            maps: &self.tables[item.shape_idx][item.pose_idx],
        })
    }

    /// Moves the `offset`-th pending item to the front of the stream without
    /// disturbing the arrival order of the others, so the next `place`
    /// consumes it. Passing a buffered item on to the container is a promote
    /// followed by an ordinary placement.
    ///
    /// Panics when the episode is over or `offset` exceeds the pending tail.
    pub fn promote(&mut self, offset: usize) {
        assert!(!self.done, "episode is over");
        let idx = self.cursor + offset;
        assert!(idx < self.items.len(), "no pending item at offset {offset}");
        self.items[self.cursor..=idx].rotate_right(1);
    }

    /// Landing altitude of a footprint anchored at `(x, y)`: the item slides
    /// down until some column's underside meets the heap, so the altitude is
    /// the maximum over masked columns of `height - bottom`, floored at the
    /// container floor. `None` when the footprint sticks out of the container
    /// in x, y, or — after landing — z.
    pub fn probe(&self, maps: &FootprintMaps, x: usize, y: usize) -> Option<u32> {
        let (w, d) = (maps.width(), maps.depth());
        if x + w > self.dims.0 as usize || y + d > self.dims.1 as usize {
            return None;
        }
        let mut lz = 0i64;
        for (a, b) in maps.mask.iter_true() {
            let h = self.heightmap.get(x + a, y + b) as i64;
            lz = lz.max(h - maps.bottom(a, b) as i64);
        }
        let lz = lz.max(0) as u32;
        (lz as u64 + maps.height as u64 <= self.dims.2 as u64).then_some(lz)
    }

    /// Drops the current item, spun by `choice`, at anchor `(x, y)`.
    pub fn place(&mut self, choice: u8, x: usize, y: usize) -> Result<StepReport, PackError> {
        if choice >= SPIN_COUNT {
            return Err(PackError::BadSpin(choice));
        }
        let view = self.current().ok_or(PackError::EpisodeOver)?;
        let maps = view.maps_for(choice);
        let lz = self.probe(maps, x, y).ok_or(PackError::DoesNotFit { x, y })?;

        let volume = maps.volume;
        let aabb = maps.width() as u64 * maps.depth() as u64 * maps.height as u64;
        let shape = view.shape.to_owned();
        let orientation = self.items[self.cursor].orientation;

        let updates: Vec<(usize, usize, u32)> = maps
            .mask
            .iter_true()
            .map(|(a, b)| (x + a, y + b, lz + maps.top(a, b)))
            .collect();
        for (cx, cy, top) in updates {
            if top > self.heightmap.get(cx, cy) {
                self.heightmap.set(cx, cy, top);
            }
        }

        self.placed_cells += volume;
        self.placed_aabb_cells += aabb;
        self.remaining_volume -= volume;
        let reward = volume as f64 / self.capacity() as f64;
        let utility = self.utility();
        self.records.push(PlacementRecord {
            step: self.cursor,
            shape,
            orientation,
            spin: choice,
            x,
            y,
            lz,
            reward,
            utility,
        });
        self.cursor += 1;
        if self.cursor >= self.items.len() {
            self.done = true;
        }
        Ok(StepReport { reward, utility, lz, done: self.done })
    }

    /// Ends the episode because the current item cannot be placed.
    pub fn abandon(&mut self) {
        self.done = true;
    }
}

/// Episode trace: one JSON object per line, one line per placement.
pub fn trace_lines(records: &[PlacementRecord]) -> String {
    #[derive(Serialize)]
    struct Line<'a> {
        step: usize,
        shape: &'a str,
        spin: u8,
        lx: usize,
        ly: usize,
        lz: u32,
        reward: f64,
        utility: f64,
    }
    let mut out = String::new();
    for r in records {
        let line = Line {
            step: r.step,
            shape: &r.shape,
            spin: r.spin,
            lx: r.x,
            ly: r.y,
            lz: r.lz,
            reward: r.reward,
            utility: r.utility,
        };
        out.push_str(&serde_json::to_string(&line).expect("trace lines serialize"));
        out.push('\n');
    }
    out
}
