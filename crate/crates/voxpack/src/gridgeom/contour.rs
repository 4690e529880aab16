use super::{GridError, RegionLabeling};

/// 4-neighborhood in clockwise order: N, E, S, W.
const DIRS: [(i32, i32); 4] = [(0, -1), (1, 0), (0, 1), (-1, 0)];

/// Traces the outer boundary of the region carrying `label` and returns its
/// cells in counter-clockwise order (positive shoelace, `x` right `y` up).
///
/// Border following for a 4-connected region against an 8-connected
/// exterior: the walk moves between 4-adjacent cells, keeping the exterior
/// on one side, and visits exactly the region cells that touch the exterior
/// through at least one 8-neighbor. The walk starts at the region's first
/// cell in raster order and stops when that cell is re-entered with the
/// same successor as on the first step. Thin limbs (one cell wide) are
/// walked out and back, so a cell may appear more than once in the cycle,
/// but never twice in a row.
pub fn trace_contour(region: &RegionLabeling, label: u32) -> Result<Vec<(i32, i32)>, GridError> {
    if label == 0 || label > region.region_count() {
        return Err(GridError::UnknownLabel(label));
    }
    let mut start = None;
    'scan: for y in 0..region.height() {
        for x in 0..region.width() {
            if region.label(x, y) == label {
                start = Some((x as i32, y as i32));
                break 'scan;
            }
        }
    }
    let start = start.ok_or(GridError::UnknownLabel(label))?;

    // The raster scan guarantees the north and west neighbors of the start
    // cell are outside the region, so heading east keeps the exterior on the
    // walker's left.
    let Some((first_next, first_heading)) = step(region, label, start, 1) else {
        return Ok(vec![start]); // isolated cell
    };
    let mut contour = vec![start, first_next];
    let mut cur = first_next;
    let mut heading = first_heading;
    let cap = 8 * region.width() * region.height() + 8;
    let mut steps = 0usize;
    loop {
        let (next, next_heading) = step(region, label, cur, heading)
            .expect("a cell reached by border following has a region neighbor");
        if cur == start && next == first_next {
            contour.pop(); // the closing re-entry of the start was pushed one step ago
            break;
        }
        contour.push(next);
        cur = next;
        heading = next_heading;
        steps += 1;
        assert!(steps < cap, "contour tracing failed to terminate");
    }

    // Normalize to positive shoelace orientation, keeping the start cell first.
    if signed_area_doubled(&contour) < 0 {
        contour[1..].reverse();
    }
    Ok(contour)
}

/// One wall-follower move: from `cell` with the given heading, turn left if
/// possible, else go straight, else right, else back. Returns the next cell
/// and the new heading, or None when the cell has no 4-neighbor in the region.
fn step(
    region: &RegionLabeling,
    label: u32,
    cell: (i32, i32),
    heading: usize,
) -> Option<((i32, i32), usize)> {
    for turn in [3usize, 0, 1, 2] {
        let dir = (heading + turn) % 4;
        let (dx, dy) = DIRS[dir];
        let next = (cell.0 + dx, cell.1 + dy);
        if region.has_label(next.0, next.1, label) {
            return Some((next, dir));
        }
    }
    None
}

fn signed_area_doubled(cycle: &[(i32, i32)]) -> i64 {
    let n = cycle.len();
    let mut acc = 0i64;
    for i in 0..n {
        let (x0, y0) = cycle[i];
        let (x1, y1) = cycle[(i + 1) % n];
        acc += x0 as i64 * y1 as i64 - x1 as i64 * y0 as i64;
    }
    acc
}
