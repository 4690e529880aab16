use super::{BinaryGrid, GridError};

/// Minkowski erosion of `mask` by `footprint`: output cell `(x, y)` is true
/// iff anchoring the footprint's reference corner — the (min-x, min-y)
/// corner of its occupied AABB — at `(x, y)` keeps every occupied footprint
/// cell on a true cell of `mask`.
///
/// Output dimensions equal the mask's; anchors that push any part of the
/// footprint out of bounds are false. A footprint larger than the mask
/// yields an all-false grid.
pub fn erode_feasible(mask: &BinaryGrid, footprint: &BinaryGrid) -> Result<BinaryGrid, GridError> {
    let (fx0, fy0, fx1, fy1) = footprint.aabb().ok_or(GridError::EmptyFootprint)?;
    let (fw, fh) = (fx1 - fx0 + 1, fy1 - fy0 + 1);
    let (mw, mh) = (mask.width(), mask.height());

    let mut out = BinaryGrid::new(mw, mh);
    if fw > mw || fh > mh {
        return Ok(out);
    }

    // Start from feasibility of the anchor range alone, then knock out every
    // anchor that a true footprint cell would push onto a false mask cell.
    for y in 0..=(mh - fh) {
        for x in 0..=(mw - fw) {
            out.set(x, y, true);
        }
    }
    for fy in fy0..=fy1 {
        for fx in fx0..=fx1 {
            if !footprint.get(fx, fy) {
                continue;
            }
            let (dx, dy) = (fx - fx0, fy - fy0);
            for y in 0..=(mh - fh) {
                for x in 0..=(mw - fw) {
                    if out.get(x, y) && !mask.get(x + dx, y + dy) {
                        out.set(x, y, false);
                    }
                }
            }
        }
    }
    Ok(out)
}
