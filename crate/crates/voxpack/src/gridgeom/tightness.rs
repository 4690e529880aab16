use super::{BinaryGrid, GridError};

/// Dot products this close to zero count as ties; well above accumulated
/// rounding in the f64 products, well below any genuine geometric margin
/// between lattice offsets and the sampled directions.
const TIE_EPS: f64 = 1e-9;

/// Empirically measures how tight the region is around `p`: the fraction of
/// the circle (in radians) along which `p` is an extreme cell of the region
/// restricted to a disk of `radius` around it.
///
/// For each of `n_dirs` directions `d` sampled uniformly on the circle, `p`
/// counts as extreme when `d·p ≥ d·q` for every region cell `q` within
/// `radius`; ties count. The returned value approximates the spanning angle
/// of the outward normal cone at `p`: close to π − θ at a convex corner with
/// interior angle θ, close to zero along straight edges, and zero at
/// interior or reflex cells.
pub fn tightness_oracle(
    region: &BinaryGrid,
    p: (i32, i32),
    radius: f64,
    n_dirs: usize,
) -> Result<f64, GridError> {
    if radius < 2.0 {
        return Err(GridError::BadParameter("tightness radius must be at least 2 cells"));
    }
    if n_dirs < 90 {
        return Err(GridError::BadParameter("tightness needs at least 90 directions"));
    }
    if !region.get_clipped(p.0, p.1) {
        return Err(GridError::OutsideRegion(p.0, p.1));
    }

    let r_cells = radius.floor() as i32;
    let r2 = radius * radius;
    let mut offsets: Vec<(f64, f64)> = Vec::new();
    for dy in -r_cells..=r_cells {
        for dx in -r_cells..=r_cells {
            if dx == 0 && dy == 0 {
                continue;
            }
            if (dx * dx + dy * dy) as f64 > r2 {
                continue;
            }
            if region.get_clipped(p.0 + dx, p.1 + dy) {
                offsets.push((dx as f64, dy as f64));
            }
        }
    }

    let mut extreme = 0usize;
    for k in 0..n_dirs {
        let angle = 2.0 * std::f64::consts::PI * k as f64 / n_dirs as f64;
        let (dx, dy) = (angle.cos(), angle.sin());
        // d·p ≥ d·q  ⇔  d·(q − p) ≤ 0.
        if offsets.iter().all(|&(ox, oy)| dx * ox + dy * oy <= TIE_EPS) {
            extreme += 1;
        }
    }
    Ok(extreme as f64 * 2.0 * std::f64::consts::PI / n_dirs as f64)
}
