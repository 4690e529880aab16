use super::{GridError, Polygon};

/// Simplifies a closed contour with Ramer–Douglas–Peucker and returns the
/// result as a counter-clockwise simple polygon.
///
/// The cycle is split at its two mutually farthest cells (ties resolved
/// toward the lexicographically smallest index pair) and each arc is
/// simplified independently with the point-to-segment metric, so every
/// dropped cell stays within `epsilon` of the returned polygon's boundary.
/// Retained vertices are input cells, never interpolated ones.
///
/// Contours shorter than 3 cells, and contours whose simplification
/// collapses (thin limbs traced out and back, collinear strips), do not
/// form a simple polygon and come back as errors; candidate generation
/// falls back to single-cell handling for those regions.
pub fn simplify_rdp(contour: &[(i32, i32)], epsilon: f64) -> Result<Polygon, GridError> {
    if contour.len() < 3 {
        return Err(GridError::DegenerateContour);
    }
    if epsilon < 0.0 || !epsilon.is_finite() {
        return Err(GridError::BadParameter("epsilon must be finite and non-negative"));
    }

    let (i, j) = farthest_pair(contour);
    // Arc A runs i..=j, arc B wraps j..=i; both keep their endpoints.
    let arc_a: Vec<(i32, i32)> = contour[i..=j].to_vec();
    let mut arc_b: Vec<(i32, i32)> = contour[j..].to_vec();
    arc_b.extend_from_slice(&contour[..=i]);

    let mut kept = rdp_open(&arc_a, epsilon);
    let tail = rdp_open(&arc_b, epsilon);
    kept.extend_from_slice(&tail[1..tail.len() - 1]);

    // Cells repeated by an out-and-back trace can survive as repeated
    // vertices; such a cycle cannot be simple.
    if kept.len() < 3 {
        return Err(GridError::DegeneratePolygon);
    }
    let mut poly = Polygon { vertices: kept };
    if poly.signed_area_doubled() == 0 || !is_simple(&poly.vertices) {
        return Err(GridError::DegeneratePolygon);
    }
    if poly.signed_area_doubled() < 0 {
        poly.vertices[1..].reverse();
    }
    Ok(poly)
}

/// Indices of the two mutually farthest cells, smallest index pair on ties.
fn farthest_pair(points: &[(i32, i32)]) -> (usize, usize) {
    let mut best = (0usize, 1usize);
    let mut best_d = -1i64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let dx = (points[i].0 - points[j].0) as i64;
            let dy = (points[i].1 - points[j].1) as i64;
            let d = dx * dx + dy * dy;
            if d > best_d {
                best_d = d;
                best = (i, j);
            }
        }
    }
    best
}

/// Classic recursive RDP on an open polyline; endpoints always survive.
fn rdp_open(points: &[(i32, i32)], epsilon: f64) -> Vec<(i32, i32)> {
    let mut keep = vec![false; points.len()];
    keep[0] = true;
    keep[points.len() - 1] = true;
    rdp_mark(points, 0, points.len() - 1, epsilon, &mut keep);
    points
        .iter()
        .zip(&keep)
        .filter_map(|(&p, &k)| k.then_some(p))
        .collect()
}

fn rdp_mark(points: &[(i32, i32)], lo: usize, hi: usize, epsilon: f64, keep: &mut [bool]) {
    if hi <= lo + 1 {
        return;
    }
    let mut worst = lo;
    let mut worst_d = -1.0f64;
    for k in (lo + 1)..hi {
        let d = segment_distance(points[k], points[lo], points[hi]);
        if d > worst_d {
            worst_d = d;
            worst = k;
        }
    }
    if worst_d > epsilon {
        keep[worst] = true;
        rdp_mark(points, lo, worst, epsilon, keep);
        rdp_mark(points, worst, hi, epsilon, keep);
    }
}

/// Euclidean distance from `p` to the closed segment `ab`.
fn segment_distance(p: (i32, i32), a: (i32, i32), b: (i32, i32)) -> f64 {
    let (px, py) = (p.0 as f64, p.1 as f64);
    let (ax, ay) = (a.0 as f64, a.1 as f64);
    let (bx, by) = (b.0 as f64, b.1 as f64);
    let (ux, uy) = (bx - ax, by - ay);
    let len2 = ux * ux + uy * uy;
    if len2 == 0.0 {
        return ((px - ax).powi(2) + (py - ay).powi(2)).sqrt();
    }
    let t = (((px - ax) * ux + (py - ay) * uy) / len2).clamp(0.0, 1.0);
    let (cx, cy) = (ax + t * ux, ay + t * uy);
    ((px - cx).powi(2) + (py - cy).powi(2)).sqrt()
}

/// Simplicity check with exact integer predicates: no repeated vertices, no
/// zero-length edges, adjacent edges meet only at their shared endpoint, and
/// non-adjacent edges do not touch at all.
fn is_simple(vertices: &[(i32, i32)]) -> bool {
    let n = vertices.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if vertices[i] == vertices[j] {
                return false;
            }
        }
    }
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        for j in (i + 1)..n {
            let c = vertices[j];
            let d = vertices[(j + 1) % n];
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Sharing one endpoint is expected; any further contact
                // (collinear overlap or a vertex interior to the other edge)
                // breaks simplicity.
                let shared = if j == i + 1 { b } else { a };
                let (other1, other2) = if j == i + 1 { (a, d) } else { (b, c) };
                if on_segment(other1, c, d) && other1 != shared {
                    return false;
                }
                if on_segment(other2, a, b) && other2 != shared {
                    return false;
                }
            } else if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn cross(o: (i32, i32), a: (i32, i32), b: (i32, i32)) -> i64 {
    (a.0 - o.0) as i64 * (b.1 - o.1) as i64 - (a.1 - o.1) as i64 * (b.0 - o.0) as i64
}

/// True when `p` lies on the closed segment `ab` (collinear and within the box).
fn on_segment(p: (i32, i32), a: (i32, i32), b: (i32, i32)) -> bool {
    cross(a, b, p) == 0
        && p.0 >= a.0.min(b.0)
        && p.0 <= a.0.max(b.0)
        && p.1 >= a.1.min(b.1)
        && p.1 <= a.1.max(b.1)
}

/// Closed-segment intersection test, exact in integer arithmetic.
fn segments_intersect(a: (i32, i32), b: (i32, i32), c: (i32, i32), d: (i32, i32)) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)) {
        return true;
    }
    (d1 == 0 && on_segment(a, c, d))
        || (d2 == 0 && on_segment(b, c, d))
        || (d3 == 0 && on_segment(c, a, b))
        || (d4 == 0 && on_segment(d, a, b))
}
