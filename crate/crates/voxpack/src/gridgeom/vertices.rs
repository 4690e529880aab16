use super::{GridError, Polygon};

/// Interior angle and tightness of one polygon vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexAnalysis {
    pub index: usize,
    /// Interior angle θ in radians, in (0, 2π).
    pub interior_angle: f64,
    /// Spanning angle of the outward normal cone: τ = max(0, π − θ).
    pub tightness: f64,
    /// θ < π; exactly the vertices with positive tightness.
    pub convex: bool,
}

/// Computes per-vertex interior angles and tightness for a simple
/// counter-clockwise polygon.
///
/// At each vertex the exterior turn is the signed angle from the incoming to
/// the outgoing edge; the interior angle is π minus that turn, so the turns
/// of a simple CCW polygon sum to 2π. A vertex is a strict local maximizer of
/// some placement direction exactly when it is convex, and the measure of
/// those directions is its tightness.
pub fn analyze_vertices(poly: &Polygon) -> Result<Vec<VertexAnalysis>, GridError> {
    let n = poly.vertices.len();
    if n < 3 {
        return Err(GridError::DegeneratePolygon);
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = poly.vertices[(i + n - 1) % n];
        let cur = poly.vertices[i];
        let next = poly.vertices[(i + 1) % n];
        let a = ((cur.0 - prev.0) as f64, (cur.1 - prev.1) as f64);
        let b = ((next.0 - cur.0) as f64, (next.1 - cur.1) as f64);
        if (a.0 == 0.0 && a.1 == 0.0) || (b.0 == 0.0 && b.1 == 0.0) {
            return Err(GridError::DegeneratePolygon);
        }
        let turn = (a.0 * b.1 - a.1 * b.0).atan2(a.0 * b.0 + a.1 * b.1);
        let interior_angle = std::f64::consts::PI - turn;
        let tightness = turn.max(0.0);
        out.push(VertexAnalysis {
            index: i,
            interior_angle,
            tightness,
            convex: turn > 0.0,
        });
    }
    Ok(out)
}
