use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Independent oracles. These re-derive expected answers by brute force and
// must not share code with the implementations they check.
// ---------------------------------------------------------------------------

/// Erosion by definition: test the footprint-subset condition at every cell.
fn erode_by_subset_test(mask: &BinaryGrid, footprint: &BinaryGrid) -> BinaryGrid {
    let mut out = BinaryGrid::new(mask.width(), mask.height());
    let Some((fx0, fy0, _, _)) = footprint.aabb() else {
        return out;
    };
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            let mut ok = true;
            'cells: for fy in 0..footprint.height() {
                for fx in 0..footprint.width() {
                    if !footprint.get(fx, fy) {
                        continue;
                    }
                    let mx = x as i32 + (fx as i32 - fx0 as i32);
                    let my = y as i32 + (fy as i32 - fy0 as i32);
                    if !mask.get_clipped(mx, my) {
                        ok = false;
                        break 'cells;
                    }
                }
            }
            out.set(x, y, ok);
        }
    }
    out
}

/// Boundary cells by per-cell neighborhood scan: region cells with at least
/// one 8-neighbor outside the region.
fn boundary_cells_by_scan(region: &RegionLabeling, label: u32) -> std::collections::BTreeSet<(i32, i32)> {
    let mut out = std::collections::BTreeSet::new();
    for y in 0..region.height() {
        for x in 0..region.width() {
            if region.label(x, y) != label {
                continue;
            }
            let (xi, yi) = (x as i32, y as i32);
            let exposed = (-1..=1).any(|dy: i32| {
                (-1..=1).any(|dx: i32| {
                    (dx != 0 || dy != 0) && !region.has_label(xi + dx, yi + dy, label)
                })
            });
            if exposed {
                out.insert((xi, yi));
            }
        }
    }
    out
}

/// Point-to-segment distance, recomputed from scratch for the RDP recheck:
/// perpendicular distance when the foot of the perpendicular falls between
/// the endpoints, distance to the nearer endpoint otherwise.
fn recheck_segment_distance(p: (i32, i32), a: (i32, i32), b: (i32, i32)) -> f64 {
    let d = |u: (i32, i32), v: (i32, i32)| ((u.0 - v.0) as f64).hypot((u.1 - v.1) as f64);
    if a == b {
        return d(p, a);
    }
    let dot_a = (p.0 - a.0) as i64 * (b.0 - a.0) as i64 + (p.1 - a.1) as i64 * (b.1 - a.1) as i64;
    let dot_b = (p.0 - b.0) as i64 * (a.0 - b.0) as i64 + (p.1 - b.1) as i64 * (a.1 - b.1) as i64;
    if dot_a >= 0 && dot_b >= 0 {
        let cross =
            (b.0 - a.0) as i64 * (p.1 - a.1) as i64 - (b.1 - a.1) as i64 * (p.0 - a.0) as i64;
        cross.unsigned_abs() as f64 / d(a, b)
    } else {
        d(p, a).min(d(p, b))
    }
}

fn polyline_distance(p: (i32, i32), poly: &Polygon) -> f64 {
    let n = poly.vertices.len();
    (0..n)
        .map(|i| recheck_segment_distance(p, poly.vertices[i], poly.vertices[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------------------
// Random blob generation for contour / simplification checks.
// ---------------------------------------------------------------------------

/// Star polygon around a center, rasterized by cell-center inclusion.
/// Returns a labeling whose first-discovered 4-connected component carries
/// label 1, or None if the raster encloses background cells (those would
/// make the outer-boundary oracle ambiguous).
fn rasterized_star_blob(seed: u64) -> Option<RegionLabeling> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = rng.gen_range(18..36) as i32;
    let (cx, cy) = (size as f64 / 2.0, size as f64 / 2.0);
    let k = rng.gen_range(5..10);
    let verts: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * (i as f64 + rng.gen_range(0.0..0.6)) / k as f64;
            let r = rng.gen_range(0.35..0.48) * size as f64;
            (cx + r * angle.cos(), cy + r * angle.sin())
        })
        .collect();

    let inside = |x: i32, y: i32| -> bool {
        // Crossing-number test against cell centers.
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        let mut crossings = 0;
        for i in 0..verts.len() {
            let (x0, y0) = verts[i];
            let (x1, y1) = verts[(i + 1) % verts.len()];
            if (y0 > py) != (y1 > py) {
                let t = (py - y0) / (y1 - y0);
                if px < x0 + t * (x1 - x0) {
                    crossings += 1;
                }
            }
        }
        crossings % 2 == 1
    };

    let mut alt = AltitudeMap::new(size as usize, size as usize);
    for y in 0..size {
        for x in 0..size {
            if inside(x, y) {
                alt.set(x as usize, y as usize, 0);
            }
        }
    }
    let labels = connected_regions(&alt, 0);
    if labels.region_count() == 0 {
        return None;
    }
    // Reject rasters with enclosed background: flood the complement of label 1
    // from the border; anything unreached is a hole.
    let w = labels.width();
    let h = labels.height();
    let mut seen = vec![false; w * h];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for x in 0..w {
        for &y in &[0, h - 1] {
            if labels.label(x, y) != 1 && !seen[y * w + x] {
                seen[y * w + x] = true;
                stack.push((x, y));
            }
        }
    }
    for y in 0..h {
        for &x in &[0, w - 1] {
            if labels.label(x, y) != 1 && !seen[y * w + x] {
                seen[y * w + x] = true;
                stack.push((x, y));
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        for (nx, ny) in [(x.wrapping_sub(1), y), (x + 1, y), (x, y.wrapping_sub(1)), (x, y + 1)] {
            if nx < w && ny < h && labels.label(nx, ny) != 1 && !seen[ny * w + nx] {
                seen[ny * w + nx] = true;
                stack.push((nx, ny));
            }
        }
    }
    for y in 0..h {
        for x in 0..w {
            if labels.label(x, y) != 1 && !seen[y * w + x] {
                return None; // hole, or a second component: skip this seed
            }
        }
    }
    Some(labels)
}

// ---------------------------------------------------------------------------
// Erosion.
// ---------------------------------------------------------------------------

#[test]
fn erode_full_mask_rect_footprint() {
    let mask = BinaryGrid::filled(10, 10);
    let mut fp = BinaryGrid::new(2, 3);
    for y in 0..3 {
        for x in 0..2 {
            fp.set(x, y, true);
        }
    }
    let out = erode_feasible(&mask, &fp).unwrap();
    for y in 0..10 {
        for x in 0..10 {
            assert_eq!(out.get(x, y), x <= 8 && y <= 7, "anchor ({x}, {y})");
        }
    }
}

#[test]
fn erode_single_false_cell_blocks_four_anchors() {
    let mut mask = BinaryGrid::filled(10, 10);
    mask.set(4, 4, false);
    let mut fp = BinaryGrid::new(2, 2);
    for y in 0..2 {
        for x in 0..2 {
            fp.set(x, y, true);
        }
    }
    let out = erode_feasible(&mask, &fp).unwrap();
    let mut blocked = Vec::new();
    for y in 0..9 {
        for x in 0..9 {
            if !out.get(x, y) {
                blocked.push((x, y));
            }
        }
    }
    assert_eq!(blocked, vec![(3, 3), (4, 3), (3, 4), (4, 4)]);
}

#[test]
fn erode_empty_footprint_rejected() {
    let mask = BinaryGrid::filled(4, 4);
    let fp = BinaryGrid::new(2, 2);
    assert_eq!(erode_feasible(&mask, &fp), Err(GridError::EmptyFootprint));
}

#[test]
fn erode_oversized_footprint_yields_empty_grid() {
    let mask = BinaryGrid::filled(3, 3);
    let mut fp = BinaryGrid::new(5, 5);
    for y in 0..5 {
        for x in 0..5 {
            fp.set(x, y, true);
        }
    }
    let out = erode_feasible(&mask, &fp).unwrap();
    assert_eq!(out.count_true(), 0);
}

#[test]
fn erode_footprint_offset_inside_its_grid_uses_aabb_corner() {
    // Same footprint shape, embedded with margins: results must agree.
    let mut mask = BinaryGrid::filled(8, 8);
    mask.set(2, 5, false);
    let mut tight = BinaryGrid::new(2, 1);
    tight.set(0, 0, true);
    tight.set(1, 0, true);
    let mut padded = BinaryGrid::new(6, 4);
    padded.set(3, 2, true);
    padded.set(4, 2, true);
    assert_eq!(erode_feasible(&mask, &tight), erode_feasible(&mask, &padded));
}

#[test]
fn erode_matches_subset_oracle_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0e0d);
    for case in 0..60 {
        let (mw, mh) = (rng.gen_range(1..20), rng.gen_range(1..20));
        let mut mask = BinaryGrid::new(mw, mh);
        for y in 0..mh {
            for x in 0..mw {
                mask.set(x, y, rng.gen_bool(0.8));
            }
        }
        let (fw, fh) = (rng.gen_range(1..5), rng.gen_range(1..5));
        let mut fp = BinaryGrid::new(fw, fh);
        for y in 0..fh {
            for x in 0..fw {
                fp.set(x, y, rng.gen_bool(0.6));
            }
        }
        if fp.count_true() == 0 {
            fp.set(rng.gen_range(0..fw), rng.gen_range(0..fh), true);
        }
        assert_eq!(
            erode_feasible(&mask, &fp).unwrap(),
            erode_by_subset_test(&mask, &fp),
            "case {case}"
        );
    }
}

// ---------------------------------------------------------------------------
// Region growing.
// ---------------------------------------------------------------------------

fn alt_from_rows(rows: &[&str]) -> AltitudeMap {
    // digits are altitudes, '.' is infeasible
    let h = rows.len();
    let w = rows[0].len();
    let mut alt = AltitudeMap::new(w, h);
    for (y, row) in rows.iter().enumerate() {
        for (x, ch) in row.bytes().enumerate() {
            if ch != b'.' {
                alt.set(x, y, (ch - b'0') as u32);
            }
        }
    }
    alt
}

#[test]
fn regions_uniform_map_is_one_region() {
    let alt = alt_from_rows(&["000", "000", "000"]);
    let labels = connected_regions(&alt, 1);
    assert_eq!(labels.region_count(), 1);
    assert!((0..3).all(|y| (0..3).all(|x| labels.label(x, y) == 1)));
}

#[test]
fn regions_split_at_cliffs_taller_than_delta_z() {
    let alt = alt_from_rows(&["00033", "00033", "00033"]);
    let labels = connected_regions(&alt, 1);
    assert_eq!(labels.region_count(), 2);
    assert_eq!(labels.label(0, 0), 1);
    assert_eq!(labels.label(4, 2), 2);
    // Δz = 3 merges them again.
    assert_eq!(connected_regions(&alt, 3).region_count(), 1);
}

#[test]
fn regions_leave_infeasible_unlabeled_and_number_in_raster_order() {
    let alt = alt_from_rows(&["0.5", "0.5", "..5"]);
    let labels = connected_regions(&alt, 1);
    assert_eq!(labels.region_count(), 2);
    assert_eq!(labels.label(0, 0), 1, "first region discovered at (0,0)");
    assert_eq!(labels.label(2, 0), 2);
    assert_eq!(labels.label(1, 0), 0);
    assert_eq!(labels.label(0, 2), 0);
}

#[test]
fn regions_chain_gradients_within_delta_z_per_step() {
    // 0,1,2,3 staircase: adjacent steps differ by 1, total range is 3.
    let alt = alt_from_rows(&["0123"]);
    assert_eq!(connected_regions(&alt, 1).region_count(), 1);
    assert_eq!(connected_regions(&alt, 0).region_count(), 4);
}

// ---------------------------------------------------------------------------
// Contour tracing.
// ---------------------------------------------------------------------------

fn labels_from_mask_rows(rows: &[&str]) -> RegionLabeling {
    let h = rows.len();
    let w = rows[0].len();
    let mut alt = AltitudeMap::new(w, h);
    for (y, row) in rows.iter().enumerate() {
        for (x, ch) in row.bytes().enumerate() {
            if ch == b'#' {
                alt.set(x, y, 0);
            }
        }
    }
    connected_regions(&alt, 0)
}

#[test]
fn contour_single_cell() {
    let labels = labels_from_mask_rows(&["...", ".#.", "..."]);
    assert_eq!(trace_contour(&labels, 1).unwrap(), vec![(1, 1)]);
}

#[test]
fn contour_full_block_is_ccw_border_from_first_raster_cell() {
    let labels = labels_from_mask_rows(&["###", "###", "###"]);
    assert_eq!(
        trace_contour(&labels, 1).unwrap(),
        vec![(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)]
    );
}

#[test]
fn contour_thin_strip_walks_out_and_back() {
    let labels = labels_from_mask_rows(&["###"]);
    assert_eq!(trace_contour(&labels, 1).unwrap(), vec![(0, 0), (1, 0), (2, 0), (1, 0)]);
}

#[test]
fn contour_unknown_label_rejected() {
    let labels = labels_from_mask_rows(&["#"]);
    assert_eq!(trace_contour(&labels, 2), Err(GridError::UnknownLabel(2)));
    assert_eq!(trace_contour(&labels, 0), Err(GridError::UnknownLabel(0)));
}

#[test]
fn contour_set_matches_boundary_scan_on_random_blobs() {
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 25 {
        seed += 1;
        assert!(seed < 400, "blob generator starved");
        let Some(labels) = rasterized_star_blob(seed) else {
            continue;
        };
        let contour = trace_contour(&labels, 1).unwrap();
        let traced: std::collections::BTreeSet<(i32, i32)> = contour.iter().copied().collect();
        let scanned = boundary_cells_by_scan(&labels, 1);
        assert_eq!(traced, scanned, "seed {seed}");
        // No consecutive duplicates, start cell is the raster-first cell.
        for w in contour.windows(2) {
            assert_ne!(w[0], w[1]);
        }
        assert_eq!(contour[0], *scanned.iter().min_by_key(|&&(x, y)| (y, x)).unwrap());
        checked += 1;
    }
}

// ---------------------------------------------------------------------------
// Simplification.
// ---------------------------------------------------------------------------

#[test]
fn rdp_rectangle_collapses_to_four_corners() {
    let labels = labels_from_mask_rows(&["######", "######", "######", "######"]);
    let contour = trace_contour(&labels, 1).unwrap();
    let poly = simplify_rdp(&contour, 1.0).unwrap();
    assert_eq!(poly.vertices, vec![(0, 0), (5, 0), (5, 3), (0, 3)]);
}

#[test]
fn rdp_short_contours_rejected() {
    assert_eq!(simplify_rdp(&[(0, 0)], 1.0), Err(GridError::DegenerateContour));
    assert_eq!(simplify_rdp(&[(0, 0), (1, 0)], 1.0), Err(GridError::DegenerateContour));
}

#[test]
fn rdp_collinear_strip_rejected() {
    let labels = labels_from_mask_rows(&["####"]);
    let contour = trace_contour(&labels, 1).unwrap();
    assert_eq!(simplify_rdp(&contour, 1.0), Err(GridError::DegeneratePolygon));
}

#[test]
fn rdp_notched_rectangle_keeps_the_notch_with_small_epsilon() {
    let labels = labels_from_mask_rows(&[
        "#########",
        "#########",
        "####.####",
        "####.####",
    ]);
    let contour = trace_contour(&labels, 1).unwrap();
    let poly = simplify_rdp(&contour, 0.5).unwrap();
    // The notch corners survive; every contour cell is within ε of the result.
    assert!(poly.vertices.len() > 4);
    for &c in &contour {
        assert!(polyline_distance(c, &poly) <= 0.5 + 1e-9, "cell {c:?}");
    }
}

#[test]
fn rdp_invariants_on_random_blobs() {
    let mut checked = 0;
    let mut seed = 1000u64;
    while checked < 25 {
        seed += 1;
        assert!(seed < 1400, "blob generator starved");
        let Some(labels) = rasterized_star_blob(seed) else {
            continue;
        };
        let contour = trace_contour(&labels, 1).unwrap();
        let eps = 1.0;
        let Ok(poly) = simplify_rdp(&contour, eps) else {
            continue; // degenerate blobs fall back in candidate generation
        };
        assert!(poly.signed_area_doubled() > 0, "CCW, seed {seed}");
        let contour_set: std::collections::BTreeSet<_> = contour.iter().copied().collect();
        for v in &poly.vertices {
            assert!(contour_set.contains(v), "vertex {v:?} not a contour cell, seed {seed}");
        }
        for &c in &contour {
            let d = polyline_distance(c, &poly);
            assert!(d <= eps + 1e-9, "dropped cell {c:?} at distance {d}, seed {seed}");
        }
        checked += 1;
    }
}

// ---------------------------------------------------------------------------
// Vertex analysis.
// ---------------------------------------------------------------------------

#[test]
fn vertices_of_square_are_right_angled_and_convex() {
    let poly = Polygon { vertices: vec![(0, 0), (4, 0), (4, 4), (0, 4)] };
    let analysis = analyze_vertices(&poly).unwrap();
    for v in &analysis {
        assert!((v.interior_angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((v.tightness - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(v.convex);
    }
}

#[test]
fn vertices_of_l_hexagon_include_one_reflex() {
    let poly = Polygon { vertices: vec![(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)] };
    let analysis = analyze_vertices(&poly).unwrap();
    let reflex: Vec<_> = analysis.iter().filter(|v| !v.convex).collect();
    assert_eq!(reflex.len(), 1);
    assert_eq!(reflex[0].index, 3);
    assert!((reflex[0].interior_angle - 3.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert_eq!(reflex[0].tightness, 0.0);
    let convex_count = analysis.iter().filter(|v| v.convex).count();
    assert_eq!(convex_count, 5);
}

#[test]
fn vertices_turning_angles_sum_to_full_circle() {
    let mut checked = 0;
    let mut seed = 2000u64;
    while checked < 15 {
        seed += 1;
        assert!(seed < 2400, "blob generator starved");
        let Some(labels) = rasterized_star_blob(seed) else {
            continue;
        };
        let contour = trace_contour(&labels, 1).unwrap();
        let Ok(poly) = simplify_rdp(&contour, 1.0) else {
            continue;
        };
        let analysis = analyze_vertices(&poly).unwrap();
        let turn_sum: f64 = analysis.iter().map(|v| std::f64::consts::PI - v.interior_angle).sum();
        assert!(
            (turn_sum - 2.0 * std::f64::consts::PI).abs() < 1e-9,
            "turn sum {turn_sum}, seed {seed}"
        );
        checked += 1;
    }
}

#[test]
fn vertices_degenerate_polygon_rejected() {
    let poly = Polygon { vertices: vec![(0, 0), (1, 0)] };
    assert!(analyze_vertices(&poly).is_err());
}

// ---------------------------------------------------------------------------
// Tightness oracle.
// ---------------------------------------------------------------------------

fn square_region(n: usize) -> BinaryGrid {
    BinaryGrid::filled(n, n)
}

#[test]
fn tightness_square_corner_is_a_quarter_turn() {
    let region = square_region(12);
    let tau = tightness_oracle(&region, (0, 0), 5.0, 360).unwrap();
    let quantum = 2.0 * std::f64::consts::PI / 360.0;
    assert!(
        (tau - std::f64::consts::FRAC_PI_2).abs() <= 2.0 * quantum,
        "corner tightness {tau}"
    );
}

#[test]
fn tightness_edge_and_interior_are_near_zero() {
    let region = square_region(12);
    let quantum = 2.0 * std::f64::consts::PI / 360.0;
    let edge = tightness_oracle(&region, (6, 0), 5.0, 360).unwrap();
    assert!(edge <= 3.0 * quantum, "edge tightness {edge}");
    let interior = tightness_oracle(&region, (6, 6), 5.0, 360).unwrap();
    assert_eq!(interior, 0.0);
}

#[test]
fn tightness_reflex_corner_is_zero() {
    // L region: reflex corner at (4,4) seen from the region side.
    let mut region = BinaryGrid::new(12, 12);
    for y in 0..12 {
        for x in 0..12 {
            if x < 4 || y < 4 {
                region.set(x, y, true);
            }
        }
    }
    let tau = tightness_oracle(&region, (3, 3), 5.0, 360).unwrap();
    assert_eq!(tau, 0.0);
}

#[test]
fn tightness_rejects_bad_inputs() {
    let region = square_region(8);
    assert!(matches!(
        tightness_oracle(&region, (20, 0), 5.0, 360),
        Err(GridError::OutsideRegion(20, 0))
    ));
    assert!(tightness_oracle(&region, (0, 0), 1.0, 360).is_err());
    assert!(tightness_oracle(&region, (0, 0), 5.0, 10).is_err());
}

#[test]
fn tightness_matches_interior_angle_on_lattice_wedges() {
    // 45° wedge: region below the diagonal of a square. The corner at the
    // right angle spans π/2; the 45° tips span 3π/4.
    let n = 17usize;
    let mut region = BinaryGrid::new(n, n);
    for y in 0..n {
        for x in 0..=y {
            region.set(x, y, true);
        }
    }
    let right_angle = tightness_oracle(&region, (0, n as i32 - 1), 6.0, 360).unwrap();
    assert!(
        (right_angle - std::f64::consts::FRAC_PI_2).abs() <= 0.05,
        "right angle {right_angle}"
    );
    let tip = tightness_oracle(&region, (0, 0), 6.0, 360).unwrap();
    assert!(
        (tip - 3.0 * std::f64::consts::FRAC_PI_4).abs() <= 0.05,
        "45° tip {tip}"
    );
}
