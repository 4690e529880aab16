use std::collections::HashSet;

use super::*;
use crate::gridgeom::tightness_oracle;
use crate::packenv::PackEnv;
use crate::shapelib::{emit_problem, gen_polycubes, Dataset, DEFAULT_DEDUP_C};
use crate::testutil::{block, dataset, flat_pose, pose_orientation, problem, shape};

/// Env whose last queued item is the query; earlier items build the scene.
fn scene(
    shapes: Vec<crate::shapelib::VoxelShape>,
    container: (u32, u32, u32),
    items: &[(&str, usize, u8)],
    placements: &[(u8, usize, usize)],
) -> (Dataset, PackEnv) {
    let ds = dataset(shapes);
    let mut env = PackEnv::new(&ds, &problem(container, 1.0, items)).unwrap();
    crate::testutil::place_all(&mut env, placements);
    (ds, env)
}

fn cube() -> crate::shapelib::VoxelShape {
    shape("cube", 1.0, &[(0, 0, 0)])
}

fn cells(set: &CandidateSet) -> Vec<(usize, usize, u32)> {
    set.candidates.iter().map(|c| (c.x, c.y, c.lz)).collect()
}

const QUARTER: f64 = std::f64::consts::FRAC_PI_2;

#[test]
fn flat_floor_yields_the_four_corners() {
    let (_, env) = scene(vec![cube()], (8, 8, 8), &[("cube", 0, 0)], &[]);
    let set = generate_candidates(&env, &env.current().unwrap(), &CandConfig::default());
    assert_eq!(cells(&set), vec![(0, 0, 0), (7, 0, 0), (0, 7, 0), (7, 7, 0)]);
    assert!(set.candidates.iter().all(|c| (c.tightness - QUARTER).abs() < 1e-12));
    assert!(set.candidates.iter().all(|c| c.spin == 0));
    assert!(!set.truncated);
}

#[test]
fn lattice_shrinks_with_the_footprint() {
    let ds = dataset(vec![shape("domino", 1.0, &[(0, 0, 0), (1, 0, 0)])]);
    let flat = flat_pose(&ds, "domino");
    let orientation = pose_orientation(&ds, "domino", flat);
    let env = PackEnv::new(&ds, &problem((8, 8, 8), 1.0, &[("domino", orientation, 0)])).unwrap();
    let set = generate_candidates(&env, &env.current().unwrap(), &CandConfig::default());
    // Spin 0 anchors reach x=6; spin 1 (footprint 1x2) reaches x=7, y=6.
    let spin0_max = set.candidates.iter().filter(|c| c.spin == 0).map(|c| c.x).max();
    let spin1_max = set.candidates.iter().filter(|c| c.spin == 1).map(|c| c.x).max();
    assert_eq!(spin0_max, Some(6));
    assert_eq!(spin1_max, Some(7));
    let spins: HashSet<u8> = set.candidates.iter().map(|c| c.spin).collect();
    assert_eq!(spins, HashSet::from([0, 1]), "spins 2 and 3 repeat the same footprints");
}

#[test]
fn stride_restricts_anchors_to_the_lattice() {
    let (_, env) = scene(vec![cube()], (9, 9, 4), &[("cube", 0, 0)], &[]);
    let cfg = CandConfig { stride: 2, ..CandConfig::default() };
    let set = generate_candidates(&env, &env.current().unwrap(), &cfg);
    assert_eq!(cells(&set), vec![(0, 0, 0), (8, 0, 0), (0, 8, 0), (8, 8, 0)]);

    // A 2-wide footprint's rightmost in-bounds anchor (x=7) is off-lattice;
    // the lattice stops at x=6.
    let ds = dataset(vec![shape("domino", 1.0, &[(0, 0, 0), (1, 0, 0)])]);
    let orientation = pose_orientation(&ds, "domino", flat_pose(&ds, "domino"));
    let env = PackEnv::new(&ds, &problem((9, 9, 4), 1.0, &[("domino", orientation, 0)])).unwrap();
    let set = generate_candidates(&env, &env.current().unwrap(), &cfg);
    for c in &set.candidates {
        assert_eq!(c.x % 2, 0);
        assert_eq!(c.y % 2, 0);
        if c.spin == 0 {
            assert!(c.x <= 6);
        }
    }
}

#[test]
fn pillar_becomes_its_own_degenerate_region() {
    let (_, env) = scene(
        vec![cube()],
        (6, 6, 8),
        &[("cube", 0, 0), ("cube", 0, 0), ("cube", 0, 0)],
        &[(0, 2, 2), (0, 2, 2)],
    );
    let set = generate_candidates(&env, &env.current().unwrap(), &CandConfig::default());
    // Floor region's four corners, then the pillar top as a fallback
    // candidate of a one-cell region.
    assert_eq!(
        cells(&set),
        vec![(0, 0, 0), (5, 0, 0), (0, 5, 0), (5, 5, 0), (2, 2, 2)]
    );
    let pillar = set.candidates.last().unwrap();
    assert_eq!(pillar.tightness, 0.0);
    assert!(set.candidates[..4].iter().all(|c| (c.tightness - QUARTER).abs() < 1e-12));
}

#[test]
fn delta_z_merges_or_splits_terraces() {
    let slab = block("slab", 1.0, (3, 6, 1));
    let items = [("slab", 0, 0), ("cube", 0, 0)];
    let (_, env) = scene(vec![cube(), slab], (6, 6, 8), &items, &[(0, 3, 0)]);
    let view = env.current().unwrap();

    let merged = generate_candidates(&env, &view, &CandConfig { delta_z: 1, ..Default::default() });
    assert_eq!(cells(&merged), vec![(0, 0, 0), (0, 5, 0), (5, 0, 1), (5, 5, 1)]);

    let split = generate_candidates(&env, &view, &CandConfig::default());
    assert_eq!(
        cells(&split),
        vec![
            (0, 0, 0),
            (2, 0, 0),
            (0, 5, 0),
            (2, 5, 0),
            (3, 0, 1),
            (5, 0, 1),
            (3, 5, 1),
            (5, 5, 1)
        ]
    );
}

#[test]
fn l_shaped_free_region_keeps_convex_corners_only() {
    let tower = block("tower", 1.0, (3, 3, 3));
    let items = [("tower", 0, 0), ("cube", 0, 0)];
    let (_, env) = scene(vec![cube(), tower], (6, 6, 3), &items, &[(0, 3, 3)]);
    let set = generate_candidates(&env, &env.current().unwrap(), &CandConfig::default());
    assert_eq!(
        cells(&set),
        vec![(0, 0, 0), (5, 0, 0), (5, 2, 0), (0, 5, 0), (2, 5, 0)]
    );
    assert!(set.candidates.iter().all(|c| (c.tightness - QUARTER).abs() < 1e-12));
    // The reflex inner corner is not a candidate.
    assert!(!cells(&set).contains(&(2, 2, 0)));
}

#[test]
fn tightness_agrees_with_the_direction_oracle() {
    let tower = block("tower", 1.0, (3, 3, 3));
    let items = [("tower", 0, 0), ("cube", 0, 0)];
    let (_, env) = scene(vec![cube(), tower], (6, 6, 3), &items, &[(0, 3, 3)]);
    let view = env.current().unwrap();
    let set = generate_candidates(&env, &view, &CandConfig::default());

    // Rebuild the spin-0 altitude lattice independently and group it.
    let maps = view.maps_for(0);
    let mut alt = crate::gridgeom::AltitudeMap::new(6, 6);
    for y in 0..6 {
        for x in 0..6 {
            if let Some(lz) = env.probe(maps, x, y) {
                alt.set(x, y, lz);
            }
        }
    }
    let regions = connected_regions(&alt, 0);
    let tolerance = 6f64.to_radians();
    for c in &set.candidates {
        assert_eq!(c.spin, 0);
        let label = regions.label(c.x, c.y);
        let mask = regions.region_mask(label);
        // Radius 2 keeps the oracle local: corner tightness describes the
        // corner's own wedge, and at radius 5 the oracle would also see the
        // region's far arm three cells away.
        let oracle = tightness_oracle(&mask, (c.x as i32, c.y as i32), 2.0, 360).unwrap();
        assert!(
            (c.tightness - oracle).abs() <= tolerance,
            "candidate at ({}, {}): {} vs oracle {}",
            c.x,
            c.y,
            c.tightness,
            oracle
        );
    }
}

#[test]
fn square_footprint_collapses_all_spins() {
    let ds = dataset(gen_polycubes());
    let orientation = pose_orientation(&ds, "square-4", flat_pose(&ds, "square-4"));
    let env =
        PackEnv::new(&ds, &problem((8, 8, 8), 6.0, &[("square-4", orientation, 0)])).unwrap();
    let set = generate_candidates(&env, &env.current().unwrap(), &CandConfig::default());
    assert!(!set.is_empty());
    assert!(set.candidates.iter().all(|c| c.spin == 0));

    let orientation = pose_orientation(&ds, "ell-3", flat_pose(&ds, "ell-3"));
    let env = PackEnv::new(&ds, &problem((8, 8, 8), 6.0, &[("ell-3", orientation, 0)])).unwrap();
    let set = generate_candidates(&env, &env.current().unwrap(), &CandConfig::default());
    let spins: HashSet<u8> = set.candidates.iter().map(|c| c.spin).collect();
    assert_eq!(spins, HashSet::from([0, 1, 2, 3]), "an L repeats no footprint");
}

#[test]
fn truncation_keeps_the_sorted_prefix() {
    let (_, env) = scene(vec![cube()], (8, 8, 8), &[("cube", 0, 0)], &[]);
    let view = env.current().unwrap();
    let full = generate_candidates(&env, &view, &CandConfig::default());
    let cut = generate_candidates(
        &env,
        &view,
        &CandConfig { max_candidates: 3, ..Default::default() },
    );
    assert!(cut.truncated && !full.truncated);
    assert_eq!(cut.candidates, full.candidates[..3]);
}

#[test]
fn full_container_yields_no_candidates() {
    let mut env = {
        let ds = dataset(vec![cube()]);
        let items: Vec<_> = (0..9).map(|_| ("cube", 0, 0)).collect();
        PackEnv::new(&ds, &problem((2, 2, 2), 1.0, &items)).unwrap()
    };
    for (x, y) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        env.place(0, x, y).unwrap();
        env.place(0, x, y).unwrap();
    }
    let set = generate_candidates(&env, &env.current().unwrap(), &CandConfig::default());
    assert!(set.is_empty());
    assert!(!set.truncated);
}

#[test]
fn candidates_are_feasible_sorted_and_unique() {
    let ds = Dataset::new(gen_polycubes(), DEFAULT_DEDUP_C).unwrap();
    for (seed, stride) in [(1, 1), (2, 1), (3, 2), (4, 2)] {
        let seq = emit_problem(&ds, (10, 10, 10), 6.0, seed).unwrap();
        let mut env = PackEnv::new(&ds, &seq).unwrap();
        let cfg = CandConfig { stride, ..Default::default() };
        while let Some(view) = env.current() {
            let set = generate_candidates(&env, &view, &cfg);
            let mut keys = Vec::new();
            for c in &set.candidates {
                assert_eq!(env.probe(view.maps_for(c.spin), c.x, c.y), Some(c.lz));
                assert_eq!(c.x % stride, 0);
                assert_eq!(c.y % stride, 0);
                assert!(c.tightness >= 0.0 && c.tightness < std::f64::consts::PI);
                keys.push((c.lz, c.y, c.x, c.spin));
            }
            let mut sorted = keys.clone();
            sorted.sort();
            assert_eq!(keys, sorted);
            let unique: HashSet<_> = set.candidates.iter().map(|c| (c.spin, c.x, c.y)).collect();
            assert_eq!(unique.len(), set.len());
            match set.candidates.first() {
                Some(c) => {
                    env.place(c.spin, c.x, c.y).unwrap();
                }
                None => {
                    env.abandon();
                }
            }
        }
        assert!(env.utility() > 0.0);
    }
}
