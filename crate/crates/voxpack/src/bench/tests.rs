use super::*;
use crate::buffered::{run_buffered_episode, BufferedEnv};
use crate::learner::CurvePoint;
use crate::policies::run_episode;
use crate::shapelib::{gen_polycubes, DEFAULT_DEDUP_C};
use crate::testutil::{block, dataset, problem};

fn polycubes() -> Dataset {
    Dataset::new(gen_polycubes(), DEFAULT_DEDUP_C).unwrap()
}

fn experiment<'a>(ds: &'a Dataset, method: Method, seeds: Vec<u64>) -> Experiment<'a> {
    Experiment {
        method,
        dataset: ds,
        dataset_label: "polycubes".to_owned(),
        container: (6, 6, 6),
        dh_cm: 6.0,
        buffer_k: 1,
        cand: CandConfig::default(),
        seeds,
    }
}

#[test]
fn gap_measures_relative_shortfall() {
    assert!((gap(0.710, 0.619).unwrap() - 0.128).abs() < 0.0005);
    assert!((gap(0.445, 0.358).unwrap() - 0.196).abs() < 0.0005);
    assert_eq!(gap(0.5, 0.5).unwrap(), 0.0);
    assert!(matches!(gap(0.0, 0.3), Err(BenchError::BadReference(_))));
    assert!(matches!(gap(-1.0, 0.3), Err(BenchError::BadReference(_))));
}

#[test]
fn product_utility_counts_bounding_boxes() {
    let ds = dataset(vec![block("c2", 6.0, (2, 2, 2))]);
    let mut env = PackEnv::new(&ds, &problem((10, 10, 10), 6.0, &[("c2", 0, 0)])).unwrap();
    assert_eq!(product_utility(&env), 0.0);
    env.place(0, 0, 0).unwrap();
    assert_eq!(product_utility(&env), 8.0 / 1000.0);

    // A concave shape fills its box only partially: 3 cells, box 2×2×1.
    let ds = polycubes();
    let mut env = PackEnv::new(&ds, &problem((10, 10, 10), 6.0, &[("ell-3", 0, 0)])).unwrap();
    env.place(0, 0, 0).unwrap();
    assert_eq!(product_utility(&env), 4.0 / 1000.0);
    assert!(product_utility(&env) >= env.utility());
}

#[test]
fn reports_are_deterministic_and_self_consistent() {
    let ds = polycubes();
    let exp = experiment(&ds, Method::Heuristic(Heuristic::RandomGrid), (0..8).collect());
    let a = run_experiment(&exp).unwrap();
    let b = run_experiment(&exp).unwrap();

    assert_eq!(a.episodes.len(), 8);
    let det = |r: &RunReport| {
        r.episodes
            .iter()
            .map(|e| (e.seed, e.utility.to_bits(), e.count, e.product_utility.to_bits()))
            .collect::<Vec<_>>()
    };
    assert_eq!(det(&a), det(&b));
    assert_eq!(a.mean_utility.to_bits(), b.mean_utility.to_bits());

    // Aggregates match a direct recomputation from the rows.
    let n = a.episodes.len() as f64;
    let mean = a.episodes.iter().map(|e| e.utility).sum::<f64>() / n;
    let var = a.episodes.iter().map(|e| (e.utility - mean).powi(2)).sum::<f64>() / n;
    assert!((a.mean_utility - mean).abs() < 1e-12);
    assert!((a.utility_variance - var).abs() < 1e-12);
    assert!(a.utility_variance >= 0.0);
    let count = a.episodes.iter().map(|e| e.count as f64).sum::<f64>() / n;
    assert!((a.mean_count - count).abs() < 1e-12);

    // Rows come back in seed order even though episodes run in parallel.
    let seeds: Vec<u64> = a.episodes.iter().map(|e| e.seed).collect();
    assert_eq!(seeds, (0..8).collect::<Vec<_>>());

    // Every decision costs time, and each episode ends with the decision
    // that failed (or the last placement consuming the stream).
    for e in &a.episodes {
        assert!(e.decisions >= e.count);
        assert!(e.seconds >= 0.0);
    }
}

#[test]
fn constant_outcomes_have_zero_variance() {
    // Unit cubes in a 2×2×2 container: every seed fills all 8 cells.
    let ds = dataset(vec![block("c1", 6.0, (1, 1, 1))]);
    let mut exp = experiment(&ds, Method::Heuristic(Heuristic::FirstFit), (0..5).collect());
    exp.container = (2, 2, 2);
    let report = run_experiment(&exp).unwrap();
    assert_eq!(report.mean_utility, 1.0);
    assert_eq!(report.utility_variance, 0.0);
    assert_eq!(report.mean_count, 8.0);
}

#[test]
fn the_bench_roll_matches_the_canonical_loops() {
    let ds = polycubes();
    let cfg = CandConfig::default();
    for seed in [3u64, 19, 40] {
        let seq = emit_problem(&ds, (8, 8, 8), 6.0, seed).unwrap();

        // Plain mode against policies::run_episode.
        let mut bench_env = PackEnv::new(&ds, &seq).unwrap();
        let method = Method::Heuristic(Heuristic::RandomGrid);
        let mut policy = method.policy(&cfg, seed);
        roll(&mut bench_env, 1, &method.ordering(&cfg), policy.as_mut());

        let mut plain_env = PackEnv::new(&ds, &seq).unwrap();
        let mut plain_policy = method.policy(&cfg, seed);
        run_episode(&mut plain_env, plain_policy.as_mut());
        assert_eq!(bench_env.records(), plain_env.records());
        assert_eq!(bench_env.heightmap(), plain_env.heightmap());

        // Buffered mode against BufferedEnv.
        let mut bench_env = PackEnv::new(&ds, &seq).unwrap();
        let mut policy = method.policy(&cfg, seed);
        let order = method.ordering(&cfg);
        roll(&mut bench_env, 4, &order, policy.as_mut());

        let mut pack = BufferedEnv::new(PackEnv::new(&ds, &seq).unwrap(), 4);
        let mut policy = method.policy(&cfg, seed);
        run_buffered_episode(&mut pack, &order, policy.as_mut());
        assert_eq!(bench_env.records(), pack.env().records());
        assert_eq!(bench_env.heightmap(), pack.env().heightmap());
    }
}

#[test]
fn csv_bytes_are_stable_and_timing_free() {
    let ds = polycubes();
    let exp = experiment(&ds, Method::Heuristic(Heuristic::Blbf), (0..4).collect());
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.csv");
    let p2 = dir.path().join("b.csv");
    write_episode_csv(&run_experiment(&exp).unwrap(), &p1).unwrap();
    write_episode_csv(&run_experiment(&exp).unwrap(), &p2).unwrap();
    let bytes = std::fs::read(&p1).unwrap();
    assert_eq!(bytes, std::fs::read(&p2).unwrap());

    let text = String::from_utf8(bytes).unwrap();
    assert!(text.starts_with("seed,utility,count,product_utility\n"));
    assert_eq!(text.lines().count(), 5);
    assert!(!text.contains("seconds"));
}

#[test]
fn json_report_round_trips() {
    let ds = polycubes();
    let exp = experiment(&ds, Method::Heuristic(Heuristic::FirstFit), vec![0, 1]);
    let report = run_experiment(&exp).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    write_report_json(&report, &path).unwrap();
    let back = read_report_json(&path).unwrap();
    assert_eq!(back.episodes, report.episodes);
    assert_eq!(back.mean_utility.to_bits(), report.mean_utility.to_bits());
    assert_eq!(back.method, report.method);
}

#[test]
fn comparison_marks_the_best_method_as_the_reference() {
    let ds = polycubes();
    let mk = |method: &str, mean: f64| RunReport {
        method: method.to_owned(),
        dataset: "x".to_owned(),
        container: (6, 6, 6),
        dh_cm: 6.0,
        buffer_k: 1,
        episodes: Vec::new(),
        mean_utility: mean,
        utility_variance: 0.0,
        mean_count: 0.0,
        mean_seconds_per_decision: 0.0,
    };
    let _ = &ds;
    let rows = compare(&[mk("ff", 0.619), mk("hm", 0.445), mk("blbf", 0.710)]).unwrap();
    let zero_gaps = rows.iter().filter(|r| r.gap == 0.0).count();
    assert_eq!(zero_gaps, 1);
    assert_eq!(rows[2].gap, 0.0);
    assert!((rows[0].gap - 0.128).abs() < 0.0005);
    assert!(rows.iter().all(|r| r.gap >= 0.0));
    assert!(matches!(compare(&[]), Err(BenchError::NothingToCompare)));
}

#[test]
fn curve_csv_lists_checkpoints_in_order() {
    let curve = vec![
        CurvePoint { frame: 100, loss: 0.5, eval_utility: 0.25 },
        CurvePoint { frame: 200, loss: 0.25, eval_utility: 0.5 },
    ];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    write_curve_csv(&curve, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "frame,loss,eval_utility\n100,0.5,0.25\n200,0.25,0.5\n");
}

#[test]
fn trace_lines_replay_the_episode() {
    let ds = polycubes();
    let mut env =
        PackEnv::new(&ds, &problem((4, 4, 4), 6.0, &[("cube-1", 0, 0), ("domino-2", 0, 0)]))
            .unwrap();
    env.place(0, 0, 0).unwrap();
    env.place(1, 2, 1).unwrap();
    let text = crate::packenv::trace_lines(env.records());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[0],
        r#"{"step":0,"shape":"cube-1","spin":0,"lx":0,"ly":0,"lz":0,"reward":0.015625,"utility":0.015625}"#
    );
    let v: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
    assert_eq!(v["shape"], "domino-2");
    assert_eq!(v["spin"], 1);
    assert_eq!(v["lx"], 2);
    assert_eq!(v["ly"], 1);
}

#[test]
fn trace_episode_replays_what_the_experiment_measured() {
    let ds = polycubes();
    let exp = experiment(&ds, Method::Heuristic(Heuristic::Blbf), vec![21]);
    let report = run_experiment(&exp).unwrap();
    let text = trace_episode(&exp, 21).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), report.episodes[0].count);
    let last: serde_json::Value = serde_json::from_str(lines.last().unwrap()).unwrap();
    assert_eq!(last["utility"].as_f64().unwrap(), report.episodes[0].utility);
}
