//! Command-line front end for the packing engine: shape-set generation,
//! problem emission, policy rollouts, ranker training, and report tooling.
//!
//! Every long flag can also be supplied from a TOML file via `--config`;
//! explicit flags override file values, which override built-in defaults.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use voxpack::bench::{
    compare, read_report_json, run_experiment, trace_episode, write_compare_csv, write_curve_csv,
    write_episode_csv, write_report_json, CompareRow, Experiment, Method, RunReport,
};
use voxpack::candgen::CandConfig;
use voxpack::learner::{load_model, save_model, train, LearnError, TrainConfig};
use voxpack::shapelib::{
    dedup_poses, emit_problem, gen_polycubes, load_manifest, load_shape, rotate24, save_shape,
    stable_poses, Dataset, DEFAULT_DEDUP_C,
};

/// Deterministic desk-scale engine for online packing of irregular
/// voxelized 3D shapes.
#[derive(Parser)]
#[command(name = "voxpack", version, about)]
struct Cli {
    /// TOML file supplying defaults for any long flag; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the built-in polycube shape set and a manifest listing it.
    GenShapes(GenShapesArgs),
    /// List a shape's stable poses after footprint deduplication.
    Poses(PosesArgs),
    /// Emit problem sequences as JSON, one file per seed.
    Emit(EmitArgs),
    /// Pack problem sequences with one policy and write a report.
    Run(RunArgs),
    /// Train the candidate ranker and save the model.
    Train(TrainArgs),
    /// Benchmark a trained model against heuristic baselines.
    Eval(EvalArgs),
    /// Merge saved run reports into one comparison table.
    Report(ReportArgs),
}

/// Container geometry and shape source, shared by every packing command.
#[derive(Args, Clone)]
struct SceneArgs {
    /// Container size in heightmap cells, as X,Y,Z.
    #[arg(long, value_name = "X,Y,Z")]
    container: Option<String>,
    /// Heightmap cell size in centimeters.
    #[arg(long, value_name = "CM")]
    dh: Option<f64>,
    /// Pose deduplication threshold, as a fraction of footprint cells.
    #[arg(long, value_name = "FRAC")]
    dg: Option<f64>,
    /// Shape manifest file; omit to use the built-in polycubes.
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,
}

/// Candidate-generation knobs shared by the decision-making commands.
#[derive(Args, Clone)]
struct CandArgs {
    /// Altitude tolerance in cells when growing candidate regions.
    #[arg(long, value_name = "CELLS")]
    dz: Option<u32>,
    /// Maximum candidates kept per decision.
    #[arg(long = "N", value_name = "COUNT")]
    n: Option<usize>,
}

#[derive(Args)]
struct GenShapesArgs {
    /// Directory for the shape files and manifest.json.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PosesArgs {
    /// Shape file to analyze.
    #[arg(long, value_name = "FILE")]
    shape: PathBuf,
    /// Pose deduplication threshold, as a fraction of footprint cells.
    #[arg(long, value_name = "FRAC")]
    dg: Option<f64>,
}

#[derive(Args)]
struct EmitArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// First problem seed.
    #[arg(long, value_name = "SEED")]
    seeds: Option<u64>,
    /// Number of consecutive seeds to emit.
    #[arg(long, value_name = "COUNT")]
    episodes: Option<usize>,
    /// Directory for the problem files.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scene: SceneArgs,
    #[command(flatten)]
    cand: CandArgs,
    /// Policy: ff, blbf, mtpe, hm, random, random-pi, or learned.
    #[arg(long, value_name = "NAME")]
    policy: Option<String>,
    /// Trained model file (required when --policy learned).
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Lookahead buffer slots; 1 is plain online packing.
    #[arg(long, value_name = "K")]
    buffer: Option<usize>,
    /// First problem seed.
    #[arg(long, value_name = "SEED")]
    seeds: Option<u64>,
    /// Number of consecutive seeds to pack.
    #[arg(long, value_name = "COUNT")]
    episodes: Option<usize>,
    /// Output prefix; writes <out>.csv and <out>.json.
    #[arg(long, value_name = "PREFIX")]
    out: Option<PathBuf>,
    /// Also write the first seed's placement trace as JSON lines.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    scene: SceneArgs,
    #[command(flatten)]
    cand: CandArgs,
    /// Environment decisions to train for.
    #[arg(long, value_name = "COUNT")]
    frames: Option<usize>,
    /// Training seed.
    #[arg(long, value_name = "SEED")]
    seeds: Option<u64>,
    /// Single-thread deterministic mode instead of async actors.
    #[arg(long, value_name = "BOOL", num_args = 0..=1, default_missing_value = "true")]
    interleaved: Option<bool>,
    /// Actor threads in asynchronous mode.
    #[arg(long, value_name = "COUNT")]
    workers: Option<usize>,
    /// Environment decisions per gradient update.
    #[arg(long, value_name = "COUNT")]
    update_every: Option<usize>,
    /// Minibatch size.
    #[arg(long, value_name = "COUNT")]
    batch: Option<usize>,
    /// Learning rate.
    #[arg(long, value_name = "RATE")]
    lr: Option<f64>,
    /// Reward discount.
    #[arg(long, value_name = "GAMMA")]
    gamma: Option<f64>,
    /// Frames between evaluation checkpoints.
    #[arg(long, value_name = "COUNT")]
    checkpoint_every: Option<usize>,
    /// Model output file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Also write the training curve as CSV.
    #[arg(long, value_name = "FILE")]
    curve: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    scene: SceneArgs,
    #[command(flatten)]
    cand: CandArgs,
    /// Trained model file to evaluate.
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Comma-separated heuristics to compare against.
    #[arg(long, value_name = "LIST")]
    baselines: Option<String>,
    /// Lookahead buffer slots; 1 is plain online packing.
    #[arg(long, value_name = "K")]
    buffer: Option<usize>,
    /// First problem seed.
    #[arg(long, value_name = "SEED")]
    seeds: Option<u64>,
    /// Number of consecutive seeds per method.
    #[arg(long, value_name = "COUNT")]
    episodes: Option<usize>,
    /// Output prefix; writes <out>-<method>.json and <out>-compare.csv.
    #[arg(long, value_name = "PREFIX")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Saved run-report JSON files to compare.
    #[arg(required = true, value_name = "FILE")]
    inputs: Vec<PathBuf>,
    /// Comparison CSV output file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// Config-file image of the long flags. Keys are the flag names; any subset
/// may be present, and unknown keys are rejected so typos surface.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileCfg {
    container: Option<String>,
    dh: Option<f64>,
    dg: Option<f64>,
    manifest: Option<PathBuf>,
    dz: Option<u32>,
    #[serde(rename = "N")]
    n: Option<usize>,
    policy: Option<String>,
    model: Option<PathBuf>,
    buffer: Option<usize>,
    seeds: Option<u64>,
    episodes: Option<usize>,
    out: Option<PathBuf>,
    trace: Option<PathBuf>,
    frames: Option<usize>,
    interleaved: Option<bool>,
    workers: Option<usize>,
    update_every: Option<usize>,
    batch: Option<usize>,
    lr: Option<f64>,
    gamma: Option<f64>,
    checkpoint_every: Option<usize>,
    curve: Option<PathBuf>,
    baselines: Option<String>,
}

fn file_cfg(path: &Option<PathBuf>) -> Result<FileCfg> {
    let Some(path) = path else {
        return Ok(FileCfg::default());
    };
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// Flag beats file beats default.
fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>, default: T) -> T {
    flag.clone().or_else(|| file.clone()).unwrap_or(default)
}

fn pick_opt<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}

fn parse_container(text: &str) -> Result<(u32, u32, u32)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        bail!("container must be X,Y,Z (got {text:?})");
    }
    let mut dims = [0u32; 3];
    for (slot, part) in dims.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .with_context(|| format!("bad container dimension {part:?}"))?;
        if *slot == 0 {
            bail!("container dimensions must be positive (got {text:?})");
        }
    }
    Ok((dims[0], dims[1], dims[2]))
}

/// A resolved container plus the prepared shape set to pack into it.
struct Scene {
    container: (u32, u32, u32),
    dh_cm: f64,
    dataset: Dataset,
    label: String,
}

fn scene(args: &SceneArgs, cfg: &FileCfg) -> Result<Scene> {
    let container =
        parse_container(&pick(&args.container, &cfg.container, "16,16,15".to_owned()))?;
    let dh_cm = pick(&args.dh, &cfg.dh, 6.0);
    let dg = pick(&args.dg, &cfg.dg, DEFAULT_DEDUP_C);
    let (shapes, label) = match pick_opt(&args.manifest, &cfg.manifest) {
        Some(path) => {
            let shapes = load_manifest(&path)
                .with_context(|| format!("loading manifest {}", path.display()))?;
            (shapes, path.display().to_string())
        }
        None => (gen_polycubes(), "polycubes".to_owned()),
    };
    let dataset = Dataset::new(shapes, dg).context("preparing shape set")?;
    Ok(Scene {
        container,
        dh_cm,
        dataset,
        label,
    })
}

fn cand_config(args: &CandArgs, cfg: &FileCfg) -> CandConfig {
    let mut cand = CandConfig::default();
    cand.delta_z = pick(&args.dz, &cfg.dz, cand.delta_z);
    cand.max_candidates = pick(&args.n, &cfg.n, cand.max_candidates);
    cand
}

fn method(policy: &str, model: Option<PathBuf>) -> Result<Method> {
    if policy == "learned" {
        let path = model.context("--policy learned needs --model FILE")?;
        let model =
            load_model(&path).with_context(|| format!("loading model {}", path.display()))?;
        return Ok(Method::Learned(model));
    }
    let heuristic = policy
        .parse()
        .map_err(|msg: String| anyhow::anyhow!("{msg} (try ff, blbf, mtpe, hm, random, random-pi, or learned)"))?;
    Ok(Method::Heuristic(heuristic))
}

fn seed_range(first: u64, count: usize) -> Vec<u64> {
    (first..first + count as u64).collect()
}

fn print_summary(report: &RunReport) {
    println!(
        "{:<10} mean utility {:.4} | variance {:.3e} | mean items {:.1} | {:.1} µs/decision",
        report.method,
        report.mean_utility,
        report.utility_variance,
        report.mean_count,
        report.mean_seconds_per_decision * 1e6,
    );
}

fn print_compare(rows: &[CompareRow]) {
    println!(
        "{:<10} {:>12} {:>8} {:>12} {:>10} {:>14}",
        "method", "mean_util", "gap", "variance", "items", "µs/decision"
    );
    for r in rows {
        println!(
            "{:<10} {:>12.4} {:>8.4} {:>12.3e} {:>10.1} {:>14.2}",
            r.method,
            r.mean_utility,
            r.gap,
            r.utility_variance,
            r.mean_count,
            r.mean_seconds_per_decision * 1e6,
        );
    }
}

fn gen_shapes(args: &GenShapesArgs, cfg: &FileCfg) -> Result<()> {
    let dir = pick(&args.out, &cfg.out, PathBuf::from("shapes"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let shapes = gen_polycubes();
    let mut names = Vec::new();
    for shape in &shapes {
        let file = format!("{}.json", shape.name);
        save_shape(shape, &dir.join(&file))?;
        names.push(file);
    }
    let manifest = serde_json::json!({ "shapes": names });
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_vec_pretty(&manifest)?,
    )?;
    println!(
        "wrote {} shapes and manifest.json to {}",
        shapes.len(),
        dir.display()
    );
    Ok(())
}

fn poses(args: &PosesArgs, cfg: &FileCfg) -> Result<()> {
    let shape = load_shape(&args.shape)
        .with_context(|| format!("loading shape {}", args.shape.display()))?;
    let dg = pick(&args.dg, &cfg.dg, DEFAULT_DEDUP_C);
    let stable = stable_poses(&shape.grid)?;
    let kept = dedup_poses(&shape.grid, &stable, dg)?;
    println!(
        "{}: {} voxels at {} cm, {} stable poses, {} kept after dedup (dg = {})",
        shape.name,
        shape.grid.volume(),
        shape.cell_cm,
        stable.len(),
        kept.len(),
        dg
    );
    for pose in &kept {
        let grid = rotate24(&shape.grid, pose.orientation)?;
        println!(
            "  orientation {:2}: {} x {} x {} cells",
            pose.orientation, grid.dims.0, grid.dims.1, grid.dims.2
        );
    }
    Ok(())
}

fn emit(args: &EmitArgs, cfg: &FileCfg) -> Result<()> {
    let sc = scene(&args.scene, cfg)?;
    let first = pick(&args.seeds, &cfg.seeds, 0);
    let count = pick(&args.episodes, &cfg.episodes, 1);
    let dir = pick(&args.out, &cfg.out, PathBuf::from("problems"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    for seed in first..first + count as u64 {
        let seq = emit_problem(&sc.dataset, sc.container, sc.dh_cm, seed)?;
        let path = dir.join(format!("problem-{seed}.json"));
        fs::write(&path, serde_json::to_vec_pretty(&seq)?)?;
        println!("{}: {} items", path.display(), seq.items.len());
    }
    Ok(())
}

fn run(args: &RunArgs, cfg: &FileCfg) -> Result<()> {
    let sc = scene(&args.scene, cfg)?;
    let policy = pick(&args.policy, &cfg.policy, "ff".to_owned());
    let first = pick(&args.seeds, &cfg.seeds, 0);
    let count = pick(&args.episodes, &cfg.episodes, 200);
    let out = pick(&args.out, &cfg.out, PathBuf::from("report"));
    let exp = Experiment {
        method: method(&policy, pick_opt(&args.model, &cfg.model))?,
        dataset: &sc.dataset,
        dataset_label: sc.label.clone(),
        container: sc.container,
        dh_cm: sc.dh_cm,
        buffer_k: pick(&args.buffer, &cfg.buffer, 1),
        cand: cand_config(&args.cand, cfg),
        seeds: seed_range(first, count),
    };
    let report = run_experiment(&exp)?;
    let csv_path = out.with_extension("csv");
    let json_path = out.with_extension("json");
    write_episode_csv(&report, &csv_path)?;
    write_report_json(&report, &json_path)?;
    print_summary(&report);
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    if let Some(trace_path) = pick_opt(&args.trace, &cfg.trace) {
        fs::write(&trace_path, trace_episode(&exp, first)?)?;
        println!("trace of seed {first} -> {}", trace_path.display());
    }
    Ok(())
}

fn train_cmd(args: &TrainArgs, cfg: &FileCfg) -> Result<()> {
    let sc = scene(&args.scene, cfg)?;
    let mut tc = TrainConfig::new(pick(&args.frames, &cfg.frames, 200_000));
    tc.seed = pick(&args.seeds, &cfg.seeds, 0);
    tc.interleaved = pick(&args.interleaved, &cfg.interleaved, false);
    tc.cand = cand_config(&args.cand, cfg);
    if let Some(workers) = pick_opt(&args.workers, &cfg.workers) {
        tc.workers = workers;
    }
    if let Some(every) = pick_opt(&args.update_every, &cfg.update_every) {
        tc.env_steps_per_update = every;
    }
    if let Some(batch) = pick_opt(&args.batch, &cfg.batch) {
        tc.batch = batch;
    }
    if let Some(lr) = pick_opt(&args.lr, &cfg.lr) {
        tc.lr = lr;
    }
    if let Some(gamma) = pick_opt(&args.gamma, &cfg.gamma) {
        tc.gamma = gamma;
    }
    if let Some(every) = pick_opt(&args.checkpoint_every, &cfg.checkpoint_every) {
        tc.checkpoint_every = every;
    }
    let out = pick(&args.out, &cfg.out, PathBuf::from("model.json"));
    let curve_path = pick_opt(&args.curve, &cfg.curve);
    match train(&sc.dataset, sc.container, sc.dh_cm, &tc) {
        Ok(result) => {
            save_model(&result.model, &out)?;
            if let Some(path) = &curve_path {
                write_curve_csv(&result.curve, path)?;
                println!("curve -> {}", path.display());
            }
            match result.curve.last() {
                Some(last) => println!(
                    "trained {} frames | final eval utility {:.4} | loss {:.4}",
                    tc.frames, last.eval_utility, last.loss
                ),
                None => println!("trained {} frames (no checkpoints reached)", tc.frames),
            }
            if result.detached_episodes > 0 {
                println!(
                    "{} episodes detached by the reaction deadline",
                    result.detached_episodes
                );
            }
            println!("model -> {}", out.display());
            Ok(())
        }
        Err(LearnError::Diverged {
            frame,
            last_good,
            curve,
        }) => {
            save_model(&last_good, &out)?;
            if let Some(path) = &curve_path {
                write_curve_csv(&curve, path)?;
            }
            bail!(
                "training diverged at frame {frame}; last good checkpoint saved to {}",
                out.display()
            );
        }
        Err(other) => Err(other.into()),
    }
}

fn eval(args: &EvalArgs, cfg: &FileCfg) -> Result<()> {
    let sc = scene(&args.scene, cfg)?;
    let model_path = pick_opt(&args.model, &cfg.model).context("eval needs --model FILE")?;
    let model =
        load_model(&model_path).with_context(|| format!("loading model {}", model_path.display()))?;
    let baselines = pick(
        &args.baselines,
        &cfg.baselines,
        "ff,blbf,mtpe,hm,random,random-pi".to_owned(),
    );
    let first = pick(&args.seeds, &cfg.seeds, 0);
    let count = pick(&args.episodes, &cfg.episodes, 200);
    let seeds = seed_range(first, count);
    let mut methods = vec![Method::Learned(model)];
    for name in baselines.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        methods.push(method(name, None)?);
    }
    let mut reports = Vec::new();
    for m in methods {
        let exp = Experiment {
            method: m,
            dataset: &sc.dataset,
            dataset_label: sc.label.clone(),
            container: sc.container,
            dh_cm: sc.dh_cm,
            buffer_k: pick(&args.buffer, &cfg.buffer, 1),
            cand: cand_config(&args.cand, cfg),
            seeds: seeds.clone(),
        };
        let report = run_experiment(&exp)?;
        print_summary(&report);
        reports.push(report);
    }
    let rows = compare(&reports)?;
    println!();
    print_compare(&rows);
    if let Some(prefix) = pick_opt(&args.out, &cfg.out) {
        for report in &reports {
            let path = PathBuf::from(format!("{}-{}.json", prefix.display(), report.method));
            write_report_json(report, &path)?;
        }
        let compare_path = PathBuf::from(format!("{}-compare.csv", prefix.display()));
        write_compare_csv(&rows, &compare_path)?;
        println!(
            "wrote {} reports and {}",
            reports.len(),
            compare_path.display()
        );
    }
    Ok(())
}

fn report_cmd(args: &ReportArgs, cfg: &FileCfg) -> Result<()> {
    let mut reports = Vec::new();
    for path in &args.inputs {
        reports.push(
            read_report_json(path).with_context(|| format!("reading {}", path.display()))?,
        );
    }
    let rows = compare(&reports)?;
    print_compare(&rows);
    if let Some(out) = pick_opt(&args.out, &cfg.out) {
        write_compare_csv(&rows, &out)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = file_cfg(&cli.config)?;
    match &cli.cmd {
        Cmd::GenShapes(args) => gen_shapes(args, &cfg),
        Cmd::Poses(args) => poses(args, &cfg),
        Cmd::Emit(args) => emit(args, &cfg),
        Cmd::Run(args) => run(args, &cfg),
        Cmd::Train(args) => train_cmd(args, &cfg),
        Cmd::Eval(args) => eval(args, &cfg),
        Cmd::Report(args) => report_cmd(args, &cfg),
    }
}
