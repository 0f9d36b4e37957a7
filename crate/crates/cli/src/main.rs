//! `pgexplore`: run exploration episodes, score serialized pose-graphs and
//! run the reference oracles.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use posegraph_explore::config::ExplorationConfig;
use posegraph_explore::control::run_episode_with;
use posegraph_explore::graph::WeightedPoseGraph;
use posegraph_explore::graph_io::{fmt_sig9, parse_graph, write_graph, write_weighted_graph};
use posegraph_explore::optimality::{dopt_graph, dopt_info, log_tree_weight};
use posegraph_explore::oracle::{run_suite, SuiteOutcome, SUITES};
use posegraph_explore::world::World;
use posegraph_explore::worlds;

const EXIT_EPOCH_CAP: u8 = 2;

#[derive(Parser)]
#[command(name = "pgexplore", version, about = "Pose-graph driven frontier exploration")]
struct Cli {
    /// Flat `key = value` configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one exploration episode and write its artifacts.
    Explore(ExploreArgs),
    /// Print the D-optimality and log tree weight of a serialized graph.
    Eval {
        /// VERTEX_SE2 / EDGE_SE2 file. Edges without a `# weight` comment are
        /// weighted by the D-optimality of their information matrix.
        graph: PathBuf,
    },
    /// Run reference oracles: trees, schur, jacobian, ranking or all.
    Oracle {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ExploreArgs {
    /// Scene file, or `builtin:<name>` for a bundled scene
    /// (single_room, two_rooms, loop).
    #[arg(long)]
    world: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parallel candidate-evaluation workers.
    #[arg(long)]
    jobs: Option<usize>,
    /// Also write every evaluated predicted graph.
    #[arg(long)]
    dump_candidates: bool,
    #[arg(long)]
    epoch_cap: Option<usize>,
    /// Override a configuration key, e.g. `--set mapping.bandwidth=1.0`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let mut config = ExplorationConfig::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        config.apply_text(&text)?;
    }
    if let Some(Command::Explore(args)) = &cli.command {
        apply_explore_flags(&mut config, args)?;
    }
    config.validate()?;
    if cli.print_config {
        print!("{}", config.to_text());
        return Ok(0);
    }
    match cli.command {
        None => bail!("no command given; see --help"),
        Some(Command::Explore(args)) => explore(&config, &args),
        Some(Command::Eval { graph }) => eval(&graph),
        Some(Command::Oracle { suite, seed }) => oracle(&suite, seed),
    }
}

fn apply_explore_flags(config: &mut ExplorationConfig, args: &ExploreArgs) -> Result<()> {
    for kv in &args.overrides {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("override '{kv}' is not KEY=VALUE"))?;
        config.set(k.trim(), v)?;
    }
    if let Some(j) = args.jobs {
        config.jobs = j;
    }
    if let Some(c) = args.epoch_cap {
        config.epoch_cap = c;
    }
    Ok(())
}

fn load_world(source: &str) -> Result<World> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return Ok(worlds::load(name)?);
    }
    let text = fs::read_to_string(source).with_context(|| format!("cannot read world file {source}"))?;
    World::parse(&text).with_context(|| format!("in world file {source}"))
}

fn explore(config: &ExplorationConfig, args: &ExploreArgs) -> Result<u8> {
    let world_source = args.world.as_deref().context("explore needs --world")?;
    let out = args.out.as_deref().context("explore needs --out")?;
    let world = load_world(world_source)?;

    let mut dumps: Vec<(String, String)> = Vec::new();
    let log = run_episode_with(&world, config, args.seed, |epoch, evals| {
        if args.dump_candidates {
            for e in evals {
                dumps.push((
                    format!("epoch_{epoch:03}_frontier_{}.txt", e.frontier.id),
                    write_weighted_graph(&e.graph),
                ));
            }
        }
    })?;

    write_artifacts(out, &log.to_csv(), &log.timing_csv(), &log.final_grid.to_pgm(), &write_graph(&log.final_graph), &dumps)?;

    let err = log.trajectory_error;
    println!("epochs: {}", log.records.len());
    println!("status: {}", if log.complete { "complete" } else { "incomplete (epoch cap)" });
    println!("coverage: {:.4}", log.final_coverage);
    println!("keyframes: {}", log.final_graph.num_vertices());
    println!("trajectory error: rmse {:.4} m, max {:.4} m, final {:.4} m", err.rmse, err.max, err.last);
    println!("mission time: {:.1} s simulated, {:.3} s compute", log.mission_time_s, log.total_wall_s);
    println!(
        "decision time: {:.3} s ({:.2}% of mission, {:.1}% of compute)",
        log.decision_wall_s(),
        100.0 * log.decision_fraction(),
        100.0 * log.decision_compute_fraction()
    );
    Ok(if log.complete { 0 } else { EXIT_EPOCH_CAP })
}

fn write_artifacts(
    out: &Path,
    csv: &str,
    timing: &str,
    pgm: &[u8],
    graph: &str,
    dumps: &[(String, String)],
) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let write = |name: &Path, bytes: &[u8]| fs::write(name, bytes).with_context(|| format!("cannot write {}", name.display()));
    write(&out.join("episode.csv"), csv.as_bytes())?;
    write(&out.join("timing.csv"), timing.as_bytes())?;
    write(&out.join("map.pgm"), pgm)?;
    write(&out.join("graph.txt"), graph.as_bytes())?;
    if !dumps.is_empty() {
        let dir = out.join("candidates");
        fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for (name, text) in dumps {
            write(&dir.join(name), text.as_bytes())?;
        }
    }
    Ok(())
}

fn eval(path: &Path) -> Result<u8> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let parsed = parse_graph(&text)?;
    let weights = match parsed.weights {
        Some(w) => w,
        None => parsed.graph.edges().iter().map(|e| dopt_info(&e.info)).collect(),
    };
    let g = WeightedPoseGraph::new(parsed.graph, weights)?;
    let ltw = log_tree_weight(&g)?;
    if ltw == f64::NEG_INFINITY {
        println!("dopt_graph: 0");
        println!("log_tree_weight: -inf");
        println!("note: graph is disconnected, so it has no spanning tree");
    } else {
        println!("dopt_graph: {}", fmt_sig9(dopt_graph(&g)?));
        println!("log_tree_weight: {}", fmt_sig9(ltw));
    }
    Ok(0)
}

fn oracle(suite: &str, seed: u64) -> Result<u8> {
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => bail!("unknown oracle suite '{other}' (expected one of {}, all)", SUITES.join(", ")),
    };
    let mut outcomes: Vec<SuiteOutcome> = Vec::new();
    for name in names {
        outcomes.extend(run_suite(name, seed)?);
    }
    println!(
        "{:<9} {:>5}  {:<32} {:>12} {:>10}  {:<6} {:>8}",
        "suite", "cases", "metric", "value", "bound", "result", "time"
    );
    for o in &outcomes {
        println!(
            "{:<9} {:>5}  {:<32} {:>12.4e} {:>10.1e}  {:<6} {:>7.2}s",
            o.name,
            o.cases,
            o.metric,
            o.value,
            o.tolerance,
            if o.passed { "PASS" } else { "FAIL" },
            o.elapsed_s
        );
    }
    for o in &outcomes {
        for d in &o.details {
            println!("  {d}");
        }
    }
    let all = outcomes.iter().all(|o| o.passed);
    println!("overall: {}", if all { "PASS" } else { "FAIL" });
    Ok(if all { 0 } else { 1 })
}
