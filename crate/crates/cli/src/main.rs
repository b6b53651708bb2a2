use clap::{Parser, Subcommand, ValueEnum};
use craftgrid::metrics::{
    achievement_summary_from_logs, cultural_transmission, proximity_counts, scenario_scores_from_logs, ProximityCounts,
    ToolUseStats,
};
use craftgrid::runner::{
    bench, policy_by_name, read_log, replay, replay_gif, run_batch, write_log, BenchOptions, EpisodeOptions, Policy,
    TrajectoryLog,
};
use craftgrid::{ExpertMode, GameConfig, RewardScenario, ScenarioSpec};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(
    name = "craftgrid",
    version,
    about = "Run, replay, measure and benchmark craftgrid episodes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode per seed and write a log for each.
    Run(RunArgs),
    /// Compute a report over recorded logs.
    Metrics(MetricsArgs),
    /// Re-simulate a log and check it step by step.
    Replay(ReplayArgs),
    /// Measure engine throughput.
    Bench(BenchArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON game config; defaults are used for missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// plain, solo, full_expert or half_expert[:K] (K defaults to 50).
    #[arg(long, default_value = "plain")]
    scenario: String,
    /// independent, shared, attack or proximity:BETA.
    #[arg(long, default_value = "independent")]
    reward: String,
    /// Run every episode for exactly this many steps.
    #[arg(long)]
    horizon: Option<u32>,
    /// Seeds as `A..B` (B exclusive), a comma list, or one number.
    #[arg(long)]
    seeds: String,
    /// Policy for learner slots, or a comma list with one name per slot.
    #[arg(long, default_value = "random")]
    policy: String,
    /// Policy for expert slots.
    #[arg(long, default_value = "expert")]
    expert_policy: String,
    #[arg(long)]
    out_dir: PathBuf,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    parallelism: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Ct,
    Proximity,
    Tools,
    Achievements,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct MetricsArgs {
    /// Log files, or directories holding `.cglog` files.
    #[arg(long, required = true, num_args = 1..)]
    logs: Vec<PathBuf>,
    #[arg(long, value_enum)]
    report: Report,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(clap::Args)]
struct ReplayArgs {
    #[arg(long)]
    log: PathBuf,
    /// Also write an animated GIF with one frame per step.
    #[arg(long)]
    gif: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    delay_ms: u32,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seconds per measurement.
    #[arg(long, default_value_t = 2.0)]
    duration: f64,
    /// Instances for the batched measurement; 0 skips it.
    #[arg(long, default_value_t = 0)]
    batch: usize,
    /// Build step records as a logger would.
    #[arg(long)]
    logging: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Serialize)]
struct CliError {
    error: &'static str,
    message: String,
}

impl CliError {
    fn new(error: &'static str, message: impl ToString) -> Self {
        CliError {
            error,
            message: message.to_string(),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn load_config(path: Option<&Path>) -> Result<GameConfig> {
    match path {
        Some(p) => GameConfig::from_path(p).map_err(|e| CliError::new("config", format!("{}: {e}", p.display()))),
        None => Ok(GameConfig::default()),
    }
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let bad = || CliError::new("usage", format!("bad --seeds {spec:?}"));
    if let Some((a, b)) = spec.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if a >= b {
            return Err(bad());
        }
        return Ok((a..b).collect());
    }
    spec.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

fn parse_mode(s: &str) -> Result<ExpertMode> {
    let (name, k) = match s.split_once(':') {
        Some((n, k)) => (n, Some(k)),
        None => (s, None),
    };
    match (name, k) {
        ("plain", None) => Ok(ExpertMode::None),
        ("solo", None) => Ok(ExpertMode::Solo),
        ("full_expert", None) => Ok(ExpertMode::FullExpert),
        ("half_expert", None) => Ok(ExpertMode::HalfExpert(50)),
        ("half_expert", Some(k)) => k
            .parse()
            .map(ExpertMode::HalfExpert)
            .map_err(|_| CliError::new("usage", format!("bad half_expert step {k:?}"))),
        _ => Err(CliError::new("usage", format!("unknown scenario {s:?}"))),
    }
}

fn parse_reward(s: &str) -> Result<RewardScenario> {
    match s {
        "independent" => Ok(RewardScenario::Independent),
        "shared" => Ok(RewardScenario::Shared),
        "attack" => Ok(RewardScenario::Attack),
        _ => match s.strip_prefix("proximity:").map(str::parse::<f64>) {
            Some(Ok(beta)) => Ok(RewardScenario::Proximity { beta }),
            _ => Err(CliError::new("usage", format!("unknown reward {s:?}"))),
        },
    }
}

fn print_json(v: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("report serializes"));
}

fn log_name(seed: u64) -> String {
    format!("episode_{seed}.cglog")
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    let seeds = parse_seeds(&args.seeds)?;
    let scenario = ScenarioSpec {
        reward: parse_reward(&args.reward)?,
        fixed_horizon: args.horizon,
        ..ScenarioSpec::with_experts(parse_mode(&args.scenario)?, cfg.n_agents)
    };
    let names: Vec<String> = (0..cfg.n_agents)
        .map(|slot| {
            if scenario.is_expert(slot) {
                return args.expert_policy.clone();
            }
            let list: Vec<&str> = args.policy.split(',').collect();
            if list.len() == 1 {
                list[0].to_string()
            } else {
                list.get(slot).unwrap_or(&"").to_string()
            }
        })
        .collect();
    for n in &names {
        if policy_by_name(n, &cfg).is_none() {
            return Err(CliError::new("usage", format!("unknown or missing policy {n:?}")));
        }
    }
    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::new("io", e))?;
    let factory = |_seed: u64| -> Vec<Box<dyn Policy>> {
        names
            .iter()
            .map(|n| policy_by_name(n, &cfg).expect("checked above"))
            .collect()
    };
    let batch = run_batch(
        &cfg,
        &scenario,
        &factory,
        &seeds,
        args.parallelism,
        EpisodeOptions::default(),
    )
    .map_err(|e| CliError::new("run", e))?;

    #[derive(Serialize)]
    struct Failure {
        seed: u64,
        message: String,
    }
    #[derive(Serialize)]
    struct Summary {
        scenario: String,
        episodes: usize,
        mean_score: f64,
        mean_steps: f64,
        out_dir: PathBuf,
        failures: Vec<Failure>,
    }
    let mut failures = Vec::new();
    let mut steps = 0;
    for (seed, r) in &batch.episodes {
        match r {
            Ok(log) => {
                steps += log.n_steps();
                write_log(log, args.out_dir.join(log_name(*seed))).map_err(|e| CliError::new("io", e))?;
            }
            Err(e) => failures.push(Failure {
                seed: *seed,
                message: e.to_string(),
            }),
        }
    }
    let ok = batch.episodes.len() - failures.len();
    let summary = Summary {
        scenario: scenario.label(),
        episodes: ok,
        mean_score: batch.mean_score(),
        mean_steps: if ok == 0 { 0.0 } else { steps as f64 / ok as f64 },
        out_dir: args.out_dir,
        failures,
    };
    print_json(&summary);
    if !summary.failures.is_empty() {
        return Err(CliError::new(
            "episode",
            format!("{} of {} episodes failed", summary.failures.len(), seeds.len()),
        ));
    }
    Ok(())
}

fn collect_logs(paths: &[PathBuf]) -> Result<Vec<TrajectoryLog>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| CliError::new("io", format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "cglog"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        return Err(CliError::new("usage", "no log files found"));
    }
    files
        .iter()
        .map(|f| read_log(f).map_err(|e| CliError::new("log", format!("{}: {e}", f.display()))))
        .collect()
}

fn emit<T: Serialize>(format: Format, value: &T, csv: impl FnOnce(&T) -> String) {
    match format {
        Format::Json => print_json(value),
        Format::Csv => print!("{}", csv(value)),
    }
}

fn cmd_metrics(args: MetricsArgs) -> Result<()> {
    let logs = collect_logs(&args.logs)?;
    let n = logs[0].header.n_agents;
    let same_size = || {
        if logs.iter().all(|l| l.header.n_agents == n) {
            Ok(())
        } else {
            Err(CliError::new("usage", "logs have different agent counts"))
        }
    };
    match args.report {
        Report::Ct => {
            let scores = scenario_scores_from_logs(&logs).map_err(|e| CliError::new("metrics", e))?;
            let est = cultural_transmission(&scores).map_err(|e| CliError::new("metrics", e))?;
            emit(args.format, &est, |e| e.to_csv());
        }
        Report::Proximity => {
            same_size()?;
            let mut counts = ProximityCounts::new(n);
            for log in &logs {
                counts.merge(&proximity_counts(log).map_err(|e| CliError::new("metrics", e))?);
            }
            emit(args.format, &counts.report(), |r| r.to_csv());
        }
        Report::Tools => {
            same_size()?;
            let mut stats = ToolUseStats::new(n);
            for log in &logs {
                stats.add_events(log.events());
            }
            emit(args.format, &stats, |s| s.to_csv());
        }
        Report::Achievements => {
            let s = achievement_summary_from_logs(&logs).map_err(|e| CliError::new("metrics", e))?;
            emit(args.format, &s, |s| s.to_csv());
        }
    }
    Ok(())
}

fn cmd_replay(args: ReplayArgs) -> Result<()> {
    let log = read_log(&args.log).map_err(|e| CliError::new("log", format!("{}: {e}", args.log.display())))?;
    let (digest, frames) = match &args.gif {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| CliError::new("io", e))?;
            let frames = replay_gif(&log, std::io::BufWriter::new(file), args.delay_ms)
                .map_err(|e| CliError::new("replay", e))?;
            (log.steps.last().map(|s| s.digest), Some(frames))
        }
        None => (Some(replay(&log).map_err(|e| CliError::new("replay", e))?), None),
    };

    #[derive(Serialize)]
    struct Out {
        steps: usize,
        final_digest: Option<String>,
        frames: Option<usize>,
        migration_notes: Vec<String>,
    }
    print_json(&Out {
        steps: log.n_steps(),
        final_digest: digest.map(|d| d.to_string()),
        frames,
        migration_notes: log.migration_notes,
    });
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    if !(args.duration > 0.0 && args.duration.is_finite()) {
        return Err(CliError::new("usage", "--duration must be positive"));
    }
    let report = bench(
        &cfg,
        &BenchOptions {
            duration: Duration::from_secs_f64(args.duration),
            logging: args.logging,
            batch_instances: args.batch,
            seed: args.seed,
        },
    );
    print_json(&report);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            e.exit()
        }
        Err(e) => {
            let err = CliError::new("usage", e.to_string().trim());
            eprintln!("{}", serde_json::to_string(&err).expect("error serializes"));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Replay(a) => cmd_replay(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e).expect("error serializes"));
            ExitCode::FAILURE
        }
    }
}
