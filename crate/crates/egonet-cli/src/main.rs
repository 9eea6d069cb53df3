//! Command-line front end for the egonet pipeline.
//!
//! Subcommands cover the full flow — `ingest` (parse + assemble + count),
//! `layers` (circle structure tables), `diffusion` (ring-stratified
//! forwarding tables), `all` (everything), and `synth` (seeded synthetic
//! populations written as ingestable CSVs). Reports land in the output
//! directory as header-carrying CSV files plus a `summary.json` with scalar
//! counts, discard tallies, and stage timings.
//!
//! Failures print a one-line JSON error record to stderr. An input that
//! yields no eligible egos exits with status 2; every other failure exits
//! with status 1.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use egonet::diffusion::{activity_correlations, EgoActivity, DEFAULT_RINGS};
use egonet::ingest::{
    accounts_from_nets, accounts_to_csv, assemble_events, assemble_windowed, event_log_to_csv,
    events_from_nets, index_accounts, parse_accounts, parse_event_log, parse_social_graph,
    parse_window_graph, select_eligible_egos, social_graph_from_nets, window_graph_from_nets,
    window_graph_to_csv, AccountStats, AlterClassRule, EgoEligibilityRule,
};
use egonet::layering::{map_to_offline, OFFLINE_CIRCLE_SIZES};
use egonet::model::{AccountId, EgoNetwork, WindowConfig};
use egonet::pipeline::{analyze, Analysis, AnalysisOptions};
use egonet::report::{
    ccdf_csv, circles_csv, kstar_density_csv, mapping_csv, ring_volumes_csv, rings_diffusion_csv,
    summary_json, RunSummary, MAPPING_HEADER,
};
use egonet::synthgen::{generate_population, DiffusionSpec, LayerSpec};
use egonet::tie_strength::CalibrationConstants;

#[derive(Parser)]
#[command(
    name = "egonet",
    version,
    about = "Layered ego-network structure and one-hop diffusion from interaction logs"
)]
struct Cli {
    /// Worker threads for the parallel stages (0 = one per core). Results
    /// are identical for every setting.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and assemble the inputs, then report counts without analysis
    Ingest(RunArgs),
    /// Write the circle-structure tables (k* density, circles, mapping, CCDF)
    Layers(RunArgs),
    /// Write the diffusion tables (ring fits, ring volumes)
    Diffusion(RunArgs),
    /// Write every report
    All(RunArgs),
    /// Generate a seeded synthetic population as ingestable CSV files
    Synth(SynthArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Per-link interaction counts in recency windows
    Windowed,
    /// Timestamped interaction events
    Events,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Windowed => "windowed",
            Format::Events => "events",
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Interaction log: a window-count graph or an event log, per --format
    #[arg(long)]
    input: PathBuf,

    /// Input flavor
    #[arg(long, value_enum, default_value_t = Format::Events)]
    format: Format,

    /// Account metadata CSV (enables alter classification and account ages)
    #[arg(long)]
    accounts: Option<PathBuf>,

    /// Declared-relationship edge list; windowed links outside it are
    /// discarded
    #[arg(long)]
    social_graph: Option<PathBuf>,

    /// Plain key=value settings file; explicit flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,

    /// Calibration constants as key=value text (windowed format only);
    /// defaults are re-derived from the window bounds
    #[arg(long)]
    calibration: Option<PathBuf>,

    /// Report directory, created if missing
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Largest cluster count tried during model selection
    #[arg(long)]
    k_max: Option<usize>,

    /// Cluster count for the population circle table
    /// [default: 5 for events, 4 for windowed]
    #[arg(long)]
    fixed_k: Option<usize>,

    /// Ring count for diffusion stratification
    #[arg(long)]
    rings: Option<usize>,

    /// Outermost circle size the offline mapping rescales to
    #[arg(long)]
    map_reference_size: Option<f64>,

    /// Minimum account age in months for ego eligibility
    #[arg(long)]
    min_account_age: Option<f64>,

    /// Minimum interactions per month for ego eligibility
    #[arg(long)]
    min_monthly_interactions: Option<f64>,

    /// Run seed, recorded in the summary (the analysis itself is
    /// deterministic)
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of egos to generate
    #[arg(long, default_value_t = 100)]
    egos: usize,

    /// Base seed; each ego derives its own stream from it
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Output flavor; `events` also plants reply/retweet diffusion
    #[arg(long, value_enum, default_value_t = Format::Events)]
    format: Format,

    /// Ring-structure spec as key=value text (defaults built in)
    #[arg(long)]
    layer_spec: Option<PathBuf>,

    /// Diffusion spec as key=value text (defaults built in; events only)
    #[arg(long)]
    diffusion_spec: Option<PathBuf>,

    /// Output directory, created if missing
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

/// Marker error for an input that produces no eligible egos; mapped to
/// exit status 2 so callers can distinguish it from hard failures.
#[derive(Debug)]
struct NoEligibleEgos;

impl fmt::Display for NoEligibleEgos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("no eligible egos")
    }
}

impl std::error::Error for NoEligibleEgos {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // A later duplicate build_global (e.g. in tests) is harmless; the
        // first pool wins.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code: u8 = if err.is::<NoEligibleEgos>() { 2 } else { 1 };
            let record = serde_json::json!({
                "error": format!("{err:#}"),
                "exit_code": code,
            });
            eprintln!("{record}");
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest(args) => run_reports(&args, false, false),
        Command::Layers(args) => run_reports(&args, true, false),
        Command::Diffusion(args) => run_reports(&args, false, true),
        Command::All(args) => run_reports(&args, true, true),
        Command::Synth(args) => run_synth(&args),
    }
}

/// Settings file contents; every field optional so flags can override.
#[derive(Default)]
struct FileConfig {
    w: [Option<f64>; 4],
    min_account_age: Option<f64>,
    min_monthly_interactions: Option<f64>,
    max_reply_ratio: Option<f64>,
    min_follower_ratio: Option<f64>,
    k_max: Option<usize>,
    fixed_k: Option<usize>,
    rings: Option<usize>,
    map_reference_size: Option<f64>,
}

fn parse_file_config(text: &str) -> Result<FileConfig> {
    let mut cfg = FileConfig::default();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("config line {}: expected key=value", idx + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let float = |slot: &mut Option<f64>| -> Result<()> {
            let v: f64 = value
                .parse()
                .with_context(|| format!("config line {}: bad number {value:?}", idx + 1))?;
            *slot = Some(v);
            Ok(())
        };
        match key {
            "w1" => float(&mut cfg.w[0])?,
            "w2" => float(&mut cfg.w[1])?,
            "w3" => float(&mut cfg.w[2])?,
            "w4" => float(&mut cfg.w[3])?,
            "min_account_age" => float(&mut cfg.min_account_age)?,
            "min_monthly_interactions" => float(&mut cfg.min_monthly_interactions)?,
            "max_reply_ratio" => float(&mut cfg.max_reply_ratio)?,
            "min_follower_ratio" => float(&mut cfg.min_follower_ratio)?,
            "map_reference_size" => float(&mut cfg.map_reference_size)?,
            "k_max" | "fixed_k" | "rings" => {
                let v: usize = value
                    .parse()
                    .with_context(|| format!("config line {}: bad count {value:?}", idx + 1))?;
                match key {
                    "k_max" => cfg.k_max = Some(v),
                    "fixed_k" => cfg.fixed_k = Some(v),
                    _ => cfg.rings = Some(v),
                }
            }
            other => bail!("config line {}: unknown key {other:?}", idx + 1),
        }
    }
    Ok(cfg)
}

/// Everything the report stages need, assembled from one input set.
struct Assembled {
    nets: Vec<EgoNetwork>,
    activities: Vec<EgoActivity>,
    egos_ingested: usize,
    discards: BTreeMap<String, usize>,
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_accounts(path: Option<&PathBuf>) -> Result<HashMap<AccountId, AccountStats>> {
    match path {
        Some(p) => {
            let parsed = parse_accounts(&read_to_string(p)?)
                .with_context(|| format!("parsing accounts {}", p.display()))?;
            Ok(index_accounts(&parsed))
        }
        None => Ok(HashMap::new()),
    }
}

fn assemble(args: &RunArgs, file_cfg: &FileConfig, wcfg: &WindowConfig) -> Result<Assembled> {
    let class_rule = {
        let mut rule = AlterClassRule::default();
        if let Some(v) = file_cfg.max_reply_ratio {
            rule.max_reply_ratio = v;
        }
        if let Some(v) = file_cfg.min_follower_ratio {
            rule.min_follower_ratio = v;
        }
        rule
    };
    let accounts = load_accounts(args.accounts.as_ref())?;
    let input = read_to_string(&args.input)?;
    let mut discards = BTreeMap::new();

    match args.format {
        Format::Windowed => {
            let social = match &args.social_graph {
                Some(p) => Some(
                    parse_social_graph(&read_to_string(p)?)
                        .with_context(|| format!("parsing social graph {}", p.display()))?,
                ),
                None => None,
            };
            let graph = parse_window_graph(&input, social.as_ref())
                .with_context(|| format!("parsing window graph {}", args.input.display()))?;
            let base = match &args.calibration {
                Some(p) => {
                    CalibrationConstants::from_key_values(
                        &read_to_string(p)?,
                        CalibrationConstants::default_for(wcfg),
                    )
                    .with_context(|| format!("parsing calibration {}", p.display()))?
                }
                None => CalibrationConstants::default_for(wcfg),
            };
            let asm = assemble_windowed(&graph, wcfg, base, &accounts, &class_rule)
                .context("assembling windowed networks")?;
            discards.insert("links_outside_social_graph".into(), graph.discarded);
            discards.insert("inactive_egos".into(), asm.dropped_inactive_egos);
            Ok(Assembled {
                egos_ingested: asm.nets.len() + asm.dropped_inactive_egos,
                nets: asm.nets,
                activities: Vec::new(),
                discards,
            })
        }
        Format::Events => {
            if args.calibration.is_some() {
                bail!("--calibration applies to the windowed format only");
            }
            let events = parse_event_log(&input)
                .with_context(|| format!("parsing event log {}", args.input.display()))?;
            let asm = assemble_events(&events, &accounts, &class_rule);
            discards.insert("degenerate_egos".into(), asm.dropped_degenerate_egos);
            discards.insert("zero_lifespan_links".into(), asm.dropped_zero_lifespan_links);
            Ok(Assembled {
                egos_ingested: asm.nets.len() + asm.dropped_degenerate_egos,
                nets: asm.nets,
                activities: asm.activities,
                discards,
            })
        }
    }
}

fn write_report(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn run_reports(args: &RunArgs, layers: bool, diffusion: bool) -> Result<()> {
    let file_cfg = match &args.config {
        Some(p) => parse_file_config(&read_to_string(p)?)
            .with_context(|| format!("in config {}", p.display()))?,
        None => FileConfig::default(),
    };

    let mut wcfg = WindowConfig::default();
    for (slot, v) in [
        (&mut wcfg.w1, file_cfg.w[0]),
        (&mut wcfg.w2, file_cfg.w[1]),
        (&mut wcfg.w3, file_cfg.w[2]),
        (&mut wcfg.w4, file_cfg.w[3]),
    ] {
        if let Some(v) = v {
            *slot = v;
        }
    }

    let eligibility = {
        let mut rule = EgoEligibilityRule::default();
        if let Some(v) = args.min_account_age.or(file_cfg.min_account_age) {
            rule.min_account_age = v;
        }
        if let Some(v) = args
            .min_monthly_interactions
            .or(file_cfg.min_monthly_interactions)
        {
            rule.min_monthly_interactions = v;
        }
        rule
    };

    let opts = AnalysisOptions {
        k_max: args.k_max.or(file_cfg.k_max).unwrap_or(20),
        fixed_k: args
            .fixed_k
            .or(file_cfg.fixed_k)
            .unwrap_or(match args.format {
                Format::Events => 5,
                Format::Windowed => 4,
            }),
        rings: args.rings.or(file_cfg.rings).unwrap_or(DEFAULT_RINGS),
    };
    if opts.k_max < 1 || opts.fixed_k < 1 || opts.rings < 1 {
        bail!("k-max, fixed-k and rings must each be at least 1");
    }
    let map_reference = args
        .map_reference_size
        .or(file_cfg.map_reference_size)
        .unwrap_or(OFFLINE_CIRCLE_SIZES[OFFLINE_CIRCLE_SIZES.len() - 1]);

    let mut timings: BTreeMap<String, u64> = BTreeMap::new();
    let stamp = |timings: &mut BTreeMap<String, u64>, stage: &str, from: Instant| {
        timings.insert(stage.into(), from.elapsed().as_millis() as u64);
    };

    let t = Instant::now();
    let assembled = assemble(args, &file_cfg, &wcfg)?;
    stamp(&mut timings, "assemble", t);

    let t = Instant::now();
    let eligible = select_eligible_egos(assembled.nets, &eligibility);
    if eligible.is_empty() {
        return Err(NoEligibleEgos.into());
    }
    let kept: BTreeSet<AccountId> = eligible.iter().map(|n| n.ego).collect();
    let activities: Vec<EgoActivity> = assembled
        .activities
        .into_iter()
        .filter(|a| kept.contains(&a.ego))
        .collect();
    stamp(&mut timings, "select", t);

    let t = Instant::now();
    let analysis: Option<Analysis> = if layers || diffusion {
        Some(analyze(&eligible, &opts))
    } else {
        None
    };
    stamp(&mut timings, "analyze", t);

    let t = Instant::now();
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;

    if let Some(analysis) = &analysis {
        if layers {
            write_report(&args.out, "kstar_density.csv", &kstar_density_csv(&analysis.layers))?;
            write_report(&args.out, "circles.csv", &circles_csv(&analysis.layers))?;
            let sizes: Vec<f64> = analysis.layers.circles.iter().map(|c| c.mean_size).collect();
            let mapping = match map_to_offline(&sizes, Some(map_reference)) {
                Ok(mapping) => mapping_csv(&mapping),
                Err(_) => MAPPING_HEADER.to_string(),
            };
            write_report(&args.out, "mapping.csv", &mapping)?;
            write_report(&args.out, "ccdf.csv", &ccdf_csv(&analysis.ccdf))?;
        }
        if diffusion {
            write_report(
                &args.out,
                "rings_diffusion.csv",
                &rings_diffusion_csv(&analysis.diffusion),
            )?;
            write_report(&args.out, "ring_volumes.csv", &ring_volumes_csv(&analysis.volumes))?;
        }
    }

    let (total_links, active_links) = match &analysis {
        Some(a) => (a.total_links, a.active_links),
        None => (
            eligible.iter().map(|n| n.ties.len()).sum(),
            eligible.iter().map(|n| n.active_count()).sum(),
        ),
    };
    let mut discards = assembled.discards;
    if let Some(a) = &analysis {
        discards.insert("diffusion_excluded_egos".into(), a.diffusion_excluded);
        discards.insert("ring_excluded_egos".into(), a.ring_excluded);
    }
    let summary = RunSummary {
        format: args.format.as_str().into(),
        egos_ingested: assembled.egos_ingested,
        egos_eligible: eligible.len(),
        egos_in_circles: analysis
            .as_ref()
            .map_or(0, |a| a.layers.egos_in_circles),
        links: total_links,
        active_links,
        diffusion_egos: analysis.as_ref().map_or(0, |a| a.diffusion_egos),
        discards,
        k_max: opts.k_max,
        fixed_k: opts.fixed_k,
        rings: opts.rings,
        seed: Some(args.seed),
        activity: activity_correlations(&activities).ok(),
        timings_ms: {
            stamp(&mut timings, "report", t);
            timings
        },
    };
    write_report(&args.out, "summary.json", &summary_json(&summary))?;
    Ok(())
}

fn run_synth(args: &SynthArgs) -> Result<()> {
    if args.egos == 0 {
        bail!("--egos must be at least 1");
    }
    let layer = match &args.layer_spec {
        Some(p) => LayerSpec::from_key_values(&read_to_string(p)?)
            .with_context(|| format!("parsing layer spec {}", p.display()))?,
        None => LayerSpec::default(),
    };
    let diffusion = match args.format {
        // Window counts cannot carry reply/retweet streams, so windowed
        // output plants layer structure only.
        Format::Windowed => None,
        Format::Events => Some(match &args.diffusion_spec {
            Some(p) => DiffusionSpec::from_key_values(&read_to_string(p)?)
                .with_context(|| format!("parsing diffusion spec {}", p.display()))?,
            None => DiffusionSpec::default(),
        }),
    };
    if args.format == Format::Windowed && args.diffusion_spec.is_some() {
        bail!("--diffusion-spec applies to the events format only");
    }

    let planted = generate_population(&layer, diffusion.as_ref(), args.egos, args.seed);
    let nets: Vec<EgoNetwork> = planted.into_iter().map(|p| p.net).collect();

    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    write_report(&args.out, "accounts.csv", &accounts_to_csv(&accounts_from_nets(&nets)))?;
    write_report(
        &args.out,
        "social_graph.csv",
        &social_graph_from_nets(&nets).to_csv(),
    )?;
    match args.format {
        Format::Windowed => {
            let graph = window_graph_from_nets(&nets, &WindowConfig::default());
            write_report(&args.out, "window_graph.csv", &window_graph_to_csv(&graph))?;
        }
        Format::Events => {
            let events = events_from_nets(&nets);
            write_report(&args.out, "events.csv", &event_log_to_csv(&events))?;
        }
    }
    Ok(())
}
