//! Command-line front end for the bot detection pipeline.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use botdetect::config::{PipelineConfig, Preset};
use botdetect::eval::{confusion_metrics, roc_points, write_roc_csv};
use botdetect::graph::{build_graph, GraphConfig};
use botdetect::ingest::{self, Format, UserRecord};
use botdetect::label::Label;
use botdetect::multirank::write_stationary_json;
use botdetect::pipeline::{report_roc, run_detect_with_artifacts, DetectionReport};
use botdetect::synth::gen_synthetic;
use botdetect::TruthLabel;

const EXIT_INPUT_ERROR: u8 = 1;
const EXIT_PIPELINE_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "botdetect",
    about = "Unsupervised social-bot detection",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full detection pipeline on a user-record corpus.
    Detect(DetectArgs),
    /// Generate a deterministic synthetic corpus with truth labels.
    GenSynthetic(GenArgs),
    /// Recompute metrics from an existing detection report.
    Eval(EvalArgs),
    /// Build the similarity graph and dump its edge list.
    DumpGraph(StageArgs),
    /// Build the graph, minimize entropy, and dump the encoding tree.
    DumpTree(StageArgs),
}

#[derive(Args, Clone)]
struct ConfigFlags {
    /// TOML config file; keys mirror the flag names. Flags win on conflict.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named preset applied on top of the config file: pronbots or botwiki.
    #[arg(long)]
    preset: Option<Preset>,
    /// Similarity threshold for all three relations.
    #[arg(long)]
    xi: Option<f64>,
    /// Follow-ratio floor for relation 3.
    #[arg(long)]
    phi: Option<f64>,
    /// Scale ratio for parallel merge operators.
    #[arg(long)]
    p: Option<f64>,
    /// Stop threshold for the stationary-distribution iteration.
    #[arg(long)]
    rho: Option<f64>,
    /// Cohesion weight in the evaluation score.
    #[arg(long)]
    pi: Option<f64>,
    /// Bot threshold on the evaluation score.
    #[arg(long)]
    theta: Option<f64>,
    /// Relation weights as "a,b,c".
    #[arg(long, value_parser = parse_omega)]
    omega: Option<[f64; 3]>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the graph and entropy stages (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_omega(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err("expected three comma-separated values".into()),
    }
}

impl ConfigFlags {
    fn resolve(&self) -> anyhow::Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                toml::from_str(&text)?
            }
            None => PipelineConfig::default(),
        };
        if let Some(preset) = self.preset {
            preset.apply(&mut cfg);
        }
        macro_rules! override_with {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        override_with!(xi, phi, p, rho, pi, theta, omega);
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        Ok(cfg)
    }

    fn install_thread_pool(&self) {
        if let Some(threads) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .expect("thread pool is initialized once");
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    /// Input corpus; "-" reads stdin.
    #[arg(long)]
    input: PathBuf,
    /// Report destination; "-" or absent writes stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "jsonl")]
    format: Format,
    #[command(flatten)]
    config: ConfigFlags,
    /// Also dump the similarity graph edge list here.
    #[arg(long, value_name = "PATH")]
    dump_graph: Option<PathBuf>,
    /// Also dump the encoding tree JSON here.
    #[arg(long, value_name = "PATH")]
    dump_tree: Option<PathBuf>,
    /// Also dump the stationary distribution JSON here.
    #[arg(long, value_name = "PATH")]
    dump_stationary: Option<PathBuf>,
    /// Also write ROC points as CSV here (needs truth labels).
    #[arg(long, value_name = "PATH")]
    roc: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    bots: usize,
    #[arg(long)]
    humans: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "jsonl")]
    format: Format,
}

#[derive(Args)]
struct EvalArgs {
    /// Detection report JSON produced by `detect`.
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write ROC points as CSV here.
    #[arg(long, value_name = "PATH")]
    roc: Option<PathBuf>,
}

#[derive(Args)]
struct StageArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "jsonl")]
    format: Format,
    #[command(flatten)]
    config: ConfigFlags,
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    match path {
        Some(p) if p != Path::new("-") => Ok(Box::new(BufWriter::new(File::create(p)?))),
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn read_records(path: &Path, format: Format) -> anyhow::Result<Vec<UserRecord>> {
    let records = if path == Path::new("-") {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf)?;
        ingest::parse_user_records(buf.as_bytes(), format)?
    } else {
        let reader = BufReader::new(File::open(path)?);
        ingest::parse_user_records(reader, format)?
    };
    Ok(records)
}

fn features_and_graph(
    records: &[UserRecord],
    cfg: &PipelineConfig,
) -> anyhow::Result<botdetect::MultiRelationalGraph> {
    let features: Vec<_> = records
        .iter()
        .filter_map(ingest::extract_features)
        .collect();
    if features.is_empty() {
        anyhow::bail!("no valid users: every record was empty or skipped");
    }
    Ok(build_graph(
        &features,
        &GraphConfig {
            xi: cfg.xi,
            xi_per_relation: [None; 3],
            phi: cfg.phi,
            omega: cfg.omega,
        },
    ))
}

fn cmd_detect(args: DetectArgs) -> anyhow::Result<u8> {
    let cfg = args.config.resolve().map_err(input_error)?;
    args.config.install_thread_pool();
    let records = read_records(&args.input, args.format).map_err(input_error)?;

    let (report, artifacts) = run_detect_with_artifacts(&records, &cfg).map_err(|e| match e {
        botdetect::pipeline::PipelineError::NoValidUsers => input_error(e),
        other => pipeline_error(other),
    })?;

    if let Some(path) = &args.dump_graph {
        let mut out = open_output(Some(path))?;
        artifacts.graph.write_edge_list(&mut out)?;
    }
    if let Some(path) = &args.dump_tree {
        let mut out = open_output(Some(path))?;
        artifacts.tree.write_json(&artifacts.graph, &mut out)?;
    }
    if let Some(path) = &args.dump_stationary {
        let mut out = open_output(Some(path))?;
        write_stationary_json(&artifacts.stationary, &artifacts.ids, &mut out)?;
    }
    if let Some(path) = &args.roc {
        if let Some(points) = report_roc(&report) {
            let mut out = open_output(Some(path))?;
            write_roc_csv(&points, &mut out)?;
        } else {
            anyhow::bail!(ExitError {
                code: EXIT_PIPELINE_ERROR,
                message: "ROC requested but truth labels are missing or single-class".into(),
            });
        }
    }

    let mut out = open_output(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    out.write_all(b"\n")?;
    Ok(0)
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<u8> {
    if args.bots + args.humans < 2 {
        anyhow::bail!(ExitError {
            code: EXIT_INPUT_ERROR,
            message: "need at least two users in total".into(),
        });
    }
    let records = gen_synthetic(args.bots, args.humans, args.seed);
    let mut out = open_output(args.output.as_deref())?;
    ingest::write_user_records(&records, args.format, &mut out)?;
    Ok(0)
}

fn cmd_eval(args: EvalArgs) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(&args.predictions).map_err(input_error)?;
    let report: DetectionReport = serde_json::from_str(&text).map_err(input_error)?;
    let labeled: Vec<_> = report
        .users
        .iter()
        .filter(|u| u.truth_label.is_some())
        .collect();
    if labeled.is_empty() {
        anyhow::bail!(ExitError {
            code: EXIT_INPUT_ERROR,
            message: "prediction file carries no truth labels".into(),
        });
    }
    let pred: Vec<Label> = labeled.iter().map(|u| u.label).collect();
    let truth: Vec<Label> = labeled
        .iter()
        .map(|u| match u.truth_label.unwrap() {
            TruthLabel::Bot => Label::Bot,
            TruthLabel::Human => Label::Human,
        })
        .collect();
    let mut metrics = confusion_metrics(&pred, &truth).map_err(pipeline_error)?;
    let scores: Vec<f64> = labeled.iter().map(|u| u.ev).collect();
    let roc = roc_points(&scores, &truth).ok();
    metrics.auc = roc.as_ref().map(|(_, auc)| *auc);
    if let Some(path) = &args.roc {
        if let Some((points, _)) = &roc {
            let mut out = open_output(Some(path))?;
            write_roc_csv(points, &mut out)?;
        }
    }
    let mut out = open_output(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &metrics)?;
    out.write_all(b"\n")?;
    Ok(0)
}

fn cmd_dump_graph(args: StageArgs) -> anyhow::Result<u8> {
    let cfg = args.config.resolve().map_err(input_error)?;
    args.config.install_thread_pool();
    let records = read_records(&args.input, args.format).map_err(input_error)?;
    let graph = features_and_graph(&records, &cfg).map_err(input_error)?;
    let mut out = open_output(args.output.as_deref())?;
    graph.write_edge_list(&mut out)?;
    Ok(0)
}

fn cmd_dump_tree(args: StageArgs) -> anyhow::Result<u8> {
    let cfg = args.config.resolve().map_err(input_error)?;
    args.config.install_thread_pool();
    let records = read_records(&args.input, args.format).map_err(input_error)?;
    let graph = features_and_graph(&records, &cfg).map_err(input_error)?;
    let tree = botdetect::entropy::optimize_tree(&graph, cfg.p);
    let mut out = open_output(args.output.as_deref())?;
    tree.write_json(&graph, &mut out)?;
    Ok(0)
}

#[derive(Debug)]
struct ExitError {
    code: u8,
    message: String,
}

impl std::fmt::Display for ExitError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for ExitError {}

fn input_error(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow::Error::new(ExitError {
        code: EXIT_INPUT_ERROR,
        message: e.to_string(),
    })
}

fn pipeline_error(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow::Error::new(ExitError {
        code: EXIT_PIPELINE_ERROR,
        message: e.to_string(),
    })
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect(args) => cmd_detect(args),
        Command::GenSynthetic(args) => cmd_gen(args),
        Command::Eval(args) => cmd_eval(args),
        Command::DumpGraph(args) => cmd_dump_graph(args),
        Command::DumpTree(args) => cmd_dump_tree(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<ExitError>()
                .map(|e| e.code)
                .unwrap_or(EXIT_PIPELINE_ERROR);
            ExitCode::from(code)
        }
    }
}
