use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use segrobust::core::corrupt::{CorruptionKind, SeverityTable};
use segrobust::core::metrics::Mode;
use segrobust::core::segment::{BaselineSegmenter, DEFAULT_CELL, DEFAULT_ITERATIONS};
use segrobust::corpus::{corrupt_corpus, CorruptOptions};
use segrobust::pipeline::{self, MaskSource, RunConfig, Units};
use segrobust::records::{self, Format, GroupBy};
use segrobust::{config, plot, synth};

/// Segmentation robustness benchmark harness.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write corrupted copies of every frame plus a manifest.
    Corrupt(CorruptArgs),
    /// Write baseline mask documents for clean and corrupted frames.
    SegmentBaseline(SegmentArgs),
    /// Score sub-masks against ground truth and write records.jsonl / run.json.
    Evaluate(EvaluateArgs),
    /// Aggregate records into a grouped report.
    Report(ReportArgs),
    /// Generate the synthetic tool corpus.
    Synth(SynthArgs),
}

#[derive(Args)]
struct Common {
    /// Run seed.
    #[arg(long, env = "SEGROBUST_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = one per core). Outputs do not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct CorruptArgs {
    /// Corpus root (with images/) or a plain directory of frames.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated kinds, `all`, or `none`.
    #[arg(long, default_value = "all")]
    kinds: String,
    /// Comma-separated severities or ranges, e.g. `1-5`.
    #[arg(long, default_value = "1-5")]
    severities: String,
    #[arg(long)]
    severity_config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BaselineArgs {
    /// Grid cell size of the baseline over-segmenter, in pixels.
    #[arg(long, default_value_t = DEFAULT_CELL)]
    cell: u32,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: u32,
}

#[derive(Args)]
struct SegmentArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Output directory of a previous `corrupt` run.
    #[arg(long)]
    corrupted: Option<PathBuf>,
    /// Mask document root.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    baseline: BaselineArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Mask document root, or `baseline` to segment inline.
    #[arg(long)]
    masks: String,
    #[arg(long, default_value = "all")]
    kinds: String,
    #[arg(long, default_value = "0-5")]
    severities: String,
    /// `single`, `combined`, or `both`.
    #[arg(long, default_value = "both")]
    modes: String,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Evaluate frames as captured, grouped by their conditions.csv labels.
    #[arg(long)]
    conditions: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    severity_config: Option<PathBuf>,
    #[command(flatten)]
    baseline: BaselineArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ReportArgs {
    /// records.jsonl written by `evaluate`.
    #[arg(long)]
    records: PathBuf,
    #[arg(long, default_value = "kind")]
    group_by: GroupBy,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for one SVG chart per kind.
    #[arg(long)]
    plot_svg: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 20)]
    frames: u32,
    #[arg(long, default_value_t = 128)]
    size: u32,
    #[arg(long, env = "SEGROBUST_SEED", default_value_t = 0)]
    seed: u64,
}

fn parse_kinds(s: &str) -> anyhow::Result<Vec<CorruptionKind>> {
    match s.trim() {
        "all" => Ok(CorruptionKind::ALL.to_vec()),
        "none" | "" => Ok(Vec::new()),
        list => {
            let mut kinds = list
                .split(',')
                .map(|k| k.trim().parse::<CorruptionKind>().map_err(anyhow::Error::from))
                .collect::<anyhow::Result<Vec<_>>>()?;
            kinds.sort();
            kinds.dedup();
            Ok(kinds)
        }
    }
}

fn parse_severities(s: &str) -> anyhow::Result<Vec<u8>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (a.trim().parse::<u8>()?, b.trim().parse::<u8>()?),
            None => {
                let v = part.parse::<u8>()?;
                (v, v)
            }
        };
        if lo > hi || hi > 5 {
            bail!("invalid severity range `{part}` (levels are 0-5)");
        }
        out.extend(lo..=hi);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn parse_modes(s: &str) -> anyhow::Result<Vec<Mode>> {
    match s {
        "both" => Ok(Mode::BOTH.to_vec()),
        other => Ok(vec![other.parse::<Mode>().map_err(anyhow::Error::msg)?]),
    }
}

fn load_table(path: Option<&Path>) -> anyhow::Result<SeverityTable> {
    Ok(match path {
        Some(p) => config::load_severity_table(p)?,
        None => SeverityTable::default(),
    })
}

fn baseline(args: &BaselineArgs, seed: u64) -> BaselineSegmenter {
    BaselineSegmenter { cell: args.cell, iterations: args.iterations, seed, spatial_weight: None }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Corrupt(a) => {
            let opts = CorruptOptions {
                kinds: parse_kinds(&a.kinds)?,
                severities: parse_severities(&a.severities)?,
                seed: a.common.seed,
                table: load_table(a.severity_config.as_deref())?,
            };
            let rows = pipeline::with_workers(a.common.workers, || corrupt_corpus(&a.corpus, &a.out, &opts))??;
            log::info!("wrote {} corrupted frames to {}", rows.len(), a.out.display());
        }
        Command::SegmentBaseline(a) => {
            let seg = baseline(&a.baseline, a.common.seed);
            let n = pipeline::segment_baseline(&a.corpus, a.corrupted.as_deref(), &a.out, &seg, a.common.workers)?;
            log::info!("wrote {n} mask documents to {}", a.out.display());
        }
        Command::Evaluate(a) => {
            let masks = if a.masks == "baseline" {
                MaskSource::Baseline(baseline(&a.baseline, a.common.seed))
            } else {
                MaskSource::Documents(PathBuf::from(&a.masks))
            };
            let units = if a.conditions {
                Units::Conditions
            } else {
                Units::Corruptions { kinds: parse_kinds(&a.kinds)?, severities: parse_severities(&a.severities)? }
            };
            let cfg = RunConfig {
                corpus: a.corpus,
                masks,
                units,
                modes: parse_modes(&a.modes)?,
                threshold: a.threshold,
                seed: a.common.seed,
                workers: a.common.workers,
                table: load_table(a.severity_config.as_deref())?,
            };
            let out = pipeline::evaluate(&cfg)?;
            pipeline::write_run(&a.out, &cfg, &out)?;
            log::info!("{} records, {} skipped units", out.records.len(), out.skips.len());
            if !out.skips.is_empty() {
                eprintln!("completed with {} skipped unit(s); see {}", out.skips.len(), a.out.join(pipeline::RUN_FILE).display());
                return Ok(ExitCode::from(2));
            }
        }
        Command::Report(a) => {
            let recs = records::read_records(&a.records)?;
            let report = records::build_report(&recs, &a.records)?;
            let bytes = records::render_report(&report, a.group_by, a.format);
            match &a.out {
                Some(p) => segrobust::io::write_bytes(p, &bytes)?,
                None => std::io::stdout().write_all(&bytes).context("writing report")?,
            }
            if let Some(dir) = &a.plot_svg {
                plot::write_kind_svgs(&report, dir)?;
            }
        }
        Command::Synth(a) => {
            let opts = synth::SynthOptions { frames: a.frames, size: a.size, seed: a.seed };
            synth::write_tool_corpus(&a.out, &opts)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
