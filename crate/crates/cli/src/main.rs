use std::path::PathBuf;
use std::process::ExitCode;

use aver_core::{CorpusKind, Method};
use clap::{Args, Parser, Subcommand};

mod commands;
mod pipeline;
mod tables;

use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "aver", version, about = "Association scoring for corpora and friendship graphs")]
struct Cli {
    /// Worker threads; 0 uses every core. Outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read a text corpus, one whitespace-tokenised document per line, and
    /// write a snapshot.
    IngestDocs(IngestArgs),
    /// Read a SNAP-style edge list and write a snapshot.
    IngestEdges(IngestArgs),
    /// List document pairs sharing at least --min-common term occurrences.
    Pairs(PairsArgs),
    /// Score pairs or sets read from a file.
    Score(ScoreArgs),
    /// Greedily grow seed sets into high-scoring sets.
    Expand(ExpandArgs),
    /// True/false positive counts for every score threshold.
    Sweep(SweepArgs),
    /// Compare the top-k pairs of two score files.
    Topk(TopkArgs),
    /// Pairs, both scores, sweeps, top-k report and expansion in one run.
    Pipeline(PipelineArgs),
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    pub input: PathBuf,
    /// Snapshot to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PairsArgs {
    /// Snapshot, or a text corpus with --kind.
    pub corpus: PathBuf,
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<CorpusKind>,
    #[arg(long, default_value_t = 101)]
    pub min_common: u64,
    /// CSV to write; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    pub corpus: PathBuf,
    /// One set of document labels per line, or a pairs CSV.
    pub sets: PathBuf,
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<CorpusKind>,
    #[arg(long, default_value = "aver", value_parser = parse_method)]
    pub method: Method,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    pub corpus: PathBuf,
    /// Seed sets, in the same formats `score` accepts.
    #[arg(long)]
    pub seeds: PathBuf,
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<CorpusKind>,
    #[arg(long, default_value = "aver", value_parser = parse_method)]
    pub method: Method,
    #[arg(long, default_value_t = 10)]
    pub min_common: u64,
    #[arg(long, default_value_t = 20)]
    pub top_k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    pub corpus: PathBuf,
    /// Scores CSV as written by `score`.
    pub scores: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<CorpusKind>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TopkArgs {
    pub corpus: PathBuf,
    pub left: PathBuf,
    pub right: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub top_k: usize,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<CorpusKind>,
    /// Text report; the CSV goes next to it with a `.csv` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    /// Edge list (or snapshot) of the graph.
    pub input: PathBuf,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<CorpusKind>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 101)]
    pub min_common: u64,
    #[arg(long, default_value_t = 10)]
    pub expand_min_common: u64,
    #[arg(long, default_value_t = 20)]
    pub top_k: usize,
    /// Number of top-ranked pairs used as expansion seeds.
    #[arg(long, default_value_t = 100)]
    pub seeds: usize,
    /// Score that ranks pairs for seeding; expansion itself always uses aver.
    #[arg(long, default_value = "aver", value_parser = parse_method)]
    pub method: Method,
}

fn parse_kind(s: &str) -> Result<CorpusKind, String> {
    match s {
        "docs" => Ok(CorpusKind::Documents),
        "edges" => Ok(CorpusKind::Graph),
        other => Err(format!("unknown input kind {other:?}, expected docs or edges")),
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: aver_core::Error| e.to_string())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start {} workers: {e}", cli.workers)))?;
    pool.install(|| match cli.command {
        Command::IngestDocs(a) => commands::ingest(&a, CorpusKind::Documents),
        Command::IngestEdges(a) => commands::ingest(&a, CorpusKind::Graph),
        Command::Pairs(a) => commands::pairs(&a),
        Command::Score(a) => commands::score(&a),
        Command::Expand(a) => commands::expand(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Topk(a) => commands::topk(&a),
        Command::Pipeline(a) => pipeline::run(&a),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
