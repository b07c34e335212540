use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use aver_core::evaluation::{distinct_thresholds, sweep as sweep_scores, topk_crossrank, TruthIndex};
use aver_core::{batch_expand, generate_pairs, snapshot, AverScorer, Corpus, CorpusKind, DocId, Error, Method, SetScorer, TfIdf};
use rayon::prelude::*;

use crate::tables;
use crate::{ExpandArgs, IngestArgs, PairsArgs, ScoreArgs, SweepArgs, TopkArgs};

/// A failed command, grouped by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Data(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Data(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Data(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => Failure::Io(e.to_string()),
            Error::Argument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            Failure::Io(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Loads a snapshot, or parses a text corpus of the given kind.
pub fn load_corpus(path: &Path, kind: Option<CorpusKind>) -> Result<Corpus, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    if snapshot::is_snapshot(&bytes) {
        return Ok(snapshot::decode(&bytes)?);
    }
    let corpus = match kind {
        Some(CorpusKind::Documents) => Corpus::read_documents(bytes.as_slice())?,
        Some(CorpusKind::Graph) => Corpus::read_edges(bytes.as_slice())?,
        None => {
            return Err(Failure::Usage(format!(
                "{} is not a snapshot; pass --kind docs or --kind edges",
                path.display()
            )))
        }
    };
    Ok(corpus)
}

pub fn ingest(args: &IngestArgs, kind: CorpusKind) -> Result<(), Failure> {
    let corpus = match kind {
        CorpusKind::Documents => Corpus::load_documents(&args.input)?,
        CorpusKind::Graph => Corpus::load_edges(&args.input)?,
    };
    if corpus.total() == 0 {
        eprintln!("warning: {} holds no term occurrences", args.input.display());
    }
    snapshot::save(&corpus, &args.out)?;
    println!(
        "N={} terms={} docs={}",
        corpus.total(),
        corpus.num_terms(),
        corpus.num_docs()
    );
    Ok(())
}

pub fn pairs(args: &PairsArgs) -> Result<(), Failure> {
    let corpus = load_corpus(&args.corpus, args.kind)?;
    let pairs = generate_pairs(&corpus, args.min_common)?;
    tables::write_pairs(args.out.as_deref(), &corpus, &pairs)
}

/// Scores every set; tf-idf accepts pairs only.
pub fn score_sets(corpus: &Corpus, sets: &[Vec<DocId>], method: Method) -> Result<Vec<f64>, Failure> {
    if method == Method::TfIdf {
        if let Some(bad) = sets.iter().find(|s| s.len() != 2) {
            return Err(Failure::Usage(format!(
                "tfidf scores pairs only; got a set of {} documents",
                bad.len()
            )));
        }
    }
    let scores = match method {
        Method::Aver => {
            let scorer = AverScorer(corpus);
            sets.par_iter().map(|s| scorer.score(s)).collect::<Result<Vec<_>, _>>()?
        }
        Method::TfIdf => {
            let model = TfIdf::new(corpus);
            sets.par_iter().map(|s| model.score(s)).collect::<Result<Vec<_>, _>>()?
        }
    };
    Ok(scores)
}

pub fn score(args: &ScoreArgs) -> Result<(), Failure> {
    let corpus = load_corpus(&args.corpus, args.kind)?;
    let sets = tables::read_sets(&args.sets, &corpus)?;
    let scores = score_sets(&corpus, &sets, args.method)?;
    tables::write_scores(args.out.as_deref(), &corpus, &sets, args.method, &scores)
}

pub fn expand(args: &ExpandArgs) -> Result<(), Failure> {
    if args.method != Method::Aver {
        return Err(Failure::Usage("expansion scores sets, which only aver supports".into()));
    }
    let corpus = load_corpus(&args.corpus, args.kind)?;
    let seeds = tables::read_sets(&args.seeds, &corpus)?;
    let sets = batch_expand(&seeds, &corpus, args.min_common, &AverScorer(&corpus), args.top_k)?;
    tables::write_expanded(args.out.as_deref(), &corpus, &sets)
}

pub fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let corpus = load_corpus(&args.corpus, args.kind)?;
    let truth = TruthIndex::load(&args.truth, &corpus)?;
    warn_unknown(&truth);
    let scores = tables::read_pair_scores(&args.scores, &corpus)?;
    let points = sweep_scores(&scores, &truth, &distinct_thresholds(&scores))?;
    tables::write_sweep(args.out.as_deref(), &points)
}

pub fn topk(args: &TopkArgs) -> Result<(), Failure> {
    let corpus = load_corpus(&args.corpus, args.kind)?;
    let truth = args
        .truth
        .as_ref()
        .map(|p| TruthIndex::load(p, &corpus))
        .transpose()?;
    if let Some(t) = &truth {
        warn_unknown(t);
    }
    let left = tables::read_pair_scores(&args.left, &corpus)?;
    let right = tables::read_pair_scores(&args.right, &corpus)?;
    let names = (list_name(&args.left), list_name(&args.right));
    let report = topk_crossrank(&left, &right, args.top_k, &corpus)?;
    let names = (names.0.as_str(), names.1.as_str());
    let mut text = tables::open_write(args.out.as_deref())?;
    text.write_all(report.to_text(&corpus, names, truth.as_ref()).as_bytes())?;
    text.flush()?;
    if let Some(out) = &args.out {
        let csv_path = out.with_extension("csv");
        fs::write(&csv_path, report.to_csv(&corpus, names, truth.as_ref()))
            .map_err(|e| Failure::Io(format!("{}: {e}", csv_path.display())))?;
    }
    Ok(())
}

fn list_name(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "scores".to_owned(), |s| s.to_string_lossy().into_owned())
}

pub fn warn_unknown(truth: &TruthIndex) {
    let unknown = truth.unknown_labels();
    if !unknown.is_empty() {
        eprintln!(
            "warning: {} truth labels are not in the corpus (first: {})",
            unknown.len(),
            unknown[0]
        );
    }
}
