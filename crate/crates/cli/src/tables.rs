//! Reading and writing the plain-text tables exchanged between subcommands.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use aver_core::evaluation::ScoredPair;
use aver_core::{Corpus, DocId, Method};

use crate::commands::Failure;

pub const PAIRS_HEADER: [&str; 3] = ["docA", "docB", "common"];
pub const SCORES_HEADER: [&str; 3] = ["members", "method", "score"];

pub fn open_read(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Buffered output to `path`, or to stdout.
pub fn open_write(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn csv_writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>, Failure> {
    Ok(csv::WriterBuilder::new().from_writer(open_write(path)?))
}

fn resolve(corpus: &Corpus, label: &str, line: usize) -> Result<DocId, Failure> {
    corpus
        .doc_id(label)
        .ok_or_else(|| Failure::Data(format!("line {line}: unknown document {label:?}")))
}

/// Document sets from either a pairs CSV (recognised by its header) or a
/// file with one whitespace-separated set of labels per line. Blank lines and
/// `#` comments are skipped.
pub fn read_sets(path: &Path, corpus: &Corpus) -> Result<Vec<Vec<DocId>>, Failure> {
    let mut sets = Vec::new();
    let mut csv_mode = false;
    let mut first = true;
    for (i, line) in open_read(path)?.lines().enumerate() {
        let n = i + 1;
        let line = line.map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if std::mem::take(&mut first) && line == PAIRS_HEADER.join(",") {
            csv_mode = true;
            continue;
        }
        let labels: Vec<&str> = if csv_mode {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Failure::Data(format!("line {n}: expected docA,docB,common")));
            }
            fields[..2].to_vec()
        } else {
            line.split_whitespace().collect()
        };
        sets.push(
            labels
                .into_iter()
                .map(|l| resolve(corpus, l, n))
                .collect::<Result<_, _>>()?,
        );
    }
    Ok(sets)
}

pub fn write_pairs(out: Option<&Path>, corpus: &Corpus, pairs: &[aver_core::CandidatePair]) -> Result<(), Failure> {
    let mut w = csv_writer(out)?;
    w.write_record(PAIRS_HEADER)?;
    for p in pairs {
        w.write_record([corpus.doc_label(p.a), corpus.doc_label(p.b), &p.common.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn members_text(corpus: &Corpus, members: &[DocId]) -> String {
    members
        .iter()
        .map(|&d| corpus.doc_label(d))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_scores(
    out: Option<&Path>,
    corpus: &Corpus,
    sets: &[Vec<DocId>],
    method: Method,
    scores: &[f64],
) -> Result<(), Failure> {
    let mut w = csv_writer(out)?;
    w.write_record(SCORES_HEADER)?;
    for (set, s) in sets.iter().zip(scores) {
        w.write_record([members_text(corpus, set).as_str(), method.as_str(), &s.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Pair scores from a scores CSV. Rows that are not pairs are rejected.
pub fn read_pair_scores(path: &Path, corpus: &Corpus) -> Result<Vec<ScoredPair>, Failure> {
    let mut r = csv::Reader::from_reader(open_read(path)?);
    let header = r.headers()?.clone();
    if header.iter().ne(SCORES_HEADER) {
        return Err(Failure::Data(format!(
            "{}: expected header {}",
            path.display(),
            SCORES_HEADER.join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let members: Vec<&str> = record[0].split_whitespace().collect();
        let [a, b] = members[..] else {
            return Err(Failure::Data(format!("line {line}: expected a pair, got {} members", members.len())));
        };
        let score: f64 = record[2]
            .parse()
            .map_err(|_| Failure::Data(format!("line {line}: bad score {:?}", &record[2])))?;
        out.push(ScoredPair {
            a: resolve(corpus, a, line)?,
            b: resolve(corpus, b, line)?,
            score,
        });
    }
    Ok(out)
}

pub fn write_sweep(out: Option<&Path>, points: &[aver_core::evaluation::SweepPoint]) -> Result<(), Failure> {
    let mut w = csv_writer(out)?;
    w.write_record(["threshold", "tp", "fp", "tpr", "fpr"])?;
    for p in points {
        w.write_record([
            p.threshold.to_string(),
            p.tp.to_string(),
            p.fp.to_string(),
            p.tpr.to_string(),
            p.fpr.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_expanded(out: Option<&Path>, corpus: &Corpus, sets: &[aver_core::ExpandedSet]) -> Result<(), Failure> {
    let mut w = csv_writer(out)?;
    w.write_record(["rank", "size", "score", "common", "multiplicity", "members"])?;
    for (i, e) in sets.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            e.set.members.len().to_string(),
            e.set.score.to_string(),
            e.set.common_terms.to_string(),
            e.multiplicity.to_string(),
            members_text(corpus, &e.set.members),
        ])?;
    }
    w.flush()?;
    Ok(())
}
