//! The end-to-end run: pairs, both scores, sweeps, cross-rank report and set
//! expansion, written to one directory with a manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use aver_core::evaluation::{distinct_thresholds, sweep, topk_crossrank, ScoredPair, TruthIndex};
use aver_core::{batch_expand, generate_pairs, snapshot, AverScorer, Corpus, CorpusKind, DocId, Method};

use crate::commands::{load_corpus, score_sets, warn_unknown, Failure};
use crate::tables;
use crate::PipelineArgs;

fn scored(sets: &[Vec<DocId>], scores: &[f64]) -> Vec<ScoredPair> {
    sets.iter()
        .zip(scores)
        .map(|(s, &score)| ScoredPair { a: s[0], b: s[1], score })
        .collect()
}

/// Pairs by descending score, ties by label; the first `n` become seeds.
fn top_seeds(corpus: &Corpus, pairs: &[ScoredPair], n: usize) -> Vec<Vec<DocId>> {
    let mut order: Vec<&ScoredPair> = pairs.iter().collect();
    let labels = |p: &ScoredPair| (corpus.doc_label(p.a), corpus.doc_label(p.b));
    order.sort_by(|x, y| y.score.total_cmp(&x.score).then_with(|| labels(x).cmp(&labels(y))));
    order.into_iter().take(n).map(|p| vec![p.a, p.b]).collect()
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn run(args: &PipelineArgs) -> Result<(), Failure> {
    let dir = args.out.as_path();
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let kind = args.kind.unwrap_or(CorpusKind::Graph);
    let corpus = load_corpus(&args.input, Some(kind))?;

    let mut manifest = String::new();
    let mut note = |key: &str, value: &dyn std::fmt::Display| {
        let _ = writeln!(manifest, "{key}={value}");
    };
    note("input", &args.input.display());
    note("kind", &corpus.kind().as_str());
    note("corpus_sha256", &snapshot::checksum(&corpus));
    note("total", &corpus.total());
    note("terms", &corpus.num_terms());
    note("docs", &corpus.num_docs());
    note("min_common", &args.min_common);
    note("expand_min_common", &args.expand_min_common);
    note("top_k", &args.top_k);
    note("seeds", &args.seeds);
    note("seed_method", &args.method);
    note(
        "truth",
        &args.truth.as_ref().map_or("none".into(), |p| p.display().to_string()),
    );

    let pairs = generate_pairs(&corpus, args.min_common)?;
    tables::write_pairs(Some(&dir.join("pairs.csv")), &corpus, &pairs)?;
    note("pairs", &pairs.len());
    let sets: Vec<Vec<DocId>> = pairs.iter().map(|p| vec![p.a, p.b]).collect();

    let mut lists = Vec::new();
    for method in [Method::Aver, Method::TfIdf] {
        let scores = score_sets(&corpus, &sets, method)?;
        tables::write_scores(
            Some(&dir.join(format!("scores_{method}.csv"))),
            &corpus,
            &sets,
            method,
            &scores,
        )?;
        lists.push(scored(&sets, &scores));
    }
    let (aver_list, tfidf_list) = (&lists[0], &lists[1]);

    let truth = match &args.truth {
        Some(p) if p.exists() => {
            let t = TruthIndex::load(p, &corpus)?;
            warn_unknown(&t);
            Some(t)
        }
        Some(p) => {
            eprintln!("notice: truth file {} not found; evaluation skipped", p.display());
            None
        }
        None => {
            eprintln!("notice: no truth file; evaluation skipped");
            None
        }
    };

    let evaluation = if pairs.is_empty() {
        eprintln!("notice: no candidate pairs; evaluation skipped");
        "skipped: no candidate pairs"
    } else if let Some(truth) = &truth {
        for (method, list) in [(Method::Aver, aver_list), (Method::TfIdf, tfidf_list)] {
            let points = sweep(list, truth, &distinct_thresholds(list))?;
            tables::write_sweep(Some(&dir.join(format!("sweep_{method}.csv"))), &points)?;
        }
        "done"
    } else {
        "skipped: no truth file"
    };
    note("evaluation", &evaluation);

    if !pairs.is_empty() {
        let k = args.top_k.min(pairs.len());
        let report = topk_crossrank(aver_list, tfidf_list, k, &corpus)?;
        let names = ("aver", "tfidf");
        write_file(&dir.join("topk.txt"), &report.to_text(&corpus, names, truth.as_ref()))?;
        write_file(&dir.join("topk.csv"), &report.to_csv(&corpus, names, truth.as_ref()))?;
        note("topk_overlap", &report.overlap());
    }

    let seed_list = match args.method {
        Method::Aver => aver_list,
        Method::TfIdf => tfidf_list,
    };
    let seeds = top_seeds(&corpus, seed_list, args.seeds);
    let expanded = batch_expand(&seeds, &corpus, args.expand_min_common, &AverScorer(&corpus), args.top_k)?;
    tables::write_expanded(Some(&dir.join("expanded.csv")), &corpus, &expanded)?;
    note("expanded_sets", &expanded.len());

    write_file(&dir.join("manifest.txt"), &manifest)?;
    println!(
        "{} pairs, {} expanded sets, evaluation {evaluation}; outputs in {}",
        pairs.len(),
        expanded.len(),
        dir.display()
    );
    Ok(())
}
