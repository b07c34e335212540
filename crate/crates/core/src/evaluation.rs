//! Truth marking of scored pairs against group memberships, threshold sweeps,
//! top-k cross-rank comparison and per-pair diagnostics.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::aver::{common_counts, sorted_members};
use crate::corpus::{Corpus, CorpusKind, DocId};
use crate::error::{Error, Result};

/// Group memberships, resolved against a corpus.
#[derive(Debug, Clone, Default)]
pub struct TruthIndex {
    groups: Vec<Vec<DocId>>,
    group_sizes: Vec<usize>,
    unknown: Vec<String>,
    membership: Vec<Vec<u32>>,
}

impl TruthIndex {
    /// Labels absent from the corpus still count towards group sizes and are
    /// listed by [`TruthIndex::unknown_labels`].
    pub fn from_groups<G, M, S>(corpus: &Corpus, groups: G) -> TruthIndex
    where
        G: IntoIterator<Item = M>,
        M: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut index = TruthIndex {
            membership: vec![Vec::new(); corpus.num_docs()],
            ..TruthIndex::default()
        };
        let mut unknown_seen = HashSet::new();
        for group in groups {
            let gid = index.groups.len() as u32;
            let mut labels: Vec<String> = group.into_iter().map(|s| s.as_ref().to_owned()).collect();
            labels.sort_unstable();
            labels.dedup();
            let mut members = Vec::with_capacity(labels.len());
            for label in &labels {
                match corpus.doc_id(label) {
                    Some(d) => members.push(d),
                    None => {
                        if unknown_seen.insert(label.clone()) {
                            index.unknown.push(label.clone());
                        }
                    }
                }
            }
            members.sort_unstable();
            for &d in &members {
                index.membership[d.index()].push(gid);
            }
            index.group_sizes.push(labels.len());
            index.groups.push(members);
        }
        index
    }

    /// One group per line, whitespace separated labels; blank and `#` lines
    /// skipped.
    pub fn read<R: BufRead>(reader: R, corpus: &Corpus) -> Result<TruthIndex> {
        let mut groups = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            groups.push(trimmed.split_whitespace().map(str::to_owned).collect::<Vec<_>>());
        }
        Ok(TruthIndex::from_groups(corpus, groups))
    }

    pub fn load(path: impl AsRef<Path>, corpus: &Corpus) -> Result<TruthIndex> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        TruthIndex::read(BufReader::new(file), corpus)
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    /// Members of group `g` that exist in the corpus.
    pub fn group(&self, g: usize) -> &[DocId] {
        &self.groups[g]
    }

    /// Size of group `g` as listed, unknown labels included.
    pub fn group_size(&self, g: usize) -> usize {
        self.group_sizes[g]
    }

    pub fn unknown_labels(&self) -> &[String] {
        &self.unknown
    }

    pub fn groups_of(&self, d: DocId) -> &[u32] {
        self.membership.get(d.index()).map_or(&[], Vec::as_slice)
    }

    /// Number of groups containing both documents.
    pub fn shared_groups(&self, a: DocId, b: DocId) -> usize {
        let (ga, gb) = (self.groups_of(a), self.groups_of(b));
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < ga.len() && j < gb.len() {
            match ga[i].cmp(&gb[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// Whether some group holds both documents, and how many do.
    pub fn pair_positive(&self, a: DocId, b: DocId) -> (bool, usize) {
        let n = self.shared_groups(a, b);
        (n > 0, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredPair {
    pub a: DocId,
    pub b: DocId,
    pub score: f64,
}

impl ScoredPair {
    /// The pair with its ids ascending.
    pub fn key(&self) -> (DocId, DocId) {
        (self.a.min(self.b), self.a.max(self.b))
    }
}

/// Confusion counts of the pairs scoring strictly above `threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub threshold: f64,
    pub tp: u64,
    pub fp: u64,
    pub tpr: f64,
    pub fpr: f64,
}

/// `-inf` followed by every distinct score ascending; sweeping these visits
/// every distinct survivor set.
pub fn distinct_thresholds(scores: &[ScoredPair]) -> Vec<f64> {
    let mut values: Vec<f64> = scores.iter().map(|p| p.score).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(f64::NEG_INFINITY);
    out.extend(values);
    out
}

/// True and false positive rates at each threshold, thresholds ascending.
pub fn sweep(scores: &[ScoredPair], truth: &TruthIndex, thresholds: &[f64]) -> Result<Vec<SweepPoint>> {
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for p in scores {
        if p.score.is_nan() {
            return Err(Error::Evaluation(format!(
                "pair ({}, {}) has a NaN score",
                p.a.0, p.b.0
            )));
        }
        if truth.shared_groups(p.a, p.b) > 0 {
            positives.push(p.score);
        } else {
            negatives.push(p.score);
        }
    }
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::Evaluation(format!(
            "need both positive and negative pairs, got {} and {}",
            positives.len(),
            negatives.len()
        )));
    }
    positives.sort_by(f64::total_cmp);
    negatives.sort_by(f64::total_cmp);
    let above = |sorted: &[f64], t: f64| (sorted.len() - sorted.partition_point(|&s| s <= t)) as u64;

    let mut ts = thresholds.to_vec();
    ts.sort_by(f64::total_cmp);
    let (np, nn) = (positives.len() as f64, negatives.len() as f64);
    Ok(ts
        .into_iter()
        .map(|t| {
            let tp = above(&positives, t);
            let fp = above(&negatives, t);
            SweepPoint {
                threshold: t,
                tp,
                fp,
                tpr: tp as f64 / np,
                fpr: fp as f64 / nn,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossRankRow {
    pub a: DocId,
    pub b: DocId,
    pub score: f64,
    /// 1-based rank under this list's score.
    pub rank: usize,
    pub other_score: f64,
    /// Rank under the other score, uncapped.
    pub other_rank: usize,
    pub in_both: bool,
}

/// Top-k of two scorings of the same pairs, side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossRank {
    pub k: usize,
    pub left: Vec<CrossRankRow>,
    pub right: Vec<CrossRankRow>,
}

impl CrossRank {
    pub fn overlap(&self) -> usize {
        self.left.iter().filter(|r| r.in_both).count()
    }

    pub fn transposed(&self) -> CrossRank {
        CrossRank {
            k: self.k,
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    /// Fixed-column report. With `truth`, each row also shows the number of
    /// groups shared by the pair.
    pub fn to_text(&self, corpus: &Corpus, names: (&str, &str), truth: Option<&TruthIndex>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "top {} overlap: {}", self.k, self.overlap());
        for (rows, this) in [(&self.left, names.0), (&self.right, names.1)] {
            let _ = writeln!(out);
            let _ = writeln!(out, "top {} by {this}", self.k);
            let _ = writeln!(
                out,
                "{:>6} {:>12} {:>12} {:>14} {:>10} {:>14} {:>5} {:>6}",
                "rank", "first", "second", "score", "other_rank", "other_score", "both", "groups"
            );
            for r in rows {
                let groups = truth.map_or("-".to_owned(), |t| t.shared_groups(r.a, r.b).to_string());
                let _ = writeln!(
                    out,
                    "{:>6} {:>12} {:>12} {:>14.6} {:>10} {:>14.6} {:>5} {:>6}",
                    r.rank,
                    corpus.doc_label(r.a),
                    corpus.doc_label(r.b),
                    r.score,
                    r.other_rank,
                    r.other_score,
                    if r.in_both { "yes" } else { "no" },
                    groups
                );
            }
        }
        out
    }

    pub fn to_csv(&self, corpus: &Corpus, names: (&str, &str), truth: Option<&TruthIndex>) -> String {
        let mut out = String::from("list,rank,docA,docB,score,other_rank,other_score,in_both,groups\n");
        for (rows, name) in [(&self.left, names.0), (&self.right, names.1)] {
            for r in rows {
                let groups = truth.map_or(String::new(), |t| t.shared_groups(r.a, r.b).to_string());
                let _ = writeln!(
                    out,
                    "{name},{},{},{},{},{},{},{},{groups}",
                    r.rank,
                    corpus.doc_label(r.a),
                    corpus.doc_label(r.b),
                    r.score,
                    r.other_rank,
                    r.other_score,
                    r.in_both
                );
            }
        }
        out
    }
}

/// Order: score descending, then the pair's labels ascending.
fn ranking(scores: &[ScoredPair], corpus: &Corpus) -> Vec<usize> {
    let labels = |p: &ScoredPair| {
        let (a, b) = (corpus.doc_label(p.a), corpus.doc_label(p.b));
        (a.min(b), a.max(b))
    };
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| {
        scores[j]
            .score
            .total_cmp(&scores[i].score)
            .then_with(|| labels(&scores[i]).cmp(&labels(&scores[j])))
            .then_with(|| scores[i].key().cmp(&scores[j].key()))
    });
    order
}

pub fn topk_crossrank(
    left: &[ScoredPair],
    right: &[ScoredPair],
    k: usize,
    corpus: &Corpus,
) -> Result<CrossRank> {
    if k > left.len() || k > right.len() {
        return Err(Error::Argument(format!(
            "k = {k} exceeds the number of scored pairs ({}, {})",
            left.len(),
            right.len()
        )));
    }
    let index = |list: &[ScoredPair]| -> Result<HashMap<(DocId, DocId), usize>> {
        let mut map = HashMap::with_capacity(list.len());
        for (i, p) in list.iter().enumerate() {
            if map.insert(p.key(), i).is_some() {
                return Err(Error::Argument(format!(
                    "pair ({}, {}) scored twice",
                    corpus.doc_label(p.a),
                    corpus.doc_label(p.b)
                )));
            }
        }
        Ok(map)
    };
    let (left_pos, right_pos) = (index(left)?, index(right)?);
    if left_pos.len() != right_pos.len() || left_pos.keys().any(|key| !right_pos.contains_key(key)) {
        return Err(Error::Argument("the two score lists cover different pairs".into()));
    }

    let rank_of = |order: &[usize], list: &[ScoredPair]| -> HashMap<(DocId, DocId), usize> {
        order
            .iter()
            .enumerate()
            .map(|(r, &i)| (list[i].key(), r + 1))
            .collect()
    };
    let (left_order, right_order) = (ranking(left, corpus), ranking(right, corpus));
    let (left_rank, right_rank) = (rank_of(&left_order, left), rank_of(&right_order, right));

    let rows = |order: &[usize],
                list: &[ScoredPair],
                other: &[ScoredPair],
                other_pos: &HashMap<(DocId, DocId), usize>,
                other_rank: &HashMap<(DocId, DocId), usize>| {
        order[..k]
            .iter()
            .enumerate()
            .map(|(r, &i)| {
                let key = list[i].key();
                let orank = other_rank[&key];
                CrossRankRow {
                    a: key.0,
                    b: key.1,
                    score: list[i].score,
                    rank: r + 1,
                    other_score: other[other_pos[&key]].score,
                    other_rank: orank,
                    in_both: orank <= k,
                }
            })
            .collect::<Vec<_>>()
    };

    Ok(CrossRank {
        k,
        left: rows(&left_order, left, right, &right_pos, &right_rank),
        right: rows(&right_order, right, left, &left_pos, &left_rank),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDiagnostics {
    pub first: DocId,
    pub second: DocId,
    /// `D(d)`; for graphs the degree counting the vertex itself.
    pub total_first: u64,
    pub total_second: u64,
    pub common: u64,
    /// Mean and median of `T(t)` over the common terms.
    pub mean_common_total: Option<f64>,
    pub median_common_total: Option<f64>,
    pub kind: CorpusKind,
}

impl PairDiagnostics {
    /// Row names, worded for graphs or for documents.
    pub fn field_names(kind: CorpusKind) -> [&'static str; 5] {
        match kind {
            CorpusKind::Graph => [
                "degree(first)",
                "degree(second)",
                "common nbrs",
                "avg deg common nbrs",
                "med deg common nbrs",
            ],
            CorpusKind::Documents => [
                "doc total(first)",
                "doc total(second)",
                "common terms",
                "avg term total",
                "med term total",
            ],
        }
    }
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

pub fn pair_diagnostics(a: DocId, b: DocId, corpus: &Corpus) -> Result<PairDiagnostics> {
    let members = sorted_members(corpus, &[a, b])?;
    let common = common_counts(corpus, &members);
    let mut totals: Vec<f64> = common
        .iter()
        .map(|&(t, _)| corpus.term_total(t) as f64)
        .collect();
    let mean = if totals.is_empty() {
        None
    } else {
        Some(totals.iter().sum::<f64>() / totals.len() as f64)
    };
    Ok(PairDiagnostics {
        first: a,
        second: b,
        total_first: corpus.doc_total(a),
        total_second: corpus.doc_total(b),
        common: common.iter().map(|&(_, c)| c).sum(),
        mean_common_total: mean,
        median_common_total: median(&mut totals),
        kind: corpus.kind(),
    })
}
