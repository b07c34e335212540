//! Candidate pairs by common-term thresholding, and greedy growth of seed
//! sets into larger high-scoring sets.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::aver::{common_counts, sorted_members, ScoredSet};
use crate::corpus::{Corpus, DocId};
use crate::error::{Error, Result};
use crate::score::SetScorer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidatePair {
    pub a: DocId,
    pub b: DocId,
    /// `Σ_t min(c(t, a), c(t, b))`.
    pub common: u64,
}

/// `Σ_t min_{d in A} c(t, d)`.
pub fn common_count(members: &[DocId], corpus: &Corpus) -> Result<u64> {
    let members = sorted_members(corpus, members)?;
    Ok(common_counts(corpus, &members).iter().map(|&(_, c)| c).sum())
}

/// Every unordered pair whose common count reaches `min_common`, ascending by
/// `(a, b)`.
///
/// Works row by row: for each document `a`, min-count contributions are
/// accumulated along the posting lists of `a`'s terms for partners `b > a`.
/// Rows are independent and are processed in parallel.
pub fn generate_pairs(corpus: &Corpus, min_common: u64) -> Result<Vec<CandidatePair>> {
    if min_common == 0 {
        return Err(Error::Argument("min_common must be at least 1".into()));
    }
    let n = corpus.num_docs();
    let rows: Vec<Vec<CandidatePair>> = (0..n as u32)
        .into_par_iter()
        .map_init(
            || (vec![0u64; n], Vec::<u32>::new()),
            |(acc, touched), a| pairs_from(corpus, DocId(a), min_common, acc, touched),
        )
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

fn pairs_from(
    corpus: &Corpus,
    a: DocId,
    min_common: u64,
    acc: &mut [u64],
    touched: &mut Vec<u32>,
) -> Vec<CandidatePair> {
    if corpus.doc_total(a) < min_common {
        return Vec::new();
    }
    for (t, ca) in corpus.doc(a).iter() {
        let postings = corpus.term(t);
        let ids = postings.ids();
        let start = ids.partition_point(|&d| d <= a);
        for (&b, &cb) in ids[start..].iter().zip(&postings.counts()[start..]) {
            let slot = &mut acc[b.index()];
            if *slot == 0 {
                touched.push(b.0);
            }
            *slot += ca.min(cb);
        }
    }
    touched.sort_unstable();
    let mut out = Vec::new();
    for &b in touched.iter() {
        let common = std::mem::take(&mut acc[b as usize]);
        if common >= min_common {
            out.push(CandidatePair {
                a,
                b: DocId(b),
                common,
            });
        }
    }
    touched.clear();
    out
}

/// Hill-climbs from `seed`: each step tries every document whose addition
/// keeps the common count at or above `min_common`, and moves to the best
/// strictly better set. Ties go to the smallest document id.
pub fn expand_set(
    seed: &[DocId],
    corpus: &Corpus,
    min_common: u64,
    scorer: &dyn SetScorer,
) -> Result<ScoredSet> {
    let mut current = sorted_members(corpus, seed)?;
    let mut common = common_counts(corpus, &current);
    let mut common_total: u64 = common.iter().map(|&(_, c)| c).sum();
    if common_total < min_common {
        return Err(Error::Argument(format!(
            "seed common count {common_total} is below the threshold {min_common}"
        )));
    }
    let mut score = scorer.score(&current)?;

    loop {
        let mut reach: HashMap<DocId, u64> = HashMap::new();
        for &(t, shared) in &common {
            for (d, c) in corpus.term(t).iter() {
                *reach.entry(d).or_insert(0) += shared.min(c);
            }
        }
        let mut candidates: Vec<DocId> = reach
            .into_iter()
            .filter(|&(d, n)| n >= min_common && current.binary_search(&d).is_err())
            .map(|(d, _)| d)
            .collect();
        candidates.sort_unstable();

        let mut best: Option<(Vec<DocId>, f64)> = None;
        let mut best_score = score;
        for d in candidates {
            let mut grown = current.clone();
            let pos = grown.binary_search(&d).unwrap_err();
            grown.insert(pos, d);
            let s = scorer.score(&grown)?;
            if s > best_score {
                best_score = s;
                best = Some((grown, s));
            }
        }
        match best {
            Some((grown, s)) => {
                current = grown;
                score = s;
                common = common_counts(corpus, &current);
                common_total = common.iter().map(|&(_, c)| c).sum();
            }
            None => break,
        }
    }

    Ok(ScoredSet {
        members: current,
        score,
        common_terms: common_total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedSet {
    pub set: ScoredSet,
    /// How many seeds ended at this set.
    pub multiplicity: usize,
}

/// Expands every seed and returns the distinct resulting sets, best first,
/// truncated to `top_k`. Seeds below `min_common` are skipped.
pub fn batch_expand(
    seeds: &[Vec<DocId>],
    corpus: &Corpus,
    min_common: u64,
    scorer: &dyn SetScorer,
    top_k: usize,
) -> Result<Vec<ExpandedSet>> {
    let expanded: Vec<Option<ScoredSet>> = seeds
        .par_iter()
        .map(|seed| {
            if common_count(seed, corpus)? < min_common {
                return Ok(None);
            }
            expand_set(seed, corpus, min_common, scorer).map(Some)
        })
        .collect::<Result<_>>()?;

    let mut distinct: BTreeMap<Vec<DocId>, ExpandedSet> = BTreeMap::new();
    for set in expanded.into_iter().flatten() {
        distinct
            .entry(set.members.clone())
            .and_modify(|e| e.multiplicity += 1)
            .or_insert(ExpandedSet {
                set,
                multiplicity: 1,
            });
    }
    let mut out: Vec<ExpandedSet> = distinct.into_values().collect();
    out.sort_by(|x, y| {
        y.set
            .score
            .total_cmp(&x.set.score)
            .then_with(|| x.set.members.cmp(&y.set.members))
    });
    out.truncate(top_k);
    Ok(out)
}
