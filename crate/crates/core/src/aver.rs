//! Association via entropy reduction.
//!
//! Positing a collaboration among a document set `A` moves the counts the
//! members share, `c'(t, d_A) = min_{d in A} c(t, d)`, out of every member and
//! into one new document `d_A`. The score is the entropy of the rank-one model
//! fitted to the original corpus minus that of the modified corpus.
//!
//! [`aver_fast`] only touches the common terms and the members of `A`, using
//! the cached corpus quantity `e`. [`aver_direct`] materializes the modified
//! corpus and recomputes its entropy from scratch; it is the reference the
//! fast path is checked against.

use crate::corpus::{x_ln_x, Corpus, CorpusKind, DocId, LabelMap, TermId};
use crate::error::{Error, Result};

/// Counts induced by positing a collaboration among `members`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollabDelta {
    /// Sorted ascending, distinct.
    pub members: Vec<DocId>,
    /// `c'(t, d_A)` for every term with a positive minimum, sorted by term.
    pub common: Vec<(TermId, u64)>,
    /// `T'(t) = T(t) - (|A|-1) c'(t, d_A)`, parallel to `common`.
    pub primed_term_totals: Vec<u64>,
    /// `D'(d) = D(d) - D'(d_A)`, parallel to `members`.
    pub residual_doc_totals: Vec<u64>,
    /// `D'(d_A)`.
    pub collab_total: u64,
    /// `N' = N - (|A|-1) D'(d_A)`.
    pub n_prime: u64,
}

/// A document set with its score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSet {
    pub members: Vec<DocId>,
    pub score: f64,
    /// `D'(d_A)`, the mass the members have in common.
    pub common_terms: u64,
}

pub(crate) fn sorted_members(corpus: &Corpus, members: &[DocId]) -> Result<Vec<DocId>> {
    if members.is_empty() {
        return Err(Error::Argument("document set is empty".into()));
    }
    for &d in members {
        corpus.check_doc(d).map_err(|_| {
            Error::Argument(format!("unknown document id {}", d.0))
        })?;
    }
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Argument("document set has duplicate members".into()));
    }
    Ok(sorted)
}

/// Common counts of a sorted, validated member set, walking the shortest row.
pub(crate) fn common_counts(corpus: &Corpus, members: &[DocId]) -> Vec<(TermId, u64)> {
    let pivot = *members
        .iter()
        .min_by_key(|&&d| (corpus.doc(d).len(), d))
        .expect("non-empty member set");
    corpus
        .doc(pivot)
        .iter()
        .filter_map(|(t, c)| {
            let mut m = c;
            for &d in members {
                if d != pivot {
                    m = m.min(corpus.doc(d).get(t));
                    if m == 0 {
                        return None;
                    }
                }
            }
            Some((t, m))
        })
        .collect()
}

pub fn collaboration(members: &[DocId], corpus: &Corpus) -> Result<CollabDelta> {
    let members = sorted_members(corpus, members)?;
    let common = common_counts(corpus, &members);
    let extra = members.len() as u64 - 1;
    let collab_total: u64 = common.iter().map(|&(_, c)| c).sum();
    let primed_term_totals = common
        .iter()
        .map(|&(t, c)| corpus.term_total(t) - extra * c)
        .collect();
    let residual_doc_totals = members
        .iter()
        .map(|&d| corpus.doc_total(d) - collab_total)
        .collect();
    Ok(CollabDelta {
        members,
        common,
        primed_term_totals,
        residual_doc_totals,
        collab_total,
        n_prime: corpus.total() - extra * collab_total,
    })
}

/// Local-update evaluation of the score from a precomputed delta.
pub fn aver_fast(delta: &CollabDelta, corpus: &Corpus) -> Result<f64> {
    if delta.n_prime == 0 {
        return Err(Error::Domain("modified corpus is empty".into()));
    }
    let n = corpus.total() as f64;
    let n_prime = delta.n_prime as f64;
    let removed = (corpus.total() - delta.n_prime) as f64;

    let term_part: f64 = delta
        .common
        .iter()
        .zip(&delta.primed_term_totals)
        .map(|(&(t, _), &primed)| x_ln_x(corpus.term_total(t)) - x_ln_x(primed))
        .sum();
    let doc_part: f64 = delta
        .members
        .iter()
        .zip(&delta.residual_doc_totals)
        .map(|(&d, &residual)| x_ln_x(corpus.doc_total(d)) - x_ln_x(residual))
        .sum();
    let collab_part = x_ln_x(delta.collab_total);

    Ok(2.0 * (n / n_prime).ln() + removed / (n * n_prime) * corpus.e()
        - term_part / n_prime
        - doc_part / n_prime
        + collab_part / n_prime)
}

/// `collaboration` followed by `aver_fast`.
pub fn aver(members: &[DocId], corpus: &Corpus) -> Result<f64> {
    aver_fast(&collaboration(members, corpus)?, corpus)
}

/// Entropies of the original and collaboration-modified corpora.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReduction {
    pub entropy: f64,
    pub modified_entropy: f64,
    pub score: f64,
}

/// Builds the modified corpus explicitly and recomputes its entropy.
pub fn aver_direct_detail(members: &[DocId], corpus: &Corpus) -> Result<EntropyReduction> {
    let members = sorted_members(corpus, members)?;

    // c'(t, d_A) by scanning every term, independent of the fast path's
    // row intersection.
    let collab_row: Vec<(TermId, u64)> = corpus
        .term_ids()
        .filter_map(|t| {
            let m = members
                .iter()
                .map(|&d| corpus.count(t, d))
                .min()
                .unwrap_or(0);
            (m > 0).then_some((t, m))
        })
        .collect();

    let mut docs = LabelMap::new();
    let mut rows = Vec::with_capacity(corpus.num_docs() + 1);
    for d in corpus.doc_ids() {
        docs.intern(&d.0.to_string());
        let row: Vec<(TermId, u64)> = if members.binary_search(&d).is_ok() {
            corpus
                .doc(d)
                .iter()
                .filter_map(|(t, c)| {
                    let shared = collab_row
                        .binary_search_by_key(&t, |&(id, _)| id)
                        .map(|pos| collab_row[pos].1)
                        .unwrap_or(0);
                    (c > shared).then_some((t, c - shared))
                })
                .collect()
        } else {
            corpus.doc(d).iter().collect()
        };
        rows.push(row);
    }
    docs.intern("collaboration");
    rows.push(collab_row);

    let modified = Corpus::from_rows(
        CorpusKind::Documents,
        corpus.term_labels().clone(),
        docs,
        rows,
    );
    let entropy = corpus.entropy()?;
    let modified_entropy = modified.entropy()?;
    Ok(EntropyReduction {
        entropy,
        modified_entropy,
        score: entropy - modified_entropy,
    })
}

pub fn aver_direct(members: &[DocId], corpus: &Corpus) -> Result<f64> {
    aver_direct_detail(members, corpus).map(|r| r.score)
}

/// Partial derivative of the score with respect to one term total, all other
/// quantities in the local-update formula held fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    pub derivative: f64,
    /// `N (ln T - ln(T - m)) / (ln T + 1)`.
    pub bound: f64,
    /// Whether `N - N'` is strictly below `bound`, which makes the derivative
    /// negative.
    pub bound_holds: bool,
}

/// `m` is the mass the collaboration removes from the term,
/// `(|A|-1) c'(t, d_A)`.
pub fn frequency_sensitivity(
    term_total: u64,
    m: u64,
    n: u64,
    n_prime: u64,
) -> Result<Sensitivity> {
    if term_total <= m {
        return Err(Error::Domain(format!(
            "term total {term_total} must exceed collaboration mass {m}"
        )));
    }
    if n_prime == 0 || n_prime > n {
        return Err(Error::Domain(format!(
            "need 0 < N' <= N, got N = {n}, N' = {n_prime}"
        )));
    }
    let ln_t = (term_total as f64).ln();
    let ln_rest = ((term_total - m) as f64).ln();
    let (nf, npf) = (n as f64, n_prime as f64);
    let derivative = -(ln_t + 1.0) / nf + (ln_rest + 1.0) / npf;
    let bound = nf * (ln_t - ln_rest) / (ln_t + 1.0);
    Ok(Sensitivity {
        derivative,
        bound,
        bound_holds: ((n - n_prime) as f64) < bound,
    })
}
