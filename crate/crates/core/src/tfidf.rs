//! Smoothed tf-idf weights and the cosine association between two documents.

use crate::corpus::{Corpus, DocId, TermId};
use crate::error::{Error, Result};

/// `c / D(d)`.
pub fn term_frequency(count: u64, doc_total: u64) -> Result<f64> {
    if doc_total == 0 {
        return Err(Error::Domain("term frequency in an empty document".into()));
    }
    if count > doc_total {
        return Err(Error::Domain(format!(
            "count {count} exceeds document total {doc_total}"
        )));
    }
    Ok(count as f64 / doc_total as f64)
}

/// Smoothed idf `1 + ln(|D| / (M + 1))` for a term found in `doc_frequency`
/// of `num_docs` documents.
pub fn smoothed_idf(num_docs: usize, doc_frequency: usize) -> f64 {
    1.0 + (num_docs as f64 / (doc_frequency as f64 + 1.0)).ln()
}

pub fn inverse_document_frequency(t: TermId, corpus: &Corpus) -> Result<f64> {
    corpus.check_term(t)?;
    if corpus.num_docs() == 0 {
        return Err(Error::Domain("idf over an empty collection".into()));
    }
    Ok(smoothed_idf(corpus.num_docs(), corpus.doc_frequency(t)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub doc: DocId,
    /// Sorted by term, every weight positive.
    pub entries: Vec<(TermId, f64)>,
    pub norm: f64,
}

impl WeightVector {
    pub fn get(&self, t: TermId) -> f64 {
        match self.entries.binary_search_by_key(&t, |&(id, _)| id) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    /// Unit-length copy; empty stays empty.
    pub fn normalized(&self) -> Vec<(TermId, f64)> {
        if self.norm == 0.0 {
            return Vec::new();
        }
        self.entries
            .iter()
            .map(|&(t, w)| (t, w / self.norm))
            .collect()
    }
}

/// Per-corpus idf table, so bulk scoring does not recompute document
/// frequencies for every pair.
#[derive(Debug, Clone)]
pub struct TfIdf<'c> {
    corpus: &'c Corpus,
    idf: Vec<f64>,
    norms: Vec<f64>,
}

impl<'c> TfIdf<'c> {
    pub fn new(corpus: &'c Corpus) -> Self {
        let n_docs = corpus.num_docs();
        let idf: Vec<f64> = corpus
            .term_ids()
            .map(|t| smoothed_idf(n_docs, corpus.doc_frequency(t)))
            .collect();
        let mut model = TfIdf {
            corpus,
            idf,
            norms: Vec::new(),
        };
        model.norms = corpus
            .doc_ids()
            .map(|d| {
                model
                    .weights(d)
                    .map(|(_, w)| w * w)
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        model
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    pub fn idf(&self, t: TermId) -> f64 {
        self.idf[t.index()]
    }

    fn weights(&self, d: DocId) -> impl Iterator<Item = (TermId, f64)> + '_ {
        let total = self.corpus.doc_total(d) as f64;
        self.corpus
            .doc(d)
            .iter()
            .map(move |(t, c)| (t, c as f64 / total * self.idf[t.index()]))
    }

    pub fn weight_vector(&self, d: DocId) -> Result<WeightVector> {
        self.corpus.check_doc(d)?;
        Ok(WeightVector {
            doc: d,
            entries: self.weights(d).collect(),
            norm: self.norms[d.index()],
        })
    }

    /// Cosine of the two weight vectors; 0 when either document is empty.
    pub fn association(&self, a: DocId, b: DocId) -> Result<f64> {
        self.corpus.check_doc(a)?;
        self.corpus.check_doc(b)?;
        let (na, nb) = (self.norms[a.index()], self.norms[b.index()]);
        if na == 0.0 || nb == 0.0 {
            return Ok(0.0);
        }
        let (ra, rb) = (self.corpus.doc(a), self.corpus.doc(b));
        let (ta, tb) = (
            self.corpus.doc_total(a) as f64,
            self.corpus.doc_total(b) as f64,
        );
        let (ia, ca) = (ra.ids(), ra.counts());
        let (ib, cb) = (rb.ids(), rb.counts());

        let (mut i, mut j) = (0, 0);
        let mut dot = 0.0;
        while i < ia.len() && j < ib.len() {
            match ia[i].cmp(&ib[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let idf = self.idf[ia[i].index()];
                    let va = ca[i] as f64 / ta * idf / na;
                    let vb = cb[j] as f64 / tb * idf / nb;
                    dot += va * vb;
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(dot)
    }
}

pub fn weight_vector(d: DocId, corpus: &Corpus) -> Result<WeightVector> {
    TfIdf::new(corpus).weight_vector(d)
}

pub fn tfidf_association(a: DocId, b: DocId, corpus: &Corpus) -> Result<f64> {
    TfIdf::new(corpus).association(a, b)
}
