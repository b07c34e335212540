//! Immutable sparse term/document count structure.
//!
//! Counts are kept twice, once grouped by document and once grouped by term,
//! so that scoring can walk either a document's terms or a term's postings.
//! Totals and the cached entropy quantity `e = Σ T ln T + Σ D ln D` are
//! computed once at build time.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DocId(pub u32);

impl TermId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl DocId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

impl fmt::Display for DocId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.0)
    }
}

/// `x ln x` with `0 ln 0 = 0`.
#[inline]
pub fn x_ln_x(x: u64) -> f64 {
    if x == 0 {
        0.0
    } else {
        let x = x as f64;
        x * x.ln()
    }
}

/// Bijection between string labels and dense handles, in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelMap {
    labels: Vec<String>,
    index: HashMap<String, u32>,
}

impl LabelMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: &str) -> u32 {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    /// Appends a label that must not already be present.
    pub(crate) fn push_new(&mut self, label: String) -> Option<u32> {
        if self.index.contains_key(&label) {
            return None;
        }
        let id = self.labels.len() as u32;
        self.index.insert(label.clone(), id);
        self.labels.push(label);
        Some(id)
    }

    pub fn get(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: u32) -> Option<&str> {
        self.labels.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }
}

/// How a corpus was ingested. Graph corpora share one label space between
/// documents and terms: user `u` is document `u` and term `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    Documents,
    Graph,
}

impl CorpusKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CorpusKind::Documents => "docs",
            CorpusKind::Graph => "edges",
        }
    }
}

/// One sparse row: ids ascending, every count positive.
#[derive(Debug, Clone, Copy)]
pub struct Row<'a, I> {
    ids: &'a [I],
    counts: &'a [u64],
}

impl<'a, I: Copy + Ord> Row<'a, I> {
    pub fn ids(&self) -> &'a [I] {
        self.ids
    }

    pub fn counts(&self) -> &'a [u64] {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (I, u64)> + 'a {
        self.ids.iter().copied().zip(self.counts.iter().copied())
    }

    /// Count stored for `id`, or 0.
    pub fn get(&self, id: I) -> u64 {
        match self.ids.binary_search(&id) {
            Ok(pos) => self.counts[pos],
            Err(_) => 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    kind: CorpusKind,
    terms: LabelMap,
    docs: LabelMap,

    doc_ptr: Vec<usize>,
    doc_terms: Vec<TermId>,
    doc_counts: Vec<u64>,

    term_ptr: Vec<usize>,
    term_docs: Vec<DocId>,
    term_counts: Vec<u64>,

    term_totals: Vec<u64>,
    doc_totals: Vec<u64>,
    total: u64,
    e: f64,
}

impl Corpus {
    /// Builds from already-interned rows. Each row must be sorted by term with
    /// positive counts; `rows.len()` must equal `docs.len()`.
    pub(crate) fn from_rows(
        kind: CorpusKind,
        terms: LabelMap,
        docs: LabelMap,
        rows: Vec<Vec<(TermId, u64)>>,
    ) -> Corpus {
        debug_assert_eq!(rows.len(), docs.len());
        let n_terms = terms.len();
        let nnz: usize = rows.iter().map(Vec::len).sum();

        let mut doc_ptr = Vec::with_capacity(rows.len() + 1);
        let mut doc_terms = Vec::with_capacity(nnz);
        let mut doc_counts = Vec::with_capacity(nnz);
        let mut doc_totals = Vec::with_capacity(rows.len());
        let mut term_totals = vec![0u64; n_terms];
        let mut doc_freq = vec![0usize; n_terms];

        doc_ptr.push(0);
        for row in &rows {
            let mut dt = 0u64;
            for &(t, c) in row {
                debug_assert!(c > 0);
                doc_terms.push(t);
                doc_counts.push(c);
                term_totals[t.index()] += c;
                doc_freq[t.index()] += 1;
                dt += c;
            }
            doc_totals.push(dt);
            doc_ptr.push(doc_terms.len());
        }

        // Counting sort into term-major order; docs are visited ascending so
        // every posting list comes out sorted.
        let mut term_ptr = Vec::with_capacity(n_terms + 1);
        term_ptr.push(0);
        for &f in &doc_freq {
            let last = *term_ptr.last().unwrap();
            term_ptr.push(last + f);
        }
        let mut cursor = term_ptr[..n_terms].to_vec();
        let mut term_docs = vec![DocId(0); nnz];
        let mut term_counts = vec![0u64; nnz];
        for (d, row) in rows.iter().enumerate() {
            for &(t, c) in row {
                let slot = &mut cursor[t.index()];
                term_docs[*slot] = DocId(d as u32);
                term_counts[*slot] = c;
                *slot += 1;
            }
        }

        let total = doc_totals.iter().sum();
        let e = term_totals.iter().map(|&t| x_ln_x(t)).sum::<f64>()
            + doc_totals.iter().map(|&d| x_ln_x(d)).sum::<f64>();

        Corpus {
            kind,
            terms,
            docs,
            doc_ptr,
            doc_terms,
            doc_counts,
            term_ptr,
            term_docs,
            term_counts,
            term_totals,
            doc_totals,
            total,
            e,
        }
    }

    /// Bag-of-words documents labelled `d0`, `d1`, ... in input order.
    pub fn from_documents<I, D, S>(docs: I) -> Corpus
    where
        I: IntoIterator<Item = D>,
        D: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut builder = DocumentBuilder::new();
        for (i, doc) in docs.into_iter().enumerate() {
            builder
                .add(format!("d{i}"), doc)
                .expect("generated document labels are unique");
        }
        builder.build()
    }

    /// Builds the closed-neighbourhood corpus of an undirected graph.
    pub fn from_edges<I, S>(edges: I) -> Corpus
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut builder = GraphBuilder::new();
        for (a, b) in edges {
            builder.add_edge(a.as_ref(), b.as_ref());
        }
        builder.build()
    }

    /// Parses the document text format: one document per line, whitespace
    /// separated tokens, `#` lines ignored. A blank line is an empty document.
    pub fn read_documents<R: BufRead>(reader: R) -> Result<Corpus> {
        let mut builder = DocumentBuilder::new();
        let mut index = 0usize;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            if line.trim_start().starts_with('#') {
                continue;
            }
            builder
                .add(format!("d{index}"), line.split_whitespace())
                .expect("generated document labels are unique");
            index += 1;
        }
        Ok(builder.build())
    }

    /// Parses a SNAP-style edge list: `u v` per line, `#` comments and blank
    /// lines skipped.
    pub fn read_edges<R: BufRead>(reader: R) -> Result<Corpus> {
        let mut builder = GraphBuilder::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            match (tokens.next(), tokens.next(), tokens.next()) {
                (Some(a), Some(b), None) => builder.add_edge(a, b),
                _ => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        message: format!("expected two vertex labels, got {trimmed:?}"),
                    })
                }
            }
        }
        Ok(builder.build())
    }

    pub fn load_documents(path: impl AsRef<Path>) -> Result<Corpus> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Corpus::read_documents(BufReader::new(file))
    }

    pub fn load_edges(path: impl AsRef<Path>) -> Result<Corpus> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Corpus::read_edges(BufReader::new(file))
    }

    /// Renders the corpus in the document text format, terms in id order with
    /// each repeated by its count.
    pub fn to_document_text(&self) -> String {
        let mut out = String::new();
        for d in self.doc_ids() {
            let mut first = true;
            for (t, c) in self.doc(d).iter() {
                for _ in 0..c {
                    if !first {
                        out.push(' ');
                    }
                    out.push_str(self.term_label(t));
                    first = false;
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn kind(&self) -> CorpusKind {
        self.kind
    }

    pub fn num_terms(&self) -> usize {
        self.term_totals.len()
    }

    pub fn num_docs(&self) -> usize {
        self.doc_totals.len()
    }

    /// Number of stored (term, doc, count) triples.
    pub fn nnz(&self) -> usize {
        self.doc_terms.len()
    }

    /// Grand total N.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Cached `Σ T ln T + Σ D ln D`.
    pub fn e(&self) -> f64 {
        self.e
    }

    pub fn term_total(&self, t: TermId) -> u64 {
        self.term_totals[t.index()]
    }

    pub fn doc_total(&self, d: DocId) -> u64 {
        self.doc_totals[d.index()]
    }

    pub fn term_totals(&self) -> &[u64] {
        &self.term_totals
    }

    pub fn doc_totals(&self) -> &[u64] {
        &self.doc_totals
    }

    /// Number of documents containing `t`.
    pub fn doc_frequency(&self, t: TermId) -> usize {
        self.term_ptr[t.index() + 1] - self.term_ptr[t.index()]
    }

    pub fn doc(&self, d: DocId) -> Row<'_, TermId> {
        let (lo, hi) = (self.doc_ptr[d.index()], self.doc_ptr[d.index() + 1]);
        Row {
            ids: &self.doc_terms[lo..hi],
            counts: &self.doc_counts[lo..hi],
        }
    }

    /// Posting list of `t`, documents ascending.
    pub fn term(&self, t: TermId) -> Row<'_, DocId> {
        let (lo, hi) = (self.term_ptr[t.index()], self.term_ptr[t.index() + 1]);
        Row {
            ids: &self.term_docs[lo..hi],
            counts: &self.term_counts[lo..hi],
        }
    }

    pub fn count(&self, t: TermId, d: DocId) -> u64 {
        self.doc(d).get(t)
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = DocId> {
        (0..self.num_docs() as u32).map(DocId)
    }

    pub fn term_ids(&self) -> impl Iterator<Item = TermId> {
        (0..self.num_terms() as u32).map(TermId)
    }

    /// All stored `(term, doc, count)` triples in doc-major order.
    pub fn triples(&self) -> impl Iterator<Item = (TermId, DocId, u64)> + '_ {
        self.doc_ids()
            .flat_map(move |d| self.doc(d).iter().map(move |(t, c)| (t, d, c)))
    }

    pub fn doc_label(&self, d: DocId) -> &str {
        self.docs.label(d.0).expect("doc id in range")
    }

    pub fn term_label(&self, t: TermId) -> &str {
        self.terms.label(t.0).expect("term id in range")
    }

    pub fn doc_id(&self, label: &str) -> Option<DocId> {
        self.docs.get(label).map(DocId)
    }

    pub fn term_id(&self, label: &str) -> Option<TermId> {
        self.terms.get(label).map(TermId)
    }

    pub fn doc_labels(&self) -> &LabelMap {
        &self.docs
    }

    pub fn term_labels(&self) -> &LabelMap {
        &self.terms
    }

    pub fn check_doc(&self, d: DocId) -> Result<()> {
        if d.index() < self.num_docs() {
            Ok(())
        } else {
            Err(Error::Lookup { kind: "document", id: d.0 })
        }
    }

    pub fn check_term(&self, t: TermId) -> Result<()> {
        if t.index() < self.num_terms() {
            Ok(())
        } else {
            Err(Error::Lookup { kind: "term", id: t.0 })
        }
    }

    /// Entropy of the fitted rank-one model, in nats.
    pub fn entropy(&self) -> Result<f64> {
        if self.total == 0 {
            return Err(Error::Domain("entropy of an empty corpus".into()));
        }
        Ok(entropy_from_totals(
            self.term_totals.iter().copied(),
            self.doc_totals.iter().copied(),
            self.total,
        ))
    }

    /// Same entropy via the cached quantity: `2 ln N - e / N`.
    pub fn entropy_from_cache(&self) -> Result<f64> {
        if self.total == 0 {
            return Err(Error::Domain("entropy of an empty corpus".into()));
        }
        let n = self.total as f64;
        Ok(2.0 * n.ln() - self.e / n)
    }

    /// Term-major triples, for consistency checks against the doc-major view.
    pub fn term_major_triples(&self) -> impl Iterator<Item = (TermId, DocId, u64)> + '_ {
        self.term_ids()
            .flat_map(move |t| self.term(t).iter().map(move |(d, c)| (t, d, c)))
    }
}

/// `-Σ p ln p - Σ q ln q` with MLE probabilities `T/N` and `D/N`.
pub(crate) fn entropy_from_totals(
    term_totals: impl Iterator<Item = u64>,
    doc_totals: impl Iterator<Item = u64>,
    n: u64,
) -> f64 {
    let n = n as f64;
    let plogp = |x: u64| {
        if x == 0 {
            0.0
        } else {
            let p = x as f64 / n;
            p * p.ln()
        }
    };
    -(term_totals.map(plogp).sum::<f64>() + doc_totals.map(plogp).sum::<f64>())
}

/// Collects labelled bag-of-words documents.
#[derive(Debug, Default)]
pub struct DocumentBuilder {
    terms: LabelMap,
    docs: LabelMap,
    rows: Vec<Vec<(TermId, u64)>>,
}

impl DocumentBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a document; repeated tokens accumulate multiplicity.
    pub fn add<D, S>(&mut self, label: impl Into<String>, tokens: D) -> Result<DocId>
    where
        D: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let label = label.into();
        let id = self
            .docs
            .push_new(label.clone())
            .ok_or_else(|| Error::Argument(format!("duplicate document label {label:?}")))?;
        let mut counts: HashMap<TermId, u64> = HashMap::new();
        for tok in tokens {
            let t = TermId(self.terms.intern(tok.as_ref()));
            *counts.entry(t).or_insert(0) += 1;
        }
        let mut row: Vec<_> = counts.into_iter().collect();
        row.sort_unstable();
        self.rows.push(row);
        Ok(DocId(id))
    }

    pub fn build(self) -> Corpus {
        Corpus::from_rows(CorpusKind::Documents, self.terms, self.docs, self.rows)
    }
}

/// Collects an undirected simple graph and turns it into one document per
/// user holding its closed neighbourhood.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    users: LabelMap,
    adjacency: Vec<Vec<u32>>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_user(&mut self, label: &str) -> DocId {
        let id = self.users.intern(label);
        if id as usize == self.adjacency.len() {
            self.adjacency.push(Vec::new());
        }
        DocId(id)
    }

    pub fn add_edge(&mut self, a: &str, b: &str) {
        let a = self.add_user(a).0;
        let b = self.add_user(b).0;
        if a != b {
            self.adjacency[a as usize].push(b);
            self.adjacency[b as usize].push(a);
        }
    }

    pub fn build(self) -> Corpus {
        let rows = self
            .adjacency
            .into_iter()
            .enumerate()
            .map(|(u, mut nbrs)| {
                nbrs.push(u as u32);
                nbrs.sort_unstable();
                nbrs.dedup();
                nbrs.into_iter().map(|v| (TermId(v), 1)).collect()
            })
            .collect();
        Corpus::from_rows(CorpusKind::Graph, self.users.clone(), self.users, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_corpus() -> Corpus {
        Corpus::from_documents([
            "a star is born".split_whitespace(),
            "the star is bright".split_whitespace(),
            "born is a verb".split_whitespace(),
        ])
    }

    #[test]
    fn star_corpus_totals() {
        let c = star_corpus();
        assert_eq!(c.total(), 12);
        assert_eq!(c.num_docs(), 3);
        assert_eq!(c.num_terms(), 7);
        for d in c.doc_ids() {
            assert_eq!(c.doc_total(d), 4);
        }
        let t = |s| c.term_total(c.term_id(s).unwrap());
        assert_eq!(t("is"), 3);
        assert_eq!(t("star"), 2);
        assert_eq!(t("the"), 1);
        // first-appearance order
        assert_eq!(c.term_id("a"), Some(TermId(0)));
        assert_eq!(c.term_id("verb"), Some(TermId(6)));
        assert_eq!(c.doc_label(DocId(1)), "d1");
    }

    #[test]
    fn star_corpus_entropy() {
        let c = star_corpus();
        let e = c.entropy().unwrap();
        assert!((e - 2.96).abs() < 0.005, "{e}");
        assert!((c.e() - 24.09).abs() < 0.005, "{}", c.e());
    }

    #[test]
    fn empty_corpus() {
        let c = Corpus::from_documents(Vec::<Vec<&str>>::new());
        assert_eq!(c.total(), 0);
        assert_eq!(c.e(), 0.0);
        assert!(matches!(c.entropy(), Err(Error::Domain(_))));
    }

    #[test]
    fn multiplicity_kept() {
        let c = Corpus::from_documents([["x", "x"]]);
        assert_eq!(c.total(), 2);
        assert_eq!(c.term_total(TermId(0)), 2);
        assert_eq!(c.doc_total(DocId(0)), 2);
        assert_eq!(c.nnz(), 1);
    }

    #[test]
    fn single_occurrence_has_zero_entropy() {
        let c = Corpus::from_documents([["x"]]);
        assert_eq!(c.entropy().unwrap(), 0.0);
    }

    #[test]
    fn empty_document_retained() {
        let c = Corpus::read_documents("a b\n\n# skip\nb\n".as_bytes()).unwrap();
        assert_eq!(c.num_docs(), 3);
        assert_eq!(c.doc_total(DocId(1)), 0);
        assert_eq!(c.doc_label(DocId(2)), "d2");
    }

    #[test]
    fn path_graph_neighbourhoods() {
        let c = Corpus::from_edges([("a", "b"), ("b", "c")]);
        assert_eq!(c.kind(), CorpusKind::Graph);
        assert_eq!(c.total(), 7);
        let row = |s: &str| -> Vec<&str> {
            c.doc(c.doc_id(s).unwrap())
                .ids()
                .iter()
                .map(|&t| c.term_label(t))
                .collect()
        };
        assert_eq!(row("a"), ["a", "b"]);
        assert_eq!(row("b"), ["a", "b", "c"]);
        assert_eq!(row("c"), ["b", "c"]);
    }

    #[test]
    fn duplicate_edges_and_self_loops_collapse() {
        let c = Corpus::from_edges([("a", "b"), ("b", "a"), ("a", "a"), ("a", "b")]);
        assert_eq!(c.total(), 4);
        assert!(c.triples().all(|(_, _, n)| n == 1));
    }

    #[test]
    fn isolated_user() {
        let mut g = GraphBuilder::new();
        g.add_user("u");
        let c = g.build();
        assert_eq!(c.total(), 1);
        assert_eq!(c.doc(DocId(0)).ids(), &[TermId(0)]);
    }

    #[test]
    fn malformed_edge_line_reports_line_number() {
        let err = Corpus::read_edges("# header\n1 2\n3\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Corpus::read_edges("1 2 3\n".as_bytes()).is_err());
    }

    #[test]
    fn views_agree() {
        let c = star_corpus();
        let mut a: Vec<_> = c.triples().collect();
        let mut b: Vec<_> = c.term_major_triples().collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn document_text_roundtrip() {
        let c = Corpus::from_documents([vec!["x", "y", "x"], vec![], vec!["z"]]);
        let again = Corpus::read_documents(c.to_document_text().as_bytes()).unwrap();
        assert_eq!(again.total(), c.total());
        assert_eq!(again.doc_totals(), c.doc_totals());
        assert_eq!(again.term_totals(), c.term_totals());
    }

    #[test]
    fn duplicate_document_label_rejected() {
        let mut b = DocumentBuilder::new();
        b.add("x", ["a"]).unwrap();
        assert!(b.add("x", ["b"]).is_err());
    }
}
