//! Association scoring over bag-of-words corpora and friendship graphs.
//!
//! Two scores are provided: the entropy-reduction score [`aver`] and the
//! smoothed tf-idf cosine baseline in [`tfidf`]. Around them sit candidate-pair
//! mining and greedy set growth ([`candidates`]), truth-marked evaluation
//! ([`evaluation`]) and a binary corpus snapshot format ([`snapshot`]).

pub mod aver;
pub mod candidates;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod score;
pub mod snapshot;
pub mod synthetic;
pub mod tfidf;

pub use aver::{aver, aver_direct, aver_fast, collaboration, frequency_sensitivity, CollabDelta, ScoredSet};
pub use candidates::{batch_expand, common_count, expand_set, generate_pairs, CandidatePair, ExpandedSet};
pub use corpus::{Corpus, CorpusKind, DocId, TermId};
pub use error::{Error, Result};
pub use score::{AverScorer, Method, SetScorer};
pub use tfidf::{tfidf_association, TfIdf, WeightVector};
