//! Scoring methods behind one interface, and bulk pair scoring.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::aver::aver;
use crate::corpus::{Corpus, DocId};
use crate::error::{Error, Result};
use crate::tfidf::TfIdf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Aver,
    TfIdf,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Aver => "aver",
            Method::TfIdf => "tfidf",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aver" => Ok(Method::Aver),
            "tfidf" | "tf-idf" => Ok(Method::TfIdf),
            other => Err(Error::Argument(format!("unknown method {other:?}"))),
        }
    }
}

/// Scores a set of documents.
pub trait SetScorer: Sync {
    fn score(&self, members: &[DocId]) -> Result<f64>;
}

impl<F> SetScorer for F
where
    F: Fn(&[DocId]) -> Result<f64> + Sync,
{
    fn score(&self, members: &[DocId]) -> Result<f64> {
        self(members)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AverScorer<'c>(pub &'c Corpus);

impl SetScorer for AverScorer<'_> {
    fn score(&self, members: &[DocId]) -> Result<f64> {
        aver(members, self.0)
    }
}

/// tf-idf is only defined for pairs.
impl SetScorer for TfIdf<'_> {
    fn score(&self, members: &[DocId]) -> Result<f64> {
        match members {
            [a, b] => self.association(*a, *b),
            _ => Err(Error::Argument(format!(
                "tf-idf scores pairs only, got a set of {}",
                members.len()
            ))),
        }
    }
}

/// Scores every pair with `method`, in input order.
pub fn score_pairs(corpus: &Corpus, pairs: &[(DocId, DocId)], method: Method) -> Result<Vec<f64>> {
    match method {
        Method::Aver => pairs
            .par_iter()
            .map(|&(a, b)| aver(&[a, b], corpus))
            .collect(),
        Method::TfIdf => {
            let model = TfIdf::new(corpus);
            pairs
                .par_iter()
                .map(|&(a, b)| model.association(a, b))
                .collect()
        }
    }
}
