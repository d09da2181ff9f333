//! TF-IDF document vectors and cosine similarity.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segmenter::TokenStream;

/// How the term-frequency factor is computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TfVariant {
    /// Raw occurrence count.
    #[default]
    Raw,
    /// Count divided by document length.
    Relative,
}

/// Logarithm used for inverse document frequency.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdfLog {
    #[default]
    Natural,
    Base10,
}

impl IdfLog {
    fn apply(self, x: f64) -> f64 {
        match self {
            IdfLog::Natural => x.ln(),
            IdfLog::Base10 => x.log10(),
        }
    }
}

pub fn term_frequency(tokens: &[String]) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.clone()).or_insert(0) += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfModel {
    corpus_size: u64,
    doc_freq: BTreeMap<String, u64>,
    #[serde(default)]
    log: IdfLog,
}

/// Fits document frequencies over `corpus_docs` with natural-log IDF.
pub fn fit_idf(corpus_docs: &[TokenStream]) -> Result<TfIdfModel> {
    if corpus_docs.is_empty() {
        return Err(Error::Empty("IDF fitting corpus"));
    }
    let mut doc_freq: BTreeMap<String, u64> = BTreeMap::new();
    for doc in corpus_docs {
        for term in term_frequency(doc).into_keys() {
            *doc_freq.entry(term).or_insert(0) += 1;
        }
    }
    if doc_freq.is_empty() {
        return Err(Error::Empty("IDF vocabulary"));
    }
    Ok(TfIdfModel {
        corpus_size: corpus_docs.len() as u64,
        doc_freq,
        log: IdfLog::Natural,
    })
}

impl TfIdfModel {
    pub fn with_log(mut self, log: IdfLog) -> Self {
        self.log = log;
        self
    }

    pub fn corpus_size(&self) -> u64 {
        self.corpus_size
    }

    pub fn doc_freq(&self, term: &str) -> Option<u64> {
        self.doc_freq.get(term).copied()
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.doc_freq.keys().map(String::as_str)
    }

    pub fn contains(&self, term: &str) -> bool {
        self.doc_freq.contains_key(term)
    }

    pub fn vocabulary_len(&self) -> usize {
        self.doc_freq.len()
    }

    /// `log(|C| / df(t))`, or `None` for terms outside the vocabulary.
    pub fn idf(&self, term: &str) -> Option<f64> {
        self.doc_freq
            .get(term)
            .map(|&df| self.log.apply(self.corpus_size as f64 / df as f64))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DocVector {
    weights: BTreeMap<String, f64>,
    #[serde(skip)]
    norm: f64,
}

impl DocVector {
    /// Builds a vector from raw weights; zero weights are dropped.
    /// Panics on negative or non-finite weights.
    pub fn from_weights(weights: impl IntoIterator<Item = (String, f64)>) -> Self {
        let weights: BTreeMap<String, f64> = weights
            .into_iter()
            .inspect(|(t, w)| assert!(w.is_finite() && *w >= 0.0, "weight of `{t}` is {w}"))
            .filter(|(_, w)| *w > 0.0)
            .collect();
        let norm = weights.values().map(|w| w * w).sum::<f64>().sqrt();
        DocVector { weights, norm }
    }

    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }

    pub fn weight(&self, term: &str) -> f64 {
        self.weights.get(term).copied().unwrap_or(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> DocVector {
        DocVector::from_weights(self.weights.iter().map(|(t, w)| (t.clone(), w * factor)))
    }
}

/// `T(t) * I(t)` for every vocabulary term in `tokens`; out-of-vocabulary
/// terms are dropped.
pub fn tfidf_vector(tokens: &[String], model: &TfIdfModel, tf: TfVariant) -> DocVector {
    let len = tokens.len() as f64;
    DocVector::from_weights(term_frequency(tokens).into_iter().filter_map(|(term, count)| {
        let idf = model.idf(&term)?;
        let tf = match tf {
            TfVariant::Raw => count as f64,
            TfVariant::Relative => count as f64 / len,
        };
        Some((term, tf * idf))
    }))
}

/// Cosine of the angle between `u` and `v`, in `[0, 1]`; 0 when either is
/// the zero vector. The dot product is summed in term order, so the result
/// does not depend on argument order.
pub fn cosine_similarity(u: &DocVector, v: &DocVector) -> f64 {
    if u.norm == 0.0 || v.norm == 0.0 {
        return 0.0;
    }
    let mut dot = 0.0;
    let mut a = u.weights.iter().peekable();
    let mut b = v.weights.iter().peekable();
    while let (Some((ta, wa)), Some((tb, wb))) = (a.peek(), b.peek()) {
        match ta.cmp(tb) {
            Ordering::Less => {
                a.next();
            }
            Ordering::Greater => {
                b.next();
            }
            Ordering::Equal => {
                dot += *wa * *wb;
                a.next();
                b.next();
            }
        }
    }
    (dot / (u.norm * v.norm)).clamp(0.0, 1.0)
}
