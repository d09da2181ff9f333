//! k-nearest-neighbour stance prediction over TF-IDF cosine similarity, and
//! the two reference baselines: a train-majority constant classifier and a
//! k-NN over top-term symmetric differences.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vectorize::{cosine_similarity, term_frequency, DocVector};

/// Guard added to `1 - similarity` in inverse-distance weights.
pub const INVERSE_DISTANCE_EPS: f64 = 1e-9;
pub const DEFAULT_K: usize = 5;
pub const DEFAULT_TOP_N: usize = 25;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// One vote per neighbour.
    #[default]
    Uniform,
    /// `1 / (1 - similarity + eps)` per neighbour.
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub account_id: String,
    pub label: String,
    pub similarity: f64,
    /// Top-term set distance, for baseline 1 neighbours only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: String,
    pub neighbors: Vec<Neighbor>,
    pub votes: BTreeMap<String, f64>,
}

/// A labelled training document for [`knn_predict`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingDoc {
    pub account_id: String,
    pub label: String,
    pub vector: DocVector,
}

/// A labelled top-term set for [`baseline1_predict`].
#[derive(Debug, Clone, PartialEq)]
pub struct TermSetDoc {
    pub account_id: String,
    pub label: String,
    pub terms: BTreeSet<String>,
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds training size {n}")));
    }
    Ok(())
}

/// Picks the label with the largest vote; ties go to the larger summed
/// similarity, then to the lexicographically smaller label.
fn elect(votes: &BTreeMap<String, f64>, neighbors: &[Neighbor]) -> String {
    let mut sim_sum: BTreeMap<&str, f64> = BTreeMap::new();
    for n in neighbors {
        *sim_sum.entry(n.label.as_str()).or_default() += n.similarity;
    }
    // BTreeMap iterates labels ascending, so keeping the first maximum gives
    // the lexicographic tie-break.
    let mut best: Option<(&str, f64, f64)> = None;
    for (label, &vote) in votes {
        let sims = sim_sum.get(label.as_str()).copied().unwrap_or(0.0);
        let better = match best {
            None => true,
            Some((_, bv, bs)) => vote > bv || (vote == bv && sims > bs),
        };
        if better {
            best = Some((label, vote, sims));
        }
    }
    best.map(|(l, _, _)| l.to_string()).unwrap_or_default()
}

fn tally(neighbors: &[Neighbor], weighting: Weighting) -> BTreeMap<String, f64> {
    let mut votes = BTreeMap::new();
    for n in neighbors {
        let w = match weighting {
            Weighting::Uniform => 1.0,
            Weighting::Inverse => 1.0 / (1.0 - n.similarity + INVERSE_DISTANCE_EPS),
        };
        *votes.entry(n.label.clone()).or_insert(0.0) += w;
    }
    votes
}

/// The `k` training documents most similar to `query` (ties by ascending
/// account id), sorted by similarity descending.
pub fn nearest_neighbors(query: &DocVector, train: &[TrainingDoc], k: usize) -> Result<Vec<Neighbor>> {
    check_k(k, train.len())?;
    let mut scored: Vec<Neighbor> = train
        .iter()
        .map(|doc| Neighbor {
            account_id: doc.account_id.clone(),
            label: doc.label.clone(),
            similarity: cosine_similarity(query, &doc.vector),
            distance: None,
        })
        .collect();
    scored.sort_by(|a, b| {
        b.similarity
            .total_cmp(&a.similarity)
            .then_with(|| a.account_id.cmp(&b.account_id))
    });
    scored.truncate(k);
    Ok(scored)
}

pub fn knn_predict(query: &DocVector, train: &[TrainingDoc], k: usize, weighting: Weighting) -> Result<Prediction> {
    let neighbors = nearest_neighbors(query, train, k)?;
    let votes = tally(&neighbors, weighting);
    Ok(Prediction {
        label: elect(&votes, &neighbors),
        neighbors,
        votes,
    })
}

/// Constant classifier: the majority training label, ties to the
/// lexicographically smaller label.
pub fn baseline0_predict<S: AsRef<str>>(train_labels: &[S]) -> Result<Prediction> {
    if train_labels.is_empty() {
        return Err(Error::Empty("baseline training labels"));
    }
    let mut votes: BTreeMap<String, f64> = BTreeMap::new();
    for l in train_labels {
        *votes.entry(l.as_ref().to_string()).or_insert(0.0) += 1.0;
    }
    Ok(Prediction {
        label: elect(&votes, &[]),
        neighbors: Vec::new(),
        votes,
    })
}

/// The `n` most frequent terms, ties broken lexicographically, most frequent
/// first.
pub fn top_k_terms(tokens: &[String], n: usize) -> Vec<String> {
    let mut counts: Vec<(String, u64)> = term_frequency(tokens).into_iter().collect();
    counts.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    counts.into_iter().take(n).map(|(t, _)| t).collect()
}

/// Number of terms in exactly one of the two sets.
pub fn baseline1_distance(a: &BTreeSet<String>, b: &BTreeSet<String>) -> usize {
    a.symmetric_difference(b).count()
}

/// k-NN by smallest [`baseline1_distance`] (ties by ascending account id),
/// uniform votes. Neighbours report `similarity = 1 / (1 + distance)`.
pub fn baseline1_predict(query_terms: &BTreeSet<String>, train: &[TermSetDoc], k: usize) -> Result<Prediction> {
    check_k(k, train.len())?;
    let mut scored: Vec<(usize, &TermSetDoc)> = train
        .iter()
        .map(|doc| (baseline1_distance(query_terms, &doc.terms), doc))
        .collect();
    scored.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.account_id.cmp(&b.1.account_id)));
    let neighbors: Vec<Neighbor> = scored
        .into_iter()
        .take(k)
        .map(|(d, doc)| Neighbor {
            account_id: doc.account_id.clone(),
            label: doc.label.clone(),
            similarity: 1.0 / (1.0 + d as f64),
            distance: Some(d),
        })
        .collect();
    let votes = tally(&neighbors, Weighting::Uniform);
    Ok(Prediction {
        label: elect(&votes, &neighbors),
        neighbors,
        votes,
    })
}
