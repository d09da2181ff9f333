//! Brute-force oracles and fixture helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use zhstance::classify::{Neighbor, TrainingDoc};
use zhstance::pipeline::{Paths, PipelineConfig};
use zhstance::rng::SplitMix64;
use zhstance::segmenter::{HmmModel, Lexicon, State, DEFAULT_FLOOR_LOGP};
use zhstance::vectorize::cosine_similarity;
use zhstance::vectorize::DocVector;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn fixture_config() -> PipelineConfig {
    let d = data_dir();
    PipelineConfig {
        paths: Paths {
            corpus: Some(d.join("fixture/corpus.jsonl")),
            dict: Some(d.join("lexicon.txt")),
            hmm: Some(d.join("hmm.json")),
            convert_table: Some(d.join("ts_table.txt")),
            stopwords: None,
            test_ids: Some(d.join("fixture/test_ids.txt")),
        },
        ..PipelineConfig::default()
    }
}

/// Uniform float in `[0, 1)`.
pub fn unit(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

pub fn below(rng: &mut SplitMix64, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

/// Random probability vector of length `n`, as log-probabilities.
fn log_simplex(rng: &mut SplitMix64, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| 0.05 + unit(rng)).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|p| (p / sum).ln()).collect()
}

pub const HMM_ALPHABET: [char; 4] = ['甲', '乙', '丙', '丁'];

/// Random BMES model over [`HMM_ALPHABET`]. Each state leaves one random
/// character out of its emission table so the floor gets exercised.
pub fn random_hmm(rng: &mut SplitMix64) -> HmmModel {
    const NEG: f64 = f64::NEG_INFINITY;
    let s = log_simplex(rng, 2);
    let start = [s[0], NEG, NEG, s[1]];
    let mut trans = [[NEG; 4]; 4];
    for (from, row) in trans.iter_mut().enumerate() {
        let allowed: Vec<usize> = (0..4)
            .filter(|&to| State::ALL[from].can_precede(State::ALL[to]))
            .collect();
        for (to, p) in allowed.iter().zip(log_simplex(rng, allowed.len())) {
            row[*to] = p;
        }
    }
    let emit = std::array::from_fn(|_| {
        let skip = below(rng, HMM_ALPHABET.len() + 1);
        let chars: Vec<char> = HMM_ALPHABET
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, &c)| c)
            .collect();
        let probs = log_simplex(rng, chars.len() + 1);
        chars.into_iter().zip(probs).collect::<HashMap<char, f64>>()
    });
    HmmModel::new(start, trans, emit, DEFAULT_FLOOR_LOGP).expect("random model is valid")
}

pub fn path_score(obs: &[char], states: &[State], hmm: &HmmModel) -> f64 {
    let mut score = hmm.start_logp(states[0]) + hmm.emit_logp(states[0], obs[0]);
    for t in 1..obs.len() {
        score += hmm.trans_logp(states[t - 1], states[t]) + hmm.emit_logp(states[t], obs[t]);
    }
    score
}

pub fn path_is_legal(states: &[State]) -> bool {
    matches!(states.first(), Some(State::B | State::S))
        && states.last().is_some_and(|s| s.is_final())
        && states.windows(2).all(|w| w[0].can_precede(w[1]))
}

/// Best score over all 4^n state sequences that start in B/S, end in E/S and
/// respect the transition constraints.
pub fn brute_force_viterbi(obs: &[char], hmm: &HmmModel) -> f64 {
    let n = obs.len();
    let mut best = f64::NEG_INFINITY;
    let mut states = vec![State::B; n];
    for code in 0..4usize.pow(n as u32) {
        let mut c = code;
        for s in states.iter_mut() {
            *s = State::ALL[c % 4];
            c /= 4;
        }
        if path_is_legal(&states) {
            best = best.max(path_score(obs, &states, hmm));
        }
    }
    best
}

/// Score of a segmentation under the DAG's edge weights, or `None` if some
/// multi-character piece is not a dictionary word.
pub fn segmentation_score(pieces: &[String], lex: &Lexicon) -> Option<f64> {
    pieces
        .iter()
        .map(|p| (p.chars().count() == 1 || lex.contains(p)).then(|| lex.log_prob(p)))
        .sum()
}

/// Best score over all 2^(n-1) ways of cutting `sentence`.
pub fn brute_force_route(sentence: &str, lex: &Lexicon) -> f64 {
    let chars: Vec<char> = sentence.chars().collect();
    let n = chars.len();
    if n == 0 {
        return 0.0;
    }
    let mut best = f64::NEG_INFINITY;
    for mask in 0..(1u32 << (n - 1)) {
        let mut pieces = Vec::new();
        let mut cur = String::new();
        for (i, &c) in chars.iter().enumerate() {
            cur.push(c);
            if i + 1 == n || mask & (1 << i) != 0 {
                pieces.push(std::mem::take(&mut cur));
            }
        }
        if let Some(s) = segmentation_score(&pieces, lex) {
            best = best.max(s);
        }
    }
    best
}

/// Random lexicon over a three-character alphabet plus a sentence drawn from
/// the same alphabet.
pub fn random_lexicon_case(rng: &mut SplitMix64) -> (Lexicon, String) {
    const ALPHA: [char; 3] = ['天', '地', '人'];
    let mut lex = Lexicon::new();
    for _ in 0..below(rng, 12) {
        let len = 1 + below(rng, 4);
        let word: String = (0..len).map(|_| ALPHA[below(rng, ALPHA.len())]).collect();
        lex.add_word(&word, 1 + below(rng, 50) as u64).unwrap();
    }
    let n = 1 + below(rng, 10);
    let sentence = (0..n).map(|_| ALPHA[below(rng, ALPHA.len())]).collect();
    (lex, sentence)
}

/// The `k` most similar documents by exhaustive sort on (similarity desc,
/// account id asc).
pub fn brute_force_neighbors(query: &DocVector, train: &[TrainingDoc], k: usize) -> Vec<(String, f64)> {
    let mut all: Vec<(String, f64)> = train
        .iter()
        .map(|d| (d.account_id.clone(), cosine_similarity(query, &d.vector)))
        .collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let swap = all[j].1 > all[i].1 || (all[j].1 == all[i].1 && all[j].0 < all[i].0);
            if swap {
                all.swap(i, j);
            }
        }
    }
    all.truncate(k);
    all
}

pub fn neighbor_ids(ns: &[Neighbor]) -> Vec<&str> {
    ns.iter().map(|n| n.account_id.as_str()).collect()
}

/// Random sparse vector over `t0..t{vocab}`.
pub fn random_vector(rng: &mut SplitMix64, vocab: usize) -> DocVector {
    let mut weights = Vec::new();
    for t in 0..vocab {
        if unit(rng) < 0.4 {
            weights.push((format!("t{t}"), (1 + below(rng, 5)) as f64 * unit(rng)));
        }
    }
    DocVector::from_weights(weights)
}
