//! BMES word-boundary HMM and its Viterbi decoder, used to recover words that
//! are missing from the lexicon.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TokenStream;
use crate::error::{Error, Result};

/// Log-probabilities at or below this are read as impossible, so files using
/// Jieba's `-3.14e100` sentinel load unchanged.
const IMPOSSIBLE_LOGP: f64 = -1e90;
/// Slack allowed when checking that a row's probabilities sum to at most 1.
const ROW_SUM_SLACK: f64 = 1e-6;
pub const DEFAULT_FLOOR_LOGP: f64 = -27.631021115928547; // ln(1e-12)

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum State {
    B,
    M,
    E,
    S,
}

impl State {
    pub const ALL: [State; 4] = [State::B, State::M, State::E, State::S];

    fn index(self) -> usize {
        self as usize
    }

    fn parse(s: &str) -> Option<State> {
        match s {
            "B" => Some(State::B),
            "M" => Some(State::M),
            "E" => Some(State::E),
            "S" => Some(State::S),
            _ => None,
        }
    }

    /// Whether `self -> next` is structurally possible in BMES tagging.
    pub fn can_precede(self, next: State) -> bool {
        use State::*;
        matches!(
            (self, next),
            (B, M) | (B, E) | (M, M) | (M, E) | (E, B) | (E, S) | (S, B) | (S, S)
        )
    }

    /// States a word may end in.
    pub fn is_final(self) -> bool {
        matches!(self, State::E | State::S)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HmmModel {
    start: [f64; 4],
    trans: [[f64; 4]; 4],
    emit: [HashMap<char, f64>; 4],
    floor: f64,
}

/// On-disk JSON form. Absent entries are impossible.
#[derive(Debug, Serialize, Deserialize)]
struct HmmFile {
    start: BTreeMap<String, f64>,
    trans: BTreeMap<String, BTreeMap<String, f64>>,
    emit: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    floor: Option<f64>,
}

fn state_name(name: &str) -> Result<State> {
    State::parse(name).ok_or_else(|| Error::InvalidModel(format!("unknown state `{name}`")))
}

fn read_logp(v: f64) -> f64 {
    if v <= IMPOSSIBLE_LOGP {
        f64::NEG_INFINITY
    } else {
        v
    }
}

fn check_row(what: &str, row: impl Iterator<Item = f64>) -> Result<()> {
    let mut sum = 0.0;
    for p in row {
        if p.is_nan() || p > 0.0 {
            return Err(Error::InvalidModel(format!("{what}: log-probability {p} is not <= 0")));
        }
        sum += p.exp();
    }
    if sum > 1.0 + ROW_SUM_SLACK {
        return Err(Error::InvalidModel(format!("{what}: probabilities sum to {sum} > 1")));
    }
    Ok(())
}

impl HmmModel {
    /// Builds a model from log-probability tables. Entries that are missing
    /// or at/below `-1e90` are impossible. Forbidden BMES transitions must be
    /// impossible.
    pub fn new(start: [f64; 4], trans: [[f64; 4]; 4], emit: [HashMap<char, f64>; 4], floor: f64) -> Result<Self> {
        let start = start.map(read_logp);
        let trans = trans.map(|row| row.map(read_logp));
        let emit = emit.map(|row| {
            row.into_iter()
                .map(|(c, p)| (c, read_logp(p)))
                .collect::<HashMap<_, _>>()
        });
        if !floor.is_finite() || floor > 0.0 {
            return Err(Error::InvalidModel(format!(
                "floor log-probability {floor} must be finite and <= 0"
            )));
        }
        check_row("start", start.iter().copied())?;
        for from in State::ALL {
            for to in State::ALL {
                if !from.can_precede(to) && trans[from.index()][to.index()].is_finite() {
                    return Err(Error::InvalidModel(format!(
                        "transition {from} -> {to} is structurally forbidden"
                    )));
                }
            }
            check_row(&format!("transition row {from}"), trans[from.index()].iter().copied())?;
            check_row(&format!("emission row {from}"), emit[from.index()].values().copied())?;
        }
        Ok(HmmModel {
            start,
            trans,
            emit,
            floor,
        })
    }

    pub fn start_logp(&self, s: State) -> f64 {
        self.start[s.index()]
    }

    pub fn trans_logp(&self, from: State, to: State) -> f64 {
        self.trans[from.index()][to.index()]
    }

    /// Emission log-probability, falling back to the floor for unseen pairs.
    pub fn emit_logp(&self, s: State, c: char) -> f64 {
        self.emit[s.index()].get(&c).copied().unwrap_or(self.floor)
    }

    pub fn floor_logp(&self) -> f64 {
        self.floor
    }

    pub fn from_json_str(src: &str) -> Result<Self> {
        let file: HmmFile = serde_json::from_str(src)?;
        Self::from_file_repr(file)
    }

    fn from_file_repr(file: HmmFile) -> Result<Self> {
        let mut start = [f64::NEG_INFINITY; 4];
        for (name, p) in &file.start {
            start[state_name(name)?.index()] = *p;
        }
        let mut trans = [[f64::NEG_INFINITY; 4]; 4];
        for (from, row) in &file.trans {
            let from = state_name(from)?;
            for (to, p) in row {
                trans[from.index()][state_name(to)?.index()] = *p;
            }
        }
        let mut emit: [HashMap<char, f64>; 4] = Default::default();
        for (state, row) in &file.emit {
            let state = state_name(state)?;
            for (key, p) in row {
                let mut chars = key.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => {
                        emit[state.index()].insert(c, *p);
                    }
                    _ => {
                        return Err(Error::InvalidModel(format!(
                            "emission key `{key}` must be a single character"
                        )))
                    }
                }
            }
        }
        Self::new(start, trans, emit, file.floor.unwrap_or(DEFAULT_FLOOR_LOGP))
    }

    pub fn to_json_string(&self) -> Result<String> {
        let finite = |p: f64| p.is_finite().then_some(p);
        let file = HmmFile {
            start: State::ALL
                .iter()
                .filter_map(|&s| finite(self.start_logp(s)).map(|p| (s.to_string(), p)))
                .collect(),
            trans: State::ALL
                .iter()
                .map(|&from| {
                    let row = State::ALL
                        .iter()
                        .filter_map(|&to| finite(self.trans_logp(from, to)).map(|p| (to.to_string(), p)))
                        .collect();
                    (from.to_string(), row)
                })
                .collect(),
            emit: State::ALL
                .iter()
                .map(|&s| {
                    let row = self.emit[s.index()]
                        .iter()
                        .filter_map(|(c, &p)| finite(p).map(|p| (c.to_string(), p)))
                        .collect();
                    (s.to_string(), row)
                })
                .collect(),
            floor: Some(self.floor),
        };
        Ok(serde_json::to_string(&file)?)
    }
}

pub fn load_hmm(path: impl AsRef<Path>) -> Result<HmmModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let repr: HmmFile = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::parse(path.display().to_string(), e.line(), e.to_string()))?;
    HmmModel::from_file_repr(repr)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoding {
    pub states: Vec<State>,
    pub log_prob: f64,
}

/// Most probable BMES sequence for `observations`, constrained to end in E or
/// S. Equal scores resolve to the earlier state in B, M, E, S order. If no
/// path has finite probability the returned score is `-inf`.
pub fn viterbi(observations: &[char], hmm: &HmmModel) -> Decoding {
    let n = observations.len();
    if n == 0 {
        return Decoding {
            states: Vec::new(),
            log_prob: 0.0,
        };
    }
    let mut score = vec![[f64::NEG_INFINITY; 4]];
    for s in State::ALL {
        score[0][s.index()] = hmm.start_logp(s) + hmm.emit_logp(s, observations[0]);
    }
    let mut back: Vec<[usize; 4]> = vec![[0; 4]; n];
    for (t, &obs) in observations.iter().enumerate().skip(1) {
        let prev = score[t - 1];
        let mut cur = [f64::NEG_INFINITY; 4];
        for to in State::ALL {
            let mut best = (f64::NEG_INFINITY, 0);
            for from in State::ALL {
                let cand = prev[from.index()] + hmm.trans_logp(from, to);
                if cand > best.0 {
                    best = (cand, from.index());
                }
            }
            cur[to.index()] = best.0 + hmm.emit_logp(to, obs);
            back[t][to.index()] = best.1;
        }
        score.push(cur);
    }
    let last = score[n - 1];
    let mut end = (f64::NEG_INFINITY, State::S.index());
    for s in [State::E, State::S] {
        if last[s.index()] > end.0 {
            end = (last[s.index()], s.index());
        }
    }
    let mut path = vec![end.1; n];
    for t in (1..n).rev() {
        path[t - 1] = back[t][path[t]];
    }
    Decoding {
        states: path.into_iter().map(|i| State::ALL[i]).collect(),
        log_prob: end.0,
    }
}

/// Splits `chars` after every E or S state. A trailing B/M run becomes its
/// own token.
pub fn cut_by_states(chars: &[char], states: &[State]) -> TokenStream {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for (&c, &s) in chars.iter().zip(states) {
        word.push(c);
        if s.is_final() {
            tokens.push(std::mem::take(&mut word));
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    TokenStream::from(tokens)
}

pub fn hmm_segment(span: &str, hmm: &HmmModel) -> TokenStream {
    let chars: Vec<char> = span.chars().collect();
    let decoded = viterbi(&chars, hmm);
    cut_by_states(&chars, &decoded.states)
}
