use super::{Lexicon, TokenStream};

/// Two route scores closer than this are treated as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// Word-boundary graph over a sentence. `edges(i)` lists, ascending, every
/// `j` such that characters `i..=j` form a dictionary word, plus `i` itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceDag {
    edges: Vec<Vec<usize>>,
}

impl SentenceDag {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self, i: usize) -> &[usize] {
        &self.edges[i]
    }
}

/// Byte offsets of each char boundary of `s`, including `s.len()`.
pub(crate) fn char_bounds(s: &str) -> Vec<usize> {
    s.char_indices().map(|(i, _)| i).chain([s.len()]).collect()
}

pub fn build_dag(sentence: &str, lex: &Lexicon) -> SentenceDag {
    let bounds = char_bounds(sentence);
    let n = bounds.len() - 1;
    let edges = (0..n)
        .map(|i| {
            let mut ends = vec![i];
            for j in i..n {
                let frag = &sentence[bounds[i]..bounds[j + 1]];
                if !lex.is_prefix(frag) {
                    break;
                }
                if j > i && lex.contains(frag) {
                    ends.push(j);
                }
            }
            ends
        })
        .collect();
    SentenceDag { edges }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub tokens: TokenStream,
    pub log_prob: f64,
}

/// Max-probability path through `dag`, computed right to left. Ties go to
/// the longer word.
pub fn best_route(sentence: &str, dag: &SentenceDag, lex: &Lexicon) -> Route {
    let bounds = char_bounds(sentence);
    let n = dag.len();
    debug_assert_eq!(n, bounds.len() - 1, "dag was built from a different sentence");
    // (score, end index of first word) for the suffix starting at i
    let mut route = vec![(0.0_f64, 0_usize); n + 1];
    for i in (0..n).rev() {
        let mut best = (f64::NEG_INFINITY, i);
        for &j in dag.edges(i) {
            let score = lex.log_prob(&sentence[bounds[i]..bounds[j + 1]]) + route[j + 1].0;
            if score > best.0 + TIE_TOLERANCE || ((score - best.0).abs() <= TIE_TOLERANCE && j > best.1) {
                best = (score, j);
            }
        }
        route[i] = best;
    }
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < n {
        let j = route[i].1;
        tokens.push(sentence[bounds[i]..bounds[j + 1]].to_string());
        i = j + 1;
    }
    Route {
        tokens: TokenStream::from(tokens),
        log_prob: route[0].0,
    }
}

pub fn max_prob_route(sentence: &str, dag: &SentenceDag, lex: &Lexicon) -> TokenStream {
    best_route(sentence, dag, lex).tokens
}
