//! Chinese word segmentation: prefix-dictionary DAG with max-probability
//! routing, plus BMES HMM decoding for runs of unknown single characters.
//!
//! ```
//! use zhstance::segmenter::{Lexicon, Segmenter};
//!
//! let mut lex = Lexicon::new();
//! lex.add_word("我们", 100).unwrap();
//! lex.add_word("喜欢", 80).unwrap();
//! let seg = Segmenter::new(lex, None);
//! let tokens = seg.cut("我们喜欢 rust https://t.co/x");
//! assert_eq!(tokens.as_slice(), ["我们", "喜欢", "rust"]);
//! ```

mod dag;
mod hmm;
mod lexicon;

use std::ops::Deref;

use serde::{Deserialize, Serialize};

pub use dag::{best_route, build_dag, max_prob_route, Route, SentenceDag};
pub use hmm::{cut_by_states, hmm_segment, load_hmm, viterbi, Decoding, HmmModel, State, DEFAULT_FLOOR_LOGP};
pub use lexicon::{load_lexicon, read_lexicon, Lexicon};

/// Ordered word tokens of one document.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenStream(Vec<String>);

impl TokenStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<String> {
        self.0
    }

    pub fn push(&mut self, token: impl Into<String>) {
        self.0.push(token.into());
    }

    pub fn join(&self, sep: &str) -> String {
        self.0.join(sep)
    }
}

impl Deref for TokenStream {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

impl From<Vec<String>> for TokenStream {
    fn from(v: Vec<String>) -> Self {
        TokenStream(v)
    }
}

impl<S: Into<String>> FromIterator<S> for TokenStream {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenStream(iter.into_iter().map(Into::into).collect())
    }
}

impl Extend<String> for TokenStream {
    fn extend<I: IntoIterator<Item = String>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl IntoIterator for TokenStream {
    type Item = String;
    type IntoIter = std::vec::IntoIter<String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a TokenStream {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// CJK unified ideographs, extensions A-F and the compatibility blocks.
pub fn is_han(c: char) -> bool {
    matches!(c,
        '\u{3400}'..='\u{4DBF}'
        | '\u{4E00}'..='\u{9FFF}'
        | '\u{F900}'..='\u{FAFF}'
        | '\u{20000}'..='\u{2A6DF}'
        | '\u{2A700}'..='\u{2EBEF}'
        | '\u{2F800}'..='\u{2FA1F}')
}

fn starts_with_url(s: &str) -> bool {
    let head: String = s.chars().take(8).collect::<String>().to_ascii_lowercase();
    head.starts_with("http://") || head.starts_with("https://")
}

fn is_handle_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Drops URLs and @-mentions and strips `#` from hashtags. Removed spans
/// become spaces so neighbouring text does not fuse.
pub fn clean_tweet(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(c) = rest.chars().next() {
        if starts_with_url(rest) {
            let end = rest
                .find(|ch: char| ch.is_whitespace() || is_han(ch))
                .unwrap_or(rest.len());
            rest = &rest[end..];
            out.push(' ');
            continue;
        }
        if c == '@' && rest[1..].starts_with(is_handle_char) {
            let end = rest[1..]
                .find(|ch: char| !is_handle_char(ch))
                .map_or(rest.len(), |i| i + 1);
            rest = &rest[end..];
            out.push(' ');
            continue;
        }
        if c == '#' || c == '＃' {
            out.push(' ');
        } else {
            out.push(c);
        }
        rest = &rest[c.len_utf8()..];
    }
    out
}

#[derive(Debug, Clone)]
pub struct Segmenter {
    lexicon: Lexicon,
    hmm: Option<HmmModel>,
    clean: bool,
}

impl Segmenter {
    /// Segmenter with tweet cleanup enabled.
    pub fn new(lexicon: Lexicon, hmm: Option<HmmModel>) -> Self {
        Segmenter {
            lexicon,
            hmm,
            clean: true,
        }
    }

    pub fn with_clean(mut self, clean: bool) -> Self {
        self.clean = clean;
        self
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn hmm(&self) -> Option<&HmmModel> {
        self.hmm.as_ref()
    }

    pub fn cleans(&self) -> bool {
        self.clean
    }

    pub fn cut(&self, text: &str) -> TokenStream {
        segment_with(text, &self.lexicon, self.hmm.as_ref(), self.clean)
    }
}

/// Segments `text` with tweet cleanup on.
pub fn segment(text: &str, lex: &Lexicon, hmm: Option<&HmmModel>) -> TokenStream {
    segment_with(text, lex, hmm, true)
}

pub fn segment_with(text: &str, lex: &Lexicon, hmm: Option<&HmmModel>, clean: bool) -> TokenStream {
    let cleaned;
    let text = if clean {
        cleaned = clean_tweet(text);
        cleaned.as_str()
    } else {
        text
    };
    let mut tokens = TokenStream::new();
    for piece in text.split(|c: char| c.is_whitespace() || c.is_control()) {
        let mut rest = piece;
        while let Some(first) = rest.chars().next() {
            let han = is_han(first);
            let end = rest.find(|c: char| is_han(c) != han).unwrap_or(rest.len());
            let (run, tail) = rest.split_at(end);
            if han {
                cut_han(run, lex, hmm, &mut tokens);
            } else {
                tokens.push(run);
            }
            rest = tail;
        }
    }
    tokens
}

fn cut_han(run: &str, lex: &Lexicon, hmm: Option<&HmmModel>, out: &mut TokenStream) {
    let routed = max_prob_route(run, &build_dag(run, lex), lex);
    let Some(hmm) = hmm else {
        out.extend(routed);
        return;
    };
    let mut buf = String::new();
    let flush = |buf: &mut String, out: &mut TokenStream| match buf.chars().count() {
        0 => {}
        1 => out.push(std::mem::take(buf)),
        _ => {
            out.extend(hmm_segment(buf, hmm));
            buf.clear();
        }
    };
    for token in routed {
        let single = token.chars().nth(1).is_none();
        if single && !lex.contains(&token) {
            buf.push_str(&token);
        } else {
            flush(&mut buf, out);
            out.push(token);
        }
    }
    flush(&mut buf, out);
}
