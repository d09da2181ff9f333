use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// Word frequency dictionary with its total mass and the set of all word
/// prefixes (every word is its own prefix).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: HashMap<String, u64>,
    total: u64,
    prefixes: HashSet<String>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `word` or replaces its frequency.
    pub fn add_word(&mut self, word: &str, freq: u64) -> Result<()> {
        if word.is_empty() {
            return Err(Error::invalid("lexicon word must be non-empty"));
        }
        if freq == 0 {
            return Err(Error::invalid(format!("frequency of `{word}` must be positive")));
        }
        if let Some(old) = self.entries.insert(word.to_string(), freq) {
            self.total -= old;
        } else {
            for (i, _) in word.char_indices().skip(1) {
                self.prefixes.insert(word[..i].to_string());
            }
            self.prefixes.insert(word.to_string());
        }
        self.total += freq;
        Ok(())
    }

    /// Copy of this lexicon with `word` added.
    pub fn with_word(&self, word: &str, freq: u64) -> Result<Lexicon> {
        let mut lex = self.clone();
        lex.add_word(word, freq)?;
        Ok(lex)
    }

    pub fn freq(&self, word: &str) -> Option<u64> {
        self.entries.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn is_prefix(&self, fragment: &str) -> bool {
        self.prefixes.contains(fragment)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(w, &f)| (w.as_str(), f))
    }

    /// Log-probability of a route edge: `ln(freq / total)` for dictionary
    /// words, `ln(1 / total)` otherwise.
    pub fn log_prob(&self, word: &str) -> f64 {
        let total = self.total.max(1) as f64;
        let freq = self.freq(word).unwrap_or(1) as f64;
        freq.ln() - total.ln()
    }
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_lexicon(BufReader::new(file), &path.display().to_string())
}

/// Parses `word freq [tag]` lines; the tag column is ignored.
pub fn read_lexicon<R: BufRead>(reader: R, source_name: &str) -> Result<Lexicon> {
    let mut lex = Lexicon::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(source_name, e))?;
        let line = line.trim_start_matches('\u{feff}');
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let word = cols
            .next()
            .ok_or_else(|| Error::parse(source_name, lineno, "empty word"))?;
        let freq = cols
            .next()
            .ok_or_else(|| Error::parse(source_name, lineno, format!("missing frequency for `{word}`")))?;
        let freq: u64 = freq
            .parse()
            .map_err(|_| Error::parse(source_name, lineno, format!("invalid frequency `{freq}`")))?;
        if freq == 0 {
            return Err(Error::parse(
                source_name,
                lineno,
                format!("non-positive frequency for `{word}`"),
            ));
        }
        lex.add_word(word, freq)
            .map_err(|e| Error::parse(source_name, lineno, e.to_string()))?;
    }
    Ok(lex)
}
