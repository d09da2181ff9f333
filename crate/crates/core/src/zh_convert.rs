//! Traditional to simplified Chinese conversion by greedy longest match over
//! an OpenCC-style text dictionary.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConversionTable {
    phrase_map: HashMap<String, String>,
    char_map: HashMap<char, String>,
    /// Longest phrase key, in characters. 0 when there are no phrases.
    max_phrase_len: usize,
}

impl ConversionTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces one mapping. Single-character keys go to the
    /// character map, longer keys to the phrase map.
    pub fn insert(&mut self, traditional: &str, simplified: &str) -> Result<()> {
        if traditional.is_empty() || simplified.is_empty() {
            return Err(Error::invalid("conversion keys and values must be non-empty"));
        }
        let mut chars = traditional.chars();
        let first = chars.next().unwrap();
        if chars.next().is_none() {
            self.char_map.insert(first, simplified.to_string());
        } else {
            let len = traditional.chars().count();
            self.max_phrase_len = self.max_phrase_len.max(len);
            self.phrase_map.insert(traditional.to_string(), simplified.to_string());
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.phrase_map.len() + self.char_map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_phrase_len(&self) -> usize {
        self.max_phrase_len
    }

    pub fn phrase(&self, traditional: &str) -> Option<&str> {
        self.phrase_map.get(traditional).map(String::as_str)
    }

    pub fn char(&self, traditional: char) -> Option<&str> {
        self.char_map.get(&traditional).map(String::as_str)
    }

    /// All mappings, phrases first.
    pub fn pairs(&self) -> impl Iterator<Item = (String, &str)> + '_ {
        self.phrase_map
            .iter()
            .map(|(k, v)| (k.clone(), v.as_str()))
            .chain(self.char_map.iter().map(|(k, v)| (k.to_string(), v.as_str())))
    }
}

pub fn load_conversion_table(path: impl AsRef<Path>) -> Result<ConversionTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_conversion_table(BufReader::new(file), &path.display().to_string())
}

/// Reads `traditional<TAB>simplified` lines. `#` lines and blank lines are
/// skipped. When the value holds several space-separated candidates (raw
/// OpenCC files), the first one is used.
pub fn read_conversion_table<R: BufRead>(reader: R, source_name: &str) -> Result<ConversionTable> {
    let mut table = ConversionTable::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(source_name, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(source_name, lineno, "missing tab separator"))?;
        let key = key.trim();
        let value = value.split_whitespace().next().unwrap_or("");
        if key.is_empty() {
            return Err(Error::parse(source_name, lineno, "empty key"));
        }
        if value.is_empty() {
            return Err(Error::parse(source_name, lineno, "empty mapping value"));
        }
        table.insert(key, value)?;
    }
    Ok(table)
}

pub fn to_simplified(text: &str, t: &ConversionTable) -> String {
    if t.is_empty() {
        return text.to_string();
    }
    // byte offset of every char boundary, including the end
    let bounds: Vec<usize> = text.char_indices().map(|(i, _)| i).chain([text.len()]).collect();
    let n = bounds.len() - 1;
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    'outer: while i < n {
        let longest = t.max_phrase_len.min(n - i);
        for len in (2..=longest).rev() {
            if let Some(s) = t.phrase_map.get(&text[bounds[i]..bounds[i + len]]) {
                out.push_str(s);
                i += len;
                continue 'outer;
            }
        }
        let c = &text[bounds[i]..bounds[i + 1]];
        match t.char_map.get(&c.chars().next().unwrap()) {
            Some(s) => out.push_str(s),
            None => out.push_str(c),
        }
        i += 1;
    }
    out
}
