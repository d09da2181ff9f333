//! Account-level tweet corpora: JSON-lines loading, filtering, the held-out
//! test split and seeded k-fold splitting.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tweet {
    pub text: String,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccountRecord {
    pub account_id: String,
    pub follower_count: u64,
    pub label: Option<String>,
    pub tweets: Vec<Tweet>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    label_set: Vec<String>,
    accounts: Vec<AccountRecord>,
}

#[derive(Deserialize)]
struct Header {
    label_set: Vec<String>,
}

impl Corpus {
    /// Builds a corpus, checking id uniqueness, label membership and tweet
    /// text. An empty `label_set` is filled from the labels the accounts carry,
    /// sorted.
    pub fn new(label_set: Vec<String>, accounts: Vec<AccountRecord>) -> Result<Self> {
        let declared = !label_set.is_empty();
        let mut labels = label_set;
        let mut seen_labels: HashSet<String> = HashSet::new();
        for label in &labels {
            if !seen_labels.insert(label.clone()) {
                return Err(Error::invalid(format!("label `{label}` declared twice")));
            }
        }
        let mut found = BTreeSet::new();
        let mut ids = HashSet::new();
        for account in &accounts {
            if !ids.insert(account.account_id.as_str()) {
                return Err(Error::DuplicateAccount(account.account_id.clone()));
            }
            if let Some(label) = &account.label {
                if declared && !seen_labels.contains(label) {
                    return Err(Error::UnknownLabel {
                        account_id: account.account_id.clone(),
                        label: label.clone(),
                    });
                }
                found.insert(label.clone());
            }
            if let Some(t) = account.tweets.iter().find(|t| t.text.trim().is_empty()) {
                return Err(Error::invalid(format!(
                    "account `{}` has an empty tweet at {}",
                    account.account_id, t.timestamp
                )));
            }
        }
        if !declared {
            labels = found.into_iter().collect();
        }
        Ok(Corpus {
            label_set: labels,
            accounts,
        })
    }

    pub fn label_set(&self) -> &[String] {
        &self.label_set
    }

    pub fn accounts(&self) -> &[AccountRecord] {
        &self.accounts
    }

    pub fn into_accounts(self) -> Vec<AccountRecord> {
        self.accounts
    }

    pub fn len(&self) -> usize {
        self.accounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accounts.is_empty()
    }

    pub fn ids(&self) -> BTreeSet<&str> {
        self.accounts.iter().map(|a| a.account_id.as_str()).collect()
    }

    pub fn get(&self, account_id: &str) -> Option<&AccountRecord> {
        self.accounts.iter().find(|a| a.account_id == account_id)
    }

    /// Number of accounts carrying each label, in label-set order.
    pub fn label_counts(&self) -> BTreeMap<String, usize> {
        let mut counts: BTreeMap<String, usize> = self.label_set.iter().map(|l| (l.clone(), 0)).collect();
        for label in self.accounts.iter().filter_map(|a| a.label.as_ref()) {
            *counts.entry(label.clone()).or_default() += 1;
        }
        counts
    }

    pub fn all_labeled(&self) -> bool {
        self.accounts.iter().all(|a| a.label.is_some())
    }

    fn with_accounts(&self, accounts: Vec<AccountRecord>) -> Corpus {
        Corpus {
            label_set: self.label_set.clone(),
            accounts,
        }
    }

    /// Writes the corpus in the same JSON-lines format `load_corpus` reads.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        serde_json::to_writer(&mut w, &serde_json::json!({ "label_set": self.label_set }))?;
        writeln!(w)?;
        for account in &self.accounts {
            serde_json::to_writer(&mut w, account)?;
            writeln!(w)?;
        }
        Ok(())
    }
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(BufReader::new(file), &path.display().to_string())
}

/// Parses a JSON-lines corpus. An optional first line `{"label_set": [...]}`
/// declares the label set; blank lines are skipped.
pub fn read_corpus<R: BufRead>(reader: R, source_name: &str) -> Result<Corpus> {
    let mut label_set = Vec::new();
    let mut accounts = Vec::new();
    let mut first = true;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(source_name, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(trimmed).map_err(|e| Error::parse(source_name, lineno, e.to_string()))?;
        if first && value.get("label_set").is_some() && value.get("account_id").is_none() {
            let header: Header =
                serde_json::from_value(value).map_err(|e| Error::parse(source_name, lineno, e.to_string()))?;
            label_set = header.label_set;
            first = false;
            continue;
        }
        first = false;
        let account: AccountRecord =
            serde_json::from_value(value).map_err(|e| Error::parse(source_name, lineno, e.to_string()))?;
        if let Some(t) = account.tweets.iter().position(|t| t.text.trim().is_empty()) {
            return Err(Error::parse(
                source_name,
                lineno,
                format!("tweet {t} of `{}` has empty text", account.account_id),
            ));
        }
        accounts.push(account);
    }
    Corpus::new(label_set, accounts)
}

/// Inclusive range of UTC calendar dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateWindow {
    start: NaiveDate,
    end: NaiveDate,
}

impl DateWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start > end {
            return Err(Error::invalid(format!("date window start {start} is after end {end}")));
        }
        Ok(DateWindow { start, end })
    }

    /// Window covering every representable timestamp.
    pub fn unbounded() -> Self {
        DateWindow {
            start: NaiveDate::MIN,
            end: NaiveDate::MAX,
        }
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    pub fn contains(&self, ts: &DateTime<Utc>) -> bool {
        let day = ts.date_naive();
        self.start <= day && day <= self.end
    }
}

/// Keeps accounts with at least `min_followers` followers and at least
/// `min_tweets` tweets inside `window`; kept accounts lose their out-of-window
/// tweets.
pub fn filter_accounts(c: &Corpus, min_followers: u64, min_tweets: usize, window: DateWindow) -> Corpus {
    let accounts = c
        .accounts
        .iter()
        .filter(|a| a.follower_count >= min_followers)
        .filter_map(|a| {
            let tweets: Vec<Tweet> = a
                .tweets
                .iter()
                .filter(|t| window.contains(&t.timestamp))
                .cloned()
                .collect();
            (tweets.len() >= min_tweets).then(|| AccountRecord { tweets, ..a.clone() })
        })
        .collect();
    c.with_accounts(accounts)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_ids: BTreeSet<String>,
    pub folds: usize,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(test_ids: BTreeSet<String>, folds: usize, seed: u64) -> Result<Self> {
        if folds < 2 {
            return Err(Error::invalid(format!("folds must be at least 2, got {folds}")));
        }
        Ok(SplitSpec { test_ids, folds, seed })
    }
}

/// Separates the held-out test accounts from the rest. Returns
/// `(non_test, test)`; both keep the input order.
pub fn split_corpus(c: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus)> {
    let ids = c.ids();
    for id in &spec.test_ids {
        if !ids.contains(id.as_str()) {
            return Err(Error::MissingAccount(id.clone()));
        }
    }
    let (test, rest): (Vec<_>, Vec<_>) = c
        .accounts
        .iter()
        .cloned()
        .partition(|a| spec.test_ids.contains(&a.account_id));
    if let Some(a) = test.iter().find(|a| a.label.is_none()) {
        return Err(Error::UnlabeledAccount(a.account_id.clone()));
    }
    Ok((c.with_accounts(rest), c.with_accounts(test)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fold {
    pub train: Corpus,
    pub validation: Corpus,
}

/// Assigns each account id to one of `k` folds.
///
/// Ids are sorted, grouped by label when every account is labeled (groups in
/// label-set order), each group shuffled in turn with one [`SplitMix64`]
/// stream seeded by `seed`, and the concatenation dealt round-robin.
pub fn fold_assignment(c: &Corpus, k: usize, seed: u64) -> Result<BTreeMap<String, usize>> {
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    if k > c.len() {
        return Err(Error::invalid(format!("k = {k} exceeds corpus size {}", c.len())));
    }
    let mut rng = SplitMix64::new(seed);
    let mut order: Vec<String> = Vec::with_capacity(c.len());
    if c.all_labeled() {
        for label in &c.label_set {
            let mut group: Vec<String> = c
                .accounts
                .iter()
                .filter(|a| a.label.as_deref() == Some(label))
                .map(|a| a.account_id.clone())
                .collect();
            group.sort();
            rng.shuffle(&mut group);
            order.extend(group);
        }
    } else {
        order = c.accounts.iter().map(|a| a.account_id.clone()).collect();
        order.sort();
        rng.shuffle(&mut order);
    }
    Ok(order.into_iter().enumerate().map(|(i, id)| (id, i % k)).collect())
}

pub fn kfold_splits(c: &Corpus, k: usize, seed: u64) -> Result<Vec<Fold>> {
    let assignment = fold_assignment(c, k, seed)?;
    Ok((0..k)
        .map(|fold| {
            let (validation, train): (Vec<_>, Vec<_>) = c
                .accounts
                .iter()
                .cloned()
                .partition(|a| assignment[&a.account_id] == fold);
            Fold {
                train: c.with_accounts(train),
                validation: c.with_accounts(validation),
            }
        })
        .collect())
}
