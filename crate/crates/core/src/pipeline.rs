//! End-to-end wiring: conversion, segmentation, model fitting, prediction,
//! cross-validation and held-out test evaluation, plus the JSON report
//! schema.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{
    baseline0_predict, baseline1_predict, knn_predict, top_k_terms, Neighbor, Prediction, TermSetDoc, TrainingDoc,
    Weighting, DEFAULT_K, DEFAULT_TOP_N,
};
use crate::corpus::{
    filter_accounts, kfold_splits, load_corpus, split_corpus, AccountRecord, Corpus, DateWindow, SplitSpec,
};
use crate::error::{Error, Result};
use crate::evaluate::{round_half_up, ConfusionMatrix, LabelMetrics, MetricReport, Summary};
use crate::segmenter::{load_hmm, load_lexicon, Segmenter, TokenStream};
use crate::vectorize::{fit_idf, tfidf_vector, DocVector, TfIdfModel, TfVariant};
use crate::zh_convert::{load_conversion_table, to_simplified, ConversionTable};

pub const DEFAULT_MIN_FOLLOWERS: u64 = 10_000;
pub const DEFAULT_MIN_TWEETS: usize = 10;
pub const DEFAULT_FOLDS: usize = 5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[default]
    Knn,
    Baseline0,
    Baseline1,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub corpus: Option<PathBuf>,
    pub dict: Option<PathBuf>,
    pub hmm: Option<PathBuf>,
    pub convert_table: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub test_ids: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Filters {
    pub min_followers: u64,
    pub min_tweets: usize,
    /// First day of the tweet window (UTC, inclusive).
    pub since: NaiveDate,
    /// Last day of the tweet window (UTC, inclusive).
    pub until: NaiveDate,
}

impl Default for Filters {
    fn default() -> Self {
        Filters {
            min_followers: DEFAULT_MIN_FOLLOWERS,
            min_tweets: DEFAULT_MIN_TWEETS,
            since: NaiveDate::from_ymd_opt(2021, 1, 1).unwrap(),
            until: NaiveDate::from_ymd_opt(2021, 4, 15).unwrap(),
        }
    }
}

impl Filters {
    pub fn window(&self) -> Result<DateWindow> {
        DateWindow::new(self.since, self.until)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub k: usize,
    pub weighting: Weighting,
    pub top_n: usize,
    pub tf: TfVariant,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            kind: ModelKind::Knn,
            k: DEFAULT_K,
            weighting: Weighting::Uniform,
            top_n: DEFAULT_TOP_N,
            tf: TfVariant::Raw,
        }
    }
}

/// Fully resolved run configuration. Reports embed it verbatim, and the same
/// JSON shape is accepted as a config file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    pub filters: Filters,
    pub model: ModelConfig,
    pub folds: usize,
    pub seed: u64,
    /// Drop URLs and mentions, unwrap hashtags before segmenting.
    pub clean: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            paths: Paths::default(),
            filters: Filters::default(),
            model: ModelConfig::default(),
            folds: DEFAULT_FOLDS,
            seed: 0,
            clean: true,
        }
    }
}

impl PipelineConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.line(), e.to_string()))
    }
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::invalid(format!("missing required path --{flag}")))
}

/// One token per line; blank lines and `#` comments are skipped.
pub fn read_word_list(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

/// Text preprocessing shared by every model: optional T->S conversion, then
/// segmentation.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    pub convert: Option<ConversionTable>,
    pub segmenter: Segmenter,
}

impl Preprocessor {
    pub fn tokens(&self, text: &str) -> TokenStream {
        match &self.convert {
            Some(table) => self.segmenter.cut(&to_simplified(text, table)),
            None => self.segmenter.cut(text),
        }
    }

    /// All tweets of an account, segmented one by one and concatenated.
    pub fn account_tokens(&self, account: &AccountRecord) -> TokenStream {
        let mut out = TokenStream::new();
        for t in &account.tweets {
            out.extend(self.tokens(&t.text));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedAccount {
    pub account_id: String,
    pub label: Option<String>,
    pub tokens: TokenStream,
}

/// A model fitted on one training set.
#[derive(Debug, Clone)]
pub enum TrainedModel {
    Knn {
        idf: TfIdfModel,
        train: Vec<TrainingDoc>,
        k: usize,
        weighting: Weighting,
        tf: TfVariant,
    },
    Baseline0 {
        labels: Vec<String>,
    },
    Baseline1 {
        train: Vec<TermSetDoc>,
        k: usize,
        top_n: usize,
        stopwords: HashSet<String>,
    },
}

fn labeled(train: &[PreparedAccount]) -> Result<Vec<(&PreparedAccount, &str)>> {
    train
        .iter()
        .map(|a| match &a.label {
            Some(l) => Ok((a, l.as_str())),
            None => Err(Error::UnlabeledAccount(a.account_id.clone())),
        })
        .collect()
}

fn top_terms(tokens: &TokenStream, n: usize, stopwords: &HashSet<String>) -> BTreeSet<String> {
    if stopwords.is_empty() {
        return top_k_terms(tokens, n).into_iter().collect();
    }
    let kept: Vec<String> = tokens.iter().filter(|t| !stopwords.contains(*t)).cloned().collect();
    top_k_terms(&kept, n).into_iter().collect()
}

impl TrainedModel {
    /// Fits on `train`, every account of which must be labelled. IDF and
    /// top-term sets see the training documents only.
    pub fn fit(train: &[PreparedAccount], cfg: &ModelConfig, stopwords: &HashSet<String>) -> Result<Self> {
        let train = labeled(train)?;
        if train.is_empty() {
            return Err(Error::Empty("training set"));
        }
        Ok(match cfg.kind {
            ModelKind::Knn => {
                let docs: Vec<TokenStream> = train.iter().map(|(a, _)| a.tokens.clone()).collect();
                let idf = fit_idf(&docs)?;
                let train = train
                    .iter()
                    .map(|(a, l)| TrainingDoc {
                        account_id: a.account_id.clone(),
                        label: l.to_string(),
                        vector: tfidf_vector(&a.tokens, &idf, cfg.tf),
                    })
                    .collect();
                TrainedModel::Knn {
                    idf,
                    train,
                    k: cfg.k,
                    weighting: cfg.weighting,
                    tf: cfg.tf,
                }
            }
            ModelKind::Baseline0 => TrainedModel::Baseline0 {
                labels: train.iter().map(|(_, l)| l.to_string()).collect(),
            },
            ModelKind::Baseline1 => TrainedModel::Baseline1 {
                train: train
                    .iter()
                    .map(|(a, l)| TermSetDoc {
                        account_id: a.account_id.clone(),
                        label: l.to_string(),
                        terms: top_terms(&a.tokens, cfg.top_n, stopwords),
                    })
                    .collect(),
                k: cfg.k,
                top_n: cfg.top_n,
                stopwords: stopwords.clone(),
            },
        })
    }

    pub fn predict(&self, tokens: &TokenStream) -> Result<Prediction> {
        match self {
            TrainedModel::Knn {
                idf,
                train,
                k,
                weighting,
                tf,
            } => knn_predict(&tfidf_vector(tokens, idf, *tf), train, *k, *weighting),
            TrainedModel::Baseline0 { labels } => baseline0_predict(labels),
            TrainedModel::Baseline1 {
                train,
                k,
                top_n,
                stopwords,
            } => baseline1_predict(&top_terms(tokens, *top_n, stopwords), train, *k),
        }
    }

    pub fn idf(&self) -> Option<&TfIdfModel> {
        match self {
            TrainedModel::Knn { idf, .. } => Some(idf),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccountPrediction {
    pub account_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    pub predicted: String,
    pub neighbors: Vec<Neighbor>,
    pub votes: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
    preprocessor: Preprocessor,
    stopwords: HashSet<String>,
}

impl Pipeline {
    /// Loads the lexicon, HMM, conversion table and stopwords named in
    /// `config.paths`. Only `dict` is required.
    pub fn from_config(config: PipelineConfig) -> Result<Self> {
        let lexicon = load_lexicon(require(&config.paths.dict, "dict")?)?;
        let hmm = config.paths.hmm.as_deref().map(load_hmm).transpose()?;
        let convert = config
            .paths
            .convert_table
            .as_deref()
            .map(load_conversion_table)
            .transpose()?;
        let stopwords = match &config.paths.stopwords {
            Some(p) => read_word_list(p)?.into_iter().collect(),
            None => HashSet::new(),
        };
        let segmenter = Segmenter::new(lexicon, hmm).with_clean(config.clean);
        Ok(Pipeline {
            config,
            preprocessor: Preprocessor { convert, segmenter },
            stopwords,
        })
    }

    pub fn new(config: PipelineConfig, preprocessor: Preprocessor) -> Self {
        Pipeline {
            config,
            preprocessor,
            stopwords: HashSet::new(),
        }
    }

    pub fn with_stopwords(mut self, stopwords: HashSet<String>) -> Self {
        self.stopwords = stopwords;
        self
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn preprocessor(&self) -> &Preprocessor {
        &self.preprocessor
    }

    /// Loads `paths.corpus` and applies the follower/tweet/window filters.
    pub fn load_filtered_corpus(&self) -> Result<Corpus> {
        let corpus = load_corpus(require(&self.config.paths.corpus, "corpus")?)?;
        let f = &self.config.filters;
        Ok(filter_accounts(&corpus, f.min_followers, f.min_tweets, f.window()?))
    }

    /// Held-out ids from `paths.test_ids`, empty when unset.
    pub fn test_ids(&self) -> Result<BTreeSet<String>> {
        match &self.config.paths.test_ids {
            Some(p) => Ok(read_word_list(p)?.into_iter().collect()),
            None => Ok(BTreeSet::new()),
        }
    }

    /// Loaded, filtered corpus split into `(non_test, test)`.
    pub fn split(&self) -> Result<(Corpus, Corpus)> {
        let corpus = self.load_filtered_corpus()?;
        let spec = SplitSpec::new(self.test_ids()?, self.config.folds, self.config.seed)?;
        split_corpus(&corpus, &spec)
    }

    /// Cross-validates on the non-test accounts.
    pub fn crossval_report(&self) -> Result<Report> {
        let (non_test, _) = self.split()?;
        let cv = cross_validate(&non_test, self.config.folds, self.config.seed, self)?;
        Ok(Report::Crossval(cv.report(&self.config)))
    }

    /// Trains on the non-test accounts and scores the test accounts.
    pub fn test_report(&self) -> Result<Report> {
        if self.config.paths.test_ids.is_none() {
            return Err(Error::invalid("missing required path --test-ids"));
        }
        let (non_test, test) = self.split()?;
        let ev = evaluate_test_set(&non_test, &test, self)?;
        Ok(Report::Test(ev.report(&self.config)))
    }

    /// Segments every account, in parallel, preserving corpus order.
    pub fn prepare(&self, corpus: &Corpus) -> Vec<PreparedAccount> {
        corpus
            .accounts()
            .par_iter()
            .map(|a| PreparedAccount {
                account_id: a.account_id.clone(),
                label: a.label.clone(),
                tokens: self.preprocessor.account_tokens(a),
            })
            .collect()
    }

    pub fn fit(&self, train: &[PreparedAccount]) -> Result<TrainedModel> {
        TrainedModel::fit(train, &self.config.model, &self.stopwords)
    }

    pub fn predict_all(&self, model: &TrainedModel, queries: &[PreparedAccount]) -> Result<Vec<AccountPrediction>> {
        queries
            .par_iter()
            .map(|q| {
                let p = model.predict(&q.tokens)?;
                Ok(AccountPrediction {
                    account_id: q.account_id.clone(),
                    key: q.label.clone(),
                    predicted: p.label,
                    neighbors: p.neighbors,
                    votes: p.votes,
                })
            })
            .collect()
    }

    /// TF-IDF vectors of every account, IDF fitted over the whole corpus.
    pub fn vectorize(&self, corpus: &Corpus) -> Result<Vec<(String, DocVector)>> {
        let prepared = self.prepare(corpus);
        let docs: Vec<TokenStream> = prepared.iter().map(|a| a.tokens.clone()).collect();
        let idf = fit_idf(&docs)?;
        Ok(prepared
            .into_iter()
            .map(|a| {
                let v = tfidf_vector(&a.tokens, &idf, self.config.model.tf);
                (a.account_id, v)
            })
            .collect())
    }
}

fn score(label_set: &[String], predictions: &[AccountPrediction]) -> Result<(ConfusionMatrix, MetricReport)> {
    let mut m = ConfusionMatrix::zeros(label_set.to_vec());
    for p in predictions {
        let key = p
            .key
            .as_deref()
            .ok_or_else(|| Error::UnlabeledAccount(p.account_id.clone()))?;
        m.record(key, &p.predicted)?;
    }
    let report = MetricReport::from_matrix(&m)?;
    Ok((m, report))
}

fn select(prepared: &[PreparedAccount], ids: &BTreeSet<&str>) -> Vec<PreparedAccount> {
    prepared
        .iter()
        .filter(|a| ids.contains(a.account_id.as_str()))
        .cloned()
        .collect()
}

#[derive(Debug, Clone)]
pub struct FoldOutcome {
    pub fold: usize,
    pub model: TrainedModel,
    pub train_ids: Vec<String>,
    pub validation_ids: Vec<String>,
    pub predictions: Vec<AccountPrediction>,
    pub matrix: ConfusionMatrix,
    pub report: MetricReport,
}

#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub folds: Vec<FoldOutcome>,
}

/// k-fold cross-validation over `non_test`. Every fold fits its model on its
/// training accounts alone and scores its validation accounts.
pub fn cross_validate(non_test: &Corpus, k: usize, seed: u64, pipeline: &Pipeline) -> Result<CrossValidation> {
    if let Some(a) = non_test.accounts().iter().find(|a| a.label.is_none()) {
        return Err(Error::UnlabeledAccount(a.account_id.clone()));
    }
    let splits = kfold_splits(non_test, k, seed)?;
    // segmentation depends on no fitted state, so it is shared by all folds
    let prepared = pipeline.prepare(non_test);
    let folds = splits
        .par_iter()
        .enumerate()
        .map(|(fold, split)| {
            let train = select(&prepared, &split.train.ids());
            let validation = select(&prepared, &split.validation.ids());
            let model = pipeline.fit(&train)?;
            let predictions = pipeline.predict_all(&model, &validation)?;
            let (matrix, report) = score(non_test.label_set(), &predictions)?;
            Ok(FoldOutcome {
                fold,
                model,
                train_ids: train.into_iter().map(|a| a.account_id).collect(),
                validation_ids: validation.into_iter().map(|a| a.account_id).collect(),
                predictions,
                matrix,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CrossValidation { folds })
}

#[derive(Debug, Clone)]
pub struct TestEvaluation {
    pub model: TrainedModel,
    pub predictions: Vec<AccountPrediction>,
    pub matrix: ConfusionMatrix,
    pub report: MetricReport,
}

/// Fits on all of `non_test` and scores `test`.
pub fn evaluate_test_set(non_test: &Corpus, test: &Corpus, pipeline: &Pipeline) -> Result<TestEvaluation> {
    if test.is_empty() {
        return Err(Error::Empty("test set"));
    }
    let train = pipeline.prepare(non_test);
    let model = pipeline.fit(&train)?;
    if let Some(a) = test.accounts().iter().find(|a| a.label.is_none()) {
        return Err(Error::UnlabeledAccount(a.account_id.clone()));
    }
    // the model only ever sees query tokens; labels are read back in `score`
    let queries = pipeline.prepare(test);
    let predictions = pipeline.predict_all(&model, &queries)?;
    let (matrix, report) = score(non_test.label_set(), &predictions)?;
    Ok(TestEvaluation {
        model,
        predictions,
        matrix,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub validation: Vec<String>,
    pub labels: Vec<String>,
    pub confusion: Vec<Vec<u64>>,
    pub accuracy: f64,
    pub per_label: BTreeMap<String, LabelMetrics>,
    pub support: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelSummary {
    pub precision: Summary,
    pub recall: Summary,
    pub f1: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub accuracy: Summary,
    pub per_label: BTreeMap<String, LabelSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValReport {
    pub config: PipelineConfig,
    pub folds: Vec<FoldReport>,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub config: PipelineConfig,
    pub labels: Vec<String>,
    pub confusion: Vec<Vec<u64>>,
    pub accuracy: f64,
    pub per_label: BTreeMap<String, LabelMetrics>,
    pub support: BTreeMap<String, u64>,
    pub predictions: Vec<AccountPrediction>,
}

/// Stored report, tagged by `"kind"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Report {
    Crossval(CrossValReport),
    Test(TestReport),
}

impl CrossValidation {
    pub fn aggregate(&self) -> Aggregate {
        let acc: Vec<f64> = self.folds.iter().map(|f| f.report.accuracy).collect();
        let mut labels: BTreeSet<&String> = BTreeSet::new();
        for f in &self.folds {
            labels.extend(f.report.per_label.keys());
        }
        let per_label = labels
            .into_iter()
            .map(|l| {
                let pick = |g: fn(&LabelMetrics) -> f64| -> Summary {
                    let v: Vec<f64> = self
                        .folds
                        .iter()
                        .filter_map(|f| f.report.per_label.get(l).map(g))
                        .collect();
                    Summary::of(&v)
                };
                let s = LabelSummary {
                    precision: pick(|m| m.precision),
                    recall: pick(|m| m.recall),
                    f1: pick(|m| m.f1),
                };
                (l.clone(), s)
            })
            .collect();
        Aggregate {
            accuracy: Summary::of(&acc),
            per_label,
        }
    }

    pub fn report(&self, config: &PipelineConfig) -> CrossValReport {
        CrossValReport {
            config: config.clone(),
            folds: self
                .folds
                .iter()
                .map(|f| FoldReport {
                    fold: f.fold,
                    validation: f.validation_ids.clone(),
                    labels: f.matrix.labels().to_vec(),
                    confusion: f.matrix.counts().to_vec(),
                    accuracy: f.report.accuracy,
                    per_label: f.report.per_label.clone(),
                    support: f.report.support.clone(),
                })
                .collect(),
            aggregate: self.aggregate(),
        }
    }
}

impl TestEvaluation {
    pub fn report(&self, config: &PipelineConfig) -> TestReport {
        TestReport {
            config: config.clone(),
            labels: self.matrix.labels().to_vec(),
            confusion: self.matrix.counts().to_vec(),
            accuracy: self.report.accuracy,
            per_label: self.report.per_label.clone(),
            support: self.report.support.clone(),
            predictions: self.predictions.clone(),
        }
    }
}

fn r2(x: f64) -> String {
    format!("{:.2}", round_half_up(x, 2))
}

fn write_label_lines(f: &mut fmt::Formatter<'_>, per_label: &BTreeMap<String, LabelMetrics>) -> fmt::Result {
    for (label, m) in per_label {
        writeln!(
            f,
            "  {label}: precision {} recall {} f1 {}",
            r2(m.precision),
            r2(m.recall),
            r2(m.f1)
        )?;
    }
    Ok(())
}

fn write_matrix(f: &mut fmt::Formatter<'_>, labels: &[String], counts: &[Vec<u64>]) -> fmt::Result {
    match ConfusionMatrix::from_counts(labels.to_vec(), counts.to_vec()) {
        Ok(m) => write!(f, "{m}"),
        Err(_) => writeln!(f, "(malformed confusion matrix)"),
    }
}

impl fmt::Display for CrossValReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fold in &self.folds {
            writeln!(f, "fold {} ({} accounts)", fold.fold, fold.validation.len())?;
            write_matrix(f, &fold.labels, &fold.confusion)?;
            writeln!(f, "  accuracy {}", r2(fold.accuracy))?;
            write_label_lines(f, &fold.per_label)?;
            writeln!(f)?;
        }
        let a = &self.aggregate;
        writeln!(f, "mean accuracy {} (std {})", r2(a.accuracy.mean), r2(a.accuracy.std))?;
        for (label, s) in &a.per_label {
            writeln!(
                f,
                "  {label}: precision {} recall {} f1 {} (std {})",
                r2(s.precision.mean),
                r2(s.recall.mean),
                r2(s.f1.mean),
                r2(s.f1.std)
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_matrix(f, &self.labels, &self.confusion)?;
        writeln!(f, "accuracy {}", r2(self.accuracy))?;
        write_label_lines(f, &self.per_label)?;
        let wrong: Vec<&AccountPrediction> = self
            .predictions
            .iter()
            .filter(|p| p.key.as_deref() != Some(p.predicted.as_str()))
            .collect();
        if !wrong.is_empty() {
            writeln!(f, "misclassified:")?;
            for p in wrong {
                let near: Vec<String> = p
                    .neighbors
                    .iter()
                    .map(|n| format!("{}:{}:{:.3}", n.account_id, n.label, n.similarity))
                    .collect();
                writeln!(
                    f,
                    "  {} key {} output {} neighbors [{}]",
                    p.account_id,
                    p.key.as_deref().unwrap_or("-"),
                    p.predicted,
                    near.join(", ")
                )?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Report::Crossval(r) => r.fmt(f),
            Report::Test(r) => r.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Tweet;
    use crate::segmenter::Lexicon;
    use chrono::{TimeZone, Utc};

    fn pipeline(kind: ModelKind, k: usize) -> Pipeline {
        let mut lex = Lexicon::new();
        for w in ["足球", "比赛", "球队", "面条", "米饭", "厨师"] {
            lex.add_word(w, 10).unwrap();
        }
        let config = PipelineConfig {
            model: ModelConfig {
                kind,
                k,
                ..ModelConfig::default()
            },
            ..PipelineConfig::default()
        };
        Pipeline::new(
            config,
            Preprocessor {
                convert: None,
                segmenter: Segmenter::new(lex, None),
            },
        )
    }

    fn account(id: &str, label: &str, text: &str) -> AccountRecord {
        AccountRecord {
            account_id: id.into(),
            follower_count: 20_000,
            label: Some(label.into()),
            tweets: vec![Tweet {
                text: text.into(),
                timestamp: Utc.with_ymd_and_hms(2021, 2, 1, 0, 0, 0).unwrap(),
            }],
        }
    }

    fn toy() -> Corpus {
        Corpus::new(
            vec!["A".into(), "B".into()],
            vec![
                account("a1", "A", "足球比赛"),
                account("a2", "A", "球队比赛足球"),
                account("b1", "B", "面条米饭"),
                account("b2", "B", "厨师米饭面条"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn separable_two_fold() {
        let p = pipeline(ModelKind::Knn, 1);
        let cv = cross_validate(&toy(), 2, 0, &p).unwrap();
        assert_eq!(cv.folds.len(), 2);
        for f in &cv.folds {
            assert_eq!(f.report.accuracy, 1.0);
        }
        let agg = cv.aggregate();
        assert_eq!(agg.accuracy.mean, 1.0);
    }

    #[test]
    fn aggregate_mean_is_fold_mean() {
        let p = pipeline(ModelKind::Baseline0, 1);
        let cv = cross_validate(&toy(), 4, 1, &p).unwrap();
        let accs: Vec<f64> = cv.folds.iter().map(|f| f.report.accuracy).collect();
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        assert_eq!(cv.aggregate().accuracy.mean, mean);
    }

    #[test]
    fn idf_excludes_validation_terms() {
        let mut c = toy().into_accounts();
        c.push(account("b3", "B", "厨师面条 uniqueterm"));
        let c = Corpus::new(vec!["A".into(), "B".into()], c).unwrap();
        let p = pipeline(ModelKind::Knn, 1);
        let cv = cross_validate(&c, 2, 5, &p).unwrap();
        for f in &cv.folds {
            let idf = f.model.idf().unwrap();
            let in_validation = f.validation_ids.iter().any(|id| id == "b3");
            assert_eq!(idf.contains("uniqueterm"), !in_validation);
        }
    }

    #[test]
    fn leave_in_test_scores_perfectly() {
        let p = pipeline(ModelKind::Knn, 1);
        let c = toy();
        let ev = evaluate_test_set(&c, &c, &p).unwrap();
        assert_eq!(ev.report.accuracy, 1.0);
        assert_eq!(ev.matrix.total(), 4);
    }

    #[test]
    fn baselines_run_end_to_end() {
        let c = toy();
        let b0 = evaluate_test_set(&c, &c, &pipeline(ModelKind::Baseline0, 1)).unwrap();
        assert!(b0.predictions.iter().all(|p| p.predicted == "A"));
        let b1 = evaluate_test_set(&c, &c, &pipeline(ModelKind::Baseline1, 1)).unwrap();
        assert_eq!(b1.report.accuracy, 1.0);
    }

    #[test]
    fn report_roundtrip_and_text() {
        let p = pipeline(ModelKind::Knn, 1);
        let cv = cross_validate(&toy(), 2, 0, &p).unwrap();
        let report = Report::Crossval(cv.report(p.config()));
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.starts_with("{\"kind\":\"crossval\""));
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(report.to_string().contains("mean accuracy 1.00"));
    }

    #[test]
    fn config_defaults() {
        let c = PipelineConfig::default();
        assert_eq!(c.filters.min_followers, 10_000);
        assert_eq!(c.filters.min_tweets, 10);
        assert_eq!(c.model.k, 5);
        assert_eq!(c.model.top_n, 25);
        assert_eq!(c.model.weighting, Weighting::Uniform);
        assert_eq!(c.model.tf, TfVariant::Raw);
        assert_eq!(c.folds, 5);
        assert_eq!(c.seed, 0);
        let parsed: PipelineConfig = serde_json::from_str(r#"{"model":{"k":3}}"#).unwrap();
        assert_eq!(parsed.model.k, 3);
        assert_eq!(parsed.model.top_n, 25);
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"bogus":1}"#).is_err());
    }
}
