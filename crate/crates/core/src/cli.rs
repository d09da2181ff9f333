//! `zhstance` command line: `convert`, `segment`, `vectorize`, `classify`,
//! `crossval`, `test` and `report`.
//!
//! Exit status is 0 on success, 1 on usage or validation errors and 2 on
//! I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classify::Weighting;
use crate::error::{Error, Result};
use crate::pipeline::{ModelKind, Pipeline, PipelineConfig, Report};
use crate::segmenter::{load_hmm, load_lexicon, Segmenter};
use crate::vectorize::TfVariant;
use crate::zh_convert::{load_conversion_table, to_simplified};

#[derive(Parser, Debug)]
#[command(
    name = "zhstance",
    version,
    about = "Stance classification of Chinese-language Twitter accounts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert traditional characters on stdin to simplified, line by line.
    Convert {
        #[arg(long, value_name = "PATH")]
        convert_table: PathBuf,
    },
    /// Segment stdin line by line; prints space-joined tokens.
    Segment {
        #[arg(long, value_name = "PATH")]
        dict: PathBuf,
        #[arg(long, value_name = "PATH")]
        hmm: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        convert_table: Option<PathBuf>,
        /// Keep URLs, mentions and hashtag marks.
        #[arg(long)]
        no_clean: bool,
    },
    /// Emit per-account TF-IDF weights as JSON lines (IDF fitted on the whole filtered corpus).
    Vectorize(RunArgs),
    /// Predict labels for the `--test-ids` accounts, or for unlabeled accounts when no ids are given.
    Classify(RunArgs),
    /// Filter, hold out `--test-ids`, and cross-validate on the rest.
    Crossval(RunArgs),
    /// Train on the non-test accounts and score the `--test-ids` accounts.
    Test(RunArgs),
    /// Pretty-print a stored JSON report.
    Report {
        #[arg(value_name = "PATH")]
        path: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Knn,
    Baseline0,
    Baseline1,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WeightingArg {
    Uniform,
    Inverse,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TfArg {
    Raw,
    Relative,
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// JSON config in the same shape as a report's `config`; flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    dict: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    hmm: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    convert_table: Option<PathBuf>,
    /// Words excluded from baseline 1's top-term lists.
    #[arg(long, value_name = "PATH")]
    stopwords: Option<PathBuf>,
    /// Held-out account ids, one per line.
    #[arg(long, value_name = "PATH")]
    test_ids: Option<PathBuf>,
    #[arg(long)]
    min_followers: Option<u64>,
    #[arg(long)]
    min_tweets: Option<usize>,
    /// First day of the tweet window, YYYY-MM-DD.
    #[arg(long)]
    since: Option<NaiveDate>,
    /// Last day of the tweet window, YYYY-MM-DD, inclusive.
    #[arg(long)]
    until: Option<NaiveDate>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    weighting: Option<WeightingArg>,
    #[arg(long)]
    top_n: Option<usize>,
    #[arg(long, value_enum)]
    tf: Option<TfArg>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    no_clean: bool,
    /// Where to write the JSON output.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

impl RunArgs {
    /// Defaults, then the config file, then flags.
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::from_json_file(p)?,
            None => PipelineConfig::default(),
        };
        let set_path = |slot: &mut Option<PathBuf>, v: &Option<PathBuf>| {
            if v.is_some() {
                slot.clone_from(v);
            }
        };
        set_path(&mut c.paths.corpus, &self.corpus);
        set_path(&mut c.paths.dict, &self.dict);
        set_path(&mut c.paths.hmm, &self.hmm);
        set_path(&mut c.paths.convert_table, &self.convert_table);
        set_path(&mut c.paths.stopwords, &self.stopwords);
        set_path(&mut c.paths.test_ids, &self.test_ids);
        if let Some(v) = self.min_followers {
            c.filters.min_followers = v;
        }
        if let Some(v) = self.min_tweets {
            c.filters.min_tweets = v;
        }
        if let Some(v) = self.since {
            c.filters.since = v;
        }
        if let Some(v) = self.until {
            c.filters.until = v;
        }
        if let Some(v) = self.model {
            c.model.kind = match v {
                ModelArg::Knn => ModelKind::Knn,
                ModelArg::Baseline0 => ModelKind::Baseline0,
                ModelArg::Baseline1 => ModelKind::Baseline1,
            };
        }
        if let Some(v) = self.k {
            c.model.k = v;
        }
        if let Some(v) = self.weighting {
            c.model.weighting = match v {
                WeightingArg::Uniform => Weighting::Uniform,
                WeightingArg::Inverse => Weighting::Inverse,
            };
        }
        if let Some(v) = self.top_n {
            c.model.top_n = v;
        }
        if let Some(v) = self.tf {
            c.model.tf = match v {
                TfArg::Raw => TfVariant::Raw,
                TfArg::Relative => TfVariant::Relative,
            };
        }
        if let Some(v) = self.folds {
            c.folds = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if self.no_clean {
            c.clean = false;
        }
        c.filters.window()?;
        Ok(c)
    }
}

fn stdout_err(e: io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn write_output(path: Option<&Path>, out: &mut dyn Write, body: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body).map_err(|e| Error::io(p, e)),
        None => out.write_all(body.as_bytes()).map_err(stdout_err),
    }
}

fn to_json_line<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string(value)?;
    s.push('\n');
    Ok(s)
}

fn for_each_line(stdin: &mut dyn BufRead, out: &mut dyn Write, f: impl Fn(&str) -> String) -> Result<()> {
    for line in stdin.lines() {
        let line = line.map_err(|e| Error::io("<stdin>", e))?;
        writeln!(out, "{}", f(&line)).map_err(stdout_err)?;
    }
    Ok(())
}

fn execute(command: Command, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Convert { convert_table } => {
            let table = load_conversion_table(&convert_table)?;
            for_each_line(stdin, out, |l| to_simplified(l, &table))
        }
        Command::Segment {
            dict,
            hmm,
            convert_table,
            no_clean,
        } => {
            let lexicon = load_lexicon(&dict)?;
            let hmm = hmm.as_deref().map(load_hmm).transpose()?;
            let table = convert_table.as_deref().map(load_conversion_table).transpose()?;
            let seg = Segmenter::new(lexicon, hmm).with_clean(!no_clean);
            for_each_line(stdin, out, |l| match &table {
                Some(t) => seg.cut(&to_simplified(l, t)).join(" "),
                None => seg.cut(l).join(" "),
            })
        }
        Command::Vectorize(args) => {
            let pipeline = Pipeline::from_config(args.resolve()?)?;
            let corpus = pipeline.load_filtered_corpus()?;
            let mut body = String::new();
            for (account_id, v) in pipeline.vectorize(&corpus)? {
                body.push_str(&to_json_line(&serde_json::json!({
                    "account_id": account_id,
                    "weights": v.weights(),
                }))?);
            }
            write_output(args.output.as_deref(), out, &body)
        }
        Command::Classify(args) => {
            let pipeline = Pipeline::from_config(args.resolve()?)?;
            let corpus = pipeline.load_filtered_corpus()?;
            let test_ids = pipeline.test_ids()?;
            let is_query = |a: &crate::corpus::AccountRecord| {
                if test_ids.is_empty() {
                    a.label.is_none()
                } else {
                    test_ids.contains(&a.account_id)
                }
            };
            if let Some(missing) = test_ids.iter().find(|id| corpus.get(id).is_none()) {
                return Err(Error::MissingAccount(missing.clone()));
            }
            let prepared = pipeline.prepare(&corpus);
            let (queries, train): (Vec<_>, Vec<_>) = prepared
                .into_iter()
                .zip(corpus.accounts())
                .partition(|(_, a)| is_query(a));
            let train: Vec<_> = train
                .into_iter()
                .map(|(p, _)| p)
                .filter(|p| p.label.is_some())
                .collect();
            let queries: Vec<_> = queries.into_iter().map(|(p, _)| p).collect();
            let model = pipeline.fit(&train)?;
            let mut body = String::new();
            for p in pipeline.predict_all(&model, &queries)? {
                body.push_str(&to_json_line(&serde_json::json!({
                    "account_id": p.account_id,
                    "predicted": p.predicted,
                    "neighbors": p.neighbors,
                    "votes": p.votes,
                }))?);
            }
            write_output(args.output.as_deref(), out, &body)
        }
        Command::Crossval(args) => {
            let report = Pipeline::from_config(args.resolve()?)?.crossval_report()?;
            emit_report(&report, args.output.as_deref(), out)
        }
        Command::Test(args) => {
            let config = args.resolve()?;
            if config.paths.test_ids.is_none() {
                return Err(Error::invalid("missing required path --test-ids"));
            }
            let report = Pipeline::from_config(config)?.test_report()?;
            emit_report(&report, args.output.as_deref(), out)
        }
        Command::Report { path } => {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let report: Report = serde_json::from_str(&text)
                .map_err(|e| Error::parse(path.display().to_string(), e.line(), e.to_string()))?;
            write!(out, "{report}").map_err(stdout_err)
        }
    }
}

/// Human table to stdout; JSON to `output` when given.
fn emit_report(report: &Report, output: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    write!(out, "{report}").map_err(stdout_err)?;
    if let Some(p) = output {
        let mut json = serde_json::to_string_pretty(report)?;
        json.push('\n');
        fs::write(p, json).map_err(|e| Error::io(p, e))?;
    }
    Ok(())
}

/// Runs the CLI with explicit streams and returns the exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, stdin, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
