//! Confusion matrices and the accuracy / precision / recall / F1 family.
//!
//! Rows are keys (true labels), columns are system outputs. Precision, recall
//! and F1 are 0 whenever their denominator is 0.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn zeros(labels: Vec<String>) -> Self {
        let n = labels.len();
        ConfusionMatrix {
            labels,
            counts: vec![vec![0; n]; n],
        }
    }

    /// Matrix from explicit counts, `counts[key][output]`.
    pub fn from_counts(labels: Vec<String>, counts: Vec<Vec<u64>>) -> Result<Self> {
        if counts.len() != labels.len() || counts.iter().any(|r| r.len() != labels.len()) {
            return Err(Error::invalid("confusion counts must be square over the label set"));
        }
        Ok(ConfusionMatrix { labels, counts })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::LabelNotInSet(label.to_string()))
    }

    pub fn get(&self, key: &str, output: &str) -> Result<u64> {
        Ok(self.counts[self.index_of(key)?][self.index_of(output)?])
    }

    pub fn record(&mut self, key: &str, output: &str) -> Result<()> {
        let (k, o) = (self.index_of(key)?, self.index_of(output)?);
        self.counts[k][o] += 1;
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn transpose(&self) -> ConfusionMatrix {
        let n = self.labels.len();
        ConfusionMatrix {
            labels: self.labels.clone(),
            counts: (0..n).map(|i| (0..n).map(|j| self.counts[j][i]).collect()).collect(),
        }
    }

    /// One-vs-rest counts for `positive`.
    pub fn outcome_counts(&self, positive: &str) -> Result<OutcomeCounts> {
        let p = self.index_of(positive)?;
        let tp = self.counts[p][p];
        let fn_ = self.counts[p].iter().sum::<u64>() - tp;
        let fp = self.counts.iter().map(|r| r[p]).sum::<u64>() - tp;
        let tn = self.total() - tp - fp - fn_;
        Ok(OutcomeCounts { tp, fp, fn_, tn })
    }
}

impl fmt::Display for ConfusionMatrix {
    /// `Key \ Output` table.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header = "Key \\ Output";
        let width = self
            .labels
            .iter()
            .map(|l| l.chars().count())
            .chain([header.len()])
            .max()
            .unwrap_or(0);
        let col = self.labels.iter().map(|l| l.chars().count()).max().unwrap_or(0).max(5);
        write!(f, "{header:<width$}")?;
        for l in &self.labels {
            write!(f, "  {l:>col$}")?;
        }
        writeln!(f)?;
        for (l, row) in self.labels.iter().zip(&self.counts) {
            write!(f, "{l:<width$}")?;
            for c in row {
                write!(f, "  {c:>col$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn confusion_matrix<S: AsRef<str>>(keys: &[S], outputs: &[S], label_set: &[String]) -> Result<ConfusionMatrix> {
    if keys.len() != outputs.len() {
        return Err(Error::LengthMismatch {
            left: keys.len(),
            right: outputs.len(),
        });
    }
    let mut m = ConfusionMatrix::zeros(label_set.to_vec());
    for (k, o) in keys.iter().zip(outputs) {
        m.record(k.as_ref(), o.as_ref())?;
    }
    Ok(m)
}

/// Accuracy `(TP + TN) / total`, precision, recall and F1 with `positive`
/// as the positive class.
pub fn metrics(m: &ConfusionMatrix, positive: &str) -> Result<BinaryMetrics> {
    let total = m.total();
    if total == 0 {
        return Err(Error::Empty("confusion matrix"));
    }
    let OutcomeCounts { tp, fp, fn_, tn } = m.outcome_counts(positive)?;
    let precision = ratio(tp as f64, (tp + fp) as f64);
    let recall = ratio(tp as f64, (tp + fn_) as f64);
    Ok(BinaryMetrics {
        accuracy: (tp + tn) as f64 / total as f64,
        precision,
        recall,
        f1: ratio(2.0 * precision * recall, precision + recall),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// `trace / total`.
    pub accuracy: f64,
    pub per_label: BTreeMap<String, LabelMetrics>,
    pub support: BTreeMap<String, u64>,
}

impl MetricReport {
    pub fn from_matrix(m: &ConfusionMatrix) -> Result<Self> {
        let total = m.total();
        if total == 0 {
            return Err(Error::Empty("confusion matrix"));
        }
        let mut per_label = BTreeMap::new();
        let mut support = BTreeMap::new();
        for (i, label) in m.labels().iter().enumerate() {
            let b = metrics(m, label)?;
            per_label.insert(
                label.clone(),
                LabelMetrics {
                    precision: b.precision,
                    recall: b.recall,
                    f1: b.f1,
                },
            );
            support.insert(label.clone(), m.counts()[i].iter().sum());
        }
        Ok(MetricReport {
            accuracy: m.trace() as f64 / total as f64,
            per_label,
            support,
        })
    }
}

/// Half-up rounding to `places` decimals. A relative nudge of a few ulps
/// keeps values like 0.125 from rounding down through binary representation.
pub fn round_half_up(x: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    let scaled = x * scale;
    (scaled + 0.5 + scaled.abs() * 4.0 * f64::EPSILON).floor() / scale
}

/// Mean and sample standard deviation (n - 1; 0 for a single value).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let n = values.len();
        if n == 0 {
            return Summary { mean: 0.0, std: 0.0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Summary { mean, std }
    }
}
