//! Segmentation, language-model and corpus evaluation metrics.

mod labels;

pub use labels::{boundaries_from_segmented, boundaries_from_tokens, read_gold_labels, BoundaryLabels};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenizer::TokenStream;

/// Boundary precision/recall/F1 with the counts they came from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl MetricsReport {
    /// Derives the ratios from raw counts. An empty denominator yields 1.
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let ratio = |num: u64, den: u64| if den == 0 { 1.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self { precision, recall, f1, tp, fp, fn_ }
    }

    /// Sums the counts of two reports (micro-averaging).
    pub fn combine(&self, other: &MetricsReport) -> Self {
        Self::from_counts(self.tp + other.tp, self.fp + other.fp, self.fn_ + other.fn_)
    }
}

pub fn boundary_prf(predicted: &BoundaryLabels, gold: &BoundaryLabels) -> Result<MetricsReport> {
    if predicted.len() != gold.len() {
        return Err(Error::Metrics(format!(
            "label lengths differ: predicted {} vs gold {}",
            predicted.len(),
            gold.len()
        )));
    }
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (&p, &g) in predicted.as_slice().iter().zip(gold.as_slice()) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(MetricsReport::from_counts(tp, fp, fn_))
}

/// `exp(mean_nll)`: perplexity from a mean negative log-likelihood in nats.
pub fn perplexity(mean_nll: f64) -> Result<f64> {
    if !mean_nll.is_finite() || mean_nll < 0.0 {
        return Err(Error::Metrics(format!("mean NLL must be a finite non-negative number, got {mean_nll}")));
    }
    Ok(mean_nll.exp())
}

pub fn accuracy<T: PartialEq>(predicted: &[T], gold: &[T]) -> Result<f64> {
    if predicted.len() != gold.len() {
        return Err(Error::Metrics(format!(
            "label lengths differ: predicted {} vs gold {}",
            predicted.len(),
            gold.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::Metrics("accuracy of zero samples".into()));
    }
    let hits = predicted.iter().zip(gold).filter(|(p, g)| p == g).count();
    Ok(hits as f64 / gold.len() as f64)
}

/// Document and token counts with per-document length moments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub documents: u64,
    pub tokens: u64,
    pub mean_length: f64,
    /// Population standard deviation.
    pub std_length: f64,
}

/// Exact integer accumulator behind [`CorpusStats`]; merging shards is
/// associative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StatsAccumulator {
    documents: u64,
    tokens: u64,
    sum_squares: u128,
}

impl StatsAccumulator {
    pub fn add(&mut self, doc_tokens: u64) {
        self.documents += 1;
        self.tokens += doc_tokens;
        self.sum_squares += u128::from(doc_tokens) * u128::from(doc_tokens);
    }

    pub fn merge(&mut self, other: &StatsAccumulator) {
        self.documents += other.documents;
        self.tokens += other.tokens;
        self.sum_squares += other.sum_squares;
    }

    pub fn finish(&self) -> CorpusStats {
        if self.documents == 0 {
            return CorpusStats::default();
        }
        let n = u128::from(self.documents);
        let t = u128::from(self.tokens);
        // n^2 * variance = n * sum(x^2) - (sum x)^2, exact in integers
        let scaled_var = n * self.sum_squares - t * t;
        let n = self.documents as f64;
        CorpusStats {
            documents: self.documents,
            tokens: self.tokens,
            mean_length: self.tokens as f64 / n,
            std_length: (scaled_var as f64).sqrt() / n,
        }
    }
}

pub fn corpus_stats<'a, I>(streams: I) -> CorpusStats
where
    I: IntoIterator<Item = &'a TokenStream>,
{
    let mut acc = StatsAccumulator::default();
    for s in streams {
        acc.add(s.len() as u64);
    }
    acc.finish()
}
