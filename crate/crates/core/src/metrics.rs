//! Macro-averaged classification metrics and t-based confidence intervals.

use std::fmt;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics<F = f64> {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub support: usize,
    pub precision: F,
    pub recall: F,
    pub f1: F,
    /// Precision had a zero denominator (class never predicted).
    pub precision_undefined: bool,
    /// Recall had a zero denominator (class absent from labels).
    pub recall_undefined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport<F = f64> {
    pub per_class: Vec<ClassMetrics<F>>,
    pub macro_precision: F,
    pub macro_recall: F,
    /// Mean of per-class F1 scores.
    pub macro_f1: F,
    pub accuracy: F,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub total: usize,
}

fn ratio<F: Scalar>(num: usize, den: usize) -> (F, bool) {
    if den == 0 {
        (F::zero(), true)
    } else {
        (F::from_usize_lossy(num) / F::from_usize_lossy(den), false)
    }
}

pub fn macro_metrics<F: Scalar>(predictions: &[usize], labels: &[usize], n_classes: usize) -> Result<MetricsReport<F>> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch { left: predictions.len(), right: labels.len() });
    }
    if n_classes == 0 {
        return Err(Error::NoClasses);
    }
    if let Some(&bad) = predictions.iter().chain(labels).find(|&&c| c >= n_classes) {
        return Err(Error::UnknownLabel(bad.to_string()));
    }
    let mut confusion = vec![vec![0usize; n_classes]; n_classes];
    for (&p, &y) in predictions.iter().zip(labels) {
        confusion[y][p] += 1;
    }
    let per_class: Vec<ClassMetrics<F>> = (0..n_classes)
        .map(|c| {
            let tp = confusion[c][c];
            let support: usize = confusion[c].iter().sum();
            let predicted: usize = confusion.iter().map(|row| row[c]).sum();
            let (precision, precision_undefined) = ratio::<F>(tp, predicted);
            let (recall, recall_undefined) = ratio::<F>(tp, support);
            let denom = precision + recall;
            let f1 = if denom > F::zero() { (F::one() + F::one()) * precision * recall / denom } else { F::zero() };
            ClassMetrics {
                true_positives: tp,
                false_positives: predicted - tp,
                false_negatives: support - tp,
                support,
                precision,
                recall,
                f1,
                precision_undefined,
                recall_undefined,
            }
        })
        .collect();
    let n = F::from_usize_lossy(n_classes);
    let mean = |f: fn(&ClassMetrics<F>) -> F| per_class.iter().map(f).fold(F::zero(), |a, b| a + b) / n;
    let trace: usize = (0..n_classes).map(|c| confusion[c][c]).sum();
    let (accuracy, _) = ratio::<F>(trace, labels.len());
    Ok(MetricsReport {
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f1: mean(|m| m.f1),
        accuracy,
        per_class,
        confusion,
        total: labels.len(),
    })
}

impl<F: Scalar> MetricsReport<F> {
    /// Plain-text report; `labels` names the classes.
    pub fn render(&self, labels: &[String]) -> String {
        let name = |c: usize| labels.get(c).cloned().unwrap_or_else(|| c.to_string());
        let mut out = String::new();
        out.push_str(&format!("accuracy        {:.6}\n", self.accuracy.to_f64_lossy()));
        out.push_str(&format!("macro precision {:.6}\n", self.macro_precision.to_f64_lossy()));
        out.push_str(&format!("macro recall    {:.6}\n", self.macro_recall.to_f64_lossy()));
        out.push_str(&format!("macro f1        {:.6}\n", self.macro_f1.to_f64_lossy()));
        out.push_str("class\tsupport\tprecision\trecall\tf1\n");
        for (c, m) in self.per_class.iter().enumerate() {
            out.push_str(&format!(
                "{}\t{}\t{:.6}{}\t{:.6}{}\t{:.6}\n",
                name(c),
                m.support,
                m.precision.to_f64_lossy(),
                if m.precision_undefined { "*" } else { "" },
                m.recall.to_f64_lossy(),
                if m.recall_undefined { "*" } else { "" },
                m.f1.to_f64_lossy()
            ));
        }
        out.push_str("confusion (rows true, columns predicted)\n");
        for row in &self.confusion {
            out.push_str(&row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\t"));
            out.push('\n');
        }
        out
    }
}

/// Mean and Student-t half-width of a sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary<F = f64> {
    pub samples: Vec<F>,
    pub mean: F,
    pub half_width: F,
    pub level: F,
}

impl<F: Scalar> fmt::Display for RunSummary<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4} ± {:.4}", self.mean.to_f64_lossy(), self.half_width.to_f64_lossy())
    }
}

/// `mean ± t(level, n-1) * s / sqrt(n)`.
pub fn confidence_interval<F: Scalar>(samples: &[F], level: F) -> Result<RunSummary<F>> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, found: samples.len() });
    }
    if !(level > F::zero() && level < F::one()) {
        return Err(Error::InvalidSplit(format!("confidence level {level} not in (0, 1)")));
    }
    let n = F::from_usize_lossy(samples.len());
    let mean = samples.iter().fold(F::zero(), |a, &b| a + b) / n;
    let var = samples.iter().map(|&x| (x - mean) * (x - mean)).fold(F::zero(), |a, b| a + b) / (n - F::one());
    let stderr = (var / n).sqrt();
    let dof = (samples.len() - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, dof).expect("positive degrees of freedom");
    let upper = 0.5 + level.to_f64_lossy() / 2.0;
    let quantile = F::from_f64_lossy(t.inverse_cdf(upper));
    Ok(RunSummary { samples: samples.to_vec(), mean, half_width: quantile * stderr, level })
}
