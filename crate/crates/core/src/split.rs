//! Stratified hold-out and repeated k-fold splits.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitKind {
    HoldOut { train_fraction: f64 },
    CrossValidation { folds: usize, repeats: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitPlan {
    pub kind: SplitKind,
    pub seed: u64,
}

impl SplitPlan {
    pub fn hold_out(train_fraction: f64, seed: u64) -> Self {
        Self { kind: SplitKind::HoldOut { train_fraction }, seed }
    }

    pub fn cross_validation(folds: usize, repeats: usize, seed: u64) -> Self {
        Self { kind: SplitKind::CrossValidation { folds, repeats }, seed }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            SplitKind::HoldOut { train_fraction } if !(train_fraction > 0.0 && train_fraction < 1.0) => {
                Err(Error::InvalidSplit(format!("train fraction {train_fraction} not in (0, 1)")))
            }
            SplitKind::CrossValidation { folds, .. } if folds < 2 => {
                Err(Error::InvalidSplit(format!("{folds} folds; need at least 2")))
            }
            SplitKind::CrossValidation { repeats: 0, .. } => Err(Error::InvalidSplit("0 repeats".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub repeat: usize,
    pub fold: usize,
    /// Sorted training indices.
    pub train: Vec<usize>,
    /// Sorted test indices.
    pub test: Vec<usize>,
}

fn by_class(labels: &[usize]) -> Vec<Vec<usize>> {
    let n_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut groups = vec![Vec::new(); n_classes];
    for (i, &y) in labels.iter().enumerate() {
        groups[y].push(i);
    }
    groups
}

/// Produces `(train, test)` index sets stratified by class. Hold-out yields
/// one pair; cross-validation yields `folds * repeats` pairs, repeat-major.
pub fn make_splits(labels: &[usize], plan: &SplitPlan) -> Result<Vec<SplitIndices>> {
    plan.validate()?;
    if labels.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    match plan.kind {
        SplitKind::HoldOut { train_fraction } => Ok(vec![hold_out(labels, train_fraction, plan.seed)?]),
        SplitKind::CrossValidation { folds, repeats } => {
            if labels.len() < folds {
                return Err(Error::InsufficientSamples { needed: folds, found: labels.len() });
            }
            let groups = by_class(labels);
            if let Some((class, g)) = groups.iter().enumerate().find(|(_, g)| !g.is_empty() && g.len() < folds) {
                return Err(Error::ClassTooSmall { class, count: g.len(), folds });
            }
            let mut out = Vec::with_capacity(folds * repeats);
            for repeat in 0..repeats {
                let mut rng = substream(plan.seed, repeat as u64);
                let mut assignment = vec![0usize; labels.len()];
                let mut offset = 0;
                for group in &groups {
                    let mut shuffled = group.clone();
                    shuffled.shuffle(&mut rng);
                    for (i, idx) in shuffled.into_iter().enumerate() {
                        assignment[idx] = (offset + i) % folds;
                    }
                    offset += group.len();
                }
                for fold in 0..folds {
                    let (test, train): (Vec<usize>, Vec<usize>) =
                        (0..labels.len()).partition(|&i| assignment[i] == fold);
                    out.push(SplitIndices { repeat, fold, train, test });
                }
            }
            Ok(out)
        }
    }
}

fn hold_out(labels: &[usize], fraction: f64, seed: u64) -> Result<SplitIndices> {
    let groups = by_class(labels);
    let target = (fraction * labels.len() as f64).round() as usize;
    let exact: Vec<f64> = groups.iter().map(|g| fraction * g.len() as f64).collect();
    let mut quota: Vec<usize> = exact.iter().map(|q| q.floor() as usize).collect();
    // largest remainder, ties to the lower class
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    let mut missing = target.saturating_sub(quota.iter().sum());
    for &c in order.iter().cycle().take(2 * groups.len()) {
        if missing == 0 {
            break;
        }
        if quota[c] < groups[c].len() {
            quota[c] += 1;
            missing -= 1;
        }
    }
    let mut rng = substream(seed, 0);
    let mut train = Vec::with_capacity(target);
    let mut test = Vec::with_capacity(labels.len() - target);
    for (group, &q) in groups.iter().zip(&quota) {
        let mut shuffled = group.clone();
        shuffled.shuffle(&mut rng);
        train.extend_from_slice(&shuffled[..q]);
        test.extend_from_slice(&shuffled[q..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices { repeat: 0, fold: 0, train, test })
}
