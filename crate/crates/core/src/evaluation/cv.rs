use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{confusion_metrics, roc_auc, youden_threshold, Confusion, FoldPlan, RocCurve};
use crate::classifiers::ClassifierConfig;
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;
use crate::pls::{fit_pls_detailed, PlsOutput};
use crate::rng::derive_seed;

/// Feature rows for cross-validation. Several rows may belong to one sample
/// (patches of a slice); their held-out scores are averaged per sample.
#[derive(Debug, Clone, Copy)]
pub struct CvInput<'a> {
    pub features: &'a FeatureMatrix,
    /// Sample index of every feature row.
    pub row_sample: &'a [usize],
    /// One label per sample.
    pub labels: &'a [u8],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// Absent when the held-out fold has a single class.
    pub auc: Option<f64>,
    pub metrics: Confusion,
}

/// Mean and sample standard deviation across folds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdMetrics {
    pub auc_mean: f64,
    pub auc_sd: f64,
    pub accuracy_mean: f64,
    pub accuracy_sd: f64,
    pub sensitivity_mean: f64,
    pub sensitivity_sd: f64,
    pub specificity_mean: f64,
    pub specificity_sd: f64,
}

/// Pooled held-out metrics (headline) plus the per-fold breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_samples: usize,
    pub auc: f64,
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub threshold_used: f64,
    pub confusion: Confusion,
    /// Metrics at the Youden-optimal cutoff of the pooled scores.
    pub youden: Confusion,
    pub per_fold: Vec<FoldMetrics>,
    pub fold_summary: ThresholdMetrics,
    /// Held-out score of every sample, in sample order.
    pub sample_scores: Vec<f64>,
    pub roc: RocCurve,
}

struct FoldOutcome {
    test: Vec<usize>,
    scores: Vec<f64>,
    threshold: f64,
    n_train: usize,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (m, var.sqrt())
}

/// Column z-scoring fitted on the training scores.
fn standardize(train: &FeatureMatrix, test: &FeatureMatrix) -> Result<(FeatureMatrix, FeatureMatrix)> {
    let n = train.n_rows() as f64;
    let stats: Vec<(f64, f64)> = (0..train.n_cols())
        .map(|j| {
            let col = train.column(j);
            let m = col.iter().sum::<f64>() / n;
            let sd = (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt();
            (m, if sd > 1e-12 { sd } else { 1.0 })
        })
        .collect();
    let apply = |x: &FeatureMatrix| {
        let data = x
            .as_slice()
            .chunks(x.n_cols().max(1))
            .flat_map(|row| row.iter().zip(&stats).map(|(v, (m, s))| (v - m) / s))
            .collect();
        FeatureMatrix::new(x.names().to_vec(), x.n_rows(), data)
    };
    Ok((apply(train)?, apply(test)?))
}

fn run_fold(
    input: &CvInput,
    plan: &FoldPlan,
    fold: usize,
    pls_components: usize,
    pls_output: PlsOutput,
    classifier: &ClassifierConfig,
    seed: u64,
) -> Result<FoldOutcome> {
    let (train_rows, test_rows): (Vec<usize>, Vec<usize>) = (0..input.features.n_rows())
        .partition(|&r| plan.assignments[input.row_sample[r]] != fold);
    let (train_samples, test) = plan.split(fold);
    if train_rows.is_empty() || test_rows.is_empty() {
        return Err(Error::Empty(format!("fold {fold} has no training or test rows")));
    }
    let x_train = input.features.select_rows(&train_rows);
    let x_test = input.features.select_rows(&test_rows);
    let row_labels: Vec<u8> = train_rows.iter().map(|&r| input.labels[input.row_sample[r]]).collect();
    let y: Vec<f64> = row_labels.iter().map(|&l| f64::from(l)).collect();

    let fit = fit_pls_detailed(&x_train, &y, pls_components, pls_output)?;
    let t_test = fit.model.transform(&x_test)?;
    let (t_train, t_test) = standardize(&fit.scores, &t_test)?;
    let head = classifier.fit(&t_train, &row_labels, derive_seed(seed, "classifier", fold as u64))?;
    let row_scores = head.score(&t_test)?;

    // mean over the rows of each held-out sample
    let mut sums = vec![0.0; plan.len()];
    let mut counts = vec![0usize; plan.len()];
    for (&r, s) in test_rows.iter().zip(row_scores) {
        sums[input.row_sample[r]] += s;
        counts[input.row_sample[r]] += 1;
    }
    let scores = test
        .iter()
        .map(|&i| {
            if counts[i] == 0 {
                Err(Error::Empty(format!("sample {i} has no feature rows")))
            } else {
                Ok(sums[i] / counts[i] as f64)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FoldOutcome {
        test,
        scores,
        threshold: head.default_threshold(),
        n_train: train_samples.len(),
    })
}

/// Fits PLS and the classifier on the training folds only and scores each
/// held-out fold; folds run in parallel and are assembled in fold order.
pub fn cross_validate_features(
    input: CvInput,
    plan: &FoldPlan,
    pls_components: usize,
    pls_output: PlsOutput,
    classifier: &ClassifierConfig,
    seed: u64,
) -> Result<EvalReport> {
    if input.row_sample.len() != input.features.n_rows() {
        return Err(Error::Shape(format!(
            "{} row owners for {} feature rows",
            input.row_sample.len(),
            input.features.n_rows()
        )));
    }
    if input.labels.len() != plan.len() {
        return Err(Error::Shape(format!(
            "{} labels for a plan over {} samples",
            input.labels.len(),
            plan.len()
        )));
    }
    if let Some(&bad) = input.row_sample.iter().find(|&&s| s >= plan.len()) {
        return Err(Error::Shape(format!("row owner {bad} out of range")));
    }

    let outcomes = (0..plan.k)
        .into_par_iter()
        .map(|f| {
            run_fold(&input, plan, f, pls_components, pls_output, classifier, seed).map_err(|e| {
                Error::Fold {
                    fold: f,
                    source: Box::new(e),
                }
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let n = plan.len();
    let mut pooled = vec![0.0; n];
    let mut per_fold = Vec::with_capacity(plan.k);
    for (f, o) in outcomes.iter().enumerate() {
        let labels: Vec<u8> = o.test.iter().map(|&i| input.labels[i]).collect();
        for (&i, &s) in o.test.iter().zip(&o.scores) {
            pooled[i] = s;
        }
        per_fold.push(FoldMetrics {
            fold: f,
            n_train: o.n_train,
            n_test: o.test.len(),
            auc: roc_auc(&o.scores, &labels).ok().map(|(_, a)| a),
            metrics: confusion_metrics(&o.scores, &labels, o.threshold)?,
        });
    }
    let threshold = outcomes[0].threshold;
    let (roc, auc) = roc_auc(&pooled, input.labels)?;
    let confusion = confusion_metrics(&pooled, input.labels, threshold)?;
    let youden = youden_threshold(&pooled, input.labels)?;

    let aucs: Vec<f64> = per_fold.iter().filter_map(|f| f.auc).collect();
    let pick = |g: fn(&Confusion) -> f64| mean_sd(&per_fold.iter().map(|f| g(&f.metrics)).collect::<Vec<_>>());
    let (auc_mean, auc_sd) = mean_sd(&aucs);
    let (accuracy_mean, accuracy_sd) = pick(|c| c.accuracy);
    let (sensitivity_mean, sensitivity_sd) = pick(|c| c.sensitivity);
    let (specificity_mean, specificity_sd) = pick(|c| c.specificity);

    Ok(EvalReport {
        n_samples: n,
        auc,
        accuracy: confusion.accuracy,
        sensitivity: confusion.sensitivity,
        specificity: confusion.specificity,
        threshold_used: threshold,
        confusion,
        youden,
        per_fold,
        fold_summary: ThresholdMetrics {
            auc_mean,
            auc_sd,
            accuracy_mean,
            accuracy_sd,
            sensitivity_mean,
            sensitivity_sd,
            specificity_mean,
            specificity_sd,
        },
        sample_scores: pooled,
        roc,
    })
}
