//! Scoring simulated interview runs.
//!
//! Per-disease Top-K recall (of the vignettes whose true cause is d, how
//! many had d in the top K) and Top-K precision (of the simulations where d
//! was predicted, how many were really d; the denominator spans the entire
//! dataset, so rare-disease over-representation shows up as the prevalence
//! effect it is). Before/after deltas come with paired percentile-bootstrap
//! intervals, and [`regress`] fits actual on estimated change to validate
//! the estimates.
//!
//! Undefined metrics (zero denominator) are reported as explicit nulls,
//! never as zero; folding them in would bias the deltas.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotations::DiseaseId;
use crate::generator::Dataset;
use crate::simulator::InterviewTranscript;
use crate::stats::{percentile, wilson_interval};

/// Confidence level of the Wilson intervals attached to point estimates.
const POINT_CI_LEVEL: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Recall,
    Precision,
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricKind::Recall => f.write_str("recall"),
            MetricKind::Precision => f.write_str("precision"),
        }
    }
}

/// Top-K counts and point estimates for one disease on one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiseaseMetrics {
    pub disease: DiseaseId,
    pub k: usize,
    pub tp: usize,
    pub n_true: usize,
    pub n_predicted: usize,
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub recall_ci: Option<(f64, f64)>,
    pub precision_ci: Option<(f64, f64)>,
}

/// Before/after change of one metric for one disease.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub disease: DiseaseId,
    pub metric: MetricKind,
    pub k: usize,
    pub before: Option<f64>,
    pub after: Option<f64>,
    pub delta: Option<f64>,
    pub delta_ci: Option<(f64, f64)>,
}

/// Simple-regression summary of actual on estimated change.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub n: usize,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub p_value: f64,
    pub slope_stderr: f64,
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("transcripts misaligned with dataset: {reason}")]
    MisalignedTranscripts { reason: String },
    #[error("unknown disease {0}")]
    UnknownDisease(DiseaseId),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("delta inputs differ: {reason}")]
    MismatchedDelta { reason: String },
    #[error("need at least 3 pairs, got {n}")]
    InsufficientData { n: usize },
    #[error("degenerate regression input: {reason}")]
    DegenerateInput { reason: String },
}

fn check_alignment(
    transcripts: &[InterviewTranscript],
    data: &Dataset,
) -> Result<(), MetricsError> {
    if transcripts.len() != data.len() {
        return Err(MetricsError::MisalignedTranscripts {
            reason: format!(
                "{} transcripts for {} vignettes",
                transcripts.len(),
                data.len()
            ),
        });
    }
    for (i, t) in transcripts.iter().enumerate() {
        if t.vignette_ref != i {
            return Err(MetricsError::MisalignedTranscripts {
                reason: format!("transcript {i} refers to vignette {}", t.vignette_ref),
            });
        }
    }
    Ok(())
}

/// Per-vignette indicators for one disease, the shared core of metric
/// computation and bootstrap resampling.
struct Indicators {
    is_true: Vec<bool>,
    predicted: Vec<bool>,
}

impl Indicators {
    fn build(transcripts: &[InterviewTranscript], data: &Dataset, disease: &DiseaseId, k: usize) -> Self {
        let is_true: Vec<bool> = data.vignettes.iter().map(|v| &v.d_true == disease).collect();
        let predicted: Vec<bool> = transcripts
            .iter()
            .map(|t| t.prediction.iter().take(k).any(|d| d == disease))
            .collect();
        Self { is_true, predicted }
    }

    fn counts<'a>(&self, indices: impl Iterator<Item = &'a usize>) -> (usize, usize, usize) {
        let (mut tp, mut n_true, mut n_predicted) = (0, 0, 0);
        for &i in indices {
            match (self.is_true[i], self.predicted[i]) {
                (true, true) => {
                    tp += 1;
                    n_true += 1;
                    n_predicted += 1;
                }
                (true, false) => n_true += 1,
                (false, true) => n_predicted += 1,
                (false, false) => {}
            }
        }
        (tp, n_true, n_predicted)
    }

    fn metric<'a>(&self, kind: MetricKind, indices: impl Iterator<Item = &'a usize>) -> Option<f64> {
        let (tp, n_true, n_predicted) = self.counts(indices);
        let denom = match kind {
            MetricKind::Recall => n_true,
            MetricKind::Precision => n_predicted,
        };
        if denom == 0 {
            None
        } else {
            Some(tp as f64 / denom as f64)
        }
    }
}

/// Top-K recall and precision of `disease` over an aligned run.
///
/// A disease that is never true and never predicted yields undefined
/// (`None`) metrics, not an error and not zero.
pub fn compute_metrics(
    transcripts: &[InterviewTranscript],
    data: &Dataset,
    disease: &DiseaseId,
    k: usize,
) -> Result<DiseaseMetrics, MetricsError> {
    if k == 0 {
        return Err(MetricsError::InvalidK);
    }
    check_alignment(transcripts, data)?;
    let ind = Indicators::build(transcripts, data, disease, k);
    let all: Vec<usize> = (0..data.len()).collect();
    let (tp, n_true, n_predicted) = ind.counts(all.iter());

    let ratio_ci = |num: usize, den: usize| {
        if den == 0 {
            (None, None)
        } else {
            let (lo, hi) = wilson_interval(num as u64, den as u64, POINT_CI_LEVEL);
            (Some(num as f64 / den as f64), Some((lo, hi)))
        }
    };
    let (recall, recall_ci) = ratio_ci(tp, n_true);
    let (precision, precision_ci) = ratio_ci(tp, n_predicted);

    Ok(DiseaseMetrics {
        disease: disease.clone(),
        k,
        tp,
        n_true,
        n_predicted,
        recall,
        precision,
        recall_ci,
        precision_ci,
    })
}

/// Point delta of one metric between two runs over the same dataset.
/// The delta is defined only when both sides are.
pub fn compute_delta(
    before: &DiseaseMetrics,
    after: &DiseaseMetrics,
    metric: MetricKind,
) -> Result<DeltaReport, MetricsError> {
    if before.disease != after.disease {
        return Err(MetricsError::MismatchedDelta {
            reason: format!("diseases {} vs {}", before.disease, after.disease),
        });
    }
    if before.k != after.k {
        return Err(MetricsError::MismatchedDelta {
            reason: format!("k {} vs {}", before.k, after.k),
        });
    }
    if before.n_true != after.n_true {
        return Err(MetricsError::MismatchedDelta {
            reason: format!(
                "n_true {} vs {}: runs are not over the same dataset",
                before.n_true, after.n_true
            ),
        });
    }
    let pick = |m: &DiseaseMetrics| match metric {
        MetricKind::Recall => m.recall,
        MetricKind::Precision => m.precision,
    };
    let (b, a) = (pick(before), pick(after));
    Ok(DeltaReport {
        disease: before.disease.clone(),
        metric,
        k: before.k,
        before: b,
        after: a,
        delta: match (b, a) {
            (Some(b), Some(a)) => Some(a - b),
            _ => None,
        },
        delta_ci: None,
    })
}

/// Percentile-bootstrap settings. Resampling is deterministic given the
/// seed: resample r draws from its own stream of a fixed-seed generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BootstrapConfig {
    pub n_resamples: usize,
    pub seed: u64,
    pub level: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            n_resamples: 10_000,
            seed: 0,
            level: 0.95,
        }
    }
}

/// Percentile bootstrap over vignette resampling: `stat` maps a resampled
/// index multiset to a statistic (or `None` when undefined on that
/// resample). Returns `None` when every resample was undefined.
pub fn bootstrap_ci<F>(n: usize, config: &BootstrapConfig, stat: F) -> Option<(f64, f64)>
where
    F: Fn(&[usize]) -> Option<f64> + Sync,
{
    if n == 0 || config.n_resamples == 0 {
        return None;
    }
    let values: Vec<f64> = (0..config.n_resamples)
        .into_par_iter()
        .filter_map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(r as u64);
            let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            stat(&indices)
        })
        .collect();
    if values.is_empty() {
        return None;
    }
    let alpha = (1.0 - config.level) / 2.0;
    Some((
        percentile(&values, alpha * 100.0),
        percentile(&values, (1.0 - alpha) * 100.0),
    ))
}

/// Bootstrap interval for one metric of one run.
pub fn bootstrap_metric_ci(
    transcripts: &[InterviewTranscript],
    data: &Dataset,
    disease: &DiseaseId,
    k: usize,
    metric: MetricKind,
    config: &BootstrapConfig,
) -> Result<Option<(f64, f64)>, MetricsError> {
    if k == 0 {
        return Err(MetricsError::InvalidK);
    }
    check_alignment(transcripts, data)?;
    let ind = Indicators::build(transcripts, data, disease, k);
    Ok(bootstrap_ci(data.len(), config, |idx| {
        ind.metric(metric, idx.iter())
    }))
}

/// Paired bootstrap interval for a metric delta: both runs are evaluated on
/// the same resampled vignettes, since before/after share the dataset.
pub fn bootstrap_delta_ci(
    before: &[InterviewTranscript],
    after: &[InterviewTranscript],
    data: &Dataset,
    disease: &DiseaseId,
    k: usize,
    metric: MetricKind,
    config: &BootstrapConfig,
) -> Result<Option<(f64, f64)>, MetricsError> {
    if k == 0 {
        return Err(MetricsError::InvalidK);
    }
    check_alignment(before, data)?;
    check_alignment(after, data)?;
    let ind_before = Indicators::build(before, data, disease, k);
    let ind_after = Indicators::build(after, data, disease, k);
    Ok(bootstrap_ci(data.len(), config, |idx| {
        match (
            ind_before.metric(metric, idx.iter()),
            ind_after.metric(metric, idx.iter()),
        ) {
            (Some(b), Some(a)) => Some(a - b),
            _ => None,
        }
    }))
}

/// Metrics for every disease of interest on one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub k: usize,
    pub per_disease: Vec<DiseaseMetrics>,
}

pub fn compute_report(
    transcripts: &[InterviewTranscript],
    data: &Dataset,
    diseases: &[DiseaseId],
    k: usize,
) -> Result<MetricsReport, MetricsError> {
    let per_disease = diseases
        .iter()
        .map(|d| compute_metrics(transcripts, data, d, k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MetricsReport { k, per_disease })
}

/// Full before/after comparison of one disease.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiseaseComparison {
    pub before: DiseaseMetrics,
    pub after: DiseaseMetrics,
    pub recall_delta: DeltaReport,
    pub precision_delta: DeltaReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunComparison {
    pub k: usize,
    pub per_disease: Vec<DiseaseComparison>,
}

/// Compare two runs over the same dataset, disease by disease, attaching
/// paired bootstrap intervals to every delta.
///
/// `diseases` selects which causes to report; `None` means every disease
/// appearing as a true cause or in either run's predictions. An explicit
/// selection may name diseases outside that universe only if they are known
/// to the caller's catalog; otherwise `UnknownDisease`.
pub fn compare_runs(
    before: &[InterviewTranscript],
    after: &[InterviewTranscript],
    data: &Dataset,
    diseases: Option<&[DiseaseId]>,
    k: usize,
    bootstrap: &BootstrapConfig,
) -> Result<RunComparison, MetricsError> {
    if k == 0 {
        return Err(MetricsError::InvalidK);
    }
    check_alignment(before, data)?;
    check_alignment(after, data)?;

    let mut universe: BTreeSet<DiseaseId> =
        data.vignettes.iter().map(|v| v.d_true.clone()).collect();
    for t in before.iter().chain(after.iter()) {
        universe.extend(t.prediction.iter().cloned());
    }
    let selected: Vec<DiseaseId> = match diseases {
        Some(list) => {
            for d in list {
                if !universe.contains(d) {
                    return Err(MetricsError::UnknownDisease(d.clone()));
                }
            }
            list.to_vec()
        }
        None => universe.into_iter().collect(),
    };

    let (recall_cis, precision_cis) = batched_delta_cis(before, after, data, &selected, k, bootstrap);

    let per_disease = selected
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let m_before = compute_metrics(before, data, d, k)?;
            let m_after = compute_metrics(after, data, d, k)?;
            let mut recall_delta = compute_delta(&m_before, &m_after, MetricKind::Recall)?;
            recall_delta.delta_ci = recall_cis[i];
            let mut precision_delta = compute_delta(&m_before, &m_after, MetricKind::Precision)?;
            precision_delta.delta_ci = precision_cis[i];
            Ok(DiseaseComparison {
                before: m_before,
                after: m_after,
                recall_delta,
                precision_delta,
            })
        })
        .collect::<Result<Vec<_>, MetricsError>>()?;

    Ok(RunComparison { k, per_disease })
}

/// Per-resample delta values: (recall deltas, precision deltas), indexed by
/// selected disease.
type ResampleDeltas = (Vec<Option<f64>>, Vec<Option<f64>>);

/// Recall- and precision-delta intervals, indexed by selected disease.
type DeltaCis = (Vec<Option<(f64, f64)>>, Vec<Option<(f64, f64)>>);

/// One bootstrap pass computing recall- and precision-delta intervals for
/// every selected disease at once. Draws the same index streams as
/// [`bootstrap_ci`], so per-disease results are identical to running
/// [`bootstrap_delta_ci`] disease by disease, just without re-drawing the
/// resamples for each one.
fn batched_delta_cis(
    before: &[InterviewTranscript],
    after: &[InterviewTranscript],
    data: &Dataset,
    selected: &[DiseaseId],
    k: usize,
    config: &BootstrapConfig,
) -> DeltaCis {
    let nd = selected.len();
    let n = data.len();
    if n == 0 || config.n_resamples == 0 {
        return (vec![None; nd], vec![None; nd]);
    }
    let index: std::collections::BTreeMap<&DiseaseId, usize> =
        selected.iter().enumerate().map(|(i, d)| (d, i)).collect();
    // per-vignette precomputation
    let true_idx: Vec<Option<usize>> = data
        .vignettes
        .iter()
        .map(|v| index.get(&v.d_true).copied())
        .collect();
    let top_k_hits = |ts: &[InterviewTranscript]| -> (Vec<bool>, Vec<Vec<usize>>) {
        let mut hit = vec![false; n];
        let mut preds = vec![Vec::new(); n];
        for (i, t) in ts.iter().enumerate() {
            for d in t.prediction.iter().take(k) {
                if d == &data.vignettes[i].d_true {
                    hit[i] = true;
                }
                if let Some(&di) = index.get(d) {
                    preds[i].push(di);
                }
            }
        }
        (hit, preds)
    };
    let (hit_before, pred_before) = top_k_hits(before);
    let (hit_after, pred_after) = top_k_hits(after);

    let per_resample: Vec<ResampleDeltas> = (0..config.n_resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(r as u64);
            let mut n_true = vec![0usize; nd];
            let mut tp_b = vec![0usize; nd];
            let mut tp_a = vec![0usize; nd];
            let mut npred_b = vec![0usize; nd];
            let mut npred_a = vec![0usize; nd];
            for _ in 0..n {
                let i = rng.random_range(0..n);
                if let Some(t) = true_idx[i] {
                    n_true[t] += 1;
                    if hit_before[i] {
                        tp_b[t] += 1;
                    }
                    if hit_after[i] {
                        tp_a[t] += 1;
                    }
                }
                for &p in &pred_before[i] {
                    npred_b[p] += 1;
                }
                for &p in &pred_after[i] {
                    npred_a[p] += 1;
                }
            }
            let recalls: Vec<Option<f64>> = (0..nd)
                .map(|d| {
                    if n_true[d] == 0 {
                        None
                    } else {
                        // identical arithmetic to the per-disease route:
                        // each side divided separately, then subtracted
                        Some(tp_a[d] as f64 / n_true[d] as f64
                            - tp_b[d] as f64 / n_true[d] as f64)
                    }
                })
                .collect();
            let precisions: Vec<Option<f64>> = (0..nd)
                .map(|d| {
                    if npred_b[d] == 0 || npred_a[d] == 0 {
                        None
                    } else {
                        Some(tp_a[d] as f64 / npred_a[d] as f64
                            - tp_b[d] as f64 / npred_b[d] as f64)
                    }
                })
                .collect();
            (recalls, precisions)
        })
        .collect();

    let alpha = (1.0 - config.level) / 2.0;
    let ci_for = |pick: &dyn Fn(&ResampleDeltas) -> &Vec<Option<f64>>| {
        (0..nd)
            .map(|d| {
                let values: Vec<f64> = per_resample
                    .iter()
                    .filter_map(|row| pick(row)[d])
                    .collect();
                if values.is_empty() {
                    None
                } else {
                    Some((
                        percentile(&values, alpha * 100.0),
                        percentile(&values, (1.0 - alpha) * 100.0),
                    ))
                }
            })
            .collect::<Vec<_>>()
    };
    (ci_for(&|row| &row.0), ci_for(&|row| &row.1))
}

/// Ordinary least squares of actual (dependent) on estimated (independent)
/// change, with the two-sided t-test on the slope.
pub fn regress(pairs: &[(f64, f64)]) -> Result<RegressionResult, MetricsError> {
    let n = pairs.len();
    if n < 3 {
        return Err(MetricsError::InsufficientData { n });
    }
    let nf = n as f64;
    let mean_x = pairs.iter().map(|(x, _)| x).sum::<f64>() / nf;
    let mean_y = pairs.iter().map(|(_, y)| y).sum::<f64>() / nf;
    let sxx: f64 = pairs.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    let sxy: f64 = pairs.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let ss_tot: f64 = pairs.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(MetricsError::DegenerateInput {
            reason: "all estimated values are equal".to_string(),
        });
    }
    if ss_tot == 0.0 {
        return Err(MetricsError::DegenerateInput {
            reason: "all actual values are equal".to_string(),
        });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = pairs
        .iter()
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r_squared = (1.0 - ss_res / ss_tot).clamp(0.0, 1.0);
    let df = nf - 2.0;
    let slope_stderr = (ss_res / df / sxx).sqrt();
    let t = if slope_stderr == 0.0 {
        f64::INFINITY
    } else {
        slope / slope_stderr
    };
    let p_value = crate::stats::t_two_sided_p(t, df);
    Ok(RegressionResult {
        n,
        slope,
        intercept,
        r_squared,
        p_value,
        slope_stderr,
    })
}
