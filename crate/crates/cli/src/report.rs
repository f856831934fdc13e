//! Report artifacts: comparison documents (JSON + CSV), regression results
//! with scatter data, and the human-readable summary. Outputs carry no
//! timestamps, so identical inputs produce identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use scsim_core::metrics::{RegressionResult, RunComparison};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Meta {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub k: usize,
}

impl Meta {
    pub fn from_config(config: &RunConfig) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.config_hash(),
            seed: config.seed,
            k: config.k,
        }
    }
}

/// The `compare` command's JSON document.
#[derive(Clone, Debug, Serialize)]
pub struct CompareDocument {
    pub meta: Meta,
    pub dataset: String,
    pub before: String,
    pub after: String,
    pub bootstrap_resamples: usize,
    pub comparison: RunComparison,
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let file = File::create(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    w.write_all(b"\n")?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// One row per (disease, metric): before, after, delta, and the bootstrap
/// interval bounds, empty where undefined.
pub fn write_compare_csv(comparison: &RunComparison, path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    w.write_record([
        "disease", "metric", "k", "before", "after", "delta", "ci_lo", "ci_hi",
    ])
    .map_err(|e| CliError::Io(e.to_string()))?;
    for dc in &comparison.per_disease {
        for delta in [&dc.recall_delta, &dc.precision_delta] {
            let (lo, hi) = match delta.delta_ci {
                Some((lo, hi)) => (Some(lo), Some(hi)),
                None => (None, None),
            };
            w.write_record([
                delta.disease.to_string(),
                delta.metric.to_string(),
                delta.k.to_string(),
                opt(delta.before),
                opt(delta.after),
                opt(delta.delta),
                opt(lo),
                opt(hi),
            ])
            .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

/// One (estimated, actual) change pair with its disease and whether the
/// disease's source annotations carry frequency information.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairRecord {
    pub disease: String,
    pub freq_flag: bool,
    pub estimated: f64,
    pub actual: f64,
}

pub fn read_pairs(path: &Path) -> Result<Vec<PairRecord>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Validation(format!("cannot open {}: {e}", path.display())))?;
    reader
        .deserialize()
        .map(|r| r.map_err(|e| CliError::Validation(format!("{}: {e}", path.display()))))
        .collect()
}

/// Scatter data mirroring the correlation plots: estimated, actual,
/// disease, freq_flag.
pub fn write_scatter_csv(pairs: &[PairRecord], path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    w.write_record(["estimated", "actual", "disease", "freq_flag"])
        .map_err(|e| CliError::Io(e.to_string()))?;
    for p in pairs {
        w.write_record([
            p.estimated.to_string(),
            p.actual.to_string(),
            p.disease.clone(),
            p.freq_flag.to_string(),
        ])
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

/// The `regress` command's JSON document.
#[derive(Clone, Debug, Serialize)]
pub struct RegressDocument {
    pub pairs_file: String,
    pub filter: String,
    pub result: RegressionResult,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:+.3}")).unwrap_or_else(|| "n/a".to_string())
}

fn fmt_ci(ci: Option<(f64, f64)>) -> String {
    ci.map(|(lo, hi)| format!("[{lo:+.3}, {hi:+.3}]"))
        .unwrap_or_else(|| "n/a".to_string())
}

/// Fixed-width summary of a comparison, one line per (disease, metric).
pub fn render_summary(doc: &CompareDocument, dataset_size: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "Update impact at K={} over {} vignettes ({} diseases reported)\n",
        doc.comparison.k,
        dataset_size,
        doc.comparison.per_disease.len()
    ));
    out.push_str(&format!(
        "config {} seed {} resamples {}\n\n",
        doc.meta.config_hash, doc.meta.seed, doc.bootstrap_resamples
    ));
    out.push_str(&format!(
        "{:<16} {:<10} {:>8} {:>8} {:>8}  {:<20}\n",
        "disease", "metric", "before", "after", "delta", "95% CI"
    ));
    for dc in &doc.comparison.per_disease {
        for delta in [&dc.recall_delta, &dc.precision_delta] {
            out.push_str(&format!(
                "{:<16} {:<10} {:>8} {:>8} {:>8}  {:<20}\n",
                delta.disease.to_string(),
                delta.metric.to_string(),
                delta
                    .before
                    .map(|v| format!("{v:.3}"))
                    .unwrap_or_else(|| "n/a".to_string()),
                delta
                    .after
                    .map(|v| format!("{v:.3}"))
                    .unwrap_or_else(|| "n/a".to_string()),
                fmt_opt(delta.delta),
                fmt_ci(delta.delta_ci),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.csv");
        let pairs = vec![
            PairRecord {
                disease: "ORPHA:117".to_string(),
                freq_flag: true,
                estimated: 0.0,
                actual: 0.047,
            },
            PairRecord {
                disease: "OMIM:168600".to_string(),
                freq_flag: false,
                estimated: 0.561,
                actual: 0.461,
            },
        ];
        write_scatter_csv(&pairs, &path).unwrap();
        // scatter column order differs from the pairs layout, so point the
        // reader at a hand-written pairs file instead
        let pairs_path = dir.path().join("input.csv");
        std::fs::write(
            &pairs_path,
            "disease,freq_flag,estimated,actual\nORPHA:117,true,0.0,0.047\n",
        )
        .unwrap();
        let read = read_pairs(&pairs_path).unwrap();
        assert_eq!(read.len(), 1);
        assert_eq!(read[0].disease, "ORPHA:117");
        assert!(read[0].freq_flag);
        assert_eq!(read[0].actual, 0.047);
    }
}
