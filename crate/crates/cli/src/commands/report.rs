//! `scsim report`: bundle a comparison document into a human-readable
//! summary plus CSV, under one output directory.

use std::path::Path;

use serde::Deserialize;

use scsim_core::metrics::RunComparison;

use crate::report::{render_summary, write_compare_csv, CompareDocument, Meta};
use crate::CliError;

#[derive(Deserialize)]
struct CompareDocumentIn {
    meta: Meta,
    dataset: String,
    before: String,
    after: String,
    bootstrap_resamples: usize,
    comparison: RunComparison,
}

pub fn run(delta_json: &Path, out_dir: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(delta_json)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", delta_json.display())))?;
    let doc: CompareDocumentIn = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", delta_json.display())))?;
    let doc = CompareDocument {
        meta: doc.meta,
        dataset: doc.dataset,
        before: doc.before,
        after: doc.after,
        bootstrap_resamples: doc.bootstrap_resamples,
        comparison: doc.comparison,
    };

    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    let n_rows = doc
        .comparison
        .per_disease
        .iter()
        .map(|d| d.before.n_true)
        .sum::<usize>();
    let summary = render_summary(&doc, n_rows);
    std::fs::write(out_dir.join("summary.txt"), &summary)
        .map_err(|e| CliError::Io(e.to_string()))?;
    write_compare_csv(&doc.comparison, &out_dir.join("deltas.csv"))?;
    print!("{summary}");
    println!("wrote {}", out_dir.display());
    Ok(())
}
