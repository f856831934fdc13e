//! `scsim regress`: fit actual change on estimated change over a pairs CSV
//! and report the regression summary; optionally emit plot-ready scatter
//! data.

use std::path::Path;

use scsim_core::metrics::regress;

use crate::report::{read_pairs, write_json, write_scatter_csv, RegressDocument};
use crate::CliError;

pub fn run(
    pairs_path: &Path,
    freq_only: bool,
    out_json: Option<&Path>,
    scatter_out: Option<&Path>,
) -> Result<RegressDocument, CliError> {
    let mut pairs = read_pairs(pairs_path)?;
    if freq_only {
        pairs.retain(|p| p.freq_flag);
    }
    let xy: Vec<(f64, f64)> = pairs.iter().map(|p| (p.estimated, p.actual)).collect();
    let result = regress(&xy)?;

    let doc = RegressDocument {
        pairs_file: pairs_path.display().to_string(),
        filter: if freq_only { "freq_only" } else { "all" }.to_string(),
        result,
    };
    println!(
        "n={} slope={:.4} intercept={:.4} R²={:.4} p={:.4}",
        doc.result.n, doc.result.slope, doc.result.intercept, doc.result.r_squared, doc.result.p_value
    );
    if let Some(path) = out_json {
        write_json(&doc, path)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = scatter_out {
        write_scatter_csv(&pairs, path)?;
        println!("wrote {}", path.display());
    }
    Ok(doc)
}
