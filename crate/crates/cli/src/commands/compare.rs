//! `scsim compare`: per-disease metric deltas between two transcript files
//! over the same dataset, with paired bootstrap intervals.

use std::collections::BTreeSet;
use std::path::Path;

use scsim_core::metrics::{compare_runs, BootstrapConfig};
use scsim_core::simulator::CauseCatalog;
use scsim_core::DiseaseId;

use crate::config::RunConfig;
use crate::report::{render_summary, write_compare_csv, write_json, CompareDocument, Meta};
use crate::{inputs, CliError};

pub fn run(
    config: &RunConfig,
    dataset_path: &Path,
    before_path: &Path,
    after_path: &Path,
    out_json: &Path,
    out_csv: Option<&Path>,
) -> Result<CompareDocument, CliError> {
    let dataset = inputs::load_dataset(dataset_path)?;
    let before = inputs::load_transcripts(before_path)?;
    let after = inputs::load_transcripts(after_path)?;

    // the causes under evaluation: every true label plus everything either
    // run predicted; the dataset's rare subset must be contained in it
    let mut causes: BTreeSet<DiseaseId> =
        dataset.vignettes.iter().map(|v| v.d_true.clone()).collect();
    for t in before.iter().chain(after.iter()) {
        causes.extend(t.prediction.iter().cloned());
    }
    let catalog = CauseCatalog::new(causes, dataset.rare_diseases.clone())?;
    let selected: Vec<DiseaseId> = catalog.causes.iter().cloned().collect();

    let bootstrap = BootstrapConfig {
        n_resamples: config.bootstrap_resamples,
        seed: config.seed,
        level: 0.95,
    };
    let comparison = compare_runs(&before, &after, &dataset, Some(&selected), config.k, &bootstrap)?;

    let doc = CompareDocument {
        meta: Meta::from_config(config),
        dataset: dataset_path.display().to_string(),
        before: before_path.display().to_string(),
        after: after_path.display().to_string(),
        bootstrap_resamples: config.bootstrap_resamples,
        comparison,
    };
    write_json(&doc, out_json)?;
    if let Some(csv_path) = out_csv {
        write_compare_csv(&doc.comparison, csv_path)?;
    }
    print!("{}", render_summary(&doc, dataset.len()));
    println!("wrote {}", out_json.display());
    Ok(doc)
}
