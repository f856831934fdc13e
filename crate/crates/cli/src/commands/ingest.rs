//! `scsim ingest-common`: turn a user-feedback JSONL file into a
//! common-disease dataset, diverting records of the configured rare targets
//! into a skip report.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use scsim_core::generator::{ingest_common, Dataset};
use scsim_core::DiseaseId;

use crate::config::RunConfig;
use crate::{inputs, CliError};

pub fn run(config: &RunConfig, input: &Path, out: &Path) -> Result<Dataset, CliError> {
    let catalog = inputs::load_catalog_file(config)?;
    let rare: BTreeSet<DiseaseId> = if config.targets.is_empty() {
        BTreeSet::new()
    } else {
        inputs::parse_targets(config)?.into_iter().collect()
    };

    let (dataset, skips) = ingest_common(inputs::open(input)?, &catalog, &rare)?;
    if !skips.skipped.is_empty() {
        eprintln!(
            "skipped {} records whose true cause is in the rare experiment arm:",
            skips.skipped.len()
        );
        for (line, disease) in &skips.skipped {
            eprintln!("  line {line}: {disease}");
        }
    }
    let file = File::create(out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
    dataset.write_jsonl(BufWriter::new(file))?;
    println!(
        "ingested {} feedback vignettes to {}",
        dataset.len(),
        out.display()
    );
    Ok(dataset)
}
