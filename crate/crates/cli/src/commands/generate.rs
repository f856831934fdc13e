//! `scsim generate`: build the simulation dataset file, with rare-disease
//! vignettes from annotations plus synthetic common-disease vignettes when
//! profiles are configured.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use scsim_core::generator::{generate_rare, merge, synth_common, Dataset};

use crate::config::RunConfig;
use crate::{inputs, CliError};

pub fn run(config: &RunConfig, out: &Path) -> Result<Dataset, CliError> {
    config.validate()?;
    let annotations = inputs::load_annotations(config)?;
    let catalog = inputs::load_catalog_file(config)?;
    let mapping = inputs::load_mapping_file(config, &catalog)?;
    let demographics = inputs::load_demographics_file(config)?;
    let targets = inputs::parse_targets(config)?;

    let (rare, stats) = generate_rare(
        &annotations,
        &mapping,
        &demographics,
        &targets,
        config.n_per_disease,
        config.seed,
    )?;
    println!(
        "generated {} rare vignettes for {} diseases ({} empty)",
        rare.len(),
        targets.len(),
        stats.empty_vignettes
    );
    if stats.unmapped_skips > 0 {
        eprintln!(
            "warning: skipped {} fired phenotypes with no mapping ({} distinct)",
            stats.unmapped_skips,
            stats.unmapped_phenotypes.len()
        );
    }

    let dataset = if config.paths.common_profiles.is_some() {
        let profiles = inputs::load_profiles_file(config, &catalog, &demographics)?;
        let (common, _) = synth_common(&profiles, config.n_per_common_disease, config.seed)?;
        println!(
            "generated {} synthetic common vignettes for {} profiles",
            common.len(),
            profiles.len()
        );
        merge(vec![rare, common])?
    } else {
        rare
    };

    let file = File::create(out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
    dataset.write_jsonl(BufWriter::new(file))?;
    println!("wrote {} vignettes to {}", dataset.len(), out.display());
    Ok(dataset)
}
