//! `scsim audit-mapping`: coverage of the phenotype mapping over the
//! configured annotation set, so curators can see what to map next.

use scsim_core::mapping::audit_coverage;
use scsim_core::DiseaseId;

use crate::config::RunConfig;
use crate::{inputs, CliError};

pub fn run(config: &RunConfig, diseases: Option<&str>) -> Result<(), CliError> {
    let annotations = inputs::load_annotations(config)?;
    let catalog = inputs::load_catalog_file(config)?;
    let mapping = inputs::load_mapping_file(config, &catalog)?;

    let selected: Vec<DiseaseId> = match diseases {
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|e| CliError::Validation(format!("disease {s:?}: {e}")))
            })
            .collect::<Result<_, _>>()?,
        None => annotations.diseases().cloned().collect(),
    };

    let report = audit_coverage(&mapping, &annotations, &selected)?;
    println!(
        "{:<16} {:>7} {:>9} {:>9}  unmapped phenotypes",
        "disease", "mapped", "unmapped", "coverage"
    );
    for cov in &report.per_disease {
        let listed: Vec<String> = cov
            .unmapped_phenotypes
            .iter()
            .take(6)
            .map(|p| p.to_string())
            .collect();
        let suffix = if cov.unmapped_phenotypes.len() > 6 {
            format!(" (+{})", cov.unmapped_phenotypes.len() - 6)
        } else {
            String::new()
        };
        println!(
            "{:<16} {:>7} {:>9} {:>8.0}%  {}{}",
            cov.disease.to_string(),
            cov.mapped,
            cov.unmapped,
            cov.coverage() * 100.0,
            listed.join(" "),
            suffix
        );
    }
    Ok(())
}
