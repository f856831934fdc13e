//! Loading the pipeline's file inputs, with disease-alias rewriting and
//! error translation into exit-code categories.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use scsim_core::annotations::{parse_hpoa_file, AnnotationSet, ParseConfig};
use scsim_core::generator::{
    load_common_profiles, load_demographics, CommonDiseaseProfile, Dataset,
    DemographicDistribution,
};
use scsim_core::mapping::{load_catalog, load_mapping, PhenotypeMapping, SymptomCatalog};
use scsim_core::simulator::{read_transcripts, InterviewTranscript, ReferenceKb};
use scsim_core::DiseaseId;

use crate::config::RunConfig;
use crate::CliError;

pub fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Validation(format!("cannot open {}: {e}", path.display())))?;
    Ok(BufReader::new(file))
}

fn required<'a>(
    path: &'a Option<std::path::PathBuf>,
    label: &str,
) -> Result<&'a Path, CliError> {
    path.as_deref()
        .ok_or_else(|| CliError::Validation(format!("no {label} path configured")))
}

/// Parse the annotation file named by the config, applying the alias table
/// and reporting parse warnings on stderr.
pub fn load_annotations(config: &RunConfig) -> Result<AnnotationSet, CliError> {
    let path = required(&config.paths.hpoa, "hpoa")?;
    let parse_config = ParseConfig {
        strict: config.strict_frequencies,
        default_frequency: config.default_frequency,
    };
    let (set, warnings) = parse_hpoa_file(open(path)?, &parse_config)?;
    for w in &warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    apply_aliases(set, &config.aliases)
}

fn apply_aliases(
    set: AnnotationSet,
    aliases: &BTreeMap<String, String>,
) -> Result<AnnotationSet, CliError> {
    if aliases.is_empty() {
        return Ok(set);
    }
    let mut table: BTreeMap<DiseaseId, DiseaseId> = BTreeMap::new();
    for (from, to) in aliases {
        let from: DiseaseId = from
            .parse()
            .map_err(|e| CliError::Validation(format!("alias key {from:?}: {e}")))?;
        let to: DiseaseId = to
            .parse()
            .map_err(|e| CliError::Validation(format!("alias value {to:?}: {e}")))?;
        table.insert(from, to);
    }
    let mut out = AnnotationSet {
        by_disease: BTreeMap::new(),
        source_version: set.source_version,
    };
    for (disease, mut rows) in set.by_disease {
        let target = table.get(&disease).cloned().unwrap_or(disease);
        for row in &mut rows {
            row.disease = target.clone();
        }
        out.by_disease.entry(target).or_default().extend(rows);
    }
    Ok(out)
}

pub fn load_catalog_file(config: &RunConfig) -> Result<SymptomCatalog, CliError> {
    let path = required(&config.paths.catalog, "catalog")?;
    Ok(load_catalog(open(path)?)?)
}

pub fn load_mapping_file(
    config: &RunConfig,
    catalog: &SymptomCatalog,
) -> Result<PhenotypeMapping, CliError> {
    let path = required(&config.paths.mapping, "mapping")?;
    Ok(load_mapping(open(path)?, catalog)?)
}

pub fn load_demographics_file(
    config: &RunConfig,
) -> Result<BTreeMap<DiseaseId, DemographicDistribution>, CliError> {
    let path = required(&config.paths.demographics, "demographics")?;
    Ok(load_demographics(open(path)?)?)
}

pub fn load_profiles_file(
    config: &RunConfig,
    catalog: &SymptomCatalog,
    demo: &BTreeMap<DiseaseId, DemographicDistribution>,
) -> Result<Vec<CommonDiseaseProfile>, CliError> {
    let path = required(&config.paths.common_profiles, "common_profiles")?;
    Ok(load_common_profiles(open(path)?, catalog, demo)?)
}

/// A knowledge base lives in a directory holding `priors.tsv` and
/// `likelihoods.tsv`.
pub fn load_kb(dir: &Path, catalog: &SymptomCatalog) -> Result<ReferenceKb, CliError> {
    let priors = dir.join("priors.tsv");
    let likelihoods = dir.join("likelihoods.tsv");
    Ok(ReferenceKb::load(open(&priors)?, open(&likelihoods)?, catalog)?)
}

pub fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    Ok(Dataset::read_jsonl(open(path)?)?)
}

pub fn load_transcripts(path: &Path) -> Result<Vec<InterviewTranscript>, CliError> {
    Ok(read_transcripts(open(path)?)?)
}

pub fn parse_targets(config: &RunConfig) -> Result<Vec<DiseaseId>, CliError> {
    if config.targets.is_empty() {
        return Err(CliError::Validation(
            "no target diseases configured".to_string(),
        ));
    }
    let mut seen = BTreeSet::new();
    config
        .targets
        .iter()
        .map(|t| {
            let id: DiseaseId = t
                .parse()
                .map_err(|e| CliError::Validation(format!("target {t:?}: {e}")))?;
            if !seen.insert(id.clone()) {
                return Err(CliError::Validation(format!("duplicate target {id}")));
            }
            Ok(id)
        })
        .collect()
}
