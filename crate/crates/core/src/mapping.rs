//! The phenotype-to-symptom mapping layer.
//!
//! A [`PhenotypeMapping`] is the curated function from HPO phenotypes to the
//! symptoms a symptom checker understands. Mapping files are human-authored
//! TSVs carrying `author` / `reviewer` metadata; [`audit_coverage`] reports
//! how much of an annotation set a mapping covers so curators can close the
//! gaps before generating vignettes.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::annotations::{AnnotationSet, DiseaseId, PhenotypeId};

/// A symptom code, unique within one catalog.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymptomId(String);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("symptom code must be nonempty")]
pub struct EmptySymptomCode;

impl SymptomId {
    pub fn new(code: impl Into<String>) -> Result<Self, EmptySymptomCode> {
        let code = code.into();
        if code.trim().is_empty() {
            return Err(EmptySymptomCode);
        }
        Ok(Self(code))
    }

    pub fn code(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SymptomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for SymptomId {
    type Err = EmptySymptomCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl Serialize for SymptomId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for SymptomId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Self::new(s).map_err(D::Error::custom)
    }
}

/// The set of symptoms a symptom checker can handle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymptomCatalog {
    by_code: BTreeMap<SymptomId, String>,
    pub version: String,
}

impl SymptomCatalog {
    pub fn new(version: impl Into<String>) -> Self {
        Self {
            by_code: BTreeMap::new(),
            version: version.into(),
        }
    }

    /// Add a symptom; returns false if the code was already present.
    pub fn insert(&mut self, id: SymptomId, display_name: impl Into<String>) -> bool {
        self.by_code.insert(id, display_name.into()).is_none()
    }

    pub fn contains(&self, id: &SymptomId) -> bool {
        self.by_code.contains_key(id)
    }

    pub fn display_name(&self, id: &SymptomId) -> Option<&str> {
        self.by_code.get(id).map(String::as_str)
    }

    pub fn symptoms(&self) -> impl Iterator<Item = &SymptomId> {
        self.by_code.keys()
    }

    pub fn len(&self) -> usize {
        self.by_code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_code.is_empty()
    }
}

/// One mapping target: a symptom plus the probability that it manifests
/// when its phenotype is present (1.0 unless the file says otherwise).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappingTarget {
    pub symptom: SymptomId,
    pub manifest_prob: f64,
}

/// The phenotype -> symptoms function, bound to a catalog at load time.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhenotypeMapping {
    entries: BTreeMap<PhenotypeId, Vec<MappingTarget>>,
    pub author: String,
    pub reviewer: String,
    pub catalog_version: String,
}

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("line {line}: phenotype {phenotype} maps to unknown symptom {symptom_code:?}")]
    UnknownSymptom {
        line: usize,
        phenotype: PhenotypeId,
        symptom_code: String,
    },
    #[error("line {line}: duplicate mapping of {phenotype} to {symptom_code:?}")]
    DuplicateEntry {
        line: usize,
        phenotype: PhenotypeId,
        symptom_code: String,
    },
    #[error("line {line}: phenotype {phenotype} has an empty symptom target")]
    EmptyMapping { line: usize, phenotype: PhenotypeId },
    #[error("line {line}: manifest probability {value:?} not in (0,1]")]
    InvalidManifestProb { line: usize, value: String },
    #[error("line {line}: malformed mapping row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("unknown disease {0}")]
    UnknownDisease(DiseaseId),
    #[error("i/o error reading mapping")]
    Io(#[from] std::io::Error),
}

impl PhenotypeMapping {
    /// Symptoms (with manifestation probabilities) for a phenotype; empty
    /// when the phenotype is unmapped; the caller decides the policy.
    pub fn map_phenotype(&self, p: &PhenotypeId) -> &[MappingTarget] {
        self.entries.get(p).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_mapped(&self, p: &PhenotypeId) -> bool {
        self.entries.contains_key(p)
    }

    pub fn phenotypes(&self) -> impl Iterator<Item = &PhenotypeId> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Write the mapping back out in its file format. `load_mapping` of the
    /// result reproduces the mapping exactly.
    pub fn serialize_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# author: {}", self.author)?;
        writeln!(w, "# reviewer: {}", self.reviewer)?;
        writeln!(w, "# catalog_version: {}", self.catalog_version)?;
        writeln!(w, "# columns: hpo_id\tsymptom_code\tmanifest_prob")?;
        for (phenotype, targets) in &self.entries {
            for t in targets {
                writeln!(w, "{phenotype}\t{}\t{}", t.symptom, t.manifest_prob)?;
            }
        }
        Ok(())
    }
}

/// Load a mapping file and validate it against `catalog`.
///
/// Format: TSV rows `hpo_id  symptom_code  [manifest_prob]` with optional
/// `# author:` / `# reviewer:` / `# catalog_version:` headers.
pub fn load_mapping<R: BufRead>(
    reader: R,
    catalog: &SymptomCatalog,
) -> Result<PhenotypeMapping, MappingError> {
    let mut mapping = PhenotypeMapping {
        catalog_version: catalog.version.clone(),
        ..PhenotypeMapping::default()
    };

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim_start();
            if let Some(v) = rest.strip_prefix("author:") {
                mapping.author = v.trim().to_string();
            } else if let Some(v) = rest.strip_prefix("reviewer:") {
                mapping.reviewer = v.trim().to_string();
            } else if let Some(v) = rest.strip_prefix("catalog_version:") {
                mapping.catalog_version = v.trim().to_string();
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 2 || cols.len() > 3 {
            return Err(MappingError::MalformedRow {
                line: line_no,
                reason: format!("expected 2 or 3 columns, found {}", cols.len()),
            });
        }
        if cols[0].eq_ignore_ascii_case("hpo_id") {
            continue;
        }
        let phenotype: PhenotypeId = cols[0].trim().parse().map_err(|e| MappingError::MalformedRow {
            line: line_no,
            reason: format!("{e}"),
        })?;
        let code = cols[1].trim();
        if code.is_empty() {
            return Err(MappingError::EmptyMapping {
                line: line_no,
                phenotype,
            });
        }
        let symptom = SymptomId::new(code).expect("nonempty checked above");
        if !catalog.contains(&symptom) {
            return Err(MappingError::UnknownSymptom {
                line: line_no,
                phenotype,
                symptom_code: code.to_string(),
            });
        }
        let manifest_prob = match cols.get(2).map(|s| s.trim()).filter(|s| !s.is_empty()) {
            None => 1.0,
            Some(text) => {
                let value: f64 = text.parse().map_err(|_| MappingError::InvalidManifestProb {
                    line: line_no,
                    value: text.to_string(),
                })?;
                if !(value > 0.0 && value <= 1.0) {
                    return Err(MappingError::InvalidManifestProb {
                        line: line_no,
                        value: text.to_string(),
                    });
                }
                value
            }
        };
        let targets = mapping.entries.entry(phenotype).or_default();
        if targets.iter().any(|t| t.symptom == symptom) {
            return Err(MappingError::DuplicateEntry {
                line: line_no,
                phenotype,
                symptom_code: code.to_string(),
            });
        }
        targets.push(MappingTarget {
            symptom,
            manifest_prob,
        });
    }

    Ok(mapping)
}

/// Load a symptom catalog from a TSV of `code  display_name` rows with an
/// optional `# version:` header.
pub fn load_catalog<R: BufRead>(reader: R) -> Result<SymptomCatalog, MappingError> {
    let mut catalog = SymptomCatalog::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim_start().strip_prefix("version:") {
                catalog.version = v.trim().to_string();
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let (code, name) = line.split_once('\t').ok_or_else(|| MappingError::MalformedRow {
            line: line_no,
            reason: "expected 2 tab-separated columns".to_string(),
        })?;
        if code.eq_ignore_ascii_case("code") {
            continue;
        }
        let id = SymptomId::new(code.trim()).map_err(|e| MappingError::MalformedRow {
            line: line_no,
            reason: e.to_string(),
        })?;
        if !catalog.insert(id.clone(), name.trim()) {
            return Err(MappingError::MalformedRow {
                line: line_no,
                reason: format!("duplicate symptom code {id}"),
            });
        }
    }
    Ok(catalog)
}

/// Per-disease mapping coverage of an annotation set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiseaseCoverage {
    pub disease: DiseaseId,
    pub mapped: usize,
    pub unmapped: usize,
    pub unmapped_phenotypes: Vec<PhenotypeId>,
}

impl DiseaseCoverage {
    pub fn coverage(&self) -> f64 {
        let total = self.mapped + self.unmapped;
        if total == 0 {
            1.0
        } else {
            self.mapped as f64 / total as f64
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CoverageReport {
    pub per_disease: Vec<DiseaseCoverage>,
}

/// Count mapped vs unmapped phenotypes per disease so a curator can finish
/// the mapping before generation.
pub fn audit_coverage(
    mapping: &PhenotypeMapping,
    ann: &AnnotationSet,
    diseases: &[DiseaseId],
) -> Result<CoverageReport, MappingError> {
    let mut report = CoverageReport::default();
    for disease in diseases {
        let rows = ann
            .get(disease)
            .ok_or_else(|| MappingError::UnknownDisease(disease.clone()))?;
        let mut cov = DiseaseCoverage {
            disease: disease.clone(),
            mapped: 0,
            unmapped: 0,
            unmapped_phenotypes: Vec::new(),
        };
        for row in rows {
            if mapping.is_mapped(&row.phenotype) {
                cov.mapped += 1;
            } else {
                cov.unmapped += 1;
                cov.unmapped_phenotypes.push(row.phenotype);
            }
        }
        report.per_disease.push(cov);
    }
    Ok(report)
}
