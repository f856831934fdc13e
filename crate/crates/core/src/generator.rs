//! Simulation dataset construction.
//!
//! Rare-disease vignettes are generated from annotations: for every
//! annotation (p, q) of a disease we draw v ~ U[0,1) and, when v < q, add the
//! mapped symptoms as `present` responses (each target independently gated
//! by its manifestation probability when one below 1.0 is configured).
//! Common-disease vignettes come either from user-feedback files or from
//! hand-authored symptom-probability profiles run through the same
//! stochastic core.
//!
//! Every vignette draws from its own generator keyed by (seed, disease,
//! index), so generation is order-independent and parallel schedules cannot
//! change the output.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::annotations::{AnnotationSet, DiseaseId, PhenotypeId};
use crate::mapping::{PhenotypeMapping, SymptomCatalog, SymptomId};

pub const MAX_AGE_YEARS: u32 = 120;

/// Fixed key for deriving seed traces of ingested feedback records, which
/// carry no generation seed of their own.
const FEEDBACK_SEED: u64 = u64::from_le_bytes(*b"feedback");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Male,
    Female,
}

/// Patient attributes handed to the symptom checker before the interview.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demographics {
    #[serde(rename = "age")]
    pub age_years: u32,
    pub sex: Sex,
}

/// One age band of a demographic distribution, weighted for sampling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgeBand {
    pub lo: u32,
    pub hi: u32,
    pub weight: f64,
}

/// Hand-authored per-disease demographic distribution: weighted age bands
/// plus the probability that a sampled patient is female.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemographicDistribution {
    pub disease: DiseaseId,
    pub age_bands: Vec<AgeBand>,
    pub female_ratio: f64,
}

impl DemographicDistribution {
    pub fn new(
        disease: DiseaseId,
        age_bands: Vec<AgeBand>,
        female_ratio: f64,
    ) -> Result<Self, GeneratorError> {
        let invalid = |reason: String| GeneratorError::InvalidDistribution {
            disease: disease.clone(),
            reason,
        };
        if age_bands.is_empty() {
            return Err(invalid("no age bands".to_string()));
        }
        let mut total = 0.0;
        for band in &age_bands {
            if band.lo > band.hi {
                return Err(invalid(format!("band {}..{} has lo > hi", band.lo, band.hi)));
            }
            if band.hi > MAX_AGE_YEARS {
                return Err(invalid(format!("band upper bound {} exceeds {MAX_AGE_YEARS}", band.hi)));
            }
            if band.weight.is_nan() || band.weight < 0.0 {
                return Err(invalid(format!("negative or NaN weight {}", band.weight)));
            }
            total += band.weight;
        }
        if total <= 0.0 {
            return Err(invalid("band weights sum to zero".to_string()));
        }
        let mut sorted = age_bands.clone();
        sorted.sort_by_key(|b| b.lo);
        for pair in sorted.windows(2) {
            if pair[0].hi >= pair[1].lo {
                return Err(invalid(format!(
                    "bands {}..{} and {}..{} overlap",
                    pair[0].lo, pair[0].hi, pair[1].lo, pair[1].hi
                )));
            }
        }
        if !(0.0..=1.0).contains(&female_ratio) {
            return Err(invalid(format!("female ratio {female_ratio} not in [0,1]")));
        }
        Ok(Self {
            disease,
            age_bands,
            female_ratio,
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Demographics {
        let total: f64 = self.age_bands.iter().map(|b| b.weight).sum();
        let mut u = rng.random::<f64>() * total;
        let mut chosen = *self.age_bands.last().expect("validated nonempty");
        for band in &self.age_bands {
            if u < band.weight {
                chosen = *band;
                break;
            }
            u -= band.weight;
        }
        let age_years = rng.random_range(chosen.lo..=chosen.hi);
        let sex = if rng.random::<f64>() < self.female_ratio {
            Sex::Female
        } else {
            Sex::Male
        };
        Demographics { age_years, sex }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Present,
    Absent,
    Unknown,
}

/// One (symptom, answer) pair of a vignette or transcript.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Response {
    pub symptom: SymptomId,
    pub answer: Answer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    SyntheticRare,
    FeedbackCommon,
    SyntheticCommon,
}

/// One simulation record: demographics, the full set of answerable symptom
/// responses, and the true cause.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vignette {
    pub demographics: Demographics,
    /// Sorted by symptom code; no symptom appears twice.
    pub responses: Vec<Response>,
    pub d_true: DiseaseId,
    pub provenance: Provenance,
    pub seed_trace: u64,
}

impl Vignette {
    /// Answer recorded for `symptom`, if the vignette can answer it.
    pub fn response_for(&self, symptom: &SymptomId) -> Option<Answer> {
        self.responses
            .binary_search_by(|r| r.symptom.cmp(symptom))
            .ok()
            .map(|i| self.responses[i].answer)
    }

    pub fn present_symptoms(&self) -> impl Iterator<Item = &SymptomId> {
        self.responses
            .iter()
            .filter(|r| r.answer == Answer::Present)
            .map(|r| &r.symptom)
    }

    fn validate(&self, index: usize) -> Result<(), GeneratorError> {
        let malformed = |reason: String| GeneratorError::MalformedRecord {
            line: index + 1,
            reason,
        };
        if self.demographics.age_years > MAX_AGE_YEARS {
            return Err(malformed(format!("age {} exceeds {MAX_AGE_YEARS}", self.demographics.age_years)));
        }
        for pair in self.responses.windows(2) {
            match pair[0].symptom.cmp(&pair[1].symptom) {
                std::cmp::Ordering::Less => {}
                _ => return Err(malformed(format!("duplicate or unsorted symptom {}", pair[1].symptom))),
            }
        }
        if self.provenance == Provenance::SyntheticRare
            && self.responses.iter().any(|r| r.answer != Answer::Present)
        {
            return Err(malformed("synthetic rare vignettes carry only present responses".to_string()));
        }
        Ok(())
    }
}

/// An evaluation dataset plus the rare-disease subset of causes that
/// partitions it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub vignettes: Vec<Vignette>,
    pub rare_diseases: BTreeSet<DiseaseId>,
}

impl Dataset {
    pub fn new(
        vignettes: Vec<Vignette>,
        rare_diseases: BTreeSet<DiseaseId>,
    ) -> Result<Self, GeneratorError> {
        let dataset = Self {
            vignettes,
            rare_diseases,
        };
        dataset.validate_partition()?;
        Ok(dataset)
    }

    /// The partition invariant: a vignette's true cause is in the rare set
    /// exactly when the vignette came from rare-disease synthesis.
    fn validate_partition(&self) -> Result<(), GeneratorError> {
        for (i, v) in self.vignettes.iter().enumerate() {
            v.validate(i)?;
            let is_rare = self.rare_diseases.contains(&v.d_true);
            let from_rare_arm = v.provenance == Provenance::SyntheticRare;
            if is_rare != from_rare_arm {
                return Err(GeneratorError::PartitionViolation {
                    disease: v.d_true.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vignettes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vignettes.is_empty()
    }

    pub fn rare_subset(&self) -> impl Iterator<Item = &Vignette> {
        self.vignettes
            .iter()
            .filter(|v| self.rare_diseases.contains(&v.d_true))
    }

    pub fn common_subset(&self) -> impl Iterator<Item = &Vignette> {
        self.vignettes
            .iter()
            .filter(|v| !self.rare_diseases.contains(&v.d_true))
    }

    /// One vignette per line, stable field order and sorted responses, so
    /// equal datasets serialize to identical bytes.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for v in &self.vignettes {
            serde_json::to_writer(&mut w, v)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Inverse of `write_jsonl`. The rare set is reconstructed from
    /// provenance, which is faithful for datasets this toolkit produced.
    pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Self, GeneratorError> {
        let mut vignettes = Vec::new();
        let mut rare = BTreeSet::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let v: Vignette = serde_json::from_str(&line).map_err(|e| GeneratorError::MalformedRecord {
                line: idx + 1,
                reason: e.to_string(),
            })?;
            if v.provenance == Provenance::SyntheticRare {
                rare.insert(v.d_true.clone());
            }
            vignettes.push(v);
        }
        Dataset::new(vignettes, rare)
    }
}

/// Concatenate datasets; the rare set is the union and the partition
/// invariant is re-validated over the result.
pub fn merge(parts: Vec<Dataset>) -> Result<Dataset, GeneratorError> {
    let mut vignettes = Vec::new();
    let mut rare = BTreeSet::new();
    for part in parts {
        rare.extend(part.rare_diseases);
        vignettes.extend(part.vignettes);
    }
    Dataset::new(vignettes, rare)
}

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("no demographic distribution for {0}")]
    MissingDemographics(DiseaseId),
    #[error("no annotations for {0}")]
    NoAnnotations(DiseaseId),
    #[error("invalid demographic distribution for {disease}: {reason}")]
    InvalidDistribution { disease: DiseaseId, reason: String },
    #[error("record {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("record {line}: unknown symptom code {code:?}")]
    UnknownSymptomCode { line: usize, code: String },
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("partition violated: {disease} appears both as rare and common")]
    PartitionViolation { disease: DiseaseId },
    #[error("n_per_disease must be positive")]
    ZeroPerDisease,
    #[error("i/o error in generator")]
    Io(#[from] std::io::Error),
}

/// Counters accumulated over one generation run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GenerationStats {
    /// Times a fired phenotype had no mapping and was skipped.
    pub unmapped_skips: u64,
    /// The distinct phenotypes behind those skips.
    pub unmapped_phenotypes: BTreeSet<PhenotypeId>,
    /// Vignettes that ended up with no symptoms at all (retained).
    pub empty_vignettes: u64,
}

impl GenerationStats {
    fn absorb(&mut self, other: GenerationStats) {
        self.unmapped_skips += other.unmapped_skips;
        self.unmapped_phenotypes.extend(other.unmapped_phenotypes);
        self.empty_vignettes += other.empty_vignettes;
    }
}

/// Deterministic per-vignette generator: a ChaCha stream keyed by
/// (seed, disease, index) through SHA-256, plus the 64-bit trace recorded on
/// the vignette.
fn vignette_rng(seed: u64, disease: &DiseaseId, index: u64) -> (ChaCha8Rng, u64) {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(disease.to_string().as_bytes());
    hasher.update([0u8]);
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    let trace = u64::from_le_bytes(key[..8].try_into().expect("8 bytes"));
    (ChaCha8Rng::from_seed(key), trace)
}

/// Generate the rare-disease dataset: `n_per_disease` vignettes for each
/// target, sampled from its annotations and demographic distribution.
pub fn generate_rare(
    ann: &AnnotationSet,
    mapping: &PhenotypeMapping,
    demo: &BTreeMap<DiseaseId, DemographicDistribution>,
    targets: &[DiseaseId],
    n_per_disease: u32,
    seed: u64,
) -> Result<(Dataset, GenerationStats), GeneratorError> {
    if n_per_disease == 0 {
        return Err(GeneratorError::ZeroPerDisease);
    }
    // validate inputs up front so failures don't depend on schedule
    for d in targets {
        if ann.get(d).is_none_or(|rows| rows.is_empty()) {
            return Err(GeneratorError::NoAnnotations(d.clone()));
        }
        if !demo.contains_key(d) {
            return Err(GeneratorError::MissingDemographics(d.clone()));
        }
    }

    let tasks: Vec<(&DiseaseId, u64)> = targets
        .iter()
        .flat_map(|d| (0..n_per_disease as u64).map(move |i| (d, i)))
        .collect();

    let results: Vec<(Vignette, GenerationStats)> = tasks
        .par_iter()
        .map(|&(d, i)| {
            let rows = ann.get(d).expect("validated");
            let dist = demo.get(d).expect("validated");
            let (mut rng, trace) = vignette_rng(seed, d, i);
            let mut stats = GenerationStats::default();
            let mut present: BTreeSet<SymptomId> = BTreeSet::new();
            for row in rows {
                let v: f64 = rng.random();
                if v < row.frequency.probability {
                    let targets = mapping.map_phenotype(&row.phenotype);
                    if targets.is_empty() {
                        stats.unmapped_skips += 1;
                        stats.unmapped_phenotypes.insert(row.phenotype);
                        continue;
                    }
                    for t in targets {
                        if t.manifest_prob >= 1.0 || rng.random::<f64>() < t.manifest_prob {
                            present.insert(t.symptom.clone());
                        }
                    }
                }
            }
            if present.is_empty() {
                stats.empty_vignettes += 1;
            }
            let vignette = Vignette {
                demographics: dist.sample(&mut rng),
                responses: present
                    .into_iter()
                    .map(|symptom| Response {
                        symptom,
                        answer: Answer::Present,
                    })
                    .collect(),
                d_true: d.clone(),
                provenance: Provenance::SyntheticRare,
                seed_trace: trace,
            };
            (vignette, stats)
        })
        .collect();

    let mut stats = GenerationStats::default();
    let mut vignettes = Vec::with_capacity(results.len());
    for (v, s) in results {
        stats.absorb(s);
        vignettes.push(v);
    }
    let rare: BTreeSet<DiseaseId> = targets.iter().cloned().collect();
    Ok((Dataset::new(vignettes, rare)?, stats))
}

/// A hand-authored stand-in for one common disease: per-symptom occurrence
/// probabilities plus a demographic distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct CommonDiseaseProfile {
    pub disease: DiseaseId,
    pub symptom_probs: Vec<(SymptomId, f64)>,
    pub demographics: DemographicDistribution,
}

/// Generate common-disease vignettes from profiles, with the same
/// per-vignette determinism as `generate_rare`.
pub fn synth_common(
    profiles: &[CommonDiseaseProfile],
    n_per_disease: u32,
    seed: u64,
) -> Result<(Dataset, GenerationStats), GeneratorError> {
    if n_per_disease == 0 {
        return Err(GeneratorError::ZeroPerDisease);
    }
    let tasks: Vec<(&CommonDiseaseProfile, u64)> = profiles
        .iter()
        .flat_map(|p| (0..n_per_disease as u64).map(move |i| (p, i)))
        .collect();

    let results: Vec<(Vignette, GenerationStats)> = tasks
        .par_iter()
        .map(|&(profile, i)| {
            let (mut rng, trace) = vignette_rng(seed, &profile.disease, i);
            let mut stats = GenerationStats::default();
            let mut present: BTreeSet<SymptomId> = BTreeSet::new();
            for (symptom, prob) in &profile.symptom_probs {
                // v ∈ [0,1), so prob = 1.0 always fires and 0.0 never does
                let v: f64 = rng.random();
                if v < *prob {
                    present.insert(symptom.clone());
                }
            }
            if present.is_empty() {
                stats.empty_vignettes += 1;
            }
            let vignette = Vignette {
                demographics: profile.demographics.sample(&mut rng),
                responses: present
                    .into_iter()
                    .map(|symptom| Response {
                        symptom,
                        answer: Answer::Present,
                    })
                    .collect(),
                d_true: profile.disease.clone(),
                provenance: Provenance::SyntheticCommon,
                seed_trace: trace,
            };
            (vignette, stats)
        })
        .collect();

    let mut stats = GenerationStats::default();
    let mut vignettes = Vec::with_capacity(results.len());
    for (v, s) in results {
        stats.absorb(s);
        vignettes.push(v);
    }
    Ok((Dataset::new(vignettes, BTreeSet::new())?, stats))
}

/// Records skipped by `ingest_common` because their true cause belongs to
/// the rare experiment arm.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SkipReport {
    pub skipped: Vec<(usize, DiseaseId)>,
}

#[derive(Deserialize)]
struct FeedbackRecord {
    demographics: Demographics,
    responses: Vec<Response>,
    d_true: DiseaseId,
    #[serde(default)]
    seed_trace: Option<u64>,
}

/// Ingest a user-feedback JSONL file as common-disease vignettes.
///
/// Records whose true cause is in `rare` are diverted into the skip report:
/// those diseases are evaluated on the synthetic arm instead.
pub fn ingest_common<R: BufRead>(
    reader: R,
    catalog: &SymptomCatalog,
    rare: &BTreeSet<DiseaseId>,
) -> Result<(Dataset, SkipReport), GeneratorError> {
    let mut vignettes = Vec::new();
    let mut skips = SkipReport::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: FeedbackRecord =
            serde_json::from_str(&line).map_err(|e| GeneratorError::MalformedRecord {
                line: line_no,
                reason: e.to_string(),
            })?;
        if record.demographics.age_years > MAX_AGE_YEARS {
            return Err(GeneratorError::MalformedRecord {
                line: line_no,
                reason: format!("age {} exceeds {MAX_AGE_YEARS}", record.demographics.age_years),
            });
        }
        let mut responses = record.responses;
        responses.sort_by(|a, b| a.symptom.cmp(&b.symptom));
        for pair in responses.windows(2) {
            if pair[0].symptom == pair[1].symptom {
                return Err(GeneratorError::MalformedRecord {
                    line: line_no,
                    reason: format!("duplicate symptom {}", pair[0].symptom),
                });
            }
        }
        for r in &responses {
            if !catalog.contains(&r.symptom) {
                return Err(GeneratorError::UnknownSymptomCode {
                    line: line_no,
                    code: r.symptom.code().to_string(),
                });
            }
        }
        if rare.contains(&record.d_true) {
            skips.skipped.push((line_no, record.d_true));
            continue;
        }
        let seed_trace = record
            .seed_trace
            .unwrap_or_else(|| vignette_rng(FEEDBACK_SEED, &record.d_true, line_no as u64).1);
        vignettes.push(Vignette {
            demographics: record.demographics,
            responses,
            d_true: record.d_true,
            provenance: Provenance::FeedbackCommon,
            seed_trace,
        });
    }
    Ok((Dataset::new(vignettes, BTreeSet::new())?, skips))
}

/// Load per-disease demographic distributions from a TSV of
/// `disease_id  age_lo  age_hi  weight  female_ratio` rows (one row per age
/// band; a disease's female ratio must agree across its rows).
pub fn load_demographics<R: BufRead>(
    reader: R,
) -> Result<BTreeMap<DiseaseId, DemographicDistribution>, GeneratorError> {
    struct Partial {
        bands: Vec<AgeBand>,
        female_ratio: f64,
    }
    let mut partials: BTreeMap<DiseaseId, Partial> = BTreeMap::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(GeneratorError::MalformedRow {
                line: line_no,
                reason: format!("expected 5 columns, found {}", cols.len()),
            });
        }
        if cols[0].eq_ignore_ascii_case("disease_id") {
            continue;
        }
        let malformed = |reason: String| GeneratorError::MalformedRow {
            line: line_no,
            reason,
        };
        let disease: DiseaseId = cols[0]
            .trim()
            .parse()
            .map_err(|e| malformed(format!("{e}")))?;
        let lo: u32 = cols[1].trim().parse().map_err(|_| malformed(format!("bad age_lo {:?}", cols[1])))?;
        let hi: u32 = cols[2].trim().parse().map_err(|_| malformed(format!("bad age_hi {:?}", cols[2])))?;
        let weight: f64 = cols[3].trim().parse().map_err(|_| malformed(format!("bad weight {:?}", cols[3])))?;
        let female_ratio: f64 = cols[4]
            .trim()
            .parse()
            .map_err(|_| malformed(format!("bad female_ratio {:?}", cols[4])))?;
        match partials.get_mut(&disease) {
            Some(p) => {
                if p.female_ratio != female_ratio {
                    return Err(malformed(format!(
                        "female ratio {female_ratio} disagrees with earlier {} for {disease}",
                        p.female_ratio
                    )));
                }
                p.bands.push(AgeBand { lo, hi, weight });
            }
            None => {
                partials.insert(
                    disease,
                    Partial {
                        bands: vec![AgeBand { lo, hi, weight }],
                        female_ratio,
                    },
                );
            }
        }
    }

    partials
        .into_iter()
        .map(|(d, p)| {
            DemographicDistribution::new(d.clone(), p.bands, p.female_ratio).map(|dist| (d, dist))
        })
        .collect()
}

/// Load common-disease profiles from a TSV of
/// `disease_id  symptom_code  prob` rows, binding demographics from `demo`.
pub fn load_common_profiles<R: BufRead>(
    reader: R,
    catalog: &SymptomCatalog,
    demo: &BTreeMap<DiseaseId, DemographicDistribution>,
) -> Result<Vec<CommonDiseaseProfile>, GeneratorError> {
    let mut probs: BTreeMap<DiseaseId, Vec<(SymptomId, f64)>> = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(GeneratorError::MalformedRow {
                line: line_no,
                reason: format!("expected 3 columns, found {}", cols.len()),
            });
        }
        if cols[0].eq_ignore_ascii_case("disease_id") {
            continue;
        }
        let malformed = |reason: String| GeneratorError::MalformedRow {
            line: line_no,
            reason,
        };
        let disease: DiseaseId = cols[0].trim().parse().map_err(|e| malformed(format!("{e}")))?;
        let symptom = SymptomId::new(cols[1].trim()).map_err(|e| malformed(e.to_string()))?;
        if !catalog.contains(&symptom) {
            return Err(GeneratorError::UnknownSymptomCode {
                line: line_no,
                code: symptom.code().to_string(),
            });
        }
        let prob: f64 = cols[2].trim().parse().map_err(|_| malformed(format!("bad prob {:?}", cols[2])))?;
        if !(0.0..=1.0).contains(&prob) {
            return Err(malformed(format!("prob {prob} not in [0,1]")));
        }
        probs.entry(disease).or_default().push((symptom, prob));
    }
    probs
        .into_iter()
        .map(|(disease, symptom_probs)| {
            let demographics = demo
                .get(&disease)
                .cloned()
                .ok_or_else(|| GeneratorError::MissingDemographics(disease.clone()))?;
            Ok(CommonDiseaseProfile {
                disease,
                symptom_probs,
                demographics,
            })
        })
        .collect()
}
