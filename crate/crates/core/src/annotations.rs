//! Disease-phenotype annotation ingestion.
//!
//! Parses the tab-separated `phenotype.hpoa` layout (12 columns, `#`-prefixed
//! headers) into an [`AnnotationSet`] and normalizes the frequency column
//! (categorical labels, `N/M` cohort fractions, percentages, or blank) into
//! manifestation probabilities.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Namespace of a disease identifier (`ORPHA:117`, `OMIM:126200`, ...).
///
/// Namespaces outside the common three are preserved verbatim so the id
/// round-trips through its canonical text form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Namespace {
    Orpha,
    Omim,
    Mondo,
    Other(String),
}

impl Namespace {
    pub fn as_str(&self) -> &str {
        match self {
            Namespace::Orpha => "ORPHA",
            Namespace::Omim => "OMIM",
            Namespace::Mondo => "MONDO",
            Namespace::Other(s) => s,
        }
    }
}

/// A disease identifier with canonical form `NAMESPACE:code`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiseaseId {
    namespace: Namespace,
    code: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid disease id {0:?} (expected NAMESPACE:code)")]
pub struct DiseaseIdParseError(pub String);

impl DiseaseId {
    pub fn new(namespace: Namespace, code: impl Into<String>) -> Result<Self, DiseaseIdParseError> {
        let code = code.into();
        if code.is_empty() || namespace.as_str().is_empty() {
            return Err(DiseaseIdParseError(format!("{}:{}", namespace.as_str(), code)));
        }
        Ok(Self { namespace, code })
    }

    pub fn namespace(&self) -> &Namespace {
        &self.namespace
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    fn canonical_bytes(&self) -> impl Iterator<Item = u8> + '_ {
        self.namespace
            .as_str()
            .bytes()
            .chain(std::iter::once(b':'))
            .chain(self.code.bytes())
    }
}

// Ordering is lexicographic over the canonical "NAMESPACE:code" form; the
// simulator relies on this for reproducible tie-breaks.
impl Ord for DiseaseId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical_bytes().cmp(other.canonical_bytes())
    }
}

impl PartialOrd for DiseaseId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DiseaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.namespace.as_str(), self.code)
    }
}

impl FromStr for DiseaseId {
    type Err = DiseaseIdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (ns, code) = s
            .split_once(':')
            .ok_or_else(|| DiseaseIdParseError(s.to_string()))?;
        if ns.is_empty() || code.is_empty() {
            return Err(DiseaseIdParseError(s.to_string()));
        }
        let namespace = match ns.to_ascii_uppercase().as_str() {
            "ORPHA" => Namespace::Orpha,
            "OMIM" => Namespace::Omim,
            "MONDO" => Namespace::Mondo,
            other => Namespace::Other(other.to_string()),
        };
        Ok(Self {
            namespace,
            code: code.to_string(),
        })
    }
}

impl Serialize for DiseaseId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DiseaseId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// An HPO phenotype identifier, `HP:` followed by exactly seven digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhenotypeId(u32);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid phenotype id {0:?} (expected HP:NNNNNNN)")]
pub struct PhenotypeIdParseError(pub String);

impl PhenotypeId {
    pub fn numeric(self) -> u32 {
        self.0
    }
}

impl fmt::Display for PhenotypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HP:{:07}", self.0)
    }
}

impl FromStr for PhenotypeId {
    type Err = PhenotypeIdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix("HP:")
            .ok_or_else(|| PhenotypeIdParseError(s.to_string()))?;
        if digits.len() != 7 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(PhenotypeIdParseError(s.to_string()));
        }
        Ok(Self(digits.parse().expect("7 ascii digits fit in u32")))
    }
}

impl Serialize for PhenotypeId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PhenotypeId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// How a frequency cell was expressed in the source file.
///
/// The order here doubles as the specificity ranking used when duplicate
/// (disease, phenotype) rows are resolved: `Fraction > Percent > Label >
/// Unspecified`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyKind {
    Unspecified,
    Label,
    Percent,
    Fraction,
}

/// A normalized manifestation probability plus its raw source text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyValue {
    pub kind: FrequencyKind,
    pub probability: f64,
    pub raw: String,
}

/// Frequency labels and their probabilities: midpoint of each defined range,
/// with `Obligate` = 1.0 and `Excluded` = 0.0. Each label is also accepted as
/// its HP frequency-term id.
const FREQUENCY_LABELS: [(&str, &str, f64); 6] = [
    ("obligate", "HP:0040280", 1.0),
    ("very frequent", "HP:0040281", 0.895),
    ("frequent", "HP:0040282", 0.545),
    ("occasional", "HP:0040283", 0.17),
    ("very rare", "HP:0040284", 0.025),
    ("excluded", "HP:0040285", 0.0),
];

/// Parser knobs. `strict` turns unrecognized frequency cells into errors;
/// the lenient default downgrades them to `Unspecified` with a warning.
#[derive(Clone, Debug)]
pub struct ParseConfig {
    pub strict: bool,
    pub default_frequency: f64,
}

impl Default for ParseConfig {
    fn default() -> Self {
        Self {
            strict: false,
            default_frequency: 0.5,
        }
    }
}

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("line {line}: expected at least 12 tab-separated columns, found {found}")]
    MalformedRow { line: usize, found: usize },
    #[error("line {line}: {source}")]
    InvalidPhenotypeId {
        line: usize,
        source: PhenotypeIdParseError,
    },
    #[error("line {line}: {source}")]
    InvalidDiseaseId {
        line: usize,
        source: DiseaseIdParseError,
    },
    #[error("line {line}: unrecognized frequency {cell:?}")]
    InvalidFrequency { line: usize, cell: String },
    #[error("unrecognized frequency {cell:?}")]
    UnrecognizedFrequency { cell: String },
    #[error("i/o error reading annotations")]
    Io(#[from] std::io::Error),
}

/// Non-fatal events surfaced by lenient parsing.
#[derive(Clone, Debug, PartialEq)]
pub enum ParseWarning {
    /// An unrecognized frequency cell was downgraded to `Unspecified`.
    DowngradedFrequency { line: usize, cell: String },
    /// A duplicate (disease, phenotype) row was resolved; `kept` tells which
    /// frequency survived.
    DuplicateAnnotation {
        line: usize,
        disease: DiseaseId,
        phenotype: PhenotypeId,
        kept: FrequencyKind,
    },
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseWarning::DowngradedFrequency { line, cell } => {
                write!(f, "line {line}: frequency {cell:?} not recognized, treated as unspecified")
            }
            ParseWarning::DuplicateAnnotation {
                line,
                disease,
                phenotype,
                kept,
            } => write!(
                f,
                "line {line}: duplicate annotation for ({disease}, {phenotype}), kept {kept:?} frequency"
            ),
        }
    }
}

/// One (disease, phenotype, frequency) record. Onset, sex, and modifier are
/// carried through verbatim; generation uses only the frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HpoAnnotation {
    pub disease: DiseaseId,
    pub disease_name: String,
    pub phenotype: PhenotypeId,
    pub frequency: FrequencyValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub onset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modifier: Option<String>,
}

/// All phenotypic-abnormality annotations of a file, grouped by disease.
/// Immutable after parsing; safe to share across threads.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub by_disease: BTreeMap<DiseaseId, Vec<HpoAnnotation>>,
    pub source_version: String,
}

impl AnnotationSet {
    pub fn diseases(&self) -> impl Iterator<Item = &DiseaseId> {
        self.by_disease.keys()
    }

    pub fn get(&self, disease: &DiseaseId) -> Option<&[HpoAnnotation]> {
        self.by_disease.get(disease).map(Vec::as_slice)
    }

    /// Total number of annotation records across all diseases.
    pub fn len(&self) -> usize {
        self.by_disease.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_disease.is_empty()
    }

    /// Canonical JSON dump; `from_json` of the result is structurally equal.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("annotation set serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Normalize one frequency cell.
///
/// Recognized forms: the six categorical labels (as English text or HP term
/// id, case-insensitive), `N/M` cohort fractions, `X%` percentages, and
/// blank. Anything else errors in strict mode and becomes `Unspecified`
/// otherwise.
pub fn parse_frequency(cell: &str, config: &ParseConfig) -> Result<FrequencyValue, AnnotationError> {
    let trimmed = cell.trim();
    if trimmed.is_empty() {
        return Ok(FrequencyValue {
            kind: FrequencyKind::Unspecified,
            probability: config.default_frequency,
            raw: cell.to_string(),
        });
    }

    for (label, term_id, probability) in FREQUENCY_LABELS {
        if trimmed.eq_ignore_ascii_case(label) || trimmed.eq_ignore_ascii_case(term_id) {
            return Ok(FrequencyValue {
                kind: FrequencyKind::Label,
                probability,
                raw: cell.to_string(),
            });
        }
    }

    if let Some((num, den)) = trimmed.split_once('/') {
        if let (Ok(n), Ok(m)) = (num.trim().parse::<u64>(), den.trim().parse::<u64>()) {
            if m > 0 && n <= m {
                return Ok(FrequencyValue {
                    kind: FrequencyKind::Fraction,
                    probability: n as f64 / m as f64,
                    raw: cell.to_string(),
                });
            }
        }
    }

    if let Some(pct) = trimmed.strip_suffix('%') {
        if let Ok(x) = pct.trim().parse::<f64>() {
            if (0.0..=100.0).contains(&x) {
                return Ok(FrequencyValue {
                    kind: FrequencyKind::Percent,
                    probability: x / 100.0,
                    raw: cell.to_string(),
                });
            }
        }
    }

    if config.strict {
        Err(AnnotationError::UnrecognizedFrequency {
            cell: cell.to_string(),
        })
    } else {
        Ok(FrequencyValue {
            kind: FrequencyKind::Unspecified,
            probability: config.default_frequency,
            raw: cell.to_string(),
        })
    }
}

/// Parse a `phenotype.hpoa`-layout file.
///
/// Keeps aspect-"P" rows, drops rows qualified `NOT`, records the file's
/// version header when present, and resolves duplicate (disease, phenotype)
/// rows by keeping the most specific frequency (first occurrence on ties).
pub fn parse_hpoa_file<R: BufRead>(
    reader: R,
    config: &ParseConfig,
) -> Result<(AnnotationSet, Vec<ParseWarning>), AnnotationError> {
    let mut set = AnnotationSet::default();
    let mut warnings = Vec::new();
    // (disease, phenotype) -> position in that disease's Vec
    let mut seen: HashMap<(DiseaseId, PhenotypeId), usize> = HashMap::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim_start();
            for key in ["data-version:", "version:", "date:"] {
                if let Some(value) = strip_prefix_ci(rest, key) {
                    if set.source_version.is_empty() {
                        set.source_version = value.trim().to_string();
                    }
                }
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        // tolerate the bare column-name row some releases emit
        if cols[0].eq_ignore_ascii_case("database_id") || cols[0].eq_ignore_ascii_case("databaseid")
        {
            continue;
        }
        if cols.len() < 12 {
            return Err(AnnotationError::MalformedRow {
                line: line_no,
                found: cols.len(),
            });
        }

        let qualifier = cols[2].trim();
        let aspect = cols[10].trim();
        if qualifier.eq_ignore_ascii_case("NOT") || aspect != "P" {
            continue;
        }

        let disease: DiseaseId = cols[0]
            .trim()
            .parse()
            .map_err(|source| AnnotationError::InvalidDiseaseId { line: line_no, source })?;
        let phenotype: PhenotypeId = cols[3]
            .trim()
            .parse()
            .map_err(|source| AnnotationError::InvalidPhenotypeId { line: line_no, source })?;
        let frequency = parse_frequency(cols[7], config).map_err(|e| match e {
            AnnotationError::UnrecognizedFrequency { cell } => {
                AnnotationError::InvalidFrequency { line: line_no, cell }
            }
            other => other,
        })?;
        if frequency.kind == FrequencyKind::Unspecified && !frequency.raw.trim().is_empty() {
            warnings.push(ParseWarning::DowngradedFrequency {
                line: line_no,
                cell: frequency.raw.clone(),
            });
        }

        let annotation = HpoAnnotation {
            disease: disease.clone(),
            disease_name: cols[1].trim().to_string(),
            phenotype,
            frequency,
            onset: non_empty(cols[6]),
            sex: non_empty(cols[8]),
            modifier: non_empty(cols[9]),
        };

        match seen.get(&(disease.clone(), phenotype)) {
            Some(&pos) => {
                let rows = set.by_disease.get_mut(&disease).expect("disease present");
                if annotation.frequency.kind > rows[pos].frequency.kind {
                    rows[pos] = annotation;
                }
                warnings.push(ParseWarning::DuplicateAnnotation {
                    line: line_no,
                    disease,
                    phenotype,
                    kept: rows[pos].frequency.kind,
                });
            }
            None => {
                let rows = set.by_disease.entry(disease.clone()).or_default();
                rows.push(annotation);
                seen.insert((disease, phenotype), rows.len() - 1);
            }
        }
    }

    Ok((set, warnings))
}

fn strip_prefix_ci<'a>(s: &'a str, prefix: &str) -> Option<&'a str> {
    if s.len() >= prefix.len() && s[..prefix.len()].eq_ignore_ascii_case(prefix) {
        Some(&s[prefix.len()..])
    } else {
        None
    }
}

fn non_empty(s: &str) -> Option<String> {
    let t = s.trim();
    if t.is_empty() {
        None
    } else {
        Some(t.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ParseConfig {
        ParseConfig::default()
    }

    #[test]
    fn disease_id_round_trips() {
        for s in ["ORPHA:117", "OMIM:126200", "MONDO:0005301", "DECIPHER:14"] {
            let id: DiseaseId = s.parse().unwrap();
            assert_eq!(id.to_string(), s);
            let again: DiseaseId = id.to_string().parse().unwrap();
            assert_eq!(again, id);
        }
        // namespaces are canonicalized to upper case
        let id: DiseaseId = "orpha:117".parse().unwrap();
        assert_eq!(id.to_string(), "ORPHA:117");
        assert!("".parse::<DiseaseId>().is_err());
        assert!("ORPHA".parse::<DiseaseId>().is_err());
        assert!("ORPHA:".parse::<DiseaseId>().is_err());
        assert!(":117".parse::<DiseaseId>().is_err());
    }

    #[test]
    fn disease_id_orders_lexicographically() {
        let mut ids: Vec<DiseaseId> = ["ORPHA:117", "OMIM:126200", "MONDO:0005301", "OMIM:266600"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        ids.sort();
        let sorted: Vec<String> = ids.iter().map(|d| d.to_string()).collect();
        assert_eq!(
            sorted,
            ["MONDO:0005301", "OMIM:126200", "OMIM:266600", "ORPHA:117"]
        );
    }

    #[test]
    fn phenotype_id_validates_pattern() {
        let p: PhenotypeId = "HP:0001297".parse().unwrap();
        assert_eq!(p.to_string(), "HP:0001297");
        assert_eq!(p.numeric(), 1297);
        assert!("HP:123".parse::<PhenotypeId>().is_err());
        assert!("HP:12345678".parse::<PhenotypeId>().is_err());
        assert!("HP:00O1297".parse::<PhenotypeId>().is_err());
        assert!("hp:0001297".parse::<PhenotypeId>().is_err());
        assert!("0001297".parse::<PhenotypeId>().is_err());
    }

    #[test]
    fn frequency_fraction() {
        let f = parse_frequency("12/45", &cfg()).unwrap();
        assert_eq!(f.kind, FrequencyKind::Fraction);
        assert!((f.probability - 0.2667).abs() < 1e-4);
        assert!((f.probability - 12.0 / 45.0).abs() < 1e-12);

        let zero = parse_frequency("0/10", &cfg()).unwrap();
        assert_eq!(zero.kind, FrequencyKind::Fraction);
        assert_eq!(zero.probability, 0.0);
    }

    #[test]
    fn frequency_percent() {
        let f = parse_frequency("17%", &cfg()).unwrap();
        assert_eq!(f.kind, FrequencyKind::Percent);
        assert_eq!(f.probability, 0.17);
        let f = parse_frequency("4.5%", &cfg()).unwrap();
        assert_eq!(f.probability, 0.045);
    }

    #[test]
    fn frequency_labels_midpoints() {
        let cases = [
            ("Very frequent", 0.895),
            ("Frequent", 0.545),
            ("Occasional", 0.17),
            ("Very rare", 0.025),
            ("Obligate", 1.0),
            ("Excluded", 0.0),
        ];
        for (label, expected) in cases {
            let f = parse_frequency(label, &cfg()).unwrap();
            assert_eq!(f.kind, FrequencyKind::Label, "{label}");
            assert_eq!(f.probability, expected, "{label}");
            // case-insensitive
            let f = parse_frequency(&label.to_uppercase(), &cfg()).unwrap();
            assert_eq!(f.probability, expected);
        }
        // HP term ids are accepted too
        let f = parse_frequency("HP:0040281", &cfg()).unwrap();
        assert_eq!(f.kind, FrequencyKind::Label);
        assert_eq!(f.probability, 0.895);
    }

    #[test]
    fn frequency_blank_uses_default() {
        let f = parse_frequency("", &cfg()).unwrap();
        assert_eq!(f.kind, FrequencyKind::Unspecified);
        assert_eq!(f.probability, 0.5);

        let custom = ParseConfig {
            default_frequency: 0.25,
            ..cfg()
        };
        assert_eq!(parse_frequency("  ", &custom).unwrap().probability, 0.25);
    }

    #[test]
    fn frequency_unrecognized_strict_vs_lenient() {
        let strict = ParseConfig {
            strict: true,
            ..cfg()
        };
        for bad in ["sometimes", "5/4", "12/0", "110%", "-3%", "1/2/3", "HP:0000001"] {
            assert!(
                matches!(
                    parse_frequency(bad, &strict),
                    Err(AnnotationError::UnrecognizedFrequency { .. })
                ),
                "{bad} should be rejected in strict mode"
            );
            let lenient = parse_frequency(bad, &cfg()).unwrap();
            assert_eq!(lenient.kind, FrequencyKind::Unspecified, "{bad}");
            assert_eq!(lenient.probability, 0.5);
            assert_eq!(lenient.raw, bad);
        }
    }

    #[test]
    fn empty_input_yields_empty_set() {
        let input = "#date: 2024-02-08\n#tracker: example\n";
        let (set, warnings) = parse_hpoa_file(input.as_bytes(), &cfg()).unwrap();
        assert!(set.is_empty());
        assert!(warnings.is_empty());
        assert_eq!(set.source_version, "2024-02-08");
    }

    fn row(disease: &str, hpo: &str, freq: &str, qualifier: &str, aspect: &str) -> String {
        format!(
            "{disease}\tSome disease\t{qualifier}\t{hpo}\tPMID:1\tPCS\t\t{freq}\t\t\t{aspect}\tHPO:x[2024-01-01]"
        )
    }

    #[test]
    fn not_qualifier_and_non_p_aspect_excluded() {
        let input = [
            row("ORPHA:117", "HP:0001297", "17%", "", "P"),
            row("ORPHA:117", "HP:0001250", "17%", "NOT", "P"),
            row("ORPHA:117", "HP:0001251", "17%", "", "I"),
        ]
        .join("\n");
        let (set, _) = parse_hpoa_file(input.as_bytes(), &cfg()).unwrap();
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let input = format!("{}\nbad\trow\n", row("ORPHA:117", "HP:0001297", "", "", "P"));
        let err = parse_hpoa_file(input.as_bytes(), &cfg()).unwrap_err();
        match err {
            AnnotationError::MalformedRow { line, found } => {
                assert_eq!(line, 2);
                assert_eq!(found, 2);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn invalid_phenotype_id_reports_line_number() {
        let input = row("ORPHA:117", "HP:12", "", "", "P");
        let err = parse_hpoa_file(input.as_bytes(), &cfg()).unwrap_err();
        assert!(matches!(err, AnnotationError::InvalidPhenotypeId { line: 1, .. }));
    }

    #[test]
    fn strict_mode_rejects_bad_frequency_with_line() {
        let strict = ParseConfig {
            strict: true,
            ..cfg()
        };
        let input = row("ORPHA:117", "HP:0001297", "mystery", "", "P");
        let err = parse_hpoa_file(input.as_bytes(), &strict).unwrap_err();
        assert!(matches!(err, AnnotationError::InvalidFrequency { line: 1, .. }));
    }

    #[test]
    fn lenient_mode_downgrades_with_warning() {
        let input = row("ORPHA:117", "HP:0001297", "mystery", "", "P");
        let (set, warnings) = parse_hpoa_file(input.as_bytes(), &cfg()).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(
            warnings,
            vec![ParseWarning::DowngradedFrequency {
                line: 1,
                cell: "mystery".to_string()
            }]
        );
    }

    #[test]
    fn duplicates_keep_most_specific_frequency() {
        // Label first, then a more specific fraction: fraction wins.
        let input = [
            row("ORPHA:117", "HP:0001297", "Frequent", "", "P"),
            row("ORPHA:117", "HP:0001297", "12/45", "", "P"),
            // Tie (two labels): first occurrence wins.
            row("ORPHA:117", "HP:0001250", "Occasional", "", "P"),
            row("ORPHA:117", "HP:0001250", "Very rare", "", "P"),
        ]
        .join("\n");
        let (set, warnings) = parse_hpoa_file(input.as_bytes(), &cfg()).unwrap();
        let d: DiseaseId = "ORPHA:117".parse().unwrap();
        let rows = set.get(&d).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].frequency.kind, FrequencyKind::Fraction);
        assert!((rows[0].frequency.probability - 12.0 / 45.0).abs() < 1e-12);
        assert_eq!(rows[1].frequency.raw, "Occasional");
        assert_eq!(warnings.len(), 2);
    }

    #[test]
    fn canonical_dump_round_trips() {
        let input = [
            row("ORPHA:117", "HP:0001297", "Very frequent", "", "P"),
            row("OMIM:126200", "HP:0001250", "3/7", "", "P"),
            row("OMIM:126200", "HP:0002015", "", "", "P"),
        ]
        .join("\n");
        let (set, _) = parse_hpoa_file(input.as_bytes(), &cfg()).unwrap();
        let dumped = set.to_json();
        let reloaded = AnnotationSet::from_json(&dumped).unwrap();
        assert_eq!(reloaded, set);
    }
}
