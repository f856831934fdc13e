//! Core library of the scsim toolkit: build synthetic patient vignettes
//! from disease-phenotype annotations, drive symptom-checker algorithms
//! through simulated interviews, and estimate how an algorithm update moves
//! per-disease Top-K recall and precision.
//!
//! The pipeline runs in three stages, one module each:
//!
//! 1. [`annotations`] + [`mapping`] parse the knowledge inputs: the
//!    disease-phenotype annotation file and the curated phenotype-to-symptom
//!    mapping.
//! 2. [`generator`] turns them into datasets of vignettes (plus ingestion of
//!    user-feedback records for common diseases), and [`simulator`] replays
//!    each vignette against a symptom checker under the interview protocol.
//! 3. [`metrics`] scores the transcripts: Top-K recall/precision per
//!    disease, before/after deltas with bootstrap intervals, and the
//!    regression of actual on estimated changes.

pub mod annotations;
pub mod generator;
pub mod mapping;
pub mod metrics;
pub mod simulator;
pub mod stats;

pub use annotations::{AnnotationSet, DiseaseId, FrequencyValue, HpoAnnotation, PhenotypeId};
pub use generator::{Dataset, Demographics, Provenance, Response, Vignette};
pub use mapping::{PhenotypeMapping, SymptomCatalog, SymptomId};
pub use metrics::{DeltaReport, DiseaseMetrics, RegressionResult};
pub use simulator::{InterviewBudget, InterviewTranscript, SymptomChecker};
