//! The interview harness.
//!
//! A [`SymptomChecker`] never sees a vignette directly: it receives the
//! demographics and an optional chief complaint, then asks about one symptom
//! at a time. The harness answers through the [`AnswerPolicy`], forces a
//! prediction when the question budget runs out, and records everything in
//! an [`InterviewTranscript`]. Misbehavior (repeated questions, asking
//! after the stop, duplicate predictions) is a protocol violation, fatal or
//! downgraded to a warning depending on [`ViolationMode`].

mod reference;
mod subprocess;

pub use reference::{KbError, ReferenceEngine, ReferenceKb};
pub use subprocess::SubprocessChecker;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotations::DiseaseId;
use crate::generator::{Answer, Dataset, Demographics, Response, Vignette};
use crate::mapping::SymptomId;

/// Interview limits: the question budget and the K of the ranked output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterviewBudget {
    pub max_questions: usize,
    pub top_k: usize,
}

impl InterviewBudget {
    pub fn new(max_questions: usize, top_k: usize) -> Result<Self, SimulatorError> {
        if top_k == 0 {
            return Err(SimulatorError::InvalidBudget(
                "top_k must be at least 1".to_string(),
            ));
        }
        Ok(Self {
            max_questions,
            top_k,
        })
    }
}

/// The causes a checker can output, with its rare subset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CauseCatalog {
    pub causes: BTreeSet<DiseaseId>,
    pub rare_subset: BTreeSet<DiseaseId>,
}

impl CauseCatalog {
    pub fn new(
        causes: BTreeSet<DiseaseId>,
        rare_subset: BTreeSet<DiseaseId>,
    ) -> Result<Self, SimulatorError> {
        if let Some(d) = rare_subset.difference(&causes).next() {
            return Err(SimulatorError::InvalidBudget(format!(
                "rare disease {d} is not among the causes"
            )));
        }
        Ok(Self {
            causes,
            rare_subset,
        })
    }
}

/// What a checker does at each turn.
#[derive(Clone, Debug, PartialEq)]
pub enum ScAction {
    Ask(SymptomId),
    Predict(Vec<DiseaseId>),
}

/// One interview from the checker's side. `step` is called with the answer
/// to the previous question (`None` on the first call); `finish` is called
/// when the budget is exhausted and must yield a prediction.
pub trait InterviewSession {
    fn step(&mut self, answer: Option<Answer>) -> Result<ScAction, SimulatorError>;
    fn finish(&mut self) -> Result<ScAction, SimulatorError>;
}

/// A symptom-checker algorithm under evaluation.
///
/// Implementations must be safe to share across interview threads: either
/// immutable after load (like [`ReferenceEngine`]) or internally
/// synchronized. Implementations whose sessions cannot overlap safely, such
/// as a single external process, return `false` from `parallel_safe` and the
/// harness runs them sequentially in vignette order.
pub trait SymptomChecker: Send + Sync {
    fn name(&self) -> &str;

    fn begin(
        &self,
        demographics: &Demographics,
        chief_complaint: Option<&SymptomId>,
    ) -> Result<Box<dyn InterviewSession + '_>, SimulatorError>;

    fn parallel_safe(&self) -> bool {
        true
    }
}

/// The answer given when the checker asks about a symptom the vignette
/// cannot answer. Synthetic vignettes enumerate every manifested symptom,
/// so non-membership defaults to `absent`; `unknown` is kept for
/// sensitivity analysis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NegativeAnswer {
    #[default]
    Absent,
    Unknown,
}

/// How the chief complaint is chosen before the interview starts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiefComplaintMode {
    /// A uniformly random present symptom, drawn from the vignette's own
    /// seed trace.
    #[default]
    Seeded,
    None,
}

/// Converts a vignette into interview answers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerPolicy {
    pub negative: NegativeAnswer,
    pub chief_complaint: ChiefComplaintMode,
}

impl AnswerPolicy {
    /// The vignette's recorded answer, or the configured negative.
    pub fn answer(&self, vignette: &Vignette, symptom: &SymptomId) -> Answer {
        vignette.response_for(symptom).unwrap_or(match self.negative {
            NegativeAnswer::Absent => Answer::Absent,
            NegativeAnswer::Unknown => Answer::Unknown,
        })
    }

    pub fn pick_chief_complaint(&self, vignette: &Vignette) -> Option<SymptomId> {
        if self.chief_complaint == ChiefComplaintMode::None {
            return None;
        }
        let present: Vec<&SymptomId> = vignette.present_symptoms().collect();
        if present.is_empty() {
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(vignette.seed_trace);
        Some(present[rng.random_range(0..present.len())].clone())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ViolationMode {
    /// Fail the run (the default in tests).
    #[default]
    Error,
    /// Record a warning on the transcript and sanitize (batch runs).
    Warn,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    RepeatedQuestion(SymptomId),
    AskAfterStop(SymptomId),
    DuplicatePrediction(DiseaseId),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::RepeatedQuestion(s) => write!(f, "asked about {s} twice"),
            Violation::AskAfterStop(s) => write!(f, "asked about {s} after being stopped"),
            Violation::DuplicatePrediction(d) => write!(f, "predicted {d} more than once"),
        }
    }
}

#[derive(Debug, Error)]
pub enum SimulatorError {
    #[error("vignette {vignette_ref}: protocol violation: {violation}")]
    Protocol {
        vignette_ref: usize,
        violation: Violation,
    },
    #[error("symptom checker failure: {0}")]
    Checker(String),
    #[error("invalid interview configuration: {0}")]
    InvalidBudget(String),
    #[error("transcript record {line}: {reason}")]
    MalformedTranscript { line: usize, reason: String },
    #[error("failed to build worker pool: {0}")]
    ThreadPool(String),
    #[error("i/o error in simulator")]
    Io(#[from] std::io::Error),
}

/// Everything that happened in one interview.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterviewTranscript {
    /// Index of the vignette within its dataset.
    pub vignette_ref: usize,
    /// Questions in the order they were asked, with their answers. The
    /// chief complaint is not a question and is not listed here.
    pub asked: Vec<Response>,
    /// Every response the checker obtained, chief complaint included,
    /// sorted by symptom.
    pub collected: Vec<Response>,
    /// Ranked causes, truncated to the budget's top-K.
    pub prediction: Vec<DiseaseId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl InterviewTranscript {
    /// True when every collected `present` symptom is answerable from the
    /// vignette: the r_collected ⊆ r_potential contract.
    pub fn contained_in(&self, vignette: &Vignette) -> bool {
        self.collected
            .iter()
            .filter(|r| r.answer == Answer::Present)
            .all(|r| vignette.response_for(&r.symptom) == Some(Answer::Present))
    }
}

/// Run one interview under the protocol.
pub fn run_interview(
    sc: &dyn SymptomChecker,
    vignette: &Vignette,
    vignette_ref: usize,
    budget: &InterviewBudget,
    policy: &AnswerPolicy,
    mode: ViolationMode,
) -> Result<InterviewTranscript, SimulatorError> {
    let violation = |v: Violation| SimulatorError::Protocol {
        vignette_ref,
        violation: v,
    };

    let chief = policy.pick_chief_complaint(vignette);
    let mut collected: BTreeMap<SymptomId, Answer> = BTreeMap::new();
    if let Some(s) = &chief {
        collected.insert(s.clone(), Answer::Present);
    }

    let mut session = sc.begin(&vignette.demographics, chief.as_ref())?;
    let mut asked: Vec<Response> = Vec::new();
    let mut asked_set: BTreeSet<SymptomId> = BTreeSet::new();
    let mut warnings: Vec<String> = Vec::new();
    let mut last_answer: Option<Answer> = None;

    let ranked: Vec<DiseaseId> = loop {
        if asked.len() >= budget.max_questions {
            match session.finish()? {
                ScAction::Predict(r) => break r,
                ScAction::Ask(s) => {
                    let v = Violation::AskAfterStop(s);
                    if mode == ViolationMode::Error {
                        return Err(violation(v));
                    }
                    warnings.push(v.to_string());
                    break Vec::new();
                }
            }
        }
        match session.step(last_answer.take())? {
            ScAction::Ask(symptom) => {
                if asked_set.contains(&symptom) {
                    let v = Violation::RepeatedQuestion(symptom.clone());
                    if mode == ViolationMode::Error {
                        return Err(violation(v));
                    }
                    warnings.push(v.to_string());
                }
                let answer = policy.answer(vignette, &symptom);
                asked.push(Response {
                    symptom: symptom.clone(),
                    answer,
                });
                asked_set.insert(symptom.clone());
                collected.insert(symptom, answer);
                last_answer = Some(answer);
            }
            ScAction::Predict(r) => break r,
        }
    };

    let mut prediction = Vec::with_capacity(ranked.len().min(budget.top_k));
    let mut seen: BTreeSet<DiseaseId> = BTreeSet::new();
    for d in ranked {
        if !seen.insert(d.clone()) {
            let v = Violation::DuplicatePrediction(d);
            if mode == ViolationMode::Error {
                return Err(violation(v));
            }
            warnings.push(v.to_string());
            continue;
        }
        prediction.push(d);
    }
    prediction.truncate(budget.top_k);

    Ok(InterviewTranscript {
        vignette_ref,
        asked,
        collected: collected
            .into_iter()
            .map(|(symptom, answer)| Response { symptom, answer })
            .collect(),
        prediction,
        warnings,
    })
}

/// Interview every vignette of a dataset. `jobs` is the parallelism degree
/// (0 = all cores); transcripts come back in vignette order whatever the
/// schedule, so the degree never changes the output.
pub fn run_dataset(
    sc: &dyn SymptomChecker,
    data: &Dataset,
    budget: &InterviewBudget,
    policy: &AnswerPolicy,
    mode: ViolationMode,
    jobs: usize,
) -> Result<Vec<InterviewTranscript>, SimulatorError> {
    if !sc.parallel_safe() || jobs == 1 {
        return data
            .vignettes
            .iter()
            .enumerate()
            .map(|(i, v)| run_interview(sc, v, i, budget, policy, mode))
            .collect();
    }
    let run_all = || {
        data.vignettes
            .par_iter()
            .enumerate()
            .map(|(i, v)| run_interview(sc, v, i, budget, policy, mode))
            .collect::<Result<Vec<_>, _>>()
    };
    if jobs == 0 {
        run_all()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| SimulatorError::ThreadPool(e.to_string()))?
            .install(run_all)
    }
}

/// One transcript per line, in vignette order.
pub fn write_transcripts<W: Write>(
    transcripts: &[InterviewTranscript],
    mut w: W,
) -> std::io::Result<()> {
    for t in transcripts {
        serde_json::to_writer(&mut w, t)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_transcripts<R: BufRead>(reader: R) -> Result<Vec<InterviewTranscript>, SimulatorError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let t: InterviewTranscript =
            serde_json::from_str(&line).map_err(|e| SimulatorError::MalformedTranscript {
                line: idx + 1,
                reason: e.to_string(),
            })?;
        out.push(t);
    }
    Ok(out)
}
