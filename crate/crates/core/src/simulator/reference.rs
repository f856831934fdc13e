//! A reference symptom-checker so the evaluation pipeline can run
//! end-to-end without a production engine. Not a clinically meaningful
//! diagnostic tool.
//!
//! Scoring is naive-Bayes over the knowledge base: `log prior(d) + Σ log
//! L(s|d)` for present symptoms and `Σ log(1 − L(s|d))` for absent ones;
//! `unknown` answers contribute nothing. Question selection greedily picks
//! the symptom with maximal expected entropy reduction over the current
//! posterior and stops once the best gain drops below a threshold. Ties in
//! both ranking and question choice break toward the lexicographically
//! smaller id, so results never depend on knowledge-base row order.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use thiserror::Error;

use crate::annotations::DiseaseId;
use crate::generator::{Answer, Demographics};
use crate::mapping::{SymptomCatalog, SymptomId};

use super::{InterviewSession, ScAction, SimulatorError, SymptomChecker};

const DEFAULT_LIKELIHOOD: f64 = 0.01;
const DEFAULT_STOP_GAIN: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum KbError {
    #[error("line {line}: likelihood row references unknown disease {id}")]
    UnknownDisease { line: usize, id: DiseaseId },
    #[error("line {line}: unknown symptom code {code:?}")]
    UnknownSymptom { line: usize, code: String },
    #[error("line {line}: prior {value:?} must be a positive number")]
    InvalidPrior { line: usize, value: String },
    #[error("line {line}: likelihood {value:?} must lie strictly between 0 and 1")]
    InvalidLikelihood { line: usize, value: String },
    #[error("line {line}: duplicate row")]
    DuplicateRow { line: usize },
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("knowledge base has no diseases")]
    Empty,
    #[error("i/o error reading knowledge base")]
    Io(#[from] std::io::Error),
}

/// Priors and per-(disease, symptom) likelihoods backing the reference
/// engine. Immutable after load.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceKb {
    priors: BTreeMap<DiseaseId, f64>,
    likelihoods: BTreeMap<(DiseaseId, SymptomId), f64>,
    /// Symptoms the engine may ask about: every symptom with at least one
    /// likelihood row.
    symptoms: BTreeSet<SymptomId>,
    pub default_likelihood: f64,
    pub version: String,
}

impl ReferenceKb {
    /// Load from the two TSVs: priors (`disease_id  prior`, with optional
    /// `# version:` / `# default-likelihood:` headers) and likelihoods
    /// (`disease_id  symptom_code  likelihood`). Rows referencing diseases
    /// absent from the prior table or symptoms absent from the catalog are
    /// rejected.
    pub fn load<R1: BufRead, R2: BufRead>(
        priors_reader: R1,
        likelihoods_reader: R2,
        catalog: &SymptomCatalog,
    ) -> Result<Self, KbError> {
        let mut kb = Self {
            priors: BTreeMap::new(),
            likelihoods: BTreeMap::new(),
            symptoms: BTreeSet::new(),
            default_likelihood: DEFAULT_LIKELIHOOD,
            version: String::new(),
        };

        for (idx, line) in priors_reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim_start();
                if let Some(v) = rest.strip_prefix("version:") {
                    kb.version = v.trim().to_string();
                } else if let Some(v) = rest.strip_prefix("default-likelihood:") {
                    let value: f64 = v.trim().parse().map_err(|_| KbError::MalformedRow {
                        line: line_no,
                        reason: format!("bad default-likelihood {v:?}"),
                    })?;
                    if !(value > 0.0 && value < 1.0) {
                        return Err(KbError::InvalidLikelihood {
                            line: line_no,
                            value: v.trim().to_string(),
                        });
                    }
                    kb.default_likelihood = value;
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 {
                return Err(KbError::MalformedRow {
                    line: line_no,
                    reason: format!("expected 2 columns, found {}", cols.len()),
                });
            }
            if cols[0].eq_ignore_ascii_case("disease_id") {
                continue;
            }
            let disease: DiseaseId = cols[0].trim().parse().map_err(|e| KbError::MalformedRow {
                line: line_no,
                reason: format!("{e}"),
            })?;
            let prior: f64 = cols[1].trim().parse().map_err(|_| KbError::InvalidPrior {
                line: line_no,
                value: cols[1].to_string(),
            })?;
            if !(prior > 0.0 && prior.is_finite()) {
                return Err(KbError::InvalidPrior {
                    line: line_no,
                    value: cols[1].to_string(),
                });
            }
            if kb.priors.insert(disease, prior).is_some() {
                return Err(KbError::DuplicateRow { line: line_no });
            }
        }
        if kb.priors.is_empty() {
            return Err(KbError::Empty);
        }

        for (idx, line) in likelihoods_reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(KbError::MalformedRow {
                    line: line_no,
                    reason: format!("expected 3 columns, found {}", cols.len()),
                });
            }
            if cols[0].eq_ignore_ascii_case("disease_id") {
                continue;
            }
            let disease: DiseaseId = cols[0].trim().parse().map_err(|e| KbError::MalformedRow {
                line: line_no,
                reason: format!("{e}"),
            })?;
            if !kb.priors.contains_key(&disease) {
                return Err(KbError::UnknownDisease {
                    line: line_no,
                    id: disease,
                });
            }
            let symptom = SymptomId::new(cols[1].trim()).map_err(|e| KbError::MalformedRow {
                line: line_no,
                reason: e.to_string(),
            })?;
            if !catalog.contains(&symptom) {
                return Err(KbError::UnknownSymptom {
                    line: line_no,
                    code: symptom.code().to_string(),
                });
            }
            let value: f64 = cols[2].trim().parse().map_err(|_| KbError::InvalidLikelihood {
                line: line_no,
                value: cols[2].to_string(),
            })?;
            if !(value > 0.0 && value < 1.0) {
                return Err(KbError::InvalidLikelihood {
                    line: line_no,
                    value: cols[2].to_string(),
                });
            }
            if kb
                .likelihoods
                .insert((disease, symptom.clone()), value)
                .is_some()
            {
                return Err(KbError::DuplicateRow { line: line_no });
            }
            kb.symptoms.insert(symptom);
        }

        Ok(kb)
    }

    pub fn diseases(&self) -> impl Iterator<Item = &DiseaseId> {
        self.priors.keys()
    }
}

/// The reference checker: one immutable knowledge base compiled into dense
/// arrays, cheap per-interview sessions, fully deterministic.
pub struct ReferenceEngine {
    kb: ReferenceKb,
    stop_gain: f64,
    // dense views, index-aligned with the sorted disease/symptom lists
    diseases: Vec<DiseaseId>,
    symptoms: Vec<SymptomId>,
    symptom_index: BTreeMap<SymptomId, usize>,
    log_priors: Vec<f64>,
    /// Row-major likelihood matrix, `[disease][symptom]`, defaults filled in.
    likelihood: Vec<f64>,
}

impl ReferenceEngine {
    pub fn new(kb: ReferenceKb) -> Self {
        let diseases: Vec<DiseaseId> = kb.priors.keys().cloned().collect();
        let symptoms: Vec<SymptomId> = kb.symptoms.iter().cloned().collect();
        let symptom_index: BTreeMap<SymptomId, usize> = symptoms
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let log_priors: Vec<f64> = diseases.iter().map(|d| kb.priors[d].ln()).collect();
        let mut likelihood = vec![kb.default_likelihood; diseases.len() * symptoms.len()];
        for ((d, s), value) in &kb.likelihoods {
            let di = diseases.binary_search(d).expect("disease indexed");
            let si = symptom_index[s];
            likelihood[di * symptoms.len() + si] = *value;
        }
        Self {
            kb,
            stop_gain: DEFAULT_STOP_GAIN,
            diseases,
            symptoms,
            symptom_index,
            log_priors,
            likelihood,
        }
    }

    pub fn with_stop_gain(mut self, stop_gain: f64) -> Self {
        self.stop_gain = stop_gain;
        self
    }

    pub fn kb(&self) -> &ReferenceKb {
        &self.kb
    }

    fn row(&self, symptom_idx: usize) -> impl Iterator<Item = f64> + '_ {
        let n_s = self.symptoms.len();
        (0..self.diseases.len()).map(move |di| self.likelihood[di * n_s + symptom_idx])
    }
}

impl SymptomChecker for ReferenceEngine {
    fn name(&self) -> &str {
        "reference"
    }

    fn begin(
        &self,
        _demographics: &Demographics,
        chief_complaint: Option<&SymptomId>,
    ) -> Result<Box<dyn InterviewSession + '_>, SimulatorError> {
        let mut session = ReferenceSession {
            engine: self,
            scores: self.log_priors.clone(),
            answered: vec![false; self.symptoms.len()],
            pending: None,
        };
        if let Some(s) = chief_complaint {
            session.apply(s, Answer::Present);
        }
        Ok(Box::new(session))
    }
}

struct ReferenceSession<'a> {
    engine: &'a ReferenceEngine,
    scores: Vec<f64>,
    answered: Vec<bool>,
    pending: Option<usize>,
}

impl ReferenceSession<'_> {
    /// Fold one answer into the scores. Symptoms outside the knowledge base
    /// shift every score equally, which changes nothing downstream, so they
    /// are skipped.
    fn apply(&mut self, symptom: &SymptomId, answer: Answer) {
        let Some(&si) = self.engine.symptom_index.get(symptom) else {
            return;
        };
        self.apply_idx(si, answer);
    }

    fn apply_idx(&mut self, symptom_idx: usize, answer: Answer) {
        for (score, l) in self.scores.iter_mut().zip(self.engine.row(symptom_idx)) {
            match answer {
                Answer::Present => *score += l.ln(),
                Answer::Absent => *score += (1.0 - l).ln(),
                Answer::Unknown => {}
            }
        }
        self.answered[symptom_idx] = true;
    }

    fn posterior(&self) -> Vec<f64> {
        let max = self.scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut p: Vec<f64> = self.scores.iter().map(|s| (s - max).exp()).collect();
        let total: f64 = p.iter().sum();
        for v in &mut p {
            *v /= total;
        }
        p
    }

    /// Best (gain, symptom index) over the unanswered knowledge-base
    /// symptoms. Iterating the sorted symptom list with a strict comparison
    /// makes the lexicographically smaller symptom win ties.
    fn best_question(&self) -> Option<(f64, usize)> {
        let posterior = self.posterior();
        let h_current = entropy(&posterior);
        let mut best: Option<(f64, usize)> = None;
        let mut w_present = vec![0.0; posterior.len()];
        let mut w_absent = vec![0.0; posterior.len()];
        for si in 0..self.engine.symptoms.len() {
            if self.answered[si] {
                continue;
            }
            for (di, l) in self.engine.row(si).enumerate() {
                w_present[di] = posterior[di] * l;
                w_absent[di] = posterior[di] * (1.0 - l);
            }
            let p_present: f64 = w_present.iter().sum();
            let expected = p_present * entropy_unnormalized(&w_present)
                + (1.0 - p_present) * entropy_unnormalized(&w_absent);
            let gain = h_current - expected;
            if best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, si));
            }
        }
        best
    }

    fn ranking(&self) -> Vec<DiseaseId> {
        let mut order: Vec<usize> = (0..self.engine.diseases.len()).collect();
        // stable sort over the id-ordered list keeps ties in id order
        order.sort_by(|&a, &b| {
            self.scores[b]
                .partial_cmp(&self.scores[a])
                .expect("scores are finite")
        });
        order
            .into_iter()
            .map(|i| self.engine.diseases[i].clone())
            .collect()
    }
}

impl InterviewSession for ReferenceSession<'_> {
    fn step(&mut self, answer: Option<Answer>) -> Result<ScAction, SimulatorError> {
        if let Some(asked) = self.pending.take() {
            let answer = answer.ok_or_else(|| {
                SimulatorError::Checker(
                    "harness stepped past a question without an answer".to_string(),
                )
            })?;
            self.apply_idx(asked, answer);
        }
        match self.best_question() {
            Some((gain, si)) if gain > self.engine.stop_gain => {
                self.pending = Some(si);
                Ok(ScAction::Ask(self.engine.symptoms[si].clone()))
            }
            _ => Ok(ScAction::Predict(self.ranking())),
        }
    }

    fn finish(&mut self) -> Result<ScAction, SimulatorError> {
        Ok(ScAction::Predict(self.ranking()))
    }
}

fn entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

/// Entropy of weights after normalization: ln W − (Σ w ln w) / W.
fn entropy_unnormalized(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let sum_wlnw: f64 = weights
        .iter()
        .filter(|w| **w > 0.0)
        .map(|w| w * w.ln())
        .sum();
    total.ln() - sum_wlnw / total
}
