//! Adapter that drives an external symptom checker over newline-delimited
//! JSON on stdin/stdout, so checkers written in any runtime can plug into
//! the harness.
//!
//! Wire protocol, one JSON object per line:
//!
//! ```text
//! harness -> checker  {"type":"init","demographics":{"age":34,"sex":"female"},"chief_complaint":"joint_pain"}
//! checker -> harness  {"type":"ask","symptom":"fever"}
//! harness -> checker  {"type":"answer","value":"present"}
//! checker -> harness  {"type":"predict","ranked":["ORPHA:117","OMIM:126200"]}
//! harness -> checker  {"type":"finish"}          (budget exhausted; checker must predict)
//! ```
//!
//! `chief_complaint` is `null` when the vignette has no present symptoms.
//! After `predict` the next interview begins with a fresh `init`; the
//! checker must treat every `init` as an independent patient. One child
//! process serves all interviews, so this adapter reports itself as not
//! parallel-safe and the harness runs it sequentially in vignette order.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::annotations::DiseaseId;
use crate::generator::{Answer, Demographics};
use crate::mapping::SymptomId;

use super::{InterviewSession, ScAction, SimulatorError, SymptomChecker};

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum HarnessMsg<'a> {
    Init {
        demographics: &'a Demographics,
        chief_complaint: Option<&'a SymptomId>,
    },
    Answer {
        value: Answer,
    },
    Finish,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum CheckerMsg {
    Ask { symptom: SymptomId },
    Predict { ranked: Vec<DiseaseId> },
}

struct ChildIo {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl ChildIo {
    fn send(&mut self, msg: &HarnessMsg<'_>) -> Result<(), SimulatorError> {
        let line = serde_json::to_string(msg)
            .map_err(|e| SimulatorError::Checker(format!("encoding message: {e}")))?;
        self.stdin
            .write_all(line.as_bytes())
            .and_then(|_| self.stdin.write_all(b"\n"))
            .and_then(|_| self.stdin.flush())
            .map_err(|e| SimulatorError::Checker(format!("writing to checker: {e}")))
    }

    fn receive(&mut self) -> Result<ScAction, SimulatorError> {
        let mut line = String::new();
        let n = self
            .stdout
            .read_line(&mut line)
            .map_err(|e| SimulatorError::Checker(format!("reading from checker: {e}")))?;
        if n == 0 {
            return Err(SimulatorError::Checker(
                "checker closed its output stream".to_string(),
            ));
        }
        let msg: CheckerMsg = serde_json::from_str(line.trim())
            .map_err(|e| SimulatorError::Checker(format!("invalid checker message {line:?}: {e}")))?;
        Ok(match msg {
            CheckerMsg::Ask { symptom } => ScAction::Ask(symptom),
            CheckerMsg::Predict { ranked } => ScAction::Predict(ranked),
        })
    }
}

/// A symptom checker running as a child process.
pub struct SubprocessChecker {
    name: String,
    io: Mutex<ChildIo>,
}

impl SubprocessChecker {
    /// Spawn `program` with `args`. The child stays alive for the whole
    /// run and is killed on drop.
    pub fn spawn(program: &str, args: &[String]) -> Result<Self, SimulatorError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| SimulatorError::Checker(format!("spawning {program:?}: {e}")))?;
        let stdin = child
            .stdin
            .take()
            .ok_or_else(|| SimulatorError::Checker("no stdin pipe".to_string()))?;
        let stdout = child
            .stdout
            .take()
            .ok_or_else(|| SimulatorError::Checker("no stdout pipe".to_string()))?;
        Ok(Self {
            name: program.to_string(),
            io: Mutex::new(ChildIo {
                child,
                stdin,
                stdout: BufReader::new(stdout),
            }),
        })
    }
}

impl Drop for SubprocessChecker {
    fn drop(&mut self) {
        if let Ok(io) = self.io.get_mut() {
            let _ = io.child.kill();
            let _ = io.child.wait();
        }
    }
}

struct SubprocessSession<'a> {
    io: std::sync::MutexGuard<'a, ChildIo>,
}

impl InterviewSession for SubprocessSession<'_> {
    fn step(&mut self, answer: Option<Answer>) -> Result<ScAction, SimulatorError> {
        if let Some(value) = answer {
            self.io.send(&HarnessMsg::Answer { value })?;
        }
        self.io.receive()
    }

    fn finish(&mut self) -> Result<ScAction, SimulatorError> {
        self.io.send(&HarnessMsg::Finish)?;
        self.io.receive()
    }
}

impl SymptomChecker for SubprocessChecker {
    fn name(&self) -> &str {
        &self.name
    }

    fn begin(
        &self,
        demographics: &Demographics,
        chief_complaint: Option<&SymptomId>,
    ) -> Result<Box<dyn InterviewSession + '_>, SimulatorError> {
        let mut io = self
            .io
            .lock()
            .map_err(|_| SimulatorError::Checker("checker mutex poisoned".to_string()))?;
        io.send(&HarnessMsg::Init {
            demographics,
            chief_complaint,
        })?;
        Ok(Box::new(SubprocessSession { io }))
    }

    /// One child process cannot run overlapping interviews.
    fn parallel_safe(&self) -> bool {
        false
    }
}
