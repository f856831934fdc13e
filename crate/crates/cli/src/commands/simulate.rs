//! `scsim simulate`: replay every vignette of a dataset against a symptom
//! checker: the built-in reference engine (given a knowledge-base
//! directory) or an external process speaking the stdin/stdout protocol.
//! Transcripts are written in vignette order, so the parallelism degree
//! never changes the output bytes.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use scsim_core::simulator::{
    run_dataset, write_transcripts, InterviewBudget, InterviewTranscript, ReferenceEngine,
    SubprocessChecker, SymptomChecker, ViolationMode,
};

use crate::config::RunConfig;
use crate::{inputs, CliError};

pub enum CheckerSpec<'a> {
    KnowledgeBase(&'a Path),
    Command(&'a str),
}

pub fn run(
    config: &RunConfig,
    dataset_path: &Path,
    checker: CheckerSpec<'_>,
    out: &Path,
    mode: ViolationMode,
) -> Result<Vec<InterviewTranscript>, CliError> {
    let dataset = inputs::load_dataset(dataset_path)?;
    let budget = InterviewBudget::new(config.max_questions, config.k)?;
    let policy = config.answer_policy();

    let checker: Box<dyn SymptomChecker> = match checker {
        CheckerSpec::KnowledgeBase(dir) => {
            let catalog = inputs::load_catalog_file(config)?;
            let kb = inputs::load_kb(dir, &catalog)?;
            Box::new(ReferenceEngine::new(kb))
        }
        CheckerSpec::Command(cmd) => {
            let parts: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
            if parts.is_empty() {
                return Err(CliError::Validation("empty checker command".to_string()));
            }
            Box::new(SubprocessChecker::spawn(&parts[0], &parts[1..])?)
        }
    };

    let transcripts = run_dataset(checker.as_ref(), &dataset, &budget, &policy, mode, config.jobs)?;
    let warned = transcripts.iter().filter(|t| !t.warnings.is_empty()).count();
    if warned > 0 {
        eprintln!("warning: {warned} transcripts carry protocol warnings");
    }

    let file = File::create(out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
    write_transcripts(&transcripts, BufWriter::new(file))?;
    println!(
        "simulated {} interviews with {} to {}",
        transcripts.len(),
        checker.name(),
        out.display()
    );
    Ok(transcripts)
}
