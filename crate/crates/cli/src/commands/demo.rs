//! `scsim demo`: the full A/B story from checked-in fixtures. Generate a
//! dataset (8 rare diseases x 100 vignettes + 20 common diseases x 50),
//! simulate the v1 and v2 knowledge bases (v2 boosts one disease's prior),
//! compare, and report. Inputs are materialized under `<out>/inputs/` so
//! every stage can be re-run by hand afterwards.

use std::path::Path;

use scsim_core::simulator::ViolationMode;

use crate::commands::{compare, generate, simulate};
use crate::config::RunConfig;
use crate::report::CompareDocument;
use crate::CliError;

/// The disease whose prior the v2 knowledge base multiplies by ten.
pub const BOOSTED_DISEASE: &str = "OMIM:168600";

const INPUT_FILES: [(&str, &str); 10] = [
    ("run.toml", include_str!("../../fixtures/demo/run.toml")),
    ("catalog.tsv", include_str!("../../fixtures/demo/catalog.tsv")),
    ("annotations.hpoa", include_str!("../../fixtures/demo/annotations.hpoa")),
    ("mapping.tsv", include_str!("../../fixtures/demo/mapping.tsv")),
    ("demographics.tsv", include_str!("../../fixtures/demo/demographics.tsv")),
    (
        "common_profiles.tsv",
        include_str!("../../fixtures/demo/common_profiles.tsv"),
    ),
    ("kb_v1/priors.tsv", include_str!("../../fixtures/demo/kb_v1/priors.tsv")),
    (
        "kb_v1/likelihoods.tsv",
        include_str!("../../fixtures/demo/kb_v1/likelihoods.tsv"),
    ),
    ("kb_v2/priors.tsv", include_str!("../../fixtures/demo/kb_v2/priors.tsv")),
    (
        "kb_v2/likelihoods.tsv",
        include_str!("../../fixtures/demo/kb_v2/likelihoods.tsv"),
    ),
];

pub fn run(out_dir: &Path, seed: Option<u64>) -> Result<CompareDocument, CliError> {
    let inputs_dir = out_dir.join("inputs");
    std::fs::create_dir_all(inputs_dir.join("kb_v1"))
        .and_then(|_| std::fs::create_dir_all(inputs_dir.join("kb_v2")))
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", inputs_dir.display())))?;
    for (name, content) in INPUT_FILES {
        std::fs::write(inputs_dir.join(name), content)
            .map_err(|e| CliError::Io(format!("writing demo input {name}: {e}")))?;
    }

    let mut config = RunConfig::load(&inputs_dir.join("run.toml"))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    config.validate()?;

    let dataset_path = out_dir.join("dataset.jsonl");
    let before_path = out_dir.join("transcripts_v1.jsonl");
    let after_path = out_dir.join("transcripts_v2.jsonl");
    let delta_path = out_dir.join("delta.json");
    let csv_path = out_dir.join("delta.csv");

    println!("== generate ==");
    generate::run(&config, &dataset_path)?;

    println!("== simulate v1 ==");
    let kb_before = config.paths.kb_before.clone().expect("configured");
    simulate::run(
        &config,
        &dataset_path,
        simulate::CheckerSpec::KnowledgeBase(&kb_before),
        &before_path,
        ViolationMode::Warn,
    )?;

    println!("== simulate v2 ==");
    let kb_after = config.paths.kb_after.clone().expect("configured");
    simulate::run(
        &config,
        &dataset_path,
        simulate::CheckerSpec::KnowledgeBase(&kb_after),
        &after_path,
        ViolationMode::Warn,
    )?;

    println!("== compare ==");
    let doc = compare::run(
        &config,
        &dataset_path,
        &before_path,
        &after_path,
        &delta_path,
        Some(&csv_path),
    )?;

    let summary = crate::report::render_summary(&doc, doc.comparison.per_disease.iter().map(|d| d.before.n_true).sum());
    std::fs::write(out_dir.join("summary.txt"), summary).map_err(|e| CliError::Io(e.to_string()))?;

    let boosted: scsim_core::DiseaseId = BOOSTED_DISEASE.parse().expect("valid id");
    if let Some(dc) = doc
        .comparison
        .per_disease
        .iter()
        .find(|dc| dc.before.disease == boosted)
    {
        println!(
            "\nknowledge-base update boosts {BOOSTED_DISEASE}: recall@{} {} -> {} (delta {})",
            doc.comparison.k,
            dc.recall_delta
                .before
                .map(|v| format!("{v:.3}"))
                .unwrap_or_else(|| "n/a".into()),
            dc.recall_delta
                .after
                .map(|v| format!("{v:.3}"))
                .unwrap_or_else(|| "n/a".into()),
            dc.recall_delta
                .delta
                .map(|v| format!("{v:+.3}"))
                .unwrap_or_else(|| "n/a".into()),
        );
    }
    println!("demo artifacts in {}", out_dir.display());
    Ok(doc)
}
