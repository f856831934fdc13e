//! Property tests over the pipeline's core invariants.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use scsim_core::annotations::{parse_frequency, AnnotationError, ParseConfig};
use scsim_core::generator::{
    merge, synth_common, AgeBand, Answer, CommonDiseaseProfile, Dataset, DemographicDistribution,
    Provenance, Response, Vignette,
};
use scsim_core::generator::{Demographics, Sex};
use scsim_core::mapping::{load_mapping, SymptomCatalog, SymptomId};
use scsim_core::simulator::{
    run_interview, AnswerPolicy, InterviewBudget, ReferenceEngine, ReferenceKb, ViolationMode,
};
use scsim_core::DiseaseId;

fn lenient() -> ParseConfig {
    ParseConfig::default()
}

fn strict() -> ParseConfig {
    ParseConfig {
        strict: true,
        ..ParseConfig::default()
    }
}

proptest! {
    // The parser is total: any string either parses or reports an
    // unrecognized-frequency error; it never panics, and lenient mode
    // never fails.
    #[test]
    fn frequency_parser_never_panics(cell in ".{0,40}") {
        let lenient_value = parse_frequency(&cell, &lenient()).unwrap();
        prop_assert!((0.0..=1.0).contains(&lenient_value.probability));
        match parse_frequency(&cell, &strict()) {
            Ok(v) => prop_assert!((0.0..=1.0).contains(&v.probability)),
            Err(AnnotationError::UnrecognizedFrequency { .. }) => {}
            Err(other) => prop_assert!(false, "unexpected error {other}"),
        }
    }

    // Fractions are exact.
    #[test]
    fn fraction_parsing_exact(n in 1u64..=1000, m in 1u64..=1000) {
        prop_assume!(n <= m);
        let v = parse_frequency(&format!("{n}/{m}"), &strict()).unwrap();
        prop_assert!((v.probability - n as f64 / m as f64).abs() < 1e-9);
    }

    // Serializing a loaded mapping and loading it again is the identity.
    #[test]
    fn mapping_serialize_load_identity(
        entries in proptest::collection::btree_map(
            1u32..5000,
            proptest::collection::btree_set(0usize..12, 1..5),
            1..15,
        )
    ) {
        let mut catalog = SymptomCatalog::new("prop");
        for i in 0..12 {
            catalog.insert(SymptomId::new(format!("sym{i}")).unwrap(), format!("Symptom {i}"));
        }
        let mut file = String::new();
        for (hpo, targets) in &entries {
            for t in targets {
                file.push_str(&format!("HP:{hpo:07}\tsym{t}\n"));
            }
        }
        let mapping = load_mapping(file.as_bytes(), &catalog).unwrap();
        let mut out = Vec::new();
        mapping.serialize_tsv(&mut out).unwrap();
        let reloaded = load_mapping(out.as_slice(), &catalog).unwrap();
        prop_assert_eq!(reloaded, mapping);
    }
}

fn arb_disease() -> impl Strategy<Value = DiseaseId> {
    (0u8..3, 1u32..300).prop_map(|(ns, code)| {
        let ns = match ns {
            0 => "ORPHA",
            1 => "OMIM",
            _ => "MONDO",
        };
        format!("{ns}:{code}").parse().unwrap()
    })
}

fn arb_vignette() -> impl Strategy<Value = Vignette> {
    (
        0u32..=120,
        proptest::bool::ANY,
        proptest::collection::btree_map(0usize..20, 0u8..3, 0..8),
        arb_disease(),
        proptest::num::u64::ANY,
    )
        .prop_map(|(age, female, symptoms, d_true, seed_trace)| Vignette {
            demographics: Demographics {
                age_years: age,
                sex: if female { Sex::Female } else { Sex::Male },
            },
            responses: symptoms
                .into_iter()
                .map(|(s, a)| Response {
                    symptom: SymptomId::new(format!("sym{s:02}")).unwrap(),
                    answer: match a {
                        0 => Answer::Present,
                        1 => Answer::Absent,
                        _ => Answer::Unknown,
                    },
                })
                .collect(),
            d_true,
            provenance: Provenance::FeedbackCommon,
            seed_trace,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Datasets survive the JSONL round trip byte-structurally.
    #[test]
    fn dataset_jsonl_round_trip(vignettes in proptest::collection::vec(arb_vignette(), 0..30)) {
        let data = Dataset::new(vignettes, BTreeSet::new()).unwrap();
        let mut bytes = Vec::new();
        data.write_jsonl(&mut bytes).unwrap();
        let reloaded = Dataset::read_jsonl(bytes.as_slice()).unwrap();
        prop_assert_eq!(reloaded, data);
    }

    // Interview invariants hold for any vignette against the reference
    // engine: containment of collected present symptoms, the question
    // budget, and the prediction-size contract.
    #[test]
    fn interview_invariants(
        vignette in arb_vignette(),
        max_questions in 0usize..6,
        top_k in 1usize..10,
    ) {
        let catalog_rows: String = (0..20).map(|i| format!("sym{i:02}\tSymptom {i}\n")).collect();
        let catalog = scsim_core::mapping::load_catalog(catalog_rows.as_bytes()).unwrap();
        let priors = "OMIM:1\t0.4\nOMIM:2\t0.3\nORPHA:3\t0.3\n";
        let likelihoods = "\
OMIM:1\tsym00\t0.8\nOMIM:1\tsym01\t0.6\nOMIM:1\tsym02\t0.3\n\
OMIM:2\tsym01\t0.7\nOMIM:2\tsym03\t0.6\nOMIM:2\tsym04\t0.4\n\
ORPHA:3\tsym00\t0.2\nORPHA:3\tsym04\t0.9\nORPHA:3\tsym05\t0.5\n";
        let kb = ReferenceKb::load(priors.as_bytes(), likelihoods.as_bytes(), &catalog).unwrap();
        let engine = ReferenceEngine::new(kb);
        let budget = InterviewBudget::new(max_questions, top_k).unwrap();
        let transcript = run_interview(
            &engine,
            &vignette,
            0,
            &budget,
            &AnswerPolicy::default(),
            ViolationMode::Error,
        ).unwrap();

        prop_assert!(transcript.contained_in(&vignette));
        prop_assert!(transcript.asked.len() <= max_questions);
        prop_assert!(transcript.prediction.len() <= top_k);
        let unique: BTreeSet<_> = transcript.prediction.iter().collect();
        prop_assert_eq!(unique.len(), transcript.prediction.len());
        prop_assert!(!transcript.prediction.is_empty());
    }

    // Merged datasets keep the partition invariant: rare-set membership of
    // the true cause is equivalent to rare provenance.
    #[test]
    fn merge_preserves_partition(
        n_rare_diseases in 1usize..4,
        n_common in 1usize..4,
        per in 1u32..6,
        seed in proptest::num::u64::ANY,
    ) {
        let band = AgeBand { lo: 10, hi: 80, weight: 1.0 };
        let mk_profile = |id: DiseaseId| {
            let demographics = DemographicDistribution::new(id.clone(), vec![band], 0.5).unwrap();
            CommonDiseaseProfile {
                disease: id,
                symptom_probs: vec![(SymptomId::new("sym00").unwrap(), 0.5)],
                demographics,
            }
        };
        let common: Vec<CommonDiseaseProfile> = (0..n_common)
            .map(|i| mk_profile(format!("MONDO:{}", 1000 + i).parse().unwrap()))
            .collect();
        let (common_data, _) = synth_common(&common, per, seed).unwrap();

        // hand-build a rare arm with matching provenance
        let rare_ids: BTreeSet<DiseaseId> = (0..n_rare_diseases)
            .map(|i| format!("ORPHA:{}", 500 + i).parse::<DiseaseId>().unwrap())
            .collect();
        let rare_vignettes: Vec<Vignette> = rare_ids
            .iter()
            .flat_map(|d| {
                (0..per).map(move |i| Vignette {
                    demographics: Demographics { age_years: 30, sex: Sex::Male },
                    responses: vec![],
                    d_true: d.clone(),
                    provenance: Provenance::SyntheticRare,
                    seed_trace: i as u64,
                })
            })
            .collect();
        let rare_data = Dataset::new(rare_vignettes, rare_ids).unwrap();

        let merged = merge(vec![rare_data, common_data]).unwrap();
        for v in &merged.vignettes {
            prop_assert_eq!(
                merged.rare_diseases.contains(&v.d_true),
                v.provenance == Provenance::SyntheticRare
            );
        }
    }
}

// Statistical soundness at depth: with mapping fan-out and manifestation
// probabilities below one, per-symptom inclusion converges to q * mp.
// Acceptance bounds are exact binomial 99.9% intervals at n = 10000,
// computed independently.
#[test]
fn inclusion_rate_with_manifest_prob() {
    use scsim_core::annotations::parse_hpoa_file;
    use scsim_core::generator::generate_rare;
    use scsim_core::mapping::load_catalog;

    let row = "ORPHA:9\tD\t\tHP:0000001\tPMID:1\tPCS\t\tFrequent\t\t\tP\tx\n";
    let (ann, _) = parse_hpoa_file(row.as_bytes(), &ParseConfig::default()).unwrap();
    let catalog = load_catalog("a\tA\nb\tB\n".as_bytes()).unwrap();
    let mapping = load_mapping("HP:0000001\ta\t0.8\nHP:0000001\tb\n".as_bytes(), &catalog).unwrap();
    let id: DiseaseId = "ORPHA:9".parse().unwrap();
    let dist = DemographicDistribution::new(
        id.clone(),
        vec![AgeBand {
            lo: 0,
            hi: 99,
            weight: 1.0,
        }],
        0.5,
    )
    .unwrap();
    let demo = BTreeMap::from([(id.clone(), dist)]);
    let (data, _) = generate_rare(&ann, &mapping, &demo, &[id], 10_000, 2024).unwrap();

    let count = |code: &str| {
        data.vignettes
            .iter()
            .filter(|v| v.responses.iter().any(|r| r.symptom.code() == code))
            .count()
    };
    // symptom a: q*mp = 0.545*0.8 = 0.436; exact binomial 99.9% in [4197, 4523]
    let a = count("a");
    assert!((4197..=4523).contains(&a), "symptom a count {a}");
    // symptom b: q*mp = 0.545*1.0; exact binomial 99.9% in [5286, 5614]
    let b = count("b");
    assert!((5286..=5614).contains(&b), "symptom b count {b}");
}
