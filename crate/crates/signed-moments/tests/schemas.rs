//! Keeps the shipped JSON schemas honest: they must parse, cover every
//! support class the catalog can produce, and declare every key the
//! serialisers actually emit.

use num_rational::BigRational;
use signed_moments::analysis::classify;
use signed_moments::construct::{construct_signed_measure, verify_match, MatchProblem};
use signed_moments::json::{
    AnalysisReportFile, MatchReportFile, MeasureFile, MomentSequenceFile, SupportFile,
    VerifyReportFile,
};
use signed_moments::moments::SignedAtomicMeasure;
use signed_moments::support::{EscapeSpec, GridAxis, Ray, StripAxis, SupportSpec};

type Q = BigRational;

fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn schema(name: &str) -> serde_json::Value {
    let path = format!("{}/../../schemas/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

const ALL_SCHEMAS: [&str; 7] = [
    "value.schema.json",
    "moment-sequence.schema.json",
    "measure.schema.json",
    "support.schema.json",
    "analysis-report.schema.json",
    "match-report.schema.json",
    "verify-report.schema.json",
];

/// Every top-level key of `instance` appears in the schema's `properties`.
/// A shallow check, but enough to catch serialiser/schema drift.
fn assert_keys_declared(instance: &serde_json::Value, schema: &serde_json::Value, ctx: &str) {
    let properties = schema["properties"]
        .as_object()
        .unwrap_or_else(|| panic!("{ctx}: schema has no properties table"));
    for key in instance.as_object().expect("object instance").keys() {
        assert!(
            properties.contains_key(key),
            "{ctx}: emitted key '{key}' missing from schema"
        );
    }
    for required in schema["required"].as_array().into_iter().flatten() {
        let key = required.as_str().unwrap();
        assert!(
            instance.get(key).is_some(),
            "{ctx}: required key '{key}' not emitted"
        );
    }
}

fn catalog() -> Vec<SupportSpec> {
    vec![
        SupportSpec::full_space(2).unwrap(),
        SupportSpec::orthant(3).unwrap(),
        SupportSpec::grid(vec![
            GridAxis { values: vec![qi(0), qi(1)], unbounded: true },
            GridAxis { values: vec![qi(0), qi(2)], unbounded: false },
        ])
        .unwrap(),
        SupportSpec::union_of_rays(
            2,
            vec![Ray { offset: vec![qi(0), qi(1)], direction: vec![qi(1), qi(1)] }],
        )
        .unwrap(),
        SupportSpec::affine_cone(vec![qi(0), qi(0)], vec![vec![qi(1), qi(0)], vec![qi(1), qi(1)]])
            .unwrap(),
        SupportSpec::strip(vec![StripAxis::Interval(qi(0), qi(1)), StripAxis::Free]).unwrap(),
        SupportSpec::bounded_box(vec![(qi(-1), qi(1))]).unwrap(),
        SupportSpec::point_sequence_1d((1..=4).map(qi).collect()).unwrap(),
        SupportSpec::sampled_set(
            1,
            vec![vec![qi(1)], vec![qi(9)], vec![qi(81)]],
            Some(vec![EscapeSpec {
                axis: 1,
                base: vec![],
                values: vec![qi(1), qi(9), qi(81)],
            }]),
        )
        .unwrap(),
    ]
}

#[test]
fn all_schemas_parse_and_identify_themselves() {
    for name in ALL_SCHEMAS {
        let s = schema(name);
        assert_eq!(
            s["$schema"], "http://json-schema.org/draft-07/schema#",
            "{name}"
        );
        assert_eq!(s["$id"], name.to_string(), "{name}");
    }
}

#[test]
fn support_schema_covers_every_catalog_class() {
    let s = schema("support.schema.json");
    let declared: Vec<&str> = s["properties"]["class"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    for spec in catalog() {
        let tag = serde_json::to_value(SupportFile::from_core(&spec)).unwrap()["class"]
            .as_str()
            .unwrap()
            .to_string();
        assert!(
            declared.contains(&tag.as_str()),
            "class '{tag}' missing from schema enum"
        );
        assert_eq!(tag, spec.class_name());
    }
    assert_eq!(declared.len(), 9);
}

#[test]
fn serialised_instances_only_use_declared_keys() {
    let measure = SignedAtomicMeasure::from_atoms(
        2,
        vec![(vec![qi(1), qi(2)], qi(3)), (vec![qi(2), qi(2)], qi(-1))],
    )
    .unwrap();
    let target = measure.moments(2);

    let seq_file = serde_json::to_value(MomentSequenceFile::from_core(&target)).unwrap();
    assert_keys_declared(&seq_file, &schema("moment-sequence.schema.json"), "moments");

    let measure_file = serde_json::to_value(MeasureFile::from_core(&measure)).unwrap();
    assert_keys_declared(&measure_file, &schema("measure.schema.json"), "measure");

    let grid = SupportSpec::grid(vec![
        GridAxis { values: (1..=5).map(qi).collect(), unbounded: false },
        GridAxis { values: (1..=5).map(qi).collect(), unbounded: false },
    ])
    .unwrap();
    let problem = MatchProblem::new(&target, &grid);
    let result = construct_signed_measure(&problem).unwrap();
    let match_file = serde_json::to_value(MatchReportFile::from_core(&result)).unwrap();
    assert_keys_declared(&match_file, &schema("match-report.schema.json"), "match");

    let verdict = verify_match(&measure, &target, Some(&grid)).unwrap();
    let verify_file = serde_json::to_value(VerifyReportFile::from_core(&verdict)).unwrap();
    assert_keys_declared(&verify_file, &schema("verify-report.schema.json"), "verify");

    let strip = SupportSpec::strip(vec![StripAxis::Interval(qi(0), qi(1)), StripAxis::Free])
        .unwrap();
    let report = classify(&strip, 2, 5).unwrap();
    let analysis_file =
        serde_json::to_value(AnalysisReportFile::from_core(&report, &strip)).unwrap();
    assert_keys_declared(
        &analysis_file,
        &schema("analysis-report.schema.json"),
        "analysis",
    );
}

#[test]
fn every_support_class_round_trips_through_its_file_form() {
    for spec in catalog() {
        let file = SupportFile::from_core(&spec);
        let text = serde_json::to_string(&file).unwrap();
        let back: SupportFile = serde_json::from_str(&text).unwrap();
        let spec2 = back.to_core().unwrap();
        assert_eq!(spec.class_name(), spec2.class_name());
        assert_eq!(spec.dimension(), spec2.dimension());
    }
}
