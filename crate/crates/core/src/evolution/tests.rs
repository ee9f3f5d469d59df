use std::path::Path;

use proptest::prelude::*;

use super::*;
use crate::annotations::{Annotation, AnnotationKind, Origin};
use crate::extract::{extract_api, SourceTree};
use crate::json::Document;
use crate::model::ApiModel;

fn minilearn(version_dir: &str, version: &str) -> ApiModel {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/evolution").join(version_dir).join("minilearn");
    let (tree, _) = SourceTree::discover(root, None, &[], &[]).unwrap();
    extract_api(&tree, version).unwrap().0
}

fn annotations_v1() -> AnnotationSet {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/evolution/annotations_v1.json");
    AnnotationSet::read_from(&path).unwrap()
}

#[test]
fn identical_models_have_an_empty_diff() {
    let old = minilearn("v1", "1.0");
    let diff = diff_api(&old, &old).unwrap();
    assert!(diff.is_empty(), "{diff:?}");
}

#[test]
fn diff_lists_element_and_signature_changes() {
    let diff = diff_api(&minilearn("v1", "1.0"), &minilearn("v2", "1.1")).unwrap();
    assert_eq!(
        diff.added,
        [
            "minilearn._utils",
            "minilearn._utils.deprecated",
            "minilearn.metrics.d2_score",
            "minilearn.models.Ridge2",
            "minilearn.models.Ridge2.__init__",
            "minilearn.models.Ridge2.fit",
            "minilearn.models.Ridge2.predict",
        ]
    );
    assert_eq!(diff.removed, ["minilearn.models.OldRegressor", "minilearn.models.OldRegressor.__init__"]);
    let changed: Vec<(&str, Vec<&str>)> =
        diff.signature_changed.iter().map(|c| (c.qname.as_str(), c.added_params().collect())).collect();
    assert_eq!(
        changed,
        [("minilearn.models.Lasso.__init__", vec!["selection"]), ("minilearn.models.Ridge.__init__", vec!["positive"])]
    );
    let facts: Vec<(&str, Option<&str>)> =
        diff.deprecated.iter().map(|f| (f.target.as_str(), f.replacement.as_deref())).collect();
    assert_eq!(
        facts,
        [
            ("minilearn.metrics.r2", Some("d2_score")),
            ("minilearn.models.Ridge", Some("minilearn.models.Ridge2")),
            ("minilearn.models.Ridge.__init__#normalize", None),
        ]
    );
    assert!(diff.deprecated.iter().all(|f| f.since_version == "1.1" && f.removal_version.as_deref() == Some("1.3")));
}

#[test]
fn mismatched_libraries_are_rejected() {
    let old = minilearn("v1", "1.0");
    let toy = {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/toylearn/toylearn");
        let (tree, _) = SourceTree::discover(root, None, &[], &[]).unwrap();
        extract_api(&tree, "1.0").unwrap().0
    };
    assert!(diff_api(&old, &toy).is_err());
}

#[test]
fn migration_keeps_retargets_and_reports_conflicts() {
    let (old, new) = (minilearn("v1", "1.0"), minilearn("v2", "1.1"));
    let diff = diff_api(&old, &new).unwrap();
    let input = annotations_v1();
    let outcome = migrate_annotations(&input, &diff, &old, &new).unwrap();
    assert!(outcome.validation.is_ok(), "{:?}", outcome.validation);
    assert_eq!(outcome.set.library_version, "1.1");

    let targets: Vec<(&str, AnnotationKind, bool)> =
        outcome.set.annotations.iter().map(|a| (a.target.as_str(), a.kind(), a.needs_review)).collect();
    assert_eq!(
        targets,
        [
            ("minilearn.metrics.d2_score", AnnotationKind::Move, true),
            ("minilearn.models.Lasso.__init__#copy_X", AnnotationKind::Remove, false),
            ("minilearn.models.LinearSVC.__init__#loss", AnnotationKind::Enum, false),
            ("minilearn.models.Ridge.__init__#normalize", AnnotationKind::Remove, false),
            ("minilearn.models.Ridge2.__init__#fit_intercept", AnnotationKind::Attribute, true),
            ("minilearn.models.Ridge2.predict", AnnotationKind::Remove, true),
        ]
    );
    assert_eq!(outcome.report.conflicts.len(), 1);
    assert_eq!(outcome.report.conflicts[0].annotation.target, "minilearn.models.OldRegressor");
    assert_eq!(outcome.set.len() + outcome.report.conflicts.len(), input.len());
    assert!(outcome
        .report
        .warnings
        .iter()
        .any(|w| w.target == "minilearn.models.Ridge.__init__#normalize" && w.message.contains("without a replacement")));
    assert_eq!(
        outcome.report.unannotated_additions,
        [
            "minilearn.models.Lasso.__init__#selection",
            "minilearn.models.Ridge.__init__#positive",
            "minilearn.models.Ridge2",
            "minilearn.models.Ridge2.__init__",
            "minilearn.models.Ridge2.fit",
        ]
    );
}

#[test]
fn migration_document_round_trips() {
    let (old, new) = (minilearn("v1", "1.0"), minilearn("v2", "1.1"));
    let diff = diff_api(&old, &new).unwrap();
    let outcome = migrate_annotations(&annotations_v1(), &diff, &old, &new).unwrap();
    let doc = MigrationDocument { diff, annotations: Some(outcome.set), report: Some(outcome.report) };
    let text = doc.to_json();
    assert_eq!(MigrationDocument::from_json(&text).unwrap(), doc);
    assert_eq!(MigrationDocument::from_json(&text).unwrap().to_json(), text);
}

#[test]
fn annotations_for_another_version_are_rejected() {
    let (old, new) = (minilearn("v1", "1.0"), minilearn("v2", "1.1"));
    let diff = diff_api(&old, &new).unwrap();
    let mut set = annotations_v1();
    set.library_version = "0.9".into();
    assert!(migrate_annotations(&set, &diff, &old, &new).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // Against an empty diff, any valid subset migrates unchanged.
    #[test]
    fn empty_diff_is_identity(mask in prop::collection::vec(any::<bool>(), 7)) {
        let old = minilearn("v1", "1.0");
        let diff = diff_api(&old, &old).unwrap();
        let mut set = annotations_v1();
        set.annotations = set.annotations.into_iter().zip(&mask).filter(|(_, keep)| **keep).map(|(a, _)| a).collect();
        let outcome = migrate_annotations(&set, &diff, &old, &old).unwrap();
        let mut expected = set.clone();
        expected.canonicalize();
        prop_assert_eq!(outcome.set, expected);
        prop_assert!(outcome.report.conflicts.is_empty());
        prop_assert!(outcome.report.warnings.is_empty());
    }

    // Every input annotation lands in the output or in the conflicts.
    #[test]
    fn migration_accounts_for_every_annotation(mask in prop::collection::vec(any::<bool>(), 7), review in any::<bool>()) {
        let (old, new) = (minilearn("v1", "1.0"), minilearn("v2", "1.1"));
        let diff = diff_api(&old, &new).unwrap();
        let mut set = annotations_v1();
        set.annotations = set.annotations.into_iter().zip(&mask).filter(|(_, keep)| **keep).map(|(mut a, _)| {
            a.needs_review = review;
            a
        }).collect();
        set.push(Annotation::remove("minilearn.models.Nope", Origin::Manual, None));
        let outcome = migrate_annotations(&set, &diff, &old, &new).unwrap();
        prop_assert_eq!(outcome.set.len() + outcome.report.conflicts.len(), set.len());
        prop_assert!(outcome.validation.is_ok());
    }
}
