mod common;

use slimapi_core::annotations::AnnotationSet;
use slimapi_core::evolution::{diff_api, migrate_annotations};
use slimapi_core::json::Document;

use common::{deprecation_mismatches, extract, fixtures};

#[test]
fn deprecations_match_the_labeled_table() {
    let (rows, mismatches) = deprecation_mismatches();
    assert_eq!(rows, 19);
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}

#[test]
fn migrated_set_generates_against_the_new_version() {
    let old = extract("evolution/v1/minilearn", "1.0");
    let new = extract("evolution/v2/minilearn", "1.1");
    let set = AnnotationSet::read_from(&fixtures().join("evolution/annotations_v1.json")).unwrap();
    let diff = diff_api(&old, &new).unwrap();
    let outcome = migrate_annotations(&set, &diff, &old, &new).unwrap();
    assert_eq!(outcome.set.len(), 6);
    assert_eq!(outcome.report.conflicts.len(), 1);
    let pkg = common::generate(&new, &outcome.set);
    let out = common::python(
        &[&fixtures().join("evolution/v2"), pkg.path()],
        &["-c", "from minilearn_adapted.models import Ridge, Ridge2, LinearSVC, Loss\n\
                 import inspect\n\
                 assert 'normalize' not in inspect.signature(Ridge).parameters\n\
                 assert not hasattr(Ridge2, 'predict')\n\
                 LinearSVC(loss=Loss.HINGE).fit([[0]], [0])\n\
                 print('ok')"],
    );
    assert_eq!(out.trim(), "ok");
}
