mod common;

use slimapi_core::extract::summarize_surface;
use slimapi_core::model::ApiModel;
use slimapi_core::Document;

use common::extract;

#[test]
fn minilearn_surface_matches_hand_count() {
    let s = summarize_surface(&extract("minilearn", "1.0"));
    assert_eq!((s.modules_total, s.modules_public), (2, 2));
    assert_eq!((s.classes_total, s.classes_public), (3, 3));
    assert_eq!((s.functions_total, s.functions_public), (5, 4));
    assert_eq!((s.params_total, s.params_public), (14, 13));
}

#[test]
fn reexported_names_are_public_through_aliases() {
    let model = extract("reexport/minilearn", "0.1");
    assert!(model.is_public_text("minilearn._impl.Solver").unwrap());
    assert!(model.is_public_text("minilearn._impl.Solver.solve").unwrap());
    assert!(!model.is_public_text("minilearn._internal.check_array").unwrap());
    assert_eq!(model.resolve_text("minilearn.Solver").as_deref(), Some("minilearn._impl.Solver"));
}

#[test]
fn api_json_round_trips_byte_for_byte() {
    let model = extract("toylearn/toylearn", "1.0");
    let text = model.to_json();
    let back = ApiModel::from_json(&text).unwrap();
    assert_eq!(back.to_json(), text);
    let again = extract("toylearn/toylearn", "1.0");
    assert_eq!(again.to_json(), text);
}
