mod common;

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slimapi_core::annotations::{
    Annotation, AnnotationSet, Directive, EnumMember, EnumSpec, GroupSpec, GroupVariant, Origin,
};
use slimapi_core::model::LiteralValue;

use common::{extract, fixtures, generate, python_recorded, random_cases, run_cases};

fn assert_identity(fixture_dir: &str, library: &str, seed: u64) {
    let model = extract(Path::new(fixture_dir).join(library).to_str().unwrap(), "1.0");
    let pkg = generate(&model, &AnnotationSet::empty_for(&model));
    let cases = random_cases(&model, 60, &mut ChaCha8Rng::seed_from_u64(seed));
    let outcomes = run_cases(&fixtures().join(fixture_dir), pkg.path(), library, &format!("{library}_adapted"), &cases);
    for (case, o) in cases.iter().zip(&outcomes) {
        assert_eq!(o.direct, o.wrapped, "case {case}");
    }
    assert!(outcomes.iter().any(|o| o.direct["outcome"] == "ok"));
}

#[test]
fn identity_wrapping_preserves_calls_minilearn() {
    assert_identity("", "minilearn", 1);
}

#[test]
fn identity_wrapping_preserves_calls_toylearn() {
    assert_identity("toylearn", "toylearn", 2);
}

#[test]
fn removal_attribute_group_and_enum_forwarding() {
    let model = extract("toylearn/toylearn", "1.0");
    let mut set = AnnotationSet::empty_for(&model);
    set.push(Annotation::remove("toylearn.linear_model.Lasso.__init__#copy_X", Origin::Auto, Some(LiteralValue::bool(true))));
    set.push(Annotation::remove("toylearn.linear_model.Lasso.__init__#warm_start", Origin::Auto, None));
    set.push(Annotation::new(
        "toylearn.svm.SVC.__init__#verbose",
        Origin::Manual,
        Directive::Attribute { default_override: None },
    ));
    set.push(Annotation::new(
        "toylearn.svm.SVC.__init__",
        Origin::Manual,
        Directive::Group(GroupSpec {
            group_name: "Kernel".into(),
            discriminator_param: "kernel".into(),
            variants: vec![
                GroupVariant { variant_name: "linear".into(), discriminator_value: "linear".into(), member_params: vec![] },
                GroupVariant { variant_name: "poly".into(), discriminator_value: "poly".into(), member_params: vec!["degree".into()] },
            ],
        }),
    ));
    set.push(Annotation::new(
        "toylearn.tree.DecisionTreeClassifier.__init__#criterion",
        Origin::Manual,
        Directive::Enum(EnumSpec {
            enum_name: "Criterion".into(),
            members: vec![
                EnumMember { member_name: "GINI".into(), string_value: "gini".into() },
                EnumMember { member_name: "ENTROPY".into(), string_value: "entropy".into() },
            ],
        }),
    ));
    let pkg = generate(&model, &set);
    let script = r#"
import inspect
from toylearn_adapted import SVC, DecisionTreeClassifier
from toylearn_adapted.svm import Kernel
from toylearn_adapted.tree import Criterion
from toylearn_adapted.linear_model import Lasso

def last(name):
    return [r for r in LOG if r[0] == name][-1][1]

lasso = Lasso(0.5).fit([[1]], [1])
assert 'copy_X' not in inspect.signature(Lasso).parameters
rec = last('toylearn.linear_model.Lasso.__init__')
assert rec['copy_X'] == 'True' and rec['alpha'] == '0.5' and rec['warm_start'] == 'False', rec

svc = SVC(Kernel.poly(degree=4))
assert not LOG or LOG[-1][0] != 'toylearn.svm.SVC.__init__'
svc.verbose = True
svc.fit([[0]], [0])
rec = last('toylearn.svm.SVC.__init__')
assert (rec['kernel'], rec['degree'], rec['verbose']) == ("'poly'", '4', 'True'), rec
svc.verbose = False
assert svc._instance().verbose is False and svc.verbose is False

SVC(Kernel.linear, C=2.0).predict([[0]])
rec = last('toylearn.svm.SVC.__init__')
assert (rec['kernel'], rec['degree'], rec['C']) == ("'linear'", '3', '2.0'), rec
for bad in ('linear', None.__class__):
    try:
        SVC(bad)
    except TypeError:
        pass
    else:
        raise AssertionError(bad)
try:
    Kernel.linear(degree=3)
except TypeError:
    pass
else:
    raise AssertionError('linear takes no members')

DecisionTreeClassifier(Criterion.ENTROPY).fit([[0]], [0])
assert last('toylearn.tree.DecisionTreeClassifier.__init__')['criterion'] == "'entropy'"
DecisionTreeClassifier().fit([[0]], [0])
assert last('toylearn.tree.DecisionTreeClassifier.__init__')['criterion'] == "'gini'"
try:
    DecisionTreeClassifier('gini').fit([[0]], [0])
except TypeError:
    pass
else:
    raise AssertionError('raw strings are rejected')
print('ok')
"#;
    let out = python_recorded(&fixtures().join("toylearn"), pkg.path(), "toylearn", script);
    assert_eq!(out.trim(), "ok");
}
