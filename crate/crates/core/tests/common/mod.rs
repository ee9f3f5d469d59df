#![allow(dead_code)]

pub mod oracle;

use std::path::{Path, PathBuf};
use std::process::Command;

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};
use slimapi_core::annotations::AnnotationSet;
use slimapi_core::extract::{extract_api, SourceTree};
use slimapi_core::generate::{infer_adapted_api, render_wrappers};
use slimapi_core::model::{ApiModel, AssignmentKind, Callable, MethodKind};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn support() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/common")
}

/// Extracts the package at `fixtures/<rel>`.
pub fn extract(rel: &str, version: &str) -> ApiModel {
    let (tree, _) = SourceTree::discover(fixtures().join(rel), None, &[], &[]).unwrap();
    extract_api(&tree, version).unwrap().0
}

/// Generates the wrapper package into a fresh directory.
pub fn generate(model: &ApiModel, set: &AnnotationSet) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let adapted = infer_adapted_api(model, set, None).unwrap();
    render_wrappers(&adapted).write_to(dir.path()).unwrap();
    dir
}

/// Runs python3 with the given import roots; panics on failure and returns stdout.
pub fn python(path: &[&Path], args: &[&str]) -> String {
    let joined = std::env::join_paths(path).unwrap();
    let out = Command::new("python3")
        .args(args)
        .env("PYTHONPATH", joined)
        .env("PYTHONDONTWRITEBYTECODE", "1")
        .output()
        .expect("python3 must be installed");
    assert!(
        out.status.success(),
        "python failed:\n{}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Runs a snippet with the library patched by the recording stub.
/// The snippet sees `LOG`, the list of `[callable, {param: repr}]` records.
pub fn python_recorded(library_root: &Path, package_dir: &Path, library: &str, body: &str) -> String {
    let script = format!("import recording\nrecording.install({library:?})\nLOG = recording.LOG\n{body}\n");
    python(&[&support(), library_root, package_dir], &["-c", &script])
}

#[derive(Debug)]
pub struct CaseOutcome {
    pub direct: Value,
    pub wrapped: Value,
}

/// Runs call cases directly and through the wrapper package.
pub fn run_cases(library_root: &Path, package_dir: &Path, library: &str, package: &str, cases: &[Value]) -> Vec<CaseOutcome> {
    let file = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(file.path(), serde_json::to_string(cases).unwrap()).unwrap();
    let script = support().join("run_cases.py");
    let out = python(
        &[&support(), library_root, package_dir],
        &[script.to_str().unwrap(), library, package, file.path().to_str().unwrap()],
    );
    let results: Vec<Value> = serde_json::from_str(&out).unwrap();
    results
        .into_iter()
        .map(|r| CaseOutcome { direct: r["direct"].clone(), wrapped: r["wrapped"].clone() })
        .collect()
}

fn random_value(rng: &mut impl Rng) -> Value {
    match rng.gen_range(0..6) {
        0 => json!(rng.gen_range(-5..100)),
        1 => json!(rng.gen_range(-10.0..10.0_f64)),
        2 => json!(["rbf", "gini", "a b", "x'y", ""].choose(rng).unwrap()),
        3 => Value::Null,
        4 => json!(rng.gen_bool(0.5)),
        _ => json!([rng.gen_range(0..5), rng.gen_range(0..5)]),
    }
}

/// A random valid argument assignment for `f` (receiver excluded).
pub fn random_arguments(f: &Callable, rng: &mut impl Rng) -> (Vec<Value>, serde_json::Map<String, Value>) {
    let mut args = Vec::new();
    let mut kwargs = serde_json::Map::new();
    let mut positional_open = true;
    for p in &f.parameters {
        match p.assignment_kind {
            AssignmentKind::PositionalOnly => {
                if positional_open && (p.is_required() || rng.gen_bool(0.6)) {
                    args.push(random_value(rng));
                } else {
                    positional_open = false;
                }
            }
            AssignmentKind::PositionalOrKeyword => {
                let pass = p.is_required() || rng.gen_bool(0.6);
                if pass && positional_open && rng.gen_bool(0.5) {
                    args.push(random_value(rng));
                } else {
                    positional_open = false;
                    if pass {
                        kwargs.insert(p.name.clone(), random_value(rng));
                    }
                }
            }
            AssignmentKind::VarPositional => {
                if positional_open {
                    for _ in 0..rng.gen_range(0..3) {
                        args.push(random_value(rng));
                    }
                }
            }
            AssignmentKind::KeywordOnly => {
                if p.is_required() || rng.gen_bool(0.6) {
                    kwargs.insert(p.name.clone(), random_value(rng));
                }
            }
            AssignmentKind::VarKeyword => {
                for i in 0..rng.gen_range(0..3) {
                    kwargs.insert(format!("extra_{i}"), random_value(rng));
                }
            }
        }
    }
    (args, kwargs)
}

/// `n` random call cases over every public function and method of `model`.
/// Method cases construct the owner with random constructor arguments first.
pub fn random_cases(model: &ApiModel, n: usize, rng: &mut impl Rng) -> Vec<Value> {
    let public = model.public_view();
    let targets: Vec<(&Callable, Option<&slimapi_core::model::Class>)> = public
        .callables()
        .filter(|(f, _)| !f.is_constructor && f.method_kind() != MethodKind::Property)
        .collect();
    (0..n)
        .map(|_| {
            let (f, class) = *targets.choose(rng).unwrap();
            let (args, kwargs) = random_arguments(f, rng);
            match (class, f.method_kind()) {
                (Some(c), MethodKind::Instance) => {
                    let (ctor_args, ctor_kwargs) = match c.constructor() {
                        Some(ctor) => random_arguments(ctor, rng),
                        None => (Vec::new(), serde_json::Map::new()),
                    };
                    json!({
                        "kind": "method",
                        "owner": c.qname.render(),
                        "name": f.name(),
                        "ctor_args": ctor_args,
                        "ctor_kwargs": ctor_kwargs,
                        "args": args,
                        "kwargs": kwargs,
                    })
                }
                _ => json!({"kind": "call", "callable": f.qname.render(), "args": args, "kwargs": kwargs}),
            }
        })
        .collect()
}

/// Compares extracted deprecations for `fixtures/deprecations` with the
/// hand-labeled table. Returns the number of labeled rows and the mismatches.
pub fn deprecation_mismatches() -> (usize, Vec<String>) {
    use slimapi_core::evolution::extract_deprecations;

    let model = extract("deprecations/depfix", "1.0");
    let facts = extract_deprecations(&model);
    let labeled: Vec<Value> =
        serde_json::from_str(&std::fs::read_to_string(fixtures().join("deprecations/expected.json")).unwrap()).unwrap();
    let mut mismatches = Vec::new();
    for row in &labeled {
        let target = row["target"].as_str().unwrap();
        let Some(f) = facts.iter().find(|f| f.target == target) else {
            mismatches.push(format!("{target}: not extracted"));
            continue;
        };
        let got = json!({
            "target": f.target,
            "rule": f.rule,
            "since_version": f.since_version,
            "removal_version": f.removal_version,
            "replacement": f.replacement,
            "warning": f.warning.is_some(),
        });
        if &got != row {
            mismatches.push(format!("{target}: expected {row}, got {got}"));
        }
    }
    for f in &facts {
        if !labeled.iter().any(|r| r["target"] == f.target.as_str()) {
            mismatches.push(format!("{}: unexpected fact", f.target));
        }
    }
    (labeled.len(), mismatches)
}
