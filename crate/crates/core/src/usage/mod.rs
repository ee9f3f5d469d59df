//! Corpus mining: resolve client call sites against an [`ApiModel`] and
//! aggregate per-element use counts and per-parameter value multisets.

mod bind;
mod corpus;
mod imports;
mod scan;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bind::{bind_arguments, Binding, CallArgument, ParamBinding};
pub use corpus::{notebook_source, Corpus, ManifestEntry, ProgramFile};
pub use imports::{build_import_table, ImportTable};
pub use scan::{scan_program, FileScan};

use crate::error::{Error, Result};
use crate::json::{Document, USAGES_SCHEMA};
use crate::model::ApiModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CallKind {
    Constructor,
    Method,
    Function,
}

/// One resolved call site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageEvent {
    /// Callable text; a class without `__init__` is its own target.
    pub target: String,
    pub kind: CallKind,
    /// Class the call is attributed to (constructors and methods).
    pub class: Option<String>,
    pub file: String,
    pub line: usize,
    pub bindings: BTreeMap<String, ParamBinding>,
    pub opaque: bool,
    pub lint: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassUsage {
    /// Constructor plus method calls.
    pub uses: u64,
    pub constructor_calls: u64,
    pub method_calls: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallableUsage {
    pub uses: u64,
    pub opaque_uses: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterUsage {
    pub explicit_count: u64,
    /// Normalized value text to occurrence count, defaults included.
    pub values: BTreeMap<String, u64>,
}

impl ParameterUsage {
    pub fn occurrences(&self) -> u64 {
        self.values.values().sum()
    }
}

/// Aggregated usage keyed by rendered qualified name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageCounts {
    pub library_name: String,
    pub library_version: String,
    pub classes: BTreeMap<String, ClassUsage>,
    pub callables: BTreeMap<String, CallableUsage>,
    pub parameters: BTreeMap<String, ParameterUsage>,
}

impl UsageCounts {
    pub fn new(library_name: impl Into<String>, library_version: impl Into<String>) -> Self {
        Self { library_name: library_name.into(), library_version: library_version.into(), ..Self::default() }
    }

    pub fn record(&mut self, event: &UsageEvent) {
        let callable = self.callables.entry(event.target.clone()).or_default();
        callable.uses += 1;
        if event.opaque {
            callable.opaque_uses += 1;
        }
        if let Some(class) = &event.class {
            let c = self.classes.entry(class.clone()).or_default();
            c.uses += 1;
            match event.kind {
                CallKind::Constructor => c.constructor_calls += 1,
                CallKind::Method | CallKind::Function => c.method_calls += 1,
            }
        }
        for (name, binding) in &event.bindings {
            let p = self.parameters.entry(format!("{}#{name}", event.target)).or_default();
            if binding.explicit {
                p.explicit_count += 1;
            }
            *p.values.entry(binding.value.text.clone()).or_default() += 1;
        }
    }

    /// Pointwise sum; commutative and associative.
    pub fn merge(&mut self, other: &UsageCounts) {
        for (k, v) in &other.classes {
            let c = self.classes.entry(k.clone()).or_default();
            c.uses += v.uses;
            c.constructor_calls += v.constructor_calls;
            c.method_calls += v.method_calls;
        }
        for (k, v) in &other.callables {
            let c = self.callables.entry(k.clone()).or_default();
            c.uses += v.uses;
            c.opaque_uses += v.opaque_uses;
        }
        for (k, v) in &other.parameters {
            let p = self.parameters.entry(k.clone()).or_default();
            p.explicit_count += v.explicit_count;
            for (value, n) in &v.values {
                *p.values.entry(value.clone()).or_default() += n;
            }
        }
    }

    pub fn class_uses(&self, class: &str) -> u64 {
        self.classes.get(class).map_or(0, |c| c.uses)
    }

    pub fn callable_uses(&self, callable: &str) -> u64 {
        self.callables.get(callable).map_or(0, |c| c.uses)
    }

    pub fn parameter(&self, param: &str) -> Option<&ParameterUsage> {
        self.parameters.get(param)
    }

    pub fn check_model(&self, model: &ApiModel) -> Result<()> {
        if self.library_name != model.library_name() {
            return Err(Error::LibraryMismatch {
                expected: model.library_name().into(),
                found: self.library_name.clone(),
            });
        }
        if self.library_version != model.library_version() {
            return Err(Error::VersionMismatch {
                expected: model.library_version().into(),
                found: self.library_version.clone(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedFile {
    pub file: String,
    pub reason: String,
}

/// A malformed call to a library element (still counted as a use).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintNote {
    pub file: String,
    pub line: usize,
    pub target: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningReport {
    pub files_total: usize,
    pub files_using_library: usize,
    pub files_skipped: usize,
    pub events_total: u64,
    pub opaque_events: u64,
    pub skipped: Vec<SkippedFile>,
    pub lints: Vec<LintNote>,
}

/// The `usages.json` document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageDocument {
    #[serde(flatten)]
    pub counts: UsageCounts,
    pub report: MiningReport,
}

impl Document for UsageDocument {
    const SCHEMA: &'static str = USAGES_SCHEMA;
}

enum FileOutcome {
    Skipped(String),
    Scanned(Vec<UsageEvent>),
}

/// Mines every program of `corpus`. Output is independent of `jobs`.
pub fn mine(corpus: &Corpus, model: &ApiModel, jobs: usize) -> Result<UsageDocument> {
    run_parallel(jobs, corpus.files.len(), model, |i| {
        let file = &corpus.files[i];
        (file.path.clone(), file.load())
    })
}

/// Mines in-memory programs given as `(name, source)` pairs.
pub fn mine_sources(programs: &[(String, String)], model: &ApiModel, jobs: usize) -> Result<UsageDocument> {
    run_parallel(jobs, programs.len(), model, |i| (programs[i].0.clone(), Ok(programs[i].1.clone())))
}

fn run_parallel<F>(jobs: usize, n: usize, model: &ApiModel, load: F) -> Result<UsageDocument>
where
    F: Fn(usize) -> (String, std::result::Result<String, String>) + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Corpus(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<(String, FileOutcome)> = pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let (name, source) = load(i);
                let outcome = match source.and_then(|s| scan_program(&s, &name, model)) {
                    Ok(scan) => FileOutcome::Scanned(scan.events),
                    Err(reason) => FileOutcome::Skipped(reason),
                };
                (name, outcome)
            })
            .collect()
    });

    let mut counts = UsageCounts::new(model.library_name(), model.library_version());
    let mut report = MiningReport { files_total: n, ..MiningReport::default() };
    for (file, outcome) in outcomes {
        match outcome {
            FileOutcome::Skipped(reason) => report.skipped.push(SkippedFile { file, reason }),
            FileOutcome::Scanned(events) => {
                if !events.is_empty() {
                    report.files_using_library += 1;
                }
                for event in &events {
                    counts.record(event);
                    report.events_total += 1;
                    if event.opaque {
                        report.opaque_events += 1;
                    }
                    if let Some(message) = &event.lint {
                        report.lints.push(LintNote {
                            file: event.file.clone(),
                            line: event.line,
                            target: event.target.clone(),
                            message: message.clone(),
                        });
                    }
                }
            }
        }
    }
    report.files_skipped = report.skipped.len();
    Ok(UsageDocument { counts, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        AssignmentKind, Callable, Class, ElementKind, LiteralValue, Module, Parameter, QualifiedName,
    };
    use proptest::prelude::*;

    fn q(text: &str, kind: ElementKind) -> QualifiedName {
        QualifiedName::parse_as(text, kind).unwrap()
    }

    fn param(name: &str, position: usize, default: Option<LiteralValue>) -> Parameter {
        Parameter {
            name: name.into(),
            position,
            assignment_kind: AssignmentKind::PositionalOrKeyword,
            default,
            type_hint_text: None,
        }
    }

    fn method(qname: &str, params: Vec<Parameter>, ctor: bool) -> Callable {
        Callable {
            qname: q(qname, ElementKind::Function),
            parameters: params,
            is_constructor: ctor,
            docstring: None,
            decorators: vec![],
        }
    }

    pub(crate) fn minilearn() -> ApiModel {
        let mut models = Module::new(q("minilearn.models", ElementKind::Module));
        models.classes.push(Class {
            qname: q("minilearn.models.Ridge", ElementKind::Class),
            superclass_names: vec![],
            methods: vec![
                method(
                    "minilearn.models.Ridge.__init__",
                    vec![
                        param("alpha", 0, Some(LiteralValue::float(1.0))),
                        param("fit_intercept", 1, Some(LiteralValue::bool(true))),
                    ],
                    true,
                ),
                method("minilearn.models.Ridge.fit", vec![param("X", 0, None), param("y", 1, None)], false),
            ],
            docstring: None,
            decorators: vec![],
        });
        models.classes.push(Class {
            qname: q("minilearn.models.Plain", ElementKind::Class),
            superclass_names: vec![],
            methods: vec![],
            docstring: None,
            decorators: vec![],
        });
        let mut metrics = Module::new(q("minilearn.metrics", ElementKind::Module));
        metrics.functions.push(method("minilearn.metrics.mse", vec![param("a", 0, None), param("b", 1, None)], false));
        ApiModel::new("minilearn", "0.1", vec![metrics, models]).unwrap()
    }

    fn events(src: &str) -> Vec<UsageEvent> {
        scan_program(src, "prog.py", &minilearn()).unwrap().events
    }

    fn targets(src: &str) -> Vec<String> {
        events(src).into_iter().map(|e| e.target).collect()
    }

    #[test]
    fn resolves_aliased_constructor() {
        let ev = events("from minilearn.models import Ridge as R\nm = R(alpha=0.5)\n");
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].target, "minilearn.models.Ridge.__init__");
        assert_eq!(ev[0].kind, CallKind::Constructor);
        assert_eq!(ev[0].line, 2);
        assert_eq!(ev[0].bindings["alpha"].value.text, "0.5");
    }

    #[test]
    fn receiver_method_and_chained_call() {
        let t = targets("from minilearn.models import Ridge as R\nmodel = R()\nmodel.fit(X, y)\nR().fit(1, 2)\n");
        assert_eq!(
            t,
            [
                "minilearn.models.Ridge.__init__",
                "minilearn.models.Ridge.fit",
                "minilearn.models.Ridge.__init__",
                "minilearn.models.Ridge.fit",
            ]
        );
    }

    #[test]
    fn unimported_and_rebound_names_do_not_resolve() {
        assert!(targets("foo(1)\nmodel.fit(1, 2)\n").is_empty());
        let t = targets("import minilearn.models as mm\nm = mm.Ridge()\nm = other()\nm.fit(1, 2)\n");
        assert_eq!(t, ["minilearn.models.Ridge.__init__"]);
    }

    #[test]
    fn receivers_are_scoped() {
        let src = "from minilearn.models import Ridge\nm = Ridge()\ndef f():\n    m.fit(1, 2)\n";
        assert_eq!(targets(src), ["minilearn.models.Ridge.__init__"]);
    }

    #[test]
    fn class_without_init_and_star_import() {
        let t = targets("from minilearn.models import *\nPlain()\nfrom minilearn import metrics\nmetrics.mse(1, 2)\n");
        assert_eq!(t, ["minilearn.models.Plain", "minilearn.metrics.mse"]);
    }

    #[test]
    fn opaque_and_lint() {
        let ev = events("from minilearn.models import Ridge\nRidge(**cfg)\nRidge(beta=1)\n");
        assert!(ev[0].opaque && ev[0].bindings.is_empty() && ev[0].lint.is_none());
        assert!(ev[1].opaque && ev[1].lint.as_deref().unwrap().contains("beta"));
    }

    #[test]
    fn counts_and_report() {
        let programs = vec![
            ("a.py".to_string(), "from minilearn.models import Ridge\nRidge(0.5).fit(1, 2)\n".to_string()),
            ("b.py".to_string(), "import numpy\n".to_string()),
            ("c.py".to_string(), "def (:\n".to_string()),
        ];
        let doc = mine_sources(&programs, &minilearn(), 2).unwrap();
        assert_eq!(doc.report.files_total, 3);
        assert_eq!(doc.report.files_using_library, 1);
        assert_eq!(doc.report.files_skipped, 1);
        let ridge = &doc.counts.classes["minilearn.models.Ridge"];
        assert_eq!((ridge.uses, ridge.constructor_calls, ridge.method_calls), (2, 1, 1));
        let alpha = &doc.counts.parameters["minilearn.models.Ridge.__init__#alpha"];
        assert_eq!(alpha.explicit_count, 1);
        assert_eq!(alpha.values, BTreeMap::from([("0.5".to_string(), 1)]));
        let fi = &doc.counts.parameters["minilearn.models.Ridge.__init__#fit_intercept"];
        assert_eq!((fi.explicit_count, fi.occurrences()), (0, 1));
    }

    #[test]
    fn empty_corpus() {
        let doc = mine_sources(&[], &minilearn(), 1).unwrap();
        assert_eq!(doc.report.files_using_library, 0);
        assert!(doc.counts.callables.is_empty());
        let back = UsageDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
    }

    fn arb_counts() -> impl Strategy<Value = UsageCounts> {
        let key = prop::sample::select(vec!["a", "b", "c"]);
        (
            prop::collection::btree_map(key.clone(), (0u64..5, 0u64..5, 0u64..5), 0..3),
            prop::collection::btree_map(key.clone(), (0u64..5, 0u64..5), 0..3),
            prop::collection::btree_map(key, (0u64..5, prop::collection::btree_map("[xy]", 0u64..4, 0..3)), 0..3),
        )
            .prop_map(|(classes, callables, params)| UsageCounts {
                library_name: "lib".into(),
                library_version: "1".into(),
                classes: classes
                    .into_iter()
                    .map(|(k, (u, c, m))| (k.to_string(), ClassUsage { uses: u, constructor_calls: c, method_calls: m }))
                    .collect(),
                callables: callables
                    .into_iter()
                    .map(|(k, (u, o))| (k.to_string(), CallableUsage { uses: u, opaque_uses: o }))
                    .collect(),
                parameters: params
                    .into_iter()
                    .map(|(k, (e, values))| (k.to_string(), ParameterUsage { explicit_count: e, values }))
                    .collect(),
            })
    }

    proptest! {
        #[test]
        fn merge_is_commutative_and_associative(a in arb_counts(), b in arb_counts(), c in arb_counts()) {
            let mut ab = a.clone();
            ab.merge(&b);
            let mut ba = b.clone();
            ba.merge(&a);
            prop_assert_eq!(&ab, &ba);
            let mut ab_c = ab.clone();
            ab_c.merge(&c);
            let mut bc = b.clone();
            bc.merge(&c);
            let mut a_bc = a.clone();
            a_bc.merge(&bc);
            prop_assert_eq!(ab_c, a_bc);
        }
    }
}
