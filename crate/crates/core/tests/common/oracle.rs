//! Synthetic client programs for the `minilearn` fixture, written together
//! with the call events they contain. The expected counts are aggregated
//! from that ground truth without going through the miner.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use slimapi_core::model::ApiModel;
use slimapi_core::usage::{CallableUsage, ClassUsage, ParameterUsage, UsageCounts};

const MODELS: &str = "minilearn.models";

struct ClassInfo {
    name: &'static str,
    ctor: &'static [&'static str],
    methods: &'static [(&'static str, &'static [&'static str])],
}

const CLASSES: &[ClassInfo] = &[
    ClassInfo {
        name: "Ridge",
        ctor: &["alpha", "fit_intercept"],
        methods: &[("fit", &["X", "y"]), ("predict", &["X"])],
    },
    ClassInfo { name: "Lasso", ctor: &["alpha", "copy_X"], methods: &[("fit", &["X", "y"])] },
    ClassInfo { name: "DecisionTreeClassifier", ctor: &["criterion", "max_depth"], methods: &[] },
];

const MSE_PARAMS: &[&str] = &["y_true", "y_pred"];

/// (source text, canonical value text)
const VALUES: &[(&str, &str)] = &[
    ("0", "0"),
    ("3", "3"),
    ("0.5", "0.5"),
    ("1.0", "1.0"),
    ("1e-3", "0.001"),
    ("'gini'", "'gini'"),
    ("\"entropy\"", "'entropy'"),
    ("True", "True"),
    ("False", "False"),
    ("None", "None"),
    ("X", "«dynamic»"),
    ("data[0]", "«dynamic»"),
    ("n + 1", "«dynamic»"),
];

#[derive(Debug, Clone)]
pub struct TruthEvent {
    pub target: String,
    pub class: Option<String>,
    pub constructor: bool,
    /// (param, value text, explicit) for every parameter of the target.
    pub bindings: Vec<(String, String, bool)>,
}

pub struct Program {
    pub path: String,
    pub source: String,
    pub events: Vec<TruthEvent>,
}

enum ModelImport {
    Names,
    Aliased,
    Module(&'static str),
    Foreign,
}

struct Writer<'m, R> {
    rng: R,
    model: &'m ApiModel,
    out: String,
    events: Vec<TruthEvent>,
    class_refs: BTreeMap<&'static str, Option<String>>,
    mse_ref: Option<String>,
    counter: usize,
}

impl<'m, R: Rng> Writer<'m, R> {
    fn default_text(&self, target: &str, param: &str) -> String {
        let (f, _) = self.model.callable(target).expect("fixture callable");
        f.parameter(param).and_then(|p| p.default.as_ref()).map(|d| d.text.clone()).expect("defaulted parameter")
    }

    /// Argument text and bindings; parameters listed in `required` are always passed.
    fn arguments(&mut self, target: &str, params: &[&str], required: &[&str]) -> (String, Vec<(String, String, bool)>) {
        let mut parts = Vec::new();
        let mut bindings = Vec::new();
        let mut positional = true;
        for p in params {
            let pass = required.contains(p) || self.rng.gen_bool(0.5);
            if !pass {
                positional = false;
                bindings.push((p.to_string(), self.default_text(target, p), false));
                continue;
            }
            let (src, canon) = *VALUES.choose(&mut self.rng).unwrap();
            if positional && self.rng.gen_bool(0.5) {
                parts.push(src.to_string());
            } else {
                positional = false;
                parts.push(format!("{p}={src}"));
            }
            bindings.push((p.to_string(), canon.to_string(), true));
        }
        (parts.join(", "), bindings)
    }

    fn line(&mut self, indent: usize, s: &str) {
        let _ = writeln!(self.out, "{}{s}", "    ".repeat(indent));
    }

    fn construct(&mut self, ci: usize) -> Option<String> {
        let info = &CLASSES[ci];
        let reference = self.class_refs[info.name].clone();
        let target = format!("{MODELS}.{}.__init__", info.name);
        let (args, bindings) = self.arguments(&target, info.ctor, &[]);
        if reference.is_some() {
            self.events.push(TruthEvent {
                target,
                class: Some(format!("{MODELS}.{}", info.name)),
                constructor: true,
                bindings,
            });
        }
        let callee = reference.unwrap_or_else(|| info.name.to_owned());
        Some(format!("{callee}({args})"))
    }

    fn method_call(&mut self, ci: usize, receiver: &str, resolved: bool) -> Option<String> {
        let info = &CLASSES[ci];
        let (name, params) = *info.methods.choose(&mut self.rng)?;
        let target = format!("{MODELS}.{}.{name}", info.name);
        let (args, bindings) = self.arguments(&target, params, params);
        if resolved {
            self.events.push(TruthEvent {
                target,
                class: Some(format!("{MODELS}.{}", info.name)),
                constructor: false,
                bindings,
            });
        }
        Some(format!("{receiver}.{name}({args})"))
    }

    /// One block of statements; receivers are local to the block.
    fn block(&mut self, indent: usize, statements: usize) {
        let mut receivers: Vec<(String, usize)> = Vec::new();
        for _ in 0..statements {
            match self.rng.gen_range(0..9) {
                0 | 1 => {
                    let ci = self.rng.gen_range(0..CLASSES.len());
                    let expr = self.construct(ci).unwrap();
                    let var = format!("m{}", self.counter);
                    self.counter += 1;
                    self.line(indent, &format!("{var} = {expr}"));
                    if self.class_refs[CLASSES[ci].name].is_some() {
                        receivers.retain(|(v, _)| v != &var);
                        receivers.push((var, ci));
                    }
                }
                2 | 3 => {
                    if let Some((var, ci)) = receivers.choose(&mut self.rng).cloned() {
                        if let Some(call) = self.method_call(ci, &var, true) {
                            self.line(indent, &call);
                        }
                    }
                }
                4 => {
                    let ci = self.rng.gen_range(0..2);
                    let resolved = self.class_refs[CLASSES[ci].name].is_some();
                    let ctor = self.construct(ci).unwrap();
                    let call = self.method_call(ci, &ctor, resolved).unwrap();
                    self.line(indent, &call);
                }
                5 => {
                    let (args, bindings) = self.arguments("minilearn.metrics.mse", MSE_PARAMS, MSE_PARAMS);
                    match self.mse_ref.clone() {
                        Some(callee) => {
                            self.events.push(TruthEvent {
                                target: "minilearn.metrics.mse".into(),
                                class: None,
                                constructor: false,
                                bindings,
                            });
                            self.line(indent, &format!("score = {callee}({args})"));
                        }
                        None => self.line(indent, &format!("score = mse({args})")),
                    }
                }
                6 => {
                    // Rebinding forgets the receiver.
                    if let Some(i) = (!receivers.is_empty()).then(|| self.rng.gen_range(0..receivers.len())) {
                        let (var, ci) = receivers.remove(i);
                        self.line(indent, &format!("{var} = object()"));
                        if let Some(call) = self.method_call(ci, &var, false) {
                            self.line(indent, &call);
                        }
                    }
                }
                7 => {
                    let ci = self.rng.gen_range(0..CLASSES.len());
                    let expr = self.construct(ci).unwrap();
                    self.line(indent, &expr);
                }
                _ => self.line(indent, "print(len([1, 2]), max(n, 3))"),
            }
        }
        if statements == 0 || self.out.ends_with(":\n") {
            self.line(indent, "pass");
        }
    }
}

pub fn program<R: Rng>(model: &ApiModel, index: usize, rng: R) -> Program {
    let mut w = Writer {
        rng,
        model,
        out: String::new(),
        events: Vec::new(),
        class_refs: BTreeMap::new(),
        mse_ref: None,
        counter: 0,
    };
    let style = match w.rng.gen_range(0..5) {
        0 => ModelImport::Names,
        1 => ModelImport::Aliased,
        2 => ModelImport::Module("mm"),
        3 => ModelImport::Module("minilearn.models"),
        _ => ModelImport::Foreign,
    };
    w.line(0, "\"\"\"Synthetic client program.\"\"\"");
    w.line(0, "import os");
    match style {
        ModelImport::Names => {
            w.line(0, "from minilearn.models import DecisionTreeClassifier, Lasso, Ridge");
            for c in CLASSES {
                w.class_refs.insert(c.name, Some(c.name.to_owned()));
            }
        }
        ModelImport::Aliased => {
            for (i, c) in CLASSES.iter().enumerate() {
                let alias = format!("C{i}");
                w.line(0, &format!("from minilearn.models import {} as {alias}", c.name));
                w.class_refs.insert(c.name, Some(alias));
            }
        }
        ModelImport::Module(prefix) => {
            if prefix == MODELS {
                w.line(0, "import minilearn.models");
            } else {
                w.line(0, &format!("import minilearn.models as {prefix}"));
            }
            for c in CLASSES {
                w.class_refs.insert(c.name, Some(format!("{prefix}.{}", c.name)));
            }
        }
        ModelImport::Foreign => {
            w.line(0, "from sklearn.linear_model import DecisionTreeClassifier, Lasso, Ridge");
            for c in CLASSES {
                w.class_refs.insert(c.name, None);
            }
        }
    }
    match w.rng.gen_range(0..3) {
        0 => {
            w.line(0, "from minilearn.metrics import mse");
            w.mse_ref = Some("mse".into());
        }
        1 => {
            w.line(0, "from minilearn import metrics");
            w.mse_ref = Some("metrics.mse".into());
        }
        _ => {}
    }
    w.line(0, "");
    w.line(0, "n = 4");
    w.line(0, "X = [[1, 2], [3, 4]]");
    w.line(0, "data = [X]");
    let top = w.rng.gen_range(0..8);
    w.block(0, top);
    for f in 0..w.rng.gen_range(0..3) {
        w.line(0, "");
        w.line(0, &format!("def step_{f}(y):"));
        let n = w.rng.gen_range(0..6);
        w.block(1, n);
    }
    Program { path: format!("client_{index:03}.py"), source: w.out, events: w.events }
}

/// Aggregates ground-truth events by brute force.
pub fn expected_counts(model: &ApiModel, programs: &[Program]) -> UsageCounts {
    let mut counts = UsageCounts::new(model.library_name(), model.library_version());
    for e in programs.iter().flat_map(|p| &p.events) {
        let c: &mut CallableUsage = counts.callables.entry(e.target.clone()).or_default();
        c.uses += 1;
        if let Some(class) = &e.class {
            let cu: &mut ClassUsage = counts.classes.entry(class.clone()).or_default();
            cu.uses += 1;
            if e.constructor {
                cu.constructor_calls += 1;
            } else {
                cu.method_calls += 1;
            }
        }
        for (name, value, explicit) in &e.bindings {
            let p: &mut ParameterUsage = counts.parameters.entry(format!("{}#{name}", e.target)).or_default();
            p.explicit_count += u64::from(*explicit);
            *p.values.entry(value.clone()).or_default() += 1;
        }
    }
    counts
}
