//! Used/unused and useful/useless classification, reduction statistics and
//! auto-suggested annotations.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::annotations::{Annotation, AnnotationSet, Directive, Origin};
use crate::error::Result;
use crate::extract::SurfaceCounts;
use crate::json::{Document, REPORT_SCHEMA};
use crate::model::{is_private_segment, ApiModel, LiteralTag, LiteralValue, DYNAMIC_TEXT};
use crate::usage::UsageCounts;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassStatus {
    pub qname: String,
    pub uses: u64,
    pub constructor_calls: u64,
    pub method_calls: u64,
    /// Any constructor or method call.
    pub used: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionStatus {
    pub qname: String,
    pub uses: u64,
    pub used: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterStatus {
    pub qname: String,
    pub explicit_count: u64,
    pub values: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<LiteralValue>,
    pub variadic: bool,
    /// Passed explicitly at least once.
    pub used: bool,
    pub useful: bool,
    pub useless: bool,
}

/// Classification of every public class, function and parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub library_name: String,
    pub library_version: String,
    pub classes: Vec<ClassStatus>,
    pub functions: Vec<FunctionStatus>,
    pub parameters: Vec<ParameterStatus>,
}

/// A parameter is useful when its value set has two distinct values. A set
/// containing `«dynamic»` is useful as well: the runtime values behind it
/// may differ, so the parameter must not be called useless.
pub fn is_useful(values: &BTreeMap<String, u64>) -> bool {
    values.len() >= 2 || values.contains_key(DYNAMIC_TEXT)
}

/// Counting convention shared with [`crate::extract::summarize_surface`]:
/// constructors are not functions, every other callable is.
pub fn classify(model: &ApiModel, counts: &UsageCounts) -> Result<ClassificationReport> {
    counts.check_model(model)?;
    let public = |text: &str| model.is_public_text(text).unwrap_or(false);
    let mut report = ClassificationReport {
        library_name: model.library_name().into(),
        library_version: model.library_version().into(),
        classes: Vec::new(),
        functions: Vec::new(),
        parameters: Vec::new(),
    };
    for class in model.classes() {
        let qname = class.qname.render();
        if !public(&qname) {
            continue;
        }
        let c = counts.classes.get(&qname).cloned().unwrap_or_default();
        report.classes.push(ClassStatus {
            used: c.uses > 0,
            uses: c.uses,
            constructor_calls: c.constructor_calls,
            method_calls: c.method_calls,
            qname,
        });
    }
    for (f, _) in model.callables() {
        let qname = f.qname.render();
        if !public(&qname) {
            continue;
        }
        if !f.is_constructor {
            let uses = counts.callable_uses(&qname);
            report.functions.push(FunctionStatus { qname: qname.clone(), uses, used: uses > 0 });
        }
        for p in &f.parameters {
            let pq = format!("{qname}#{}", p.name);
            let usage = counts.parameter(&pq).cloned().unwrap_or_default();
            let useful = is_useful(&usage.values);
            report.parameters.push(ParameterStatus {
                qname: pq,
                explicit_count: usage.explicit_count,
                used: usage.explicit_count > 0,
                useful,
                useless: !useful,
                values: usage.values,
                default: p.default.clone(),
                variadic: p.assignment_kind.is_variadic(),
            });
        }
    }
    report.classes.sort_by(|a, b| a.qname.cmp(&b.qname));
    report.functions.sort_by(|a, b| a.qname.cmp(&b.qname));
    report.parameters.sort_by(|a, b| a.qname.cmp(&b.qname));
    Ok(report)
}

/// One bar group of the reduction chart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindStats {
    pub total: usize,
    pub public: usize,
    /// Elements kept: used (classes, functions) or useful (parameters).
    pub kept: usize,
    pub reduction: usize,
    pub reduction_percent: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl KindStats {
    pub fn new(total: usize, public: usize, kept: usize) -> Self {
        let reduction = public.saturating_sub(kept);
        let (reduction_percent, note) = if public == 0 {
            (0, Some("no public elements; percentage reported as 0".to_string()))
        } else {
            (round_half_up_percent(reduction, public), None)
        };
        Self { total, public, kept, reduction, reduction_percent, note }
    }
}

/// `round(100 * part / whole)` with halves rounded up, in exact integer arithmetic.
pub fn round_half_up_percent(part: usize, whole: usize) -> u64 {
    let (part, whole) = (part as u128, whole as u128);
    ((200 * part + whole) / (2 * whole)) as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub classes: KindStats,
    /// Classes counted as used only when their constructor is called.
    pub classes_by_constructor: KindStats,
    pub functions: KindStats,
    pub parameters: KindStats,
    /// Public parameters passed explicitly at least once.
    pub parameters_used: usize,
}

pub fn reduction_stats(report: &ClassificationReport, surface: &SurfaceCounts) -> StatsSummary {
    let count = |it: &mut dyn Iterator<Item = bool>| it.filter(|b| *b).count();
    StatsSummary {
        classes: KindStats::new(
            surface.classes_total,
            surface.classes_public,
            count(&mut report.classes.iter().map(|c| c.used)),
        ),
        classes_by_constructor: KindStats::new(
            surface.classes_total,
            surface.classes_public,
            count(&mut report.classes.iter().map(|c| c.constructor_calls > 0)),
        ),
        functions: KindStats::new(
            surface.functions_total,
            surface.functions_public,
            count(&mut report.functions.iter().map(|f| f.used)),
        ),
        parameters: KindStats::new(
            surface.params_total,
            surface.params_public,
            count(&mut report.parameters.iter().map(|p| p.useful)),
        ),
        parameters_used: count(&mut report.parameters.iter().map(|p| p.used)),
    }
}

/// Markdown table with total / public / used / useful columns per kind.
pub fn render_markdown(summary: &StatsSummary) -> String {
    let mut out = String::new();
    out.push_str("| Kind | Total | Public | Used | Useful | Reduction | Reduction % |\n");
    out.push_str("|---|---:|---:|---:|---:|---:|---:|\n");
    let row = |out: &mut String, name: &str, s: &KindStats, used: String, useful: String| {
        let _ = writeln!(
            out,
            "| {name} | {} | {} | {used} | {useful} | {} | {}% |",
            s.total, s.public, s.reduction, s.reduction_percent
        );
    };
    row(&mut out, "Classes", &summary.classes, summary.classes.kept.to_string(), "-".into());
    row(
        &mut out,
        "Classes (constructor calls)",
        &summary.classes_by_constructor,
        summary.classes_by_constructor.kept.to_string(),
        "-".into(),
    );
    row(&mut out, "Functions", &summary.functions, summary.functions.kept.to_string(), "-".into());
    row(
        &mut out,
        "Parameters",
        &summary.parameters,
        summary.parameters_used.to_string(),
        summary.parameters.kept.to_string(),
    );
    let notes: Vec<&str> = [&summary.classes, &summary.functions, &summary.parameters]
        .iter()
        .filter_map(|s| s.note.as_deref())
        .collect();
    if !notes.is_empty() {
        out.push('\n');
        for n in notes {
            let _ = writeln!(out, "Note: {n}");
        }
    }
    out
}

/// The `report.json` document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsDocument {
    pub surface: SurfaceCounts,
    pub summary: StatsSummary,
    pub classification: ClassificationReport,
}

impl Document for StatsDocument {
    const SCHEMA: &'static str = REPORT_SCHEMA;
}

pub const DEFAULT_KEEP_LIST: &[&str] = &["fit_transform", "fit_predict"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovalConfig {
    /// Function names never auto-removed, nor their parameters.
    pub keep: Vec<String>,
}

impl Default for RemovalConfig {
    fn default() -> Self {
        Self { keep: DEFAULT_KEEP_LIST.iter().map(|s| s.to_string()).collect() }
    }
}

fn last_segment(text: &str) -> &str {
    text.rsplit('.').next().unwrap_or(text)
}

/// Auto `@remove` for unused public classes and functions and useless public
/// parameters. A parameter's annotation bakes in its single observed literal
/// value; a never-called parameter bakes in its literal default.
pub fn suggest_removals(report: &ClassificationReport, config: &RemovalConfig) -> AnnotationSet {
    let mut set = AnnotationSet::new(&report.library_name, &report.library_version);
    let kept = |callable: &str| config.keep.iter().any(|k| k == last_segment(callable));
    for c in report.classes.iter().filter(|c| !c.used) {
        set.push(Annotation::remove(&c.qname, Origin::Auto, None));
    }
    let mut removed_functions = std::collections::BTreeSet::new();
    for f in report.functions.iter().filter(|f| !f.used && !kept(&f.qname)) {
        removed_functions.insert(f.qname.as_str());
        set.push(Annotation::remove(&f.qname, Origin::Auto, None));
    }
    let removed_classes: std::collections::BTreeSet<&str> =
        report.classes.iter().filter(|c| !c.used).map(|c| c.qname.as_str()).collect();
    for p in report.parameters.iter().filter(|p| p.useless) {
        let owner = p.qname.split('#').next().unwrap_or(&p.qname);
        if kept(owner) {
            continue;
        }
        let owner_removed = removed_functions.contains(owner)
            || owner.rsplit_once('.').is_some_and(|(class, _)| removed_classes.contains(class));
        if let Some(baked_value) = removal_payload(p, owner_removed) {
            set.push(Annotation::remove(&p.qname, Origin::Auto, baked_value));
        }
    }
    set.canonicalize();
    set
}

/// `Some(payload)` when the parameter can be dropped from its signature.
fn removal_payload(p: &ParameterStatus, owner_removed: bool) -> Option<Option<LiteralValue>> {
    let single = match p.values.keys().next() {
        Some(text) if p.values.len() == 1 => Some(LiteralValue::from_text(text)),
        _ => None,
    };
    match single {
        Some(v) if v.is_literal() && !p.variadic => Some(Some(v)),
        // Only the default (or an empty variadic) was ever seen: omitting
        // the argument reproduces it.
        Some(v) if p.default.as_ref() == Some(&v) || (p.variadic && matches!(v.text.as_str(), "()" | "{}")) => {
            Some(None)
        }
        Some(_) => None,
        None => match &p.default {
            Some(d) if d.is_literal() => Some(Some(d.clone())),
            Some(_) => Some(None),
            None if p.variadic || owner_removed => Some(None),
            None => None,
        },
    }
}

/// Class-name suffix to destination module (without the library prefix when
/// it has no dot).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveConfig {
    pub suffixes: Vec<(String, String)>,
}

impl Default for MoveConfig {
    fn default() -> Self {
        Self {
            suffixes: vec![
                ("Classifier".into(), "classification".into()),
                ("Regression".into(), "regression".into()),
            ],
        }
    }
}

impl MoveConfig {
    /// Adds or replaces a `Suffix=module` entry.
    pub fn set(&mut self, suffix: &str, module: &str) {
        match self.suffixes.iter_mut().find(|(s, _)| s == suffix) {
            Some(entry) => entry.1 = module.to_owned(),
            None => self.suffixes.push((suffix.to_owned(), module.to_owned())),
        }
    }
}

/// Auto `@move` for public classes whose name ends in a configured suffix.
/// Longer suffixes take precedence.
pub fn suggest_moves(model: &ApiModel, config: &MoveConfig) -> AnnotationSet {
    let mut set = AnnotationSet::empty_for(model);
    let mut suffixes: Vec<&(String, String)> = config.suffixes.iter().collect();
    suffixes.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
    for class in model.classes() {
        let qname = class.qname.render();
        let name = class.name();
        if is_private_segment(name) || !model.is_public_text(&qname).unwrap_or(false) {
            continue;
        }
        let Some((_, module)) = suffixes.iter().find(|(s, _)| name.ends_with(s.as_str()) && name != s) else {
            continue;
        };
        let destination = if module.contains('.') {
            module.clone()
        } else {
            format!("{}.{module}", model.library_name())
        };
        let home = &class.qname.segments()[..class.qname.segments().len() - 1];
        if home.join(".") == destination {
            continue;
        }
        set.push(Annotation::new(qname, Origin::Auto, Directive::Move { destination_module: destination }));
    }
    set.canonicalize();
    set
}

/// Removal suggestions plus, when `moves` is given, move suggestions for
/// classes that are not themselves suggested for removal.
pub fn suggest_annotations(
    model: &ApiModel,
    report: &ClassificationReport,
    removals: &RemovalConfig,
    moves: Option<&MoveConfig>,
) -> AnnotationSet {
    let mut set = suggest_removals(report, removals);
    if let Some(config) = moves {
        let removed: std::collections::BTreeSet<String> = set.annotations.iter().map(|a| a.target.clone()).collect();
        for a in suggest_moves(model, config).annotations {
            if !removed.contains(&a.target) {
                set.push(a);
            }
        }
    }
    set.canonicalize();
    set
}

/// Values of a string parameter as they would prefill an `@enum` form.
pub fn observed_strings(status: &ParameterStatus) -> Vec<String> {
    status
        .values
        .keys()
        .map(|t| LiteralValue::from_text(t))
        .filter(|v| v.tag == LiteralTag::String)
        .filter_map(|v| v.as_str_value())
        .collect()
}
