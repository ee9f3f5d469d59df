use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::deprecation::DeprecationFact;
use super::diff::ApiDiff;
use super::version::Version;
use crate::annotations::{validate, Annotation, AnnotationSet, ValidationResult};
use crate::error::{Error, Result};
use crate::model::ApiModel;

/// An input annotation that could not be carried to the new version.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub annotation: Annotation,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MigrationNote {
    pub target: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictReport {
    pub conflicts: Vec<Conflict>,
    pub warnings: Vec<MigrationNote>,
    /// Public elements and parameters new in this version, queued for annotation.
    pub unannotated_additions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MigrationOutcome {
    pub set: AnnotationSet,
    pub report: ConflictReport,
    /// Validation of `set` against the new model.
    pub validation: ValidationResult,
}

/// Splits `a.b.C.f#p` into segments with the parameter kept as the last one.
fn segments(target: &str) -> Vec<&str> {
    let (owner, param) = match target.split_once('#') {
        Some((o, p)) => (o, Some(p)),
        None => (target, None),
    };
    owner.split('.').chain(param).collect()
}

fn join(segs: &[&str], param_last: bool) -> String {
    if param_last && segs.len() > 1 {
        format!("{}#{}", segs[..segs.len() - 1].join("."), segs[segs.len() - 1])
    } else {
        segs.join(".")
    }
}

/// The nearest deprecated ancestor-or-self with a replacement, and the
/// target rewritten under the replacement.
fn replacement_for(canonical: &str, facts: &BTreeMap<&str, &DeprecationFact>, new: &ApiModel) -> Option<(String, String)> {
    let segs = segments(canonical);
    let has_param = canonical.contains('#');
    for n in (1..=segs.len()).rev() {
        let prefix = join(&segs[..n], has_param && n == segs.len());
        let Some(fact) = facts.get(prefix.as_str()) else { continue };
        let Some(replacement) = &fact.replacement else { continue };
        let replacement = resolve_replacement(replacement, &prefix, new)?;
        let rest = &segs[n..];
        let target = if rest.is_empty() {
            replacement.clone()
        } else if has_param {
            let mut all: Vec<&str> = segments(&replacement);
            all.extend(rest);
            join(&all, true)
        } else {
            format!("{replacement}.{}", rest.join("."))
        };
        return Some((prefix, target));
    }
    None
}

/// Replacement names may be absolute, a sibling parameter of a deprecated
/// parameter, or relative to an enclosing scope of the deprecated element.
fn resolve_replacement(name: &str, deprecated: &str, new: &ApiModel) -> Option<String> {
    let (owner, param) = match deprecated.split_once('#') {
        Some((o, p)) => (o, Some(p)),
        None => (deprecated, None),
    };
    let mut candidates = vec![name.to_owned()];
    if param.is_some() {
        candidates.push(format!("{owner}#{name}"));
    }
    let mut scope: Vec<&str> = owner.split('.').collect();
    if param.is_none() {
        scope.pop();
    }
    while !scope.is_empty() {
        candidates.push(format!("{}.{name}", scope.join(".")));
        scope.pop();
    }
    candidates.iter().find_map(|c| new.resolve_text(c))
}

/// Carries `set` from `old` to `new` along `diff`: unchanged targets are kept
/// verbatim, removed ones become conflicts and deprecated ones with a usable
/// replacement are retargeted and flagged for review. Every input annotation
/// ends up either in the output set or in the conflicts.
pub fn migrate_annotations(set: &AnnotationSet, diff: &ApiDiff, old: &ApiModel, new: &ApiModel) -> Result<MigrationOutcome> {
    set.check_model(old)?;
    if diff.library_name != new.library_name() || diff.new_version != new.library_version() {
        return Err(Error::VersionMismatch { expected: diff.new_version.clone(), found: new.library_version().into() });
    }
    let facts: BTreeMap<&str, &DeprecationFact> = diff.deprecated.iter().map(|f| (f.target.as_str(), f)).collect();
    let new_version = Version::parse(&diff.new_version);
    let mut report = ConflictReport::default();
    // (input, migrated) pairs, so late conflicts report the input annotation.
    let mut carried: Vec<(&Annotation, Annotation)> = Vec::new();

    for a in &set.annotations {
        let Some(canonical) = old.resolve_text(&a.target) else {
            report.conflicts.push(Conflict { annotation: a.clone(), reason: "target is unknown in the old version".into() });
            continue;
        };
        if let Some((deprecated, target)) = replacement_for(&canonical, &facts, new) {
            if new.contains(&target) || new.resolve_text(&target).is_some() {
                let mut moved = a.clone();
                moved.target = target.clone();
                moved.needs_review = true;
                report.warnings.push(MigrationNote {
                    target: a.target.clone(),
                    message: format!("retargeted to `{target}` because `{deprecated}` is deprecated; confirm the annotation"),
                });
                carried.push((a, moved));
                continue;
            }
        }
        match new.resolve_text(&a.target).or_else(|| new.resolve_text(&canonical)) {
            Some(now) => {
                let mut kept = a.clone();
                if new.resolve_text(&a.target).is_none() {
                    kept.target = now.clone();
                    report.warnings.push(MigrationNote {
                        target: a.target.clone(),
                        message: format!("alias no longer exists; retargeted to `{now}`"),
                    });
                }
                if let Some(f) = facts.get(canonical.as_str()) {
                    let overdue = f.removal_version.as_deref().is_some_and(|r| Version::parse(r) <= new_version);
                    let message = match (&f.replacement, overdue) {
                        (_, true) => format!(
                            "deprecated since {} and scheduled for removal by {}",
                            f.since_version, diff.new_version
                        ),
                        (Some(r), false) => {
                            format!("deprecated since {}; replacement `{r}` not found in {}", f.since_version, diff.new_version)
                        }
                        (None, false) => format!("deprecated since {} without a replacement", f.since_version),
                    };
                    report.warnings.push(MigrationNote { target: a.target.clone(), message });
                }
                carried.push((a, kept));
            }
            None => report.conflicts.push(Conflict {
                annotation: a.clone(),
                reason: format!("`{canonical}` no longer exists in {}", diff.new_version),
            }),
        }
    }

    let canon = |t: &str| new.resolve_text(t).unwrap_or_else(|| t.to_owned());
    let build = |carried: &[(&Annotation, Annotation)]| AnnotationSet {
        library_name: set.library_name.clone(),
        library_version: new.library_version().to_owned(),
        annotations: carried.iter().map(|(_, m)| m.clone()).collect(),
    };
    let (mut out, validation) = loop {
        let out = build(&carried);
        let result = validate(&out, new, None);
        let culprit = result.errors.iter().find_map(|d| {
            let target = canon(&d.target);
            let i = carried.iter().position(|(_, m)| canon(&m.target) == target && d.kind.map_or(true, |k| k == m.kind()))?;
            Some((i, d))
        });
        match culprit {
            Some((i, d)) => {
                let reason = format!("invalid in {}: {}", diff.new_version, d.message);
                let (input, _) = carried.remove(i);
                report.conflicts.push(Conflict { annotation: input.clone(), reason });
            }
            None => break (out, result),
        }
    };
    out.canonicalize();

    let annotated: BTreeSet<String> = out.annotations.iter().map(|a| canon(&a.target)).collect();
    let public = |t: &str| new.is_public_text(t).unwrap_or(false);
    let mut additions: BTreeSet<String> = diff.added.iter().filter(|q| public(q)).cloned().collect();
    for change in &diff.signature_changed {
        for p in change.added_params() {
            let q = format!("{}#{p}", change.qname);
            if public(&q) {
                additions.insert(q);
            }
        }
    }
    report.unannotated_additions = additions.into_iter().filter(|q| !annotated.contains(q)).collect();
    report.warnings.sort();
    report.warnings.dedup();
    Ok(MigrationOutcome { set: out, report, validation })
}
