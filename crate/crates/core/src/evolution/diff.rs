use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::deprecation::{extract_deprecations, DeprecationFact};
use crate::error::{Error, Result};
use crate::model::{ApiModel, AssignmentKind, Callable, Element};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub name: String,
    pub kind: AssignmentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureChange {
    pub qname: String,
    pub old: Vec<ParamSummary>,
    pub new: Vec<ParamSummary>,
}

impl SignatureChange {
    pub fn added_params(&self) -> impl Iterator<Item = &str> {
        self.new.iter().filter(|n| !self.old.iter().any(|o| o.name == n.name)).map(|p| p.name.as_str())
    }

    pub fn removed_params(&self) -> impl Iterator<Item = &str> {
        self.old.iter().filter(|o| !self.new.iter().any(|n| n.name == o.name)).map(|p| p.name.as_str())
    }
}

/// Element-level changes between two versions of one library. Parameters are
/// not listed in `added`/`removed`; their changes show up in `signature_changed`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiDiff {
    pub library_name: String,
    pub old_version: String,
    pub new_version: String,
    pub added: Vec<String>,
    pub removed: Vec<String>,
    pub deprecated: Vec<DeprecationFact>,
    pub signature_changed: Vec<SignatureChange>,
}

impl ApiDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.deprecated.is_empty() && self.signature_changed.is_empty()
    }
}

fn summary(f: &Callable) -> Vec<ParamSummary> {
    f.parameters
        .iter()
        .map(|p| ParamSummary { name: p.name.clone(), kind: p.assignment_kind, default: p.default.as_ref().map(|d| d.text.clone()) })
        .collect()
}

fn element_names(model: &ApiModel) -> BTreeSet<String> {
    model
        .elements()
        .into_iter()
        .filter(|e| !matches!(e, Element::Parameter(..)))
        .map(|e| e.qname().render())
        .collect()
}

/// Differences from `old` to `new`. Deprecations come from the new version,
/// plus those documented on elements (or parameters) the new version dropped.
pub fn diff_api(old: &ApiModel, new: &ApiModel) -> Result<ApiDiff> {
    if old.library_name() != new.library_name() {
        return Err(Error::LibraryMismatch { expected: old.library_name().into(), found: new.library_name().into() });
    }
    let before = element_names(old);
    let after = element_names(new);
    let added: Vec<String> = after.difference(&before).cloned().collect();
    let removed: Vec<String> = before.difference(&after).cloned().collect();

    let new_callables: BTreeMap<String, &Callable> = new.callables().map(|(f, _)| (f.qname.render(), f)).collect();
    let mut signature_changed: Vec<SignatureChange> = old
        .callables()
        .filter_map(|(f, _)| {
            let q = f.qname.render();
            let g = new_callables.get(&q)?;
            let (old_sig, new_sig) = (summary(f), summary(g));
            (old_sig != new_sig).then_some(SignatureChange { qname: q, old: old_sig, new: new_sig })
        })
        .collect();
    signature_changed.sort_by(|a, b| a.qname.cmp(&b.qname));

    let mut deprecated = extract_deprecations(new);
    let known: BTreeSet<String> = deprecated.iter().map(|f| f.target.clone()).collect();
    deprecated.extend(
        extract_deprecations(old)
            .into_iter()
            .filter(|f| !known.contains(&f.target) && !new.contains(&f.target)),
    );
    deprecated.sort_by(|a, b| a.target.cmp(&b.target));

    Ok(ApiDiff {
        library_name: new.library_name().to_owned(),
        old_version: old.library_version().to_owned(),
        new_version: new.library_version().to_owned(),
        added,
        removed,
        deprecated,
        signature_changed,
    })
}
