//! The five simplification directives, their consistency rules and the
//! auto/manual merge.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::json::{Document, ANNOTATIONS_SCHEMA};
use crate::model::{is_identifier, ApiModel, AssignmentKind, Element, LiteralTag, LiteralValue, Parameter};
use crate::usage::UsageCounts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Auto,
    Manual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationKind {
    Remove,
    Attribute,
    Group,
    Enum,
    Move,
}

impl fmt::Display for AnnotationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnnotationKind::Remove => "remove",
            AnnotationKind::Attribute => "attribute",
            AnnotationKind::Group => "group",
            AnnotationKind::Enum => "enum",
            AnnotationKind::Move => "move",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupVariant {
    pub variant_name: String,
    pub discriminator_value: String,
    #[serde(default)]
    pub member_params: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub group_name: String,
    pub discriminator_param: String,
    pub variants: Vec<GroupVariant>,
}

impl GroupSpec {
    /// Discriminator followed by every member, in variant order.
    pub fn involved_params(&self) -> Vec<&str> {
        let mut out = vec![self.discriminator_param.as_str()];
        for v in &self.variants {
            for m in &v.member_params {
                if !out.contains(&m.as_str()) {
                    out.push(m);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumMember {
    pub member_name: String,
    pub string_value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumSpec {
    pub enum_name: String,
    pub members: Vec<EnumMember>,
}

/// Kind plus kind-specific payload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Directive {
    Remove {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        baked_value: Option<LiteralValue>,
    },
    Attribute {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default_override: Option<LiteralValue>,
    },
    Group(GroupSpec),
    Enum(EnumSpec),
    Move {
        destination_module: String,
    },
}

impl Directive {
    pub fn kind(&self) -> AnnotationKind {
        match self {
            Directive::Remove { .. } => AnnotationKind::Remove,
            Directive::Attribute { .. } => AnnotationKind::Attribute,
            Directive::Group(_) => AnnotationKind::Group,
            Directive::Enum(_) => AnnotationKind::Enum,
            Directive::Move { .. } => AnnotationKind::Move,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub target: String,
    pub origin: Origin,
    #[serde(flatten)]
    pub directive: Directive,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub needs_review: bool,
}

impl Annotation {
    pub fn new(target: impl Into<String>, origin: Origin, directive: Directive) -> Self {
        Self { target: target.into(), origin, directive, needs_review: false }
    }

    pub fn remove(target: impl Into<String>, origin: Origin, baked_value: Option<LiteralValue>) -> Self {
        Self::new(target, origin, Directive::Remove { baked_value })
    }

    pub fn kind(&self) -> AnnotationKind {
        self.directive.kind()
    }

    fn sort_key(&self) -> (String, AnnotationKind, String) {
        let payload = serde_json::to_string(&self.directive).unwrap_or_default();
        (self.target.clone(), self.kind(), payload)
    }
}

/// Annotations for one library version, kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub library_name: String,
    pub library_version: String,
    #[serde(serialize_with = "serialize_sorted")]
    pub annotations: Vec<Annotation>,
}

fn serialize_sorted<S: Serializer>(annotations: &[Annotation], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut sorted: Vec<&Annotation> = annotations.iter().collect();
    sorted.sort_by_cached_key(|a| a.sort_key());
    s.collect_seq(sorted)
}

impl Document for AnnotationSet {
    const SCHEMA: &'static str = ANNOTATIONS_SCHEMA;
}

impl AnnotationSet {
    pub fn new(library_name: impl Into<String>, library_version: impl Into<String>) -> Self {
        Self { library_name: library_name.into(), library_version: library_version.into(), annotations: Vec::new() }
    }

    pub fn empty_for(model: &ApiModel) -> Self {
        Self::new(model.library_name(), model.library_version())
    }

    pub fn push(&mut self, annotation: Annotation) {
        self.annotations.push(annotation);
    }

    pub fn len(&self) -> usize {
        self.annotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annotations.is_empty()
    }

    /// Sorts by target, then kind, then payload.
    pub fn canonicalize(&mut self) {
        self.annotations.sort_by_cached_key(|a| a.sort_key());
    }

    pub fn for_target<'a>(&'a self, target: &'a str) -> impl Iterator<Item = &'a Annotation> + 'a {
        self.annotations.iter().filter(move |a| a.target == target)
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

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagnostic {
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<AnnotationKind>,
    pub message: String,
    /// Targets of other annotations involved in the problem.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub related: Vec<String>,
}

impl Diagnostic {
    fn new(target: &str, kind: Option<AnnotationKind>, message: impl Into<String>) -> Self {
        Self { target: target.to_owned(), kind, message: message.into(), related: Vec::new() }
    }

    fn related(mut self, related: impl IntoIterator<Item = String>) -> Self {
        self.related = related.into_iter().collect();
        self.related.sort();
        self.related.dedup();
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Some(k) => write!(f, "{} (@{k}): {}", self.target, self.message),
            None => write!(f, "{}: {}", self.target, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationResult {
    pub errors: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
}

impl ValidationResult {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    fn finish(mut self) -> Self {
        self.errors.sort();
        self.errors.dedup();
        self.warnings.sort();
        self.warnings.dedup();
        self
    }
}

fn is_upper_snake(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

fn is_dotted_identifier(s: &str) -> bool {
    !s.is_empty() && s.split('.').all(is_identifier)
}

/// Whether a module, class or callable enclosing `text` is in `removed`.
fn ancestor_removed(text: &str, removed: &BTreeSet<&str>) -> bool {
    let (owner, is_param) = match text.split_once('#') {
        Some((owner, _)) => (owner, true),
        None => (text, false),
    };
    let segments: Vec<&str> = owner.split('.').collect();
    let depth = if is_param { segments.len() } else { segments.len() - 1 };
    (1..=depth).any(|n| removed.contains(segments[..n].join(".").as_str()))
}

/// What one annotation resolved to in the model.
struct Resolved<'m> {
    index: usize,
    /// Defining text of the target.
    target: String,
    element: Element<'m>,
}

/// Checks `set` against `model`. With `usage`, removals of used elements and
/// enum values outside the observed strings are reported as warnings.
pub fn validate(set: &AnnotationSet, model: &ApiModel, usage: Option<&UsageCounts>) -> ValidationResult {
    let mut out = ValidationResult::default();
    if set.library_name != model.library_name() {
        out.errors.push(Diagnostic::new(
            &set.library_name,
            None,
            format!("annotations are for library `{}`, model is `{}`", set.library_name, model.library_name()),
        ));
        return out.finish();
    }

    let mut resolved = Vec::new();
    for (index, a) in set.annotations.iter().enumerate() {
        match model.resolve_text(&a.target).and_then(|t| model.lookup(&t).map(|e| (t, e))) {
            Some((target, element)) => resolved.push(Resolved { index, target, element }),
            None => out.errors.push(Diagnostic::new(&a.target, Some(a.kind()), "unknown target")),
        }
    }

    let removed: BTreeSet<&str> = resolved
        .iter()
        .filter(|r| set.annotations[r.index].kind() == AnnotationKind::Remove)
        .map(|r| r.target.as_str())
        .collect();
    for r in &resolved {
        let a = &set.annotations[r.index];
        check_kind(a, r, model, usage, &mut out);
        if !model.is_public_text(&r.target).unwrap_or(false) {
            out.warnings.push(Diagnostic::new(&a.target, Some(a.kind()), "annotation on an internal element"));
        }
        if ancestor_removed(&r.target, &removed) {
            out.warnings.push(Diagnostic::new(
                &a.target,
                Some(a.kind()),
                "annotation has no effect: an enclosing element is removed",
            ));
        }
    }

    // At most one kind per target, except that @move combines with anything.
    let mut by_target: BTreeMap<&str, Vec<&Annotation>> = BTreeMap::new();
    for r in &resolved {
        by_target.entry(r.target.as_str()).or_default().push(&set.annotations[r.index]);
    }
    for (target, anns) in &by_target {
        let non_move = anns.iter().filter(|a| a.kind() != AnnotationKind::Move).count();
        let moves = anns.len() - non_move;
        if non_move > 1 || moves > 1 {
            let kinds: Vec<String> = anns.iter().map(|a| format!("@{}", a.kind())).collect();
            out.errors.push(Diagnostic::new(
                target,
                None,
                format!("conflicting annotations on one target: {}", kinds.join(", ")),
            ));
        }
    }

    // A parameter carries at most one of remove / attribute / enum / group membership.
    let mut param_roles: BTreeMap<String, Vec<(String, AnnotationKind)>> = BTreeMap::new();
    for r in &resolved {
        let a = &set.annotations[r.index];
        match (&a.directive, r.element) {
            (Directive::Remove { .. } | Directive::Attribute { .. } | Directive::Enum(_), Element::Parameter(..)) => {
                param_roles.entry(r.target.clone()).or_default().push((r.target.clone(), a.kind()));
            }
            (Directive::Group(g), Element::Callable(f, _)) => {
                for p in g.involved_params() {
                    if f.parameter(p).is_some() {
                        param_roles
                            .entry(format!("{}#{p}", r.target))
                            .or_default()
                            .push((r.target.clone(), AnnotationKind::Group));
                    }
                }
            }
            _ => {}
        }
    }
    for (param, roles) in &param_roles {
        if roles.len() > 1 {
            let kinds: Vec<String> = roles.iter().map(|(_, k)| format!("@{k}")).collect();
            out.errors.push(
                Diagnostic::new(param, None, format!("parameter has several roles: {}", kinds.join(", ")))
                    .related(roles.iter().map(|(t, _)| t.clone())),
            );
        }
    }

    // A removed parameter must still be satisfiable when its owner is kept.
    for r in &resolved {
        let a = &set.annotations[r.index];
        let (Directive::Remove { baked_value: None }, Element::Parameter(p, _, _)) = (&a.directive, r.element) else {
            continue;
        };
        if p.default.is_none() && !p.assignment_kind.is_variadic() && !ancestor_removed(&r.target, &removed) {
            out.errors.push(Diagnostic::new(
                &a.target,
                Some(AnnotationKind::Remove),
                "removing a required parameter needs a baked_value",
            ));
        }
    }

    if let Some(usage) = usage {
        for r in &resolved {
            let a = &set.annotations[r.index];
            if a.kind() != AnnotationKind::Remove {
                continue;
            }
            let uses = match r.element {
                Element::Class(_) => usage.class_uses(&r.target),
                Element::Callable(..) => usage.callable_uses(&r.target),
                _ => 0,
            };
            if uses > 0 {
                out.warnings.push(Diagnostic::new(
                    &a.target,
                    Some(AnnotationKind::Remove),
                    format!("removes an element used {uses} time(s) in the corpus"),
                ));
            }
            if let Element::Parameter(..) = r.element {
                let distinct = usage.parameter(&r.target).map_or(0, |p| p.values.len());
                if distinct >= 2 {
                    out.warnings.push(Diagnostic::new(
                        &a.target,
                        Some(AnnotationKind::Remove),
                        format!("removes a parameter observed with {distinct} distinct values"),
                    ));
                }
            }
        }
    }
    out.finish()
}

fn check_kind(
    a: &Annotation,
    r: &Resolved<'_>,
    model: &ApiModel,
    usage: Option<&UsageCounts>,
    out: &mut ValidationResult,
) {
    let kind = Some(a.kind());
    let mut error = |msg: String| out.errors.push(Diagnostic::new(&a.target, kind, msg));
    match (&a.directive, r.element) {
        (Directive::Remove { baked_value }, element) => {
            if let Element::Callable(f, _) = element {
                if f.is_constructor {
                    error("a constructor cannot be removed on its own; remove the class".into());
                }
            }
            match (baked_value, element) {
                (Some(_), e) if !matches!(e, Element::Parameter(..)) => {
                    error("baked_value is only allowed on parameters".into());
                }
                (Some(v), Element::Parameter(p, _, _)) => {
                    if !v.is_literal() {
                        error(format!("baked_value `{}` is not a literal", v.text));
                    }
                    if p.assignment_kind.is_variadic() {
                        error("a variadic parameter cannot take a baked_value".into());
                    }
                }
                _ => {}
            }
        }
        (Directive::Attribute { default_override }, Element::Parameter(p, f, _)) => {
            if !f.is_constructor {
                error("@attribute targets constructor parameters only".into());
            }
            if p.assignment_kind.is_variadic() {
                error("a variadic parameter cannot become an attribute".into());
            }
            if let Some(v) = default_override {
                if !v.is_literal() {
                    error(format!("default_override `{}` is not a literal", v.text));
                }
            } else if p.default.is_none() {
                error("a required parameter needs a default_override to become an attribute".into());
            }
            if p.assignment_kind == AssignmentKind::PositionalOnly {
                error("a positional-only parameter cannot become an attribute".into());
            }
        }
        (Directive::Group(g), Element::Callable(f, _)) => {
            check_group(g, &f.parameters, &mut error);
        }
        (Directive::Enum(e), Element::Parameter(p, _, _)) => {
            check_enum(e, p, &r.target, usage, &mut error, &mut out.warnings);
        }
        (Directive::Move { destination_module }, element) => {
            let movable = matches!(element, Element::Class(_) | Element::Callable(_, None));
            if !movable {
                error("@move targets classes and module-level functions only".into());
            }
            if !is_dotted_identifier(destination_module) {
                error(format!("destination `{destination_module}` is not a dotted module name"));
            } else if destination_module != model.library_name()
                && !destination_module.starts_with(&format!("{}.", model.library_name()))
            {
                error(format!("destination `{destination_module}` is outside library `{}`", model.library_name()));
            } else if let Some(existing) = model.lookup(destination_module) {
                if !matches!(existing, Element::Module(_)) {
                    error(format!("destination `{destination_module}` names an existing {}", existing.kind()));
                }
            }
        }
        (directive, element) => {
            let expected = match directive.kind() {
                AnnotationKind::Attribute => "a constructor parameter",
                AnnotationKind::Group => "a callable",
                AnnotationKind::Enum => "a parameter",
                _ => "a different element",
            };
            error(format!("@{} needs {expected}, found a {}", directive.kind(), element.kind()));
        }
    }
}

fn check_group(g: &GroupSpec, params: &[Parameter], error: &mut impl FnMut(String)) {
    let find = |name: &str| params.iter().find(|p| p.name == name);
    if !is_identifier(&g.group_name) {
        error(format!("group_name `{}` is not an identifier", g.group_name));
    }
    match find(&g.discriminator_param) {
        None => error(format!("discriminator `{}` is not a parameter", g.discriminator_param)),
        Some(p) if p.assignment_kind.is_variadic() => {
            error(format!("discriminator `{}` is variadic", g.discriminator_param))
        }
        Some(_) => {}
    }
    if g.variants.is_empty() {
        error("a group needs at least one variant".into());
    }
    let mut names = BTreeSet::new();
    let mut values = BTreeSet::new();
    let mut owner_of: BTreeMap<&str, &str> = BTreeMap::new();
    for v in &g.variants {
        if !is_identifier(&v.variant_name) {
            error(format!("variant name `{}` is not an identifier", v.variant_name));
        }
        if !names.insert(v.variant_name.as_str()) {
            error(format!("duplicate variant `{}`", v.variant_name));
        }
        if !values.insert(v.discriminator_value.as_str()) {
            error(format!("duplicate discriminator value `{}`", v.discriminator_value));
        }
        let mut seen = BTreeSet::new();
        for m in &v.member_params {
            if !seen.insert(m.as_str()) {
                error(format!("variant `{}` lists `{m}` twice", v.variant_name));
                continue;
            }
            if *m == g.discriminator_param {
                error(format!("variant `{}` lists the discriminator `{m}` as a member", v.variant_name));
                continue;
            }
            match find(m) {
                None => error(format!("member `{m}` is not a parameter")),
                Some(p) if p.assignment_kind.is_variadic() => error(format!("member `{m}` is variadic")),
                Some(_) => {}
            }
            if let Some(other) = owner_of.insert(m, &v.variant_name) {
                error(format!("member `{m}` appears in variants `{other}` and `{}`", v.variant_name));
            }
        }
    }
    // Every variant omits the members of the others; those must have defaults.
    for (m, variant) in &owner_of {
        if find(m).is_some_and(|p| p.default.is_none()) && g.variants.len() > 1 {
            error(format!("member `{m}` of variant `{variant}` is required but other variants omit it"));
        }
    }
}

fn check_enum(
    e: &EnumSpec,
    p: &Parameter,
    target: &str,
    usage: Option<&UsageCounts>,
    error: &mut impl FnMut(String),
    warnings: &mut Vec<Diagnostic>,
) {
    if !is_identifier(&e.enum_name) {
        error(format!("enum_name `{}` is not an identifier", e.enum_name));
    }
    if p.assignment_kind.is_variadic() {
        error("a variadic parameter cannot be an enum".into());
    }
    if e.members.is_empty() {
        error("an enum needs at least one member".into());
    }
    let mut names = BTreeSet::new();
    let mut values = BTreeSet::new();
    for m in &e.members {
        if !is_upper_snake(&m.member_name) {
            error(format!("member name `{}` is not UPPER_SNAKE", m.member_name));
        }
        if !names.insert(m.member_name.as_str()) {
            error(format!("duplicate member `{}`", m.member_name));
        }
        if !values.insert(m.string_value.as_str()) {
            error(format!("duplicate member value `{}`", m.string_value));
        }
    }
    match &p.default {
        None => {}
        Some(d) if d.tag == LiteralTag::None => {}
        Some(d) => match d.as_str_value() {
            Some(s) if values.contains(s.as_str()) => {}
            Some(s) => error(format!("default '{s}' is not an enum member value")),
            None => error(format!("default `{}` is not string-typed", d.text)),
        },
    }
    if let Some(param) = usage.and_then(|u| u.parameter(target)) {
        for text in param.values.keys() {
            let v = LiteralValue::from_text(text);
            match v.tag {
                LiteralTag::Dynamic | LiteralTag::None => {}
                LiteralTag::String => {
                    let s = v.as_str_value().unwrap_or_default();
                    if !values.contains(s.as_str()) {
                        warnings.push(Diagnostic::new(
                            target,
                            Some(AnnotationKind::Enum),
                            format!("observed value {text} has no enum member"),
                        ));
                    }
                }
                _ => error(format!("observed value {text} is not string-typed")),
            }
        }
    }
}

/// Outcome of [`merge`]: the combined set and what precedence discarded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeOutcome {
    pub set: AnnotationSet,
    pub warnings: Vec<Diagnostic>,
    pub validation: ValidationResult,
}

/// Combines auto suggestions with manual annotations. Manual annotations win
/// on a shared target; auto annotations that then conflict with manual ones
/// are dropped until the set validates or no auto annotation is implicated.
pub fn merge(auto: &AnnotationSet, manual: &AnnotationSet, model: &ApiModel) -> Result<MergeOutcome> {
    if auto.library_name != manual.library_name {
        return Err(Error::LibraryMismatch { expected: manual.library_name.clone(), found: auto.library_name.clone() });
    }
    if auto.library_version != manual.library_version {
        return Err(Error::VersionMismatch {
            expected: manual.library_version.clone(),
            found: auto.library_version.clone(),
        });
    }
    let canon = |t: &str| model.resolve_text(t).unwrap_or_else(|| t.to_owned());
    let manual_targets: BTreeSet<String> = manual.annotations.iter().map(|a| canon(&a.target)).collect();
    let mut warnings = Vec::new();
    let mut kept_auto = Vec::new();
    for a in &auto.annotations {
        if manual_targets.contains(&canon(&a.target)) {
            warnings.push(Diagnostic::new(
                &a.target,
                Some(a.kind()),
                "auto suggestion dropped: a manual annotation targets the same element",
            ));
        } else {
            kept_auto.push(a.clone());
        }
    }
    let mut set = AnnotationSet {
        library_name: manual.library_name.clone(),
        library_version: manual.library_version.clone(),
        annotations: manual.annotations.iter().cloned().chain(kept_auto).collect(),
    };
    loop {
        let result = validate(&set, model, None);
        let implicated: BTreeSet<String> = result
            .errors
            .iter()
            .flat_map(|d| std::iter::once(canon(&d.target)).chain(d.related.iter().map(|t| canon(t))))
            .collect();
        let before = set.annotations.len();
        set.annotations.retain(|a| {
            let drop = a.origin == Origin::Auto && implicated.contains(&canon(&a.target));
            if drop {
                warnings.push(Diagnostic::new(
                    &a.target,
                    Some(a.kind()),
                    "auto suggestion dropped: it conflicts with manual annotations",
                ));
            }
            !drop
        });
        if set.annotations.len() == before {
            set.canonicalize();
            warnings.sort();
            warnings.dedup();
            return Ok(MergeOutcome { set, warnings, validation: result });
        }
    }
}
