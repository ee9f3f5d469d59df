//! Adapted-API inference and wrapper package generation.

mod render;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use render::{render_wrappers, GeneratedFile, GeneratedSource, SourceArchive};

use crate::annotations::{validate, Annotation, AnnotationKind, AnnotationSet, Directive, EnumSpec, GroupSpec};
use crate::error::{Error, Result};
use crate::json::Document;
use crate::model::{
    is_private_segment, python_str_repr, ApiModel, AssignmentKind, Callable, Class, LiteralTag, LiteralValue,
    MethodKind, Parameter,
};

/// Python default of an adapted parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "text", rename_all = "snake_case")]
pub enum DefaultSpec {
    Required,
    /// Python source text of the default.
    Literal(String),
    /// The library default is not a literal: the wrapper uses a sentinel and
    /// forwards the argument only when the caller passes it.
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ParamType {
    Plain { hint: Option<String> },
    Enum { enum_name: String },
    Group { group_name: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptedParam {
    pub name: String,
    pub kind: AssignmentKind,
    pub default: DefaultSpec,
    pub ty: ParamType,
    /// Originating parameter (the discriminator for a group parameter).
    pub origin: String,
}

impl AdaptedParam {
    /// Python type hint text, if any.
    pub fn hint(&self) -> Option<String> {
        match &self.ty {
            ParamType::Plain { hint } => hint.clone(),
            ParamType::Enum { enum_name } | ParamType::Group { group_name: enum_name } => {
                Some(if self.default == DefaultSpec::Literal("None".into()) {
                    format!("{enum_name} | None")
                } else {
                    enum_name.clone()
                })
            }
        }
    }
}

/// Value forwarded for one original parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Value {
    /// The adapted parameter of the same name; `optional` when it may be the sentinel.
    Param { name: String, optional: bool },
    /// `.value` of an enum-typed adapted parameter.
    Enum { name: String, enum_name: String, allow_none: bool },
    /// A removed parameter's constant.
    Baked { text: String },
    /// A removed parameter left to the library default.
    Omitted,
}

impl Value {
    fn may_be_absent(&self) -> bool {
        matches!(self, Value::Omitted | Value::Param { optional: true, .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Forward {
    Positional { target: String, value: Value },
    Keyword { target: String, value: Value },
    VarPositional { param: String },
    VarKeyword { param: String },
    /// Expands a parameter object into discriminator and member keywords.
    Group { param: String, group_name: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CallableKind {
    Function,
    Constructor,
    Method,
    StaticMethod,
    ClassMethod,
    Property,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptedCallable {
    pub name: String,
    pub origin: String,
    pub kind: CallableKind,
    pub params: Vec<AdaptedParam>,
    pub forwards: Vec<Forward>,
    pub applied: Vec<AnnotationKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDecl {
    pub name: String,
    /// Value reported before the attribute is set.
    pub default: DefaultSpec,
    /// Set when the annotation overrides the library default.
    pub initial: Option<String>,
    pub origin: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptedClass {
    pub name: String,
    pub origin: String,
    pub wrapped_module: String,
    pub wrapped_name: String,
    /// `None` when the class defines no `__init__`: arguments pass through.
    pub constructor: Option<AdaptedCallable>,
    pub attributes: Vec<AttributeDecl>,
    pub methods: Vec<AdaptedCallable>,
    pub applied: Vec<AnnotationKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptedFunction {
    pub callable: AdaptedCallable,
    pub wrapped_module: String,
    pub wrapped_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumDecl {
    pub name: String,
    /// (member name, string value)
    pub members: Vec<(String, String)>,
    pub origins: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantDecl {
    pub name: String,
    pub discriminator_value: String,
    pub members: Vec<AdaptedParam>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDecl {
    pub name: String,
    pub discriminator: String,
    pub variants: Vec<VariantDecl>,
    pub origin: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReexportDecl {
    pub name: String,
    /// Adapted module (library namespace) that defines the element.
    pub from_module: String,
    pub from_name: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptedModule {
    /// Module name in the library namespace, e.g. `minilearn.models`.
    pub qname: String,
    pub enums: Vec<EnumDecl>,
    pub groups: Vec<GroupDecl>,
    pub classes: Vec<AdaptedClass>,
    pub functions: Vec<AdaptedFunction>,
    pub reexports: Vec<ReexportDecl>,
}

impl AdaptedModule {
    fn names(&self) -> impl Iterator<Item = (&str, &str)> {
        self.enums
            .iter()
            .map(|e| (e.name.as_str(), "enum"))
            .chain(self.groups.iter().map(|g| (g.name.as_str(), "group")))
            .chain(self.classes.iter().map(|c| (c.name.as_str(), c.origin.as_str())))
            .chain(self.functions.iter().map(|f| (f.callable.name.as_str(), f.callable.origin.as_str())))
            .chain(self.reexports.iter().map(|r| (r.name.as_str(), "re-export")))
    }
}

/// The API after applying an annotation set, with provenance links.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptedApiModel {
    pub library_name: String,
    pub library_version: String,
    pub package_name: String,
    pub api_sha256: String,
    pub annotations_sha256: String,
    pub modules: Vec<AdaptedModule>,
}

impl AdaptedApiModel {
    pub fn module(&self, qname: &str) -> Option<&AdaptedModule> {
        self.modules.iter().find(|m| m.qname == qname)
    }

    pub fn classes(&self) -> impl Iterator<Item = &AdaptedClass> {
        self.modules.iter().flat_map(|m| m.classes.iter())
    }

    /// Every adapted callable: constructors, methods and functions.
    pub fn callables(&self) -> impl Iterator<Item = &AdaptedCallable> {
        self.modules.iter().flat_map(|m| {
            m.classes
                .iter()
                .flat_map(|c| c.constructor.iter().chain(c.methods.iter()))
                .chain(m.functions.iter().map(|f| &f.callable))
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Package name used when none is given.
pub fn default_package_name(library_name: &str) -> String {
    format!("{library_name}_adapted")
}

const PYTHON_KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue", "def", "del",
    "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal",
    "not", "or", "pass", "raise", "return", "try", "while", "with", "yield",
];

/// Locals and helpers referenced from generated bodies.
const RESERVED: &[&str] = &[
    "self", "cls", "_args", "_kwargs", "_result", "_MISSING", "_trim", "_enum_value", "_group_kwargs",
    "_ParameterGroup", "enum", "value",
];

/// Methods whose forwarding would break the wrapper's own machinery.
const UNWRAPPABLE_DUNDERS: &[&str] = &[
    "__new__", "__init_subclass__", "__class_getitem__", "__getattr__", "__getattribute__", "__setattr__",
    "__delattr__", "__set_name__", "__del__", "__init__",
];

fn generation_error(msg: impl Into<String>) -> Error {
    Error::Generation(msg.into())
}

/// Per-parameter role from the annotation set.
enum Role<'a> {
    Plain,
    Removed(Option<&'a LiteralValue>),
    Attribute(Option<&'a LiteralValue>),
    Enum(&'a EnumSpec),
    Discriminator(&'a GroupSpec),
    Member,
}

struct Annotated<'a> {
    by_target: BTreeMap<String, Vec<&'a Annotation>>,
    removed: BTreeSet<String>,
}

impl<'a> Annotated<'a> {
    fn new(set: &'a AnnotationSet, model: &ApiModel) -> Self {
        let mut by_target: BTreeMap<String, Vec<&Annotation>> = BTreeMap::new();
        for a in &set.annotations {
            let target = model.resolve_text(&a.target).unwrap_or_else(|| a.target.clone());
            by_target.entry(target).or_default().push(a);
        }
        let removed = by_target
            .iter()
            .filter(|(_, anns)| anns.iter().any(|a| a.kind() == AnnotationKind::Remove))
            .map(|(t, _)| t.clone())
            .collect();
        Self { by_target, removed }
    }

    fn get(&self, target: &str) -> &[&'a Annotation] {
        self.by_target.get(target).map(Vec::as_slice).unwrap_or(&[])
    }

    fn kinds(&self, target: &str) -> Vec<AnnotationKind> {
        let mut k: Vec<_> = self.get(target).iter().map(|a| a.kind()).collect();
        k.sort();
        k
    }

    /// The element or any enclosing module, class or callable is removed.
    fn is_removed(&self, text: &str) -> bool {
        let (owner, param) = match text.split_once('#') {
            Some((o, _)) => (o, true),
            None => (text, false),
        };
        if param && self.removed.contains(text) {
            return true;
        }
        let segments: Vec<&str> = owner.split('.').collect();
        (1..=segments.len()).any(|n| self.removed.contains(&segments[..n].join(".")))
    }

    fn destination(&self, target: &str) -> Option<&'a str> {
        self.get(target).iter().find_map(|a| match &a.directive {
            Directive::Move { destination_module } => Some(destination_module.as_str()),
            _ => None,
        })
    }

    fn group(&self, callable: &str) -> Option<&'a GroupSpec> {
        self.get(callable).iter().find_map(|a| match &a.directive {
            Directive::Group(g) => Some(g),
            _ => None,
        })
    }

    fn role(&self, callable: &str, group: Option<&'a GroupSpec>, p: &Parameter) -> Role<'a> {
        if let Some(g) = group {
            if g.discriminator_param == p.name {
                return Role::Discriminator(g);
            }
            if g.variants.iter().any(|v| v.member_params.contains(&p.name)) {
                return Role::Member;
            }
        }
        for a in self.get(&format!("{callable}#{}", p.name)) {
            match &a.directive {
                Directive::Remove { baked_value } => return Role::Removed(baked_value.as_ref()),
                Directive::Attribute { default_override } => return Role::Attribute(default_override.as_ref()),
                Directive::Enum(e) => return Role::Enum(e),
                _ => {}
            }
        }
        Role::Plain
    }
}

fn literal_default(p: &Parameter) -> DefaultSpec {
    match &p.default {
        None => DefaultSpec::Required,
        Some(v) if v.is_literal() => DefaultSpec::Literal(v.text.clone()),
        Some(_) => DefaultSpec::Missing,
    }
}

fn plain_param(p: &Parameter, origin: String) -> AdaptedParam {
    AdaptedParam {
        name: p.name.clone(),
        kind: p.assignment_kind,
        default: literal_default(p),
        ty: ParamType::Plain { hint: p.type_hint_text.clone() },
        origin,
    }
}

/// Per-module auxiliary declarations collected while adapting callables.
#[derive(Default)]
struct ModuleDecls {
    enums: Vec<EnumDecl>,
    groups: Vec<GroupDecl>,
}

impl ModuleDecls {
    fn add_enum(&mut self, spec: &EnumSpec, origin: &str) -> Result<()> {
        let members: Vec<(String, String)> =
            spec.members.iter().map(|m| (m.member_name.clone(), m.string_value.clone())).collect();
        match self.enums.iter_mut().find(|e| e.name == spec.enum_name) {
            Some(existing) if existing.members == members => {
                existing.origins.push(origin.to_owned());
                Ok(())
            }
            Some(existing) => Err(generation_error(format!(
                "enum `{}` is declared with different members for {} and {origin}",
                spec.enum_name,
                existing.origins.join(", ")
            ))),
            None => {
                self.enums.push(EnumDecl { name: spec.enum_name.clone(), members, origins: vec![origin.to_owned()] });
                Ok(())
            }
        }
    }
}

struct CallableCx<'a> {
    annotated: &'a Annotated<'a>,
    decls: &'a mut ModuleDecls,
}

impl CallableCx<'_> {
    fn adapt(&mut self, f: &Callable, kind: CallableKind, name: &str) -> Result<(AdaptedCallable, Vec<AttributeDecl>)> {
        let origin = f.qname.render();
        let group = self.annotated.group(&origin);
        let has_var_positional = f.parameters.iter().any(|p| p.assignment_kind == AssignmentKind::VarPositional);
        let mut params = Vec::new();
        let mut forwards = Vec::new();
        let mut attributes = Vec::new();
        let mut applied: BTreeSet<AnnotationKind> = self.annotated.kinds(&origin).into_iter().collect();

        for p in &f.parameters {
            let pq = format!("{origin}#{}", p.name);
            let positional = p.assignment_kind == AssignmentKind::PositionalOnly
                || (p.assignment_kind == AssignmentKind::PositionalOrKeyword && has_var_positional);
            let forward = |value: Value| {
                if positional {
                    Forward::Positional { target: p.name.clone(), value }
                } else {
                    Forward::Keyword { target: p.name.clone(), value }
                }
            };
            let role = self.annotated.role(&origin, group, p);
            if !matches!(role, Role::Plain | Role::Member | Role::Discriminator(_)) {
                applied.extend(self.annotated.kinds(&pq));
            }
            match role {
                Role::Plain => match p.assignment_kind {
                    AssignmentKind::VarPositional => {
                        params.push(plain_param(p, pq));
                        forwards.push(Forward::VarPositional { param: p.name.clone() });
                    }
                    AssignmentKind::VarKeyword => {
                        params.push(plain_param(p, pq));
                        forwards.push(Forward::VarKeyword { param: p.name.clone() });
                    }
                    _ => {
                        let param = plain_param(p, pq);
                        let optional = param.default == DefaultSpec::Missing;
                        params.push(param);
                        forwards.push(forward(Value::Param { name: p.name.clone(), optional }));
                    }
                },
                Role::Removed(baked) => {
                    if p.assignment_kind.is_variadic() {
                        continue;
                    }
                    let value = match baked {
                        Some(v) => Value::Baked { text: v.text.clone() },
                        None => Value::Omitted,
                    };
                    forwards.push(forward(value));
                }
                Role::Attribute(initial) => {
                    if positional {
                        return Err(generation_error(format!("{pq}: an attribute cannot be forwarded positionally")));
                    }
                    attributes.push(AttributeDecl {
                        name: p.name.clone(),
                        default: literal_default(p),
                        initial: initial.map(|v| v.text.clone()),
                        origin: pq,
                    });
                }
                Role::Enum(spec) => {
                    self.decls.add_enum(spec, &pq)?;
                    let default = match &p.default {
                        None => DefaultSpec::Required,
                        Some(d) if d.tag == LiteralTag::None => DefaultSpec::Literal("None".into()),
                        Some(d) => {
                            let s = d.as_str_value().unwrap_or_default();
                            let member = spec.members.iter().find(|m| m.string_value == s).ok_or_else(|| {
                                generation_error(format!("{pq}: default {} is not an enum member", d.text))
                            })?;
                            DefaultSpec::Literal(format!("{}.{}", spec.enum_name, member.member_name))
                        }
                    };
                    let allow_none = default == DefaultSpec::Literal("None".into());
                    params.push(AdaptedParam {
                        name: p.name.clone(),
                        kind: p.assignment_kind,
                        default,
                        ty: ParamType::Enum { enum_name: spec.enum_name.clone() },
                        origin: pq,
                    });
                    forwards.push(forward(Value::Enum {
                        name: p.name.clone(),
                        enum_name: spec.enum_name.clone(),
                        allow_none,
                    }));
                }
                Role::Discriminator(g) => {
                    if positional {
                        return Err(generation_error(format!(
                            "{pq}: a group discriminator cannot be forwarded positionally"
                        )));
                    }
                    self.add_group(g, f, &origin)?;
                    params.push(AdaptedParam {
                        name: p.name.clone(),
                        kind: p.assignment_kind,
                        default: if p.default.is_some() { DefaultSpec::Literal("None".into()) } else { DefaultSpec::Required },
                        ty: ParamType::Group { group_name: g.group_name.clone() },
                        origin: pq,
                    });
                    forwards.push(Forward::Group { param: p.name.clone(), group_name: g.group_name.clone() });
                }
                Role::Member => {
                    if positional {
                        return Err(generation_error(format!("{pq}: a group member cannot be forwarded positionally")));
                    }
                }
            }
        }

        check_positional_order(&origin, &forwards)?;
        let callable = AdaptedCallable {
            name: name.to_owned(),
            origin,
            kind,
            params,
            forwards,
            applied: applied.into_iter().collect(),
        };
        check_param_names(&callable)?;
        Ok((callable, attributes))
    }

    fn add_group(&mut self, g: &GroupSpec, f: &Callable, origin: &str) -> Result<()> {
        let variants = g
            .variants
            .iter()
            .map(|v| VariantDecl {
                name: v.variant_name.clone(),
                discriminator_value: v.discriminator_value.clone(),
                members: v
                    .member_params
                    .iter()
                    .filter_map(|m| f.parameter(m))
                    .map(|p| {
                        let mut param = plain_param(p, format!("{origin}#{}", p.name));
                        param.kind = AssignmentKind::PositionalOrKeyword;
                        param
                    })
                    .collect(),
            })
            .collect();
        let decl = GroupDecl {
            name: g.group_name.clone(),
            discriminator: g.discriminator_param.clone(),
            variants,
            origin: format!("{origin}#{}", g.discriminator_param),
        };
        if self.decls.groups.iter().any(|existing| existing.name == decl.name) {
            return Err(generation_error(format!("group `{}` is declared twice in one module ({})", decl.name, decl.origin)));
        }
        self.decls.groups.push(decl);
        Ok(())
    }
}

/// A positional argument that may be absent must not precede one that is
/// always present: the later value would shift into the earlier slot.
fn check_positional_order(origin: &str, forwards: &[Forward]) -> Result<()> {
    let mut gap: Option<&str> = None;
    for fw in forwards {
        if let Forward::Positional { target, value } = fw {
            match (gap, value.may_be_absent()) {
                (None, true) => gap = Some(target),
                (Some(g), false) => {
                    return Err(generation_error(format!(
                        "{origin}: positional parameter `{target}` follows `{g}`, which may be omitted"
                    )))
                }
                _ => {}
            }
        }
    }
    Ok(())
}

fn check_identifier(name: &str, what: &str, origin: &str) -> Result<()> {
    if PYTHON_KEYWORDS.contains(&name) || !crate::model::is_identifier(name) {
        return Err(generation_error(format!("{origin}: {what} `{name}` is not a usable Python identifier")));
    }
    Ok(())
}

fn check_param_names(c: &AdaptedCallable) -> Result<()> {
    let mut seen = BTreeSet::new();
    for p in &c.params {
        check_identifier(&p.name, "parameter", &c.origin)?;
        if RESERVED.contains(&p.name.as_str()) {
            return Err(generation_error(format!(
                "{}: parameter `{}` collides with a name used by the generated code",
                c.origin, p.name
            )));
        }
        if !seen.insert(p.name.as_str()) {
            return Err(generation_error(format!("{}: duplicate parameter `{}`", c.origin, p.name)));
        }
    }
    Ok(())
}

fn callable_kind(f: &Callable) -> CallableKind {
    match f.method_kind() {
        MethodKind::Instance => CallableKind::Method,
        MethodKind::Static => CallableKind::StaticMethod,
        MethodKind::Class => CallableKind::ClassMethod,
        MethodKind::Property => CallableKind::Property,
    }
}

fn module_of(text: &str) -> &str {
    text.rsplit_once('.').map_or(text, |(m, _)| m)
}

fn last_segment(text: &str) -> &str {
    text.rsplit('.').next().unwrap_or(text)
}

/// Where a public element lives in the adapted package: its defining
/// module when that path is public, else the module of its first public alias.
fn public_home(model: &ApiModel, defining: &str) -> Option<(String, String)> {
    if !defining.split('.').any(is_private_segment) {
        return Some((module_of(defining).to_owned(), last_segment(defining).to_owned()));
    }
    model
        .aliases_of(defining)
        .iter()
        .filter(|a| !a.split('.').any(is_private_segment))
        .min()
        .map(|a| (module_of(a).to_owned(), last_segment(a).to_owned()))
}

/// Applies `set` to `model`. The set must validate without errors.
pub fn infer_adapted_api(model: &ApiModel, set: &AnnotationSet, package_name: Option<&str>) -> Result<AdaptedApiModel> {
    set.check_model(model)?;
    let validation = validate(set, model, None);
    if !validation.is_ok() {
        return Err(Error::Validation(validation));
    }
    let package_name = package_name.map(str::to_owned).unwrap_or_else(|| default_package_name(model.library_name()));
    check_identifier(&package_name, "package name", model.library_name())?;
    if package_name == model.library_name() {
        return Err(generation_error("the package name must differ from the wrapped library's name"));
    }
    let annotated = Annotated::new(set, model);

    let mut modules: BTreeMap<String, AdaptedModule> = BTreeMap::new();
    let mut decls: BTreeMap<String, ModuleDecls> = BTreeMap::new();
    let mut homes: BTreeMap<String, (String, String)> = BTreeMap::new();

    for m in model.modules() {
        let text = m.qname.render();
        if !text.split('.').any(is_private_segment) && !annotated.is_removed(&text) {
            modules.entry(text.clone()).or_insert_with(|| AdaptedModule { qname: text, ..Default::default() });
        }
    }

    for class in model.classes() {
        let origin = class.qname.render();
        if annotated.is_removed(&origin) || !model.is_public_text(&origin).unwrap_or(false) {
            continue;
        }
        let Some((mut home, name)) = public_home(model, &origin) else { continue };
        if let Some(dest) = annotated.destination(&origin) {
            home = dest.to_owned();
        }
        let module_decls = decls.entry(home.clone()).or_default();
        let mut cx = CallableCx { annotated: &annotated, decls: module_decls };
        let adapted = adapt_class(&mut cx, model, class, &origin, &name)?;
        homes.insert(origin, (home.clone(), name));
        modules.entry(home.clone()).or_insert_with(|| AdaptedModule { qname: home, ..Default::default() }).classes.push(adapted);
    }

    for m in model.modules() {
        for f in &m.functions {
            let origin = f.qname.render();
            if annotated.is_removed(&origin) || !model.is_public_text(&origin).unwrap_or(false) {
                continue;
            }
            let Some((mut home, name)) = public_home(model, &origin) else { continue };
            if let Some(dest) = annotated.destination(&origin) {
                home = dest.to_owned();
            }
            let module_decls = decls.entry(home.clone()).or_default();
            let mut cx = CallableCx { annotated: &annotated, decls: module_decls };
            let (callable, _) = cx.adapt(f, CallableKind::Function, &name)?;
            homes.insert(origin, (home.clone(), name));
            modules
                .entry(home.clone())
                .or_insert_with(|| AdaptedModule { qname: home, ..Default::default() })
                .functions
                .push(AdaptedFunction {
                    callable,
                    wrapped_module: m.qname.render(),
                    wrapped_name: f.name().to_owned(),
                });
        }
    }

    for (alias, target) in model.aliases() {
        if alias.split('.').any(is_private_segment) {
            continue;
        }
        let Some((home, name)) = homes.get(target) else { continue };
        let alias_module = module_of(alias);
        let alias_name = last_segment(alias);
        if (alias_module, alias_name) == (home.as_str(), name.as_str()) {
            continue;
        }
        if let Some(m) = modules.get_mut(alias_module) {
            m.reexports.push(ReexportDecl { name: alias_name.to_owned(), from_module: home.clone(), from_name: name.clone() });
        }
    }

    for (home, d) in decls {
        let m = modules.get_mut(&home).expect("declarations belong to an emitted module");
        m.enums = d.enums;
        m.groups = d.groups;
    }

    let mut out = Vec::new();
    for (_, mut m) in modules {
        m.enums.sort_by(|a, b| a.name.cmp(&b.name));
        m.groups.sort_by(|a, b| a.name.cmp(&b.name));
        m.classes.sort_by(|a, b| a.name.cmp(&b.name));
        m.functions.sort_by(|a, b| a.callable.name.cmp(&b.callable.name));
        m.reexports.sort_by(|a, b| a.name.cmp(&b.name));
        m.reexports.dedup();
        let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
        for (name, origin) in m.names() {
            check_identifier(name, "name", &m.qname)?;
            if let Some(other) = seen.insert(name, origin) {
                return Err(generation_error(format!(
                    "name `{name}` is defined twice in module `{}` ({other}, {origin})",
                    m.qname
                )));
            }
        }
        out.push(m);
    }

    Ok(AdaptedApiModel {
        library_name: model.library_name().to_owned(),
        library_version: model.library_version().to_owned(),
        package_name,
        api_sha256: sha256_hex(model.to_json().as_bytes()),
        annotations_sha256: sha256_hex(set.to_json().as_bytes()),
        modules: out,
    })
}

fn adapt_class(cx: &mut CallableCx<'_>, model: &ApiModel, class: &Class, origin: &str, name: &str) -> Result<AdaptedClass> {
    let mut applied: BTreeSet<AnnotationKind> = cx.annotated.kinds(origin).into_iter().collect();
    applied.remove(&AnnotationKind::Remove);
    let (constructor, attributes) = match class.constructor() {
        Some(ctor) => {
            let (c, attrs) = cx.adapt(ctor, CallableKind::Constructor, "__init__")?;
            (Some(c), attrs)
        }
        None => (None, Vec::new()),
    };
    let mut methods = Vec::new();
    for f in &class.methods {
        let text = f.qname.render();
        if f.is_constructor
            || UNWRAPPABLE_DUNDERS.contains(&f.name())
            || cx.annotated.is_removed(&text)
            || !model.is_public_text(&text).unwrap_or(false)
        {
            continue;
        }
        let (m, _) = cx.adapt(f, callable_kind(f), f.name())?;
        methods.push(m);
    }
    let mut members: BTreeMap<&str, &str> = BTreeMap::new();
    for reserved in ["_instance", "_wrapped", "_init_args", "_init_kwargs", "_attributes"] {
        members.insert(reserved, "generated code");
    }
    for m in &methods {
        check_identifier(&m.name, "method", &m.origin)?;
        if let Some(other) = members.insert(&m.name, &m.origin) {
            return Err(generation_error(format!("{}: `{}` collides with {other}", m.origin, m.name)));
        }
    }
    for a in &attributes {
        if let Some(other) = members.insert(&a.name, &a.origin) {
            return Err(generation_error(format!("{}: attribute `{}` collides with {other}", a.origin, a.name)));
        }
    }
    Ok(AdaptedClass {
        name: name.to_owned(),
        origin: origin.to_owned(),
        wrapped_module: module_of(origin).to_owned(),
        wrapped_name: class.name().to_owned(),
        constructor,
        attributes,
        methods,
        applied: applied.into_iter().collect(),
    })
}

/// Python source of a string value.
pub(crate) fn py_str(s: &str) -> String {
    python_str_repr(s)
}
