use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    py_str, sha256_hex, AdaptedApiModel, AdaptedCallable, AdaptedClass, AdaptedFunction, AdaptedModule, AdaptedParam,
    AttributeDecl, CallableKind, DefaultSpec, EnumDecl, Forward, GroupDecl, Value,
};
use crate::annotations::AnnotationKind;
use crate::error::{Error, Result};
use crate::model::AssignmentKind;

const RUNTIME_SOURCE: &str = include_str!("runtime.py");
const MAX_LINE: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedFile {
    /// `/`-separated path starting with the package directory.
    pub path: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedSource {
    pub package_name: String,
    pub files: Vec<GeneratedFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub path: String,
    pub text: String,
    pub sha256: String,
}

/// Transport form of a generated package.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceArchive {
    pub package_name: String,
    pub files: Vec<ArchiveEntry>,
    pub digest: String,
}

impl GeneratedSource {
    pub fn file(&self, path: &str) -> Option<&GeneratedFile> {
        self.files.iter().find(|f| f.path == path)
    }

    /// Hash over every path and text, in path order.
    pub fn digest(&self) -> String {
        let mut buf = Vec::new();
        for f in &self.files {
            buf.extend_from_slice(f.path.as_bytes());
            buf.push(0);
            buf.extend_from_slice(f.text.as_bytes());
            buf.push(0);
        }
        sha256_hex(&buf)
    }

    pub fn archive(&self) -> SourceArchive {
        SourceArchive {
            package_name: self.package_name.clone(),
            files: self
                .files
                .iter()
                .map(|f| ArchiveEntry { path: f.path.clone(), text: f.text.clone(), sha256: sha256_hex(f.text.as_bytes()) })
                .collect(),
            digest: self.digest(),
        }
    }

    /// Writes the package under `dir`, creating directories as needed.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        for f in &self.files {
            let path = dir.join(&f.path);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            std::fs::write(&path, &f.text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// Emits the Python wrapper package for `adapted`.
pub fn render_wrappers(adapted: &AdaptedApiModel) -> GeneratedSource {
    let lib = adapted.library_name.as_str();
    let mut all: BTreeSet<String> = BTreeSet::new();
    for m in &adapted.modules {
        let segments: Vec<&str> = m.qname.split('.').collect();
        for n in 1..=segments.len() {
            all.insert(segments[..n].join("."));
        }
    }
    all.insert(lib.to_owned());
    let is_package = |q: &str| q == lib || all.iter().any(|o| o.len() > q.len() && o.starts_with(q) && o.as_bytes()[q.len()] == b'.');

    let header = header(adapted);
    let mut files = vec![GeneratedFile {
        path: format!("{}/_runtime.py", adapted.package_name),
        text: format!("{header}{RUNTIME_SOURCE}"),
    }];
    for q in &all {
        let rest: Vec<&str> = q.split('.').skip(1).collect();
        let mut path = vec![adapted.package_name.as_str()];
        path.extend(&rest);
        let path = if is_package(q) {
            format!("{}/__init__.py", path.join("/"))
        } else {
            format!("{}.py", path.join("/"))
        };
        let text = match adapted.module(q) {
            Some(m) => render_module(adapted, m, &header),
            None => format!("{header}from __future__ import annotations\n"),
        };
        files.push(GeneratedFile { path, text });
    }
    files.sort_by(|a, b| a.path.cmp(&b.path));
    GeneratedSource { package_name: adapted.package_name.clone(), files }
}

fn header(adapted: &AdaptedApiModel) -> String {
    format!(
        "# Generated by slimapi from {} {}. Do not edit.\n# api sha256: {}\n# annotations sha256: {}\n",
        adapted.library_name, adapted.library_version, adapted.api_sha256, adapted.annotations_sha256
    )
}

/// Module name in the generated package's namespace.
fn adapted_module(adapted: &AdaptedApiModel, q: &str) -> String {
    match q.split_once('.') {
        Some((_, rest)) => format!("{}.{rest}", adapted.package_name),
        None => adapted.package_name.clone(),
    }
}

#[derive(Default)]
struct Out {
    text: String,
}

impl Out {
    fn line(&mut self, indent: usize, s: impl AsRef<str>) {
        let s = s.as_ref();
        if !s.is_empty() {
            for _ in 0..indent {
                self.text.push_str("    ");
            }
            self.text.push_str(s);
        }
        self.text.push('\n');
    }

    fn blank(&mut self, n: usize) {
        for _ in 0..n {
            self.text.push('\n');
        }
    }
}

#[derive(Default)]
struct RuntimeUse {
    missing: bool,
    trim: bool,
    enum_value: bool,
    group_kwargs: bool,
    group_base: bool,
}

impl RuntimeUse {
    fn note_callable(&mut self, c: &AdaptedCallable) {
        self.note_params(&c.params);
        for f in &c.forwards {
            match f {
                Forward::Group { .. } => self.group_kwargs = true,
                Forward::Positional { value, .. } | Forward::Keyword { value, .. } => match value {
                    Value::Enum { .. } => self.enum_value = true,
                    Value::Omitted => self.missing = true,
                    _ => {}
                },
                _ => {}
            }
        }
        if c.forwards.iter().any(|f| matches!(f, Forward::Positional { value, .. } if value.may_be_absent())) {
            self.trim = true;
        }
    }

    fn note_params(&mut self, params: &[AdaptedParam]) {
        if params.iter().any(|p| p.default == DefaultSpec::Missing) {
            self.missing = true;
        }
    }

    fn import_line(&self, package: &str) -> Option<String> {
        let mut names = Vec::new();
        if self.missing {
            names.push("MISSING as _MISSING");
        }
        if self.group_base {
            names.push("ParameterGroup as _ParameterGroup");
        }
        if self.enum_value {
            names.push("enum_value as _enum_value");
        }
        if self.group_kwargs {
            names.push("group_kwargs as _group_kwargs");
        }
        if self.trim {
            names.push("trim as _trim");
        }
        (!names.is_empty()).then(|| format!("from {package}._runtime import {}", names.join(", ")))
    }
}

fn render_module(adapted: &AdaptedApiModel, m: &AdaptedModule, header: &str) -> String {
    let mut uses = RuntimeUse { group_base: !m.groups.is_empty(), ..Default::default() };
    for c in &m.classes {
        for callable in c.constructor.iter().chain(&c.methods) {
            uses.note_callable(callable);
        }
    }
    for f in &m.functions {
        uses.note_callable(&f.callable);
    }
    for g in &m.groups {
        for v in &g.variants {
            uses.note_params(&v.members);
        }
    }

    let mut out = Out::default();
    out.text.push_str(header);
    out.line(0, "from __future__ import annotations");
    if !m.enums.is_empty() {
        out.blank(1);
        out.line(0, "import enum");
    }

    let mut wrapped: Vec<String> = m
        .classes
        .iter()
        .map(|c| (c.wrapped_module.as_str(), c.wrapped_name.as_str(), c.name.as_str()))
        .chain(m.functions.iter().map(|f| (f.wrapped_module.as_str(), f.wrapped_name.as_str(), f.callable.name.as_str())))
        .map(|(module, name, local)| format!("from {module} import {name} as _w_{local}"))
        .collect();
    wrapped.sort();
    if !wrapped.is_empty() {
        out.blank(1);
        for l in &wrapped {
            out.line(0, l);
        }
    }

    let mut local: Vec<String> = uses.import_line(&adapted.package_name).into_iter().collect();
    let mut same_module = Vec::new();
    for r in &m.reexports {
        if r.from_module == m.qname {
            same_module.push(r);
            continue;
        }
        let from = adapted_module(adapted, &r.from_module);
        local.push(if r.from_name == r.name {
            format!("from {from} import {}", r.name)
        } else {
            format!("from {from} import {} as {}", r.from_name, r.name)
        });
    }
    local.sort();
    if !local.is_empty() {
        out.blank(1);
        for l in &local {
            out.line(0, l);
        }
    }

    let mut exported: Vec<&str> = m
        .enums
        .iter()
        .map(|e| e.name.as_str())
        .chain(m.groups.iter().map(|g| g.name.as_str()))
        .chain(m.classes.iter().map(|c| c.name.as_str()))
        .chain(m.functions.iter().map(|f| f.callable.name.as_str()))
        .chain(m.reexports.iter().map(|r| r.name.as_str()))
        .collect();
    exported.sort_unstable();
    out.blank(1);
    if exported.is_empty() {
        out.line(0, "__all__ = []");
    } else {
        out.line(0, "__all__ = [");
        for name in &exported {
            out.line(1, format!("{},", py_str(name)));
        }
        out.line(0, "]");
    }

    for e in &m.enums {
        out.blank(2);
        render_enum(&mut out, e);
    }
    for g in &m.groups {
        out.blank(2);
        render_group(&mut out, g);
    }
    for c in &m.classes {
        out.blank(2);
        render_class(&mut out, c);
    }
    for f in &m.functions {
        out.blank(2);
        render_function(&mut out, f);
    }
    if !same_module.is_empty() {
        out.blank(2);
        for r in same_module {
            out.line(0, format!("{} = {}", r.name, r.from_name));
        }
    }
    out.text
}

fn docstring(out: &mut Out, indent: usize, text: &str) {
    out.line(indent, format!("\"\"\"{text}\"\"\""));
}

/// `pkg.f#x` becomes ``` ``pkg.f``, parameter ``x`` ```.
fn quoted(origin: &str) -> String {
    format!("``{}``", origin.replace('#', "``, parameter ``"))
}

fn provenance(origin: &str, applied: &[AnnotationKind]) -> String {
    if applied.is_empty() {
        format!("Adapted from {}.", quoted(origin))
    } else {
        let kinds: Vec<String> = applied.iter().map(|k| format!("@{k}")).collect();
        format!("Adapted from {} ({}).", quoted(origin), kinds.join(", "))
    }
}

fn render_enum(out: &mut Out, e: &EnumDecl) {
    out.line(0, format!("class {}(enum.Enum):", e.name));
    let origins: Vec<String> = e.origins.iter().map(|o| quoted(o)).collect();
    docstring(out, 1, &format!("Accepted values of {}.", origins.join("; ")));
    out.blank(1);
    for (name, value) in &e.members {
        out.line(1, format!("{name} = {}", py_str(value)));
    }
}

fn render_group(out: &mut Out, g: &GroupDecl) {
    out.line(0, format!("class {}(_ParameterGroup):", g.name));
    docstring(out, 1, &format!("Parameter object for {}.", quoted(&g.origin)));
    out.blank(1);
    out.line(1, "__slots__ = ()");
    let constants: Vec<_> = g.variants.iter().filter(|v| v.members.is_empty()).collect();
    if !constants.is_empty() {
        out.blank(1);
        for v in &constants {
            out.line(1, format!("{}: {}", v.name, g.name));
        }
    }
    for v in g.variants.iter().filter(|v| !v.members.is_empty()) {
        out.blank(1);
        out.line(1, "@staticmethod");
        let params: Vec<String> = std::iter::once("*".to_owned()).chain(v.members.iter().map(param_text)).collect();
        def_line(out, 1, &v.name, &params, Some(&g.name));
        let mut entries = vec![(py_str(&g.discriminator), py_str(&v.discriminator_value))];
        let mut conditional = Vec::new();
        for p in &v.members {
            if p.default == DefaultSpec::Missing {
                conditional.push(&p.name);
            } else {
                entries.push((py_str(&p.name), p.name.clone()));
            }
        }
        dict_assign(out, 2, "_kwargs", &entries);
        for name in conditional {
            out.line(2, format!("if {name} is not _MISSING:"));
            out.line(3, format!("_kwargs[{}] = {name}", py_str(name)));
        }
        out.line(2, format!("return {}._make(_kwargs)", g.name));
    }
    if !constants.is_empty() {
        out.blank(2);
        for v in constants {
            out.line(
                0,
                format!(
                    "{}.{} = {}._make({{{}: {}}})",
                    g.name,
                    v.name,
                    g.name,
                    py_str(&g.discriminator),
                    py_str(&v.discriminator_value)
                ),
            );
        }
    }
}

fn param_text(p: &AdaptedParam) -> String {
    let prefix = match p.kind {
        AssignmentKind::VarPositional => "*",
        AssignmentKind::VarKeyword => "**",
        _ => "",
    };
    let mut s = format!("{prefix}{}", p.name);
    let hint = p.hint();
    if let Some(h) = &hint {
        let _ = write!(s, ": {h}");
    }
    let default = match &p.default {
        DefaultSpec::Required => None,
        DefaultSpec::Literal(t) => Some(t.as_str()),
        DefaultSpec::Missing => Some("_MISSING"),
    };
    if let Some(d) = default {
        if hint.is_some() {
            let _ = write!(s, " = {d}");
        } else {
            let _ = write!(s, "={d}");
        }
    }
    s
}

/// Parameter list with `/` and `*` markers placed where the kinds require.
fn signature(params: &[AdaptedParam], receiver: Option<&str>) -> Vec<String> {
    let mut out: Vec<String> = receiver.map(str::to_owned).into_iter().collect();
    let has_var_positional = params.iter().any(|p| p.kind == AssignmentKind::VarPositional);
    let last_positional_only = params.iter().rposition(|p| p.kind == AssignmentKind::PositionalOnly);
    let mut star_done = has_var_positional;
    for (i, p) in params.iter().enumerate() {
        if p.kind == AssignmentKind::KeywordOnly && !star_done {
            out.push("*".into());
            star_done = true;
        }
        out.push(param_text(p));
        if Some(i) == last_positional_only {
            out.push("/".into());
        }
    }
    out
}

fn def_line(out: &mut Out, indent: usize, name: &str, params: &[String], ret: Option<&str>) {
    let ret = ret.map(|r| format!(" -> {r}")).unwrap_or_default();
    let single = format!("def {name}({}){ret}:", params.join(", "));
    if single.len() + indent * 4 <= MAX_LINE {
        out.line(indent, single);
        return;
    }
    out.line(indent, format!("def {name}("));
    for p in params {
        out.line(indent + 2, format!("{p},"));
    }
    out.line(indent, format!("){ret}:"));
}

fn dict_assign(out: &mut Out, indent: usize, var: &str, entries: &[(String, String)]) {
    let inner: Vec<String> = entries.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    let single = format!("{var} = {{{}}}", inner.join(", "));
    if single.len() + indent * 4 <= MAX_LINE || entries.is_empty() {
        out.line(indent, single);
        return;
    }
    out.line(indent, format!("{var} = {{"));
    for e in inner {
        out.line(indent + 1, format!("{e},"));
    }
    out.line(indent, "}");
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Param { name, .. } => name.clone(),
        Value::Enum { name, enum_name, allow_none } => {
            format!("_enum_value({name}, {enum_name}, {})", if *allow_none { "True" } else { "False" })
        }
        Value::Baked { text } => text.clone(),
        Value::Omitted => "_MISSING".into(),
    }
}

/// Emits the statements that build `_args`/`_kwargs`; returns the call argument text.
fn forward_body(out: &mut Out, indent: usize, c: &AdaptedCallable) -> (String, bool) {
    let var_positional = c.forwards.iter().find_map(|f| match f {
        Forward::VarPositional { param } => Some(param.as_str()),
        _ => None,
    });
    let positional: Vec<&Value> = c
        .forwards
        .iter()
        .filter_map(|f| match f {
            Forward::Positional { value, .. } => Some(value),
            _ => None,
        })
        .collect();
    let has_args = !positional.is_empty() || var_positional.is_some();
    if !positional.is_empty() {
        let items: Vec<String> = positional.iter().map(|v| value_text(v)).collect();
        if positional.iter().any(|v| v.may_be_absent()) {
            let more = var_positional.map(|p| format!("bool({p})")).unwrap_or_else(|| "False".into());
            out.line(indent, format!("_args = _trim([{}], {more})", items.join(", ")));
        } else {
            out.line(indent, format!("_args = [{}]", items.join(", ")));
        }
        if let Some(p) = var_positional {
            out.line(indent, format!("_args.extend({p})"));
        }
    } else if let Some(p) = var_positional {
        out.line(indent, format!("_args = list({p})"));
    }

    let mut entries = Vec::new();
    let mut after: Vec<(String, Option<String>)> = Vec::new();
    for f in &c.forwards {
        match f {
            Forward::Keyword { target, value } => match value {
                Value::Omitted => {}
                Value::Param { name, optional: true } => after.push((
                    format!("if {name} is not _MISSING:"),
                    Some(format!("_kwargs[{}] = {name}", py_str(target))),
                )),
                v => entries.push((py_str(target), value_text(v))),
            },
            Forward::Group { param, group_name } => {
                after.push((format!("_kwargs.update(_group_kwargs({param}, {group_name}))"), None))
            }
            Forward::VarKeyword { param } => after.push((format!("_kwargs.update({param})"), None)),
            _ => {}
        }
    }
    dict_assign(out, indent, "_kwargs", &entries);
    for (first, nested) in after {
        out.line(indent, first);
        if let Some(n) = nested {
            out.line(indent + 1, n);
        }
    }
    let call = if has_args { "*_args, **_kwargs" } else { "**_kwargs" };
    (call.to_owned(), has_args)
}

fn render_class(out: &mut Out, c: &AdaptedClass) {
    out.line(0, format!("class {}:", c.name));
    docstring(out, 1, &provenance(&c.origin, &c.applied));

    out.blank(1);
    match &c.constructor {
        Some(ctor) => {
            def_line(out, 1, "__init__", &signature(&ctor.params, Some("self")), None);
            docstring(out, 2, &provenance(&ctor.origin, &ctor.applied));
            let (_, has_args) = forward_body(out, 2, ctor);
            out.line(2, if has_args { "self._init_args = tuple(_args)" } else { "self._init_args = ()" });
            out.line(2, "self._init_kwargs = _kwargs");
        }
        None => {
            out.line(1, "def __init__(self, *args, **kwargs):");
            out.line(2, "self._init_args = args");
            out.line(2, "self._init_kwargs = kwargs");
        }
    }
    let initial: Vec<(String, String)> = c
        .attributes
        .iter()
        .filter_map(|a| a.initial.as_ref().map(|v| (py_str(&a.name), v.clone())))
        .collect();
    dict_assign(out, 2, "self._attributes", &initial);
    out.line(2, "self._wrapped = None");

    out.blank(1);
    out.line(1, "def _instance(self):");
    out.line(2, "if self._wrapped is None:");
    out.line(3, format!("self._wrapped = _w_{}(*self._init_args, **self._init_kwargs, **self._attributes)", c.name));
    out.line(2, "return self._wrapped");

    for a in &c.attributes {
        out.blank(1);
        render_attribute(out, a);
    }
    for m in &c.methods {
        out.blank(1);
        render_method(out, c, m);
    }
}

fn render_attribute(out: &mut Out, a: &AttributeDecl) {
    let key = py_str(&a.name);
    out.line(1, "@property");
    out.line(1, format!("def {}(self):", a.name));
    docstring(out, 2, &provenance(&a.origin, &[AnnotationKind::Attribute]));
    out.line(2, format!("if {key} in self._attributes:"));
    out.line(3, format!("return self._attributes[{key}]"));
    match &a.default {
        DefaultSpec::Literal(t) => out.line(2, format!("return {t}")),
        _ => out.line(2, format!("return getattr(self._instance(), {key})")),
    }
    out.blank(1);
    out.line(1, format!("@{}.setter", a.name));
    out.line(1, format!("def {}(self, value):", a.name));
    out.line(2, format!("self._attributes[{key}] = value"));
    out.line(2, "if self._wrapped is not None:");
    out.line(3, format!("setattr(self._wrapped, {key}, value)"));
}

fn render_method(out: &mut Out, c: &AdaptedClass, m: &AdaptedCallable) {
    let doc = provenance(&m.origin, &m.applied);
    match m.kind {
        CallableKind::Property => {
            out.line(1, "@property");
            out.line(1, format!("def {}(self):", m.name));
            docstring(out, 2, &doc);
            out.line(2, format!("return self._instance().{}", m.name));
            out.blank(1);
            out.line(1, format!("@{}.setter", m.name));
            out.line(1, format!("def {}(self, value):", m.name));
            out.line(2, format!("setattr(self._instance(), {}, value)", py_str(&m.name)));
        }
        CallableKind::StaticMethod | CallableKind::ClassMethod => {
            let (decorator, receiver) =
                if m.kind == CallableKind::StaticMethod { ("@staticmethod", None) } else { ("@classmethod", Some("cls")) };
            out.line(1, decorator);
            def_line(out, 1, &m.name, &signature(&m.params, receiver), None);
            docstring(out, 2, &doc);
            let (call, _) = forward_body(out, 2, m);
            out.line(2, format!("return _w_{}.{}({call})", c.name, m.name));
        }
        _ => {
            def_line(out, 1, &m.name, &signature(&m.params, Some("self")), None);
            docstring(out, 2, &doc);
            let (call, _) = forward_body(out, 2, m);
            out.line(2, format!("_result = self._instance().{}({call})", m.name));
            out.line(2, "return self if _result is self._wrapped else _result");
        }
    }
}

fn render_function(out: &mut Out, f: &AdaptedFunction) {
    let c = &f.callable;
    def_line(out, 0, &c.name, &signature(&c.params, None), None);
    docstring(out, 1, &provenance(&c.origin, &c.applied));
    let (call, _) = forward_body(out, 1, c);
    out.line(1, format!("return _w_{}({call})", c.name));
}
