//! The API surface of one library version.

mod literal;
mod qname;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

pub use literal::{python_float_repr, python_str_repr, LiteralTag, LiteralValue, DYNAMIC_TEXT};
pub(crate) use qname::split_param;
pub use qname::{is_identifier, is_private_segment, render_qname, ElementKind, QualifiedName};

use crate::error::{Error, Result};
use crate::json::{Document, API_SCHEMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignmentKind {
    PositionalOnly,
    PositionalOrKeyword,
    VarPositional,
    KeywordOnly,
    VarKeyword,
}

impl AssignmentKind {
    pub fn is_variadic(self) -> bool {
        matches!(self, AssignmentKind::VarPositional | AssignmentKind::VarKeyword)
    }

    pub fn accepts_positional(self) -> bool {
        matches!(self, AssignmentKind::PositionalOnly | AssignmentKind::PositionalOrKeyword)
    }

    pub fn accepts_keyword(self) -> bool {
        matches!(self, AssignmentKind::PositionalOrKeyword | AssignmentKind::KeywordOnly)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub position: usize,
    pub assignment_kind: AssignmentKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub default: Option<LiteralValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub type_hint_text: Option<String>,
}

impl Parameter {
    pub fn is_required(&self) -> bool {
        self.default.is_none() && !self.assignment_kind.is_variadic()
    }
}

/// How a callable is bound when it lives inside a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Instance,
    Static,
    Class,
    Property,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Callable {
    #[serde(with = "qname_text::function")]
    pub qname: QualifiedName,
    pub parameters: Vec<Parameter>,
    pub is_constructor: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub docstring: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decorators: Vec<String>,
}

impl Callable {
    pub fn name(&self) -> &str {
        self.qname.name()
    }

    pub fn parameter(&self, name: &str) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.name == name)
    }

    /// Binding flavor derived from the decorator list; meaningful for methods.
    pub fn method_kind(&self) -> MethodKind {
        for d in &self.decorators {
            let base = d.rsplit('.').next().unwrap_or(d);
            match d.as_str() {
                "staticmethod" => return MethodKind::Static,
                "classmethod" => return MethodKind::Class,
                "property" | "functools.cached_property" | "cached_property" => {
                    return MethodKind::Property
                }
                _ if base == "setter" || base == "getter" || base == "deleter" => {
                    return MethodKind::Property
                }
                _ => {}
            }
        }
        MethodKind::Instance
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Class {
    #[serde(with = "qname_text::class")]
    pub qname: QualifiedName,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub superclass_names: Vec<String>,
    pub methods: Vec<Callable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub docstring: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decorators: Vec<String>,
}

impl Class {
    pub fn name(&self) -> &str {
        self.qname.name()
    }

    pub fn constructor(&self) -> Option<&Callable> {
        self.methods.iter().find(|m| m.is_constructor)
    }

    pub fn method(&self, name: &str) -> Option<&Callable> {
        self.methods.iter().find(|m| m.name() == name)
    }
}

/// A public alias (`pkg.Name` listed in `pkg.__all__`) for an element defined elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Reexport {
    pub alias: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Module {
    #[serde(with = "qname_text::module")]
    pub qname: QualifiedName,
    pub classes: Vec<Class>,
    pub functions: Vec<Callable>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reexports: Vec<Reexport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub docstring: Option<String>,
}

impl Module {
    pub fn new(qname: QualifiedName) -> Self {
        Self { qname, classes: Vec::new(), functions: Vec::new(), reexports: Vec::new(), docstring: None }
    }
}

/// A borrowed view of one defined element.
#[derive(Debug, Clone, Copy)]
pub enum Element<'a> {
    Module(&'a Module),
    Class(&'a Class),
    /// A callable with its owning class, if it is a method.
    Callable(&'a Callable, Option<&'a Class>),
    Parameter(&'a Parameter, &'a Callable, Option<&'a Class>),
}

impl<'a> Element<'a> {
    pub fn kind(&self) -> ElementKind {
        match self {
            Element::Module(_) => ElementKind::Module,
            Element::Class(_) => ElementKind::Class,
            Element::Callable(..) => ElementKind::Function,
            Element::Parameter(..) => ElementKind::Parameter,
        }
    }

    pub fn qname(&self) -> QualifiedName {
        match self {
            Element::Module(m) => m.qname.clone(),
            Element::Class(c) => c.qname.clone(),
            Element::Callable(f, _) => f.qname.clone(),
            Element::Parameter(p, f, _) => f
                .qname
                .child(&p.name, ElementKind::Parameter)
                .expect("parameter names are identifiers"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Loc {
    module: usize,
    class: Option<usize>,
    callable: Option<usize>,
    param: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawApiModel {
    library_name: String,
    library_version: String,
    modules: Vec<Module>,
}

/// Immutable API surface of one library version.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawApiModel", into = "RawApiModel")]
pub struct ApiModel {
    library_name: String,
    library_version: String,
    modules: Vec<Module>,
    index: HashMap<String, Loc>,
    aliases: BTreeMap<String, String>,
    /// defining text -> public aliases pointing at it
    aliased_by: BTreeMap<String, Vec<String>>,
}

impl PartialEq for ApiModel {
    fn eq(&self, other: &Self) -> bool {
        self.library_name == other.library_name
            && self.library_version == other.library_version
            && self.modules == other.modules
    }
}

impl Eq for ApiModel {}

impl From<ApiModel> for RawApiModel {
    fn from(m: ApiModel) -> Self {
        RawApiModel { library_name: m.library_name, library_version: m.library_version, modules: m.modules }
    }
}

impl TryFrom<RawApiModel> for ApiModel {
    type Error = Error;

    fn try_from(raw: RawApiModel) -> Result<Self> {
        ApiModel::new(raw.library_name, raw.library_version, raw.modules)
    }
}

impl Document for ApiModel {
    const SCHEMA: &'static str = API_SCHEMA;
}

impl ApiModel {
    /// Builds the model and its lookup index, rejecting duplicate definitions,
    /// non-contiguous parameter positions and dangling re-exports.
    pub fn new(
        library_name: impl Into<String>,
        library_version: impl Into<String>,
        modules: Vec<Module>,
    ) -> Result<Self> {
        let mut model = ApiModel {
            library_name: library_name.into(),
            library_version: library_version.into(),
            modules,
            index: HashMap::new(),
            aliases: BTreeMap::new(),
            aliased_by: BTreeMap::new(),
        };
        model.build_index()?;
        Ok(model)
    }

    fn build_index(&mut self) -> Result<()> {
        let mut index = HashMap::new();
        let mut insert = |text: String, loc: Loc| -> Result<()> {
            if index.insert(text.clone(), loc).is_some() {
                return Err(Error::InvalidModel(format!("`{text}` is defined more than once")));
            }
            Ok(())
        };
        for (mi, module) in self.modules.iter().enumerate() {
            let base = Loc { module: mi, class: None, callable: None, param: None };
            insert(module.qname.render(), base)?;
            for (ci, class) in module.classes.iter().enumerate() {
                check_child(&module.qname, &class.qname)?;
                let cloc = Loc { class: Some(ci), ..base };
                insert(class.qname.render(), cloc)?;
                for (fi, method) in class.methods.iter().enumerate() {
                    check_child(&class.qname, &method.qname)?;
                    check_signature(method)?;
                    let floc = Loc { callable: Some(fi), ..cloc };
                    insert(method.qname.render(), floc)?;
                    for (pi, p) in method.parameters.iter().enumerate() {
                        insert(format!("{}#{}", method.qname, p.name), Loc { param: Some(pi), ..floc })?;
                    }
                }
            }
            for (fi, func) in module.functions.iter().enumerate() {
                check_child(&module.qname, &func.qname)?;
                if func.is_constructor {
                    return Err(Error::InvalidModel(format!(
                        "module-level `{}` cannot be a constructor",
                        func.qname
                    )));
                }
                check_signature(func)?;
                let floc = Loc { callable: Some(fi), ..base };
                insert(func.qname.render(), floc)?;
                for (pi, p) in func.parameters.iter().enumerate() {
                    insert(format!("{}#{}", func.qname, p.name), Loc { param: Some(pi), ..floc })?;
                }
            }
        }
        let mut aliases = BTreeMap::new();
        for module in &self.modules {
            for r in &module.reexports {
                if index.contains_key(&r.alias) {
                    continue;
                }
                aliases.insert(r.alias.clone(), r.target.clone());
            }
        }
        // Chase alias chains down to a definition.
        let mut resolved = BTreeMap::new();
        for alias in aliases.keys() {
            let mut cur = alias.clone();
            let mut hops = 0;
            while let Some(next) = aliases.get(&cur) {
                cur = next.clone();
                hops += 1;
                if hops > aliases.len() {
                    return Err(Error::InvalidModel(format!("re-export cycle through `{alias}`")));
                }
            }
            if !index.contains_key(&cur) {
                return Err(Error::InvalidModel(format!("re-export `{alias}` points at undefined `{cur}`")));
            }
            resolved.insert(alias.clone(), cur);
        }
        let mut aliased_by: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (alias, target) in &resolved {
            aliased_by.entry(target.clone()).or_default().push(alias.clone());
        }
        self.index = index;
        self.aliases = resolved;
        self.aliased_by = aliased_by;
        Ok(())
    }

    pub fn library_name(&self) -> &str {
        &self.library_name
    }

    pub fn library_version(&self) -> &str {
        &self.library_version
    }

    pub fn modules(&self) -> &[Module] {
        &self.modules
    }

    /// Public alias text -> defining element text.
    pub fn aliases(&self) -> &BTreeMap<String, String> {
        &self.aliases
    }

    pub fn aliases_of(&self, defining: &str) -> &[String] {
        self.aliased_by.get(defining).map(Vec::as_slice).unwrap_or(&[])
    }

    fn element_at(&self, loc: Loc) -> Element<'_> {
        let module = &self.modules[loc.module];
        let class = loc.class.map(|ci| &module.classes[ci]);
        let callable = loc.callable.map(|fi| match class {
            Some(c) => &c.methods[fi],
            None => &module.functions[fi],
        });
        match (class, callable, loc.param) {
            (_, Some(f), Some(pi)) => Element::Parameter(&f.parameters[pi], f, class),
            (_, Some(f), None) => Element::Callable(f, class),
            (Some(c), None, _) => Element::Class(c),
            (None, None, _) => Element::Module(module),
        }
    }

    /// Resolves rendered text to its defining element, following re-export
    /// aliases (also as a prefix, e.g. `pkg.Alias.__init__#x`).
    pub fn lookup(&self, text: &str) -> Option<Element<'_>> {
        self.resolve_text(text).and_then(|t| self.index.get(&t)).map(|loc| self.element_at(*loc))
    }

    /// Rendered text of the defining element for `text` (identity for definitions).
    pub fn resolve_text(&self, text: &str) -> Option<String> {
        if self.index.contains_key(text) {
            return Some(text.to_owned());
        }
        if let Some(target) = self.aliases.get(text) {
            return Some(target.clone());
        }
        let (owner, param) = split_param(text);
        let segments: Vec<&str> = owner.split('.').collect();
        for cut in (1..segments.len()).rev() {
            let prefix = segments[..cut].join(".");
            if let Some(target) = self.aliases.get(&prefix) {
                let mut candidate = format!("{target}.{}", segments[cut..].join("."));
                if let Some(p) = param {
                    candidate = format!("{candidate}#{p}");
                }
                if self.index.contains_key(&candidate) {
                    return Some(candidate);
                }
            }
        }
        if param.is_some() && segments.len() == 1 {
            return None;
        }
        if let (Some(p), Some(target)) = (param, self.aliases.get(owner)) {
            let candidate = format!("{target}#{p}");
            if self.index.contains_key(&candidate) {
                return Some(candidate);
            }
        }
        None
    }

    pub fn contains(&self, text: &str) -> bool {
        self.index.contains_key(text)
    }

    /// The fully kinded name of a defined element (or alias).
    pub fn qname(&self, text: &str) -> Option<QualifiedName> {
        self.lookup(text).map(|e| e.qname())
    }

    pub fn callable(&self, text: &str) -> Option<(&Callable, Option<&Class>)> {
        match self.lookup(text)? {
            Element::Callable(f, c) => Some((f, c)),
            _ => None,
        }
    }

    pub fn class(&self, text: &str) -> Option<&Class> {
        match self.lookup(text)? {
            Element::Class(c) => Some(c),
            _ => None,
        }
    }

    /// Publicness: no private segment on the defining path, or reachable
    /// through a public re-export of the element or one of its ancestors.
    pub fn is_public(&self, q: &QualifiedName) -> Result<bool> {
        let text = q.render();
        if self.aliases.contains_key(&text) {
            return Ok(!q.segments().iter().any(|s| is_private_segment(s)));
        }
        if !self.index.contains_key(&text) {
            return match self.resolve_text(&text) {
                Some(_) => Ok(!q.segments().iter().any(|s| is_private_segment(s))),
                None => Err(Error::UnknownElement(text)),
            };
        }
        Ok(self.is_public_defined(q.segments()))
    }

    fn is_public_defined(&self, segments: &[String]) -> bool {
        if !segments.iter().any(|s| is_private_segment(s)) {
            return true;
        }
        for cut in (1..=segments.len()).rev() {
            let prefix = segments[..cut].join(".");
            // A parameter is never itself re-exported; its prefixes are.
            let Some(aliases) = self.aliased_by.get(&prefix) else { continue };
            let rest_public = !segments[cut..].iter().any(|s| is_private_segment(s));
            if rest_public
                && aliases.iter().any(|a| !a.split('.').any(is_private_segment))
            {
                return true;
            }
        }
        false
    }

    pub fn is_public_text(&self, text: &str) -> Result<bool> {
        let q = self.qname(text).ok_or_else(|| Error::UnknownElement(text.to_owned()))?;
        if self.index.contains_key(text) {
            self.is_public(&q)
        } else {
            Ok(!text.split(['.', '#']).any(is_private_segment))
        }
    }

    /// Every defined element in definition order: module, its classes (each
    /// followed by methods and their parameters), then module functions.
    pub fn elements(&self) -> Vec<Element<'_>> {
        let mut out = Vec::with_capacity(self.index.len());
        for module in &self.modules {
            out.push(Element::Module(module));
            for class in &module.classes {
                out.push(Element::Class(class));
                for m in &class.methods {
                    out.push(Element::Callable(m, Some(class)));
                    out.extend(m.parameters.iter().map(|p| Element::Parameter(p, m, Some(class))));
                }
            }
            for f in &module.functions {
                out.push(Element::Callable(f, None));
                out.extend(f.parameters.iter().map(|p| Element::Parameter(p, f, None)));
            }
        }
        out
    }

    /// Every callable with its owning class.
    pub fn callables(&self) -> impl Iterator<Item = (&Callable, Option<&Class>)> {
        self.modules.iter().flat_map(|m| {
            m.classes
                .iter()
                .flat_map(|c| c.methods.iter().map(move |f| (f, Some(c))))
                .chain(m.functions.iter().map(|f| (f, None)))
        })
    }

    pub fn classes(&self) -> impl Iterator<Item = &Class> {
        self.modules.iter().flat_map(|m| m.classes.iter())
    }

    /// A copy restricted to public elements. Modules are kept when they hold
    /// any public content or are public themselves.
    pub fn public_view(&self) -> ApiModel {
        let public = |q: &QualifiedName| self.is_public_defined(q.segments());
        let modules = self
            .modules
            .iter()
            .filter_map(|m| {
                let classes: Vec<Class> = m
                    .classes
                    .iter()
                    .filter(|c| public(&c.qname))
                    .map(|c| Class {
                        methods: c.methods.iter().filter(|f| public(&f.qname)).cloned().collect(),
                        ..c.clone()
                    })
                    .collect();
                let functions: Vec<Callable> =
                    m.functions.iter().filter(|f| public(&f.qname)).cloned().collect();
                let keep = public(&m.qname) || !classes.is_empty() || !functions.is_empty();
                keep.then(|| Module {
                    qname: m.qname.clone(),
                    classes,
                    functions,
                    reexports: m.reexports.iter().filter(|r| !r.alias.split('.').any(is_private_segment)).cloned().collect(),
                    docstring: m.docstring.clone(),
                })
            })
            .collect::<Vec<_>>();
        let kept: std::collections::HashSet<String> = modules
            .iter()
            .flat_map(|m| {
                std::iter::once(m.qname.render())
                    .chain(m.classes.iter().map(|c| c.qname.render()))
                    .chain(m.classes.iter().flat_map(|c| c.methods.iter().map(|f| f.qname.render())))
                    .chain(m.functions.iter().map(|f| f.qname.render()))
            })
            .collect();
        let modules = modules
            .into_iter()
            .map(|mut m| {
                m.reexports.retain(|r| kept.contains(&r.target) || self.aliases.get(&r.alias).is_some_and(|t| kept.contains(t)));
                m
            })
            .collect();
        ApiModel::new(self.library_name.clone(), self.library_version.clone(), modules)
            .expect("a filtered valid model stays valid")
    }
}

fn check_child(parent: &QualifiedName, child: &QualifiedName) -> Result<()> {
    let p = parent.segments();
    let c = child.segments();
    if c.len() != p.len() + 1 || &c[..p.len()] != p {
        return Err(Error::InvalidModel(format!("`{child}` is not a direct child of `{parent}`")));
    }
    Ok(())
}

fn check_signature(f: &Callable) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for (i, p) in f.parameters.iter().enumerate() {
        if p.position != i {
            return Err(Error::InvalidModel(format!(
                "`{}`: parameter `{}` has position {} but is at index {i}",
                f.qname, p.name, p.position
            )));
        }
        if !is_identifier(&p.name) || !seen.insert(p.name.as_str()) {
            return Err(Error::InvalidModel(format!("`{}`: bad or duplicate parameter `{}`", f.qname, p.name)));
        }
        if p.assignment_kind.is_variadic() && p.default.is_some() {
            return Err(Error::InvalidModel(format!("`{}`: variadic `{}` has a default", f.qname, p.name)));
        }
    }
    if f.is_constructor && f.name() != "__init__" {
        return Err(Error::InvalidModel(format!("constructor `{}` must be named __init__", f.qname)));
    }
    Ok(())
}

/// Serde adapters storing a [`QualifiedName`] as its text with a fixed kind.
mod qname_text {
    macro_rules! kind_adapter {
        ($name:ident, $kind:expr) => {
            pub mod $name {
                use serde::{Deserialize, Deserializer, Serializer};

                use crate::model::QualifiedName;

                pub fn serialize<S: Serializer>(q: &QualifiedName, s: S) -> Result<S::Ok, S::Error> {
                    s.serialize_str(&q.render())
                }

                pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<QualifiedName, D::Error> {
                    let text = String::deserialize(d)?;
                    QualifiedName::parse_as(&text, $kind).map_err(serde::de::Error::custom)
                }
            }
        };
    }

    kind_adapter!(module, crate::model::ElementKind::Module);
    kind_adapter!(class, crate::model::ElementKind::Class);
    kind_adapter!(function, crate::model::ElementKind::Function);
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn q(text: &str, kind: ElementKind) -> QualifiedName {
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

    fn callable(text: &str, params: Vec<Parameter>, ctor: bool) -> Callable {
        Callable {
            qname: q(text, ElementKind::Function),
            parameters: params,
            is_constructor: ctor,
            docstring: None,
            decorators: vec![],
        }
    }

    fn sample() -> ApiModel {
        let mut pkg = Module::new(q("minilearn", ElementKind::Module));
        pkg.reexports.push(Reexport { alias: "minilearn.Solver".into(), target: "minilearn._impl.Solver".into() });
        let mut imp = Module::new(q("minilearn._impl", ElementKind::Module));
        imp.classes.push(Class {
            qname: q("minilearn._impl.Solver", ElementKind::Class),
            superclass_names: vec![],
            methods: vec![
                callable("minilearn._impl.Solver.__init__", vec![param("tol", 0, Some(LiteralValue::float(1e-4)))], true),
                callable("minilearn._impl.Solver._step", vec![], false),
            ],
            docstring: None,
            decorators: vec![],
        });
        let mut internal = Module::new(q("minilearn._internal", ElementKind::Module));
        internal.functions.push(callable("minilearn._internal.check_array", vec![param("array", 0, None)], false));
        let mut models = Module::new(q("minilearn.models", ElementKind::Module));
        models.classes.push(Class {
            qname: q("minilearn.models.Ridge", ElementKind::Class),
            superclass_names: vec![],
            methods: vec![callable(
                "minilearn.models.Ridge.__init__",
                vec![param("alpha", 0, Some(LiteralValue::float(1.0))), param("_hidden", 1, Some(LiteralValue::none()))],
                true,
            )],
            docstring: None,
            decorators: vec![],
        });
        ApiModel::new("minilearn", "0.1", vec![pkg, imp, internal, models]).unwrap()
    }

    #[test]
    fn lookup_finds_parameters_and_aliases() {
        let m = sample();
        match m.lookup("minilearn.models.Ridge.__init__#alpha") {
            Some(Element::Parameter(p, f, Some(c))) => {
                assert_eq!(p.name, "alpha");
                assert!(f.is_constructor);
                assert_eq!(c.name(), "Ridge");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(m.lookup("minilearn.models.Nope").is_none());
        assert!(matches!(m.lookup("minilearn.Solver"), Some(Element::Class(c)) if c.qname.render() == "minilearn._impl.Solver"));
        assert!(matches!(m.lookup("minilearn.Solver.__init__#tol"), Some(Element::Parameter(p, ..)) if p.name == "tol"));
    }

    #[test]
    fn publicness_rules() {
        let m = sample();
        assert!(m.is_public(&q("minilearn.models.Ridge", ElementKind::Class)).unwrap());
        assert!(!m.is_public(&q("minilearn._internal.check_array", ElementKind::Function)).unwrap());
        assert!(m.is_public(&q("minilearn._impl.Solver", ElementKind::Class)).unwrap());
        assert!(m.is_public(&q("minilearn._impl.Solver.__init__#tol", ElementKind::Parameter)).unwrap());
        assert!(!m.is_public(&q("minilearn._impl.Solver._step", ElementKind::Function)).unwrap());
        assert!(!m.is_public(&q("minilearn.models.Ridge.__init__#_hidden", ElementKind::Parameter)).unwrap());
        assert!(!m.is_public(&q("minilearn._impl", ElementKind::Module)).unwrap());
        assert!(matches!(
            m.is_public(&q("minilearn.models.Nope", ElementKind::Class)),
            Err(Error::UnknownElement(_))
        ));
    }

    #[test]
    fn duplicate_definitions_rejected() {
        let a = Module::new(q("x", ElementKind::Module));
        let b = Module::new(q("x", ElementKind::Module));
        assert!(ApiModel::new("x", "1", vec![a, b]).is_err());
    }

    #[test]
    fn non_contiguous_positions_rejected() {
        let mut m = Module::new(q("x", ElementKind::Module));
        m.functions.push(callable("x.f", vec![param("a", 1, None)], false));
        assert!(ApiModel::new("x", "1", vec![m]).is_err());
    }

    #[test]
    fn json_round_trip_is_byte_stable() {
        let m = sample();
        let text = m.to_json();
        let back = ApiModel::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), text);
        assert!(text.contains("\"schema\": \"api/1\""));
    }

    #[test]
    fn public_view_drops_internal_elements() {
        let view = sample().public_view();
        assert!(view.lookup("minilearn._internal.check_array").is_none());
        assert!(view.lookup("minilearn._impl.Solver._step").is_none());
        assert!(view.lookup("minilearn.Solver").is_some());
        assert!(view.lookup("minilearn.models.Ridge.__init__#alpha").is_some());
    }
}
