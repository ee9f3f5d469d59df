//! Static extraction of an [`ApiModel`] from a library's source tree.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use rayon::prelude::*;
use rustpython_parser::ast::{self, Expr, Stmt};
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::json::{Document, EXTRACT_REPORT_SCHEMA};
use crate::model::{
    is_identifier, ApiModel, Callable, Class, ElementKind, MethodKind, Module, QualifiedName, Reexport,
};
use crate::pysrc::{self, docstring_of, signature_of, text_of};

/// A library package directory and the Python files in it.
///
/// The root is the package directory itself; its name is the library name
/// unless overridden. `root/a/b.py` becomes module `<lib>.a.b` and
/// `root/a/__init__.py` becomes `<lib>.a`.
#[derive(Debug, Clone)]
pub struct SourceTree {
    pub root: PathBuf,
    pub library_name: String,
    pub include: Vec<String>,
    pub exclude: Vec<String>,
    pub files: Vec<(String, PathBuf)>,
}

impl SourceTree {
    pub fn discover(
        root: impl Into<PathBuf>,
        library_name: Option<&str>,
        include: &[String],
        exclude: &[String],
    ) -> Result<(Self, Vec<ExtractWarning>)> {
        let root = root.into();
        if !root.is_dir() {
            return Err(Error::io(
                &root,
                std::io::Error::new(std::io::ErrorKind::NotFound, "library root is not a directory"),
            ));
        }
        let library_name = match library_name {
            Some(n) => n.to_owned(),
            None => root
                .canonicalize()
                .map_err(|e| Error::io(&root, e))?
                .file_name()
                .and_then(|n| n.to_str())
                .map(str::to_owned)
                .unwrap_or_default(),
        };
        if !is_identifier(&library_name) {
            return Err(Error::InvalidName(format!(
                "library name `{library_name}` is not an identifier; pass an explicit name"
            )));
        }
        let include_set = build_globs(include)?;
        let exclude_set = build_globs(exclude)?;
        let mut files = Vec::new();
        let mut warnings = Vec::new();
        let mut seen: BTreeMap<String, PathBuf> = BTreeMap::new();
        let walker = WalkDir::new(&root).sort_by_file_name().into_iter();
        for entry in walker {
            let entry = entry.map_err(|e| {
                let path = e.path().map(Path::to_path_buf).unwrap_or_else(|| root.clone());
                Error::io(path, e.into())
            })?;
            let path = entry.path();
            if !entry.file_type().is_file() || path.extension().and_then(|e| e.to_str()) != Some("py") {
                continue;
            }
            let rel = path.strip_prefix(&root).expect("walkdir yields children of root");
            let rel_text = rel.to_string_lossy().replace('\\', "/");
            if !include.is_empty() && !include_set.is_match(&rel_text) {
                continue;
            }
            if exclude_set.is_match(&rel_text) {
                continue;
            }
            match module_name(&library_name, rel) {
                Some(qname) => {
                    if let Some(prev) = seen.insert(qname.clone(), path.to_path_buf()) {
                        warnings.push(ExtractWarning::new(path, format!(
                            "module `{qname}` already provided by {}", prev.display()
                        )));
                        seen.insert(qname, prev);
                        continue;
                    }
                    files.push((qname, path.to_path_buf()));
                }
                None => warnings.push(ExtractWarning::new(path, "path does not map to an importable module")),
            }
        }
        files.sort();
        Ok((
            SourceTree { root, library_name, include: include.to_vec(), exclude: exclude.to_vec(), files },
            warnings,
        ))
    }
}

fn build_globs(patterns: &[String]) -> Result<GlobSet> {
    let mut builder = GlobSetBuilder::new();
    for p in patterns {
        builder.add(Glob::new(p)?);
    }
    Ok(builder.build()?)
}

fn module_name(library: &str, rel: &Path) -> Option<String> {
    let mut parts: Vec<String> = rel
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    let file = parts.pop()?;
    let stem = file.strip_suffix(".py")?;
    if stem != "__init__" {
        parts.push(stem.to_owned());
    }
    if !parts.iter().all(|p| is_identifier(p)) {
        return None;
    }
    let mut segments = vec![library.to_owned()];
    segments.extend(parts);
    Some(segments.join("."))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtractWarning {
    pub file: String,
    pub message: String,
}

impl ExtractWarning {
    fn new(file: &Path, message: impl Into<String>) -> Self {
        Self { file: file.to_string_lossy().replace('\\', "/"), message: message.into() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub files_parsed: usize,
    pub files_skipped: usize,
    pub warnings: Vec<ExtractWarning>,
}

impl Document for ExtractionReport {
    const SCHEMA: &'static str = EXTRACT_REPORT_SCHEMA;
}

/// Per-file result before cross-module re-export resolution.
struct ModuleDraft {
    module: Module,
    all_names: Option<Vec<String>>,
    /// local name -> absolute dotted import target
    imports: HashMap<String, String>,
}

/// Extracts every module-level class and function, every method, and
/// `__all__` re-exports. Unparseable files are skipped with a warning.
pub fn extract_api(tree: &SourceTree, library_version: &str) -> Result<(ApiModel, ExtractionReport)> {
    let results: Vec<std::result::Result<DraftResult, ExtractWarning>> = tree
        .files
        .par_iter()
        .map(|(qname, path)| {
            let source = std::fs::read_to_string(path)
                .map_err(|e| ExtractWarning::new(path, format!("unreadable: {e}")))?;
            let is_package = path.file_name().is_some_and(|n| n == "__init__.py");
            parse_module(qname, &source, &path.to_string_lossy(), is_package)
                .map_err(|msg| ExtractWarning::new(path, format!("syntax error: {msg}")))
        })
        .collect();

    let mut report = ExtractionReport::default();
    let mut drafts = Vec::new();
    for r in results {
        match r {
            Ok((draft, warnings)) => {
                report.files_parsed += 1;
                report.warnings.extend(warnings);
                drafts.push(draft);
            }
            Err(w) => {
                report.files_skipped += 1;
                report.warnings.push(w);
            }
        }
    }
    let modules = resolve_reexports(drafts, &mut report.warnings);
    report.warnings.sort();
    let model = ApiModel::new(tree.library_name.clone(), library_version, modules)?;
    Ok((model, report))
}

type DraftResult = (ModuleDraft, Vec<ExtractWarning>);

fn parse_module(
    qname: &str,
    source: &str,
    path: &str,
    is_package: bool,
) -> std::result::Result<DraftResult, String> {
    let suite = pysrc::parse_suite(source, path)?;
    let module_q = QualifiedName::parse_as(qname, ElementKind::Module).map_err(|e| e.to_string())?;
    let mut cx = ModuleCx {
        source,
        path,
        module: Module::new(module_q),
        names: BTreeSet::new(),
        all_names: None,
        imports: HashMap::new(),
        is_package,
        warnings: Vec::new(),
    };
    cx.module.docstring = docstring_of(&suite);
    cx.walk(&suite);
    let warnings = std::mem::take(&mut cx.warnings);
    Ok((
        ModuleDraft { module: cx.module, all_names: cx.all_names, imports: cx.imports },
        warnings,
    ))
}

struct ModuleCx<'s> {
    source: &'s str,
    path: &'s str,
    module: Module,
    names: BTreeSet<String>,
    all_names: Option<Vec<String>>,
    imports: HashMap<String, String>,
    is_package: bool,
    warnings: Vec<ExtractWarning>,
}

impl ModuleCx<'_> {
    fn warn(&mut self, message: String) {
        self.warnings.push(ExtractWarning::new(Path::new(self.path), message));
    }

    fn walk(&mut self, body: &[Stmt]) {
        for stmt in body {
            match stmt {
                Stmt::ClassDef(c) => self.class(c),
                Stmt::FunctionDef(f) => {
                    self.function(&f.name, &f.args, &f.body, &f.decorator_list)
                }
                Stmt::AsyncFunctionDef(f) => {
                    self.function(&f.name, &f.args, &f.body, &f.decorator_list)
                }
                Stmt::If(s) => {
                    self.walk(&s.body);
                    self.walk(&s.orelse);
                }
                Stmt::Try(s) => {
                    self.walk(&s.body);
                    for h in &s.handlers {
                        let ast::ExceptHandler::ExceptHandler(h) = h;
                        self.walk(&h.body);
                    }
                    self.walk(&s.orelse);
                    self.walk(&s.finalbody);
                }
                Stmt::Import(s) => {
                    for a in &s.names {
                        match &a.asname {
                            Some(alias) => self.imports.insert(alias.to_string(), a.name.to_string()),
                            None => {
                                let head = a.name.split('.').next().unwrap_or_default().to_owned();
                                self.imports.insert(head.clone(), head)
                            }
                        };
                    }
                }
                Stmt::ImportFrom(s) => self.import_from(s),
                Stmt::Assign(s) => {
                    let is_all = s.targets.iter().any(|t| matches!(t, Expr::Name(n) if n.id.as_str() == "__all__"));
                    if is_all {
                        self.all_names = Some(self.string_list(&s.value));
                    }
                }
                Stmt::AugAssign(s) => {
                    if matches!(s.target.as_ref(), Expr::Name(n) if n.id.as_str() == "__all__") {
                        let extra = self.string_list(&s.value);
                        self.all_names.get_or_insert_with(Vec::new).extend(extra);
                    }
                }
                Stmt::AnnAssign(s) => {
                    if let (Expr::Name(n), Some(v)) = (s.target.as_ref(), &s.value) {
                        if n.id.as_str() == "__all__" {
                            self.all_names = Some(self.string_list(v));
                        }
                    }
                }
                _ => {}
            }
        }
    }

    fn string_list(&mut self, value: &Expr) -> Vec<String> {
        let elts = match value {
            Expr::List(l) => &l.elts,
            Expr::Tuple(t) => &t.elts,
            _ => {
                self.warn("`__all__` is not a literal list of strings".into());
                return Vec::new();
            }
        };
        let mut out = Vec::new();
        for e in elts {
            match pysrc::literal_of(e).and_then(|l| l.as_str_value()) {
                Some(s) => out.push(s),
                None => self.warn("non-string entry in `__all__` ignored".into()),
            }
        }
        out
    }

    fn import_from(&mut self, s: &ast::StmtImportFrom) {
        let level = s.level.as_ref().map(|l| l.to_usize()).unwrap_or(0);
        let base = if level == 0 {
            s.module.as_ref().map(|m| m.to_string())
        } else {
            let mut pkg: Vec<&str> = self.module.qname.segments().iter().map(String::as_str).collect();
            if !self.is_package {
                pkg.pop();
            }
            for _ in 1..level {
                pkg.pop();
            }
            if pkg.is_empty() {
                self.warn("relative import escapes the library root".into());
                return;
            }
            let mut base = pkg.join(".");
            if let Some(m) = &s.module {
                base = format!("{base}.{m}");
            }
            Some(base)
        };
        let Some(base) = base else { return };
        for a in &s.names {
            if a.name.as_str() == "*" {
                continue;
            }
            let local = a.asname.as_ref().unwrap_or(&a.name).to_string();
            self.imports.insert(local, format!("{base}.{}", a.name));
        }
    }

    fn claim(&mut self, name: &str, what: &str) -> bool {
        if self.names.insert(name.to_owned()) {
            true
        } else {
            self.warn(format!("duplicate definition of `{}.{name}` ({what}) ignored", self.module.qname));
            false
        }
    }

    fn class(&mut self, c: &ast::StmtClassDef) {
        if !self.claim(c.name.as_str(), "class") {
            return;
        }
        let qname = self.module.qname.child(c.name.as_str(), ElementKind::Class).expect("identifier");
        let mut class = Class {
            qname,
            superclass_names: c.bases.iter().map(|b| text_of(self.source, b).to_owned()).collect(),
            methods: Vec::new(),
            docstring: docstring_of(&c.body),
            decorators: c.decorator_list.iter().map(|d| text_of(self.source, d).to_owned()).collect(),
        };
        let mut seen = BTreeSet::new();
        for stmt in &c.body {
            let (name, args, decorators, body) = match stmt {
                Stmt::FunctionDef(f) => (&f.name, &f.args, &f.decorator_list, &f.body),
                Stmt::AsyncFunctionDef(f) => (&f.name, &f.args, &f.decorator_list, &f.body),
                _ => continue,
            };
            // Property setters/deleters re-bind the same name.
            if !seen.insert(name.to_string()) {
                continue;
            }
            let mut method = self.callable(&class.qname, name.as_str(), args, decorators, body, true);
            method.is_constructor = name.as_str() == "__init__";
            if method.method_kind() == MethodKind::Property {
                method.parameters.clear();
            }
            class.methods.push(method);
        }
        self.module.classes.push(class);
    }

    fn function(&mut self, name: &ast::Identifier, args: &ast::Arguments, body: &[Stmt], decorators: &[Expr]) {
        if !self.claim(name.as_str(), "function") {
            return;
        }
        let owner = self.module.qname.clone();
        let f = self.callable(&owner, name.as_str(), args, decorators, body, false);
        self.module.functions.push(f);
    }

    fn callable(
        &self,
        owner: &QualifiedName,
        name: &str,
        args: &ast::Arguments,
        decorators: &[Expr],
        body: &[Stmt],
        is_method: bool,
    ) -> Callable {
        let decorators: Vec<String> = decorators.iter().map(|d| text_of(self.source, d).to_owned()).collect();
        let qname = owner.child(name, ElementKind::Function).expect("identifier");
        let mut f = Callable { qname, parameters: Vec::new(), is_constructor: false, docstring: docstring_of(body), decorators };
        let drop_receiver = is_method && f.method_kind() != MethodKind::Static;
        f.parameters = signature_of(self.source, args, drop_receiver);
        f
    }
}

/// Turns `__all__` entries that name imported (not locally defined)
/// elements into re-export aliases, dropping those that do not resolve to a
/// definition inside the library.
fn resolve_reexports(mut drafts: Vec<ModuleDraft>, warnings: &mut Vec<ExtractWarning>) -> Vec<Module> {
    drafts.sort_by(|a, b| a.module.qname.cmp(&b.module.qname));
    let mut defined: BTreeSet<String> = BTreeSet::new();
    for d in &drafts {
        defined.insert(d.module.qname.render());
        for c in &d.module.classes {
            defined.insert(c.qname.render());
        }
        for f in &d.module.functions {
            defined.insert(f.qname.render());
        }
    }
    let mut candidates: BTreeMap<String, String> = BTreeMap::new();
    for d in &drafts {
        let Some(names) = &d.all_names else { continue };
        let module = d.module.qname.render();
        for name in names {
            let alias = format!("{module}.{name}");
            if defined.contains(&alias) {
                continue;
            }
            match d.imports.get(name) {
                Some(target) => {
                    candidates.insert(alias, target.clone());
                }
                None => warnings.push(ExtractWarning {
                    file: module.clone(),
                    message: format!("`__all__` entry `{name}` is neither defined nor imported"),
                }),
            }
        }
    }
    let mut accepted: BTreeMap<String, String> = BTreeMap::new();
    for (alias, target) in &candidates {
        let mut cur = target.clone();
        let mut hops = 0;
        while !defined.contains(&cur) && hops <= candidates.len() {
            match candidates.get(&cur) {
                Some(next) => cur = next.clone(),
                None => break,
            }
            hops += 1;
        }
        if defined.contains(&cur) {
            accepted.insert(alias.clone(), target.clone());
        } else {
            warnings.push(ExtractWarning {
                file: alias.rsplit_once('.').map(|(m, _)| m.to_owned()).unwrap_or_default(),
                message: format!("re-export `{alias}` of `{target}` does not resolve inside the library"),
            });
        }
    }
    drafts
        .into_iter()
        .map(|d| {
            let mut module = d.module;
            let prefix = format!("{}.", module.qname);
            module.reexports = accepted
                .iter()
                .filter(|(alias, _)| alias.strip_prefix(&prefix).is_some_and(|rest| !rest.contains('.')))
                .map(|(alias, target)| Reexport { alias: alias.clone(), target: target.clone() })
                .collect();
            module
        })
        .collect()
}

/// Total vs public element counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceCounts {
    pub modules_total: usize,
    pub modules_public: usize,
    pub classes_total: usize,
    pub classes_public: usize,
    pub functions_total: usize,
    pub functions_public: usize,
    pub params_total: usize,
    pub params_public: usize,
}

/// Counts classes, functions (methods included, constructors excluded) and
/// parameters (receivers excluded), split by publicness.
pub fn summarize_surface(model: &ApiModel) -> SurfaceCounts {
    let mut c = SurfaceCounts::default();
    let public = |q: &QualifiedName| model.is_public(q).expect("element is defined");
    for module in model.modules() {
        c.modules_total += 1;
        c.modules_public += usize::from(public(&module.qname));
        for class in &module.classes {
            c.classes_total += 1;
            c.classes_public += usize::from(public(&class.qname));
        }
    }
    for (f, _) in model.callables() {
        if !f.is_constructor {
            c.functions_total += 1;
            c.functions_public += usize::from(public(&f.qname));
        }
        for p in &f.parameters {
            let pq = f.qname.child(&p.name, ElementKind::Parameter).expect("identifier");
            c.params_total += 1;
            c.params_public += usize::from(public(&pq));
        }
    }
    c
}
