use std::collections::BTreeMap;

use rustpython_parser::ast::{self, Stmt};

use crate::pysrc;

/// Local names bound by imports of the target library in one file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImportTable {
    names: BTreeMap<String, String>,
    /// Modules imported with `from m import *`, most recent last.
    star_modules: Vec<String>,
}

impl ImportTable {
    pub fn get(&self, local: &str) -> Option<&str> {
        self.names.get(local).map(String::as_str)
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.names
    }

    pub fn star_modules(&self) -> &[String] {
        &self.star_modules
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty() && self.star_modules.is_empty()
    }

    /// Expands `local.rest` to the library path it denotes, if `local` is bound.
    pub fn expand(&self, dotted: &str) -> Option<String> {
        let (head, rest) = match dotted.split_once('.') {
            Some((h, r)) => (h, Some(r)),
            None => (dotted, None),
        };
        let base = self.names.get(head)?;
        Some(match rest {
            Some(r) => format!("{base}.{r}"),
            None => base.clone(),
        })
    }
}

/// Parses `source` and collects its imports of `library_name`.
pub fn build_import_table(source: &str, library_name: &str) -> Result<ImportTable, String> {
    let suite = pysrc::parse_suite(source, "<program>")?;
    Ok(import_table_of(&suite, library_name))
}

pub(crate) fn import_table_of(suite: &[Stmt], library_name: &str) -> ImportTable {
    let mut table = ImportTable::default();
    collect(suite, library_name, &mut table);
    table
}

fn in_library(dotted: &str, library: &str) -> bool {
    dotted == library || dotted.strip_prefix(library).is_some_and(|rest| rest.starts_with('.'))
}

fn collect(body: &[Stmt], library: &str, table: &mut ImportTable) {
    for stmt in body {
        match stmt {
            Stmt::Import(s) => {
                for a in &s.names {
                    let name = a.name.as_str();
                    let (local, target) = match &a.asname {
                        Some(alias) => (alias.to_string(), name.to_owned()),
                        None => {
                            let head = name.split('.').next().unwrap_or(name).to_owned();
                            (head.clone(), head)
                        }
                    };
                    bind(table, local, target, library);
                }
            }
            Stmt::ImportFrom(s) => {
                let level = s.level.as_ref().map(|l| l.to_usize()).unwrap_or(0);
                let module = s.module.as_ref().map(|m| m.to_string()).unwrap_or_default();
                for a in &s.names {
                    if a.name.as_str() == "*" {
                        if level == 0 && in_library(&module, library) {
                            table.star_modules.retain(|m| m != &module);
                            table.star_modules.push(module.clone());
                        }
                        continue;
                    }
                    let local = a.asname.as_ref().unwrap_or(&a.name).to_string();
                    if level > 0 {
                        table.names.remove(&local);
                        continue;
                    }
                    bind(table, local, format!("{module}.{}", a.name), library);
                }
            }
            other => for_each_block(other, |b| collect(b, library, table)),
        }
    }
}

fn bind(table: &mut ImportTable, local: String, target: String, library: &str) {
    if in_library(&target, library) {
        table.names.insert(local, target);
    } else {
        // A foreign import shadows any earlier binding of the same name.
        table.names.remove(&local);
    }
}

/// Calls `f` on every nested statement block of `stmt`.
pub(crate) fn for_each_block(stmt: &Stmt, mut f: impl FnMut(&[Stmt])) {
    match stmt {
        Stmt::FunctionDef(s) => f(&s.body),
        Stmt::AsyncFunctionDef(s) => f(&s.body),
        Stmt::ClassDef(s) => f(&s.body),
        Stmt::For(s) => {
            f(&s.body);
            f(&s.orelse);
        }
        Stmt::AsyncFor(s) => {
            f(&s.body);
            f(&s.orelse);
        }
        Stmt::While(s) => {
            f(&s.body);
            f(&s.orelse);
        }
        Stmt::If(s) => {
            f(&s.body);
            f(&s.orelse);
        }
        Stmt::With(s) => f(&s.body),
        Stmt::AsyncWith(s) => f(&s.body),
        Stmt::Match(s) => s.cases.iter().for_each(|c| f(&c.body)),
        Stmt::Try(s) => {
            f(&s.body);
            for h in &s.handlers {
                let ast::ExceptHandler::ExceptHandler(h) = h;
                f(&h.body);
            }
            f(&s.orelse);
            f(&s.finalbody);
        }
        Stmt::TryStar(s) => {
            f(&s.body);
            for h in &s.handlers {
                let ast::ExceptHandler::ExceptHandler(h) = h;
                f(&h.body);
            }
            f(&s.orelse);
            f(&s.finalbody);
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(src: &str) -> ImportTable {
        build_import_table(src, "minilearn").unwrap()
    }

    #[test]
    fn direct_alias() {
        let t = table("from minilearn.models import Ridge as R\n");
        assert_eq!(t.get("R"), Some("minilearn.models.Ridge"));
        assert_eq!(t.entries().len(), 1);
    }

    #[test]
    fn module_alias() {
        let t = table("import minilearn.models as mm\n");
        assert_eq!(t.get("mm"), Some("minilearn.models"));
        assert_eq!(t.expand("mm.Ridge").unwrap(), "minilearn.models.Ridge");
    }

    #[test]
    fn foreign_imports_ignored() {
        assert!(table("import numpy as np\nimport minilearnx\n").is_empty());
    }

    #[test]
    fn dotted_import_binds_head() {
        let t = table("import minilearn.models\n");
        assert_eq!(t.get("minilearn"), Some("minilearn"));
        assert_eq!(t.expand("minilearn.models.Ridge").unwrap(), "minilearn.models.Ridge");
    }

    #[test]
    fn later_bindings_shadow() {
        let t = table("from minilearn.models import Ridge\nfrom other import Ridge\n");
        assert!(t.get("Ridge").is_none());
        let t = table("from other import Ridge\nif x:\n    from minilearn.models import Lasso as Ridge\n");
        assert_eq!(t.get("Ridge"), Some("minilearn.models.Lasso"));
    }

    #[test]
    fn star_and_relative() {
        let t = table("from minilearn.metrics import *\nfrom . import helpers\n");
        assert_eq!(t.star_modules(), ["minilearn.metrics"]);
        assert!(t.get("helpers").is_none());
    }
}
