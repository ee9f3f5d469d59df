//! Call-site resolution over one parsed client program.

use std::collections::{BTreeMap, HashMap};

use rustpython_parser::ast::{self, Expr, Ranged, Stmt};

use super::bind::{bind_arguments, Binding, CallArgument};
use super::imports::{import_table_of, ImportTable};
use super::{CallKind, UsageEvent};
use crate::model::{is_private_segment, ApiModel, Callable, Class, Element, MethodKind};
use crate::pysrc::{self, argument_value, bound_names, child_exprs, dotted_name, LineIndex};

/// Events found in one program.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileScan {
    pub events: Vec<UsageEvent>,
}

/// Parses `source` and resolves every call against `model`.
pub fn scan_program(source: &str, file: &str, model: &ApiModel) -> Result<FileScan, String> {
    let suite = pysrc::parse_suite(source, file)?;
    let table = import_table_of(&suite, model.library_name());
    if table.is_empty() {
        return Ok(FileScan::default());
    }
    let mut scanner = Scanner { model, table: &table, lines: LineIndex::new(source), file, events: Vec::new() };
    scanner.walk_body(&suite, &mut Scope::default());
    Ok(FileScan { events: scanner.events })
}

/// A resolved callee.
#[derive(Debug, Clone, Copy)]
enum Resolved<'m> {
    /// Class instantiation; `ctor` is absent when the class defines no `__init__`.
    Constructor { class: &'m Class, ctor: Option<&'m Callable> },
    Function(&'m Callable),
    Method { class: &'m Class, method: &'m Callable },
}

/// Local variables holding an instance created by a resolved constructor call.
#[derive(Debug, Default)]
struct Scope {
    receivers: HashMap<String, String>,
}

impl Scope {
    fn forget_target(&mut self, target: &Expr) {
        let mut names = Vec::new();
        bound_names(target, &mut names);
        for n in names {
            self.receivers.remove(&n);
        }
    }
}

struct Scanner<'a> {
    model: &'a ApiModel,
    table: &'a ImportTable,
    lines: LineIndex,
    file: &'a str,
    events: Vec<UsageEvent>,
}

impl<'a> Scanner<'a> {
    /// Tier 1: an imported name or a dotted path rooted at an imported module.
    fn resolve_path(&self, dotted: &str) -> Option<Resolved<'a>> {
        let mut candidates = Vec::new();
        if let Some(path) = self.table.expand(dotted) {
            candidates.push(path);
        } else {
            let head = dotted.split('.').next().unwrap_or(dotted);
            if !is_private_segment(head) {
                for m in self.table.star_modules().iter().rev() {
                    candidates.push(format!("{m}.{dotted}"));
                }
            }
        }
        candidates.into_iter().find_map(|path| match self.model.lookup(&path)? {
            Element::Class(class) => Some(Resolved::Constructor { class, ctor: class.constructor() }),
            Element::Callable(f, None) => Some(Resolved::Function(f)),
            Element::Callable(f, Some(class))
                if matches!(f.method_kind(), MethodKind::Static | MethodKind::Class) && !f.is_constructor =>
            {
                Some(Resolved::Method { class, method: f })
            }
            _ => None,
        })
    }

    /// Tier 2: a method of a class whose instance the receiver holds.
    fn resolve_method(&self, class_text: &str, name: &str) -> Option<Resolved<'a>> {
        let class = self.model.class(class_text)?;
        let method = class.method(name)?;
        if method.is_constructor || method.method_kind() == MethodKind::Property {
            return None;
        }
        Some(Resolved::Method { class, method })
    }

    fn walk_body(&mut self, body: &[Stmt], scope: &mut Scope) {
        for stmt in body {
            self.walk_stmt(stmt, scope);
        }
    }

    fn walk_function(&mut self, args: &ast::Arguments, decorators: &[Expr], body: &[Stmt], scope: &mut Scope) {
        for d in decorators {
            self.visit(d, scope);
        }
        for a in args.posonlyargs.iter().chain(&args.args).chain(&args.kwonlyargs) {
            if let Some(d) = &a.default {
                self.visit(d, scope);
            }
        }
        self.walk_body(body, &mut Scope::default());
    }

    fn walk_stmt(&mut self, stmt: &Stmt, scope: &mut Scope) {
        match stmt {
            Stmt::FunctionDef(f) => {
                scope.receivers.remove(f.name.as_str());
                self.walk_function(&f.args, &f.decorator_list, &f.body, scope);
            }
            Stmt::AsyncFunctionDef(f) => {
                scope.receivers.remove(f.name.as_str());
                self.walk_function(&f.args, &f.decorator_list, &f.body, scope);
            }
            Stmt::ClassDef(c) => {
                for e in c.decorator_list.iter().chain(&c.bases) {
                    self.visit(e, scope);
                }
                for k in &c.keywords {
                    self.visit(&k.value, scope);
                }
                scope.receivers.remove(c.name.as_str());
                self.walk_body(&c.body, &mut Scope::default());
            }
            Stmt::Return(s) => self.visit_opt(s.value.as_deref(), scope),
            Stmt::Delete(s) => {
                for t in &s.targets {
                    self.visit_target(t, scope);
                    scope.forget_target(t);
                }
            }
            Stmt::Assign(s) => {
                let produced = self.visit(&s.value, scope);
                for t in &s.targets {
                    self.visit_target(t, scope);
                    self.assign(t, produced.clone(), scope);
                }
            }
            Stmt::TypeAlias(s) => {
                self.visit(&s.value, scope);
            }
            Stmt::AugAssign(s) => {
                self.visit(&s.value, scope);
                self.visit_target(&s.target, scope);
                scope.forget_target(&s.target);
            }
            Stmt::AnnAssign(s) => {
                let produced = match &s.value {
                    Some(v) => self.visit(v, scope),
                    None => None,
                };
                self.visit_target(&s.target, scope);
                if s.value.is_some() {
                    self.assign(&s.target, produced, scope);
                }
            }
            Stmt::For(s) => {
                self.visit(&s.iter, scope);
                self.visit_target(&s.target, scope);
                scope.forget_target(&s.target);
                self.walk_body(&s.body, scope);
                self.walk_body(&s.orelse, scope);
            }
            Stmt::AsyncFor(s) => {
                self.visit(&s.iter, scope);
                self.visit_target(&s.target, scope);
                scope.forget_target(&s.target);
                self.walk_body(&s.body, scope);
                self.walk_body(&s.orelse, scope);
            }
            Stmt::While(s) => {
                self.visit(&s.test, scope);
                self.walk_body(&s.body, scope);
                self.walk_body(&s.orelse, scope);
            }
            Stmt::If(s) => {
                self.visit(&s.test, scope);
                self.walk_body(&s.body, scope);
                self.walk_body(&s.orelse, scope);
            }
            Stmt::With(s) => {
                self.with_items(&s.items, scope);
                self.walk_body(&s.body, scope);
            }
            Stmt::AsyncWith(s) => {
                self.with_items(&s.items, scope);
                self.walk_body(&s.body, scope);
            }
            Stmt::Match(s) => {
                self.visit(&s.subject, scope);
                for case in &s.cases {
                    self.visit_opt(case.guard.as_deref(), scope);
                    self.walk_body(&case.body, scope);
                }
            }
            Stmt::Raise(s) => {
                self.visit_opt(s.exc.as_deref(), scope);
                self.visit_opt(s.cause.as_deref(), scope);
            }
            Stmt::Try(s) => self.try_parts(&s.body, &s.handlers, &s.orelse, &s.finalbody, scope),
            Stmt::TryStar(s) => self.try_parts(&s.body, &s.handlers, &s.orelse, &s.finalbody, scope),
            Stmt::Assert(s) => {
                self.visit(&s.test, scope);
                self.visit_opt(s.msg.as_deref(), scope);
            }
            Stmt::Import(s) => {
                for a in &s.names {
                    let local = a.asname.as_ref().map(|n| n.to_string())
                        .unwrap_or_else(|| a.name.split('.').next().unwrap_or_default().to_owned());
                    scope.receivers.remove(&local);
                }
            }
            Stmt::ImportFrom(s) => {
                for a in &s.names {
                    scope.receivers.remove(a.asname.as_ref().unwrap_or(&a.name).as_str());
                }
            }
            Stmt::Expr(s) => {
                self.visit(&s.value, scope);
            }
            Stmt::Global(_) | Stmt::Nonlocal(_) | Stmt::Pass(_) | Stmt::Break(_) | Stmt::Continue(_) => {}
        }
    }

    fn try_parts(
        &mut self,
        body: &[Stmt],
        handlers: &[ast::ExceptHandler],
        orelse: &[Stmt],
        finalbody: &[Stmt],
        scope: &mut Scope,
    ) {
        self.walk_body(body, scope);
        for h in handlers {
            let ast::ExceptHandler::ExceptHandler(h) = h;
            self.visit_opt(h.type_.as_deref(), scope);
            if let Some(name) = &h.name {
                scope.receivers.remove(name.as_str());
            }
            self.walk_body(&h.body, scope);
        }
        self.walk_body(orelse, scope);
        self.walk_body(finalbody, scope);
    }

    fn with_items(&mut self, items: &[ast::WithItem], scope: &mut Scope) {
        for item in items {
            self.visit(&item.context_expr, scope);
            if let Some(v) = &item.optional_vars {
                self.visit_target(v, scope);
                scope.forget_target(v);
            }
        }
    }

    /// Records `name = <ctor call>` receivers; any other binding clears them.
    fn assign(&mut self, target: &Expr, produced: Option<String>, scope: &mut Scope) {
        match (target, produced) {
            (Expr::Name(n), Some(class)) => {
                scope.receivers.insert(n.id.to_string(), class);
            }
            _ => scope.forget_target(target),
        }
    }

    /// Visits the sub-expressions evaluated when storing into `target`.
    fn visit_target(&mut self, target: &Expr, scope: &mut Scope) {
        match target {
            Expr::Name(_) => {}
            Expr::Tuple(t) => t.elts.iter().for_each(|e| self.visit_target(e, scope)),
            Expr::List(l) => l.elts.iter().for_each(|e| self.visit_target(e, scope)),
            Expr::Starred(s) => self.visit_target(&s.value, scope),
            Expr::Attribute(a) => {
                self.visit(&a.value, scope);
            }
            Expr::Subscript(s) => {
                self.visit(&s.value, scope);
                self.visit(&s.slice, scope);
            }
            other => {
                self.visit(other, scope);
            }
        }
    }

    fn visit_opt(&mut self, expr: Option<&Expr>, scope: &mut Scope) {
        if let Some(e) = expr {
            self.visit(e, scope);
        }
    }

    /// Visits an expression, recording resolved calls. Returns the class
    /// text when the expression is itself a resolved constructor call.
    fn visit(&mut self, expr: &Expr, scope: &mut Scope) -> Option<String> {
        match expr {
            Expr::Call(call) => self.visit_call(call, scope),
            Expr::NamedExpr(n) => {
                let produced = self.visit(&n.value, scope);
                self.assign(&n.target, produced.clone(), scope);
                produced
            }
            _ => {
                for child in child_exprs(expr) {
                    self.visit(child, scope);
                }
                None
            }
        }
    }

    fn visit_call(&mut self, call: &ast::ExprCall, scope: &mut Scope) -> Option<String> {
        let resolved = match call.func.as_ref() {
            Expr::Attribute(attr) => {
                let receiver = match attr.value.as_ref() {
                    Expr::Name(n) if scope.receivers.contains_key(n.id.as_str()) => {
                        scope.receivers.get(n.id.as_str()).cloned()
                    }
                    inner => self.visit(inner, scope),
                };
                match receiver {
                    Some(class) => self.resolve_method(&class, attr.attr.as_str()),
                    None => dotted_name(&call.func).and_then(|d| self.resolve_path(&d)),
                }
            }
            Expr::Name(n) => self.resolve_path(n.id.as_str()),
            other => {
                self.visit(other, scope);
                None
            }
        };

        let mut arguments = Vec::with_capacity(call.args.len() + call.keywords.len());
        for arg in &call.args {
            match arg {
                Expr::Starred(s) => {
                    self.visit(&s.value, scope);
                    arguments.push(CallArgument::StarArgs);
                }
                other => {
                    self.visit(other, scope);
                    arguments.push(CallArgument::Positional(argument_value(other)));
                }
            }
        }
        for kw in &call.keywords {
            self.visit(&kw.value, scope);
            match &kw.arg {
                Some(name) => arguments.push(CallArgument::Keyword(name.to_string(), argument_value(&kw.value))),
                None => arguments.push(CallArgument::StarKwargs),
            }
        }

        let resolved = resolved?;
        let (target, kind, class, params): (String, CallKind, Option<&Class>, &[crate::model::Parameter]) =
            match resolved {
                Resolved::Constructor { class, ctor: Some(f) } => {
                    (f.qname.render(), CallKind::Constructor, Some(class), &f.parameters)
                }
                Resolved::Constructor { class, ctor: None } => {
                    (class.qname.render(), CallKind::Constructor, Some(class), &[])
                }
                Resolved::Function(f) => (f.qname.render(), CallKind::Function, None, &f.parameters),
                Resolved::Method { class, method } => {
                    (method.qname.render(), CallKind::Method, Some(class), &method.parameters)
                }
            };
        let line = self.lines.line(usize::from(call.range().start()));
        let (bindings, opaque, lint) = match bind_arguments(&arguments, params) {
            Binding::Bound(b) => (b, false, None),
            Binding::Opaque { lint } => (BTreeMap::new(), true, lint),
        };
        self.events.push(UsageEvent {
            target,
            kind,
            class: class.map(|c| c.qname.render()),
            file: self.file.to_owned(),
            line,
            bindings,
            opaque,
            lint,
        });
        match (kind, class) {
            (CallKind::Constructor, Some(c)) => Some(c.qname.render()),
            _ => None,
        }
    }
}
