//! Thin helpers over the Python parser: literal normalization, signatures,
//! source slices and expression traversal.

use rustpython_parser::ast::{self, Constant, Expr, Ranged, Stmt};
use rustpython_parser::Parse;

use crate::model::{AssignmentKind, LiteralValue, Parameter};

pub type Suite = Vec<Stmt>;

/// Parses a module body; the error string carries the parser's location.
pub fn parse_suite(source: &str, path: &str) -> Result<Suite, String> {
    ast::Suite::parse(source, path).map_err(|e| e.to_string())
}

/// Maps byte offsets to 1-based line numbers.
pub struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(source: &str) -> Self {
        let starts = std::iter::once(0)
            .chain(source.match_indices('\n').map(|(i, _)| i + 1))
            .collect();
        Self { starts }
    }

    pub fn line(&self, offset: usize) -> usize {
        match self.starts.binary_search(&offset) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
    }
}

pub fn text_of<'s>(source: &'s str, node: &impl Ranged) -> &'s str {
    let range = node.range();
    let start = usize::from(range.start());
    let end = usize::from(range.end());
    source.get(start..end).unwrap_or("")
}

/// Scalar literal value of an expression, if it is one.
pub fn literal_of(expr: &Expr) -> Option<LiteralValue> {
    match expr {
        Expr::Constant(c) => constant_literal(&c.value),
        Expr::UnaryOp(u) => {
            let negate = match u.op {
                ast::UnaryOp::USub => true,
                ast::UnaryOp::UAdd => false,
                _ => return None,
            };
            let Expr::Constant(c) = u.operand.as_ref() else { return None };
            match &c.value {
                Constant::Int(i) => {
                    let digits = i.to_string();
                    Some(LiteralValue::int(if negate { format!("-{digits}") } else { digits }))
                }
                Constant::Float(f) => Some(LiteralValue::float(if negate { -f } else { *f })),
                _ => None,
            }
        }
        _ => None,
    }
}

fn constant_literal(c: &Constant) -> Option<LiteralValue> {
    match c {
        Constant::None => Some(LiteralValue::none()),
        Constant::Bool(b) => Some(LiteralValue::bool(*b)),
        Constant::Int(i) => Some(LiteralValue::int(i.to_string())),
        Constant::Float(f) => Some(LiteralValue::float(*f)),
        Constant::Str(s) => Some(LiteralValue::string(s)),
        _ => None,
    }
}

/// Argument value at a call site: a literal or the dynamic sentinel.
pub fn argument_value(expr: &Expr) -> LiteralValue {
    literal_of(expr).unwrap_or_else(LiteralValue::dynamic)
}

/// Default value in a signature: a literal or the raw source text.
pub fn default_value(source: &str, expr: &Expr) -> LiteralValue {
    literal_of(expr).unwrap_or_else(|| LiteralValue::opaque(normalize_ws(text_of(source, expr))))
}

fn normalize_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Builds parameters in source order, dropping the implicit receiver
/// (`self`/`cls`) when `drop_receiver` is set.
pub fn signature_of(source: &str, args: &ast::Arguments, drop_receiver: bool) -> Vec<Parameter> {
    let mut raw: Vec<(&ast::Arg, Option<&Expr>, AssignmentKind)> = Vec::new();
    for a in &args.posonlyargs {
        raw.push((&a.def, a.default.as_deref(), AssignmentKind::PositionalOnly));
    }
    for a in &args.args {
        raw.push((&a.def, a.default.as_deref(), AssignmentKind::PositionalOrKeyword));
    }
    if let Some(v) = &args.vararg {
        raw.push((v, None, AssignmentKind::VarPositional));
    }
    for a in &args.kwonlyargs {
        raw.push((&a.def, a.default.as_deref(), AssignmentKind::KeywordOnly));
    }
    if let Some(k) = &args.kwarg {
        raw.push((k, None, AssignmentKind::VarKeyword));
    }
    if drop_receiver && raw.first().is_some_and(|(_, _, kind)| kind.accepts_positional()) {
        raw.remove(0);
    }
    raw.into_iter()
        .enumerate()
        .map(|(position, (arg, default, assignment_kind))| Parameter {
            name: arg.arg.to_string(),
            position,
            assignment_kind,
            default: default.map(|d| default_value(source, d)),
            type_hint_text: arg.annotation.as_deref().map(|a| normalize_ws(text_of(source, a))),
        })
        .collect()
}

pub fn docstring_of(body: &[Stmt]) -> Option<String> {
    match body.first()? {
        Stmt::Expr(e) => match e.value.as_ref() {
            Expr::Constant(c) => match &c.value {
                Constant::Str(s) => Some(s.clone()),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

/// Dotted text of a `Name` / `Attribute` chain, e.g. `mm.Ridge`.
pub fn dotted_name(expr: &Expr) -> Option<String> {
    match expr {
        Expr::Name(n) => Some(n.id.to_string()),
        Expr::Attribute(a) => dotted_name(&a.value).map(|base| format!("{base}.{}", a.attr)),
        _ => None,
    }
}

/// Direct sub-expressions in evaluation order. Lambda bodies and
/// comprehension internals are included; they share the enclosing scope for
/// our purposes.
pub fn child_exprs(expr: &Expr) -> Vec<&Expr> {
    let mut out: Vec<&Expr> = Vec::new();
    match expr {
        Expr::BoolOp(e) => out.extend(e.values.iter()),
        Expr::NamedExpr(e) => out.push(&e.value),
        Expr::BinOp(e) => {
            out.push(&e.left);
            out.push(&e.right);
        }
        Expr::UnaryOp(e) => out.push(&e.operand),
        Expr::Lambda(e) => {
            push_defaults(&e.args, &mut out);
            out.push(&e.body);
        }
        Expr::IfExp(e) => {
            out.push(&e.test);
            out.push(&e.body);
            out.push(&e.orelse);
        }
        Expr::Dict(e) => {
            for (k, v) in e.keys.iter().zip(&e.values) {
                if let Some(k) = k {
                    out.push(k);
                }
                out.push(v);
            }
        }
        Expr::Set(e) => out.extend(e.elts.iter()),
        Expr::ListComp(e) => {
            push_generators(&e.generators, &mut out);
            out.push(&e.elt);
        }
        Expr::SetComp(e) => {
            push_generators(&e.generators, &mut out);
            out.push(&e.elt);
        }
        Expr::DictComp(e) => {
            push_generators(&e.generators, &mut out);
            out.push(&e.key);
            out.push(&e.value);
        }
        Expr::GeneratorExp(e) => {
            push_generators(&e.generators, &mut out);
            out.push(&e.elt);
        }
        Expr::Await(e) => out.push(&e.value),
        Expr::Yield(e) => out.extend(e.value.as_deref()),
        Expr::YieldFrom(e) => out.push(&e.value),
        Expr::Compare(e) => {
            out.push(&e.left);
            out.extend(e.comparators.iter());
        }
        Expr::Call(e) => {
            out.push(&e.func);
            out.extend(e.args.iter());
            out.extend(e.keywords.iter().map(|k| &k.value));
        }
        Expr::FormattedValue(e) => {
            out.push(&e.value);
            out.extend(e.format_spec.as_deref());
        }
        Expr::JoinedStr(e) => out.extend(e.values.iter()),
        Expr::Constant(_) | Expr::Name(_) => {}
        Expr::Attribute(e) => out.push(&e.value),
        Expr::Subscript(e) => {
            out.push(&e.value);
            out.push(&e.slice);
        }
        Expr::Starred(e) => out.push(&e.value),
        Expr::List(e) => out.extend(e.elts.iter()),
        Expr::Tuple(e) => out.extend(e.elts.iter()),
        Expr::Slice(e) => {
            out.extend(e.lower.as_deref());
            out.extend(e.upper.as_deref());
            out.extend(e.step.as_deref());
        }
    }
    out
}

fn push_generators<'a>(gens: &'a [ast::Comprehension], out: &mut Vec<&'a Expr>) {
    for g in gens {
        out.push(&g.iter);
        out.push(&g.target);
        out.extend(g.ifs.iter());
    }
}

fn push_defaults<'a>(args: &'a ast::Arguments, out: &mut Vec<&'a Expr>) {
    for a in args.posonlyargs.iter().chain(&args.args).chain(&args.kwonlyargs) {
        out.extend(a.default.as_deref());
    }
}

/// Names bound by an assignment target (`a`, `a, b`, `[a, *b]`).
pub fn bound_names(target: &Expr, out: &mut Vec<String>) {
    match target {
        Expr::Name(n) => out.push(n.id.to_string()),
        Expr::Tuple(t) => t.elts.iter().for_each(|e| bound_names(e, out)),
        Expr::List(l) => l.elts.iter().for_each(|e| bound_names(e, out)),
        Expr::Starred(s) => bound_names(&s.value, out),
        _ => {}
    }
}
