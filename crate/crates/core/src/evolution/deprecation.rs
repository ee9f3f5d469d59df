use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::model::{ApiModel, Callable, Class};

/// Since-version used when the text names none.
pub const UNKNOWN_VERSION: &str = "unknown";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeprecationRule {
    /// `.. deprecated:: <v>` directive.
    Directive,
    /// A decorator named `deprecated`.
    Decorator,
    /// Sentences such as "deprecated since version 1.1".
    Sentence,
    /// Deprecation-like text no rule could parse.
    Unparsed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeprecationFact {
    pub target: String,
    pub since_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub removal_version: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replacement: Option<String>,
    pub rule: DeprecationRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

const VERSION: &str = r"(\d+(?:\.\d+)*)";

static DIRECTIVE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(\s*)\.\.\s+deprecated::\s*(\S*)").unwrap());
static SINCE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"(?i)\bdeprecated\s+(?:since|in)\s+(?:version\s+)?{VERSION}")).unwrap());
static REMOVAL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"(?i)\bremoved\s+in\s+(?:version\s+)?{VERSION}")).unwrap());
static WILL_BE_REMOVED: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"(?i)\bwill\s+be\s+removed\s+in\s+(?:version\s+)?{VERSION}")).unwrap());
static REPLACEMENT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\buse\s+(?::\w+:)?`{0,2}~?([A-Za-z_][\w.]*?)(?:\(\))?`{0,2}\s+instead\b").unwrap()
});
static DEPRECATION_WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)deprecat").unwrap());
static PARAM_ENTRY: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\*{0,2}([A-Za-z_]\w*)\s*(?::.*)?$").unwrap());

fn indent_of(line: &str) -> usize {
    line.len() - line.trim_start().len()
}

/// Docstring lines with the common indentation of lines 2.. removed, the way
/// `inspect.cleandoc` does.
fn clean_lines(doc: &str) -> Vec<String> {
    let lines: Vec<&str> = doc.lines().collect();
    let margin = lines.iter().skip(1).filter(|l| !l.trim().is_empty()).map(|l| indent_of(l)).min().unwrap_or(0);
    lines
        .iter()
        .enumerate()
        .map(|(i, l)| if i == 0 { l.trim().to_owned() } else { l.get(margin..).unwrap_or("").trim_end().to_owned() })
        .collect()
}

fn is_underline(line: &str) -> bool {
    let t = line.trim();
    t.len() >= 3 && t.chars().all(|c| c == '-' || c == '=')
}

/// Splits a docstring into element-level lines and numpydoc parameter entries.
fn split_sections(doc: &str) -> (Vec<String>, Vec<(String, Vec<String>)>) {
    let lines = clean_lines(doc);
    let mut own = Vec::new();
    let mut params: Vec<(String, Vec<String>)> = Vec::new();
    let mut in_params = false;
    let mut base = 0;
    let mut i = 0;
    while i < lines.len() {
        let line = &lines[i];
        let header = lines.get(i + 1).is_some_and(|next| is_underline(next)) && !line.trim().is_empty();
        if header {
            in_params = matches!(line.trim(), "Parameters" | "Other Parameters");
            base = indent_of(line);
            i += 2;
            continue;
        }
        if in_params && !line.trim().is_empty() {
            if indent_of(line) <= base {
                match PARAM_ENTRY.captures(line.trim()) {
                    Some(c) if indent_of(line) == base => params.push((c[1].to_owned(), Vec::new())),
                    _ => {
                        in_params = false;
                        own.push(line.clone());
                    }
                }
            } else if let Some((_, body)) = params.last_mut() {
                body.push(line.clone());
            }
        } else if in_params {
            if let Some((_, body)) = params.last_mut() {
                body.push(String::new());
            }
        } else {
            own.push(line.clone());
        }
        i += 1;
    }
    (own, params)
}

fn capture(re: &Regex, text: &str) -> Option<String> {
    re.captures(text).map(|c| c[1].to_owned())
}

fn fact(target: &str, rule: DeprecationRule, since: Option<String>, text: &str, removal_re: &Regex) -> DeprecationFact {
    let warning = since.is_none().then(|| "no deprecation version given".to_owned());
    DeprecationFact {
        target: target.to_owned(),
        since_version: since.unwrap_or_else(|| UNKNOWN_VERSION.to_owned()),
        removal_version: capture(removal_re, text),
        replacement: capture(&REPLACEMENT, text),
        rule,
        warning,
    }
}

/// `.. deprecated::` directive with its indented body.
fn directive_rule(target: &str, lines: &[String]) -> Option<DeprecationFact> {
    let (i, caps) = lines.iter().enumerate().find_map(|(i, l)| DIRECTIVE.captures(l).map(|c| (i, c)))?;
    let own_indent = caps[1].len();
    let since = Some(caps[2].trim_end_matches(['.', ',', ':'])).filter(|v| !v.is_empty()).map(str::to_owned);
    let mut body = vec![lines[i][caps.get(0).unwrap().end()..].to_owned()];
    for l in &lines[i + 1..] {
        // On the summary line the body's indentation was lost to the
        // docstring margin, so the body runs to the first blank line.
        let ends = if i == 0 { l.trim().is_empty() } else { !l.trim().is_empty() && indent_of(l) <= own_indent };
        if ends {
            break;
        }
        body.push(l.trim().to_owned());
    }
    Some(fact(target, DeprecationRule::Directive, since, &body.join(" "), &REMOVAL))
}

fn sentence_rule(target: &str, text: &str) -> Option<DeprecationFact> {
    let since = capture(&SINCE, text);
    if since.is_none() && !WILL_BE_REMOVED.is_match(text) {
        return None;
    }
    Some(fact(target, DeprecationRule::Sentence, since, text, &WILL_BE_REMOVED))
}

fn unparsed_rule(target: &str, text: &str) -> Option<DeprecationFact> {
    let m = DEPRECATION_WORD.find(text)?;
    let start = text[..m.start()].rfind(['.', '\n']).map_or(0, |p| p + 1);
    let end = text[m.end()..].find(['.', '\n']).map_or(text.len(), |p| m.end() + p);
    Some(DeprecationFact {
        target: target.to_owned(),
        since_version: UNKNOWN_VERSION.to_owned(),
        removal_version: None,
        replacement: None,
        rule: DeprecationRule::Unparsed,
        warning: Some(format!("unparsed deprecation text: {}", text[start..end].trim())),
    })
}

fn decorator_rule(target: &str, decorators: &[String]) -> Option<DeprecationFact> {
    let d = decorators.iter().find(|d| {
        let callee = d.split('(').next().unwrap_or(d).trim();
        callee.rsplit('.').next() == Some("deprecated")
    })?;
    let args = d.split_once('(').map_or("", |(_, a)| a);
    let since = capture(&SINCE, args);
    Some(fact(target, DeprecationRule::Decorator, since, args, &REMOVAL))
}

/// Rules in priority order; the first that matches decides.
fn element_fact(target: &str, doc: Option<&str>, decorators: &[String]) -> (Option<DeprecationFact>, Vec<(String, Vec<String>)>) {
    let (own, params) = doc.map(split_sections).unwrap_or_default();
    let text = own.join("\n");
    let found = directive_rule(target, &own)
        .or_else(|| decorator_rule(target, decorators))
        .or_else(|| sentence_rule(target, &text))
        .or_else(|| unparsed_rule(target, &text));
    (found, params)
}

fn param_facts(owner: &Callable, entries: &[(String, Vec<String>)], out: &mut Vec<DeprecationFact>) {
    for (name, body) in entries {
        if owner.parameter(name).is_none() {
            continue;
        }
        let target = format!("{}#{name}", owner.qname.render());
        let text = body.join("\n");
        if let Some(f) = directive_rule(&target, body)
            .or_else(|| sentence_rule(&target, &text))
            .or_else(|| unparsed_rule(&target, &text))
        {
            out.push(f);
        }
    }
}

fn callable_facts(f: &Callable, out: &mut Vec<DeprecationFact>) {
    let (found, params) = element_fact(&f.qname.render(), f.docstring.as_deref(), &f.decorators);
    out.extend(found);
    param_facts(f, &params, out);
}

fn class_facts(c: &Class, out: &mut Vec<DeprecationFact>) {
    let (found, params) = element_fact(&c.qname.render(), c.docstring.as_deref(), &c.decorators);
    out.extend(found);
    // numpydoc documents constructor parameters on the class.
    if let Some(ctor) = c.constructor() {
        param_facts(ctor, &params, out);
    }
    for m in &c.methods {
        callable_facts(m, out);
    }
}

/// Deprecation facts from every docstring and decorator of `model`, sorted by target.
pub fn extract_deprecations(model: &ApiModel) -> Vec<DeprecationFact> {
    let mut out = Vec::new();
    for m in model.modules() {
        let (found, _) = element_fact(&m.qname.render(), m.docstring.as_deref(), &[]);
        out.extend(found);
        for c in &m.classes {
            class_facts(c, &mut out);
        }
        for f in &m.functions {
            callable_facts(f, &mut out);
        }
    }
    out.sort_by(|a, b| a.target.cmp(&b.target));
    out.dedup_by(|a, b| a.target == b.target);
    out
}
