use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a qualified name points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Module,
    Class,
    Function,
    Parameter,
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ElementKind::Module => "module",
            ElementKind::Class => "class",
            ElementKind::Function => "function",
            ElementKind::Parameter => "parameter",
        };
        f.write_str(s)
    }
}

/// Dotted name of an API element, e.g. `minilearn.models.Ridge.__init__#alpha`.
///
/// The text form does not carry the element kind except for parameters (the
/// `#` separator). Module, class and function names with the same segments
/// are told apart by the model that defines them, see
/// [`ApiModel::qname`](crate::model::ApiModel::qname).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QualifiedName {
    segments: Vec<String>,
    kind: ElementKind,
}

impl QualifiedName {
    pub fn new<I, S>(segments: I, kind: ElementKind) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<String> = segments.into_iter().map(Into::into).collect();
        if segments.is_empty() {
            return Err(Error::InvalidName("empty qualified name".into()));
        }
        if let Some(bad) = segments.iter().find(|s| !is_identifier(s)) {
            return Err(Error::InvalidName(format!("`{bad}` is not a Python identifier")));
        }
        if kind == ElementKind::Parameter && segments.len() < 2 {
            return Err(Error::InvalidName("parameter name needs an owning callable".into()));
        }
        Ok(Self { segments, kind })
    }

    /// Parses the text form, taking the kind from `#` when present and from
    /// `kind_hint` otherwise.
    pub fn parse_as(text: &str, kind_hint: ElementKind) -> Result<Self> {
        match text.split_once('#') {
            Some((owner, param)) => {
                if param.contains('#') {
                    return Err(Error::InvalidName(format!("`{text}` has more than one `#`")));
                }
                let mut segments: Vec<&str> = owner.split('.').collect();
                segments.push(param);
                Self::new(segments, ElementKind::Parameter)
            }
            None => {
                if kind_hint == ElementKind::Parameter {
                    return Err(Error::InvalidName(format!(
                        "`{text}` lacks the `#` parameter separator"
                    )));
                }
                Self::new(text.split('.'), kind_hint)
            }
        }
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        self.segments.last().expect("non-empty by construction")
    }

    /// Returns `self` extended by one segment.
    pub fn child(&self, segment: &str, kind: ElementKind) -> Result<Self> {
        let mut segments = self.segments.clone();
        segments.push(segment.to_owned());
        Self::new(segments, kind)
    }

    pub fn render(&self) -> String {
        match self.kind {
            ElementKind::Parameter => {
                let (param, owner) = self.segments.split_last().expect("non-empty");
                format!("{}#{}", owner.join("."), param)
            }
            _ => self.segments.join("."),
        }
    }
}

impl fmt::Display for QualifiedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn render_qname(q: &QualifiedName) -> String {
    q.render()
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c == '_' || c.is_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c == '_' || c.is_alphanumeric())
}

/// Underscore-prefixed names are private unless they are dunders.
pub fn is_private_segment(s: &str) -> bool {
    s.starts_with('_') && !(s.len() > 4 && s.starts_with("__") && s.ends_with("__"))
}

/// Splits rendered text into the owner part and the optional parameter name.
pub(crate) fn split_param(text: &str) -> (&str, Option<&str>) {
    match text.split_once('#') {
        Some((owner, param)) => (owner, Some(param)),
        None => (text, None),
    }
}
