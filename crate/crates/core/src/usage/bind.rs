use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{AssignmentKind, LiteralValue, Parameter};

/// One argument as written at a call site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CallArgument {
    Positional(LiteralValue),
    Keyword(String, LiteralValue),
    /// `*xs`
    StarArgs,
    /// `**kw`
    StarKwargs,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParamBinding {
    pub value: LiteralValue,
    pub explicit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    /// Every parameter of the signature bound to a value.
    Bound(BTreeMap<String, ParamBinding>),
    /// Arguments could not be matched; `lint` is set when the call itself is
    /// malformed rather than merely forwarded through `*`/`**`.
    Opaque { lint: Option<String> },
}

/// Binds call-site arguments to a signature with Python's rules.
///
/// Omitted parameters take their default (`explicit: false`). Variadic
/// parameters always bind: to the captured items when any, else to an empty
/// `()` / `{}`.
pub fn bind_arguments(args: &[CallArgument], signature: &[Parameter]) -> Binding {
    if args.iter().any(|a| matches!(a, CallArgument::StarArgs | CallArgument::StarKwargs)) {
        return Binding::Opaque { lint: None };
    }
    let lint = |msg: String| Binding::Opaque { lint: Some(msg) };

    let mut bound: BTreeMap<String, ParamBinding> = BTreeMap::new();
    let mut extra_positional: Vec<LiteralValue> = Vec::new();
    let mut extra_keyword: Vec<(String, LiteralValue)> = Vec::new();
    let var_positional = signature.iter().find(|p| p.assignment_kind == AssignmentKind::VarPositional);
    let var_keyword = signature.iter().find(|p| p.assignment_kind == AssignmentKind::VarKeyword);

    let mut positional_slots = signature.iter().filter(|p| p.assignment_kind.accepts_positional());
    for arg in args {
        match arg {
            CallArgument::Positional(value) => match positional_slots.next() {
                Some(p) => {
                    bound.insert(p.name.clone(), ParamBinding { value: value.clone(), explicit: true });
                }
                None if var_positional.is_some() => extra_positional.push(value.clone()),
                None => return lint("too many positional arguments".into()),
            },
            CallArgument::Keyword(name, value) => {
                let target = signature.iter().find(|p| p.name == *name && p.assignment_kind.accepts_keyword());
                match target {
                    Some(p) => {
                        if bound.contains_key(&p.name) {
                            return lint(format!("multiple values for argument `{name}`"));
                        }
                        bound.insert(p.name.clone(), ParamBinding { value: value.clone(), explicit: true });
                    }
                    None if var_keyword.is_some() => {
                        if extra_keyword.iter().any(|(k, _)| k == name) {
                            return lint(format!("repeated keyword argument `{name}`"));
                        }
                        extra_keyword.push((name.clone(), value.clone()));
                    }
                    None => return lint(format!("unexpected keyword argument `{name}`")),
                }
            }
            CallArgument::StarArgs | CallArgument::StarKwargs => unreachable!("handled above"),
        }
    }

    for p in signature {
        if bound.contains_key(&p.name) {
            continue;
        }
        let binding = match p.assignment_kind {
            AssignmentKind::VarPositional => {
                let explicit = !extra_positional.is_empty();
                ParamBinding { value: LiteralValue::opaque(tuple_text(&extra_positional)), explicit }
            }
            AssignmentKind::VarKeyword => {
                let explicit = !extra_keyword.is_empty();
                ParamBinding { value: LiteralValue::opaque(dict_text(&extra_keyword)), explicit }
            }
            _ => match &p.default {
                Some(default) => ParamBinding { value: default.clone(), explicit: false },
                None => return lint(format!("missing required argument `{}`", p.name)),
            },
        };
        bound.insert(p.name.clone(), binding);
    }
    Binding::Bound(bound)
}

fn tuple_text(items: &[LiteralValue]) -> String {
    match items {
        [] => "()".into(),
        [one] => format!("({},)", one.text),
        many => format!("({})", many.iter().map(|v| v.text.as_str()).collect::<Vec<_>>().join(", ")),
    }
}

fn dict_text(items: &[(String, LiteralValue)]) -> String {
    let body: Vec<String> = items.iter().map(|(k, v)| format!("'{k}': {}", v.text)).collect();
    format!("{{{}}}", body.join(", "))
}
