use std::fmt;

use serde::{Deserialize, Serialize};

/// Sentinel text of a non-literal argument expression.
pub const DYNAMIC_TEXT: &str = "«dynamic»";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiteralTag {
    None,
    Bool,
    Int,
    Float,
    String,
    Dynamic,
    OpaqueLiteral,
}

/// A normalized Python value as it appears in source.
///
/// Two values are "the same value" iff their tag and text are equal. The
/// text of scalar tags is canonical Python source (`True`, `0.5`, `'gini'`),
/// so it can be pasted into generated code unchanged.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LiteralValue {
    pub tag: LiteralTag,
    pub text: String,
}

impl LiteralValue {
    pub fn none() -> Self {
        Self { tag: LiteralTag::None, text: "None".into() }
    }

    pub fn bool(b: bool) -> Self {
        Self { tag: LiteralTag::Bool, text: if b { "True" } else { "False" }.into() }
    }

    /// `digits` is the decimal text of the integer, optionally with a leading `-`.
    pub fn int(digits: impl Into<String>) -> Self {
        let digits = digits.into();
        let text = if digits == "-0" { "0".to_owned() } else { digits };
        Self { tag: LiteralTag::Int, text }
    }

    /// Non-finite values use the `float('inf')` spelling so the text stays
    /// valid source.
    pub fn float(x: f64) -> Self {
        let text = if x.is_finite() { python_float_repr(x) } else { format!("float('{}')", python_float_repr(x)) };
        Self { tag: LiteralTag::Float, text }
    }

    pub fn string(s: &str) -> Self {
        Self { tag: LiteralTag::String, text: python_str_repr(s) }
    }

    pub fn dynamic() -> Self {
        Self { tag: LiteralTag::Dynamic, text: DYNAMIC_TEXT.into() }
    }

    pub fn opaque(raw: impl Into<String>) -> Self {
        Self { tag: LiteralTag::OpaqueLiteral, text: raw.into() }
    }

    /// Recovers the tag of a canonical text, as stored in value multisets.
    /// Anything that is not canonical scalar text is opaque.
    pub fn from_text(text: &str) -> Self {
        let tag = match text {
            DYNAMIC_TEXT => LiteralTag::Dynamic,
            "None" => LiteralTag::None,
            "True" | "False" => LiteralTag::Bool,
            "float('inf')" | "float('-inf')" | "float('nan')" => LiteralTag::Float,
            t if t.len() >= 2 && t.starts_with('\'') && python_str_repr(&decode_str_repr(t)) == t => {
                LiteralTag::String
            }
            t if is_int_text(t) => LiteralTag::Int,
            t if t.parse::<f64>().is_ok_and(|x| x.is_finite() && python_float_repr(x) == t) => LiteralTag::Float,
            _ => LiteralTag::OpaqueLiteral,
        };
        Self { tag, text: text.to_owned() }
    }

    pub fn is_dynamic(&self) -> bool {
        self.tag == LiteralTag::Dynamic
    }

    /// Scalar literals whose text is self-contained Python source.
    pub fn is_literal(&self) -> bool {
        !matches!(self.tag, LiteralTag::Dynamic | LiteralTag::OpaqueLiteral)
    }

    /// The decoded value of a string literal.
    pub fn as_str_value(&self) -> Option<String> {
        (self.tag == LiteralTag::String).then(|| decode_str_repr(&self.text))
    }
}

impl fmt::Display for LiteralValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Formats a float the way Python's `repr` does (shortest round-trip digits).
pub fn python_float_repr(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    if x == 0.0 {
        return format!("{sign}0.0");
    }
    // `{:e}` yields the shortest round-trip digits, e.g. `1.5e-5`.
    let sci = format!("{:e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("`{:e}` always has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let decpt = exp + 1;
    if decpt > -4 && decpt <= 16 {
        let n = digits.len() as i32;
        let body = if decpt <= 0 {
            format!("0.{}{}", "0".repeat((-decpt) as usize), digits)
        } else if decpt >= n {
            format!("{}{}.0", digits, "0".repeat((decpt - n) as usize))
        } else {
            let (int_part, frac) = digits.split_at(decpt as usize);
            format!("{int_part}.{frac}")
        };
        format!("{sign}{body}")
    } else {
        let (first, rest) = digits.split_at(1);
        let mant = if rest.is_empty() { first.to_owned() } else { format!("{first}.{rest}") };
        let esign = if exp < 0 { '-' } else { '+' };
        format!("{sign}{mant}e{esign}{:02}", exp.abs())
    }
}

/// Single-quoted Python string literal with normalized escapes.
pub fn python_str_repr(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\'' => out.push_str("\\'"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let v = c as u32;
                if v < 0x100 {
                    out.push_str(&format!("\\x{v:02x}"));
                } else if v < 0x10000 {
                    out.push_str(&format!("\\u{v:04x}"));
                } else {
                    out.push_str(&format!("\\U{v:08x}"));
                }
            }
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

fn is_int_text(t: &str) -> bool {
    let digits = t.strip_prefix('-').unwrap_or(t);
    !digits.is_empty()
        && digits.bytes().all(|b| b.is_ascii_digit())
        && (digits == "0" || !digits.starts_with('0'))
        && t != "-0"
}

/// Inverse of [`python_str_repr`].
fn decode_str_repr(text: &str) -> String {
    let inner = text
        .strip_prefix('\'')
        .and_then(|t| t.strip_suffix('\''))
        .unwrap_or(text);
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('t') => out.push('\t'),
            Some(width @ ('x' | 'u' | 'U')) => {
                let n = match width {
                    'x' => 2,
                    'u' => 4,
                    _ => 8,
                };
                let hex: String = chars.by_ref().take(n).collect();
                if let Some(ch) = u32::from_str_radix(&hex, 16).ok().and_then(char::from_u32) {
                    out.push(ch);
                }
            }
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}
