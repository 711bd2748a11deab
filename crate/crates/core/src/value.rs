//! Domain values: IRIs, literals, and blank nodes.
//!
//! The domain is partitioned into three kinds. Null values are blank nodes
//! and the reserved subset of literals whose text carries the `__null_`
//! prefix, so that structural equality and null detection always agree.

use std::fmt;

/// Reserved text prefix marking a literal as a labeled null.
pub const NULL_LIT_PREFIX: &str = "__null_";

/// The kind of a domain value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueKind {
    Iri,
    Lit,
    Blank,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueKind::Iri => write!(f, "iri"),
            ValueKind::Lit => write!(f, "lit"),
            ValueKind::Blank => write!(f, "blank"),
        }
    }
}

/// An element of the partitioned domain.
///
/// Equality and ordering are structural over (kind, text). Blank nodes store
/// their label without the `_:` sigil; it is added back on serialization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Iri(String),
    Lit(String),
    Blank(String),
}

impl Value {
    pub fn iri(text: impl Into<String>) -> Self {
        Value::Iri(text.into())
    }

    pub fn lit(text: impl Into<String>) -> Self {
        Value::Lit(text.into())
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Value::Blank(label.into())
    }

    /// A labeled null literal with the given allocation index.
    pub fn null_lit(index: u64) -> Self {
        Value::Lit(format!("{NULL_LIT_PREFIX}{index}"))
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Iri(_) => ValueKind::Iri,
            Value::Lit(_) => ValueKind::Lit,
            Value::Blank(_) => ValueKind::Blank,
        }
    }

    pub fn text(&self) -> &str {
        match self {
            Value::Iri(t) | Value::Lit(t) | Value::Blank(t) => t,
        }
    }

    /// Blank nodes are always invented; literals are null exactly when their
    /// text carries the reserved prefix.
    pub fn is_null(&self) -> bool {
        match self {
            Value::Blank(_) => true,
            Value::Lit(t) => t.starts_with(NULL_LIT_PREFIX),
            Value::Iri(_) => false,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Value::Iri(_))
    }

    pub fn is_lit(&self) -> bool {
        matches!(self, Value::Lit(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Value::Blank(_))
    }

    /// Allocation index of a null value, when its label carries one.
    ///
    /// Chase-invented nulls are named `__null_<k>` / `b<k>`; the index drives
    /// the merge direction between two nulls (lower index is kept).
    pub fn null_index(&self) -> Option<u64> {
        if !self.is_null() {
            return None;
        }
        let digits = match self {
            Value::Lit(t) => t.strip_prefix(NULL_LIT_PREFIX)?,
            Value::Blank(t) => t.strip_prefix('b')?,
            Value::Iri(_) => return None,
        };
        digits.parse().ok()
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Iri(t) => write!(f, "<{t}>"),
            Value::Lit(t) => write!(f, "\"{}\"", escape_literal(t)),
            Value::Blank(t) => write!(f, "_:{t}"),
        }
    }
}

/// Backslash-escapes a literal for N-Triples style output.
pub fn escape_literal(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}

/// Inverse of [`escape_literal`].
pub fn unescape_literal(text: &str) -> Option<String> {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            '\\' => out.push('\\'),
            '"' => out.push('"'),
            'n' => out.push('\n'),
            'r' => out.push('\r'),
            't' => out.push('\t'),
            _ => return None,
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_detection_agrees_with_equality() {
        assert!(Value::null_lit(1).is_null());
        assert!(Value::blank("b2").is_null());
        assert!(Value::blank("anything").is_null());
        assert!(!Value::lit("hello").is_null());
        assert!(!Value::iri("urn:x").is_null());
        assert_eq!(Value::null_lit(3), Value::lit("__null_3"));
    }

    #[test]
    fn null_index_parses_allocator_names() {
        assert_eq!(Value::null_lit(7).null_index(), Some(7));
        assert_eq!(Value::blank("b12").null_index(), Some(12));
        assert_eq!(Value::blank("x12").null_index(), None);
        assert_eq!(Value::lit("plain").null_index(), None);
    }

    #[test]
    fn escape_round_trip() {
        let samples = ["plain", "with \"quotes\"", "tab\tnl\nbs\\", ""];
        for s in samples {
            assert_eq!(unescape_literal(&escape_literal(s)).as_deref(), Some(s));
        }
    }

    #[test]
    fn ordering_groups_by_kind() {
        assert!(Value::iri("z") < Value::lit("a"));
        assert!(Value::lit("z") < Value::blank("a"));
    }
}
