//! IRI constructors: interpreted function symbols mapping source values to
//! IRIs.
//!
//! Every symbol is interpreted by a total, injective function, and distinct
//! symbols have disjoint ranges. Explicit lookup tables may pin chosen
//! arguments to chosen IRIs; everything else falls back to a deterministic
//! encoding whose injectivity holds by construction.

use std::collections::BTreeMap;
use std::fmt;

use crate::value::{Value, ValueKind};

/// IRI scheme prefix reserved for default-constructed IRIs.
pub const DEFAULT_IRI_PREFIX: &str = "urn:dx:";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstructorError {
    UnknownSymbol(String),
    ArityMismatch { symbol: String, declared: usize, got: usize },
    DuplicateSymbol(String),
    /// A table row breaks per-symbol injectivity or cross-symbol range
    /// disjointness.
    RangeConflict { symbol: String, iri: String },
    /// Table IRIs must stay out of the reserved default range.
    ReservedIri { symbol: String, iri: String },
    NotAnIri { symbol: String, value: Value },
}

impl fmt::Display for ConstructorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructorError::UnknownSymbol(s) => write!(f, "unknown constructor {s}"),
            ConstructorError::ArityMismatch { symbol, declared, got } => {
                write!(f, "constructor {symbol} declared with arity {declared}, applied to {got} arguments")
            }
            ConstructorError::DuplicateSymbol(s) => {
                write!(f, "constructor {s} declared twice")
            }
            ConstructorError::RangeConflict { symbol, iri } => {
                write!(f, "table entry for {symbol} reuses <{iri}>")
            }
            ConstructorError::ReservedIri { symbol, iri } => {
                write!(f, "table entry for {symbol} uses reserved IRI <{iri}>")
            }
            ConstructorError::NotAnIri { symbol, value } => {
                write!(f, "table entry for {symbol} maps to non-IRI {value}")
            }
        }
    }
}

impl std::error::Error for ConstructorError {}

/// Percent-encodes everything outside `[A-Za-z0-9_.~-]`.
fn encode_component(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for b in text.bytes() {
        match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'_' | b'.' | b'~' | b'-' => {
                out.push(b as char)
            }
            _ => out.push_str(&format!("%{b:02X}")),
        }
    }
    out
}

fn kind_tag(kind: ValueKind) -> char {
    match kind {
        ValueKind::Iri => 'I',
        ValueKind::Lit => 'L',
        ValueKind::Blank => 'B',
    }
}

/// The deterministic fallback interpretation.
///
/// Produces `urn:dx:<f>:<k><enc(a1)>/<k><enc(a2)>/...` where `<k>` tags the
/// argument kind. The encoding is decodable, hence injective per symbol, and
/// the symbol segment makes ranges of distinct symbols disjoint.
pub fn default_interpretation(symbol: &str, args: &[Value]) -> Value {
    let mut iri = format!("{DEFAULT_IRI_PREFIX}{}:", encode_component(symbol));
    for (i, arg) in args.iter().enumerate() {
        if i > 0 {
            iri.push('/');
        }
        iri.push(kind_tag(arg.kind()));
        iri.push_str(&encode_component(arg.text()));
    }
    Value::Iri(iri)
}

/// Declared constructor symbols with their interpretation backend.
#[derive(Debug, Clone, Default)]
pub struct ConstructorRegistry {
    arities: BTreeMap<String, usize>,
    tables: BTreeMap<String, BTreeMap<Vec<Value>, Value>>,
}

impl ConstructorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, symbol: impl Into<String>, arity: usize) -> Result<(), ConstructorError> {
        let symbol = symbol.into();
        match self.arities.get(&symbol) {
            Some(&a) if a != arity => Err(ConstructorError::DuplicateSymbol(symbol)),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(symbol, arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, symbol: &str) -> Option<usize> {
        self.arities.get(symbol).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&String, usize)> {
        self.arities.iter().map(|(s, &a)| (s, a))
    }

    /// Pins `symbol(args)` to a chosen IRI.
    ///
    /// Rejects rows that would break injectivity or range disjointness, and
    /// rows inside the reserved default IRI range.
    pub fn set_mapping(
        &mut self,
        symbol: &str,
        args: Vec<Value>,
        iri: Value,
    ) -> Result<(), ConstructorError> {
        let declared = self
            .arity(symbol)
            .ok_or_else(|| ConstructorError::UnknownSymbol(symbol.to_string()))?;
        if args.len() != declared {
            return Err(ConstructorError::ArityMismatch {
                symbol: symbol.to_string(),
                declared,
                got: args.len(),
            });
        }
        if !iri.is_iri() {
            return Err(ConstructorError::NotAnIri { symbol: symbol.to_string(), value: iri });
        }
        if iri.text().starts_with(DEFAULT_IRI_PREFIX) {
            return Err(ConstructorError::ReservedIri {
                symbol: symbol.to_string(),
                iri: iri.text().to_string(),
            });
        }
        for (other, table) in &self.tables {
            for (other_args, other_iri) in table {
                if *other_iri == iri && (other != symbol || *other_args != args) {
                    return Err(ConstructorError::RangeConflict {
                        symbol: symbol.to_string(),
                        iri: iri.text().to_string(),
                    });
                }
            }
        }
        self.tables.entry(symbol.to_string()).or_default().insert(args, iri);
        Ok(())
    }

    /// Applies `symbol` to `args`: table lookup first, deterministic
    /// fallback otherwise.
    pub fn interpret(&self, symbol: &str, args: &[Value]) -> Result<Value, ConstructorError> {
        let declared = self
            .arity(symbol)
            .ok_or_else(|| ConstructorError::UnknownSymbol(symbol.to_string()))?;
        if args.len() != declared {
            return Err(ConstructorError::ArityMismatch {
                symbol: symbol.to_string(),
                declared,
                got: args.len(),
            });
        }
        if let Some(iri) = self.tables.get(symbol).and_then(|t| t.get(args)) {
            return Ok(iri.clone());
        }
        Ok(default_interpretation(symbol, args))
    }
}
