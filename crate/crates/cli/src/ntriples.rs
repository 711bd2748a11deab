//! Reading and writing solution graphs: an N-Triples file plus a
//! tab-separated typing file.

use std::fmt;

use rel2rdf_core::shex::{TargetType, LIT_MARKER};
use rel2rdf_core::typed_graph::TypedGraph;
use rel2rdf_core::value::{escape_literal, unescape_literal, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for GraphParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for GraphParseError {}

fn render(value: &Value) -> String {
    match value {
        Value::Iri(t) => format!("<{t}>"),
        Value::Blank(t) => format!("_:{t}"),
        Value::Lit(t) => format!("\"{}\"", escape_literal(t)),
    }
}

/// Serializes the graph, one sorted triple per line.
pub fn write_ntriples(graph: &TypedGraph) -> String {
    let mut out = String::new();
    for (s, p, o) in graph.triples() {
        out.push_str(&format!("{} {} {} .\n", render(s), render(p), render(o)));
    }
    out
}

/// Serializes the typing, one `node TAB type` row per assignment.
pub fn write_typing(graph: &TypedGraph) -> String {
    let mut out = String::new();
    for (node, types) in graph.typing() {
        for ty in types {
            out.push_str(&format!("{}\t{}\n", render(node), ty.relation_name()));
        }
    }
    out
}

struct Line<'a> {
    text: &'a [u8],
    pos: usize,
    number: usize,
}

impl<'a> Line<'a> {
    fn error(&self, message: impl Into<String>) -> GraphParseError {
        GraphParseError { line: self.number, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && (self.text[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Value, GraphParseError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        match rest.first() {
            Some(b'<') => {
                let end = rest
                    .iter()
                    .position(|&b| b == b'>')
                    .ok_or_else(|| self.error("unterminated IRI"))?;
                let text = String::from_utf8_lossy(&rest[1..end]).into_owned();
                self.pos += end + 1;
                Ok(Value::iri(text))
            }
            Some(b'_') => {
                if rest.get(1) != Some(&b':') {
                    return Err(self.error("blank node must start with '_:'"));
                }
                let end = rest
                    .iter()
                    .position(|&b| (b as char).is_whitespace() || b == b'\t')
                    .unwrap_or(rest.len());
                let label = String::from_utf8_lossy(&rest[2..end]).into_owned();
                if label.is_empty() {
                    return Err(self.error("empty blank node label"));
                }
                self.pos += end;
                Ok(Value::blank(label))
            }
            Some(b'"') => {
                // Find the closing unescaped quote.
                let mut i = 1;
                loop {
                    match rest.get(i) {
                        None => return Err(self.error("unterminated literal")),
                        Some(b'\\') => i += 2,
                        Some(b'"') => break,
                        Some(_) => i += 1,
                    }
                }
                let raw = String::from_utf8_lossy(&rest[1..i]).into_owned();
                let text = unescape_literal(&raw)
                    .ok_or_else(|| self.error("bad escape in literal"))?;
                self.pos += i + 1;
                Ok(Value::lit(text))
            }
            _ => Err(self.error("expected '<iri>', '_:label' or '\"literal\"'")),
        }
    }

    fn expect_dot(&mut self) -> Result<(), GraphParseError> {
        self.skip_ws();
        if self.text.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            self.skip_ws();
            if self.pos == self.text.len() {
                return Ok(());
            }
        }
        Err(self.error("expected terminating '.'"))
    }
}

/// Parses an N-Triples document written by [`write_ntriples`] (or by hand:
/// IRIs, blank labels, and escaped plain literals).
pub fn parse_ntriples(text: &str) -> Result<Vec<(Value, Value, Value)>, GraphParseError> {
    let mut triples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut line = Line { text: trimmed.as_bytes(), pos: 0, number: i + 1 };
        let s = line.term()?;
        let p = line.term()?;
        let o = line.term()?;
        line.expect_dot()?;
        triples.push((s, p, o));
    }
    Ok(triples)
}

/// Parses `node TAB type` rows.
pub fn parse_typing(text: &str) -> Result<Vec<(Value, TargetType)>, GraphParseError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((node_text, type_text)) = trimmed.split_once('\t') else {
            return Err(GraphParseError {
                line: i + 1,
                message: "expected 'node<TAB>type'".to_string(),
            });
        };
        let mut line = Line { text: node_text.trim().as_bytes(), pos: 0, number: i + 1 };
        let node = line.term()?;
        let ty = match type_text.trim() {
            LIT_MARKER => TargetType::Lit,
            shape => TargetType::shape(shape),
        };
        rows.push((node, ty));
    }
    Ok(rows)
}

/// Rebuilds a typed graph from the two files.
pub fn graph_from_files(
    ntriples: &str,
    typing: &str,
) -> Result<TypedGraph, GraphParseError> {
    let mut graph = TypedGraph::new();
    for (s, p, o) in parse_ntriples(ntriples)? {
        graph
            .insert_triple(s, p, o)
            .map_err(|e| GraphParseError { line: 0, message: e.to_string() })?;
    }
    for (node, ty) in parse_typing(typing)? {
        graph
            .add_type(node, ty)
            .map_err(|e| GraphParseError { line: 0, message: e.to_string() })?;
    }
    Ok(graph)
}
