//! Parsers and printers for the three surface syntaxes: relational schemas,
//! shape schemas, and mapping rules.
//!
//! All three share one token-level cursor. `#` starts a line comment.
//! Predicates are written `:name` (expanded under the default prefix) or as
//! full `<iri>` references.

use std::fmt;

use rel2rdf_core::dependency::{Arg, Atom, Term};
use rel2rdf_core::mapping::StTgd;
use rel2rdf_core::relational::{FunctionalDependency, RelationalSchema};
use rel2rdf_core::shex::{Multiplicity, ShexSchema, TargetType, TripleConstraint, LIT_MARKER, TRIPLE};
use rel2rdf_core::value::{Value, NULL_LIT_PREFIX};

/// Default expansion for `:name` predicates.
pub const PREDICATE_PREFIX: &str = "urn:dx:p:";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Cursor {
    fn new(text: &str) -> Self {
        Cursor { chars: text.chars().collect(), pos: 0, line: 1, col: 1 }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_trivia();
        self.peek().is_none()
    }

    fn eat(&mut self, token: char) -> bool {
        self.skip_trivia();
        if self.peek() == Some(token) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: char) -> Result<(), ParseError> {
        self.skip_trivia();
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!(
                "expected '{token}'{}",
                self.peek().map(|c| format!(", found '{c}'")).unwrap_or_default()
            )))
        }
    }

    /// Eats a multi-character symbol like `::` or `=>`.
    fn eat_symbol(&mut self, sym: &str) -> bool {
        self.skip_trivia();
        let end = self.pos + sym.len();
        if end <= self.chars.len() && self.chars[self.pos..end].iter().collect::<String>() == sym {
            for _ in 0..sym.len() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn expect_symbol(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat_symbol(sym) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{sym}'")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_trivia();
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            other => {
                return Err(self.error(format!(
                    "expected identifier{}",
                    other.map(|c| format!(", found '{c}'")).unwrap_or_default()
                )))
            }
        }
        let mut name = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                name.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Ok(name)
    }

    /// `:name` or `<iri>`, returned as an IRI value.
    fn predicate(&mut self) -> Result<Value, ParseError> {
        self.skip_trivia();
        match self.peek() {
            Some(':') => {
                self.bump();
                let name = self.ident()?;
                Ok(Value::iri(format!("{PREDICATE_PREFIX}{name}")))
            }
            Some('<') => self.iri_ref(),
            other => Err(self.error(format!(
                "expected ':name' or '<iri>'{}",
                other.map(|c| format!(", found '{c}'")).unwrap_or_default()
            ))),
        }
    }

    fn iri_ref(&mut self) -> Result<Value, ParseError> {
        self.expect('<')?;
        let mut text = String::new();
        loop {
            match self.bump() {
                Some('>') => return Ok(Value::iri(text)),
                Some(c) => text.push(c),
                None => return Err(self.error("unterminated '<iri>'")),
            }
        }
    }

    fn string_literal(&mut self) -> Result<String, ParseError> {
        self.expect('"')?;
        let mut text = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(text),
                Some('\\') => match self.bump() {
                    Some('\\') => text.push('\\'),
                    Some('"') => text.push('"'),
                    Some('n') => text.push('\n'),
                    Some('r') => text.push('\r'),
                    Some('t') => text.push('\t'),
                    _ => return Err(self.error("bad escape in string literal")),
                },
                Some(c) => text.push(c),
                None => return Err(self.error("unterminated string literal")),
            }
        }
    }
}

/// Parses relation declarations, `fd`, and `key` statements.
pub fn parse_relational_schema(text: &str) -> Result<RelationalSchema, ParseError> {
    let mut cursor = Cursor::new(text);
    let mut schema = RelationalSchema::new();
    while !cursor.at_end() {
        let word = cursor.ident()?;
        match word.as_str() {
            "fd" | "key" => {
                let relation = cursor.ident()?;
                let Some(decl) = schema.relations.get(&relation).cloned() else {
                    return Err(cursor.error(format!("unknown relation {relation}")));
                };
                let attrs = decl.attributes.clone().unwrap_or_default();
                let position = |cursor: &Cursor, name: &str| {
                    attrs
                        .iter()
                        .position(|a| a == name)
                        .map(|i| i + 1)
                        .ok_or_else(|| {
                            cursor.error(format!("unknown attribute {name} of {relation}"))
                        })
                };
                cursor.expect(':')?;
                let mut lhs = Vec::new();
                loop {
                    let attr = cursor.ident()?;
                    lhs.push(position(&cursor, &attr)?);
                    cursor.skip_trivia();
                    match cursor.peek() {
                        Some(c) if c.is_ascii_alphabetic() || c == '_' => continue,
                        _ => break,
                    }
                }
                let rhs = if word == "key" {
                    (1..=decl.arity).collect::<Vec<_>>()
                } else {
                    cursor.expect_symbol("->")?;
                    let mut rhs = Vec::new();
                    loop {
                        let attr = cursor.ident()?;
                        rhs.push(position(&cursor, &attr)?);
                        cursor.skip_trivia();
                        match cursor.peek() {
                            Some(c) if c.is_ascii_alphabetic() || c == '_' => continue,
                            _ => break,
                        }
                    }
                    rhs
                };
                cursor.expect(';')?;
                schema
                    .add_fd(FunctionalDependency::new(relation, lhs, rhs))
                    .map_err(|e| cursor.error(e.to_string()))?;
            }
            relation => {
                cursor.expect('(')?;
                let mut attrs = Vec::new();
                if !cursor.eat(')') {
                    loop {
                        attrs.push(cursor.ident()?);
                        if cursor.eat(',') {
                            continue;
                        }
                        cursor.expect(')')?;
                        break;
                    }
                }
                cursor.expect(';')?;
                if attrs.iter().collect::<std::collections::BTreeSet<_>>().len() != attrs.len() {
                    return Err(cursor.error(format!("duplicate attribute in {relation}")));
                }
                schema
                    .declare_named(relation, attrs.len(), Some(attrs))
                    .map_err(|e| cursor.error(e.to_string()))?;
            }
        }
    }
    Ok(schema)
}

/// Parses shape definitions `T { :p :: Target [m]; ... }`.
pub fn parse_shex(text: &str) -> Result<ShexSchema, ParseError> {
    let mut cursor = Cursor::new(text);
    let mut schema = ShexSchema::new();
    while !cursor.at_end() {
        let shape = cursor.ident()?;
        cursor.expect('{')?;
        let mut constraints = Vec::new();
        loop {
            cursor.skip_trivia();
            if cursor.eat('}') {
                break;
            }
            let predicate = cursor.predicate()?;
            cursor.expect_symbol("::")?;
            let target_name = cursor.ident()?;
            let target = if target_name == LIT_MARKER {
                TargetType::Lit
            } else {
                TargetType::shape(target_name)
            };
            cursor.expect('[')?;
            cursor.skip_trivia();
            let mult = match cursor.bump() {
                Some('1') => Multiplicity::One,
                Some('?') => Multiplicity::Opt,
                Some('*') => Multiplicity::Star,
                Some('+') => Multiplicity::Plus,
                _ => return Err(cursor.error("expected multiplicity 1, ?, * or +")),
            };
            cursor.expect(']')?;
            constraints.push(TripleConstraint::new(
                predicate.text().to_string(),
                target,
                mult,
            ));
            if !cursor.eat(';') {
                cursor.expect('}')?;
                break;
            }
        }
        schema
            .define(shape, constraints)
            .map_err(|e| cursor.error(e.to_string()))?;
    }
    schema.validate().map_err(|e| {
        let mut c = Cursor::new("");
        c.error(e.to_string())
    })?;
    Ok(schema)
}

fn parse_term(cursor: &mut Cursor, allow_app: bool) -> Result<Term, ParseError> {
    cursor.skip_trivia();
    match cursor.peek() {
        Some('"') => {
            let text = cursor.string_literal()?;
            if text.starts_with(NULL_LIT_PREFIX) {
                return Err(cursor.error(format!("literal prefix {NULL_LIT_PREFIX} is reserved")));
            }
            Ok(Term::constant(Value::lit(text)))
        }
        Some(':') | Some('<') => Ok(Term::constant(cursor.predicate()?)),
        _ => {
            let name = cursor.ident()?;
            cursor.skip_trivia();
            if cursor.peek() == Some('(') {
                if !allow_app {
                    return Err(cursor.error("nested function terms are not allowed"));
                }
                cursor.expect('(')?;
                let mut args = Vec::new();
                if !cursor.eat(')') {
                    loop {
                        match parse_term(cursor, false)? {
                            Term::Var(v) => args.push(Arg::Var(v)),
                            Term::Const(c) => args.push(Arg::Const(c)),
                            Term::App(_, _) => unreachable!("apps rejected when !allow_app"),
                        }
                        if cursor.eat(',') {
                            continue;
                        }
                        cursor.expect(')')?;
                        break;
                    }
                }
                Ok(Term::app(name, args))
            } else {
                Ok(Term::var(name))
            }
        }
    }
}

fn parse_atom(cursor: &mut Cursor) -> Result<Atom, ParseError> {
    let relation = cursor.ident()?;
    cursor.expect('(')?;
    let mut terms = Vec::new();
    if !cursor.eat(')') {
        loop {
            terms.push(parse_term(cursor, true)?);
            if cursor.eat(',') {
                continue;
            }
            cursor.expect(')')?;
            break;
        }
    }
    Ok(Atom::new(relation, terms))
}

/// Parses mapping rules `body, ... => head, ... ;` against the source
/// schema: body relations must be declared with matching arity and must not
/// carry function terms; head variables must occur in the body.
pub fn parse_mapping(
    text: &str,
    source: &RelationalSchema,
) -> Result<Vec<StTgd>, ParseError> {
    let mut cursor = Cursor::new(text);
    let mut rules = Vec::new();
    while !cursor.at_end() {
        let mut body = Vec::new();
        loop {
            let atom = parse_atom(&mut cursor)?;
            match source.arity(&atom.relation) {
                None => {
                    return Err(cursor.error(format!("unknown relation {}", atom.relation)))
                }
                Some(a) if a != atom.terms.len() => {
                    return Err(cursor.error(format!(
                        "relation {} has arity {a}, atom has {} terms",
                        atom.relation,
                        atom.terms.len()
                    )))
                }
                Some(_) => {}
            }
            if atom.terms.iter().any(|t| matches!(t, Term::App(_, _))) {
                return Err(cursor.error("function terms may only appear in heads"));
            }
            body.push(atom);
            if cursor.eat(',') {
                continue;
            }
            cursor.expect_symbol("=>")?;
            break;
        }
        let mut head = Vec::new();
        loop {
            head.push(parse_atom(&mut cursor)?);
            if cursor.eat(',') {
                continue;
            }
            cursor.expect(';')?;
            break;
        }
        let body_vars: std::collections::BTreeSet<&str> =
            body.iter().flat_map(|a| a.variables()).collect();
        for atom in &head {
            if atom.relation == TRIPLE && atom.terms.len() != 3 {
                return Err(cursor.error(format!("Triple atom {atom} must have three terms")));
            }
            for v in atom.variables() {
                if !body_vars.contains(v) {
                    return Err(cursor.error(format!("head variable {v} not bound in body")));
                }
            }
        }
        rules.push(StTgd::new(body, head));
    }
    Ok(rules)
}

fn show_predicate(value: &Value) -> String {
    match value.text().strip_prefix(PREDICATE_PREFIX) {
        Some(local) if local.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') => {
            format!(":{local}")
        }
        _ => format!("<{}>", value.text()),
    }
}

fn show_term(term: &Term) -> String {
    match term {
        Term::Var(v) => v.clone(),
        Term::Const(Value::Iri(_)) => show_predicate(match term {
            Term::Const(c) => c,
            _ => unreachable!(),
        }),
        Term::Const(c) => format!("\"{}\"", rel2rdf_core::value::escape_literal(c.text())),
        Term::App(f, args) => {
            let shown: Vec<String> = args
                .iter()
                .map(|a| match a {
                    Arg::Var(v) => v.clone(),
                    Arg::Const(c) => show_term(&Term::constant(c.clone())),
                })
                .collect();
            format!("{f}({})", shown.join(", "))
        }
    }
}

/// Prints a schema in the surface syntax; parsing the output reproduces the
/// schema.
pub fn print_relational_schema(schema: &RelationalSchema) -> String {
    let mut out = String::new();
    let attr_names = |relation: &str| -> Vec<String> {
        let decl = &schema.relations[relation];
        decl.attributes
            .clone()
            .unwrap_or_else(|| (1..=decl.arity).map(|i| format!("c{i}")).collect())
    };
    for (relation, _) in &schema.relations {
        out.push_str(&format!("{relation}({});\n", attr_names(relation).join(", ")));
    }
    for fd in &schema.fds {
        let attrs = attr_names(&fd.relation);
        let names = |side: &std::collections::BTreeSet<usize>| {
            side.iter().map(|&p| attrs[p - 1].clone()).collect::<Vec<_>>().join(" ")
        };
        out.push_str(&format!(
            "fd {}: {} -> {};\n",
            fd.relation,
            names(&fd.lhs),
            names(&fd.rhs)
        ));
    }
    out
}

pub fn print_shex(schema: &ShexSchema) -> String {
    let mut out = String::new();
    for shape in schema.shapes() {
        out.push_str(&format!("{shape} {{\n"));
        for tc in schema.constraints(shape) {
            out.push_str(&format!(
                "  {} :: {} [{}];\n",
                show_predicate(&tc.predicate_value()),
                tc.target.relation_name(),
                tc.mult.marker()
            ));
        }
        out.push_str("}\n");
    }
    out
}

pub fn print_mapping(rules: &[StTgd]) -> String {
    let mut out = String::new();
    for rule in rules {
        let atoms = |atoms: &[Atom]| {
            atoms
                .iter()
                .map(|a| {
                    let terms: Vec<String> = a.terms.iter().map(show_term).collect();
                    format!("{}({})", a.relation, terms.join(", "))
                })
                .collect::<Vec<_>>()
                .join(", ")
        };
        out.push_str(&format!("{} => {};\n", atoms(&rule.body), atoms(&rule.head)));
    }
    out
}
