//! Structured type references and their textual grammar.
//!
//! ```text
//! expr  := alt ("|" alt)*
//! alt   := name ( "[" expr ("," expr)* "]" )?
//! name  := [a-z0-9_.-]+        (input is lowercased first)
//! ```
//!
//! `a | b` and `union[a, b]` both denote an anonymous union. Anonymous
//! unions are flattened, deduplicated and sorted by their printed form, so
//! `float | int` and `union[int|float]` are the same expression and print as
//! `union[float|int]`.

use std::fmt;

use thiserror::Error;

/// Head name reserved for anonymous unions.
pub const ANONYMOUS_UNION: &str = "union";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeExpr {
    head: String,
    args: Vec<TypeExpr>,
}

impl TypeExpr {
    /// A bare name with no arguments. The name is lowercased.
    pub fn name(head: impl AsRef<str>) -> Self {
        TypeExpr {
            head: head.as_ref().to_lowercase(),
            args: Vec::new(),
        }
    }

    pub fn apply(head: impl AsRef<str>, args: Vec<TypeExpr>) -> Self {
        let head = head.as_ref().to_lowercase();
        if head == ANONYMOUS_UNION {
            return Self::union_of(args);
        }
        TypeExpr { head, args }
    }

    /// Canonical anonymous union. A single distinct member collapses to itself.
    pub fn union_of(members: Vec<TypeExpr>) -> Self {
        let mut flat = Vec::new();
        for m in members {
            if m.is_anonymous_union() {
                flat.extend(m.args);
            } else {
                flat.push(m);
            }
        }
        flat.sort_by_cached_key(|m| m.to_string());
        flat.dedup();
        if flat.len() == 1 {
            return flat.pop().unwrap();
        }
        TypeExpr {
            head: ANONYMOUS_UNION.to_string(),
            args: flat,
        }
    }

    pub fn head(&self) -> &str {
        &self.head
    }

    pub fn args(&self) -> &[TypeExpr] {
        &self.args
    }

    pub fn is_anonymous_union(&self) -> bool {
        self.head == ANONYMOUS_UNION
    }

    /// This expression followed by every nested argument expression, pre-order.
    pub fn walk(&self) -> Vec<&TypeExpr> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let node = out[i];
            out.extend(node.args.iter());
            i += 1;
        }
        out
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.head)?;
        if self.args.is_empty() {
            return Ok(());
        }
        let sep = if self.is_anonymous_union() { "|" } else { "," };
        f.write_str("[")?;
        for (i, arg) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{arg}")?;
        }
        f.write_str("]")
    }
}

impl std::str::FromStr for TypeExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_type_expression(s)
    }
}

pub(crate) fn is_name_char(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || matches!(c, '_' | '.' | '-')
}

pub fn parse_type_expression(text: &str) -> Result<TypeExpr, ParseError> {
    let lowered = text.to_lowercase();
    let mut parser = Parser {
        chars: lowered.chars().collect(),
        pos: 0,
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        return Err(parser.error(format!("unexpected '{}'", parser.chars[parser.pos])));
    }
    Ok(expr)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<TypeExpr, ParseError> {
        let first = self.alternative()?;
        if !self.eat('|') {
            return Ok(first);
        }
        let mut members = vec![first];
        loop {
            members.push(self.alternative()?);
            if !self.eat('|') {
                return Ok(TypeExpr::union_of(members));
            }
        }
    }

    fn alternative(&mut self) -> Result<TypeExpr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).copied().is_some_and(is_name_char) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.chars.get(self.pos) {
                Some(c) => self.error(format!("expected a type name, found '{c}'")),
                None => self.error("expected a type name, found end of input"),
            });
        }
        let head: String = self.chars[start..self.pos].iter().collect();
        if !self.eat('[') {
            return Ok(TypeExpr::apply(head, Vec::new()));
        }
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&']') {
            return Err(self.error("empty argument list"));
        }
        let mut args = vec![self.expr()?];
        while self.eat(',') {
            args.push(self.expr()?);
        }
        if !self.eat(']') {
            return Err(self.error("expected ',' or ']'"));
        }
        Ok(TypeExpr::apply(head, args))
    }
}
