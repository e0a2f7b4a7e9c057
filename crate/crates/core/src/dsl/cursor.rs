//! Token cursor over a single line with typed expectations.

use std::path::Path;

use super::error::ParseError;
use super::lexer::{LineToks, Tok, TokKind};
use super::number::canonical;
use crate::model::{is_identifier, Id, IdPattern, SourcePos, Unit, Value};

pub(crate) struct Cursor<'a> {
    file: &'a Path,
    line: &'a LineToks,
    i: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(file: &'a Path, line: &'a LineToks) -> Self {
        Cursor { file, line, i: 0 }
    }

    /// Position of the next token, or just past the end of the line.
    pub fn pos(&self) -> SourcePos {
        let col = self.peek().map_or(self.line.end_col, |t| t.col);
        SourcePos::new(self.file, self.line.line, col)
    }

    pub fn peek(&self) -> Option<&'a Tok> {
        self.line.toks.get(self.i)
    }

    pub fn peek_word(&self) -> Option<&'a str> {
        match self.peek().map(|t| &t.kind) {
            Some(TokKind::Word(w)) => Some(w),
            _ => None,
        }
    }

    pub fn at_end(&self) -> bool {
        self.i >= self.line.toks.len()
    }

    pub fn error(&self, expected: impl Into<String>) -> ParseError {
        let found = self.peek().map_or("end of line".to_owned(), Tok::describe);
        ParseError::new(self.pos(), expected, found)
    }

    pub fn word(&mut self, what: &str) -> Result<&'a str, ParseError> {
        match self.peek_word() {
            Some(w) => {
                self.i += 1;
                Ok(w)
            }
            None => Err(self.error(what)),
        }
    }

    pub fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.peek_word() == Some(kw) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.error(format!("`{kw}`")))
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        let hit = self.peek_word() == Some(kw);
        if hit {
            self.i += 1;
        }
        hit
    }

    pub fn punct(&mut self, kind: TokKind, what: &str) -> Result<(), ParseError> {
        if self.peek().map(|t| &t.kind) == Some(&kind) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    pub fn id(&mut self, pattern: IdPattern) -> Result<Id, ParseError> {
        match self.peek_word() {
            Some(w) if pattern.matches(w) => {
                self.i += 1;
                Ok(Id::new(w))
            }
            _ => Err(self.error(pattern.describe())),
        }
    }

    /// A bare identifier.
    pub fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek_word() {
            Some(w) if is_identifier(w) => {
                self.i += 1;
                Ok(w.to_owned())
            }
            _ => Err(self.error(what)),
        }
    }

    pub fn string(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().map(|t| &t.kind) {
            Some(TokKind::Str(s)) => {
                self.i += 1;
                Ok(s.clone())
            }
            _ => Err(self.error(what)),
        }
    }

    /// A quoted string or a single bare word.
    pub fn text(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().map(|t| &t.kind) {
            Some(TokKind::Str(s)) | Some(TokKind::Word(s)) => {
                self.i += 1;
                Ok(s.clone())
            }
            _ => Err(self.error(what)),
        }
    }

    pub fn number(&mut self, what: &str) -> Result<f64, ParseError> {
        match self.peek_word().and_then(parse_finite) {
            Some(v) => {
                self.i += 1;
                Ok(v)
            }
            None => Err(self.error(what)),
        }
    }

    /// A number followed by an optional unit suffix that must equal `unit`.
    pub fn quantity(&mut self, what: &str, unit: Unit) -> Result<f64, ParseError> {
        let v = self.number(what)?;
        self.unit_suffix(unit)?;
        Ok(v)
    }

    pub fn unit_suffix(&mut self, unit: Unit) -> Result<(), ParseError> {
        if let Some(w) = self.peek_word() {
            if Unit::from_symbol(w).is_some() {
                if w != unit.symbol() {
                    return Err(self.error(format!("unit `{}`", unit.symbol())));
                }
                self.i += 1;
            }
        }
        Ok(())
    }

    pub fn any_unit(&mut self) -> Option<Unit> {
        let u = self.peek_word().and_then(Unit::from_symbol);
        if u.is_some() {
            self.i += 1;
        }
        u
    }

    /// A bracketed, non-empty value list; commas are optional.
    pub fn value_list(&mut self) -> Result<Vec<Value>, ParseError> {
        self.punct(TokKind::LBracket, "`[`")?;
        let mut values = Vec::new();
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokKind::RBracket) if !values.is_empty() => {
                    self.i += 1;
                    return Ok(values);
                }
                Some(TokKind::Comma) if !values.is_empty() => self.i += 1,
                _ => {}
            }
            match self.peek_word() {
                Some(w) => {
                    if let Some(v) = parse_finite(w) {
                        values.push(Value::Number(v));
                    } else if is_identifier(w) {
                        values.push(Value::Name(w.to_owned()));
                    } else {
                        return Err(self.error("number or name"));
                    }
                    self.i += 1;
                }
                None => {
                    let expected = if values.is_empty() {
                        "number or name"
                    } else {
                        "`,`, `]`, number or name"
                    };
                    return Err(self.error(expected));
                }
            }
        }
    }

    /// One or more ids up to the end of the line.
    pub fn ids_to_end(&mut self, pattern: IdPattern) -> Result<Vec<Id>, ParseError> {
        let mut out = vec![self.id(pattern)?];
        while !self.at_end() {
            out.push(self.id(pattern)?);
        }
        Ok(out)
    }

    /// One or more identifiers up to the end of the line.
    pub fn names_to_end(&mut self, what: &str) -> Result<Vec<String>, ParseError> {
        let mut out = vec![self.name(what)?];
        while !self.at_end() {
            out.push(self.name(what)?);
        }
        Ok(out)
    }

    pub fn end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("end of line"))
        }
    }
}

/// Finite numbers only, canonicalized to 9 significant digits.
pub(crate) fn parse_finite(s: &str) -> Option<f64> {
    // reject forms such as "inf", "NaN" and "infinity"
    if !s.starts_with(|c: char| c.is_ascii_digit() || matches!(c, '-' | '+' | '.')) {
        return None;
    }
    let v: f64 = s.parse().ok()?;
    let v = canonical(v);
    v.is_finite().then_some(v)
}
