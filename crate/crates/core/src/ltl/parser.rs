//! Recursive-descent parser for the formula text syntax.
//!
//! ```text
//! implies := or ( "->" implies )?
//! or      := and ( "|" and )*
//! and     := until ( "&" until )*
//! until   := unary ( "U" until )?
//! unary   := ( "!" | "X" | "G" | "F" ) unary | "(" implies ")" | ident
//! ```

use std::sync::Arc;

use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    Next,
    Globally,
    Finally,
    Until,
    And,
    Or,
    Implies,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier {name:?}"),
            Tok::Not => "'!'".into(),
            Tok::Next => "'X'".into(),
            Tok::Globally => "'G'".into(),
            Tok::Finally => "'F'".into(),
            Tok::Until => "'U'".into(),
            Tok::And => "'&'".into(),
            Tok::Or => "'|'".into(),
            Tok::Implies => "'->'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                match &text[start..=i] {
                    "X" => Tok::Next,
                    "G" => Tok::Globally,
                    "F" => Tok::Finally,
                    "U" => Tok::Until,
                    name => Tok::Ident(name.to_string()),
                }
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(ParseError {
                    offset: i,
                    message: format!("unexpected character {ch:?}"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error(&self, expected: &str) -> ParseError {
        let found = self
            .peek()
            .map_or("end of input".to_string(), Tok::describe);
        ParseError {
            offset: self.offset(),
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Formula::Implies(Arc::new(lhs), Arc::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and()?;
            lhs = Formula::Or(Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while self.eat(&Tok::And) {
            let rhs = self.until()?;
            lhs = Formula::And(Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::Until) {
            let rhs = self.until()?;
            return Ok(Formula::Until(Arc::new(lhs), Arc::new(rhs)));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let wrap: fn(Arc<Formula>) -> Formula = match self.peek() {
            Some(Tok::Not) => Formula::Not,
            Some(Tok::Next) => Formula::Next,
            Some(Tok::Globally) => Formula::Globally,
            Some(Tok::Finally) => Formula::Finally,
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.implies()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error("')'"));
                }
                return Ok(inner);
            }
            Some(Tok::Ident(name)) => {
                let atom = Formula::Atom(name.as_str().into());
                self.pos += 1;
                return Ok(atom);
            }
            _ => return Err(self.error("a formula")),
        };
        self.pos += 1;
        Ok(wrap(Arc::new(self.unary()?)))
    }
}

/// Parses formula text.
///
/// Precedence from tightest: unary `!` `X` `G` `F`, then `U`, `&`, `|`, `->`.
/// `U` and `->` associate to the right, `&` and `|` to the left. The letters
/// `X`, `G`, `F` and `U` on their own are operators, not atom names.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.implies()?;
    if p.pos != p.toks.len() {
        return Err(p.error("end of input"));
    }
    Ok(f)
}
