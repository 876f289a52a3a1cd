//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar (whitespace insignificant, `^` binds tighter than `*`, `*`
//! tighter than `+`/`-`):
//!
//! ```text
//! expr    := [('+'|'-')] term (('+'|'-') term)*
//! term    := power ('*' power)*
//! power   := atom ['^' INT]
//! atom    := INT | VAR | '(' expr ')'
//! VAR     := 'x' digits | 'x' | 'y' | 'z'        (aliases only for n <= 3)
//! ```

use super::MultiPoly;
use crate::error::{Error, Result};
use num_bigint::BigInt;

const MAX_DEGREE: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(usize), // 0-based variable index
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    n_vars: usize,
}

impl<'a> Lexer<'a> {
    fn next_tok(&mut self) -> Result<Option<(usize, Tok)>> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' | 0xE2 if c == b'-' || self.src[self.pos..].starts_with("\u{2212}".as_bytes()) => {
                // accept ASCII '-' and U+2212 MINUS SIGN
                self.pos += if c == b'-' { 1 } else { 3 };
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' => {
                let mut end = self.pos;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                Tok::Int(text.parse().unwrap())
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let mut end = self.pos + 1;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[self.pos..end]).unwrap().to_string();
                self.pos = end;
                Tok::Var(self.resolve_var(&name, start)?)
            }
            _ => {
                return Err(Error::Parse {
                    position: start,
                    message: format!("unexpected character {:?}", c as char),
                });
            }
        };
        Ok(Some((start, tok)))
    }

    fn resolve_var(&self, name: &str, position: usize) -> Result<usize> {
        let idx = match name {
            "x" if self.n_vars <= 3 => Some(0),
            "y" if self.n_vars <= 3 => Some(1),
            "z" if self.n_vars <= 3 => Some(2),
            _ => name
                .strip_prefix('x')
                .and_then(|digits| digits.parse::<usize>().ok())
                .and_then(|i| i.checked_sub(1)),
        };
        match idx {
            Some(i) if i < self.n_vars => Ok(i),
            _ => Err(Error::UnknownVariable {
                name: name.to_string(),
                position,
                n_vars: self.n_vars,
            }),
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    cursor: usize,
    n_vars: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.cursor).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.cursor).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.cursor).cloned();
        self.cursor += 1;
        t
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut negate = false;
        if let Some(Tok::Plus | Tok::Minus) = self.peek() {
            if let Some((_, Tok::Minus)) = self.bump() {
                negate = true;
            }
        }
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        while let Some(Tok::Plus | Tok::Minus) = self.peek() {
            let (_, op) = self.bump().unwrap();
            let rhs = self.term()?;
            acc = if op == Tok::Plus { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.power()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            let rhs = self.power()?;
            acc = &acc * &rhs;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some((_, Tok::Int(e))) => {
                    let e: u64 = e.try_into().map_err(|_| Error::ExponentOverflow {
                        position: pos,
                        detail: "exponent does not fit in 64 bits".into(),
                    })?;
                    let total = e.checked_mul(base.degree() as u64);
                    if e > u32::MAX as u64 || total.is_none_or(|t| t > MAX_DEGREE) {
                        return Err(Error::ExponentOverflow {
                            position: pos,
                            detail: format!("resulting degree exceeds {MAX_DEGREE}"),
                        });
                    }
                    Ok(base.pow(e as u32))
                }
                _ => Err(Error::Parse {
                    position: pos,
                    message: "expected integer exponent after `^`".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let pos = self.pos();
        match self.bump() {
            Some((_, Tok::Int(v))) => Ok(MultiPoly::constant(self.n_vars, v)),
            Some((_, Tok::Var(i))) => MultiPoly::variable(self.n_vars, i + 1),
            Some((_, Tok::LParen)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    other => Err(Error::Parse {
                        position: other.map_or(self.end, |(p, _)| p),
                        message: "expected `)`".into(),
                    }),
                }
            }
            _ => Err(Error::Parse {
                position: pos,
                message: "expected integer, variable or `(`".into(),
            }),
        }
    }
}

pub(super) fn parse(text: &str, n_vars: usize) -> Result<MultiPoly> {
    if n_vars == 0 {
        return Err(Error::InvalidParameter(
            "polynomials need at least one variable".into(),
        ));
    }
    let mut lexer = Lexer {
        src: text.as_bytes(),
        pos: 0,
        n_vars,
    };
    let mut toks = Vec::new();
    while let Some(t) = lexer.next_tok()? {
        toks.push(t);
    }
    let mut parser = Parser {
        toks,
        cursor: 0,
        n_vars,
        end: text.len(),
    };
    let p = parser.expr()?;
    if parser.cursor != parser.toks.len() {
        return Err(Error::Parse {
            position: parser.pos(),
            message: "trailing input after expression".into(),
        });
    }
    Ok(p)
}
