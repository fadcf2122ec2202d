//! Expression syntax: variables `x1..xn`, constants `T` and `F`, operators
//! `~ & | -> <->` (tightest first) and parentheses. `->` associates to the
//! right, `<->` to the left. Lines may carry `#` comments.

use super::{Formula, Literal, Var};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(usize),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
}

struct Lexed {
    tok: Tok,
    line: usize,
}

fn lex(src: &str) -> Result<Vec<Lexed>> {
    let mut out = Vec::new();
    for (lineno, raw) in src.lines().enumerate() {
        let line = lineno + 1;
        let text = raw.split('#').next().unwrap_or("");
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let tok = match c {
                b' ' | b'\t' | b'\r' => {
                    i += 1;
                    continue;
                }
                b'~' => Tok::Not,
                b'&' => Tok::And,
                b'|' => Tok::Or,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'T' => Tok::True,
                b'F' => Tok::False,
                b'-' if text[i..].starts_with("->") => {
                    i += 1;
                    Tok::Implies
                }
                b'<' if text[i..].starts_with("<->") => {
                    i += 2;
                    Tok::Iff
                }
                b'x' => {
                    let start = i + 1;
                    let mut end = start;
                    while end < bytes.len() && bytes[end].is_ascii_digit() {
                        end += 1;
                    }
                    let index: usize = text[start..end]
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad variable at column {}", i + 1)))?;
                    if index == 0 {
                        return Err(Error::parse(line, "variables are numbered from x1"));
                    }
                    i = end;
                    out.push(Lexed { tok: Tok::Var(index), line });
                    continue;
                }
                other => {
                    return Err(Error::parse(
                        line,
                        format!("unexpected character '{}' at column {}", other as char, i + 1),
                    ))
                }
            };
            out.push(Lexed { tok, line });
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    last_line: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).map_or(self.last_line, |t| t.line)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let first = self.and()?;
        let mut parts = vec![first];
        while self.eat(&Tok::Or) {
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn and(&mut self) -> Result<Formula> {
        let first = self.unary()?;
        let mut parts = vec![first];
        while self.eat(&Tok::And) {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Not) {
            if let Some(&Tok::Var(i)) = self.peek() {
                self.pos += 1;
                return Ok(Formula::Lit(Literal::new(Var::new(i), false)));
            }
            return Ok(Formula::not(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        let line = self.line();
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Var(i)) => {
                self.pos += 1;
                Ok(Formula::var(i))
            }
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Formula::top())
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Formula::bottom())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.iff()?;
                if !self.eat(&Tok::RParen) {
                    return Err(Error::parse(self.line(), "expected ')'"));
                }
                Ok(inner)
            }
            Some(t) => Err(Error::parse(line, format!("unexpected token {t:?}"))),
            None => Err(Error::parse(line, "unexpected end of input")),
        }
    }
}

/// Parses a formula in the expression syntax.
pub fn parse_expr(src: &str) -> Result<Formula> {
    let toks = lex(src)?;
    let last_line = toks.last().map_or(1, |t| t.line);
    let mut p = Parser { toks, pos: 0, last_line };
    let f = p.iff()?;
    if p.pos != p.toks.len() {
        return Err(Error::parse(p.line(), "trailing input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let f = parse_expr("x1 | x2 & ~x3").unwrap();
        assert_eq!(
            f,
            Formula::Or(vec![
                Formula::var(1),
                Formula::And(vec![Formula::var(2), Formula::Lit(Literal::neg(3))])
            ])
        );
        let g = parse_expr("x1 -> x2 -> x3").unwrap();
        assert_eq!(
            g,
            Formula::implies(Formula::var(1), Formula::implies(Formula::var(2), Formula::var(3)))
        );
        let h = parse_expr("x1 <-> x2 -> x3").unwrap();
        assert_eq!(
            h,
            Formula::iff(Formula::var(1), Formula::implies(Formula::var(2), Formula::var(3)))
        );
    }

    #[test]
    fn constants_and_parens() {
        assert_eq!(parse_expr("(T)").unwrap(), Formula::top());
        assert_eq!(parse_expr("~F").unwrap(), Formula::not(Formula::bottom()));
    }

    #[test]
    fn errors_carry_lines() {
        let err = parse_expr("x1 &\n (x2 | ").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        assert!(parse_expr("x0").is_err());
        assert!(parse_expr("x1 x2").is_err());
        assert!(parse_expr("x1 $ x2").is_err());
    }

    #[test]
    fn comments_ignored() {
        let f = parse_expr("# kb\nx1 & x2 # trailing\n").unwrap();
        assert_eq!(f, Formula::And(vec![Formula::var(1), Formula::var(2)]));
    }
}
