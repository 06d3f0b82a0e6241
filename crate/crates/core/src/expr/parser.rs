//! Recursive-descent parser for component expressions.
//!
//! Grammar, loosest to tightest:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' expo)?          right-associative
//! expo   := '-' expo | power
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers: declared parameter names, `pi`, `x1..xn`, the aliases
//! `x, y, z` for the first three variables when n <= 3, and the alias pair
//! `z, w` for the first two variables when the expression mentions `w`.
//! Offsets in errors are 1-based character positions.

use super::ast::{BinOp, Expr, Func};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(source: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let offset = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| Error::Syntax {
                offset,
                message: format!("malformed number `{text}`"),
            })?;
            out.push(Token {
                tok: Tok::Num(value),
                offset,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                offset,
            });
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(Error::Syntax {
                        offset,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            out.push(Token { tok, offset });
            i += 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Aliases {
    Xyz,
    Zw,
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    end_offset: usize,
    arity: usize,
    params: &'a [String],
    aliases: Aliases,
}

/// Names that cannot be used as parameters.
pub(crate) fn is_reserved(name: &str) -> bool {
    matches!(name, "pi" | "x" | "y" | "z" | "w")
        || Func::from_name(name).is_some()
        || variable_index(name).is_some()
}

fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0')
    {
        return None;
    }
    digits.parse().ok()
}

/// Parses `source` into an expression over `arity` variables and the given
/// parameter names.
pub fn parse(source: &str, arity: usize, params: &[String]) -> Result<Expr> {
    if arity == 0 {
        return Err(Error::InvalidArgument("arity must be at least 1".into()));
    }
    for p in params {
        let valid = p
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid || is_reserved(p) {
            return Err(Error::InvalidArgument(format!(
                "`{p}` cannot be used as a parameter name"
            )));
        }
    }
    let tokens = lex(source)?;
    if tokens.is_empty() {
        return Err(Error::Syntax {
            offset: 1,
            message: "empty expression".into(),
        });
    }
    let aliases = if tokens.iter().any(|t| t.tok == Tok::Ident("w".into())) {
        Aliases::Zw
    } else {
        Aliases::Xyz
    };
    let mut parser = Parser {
        tokens,
        pos: 0,
        end_offset: source.chars().count() + 1,
        arity,
        params,
        aliases,
    };
    let expr = parser.expr()?;
    if let Some(t) = parser.tokens.get(parser.pos) {
        return Err(Error::Syntax {
            offset: t.offset,
            message: "unexpected trailing input".into(),
        });
    }
    Ok(expr)
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.end_offset, |t| t.offset)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat_op('+') {
                BinOp::Add
            } else if self.eat_op('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat_op('*') {
                BinOp::Mul
            } else if self.eat_op('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::binary(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat_op('^') {
            let exponent = self.exponent()?;
            Ok(Expr::binary(BinOp::Pow, base, exponent))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<Expr> {
        if self.eat_op('-') {
            Ok(Expr::Neg(Box::new(self.exponent()?)))
        } else {
            self.power()
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::Syntax {
                offset,
                message: "unexpected end of input".into(),
            });
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => self.identifier(name, offset),
            Tok::RParen => Err(Error::Syntax {
                offset,
                message: "unexpected `)`".into(),
            }),
            Tok::Op(c) => Err(Error::Syntax {
                offset,
                message: format!("unexpected operator `{c}`"),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: self.offset(),
                message: "expected `)`".into(),
            })
        }
    }

    fn identifier(&mut self, name: String, offset: usize) -> Result<Expr> {
        if let Some(func) = Func::from_name(&name) {
            if self.peek() != Some(&Tok::LParen) {
                return Err(Error::Syntax {
                    offset: self.offset(),
                    message: format!("expected `(` after `{name}`"),
                });
            }
            self.pos += 1;
            let arg = self.expr()?;
            self.expect_rparen()?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        if self.params.contains(&name) {
            return Ok(Expr::Param(name));
        }
        if name == "pi" {
            return Ok(Expr::Pi);
        }
        let index = match (name.as_str(), self.aliases) {
            ("x", Aliases::Xyz) if self.arity <= 3 => Some(1),
            ("y", Aliases::Xyz) if self.arity <= 3 => Some(2),
            ("z", Aliases::Xyz) if self.arity <= 3 => Some(3),
            ("z", Aliases::Zw) => Some(1),
            ("w", Aliases::Zw) => Some(2),
            _ => variable_index(&name),
        };
        match index {
            Some(i) if i <= self.arity => Ok(Expr::Var(i - 1)),
            Some(_) => Err(Error::VariableOutOfRange {
                name,
                offset,
                arity: self.arity,
            }),
            None => Err(Error::UnknownIdentifier { name, offset }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str, arity: usize, params: &[&str]) -> Result<Expr> {
        let params: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        parse(src, arity, &params)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("1+2*x", 1, &[]).unwrap().to_string(), "(1 + (2 * x1))");
        assert_eq!(p("x^2^3", 1, &[]).unwrap().to_string(), "(x1 ^ (2 ^ 3))");
        assert_eq!(p("-x^2", 1, &[]).unwrap().to_string(), "(-(x1 ^ 2))");
        assert_eq!(p("x^-2", 1, &[]).unwrap().to_string(), "(x1 ^ (-2))");
        assert_eq!(p("1-2-3", 1, &[]).unwrap().to_string(), "((1 - 2) - 3)");
        assert_eq!(p("8/4/2", 1, &[]).unwrap().to_string(), "((8 / 4) / 2)");
    }

    #[test]
    fn aliases() {
        assert_eq!(p("x*y*z", 3, &[]).unwrap().to_string(), "((x1 * x2) * x3)");
        assert_eq!(p("z*w + c", 2, &["c"]).unwrap().to_string(), "((x1 * x2) + c)");
        assert_eq!(p("x4 + x1", 5, &[]).unwrap().max_var(), Some(3));
        assert!(matches!(
            p("x", 4, &[]),
            Err(Error::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            p("x*w", 2, &[]),
            Err(Error::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn numbers() {
        assert_eq!(p("1e-3", 1, &[]).unwrap(), Expr::Const(1e-3));
        assert_eq!(p(".5", 1, &[]).unwrap(), Expr::Const(0.5));
        assert_eq!(p("2.5E2", 1, &[]).unwrap(), Expr::Const(250.0));
        assert!(matches!(p("1.2.3", 1, &[]), Err(Error::Syntax { offset: 1, .. })));
    }

    #[test]
    fn error_offsets() {
        assert_eq!(
            p("x *", 1, &[]),
            Err(Error::Syntax {
                offset: 4,
                message: "unexpected end of input".into()
            })
        );
        assert!(matches!(
            p("x + q", 1, &[]),
            Err(Error::UnknownIdentifier { offset: 5, .. })
        ));
        assert!(matches!(
            p("x + y", 1, &[]),
            Err(Error::VariableOutOfRange {
                offset: 5,
                arity: 1,
                ..
            })
        ));
        assert!(matches!(p("(x", 1, &[]), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(p("x)", 1, &[]), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(p("sin x", 1, &[]), Err(Error::Syntax { offset: 5, .. })));
        assert!(matches!(p("x $ 1", 1, &[]), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(p("   ", 1, &[]), Err(Error::Syntax { .. })));
    }

    #[test]
    fn reserved_parameter_names_rejected() {
        for bad in ["pi", "x", "sin", "x2", "1a", ""] {
            assert!(p("1", 1, &[bad]).is_err(), "{bad}");
        }
        assert!(p("a*x", 1, &["a"]).is_ok());
    }
}
