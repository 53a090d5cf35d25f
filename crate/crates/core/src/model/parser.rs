//! Recursive-descent parser for model expressions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" unary)?
//! atom   := number | "x" digits | "pi" | "e" | func "(" expr ")" | "(" expr ")"
//! ```
//!
//! `^` binds tighter than unary minus (`-x^2` is `-(x^2)`) and is
//! right-associative; the other binary operators are left-associative.

use super::expr::{BinOp, Expr, Func};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(Token, usize)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (tok, at) = lx.next_token()?;
            let end = tok == Token::End;
            out.push((tok, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next_token(&mut self) -> Result<(Token, usize)> {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += self.peek().map_or(0, char::len_utf8);
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((Token::End, start));
        };
        let tok = match c {
            '0'..='9' | '.' => self.number()?,
            c if c.is_ascii_alphabetic() || c == '_' => {
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    self.pos += 1;
                }
                Token::Ident(self.src[start..self.pos].to_owned())
            }
            '+' | '-' | '*' | '/' | '^' => {
                self.pos += 1;
                Token::Op(c)
            }
            '(' => {
                self.pos += 1;
                Token::LParen
            }
            ')' => {
                self.pos += 1;
                Token::RParen
            }
            other => {
                return Err(Error::Parse {
                    position: start,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        Ok((tok, start))
    }

    fn number(&mut self) -> Result<Token> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let digits = |p: &mut usize| {
            while *p < bytes.len() && bytes[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        let mut p = self.pos;
        digits(&mut p);
        if p < bytes.len() && bytes[p] == b'.' {
            p += 1;
            digits(&mut p);
        }
        // Exponent only when followed by digits, so that `2e` is not swallowed.
        if p < bytes.len() && (bytes[p] == b'e' || bytes[p] == b'E') {
            let mut q = p + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            if q < bytes.len() && bytes[q].is_ascii_digit() {
                digits(&mut q);
                p = q;
            }
        }
        let text = &self.src[start..p];
        let value: f64 = text.parse().map_err(|_| Error::Parse {
            position: start,
            message: format!("malformed number {text:?}"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                position: start,
                message: format!("number {text} is out of range"),
            });
        }
        self.pos = p;
        Ok(Token::Num(value))
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    cursor: usize,
    n: usize,
}

/// Parses `text` into an expression over `x1..xn`.
pub fn parse(text: &str, n: usize) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(Error::Parse {
            position: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        tokens: Lexer::tokenize(text)?,
        cursor: 0,
        n,
    };
    let e = p.expr()?;
    match p.peek() {
        Token::End => Ok(e),
        t => Err(p.error(format!("unexpected {}", describe(t)))),
    }
}

fn describe(t: &Token) -> String {
    match t {
        Token::Num(v) => format!("number {v}"),
        Token::Ident(s) => format!("identifier {s:?}"),
        Token::Op(c) => format!("operator '{c}'"),
        Token::LParen => "'('".into(),
        Token::RParen => "')'".into(),
        Token::End => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.cursor].0
    }

    fn position(&self) -> usize {
        self.tokens[self.cursor].1
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.cursor].0.clone();
        if t != Token::End {
            self.cursor += 1;
        }
        t
    }

    fn error(&self, message: String) -> Error {
        Error::Parse {
            position: self.position(),
            message,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Token::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Token::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Token::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() == Token::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.position();
        match self.bump() {
            Token::Num(v) => Ok(Expr::Const(v)),
            Token::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Token::Ident(name) => self.identifier(&name, at),
            t => Err(Error::Parse {
                position: at,
                message: format!("expected a value, found {}", describe(&t)),
            }),
        }
    }

    fn identifier(&mut self, name: &str, at: usize) -> Result<Expr> {
        if let Some(func) = Func::from_name(name) {
            if *self.peek() != Token::LParen {
                return Err(self.error(format!("expected '(' after function {name}")));
            }
            self.bump();
            let arg = self.expr()?;
            self.expect_rparen()?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        match name {
            "pi" => return Ok(Expr::Const(std::f64::consts::PI)),
            "e" => return Ok(Expr::Const(std::f64::consts::E)),
            _ => {}
        }
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let k: usize = digits.parse().map_err(|_| Error::Parse {
                    position: at,
                    message: format!("variable index in {name} is too large"),
                })?;
                if k == 0 || k > self.n {
                    return Err(Error::Parse {
                        position: at,
                        message: format!("variable {name} outside x1..x{}", self.n),
                    });
                }
                return Ok(Expr::Var(k - 1));
            }
        }
        if *self.peek() == Token::LParen {
            return Err(Error::Parse {
                position: at,
                message: format!("unknown function {name:?}"),
            });
        }
        Err(Error::Parse {
            position: at,
            message: format!("unknown identifier {name:?}"),
        })
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if *self.peek() != Token::RParen {
            return Err(self.error(format!("expected ')', found {}", describe(self.peek()))));
        }
        self.bump();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(text: &str, n: usize, x: &[f64]) -> f64 {
        parse(text, n).unwrap().eval(x)
    }

    #[test]
    fn examples() {
        assert_eq!(eval("x1 + 2*x2", 2, &[1.0, 3.0]), 7.0);
        assert_eq!(eval("exp(x1)", 1, &[0.0]), 1.0);
        let v = eval("sqrt(6) / (1 + exp(0-3*(x1-5)))", 1, &[5.0]);
        assert!((v - 6f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((v - 1.224_744_871_391_589).abs() < 1e-12);
    }

    #[test]
    fn precedence_and_associativity() {
        let x = [2.0, 3.0, 4.0];
        assert_eq!(eval("x1 + x2 * x3", 3, &x), 14.0);
        assert_eq!(eval("x1 - x2 - x3", 3, &x), -5.0);
        assert_eq!(eval("x3 / x1 / x1", 3, &x), 1.0);
        assert_eq!(eval("-x1^2", 3, &x), -4.0);
        assert_eq!(eval("x1^x2^2", 3, &x), 512.0);
        assert_eq!(eval("2^-1", 0, &[]), 0.5);
        assert_eq!(eval("-(x1 - x2) * 2", 3, &x), 2.0);
        assert_eq!(eval("2 * -x1", 3, &x), -4.0);
        assert!((eval("pi", 0, &[]) - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(eval("1.5e2 + 2E-1", 0, &[]), 150.2);
    }

    #[test]
    fn errors_carry_positions() {
        match parse("x1 + * x2", 2) {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 5),
            other => panic!("{other:?}"),
        }
        match parse("x1 + x3", 2) {
            Err(Error::Parse { position, message }) => {
                assert_eq!(position, 5);
                assert!(message.contains("x3"));
            }
            other => panic!("{other:?}"),
        }
        match parse("tanh(x1)", 1) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("unknown function")),
            other => panic!("{other:?}"),
        }
        assert!(parse("", 1).is_err());
        assert!(parse("(x1", 1).is_err());
        assert!(parse("x1)", 1).is_err());
        assert!(parse("x0", 1).is_err());
        assert!(parse("3 $ 4", 0).is_err());
        assert!(parse("exp x1", 1).is_err());
    }
}
