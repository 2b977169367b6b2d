//! Recursive-descent parser.
//!
//! ```text
//! expr    = term { ("+" | "-") term }
//! term    = unary { ("*" | "/") unary }
//! unary   = ("-" | "+") unary | power
//! power   = primary [ "^" unary ]
//! primary = number | ident | ident "(" expr ")" | "(" expr ")"
//! number  = digit { digit } [ "." digit { digit } ]
//! ident   = (letter | "_") { letter | digit | "_" }
//! ```
//!
//! Recognised functions: `exp log sin cos sinh cosh tanh sqrt`.

use super::{Expr, ExprError, Result, Q};
use num::BigInt;

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.s.len() {
        return Err(p.err("unexpected input"));
    }
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ExprError {
        ExprError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.unary()?);
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let d = self.unary()?;
                acc = acc.div(&d).map_err(|e| match e {
                    ExprError::DivisionByZero(_) => ExprError::Syntax {
                        pos: at,
                        msg: "division by zero".into(),
                    },
                    other => other,
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let at = self.pos;
            let e = self.unary()?;
            return base.pow(&e).map_err(|err| ExprError::Syntax {
                pos: at,
                msg: err.to_string(),
            });
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                if self.peek() == Some(b'(') {
                    self.pos += 1;
                    let arg = self.expr()?;
                    if !self.eat(b')') {
                        return Err(self.err("expected `)`"));
                    }
                    let domain = |e: ExprError| ExprError::Syntax {
                        pos: start,
                        msg: e.to_string(),
                    };
                    return match name {
                        "exp" => Ok(arg.exp()),
                        "log" => arg.log().map_err(domain),
                        "sin" => Ok(arg.sin()),
                        "cos" => Ok(arg.cos()),
                        "sinh" => Ok(arg.sinh()),
                        "cosh" => Ok(arg.cosh()),
                        "tanh" => Ok(arg.tanh()),
                        "sqrt" => arg.sqrt().map_err(domain),
                        _ => Err(ExprError::UnknownFunction {
                            name: name.to_string(),
                            pos: start,
                        }),
                    };
                }
                Ok(Expr::sym(name))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_part = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        let mut value = Q::from_integer(int_part.parse::<BigInt>().unwrap());
        if self.pos < self.s.len() && self.s[self.pos] == b'.' {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if fs == self.pos {
                return Err(self.err("expected digits after `.`"));
            }
            let frac = std::str::from_utf8(&self.s[fs..self.pos]).unwrap();
            let scale = num::pow::pow(BigInt::from(10), frac.len());
            value += Q::new(frac.parse::<BigInt>().unwrap(), scale);
        }
        Ok(Expr::rational(value))
    }
}
