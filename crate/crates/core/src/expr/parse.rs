//! Recursive-descent parser for scalar expressions in one variable `x`.
//!
//! Precedence, tightest first: `^` (right-associative), unary `-`, `* /`, `+ -`.
//! So `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`.

use std::fmt;

use super::taylor::Taylor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Abs,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Ln,
        Func::Abs,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, a: &Taylor) -> Result<Taylor> {
        match self {
            Func::Sin => Ok(a.sin()),
            Func::Cos => Ok(a.cos()),
            Func::Tan => a.tan(),
            Func::Sinh => Ok(a.sinh_cosh()?.0),
            Func::Cosh => Ok(a.sinh_cosh()?.1),
            Func::Tanh => Ok(a.tanh()),
            Func::Exp => a.exp(),
            Func::Ln => a.ln(),
            Func::Abs => a.abs(),
            Func::Sqrt => a.sqrt(),
        }
    }
}

/// Abstract syntax tree of a scalar expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Num(f64),
    Var,
    Neg(Box<Expression>),
    Binary(BinOp, Box<Expression>, Box<Expression>),
    Call(Func, Box<Expression>),
}

impl Expression {
    pub fn parse(src: &str) -> Result<Expression> {
        parse(src)
    }

    /// Evaluates the expression on a Taylor-expanded argument.
    pub fn eval_taylor(&self, x: &Taylor) -> Result<Taylor> {
        match self {
            Expression::Num(v) => Ok(Taylor::constant(*v, x.order())),
            Expression::Var => Ok(*x),
            Expression::Neg(e) => Ok(-e.eval_taylor(x)?),
            Expression::Binary(op, l, r) => {
                let a = l.eval_taylor(x)?;
                let b = r.eval_taylor(x)?;
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => Ok(a - b),
                    BinOp::Mul => Ok(a * b),
                    BinOp::Div => a / b,
                    BinOp::Pow => a.pow(&b),
                }
            }
            Expression::Call(f, e) => f.apply(&e.eval_taylor(x)?),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.eval_taylor(&Taylor::constant(x, 0))?.value())
    }

    /// True when the tree is a literal zero; used to short-circuit split specs.
    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expression::Num(v) if *v == 0.0)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Num(v) => write!(f, "{v}"),
            Expression::Var => write!(f, "x"),
            Expression::Neg(e) => write!(f, "(-{e})"),
            Expression::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expression::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent only when followed by digits, optionally signed
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| Error::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else {
            let tok = match c {
                b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                _ => {
                    let ch = src[start..].chars().next().unwrap_or('?');
                    return Err(Error::Syntax {
                        offset: start,
                        message: format!("unexpected character `{ch}`"),
                    });
                }
            };
            i += 1;
            out.push((start, tok));
        }
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

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Tok::Op(c)) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expression> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expression::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expression> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expression::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expression> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expression::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expression> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Expression::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            None => self.err("expected `)` but input ended"),
            Some(_) => self.err("expected `)`"),
        }
    }

    fn primary(&mut self) -> Result<Expression> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expression::Num(v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "x" {
                    return Ok(Expression::Var);
                }
                let func = Func::from_name(&name)
                    .ok_or(Error::UnknownIdentifier { name, offset })?;
                match self.peek() {
                    Some(Tok::LParen) => self.pos += 1,
                    _ => return self.err(format!("expected `(` after `{}`", func.name())),
                }
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Expression::Call(func, Box::new(arg)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Some(_) => self.err("expected a number, `x`, a function call or `(`"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses an expression in the variable `x`.
pub fn parse(src: &str) -> Result<Expression> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}
