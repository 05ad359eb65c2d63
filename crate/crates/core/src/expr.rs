//! Arithmetic expressions in the time variable `t`, compiled to coefficient
//! functions for the potential `V(x, t) = g2(t) x^2 + g1(t) x + g0(t)`.
//!
//! Grammar:
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' factor)?
//! atom   := number | 't' | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | sinh | cosh | exp | sqrt
//! ```
//! `^` is right-associative and unary minus binds looser than `^`, so
//! `-t^2` is `-(t^2)` and `2^3^2` is `2^(3^2) = 512`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character `{ch}` at byte {offset}")]
    UnexpectedChar { ch: char, offset: usize },
    #[error("unexpected end of input at byte {offset}")]
    UnexpectedEnd { offset: usize },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("expected `{expected}` at byte {offset}")]
    Expected { expected: char, offset: usize },
    #[error("malformed number at byte {offset}")]
    BadNumber { offset: usize },
    #[error("trailing input at byte {offset}")]
    Trailing { offset: usize },
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("division by zero at t = {t}")]
    DivisionByZero { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Exp => x.exp(),
            Func::Sqrt => x.sqrt(),
        }
    }
}

/// Compiled expression tree over the single variable `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Time,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        match self {
            Expr::Number(c) => Ok(*c),
            Expr::Time => Ok(t),
            Expr::Neg(e) => Ok(-e.eval(t)?),
            Expr::Add(a, b) => Ok(a.eval(t)? + b.eval(t)?),
            Expr::Sub(a, b) => Ok(a.eval(t)? - b.eval(t)?),
            Expr::Mul(a, b) => Ok(a.eval(t)? * b.eval(t)?),
            Expr::Div(a, b) => {
                let d = b.eval(t)?;
                if d == 0.0 {
                    return Err(EvalError::DivisionByZero { t });
                }
                Ok(a.eval(t)? / d)
            }
            Expr::Pow(a, b) => Ok(a.eval(t)?.powf(b.eval(t)?)),
            Expr::Call(f, e) => Ok(f.apply(e.eval(t)?)),
        }
    }

    pub fn contains_time(&self) -> bool {
        match self {
            Expr::Number(_) => false,
            Expr::Time => true,
            Expr::Neg(e) | Expr::Call(_, e) => e.contains_time(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.contains_time() || b.contains_time(),
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized form; reparsing it yields an identical tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(c) => write!(f, "{c}"),
            Expr::Time => write!(f, "t"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Pow(a, b) => write!(f, "({a}^{b})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(ch) = self.peek() {
            if ch.is_ascii_whitespace() {
                self.pos += ch.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let ch = self.peek()?;
        self.pos += ch.len_utf8();
        Some(ch)
    }

    fn eat(&mut self, expected: char) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(ch) if ch == expected => {
                self.bump();
                Ok(())
            }
            Some(_) | None => Err(ParseError::Expected {
                expected,
                offset: self.pos,
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        if self.peek() == Some('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() == Some('^') {
            self.bump();
            // right-associative
            let exp = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(ParseError::UnexpectedEnd { offset: self.pos }),
            Some('(') => {
                self.bump();
                let inner = self.expr()?;
                self.eat(')')?;
                Ok(inner)
            }
            Some(ch) if ch.is_ascii_digit() || ch == '.' => self.number(start),
            Some(ch) if ch.is_ascii_alphabetic() => {
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        self.bump();
                    } else {
                        break;
                    }
                }
                let name = &self.src[start..self.pos];
                if name == "t" {
                    return Ok(Expr::Time);
                }
                let func = match name {
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "sinh" => Func::Sinh,
                    "cosh" => Func::Cosh,
                    "exp" => Func::Exp,
                    "sqrt" => Func::Sqrt,
                    _ => {
                        return Err(ParseError::UnknownIdentifier {
                            name: name.to_owned(),
                            offset: start,
                        })
                    }
                };
                self.eat('(')?;
                let arg = self.expr()?;
                self.eat(')')?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(ch) => Err(ParseError::UnexpectedChar {
                ch,
                offset: self.pos,
            }),
        }
    }

    fn number(&mut self, start: usize) -> Result<Expr, ParseError> {
        let mut seen_dot = false;
        let mut seen_exp = false;
        while let Some(c) = self.peek() {
            match c {
                '0'..='9' => {
                    self.bump();
                }
                '.' if !seen_dot && !seen_exp => {
                    seen_dot = true;
                    self.bump();
                }
                'e' | 'E' if !seen_exp => {
                    seen_exp = true;
                    self.bump();
                    if matches!(self.peek(), Some('+') | Some('-')) {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        self.src[start..self.pos]
            .parse::<f64>()
            .map(Expr::Number)
            .map_err(|_| ParseError::BadNumber { offset: start })
    }
}

/// Parse an expression string into a bare tree.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser::new(src);
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(ParseError::Trailing { offset: p.pos });
    }
    Ok(e)
}

/// Parse an expression string into a coefficient function. Expressions with
/// no `t` dependence are folded to constants.
pub fn parse(src: &str) -> Result<CoefficientFn, ParseError> {
    Ok(CoefficientFn::from_expr(parse_expr(src)?))
}

#[derive(Clone)]
enum Repr {
    Const(f64),
    Parsed(Arc<Expr>),
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A real-valued function of time, either a constant, a parsed expression,
/// or an arbitrary closure. Cheap to clone and shareable across threads.
#[derive(Clone)]
pub struct CoefficientFn {
    repr: Repr,
}

impl CoefficientFn {
    pub fn constant(c: f64) -> Self {
        CoefficientFn { repr: Repr::Const(c) }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn from_expr(e: Expr) -> Self {
        if !e.contains_time() {
            if let Ok(c) = e.eval(0.0) {
                return Self::constant(c);
            }
        }
        CoefficientFn {
            repr: Repr::Parsed(Arc::new(e)),
        }
    }

    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        CoefficientFn {
            repr: Repr::Closure(Arc::new(f)),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        match &self.repr {
            Repr::Const(c) => Ok(*c),
            Repr::Parsed(e) => e.eval(t),
            Repr::Closure(f) => Ok(f(t)),
        }
    }

    /// Evaluation without an error channel; division by zero yields NaN,
    /// which downstream integrators treat as a failed step.
    pub fn value(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Const(c) => *c,
            Repr::Parsed(e) => e.eval(t).unwrap_or(f64::NAN),
            Repr::Closure(f) => f(t),
        }
    }

    /// Some(c) when the function is known to be the constant c.
    pub fn constant_value(&self) -> Option<f64> {
        match &self.repr {
            Repr::Const(c) => Some(*c),
            _ => None,
        }
    }
}

impl fmt::Debug for CoefficientFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Const(c) => write!(f, "CoefficientFn({c})"),
            Repr::Parsed(e) => write!(f, "CoefficientFn({e})"),
            Repr::Closure(_) => write!(f, "CoefficientFn(<closure>)"),
        }
    }
}
