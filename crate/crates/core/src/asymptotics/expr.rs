//! Tiny exact-rational expression language used by catalog rows.
//!
//! ```text
//! (s - 1) / k          1 + 3/(2*k)          s - 1 > 2^k and k >= 2
//! ```
//!
//! Numbers are integers, `/` is exact rational division, `^` takes an
//! integer exponent. Comparisons yield booleans combined with `and`/`or`.

use std::fmt;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("expression `{src}`: {message} at byte {position}")]
    Syntax { src: String, position: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("type mismatch: {0}")]
    Type(String),
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Value {
    Num(Rational64),
    Bool(bool),
}

impl Value {
    pub fn as_num(self) -> Result<Rational64, ExprError> {
        match self {
            Value::Num(r) => Ok(r),
            Value::Bool(_) => Err(ExprError::Type("expected a number, found a boolean".into())),
        }
    }

    pub fn as_bool(self) -> Result<bool, ExprError> {
        match self {
            Value::Bool(b) => Ok(b),
            Value::Num(_) => Err(ExprError::Type("expected a boolean, found a number".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(i64),
    Var(String),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
}

/// A parsed expression; keeps its source text for display.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    src: String,
    root: Node,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let tokens = tokenize(src)?;
        let mut p = ExprParser { src, tokens, pos: 0 };
        let root = p.or()?;
        if let Some((at, tok)) = p.tokens.get(p.pos) {
            return Err(p.error(*at, format!("unexpected `{tok:?}`")));
        }
        Ok(Self { src: src.to_string(), root })
    }

    pub fn variables(&self) -> Vec<&str> {
        fn walk<'a>(n: &'a Node, out: &mut Vec<&'a str>) {
            match n {
                Node::Num(_) => {}
                Node::Var(v) => out.push(v),
                Node::Neg(a) => walk(a, out),
                Node::Bin(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn eval(&self, lookup: &dyn Fn(&str) -> Option<Rational64>) -> Result<Value, ExprError> {
        eval(&self.root, lookup)
    }
}

fn arith(what: &str) -> ExprError {
    ExprError::Arithmetic(what.to_string())
}

fn eval(node: &Node, lookup: &dyn Fn(&str) -> Option<Rational64>) -> Result<Value, ExprError> {
    Ok(match node {
        Node::Num(n) => Value::Num(Rational64::from_integer(*n)),
        Node::Var(name) => match name.as_str() {
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            _ => Value::Num(lookup(name).ok_or_else(|| ExprError::UnknownVariable(name.clone()))?),
        },
        Node::Neg(a) => Value::Num(-eval(a, lookup)?.as_num()?),
        Node::Bin(op @ (BinOp::And | BinOp::Or), a, b) => {
            let l = eval(a, lookup)?.as_bool()?;
            let r = eval(b, lookup)?.as_bool()?;
            Value::Bool(if *op == BinOp::And { l && r } else { l || r })
        }
        Node::Bin(op, a, b) => {
            let l = eval(a, lookup)?.as_num()?;
            let r = eval(b, lookup)?.as_num()?;
            match op {
                BinOp::Add => Value::Num(l.checked_add(&r).ok_or_else(|| arith("overflow"))?),
                BinOp::Sub => Value::Num(l.checked_sub(&r).ok_or_else(|| arith("overflow"))?),
                BinOp::Mul => Value::Num(l.checked_mul(&r).ok_or_else(|| arith("overflow"))?),
                BinOp::Div => {
                    if r.is_zero() {
                        return Err(arith("division by zero"));
                    }
                    Value::Num(l.checked_div(&r).ok_or_else(|| arith("overflow"))?)
                }
                BinOp::Pow => Value::Num(rational_pow(l, r)?),
                BinOp::Lt => Value::Bool(l < r),
                BinOp::Le => Value::Bool(l <= r),
                BinOp::Gt => Value::Bool(l > r),
                BinOp::Ge => Value::Bool(l >= r),
                BinOp::Eq => Value::Bool(l == r),
                BinOp::Ne => Value::Bool(l != r),
                BinOp::And | BinOp::Or => unreachable!(),
            }
        }
    })
}

fn rational_pow(base: Rational64, exp: Rational64) -> Result<Rational64, ExprError> {
    if !exp.is_integer() {
        return Err(arith("exponents must be integers"));
    }
    let e = exp.to_integer();
    if e.abs() > 62 {
        return Err(arith("exponent too large"));
    }
    let mut acc = Rational64::one();
    for _ in 0..e.abs() {
        acc = acc.checked_mul(&base).ok_or_else(|| arith("overflow"))?;
    }
    if e.is_negative() {
        if acc.is_zero() {
            return Err(arith("division by zero"));
        }
        acc = acc.recip();
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Sym(&'static str),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    const SYMS: [&str; 13] = ["<=", ">=", "==", "!=", "<", ">", "+", "-", "*", "/", "^", "(", ")"];
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i].parse().map_err(|_| ExprError::Syntax {
                src: src.into(),
                position: start,
                message: "integer out of range".into(),
            })?;
            out.push((start, Tok::Num(n)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
            continue;
        }
        for sym in SYMS {
            if src[i..].starts_with(sym) {
                out.push((i, Tok::Sym(sym)));
                i += sym.len();
                continue 'outer;
            }
        }
        return Err(ExprError::Syntax { src: src.into(), position: i, message: format!("unexpected `{}`", c as char) });
    }
    Ok(out)
}

struct ExprParser<'a> {
    src: &'a str,
    tokens: Vec<(usize, Tok)>,
    pos: usize,
}

impl ExprParser<'_> {
    fn error(&self, position: usize, message: String) -> ExprError {
        ExprError::Syntax { src: self.src.to_string(), position, message }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.and()?;
        while self.eat_word("or") {
            lhs = Node::Bin(BinOp::Or, Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.cmp()?;
        while self.eat_word("and") {
            lhs = Node::Bin(BinOp::And, Box::new(lhs), Box::new(self.cmp()?));
        }
        Ok(lhs)
    }

    fn cmp(&mut self) -> Result<Node, ExprError> {
        let lhs = self.sum()?;
        let ops = [
            ("<=", BinOp::Le),
            (">=", BinOp::Ge),
            ("==", BinOp::Eq),
            ("!=", BinOp::Ne),
            ("<", BinOp::Lt),
            (">", BinOp::Gt),
        ];
        for (sym, op) in ops {
            if self.eat_sym(sym) {
                return Ok(Node::Bin(op, Box::new(lhs), Box::new(self.sum()?)));
            }
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat_sym("+") {
                BinOp::Add
            } else if self.eat_sym("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat_sym("*") {
                BinOp::Mul
            } else if self.eat_sym("/") {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.eat_sym("-") {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat_sym("^") {
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let at = self.tokens.get(self.pos).map_or(self.src.len(), |(p, _)| *p);
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Node::Num(n))
            }
            Some(Tok::Ident(name)) if name != "and" && name != "or" => {
                self.pos += 1;
                Ok(Node::Var(name))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let inner = self.or()?;
                if !self.eat_sym(")") {
                    return Err(self.error(at, "unclosed parenthesis".into()));
                }
                Ok(inner)
            }
            Some(tok) => Err(self.error(at, format!("unexpected `{tok:?}`"))),
            None => Err(self.error(at, "unexpected end of expression".into())),
        }
    }
}
