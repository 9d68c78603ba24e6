//! Diagonal equations of the form `x1 = Σ aⱼ·xⱼ^kⱼ` or `x1^k = Σ xⱼ^k`.
//!
//! Equations are written in a small ASCII grammar:
//!
//! ```text
//! equation := lhs "=" term ("+" term)*
//! lhs      := "x1" | "x1^" INT
//! term     := [INT "*"] "x" INT ["^" INT]
//! ```
//!
//! Whitespace is insignificant and RHS variables must be numbered `x2, x3, ...`
//! in order. Every variable ranges over the naturals starting at 1.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// One right-hand-side monomial `coefficient · x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub coefficient: u64,
    pub exponent: u32,
}

impl Term {
    pub fn new(coefficient: u64, exponent: u32) -> Result<Self, ParseError> {
        if coefficient == 0 {
            return Err(ParseError::Semantic("coefficients must be at least 1".into()));
        }
        if exponent == 0 {
            return Err(ParseError::Semantic("exponents must be at least 1".into()));
        }
        Ok(Self { coefficient, exponent })
    }

    /// Shorthand for a unit-coefficient power `x^k`.
    pub fn power(exponent: u32) -> Self {
        assert!(exponent >= 1, "exponent must be at least 1");
        Self { coefficient: 1, exponent }
    }

    /// `coefficient · x^exponent`, or `None` on overflow.
    pub fn value(&self, x: u128) -> Option<u128> {
        x.checked_pow(self.exponent)?.checked_mul(self.coefficient as u128)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LhsKind {
    /// Bare `x1`.
    ExplicitLinear,
    /// `x1^k` with `k >= 2`.
    HomogeneousPower(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagonalEquation {
    lhs: LhsKind,
    rhs: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EquationFamily {
    ExplicitEqualPowers {
        s: usize,
        k: u32,
    },
    /// Exponents are sorted ascending. `weighted` is set when any coefficient exceeds 1.
    ExplicitMixed {
        s: usize,
        exponents: Vec<u32>,
        weighted: bool,
    },
    HomogeneousEqualPowers {
        s: usize,
        k: u32,
    },
}

impl EquationFamily {
    pub fn s(&self) -> usize {
        match self {
            Self::ExplicitEqualPowers { s, .. }
            | Self::ExplicitMixed { s, .. }
            | Self::HomogeneousEqualPowers { s, .. } => *s,
        }
    }
}

impl fmt::Display for EquationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ExplicitEqualPowers { s, k } => write!(f, "ExplicitEqualPowers({s},{k})"),
            Self::ExplicitMixed { s, exponents, weighted } => {
                let list: Vec<String> = exponents.iter().map(u32::to_string).collect();
                write!(f, "ExplicitMixed({s},[{}])", list.join(","))?;
                if *weighted {
                    f.write_str("+coef")?;
                }
                Ok(())
            }
            Self::HomogeneousEqualPowers { s, k } => write!(f, "HomogeneousEqualPowers({s},{k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("invalid equation: {0}")]
    Semantic(String),
}

impl DiagonalEquation {
    pub fn new(lhs: LhsKind, rhs: Vec<Term>) -> Result<Self, ParseError> {
        if rhs.is_empty() {
            return Err(ParseError::Semantic("right-hand side needs at least one term".into()));
        }
        for t in &rhs {
            Term::new(t.coefficient, t.exponent)?;
        }
        if let LhsKind::HomogeneousPower(k) = lhs {
            if k < 2 {
                return Err(ParseError::Semantic(
                    "a power left-hand side needs exponent >= 2 (use x1 for k = 1)".into(),
                ));
            }
            if let Some(t) = rhs.iter().find(|t| t.exponent != k || t.coefficient != 1) {
                return Err(ParseError::Semantic(format!(
                    "x1^{k} requires every term to be a unit-coefficient x^{k}, found {}*x^{}",
                    t.coefficient, t.exponent
                )));
            }
        }
        Ok(Self { lhs, rhs })
    }

    /// `x1 = x2^k + ... + xs^k`.
    pub fn explicit_equal(s: usize, k: u32) -> Self {
        assert!(s >= 2 && k >= 1);
        Self { lhs: LhsKind::ExplicitLinear, rhs: vec![Term::power(k); s - 1] }
    }

    /// `x1^k = x2^k + ... + xs^k`.
    pub fn homogeneous(s: usize, k: u32) -> Self {
        assert!(s >= 2 && k >= 2);
        Self { lhs: LhsKind::HomogeneousPower(k), rhs: vec![Term::power(k); s - 1] }
    }

    pub fn lhs(&self) -> LhsKind {
        self.lhs
    }

    pub fn rhs(&self) -> &[Term] {
        &self.rhs
    }

    /// Total number of variables, `x1` included.
    pub fn s(&self) -> usize {
        1 + self.rhs.len()
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.lhs, LhsKind::HomogeneousPower(_))
    }

    /// True when every RHS term is the same unit-coefficient power.
    pub fn has_identical_unit_terms(&self) -> bool {
        let first = self.rhs[0];
        first.coefficient == 1 && self.rhs.iter().all(|t| *t == first)
    }

    pub fn classify(&self) -> EquationFamily {
        let s = self.s();
        match self.lhs {
            LhsKind::HomogeneousPower(k) => EquationFamily::HomogeneousEqualPowers { s, k },
            LhsKind::ExplicitLinear => {
                if self.has_identical_unit_terms() {
                    EquationFamily::ExplicitEqualPowers { s, k: self.rhs[0].exponent }
                } else {
                    let mut exponents: Vec<u32> = self.rhs.iter().map(|t| t.exponent).collect();
                    exponents.sort_unstable();
                    let weighted = self.rhs.iter().any(|t| t.coefficient > 1);
                    EquationFamily::ExplicitMixed { s, exponents, weighted }
                }
            }
        }
    }

    /// Canonical text form; `parse(render(eq)) == eq`.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DiagonalEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lhs {
            LhsKind::ExplicitLinear => f.write_str("x1 =")?,
            LhsKind::HomogeneousPower(k) => write!(f, "x1^{k} =")?,
        }
        for (i, t) in self.rhs.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { " + " })?;
            if t.coefficient != 1 {
                write!(f, "{}*", t.coefficient)?;
            }
            write!(f, "x{}", i + 2)?;
            if t.exponent != 1 {
                write!(f, "^{}", t.exponent)?;
            }
        }
        Ok(())
    }
}

impl FromStr for DiagonalEquation {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_equation(s)
    }
}

pub fn parse_equation(spec: &str) -> Result<DiagonalEquation, ParseError> {
    let mut p = Parser { src: spec.as_bytes(), pos: 0 };
    let lhs = p.lhs()?;
    p.expect(b'=')?;
    let mut rhs = vec![p.term(2)?];
    loop {
        p.skip_ws();
        if p.at_end() {
            break;
        }
        p.expect(b'+')?;
        rhs.push(p.term(rhs.len() + 2)?);
    }
    DiagonalEquation::new(lhs, rhs)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { position: self.pos, message: message.into() })
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += 1;
                Ok(())
            }
            Some(got) => self.err(format!("expected '{}', found '{}'", c as char, got as char)),
            None => self.err(format!("expected '{}', found end of input", c as char)),
        }
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits
            .parse()
            .map_err(|_| ParseError::Syntax { position: start, message: format!("integer {digits} out of range") })
    }

    fn small_int(&mut self) -> Result<u32, ParseError> {
        let at = self.pos;
        let v = self.int()?;
        u32::try_from(v).map_err(|_| ParseError::Syntax { position: at, message: format!("exponent {v} out of range") })
    }

    fn variable(&mut self, expected: usize) -> Result<(), ParseError> {
        self.expect(b'x')?;
        let at = self.pos;
        let idx = self.int()?;
        if idx != expected as u64 {
            return Err(ParseError::Syntax {
                position: at,
                message: format!("expected variable x{expected}, found x{idx}"),
            });
        }
        Ok(())
    }

    fn optional_exponent(&mut self) -> Result<Option<u32>, ParseError> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = self.pos;
            let k = self.small_int()?;
            if k == 0 {
                return Err(ParseError::Syntax { position: at, message: "exponent must be at least 1".into() });
            }
            Ok(Some(k))
        } else {
            Ok(None)
        }
    }

    fn lhs(&mut self) -> Result<LhsKind, ParseError> {
        self.variable(1)?;
        Ok(match self.optional_exponent()? {
            None | Some(1) => LhsKind::ExplicitLinear,
            Some(k) => LhsKind::HomogeneousPower(k),
        })
    }

    fn term(&mut self, index: usize) -> Result<Term, ParseError> {
        let coefficient = if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let at = self.pos;
            let a = self.int()?;
            if a == 0 {
                return Err(ParseError::Syntax { position: at, message: "coefficient must be at least 1".into() });
            }
            self.expect(b'*')?;
            a
        } else {
            1
        };
        self.variable(index)?;
        let exponent = self.optional_exponent()?.unwrap_or(1);
        Ok(Term { coefficient, exponent })
    }
}
