//! Text grammar for polynomial systems.
//!
//! ```text
//! system := line ((";" | newline)+ line)*
//! line   := "dx" INT "/dt" "=" poly
//! poly   := ("+"|"-")? term (("+"|"-") term)*
//! term   := coeff? ("*"? mono)*
//! mono   := "x" INT ("^" INT)?
//! coeff  := INT | DECIMAL | INT "/" INT
//! ```
//!
//! Whitespace is insignificant inside a line and `#` starts a comment.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use super::{ModelError, PolySystem, Vertex};
use crate::ratmat::Rational;

/// Result of parsing: the normalized system plus monomials that cancelled out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub system: PolySystem,
    /// Monomials whose merged coefficient vector was zero, dropped from the system.
    pub dropped: Vec<Vertex>,
}

/// One `dxK/dt = ...` line before variable resolution.
struct Equation {
    index: usize,
    line: usize,
    column: usize,
    /// (coefficient, variable index (1-based) -> exponent)
    terms: Vec<(Rational, BTreeMap<usize, u32>)>,
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    line_start: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            line_start: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn column(&self) -> usize {
        self.pos - self.line_start + 1
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.line_start = self.pos;
        }
        Some(c)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ModelError> {
        Err(ModelError::Syntax {
            line: self.line,
            column: self.column(),
            message: message.into(),
        })
    }

    /// Skips blanks and comments but not newlines, which separate lines.
    fn skip_inline_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() && c != '\n' {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn skip_separators(&mut self) {
        loop {
            self.skip_inline_ws();
            match self.peek() {
                Some('\n') | Some(';') => {
                    self.bump();
                }
                _ => break,
            }
        }
    }

    fn expect(&mut self, literal: &str) -> Result<(), ModelError> {
        for expected in literal.chars() {
            if self.peek() != Some(expected) {
                return self.error(format!("expected `{literal}`"));
            }
            self.bump();
        }
        Ok(())
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        s
    }

    fn integer(&mut self, what: &str) -> Result<String, ModelError> {
        let d = self.digits();
        if d.is_empty() {
            return self.error(format!("expected {what}"));
        }
        Ok(d)
    }

    fn small_integer(&mut self, what: &str) -> Result<u64, ModelError> {
        let (line, column) = (self.line, self.column());
        let d = self.integer(what)?;
        d.parse().map_err(|_| ModelError::Syntax {
            line,
            column,
            message: format!("{what} too large"),
        })
    }

    fn at_line_end(&self) -> bool {
        matches!(self.peek(), None | Some('\n') | Some(';'))
    }
}

fn big(digits: &str) -> BigInt {
    digits.parse().expect("digit string")
}

/// Parses `INT`, `DECIMAL` or `INT/INT` into an exact rational.
fn coefficient(cur: &mut Cursor) -> Result<Rational, ModelError> {
    let int_part = cur.digits();
    if cur.peek() == Some('.') {
        cur.bump();
        let frac = cur.digits();
        if int_part.is_empty() && frac.is_empty() {
            return cur.error("expected digits around decimal point");
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let whole = if int_part.is_empty() {
            BigInt::zero()
        } else {
            big(&int_part)
        };
        let frac = if frac.is_empty() {
            BigInt::zero()
        } else {
            big(&frac)
        };
        return Ok(Rational::new(whole * &scale + frac, scale));
    }
    let num = big(&int_part);
    cur.skip_inline_ws();
    if cur.peek() == Some('/') {
        cur.bump();
        cur.skip_inline_ws();
        let den = cur.integer("denominator")?;
        let den = big(&den);
        if den.is_zero() {
            return cur.error("zero denominator");
        }
        return Ok(Rational::new(num, den));
    }
    Ok(Rational::from_integer(num))
}

fn term(cur: &mut Cursor) -> Result<(Rational, BTreeMap<usize, u32>), ModelError> {
    cur.skip_inline_ws();
    let mut coeff = Rational::one();
    let mut has_coeff = false;
    if cur.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
        coeff = coefficient(cur)?;
        has_coeff = true;
    }
    let mut mono: BTreeMap<usize, u32> = BTreeMap::new();
    let mut has_mono = false;
    loop {
        cur.skip_inline_ws();
        let starred = cur.peek() == Some('*');
        if starred {
            cur.bump();
            cur.skip_inline_ws();
        }
        if cur.peek() != Some('x') {
            if starred {
                return cur.error("expected a variable after `*`");
            }
            break;
        }
        cur.bump();
        let var = cur.small_integer("variable index")? as usize;
        if var == 0 {
            return cur.error("variable indices start at 1");
        }
        cur.skip_inline_ws();
        let mut exponent = 1u64;
        if cur.peek() == Some('^') {
            cur.bump();
            cur.skip_inline_ws();
            if cur.peek() == Some('-') {
                return cur.error("negative exponents are not allowed");
            }
            exponent = cur.small_integer("exponent")?;
            if cur.peek() == Some('.') {
                return cur.error("exponents must be non-negative integers");
            }
        }
        let slot = mono.entry(var).or_insert(0);
        let total = u64::from(*slot) + exponent;
        *slot = u32::try_from(total).or_else(|_| cur.error("exponent too large"))?;
        has_mono = true;
    }
    if !has_coeff && !has_mono {
        return cur.error("expected a term");
    }
    Ok((coeff, mono))
}

fn equation(cur: &mut Cursor) -> Result<Equation, ModelError> {
    let (line, column) = (cur.line, cur.column());
    cur.expect("dx")?;
    let index = cur.small_integer("equation index")? as usize;
    if index == 0 {
        return cur.error("variable indices start at 1");
    }
    cur.skip_inline_ws();
    cur.expect("/dt")?;
    cur.skip_inline_ws();
    cur.expect("=")?;
    cur.skip_inline_ws();

    let mut terms = Vec::new();
    let mut negate = false;
    match cur.peek() {
        Some('-') => {
            negate = true;
            cur.bump();
        }
        Some('+') => {
            cur.bump();
        }
        _ => {}
    }
    loop {
        let (c, mono) = term(cur)?;
        terms.push((if negate { -c } else { c }, mono));
        cur.skip_inline_ws();
        match cur.peek() {
            Some('+') => negate = false,
            Some('-') => negate = true,
            _ if cur.at_line_end() => break,
            Some(c) => return cur.error(format!("unexpected character `{c}`")),
            None => break,
        }
        cur.bump();
    }
    Ok(Equation {
        index,
        line,
        column,
        terms,
    })
}

/// Parses the text form of `dx/dt = f(x)` into a normalized [`PolySystem`].
///
/// The state dimension is the number of equations, which must be exactly
/// `dx1/dt, ..., dxn/dt` (in any order) and may only mention `x1..xn`.
pub fn parse_system(text: &str) -> Result<Parsed, ModelError> {
    let mut cur = Cursor::new(text);
    let mut equations = Vec::new();
    loop {
        cur.skip_separators();
        if cur.peek().is_none() {
            break;
        }
        equations.push(equation(&mut cur)?);
        cur.skip_inline_ws();
        if !cur.at_line_end() {
            return cur.error("expected `;` or newline");
        }
    }
    if equations.is_empty() {
        return Err(ModelError::EmptySystem);
    }
    let dim = equations.len();
    let mut seen = vec![false; dim];
    for eq in &equations {
        if eq.index > dim {
            return Err(ModelError::InconsistentVariables(format!(
                "equation for x{} at line {}, column {} but only {dim} equations",
                eq.index, eq.line, eq.column
            )));
        }
        if core::mem::replace(&mut seen[eq.index - 1], true) {
            return Err(ModelError::InconsistentVariables(format!(
                "duplicate equation for x{} at line {}",
                eq.index, eq.line
            )));
        }
        for (_, mono) in &eq.terms {
            if let Some((&var, _)) = mono.iter().find(|(&v, _)| v > dim) {
                return Err(ModelError::InconsistentVariables(format!(
                    "variable x{var} used at line {} but the system has {dim} equations",
                    eq.line
                )));
            }
        }
    }

    let mut terms = Vec::new();
    for eq in &equations {
        for (c, mono) in &eq.terms {
            if c.is_zero() {
                continue;
            }
            let mut exponents = vec![0u32; dim];
            for (&var, &e) in mono {
                exponents[var - 1] = e;
            }
            let mut coeffs = vec![Rational::zero(); dim];
            coeffs[eq.index - 1] = c.clone();
            terms.push((Vertex::new(exponents), coeffs));
        }
    }
    let (system, dropped) = PolySystem::from_terms(dim, terms)?;
    Ok(Parsed { system, dropped })
}

impl core::str::FromStr for PolySystem {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_system(s).map(|p| p.system)
    }
}
