use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// A function of the input size `n`, used as a time or space bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundExpr {
    Const(BigUint),
    N,
    Add(Box<BoundExpr>, Box<BoundExpr>),
    Mul(Box<BoundExpr>, Box<BoundExpr>),
    /// Either the base or the exponent is constant.
    Pow(Box<BoundExpr>, Box<BoundExpr>),
    Max(Box<BoundExpr>, Box<BoundExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bound at column {column}: {message}")]
pub struct BoundError {
    pub column: usize,
    pub message: String,
}

impl BoundExpr {
    pub fn constant(c: u64) -> Self {
        BoundExpr::Const(BigUint::from(c))
    }

    fn mentions_n(&self) -> bool {
        match self {
            BoundExpr::Const(_) => false,
            BoundExpr::N => true,
            BoundExpr::Add(a, b) | BoundExpr::Mul(a, b) | BoundExpr::Pow(a, b) | BoundExpr::Max(a, b) => {
                a.mentions_n() || b.mentions_n()
            }
        }
    }
}

/// Parses `const | n | b+b | b*b | b^b | max(b,b) | (b)`, where one side of
/// every `^` is free of `n`. `^` binds tightest and associates to the right.
pub fn parse_bound(text: &str) -> Result<BoundExpr, BoundError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, m: &str) -> BoundError {
        BoundError {
            column: self.pos + 1,
            message: m.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), BoundError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn sum(&mut self) -> Result<BoundExpr, BoundError> {
        let mut e = self.product()?;
        while self.eat(b'+') {
            e = BoundExpr::Add(Box::new(e), Box::new(self.product()?));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<BoundExpr, BoundError> {
        let mut e = self.power()?;
        while self.eat(b'*') {
            e = BoundExpr::Mul(Box::new(e), Box::new(self.power()?));
        }
        Ok(e)
    }

    fn power(&mut self) -> Result<BoundExpr, BoundError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        let exp = self.power()?;
        if base.mentions_n() && exp.mentions_n() {
            return Err(BoundError {
                column: at + 1,
                message: "base or exponent must be constant".into(),
            });
        }
        Ok(BoundExpr::Pow(Box::new(base), Box::new(exp)))
    }

    fn atom(&mut self) -> Result<BoundExpr, BoundError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        if rest.first().is_some_and(u8::is_ascii_digit) {
            let len = rest.iter().take_while(|c| c.is_ascii_digit()).count();
            let digits = std::str::from_utf8(&rest[..len]).expect("ascii digits");
            self.pos += len;
            return Ok(BoundExpr::Const(digits.parse().expect("digits form a number")));
        }
        if rest.starts_with(b"max") {
            self.pos += 3;
            self.expect(b'(')?;
            let a = self.sum()?;
            self.expect(b',')?;
            let b = self.sum()?;
            self.expect(b')')?;
            return Ok(BoundExpr::Max(Box::new(a), Box::new(b)));
        }
        if rest.first() == Some(&b'n') {
            self.pos += 1;
            return Ok(BoundExpr::N);
        }
        if self.eat(b'(') {
            let e = self.sum()?;
            self.expect(b')')?;
            return Ok(e);
        }
        Err(self.error("expected a number, `n`, `max(` or `(`"))
    }
}

/// Exact value at `n`.
///
/// Panics if an exponent does not fit in 32 bits while the base exceeds 1;
/// such a result could not be stored anyway.
pub fn eval_bound(b: &BoundExpr, n: u64) -> BigUint {
    match b {
        BoundExpr::Const(c) => c.clone(),
        BoundExpr::N => BigUint::from(n),
        BoundExpr::Add(x, y) => eval_bound(x, n) + eval_bound(y, n),
        BoundExpr::Mul(x, y) => eval_bound(x, n) * eval_bound(y, n),
        BoundExpr::Max(x, y) => eval_bound(x, n).max(eval_bound(y, n)),
        BoundExpr::Pow(x, y) => {
            let base = eval_bound(x, n);
            let exp = eval_bound(y, n);
            if exp.is_zero() {
                BigUint::one()
            } else if base <= BigUint::one() {
                base
            } else {
                let e = exp.to_u32().expect("exponent too large to evaluate");
                base.pow(e)
            }
        }
    }
}

impl FromStr for BoundExpr {
    type Err = BoundError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_bound(s)
    }
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // fully parenthesized below the top so that printing always re-parses
        fn inner(e: &BoundExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match e {
                BoundExpr::Const(_) | BoundExpr::N | BoundExpr::Max(..) => write!(f, "{e}"),
                _ => write!(f, "({e})"),
            }
        }
        match self {
            BoundExpr::Const(c) => write!(f, "{c}"),
            BoundExpr::N => f.write_str("n"),
            BoundExpr::Max(a, b) => write!(f, "max({a}, {b})"),
            BoundExpr::Add(a, b) | BoundExpr::Mul(a, b) | BoundExpr::Pow(a, b) => {
                let op = match self {
                    BoundExpr::Add(..) => " + ",
                    BoundExpr::Mul(..) => "*",
                    _ => "^",
                };
                inner(a, f)?;
                f.write_str(op)?;
                inner(b, f)
            }
        }
    }
}
