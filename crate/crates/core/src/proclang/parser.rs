//! Lexer and recursive-descent parser for the concrete process grammar.

use std::fmt;

use super::ast::{BoolExpr, Channel, ProcDef, Process, Program, StrExpr};
use super::ParseError;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Bits(Word),
    Zero,
    One,
    Semi,
    Comma,
    LParen,
    RParen,
    Lt,
    Gt,
    LBracket,
    RBracket,
    Bang,
    Query,
    Dot,
    Bar,
    Colon,
    Assign,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Bits(w) => write!(f, "{}", w.quoted()),
            Tok::Zero => f.write_str("`0`"),
            Tok::One => f.write_str("`1`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Lt => f.write_str("`<`"),
            Tok::Gt => f.write_str("`>`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Query => f.write_str("`?`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Assign => f.write_str("`:=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

const KEYWORDS: &[&str] = &[
    "input", "output", "main", "if", "then", "else", "tt", "ff", "is0", "nil", "tl",
];

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let syntax = |pos: Pos, msg: String| ParseError::Syntax {
        line: pos.line,
        col: pos.col,
        expected: "a token".into(),
        found: msg,
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match c {
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '<' => Some(Tok::Lt),
            '>' => Some(Tok::Gt),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '!' => Some(Tok::Bang),
            '?' => Some(Tok::Query),
            '.' => Some(Tok::Dot),
            '|' => Some(Tok::Bar),
            '0' => Some(Tok::Zero),
            '1' => Some(Tok::One),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == ':' {
            if chars.get(i + 1) == Some(&'=') {
                out.push((Tok::Assign, pos));
                advance(2, &mut i, &mut col);
            } else {
                out.push((Tok::Colon, pos));
                advance(1, &mut i, &mut col);
            }
            continue;
        }
        if c == '"' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j] != '"' {
                j += 1;
            }
            if j == chars.len() {
                return Err(syntax(pos, "unterminated word literal".into()));
            }
            let body: String = chars[start..j].iter().collect();
            let w: Word = body
                .parse()
                .map_err(|_| syntax(pos, format!("non-binary literal \"{body}\"")))?;
            out.push((Tok::Bits(w), pos));
            advance(j + 1 - i, &mut i, &mut col);
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            out.push((Tok::Ident(chars[start..j].iter().collect()), pos));
            advance(j - i, &mut i, &mut col);
            continue;
        }
        return Err(syntax(pos, format!("unexpected character {c:?}")));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let (tok, pos) = &self.toks[self.at];
        Err(ParseError::Syntax {
            line: pos.line,
            col: pos.col,
            expected: expected.to_string(),
            found: tok.to_string(),
        })
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.error(&t.to_string())
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.error(what),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        let mut defs = Vec::new();
        loop {
            if self.is_kw("input") || self.is_kw("output") {
                let is_input = self.is_kw("input");
                self.bump();
                loop {
                    let name = self.ident("a channel name")?;
                    if is_input {
                        inputs.push(name);
                    } else {
                        outputs.push(name);
                    }
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::Semi)?;
            } else if self.is_kw("main") {
                self.bump();
                self.expect(Tok::Assign)?;
                let main = self.process()?;
                if *self.peek() == Tok::Semi {
                    self.bump();
                }
                if *self.peek() != Tok::Eof {
                    return self.error("end of input after `main`");
                }
                return Program::from_parts(inputs, outputs, defs, main).map_err(ParseError::Semantic);
            } else if matches!(self.peek(), Tok::Ident(_)) {
                let name = self.ident("a definition name")?;
                self.expect(Tok::LParen)?;
                let mut params = Vec::new();
                if *self.peek() != Tok::RParen {
                    loop {
                        params.push(self.ident("a parameter name")?);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                self.expect(Tok::Assign)?;
                let body = self.process()?;
                self.expect(Tok::Semi)?;
                defs.push(ProcDef {
                    name,
                    params,
                    body: body.into(),
                });
            } else {
                return self.error("`input`, `output`, a definition or `main`");
            }
        }
    }

    fn process(&mut self) -> PResult<Process> {
        match self.peek().clone() {
            Tok::Zero => {
                self.bump();
                Ok(Process::Nil)
            }
            Tok::LParen => {
                self.bump();
                let mut parts = vec![self.process()?];
                while *self.peek() == Tok::Bar {
                    self.bump();
                    parts.push(self.process()?);
                }
                self.expect(Tok::RParen)?;
                Ok(Process::par_all(parts))
            }
            Tok::LBracket => {
                self.bump();
                let key = self.expr()?;
                self.expect(Tok::RBracket)?;
                self.prefix(Channel::Internal(key.clone()), Channel::Internal(key))
            }
            Tok::Ident(s) if s == "if" => {
                self.bump();
                let b = self.bool_expr()?;
                self.expect_kw("then")?;
                let p = self.process()?;
                self.expect_kw("else")?;
                let q = self.process()?;
                Ok(Process::cond(b, p, q))
            }
            Tok::Ident(_) => {
                let name = self.ident("a process identifier or channel")?;
                match self.peek() {
                    Tok::Lt => {
                        self.bump();
                        let mut args = Vec::new();
                        if *self.peek() != Tok::Gt {
                            loop {
                                args.push(self.expr()?);
                                if *self.peek() == Tok::Comma {
                                    self.bump();
                                } else {
                                    break;
                                }
                            }
                        }
                        self.expect(Tok::Gt)?;
                        Ok(Process::Call(name, args))
                    }
                    Tok::Bang | Tok::Query => {
                        self.prefix(Channel::ExternalOut(name.clone()), Channel::ExternalIn(name))
                    }
                    _ => self.error("`<`, `!` or `?`"),
                }
            }
            _ => self.error("a process"),
        }
    }

    fn prefix(&mut self, out_ch: Channel, in_ch: Channel) -> PResult<Process> {
        match self.bump() {
            Tok::Bang => {
                let e = self.expr()?;
                self.expect(Tok::Dot)?;
                let p = self.process()?;
                Ok(Process::send(out_ch, e, p))
            }
            Tok::Query => {
                let x = self.ident("a variable")?;
                self.expect(Tok::Dot)?;
                let p = self.process()?;
                Ok(Process::recv(in_ch, &x, p))
            }
            _ => {
                self.at -= 1;
                self.error("`!` or `?`")
            }
        }
    }

    fn expr(&mut self) -> PResult<StrExpr> {
        match self.peek().clone() {
            Tok::Bits(w) => {
                self.bump();
                Ok(StrExpr::Lit(w))
            }
            Tok::Zero | Tok::One => {
                let bit = self.bump() == Tok::One;
                self.expect(Tok::Colon)?;
                Ok(StrExpr::prepend(bit, self.expr()?))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) if s == "tl" => {
                self.bump();
                Ok(StrExpr::tl(self.expr()?))
            }
            Tok::Ident(_) => Ok(StrExpr::Var(self.ident("a variable")?)),
            _ => self.error("a string expression"),
        }
    }

    fn bool_expr(&mut self) -> PResult<BoolExpr> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "tt" => {
                self.bump();
                Ok(BoolExpr::True)
            }
            Tok::Ident(s) if s == "ff" => {
                self.bump();
                Ok(BoolExpr::False)
            }
            Tok::Ident(s) if s == "is0" => {
                self.bump();
                Ok(BoolExpr::IsZero(self.expr()?))
            }
            Tok::Ident(s) if s == "nil" => {
                self.bump();
                Ok(BoolExpr::IsEmpty(self.expr()?))
            }
            Tok::LParen if matches!(self.peek2(), Tok::Ident(s) if ["tt", "ff", "is0", "nil"].contains(&s.as_str())) => {
                self.bump();
                let b = self.bool_expr()?;
                self.expect(Tok::RParen)?;
                Ok(b)
            }
            _ => self.error("a Boolean expression (`tt`, `ff`, `is0 e`, `nil e`)"),
        }
    }
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let toks = lex(text)?;
    Parser { toks, at: 0 }.program()
}

/// Parses a single process term (no declarations, no validation).
pub fn parse_process(text: &str) -> Result<Process, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0 };
    let proc = p.process()?;
    if *p.peek() != Tok::Eof {
        return p.error("end of input");
    }
    Ok(proc)
}
