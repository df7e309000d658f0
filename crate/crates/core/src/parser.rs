//! Textual syntax for CCS terms.
//!
//! ```text
//! P   ::= "0" | act "." P | P "+" P | P "|" P
//!       | P "\" "{" name ("," name)* "}"
//!       | P "[" name "/" name ("," name "/" name)* "]"
//!       | "rec" IDENT "." P | IDENT | "(" P ")"
//! act ::= "tau" | name | "'" name
//! ```
//!
//! Binding strength, tightest first: prefix, postfix restriction/relabeling,
//! `|`, `+`. Both binary operators associate to the left. A `rec` body
//! extends as far to the right as possible. `#` starts a comment that runs to
//! the end of the line.
//!
//! Programs (see [`parse_program`]) may start with `Name = P;` definitions
//! that are inlined into the final expression.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{ccs_subst, free_vars, Action, Identifier, Label, Name, NameSet, Process, Relabeling};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}..{}", self.message, self.span.start, self.span.end)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Zero,
    Word(String),
    Tau,
    Rec,
    Quote,
    Dot,
    Plus,
    Bar,
    Backslash,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Slash,
    Comma,
    LParen,
    RParen,
    Equals,
    Semi,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Zero => "`0`".into(),
            Tok::Word(w) => format!("`{w}`"),
            Tok::Tau => "`tau`".into(),
            Tok::Rec => "`rec`".into(),
            Tok::Quote => "`'`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Backslash => "`\\`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let single = match c {
            b'0' => Some(Tok::Zero),
            b'\'' => Some(Tok::Quote),
            b'.' => Some(Tok::Dot),
            b'+' => Some(Tok::Plus),
            b'|' => Some(Tok::Bar),
            b'\\' => Some(Tok::Backslash),
            b'{' => Some(Tok::LBrace),
            b'}' => Some(Tok::RBrace),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b'/' => Some(Tok::Slash),
            b',' => Some(Tok::Comma),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'=' => Some(Tok::Equals),
            b';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            if tok == Tok::Zero && i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                return Err(ParseError {
                    span: SourceSpan::new(start, i + 1),
                    message: "`0` must stand alone".into(),
                    expected: vec![],
                });
            }
            out.push((tok, SourceSpan::new(start, i)));
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'-') {
                i += 1;
            }
            let word = &text[start..i];
            let tok = match word {
                "tau" => Tok::Tau,
                "rec" => Tok::Rec,
                _ => Tok::Word(word.to_string()),
            };
            out.push((tok, SourceSpan::new(start, i)));
            continue;
        }
        let ch = text[i..].chars().next().unwrap_or('?');
        return Err(ParseError {
            span: SourceSpan::new(start, start + ch.len_utf8()),
            message: format!("unexpected character `{ch}`"),
            expected: vec![],
        });
    }
    out.push((Tok::Eof, SourceSpan::new(text.len(), text.len())));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let (tok, span) = &self.toks[self.pos];
        Err(ParseError {
            span: *span,
            message: format!("unexpected {}", tok.describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<SourceSpan, ParseError> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            self.error(&[&want.describe()])
        }
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Word(w) => {
                let span = self.bump().1;
                Name::new(w).map_err(|e| ParseError { span, message: e.to_string(), expected: vec![] })
            }
            Tok::Tau => {
                let span = self.span();
                Err(ParseError {
                    span,
                    message: "tau is not a label and cannot be restricted or relabeled".into(),
                    expected: vec!["label name".into()],
                })
            }
            _ => self.error(&["label name"]),
        }
    }

    fn ident(&mut self) -> Result<Identifier, ParseError> {
        match self.peek().clone() {
            Tok::Word(w) => {
                let span = self.bump().1;
                Identifier::new(w).map_err(|e| ParseError { span, message: e.to_string(), expected: vec![] })
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn sum(&mut self) -> Result<Process, ParseError> {
        let mut left = self.par()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let right = self.par()?;
            left = Process::sum(left, right);
        }
        Ok(left)
    }

    fn par(&mut self) -> Result<Process, ParseError> {
        let mut left = self.postfix()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let right = self.postfix()?;
            left = Process::par(left, right);
        }
        Ok(left)
    }

    fn postfix(&mut self) -> Result<Process, ParseError> {
        let mut p = self.prefix()?;
        loop {
            match self.peek() {
                Tok::Backslash => {
                    self.bump();
                    p = Process::Restr(self.name_set()?, Box::new(p));
                }
                Tok::LBracket => {
                    let start = self.span().start;
                    self.bump();
                    let rf = self.relabeling(start)?;
                    p = Process::relab(p, rf);
                }
                _ => return Ok(p),
            }
        }
    }

    fn name_set(&mut self) -> Result<NameSet, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut names = BTreeSet::new();
        if *self.peek() != Tok::RBrace {
            loop {
                names.insert(self.name()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(names)
    }

    fn relabeling(&mut self, start: usize) -> Result<Relabeling, ParseError> {
        let mut pairs = Vec::new();
        if *self.peek() != Tok::RBracket {
            loop {
                let new = self.name()?;
                self.expect(Tok::Slash)?;
                let old = self.name()?;
                pairs.push((new, old));
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        let end = self.expect(Tok::RBracket)?.end;
        Relabeling::from_names(pairs).map_err(|e| ParseError {
            span: SourceSpan::new(start, end),
            message: e.to_string(),
            expected: vec![],
        })
    }

    fn prefix(&mut self) -> Result<Process, ParseError> {
        let action = match (self.peek().clone(), self.peek_at(1).clone()) {
            (Tok::Tau, _) => {
                self.bump();
                Some(Action::Tau)
            }
            (Tok::Quote, _) => {
                self.bump();
                Some(Action::Visible(Label::output(self.name()?)))
            }
            (Tok::Word(_), Tok::Dot) => Some(Action::Visible(Label::input(self.name()?))),
            _ => None,
        };
        match action {
            Some(u) => {
                self.expect(Tok::Dot)?;
                let body = self.prefix()?;
                Ok(Process::prefix(u, body))
            }
            None => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Process, ParseError> {
        match self.peek() {
            Tok::Zero => {
                self.bump();
                Ok(Process::Nil)
            }
            Tok::Word(_) => Ok(Process::Var(self.ident()?)),
            Tok::LParen => {
                self.bump();
                let p = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Rec => {
                self.bump();
                let x = self.ident()?;
                self.expect(Tok::Dot)?;
                let body = self.sum()?;
                Ok(Process::rec(x, body))
            }
            _ => self.error(&["`0`", "action prefix", "identifier", "`(`", "`rec`"]),
        }
    }
}

/// Parses a single process expression.
pub fn parse(text: &str) -> Result<Process, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let proc = p.sum()?;
    if *p.peek() != Tok::Eof {
        return p.error(&["`+`", "`|`", "`\\`", "`[`", "end of input"]);
    }
    Ok(proc)
}

/// Parses a program: zero or more `Name = P;` definitions followed by a
/// final expression. Definitions may refer to each other (including
/// mutually); each use is inlined, closing self-reference with `rec`.
pub fn parse_program(text: &str) -> Result<Process, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut defs: BTreeMap<Identifier, Process> = BTreeMap::new();
    while matches!(p.peek(), Tok::Word(_)) && *p.peek_at(1) == Tok::Equals {
        let span = p.span();
        let name = p.ident()?;
        p.bump();
        let body = p.sum()?;
        p.expect(Tok::Semi)?;
        if defs.insert(name.clone(), body).is_some() {
            return Err(ParseError {
                span,
                message: format!("`{name}` is defined twice"),
                expected: vec![],
            });
        }
    }
    let main_span = p.span();
    let main = p.sum()?;
    if *p.peek() != Tok::Eof {
        return p.error(&["`+`", "`|`", "`\\`", "`[`", "end of input"]);
    }
    inline_definitions(&main, &defs).map_err(|message| ParseError {
        span: SourceSpan::new(main_span.start, text.len()),
        message,
        expected: vec![],
    })
}

fn inline_definitions(main: &Process, defs: &BTreeMap<Identifier, Process>) -> Result<Process, String> {
    fn expand(
        name: &Identifier,
        defs: &BTreeMap<Identifier, Process>,
        stack: &mut Vec<Identifier>,
    ) -> Result<Process, String> {
        stack.push(name.clone());
        let body = substitute_all(&defs[name], defs, stack)?;
        stack.pop();
        if free_vars(&body).contains(name) {
            Ok(Process::rec(name.clone(), body))
        } else {
            Ok(body)
        }
    }

    fn substitute_all(
        term: &Process,
        defs: &BTreeMap<Identifier, Process>,
        stack: &mut Vec<Identifier>,
    ) -> Result<Process, String> {
        let mut out = term.clone();
        for v in free_vars(term) {
            if !defs.contains_key(&v) || stack.contains(&v) {
                continue;
            }
            let replacement = expand(&v, defs, stack)?;
            out = ccs_subst(&out, &replacement, &v).map_err(|e| e.to_string())?;
        }
        Ok(out)
    }

    substitute_all(main, defs, &mut Vec::new())
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Sum,
    Par,
    Postfix,
    Prefix,
}

/// Renders a process in the concrete syntax accepted by [`parse`], with the
/// fewest parentheses that preserve the tree.
pub fn render(p: &Process) -> String {
    let mut out = String::new();
    write_proc(&mut out, p, Level::Sum, true);
    out
}

fn parens(out: &mut String, p: &Process) {
    out.push('(');
    write_proc(out, p, Level::Sum, true);
    out.push(')');
}

// `tail`: nothing follows this term at the current nesting depth, so an
// unparenthesized `rec` body cannot swallow anything.
fn write_proc(out: &mut String, p: &Process, level: Level, tail: bool) {
    use std::fmt::Write;
    match p {
        Process::Nil => out.push('0'),
        Process::Var(x) => out.push_str(x.as_str()),
        Process::Prefix(u, body) => {
            let _ = write!(out, "{u}.");
            write_proc(out, body, Level::Prefix, tail);
        }
        Process::Sum(l, r) => {
            if level > Level::Sum {
                return parens(out, p);
            }
            write_proc(out, l, Level::Sum, false);
            out.push_str(" + ");
            write_proc(out, r, Level::Par, tail);
        }
        Process::Par(l, r) => {
            if level > Level::Par {
                return parens(out, p);
            }
            write_proc(out, l, Level::Par, false);
            out.push_str(" | ");
            write_proc(out, r, Level::Postfix, tail);
        }
        Process::Restr(names, body) => {
            if level > Level::Postfix {
                return parens(out, p);
            }
            write_proc(out, body, Level::Postfix, false);
            out.push_str(" \\ {");
            for (i, n) in names.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(n.as_str());
            }
            out.push('}');
        }
        Process::Relab(body, rf) => {
            if level > Level::Postfix {
                return parens(out, p);
            }
            write_proc(out, body, Level::Postfix, false);
            let _ = write!(out, "{rf}");
        }
        Process::Rec(x, body) => {
            if level > Level::Sum || !tail {
                return parens(out, p);
            }
            let _ = write!(out, "rec {x}. ");
            write_proc(out, body, Level::Sum, tail);
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}
