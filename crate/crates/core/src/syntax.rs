//! LTL abstract syntax, the specification file format, and the renaming
//! machinery used to build projection formulae.
//!
//! Surface syntax (loosest to tightest binding):
//!
//! ```text
//! f <-> g        right-associative
//! f -> g         right-associative
//! f | g
//! f & g
//! f U g, f R g   right-associative
//! !f, G f, F f, X f
//! ```
//!
//! Atoms are identifiers; `true`, `false`, `G`, `F`, `X`, `U` and `R` are
//! reserved. A trailing apostrophe marks a primed atom (`a'`), which is only
//! accepted by [`parse_formula`]; specification files never contain primes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A propositional variable, possibly carrying the prime mark.
///
/// Priming is a flag, so `a'` can never collide with a declared name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId {
    pub base: String,
    pub primed: bool,
}

impl AtomId {
    pub fn plain(base: impl Into<String>) -> Self {
        AtomId {
            base: base.into(),
            primed: false,
        }
    }

    pub fn primed(base: impl Into<String>) -> Self {
        AtomId {
            base: base.into(),
            primed: true,
        }
    }

    /// The same variable with the prime flag flipped on.
    pub fn to_primed(&self) -> Self {
        AtomId::primed(self.base.clone())
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.primed {
            write!(f, "{}'", self.base)
        } else {
            f.write_str(&self.base)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(AtomId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(AtomId::plain(name))
    }

    pub fn primed(name: impl Into<String>) -> Self {
        Formula::Atom(AtomId::primed(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Formula::Always(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Formula::Release(Box::new(a), Box::new(b))
    }

    /// Right-folded conjunction; the empty conjunction is `True`.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return Formula::True;
        };
        while let Some(f) = parts.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// The exact set of atoms occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<AtomId> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<AtomId>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f)
            | Formula::Next(f)
            | Formula::Eventually(f)
            | Formula::Always(f) => f.collect_atoms(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f)
            | Formula::Next(f)
            | Formula::Eventually(f)
            | Formula::Always(f) => 1 + f.size(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Rebuilds the tree with every atom passed through `f`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&AtomId) -> AtomId) -> Formula {
        self.map_atoms_dyn(f)
    }

    fn map_atoms_dyn(&self, f: &mut dyn FnMut(&AtomId) -> AtomId) -> Formula {
        let mut un = |x: &Formula| Box::new(x.map_atoms_dyn(f));
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(f(a)),
            Formula::Not(x) => Formula::Not(un(x)),
            Formula::Next(x) => Formula::Next(un(x)),
            Formula::Eventually(x) => Formula::Eventually(un(x)),
            Formula::Always(x) => Formula::Always(un(x)),
            Formula::And(a, b) => {
                let a = un(a);
                Formula::And(a, un(b))
            }
            Formula::Or(a, b) => {
                let a = un(a);
                Formula::Or(a, un(b))
            }
            Formula::Implies(a, b) => {
                let a = un(a);
                Formula::Implies(a, un(b))
            }
            Formula::Iff(a, b) => {
                let a = un(a);
                Formula::Iff(a, un(b))
            }
            Formula::Until(a, b) => {
                let a = un(a);
                Formula::Until(a, un(b))
            }
            Formula::Release(a, b) => {
                let a = un(a);
                Formula::Release(a, un(b))
            }
        }
    }

    /// Replaces every primed atom by its unprimed base.
    pub fn unprime(&self) -> Formula {
        self.map_atoms(&mut |a| AtomId::plain(a.base.clone()))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(x) => write!(f, "!{x}"),
            Formula::Next(x) => write!(f, "X {x}"),
            Formula::Eventually(x) => write!(f, "F {x}"),
            Formula::Always(x) => write!(f, "G {x}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Iff(a, b) => write!(f, "({a} <-> {b})"),
            Formula::Until(a, b) => write!(f, "({a} U {b})"),
            Formula::Release(a, b) => write!(f, "({a} R {b})"),
        }
    }
}

/// Renders a formula in the surface grammar; alias for `to_string`.
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

/// The declared environment and system variables of a specification.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    pub env: Vec<String>,
    pub sys: Vec<String>,
}

impl Signature {
    pub fn new<E, S>(env: E, sys: S) -> Self
    where
        E: IntoIterator,
        E::Item: Into<String>,
        S: IntoIterator,
        S::Item: Into<String>,
    {
        Signature {
            env: env.into_iter().map(Into::into).collect(),
            sys: sys.into_iter().map(Into::into).collect(),
        }
    }

    pub fn is_env(&self, name: &str) -> bool {
        self.env.iter().any(|e| e == name)
    }

    pub fn is_sys(&self, name: &str) -> bool {
        self.sys.iter().any(|s| s == name)
    }

    pub fn env_set(&self) -> BTreeSet<String> {
        self.env.iter().cloned().collect()
    }

    pub fn sys_set(&self) -> BTreeSet<String> {
        self.sys.iter().cloned().collect()
    }

    /// Position in the combined declaration order (env first, then sys).
    pub fn decl_index(&self, name: &str) -> Option<usize> {
        self.env
            .iter()
            .chain(self.sys.iter())
            .position(|v| v == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spec {
    pub signature: Signature,
    pub formula: Formula,
}

impl Spec {
    pub fn env(&self) -> &[String] {
        &self.signature.env
    }

    pub fn sys(&self) -> &[String] {
        &self.signature.sys
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    UnexpectedToken { expected: String, found: String },
    #[error("atom `{0}` is not declared in env or sys")]
    UndeclaredAtom(String),
    #[error("variable `{0}` is declared more than once")]
    DuplicateDeclaration(String),
    #[error("variable `{0}` is declared both as env and sys")]
    EnvSysOverlap(String),
    #[error("`{0}` is a reserved word and cannot be a variable")]
    ReservedName(String),
    #[error("`{0}` is not a valid variable name")]
    InvalidName(String),
    #[error("primed atom `{0}'` is not allowed in a specification")]
    PrimedInput(String),
    #[error("missing `{0}:` section")]
    MissingSection(&'static str),
    #[error("`{0}:` section appears twice")]
    RepeatedSection(&'static str),
}

/// Parse failure with a 1-based line/column position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

const RESERVED: &[&str] = &["true", "false", "G", "F", "X", "U", "R"];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String, bool),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Globally,
    Finally,
    Next,
    Until,
    Release,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(n, false) => write!(f, "`{n}`"),
            Tok::Ident(n, true) => write!(f, "`{n}'`"),
            Tok::True => f.write_str("`true`"),
            Tok::False => f.write_str("`false`"),
            Tok::Not => f.write_str("`!`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Implies => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Globally => f.write_str("`G`"),
            Tok::Finally => f.write_str("`F`"),
            Tok::Next => f.write_str("`X`"),
            Tok::Until => f.write_str("`U`"),
            Tok::Release => f.write_str("`R`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str, first_line: usize, first_column: usize) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = first_line;
    let mut column = first_column;
    let mut chars = text.chars().peekable();
    let err = |line, column, kind| ParseError { line, column, kind };

    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        let tok = if is_ident_start(c) {
            let mut name = String::new();
            while let Some(&c) = chars.peek() {
                if !is_ident_char(c) {
                    break;
                }
                name.push(c);
                bump(&mut chars);
            }
            let primed = chars.peek() == Some(&'\'');
            if primed {
                bump(&mut chars);
            }
            match (name.as_str(), primed) {
                (_, true) if RESERVED.contains(&name.as_str()) => {
                    return Err(err(l0, c0, ParseErrorKind::ReservedName(name)));
                }
                ("true", _) => Tok::True,
                ("false", _) => Tok::False,
                ("G", _) => Tok::Globally,
                ("F", _) => Tok::Finally,
                ("X", _) => Tok::Next,
                ("U", _) => Tok::Until,
                ("R", _) => Tok::Release,
                _ => Tok::Ident(name, primed),
            }
        } else {
            bump(&mut chars);
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '!' => Tok::Not,
                '&' => {
                    if chars.peek() == Some(&'&') {
                        bump(&mut chars);
                    }
                    Tok::And
                }
                '|' => {
                    if chars.peek() == Some(&'|') {
                        bump(&mut chars);
                    }
                    Tok::Or
                }
                '-' if chars.peek() == Some(&'>') => {
                    bump(&mut chars);
                    Tok::Implies
                }
                '<' if chars.peek() == Some(&'-') => {
                    bump(&mut chars);
                    if chars.peek() != Some(&'>') {
                        return Err(err(l0, c0, ParseErrorKind::UnexpectedChar('<')));
                    }
                    bump(&mut chars);
                    Tok::Iff
                }
                other => return Err(err(l0, c0, ParseErrorKind::UnexpectedChar(other))),
            }
        };
        out.push(Spanned {
            tok,
            line: l0,
            column: c0,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

/// An atom occurrence with its source position.
#[derive(Debug, Clone)]
struct AtomSite {
    atom: AtomId,
    line: usize,
    column: usize,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    sites: Vec<AtomSite>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn advance(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            kind: ParseErrorKind::UnexpectedToken {
                expected: expected.to_string(),
                found: t.tok.to_string(),
            },
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implies()?;
        if *self.peek() == Tok::Iff {
            self.advance();
            return Ok(Formula::iff(lhs, self.iff()?));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.advance();
            return Ok(Formula::implies(lhs, self.implies()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.and()?;
        if *self.peek() == Tok::Or {
            self.advance();
            return Ok(Formula::or(lhs, self.or()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.binary_temporal()?;
        if *self.peek() == Tok::And {
            self.advance();
            return Ok(Formula::and(lhs, self.and()?));
        }
        Ok(lhs)
    }

    fn binary_temporal(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        match self.peek() {
            Tok::Until => {
                self.advance();
                Ok(Formula::until(lhs, self.binary_temporal()?))
            }
            Tok::Release => {
                self.advance();
                Ok(Formula::release(lhs, self.binary_temporal()?))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.advance();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Globally => {
                self.advance();
                Ok(Formula::always(self.unary()?))
            }
            Tok::Finally => {
                self.advance();
                Ok(Formula::eventually(self.unary()?))
            }
            Tok::Next => {
                self.advance();
                Ok(Formula::next(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::True => {
                self.advance();
                Ok(Formula::True)
            }
            Tok::False => {
                self.advance();
                Ok(Formula::False)
            }
            Tok::Ident(name, primed) => {
                let t = self.advance();
                let atom = AtomId { base: name, primed };
                self.sites.push(AtomSite {
                    atom: atom.clone(),
                    line: t.line,
                    column: t.column,
                });
                Ok(Formula::Atom(atom))
            }
            Tok::LParen => {
                self.advance();
                let f = self.iff()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.advance();
                Ok(f)
            }
            _ => Err(self.unexpected("a formula")),
        }
    }
}

fn parse_formula_at(
    text: &str,
    line: usize,
    column: usize,
) -> Result<(Formula, Vec<AtomSite>), ParseError> {
    let toks = lex(text, line, column)?;
    let mut p = Parser {
        toks,
        pos: 0,
        sites: Vec::new(),
    };
    let f = p.iff()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok((f, p.sites))
}

/// Parses a single formula. Primed atoms are accepted.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_at(text, 1, 1).map(|(f, _)| f)
}

fn check_name(name: &str, line: usize, column: usize) -> Result<(), ParseError> {
    let err = |kind| ParseError { line, column, kind };
    if RESERVED.contains(&name) {
        return Err(err(ParseErrorKind::ReservedName(name.to_string())));
    }
    if let Some(base) = name.strip_suffix('\'') {
        if !base.is_empty() && base.chars().all(is_ident_char) {
            return Err(err(ParseErrorKind::PrimedInput(base.to_string())));
        }
    }
    let mut chars = name.chars();
    let valid = chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char);
    if !valid {
        return Err(err(ParseErrorKind::InvalidName(name.to_string())));
    }
    Ok(())
}

/// Splits a header line's payload into names with their 1-based columns.
fn split_names(payload: &str, start_column: usize) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut current_col = 0;
    for (i, c) in payload.chars().enumerate() {
        if c.is_whitespace() {
            if !current.is_empty() {
                out.push((std::mem::take(&mut current), current_col));
            }
        } else {
            if current.is_empty() {
                current_col = start_column + i;
            }
            current.push(c);
        }
    }
    if !current.is_empty() {
        out.push((current, current_col));
    }
    out
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses a specification document (`env:` / `sys:` header, then `formula:`
/// running to end of file).
pub fn parse_spec(text: &str) -> Result<Spec, ParseError> {
    let mut env: Option<Vec<(String, usize, usize)>> = None;
    let mut sys: Option<Vec<(String, usize, usize)>> = None;
    let mut formula_start: Option<(usize, usize, usize)> = None;

    let mut offset = 0;
    let mut last_line = 1;
    for (idx, raw) in text.split_inclusive('\n').enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = strip_comment(raw.trim_end_matches(['\n', '\r']));
        let indent = line.len() - line.trim_start().len();
        let trimmed = line.trim_start();
        let header = |key: &str| {
            trimmed
                .strip_prefix(key)
                .map(|rest| (rest, indent + key.len() + 1))
        };
        if trimmed.trim().is_empty() {
            offset += raw.len();
            continue;
        }
        if let Some((rest, col)) = header("env:") {
            if env.is_some() {
                return Err(ParseError {
                    line: line_no,
                    column: indent + 1,
                    kind: ParseErrorKind::RepeatedSection("env"),
                });
            }
            env = Some(
                split_names(rest, col)
                    .into_iter()
                    .map(|(n, c)| (n, line_no, c))
                    .collect(),
            );
        } else if let Some((rest, col)) = header("sys:") {
            if sys.is_some() {
                return Err(ParseError {
                    line: line_no,
                    column: indent + 1,
                    kind: ParseErrorKind::RepeatedSection("sys"),
                });
            }
            sys = Some(
                split_names(rest, col)
                    .into_iter()
                    .map(|(n, c)| (n, line_no, c))
                    .collect(),
            );
        } else if header("formula:").is_some() {
            let byte = offset + raw.find("formula:").unwrap_or(0) + "formula:".len();
            formula_start = Some((byte, line_no, indent + "formula:".len() + 1));
            break;
        } else {
            return Err(ParseError {
                line: line_no,
                column: indent + 1,
                kind: ParseErrorKind::UnexpectedToken {
                    expected: "`env:`, `sys:` or `formula:`".to_string(),
                    found: format!("`{}`", trimmed.split_whitespace().next().unwrap_or("")),
                },
            });
        }
        offset += raw.len();
    }

    let eof = |kind| ParseError {
        line: last_line,
        column: 1,
        kind,
    };
    let env = env.ok_or_else(|| eof(ParseErrorKind::MissingSection("env")))?;
    let sys = sys.ok_or_else(|| eof(ParseErrorKind::MissingSection("sys")))?;
    let (byte, f_line, f_col) =
        formula_start.ok_or_else(|| eof(ParseErrorKind::MissingSection("formula")))?;

    let mut seen: BTreeMap<&str, bool> = BTreeMap::new();
    for (is_env, list) in [(true, &env), (false, &sys)] {
        for (name, line, column) in list {
            check_name(name, *line, *column)?;
            if let Some(prev_env) = seen.insert(name, is_env) {
                let kind = if prev_env != is_env {
                    ParseErrorKind::EnvSysOverlap(name.clone())
                } else {
                    ParseErrorKind::DuplicateDeclaration(name.clone())
                };
                return Err(ParseError {
                    line: *line,
                    column: *column,
                    kind,
                });
            }
        }
    }

    let (formula, sites) = parse_formula_at(&text[byte..], f_line, f_col)?;
    for site in &sites {
        if site.atom.primed {
            return Err(ParseError {
                line: site.line,
                column: site.column,
                kind: ParseErrorKind::PrimedInput(site.atom.base.clone()),
            });
        }
        if !seen.contains_key(site.atom.base.as_str()) {
            return Err(ParseError {
                line: site.line,
                column: site.column,
                kind: ParseErrorKind::UndeclaredAtom(site.atom.base.clone()),
            });
        }
    }

    Ok(Spec {
        signature: Signature {
            env: env.into_iter().map(|(n, _, _)| n).collect(),
            sys: sys.into_iter().map(|(n, _, _)| n).collect(),
        },
        formula,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectionError {
    #[error("variable `{0}` already occurs primed; it cannot be primed again")]
    AlreadyPrimed(String),
}

/// Builds the projection formula: every unprimed occurrence of a variable in
/// `vars` becomes its primed copy. Everything else is left untouched.
pub fn rename_projection(
    f: &Formula,
    vars: &BTreeSet<String>,
) -> Result<Formula, ProjectionError> {
    if let Some(a) = f.atoms().iter().find(|a| a.primed && vars.contains(&a.base)) {
        return Err(ProjectionError::AlreadyPrimed(a.base.clone()));
    }
    Ok(f.map_atoms(&mut |a| {
        if !a.primed && vars.contains(&a.base) {
            a.to_primed()
        } else {
            a.clone()
        }
    }))
}

/// `f & G (z <-> z')`. Never deduplicates: locking twice adds two conjuncts.
pub fn lock_conjunct(f: Formula, z: &str) -> Formula {
    Formula::and(
        f,
        Formula::always(Formula::iff(Formula::atom(z), Formula::primed(z))),
    )
}

/// The dependence query `φ'_W & φ'_Y & !φ`.
pub fn dependence_query(
    phi: &Formula,
    w: &BTreeSet<String>,
    y: &BTreeSet<String>,
) -> Result<Formula, ProjectionError> {
    Ok(Formula::and(
        rename_projection(phi, w)?,
        Formula::and(rename_projection(phi, y)?, Formula::not(phi.clone())),
    ))
}
