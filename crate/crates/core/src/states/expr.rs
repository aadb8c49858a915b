//! Text form of creation-operator products.
//!
//! ```text
//! # comments run to end of line
//! modes: a, b                      # optional; otherwise modes are implicit
//! w  = exp(i*2/3*pi)
//! w2 = exp(i*4/3*pi)
//! c  = sqrt(1/2)*a + sqrt(1/2)*b   # derived mode
//! (aH + aV)(aH + w*aV)(cH + w2*cV)
//! ```
//!
//! A term is an optional `*`-separated product of coefficient atoms followed
//! by a mode identifier with a trailing `H` or `V`. Atoms are decimals
//! (optionally suffixed `i`), `i`, `p/q`, `sqrt(p/q)`, `exp(±i*p/q*pi)` and
//! named constants.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::Pol;
use crate::{Complex64, Error, Result};

const UNIT_NORM_TOL: f64 = 1e-12;

/// Named constants plus hidden-mode definitions.
#[derive(Clone, Debug, Default)]
pub struct ModeTable {
    primitives: Vec<String>,
    declared: bool,
    derived: BTreeMap<String, Vec<(Complex64, usize)>>,
    constants: BTreeMap<String, Complex64>,
}

impl ModeTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// A table that accepts exactly the listed primitive modes.
    pub fn with_primitives<S: AsRef<str>>(names: &[S]) -> Self {
        let mut t = Self::new();
        t.declare_primitives(names.iter().map(|s| s.as_ref().to_string()));
        t
    }

    pub fn declare_primitives(&mut self, names: impl IntoIterator<Item = String>) {
        self.declared = true;
        for n in names {
            if !self.primitives.contains(&n) {
                self.primitives.push(n);
            }
        }
    }

    pub fn primitives(&self) -> &[String] {
        &self.primitives
    }

    pub fn constant(&self, name: &str) -> Option<Complex64> {
        self.constants.get(name).copied()
    }

    pub fn define_constant(&mut self, name: &str, value: Complex64) -> Result<()> {
        self.check_free(name)?;
        self.constants.insert(name.to_string(), value);
        Ok(())
    }

    /// Defines `name = Σ cₖ·modeₖ`. References to other derived modes are
    /// expanded; the result must have unit norm.
    pub fn define_mode(&mut self, name: &str, terms: &[(Complex64, String)]) -> Result<()> {
        self.check_free(name)?;
        let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
        for (coef, target) in terms {
            for (c, idx) in self.expand_mode(target)? {
                *acc.entry(idx).or_default() += coef * c;
            }
        }
        let norm_sq: f64 = acc.values().map(|c| c.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NonUnitMode {
                name: name.to_string(),
                norm_sq,
            });
        }
        let expansion = acc.into_iter().map(|(i, c)| (c, i)).collect();
        self.derived.insert(name.to_string(), expansion);
        Ok(())
    }

    fn check_free(&self, name: &str) -> Result<()> {
        if self.constants.contains_key(name)
            || self.derived.contains_key(name)
            || self.primitives.iter().any(|p| p == name)
        {
            return Err(Error::Invalid(format!("`{name}` is defined twice")));
        }
        Ok(())
    }

    /// Primitive expansion of a mode identifier, registering implicit
    /// primitives when none were declared.
    fn expand_mode(&mut self, name: &str) -> Result<Vec<(Complex64, usize)>> {
        if let Some(e) = self.derived.get(name) {
            return Ok(e.clone());
        }
        if let Some(i) = self.primitives.iter().position(|p| p == name) {
            return Ok(vec![(Complex64::new(1.0, 0.0), i)]);
        }
        if self.declared || self.constants.contains_key(name) {
            return Err(Error::UnknownIdentifier(name.to_string()));
        }
        self.primitives.push(name.to_string());
        Ok(vec![(Complex64::new(1.0, 0.0), self.primitives.len() - 1)])
    }
}

/// One monomial `coef · mode†_pol` over a primitive mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub coef: Complex64,
    pub pol: Pol,
    pub mode: usize,
}

/// A linear combination of single-photon creation operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub terms: Vec<Term>,
}

/// `prefactor · Π factors`, every factor creating one photon.
#[derive(Clone, Debug, PartialEq)]
pub struct CreationOperatorExpression {
    pub prefactor: Complex64,
    pub factors: Vec<Factor>,
    /// Primitive hidden modes, indexed by [`Term::mode`].
    pub modes: Vec<String>,
}

impl CreationOperatorExpression {
    pub fn photon_number(&self) -> usize {
        self.factors.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Num(f64),
    Imag(f64),
    Ident(String),
}

fn lex(text: &str, base: usize) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        let pos = base + i;
        let single = match ch {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, pos));
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let save = i;
                i += 1;
                if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                    i += 1;
                }
                if i < bytes.len() && bytes[i].is_ascii_digit() {
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let value: f64 = text[start..i].parse().map_err(|_| Error::Syntax {
                pos,
                msg: format!("bad number `{}`", &text[start..i]),
            })?;
            let imag = i < bytes.len()
                && bytes[i] == b'i'
                && !bytes
                    .get(i + 1)
                    .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_');
            if imag {
                i += 1;
                out.push((Tok::Imag(value), pos));
            } else {
                out.push((Tok::Num(value), pos));
            }
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), pos));
        } else {
            return Err(Error::Syntax {
                pos,
                msg: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    table: &'a ModeTable,
}

/// A parsed term before its terminal identifier is interpreted.
struct RawTerm {
    coef: Complex64,
    terminal: Option<(String, usize)>,
}

impl<'a> Parser<'a> {
    fn new(text: &str, base: usize, table: &'a ModeTable) -> Result<Self> {
        Ok(Self {
            toks: lex(text, base)?,
            at: 0,
            end: base + text.len(),
            table,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.at + k).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn err<X>(&self, msg: impl Into<String>) -> Result<X> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    fn number(&mut self) -> Result<f64> {
        match self.peek() {
            Some(Tok::Num(x)) => {
                let x = *x;
                self.at += 1;
                Ok(x)
            }
            _ => self.err("expected a number"),
        }
    }

    /// `['-'] number ['/' number]`
    fn rational(&mut self) -> Result<f64> {
        let neg = self.peek() == Some(&Tok::Minus);
        if neg {
            self.at += 1;
        }
        let mut x = self.number()?;
        if self.peek() == Some(&Tok::Slash) {
            self.at += 1;
            let d = self.number()?;
            if d == 0.0 {
                return self.err("division by zero");
            }
            x /= d;
        }
        Ok(if neg { -x } else { x })
    }

    fn ident_is(&self, k: usize, name: &str) -> bool {
        matches!(self.peek_at(k), Some(Tok::Ident(s)) if s == name)
    }

    fn atom(&mut self) -> Result<Complex64> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(_)) => Ok(Complex64::new(self.rational()?, 0.0)),
            Some(Tok::Imag(y)) => {
                self.at += 1;
                Ok(Complex64::new(0.0, y))
            }
            Some(Tok::Ident(name)) if name == "i" => {
                self.at += 1;
                Ok(Complex64::new(0.0, 1.0))
            }
            Some(Tok::Ident(name)) if name == "sqrt" && self.peek_at(1) == Some(&Tok::LParen) => {
                self.at += 2;
                let x = self.rational()?;
                self.expect(Tok::RParen, "`)` closing sqrt")?;
                if x < 0.0 {
                    return Err(Error::Syntax {
                        pos,
                        msg: "sqrt of a negative number".into(),
                    });
                }
                Ok(Complex64::new(x.sqrt(), 0.0))
            }
            Some(Tok::Ident(name)) if name == "exp" && self.peek_at(1) == Some(&Tok::LParen) => {
                self.at += 2;
                let sign = if self.peek() == Some(&Tok::Minus) {
                    self.at += 1;
                    -1.0
                } else {
                    1.0
                };
                if !self.ident_is(0, "i") {
                    return self.err("expected `i` in exp(i*…*pi)");
                }
                self.at += 1;
                self.expect(Tok::Star, "`*`")?;
                let r = if self.ident_is(0, "pi") {
                    1.0
                } else {
                    let r = self.rational()?;
                    self.expect(Tok::Star, "`*`")?;
                    r
                };
                if !self.ident_is(0, "pi") {
                    return self.err("expected `pi`");
                }
                self.at += 1;
                self.expect(Tok::RParen, "`)` closing exp")?;
                Ok(Complex64::from_polar(1.0, sign * r * PI))
            }
            Some(Tok::Ident(name)) => match self.table.constant(&name) {
                Some(v) => {
                    self.at += 1;
                    Ok(v)
                }
                None => Err(Error::UnknownIdentifier(name)),
            },
            _ => self.err("expected a coefficient or mode"),
        }
    }

    /// `atom ('*' atom)* ['*' terminal] | terminal`
    fn term(&mut self) -> Result<RawTerm> {
        let mut coef = Complex64::new(1.0, 0.0);
        loop {
            if let Some(Tok::Ident(name)) = self.peek().cloned() {
                let is_terminal = !matches!(self.peek_at(1), Some(Tok::Star) | Some(Tok::LParen))
                    && name != "i"
                    && self.table.constant(&name).is_none();
                if is_terminal {
                    let pos = self.pos();
                    self.at += 1;
                    return Ok(RawTerm {
                        coef,
                        terminal: Some((name, pos)),
                    });
                }
            }
            coef *= self.atom()?;
            if self.peek() == Some(&Tok::Star) {
                self.at += 1;
            } else {
                return Ok(RawTerm { coef, terminal: None });
            }
        }
    }

    /// `['-'] term (('+'|'-') term)*`, stopping before `)` or end.
    fn sum(&mut self) -> Result<Vec<RawTerm>> {
        let mut terms = Vec::new();
        let mut sign = 1.0;
        if self.peek() == Some(&Tok::Minus) {
            self.at += 1;
            sign = -1.0;
        } else if self.peek() == Some(&Tok::Plus) {
            self.at += 1;
        }
        loop {
            let mut t = self.term()?;
            t.coef *= sign;
            terms.push(t);
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    sign = 1.0;
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    sign = -1.0;
                }
                _ => return Ok(terms),
            }
        }
    }
}

fn split_pol(name: &str, pos: usize) -> Result<(&str, Pol)> {
    let (mode, pol) = if let Some(m) = name.strip_suffix('H') {
        (m, Pol::H)
    } else if let Some(m) = name.strip_suffix('V') {
        (m, Pol::V)
    } else {
        return Err(Error::Syntax {
            pos,
            msg: format!("`{name}` must end in a polarization H or V"),
        });
    };
    if mode.is_empty() {
        return Err(Error::Syntax {
            pos,
            msg: "missing mode identifier before polarization".into(),
        });
    }
    Ok((mode, pol))
}

fn parse_expression_at(text: &str, table: &ModeTable) -> Result<CreationOperatorExpression> {
    let mut parser = Parser::new(text, 0, table)?;
    let mut local = table.clone();
    let mut prefactor = Complex64::new(1.0, 0.0);
    if parser.at_end() {
        return parser.err("empty expression");
    }
    while parser.peek() != Some(&Tok::LParen) {
        prefactor *= parser.atom()?;
        if parser.peek() == Some(&Tok::Star) {
            parser.at += 1;
        }
        if parser.at_end() {
            return parser.err("expected `(`");
        }
    }
    let mut factors = Vec::new();
    while !parser.at_end() {
        parser.expect(Tok::LParen, "`(`")?;
        let raw = parser.sum()?;
        parser.expect(Tok::RParen, "`)`")?;
        let mut merged: Vec<Term> = Vec::new();
        for t in raw {
            let Some((name, pos)) = t.terminal else {
                return Err(Error::Syntax {
                    pos: parser.pos(),
                    msg: "term has no mode".into(),
                });
            };
            let (mode, pol) = split_pol(&name, pos)?;
            for (c, idx) in local.expand_mode(mode)? {
                let coef = t.coef * c;
                match merged.iter_mut().find(|m| m.mode == idx && m.pol == pol) {
                    Some(m) => m.coef += coef,
                    None => merged.push(Term { coef, pol, mode: idx }),
                }
            }
        }
        factors.push(Factor { terms: merged });
        if parser.peek() == Some(&Tok::Star) {
            parser.at += 1;
        }
    }
    Ok(CreationOperatorExpression {
        prefactor,
        factors,
        modes: local.primitives,
    })
}

/// Parses a bare product such as `(aH + aV)(aH + w*aV)` against `modes`.
pub fn parse_operator_expression(text: &str, modes: &ModeTable) -> Result<CreationOperatorExpression> {
    parse_expression_at(text, modes)
}

/// A parsed expression file: definitions and the product they qualify.
#[derive(Clone, Debug)]
pub struct Source {
    pub table: ModeTable,
    pub expression: CreationOperatorExpression,
}

fn parse_definition(line: &str, base: usize, table: &mut ModeTable) -> Result<()> {
    let eq = line.find('=').expect("caller checked for `=`");
    let name = line[..eq].trim();
    let valid_name = !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !name.starts_with(|c: char| c.is_ascii_digit());
    if !valid_name {
        return Err(Error::Syntax {
            pos: base,
            msg: format!("bad definition name `{name}`"),
        });
    }
    let rhs_base = base + eq + 1;
    let mut parser = Parser::new(&line[eq + 1..], rhs_base, table)?;
    if parser.at_end() {
        return parser.err("empty definition");
    }
    let terms = parser.sum()?;
    if !parser.at_end() {
        return parser.err("unexpected trailing input");
    }
    let n_modes = terms.iter().filter(|t| t.terminal.is_some()).count();
    if n_modes == 0 {
        let value = terms.iter().map(|t| t.coef).sum();
        table.define_constant(name, value)
    } else if n_modes == terms.len() {
        let combo: Vec<(Complex64, String)> = terms
            .into_iter()
            .map(|t| (t.coef, t.terminal.expect("checked").0))
            .collect();
        table.define_mode(name, &combo)
    } else {
        Err(Error::Syntax {
            pos: rhs_base,
            msg: "definition mixes constants and modes".into(),
        })
    }
}

/// Parses a whole expression file: `modes:` declarations, `name = …`
/// definitions and the operator product. Error positions are byte offsets
/// into `text`.
/// Splits a source into its definition lines, applied to `table`, and the
/// remaining product text with definition lines blanked out.
fn split_source(text: &str, table: &mut ModeTable) -> Result<String> {
    // definition lines are blanked so positions in the product stay valid
    let mut expr_text = String::with_capacity(text.len());
    let mut offset = 0;
    for raw_line in text.split_inclusive('\n') {
        let content = raw_line.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        let mut kept = 0;
        if let Some(rest) = trimmed.strip_prefix("modes:") {
            table.declare_primitives(rest.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()));
        } else if content.contains('=') {
            parse_definition(content, offset, table)?;
        } else {
            expr_text.push_str(content);
            kept = content.len();
        }
        expr_text.extend(std::iter::repeat_n(' ', raw_line.len() - kept));
        offset += raw_line.len();
    }
    Ok(expr_text)
}

pub fn parse_source(text: &str, extra: Option<&ModeTable>) -> Result<Source> {
    let mut table = extra.cloned().unwrap_or_default();
    let expr_text = split_source(text, &mut table)?;
    if expr_text.trim().is_empty() {
        return Err(Error::Syntax {
            pos: text.len(),
            msg: "no operator expression found".into(),
        });
    }
    let expression = parse_expression_at(&expr_text, &table)?;
    Ok(Source { table, expression })
}

/// Reads a file of `modes:` and definition lines only.
pub fn parse_definitions(text: &str) -> Result<ModeTable> {
    let mut table = ModeTable::default();
    let rest = split_source(text, &mut table)?;
    if let Some(pos) = rest.find(|c: char| !c.is_whitespace()) {
        return Err(Error::Syntax {
            pos,
            msg: "expected only definitions".into(),
        });
    }
    Ok(table)
}
