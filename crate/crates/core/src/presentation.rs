//! Group presentations: freely reduced words, commutator sugar and the
//! presentation file grammar.
//!
//! ```text
//! gens: x, y; rels: x^3, y^3, [x,y]^3, [x,y,x], [x,y,y]; p: 3
//! ```
//!
//! Commutators follow `[x, y] = x^-1 y^-1 x y` and nest to the left, so
//! `[a, b, c]` is `[[a, b], c]`. A relation may also be written `lhs = rhs`,
//! which is stored as the relator `lhs rhs^-1`. `#` starts a comment.

use std::fmt;

use crate::error::ParseError;
use crate::util::{is_prime, prime_power_base};

/// A freely reduced word over generator indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    factors: Vec<(usize, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(index: usize) -> Self {
        Word {
            factors: vec![(index, 1)],
        }
    }

    pub fn power_of(index: usize, exponent: i64) -> Self {
        let mut w = Word::identity();
        w.push(index, exponent);
        w
    }

    /// Builds a word from arbitrary factors, reducing as it goes.
    pub fn from_factors(factors: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut w = Word::identity();
        for (g, e) in factors {
            w.push(g, e);
        }
        w
    }

    pub fn factors(&self) -> &[(usize, i64)] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of letters once every power is written out.
    pub fn letter_len(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    /// Appends `g^e`, merging with the last factor and cancelling.
    pub fn push(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        match self.factors.last_mut() {
            Some(last) if last.0 == g => {
                last.1 += e;
                if last.1 == 0 {
                    self.factors.pop();
                }
            }
            _ => self.factors.push((g, e)),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(g, e) in &other.factors {
            w.push(g, e);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word {
            factors: self.factors.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        if k == 0 || self.is_identity() {
            return Word::identity();
        }
        if self.factors.len() == 1 {
            let (g, e) = self.factors[0];
            return Word::power_of(g, e * k);
        }
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.inverse().mul(&b.inverse()).mul(a).mul(b)
    }

    /// Left-normed commutator `[w1, w2, ..., wn] = [[w1, w2], ..., wn]`.
    pub fn left_normed(words: &[Word]) -> Word {
        let mut iter = words.iter();
        let Some(first) = iter.next() else {
            return Word::identity();
        };
        iter.fold(first.clone(), |acc, w| Word::commutator(&acc, w))
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.factors.iter().map(|&(g, _)| g).max()
    }

    /// Letters as `(generator, inverted)` pairs.
    pub fn letters(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.factors
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n((g, e < 0), e.unsigned_abs() as usize))
    }

    /// Renders the word with generator names, `1` for the identity.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (k, &(g, e)) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "g{g}")?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.factors.is_empty() {
            return write!(f, "1");
        }
        for (k, &(g, e)) in self.word.factors.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            match self.names.get(g) {
                Some(name) => write!(f, "{name}")?,
                None => write!(f, "g{g}")?,
            }
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Generators, relators and the prime the group is studied at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generator_names: Vec<String>,
    relators: Vec<Word>,
    prime: u64,
}

impl Presentation {
    pub fn new(generator_names: Vec<String>, relators: Vec<Word>, prime: u64) -> Result<Self, ParseError> {
        for (k, name) in generator_names.iter().enumerate() {
            if generator_names[..k].contains(name) {
                return Err(ParseError::DuplicateGenerator(name.clone()));
            }
        }
        for r in &relators {
            if let Some(g) = r.max_generator() {
                if g >= generator_names.len() {
                    return Err(ParseError::UnknownGenerator {
                        name: format!("g{g}"),
                        position: 0,
                    });
                }
            }
        }
        if !is_prime(prime) {
            return Err(ParseError::NotPrime(prime));
        }
        let relators = relators.into_iter().filter(|r| !r.is_identity()).collect();
        Ok(Presentation {
            generator_names,
            relators,
            prime,
        })
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn generator_count(&self) -> usize {
        self.generator_names.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn with_prime(mut self, prime: u64) -> Result<Self, ParseError> {
        if !is_prime(prime) {
            return Err(ParseError::NotPrime(prime));
        }
        self.prime = prime;
        Ok(self)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens: {}; rels: ", self.generator_names.join(", "))?;
        for (k, r) in self.relators.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", r.display_with(&self.generator_names))?;
        }
        write!(f, "; p: {}", self.prime)
    }
}

/// Parses a presentation file.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        names: Vec::new(),
        end: text.len(),
    };
    parser.file()
}

/// Expands sugared word syntax (`[x,y,y]`, `(x y)^3`, `x^-1`) over the given
/// generator names.
pub fn expand_word(text: &str, names: &[String]) -> Result<Word, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        names: names.to_vec(),
        end: text.len(),
    };
    let w = parser.word()?;
    parser.expect_end()?;
    Ok(w)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Punct(char),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let value = text[start..i].parse::<u64>().map_err(|_| ParseError::Syntax {
                position: start,
                message: "integer literal too large".into(),
            })?;
            out.push((Tok::Int(value), start));
        } else if ":;,^[]()=*-+".contains(c) {
            out.push((Tok::Punct(c), i));
            i += 1;
        } else {
            // non-ASCII or stray symbol
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(ParseError::Syntax {
                position: i,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    names: Vec<String>,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |&(_, p)| p)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.position(),
            message: message.into(),
        })
    }

    fn is_punct(&self, c: char) -> bool {
        matches!(self.peek(), Some(Tok::Punct(d)) if *d == c)
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.is_punct(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            self.syntax(format!("expected `{c}`"))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                self.expect_punct(':')
            }
            _ => self.syntax(format!("expected `{kw}:`")),
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.pos < self.tokens.len() {
            self.syntax("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn file(&mut self) -> Result<Presentation, ParseError> {
        self.expect_keyword("gens")?;
        if !self.is_punct(';') {
            loop {
                let position = self.position();
                let name = match self.peek() {
                    Some(Tok::Ident(s)) => s.clone(),
                    _ => return self.syntax("expected generator name"),
                };
                self.pos += 1;
                if self.names.contains(&name) {
                    let _ = position;
                    return Err(ParseError::DuplicateGenerator(name));
                }
                self.names.push(name);
                if !self.eat_punct(',') {
                    break;
                }
            }
        }
        self.expect_punct(';')?;
        self.expect_keyword("rels")?;

        let mut relators = Vec::new();
        let mut power_orders = Vec::new();
        let at_clause_end = |p: &Parser| p.pos >= p.tokens.len() || p.is_punct(';');
        if !at_clause_end(self) {
            loop {
                let (rel, order) = self.relation()?;
                relators.push(rel);
                power_orders.extend(order);
                if !self.eat_punct(',') {
                    break;
                }
            }
        }

        let mut prime = None;
        if self.eat_punct(';') {
            if let Some(Tok::Ident(s)) = self.peek() {
                if s == "p" {
                    self.expect_keyword("p")?;
                    let position = self.position();
                    match self.peek() {
                        Some(Tok::Int(v)) => {
                            let v = *v;
                            self.pos += 1;
                            if !is_prime(v) {
                                let _ = position;
                                return Err(ParseError::NotPrime(v));
                            }
                            prime = Some(v);
                        }
                        _ => return self.syntax("expected prime after `p:`"),
                    }
                    self.eat_punct(';');
                }
            }
        }
        self.expect_end()?;

        let prime = match prime {
            Some(p) => p,
            None => infer_prime(&power_orders).ok_or(ParseError::AmbiguousPrime)?,
        };
        Presentation::new(std::mem::take(&mut self.names), relators, prime)
    }

    /// A relator, optionally written as `lhs = rhs`. Also returns the exponent
    /// when the whole relation is a single `atom^n`.
    fn relation(&mut self) -> Result<(Word, Option<u64>), ParseError> {
        let start = self.pos;
        let lhs = self.word()?;
        let single_power = if self.pos == start + 3 || self.pos == start + 4 {
            self.single_power_exponent(start)
        } else {
            self.bracketed_power_exponent(start)
        };
        if self.eat_punct('=') {
            let rhs = self.word()?;
            return Ok((lhs.mul(&rhs.inverse()), None));
        }
        Ok((lhs, single_power))
    }

    /// `name ^ n` or `name ^ - n` spanning exactly the tokens from `start`.
    fn single_power_exponent(&self, start: usize) -> Option<u64> {
        let toks: Vec<&Tok> = self.tokens[start..self.pos].iter().map(|(t, _)| t).collect();
        match toks.as_slice() {
            [Tok::Ident(_), Tok::Punct('^'), Tok::Int(n)] => Some(*n),
            [Tok::Ident(_), Tok::Punct('^'), Tok::Punct('-' | '+'), Tok::Int(n)] => Some(*n),
            _ => None,
        }
    }

    /// `[...]^n` or `(...)^n` covering the whole relation.
    fn bracketed_power_exponent(&self, start: usize) -> Option<u64> {
        let toks: Vec<&Tok> = self.tokens[start..self.pos].iter().map(|(t, _)| t).collect();
        let (open, close) = match toks.first() {
            Some(Tok::Punct('[')) => ('[', ']'),
            Some(Tok::Punct('(')) => ('(', ')'),
            _ => return None,
        };
        let mut depth = 0i32;
        let mut close_at = None;
        for (k, t) in toks.iter().enumerate() {
            match t {
                Tok::Punct(c) if *c == open => depth += 1,
                Tok::Punct(c) if *c == close => {
                    depth -= 1;
                    if depth == 0 {
                        close_at = Some(k);
                        break;
                    }
                }
                _ => {}
            }
        }
        let tail = &toks[close_at? + 1..];
        match tail {
            [Tok::Punct('^'), Tok::Int(n)] => Some(*n),
            [Tok::Punct('^'), Tok::Punct('-' | '+'), Tok::Int(n)] => Some(*n),
            _ => None,
        }
    }

    fn starts_term(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_)) | Some(Tok::Punct('[')) | Some(Tok::Punct('(')) | Some(Tok::Int(1))
        )
    }

    fn word(&mut self) -> Result<Word, ParseError> {
        if !self.starts_term() {
            return self.syntax("expected a word");
        }
        let mut w = self.term()?;
        while self.eat_punct('*') || self.starts_term() {
            let t = self.term()?;
            w = w.mul(&t);
        }
        Ok(w)
    }

    fn term(&mut self) -> Result<Word, ParseError> {
        let atom = self.atom()?;
        if self.eat_punct('^') {
            let position = self.position();
            let negative = if self.eat_punct('-') {
                true
            } else {
                self.eat_punct('+');
                false
            };
            let value = match self.peek() {
                Some(Tok::Int(v)) => *v,
                _ => return self.syntax("expected integer exponent"),
            };
            self.pos += 1;
            if value == 0 {
                return Err(ParseError::ZeroExponent { position });
            }
            let value = i64::try_from(value).map_err(|_| ParseError::Syntax {
                position,
                message: "exponent out of range".into(),
            })?;
            let e = if negative { -value } else { value };
            return Ok(atom.pow(e));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<Word, ParseError> {
        let position = self.position();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match self.names.iter().position(|n| *n == name) {
                    Some(g) => Ok(Word::generator(g)),
                    None => Err(ParseError::UnknownGenerator { name, position }),
                }
            }
            Some(Tok::Int(1)) => {
                self.pos += 1;
                Ok(Word::identity())
            }
            Some(Tok::Punct('(')) => {
                self.pos += 1;
                let w = self.word()?;
                self.expect_punct(')')?;
                Ok(w)
            }
            Some(Tok::Punct('[')) => {
                self.pos += 1;
                let mut parts = vec![self.word()?];
                while self.eat_punct(',') {
                    parts.push(self.word()?);
                }
                if parts.len() < 2 {
                    return self.syntax("commutator needs at least two entries");
                }
                self.expect_punct(']')?;
                Ok(Word::left_normed(&parts))
            }
            _ => self.syntax("expected generator, `1`, `(` or `[`"),
        }
    }
}

/// The prime implied by pure power relators: the gcd of their exponents must
/// be a prime power.
fn infer_prime(orders: &[u64]) -> Option<u64> {
    let g = orders.iter().filter(|&&n| n >= 2).fold(0u64, |acc, &n| gcd(acc, n));
    if g < 2 {
        return None;
    }
    prime_power_base(g)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
