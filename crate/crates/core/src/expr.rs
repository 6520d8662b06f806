//! The text form of BP_*, Gamma and cobar elements (grammar-v1).
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := part ('(x)' part)*
//! part   := factor (['*'] factor)*
//! factor := int ['/' int] | v<k> ['^' int] | h<k> ['^' int] | '(' expr ')'
//!         | i[<n>] | x[<n>]
//! ```
//!
//! A module generator may only appear in the last part of a term, next to v's.
//! Terms without one are pure tensors over the formal target.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{AlgebraConfig, Exps, GammaElement, Mono, MAX_GENS};
use crate::cobar::Comodule;
use crate::error::Error;
use crate::plocal::{is_p_local, PLocal, Rational};
use crate::tensor::{CobarElement, Target, Word};

pub const GRAMMAR_VERSION: &str = "grammar-v1";

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Gen(char, usize),
    Module(char, u32),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
    Tensor,
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, Error> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |mut j: usize| {
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    let skip_ws = |mut j: usize| {
        while j < b.len() && b[j].is_ascii_whitespace() {
            j += 1;
        }
        j
    };
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b')' => Tok::Close,
            b'(' => {
                let j = skip_ws(i + 1);
                if j < b.len() && b[j] == b'x' {
                    let k = skip_ws(j + 1);
                    if k < b.len() && b[k] == b')' {
                        i = k + 1;
                        out.push((start, Tok::Tensor));
                        continue;
                    }
                }
                Tok::Open
            }
            b'0'..=b'9' => {
                let j = digits(i);
                let n: BigInt = s[i..j].parse().unwrap();
                i = j;
                out.push((start, Tok::Int(n)));
                continue;
            }
            b'v' | b'h' if i + 1 < b.len() && b[i + 1].is_ascii_digit() => {
                let j = digits(i + 1);
                let k: usize = s[i + 1..j]
                    .parse()
                    .map_err(|_| Error::UnknownGenerator(s[i..j].to_string()))?;
                i = j;
                out.push((start, Tok::Gen(c as char, k)));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut j = i;
                while j < b.len() && (b[j].is_ascii_alphanumeric() || b[j] == b'_') {
                    j += 1;
                }
                let word = &s[i..j];
                if (word == "i" || word == "x") && j < b.len() && b[j] == b'[' {
                    let k = digits(j + 1);
                    if k == j + 1 || k >= b.len() || b[k] != b']' {
                        return Err(err(j + 1, "expected a degree inside [ ]"));
                    }
                    let n: u32 = s[j + 1..k]
                        .parse()
                        .map_err(|_| err(j + 1, "module degree too large"))?;
                    i = k + 1;
                    out.push((start, Tok::Module(c as char, n)));
                    continue;
                }
                return Err(Error::UnknownGenerator(word.to_string()));
            }
            _ => return Err(err(i, format!("unexpected character '{}'", c as char))),
        };
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

/// A part: a sum of monomials, possibly multiplied by a module generator.
#[derive(Clone, Debug)]
struct Part {
    terms: BTreeMap<Mono, Rational>,
    target: Option<Target>,
}

impl Part {
    fn scalar(q: Rational) -> Part {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Mono::ONE, q);
        }
        Part { terms, target: None }
    }

    fn mul(&self, o: &Part, at: usize) -> Result<Part, Error> {
        let target = match (self.target, o.target) {
            (Some(_), Some(_)) => return Err(err(at, "two module generators in one part")),
            (a, b) => a.or(b),
        };
        let mut terms: BTreeMap<Mono, Rational> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = checked_mul(m1, m2).ok_or_else(|| err(at, "exponent overflow"))?;
                let e = terms.entry(m).or_insert_with(Rational::zero);
                *e += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Part { terms, target })
    }
}

fn checked_mul(a: &Mono, b: &Mono) -> Option<Mono> {
    let add = |x: &Exps, y: &Exps| -> Option<Exps> {
        let mut r = Exps::ZERO;
        for i in 0..MAX_GENS {
            r.0[i] = x.0[i].checked_add(y.0[i])?;
        }
        Some(r)
    };
    Some(Mono::new(add(&a.v, &b.v)?, add(&a.h, &b.h)?))
}

/// Raw words with rational coefficients.
type Sum = BTreeMap<Word, Rational>;

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    cfg: &'a AlgebraConfig,
    p: u64,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Sum, Error> {
        let mut out = Sum::new();
        let mut sign = Rational::one();
        match self.peek() {
            Some(Tok::Plus) => {
                self.pos += 1;
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                sign = -sign;
            }
            _ => {}
        }
        loop {
            for (w, c) in self.term()? {
                let e = out.entry(w).or_insert_with(Rational::zero);
                *e += c * &sign;
            }
            match self.peek() {
                Some(Tok::Plus) => sign = Rational::one(),
                Some(Tok::Minus) => sign = -Rational::one(),
                _ => break,
            }
            self.pos += 1;
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    fn term(&mut self) -> Result<Sum, Error> {
        let mut parts = vec![(self.offset(), self.part()?)];
        while self.peek() == Some(&Tok::Tensor) {
            self.pos += 1;
            parts.push((self.offset(), self.part()?));
        }
        for (at, p) in &parts[..parts.len() - 1] {
            if p.target.is_some() {
                return Err(err(*at, "a module generator must be in the last part"));
            }
        }
        let (last_at, last) = parts.last().unwrap().clone();
        let (slot_parts, tail): (&[(usize, Part)], Option<(Vec<(Exps, Rational)>, Target)>) = match last.target {
            Some(t) => {
                let mut tv = Vec::new();
                for (m, c) in &last.terms {
                    if !m.h.is_zero() {
                        return Err(err(last_at, "only v's may multiply a module generator"));
                    }
                    tv.push((m.v, c.clone()));
                }
                (&parts[..parts.len() - 1], Some((tv, t)))
            }
            None => (&parts[..], None),
        };
        let mut acc: Vec<(Vec<Mono>, Rational)> = vec![(Vec::new(), Rational::one())];
        for (_, p) in slot_parts {
            let mut next = Vec::new();
            for (slots, c) in &acc {
                for (m, c2) in &p.terms {
                    let mut s = slots.clone();
                    s.push(*m);
                    next.push((s, c * c2));
                }
            }
            acc = next;
        }
        let mut out = Sum::new();
        let tails = match &tail {
            Some((tv, t)) => tv.iter().map(|(e, c)| (*e, c.clone(), *t)).collect(),
            None => vec![(Exps::ZERO, Rational::one(), Target::Formal)],
        };
        for (slots, c) in acc {
            for (tv, c2, t) in &tails {
                let w = Word::new(slots.clone(), *tv, *t);
                let d = w.degree(self.cfg);
                if d > self.cfg.degree_cap {
                    return Err(Error::DegreeOverflow {
                        degree: d,
                        cap: self.cfg.degree_cap,
                    });
                }
                let e = out.entry(w).or_insert_with(Rational::zero);
                *e += &c * c2;
            }
        }
        Ok(out)
    }

    fn starts_factor(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Int(_) | Tok::Gen(..) | Tok::Open | Tok::Module(..) | Tok::Star)
        )
    }

    fn part(&mut self) -> Result<Part, Error> {
        let mut acc = Part::scalar(Rational::one());
        let mut any = false;
        while self.starts_factor() {
            if self.peek() == Some(&Tok::Star) {
                if !any {
                    return Err(err(self.offset(), "'*' without a left operand"));
                }
                self.pos += 1;
            }
            let at = self.offset();
            let f = self.factor()?;
            acc = acc.mul(&f, at)?;
            any = true;
        }
        if !any {
            return Err(err(self.offset(), "expected a term"));
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<u16, Error> {
        if self.peek() != Some(&Tok::Caret) {
            return Ok(1);
        }
        self.pos += 1;
        let at = self.offset();
        match self.next() {
            Some(Tok::Int(n)) => {
                let e: u16 = (&n).try_into().map_err(|_| Error::DegreeOverflow {
                    degree: u32::MAX,
                    cap: self.cfg.degree_cap,
                })?;
                if e == 0 {
                    return Err(err(at, "exponents must be at least 1"));
                }
                Ok(e)
            }
            _ => Err(err(at, "expected an exponent")),
        }
    }

    fn factor(&mut self) -> Result<Part, Error> {
        let at = self.offset();
        match self.next() {
            Some(Tok::Int(n)) => {
                let mut q = Rational::from_integer(n);
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    let at2 = self.offset();
                    match self.next() {
                        Some(Tok::Int(d)) if !d.is_zero() => q /= Rational::from_integer(d),
                        Some(Tok::Int(_)) => return Err(Error::DivisionByZero),
                        _ => return Err(err(at2, "expected a denominator")),
                    }
                }
                if !is_p_local(&q, self.p) {
                    return Err(Error::PLocalityViolation(q.to_string()));
                }
                Ok(Part::scalar(q))
            }
            Some(Tok::Gen(kind, k)) => {
                if k == 0 || k > self.cfg.k {
                    return Err(Error::UnknownGenerator(format!("{kind}{k}")));
                }
                let e = self.exponent()?;
                let m = if kind == 'v' { Mono::v(k, e) } else { Mono::h(k, e) };
                if m.degree(self.cfg) > self.cfg.degree_cap {
                    return Err(Error::DegreeOverflow {
                        degree: m.degree(self.cfg),
                        cap: self.cfg.degree_cap,
                    });
                }
                let mut terms = BTreeMap::new();
                terms.insert(m, Rational::one());
                Ok(Part { terms, target: None })
            }
            Some(Tok::Module(kind, n)) => {
                let t = if kind == 'i' { Target::Iota(n) } else { Target::X(n) };
                let mut p = Part::scalar(Rational::one());
                p.target = Some(t);
                Ok(p)
            }
            Some(Tok::Open) => {
                let inner = self.expr()?;
                if self.next() != Some(Tok::Close) {
                    return Err(err(self.offset().saturating_sub(1).max(at), "expected ')'"));
                }
                let mut terms = BTreeMap::new();
                for (w, c) in inner {
                    if w.s() != 1 || w.target != Target::Formal || !w.tv.is_zero() {
                        return Err(err(at, "a parenthesised group must be a sum of monomials"));
                    }
                    terms.insert(w.slots[0], c);
                }
                Ok(Part { terms, target: None })
            }
            _ => Err(err(at, "expected a factor")),
        }
    }
}

/// Parse into raw (not necessarily left-canonical) words.
pub fn parse(text: &str, cfg: &AlgebraConfig, p: u64) -> Result<CobarElement, Error> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(err(0, "empty expression"));
    }
    let mut ps = Parser {
        toks,
        pos: 0,
        end: text.len(),
        cfg,
        p,
    };
    let sum = ps.expr()?;
    if ps.pos < ps.toks.len() {
        return Err(err(ps.offset(), "unexpected token"));
    }
    let mut e = CobarElement::zero();
    for (w, c) in sum {
        e.add_term(w, PLocal::new(c, p)?);
    }
    // "0" parses to the empty sum.
    Ok(e)
}

/// Parse a Gamma element (one slot, formal target).
pub fn parse_gamma(text: &str, cfg: &AlgebraConfig, p: u64) -> Result<GammaElement, Error> {
    parse(text, cfg, p)?
        .to_gamma()
        .ok_or_else(|| err(0, "expected an element of Gamma"))
}

pub fn print(e: &CobarElement) -> String {
    e.to_string()
}

fn content(cs: &[&PLocal]) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for c in cs {
        let q = c.as_rational();
        num = num.gcd(q.numer());
        den = den.lcm(q.denom());
    }
    // Only integer content is pulled out.
    if den.is_one() {
        Rational::from_integer(num)
    } else {
        Rational::one()
    }
}

/// Like `print`, but terms sharing everything after the first slot are
/// grouped, with their common content pulled out:
/// "-3 * (2 v1 h1 - 3 h1^2) (x) i[9]".
pub fn print_factored(e: &CobarElement) -> String {
    let mut groups: BTreeMap<Word, CobarElement> = BTreeMap::new();
    for (w, c) in &e.terms {
        if w.s() == 0 {
            groups.entry(w.clone()).or_default().add_term(w.clone(), c.clone());
            continue;
        }
        let mut tail = w.clone();
        tail.slots[0] = Mono::ONE;
        let mut head = w.clone();
        head.slots.truncate(1);
        head.tv = Exps::ZERO;
        head.target = Target::Formal;
        groups.entry(tail).or_default().add_term(head, c.clone());
    }
    if groups.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (tail, g)) in groups.iter().rev().enumerate() {
        if tail.s() == 0 || g.len() == 1 {
            let text = if tail.s() == 0 {
                g.to_string()
            } else {
                let (h, c) = g.terms.iter().next().unwrap();
                let mut w = tail.clone();
                w.slots[0] = h.slots[0];
                CobarElement::word(w, c.clone()).to_string()
            };
            match text.strip_prefix('-') {
                Some(rest) if i > 0 => write!(out, " - {rest}").unwrap(),
                _ if i > 0 => write!(out, " + {text}").unwrap(),
                _ => out.push_str(&text),
            }
            continue;
        }
        let lead = g.terms.iter().next_back().unwrap().1;
        let mut k = content(&g.terms.values().collect::<Vec<_>>());
        if lead.is_negative() {
            k = -k;
        }
        let mut inner = CobarElement::zero();
        for (w, c) in &g.terms {
            let q = if k.abs().is_one() {
                if k.is_negative() { -c } else { c.clone() }
            } else {
                PLocal::from_bigint((c.as_rational() / &k).to_integer())
            };
            inner.add_term(w.clone(), q);
        }
        let mut tail_text = String::new();
        let mut t = tail.clone();
        t.slots.remove(0);
        if !(t.slots.is_empty() && t.tv.is_zero() && t.target == Target::Formal) {
            let s = CobarElement::word(t, PLocal::one()).to_string();
            tail_text = if s.is_empty() { String::new() } else { format!(" (x) {s}") };
        }
        let body = format!("({inner}){tail_text}");
        let abs = k.abs();
        let text = if abs.is_one() { body } else { format!("{abs} * {body}") };
        if i == 0 {
            if k.is_negative() {
                out.push('-');
            }
            out.push_str(&text);
        } else if k.is_negative() {
            write!(out, " - {text}").unwrap();
        } else {
            write!(out, " + {text}").unwrap();
        }
    }
    out
}

/// Parse a comodule definition:
///
/// ```text
/// grammar-v1
/// gen x10 10
/// gen x14 14
/// coaction x14: 1 * x14 + (-h1) * x10
/// ```
///
/// Generators are identified by degree; a generator without a coaction line
/// is primitive.
pub fn parse_comodule(text: &str, name: &str, cfg: &AlgebraConfig, p: u64) -> Result<Comodule, Error> {
    let mut names: BTreeMap<String, Target> = BTreeMap::new();
    let mut gens = Vec::new();
    let mut coaction = BTreeMap::new();
    let mut offset = 0;
    let mut seen_header = false;
    for line in text.lines() {
        let line_start = offset;
        offset += line.len() + 1;
        let l = line.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if !seen_header {
            if l != GRAMMAR_VERSION {
                return Err(Error::Parse {
                    offset: line_start,
                    message: format!("expected header '{GRAMMAR_VERSION}'"),
                });
            }
            seen_header = true;
            continue;
        }
        if let Some(rest) = l.strip_prefix("gen ") {
            let mut it = rest.split_whitespace();
            let (Some(gname), Some(deg), None) = (it.next(), it.next(), it.next()) else {
                return Err(err(line_start, "expected 'gen <name> <degree>'"));
            };
            let deg: u32 = deg.parse().map_err(|_| err(line_start, "bad degree"))?;
            let t = Target::X(deg);
            if gens.contains(&t) {
                return Err(err(line_start, format!("two generators in degree {deg}")));
            }
            names.insert(gname.to_string(), t);
            gens.push(t);
        } else if let Some(rest) = l.strip_prefix("coaction ") {
            let (gname, rhs) = rest
                .split_once(':')
                .ok_or_else(|| err(line_start, "expected 'coaction <name>: ...'"))?;
            let g = *names
                .get(gname.trim())
                .ok_or_else(|| Error::UnknownGenerator(gname.trim().to_string()))?;
            let base = line_start + line.find(':').unwrap() + 1;
            let row = parse_row(rhs, base, &names, cfg, p)?;
            coaction.insert(g, row);
        } else {
            return Err(err(line_start, format!("unrecognised line '{l}'")));
        }
    }
    for g in &gens {
        coaction.entry(*g).or_insert_with(|| vec![(GammaElement::one(), *g)]);
    }
    Ok(Comodule {
        name: name.to_string(),
        gens,
        coaction,
    })
}

/// Split "g1 * a + g2 * b - ..." at the generator names.
fn parse_row(
    rhs: &str,
    base: usize,
    names: &BTreeMap<String, Target>,
    cfg: &AlgebraConfig,
    p: u64,
) -> Result<Vec<(GammaElement, Target)>, Error> {
    let b = rhs.as_bytes();
    let mut row = Vec::new();
    let mut seg_start = 0;
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'*' {
            let mut j = i + 1;
            while j < b.len() && b[j].is_ascii_whitespace() {
                j += 1;
            }
            let mut k = j;
            while k < b.len() && (b[k].is_ascii_alphanumeric() || b[k] == b'_') {
                k += 1;
            }
            let mut after = k;
            while after < b.len() && b[after].is_ascii_whitespace() {
                after += 1;
            }
            let word = &rhs[j..k];
            if let Some(t) = names.get(word) {
                if after == b.len() || b[after] == b'+' || b[after] == b'-' {
                    let mut g = rhs[seg_start..i].trim();
                    g = g.strip_prefix('+').unwrap_or(g).trim();
                    let gamma = parse_gamma(g, cfg, p).map_err(|e| match e {
                        Error::Parse { offset, message } => Error::Parse {
                            offset: base + seg_start + offset,
                            message,
                        },
                        other => other,
                    })?;
                    row.push((gamma, *t));
                    seg_start = after;
                    i = after;
                    continue;
                }
            }
        }
        i += 1;
    }
    if !rhs[seg_start..].trim().is_empty() {
        return Err(err(base + seg_start, "trailing text in coaction"));
    }
    Ok(row)
}

/// Text form of a comodule, readable by `parse_comodule`.
pub fn print_comodule(m: &Comodule) -> String {
    let name = |t: &Target| format!("x{}", t.degree());
    let mut out = format!("{GRAMMAR_VERSION}\n");
    for g in &m.gens {
        writeln!(out, "gen {} {}", name(g), g.degree()).unwrap();
    }
    for g in &m.gens {
        let row = &m.coaction[g];
        let parts: Vec<String> = row.iter().map(|(x, t)| format!("({x}) * {}", name(t))).collect();
        writeln!(out, "coaction {}: {}", name(g), parts.join(" + ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> AlgebraConfig {
        AlgebraConfig::default()
    }

    fn rt(s: &str) -> String {
        print(&parse(s, &cfg(), 3).unwrap())
    }

    #[test]
    fn basic_forms() {
        assert_eq!(rt("h1 (x) h1"), "h1 (x) h1");
        assert_eq!(rt("h1(x)h1"), "h1 (x) h1");
        assert_eq!(rt("2*v1*h1 - 3*h1^2"), "2 v1 h1 - 3 h1^2");
        assert_eq!(rt("2v1h1 - 3h1^2"), "2 v1 h1 - 3 h1^2");
        assert_eq!(rt("v1^2 i[9]"), "v1^2 i[9]");
        assert_eq!(rt("-3 * (2 v1 h1 - 3 h1^2) (x) i[9]"), "-6 v1 h1 (x) i[9] + 9 h1^2 (x) i[9]");
        assert_eq!(rt("0"), "0");
        assert_eq!(rt("h1 - h1"), "0");
        assert_eq!(rt("1/2 h1^2 (x) x[10]"), "1/2 h1^2 (x) x[10]");
        assert_eq!(rt("1 (x) h2"), "1 (x) h2");
    }

    #[test]
    fn errors() {
        let c = cfg();
        assert!(matches!(parse("h1^^2", &c, 3), Err(Error::Parse { offset: 3, .. })));
        assert!(matches!(parse("w1", &c, 3), Err(Error::UnknownGenerator(_))));
        assert!(matches!(parse("v4", &c, 3), Err(Error::UnknownGenerator(_))));
        assert!(matches!(parse("h1^40", &c, 3), Err(Error::DegreeOverflow { .. })));
        assert!(matches!(parse("1/3 h1", &c, 3), Err(Error::PLocalityViolation(_))));
        assert!(matches!(parse("i[3] (x) h1", &c, 3), Err(Error::Parse { .. })));
        assert!(matches!(parse("h1 +", &c, 3), Err(Error::Parse { .. })));
    }

    #[test]
    fn factored() {
        let e = parse("-6 v1 h1 (x) i[9] + 9 h1^2 (x) i[9]", &cfg(), 3).unwrap();
        assert_eq!(print_factored(&e), "-3 * (2 v1 h1 - 3 h1^2) (x) i[9]");
        let back = parse(&print_factored(&e), &cfg(), 3).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn comodule_text() {
        let text = "grammar-v1\ngen a 10\ngen b 14\ncoaction b: 1 * b + (-h1) * a\n";
        let m = parse_comodule(text, "test", &cfg(), 3).unwrap();
        assert_eq!(m.row(Target::X(14)).unwrap().len(), 2);
        assert_eq!(m.row(Target::X(10)).unwrap().len(), 1);
        let again = parse_comodule(&print_comodule(&m), "test", &cfg(), 3).unwrap();
        assert_eq!(again.coaction, m.coaction);
    }
}
