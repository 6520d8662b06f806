//! Tensor words gamma_1 (x) ... (x) gamma_s (x) m and their formal sums.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{write_mono, write_sum, AlgebraConfig, Exps, GammaElement, Mono};
use crate::plocal::PLocal;

/// Module generator a word ends in.
///
/// `Formal` marks a pure Gamma-tensor, `Iota(n)` the sphere class of degree n,
/// `X(n)` a named comodule generator of degree n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Formal,
    Iota(u32),
    X(u32),
}

impl Target {
    pub fn degree(&self) -> u32 {
        match self {
            Target::Formal => 0,
            Target::Iota(n) | Target::X(n) => *n,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Formal => Ok(()),
            Target::Iota(n) => write!(f, "i[{n}]"),
            Target::X(n) => write!(f, "x[{n}]"),
        }
    }
}

/// One raw word. Each slot is v^A h^I where v^A sits on the left of that slot;
/// `tv` is the v-monomial multiplying the target.
///
/// A word is left-canonical when only the first slot (or, with no slots, the
/// target) carries v's.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    pub slots: Vec<Mono>,
    pub tv: Exps,
    pub target: Target,
}

impl Word {
    pub fn new(slots: Vec<Mono>, tv: Exps, target: Target) -> Word {
        Word { slots, tv, target }
    }

    pub fn s(&self) -> usize {
        self.slots.len()
    }

    pub fn is_canonical(&self) -> bool {
        if self.slots.is_empty() {
            return true;
        }
        self.tv.is_zero() && self.slots[1..].iter().all(|m| m.v.is_zero())
    }

    /// Internal degree, excluding the target generator.
    pub fn degree(&self, cfg: &AlgebraConfig) -> u32 {
        self.slots.iter().map(|m| m.degree(cfg)).sum::<u32>() + self.tv.degree(cfg)
    }

    pub fn has_trivial_slot(&self) -> bool {
        self.slots.iter().any(|m| m.h.is_zero())
    }
}

fn write_word(f: &mut dyn fmt::Write, w: &Word) -> fmt::Result {
    let mut parts: Vec<String> = Vec::new();
    for m in &w.slots {
        let mut s = String::new();
        write_mono(&mut s, m)?;
        if s.is_empty() {
            s.push('1');
        }
        parts.push(s);
    }
    let mut last = String::new();
    write_mono(&mut last, &Mono::new(w.tv, Exps::ZERO))?;
    let t = w.target.to_string();
    if !t.is_empty() {
        if !last.is_empty() {
            last.push(' ');
        }
        last.push_str(&t);
    }
    if !last.is_empty() {
        parts.push(last);
    }
    f.write_str(&parts.join(" (x) "))
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_word(f, self)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CobarElement {
    pub terms: BTreeMap<Word, PLocal>,
    pub truncated: bool,
}

impl CobarElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: Word, c: PLocal) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, w: Word, c: PLocal) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (w, c) in &o.terms {
            self.add_term(w.clone(), c.clone());
        }
        self.truncated |= o.truncated;
    }

    pub fn add_scaled(&mut self, o: &Self, k: &PLocal) {
        for (w, c) in &o.terms {
            self.add_term(w.clone(), c * k);
        }
        self.truncated |= o.truncated;
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_scaled(o, &-PLocal::one());
        r
    }

    pub fn scale(&self, k: &PLocal) -> Self {
        let mut r = Self::zero();
        r.add_scaled(self, k);
        r.truncated = self.truncated;
        r
    }

    pub fn neg(&self) -> Self {
        self.scale(&-PLocal::one())
    }

    pub fn is_canonical(&self) -> bool {
        self.terms.keys().all(Word::is_canonical)
    }

    /// Pure Gamma element viewed as a one-slot tensor over the formal target.
    pub fn from_gamma(g: &GammaElement, target: Target) -> Self {
        let mut e = Self::zero();
        for (m, c) in &g.terms {
            e.add_term(Word::new(vec![*m], Exps::ZERO, target), c.clone());
        }
        e.truncated = g.truncated;
        e
    }

    /// Module element v^A m.
    pub fn module(tv: Exps, target: Target, c: PLocal) -> Self {
        Self::word(Word::new(vec![], tv, target), c)
    }

    /// Inverse of `from_gamma` on canonical one-slot elements.
    pub fn to_gamma(&self) -> Option<GammaElement> {
        let mut g = GammaElement::zero();
        for (w, c) in &self.terms {
            if w.s() != 1 || !w.tv.is_zero() {
                return None;
            }
            g.add_term(w.slots[0], c.clone());
        }
        g.truncated = self.truncated;
        Some(g)
    }
}

impl fmt::Display for CobarElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(
            f,
            self.terms.iter().rev().map(|(w, c)| {
                let mut s = String::new();
                write_word(&mut s, w).unwrap();
                if s == "1" {
                    s.clear();
                }
                (s, c)
            }),
        )
    }
}
