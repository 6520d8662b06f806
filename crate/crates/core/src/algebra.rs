//! Sparse polynomial arithmetic for BP_* = Z_(p)[v_1..v_K] and Gamma = BP_*[h_1..h_K].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::plocal::PLocal;

pub const MAX_GENS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlgebraConfig {
    pub p: u64,
    pub k: usize,
    pub degree_cap: u32,
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        AlgebraConfig {
            p: 3,
            k: 3,
            degree_cap: 72,
        }
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

impl AlgebraConfig {
    pub fn new(p: u64, k: usize, degree_cap: u32) -> Result<Self, Error> {
        let cfg = AlgebraConfig { p, k, degree_cap };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !is_prime(self.p) || self.p == 2 {
            return Err(Error::Config(format!("p = {} is not an odd prime", self.p)));
        }
        if self.k == 0 || self.k > MAX_GENS {
            return Err(Error::Config(format!("K must lie in 1..={MAX_GENS}")));
        }
        if self.degree_cap % 2 != 0 {
            return Err(Error::Config("degree cap must be even".into()));
        }
        let top = 2 * (self.p.checked_pow(self.k as u32).unwrap_or(u64::MAX) - 1);
        if (self.degree_cap as u64) < top {
            return Err(Error::Config(format!(
                "degree cap {} is below |v_K| = {top}",
                self.degree_cap
            )));
        }
        Ok(())
    }

    /// |v_i| = |h_i| = 2(p^i - 1), for i counted from 1.
    pub fn gen_degree(&self, i: usize) -> u32 {
        (2 * (self.p.pow(i as u32) - 1)) as u32
    }
}

/// Exponent vector; slot 0 holds the exponent of generator 1.
///
/// Ordered by comparing the highest generator first, so v2 sorts above v1^3.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Exps(pub [u16; MAX_GENS]);

impl Ord for Exps {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

impl PartialOrd for Exps {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Exps {
    pub const ZERO: Exps = Exps([0; MAX_GENS]);

    pub fn single(i: usize, e: u16) -> Exps {
        let mut x = Exps::ZERO;
        x.0[i - 1] = e;
        x
    }

    pub fn from_slice(s: &[u16]) -> Exps {
        let mut x = Exps::ZERO;
        x.0[..s.len()].copy_from_slice(s);
        x
    }

    pub fn get(&self, i: usize) -> u16 {
        self.0[i - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, o: &Exps) -> Exps {
        let mut x = *self;
        for (a, b) in x.0.iter_mut().zip(o.0.iter()) {
            *a += b;
        }
        x
    }

    pub fn checked_sub(&self, o: &Exps) -> Option<Exps> {
        let mut x = *self;
        for (a, b) in x.0.iter_mut().zip(o.0.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(x)
    }

    /// Unweighted exponent sum.
    pub fn count(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn degree(&self, cfg: &AlgebraConfig) -> u32 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &e)| e as u32 * if e > 0 { cfg.gen_degree(i + 1) } else { 0 })
            .sum()
    }

    pub fn fits(&self, cfg: &AlgebraConfig) -> bool {
        self.0[cfg.k..].iter().all(|&e| e == 0)
    }
}

/// v^A h^I.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub v: Exps,
    pub h: Exps,
}

impl Mono {
    pub const ONE: Mono = Mono {
        v: Exps::ZERO,
        h: Exps::ZERO,
    };

    pub fn new(v: Exps, h: Exps) -> Mono {
        Mono { v, h }
    }

    pub fn v(i: usize, e: u16) -> Mono {
        Mono::new(Exps::single(i, e), Exps::ZERO)
    }

    pub fn h(i: usize, e: u16) -> Mono {
        Mono::new(Exps::ZERO, Exps::single(i, e))
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        Mono::new(self.v.add(&o.v), self.h.add(&o.h))
    }

    pub fn degree(&self, cfg: &AlgebraConfig) -> u32 {
        self.v.degree(cfg) + self.h.degree(cfg)
    }

    pub fn is_one(&self) -> bool {
        self.v.is_zero() && self.h.is_zero()
    }
}

pub fn degree(m: &Mono, cfg: &AlgebraConfig) -> u32 {
    m.degree(cfg)
}

fn fmt_exps(f: &mut dyn fmt::Write, sym: char, e: &Exps, first: &mut bool) -> fmt::Result {
    for (i, &x) in e.0.iter().enumerate() {
        if x == 0 {
            continue;
        }
        if !*first {
            f.write_char(' ')?;
        }
        *first = false;
        write!(f, "{sym}{}", i + 1)?;
        if x > 1 {
            write!(f, "^{x}")?;
        }
    }
    Ok(())
}

/// Writes "v1^2 h1" style text; nothing for the unit monomial.
pub fn write_mono(f: &mut dyn fmt::Write, m: &Mono) -> fmt::Result {
    let mut first = true;
    fmt_exps(f, 'v', &m.v, &mut first)?;
    fmt_exps(f, 'h', &m.h, &mut first)
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        write_mono(f, self)
    }
}

/// Writes a signed sum of terms in descending order, "0" when empty.
pub fn write_sum<'a, I>(f: &mut dyn fmt::Write, terms: I) -> fmt::Result
where
    I: Iterator<Item = (String, &'a PLocal)>,
{
    let mut first = true;
    for (body, c) in terms {
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                f.write_char('-')?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        match (mag.is_one(), body.is_empty()) {
            (true, true) => f.write_str("1")?,
            (true, false) => f.write_str(&body)?,
            (false, true) => write!(f, "{mag}")?,
            (false, false) => write!(f, "{mag} {body}")?,
        }
    }
    if first {
        f.write_char('0')?;
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GammaElement {
    pub terms: BTreeMap<Mono, PLocal>,
    pub truncated: bool,
}

impl GammaElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::mono(Mono::ONE, PLocal::one())
    }

    pub fn mono(m: Mono, c: PLocal) -> Self {
        let mut g = Self::zero();
        g.add_term(m, c);
        g
    }

    pub fn v(i: usize) -> Self {
        Self::mono(Mono::v(i, 1), PLocal::one())
    }

    pub fn h(i: usize) -> Self {
        Self::mono(Mono::h(i, 1), PLocal::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: PLocal) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        r.truncated |= o.truncated;
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-PLocal::one()))
    }

    pub fn scale(&self, c: &PLocal) -> Self {
        if c.is_zero() {
            return Self {
                truncated: self.truncated,
                ..Self::zero()
            };
        }
        Self {
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
            truncated: self.truncated,
        }
    }

    pub fn mul(&self, o: &Self, cfg: &AlgebraConfig) -> Self {
        let mut r = Self::zero();
        r.truncated = self.truncated || o.truncated;
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = m1.mul(m2);
                if m.degree(cfg) > cfg.degree_cap {
                    r.truncated = true;
                    continue;
                }
                r.add_term(m, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, e: u32, cfg: &AlgebraConfig) -> Self {
        let mut r = Self::one();
        for _ in 0..e {
            r = r.mul(self, cfg);
        }
        r
    }

    /// Degree when all terms share one; `None` for zero or mixed sums.
    pub fn homogeneous_degree(&self, cfg: &AlgebraConfig) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.degree(cfg));
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    pub fn is_homogeneous(&self, cfg: &AlgebraConfig) -> bool {
        self.is_zero() || self.homogeneous_degree(cfg).is_some()
    }

    /// epsilon: the terms with no h-generator.
    pub fn counit(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.h.is_zero())
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
            truncated: self.truncated,
        }
    }

    pub fn coefficient(&self, m: &Mono) -> PLocal {
        self.terms.get(m).cloned().unwrap_or_else(PLocal::zero)
    }
}

impl fmt::Display for GammaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(
            f,
            self.terms.iter().rev().map(|(m, c)| {
                let mut s = String::new();
                write_mono(&mut s, m).unwrap();
                (s, c)
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> AlgebraConfig {
        AlgebraConfig::default()
    }

    #[test]
    fn degrees() {
        let c = cfg();
        assert_eq!(Mono::v(1, 1).degree(&c), 4);
        assert_eq!(Mono::h(2, 1).degree(&c), 16);
        assert_eq!(Mono::v(1, 2).mul(&Mono::h(1, 3)).degree(&c), 20);
    }

    #[test]
    fn products() {
        let c = cfg();
        let x = GammaElement::v(1).sub(&GammaElement::h(1).scale(&PLocal::from_int(3)));
        assert_eq!(x.mul(&x, &c).to_string(), "v1^2 - 6 v1 h1 + 9 h1^2");
        assert_eq!(GammaElement::h(1).mul(&GammaElement::h(2), &c).to_string(), "h1 h2");
        assert_eq!(GammaElement::one().mul(&x, &c), x);
    }

    #[test]
    fn truncation_flag() {
        let c = AlgebraConfig::new(3, 3, 52).unwrap();
        let x = GammaElement::h(3).mul(&GammaElement::h(1), &c);
        assert!(x.is_zero() && x.truncated);
    }

    #[test]
    fn printing() {
        let t = GammaElement::mono(
            Mono::v(1, 2).mul(&Mono::h(1, 1)).mul(&Mono::h(2, 1)),
            PLocal::frac(-3, 4, 3).unwrap(),
        );
        assert_eq!(t.to_string(), "-3/4 v1^2 h1 h2");
        assert_eq!(GammaElement::zero().to_string(), "0");
    }

    #[test]
    fn config_checks() {
        assert!(AlgebraConfig::new(4, 3, 72).is_err());
        assert!(AlgebraConfig::new(3, 3, 50).is_err());
        assert!(AlgebraConfig::new(5, 2, 48).is_ok());
    }
}
