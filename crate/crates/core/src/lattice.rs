//! Exhaustive search for low-excess representatives.
//!
//! The words of a fixed shape and value at most n span, over Z_(p), the
//! elements of excess at most n. Membership is decided by echelon reduction
//! over Z/p^N, together with a rank test modulo a large prime that rules out
//! elements outside the rational span.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::algebra::{Exps, Mono};
use crate::cobar::{representative_excess, word_value};
use crate::hopf::Hopf;
use crate::plocal::PLocal;
use crate::tensor::{CobarElement, Target, Word};

/// Arithmetic in Z/m for m < 2^62.
#[derive(Clone, Copy, Debug)]
struct Ring {
    m: u64,
    p: u64,
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

impl Ring {
    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.m as u128) as u64
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + (self.m - b)
        }
    }

    fn from_int(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.m)).to_u64().unwrap()
    }

    fn from_plocal(&self, x: &PLocal) -> u64 {
        let q = x.as_rational();
        let d = inv_mod(self.from_int(q.denom()), self.m).expect("denominator is a unit");
        self.mul(self.from_int(q.numer()), d)
    }

    /// (valuation, unit part); for a field `p` is the modulus itself.
    fn split(&self, a: u64) -> (u32, u64) {
        if a == 0 {
            return (u32::MAX, 0);
        }
        let mut v = 0;
        let mut a = a;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        (v, a)
    }

    /// b / a when the quotient exists in the ring (val b >= val a).
    fn quotient(&self, b: u64, a: u64) -> u64 {
        let (va, ua) = self.split(a);
        let (vb, ub) = self.split(b);
        let scale = self.p.pow(vb - va) % self.m;
        let ui = inv_mod(ua % self.m, self.m).unwrap();
        self.mul(self.mul(ub, ui), scale)
    }
}

/// Row echelon form over Z/p^N or over a prime field.
struct Echelon {
    ring: Ring,
    pivots: BTreeMap<usize, Vec<u64>>,
}

fn lead(r: &[u64]) -> Option<usize> {
    r.iter().position(|&x| x != 0)
}

impl Echelon {
    fn new(ring: Ring) -> Self {
        Echelon {
            ring,
            pivots: BTreeMap::new(),
        }
    }

    fn eliminate(&self, r: &mut [u64], piv: &[u64], k: u64) {
        for (x, y) in r.iter_mut().zip(piv) {
            if *y != 0 {
                *x = self.ring.sub(*x, self.ring.mul(k, *y));
            }
        }
    }

    fn insert(&mut self, mut r: Vec<u64>) {
        while let Some(c) = lead(&r) {
            let Some(piv) = self.pivots.get(&c) else {
                self.pivots.insert(c, r);
                return;
            };
            let (va, _) = self.ring.split(piv[c]);
            let (vb, _) = self.ring.split(r[c]);
            if vb >= va {
                let k = self.ring.quotient(r[c], piv[c]);
                self.eliminate(&mut r, piv, k);
            } else {
                let mut old = self.pivots.insert(c, r).unwrap();
                let piv = &self.pivots[&c];
                let k = self.ring.quotient(old[c], piv[c]);
                self.eliminate(&mut old, piv, k);
                r = old;
            }
        }
    }

    fn contains(&self, x: &[u64]) -> bool {
        let mut x = x.to_vec();
        while let Some(c) = lead(&x) {
            let Some(piv) = self.pivots.get(&c) else { return false };
            if self.ring.split(x[c]).0 < self.ring.split(piv[c]).0 {
                return false;
            }
            let k = self.ring.quotient(x[c], piv[c]);
            self.eliminate(&mut x, piv, k);
        }
        true
    }
}

/// 2^61 - 1.
const LARGE_PRIME: u64 = (1 << 61) - 1;

fn p_power_ring(p: u64) -> Ring {
    let mut m = p;
    while (m as u128) * (p as u128) < (1u128 << 62) {
        m *= p;
    }
    Ring { m, p }
}

/// All exponent vectors over the first `k` generators with the given degree.
fn monomials_of_degree(h: &Hopf, kmax: usize, deg: u32) -> Vec<Exps> {
    fn go(h: &Hopf, kmax: usize, i: usize, left: u32, cur: &mut Exps, out: &mut Vec<Exps>) {
        if i > kmax {
            if left == 0 {
                out.push(*cur);
            }
            return;
        }
        let d = h.cfg.gen_degree(i);
        let mut e = 0u16;
        while (e as u32) * d <= left {
            cur.0[i - 1] = e;
            go(h, kmax, i + 1, left - e as u32 * d, cur, out);
            e += 1;
        }
        cur.0[i - 1] = 0;
    }
    let mut out = Vec::new();
    let mut cur = Exps::ZERO;
    go(h, kmax, 1, deg, &mut cur, &mut out);
    out
}

/// Every word with `s` slots over generators 1..=kmax, the given target and
/// internal degree `deg`, or `None` when there are more than `limit`.
pub fn enumerate_words(
    h: &Hopf,
    kmax: usize,
    s: usize,
    target: Target,
    deg: u32,
    limit: usize,
) -> Option<Vec<Word>> {
    let step = 2 * (h.p() as u32 - 1);
    let by_deg: Vec<Vec<Exps>> = (0..=deg / step).map(|d| monomials_of_degree(h, kmax, d * step)).collect();
    let positions = 2 * s + 1;
    let mut out = Vec::new();
    let mut parts = vec![Exps::ZERO; positions];
    fn go(
        pos: usize,
        left: u32,
        step: u32,
        by_deg: &[Vec<Exps>],
        parts: &mut Vec<Exps>,
        s: usize,
        target: Target,
        out: &mut Vec<Word>,
        limit: usize,
    ) -> bool {
        if pos == parts.len() - 1 {
            for e in &by_deg[(left / step) as usize] {
                parts[pos] = *e;
                let slots = (0..s).map(|i| Mono::new(parts[2 * i], parts[2 * i + 1])).collect();
                out.push(Word::new(slots, parts[pos], target));
                if out.len() > limit {
                    return false;
                }
            }
            return true;
        }
        for d in 0..=left / step {
            for e in &by_deg[d as usize] {
                parts[pos] = *e;
                if !go(pos + 1, left - d * step, step, by_deg, parts, s, target, out, limit) {
                    return false;
                }
            }
        }
        true
    }
    if go(0, deg, step, &by_deg, &mut parts, s, target, &mut out, limit) {
        Some(out)
    } else {
        None
    }
}

/// Smallest excess over all representatives of `e` built from words of the
/// same shape over the generators already present in `e`, searching only
/// below `upper`. Returns `None` when no lower level exists, the element is
/// not homogeneous of a single shape, or there are more than `word_limit`
/// words.
pub fn lower_level(h: &Hopf, e: &CobarElement, upper: i64, word_limit: usize) -> Option<i64> {
    let x = h.canonicalize(e);
    let mut shapes = x.terms.keys().map(|w| (w.s(), w.target, w.degree(&h.cfg)));
    let shape = shapes.next()?;
    if shape.0 == 0 || shapes.any(|t| t != shape) {
        return None;
    }
    let (s, target, deg) = shape;
    let kmax = x
        .terms
        .keys()
        .flat_map(|w| {
            w.slots
                .iter()
                .flat_map(|m| [m.v, m.h])
                .chain(std::iter::once(w.tv))
                .filter_map(|e| e.0.iter().rposition(|&a| a > 0))
        })
        .max()
        .map_or(1, |i| i + 1);
    let words = enumerate_words(h, kmax, s, target, deg, word_limit)?;
    let mut by_level: BTreeMap<i64, Vec<CobarElement>> = BTreeMap::new();
    let mut cols: HashMap<Word, usize> = HashMap::new();
    for w in x.terms.keys() {
        let n = cols.len();
        cols.entry(w.clone()).or_insert(n);
    }
    for w in words {
        let v = word_value(h, &w).unwrap();
        if v < upper {
            let canon = h.canonicalize(&CobarElement::word(w, PLocal::one()));
            for k in canon.terms.keys() {
                let n = cols.len();
                cols.entry(k.clone()).or_insert(n);
            }
            by_level.entry(v).or_default().push(canon);
        }
    }
    let local = p_power_ring(h.p());
    let field = Ring {
        m: LARGE_PRIME,
        p: LARGE_PRIME,
    };
    let dense = |c: &CobarElement, ring: &Ring| -> Vec<u64> {
        let mut r = vec![0u64; cols.len()];
        for (w, k) in &c.terms {
            r[cols[w]] = ring.from_plocal(k);
        }
        r
    };
    let xl = dense(&x, &local);
    let xf = dense(&x, &field);
    let mut el = Echelon::new(local);
    let mut ef = Echelon::new(field);
    for (level, gens) in by_level {
        for g in &gens {
            el.insert(dense(g, &local));
            ef.insert(dense(g, &field));
        }
        if el.contains(&xl) && ef.contains(&xf) {
            return Some(level);
        }
    }
    None
}

/// Excess after searching all representatives of the same shape, falling
/// back to `fallback` when the search space exceeds `word_limit`.
pub fn minimal_excess(h: &Hopf, e: &CobarElement, fallback: Option<i64>, word_limit: usize) -> Option<i64> {
    let upper = fallback.or_else(|| representative_excess(h, e))?;
    Some(lower_level(h, e, upper, word_limit).unwrap_or(upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modular_helpers() {
        let r = p_power_ring(3);
        assert_eq!(r.split(r.from_int(&BigInt::from(18))), (2, 2));
        assert_eq!(r.mul(r.quotient(18, 9), 9), 18);
        assert_eq!(inv_mod(2, 9), Some(5));
    }
}
