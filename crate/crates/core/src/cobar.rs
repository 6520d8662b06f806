//! The unstable cobar complex: bimodule rewriting, differential, excess and
//! the desuspension rewrite.

use std::collections::BTreeMap;

use crate::algebra::{Exps, GammaElement, Mono};
use crate::error::Error;
use crate::hopf::Hopf;
use crate::plocal::{pow_int, Nu, PLocal};
use crate::tensor::{CobarElement, Target, Word};

/// A comodule that is free over BP_* on finitely many generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Comodule {
    pub name: String,
    pub gens: Vec<Target>,
    pub coaction: BTreeMap<Target, Vec<(GammaElement, Target)>>,
}

impl Comodule {
    pub fn sphere(n: u32) -> Comodule {
        let g = Target::Iota(n);
        let mut coaction = BTreeMap::new();
        coaction.insert(g, vec![(GammaElement::one(), g)]);
        Comodule {
            name: format!("sphere:{n}"),
            gens: vec![g],
            coaction,
        }
    }

    /// Coaction of a generator; the formal target is always primitive.
    pub fn row(&self, g: Target) -> Result<Vec<(GammaElement, Target)>, Error> {
        if g == Target::Formal {
            return Ok(vec![(GammaElement::one(), g)]);
        }
        self.coaction
            .get(&g)
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("generator {g} not in comodule {}", self.name)))
    }
}

/// Rewriting budget for `desuspend_normalize`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Only the rewrite p h = v - right_unit(v) with the right factor pushed one
    /// slot to the right.
    Rewrite,
    /// Rewrite first, then decide membership in the span of all lower-value
    /// words of the same shape, when there are at most `word_limit` of them.
    Exhaustive { word_limit: usize },
}

pub const DEFAULT_STEP_BOUND: usize = 100_000;

pub fn admissible(i: &Exps, target_degree: i64) -> bool {
    2 * i.count() as i64 <= target_degree
}

impl Hopf {
    /// h^I . right_unit(v^A) expanded into (v, h) monomials.
    fn slot_times_eta(&self, slot: &Mono, a: &Exps) -> Vec<(Mono, PLocal)> {
        if a.is_zero() {
            return vec![(*slot, PLocal::one())];
        }
        self.eta_mono(a)
            .terms
            .iter()
            .map(|(m, c)| (slot.mul(m), c.clone()))
            .collect()
    }

    /// Move the v's on the left of slot k+1 (the target when k = s) into slot
    /// k as right_unit. Slots are numbered from 1.
    pub fn push_left(&self, e: &CobarElement, k: usize) -> CobarElement {
        let mut out = CobarElement::zero();
        out.truncated = e.truncated;
        for (w, c) in &e.terms {
            let s = w.s();
            if k == 0 || k > s {
                out.add_term(w.clone(), c.clone());
                continue;
            }
            let moving = if k == s { w.tv } else { w.slots[k].v };
            if moving.is_zero() {
                out.add_term(w.clone(), c.clone());
                continue;
            }
            let mut base = w.clone();
            if k == s {
                base.tv = Exps::ZERO;
            } else {
                base.slots[k].v = Exps::ZERO;
            }
            for (m, ce) in self.slot_times_eta(&w.slots[k - 1], &moving) {
                let mut nw = base.clone();
                nw.slots[k - 1] = m;
                out.add_term(nw, c * &ce);
            }
        }
        out
    }

    /// Left-canonical form: all v's moved to the far left.
    pub fn canonicalize(&self, e: &CobarElement) -> CobarElement {
        let mut out = CobarElement::zero();
        out.truncated = e.truncated;
        for (w, c) in &e.terms {
            if w.is_canonical() {
                out.add_term(w.clone(), c.clone());
                continue;
            }
            let s = w.s();
            // partial words built from the right: (slots reversed, pending v, coef)
            let mut states: Vec<(Vec<Mono>, Exps, PLocal)> = vec![(Vec::new(), w.tv, c.clone())];
            for k in (0..s).rev() {
                let mut next = Vec::new();
                for (done, pending, coef) in states {
                    let h_only = Mono::new(Exps::ZERO, w.slots[k].h);
                    for (m, ce) in self.slot_times_eta(&h_only, &pending) {
                        let mut d = done.clone();
                        d.push(Mono::new(Exps::ZERO, m.h));
                        next.push((d, w.slots[k].v.add(&m.v), &coef * &ce));
                    }
                }
                states = next;
            }
            for (mut done, pending, coef) in states {
                done.reverse();
                done[0].v = pending;
                out.add_term(Word::new(done, Exps::ZERO, w.target), coef);
            }
        }
        out
    }

    /// The cobar differential. In the reduced complex words with a trivial
    /// slot are dropped; the input is assumed to have none.
    pub fn differential_full(
        &self,
        e: &CobarElement,
        m: &Comodule,
        reduced: bool,
    ) -> Result<CobarElement, Error> {
        let e = self.canonicalize(e);
        let mut raw = CobarElement::zero();
        raw.truncated = e.truncated;
        for (w, c) in &e.terms {
            let s = w.s();
            let left_v = if s == 0 { w.tv } else { w.slots[0].v };
            // 1 (x) w
            let mut slots = vec![Mono::ONE];
            let mut tv = w.tv;
            if s == 0 {
                tv = left_v;
            } else {
                slots.extend(w.slots.iter().cloned());
            }
            raw.add_term(Word::new(slots, tv, w.target), c.clone());
            // coproduct in each slot
            for j in 0..s {
                let sign = if (j + 1) % 2 == 0 { c.clone() } else { -c };
                let h_part = GammaElement::mono(Mono::new(Exps::ZERO, w.slots[j].h), PLocal::one());
                let psi = self.coproduct(&h_part);
                raw.truncated |= psi.truncated;
                for (pw, pc) in &psi.terms {
                    let mut slots = Vec::with_capacity(s + 1);
                    slots.extend_from_slice(&w.slots[..j]);
                    let mut first = pw.slots[0];
                    first.v = first.v.add(&w.slots[j].v);
                    slots.push(first);
                    slots.push(pw.slots[1]);
                    slots.extend_from_slice(&w.slots[j + 1..]);
                    raw.add_term(Word::new(slots, w.tv, w.target), &sign * pc);
                }
            }
            // coaction on the target
            let sign = if (s + 1) % 2 == 0 { c.clone() } else { -c };
            for (g, t) in m.row(w.target)? {
                for (gm, gc) in &g.terms {
                    let mut slots = w.slots.clone();
                    let mut nm = *gm;
                    if s == 0 {
                        nm.v = nm.v.add(&left_v);
                    }
                    slots.push(nm);
                    let tv = if s == 0 { Exps::ZERO } else { w.tv };
                    raw.add_term(Word::new(slots, tv, t), &sign * gc);
                }
            }
        }
        let mut out = self.canonicalize(&raw);
        if reduced {
            out.terms.retain(|w, _| !w.has_trivial_slot());
        }
        Ok(out)
    }

    /// Reduced cobar differential.
    pub fn differential(&self, e: &CobarElement, m: &Comodule) -> Result<CobarElement, Error> {
        self.differential_full(e, m, true)
    }

    /// d(v1^m)/p^e over a primitive generator, as a one-slot Gamma element.
    pub fn alpha(&self, m: u32, e: u32) -> Result<GammaElement, Error> {
        if m == 0 || e == 0 {
            return Err(Error::Precondition("alpha needs m, e >= 1".into()));
        }
        let x = CobarElement::module(Exps::single(1, m as u16), Target::Formal, PLocal::one());
        let d = self.differential(&x, &Comodule::sphere(1))?;
        let q = PLocal::from_bigint(pow_int(self.p(), e));
        let mut g = GammaElement::zero();
        for (w, c) in &d.terms {
            let c = c
                .checked_div(&q, self.p())
                .map_err(|_| Error::Divisibility(format!("p^{e} does not divide d(v1^{m})")))?;
            g.add_term(w.slots[0], c);
        }
        Ok(g)
    }

    /// (psi (x) 1) psi_M = (1 (x) psi_M) psi_M on every generator, plus the
    /// counit condition on each row.
    pub fn check_coassociativity(&self, m: &Comodule) -> Result<bool, Error> {
        for g in &m.gens {
            let row = m.row(*g)?;
            let unit = row
                .iter()
                .filter(|(_, t)| t == g)
                .map(|(x, _)| x.counit())
                .fold(GammaElement::zero(), |a, b| a.add(&b));
            if unit != GammaElement::one() {
                return Ok(false);
            }
            let mut lhs = CobarElement::zero();
            let mut rhs = CobarElement::zero();
            for (gamma, t) in &row {
                for (w, c) in &self.coproduct(gamma).terms {
                    lhs.add_term(Word::new(w.slots.clone(), Exps::ZERO, *t), c.clone());
                }
                for (gamma2, t2) in m.row(*t)? {
                    for (m1, c1) in &gamma.terms {
                        for (m2, c2) in &gamma2.terms {
                            rhs.add_term(Word::new(vec![*m1, *m2], Exps::ZERO, t2), c1 * c2);
                        }
                    }
                }
            }
            if self.canonicalize(&lhs) != self.canonicalize(&rhs) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// max_i (|I_i| - D_i/2), where D_i is the degree to the right of slot i.
/// `None` for words with no slots.
pub fn word_value(h: &Hopf, w: &Word) -> Option<i64> {
    let mut d = w.tv.degree(&h.cfg) as i64;
    let mut best = None;
    for m in w.slots.iter().rev() {
        let val = m.h.count() as i64 - d / 2;
        best = Some(best.map_or(val, |b: i64| b.max(val)));
        d += m.degree(&h.cfg) as i64;
    }
    best
}

/// Excess of the given representative; `None` for zero or slot-free input.
pub fn representative_excess(h: &Hopf, e: &CobarElement) -> Option<i64> {
    e.terms.keys().filter_map(|w| word_value(h, w)).max()
}

/// Smallest n for which every word passes the unstable condition over
/// S^{2n+1}, found by scanning n.
pub fn excess_by_scan(h: &Hopf, e: &CobarElement) -> Option<i64> {
    let words: Vec<&Word> = e.terms.keys().filter(|w| w.s() > 0).collect();
    if words.is_empty() {
        return None;
    }
    let top = words.iter().map(|w| w.degree(&h.cfg) as i64).max().unwrap();
    (-top - 1..=top + 1).find(|&n| {
        words.iter().all(|w| {
            let mut d = w.tv.degree(&h.cfg) as i64;
            w.slots.iter().rev().all(|m| {
                let ok = admissible(&m.h, d + 2 * n + 1);
                d += m.degree(&h.cfg) as i64;
                ok
            })
        })
    })
}

/// The rewrite p c h1 X = c v1 X - c X right_unit(v1), applied greedily to the
/// word of largest value whose maximum is attained in a single slot.
pub fn rewrite_normalize(h: &Hopf, e: &CobarElement, step_bound: usize) -> Result<CobarElement, Error> {
    let p = h.p();
    let pl = PLocal::from_int(p as i64);
    let mut cur = e.clone();
    let v1 = Exps::single(1, 1);
    for _ in 0..=step_bound {
        let mut best: Option<(i64, Word, usize)> = None;
        for (w, c) in &cur.terms {
            if c.nu(p) < Nu::Finite(1) {
                continue;
            }
            let mut d = w.tv.degree(&h.cfg) as i64;
            let mut vals = vec![0i64; w.s()];
            for (i, m) in w.slots.iter().enumerate().rev() {
                vals[i] = m.h.count() as i64 - d / 2;
                d += m.degree(&h.cfg) as i64;
            }
            let Some(&mx) = vals.iter().max() else { continue };
            let mut at = vals.iter().enumerate().filter(|(_, &v)| v == mx).map(|(i, _)| i);
            let i = at.next().unwrap();
            if at.next().is_some() || w.slots[i].h.get(1) == 0 {
                continue;
            }
            if best.as_ref().map_or(true, |b| mx > b.0) {
                best = Some((mx, w.clone(), i));
            }
        }
        let Some((_, w, i)) = best else {
            return Ok(cur);
        };
        let c = cur.terms.remove(&w).unwrap().checked_div(&pl, p)?;
        let mut lowered = w.slots[i];
        lowered.h.0[0] -= 1;
        let mut w1 = w.clone();
        w1.slots[i] = Mono::new(lowered.v.add(&v1), lowered.h);
        cur.add_term(w1, c.clone());
        let mut w2 = w.clone();
        w2.slots[i] = lowered;
        if i + 1 < w.s() {
            w2.slots[i + 1].v = w2.slots[i + 1].v.add(&v1);
        } else {
            w2.tv = w2.tv.add(&v1);
        }
        cur.add_term(w2, -c);
    }
    Err(Error::NormalizationDiverged(step_bound))
}

/// Rewrite toward a representative of smaller excess. The result is equal to
/// the input in the tensor product and its excess is never larger.
pub fn desuspend_normalize(h: &Hopf, e: &CobarElement) -> Result<CobarElement, Error> {
    let greedy = rewrite_normalize(h, e, DEFAULT_STEP_BOUND)?;
    if representative_excess(h, &greedy) <= representative_excess(h, e) {
        Ok(greedy)
    } else {
        Ok(e.clone())
    }
}

/// Excess after normalization; with `Strategy::Exhaustive` the rewritten
/// representative is only an upper bound for a search over all words.
pub fn excess(h: &Hopf, e: &CobarElement, strategy: Strategy) -> Result<Option<i64>, Error> {
    let n = desuspend_normalize(h, e)?;
    let rep = representative_excess(h, &n);
    Ok(match strategy {
        Strategy::Rewrite => rep,
        Strategy::Exhaustive { word_limit } => crate::lattice::minimal_excess(h, e, rep, word_limit),
    })
}

/// Words of maximal value in a normalized representative.
pub fn leading_part(h: &Hopf, e: &CobarElement) -> (CobarElement, Option<i64>) {
    let top = representative_excess(h, e);
    let mut out = CobarElement::zero();
    for (w, c) in &e.terms {
        if word_value(h, w) == top {
            out.add_term(w.clone(), c.clone());
        }
    }
    (out, top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraConfig;

    fn hopf() -> Hopf {
        Hopf::new(AlgebraConfig::default()).unwrap()
    }

    fn w(slots: &[(u16, u16)], tv: u16, t: Target) -> Word {
        Word::new(
            slots.iter().map(|&(a, b)| Mono::v(1, a).mul(&Mono::h(1, b))).collect(),
            Exps::single(1, tv),
            t,
        )
    }

    fn el(terms: &[(i64, Word)]) -> CobarElement {
        let mut e = CobarElement::zero();
        for (c, w) in terms {
            e.add_term(w.clone(), PLocal::from_int(*c));
        }
        e
    }

    #[test]
    fn push_left_examples() {
        let h = hopf();
        let i9 = Target::Iota(9);
        let x = el(&[(1, w(&[(0, 1)], 1, i9))]);
        assert_eq!(h.push_left(&x, 1).to_string(), "v1 h1 (x) i[9] - 3 h1^2 (x) i[9]");
        let y = el(&[(1, w(&[(0, 1)], 0, i9))]);
        assert_eq!(h.push_left(&y, 1), y);
        let z = el(&[(3, w(&[(0, 2)], 1, i9))]);
        assert_eq!(h.canonicalize(&z).to_string(), "3 v1 h1^2 (x) i[9] - 9 h1^3 (x) i[9]");
    }

    #[test]
    fn admissibility() {
        assert!(admissible(&Exps::single(1, 1), 3));
        assert!(!admissible(&Exps::single(1, 2), 3));
        assert!(admissible(&Exps::single(2, 1), 2));
    }

    #[test]
    fn small_excess() {
        let h = hopf();
        let f = Target::Formal;
        let a = el(&[(1, w(&[(0, 3), (0, 1)], 0, f))]);
        assert_eq!(excess_by_scan(&h, &a), Some(1));
        assert_eq!(representative_excess(&h, &a), Some(1));
        let b = el(&[(1, w(&[(0, 1), (0, 1)], 0, f))]);
        assert_eq!(excess_by_scan(&h, &b), Some(1));
    }

    #[test]
    fn rewrite_examples() {
        let h = hopf();
        let f = Target::Formal;
        let x = el(&[(3, w(&[(0, 4)], 0, f))]);
        let n = desuspend_normalize(&h, &x).unwrap();
        assert_eq!(n.to_string(), "v1 h1^3 - h1^3 (x) v1");
        assert_eq!(h.canonicalize(&n), x);
        let y = el(&[(1, w(&[(0, 1)], 0, Target::Iota(9)))]);
        assert_eq!(desuspend_normalize(&h, &y).unwrap(), y);
        let z = el(&[(3, w(&[(0, 2), (0, 1)], 0, f))]);
        let nz = desuspend_normalize(&h, &z).unwrap();
        assert!(representative_excess(&h, &nz) <= representative_excess(&h, &z));
        assert_eq!(h.canonicalize(&nz), z);
    }

    #[test]
    fn differential_examples() {
        let h = hopf();
        let s9 = Comodule::sphere(9);
        let iota = CobarElement::module(Exps::ZERO, Target::Iota(9), PLocal::one());
        assert!(h.differential(&iota, &s9).unwrap().is_zero());
        let v2 = CobarElement::module(Exps::single(1, 2), Target::Iota(9), PLocal::one());
        assert_eq!(
            h.differential(&v2, &s9).unwrap().to_string(),
            "-6 v1 h1 (x) i[9] + 9 h1^2 (x) i[9]"
        );
    }

    #[test]
    fn alpha_examples() {
        let h = hopf();
        assert_eq!(h.alpha(1, 1).unwrap().to_string(), "-h1");
        assert_eq!(h.alpha(2, 1).unwrap().to_string(), "-2 v1 h1 + 3 h1^2");
        assert!(matches!(h.alpha(2, 2), Err(Error::Divisibility(_))));
        assert!(h.alpha(0, 1).is_err());
    }

    #[test]
    fn sphere_is_coassociative() {
        let h = hopf();
        assert!(h.check_coassociativity(&Comodule::sphere(7)).unwrap());
    }
}
