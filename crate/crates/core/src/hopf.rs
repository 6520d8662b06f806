//! Structure maps of BP_*BP: Hazewinkel generators, right unit, coproduct,
//! conjugation.
//!
//! Everything is derived from the logarithm coefficients m_n over Q, then
//! converted to the h-basis h_n = c(t_n) and checked to be p-local.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_traits::{One, Zero};

use crate::algebra::{AlgebraConfig, Exps, GammaElement, Mono};
use crate::error::Error;
use crate::plocal::{is_p_local, rat, PLocal, Rational};
use crate::tensor::{CobarElement, Target, Word};

/// Rational polynomial whose monomials are a tuple of exponent vectors:
/// position 0 holds v's, positions 1.. hold the generators of each slot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RPoly {
    pub terms: BTreeMap<Vec<Exps>, Rational>,
}

impl RPoly {
    fn constant(width: usize, c: Rational) -> RPoly {
        let mut r = RPoly::default();
        if !c.is_zero() {
            r.terms.insert(vec![Exps::ZERO; width], c);
        }
        r
    }

    fn gen(width: usize, pos: usize, i: usize) -> RPoly {
        let mut key = vec![Exps::ZERO; width];
        key[pos] = Exps::single(i, 1);
        let mut r = RPoly::default();
        r.terms.insert(key, Rational::one());
        r
    }

    fn add_term(&mut self, k: Vec<Exps>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    fn add(&self, o: &RPoly) -> RPoly {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(k.clone(), c.clone());
        }
        r
    }

    fn sub(&self, o: &RPoly) -> RPoly {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(k.clone(), -c.clone());
        }
        r
    }

    fn scale(&self, c: &Rational) -> RPoly {
        let mut r = RPoly::default();
        for (k, x) in &self.terms {
            r.add_term(k.clone(), x * c);
        }
        r
    }

    fn mul(&self, o: &RPoly, cfg: &AlgebraConfig) -> RPoly {
        let mut r = RPoly::default();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                let k: Vec<Exps> = k1.iter().zip(k2).map(|(a, b)| a.add(b)).collect();
                if k.iter().map(|e| e.degree(cfg)).sum::<u32>() > cfg.degree_cap {
                    continue;
                }
                r.add_term(k, c1 * c2);
            }
        }
        r
    }

    fn pow(&self, e: u64, width: usize, cfg: &AlgebraConfig) -> RPoly {
        let mut r = RPoly::constant(width, Rational::one());
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b, cfg);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b, cfg);
            }
        }
        r
    }

    /// Replace the generators at position `pos` by `images[i-1]`; all other
    /// positions are carried through `lift`, which maps the remaining key into
    /// the target key space.
    fn substitute(
        &self,
        pos: usize,
        images: &[RPoly],
        width: usize,
        lift: impl Fn(&[Exps]) -> Vec<Exps>,
        cfg: &AlgebraConfig,
    ) -> RPoly {
        let mut cache: HashMap<(usize, u16), RPoly> = HashMap::new();
        let mut r = RPoly::default();
        for (k, c) in &self.terms {
            let mut rest = k.clone();
            rest[pos] = Exps::ZERO;
            let mut term = RPoly::default();
            term.terms.insert(lift(&rest), c.clone());
            for (i, &e) in k[pos].0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = cache
                    .entry((i, e))
                    .or_insert_with(|| images[i].pow(e as u64, width, cfg))
                    .clone();
                term = term.mul(&p, cfg);
            }
            r = r.add(&term);
        }
        r
    }

    fn is_p_local(&self, p: u64) -> bool {
        self.terms.values().all(|c| is_p_local(c, p))
    }
}

/// Precomputed structure maps for one configuration.
#[derive(Debug)]
pub struct StructureTables {
    /// m_0..m_K as polynomials in v (width 1).
    pub m: Vec<RPoly>,
    /// right_unit(v_i), index 0 unused.
    pub eta_v: Vec<GammaElement>,
    /// psi(h_i) as two-slot canonical words, index 0 unused.
    pub psi_h: Vec<CobarElement>,
    /// h_i in terms of (v, t), width 2.
    pub h_in_t: Vec<RPoly>,
    /// t_i in terms of (v, h), width 2.
    pub t_in_h: Vec<RPoly>,
}

/// Sign convention for the h-generators. `Standard` is h_n = c(t_n);
/// `Flipped` uses -c(t_n) and exists as a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Standard,
    Flipped,
}

fn rpoly_to_gamma(r: &RPoly, p: u64) -> Result<GammaElement, Error> {
    let mut g = GammaElement::zero();
    for (k, c) in &r.terms {
        let c = PLocal::new(c.clone(), p)
            .map_err(|_| Error::Internal(format!("non-p-local coefficient {c}")))?;
        g.add_term(Mono::new(k[0], k[1]), c);
    }
    Ok(g)
}

fn gamma_to_rpoly(g: &GammaElement) -> RPoly {
    let mut r = RPoly::default();
    for (m, c) in &g.terms {
        r.add_term(vec![m.v, m.h], c.as_rational().clone());
    }
    r
}

impl StructureTables {
    pub fn build(cfg: &AlgebraConfig, conv: Convention) -> Result<Self, Error> {
        let k = cfg.k;
        let p = cfg.p;
        let pp = |i: u32| p.pow(i);
        let sign = match conv {
            Convention::Standard => Rational::one(),
            Convention::Flipped => -Rational::one(),
        };

        // Hazewinkel: p m_n = sum_{i<n} m_i v_{n-i}^{p^i}
        let mut m = vec![RPoly::constant(1, Rational::one())];
        for n in 1..=k {
            let mut s = RPoly::default();
            for i in 0..n {
                let v = RPoly::gen(1, 0, n - i).pow(pp(i as u32), 1, cfg);
                s = s.add(&m[i].mul(&v, cfg));
            }
            m.push(s.scale(&rat(1, p as i64)));
        }
        let lift_m = |r: &RPoly, width: usize| -> RPoly {
            let mut o = RPoly::default();
            for (kk, c) in &r.terms {
                let mut key = vec![Exps::ZERO; width];
                key[0] = kk[0];
                o.add_term(key, c.clone());
            }
            o
        };
        let m2: Vec<RPoly> = m.iter().map(|r| lift_m(r, 2)).collect();
        let m3: Vec<RPoly> = m.iter().map(|r| lift_m(r, 3)).collect();
        let one2 = RPoly::constant(2, Rational::one());
        let one3 = RPoly::constant(3, Rational::one());
        let t = |j: usize| if j == 0 { one2.clone() } else { RPoly::gen(2, 1, j) };

        // conjugation: sum_{i+j+l=n} m_i t_j^{p^i} c(t_l)^{p^{i+j}} = m_n
        let mut ct: Vec<RPoly> = vec![one2.clone()];
        for n in 1..=k {
            let mut s = m2[n].clone();
            for i in 0..=n {
                for j in 0..=(n - i) {
                    let l = n - i - j;
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let term = m2[i]
                        .mul(&t(j).pow(pp(i as u32), 2, cfg), cfg)
                        .mul(&ct[l].pow(pp((i + j) as u32), 2, cfg), cfg);
                    s = s.sub(&term);
                }
            }
            ct.push(s);
        }
        let h_in_t: Vec<RPoly> = ct.iter().map(|r| r.scale(&sign)).collect();

        // invert: h_n = sign*(-t_n + R_n(v, t_<n)), so t_n = -sign*h_n + R_n
        let mut t_in_h: Vec<RPoly> = vec![one2.clone()];
        for n in 1..=k {
            let rest = ct[n].add(&t(n));
            let images: Vec<RPoly> = (1..=k)
                .map(|j| {
                    if j < n {
                        t_in_h[j].clone()
                    } else {
                        RPoly::default()
                    }
                })
                .collect();
            let rest_h = rest.substitute(1, &images, 2, |x| x.to_vec(), cfg);
            let hn = RPoly::gen(2, 1, n).scale(&-sign.clone());
            t_in_h.push(hn.add(&rest_h));
        }
        let t_images: Vec<RPoly> = t_in_h[1..].to_vec();

        // right unit: p eta(m_n) = eta(v_n) + sum_{i=1}^{n-1} eta(m_i) eta(v_{n-i})^{p^i}
        let mut eta_m: Vec<RPoly> = vec![one2.clone()];
        for n in 1..=k {
            let mut s = RPoly::default();
            for i in 0..=n {
                s = s.add(&m2[i].mul(&t(n - i).pow(pp(i as u32), 2, cfg), cfg));
            }
            eta_m.push(s);
        }
        let mut eta_vt: Vec<RPoly> = vec![one2.clone()];
        for n in 1..=k {
            let mut s = eta_m[n].scale(&rat(p as i64, 1));
            for i in 1..n {
                s = s.sub(&eta_m[i].mul(&eta_vt[n - i].pow(pp(i as u32), 2, cfg), cfg));
            }
            eta_vt.push(s);
        }
        let mut eta_v = vec![GammaElement::one()];
        for n in 1..=k {
            let r = eta_vt[n].substitute(1, &t_images, 2, |x| x.to_vec(), cfg);
            eta_v.push(rpoly_to_gamma(&r, p)?);
        }

        // coproduct on t: sum_{i+j=n} m_i D(t_j)^{p^i} = sum_{i+j+l=n} m_i t_j^{p^i} (x) t_l^{p^{i+j}}
        let t3 = |pos: usize, j: usize| {
            if j == 0 {
                one3.clone()
            } else {
                RPoly::gen(3, pos, j)
            }
        };
        let mut dt: Vec<RPoly> = vec![one3.clone()];
        for n in 1..=k {
            let mut s = RPoly::default();
            for i in 0..=n {
                for j in 0..=(n - i) {
                    let l = n - i - j;
                    let term = m3[i]
                        .mul(&t3(1, j).pow(pp(i as u32), 3, cfg), cfg)
                        .mul(&t3(2, l).pow(pp((i + j) as u32), 3, cfg), cfg);
                    s = s.add(&term);
                }
            }
            for i in 1..=n {
                s = s.sub(&m3[i].mul(&dt[n - i].pow(pp(i as u32), 3, cfg), cfg));
            }
            dt.push(s);
        }

        // psi(h_n): substitute D(t) into h_n(v, t), then convert both slots to h
        let slot1_images: Vec<RPoly> = t_images
            .iter()
            .map(|r| {
                let mut o = RPoly::default();
                for (kk, c) in &r.terms {
                    o.add_term(vec![kk[0], kk[1], Exps::ZERO], c.clone());
                }
                o
            })
            .collect();
        let eta_v3: Vec<RPoly> = eta_v
            .iter()
            .map(|g| {
                let mut o = RPoly::default();
                for (mm, c) in &g.terms {
                    o.add_term(vec![mm.v, mm.h, Exps::ZERO], c.as_rational().clone());
                }
                o
            })
            .collect();
        let slot2_images: Vec<RPoly> = t_images
            .iter()
            .map(|r| {
                let mut o = RPoly::default();
                for (kk, c) in &r.terms {
                    let mut term = RPoly::default();
                    term.terms.insert(vec![Exps::ZERO, Exps::ZERO, kk[1]], c.clone());
                    for (i, &e) in kk[0].0.iter().enumerate() {
                        if e > 0 {
                            term = term.mul(&eta_v3[i + 1].pow(e as u64, 3, cfg), cfg);
                        }
                    }
                    o = o.add(&term);
                }
                o
            })
            .collect();
        let mut psi_h = vec![CobarElement::zero()];
        for n in 1..=k {
            let d = h_in_t[n].substitute(
                1,
                &dt[1..],
                3,
                |x| vec![x[0], Exps::ZERO, Exps::ZERO],
                cfg,
            );
            let d = d.substitute(1, &slot1_images, 3, |x| x.to_vec(), cfg);
            let d = d.substitute(2, &slot2_images, 3, |x| x.to_vec(), cfg);
            if !d.is_p_local(p) {
                return Err(Error::Internal(format!("coproduct of h{n} is not p-local")));
            }
            let mut e = CobarElement::zero();
            for (kk, c) in &d.terms {
                let w = Word::new(
                    vec![Mono::new(kk[0], kk[1]), Mono::new(Exps::ZERO, kk[2])],
                    Exps::ZERO,
                    Target::Formal,
                );
                e.add_term(w, PLocal::new(c.clone(), p)?);
            }
            psi_h.push(e);
        }

        Ok(StructureTables {
            m,
            eta_v,
            psi_h,
            h_in_t,
            t_in_h,
        })
    }

    /// Compare against the closed formulas known at p = 3.
    pub fn check_reference_formulas(&self, cfg: &AlgebraConfig) -> Result<(), Error> {
        if cfg.p != 3 {
            return Ok(());
        }
        for (name, got, want) in reference_formulas(self, cfg) {
            if got != want {
                return Err(Error::Internal(format!(
                    "{name}: computed {got}, expected {want}"
                )));
            }
        }
        Ok(())
    }
}

/// (label, computed, expected) triples for the low structure maps at p = 3.
pub fn reference_formulas(t: &StructureTables, cfg: &AlgebraConfig) -> Vec<(&'static str, String, String)> {
    let mut out = vec![(
        "right_unit(v1)",
        t.eta_v[1].to_string(),
        "v1 - 3 h1".to_string(),
    )];
    if cfg.k >= 2 {
        out.push((
            "right_unit(v2)",
            t.eta_v[2].to_string(),
            "v2 + 4 v1^3 h1 - 18 v1^2 h1^2 + 35 v1 h1^3 - 3 h2 - 24 h1^4".to_string(),
        ));
    }
    out.push((
        "coproduct(h1)",
        t.psi_h[1].to_string(),
        "h1 (x) 1 + 1 (x) h1".to_string(),
    ));
    if cfg.k >= 2 {
        out.push((
            "coproduct(h2)",
            t.psi_h[2].to_string(),
            "-v1 h1^2 (x) h1 - v1 h1 (x) h1^2 + h2 (x) 1 + 4 h1^3 (x) h1 + 6 h1^2 (x) h1^2 + 3 h1 (x) h1^3 + 1 (x) h2"
                .to_string(),
        ));
    }
    out
}

/// The Hopf algebroid for one configuration, with a right-unit cache.
#[derive(Debug)]
pub struct Hopf {
    pub cfg: AlgebraConfig,
    pub tables: StructureTables,
    eta_cache: Mutex<HashMap<Exps, GammaElement>>,
}

impl Hopf {
    pub fn new(cfg: AlgebraConfig) -> Result<Self, Error> {
        Self::with_convention(cfg, Convention::Standard)
    }

    pub fn with_convention(cfg: AlgebraConfig, conv: Convention) -> Result<Self, Error> {
        cfg.validate()?;
        let tables = StructureTables::build(&cfg, conv)?;
        if conv == Convention::Standard {
            tables.check_reference_formulas(&cfg)?;
        }
        Ok(Hopf {
            cfg,
            tables,
            eta_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn p(&self) -> u64 {
        self.cfg.p
    }

    pub fn hazewinkel_m(&self, n: usize) -> String {
        let mut g = String::new();
        let parts: Vec<String> = self.tables.m[n]
            .terms
            .iter()
            .rev()
            .map(|(k, c)| {
                let mono = Mono::new(k[0], Exps::ZERO);
                if mono.is_one() {
                    c.to_string()
                } else {
                    format!("{c} {mono}")
                }
            })
            .collect();
        g.push_str(&parts.join(" + "));
        g
    }

    /// right_unit(v^A).
    pub fn eta_mono(&self, a: &Exps) -> GammaElement {
        if a.is_zero() {
            return GammaElement::one();
        }
        if let Some(g) = self.eta_cache.lock().unwrap().get(a) {
            return g.clone();
        }
        // peel one generator and recurse
        let i = a.0.iter().position(|&e| e > 0).unwrap() + 1;
        let mut rest = *a;
        rest.0[i - 1] -= 1;
        let g = self.eta_mono(&rest).mul(&self.tables.eta_v[i], &self.cfg);
        self.eta_cache.lock().unwrap().insert(*a, g.clone());
        g
    }

    /// right_unit on a polynomial in the v's (h-parts must be empty).
    pub fn right_unit(&self, b: &GammaElement) -> GammaElement {
        let mut r = GammaElement::zero();
        for (m, c) in &b.terms {
            debug_assert!(m.h.is_zero());
            r = r.add(&self.eta_mono(&m.v).scale(c));
        }
        r.truncated |= b.truncated;
        r
    }

    /// Componentwise product of canonical words with equal slot count.
    pub fn mul_canonical(&self, a: &CobarElement, b: &CobarElement) -> CobarElement {
        let mut r = CobarElement::zero();
        r.truncated = a.truncated || b.truncated;
        for (w1, c1) in &a.terms {
            for (w2, c2) in &b.terms {
                let slots: Vec<Mono> = w1.slots.iter().zip(&w2.slots).map(|(x, y)| x.mul(y)).collect();
                let w = Word::new(slots, w1.tv.add(&w2.tv), w1.target);
                if w.degree(&self.cfg) > self.cfg.degree_cap {
                    r.truncated = true;
                    continue;
                }
                r.add_term(w, c1 * c2);
            }
        }
        r
    }

    fn one2() -> CobarElement {
        CobarElement::word(
            Word::new(vec![Mono::ONE, Mono::ONE], Exps::ZERO, Target::Formal),
            PLocal::one(),
        )
    }

    /// psi(v^A h^I) as a canonical two-slot element.
    pub fn coproduct_mono(&self, m: &Mono) -> CobarElement {
        let mut r = CobarElement::word(
            Word::new(vec![Mono::new(m.v, Exps::ZERO), Mono::ONE], Exps::ZERO, Target::Formal),
            PLocal::one(),
        );
        for i in 1..=self.cfg.k {
            for _ in 0..m.h.get(i) {
                r = self.mul_canonical(&r, &self.tables.psi_h[i]);
            }
        }
        r
    }

    pub fn coproduct(&self, g: &GammaElement) -> CobarElement {
        let mut r = CobarElement::zero();
        for (m, c) in &g.terms {
            r.add_scaled(&self.coproduct_mono(m), c);
        }
        r.truncated |= g.truncated;
        r
    }

    /// g (x) 1 as a canonical two-slot element.
    pub fn left_embed(&self, g: &GammaElement) -> CobarElement {
        let mut r = CobarElement::zero();
        for (m, c) in &g.terms {
            r.add_term(Word::new(vec![*m, Mono::ONE], Exps::ZERO, Target::Formal), c.clone());
        }
        r
    }

    /// 1 (x) g as a canonical two-slot element: left v's cross as right_unit.
    pub fn right_embed(&self, g: &GammaElement) -> CobarElement {
        let mut r = CobarElement::zero();
        for (m, c) in &g.terms {
            for (e, ce) in &self.eta_mono(&m.v).terms {
                r.add_term(
                    Word::new(vec![*e, Mono::new(Exps::ZERO, m.h)], Exps::ZERO, Target::Formal),
                    ce * c,
                );
            }
        }
        r
    }

    /// psi(g) - g (x) 1 - 1 (x) g; requires a zero counit component.
    pub fn reduced_coproduct(&self, g: &GammaElement) -> Result<CobarElement, Error> {
        if !g.counit().is_zero() {
            return Err(Error::Precondition(format!(
                "reduced coproduct needs zero counit component, got {}",
                g.counit()
            )));
        }
        Ok(self
            .coproduct(g)
            .sub(&self.left_embed(g))
            .sub(&self.right_embed(g)))
    }

    /// Apply epsilon to one slot of a canonical two-slot element.
    pub fn counit_slot(&self, e: &CobarElement, slot: usize) -> GammaElement {
        let mut g = GammaElement::zero();
        for (w, c) in &e.terms {
            match slot {
                0 => {
                    if w.slots[0].h.is_zero() {
                        // v^A (x) x  =  v^A x
                        g.add_term(Mono::new(w.slots[0].v, w.slots[1].h), c.clone());
                    }
                }
                _ => {
                    if w.slots[1].h.is_zero() {
                        g.add_term(w.slots[0], c.clone());
                    }
                }
            }
        }
        g
    }

    /// Express a polynomial in (v, t) in the h-basis.
    pub fn t_to_h(&self, r: &RPoly) -> RPoly {
        r.substitute(1, &self.tables.t_in_h[1..], 2, |x| x.to_vec(), &self.cfg)
    }

    /// Express a polynomial in (v, h) in the t-basis.
    pub fn h_to_t(&self, r: &RPoly) -> RPoly {
        r.substitute(1, &self.tables.h_in_t[1..], 2, |x| x.to_vec(), &self.cfg)
    }

    pub fn gamma_rpoly(g: &GammaElement) -> RPoly {
        gamma_to_rpoly(g)
    }

    pub fn one_two_slot() -> CobarElement {
        Self::one2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hopf() -> Hopf {
        Hopf::new(AlgebraConfig::default()).unwrap()
    }

    #[test]
    fn hazewinkel() {
        let h = hopf();
        assert_eq!(h.hazewinkel_m(0), "1");
        assert_eq!(h.hazewinkel_m(1), "1/3 v1");
        assert_eq!(h.hazewinkel_m(2), "1/3 v2 + 1/9 v1^4");
    }

    #[test]
    fn right_unit_low() {
        let h = hopf();
        assert_eq!(h.tables.eta_v[1].to_string(), "v1 - 3 h1");
        assert_eq!(
            h.tables.eta_v[2].to_string(),
            "v2 + 4 v1^3 h1 - 18 v1^2 h1^2 + 35 v1 h1^3 - 3 h2 - 24 h1^4"
        );
        assert_eq!(h.right_unit(&GammaElement::one()), GammaElement::one());
    }

    #[test]
    fn coproduct_low() {
        let h = hopf();
        let want = "-v1 h1^2 (x) h1 - v1 h1 (x) h1^2 + h2 (x) 1 + 4 h1^3 (x) h1 + 6 h1^2 (x) h1^2 + 3 h1 (x) h1^3 + 1 (x) h2";
        assert_eq!(h.tables.psi_h[2].to_string(), want);
        let v1 = h.coproduct(&GammaElement::v(1));
        assert_eq!(v1.to_string(), "v1 (x) 1");
    }

    #[test]
    fn reduced() {
        let h = hopf();
        let c = &h.cfg;
        assert!(h.reduced_coproduct(&GammaElement::h(1)).unwrap().is_zero());
        let h1sq = GammaElement::h(1).pow(2, c);
        assert_eq!(h.reduced_coproduct(&h1sq).unwrap().to_string(), "2 h1 (x) h1");
        let a2 = GammaElement::mono(Mono::v(1, 1).mul(&Mono::h(1, 1)), PLocal::from_int(2))
            .sub(&h1sq.scale(&PLocal::from_int(3)));
        assert!(h.reduced_coproduct(&a2).unwrap().is_zero());
        assert!(matches!(
            h.reduced_coproduct(&GammaElement::v(1)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn flipped_convention_breaks_reference() {
        let cfg = AlgebraConfig::default();
        let t = StructureTables::build(&cfg, Convention::Flipped).unwrap();
        assert!(t.check_reference_formulas(&cfg).is_err());
    }
}
