//! Reproduction checks for the published formulas, collected into a ledger.

use std::cell::OnceCell;
use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{Exps, GammaElement, Mono};
use crate::cobar::{excess, excess_by_scan, rewrite_normalize, Comodule, Strategy, DEFAULT_STEP_BOUND};
use crate::error::Error;
use crate::expr::print_factored;
use crate::groups::{b37_vs_s7, bk_exponent, e7_exponent_witness, e7_groups, sphere_e2_order};
use crate::hopf::{reference_formulas, Hopf};
use crate::plocal::{nu_i64, pow_int, rat, Nu, PLocal};
use crate::solver::{derive_t_chain, TChain};
use crate::tensor::{CobarElement, Target, Word};

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Printed verbatim in the source text.
    Published,
    /// Obtained by evaluating a published formula by hand.
    Derived,
    /// Follows from definitions.
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct LedgerEntry {
    pub id: &'static str,
    /// The claim, quoted.
    pub claim: &'static str,
    pub computed: String,
    pub expected: String,
    pub provenance: Provenance,
    #[serde(flatten)]
    pub status: Status,
}

impl LedgerEntry {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

pub const WORD_LIMIT: usize = 20_000;

fn word(slots: Vec<Mono>, tv: Exps, target: Target) -> Word {
    Word::new(slots, tv, target)
}

fn v1(e: u16) -> Exps {
    Exps::single(1, e)
}

fn h1(e: u16) -> Exps {
    Exps::single(1, e)
}

/// max(b - (p-1)(c+d), d) - min(a, |b - (p-1)c - pd|) - (p-1)e.
pub fn excess_closed_formula(p: i64, a: i64, b: i64, c: i64, d: i64, e: i64) -> i64 {
    (b - (p - 1) * (c + d)).max(d) - a.min((b - (p - 1) * c - p * d).abs()) - (p - 1) * e
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FamilyReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl FamilyReport {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn ok(&self) -> bool {
        self.checked > 0 && self.failures.is_empty()
    }

    fn summary(&self) -> String {
        match self.failures.first() {
            None => format!("{} cases agree", self.checked),
            Some(f) => format!("{} of {} cases disagree, first: {f}", self.failures.len(), self.checked),
        }
    }
}

/// p^a h^b (x) v^c h^d (x) v^e: rewritten excess against the closed formula,
/// over a <= b <= 8, a <= d <= 4, c <= 3, e <= 2.
pub fn excess_formula_family(h: &Hopf) -> Result<FamilyReport, Error> {
    let p = h.p();
    let mut r = FamilyReport::default();
    for a in 0..=4u32 {
        for b in a as u16..=8 {
            for c in 0..=3u16 {
                for d in a as u16..=4 {
                    for e in 0..=2u16 {
                        let w = word(
                            vec![Mono::new(Exps::ZERO, h1(b)), Mono::new(v1(c), h1(d))],
                            v1(e),
                            Target::Formal,
                        );
                        let x = CobarElement::word(w, PLocal::from_bigint(pow_int(p, a)));
                        let n = rewrite_normalize(h, &x, DEFAULT_STEP_BOUND)?;
                        let got = excess_by_scan(h, &n);
                        let want = excess_closed_formula(p as i64, a as i64, b as i64, c as i64, d as i64, e as i64);
                        r.record(got == Some(want), || format!("(a,b,c,d,e)=({a},{b},{c},{d},{e}): {got:?} vs {want}"));
                    }
                }
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AlphaReport {
    /// p^e | d(v1^m) exactly for e <= nu(m) + 1.
    pub divisibility: FamilyReport,
    /// alpha(m, e) + v1^{m-e} h1^e has excess below e.
    pub leading: FamilyReport,
    /// alpha(s p^{e-1}, e) = -s v1^{m-1} h1 mod p.
    pub mod_p: FamilyReport,
}

/// The alpha family for m <= m_max, restricted to degrees within the cap.
pub fn alpha_family(h: &Hopf, m_max: u32) -> Result<AlphaReport, Error> {
    let p = h.p();
    let v_deg = h.cfg.gen_degree(1);
    let fits = |m: u32| m * v_deg <= h.cfg.degree_cap;
    let mut r = AlphaReport::default();
    for m in (1..=m_max).filter(|&m| fits(m)) {
        let top = nu_i64(m as i64, p).finite().unwrap() as u32 + 1;
        let over = h.alpha(m, top + 1);
        r.divisibility.record(matches!(over, Err(Error::Divisibility(_))), || {
            format!("p^{} divides d(v1^{m})", top + 1)
        });
        for e in 1..=top {
            let a = h.alpha(m, e)?;
            let mut x = CobarElement::from_gamma(&a, Target::Formal);
            x.add_term(
                word(vec![Mono::new(v1((m - e) as u16), h1(e as u16))], Exps::ZERO, Target::Formal),
                PLocal::one(),
            );
            let got = if x.is_zero() {
                None
            } else {
                excess(h, &x, Strategy::Exhaustive { word_limit: WORD_LIMIT })?
            };
            r.leading.record(got.map_or(true, |g| g < e as i64), || format!("m={m} e={e}: excess {got:?}"));
        }
    }
    for s in 1..=2u32 {
        for e in 1..=4u32 {
            let m = s * (p as u32).pow(e - 1);
            if !fits(m) {
                continue;
            }
            let mut a = h.alpha(m, e)?;
            a.add_term(Mono::new(v1((m - 1) as u16), h1(1)), PLocal::from_int(s as i64));
            let ok = a.terms.values().all(|c| c.nu(p) >= Nu::Finite(1));
            r.mod_p.record(ok, || format!("s={s} e={e}: remainder {a}"));
        }
    }
    Ok(r)
}

/// h1^p right_unit(v1) - v1^p h1 over the bottom cell of S^3.
pub fn h_power_relation(h: &Hopf) -> CobarElement {
    let p = h.p() as u16;
    let t = Target::Iota(3);
    let mut x = CobarElement::zero();
    for (m, c) in &h.tables.eta_v[1].terms {
        x.add_term(word(vec![m.mul(&Mono::h(1, p))], Exps::ZERO, t), c.clone());
    }
    x.add_term(word(vec![Mono::new(v1(p), h1(1))], Exps::ZERO, t), PLocal::from_int(-1));
    x
}

/// d(v1^l h1^{n+1} i) + (l+n+1) v1^l h1 (x) h1^n i, over S^{2n+1}.
pub fn differential_relation(h: &Hopf, l: u16, n: u16) -> Result<CobarElement, Error> {
    let t = Target::Iota(2 * n as u32 + 1);
    let x = CobarElement::word(word(vec![Mono::new(v1(l), h1(n + 1))], Exps::ZERO, t), PLocal::one());
    let mut d = h.differential(&x, &Comodule::sphere(2 * n as u32 + 1))?;
    d.add_term(
        word(vec![Mono::new(v1(l), h1(1)), Mono::h(1, n)], Exps::ZERO, t),
        PLocal::from_int((l + n + 1) as i64),
    );
    Ok(d)
}

/// Instances of the differential relation with l <= l_max, n <= n_max that fit
/// under the cap; each must have excess below n.
pub fn differential_relation_family(h: &Hopf, l_max: u16, n_max: u16) -> Result<FamilyReport, Error> {
    let mut r = FamilyReport::default();
    let d1 = h.cfg.gen_degree(1);
    for l in 0..=l_max {
        for n in 1..=n_max {
            if (l + n + 1) as u32 * d1 > h.cfg.degree_cap {
                continue;
            }
            let x = differential_relation(h, l, n)?;
            let got = if x.is_zero() {
                None
            } else {
                excess(h, &x, Strategy::Exhaustive { word_limit: WORD_LIMIT })?
            };
            r.record(got.map_or(true, |g| g < n as i64), || format!("l={l} n={n}: excess {got:?}"));
        }
    }
    Ok(r)
}

/// For d(p^a h1^m) i over S^{2n+1} of order p^j, the leading exponent J found
/// by exhaustive excess satisfies J + nu|E_2^2| = j + n.
pub fn order_leading_relation(h: &Hopf, m_max: u32, n_max: u32) -> Result<FamilyReport, Error> {
    let p = h.p();
    let d1 = h.cfg.gen_degree(1);
    let mut r = FamilyReport::default();
    for m in (1..=m_max).filter(|&m| m * d1 <= h.cfg.degree_cap) {
        let nu = nu_i64(m as i64, p).finite().unwrap();
        for n in 1..=n_max {
            for j in 1..=(n as i64).min(nu + 1) {
                let a = if n as i64 <= nu + 1 { m as i64 - nu - 1 - j } else { m as i64 - n as i64 - j };
                if a < 0 {
                    continue;
                }
                let t = Target::Iota(2 * n + 1);
                let x = CobarElement::word(
                    word(vec![Mono::h(1, m as u16)], Exps::ZERO, t),
                    PLocal::from_bigint(pow_int(p, a as u32)),
                );
                let d = h.differential(&x, &Comodule::sphere(2 * n + 1))?;
                let lead = excess(h, &d, Strategy::Exhaustive { word_limit: WORD_LIMIT })?;
                let order = sphere_e2_order(n, m as i64, p) as i64;
                r.record(lead.map(|l| l + order) == Some(j + n as i64), || {
                    format!("m={m} n={n} j={j}: leading exponent {lead:?}, nu|E_2| = {order}")
                });
            }
        }
    }
    Ok(r)
}

struct Gate {
    k: usize,
    degree: u32,
}

const ALWAYS: Gate = Gate { k: 1, degree: 0 };

struct Spec {
    id: &'static str,
    claim: &'static str,
    provenance: Provenance,
    gate: Gate,
}

/// Runs a check returning (computed, expected, pass).
fn entry(
    h: &Hopf,
    s: Spec,
    f: impl FnOnce() -> Result<(String, String, bool), Error>,
) -> LedgerEntry {
    let mut e = LedgerEntry {
        id: s.id,
        claim: s.claim,
        computed: String::new(),
        expected: String::new(),
        provenance: s.provenance,
        status: Status::Skipped("truncated".into()),
    };
    if h.cfg.k < s.gate.k || h.cfg.degree_cap < s.gate.degree {
        return e;
    }
    match f() {
        Ok((c, x, ok)) => {
            e.computed = c;
            e.expected = x;
            e.status = if ok { Status::Pass } else { Status::Fail };
        }
        Err(err) => {
            e.computed = format!("error: {err}");
            e.status = Status::Fail;
        }
    }
    e
}

fn family(r: &FamilyReport) -> (String, String, bool) {
    (r.summary(), "all cases agree".into(), r.ok())
}

fn chain_entry(
    h: &Hopf,
    chain: &Result<TChain, Error>,
    s: Spec,
    f: impl FnOnce(&TChain) -> (String, String, bool),
) -> LedgerEntry {
    entry(h, s, || match chain {
        Ok(c) => Ok(f(c)),
        Err(e) => Err(e.clone()),
    })
}

/// Every ledger entry, ordered by id.
pub fn ledger(h: &Hopf) -> Vec<LedgerEntry> {
    use Provenance::*;
    let mut out = Vec::new();
    let refs: HashMap<&str, (String, String)> = reference_formulas(&h.tables, &h.cfg)
        .into_iter()
        .map(|(n, c, x)| (n, (c, x)))
        .collect();
    let structure = |name: &'static str| -> Result<(String, String, bool), Error> {
        let (c, x) = refs
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("{name} needs more generators")))?;
        let ok = c == x;
        Ok((c, x, ok))
    };
    let spec = |id, claim, provenance, gate| Spec { id, claim, provenance, gate };

    out.push(entry(h, spec("right-unit-v1", "η(v_1)=v_1-3h_1", Published, Gate { k: 1, degree: 4 }), || {
        structure("right_unit(v1)")
    }));
    out.push(entry(
        h,
        spec("right-unit-v2", "η(v_2)=v_2+4v^3h-18v^2h^2+35vh^3-24h^4-3h_2", Published, Gate { k: 2, degree: 16 }),
        || structure("right_unit(v2)"),
    ));
    out.push(entry(h, spec("coproduct-h1", "ψ(h_1)=h_1⊗1+1⊗h_1", Published, Gate { k: 1, degree: 4 }), || {
        structure("coproduct(h1)")
    }));
    out.push(entry(
        h,
        spec(
            "coproduct-h2",
            "ψ(h_2)=h_2⊗1+1⊗h_2+4h^3⊗h+6h^2⊗h^2+3h⊗h^3-vh⊗h^2-vh^2⊗h",
            Published,
            Gate { k: 2, degree: 16 },
        ),
        || structure("coproduct(h2)"),
    ));
    out.push(entry(h, spec("alpha-two", "α_2=-d(v_1^2)/p=2vh-ph^2", Published, Gate { k: 1, degree: 8 }), || {
        let x = CobarElement::module(v1(2), Target::Iota(9), PLocal::one());
        let d = h.differential(&x, &Comodule::sphere(9))?;
        let got = print_factored(&d);
        let want = "-3 * (2 v1 h1 - 3 h1^2) (x) i[9]".to_string();
        Ok((got.clone(), want.clone(), got == want))
    }));
    out.push(entry(h, spec("alpha-two-primitive", "α_2 is primitive", Published, Gate { k: 1, degree: 8 }), || {
        let a2 = GammaElement::mono(Mono::new(v1(1), h1(1)), PLocal::from_int(2))
            .add(&GammaElement::mono(Mono::h(1, 2), PLocal::from_int(-3)));
        let r = h.reduced_coproduct(&a2)?;
        Ok((r.to_string(), "0".into(), r.is_zero()))
    }));
    let alpha = OnceCell::new();
    let alpha_part = |f: fn(&AlphaReport) -> &FamilyReport| -> Result<(String, String, bool), Error> {
        match alpha.get_or_init(|| alpha_family(h, 30)) {
            Ok(r) => Ok(family(f(r))),
            Err(e) => Err(e.clone()),
        }
    };
    out.push(entry(
        h,
        spec("alpha-divisibility", "e=\\min(n,\\nu(m)+1)", Published, Gate { k: 1, degree: 4 }),
        || alpha_part(|r| &r.divisibility),
    ));
    out.push(entry(
        h,
        spec("alpha-leading-term", "α_{m/e}≡ -v_1^{m-e}h_1^e", Published, Gate { k: 1, degree: 4 }),
        || alpha_part(|r| &r.leading),
    ));
    out.push(entry(
        h,
        spec("alpha-mod-p", "α_{m/e}≡-sv_1^{m-1}h_1 mod p", Published, Gate { k: 1, degree: 4 }),
        || alpha_part(|r| &r.mod_p),
    ));
    out.push(entry(h, spec("excess-example", "exc(h_1^3⊗h_1)=1", Derived, Gate { k: 1, degree: 16 }), || {
        let x = CobarElement::word(
            word(vec![Mono::h(1, 3), Mono::h(1, 1)], Exps::ZERO, Target::Formal),
            PLocal::one(),
        );
        let e = excess(h, &x, Strategy::Rewrite)?;
        Ok((format!("{e:?}"), "Some(1)".into(), e == Some(1)))
    }));
    out.push(entry(
        h,
        spec("excess-closed-formula", "exc(p^a h^b ⊗ v^c h^d v^e)", Published, Gate { k: 1, degree: 68 }),
        || Ok(family(&excess_formula_family(h)?)),
    ));
    out.push(entry(h, spec("relation-h-power", "h_1^pv_1\\equiv v_1^ph_1 mod S^1", Published, Gate { k: 1, degree: 16 }), || {
        let x = h_power_relation(h);
        let e = excess(h, &x, Strategy::Exhaustive { word_limit: WORD_LIMIT })?;
        Ok((format!("excess {e:?}"), "excess <= 0".into(), e.map_or(true, |e| e <= 0)))
    }));
    out.push(entry(
        h,
        spec(
            "relation-differential",
            "d(v_1^\\ell h_1^{n+1})\\equiv-(\\ell+n+1)v_1^\\ell h_1\\otimes h_1^n mod S^{2n-1}",
            Published,
            Gate { k: 1, degree: 48 },
        ),
        || Ok(family(&differential_relation_family(h, 6, 5)?)),
    ));
    out.push(entry(
        h,
        spec("order-leading-relation", "j+\\nu(|E_2^{2,t}(S^{2n+1})|)=f+n", Published, Gate { k: 1, degree: 48 }),
        || Ok(family(&order_leading_relation(h, 12, 5)?)),
    ));

    let chain_gate = || Gate { k: 2, degree: 24 };
    let chain = if h.cfg.k >= 2 && h.cfg.degree_cap >= 24 {
        derive_t_chain(h)
    } else {
        Err(Error::Precondition("chain needs K >= 2".into()))
    };
    let constant = |c: &TChain, n: &str| c.get(n).map(|e| e.element.constant.to_string()).unwrap_or_default();
    out.push(chain_entry(h, &chain, spec("chain-t6", "T_6=\\frac12h^2", Published, chain_gate()), |c| {
        let got = constant(c, "T6");
        let ok = got == "1/2 h1^2";
        (got, "1/2 h1^2".into(), ok)
    }));
    out.push(chain_entry(
        h,
        &chain,
        spec("chain-t4-family", "T_4=h^3-vh^2+k(v^2h-3vh^2+3h^3)", Published, chain_gate()),
        |c| {
            let t4 = c.get("T4");
            let got = format!(
                "{} + k ({})",
                constant(c, "T4"),
                t4.and_then(|e| e.element.params.get("T4.k1")).map(|g| g.to_string()).unwrap_or_default()
            );
            let want = "-v1 h1^2 + h1^3 + k (v1^2 h1 - 3 v1 h1^2 + 3 h1^3)".to_string();
            (got.clone(), want.clone(), got == want)
        },
    ));
    out.push(chain_entry(
        h,
        &chain,
        spec("chain-t1-particular", "\\tfrac92h^4-6vh^3+2v^2h^2", Published, chain_gate()),
        |c| {
            let got = constant(c, "T1");
            let want = "2 v1^2 h1^2 - 6 v1 h1^3 + 9/2 h1^4".to_string();
            (got.clone(), want.clone(), got == want)
        },
    ));
    let congruence = |c: &TChain, n: &str, label: &str, residue: i64| -> (String, String, bool) {
        let cs = c.get(n).map(|e| e.solution.congruence_constraints.clone()).unwrap_or_default();
        let hit = cs.iter().find(|x| x.label == label);
        let got = hit.map_or_else(|| "absent".into(), |x| x.to_string());
        let ok = hit.is_some_and(|x| x.modulus == 3.into() && x.residue == rat(residue, 1));
        (got, format!("{label} = {residue} mod 3"), ok)
    };
    out.push(chain_entry(h, &chain, spec("chain-t5-congruence", "c_1\\equiv-1 mod 3", Published, chain_gate()), |c| {
        congruence(c, "T5", "c2[h2]", -1)
    }));
    out.push(chain_entry(h, &chain, spec("chain-t3-congruence", "c_2\\equiv0 mod 3", Published, chain_gate()), |c| {
        congruence(c, "T3", "c2[v1 v2 h1]", 0)
    }));
    out.push(chain_entry(
        h,
        &chain,
        spec("chain-leading-terms", "½v²h², −5vh⁴, ¼vh⁵, h³, ¼vh³, ½h²", Published, chain_gate()),
        |c| {
            let rep = c.leading_report();
            let got = rep.iter().map(|r| format!("{}: {}", r.0, r.1)).collect::<Vec<_>>().join("; ");
            let want = rep.iter().map(|r| format!("{}: {}", r.0, r.2)).collect::<Vec<_>>().join("; ");
            (got, want, rep.iter().all(|r| r.3))
        },
    ));
    out.push(chain_entry(
        h,
        &chain,
        spec("chain-y7-coassociative", "classes x_7, x_{10}, x_{14}", Derived, chain_gate()),
        |c| {
            let names = c.param_names();
            let mut bad = Vec::new();
            for g in 0..9usize {
                let vals: HashMap<String, PLocal> = names
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (n.clone(), PLocal::from_int(((g + i * (g / 3 + 1)) % 3) as i64)))
                    .collect();
                if !h.check_coassociativity(&c.y7_even(&vals)).unwrap_or(false) {
                    bad.push(g);
                }
            }
            let got = if bad.is_empty() { "9 grid points coassociative".into() } else { format!("fails at {bad:?}") };
            (got, "9 grid points coassociative".into(), bad.is_empty())
        },
    ));

    let groups = |s: Spec, f: &dyn Fn() -> Result<(String, String), Error>| {
        entry(h, s, || {
            let (c, x) = f()?;
            let ok = c == x;
            Ok((c, x, ok))
        })
    };
    out.push(groups(spec("e7-even-j", "If j is even", Published, ALWAYS), &|| {
        let (a, b) = e7_groups(4, 2)?;
        Ok((format!("{} / {}", a.render(3), b.render(3)), "0 / 0".into()))
    }));
    out.push(groups(spec("e7-j-3", "j ≡ 0 mod 3", Derived, ALWAYS), &|| {
        let (a, _) = e7_groups(3, 2)?;
        Ok((a.render(3), "Z/3^5 + Z/3".into()))
    }));
    out.push(groups(spec("e7-j-43", "j ≡ 1,7 mod 9", Derived, ALWAYS), &|| {
        let (a, _) = e7_groups(43, 2)?;
        Ok((a.render(3), "Z/3^8 + Z/3".into()))
    }));
    out.push(groups(spec("e7-ambiguous", "Z/3^3⊕Z/3^{12} or Z/3^4⊕Z/3^{11}", Published, ALWAYS), &|| {
        let (a, _) = e7_groups(11 + 2 * 59049, 2)?;
        Ok((a.render(3), "Z/3^12 + Z/3^3 or Z/3^11 + Z/3^4".into()))
    }));
    out.push(groups(spec("e7-exponent", "exp_3(E_7)\\ge19", Published, ALWAYS), &|| {
        let (_, _, e) = e7_exponent_witness(2)?;
        Ok((e.to_string(), "19".into()))
    }));
    out.push(groups(spec("bundle-exponent", "isomorphic cyclic p-groups with exponent", Derived, ALWAYS), &|| {
        let got = [bk_exponent(5, 1, 5, 3)?, bk_exponent(5, 1, 6, 3)?, bk_exponent(5, 2, 7, 3)?];
        Ok((format!("{got:?}"), "[5, 0, 2]".into()))
    }));
    out.push(groups(spec("b37-exceptional", "cyclic of order", Derived, ALWAYS), &|| {
        let x = b37_vs_s7(21);
        Ok((format!("{} -> {}", x.b37_exponent, x.s7_exponent), "4 -> 3".into()))
    }));
    out.sort_by(|a, b| a.id.cmp(b.id));
    out
}
