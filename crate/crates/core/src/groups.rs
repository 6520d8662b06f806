//! Closed-form v1-periodic homotopy and E_2 group structures at odd primes.

use serde::Serialize;

use crate::error::Error;
use crate::plocal::{nu_i64, Nu};

/// A finite abelian p-group written as exponents of its cyclic factors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AbelianGroupStructure {
    /// Descending; empty for the zero group.
    pub factors: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ambiguous_alternatives: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<i64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AbelianGroupStructure {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_factors(mut factors: Vec<u32>) -> Self {
        factors.retain(|&e| e > 0);
        factors.sort_unstable_by(|a, b| b.cmp(a));
        AbelianGroupStructure {
            factors,
            ..Self::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.factors.is_empty()
    }

    /// Largest cyclic exponent, over both alternatives when ambiguous.
    pub fn exponent(&self) -> u32 {
        self.factors
            .iter()
            .chain(self.ambiguous_alternatives.iter().flatten())
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// log_p of the order.
    pub fn order_exponent(&self) -> u32 {
        self.factors.iter().sum()
    }

    /// Text such as "Z/3 + Z/3^5", or "0".
    pub fn render(&self, p: u64) -> String {
        let one = |f: &[u32]| -> String {
            if f.is_empty() {
                return "0".into();
            }
            f.iter()
                .map(|&e| if e == 1 { format!("Z/{p}") } else { format!("Z/{p}^{e}") })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        let mut s = one(&self.factors);
        if let Some(alt) = &self.ambiguous_alternatives {
            s = format!("{s} or {}", one(alt));
        }
        s
    }
}

/// min(cap, nu(x) + shift), with nu(0) infinite.
fn capped(x: i64, shift: u32, cap: u32, p: u64) -> u32 {
    match nu_i64(x, p) {
        Nu::Infinite => cap,
        Nu::Finite(v) => cap.min(v as u32 + shift),
    }
}

pub fn check_delta(delta: i64) -> Result<(), Error> {
    if matches!(delta, 2 | 5 | 8) {
        Ok(())
    } else {
        Err(Error::InvalidDelta(delta))
    }
}

const P: u64 = 3;
const DELTA_NOTE: &str = "depends on delta, known only to be 2, 5 or 8";

/// (v_{2j}(E_7), v_{2j-1}(E_7)) at p = 3.
pub fn e7_groups(j: i64, delta: i64) -> Result<(AbelianGroupStructure, AbelianGroupStructure), Error> {
    check_delta(delta)?;
    if j.rem_euclid(2) == 0 {
        return Ok((AbelianGroupStructure::zero(), AbelianGroupStructure::zero()));
    }
    let r9 = j.rem_euclid(9);
    let both = |g: AbelianGroupStructure| Ok((g.clone(), g));
    let f = AbelianGroupStructure::from_factors;
    if j.rem_euclid(3) == 0 {
        return both(f(vec![1, capped(j - 9 - 2 * 243, 4, 10, P)]));
    }
    match r9 {
        1 | 7 => both(f(vec![1, capped(j - 43, 5, 8, P)])),
        4 => both(f(vec![1, capped(j - 13 - 4 * 6561, 5, 14, P)])),
        5 | 8 => {
            let mut g = f(vec![2, capped(j - 17 - 2 * delta * 1_594_323, 4, 19, P)]);
            g.delta = Some(delta);
            g.notes.push(DELTA_NOTE.into());
            both(g)
        }
        _ => {
            let odd = f(vec![2, capped(j - 11, 4, 13, P)]);
            let even = match nu_i64(j - 11, P) {
                Nu::Finite(v) if v < 10 => f(vec![3, v as u32 + 3]),
                _ => {
                    let mut g = f(vec![3, 12]);
                    g.ambiguous_alternatives = Some(vec![11, 4]);
                    g.notes.push("nu(j-11) >= 10: the splitting is not determined".into());
                    g
                }
            };
            Ok((even, odd))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct E7Record {
    pub j: i64,
    pub v2j: AbelianGroupStructure,
    pub v2jm1: AbelianGroupStructure,
    pub ambiguous: bool,
    pub delta: i64,
}

pub fn e7_record(j: i64, delta: i64) -> Result<E7Record, Error> {
    let (v2j, v2jm1) = e7_groups(j, delta)?;
    Ok(E7Record {
        j,
        ambiguous: v2j.ambiguous_alternatives.is_some() || v2jm1.ambiguous_alternatives.is_some(),
        v2j,
        v2jm1,
        delta,
    })
}

/// Exponent of v1^{-1} E_2^{s, 2n+1+qm}(S^{2n+1}) for s = 1, 2.
pub fn sphere_e2_order(n: u32, m: i64, p: u64) -> u32 {
    capped(m, 1, n, p)
}

/// Exponent of the cyclic groups v_{2j}, v_{2j-1} of the sphere bundle
/// B_k(2n+1, 2n+kq+1).
pub fn bk_exponent(n: i64, k: i64, j: i64, p: u64) -> Result<u32, Error> {
    if n <= 1 || !(k == 1 || k == 2) {
        return Err(Error::Precondition(format!("need n > 1 and k in {{1, 2}}, got n={n}, k={k}")));
    }
    let p1 = p as i64 - 1;
    if (j - n).rem_euclid(p as i64 * p1) == 0 {
        Ok(capped(j - n, 2, n as u32, p))
    } else if (j - n).rem_euclid(p1) == 0 {
        Ok(capped(j - n - k * p1, 2, (n + k * p1) as u32, p))
    } else {
        Ok(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct B37Comparison {
    /// Exponent of v_{2j-1}(S^7).
    pub s7_exponent: u32,
    /// Exponent of v_{2j-1}(B(3,7)).
    pub b37_exponent: u32,
    /// The projection is a surjection Z/3^4 -> Z/3^3 rather than an
    /// isomorphism.
    pub exceptional: bool,
}

pub fn b37_vs_s7(j: i64) -> B37Comparison {
    if j.rem_euclid(2) == 0 {
        return B37Comparison {
            s7_exponent: 0,
            b37_exponent: 0,
            exceptional: false,
        };
    }
    let e = capped(j - 3, 1, 3, P);
    let exceptional = j.rem_euclid(27) == 21;
    B37Comparison {
        s7_exponent: e,
        b37_exponent: if exceptional { 4 } else { e },
        exceptional,
    }
}

/// An odd j with an element of order 3^19 in v_{2j}(E_7), its residue class,
/// and the exponent found there.
pub fn e7_exponent_witness(delta: i64) -> Result<(i64, String, u32), Error> {
    check_delta(delta)?;
    let j = 17 + 2 * delta * 1_594_323;
    let (v2j, _) = e7_groups(j, delta)?;
    Ok((j, format!("j = 17 + 2*{delta}*3^13 mod 2*3^15"), v2j.exponent()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e7_examples() {
        let (a, b) = e7_groups(4, 2).unwrap();
        assert!(a.is_zero() && b.is_zero());
        for d in [2, 5, 8] {
            let (a, b) = e7_groups(3, d).unwrap();
            assert_eq!(a.factors, vec![5, 1]);
            assert_eq!(b, a);
            assert_eq!(e7_groups(43, d).unwrap().0.factors, vec![8, 1]);
        }
        assert_eq!(e7_groups(3, 2).unwrap().0.render(3), "Z/3^5 + Z/3");
        assert!(matches!(e7_groups(3, 4), Err(Error::InvalidDelta(4))));
    }

    #[test]
    fn two_mod_nine() {
        let (even, odd) = e7_groups(29, 2).unwrap();
        assert_eq!(odd.factors, vec![6, 2]);
        assert_eq!(even.factors, vec![5, 3]);
        let j = 11 + 2 * 59049;
        let (even, odd) = e7_groups(j, 2).unwrap();
        assert_eq!(odd.factors, vec![13, 2]);
        assert_eq!(even.factors, vec![12, 3]);
        assert_eq!(even.ambiguous_alternatives, Some(vec![11, 4]));
    }

    #[test]
    fn sphere_and_bundles() {
        assert_eq!(sphere_e2_order(1, 5, 3), 1);
        assert_eq!(sphere_e2_order(7, 9, 3), 3);
        assert_eq!(sphere_e2_order(4, 81, 3), 4);
        assert_eq!(bk_exponent(9, 2, 15, 3).unwrap(), 3);
        assert_eq!(bk_exponent(5, 1, 5, 3).unwrap(), 5);
        assert_eq!(bk_exponent(5, 1, 6, 3).unwrap(), 0);
        assert_eq!(bk_exponent(5, 2, 7, 3).unwrap(), 2);
        assert!(bk_exponent(1, 1, 3, 3).is_err());
    }

    #[test]
    fn b37() {
        assert_eq!(b37_vs_s7(3).s7_exponent, 3);
        assert_eq!(b37_vs_s7(5).s7_exponent, 1);
        let x = b37_vs_s7(21);
        assert!(x.exceptional);
        assert_eq!((x.b37_exponent, x.s7_exponent), (4, 3));
    }

    #[test]
    fn witness() {
        for d in [2, 5, 8] {
            let (j, _, e) = e7_exponent_witness(d).unwrap();
            assert_eq!(j % 2, 1);
            assert_eq!(e, 19);
        }
        assert_eq!(e7_groups(17, 2).unwrap().0.exponent(), 17);
    }
}
