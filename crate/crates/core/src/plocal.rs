//! Exact arithmetic in Z_(p) and Q, with p-adic valuation.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rational = BigRational;

/// p-adic valuation; `Infinite` is the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Nu {
    Finite(i64),
    Infinite,
}

impl Nu {
    pub fn finite(self) -> Option<i64> {
        match self {
            Nu::Finite(v) => Some(v),
            Nu::Infinite => None,
        }
    }
}

impl fmt::Display for Nu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nu::Finite(v) => write!(f, "{v}"),
            Nu::Infinite => write!(f, "inf"),
        }
    }
}

pub fn nu_int(n: &BigInt, p: u64) -> Nu {
    if n.is_zero() {
        return Nu::Infinite;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Nu::Finite(k);
        }
        n = q;
        k += 1;
    }
}

pub fn nu_i64(n: i64, p: u64) -> Nu {
    nu_int(&BigInt::from(n), p)
}

pub fn nu_rat(x: &Rational, p: u64) -> Nu {
    if x.is_zero() {
        return Nu::Infinite;
    }
    let a = nu_int(x.numer(), p).finite().unwrap();
    let b = nu_int(x.denom(), p).finite().unwrap();
    Nu::Finite(a - b)
}

pub fn is_p_local(x: &Rational, p: u64) -> bool {
    nu_rat(x, p) >= Nu::Finite(0)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow_int(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// A rational number whose denominator is prime to p.
///
/// The prime is not stored; constructors that can fail take it explicitly.
/// Sums, differences and products of p-local values stay p-local.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PLocal(Rational);

impl PLocal {
    pub fn new(q: Rational, p: u64) -> Result<Self, Error> {
        if is_p_local(&q, p) {
            Ok(PLocal(q))
        } else {
            Err(Error::PLocalityViolation(q.to_string()))
        }
    }

    pub fn from_int(n: i64) -> Self {
        PLocal(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        PLocal(Rational::from_integer(n))
    }

    pub fn frac(n: i64, d: i64, p: u64) -> Result<Self, Error> {
        Self::new(rat(n, d), p)
    }

    pub fn zero() -> Self {
        PLocal(Rational::zero())
    }

    pub fn one() -> Self {
        PLocal(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn into_rational(self) -> Rational {
        self.0
    }

    pub fn nu(&self, p: u64) -> Nu {
        nu_rat(&self.0, p)
    }

    pub fn abs(&self) -> Self {
        PLocal(self.0.abs())
    }

    /// Exact quotient, failing when the result leaves Z_(p).
    pub fn checked_div(&self, other: &PLocal, p: u64) -> Result<Self, Error> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        PLocal::new(&self.0 / &other.0, p)
    }

    pub fn parse(s: &str, p: u64) -> Result<Self, Error> {
        let q = parse_rational(s).ok_or_else(|| Error::Parse {
            offset: 0,
            message: format!("bad scalar '{s}'"),
        })?;
        PLocal::new(q, p)
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => BigInt::from_str(s).ok().map(Rational::from_integer),
    }
}

impl fmt::Display for PLocal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Add for PLocal {
    type Output = PLocal;
    fn add(self, rhs: PLocal) -> PLocal {
        PLocal(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a PLocal> for &'a PLocal {
    type Output = PLocal;
    fn add(self, rhs: &PLocal) -> PLocal {
        PLocal(&self.0 + &rhs.0)
    }
}

impl AddAssign<&PLocal> for PLocal {
    fn add_assign(&mut self, rhs: &PLocal) {
        self.0 += &rhs.0;
    }
}

impl Sub for PLocal {
    type Output = PLocal;
    fn sub(self, rhs: PLocal) -> PLocal {
        PLocal(self.0 - rhs.0)
    }
}

impl<'a> Sub<&'a PLocal> for &'a PLocal {
    type Output = PLocal;
    fn sub(self, rhs: &PLocal) -> PLocal {
        PLocal(&self.0 - &rhs.0)
    }
}

impl SubAssign<&PLocal> for PLocal {
    fn sub_assign(&mut self, rhs: &PLocal) {
        self.0 -= &rhs.0;
    }
}

impl Mul for PLocal {
    type Output = PLocal;
    fn mul(self, rhs: PLocal) -> PLocal {
        PLocal(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a PLocal> for &'a PLocal {
    type Output = PLocal;
    fn mul(self, rhs: &PLocal) -> PLocal {
        PLocal(&self.0 * &rhs.0)
    }
}

impl Neg for PLocal {
    type Output = PLocal;
    fn neg(self) -> PLocal {
        PLocal(-self.0)
    }
}

impl<'a> Neg for &'a PLocal {
    type Output = PLocal;
    fn neg(self) -> PLocal {
        PLocal(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(nu_i64(9, 3), Nu::Finite(2));
        assert_eq!(nu_i64(0, 3), Nu::Infinite);
        assert_eq!(nu_i64(492, 3), Nu::Finite(1));
        assert_eq!(nu_rat(&rat(5, 27), 3), Nu::Finite(-3));
    }

    #[test]
    fn arithmetic() {
        let half = PLocal::frac(1, 2, 3).unwrap();
        assert_eq!(&half + &half, PLocal::one());
        assert!(matches!(
            PLocal::frac(1, 3, 3),
            Err(Error::PLocalityViolation(_))
        ));
        let q = PLocal::from_int(35) * PLocal::frac(1, 4, 3).unwrap();
        assert_eq!(q.to_string(), "35/4");
        assert!(PLocal::one().checked_div(&PLocal::from_int(3), 3).is_err());
        assert_eq!(
            PLocal::from_int(6).checked_div(&PLocal::from_int(3), 3).unwrap(),
            PLocal::from_int(2)
        );
    }

    #[test]
    fn text_form() {
        assert_eq!(PLocal::parse("-7/4", 3).unwrap().to_string(), "-7/4");
        assert_eq!(PLocal::parse("8/4", 3).unwrap().to_string(), "2");
        assert!(PLocal::parse("1/6", 3).is_err());
    }
}
