//! Exact field elements over the rationals or a prime field.
//!
//! Rationals are kept as `Ratio<i128>` while they fit and spill into
//! `BigRational` on overflow. Prime-field values carry their modulus, so
//! integer constants (which are created as rationals) coerce silently when
//! they meet a prime-field value.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    pub fn parse(text: &str) -> Result<Field, ScalarError> {
        let t = text.trim();
        if t == "rational" {
            return Ok(Field::Rational);
        }
        if let Some(rest) = t.strip_prefix("prime:") {
            let p: u64 = rest.parse().map_err(|_| ScalarError::BadField(t.to_string()))?;
            if !is_prime(p) {
                return Err(ScalarError::NotPrime(p));
            }
            if p > (1u64 << 62) {
                return Err(ScalarError::BadField(t.to_string()));
            }
            return Ok(Field::Prime(p));
        }
        Err(ScalarError::BadField(t.to_string()))
    }

    pub fn name(&self) -> String {
        match self {
            Field::Rational => "rational".to_string(),
            Field::Prime(p) => format!("prime:{p}"),
        }
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        match *self {
            Field::Rational => Scalar::int(n),
            Field::Prime(p) => Scalar::Mod { v: reduce_i128(n as i128, p), p },
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("malformed coefficient {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("unknown field {0:?} (expected \"rational\" or \"prime:p\")")]
    BadField(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("denominator of {0:?} vanishes modulo {1}")]
    NotInvertible(String, u64),
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Small(Ratio<i128>),
    Big(BigRational),
    Mod { v: u64, p: u64 },
}

fn reduce_i128(n: i128, p: u64) -> u64 {
    n.rem_euclid(p as i128) as u64
}

fn reduce_big(n: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = ((n % &m) + &m) % &m;
    r.to_u64().unwrap()
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn big_of(r: &Ratio<i128>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn shrink(r: BigRational) -> Scalar {
    match (r.numer().to_i128(), r.denom().to_i128()) {
        (Some(n), Some(d)) if n.unsigned_abs() < (1u128 << 100) && d < (1i128 << 100) => {
            Scalar::Small(Ratio::new_raw(n, d))
        }
        _ => Scalar::Big(r),
    }
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Small(Ratio::zero())
    }

    pub fn one() -> Scalar {
        Scalar::Small(Ratio::one())
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::Small(Ratio::from_integer(n as i128))
    }

    pub fn sign(odd: bool) -> Scalar {
        if odd {
            Scalar::int(-1)
        } else {
            Scalar::one()
        }
    }

    pub fn ratio(n: i64, d: i64) -> Scalar {
        Scalar::Small(Ratio::new(n as i128, d as i128))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Small(r) => r.is_zero(),
            Scalar::Big(r) => r.is_zero(),
            Scalar::Mod { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Small(r) => r.is_one(),
            Scalar::Big(r) => r.is_one(),
            Scalar::Mod { v, p } => *v == 1 % *p,
        }
    }

    /// Coerce into the given field (rationals reduce modulo p).
    pub fn in_field(&self, field: Field) -> Scalar {
        match field {
            Field::Rational => self.clone(),
            Field::Prime(p) => Scalar::Mod { v: self.mod_value(p).expect("denominator divisible by p"), p },
        }
    }

    fn mod_value(&self, p: u64) -> Option<u64> {
        match self {
            Scalar::Mod { v, p: q } => {
                assert_eq!(*q, p, "mixing prime fields {q} and {p}");
                Some(*v)
            }
            Scalar::Small(r) => {
                let d = reduce_i128(*r.denom(), p);
                if d == 0 {
                    return None;
                }
                Some(mul_mod(reduce_i128(*r.numer(), p), pow_mod(d, p - 2, p), p))
            }
            Scalar::Big(r) => {
                let d = reduce_big(r.denom(), p);
                if d == 0 {
                    return None;
                }
                Some(mul_mod(reduce_big(r.numer(), p), pow_mod(d, p - 2, p), p))
            }
        }
    }

    fn modulus(&self) -> Option<u64> {
        match self {
            Scalar::Mod { p, .. } => Some(*p),
            _ => None,
        }
    }

    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Scalar::Small(r) => Scalar::Small(r.recip()),
            Scalar::Big(r) => shrink(r.recip()),
            Scalar::Mod { v, p } => Scalar::Mod { v: pow_mod(*v, p - 2, *p), p: *p },
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        self * &other.inv()
    }

    pub fn parse(text: &str, field: Field) -> Result<Scalar, ScalarError> {
        let t = text.trim();
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (t, "1"),
        };
        let n: BigInt = num.parse().map_err(|_| ScalarError::Malformed(t.to_string()))?;
        let d: BigInt = den.parse().map_err(|_| ScalarError::Malformed(t.to_string()))?;
        if d.is_zero() {
            return Err(ScalarError::ZeroDenominator(t.to_string()));
        }
        let q = shrink(BigRational::new(n, d));
        match field {
            Field::Rational => Ok(q),
            Field::Prime(p) => match q.mod_value(p) {
                Some(v) => Ok(Scalar::Mod { v, p }),
                None => Err(ScalarError::NotInvertible(t.to_string(), p)),
            },
        }
    }

    fn binop(
        &self,
        other: &Scalar,
        small: impl Fn(&Ratio<i128>, &Ratio<i128>) -> Option<Ratio<i128>>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
        modular: impl Fn(u64, u64, u64) -> u64,
    ) -> Scalar {
        if let Some(p) = self.modulus().or_else(|| other.modulus()) {
            let a = self.mod_value(p).expect("denominator divisible by p");
            let b = other.mod_value(p).expect("denominator divisible by p");
            return Scalar::Mod { v: modular(a, b, p), p };
        }
        if let (Scalar::Small(a), Scalar::Small(b)) = (self, other) {
            if let Some(r) = small(a, b) {
                return Scalar::Small(r);
            }
        }
        shrink(big(self.to_big(), other.to_big()))
    }

    fn to_big(&self) -> BigRational {
        match self {
            Scalar::Small(r) => big_of(r),
            Scalar::Big(r) => r.clone(),
            Scalar::Mod { .. } => unreachable!("modular value in rational arithmetic"),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        if let Some(p) = self.modulus().or_else(|| other.modulus()) {
            return self.mod_value(p) == other.mod_value(p);
        }
        match (self, other) {
            (Scalar::Small(a), Scalar::Small(b)) => a == b,
            _ => self.to_big() == other.to_big(),
        }
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order used only for canonical sorting; prime-field values compare
/// by representative.
impl Ord for Scalar {
    fn cmp(&self, other: &Scalar) -> Ordering {
        if let Some(p) = self.modulus().or_else(|| other.modulus()) {
            return self.mod_value(p).cmp(&other.mod_value(p));
        }
        match (self, other) {
            (Scalar::Small(a), Scalar::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Small(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Big(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod { v, .. } => write!(f, "{v}"),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        self.binop(o, |a, b| a.checked_add(b), |a, b| a + b, |a, b, p| ((a as u128 + b as u128) % p as u128) as u64)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self.binop(o, |a, b| a.checked_sub(b), |a, b| a - b, |a, b, p| ((a as u128 + p as u128 - b as u128) % p as u128) as u64)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        self.binop(o, |a, b| a.checked_mul(b), |a, b| a * b, mul_mod)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = &*self + o;
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Small(r) => match r.numer().checked_neg() {
                Some(n) => Scalar::Small(Ratio::new_raw(n, *r.denom())),
                None => shrink(-big_of(r)),
            },
            Scalar::Big(r) => shrink(-r.clone()),
            Scalar::Mod { v, p } => Scalar::Mod { v: (p - v) % p, p: *p },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_spills_into_big() {
        let mut x = Scalar::int(i64::MAX);
        for _ in 0..4 {
            x = &x * &x;
        }
        assert!(matches!(x, Scalar::Big(_)));
        let y = x.inv();
        assert!((&x * &y).is_one());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::Prime(7);
        let a = Scalar::parse("3", f).unwrap();
        let b = Scalar::parse("1/2", f).unwrap();
        assert_eq!(&a * &b, Scalar::parse("5", f).unwrap());
        assert_eq!(&a + &Scalar::int(-3), Scalar::zero());
        assert!((&b * &Scalar::int(2)).is_one());
    }

    #[test]
    fn parse_errors() {
        assert_eq!(Scalar::parse("1/0", Field::Rational), Err(ScalarError::ZeroDenominator("1/0".into())));
        assert!(Scalar::parse("x", Field::Rational).is_err());
        assert!(Field::parse("prime:8").is_err());
        assert!(Scalar::parse("1/7", Field::Prime(7)).is_err());
    }

    #[test]
    fn display_roundtrip() {
        for t in ["0", "-3", "5/7", "-12/5"] {
            let s = Scalar::parse(t, Field::Rational).unwrap();
            assert_eq!(s.to_string(), t);
        }
    }
}
