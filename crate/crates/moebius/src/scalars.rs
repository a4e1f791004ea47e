//! Exact scalars: roots of unity, rational combinations of them, and
//! monomials in the formal variable `u` (with `t = u^2`).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Rational coefficients used inside [`Cyclotomic`].
pub type Q = num_rational::BigRational;

/// `n/d` as an exact rational.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("malformed root of unity {0:?}, expected \"p/q\"")]
    BadRoot(String),
    #[error("zero has no inverse")]
    ZeroInverse,
}

/// The root of unity `exp(2 pi i p/q)` with `0 <= p < q` and `gcd(p, q) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, den: 1 };
    pub const MINUS_ONE: RootOfUnity = RootOfUnity { num: 1, den: 2 };

    /// Root with exponent `p/q`, reduced mod 1. Panics if `q == 0`.
    pub fn new(p: i64, q: u64) -> Self {
        assert!(q > 0, "root of unity with zero denominator");
        let q = q as i128;
        let p = (p as i128).rem_euclid(q);
        let g = p.gcd(&q).max(1);
        RootOfUnity {
            num: (p / g) as u64,
            den: (q / g) as u64,
        }
    }

    /// Primitive generator `exp(2 pi i / q)`.
    pub fn zeta(q: u64) -> Self {
        Self::new(1, q)
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    /// Multiplicative order.
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    pub fn mul(self, other: Self) -> Self {
        let l = self.den.lcm(&other.den);
        let p =
            self.num as i128 * (l / self.den) as i128 + other.num as i128 * (l / other.den) as i128;
        Self::new((p % l as i128) as i64, l)
    }

    pub fn inv(self) -> Self {
        Self::new(-(self.num as i64), self.den)
    }

    pub fn div(self, other: Self) -> Self {
        self.mul(other.inv())
    }

    pub fn neg(self) -> Self {
        self.mul(Self::MINUS_ONE)
    }

    pub fn pow(self, k: i64) -> Self {
        let q = self.den as i128;
        let p = (self.num as i128 * k as i128).rem_euclid(q);
        Self::new(p as i64, self.den)
    }

    /// Whether `self^m == 1`.
    pub fn divides_order(&self, m: u64) -> bool {
        m % self.den == 0
    }

    /// Principal `n`-th root: the exponent divided by `n`.
    pub fn principal_root(self, n: u64) -> Self {
        assert!(n >= 1, "principal_root needs n >= 1");
        Self::new(self.num as i64, self.den * n)
    }

    /// Exponent as an exact fraction in `[0, 1)`.
    pub fn exponent(&self) -> Ratio<i64> {
        Ratio::new(self.num as i64, self.den as i64)
    }

    /// All `m`-th roots of unity in exponent order.
    pub fn all_of_order_dividing(m: u64) -> Vec<Self> {
        (0..m).map(|k| Self::new(k as i64, m)).collect()
    }
}

impl Default for RootOfUnity {
    fn default() -> Self {
        Self::ONE
    }
}

impl Ord for RootOfUnity {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.num as u128 * other.den as u128;
        let b = other.num as u128 * self.den as u128;
        a.cmp(&b)
    }
}

impl PartialOrd for RootOfUnity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for RootOfUnity {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ScalarError::BadRoot(s.to_string());
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        Ok(Self::new(p, q))
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RootOfUnity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn root_multiply(a: RootOfUnity, b: RootOfUnity) -> RootOfUnity {
    a.mul(b)
}

pub fn principal_root(a: RootOfUnity, n: u64) -> RootOfUnity {
    a.principal_root(n)
}

/// `d` with `d^n` equal to the product of the `n` inputs.
///
/// The branch is the sum of the exponents (each taken in `[0, 1)`, not
/// reduced mod 1) divided by `n`, so `[z3, z3^2]` gives `-1` rather than `1`.
pub fn geometric_mean(cs: &[RootOfUnity]) -> RootOfUnity {
    assert!(!cs.is_empty(), "geometric mean of an empty list");
    let l = cs.iter().fold(1u64, |l, c| l.lcm(&c.den));
    let sum: u128 = cs.iter().map(|c| c.num as u128 * (l / c.den) as u128).sum();
    let n = cs.len() as u64;
    let q = l * n;
    RootOfUnity::new((sum % q as u128) as i64, q)
}

fn prime_powers(mut q: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut pk = 1;
            while q % p == 0 {
                q /= p;
                pk *= p;
            }
            out.push((p, pk));
        }
        p += 1;
    }
    if q > 1 {
        out.push((q, q));
    }
    out
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(m as i128));
    e.x.rem_euclid(m as i128) as u64
}

/// Finite rational combination of roots of unity in canonical form.
///
/// The canonical basis is the set of roots whose `p`-primary part has
/// exponent below `(p-1)/p` for every prime `p`. This is a basis of the
/// maximal abelian extension of Q, so the zero test is term-map emptiness.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cyclotomic {
    terms: BTreeMap<RootOfUnity, Q>,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(Q::one())
    }

    pub fn rational(r: Q) -> Self {
        Self::monomial(r, RootOfUnity::ONE)
    }

    pub fn from_int(k: i128) -> Self {
        Self::rational(Q::from_integer(k.into()))
    }

    pub fn root(z: RootOfUnity) -> Self {
        Self::monomial(Q::one(), z)
    }

    pub fn monomial(r: Q, z: RootOfUnity) -> Self {
        let mut c = Self::zero();
        c.push(z, r);
        c
    }

    /// Canonical form of an arbitrary term list.
    pub fn reduce<I: IntoIterator<Item = (RootOfUnity, Q)>>(raw: I) -> Self {
        let mut c = Self::zero();
        for (z, r) in raw {
            c.push(z, r);
        }
        c
    }

    fn push(&mut self, z: RootOfUnity, r: Q) {
        if r.is_zero() {
            return;
        }
        let q = z.den;
        for (p, pk) in prime_powers(q) {
            let cof = q / pk;
            let e = (z.num % pk) * inv_mod(cof % pk, pk) % pk;
            // p-primary part of z is e/pk; basis needs e < (p-1) pk/p.
            if e * p >= (p - 1) * pk {
                for s in 1..p {
                    self.push(z.mul(RootOfUnity::new(-(s as i64), p)), -r.clone());
                }
                return;
            }
        }
        let slot = self.terms.entry(z).or_insert_with(Q::zero);
        *slot += r;
        if slot.is_zero() {
            self.terms.remove(&z);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&RootOfUnity, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Least common multiple of the orders of the terms.
    pub fn conductor(&self) -> u64 {
        self.terms.keys().fold(1, |l, z| l.lcm(&z.den))
    }

    pub fn scale(&self, r: Q) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Cyclotomic {
            terms: self.terms.iter().map(|(z, c)| (*z, c * &r)).collect(),
        }
    }

    pub fn mul_root(&self, w: RootOfUnity) -> Self {
        Self::reduce(self.terms.iter().map(|(z, c)| (z.mul(w), c.clone())))
    }

    /// Galois conjugate `zeta -> zeta^k` (k coprime to the conductor).
    pub fn conj(&self, k: i64) -> Self {
        Self::reduce(self.terms.iter().map(|(z, c)| (z.pow(k), c.clone())))
    }

    /// Complex conjugate.
    pub fn bar(&self) -> Self {
        self.conj(-1)
    }

    /// `Some((r, z))` when the value equals `r * z` for a rational `r > 0`.
    pub fn as_monomial(&self) -> Option<(Q, RootOfUnity)> {
        if self.terms.len() == 1 {
            let (z, r) = self.terms.iter().next().unwrap();
            return Some(if r.is_positive() {
                (r.clone(), *z)
            } else {
                (-r, z.neg())
            });
        }
        if self.is_zero() {
            return None;
        }
        let l = self.conductor().lcm(&2);
        for k in 0..l {
            let w = RootOfUnity::new(k as i64, l);
            let y = self.mul_root(w.inv());
            if y.terms.len() == 1 {
                let (z, r) = y.terms.iter().next().unwrap();
                if z.is_one() && r.is_positive() {
                    return Some((r.clone(), w));
                }
            }
        }
        None
    }

    /// The value as a root of unity, if it is one.
    pub fn as_root(&self) -> Option<RootOfUnity> {
        match self.as_monomial() {
            Some((r, z)) if r.is_one() => Some(z),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        match self.terms.iter().next() {
            Some((z, r)) if self.terms.len() == 1 && z.is_one() => Some(r.clone()),
            _ => None,
        }
    }

    /// Field inverse via the norm to Q.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::ZeroInverse);
        }
        if self.terms.len() == 1 {
            let (z, r) = self.terms.iter().next().unwrap();
            return Ok(Self::monomial(r.recip(), z.inv()));
        }
        let q = self.conductor();
        let mut y = Self::one();
        for k in 2..q {
            if k.gcd(&q) == 1 {
                y = &y * &self.conj(k as i64);
            }
        }
        let norm = (self * &y)
            .as_rational()
            .expect("norm of a cyclotomic number is rational");
        Ok(y.scale(norm.recip()))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl From<RootOfUnity> for Cyclotomic {
    fn from(z: RootOfUnity) -> Self {
        Self::root(z)
    }
}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        let mut out = self.clone();
        for (z, r) in &rhs.terms {
            let slot = out.terms.entry(*z).or_insert_with(Q::zero);
            *slot += r;
            if slot.is_zero() {
                out.terms.remove(z);
            }
        }
        out
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        self.scale(-Q::one())
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self + &(-rhs)
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        let mut out = Cyclotomic::zero();
        for (a, r) in &self.terms {
            for (b, s) in &rhs.terms {
                out.push(a.mul(*b), r * s);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: Cyclotomic) -> Cyclotomic { (&self).$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -(&self)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if let Some((r, z)) = self.as_monomial() {
            if r.is_one() {
                return match *z.exponent().numer() {
                    0 => write!(f, "1"),
                    _ if z == RootOfUnity::MINUS_ONE => write!(f, "-1"),
                    _ => write!(f, "z({z})"),
                };
            }
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(z, r)| {
                if z.is_one() {
                    format!("{r}")
                } else {
                    format!("{r}*z({z})")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct Triple(RootOfUnity, i64, i64);

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::Error;
        let triples = self
            .terms
            .iter()
            .map(|(z, r)| {
                let n = i64::try_from(r.numer()).map_err(S::Error::custom)?;
                let d = i64::try_from(r.denom()).map_err(S::Error::custom)?;
                Ok(Triple(*z, n, d))
            })
            .collect::<Result<Vec<_>, S::Error>>()?;
        triples.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let triples = Vec::<Triple>::deserialize(d)?;
        if triples.iter().any(|t| t.2 == 0) {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Cyclotomic::reduce(
            triples.into_iter().map(|Triple(z, n, d)| (z, q(n, d))),
        ))
    }
}

/// `scalar * u^upower`, with the zero monomial forced to `upower = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonomialCoefficient {
    scalar: Cyclotomic,
    upower: u32,
}

impl MonomialCoefficient {
    pub fn new(scalar: Cyclotomic, upower: u32) -> Self {
        let upower = if scalar.is_zero() { 0 } else { upower };
        MonomialCoefficient { scalar, upower }
    }

    pub fn zero() -> Self {
        Self::new(Cyclotomic::zero(), 0)
    }

    pub fn one() -> Self {
        Self::new(Cyclotomic::one(), 0)
    }

    /// `scalar * t^k`.
    pub fn t_power(scalar: Cyclotomic, k: u32) -> Self {
        Self::new(scalar, 2 * k)
    }

    pub fn scalar(&self) -> &Cyclotomic {
        &self.scalar
    }

    pub fn upower(&self) -> u32 {
        self.upower
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.scalar * &other.scalar, self.upower + other.upower)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: i64, q: u64) -> RootOfUnity {
        RootOfUnity::new(p, q)
    }

    #[test]
    fn root_arithmetic() {
        assert_eq!(root_multiply(z(1, 2), z(1, 2)), RootOfUnity::ONE);
        assert_eq!(root_multiply(z(1, 3), z(1, 2)), z(5, 6));
        assert_eq!(z(1, 3).inv(), z(2, 3));
        assert_eq!(z(1, 3).mul(z(2, 3)), RootOfUnity::ONE);
        assert_eq!(z(6, 4), z(1, 2));
        assert_eq!(z(-1, 4), z(3, 4));
    }

    #[test]
    fn principal_roots() {
        assert_eq!(principal_root(z(1, 2), 2), z(1, 4));
        assert_eq!(principal_root(RootOfUnity::ONE, 3), RootOfUnity::ONE);
        let r = principal_root(z(2, 3), 2);
        assert_eq!(r, z(1, 3));
        assert_eq!(r.mul(r), z(2, 3));
    }

    #[test]
    fn geometric_means() {
        let d = geometric_mean(&[RootOfUnity::ONE, RootOfUnity::MINUS_ONE]);
        assert_eq!(d, z(1, 4));
        assert_eq!(d.mul(d), RootOfUnity::MINUS_ONE);
        assert_eq!(geometric_mean(&[RootOfUnity::ONE; 3]), RootOfUnity::ONE);
        let d = geometric_mean(&[z(1, 3), z(2, 3)]);
        assert_eq!(d, z(1, 2));
        assert_eq!(d.pow(2), z(1, 3).mul(z(2, 3)));
    }

    #[test]
    fn inverse_at_large_conductor() {
        // conductor 360: the norm has degree 96
        let a = Cyclotomic::reduce([
            (z(3, 8), q(-3, 1)),
            (z(4, 9), q(1, 1)),
            (z(3, 5), q(1, 1)),
            (z(17, 24), q(-3, 1)),
        ]);
        assert_eq!(a.conductor(), 360);
        assert!((&a * &a.inv().unwrap()).is_one());
    }

    #[test]
    fn vanishing_sums() {
        let one = Q::one;
        let s = Cyclotomic::reduce([
            (RootOfUnity::ONE, one()),
            (z(1, 3), one()),
            (z(2, 3), one()),
        ]);
        assert!(s.is_zero());
        let s = Cyclotomic::reduce([(z(1, 5), one()), (z(1, 5), -one())]);
        assert!(s.is_zero());
        let s = Cyclotomic::reduce([(RootOfUnity::ONE, one()), (z(1, 4), one())]);
        assert_eq!(s.len(), 2);
        let fifth: Cyclotomic = (0..5)
            .map(|k| Cyclotomic::root(z(k, 5)))
            .fold(Cyclotomic::zero(), |a, b| a + b);
        assert!(fifth.is_zero());
        let sixth: Cyclotomic = [1, 5]
            .iter()
            .map(|&k| Cyclotomic::root(z(k, 6)))
            .fold(Cyclotomic::zero(), |a, b| a + b);
        assert_eq!(sixth, Cyclotomic::one());
    }

    #[test]
    fn canonical_across_fields() {
        // zeta_3 built inside Q(zeta_15) must match zeta_3 itself
        let a = Cyclotomic::root(z(1, 5)) * Cyclotomic::root(z(2, 15));
        assert_eq!(a, Cyclotomic::root(z(1, 3)));
        let b = Cyclotomic::root(z(2, 3));
        let c = -Cyclotomic::one() - Cyclotomic::root(z(1, 3));
        assert_eq!(b, c);
        assert_eq!(Cyclotomic::root(RootOfUnity::MINUS_ONE), -Cyclotomic::one());
    }

    #[test]
    fn inverses() {
        let x = Cyclotomic::one() + Cyclotomic::root(z(1, 5));
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        let w = Cyclotomic::root(z(2, 3));
        assert_eq!(w.inv().unwrap(), Cyclotomic::root(z(1, 3)));
        assert_eq!(w.as_root(), Some(z(2, 3)));
        assert!(Cyclotomic::zero().inv().is_err());
    }

    #[test]
    fn monomials() {
        let m = MonomialCoefficient::new(Cyclotomic::zero(), 5);
        assert_eq!(m.upower(), 0);
        let a = MonomialCoefficient::t_power(Cyclotomic::from_int(2), 1);
        let b = MonomialCoefficient::new(Cyclotomic::root(z(1, 4)), 1);
        let c = a.mul(&b);
        assert_eq!(c.upower(), 3);
        assert_eq!(c.scalar(), &Cyclotomic::root(z(1, 4)).scale(q(2, 1)));
    }

    #[test]
    fn serde_round_trip() {
        let r = z(5, 6);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "\"5/6\"");
        assert_eq!(serde_json::from_str::<RootOfUnity>(&s).unwrap(), r);
        let c = Cyclotomic::one().scale(q(1, 2)) + Cyclotomic::root(z(1, 4));
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Cyclotomic>(&s).unwrap(), c);
        assert!("3".parse::<RootOfUnity>().is_err());
    }
}
