//! Exact rationals, base-`p` expansions and truncations, multiplicative
//! orders and Lucas binomials.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// An exact rational number, always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Rat(BigRational);

impl Rat {
    /// Builds `num/den`. Panics if `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rat {
        Rat(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Rat {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// `1/self`. Panics on zero.
    pub fn recip(&self) -> Rat {
        Rat(self.0.recip())
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    /// Divides by a positive machine integer.
    pub fn div_int(&self, r: u64) -> Rat {
        Rat(&self.0 / BigRational::from_integer(BigInt::from(r)))
    }

    /// `numer / p^e` for a truncation-style value.
    pub fn from_p_adic(numer: &BigUint, p: u64, e: u32) -> Rat {
        let den = BigUint::from(p).pow(e);
        Rat::new(BigInt::from(numer.clone()), BigInt::from(den))
    }

    /// Numerator and denominator as machine integers, if they fit.
    pub fn to_u64_pair(&self) -> Option<(u64, u64)> {
        Some((self.numer().to_u64()?, self.denom().to_u64()?))
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Rat {
        Rat(r)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rat> {
        let s = s.trim();
        let bad = |offset: usize| Error::Parse {
            offset,
            message: format!("expected a rational like 2/9, got {s:?}"),
        };
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = n.parse().map_err(|_| bad(0))?;
        let den: BigInt = d.parse().map_err(|_| bad(n.len() + 1))?;
        if den.is_zero() {
            return Err(bad(n.len() + 1));
        }
        Ok(Rat::new(num, den))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rat_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, rhs: &'a Rat) -> Rat {
                Rat((&self.0).$m(&rhs.0))
            }
        }
    };
}
rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

/// Which base-`p` expansion a truncation follows when `λ·p^e` is an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expansion {
    /// The expansion that never ends in zeros: `⟨λ⟩_e`.
    NonTerminating,
    /// The ordinary expansion that may end in zeros: `[λ]_e`.
    Terminating,
}

/// The value `numer / p^e` obtained by cutting an expansion after `e` digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncationValue {
    pub p: u64,
    pub e: u32,
    pub numer: BigUint,
}

impl TruncationValue {
    pub fn value(&self) -> Rat {
        Rat::from_p_adic(&self.numer, self.p, self.e)
    }

    pub fn numer_u128(&self) -> Option<u128> {
        self.numer.to_u128()
    }
}

fn check_unit_interval(lam: &Rat) -> Result<(BigUint, BigUint)> {
    if !lam.is_positive() || *lam > Rat::one() {
        return invalid(format!("expected 0 < λ ≤ 1, got {lam}"));
    }
    let a = lam.numer().to_biguint().expect("positive");
    let b = lam.denom().to_biguint().expect("positive");
    Ok((a, b))
}

/// `⟨λ⟩_e`: the unique `N/p^e` with `0 < λ − N/p^e ≤ p^{−e}`.
pub fn trunc(lam: &Rat, p: u64, e: u32) -> Result<TruncationValue> {
    truncate(lam, p, e, Expansion::NonTerminating)
}

/// Truncation after `e` digits of the chosen expansion.
pub fn truncate(lam: &Rat, p: u64, e: u32, mode: Expansion) -> Result<TruncationValue> {
    let (a, b) = check_unit_interval(lam)?;
    check_prime(p)?;
    if e == 0 {
        return invalid("truncation place must be at least 1");
    }
    let scaled = a * BigUint::from(p).pow(e);
    let numer = match mode {
        Expansion::NonTerminating => (scaled - 1u32) / b,
        Expansion::Terminating => scaled / b,
    };
    Ok(TruncationValue { p, e, numer })
}

/// The first `e` digits of the non-terminating base-`p` expansion of `λ`.
pub fn digits(lam: &Rat, p: u64, e: u32) -> Result<Vec<u64>> {
    let (a, b) = check_unit_interval(lam)?;
    check_prime(p)?;
    let pb = BigUint::from(p);
    let mut out = Vec::with_capacity(e as usize);
    let mut prev = BigUint::zero();
    let mut pe = BigUint::one();
    for _ in 0..e {
        pe *= &pb;
        let n = (&a * &pe - 1u32) / &b;
        let digit = &n - &prev * &pb;
        out.push(digit.to_u64().expect("digit below p"));
        prev = n;
    }
    Ok(out)
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u64;
    while i.saturating_mul(i) <= p {
        if p % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        invalid(format!("{p} is not prime"))
    }
}

/// `p^e` as a `u128`, if it fits.
pub fn pow_u128(p: u64, e: u32) -> Option<u128> {
    (p as u128).checked_pow(e)
}

/// Largest `s` with `p^s | n`.
pub fn p_valuation(n: u64, p: u64) -> u32 {
    let mut n = n;
    let mut s = 0;
    while n > 0 && n % p == 0 {
        n /= p;
        s += 1;
    }
    s
}

/// The order of `p` in `(Z/bZ)^×`.
pub fn mult_order(p: u64, b: u64) -> Result<u64> {
    if b == 0 || p.gcd(&b) != 1 {
        return invalid(format!("gcd({p}, {b}) must be 1"));
    }
    if b == 1 {
        return Ok(1);
    }
    let pm = (p % b) as u128;
    let mut x = pm;
    let mut e = 1;
    while x != 1 {
        x = x * pm % b as u128;
        e += 1;
    }
    Ok(e)
}

/// First `L ≥ 1` in the orbit `r_L = start·p^L mod m` where `hit(r_L)` holds.
/// Returns `None` once the orbit revisits a value, which certifies that no
/// later `L` can hit either.
pub(crate) fn orbit_search(start: u64, p: u64, m: u64, mut hit: impl FnMut(u32, u64) -> bool) -> Option<u32> {
    let mut seen = std::collections::HashSet::new();
    let mut r = ((start as u128 * p as u128) % m as u128) as u64;
    let mut l = 1u32;
    loop {
        if hit(l, r) {
            return Some(l);
        }
        if !seen.insert(r) {
            return None;
        }
        r = ((r as u128 * p as u128) % m as u128) as u64;
        l += 1;
    }
}

/// Smallest `e ≥ 1` with `2p^e ≡ target (mod d)`, or `None` if there is none.
pub fn min_e_two_p_pow(d: u64, p: u64, target: u64) -> Option<u32> {
    assert!(d >= 2, "degree must be at least 2");
    let t = target % d;
    orbit_search(2, p, d, |_, r| r == t)
}

/// `C(m, k) mod p` by Lucas's theorem.
pub fn lucas_binom(m: u128, k: u128, p: u64) -> u64 {
    if k > m {
        return 0;
    }
    let pp = p as u128;
    let (mut m, mut k) = (m, k);
    let mut acc: u128 = 1;
    while k > 0 || m > 0 {
        let (mi, ki) = ((m % pp) as u64, (k % pp) as u64);
        if ki > mi {
            return 0;
        }
        acc = acc * small_binom(mi, ki, p) as u128 % pp;
        m /= pp;
        k /= pp;
    }
    acc as u64
}

/// `C(n, k) mod p` for `k ≤ n < p`.
fn small_binom(n: u64, k: u64, p: u64) -> u64 {
    let pp = p as u128;
    let k = k.min(n - k);
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..k {
        num = num * (n - i) as u128 % pp;
        den = den * (i + 1) as u128 % pp;
    }
    (num * mod_pow(den, p as u128 - 2, pp) % pp) as u64
}

pub(crate) fn mod_pow(b: u128, e: u128, m: u128) -> u128 {
    let (mut b, mut e, mut acc) = (b % m, e, 1 % m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// True iff `λ` lies in the open interval `(1/p, 1/(p−1))`.
pub fn bms_excluded(lam: &Rat, p: u64) -> bool {
    let lo = Rat::new(1, p);
    let hi = Rat::new(1, p - 1);
    *lam > lo && *lam < hi
}
