use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::ratbase::{check_prime, mod_pow};

use super::upoly::UPoly;

/// Element handle: the base-`p` encoding `Σ c_i p^i` of the coefficient
/// vector `(c_0, …, c_{k−1})` of the element as a polynomial in `t`.
pub type Fe = u64;

const TABLE_LIMIT: u64 = 1 << 20;
const MAX_Q: u64 = 1 << 62;

/// The finite field `F_{p^k} = F_p[t]/(modulus)`.
///
/// Cloning is cheap; all clones share the same tables.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

struct Inner {
    p: u64,
    k: u32,
    q: u64,
    /// Monic, low degree first, length `k + 1`. Empty for the prime field.
    modulus: Vec<u64>,
    tables: Option<Tables>,
}

struct Tables {
    exp: Vec<Fe>,
    log: Vec<u32>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p() && self.k() == other.k()
    }
}
impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q())
    }
}

impl FieldSpec {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<FieldSpec> {
        FieldSpec::new(p, 1)
    }

    /// `F_{p^k}` with the first monic irreducible modulus in handle order.
    pub fn new(p: u64, k: u32) -> Result<FieldSpec> {
        check_prime(p)?;
        if p >= 1 << 32 {
            return invalid("characteristic must be below 2^32");
        }
        if k == 0 {
            return invalid("extension degree must be at least 1");
        }
        let q = match p.checked_pow(k) {
            Some(q) if q <= MAX_Q => q,
            _ => return invalid(format!("field of order {p}^{k} is too large")),
        };
        if k == 1 {
            return Ok(FieldSpec(Arc::new(Inner { p, k, q, modulus: Vec::new(), tables: None })));
        }
        let base = FieldSpec::prime(p)?;
        let modulus = first_irreducible(&base, k);
        let mut inner = Inner { p, k, q, modulus, tables: None };
        if q <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(FieldSpec(Arc::new(inner)))
    }

    /// `F_{p^k}` with a caller-chosen modulus (monic, low degree first).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<FieldSpec> {
        check_prime(p)?;
        let k = modulus.len().saturating_sub(1) as u32;
        if k < 2 || *modulus.last().unwrap() != 1 {
            return invalid("modulus must be monic of degree at least 2");
        }
        let base = FieldSpec::prime(p)?;
        let m = UPoly::new(&base, modulus.iter().map(|c| c % p).collect());
        if !m.is_irreducible() {
            return invalid("modulus is not irreducible");
        }
        let q = p.checked_pow(k).filter(|q| *q <= MAX_Q).ok_or_else(|| crate::Error::Invalid("field too large".into()))?;
        let mut inner = Inner { p, k, q, modulus: m.coeffs().to_vec(), tables: None };
        if q <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(FieldSpec(Arc::new(inner)))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn k(&self) -> u32 {
        self.0.k
    }

    pub fn q(&self) -> u64 {
        self.0.q
    }

    /// The defining polynomial, low degree first (empty for `F_p`).
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn zero(&self) -> Fe {
        0
    }

    pub fn one(&self) -> Fe {
        1
    }

    /// The class of `t`. Only meaningful for `k ≥ 2`.
    pub fn gen_t(&self) -> Option<Fe> {
        (self.k() >= 2).then_some(self.p())
    }

    pub fn from_int(&self, n: i64) -> Fe {
        n.rem_euclid(self.p() as i64) as Fe
    }

    pub fn is_prime_subfield(&self, a: Fe) -> bool {
        a < self.p()
    }

    pub fn digits(&self, a: Fe) -> Vec<u64> {
        let p = self.p();
        let mut a = a;
        (0..self.k())
            .map(|_| {
                let c = a % p;
                a /= p;
                c
            })
            .collect()
    }

    pub fn from_digits(&self, ds: &[u64]) -> Fe {
        let p = self.p();
        ds.iter().rev().fold(0, |acc, &c| acc * p + c % p)
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let p = self.p();
        if self.k() == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        while a > 0 || b > 0 {
            let s = (a % p + b % p) % p;
            out += s * place;
            place *= p;
            a /= p;
            b /= p;
        }
        out
    }

    pub fn neg(&self, a: Fe) -> Fe {
        let p = self.p();
        if self.k() == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        if p == 2 {
            return a;
        }
        let (mut a, mut out, mut place) = (a, 0, 1);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            place *= p;
            a /= p;
        }
        out
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        let inner = &*self.0;
        if inner.k == 1 {
            return ((a as u128 * b as u128) % inner.p as u128) as Fe;
        }
        match &inner.tables {
            Some(t) => {
                let s = t.log[a as usize] as u64 + t.log[b as usize] as u64;
                let n = inner.q - 1;
                t.exp[(if s >= n { s - n } else { s }) as usize]
            }
            None => slow_mul(inner, a, b),
        }
    }

    pub fn pow(&self, a: Fe, e: u128) -> Fe {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let inner = &*self.0;
        if inner.k == 1 {
            return mod_pow(a as u128, e, inner.p as u128) as Fe;
        }
        if let Some(t) = &inner.tables {
            let n = (inner.q - 1) as u128;
            let idx = (t.log[a as usize] as u128 * (e % n)) % n;
            return t.exp[idx as usize];
        }
        let (mut b, mut e, mut acc) = (a, e, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a == 0 {
            return None;
        }
        Some(self.pow(a, self.q() as u128 - 2))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        Some(self.mul(a, self.inv(b)?))
    }

    /// `a ↦ a^p`.
    pub fn frob(&self, a: Fe) -> Fe {
        if self.k() == 1 {
            a
        } else {
            self.pow(a, self.p() as u128)
        }
    }

    /// Inverse of the Frobenius: the unique `b` with `b^p = a`.
    pub fn frob_inv(&self, a: Fe) -> Fe {
        if self.k() == 1 {
            a
        } else {
            self.pow(a, (self.q() / self.p()) as u128)
        }
    }

    /// All elements in handle order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.q()
    }

    /// Text form as a polynomial in `t`, e.g. `2*t+1`.
    pub fn format(&self, a: Fe) -> String {
        if a == 0 {
            return "0".into();
        }
        let ds = self.digits(a);
        let mut parts = Vec::new();
        for (i, &c) in ds.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".into(),
                _ => format!("t^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        parts.join("+")
    }

    /// An embedding of `self` into `target`, which must contain it.
    pub fn embedding_into(&self, target: &FieldSpec) -> Result<Embedding> {
        if self.p() != target.p() || target.k() % self.k() != 0 {
            return invalid(format!("{self} is not a subfield of {target}"));
        }
        if self.k() == 1 {
            return Ok(Embedding { source: self.clone(), target: target.clone(), image_t: None });
        }
        if self == target {
            return Ok(Embedding { source: self.clone(), target: target.clone(), image_t: Some(self.p()) });
        }
        let m = UPoly::new(target, self.modulus().to_vec());
        let roots = m.roots_in(target);
        let image = *roots.first().ok_or_else(|| crate::Error::Anomaly("modulus has no root in extension".into()))?;
        Ok(Embedding { source: self.clone(), target: target.clone(), image_t: Some(image) })
    }
}

/// Field homomorphism determined by the image of `t`.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: FieldSpec,
    target: FieldSpec,
    image_t: Option<Fe>,
}

impl Embedding {
    pub fn source(&self) -> &FieldSpec {
        &self.source
    }

    pub fn target(&self) -> &FieldSpec {
        &self.target
    }

    pub fn apply(&self, a: Fe) -> Fe {
        match self.image_t {
            None => a,
            Some(img) => {
                let tf = &self.target;
                let mut acc = 0;
                for &c in self.source.digits(a).iter().rev() {
                    acc = tf.add(tf.mul(acc, img), c);
                }
                acc
            }
        }
    }
}

fn slow_mul(inner: &Inner, a: Fe, b: Fe) -> Fe {
    let (p, k) = (inner.p, inner.k as usize);
    let da = decode(a, p, k);
    let db = decode(b, p, k);
    let mut prod = vec![0u128; 2 * k - 1];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p as u128;
        }
    }
    for i in (k..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for j in 0..k {
            let m = inner.modulus[j] as u128;
            prod[i - k + j] = (prod[i - k + j] + (p as u128 - c) * m) % p as u128;
        }
    }
    prod[..k].iter().rev().fold(0u64, |acc, &c| acc * p + c as u64)
}

fn decode(a: Fe, p: u64, k: usize) -> Vec<u64> {
    let mut a = a;
    (0..k)
        .map(|_| {
            let c = a % p;
            a /= p;
            c
        })
        .collect()
}

fn build_tables(inner: &Inner) -> Tables {
    let q = inner.q;
    let n = q - 1;
    let primes = prime_factors(n);
    let slow_pow = |mut b: Fe, mut e: u64| {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = slow_mul(inner, acc, b);
            }
            b = slow_mul(inner, b, b);
            e >>= 1;
        }
        acc
    };
    let g = (1..q)
        .find(|&g| primes.iter().all(|&l| slow_pow(g, n / l) != 1))
        .expect("multiplicative group is cyclic");
    let mut exp = Vec::with_capacity(n as usize);
    let mut log = vec![0u32; q as usize];
    let mut x = 1;
    for i in 0..n {
        exp.push(x);
        log[x as usize] = i as u32;
        x = slow_mul(inner, x, g);
    }
    Tables { exp, log }
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn first_irreducible(base: &FieldSpec, k: u32) -> Vec<u64> {
    let p = base.p();
    let count = p.pow(k);
    for h in 0..count {
        let mut coeffs = decode(h, p, k as usize);
        coeffs.push(1);
        if coeffs[0] == 0 {
            continue;
        }
        let f = UPoly::new(base, coeffs);
        if f.is_irreducible() {
            return f.coeffs().to_vec();
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli_are_first_in_order() {
        assert_eq!(FieldSpec::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FieldSpec::new(5, 2).unwrap().modulus(), &[2, 0, 1]);
        assert_eq!(FieldSpec::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FieldSpec::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn f9_examples() {
        let f = FieldSpec::new(3, 2).unwrap();
        let t = f.gen_t().unwrap();
        assert_eq!(f.mul(t, t), 2);
        assert_eq!(f.frob(t), f.mul(2, t));
        assert_eq!(f.format(f.add(f.mul(2, t), 1)), "2*t+1");
    }

    #[test]
    fn prime_field_inverse() {
        let f = FieldSpec::prime(7).unwrap();
        assert_eq!(f.inv(2), Some(4));
        assert_eq!(f.inv(0), None);
    }

    #[test]
    fn slow_path_agrees_with_tables() {
        let f = FieldSpec::new(5, 3).unwrap();
        let inner = &*f.0;
        for a in (1..f.q()).step_by(7) {
            for b in (1..f.q()).step_by(11) {
                assert_eq!(f.mul(a, b), slow_mul(inner, a, b));
            }
        }
    }

    #[test]
    fn large_field_without_tables() {
        let f = FieldSpec::new(2, 24).unwrap();
        assert!(f.0.tables.is_none());
        let a = 0x5a5a5a;
        let ai = f.inv(a).unwrap();
        assert_eq!(f.mul(a, ai), 1);
        let mut x = a;
        for _ in 0..24 {
            x = f.frob(x);
        }
        assert_eq!(x, a);
    }

    #[test]
    fn embedding_respects_arithmetic() {
        let small = FieldSpec::new(3, 2).unwrap();
        let big = FieldSpec::new(3, 4).unwrap();
        let emb = small.embedding_into(&big).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(emb.apply(small.mul(a, b)), big.mul(emb.apply(a), emb.apply(b)));
                assert_eq!(emb.apply(small.add(a, b)), big.add(emb.apply(a), emb.apply(b)));
            }
        }
        assert!(small.embedding_into(&FieldSpec::new(3, 3).unwrap()).is_err());
    }
}
