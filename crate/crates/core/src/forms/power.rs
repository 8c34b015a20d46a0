//! Powers of forms modulo Frobenius powers `m^[p^e] = (x_1^{p^e}, …, x_n^{p^e})`.
//!
//! Writing `N = c_0 + p·N'` with `0 ≤ c_0 < p`,
//!
//! ```text
//! f^N mod m^[p^e]  =  f^{c_0} · (f^{N'} mod m^[p^{e−1}])^{[p]}   mod m^[p^e]
//! ```
//!
//! where `g^{[p]}` raises every coefficient to the `p`-th power and
//! multiplies every exponent by `p`. Terms of `f^{N'}` that were already
//! discarded at depth `e − 1` stay discarded at depth `e`, so the recursion
//! is exact.
//!
//! For binary forms the residue of a degree-`D` power is supported on
//! `x^{D−j} y^j` with `D − q < j < q`, a window of width `2q − 1 − D`. Near
//! the threshold this window is tiny, which keeps membership tests cheap
//! even for very deep `e`.

use std::collections::{BTreeMap, HashMap};

use crate::error::{invalid, Error, Result};
use crate::gfpoly::{Fe, FieldSpec, UPoly};
use crate::ratbase::pow_u128;

use super::homform::HomForm;

/// Coefficient arithmetic needed by the engine.
pub(crate) trait Ring {
    type E: Clone;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn mul_add(&self, acc: &mut Self::E, a: &Self::E, b: &Self::E);
    fn frob(&self, a: &Self::E) -> Self::E;
    fn p(&self) -> u64;
}

pub(crate) struct FieldRing<'a>(pub &'a FieldSpec);

impl Ring for FieldRing<'_> {
    type E = Fe;
    fn zero(&self) -> Fe {
        0
    }
    fn one(&self) -> Fe {
        1
    }
    fn is_zero(&self, a: &Fe) -> bool {
        *a == 0
    }
    #[inline]
    fn mul_add(&self, acc: &mut Fe, a: &Fe, b: &Fe) {
        if *b != 0 {
            *acc = self.0.add(*acc, self.0.mul(*a, *b));
        }
    }
    fn frob(&self, a: &Fe) -> Fe {
        self.0.frob(*a)
    }
    fn p(&self) -> u64 {
        self.0.p()
    }
}

/// Polynomials in one parameter `a` over a field.
pub(crate) struct ParamRing<'a>(pub &'a FieldSpec);

impl Ring for ParamRing<'_> {
    type E = UPoly;
    fn zero(&self) -> UPoly {
        UPoly::zero(self.0)
    }
    fn one(&self) -> UPoly {
        UPoly::one(self.0)
    }
    fn is_zero(&self, a: &UPoly) -> bool {
        a.is_zero()
    }
    fn mul_add(&self, acc: &mut UPoly, a: &UPoly, b: &UPoly) {
        if !b.is_zero() && !a.is_zero() {
            *acc = acc.add(&a.mul(b));
        }
    }
    fn frob(&self, a: &UPoly) -> UPoly {
        a.frobenius()
    }
    fn p(&self) -> u64 {
        self.0.p()
    }
}

/// Residue of a binary power: coefficient of `x^{total−j} y^j` stored at
/// `c[j − lo]`. `None` stands for the zero residue.
#[derive(Clone, Debug)]
pub(crate) struct BinWindow<E> {
    pub total: u128,
    pub lo: u128,
    pub c: Vec<E>,
}

pub(crate) fn depth(p: u64, e: u32, d: u128) -> Result<u128> {
    let q = pow_u128(p, e).ok_or(Error::Overflow { p, e })?;
    // totals reach d·N < d·q, times p at the next level
    q.checked_mul(d.max(1)).and_then(|x| x.checked_mul(p as u128)).ok_or(Error::Overflow { p, e })?;
    Ok(q)
}

/// A binary form together with its lazily grown table of low powers
/// `f^0, …, f^{p−1}`, so repeated membership tests share the work.
pub(crate) struct BinaryPowers<'r, R: Ring> {
    ring: &'r R,
    d: usize,
    table: Vec<Vec<R::E>>,
}

impl<'r, R: Ring> BinaryPowers<'r, R> {
    pub fn new(ring: &'r R, f: &[R::E]) -> Self {
        let base = vec![ring.one()];
        BinaryPowers { ring, d: f.len() - 1, table: vec![base, f.to_vec()] }
    }

    fn power(&mut self, c: usize) -> &[R::E] {
        while self.table.len() <= c {
            let last = self.table.last().unwrap();
            let f = &self.table[1];
            let mut out = vec![self.ring.zero(); last.len() + self.d];
            for (i, a) in last.iter().enumerate() {
                if self.ring.is_zero(a) {
                    continue;
                }
                for (j, b) in f.iter().enumerate() {
                    self.ring.mul_add(&mut out[i + j], b, a);
                }
            }
            self.table.push(out);
        }
        &self.table[c]
    }

    /// `f^n mod m^[p^e]`.
    pub fn residue(&mut self, n: u128, e: u32) -> Result<Option<BinWindow<R::E>>> {
        if e == 0 {
            return invalid("depth must be at least 1");
        }
        let p = self.ring.p();
        let q_e = depth(p, e, self.d as u128)?;
        if n == 0 {
            return Ok(Some(BinWindow { total: 0, lo: 0, c: vec![self.ring.one()] }));
        }
        if n >= q_e {
            return Ok(None);
        }
        let mut ds = Vec::with_capacity(e as usize);
        let mut m = n;
        for _ in 0..e {
            ds.push((m % p as u128) as usize);
            m /= p as u128;
        }
        let d = self.d as u128;
        let pp = p as u128;
        let mut cur = BinWindow { total: 0, lo: 0, c: vec![self.ring.one()] };
        let mut q: u128 = 1;
        for level in 1..=e as usize {
            let c = ds[e as usize - level];
            q *= pp;
            let total = pp * cur.total + d * c as u128;
            let lo = (total + 1).saturating_sub(q);
            let hi = total.min(q - 1);
            if lo > hi {
                return Ok(None);
            }
            let ring = self.ring;
            let frobbed: Vec<(u128, R::E)> = cur
                .c
                .iter()
                .enumerate()
                .filter(|(_, r)| !ring.is_zero(r))
                .map(|(i, r)| (pp * (cur.lo + i as u128), ring.frob(r)))
                .collect();
            let pc = self.power(c);
            let dc = pc.len() as u128 - 1;
            let mut out = vec![ring.zero(); (hi - lo + 1) as usize];
            for (base, r) in &frobbed {
                if *base > hi {
                    break;
                }
                if base + dc < lo {
                    continue;
                }
                let s0 = lo.saturating_sub(*base);
                let s1 = dc.min(hi - base);
                for s in s0..=s1 {
                    ring.mul_add(&mut out[(base + s - lo) as usize], r, &pc[s as usize]);
                }
            }
            let Some(first) = out.iter().position(|x| !ring.is_zero(x)) else {
                return Ok(None);
            };
            let last = out.iter().rposition(|x| !ring.is_zero(x)).unwrap();
            out.truncate(last + 1);
            out.drain(..first);
            cur = BinWindow { total, lo: lo + first as u128, c: out };
        }
        Ok(Some(cur))
    }

    pub fn is_member(&mut self, n: u128, e: u32) -> Result<bool> {
        Ok(self.residue(n, e)?.is_none())
    }
}

/// Residue of a polynomial modulo `m^[p^e]`; every exponent is below `p^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobTruncPoly {
    pub n: usize,
    pub e: u32,
    pub p: u64,
    pub terms: BTreeMap<Vec<u128>, Fe>,
}

impl FrobTruncPoly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

fn sparse_residue(field: &FieldSpec, f: &HomForm, n: u128, e: u32) -> Result<BTreeMap<Vec<u128>, Fe>> {
    if e == 0 {
        return invalid("depth must be at least 1");
    }
    let nv = f.nvars();
    let p = field.p();
    let q_e = depth(p, e, f.degree() as u128)?;
    let one: BTreeMap<Vec<u128>, Fe> = [(vec![0u128; nv], 1)].into_iter().collect();
    if n == 0 {
        return Ok(one);
    }
    if n >= q_e {
        return Ok(BTreeMap::new());
    }
    let pp = p as u128;
    let mut ds = Vec::with_capacity(e as usize);
    let mut m = n;
    for _ in 0..e {
        ds.push((m % pp) as u32);
        m /= pp;
    }
    let mut powers: HashMap<u32, Vec<(Vec<u128>, Fe)>> = HashMap::new();
    let mut cur = one;
    let mut q: u128 = 1;
    for level in 1..=e as usize {
        let c = ds[e as usize - level];
        q *= pp;
        let pc = powers.entry(c).or_insert_with(|| {
            f.pow(c).terms().iter().map(|(v, &a)| (v.iter().map(|&x| x as u128).collect(), a)).collect()
        });
        let mut next: HashMap<Vec<u128>, Fe> = HashMap::new();
        for (v, &a) in &cur {
            let a = field.frob(a);
            let base: Vec<u128> = v.iter().map(|x| x * pp).collect();
            if base.iter().any(|&x| x >= q) {
                continue;
            }
            for (w, b) in pc.iter() {
                let key: Vec<u128> = base.iter().zip(w).map(|(x, y)| x + y).collect();
                if key.iter().any(|&x| x >= q) {
                    continue;
                }
                let slot = next.entry(key).or_insert(0);
                *slot = field.add(*slot, field.mul(a, *b));
            }
        }
        cur = next.into_iter().filter(|(_, c)| *c != 0).collect();
        if cur.is_empty() {
            break;
        }
    }
    Ok(cur)
}

/// The residue of `f^N` modulo `m^[p^e]`.
pub fn pow_mod_frobenius(f: &HomForm, n: u128, e: u32) -> Result<FrobTruncPoly> {
    let field = f.field();
    let terms = if f.nvars() == 2 {
        let coeffs = f.binary_coeffs().unwrap();
        let ring = FieldRing(field);
        let mut bp = BinaryPowers::new(&ring, &coeffs);
        match bp.residue(n, e)? {
            None => BTreeMap::new(),
            Some(w) => w
                .c
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| {
                    let j = w.lo + i as u128;
                    (vec![w.total - j, j], c)
                })
                .collect(),
        }
    } else {
        sparse_residue(field, f, n, e)?
    };
    Ok(FrobTruncPoly { n: f.nvars(), e, p: field.p(), terms })
}

/// True iff `f^N ∈ m^[p^e]`.
pub fn in_frobenius_power(f: &HomForm, n: u128, e: u32) -> Result<bool> {
    if f.nvars() == 2 {
        let coeffs = f.binary_coeffs().unwrap();
        let ring = FieldRing(f.field());
        BinaryPowers::new(&ring, &coeffs).is_member(n, e)
    } else {
        Ok(sparse_residue(f.field(), f, n, e)?.is_empty())
    }
}

pub(crate) fn dense_power<R: Ring>(ring: &R, f: &[R::E], n: u32) -> Vec<R::E> {
    let mul = |a: &[R::E], b: &[R::E]| {
        let mut out = vec![ring.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if ring.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                ring.mul_add(&mut out[i + j], x, y);
            }
        }
        out
    };
    let mut acc = vec![ring.one()];
    let mut base = f.to_vec();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = mul(&acc, &base);
        }
        n >>= 1;
        if n > 0 {
            base = mul(&base, &base);
        }
    }
    acc
}

/// Coefficient of `x^{dN−j} y^j` in `f^N` for a binary form.
pub fn coeff_of_power(f: &HomForm, n: u32, j: u64) -> Result<Fe> {
    let Some(coeffs) = f.binary_coeffs() else {
        return invalid("coefficient extraction needs a binary form");
    };
    let top = f.degree() as u64 * n as u64;
    if j > top {
        return invalid(format!("index {j} is outside [0, {top}]"));
    }
    Ok(dense_power(&FieldRing(f.field()), &coeffs, n)[j as usize])
}

/// Naive reference: full expansion followed by discarding every term with
/// an exponent `≥ p^e`.
pub fn naive_pow_mod_frobenius(f: &HomForm, n: u32, e: u32) -> FrobTruncPoly {
    let q = f.field().p().pow(e) as u128;
    let full = f.pow(n);
    let terms: BTreeMap<Vec<u128>, Fe> = full
        .terms()
        .iter()
        .map(|(v, &c)| (v.iter().map(|&x| x as u128).collect::<Vec<_>>(), c))
        .filter(|(v, _)| v.iter().all(|&x| x < q))
        .collect();
    FrobTruncPoly { n: f.nvars(), e, p: f.field().p(), terms }
}
