use std::fmt;

use crate::error::{invalid, Result};

use super::field::{prime_factors, Embedding, Fe, FieldSpec};

/// Brute-force root finding is used up to this field size.
const BRUTE_FORCE_ROOTS: u64 = 1_000_000;

/// Univariate polynomial over a finite field, low degree first, with
/// trailing zeros removed.
#[derive(Clone, PartialEq, Eq)]
pub struct UPoly {
    field: FieldSpec,
    coeffs: Vec<Fe>,
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {:?}", self.format("u"), self.field)
    }
}

impl UPoly {
    pub fn new(field: &FieldSpec, mut coeffs: Vec<Fe>) -> UPoly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        UPoly { field: field.clone(), coeffs }
    }

    pub fn zero(field: &FieldSpec) -> UPoly {
        UPoly::new(field, Vec::new())
    }

    pub fn constant(field: &FieldSpec, c: Fe) -> UPoly {
        UPoly::new(field, vec![c])
    }

    pub fn one(field: &FieldSpec) -> UPoly {
        UPoly::constant(field, 1)
    }

    /// `c·u^n`.
    pub fn monomial(field: &FieldSpec, c: Fe, n: usize) -> UPoly {
        let mut v = vec![0; n + 1];
        v[n] = c;
        UPoly::new(field, v)
    }

    /// The variable `u`.
    pub fn var(field: &FieldSpec) -> UPoly {
        UPoly::monomial(field, 1, 1)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn lead(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let f = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        UPoly::new(f, (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        let f = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        UPoly::new(f, (0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn scale(&self, c: Fe) -> UPoly {
        let f = &self.field;
        UPoly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        UPoly::new(f, out)
    }

    pub fn pow(&self, e: u32) -> UPoly {
        let mut acc = UPoly::one(&self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let f = &self.field;
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (UPoly::zero(f), self.clone());
        }
        let inv = f.inv(d.lead()).expect("nonzero lead");
        let mut r = self.coeffs.clone();
        let mut q = vec![0; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            let t = f.mul(c, inv);
            q[i - dd] = t;
            for j in 0..=dd {
                r[i - dd + j] = f.sub(r[i - dd + j], f.mul(t, d.coeffs[j]));
            }
        }
        r.truncate(dd);
        (UPoly::new(f, q), UPoly::new(f, r))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.divrem(d).1
    }

    /// Exact division; panics if `d` does not divide `self`.
    pub fn div_exact(&self, d: &UPoly) -> UPoly {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lead()).unwrap())
    }

    pub fn derivative(&self) -> UPoly {
        let f = &self.field;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int((i as u64 % f.p()) as i64)))
            .collect();
        UPoly::new(f, v)
    }

    pub fn eval(&self, x: Fe) -> Fe {
        let f = &self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, e: u128, m: &UPoly) -> UPoly {
        let mut base = self.rem(m);
        let mut acc = UPoly::one(&self.field).rem(m);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Coefficientwise Frobenius `Σ c_i u^i ↦ Σ c_i^p u^{ip}`, i.e. `self^p`.
    pub fn frobenius(&self) -> UPoly {
        let f = &self.field;
        let p = f.p() as usize;
        let mut v = vec![0; self.coeffs.len().saturating_sub(1) * p + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[i * p] = f.frob(c);
        }
        UPoly::new(f, v)
    }

    /// For a polynomial in `u^p`, the unique `g` with `g^p = self`.
    pub fn pth_root(&self) -> Option<UPoly> {
        let f = &self.field;
        let p = f.p() as usize;
        if self.coeffs.iter().enumerate().any(|(i, &c)| c != 0 && i % p != 0) {
            return None;
        }
        let v = self.coeffs.iter().step_by(p).map(|&c| f.frob_inv(c)).collect();
        Some(UPoly::new(f, v))
    }

    /// Image under a field embedding.
    pub fn map(&self, emb: &Embedding) -> UPoly {
        UPoly::new(emb.target(), self.coeffs.iter().map(|&c| emb.apply(c)).collect())
    }

    /// True iff there is no repeated root over the algebraic closure.
    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_zero() {
            return invalid("squarefree test on the zero polynomial");
        }
        let d = self.derivative();
        if d.is_zero() {
            return Ok(self.degree() == Some(0));
        }
        Ok(gcd(self, &d).degree() == Some(0))
    }

    /// Squarefree decomposition of a nonzero polynomial: pairwise coprime
    /// monic squarefree `g_i` with `monic(self) = Π g_i^{m_i}`, sorted by
    /// multiplicity.
    pub fn squarefree_decomposition(&self) -> Vec<(UPoly, u32)> {
        assert!(!self.is_zero());
        let mut out: Vec<(UPoly, u32)> = Vec::new();
        sqf_into(&self.monic(), 1, &mut out);
        out.sort_by_key(|(_, m)| *m);
        let mut merged: Vec<(UPoly, u32)> = Vec::new();
        for (g, m) in out {
            match merged.last_mut() {
                Some((h, n)) if *n == m => *h = h.mul(&g),
                _ => merged.push((g, m)),
            }
        }
        merged
    }

    /// Irreducibility over the coefficient field (Rabin's test).
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let f = self.monic();
        let q = self.field.q() as u128;
        let u = UPoly::var(&self.field);
        // powers[j] = u^{q^j} mod f
        let mut powers = vec![u.rem(&f)];
        for _ in 0..n {
            let next = powers.last().unwrap().pow_mod(q, &f);
            powers.push(next);
        }
        if powers[n] != u.rem(&f) {
            return false;
        }
        prime_factors(n as u64).into_iter().all(|l| {
            let h = powers[n / l as usize].sub(&u);
            gcd(&f, &h).degree() == Some(0)
        })
    }

    /// Roots lying in `target`, which must contain the coefficient field.
    /// Each root is listed once, in handle order.
    pub fn roots_in(&self, target: &FieldSpec) -> Vec<Fe> {
        assert!(!self.is_zero(), "roots of the zero polynomial");
        let g = if self.field == *target {
            self.clone()
        } else {
            let emb = self.field.embedding_into(target).expect("target must extend field");
            self.map(&emb)
        };
        if g.degree() == Some(0) {
            return Vec::new();
        }
        let mut roots = if target.q() <= BRUTE_FORCE_ROOTS {
            target.elements().filter(|&x| g.eval(x) == 0).collect()
        } else {
            let m = g.monic();
            let u = UPoly::var(target);
            let split = gcd(&m, &u.pow_mod(target.q() as u128, &m).sub(&u));
            let mut acc = Vec::new();
            equal_degree_roots(&split, &mut acc, 0);
            acc
        };
        roots.sort_unstable();
        roots.dedup();
        roots
    }

    /// Text form in the given variable name, highest degree first.
    pub fn format(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let f = &self.field;
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let cs = f.format(c);
            let cs = if f.is_prime_subfield(c) || !cs.contains('+') { cs } else { format!("({cs})") };
            parts.push(match (c, i) {
                (_, 0) => cs,
                (1, _) => mono,
                _ => format!("{cs}*{mono}"),
            });
        }
        parts.join("+")
    }
}

/// Monic gcd; `gcd(f, 0) = monic(f)`.
pub fn gcd(a: &UPoly, b: &UPoly) -> UPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    a.monic()
}

fn sqf_into(f: &UPoly, mult: u32, out: &mut Vec<(UPoly, u32)>) {
    if f.degree().unwrap_or(0) == 0 {
        return;
    }
    let mut c = gcd(f, &f.derivative());
    let mut w = f.div_exact(&c);
    let mut i = 1;
    while w.degree() != Some(0) {
        let y = gcd(&w, &c);
        let fac = w.div_exact(&y);
        if fac.degree() != Some(0) {
            out.push((fac, i * mult));
        }
        w = y;
        c = c.div_exact(&w);
        i += 1;
    }
    if c.degree() != Some(0) {
        let root = c.pth_root().expect("remaining cofactor is a p-th power");
        sqf_into(&root, mult * f.field().p() as u32, out);
    }
}

/// Splits a monic product of distinct linear factors.
fn equal_degree_roots(g: &UPoly, out: &mut Vec<Fe>, salt: u64) {
    let f = g.field().clone();
    match g.degree() {
        None | Some(0) => return,
        Some(1) => {
            out.push(f.neg(f.div(g.coeff(0), g.coeff(1)).unwrap()));
            return;
        }
        _ => {}
    }
    let q = f.q();
    let mut delta = salt.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407) % q;
    loop {
        let h = if f.p() == 2 {
            // trace of δ·u: Σ (δu)^{2^i}
            let w = UPoly::monomial(&f, delta.max(1), 1).rem(g);
            let mut term = w.clone();
            let mut acc = w;
            for _ in 1..f.k() {
                term = term.mul(&term).rem(g);
                acc = acc.add(&term);
            }
            acc
        } else {
            let w = UPoly::new(&f, vec![delta, 1]);
            w.pow_mod(((q - 1) / 2) as u128, g).sub(&UPoly::one(&f))
        };
        let d = gcd(g, &h);
        let dg = d.degree().unwrap_or(0);
        if dg > 0 && dg < g.degree().unwrap() {
            equal_degree_roots(&d, out, salt + 1);
            equal_degree_roots(&g.div_exact(&d), out, salt + 2);
            return;
        }
        delta = (delta.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407)) % q;
    }
}
