//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fpure::forms::HomForm;
use fpure::gfpoly::{Fe, FieldSpec};
use fpure::ratbase::Rat;
use num_bigint::BigUint;
use rand::Rng;

/// `f^N ∈ m^[q]` by repeated squaring, discarding every monomial with an
/// exponent `≥ q` after each product (the discarded part lies in the ideal).
pub fn oracle_member(f: &HomForm, n: u64, q: u64) -> bool {
    let k = f.field();
    let mul = |a: &BTreeMap<Vec<u32>, Fe>, b: &BTreeMap<Vec<u32>, Fe>| {
        let mut out: BTreeMap<Vec<u32>, Fe> = BTreeMap::new();
        for (va, &ca) in a {
            for (vb, &cb) in b {
                let v: Vec<u32> = va.iter().zip(vb).map(|(x, y)| x + y).collect();
                if v.iter().any(|&x| x as u64 >= q) {
                    continue;
                }
                let s = out.entry(v).or_insert(0);
                *s = k.add(*s, k.mul(ca, cb));
            }
        }
        out.retain(|_, c| *c != 0);
        out
    };
    let nv = f.nvars();
    let mut acc: BTreeMap<Vec<u32>, Fe> = [(vec![0; nv], 1)].into_iter().collect();
    let mut base: BTreeMap<Vec<u32>, Fe> =
        f.terms().iter().filter(|(v, _)| v.iter().all(|&x| (x as u64) < q)).map(|(v, c)| (v.clone(), *c)).collect();
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
    acc.is_empty()
}

/// `ν_f(p^e)` by bisection over `[0, p^e]` with [`oracle_member`].
pub fn oracle_nu(f: &HomForm, e: u32) -> u64 {
    let q = f.field().p().pow(e);
    // f^q ∈ m^[q] always; f^0 = 1 never is
    let (mut lo, mut hi) = (0u64, q);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if oracle_member(f, mid, q) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Digits of the non-terminating base-`p` expansion of `a/b ∈ (0, 1]` by
/// long division, borrowing one unit when the expansion would terminate.
pub fn oracle_digits(a: u64, b: u64, p: u64, e: u32) -> Vec<u64> {
    // a/b = (a·p^e − 1)/(b·p^e) + 1/(b·p^e): the non-terminating digits up to e
    // agree with the ordinary ones of a/b − ε for small ε, i.e. of (a·B − 1)/(b·B)
    let big_b = BigUint::from(p).pow(e + 2);
    let num = BigUint::from(a) * &big_b - 1u32;
    let den = BigUint::from(b) * &big_b;
    let mut rem = num;
    let mut out = Vec::new();
    for _ in 0..e {
        rem *= p;
        let digit = &rem / &den;
        rem -= &digit * &den;
        out.push(u64::try_from(digit).unwrap());
    }
    out
}

pub fn random_binary(k: &FieldSpec, d: u32, rng: &mut impl Rng) -> HomForm {
    loop {
        let c: Vec<Fe> = (0..=d).map(|_| rng.gen_range(0..k.q())).collect();
        if c.iter().any(|&x| x != 0) {
            return HomForm::from_binary_coeffs(k, &c).unwrap();
        }
    }
}

pub fn random_squarefree(k: &FieldSpec, d: u32, rng: &mut impl Rng) -> HomForm {
    loop {
        let f = random_binary(k, d, rng);
        if fpure::forms::is_squarefree_binary(&f).unwrap() {
            return f;
        }
    }
}

/// A random invertible 2×2 matrix.
pub fn random_gl2(k: &FieldSpec, rng: &mut impl Rng) -> Vec<Vec<Fe>> {
    loop {
        let m: Vec<Vec<Fe>> = (0..2).map(|_| (0..2).map(|_| rng.gen_range(0..k.q())).collect()).collect();
        if fpure::forms::determinant(k, &m) != 0 {
            return m;
        }
    }
}

pub fn rat(a: i64, b: i64) -> Rat {
    Rat::new(a, b)
}

pub const SMALL_PRIMES: [u64; 4] = [2, 3, 5, 7];
