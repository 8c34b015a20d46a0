//! `ν_f(p^e)`, certified intervals and exact F-pure thresholds.
//!
//! For a binary form `f` of degree `d` the exact value is decided as follows.
//! Forms with at most two distinct linear factors over the closure are
//! monomials after a change of coordinates. Proper powers `f = c·g^r` use
//! `fpt(f) = fpt(g)/r`. A reduced form has threshold `2/d` or a truncation
//! `⟨2/d⟩_L`; testing `f^{N_L} ∈ m^[p^L]` for `L = 1, 2, …` finds the first
//! truncation the threshold does not exceed, and the failure at `L − 1`
//! pins it from below. Everything else gets a certified interval.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::forms::{in_frobenius_power, perfect_power_decompose, BinaryFactorization, BinaryPowers, FieldRing, HomForm};
use crate::gfpoly::{Fe, FieldSpec};
use crate::ratbase::{mult_order, p_valuation, pow_u128, trunc, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Monomial,
    PowerRule,
    PrimePowerDegree,
    TruncationCandidate,
    GenericTwoOverD,
    BoundedFallback,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Monomial => "monomial",
            Method::PowerRule => "power-rule",
            Method::PrimePowerDegree => "prime-power-degree",
            Method::TruncationCandidate => "truncation-candidate",
            Method::GenericTwoOverD => "generic-two-over-d",
            Method::BoundedFallback => "bounded-fallback",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An exact threshold or a half-open interval `(lo, hi]` containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FptValue {
    Exact(Rat),
    Interval { lo: Rat, hi: Rat },
}

/// One membership test: whether `f^n ∈ m^[p^e]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub n: u128,
    pub e: u32,
    pub member: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FptResult {
    pub value: FptValue,
    pub method: Method,
    /// Truncation place `L` when the value is `⟨2/d⟩_L`.
    pub place: Option<u32>,
    pub certificates: Vec<Certificate>,
}

impl FptResult {
    pub fn exact(&self) -> Option<&Rat> {
        match &self.value {
            FptValue::Exact(v) => Some(v),
            FptValue::Interval { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact().is_some()
    }

    /// One-line summary such as `19/49 (exact, truncation-candidate, L=2)`.
    pub fn summary(&self) -> String {
        let place = self.place.map(|l| format!(", L={l}")).unwrap_or_default();
        match &self.value {
            FptValue::Exact(v) => format!("{v} (exact, {}{place})", self.method),
            FptValue::Interval { lo, hi } => format!("({lo}, {hi}] (interval, {}{place})", self.method),
        }
    }

    fn scaled(self, r: u32) -> FptResult {
        let value = match self.value {
            FptValue::Exact(v) => FptValue::Exact(v.div_int(r as u64)),
            FptValue::Interval { lo, hi } => FptValue::Interval { lo: lo.div_int(r as u64), hi: hi.div_int(r as u64) },
        };
        FptResult { value, method: Method::PowerRule, ..self }
    }
}

/// Serializable view of an [`FptResult`].
#[derive(Clone, Debug, Serialize)]
pub struct FptReport {
    pub schema_version: u32,
    pub form: String,
    pub field: String,
    pub status: &'static str,
    pub value: Option<Rat>,
    pub bounds: Option<(Rat, Rat)>,
    pub method: Method,
    pub place: Option<u32>,
    pub certificates: Vec<CertificateRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateRecord {
    pub n: String,
    pub e: u32,
    pub member: bool,
}

impl FptReport {
    pub fn new(f: &HomForm, r: &FptResult) -> FptReport {
        let (status, value, bounds) = match &r.value {
            FptValue::Exact(v) => ("exact", Some(v.clone()), None),
            FptValue::Interval { lo, hi } => ("interval", None, Some((lo.clone(), hi.clone()))),
        };
        FptReport {
            schema_version: crate::SCHEMA_VERSION,
            form: f.to_string(),
            field: f.field().to_string(),
            status,
            value,
            bounds,
            method: r.method,
            place: r.place,
            certificates: r
                .certificates
                .iter()
                .map(|c| CertificateRecord { n: c.n.to_string(), e: c.e, member: c.member })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Deepest `e` used for interval fallbacks and for the truncation scan
    /// when `p` divides the reduced denominator of `2/d`.
    pub e_max: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { e_max: 8 }
    }
}

fn check_form(f: &HomForm) -> Result<()> {
    if f.is_zero() {
        return invalid("the zero form has no threshold");
    }
    if f.degree() == 0 {
        return invalid("constants have no threshold");
    }
    Ok(())
}

/// `min 1/a_i` over the positive exponents.
pub fn fpt_monomial(exps: &[u32]) -> Result<Rat> {
    match exps.iter().copied().filter(|&a| a > 0).max() {
        Some(a) => Ok(Rat::new(1, a)),
        None => invalid("monomial has no positive exponent"),
    }
}

/// Largest `N` with `f^N ∉ m^[p^e]`, found level by level from
/// `p·ν(e−1) ≤ ν(e) ≤ p·ν(e−1) + p − 1`.
fn nu_levels(p: u64, e: u32, certs: &mut Vec<Certificate>, mut member: impl FnMut(u128, u32) -> Result<bool>) -> Result<u128> {
    let pp = p as u128;
    let mut nu: u128 = 0;
    for level in 1..=e {
        // f^{p·ν} ∉ m^[p^level]; find the largest non-member in the bracket
        let (mut lo, mut hi) = (pp * nu, pp * nu + pp - 1);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            let m = member(mid, level)?;
            certs.push(Certificate { n: mid, e: level, member: m });
            if m {
                hi = mid - 1;
            } else {
                lo = mid;
            }
        }
        nu = lo;
    }
    Ok(nu)
}

/// `ν_f(p^e) = max{N : f^N ∉ m^[p^e]}`.
pub fn nu(f: &HomForm, e: u32) -> Result<u128> {
    check_form(f)?;
    if e == 0 {
        return invalid("depth must be at least 1");
    }
    let mut certs = Vec::new();
    nu_with(f, e, &mut certs)
}

fn nu_with(f: &HomForm, e: u32, certs: &mut Vec<Certificate>) -> Result<u128> {
    let p = f.field().p();
    if f.nvars() == 2 {
        let c = f.binary_coeffs().unwrap();
        let ring = FieldRing(f.field());
        let mut bp = BinaryPowers::new(&ring, &c);
        nu_levels(p, e, certs, |n, l| bp.is_member(n, l))
    } else {
        nu_levels(p, e, certs, |n, l| in_frobenius_power(f, n, l))
    }
}

fn bounds_from_nu(nu: u128, p: u64, e: u32) -> (Rat, Rat) {
    let q = BigUint::from(p).pow(e);
    let lo = Rat::new(num_bigint::BigInt::from(nu), num_bigint::BigInt::from(q.clone()));
    let hi = Rat::new(num_bigint::BigInt::from(nu + 1), num_bigint::BigInt::from(q));
    (lo, hi)
}

/// `(ν/p^e, (ν+1)/p^e]`, which always contains the threshold.
pub fn fpt_bounds(f: &HomForm, e: u32) -> Result<(Rat, Rat)> {
    let n = nu(f, e)?;
    Ok(bounds_from_nu(n, f.field().p(), e))
}

fn interval_result(f: &HomForm, e: u32) -> Result<FptResult> {
    let mut certs = Vec::new();
    let n = nu_with(f, e, &mut certs)?;
    let (lo, hi) = bounds_from_nu(n, f.field().p(), e);
    Ok(FptResult { value: FptValue::Interval { lo, hi }, method: Method::BoundedFallback, place: None, certificates: certs })
}

/// Exact threshold of a binary form where the theory provides one, else a
/// certified interval at depth [`EngineConfig::e_max`].
pub fn fpt_binary_exact(f: &HomForm) -> Result<FptResult> {
    fpt_binary_exact_with(f, &EngineConfig::default())
}

pub fn fpt_binary_exact_with(f: &HomForm, cfg: &EngineConfig) -> Result<FptResult> {
    if f.nvars() != 2 {
        return invalid("expected a binary form");
    }
    check_form(f)?;
    let r = binary_dispatch(f.field(), &f.binary_coeffs().unwrap(), cfg)?;
    check_range(&r, 2, f.degree())?;
    Ok(r)
}

pub(crate) fn check_range(r: &FptResult, n: usize, d: u32) -> Result<()> {
    if let Some(v) = r.exact() {
        let top = Rat::new(n.min(d as usize) as u64, d);
        if *v < Rat::new(1, d) || *v > top {
            return Err(Error::Anomaly(format!("exact value {v} is outside [1/{d}, {top}]")));
        }
    }
    Ok(())
}

fn exact(v: Rat, method: Method, place: Option<u32>, certs: Vec<Certificate>) -> FptResult {
    FptResult { value: FptValue::Exact(v), method, place, certificates: certs }
}

/// `Some(t)` when `d = p^t` or `d = 2p^t`.
pub fn prime_power_shape(d: u64, p: u64) -> Option<u32> {
    let t = p_valuation(d, p);
    let rest = d / p.pow(t);
    (rest == 1 || rest == 2).then_some(t)
}

pub(crate) fn binary_dispatch(field: &FieldSpec, c: &[Fe], cfg: &EngineConfig) -> Result<FptResult> {
    let d = c.len() as u32 - 1;
    let nonzero: Vec<usize> = (0..c.len()).filter(|&j| c[j] != 0).collect();
    if nonzero.len() == 1 {
        let j = nonzero[0] as u32;
        return Ok(exact(fpt_monomial(&[d - j, j])?, Method::Monomial, None, Vec::new()));
    }
    let bf = BinaryFactorization::of(field, c);
    let mults = bf.multiplicities();
    if mults.len() <= 2 {
        let top = *mults.iter().max().unwrap();
        return Ok(exact(Rat::new(1, top), Method::Monomial, None, Vec::new()));
    }
    if bf.is_reduced() {
        return reduced_dispatch(field, c, cfg);
    }
    let f = HomForm::from_binary_coeffs(field, c)?;
    let pp = perfect_power_decompose(&f)?;
    if pp.exponent > 1 {
        let inner = binary_dispatch(field, &pp.base.binary_coeffs().unwrap(), cfg)?;
        return Ok(inner.scaled(pp.exponent));
    }
    interval_result(&f, cfg.e_max)
}

/// Dispatch for squarefree binary forms.
pub(crate) fn reduced_dispatch(field: &FieldSpec, c: &[Fe], cfg: &EngineConfig) -> Result<FptResult> {
    let p = field.p();
    let d = c.len() as u64 - 1;
    let lam = Rat::new(2, d);
    let b = lam.denom().to_u64().unwrap();
    let ring = FieldRing(field);
    let mut bp = BinaryPowers::new(&ring, c);
    let mut certs = Vec::new();
    let mut test = |l: u32, certs: &mut Vec<Certificate>| -> Result<(u128, bool)> {
        let n = trunc(&lam, p, l)?.numer_u128().ok_or(Error::Overflow { p, e: l })?;
        let m = bp.is_member(n, l)?;
        certs.push(Certificate { n, e: l, member: m });
        Ok((n, m))
    };
    if let Some(t) = prime_power_shape(d, p) {
        for l in 1..=t + 1 {
            if test(l, &mut certs)?.1 {
                return Err(Error::Anomaly(format!(
                    "reduced form of degree {d} over F_{p} passes the truncation test at L={l}"
                )));
            }
        }
        return Ok(exact(lam, Method::PrimePowerDegree, None, certs));
    }
    if b.gcd(&p) == 1 {
        let e_star = mult_order(p, b)? as u32;
        for l in 1..=e_star {
            let (n, m) = test(l, &mut certs)?;
            if m {
                return Ok(exact(Rat::from_p_adic(&BigUint::from(n), p, l), Method::TruncationCandidate, Some(l), certs));
            }
        }
        let q = pow_u128(p, e_star).ok_or(Error::Overflow { p, e: e_star })?;
        let n = (2 * q).div_ceil(d as u128);
        let m = bp.is_member(n, e_star)?;
        certs.push(Certificate { n, e: e_star, member: m });
        if !m {
            return Err(Error::Anomaly(format!("f^{n} is not in m^[{p}^{e_star}] although fpt ≤ 2/{d}")));
        }
        return Ok(exact(lam, Method::GenericTwoOverD, None, certs));
    }
    for l in 1..=cfg.e_max {
        let (n, m) = test(l, &mut certs)?;
        if m {
            return Ok(exact(Rat::from_p_adic(&BigUint::from(n), p, l), Method::TruncationCandidate, Some(l), certs));
        }
    }
    let e = cfg.e_max;
    let n = nu_levels(p, e, &mut certs, |n, l| bp.is_member(n, l))?;
    let (lo, hi) = bounds_from_nu(n, p, e);
    Ok(FptResult { value: FptValue::Interval { lo, hi }, method: Method::BoundedFallback, place: None, certificates: certs })
}

/// Threshold of a form in any number of variables: exact for monomials,
/// linear forms, proper powers of exactly resolvable forms and binary
/// forms; otherwise an interval at depth `e_cap`.
pub fn fpt_general(f: &HomForm, e_cap: u32) -> Result<FptResult> {
    check_form(f)?;
    let cfg = EngineConfig { e_max: e_cap };
    if f.nvars() == 2 {
        return fpt_binary_exact_with(f, &cfg);
    }
    let r = general_inner(f, &cfg)?;
    check_range(&r, f.nvars(), f.degree())?;
    Ok(r)
}

fn general_inner(f: &HomForm, cfg: &EngineConfig) -> Result<FptResult> {
    if f.is_monomial() {
        let v = f.terms().keys().next().unwrap();
        return Ok(exact(fpt_monomial(v)?, Method::Monomial, None, Vec::new()));
    }
    if f.degree() == 1 {
        return Ok(exact(Rat::one(), Method::Monomial, None, Vec::new()));
    }
    let pp = perfect_power_decompose(f)?;
    if pp.exponent > 1 {
        return Ok(general_inner(&pp.base, cfg)?.scaled(pp.exponent));
    }
    interval_result(f, cfg.e_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::parse_form;

    fn form(s: &str, p: u64) -> HomForm {
        parse_form(s, &FieldSpec::prime(p).unwrap(), None).unwrap()
    }

    fn r(a: i64, b: i64) -> Rat {
        Rat::new(a, b)
    }

    #[test]
    fn nu_examples() {
        let f = form("x^5+y^5", 7);
        assert_eq!(nu(&f, 1).unwrap(), 2);
        assert_eq!(nu(&f, 2).unwrap(), 18);
        for p in [2u64, 3, 5] {
            let xy = form("x*y", p);
            for e in 1..4 {
                assert_eq!(nu(&xy, e).unwrap(), (p as u128).pow(e) - 1);
            }
        }
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(fpt_bounds(&form("x^5+y^5", 7), 1).unwrap(), (r(2, 7), r(3, 7)));
        assert_eq!(fpt_bounds(&form("x*y", 2), 3).unwrap(), (r(7, 8), r(1, 1)));
        for (d, p) in [(3u32, 7u64), (4, 5), (5, 3), (2, 11)] {
            let c = p.div_ceil(d as u64) as i64;
            let f = form(&format!("x^{d}"), p);
            assert_eq!(fpt_bounds(&f, 1).unwrap(), (r(c - 1, p as i64), r(c, p as i64)));
        }
    }

    #[test]
    fn monomial_rule() {
        assert_eq!(fpt_monomial(&[2, 3]).unwrap(), r(1, 3));
        assert_eq!(fpt_monomial(&[1, 1]).unwrap(), r(1, 1));
        assert_eq!(fpt_monomial(&[7]).unwrap(), r(1, 7));
        assert!(fpt_monomial(&[0, 0]).is_err());
    }

    #[test]
    fn binary_examples() {
        let a = fpt_binary_exact(&form("x^5+y^5", 7)).unwrap();
        assert_eq!(a.exact(), Some(&r(19, 49)));
        assert_eq!(a.summary(), "19/49 (exact, truncation-candidate, L=2)");
        // the certificate trail pins L = 2 from both sides
        assert!(a.certificates.contains(&Certificate { n: 2, e: 1, member: false }));
        assert!(a.certificates.contains(&Certificate { n: 19, e: 2, member: true }));
        assert_eq!(fpt_binary_exact(&form("x*y*(x+y)", 5)).unwrap().exact(), Some(&r(3, 5)));
        assert_eq!(fpt_binary_exact(&form("x*y*(x^2+y^2)", 3)).unwrap().exact(), Some(&r(1, 3)));
        let m = fpt_binary_exact(&form("x^2*y^3", 3)).unwrap();
        assert_eq!(m.summary(), "1/3 (exact, monomial)");
    }

    #[test]
    fn cube_in_characteristic_three() {
        // x^6 + x^3 y^3 + y^6 = (x - y)^6 when p = 3
        let f = form("x*(x^6+x^3*y^3+y^6)", 3);
        assert_eq!(f, form("x*(x-y)^6", 3));
        let res = fpt_binary_exact(&f).unwrap();
        assert_eq!(res.exact(), Some(&r(1, 6)));
        assert_eq!(res.method, Method::Monomial);
    }

    #[test]
    fn powers_and_fallbacks() {
        let f = form("(x*y*(x+y))^2", 5);
        let res = fpt_binary_exact(&f).unwrap();
        assert_eq!(res.exact(), Some(&r(3, 10)));
        assert_eq!(res.method, Method::PowerRule);
        let g = form("x^2*y*(x+y)*(x+2*y)", 7);
        let res = fpt_binary_exact(&g).unwrap();
        assert_eq!(res.method, Method::BoundedFallback);
        let FptValue::Interval { lo, hi } = res.value else { panic!() };
        assert_eq!(&hi - &lo, Rat::new(1, 7u64.pow(8)));
        // bounded above by the characteristic-zero value 2/5 at the origin
        assert!(r(1, 5) <= lo && lo < r(2, 5));
    }

    #[test]
    fn prime_power_degrees() {
        assert_eq!(prime_power_shape(9, 3), Some(2));
        assert_eq!(prime_power_shape(6, 3), Some(1));
        assert_eq!(prime_power_shape(10, 5), Some(1));
        assert_eq!(prime_power_shape(12, 3), None);
        let f = form("x^9+x*y^8+y^9", 3);
        let res = fpt_binary_exact(&f).unwrap();
        if crate::forms::is_squarefree_binary(&f).unwrap() {
            assert_eq!(res.exact(), Some(&r(2, 9)));
            assert_eq!(res.method, Method::PrimePowerDegree);
        }
    }

    #[test]
    fn general_examples() {
        let k = FieldSpec::prime(5).unwrap();
        let f = parse_form("x1*x2*x3", &k, None).unwrap();
        assert_eq!(fpt_general(&f, 3).unwrap().exact(), Some(&r(1, 1)));
        let g = parse_form("(x^2+y*z)^2", &k, None).unwrap();
        let res = fpt_general(&g, 3).unwrap();
        assert_eq!(res.method, Method::PowerRule);
        let h = parse_form("x^3+y^3+z^3+x*y*z", &k, None).unwrap();
        let res = fpt_general(&h, 3).unwrap();
        let FptValue::Interval { lo, hi } = res.value else { panic!() };
        assert_eq!(&hi - &lo, r(1, 125));
    }

    #[test]
    fn report_serializes_rationals_as_text() {
        let f = form("x^5+y^5", 7);
        let rep = FptReport::new(&f, &fpt_binary_exact(&f).unwrap());
        let js = serde_json::to_value(&rep).unwrap();
        assert_eq!(js["value"], "19/49");
        assert_eq!(js["method"], "truncation-candidate");
        assert_eq!(js["schema_version"], 1);
    }
}
