//! Searches for forms realizing a given threshold.
//!
//! The trinomial search works in the family
//! `x^i y^j (x^{2m} + a·x^m y^m + y^{2m})`. For a target `N/p^e` the
//! residue of `f^N` modulo `m^[p^e]` is computed with `a` kept symbolic;
//! `f^N ∈ m^[p^e]` holds exactly at the common roots of the surviving
//! coefficients, so a witness is a root of their gcd that keeps `f`
//! reduced. Roots are looked for in `F_p, F_{p^2}, …` in turn; failing up
//! to the cap only means none was found at that size.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fptengine::{binary_dispatch, fpt_binary_exact, reduced_dispatch, EngineConfig, FptValue, Method};
use crate::forms::{binary_reduced, is_squarefree_binary, HomForm, ParamForm};
use crate::gfpoly::{upoly_gcd, Fe, FieldSpec, UPoly};
use crate::ratbase::{p_valuation, pow_u128, trunc, Rat};

use super::candidates;

/// The exponents `(i, j, m)` of a trinomial family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Family {
    pub i: u32,
    pub j: u32,
    pub m: u32,
}

impl Family {
    pub fn degree(&self) -> u32 {
        self.i + self.j + 2 * self.m
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.i, self.j, self.m)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let nums: Option<Vec<u32>> = parts.iter().map(|x| x.parse().ok()).collect();
        match nums.as_deref() {
            Some(&[i, j, m]) if m >= 1 => Ok(Family { i, j, m }),
            _ => invalid(format!("family must be i,j,m with m ≥ 1, got {s:?}")),
        }
    }
}

/// Families whose members can be reduced, up to swapping `x` and `y`.
pub fn trinomial_families(d: u32) -> Vec<Family> {
    let mut out = Vec::new();
    for (i, j) in [(0, 0), (1, 0), (1, 1)] {
        if d >= i + j + 2 && (d - i - j) % 2 == 0 {
            out.push(Family { i, j, m: (d - i - j) / 2 });
        }
    }
    out
}

/// `x^d + y^d`, `x^d + x·y^{d−1}` and `xy(x^{d−2} + y^{d−2})` over `F_p`, the
/// reduced ones among them. Diagonal forms realize several strata directly.
pub fn named_forms(d: u32, p: u64) -> Result<Vec<HomForm>> {
    let field = FieldSpec::prime(p)?;
    if d < 3 {
        return Ok(Vec::new());
    }
    let n = d as usize;
    // positions j of the two nonzero coefficients of x^{d−j} y^j
    let mut out = Vec::new();
    for (a, b) in [(0, n), (0, n - 1), (1, n - 1)] {
        let mut c = vec![0; n + 1];
        c[a] = 1;
        c[b] = 1;
        let f = HomForm::from_binary_coeffs(&field, &c)?;
        if is_squarefree_binary(&f)? {
            out.push(f);
        }
    }
    Ok(out)
}

/// A form found by one of the searches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Parameter value, for trinomial searches.
    pub a: Option<String>,
    pub field: String,
    pub form: String,
    pub fpt: Rat,
    #[serde(skip)]
    pub poly: HomForm,
}

impl Witness {
    fn new(a: Option<String>, poly: HomForm, fpt: Rat) -> Witness {
        Witness { a, field: poly.field().to_string(), form: poly.to_string(), fpt, poly }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.a {
            Some(a) => write!(f, "a={a}, {}", self.field),
            None => write!(f, "{} over {}", self.form, self.field),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedRoot {
    pub a: String,
    pub field: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessOutcome {
    pub schema_version: u32,
    pub p: u64,
    pub d: u32,
    pub target: Rat,
    pub family: Family,
    /// `L` with `target = ⟨2/d⟩_L`, and `N = p^L·target`.
    #[serde(rename = "L")]
    pub place: u32,
    pub n: String,
    /// Gcd of the surviving coefficients of `f^N`, in the parameter `a`;
    /// `0` when every `a` works.
    pub obstruction: String,
    pub k_max: u32,
    pub found: Option<Witness>,
    pub rejected: Vec<RejectedRoot>,
}

impl fmt::Display for WitnessOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.found {
            Some(w) => write!(f, "{w}"),
            None => write!(f, "not found up to F_{}^{}", self.p, self.k_max),
        }
    }
}

const MAX_REJECTED: usize = 64;

/// Place `L` with `⟨2/d⟩_L = target`.
fn truncation_place(d: u32, p: u64, target: &Rat) -> Result<(u32, u128)> {
    let lam = Rat::new(2, d);
    let den = target.denom();
    let e = match num_traits::ToPrimitive::to_u64(den) {
        Some(b) if p.pow(p_valuation(b, p)) == b => p_valuation(b, p),
        _ => return invalid(format!("target {target} is not of the form N/{p}^e")),
    };
    for l in e.max(1)..=e + 16 {
        let t = trunc(&lam, p, l)?;
        if t.value() == *target {
            let n = t.numer_u128().ok_or(Error::Overflow { p, e: l })?;
            return Ok((l, n));
        }
        if t.value() > *target {
            break;
        }
    }
    invalid(format!("target {target} is not a truncation of 2/{d} in base {p}"))
}

/// `a` lies in a proper subfield of `F_{p^κ}`.
fn in_proper_subfield(field: &FieldSpec, a: Fe) -> bool {
    let k = field.k();
    (1..k).filter(|s| k % s == 0).any(|s| field.pow(a, (field.p() as u128).pow(s)) == a)
}

pub fn trinomial_witness_search(p: u64, d: u32, target: &Rat, family: Family, k_max: u32) -> Result<WitnessOutcome> {
    if family.degree() != d {
        return invalid(format!("family {family} has degree {}, not {d}", family.degree()));
    }
    if k_max == 0 {
        return invalid("k_max must be at least 1");
    }
    let (place, n) = truncation_place(d, p, target)?;
    let pf = ParamForm::trinomial(p, family.i, family.j, family.m)?;
    let residue = pf.residue(n, place)?;
    let base = pf.field().clone();
    let obstruction = residue.iter().fold(UPoly::zero(&base), |g, (_, c)| upoly_gcd(&g, c));
    let mut out = WitnessOutcome {
        schema_version: crate::SCHEMA_VERSION,
        p,
        d,
        target: target.clone(),
        family,
        place,
        n: n.to_string(),
        obstruction: obstruction.format("a"),
        k_max,
        found: None,
        rejected: Vec::new(),
    };
    for kappa in 1..=k_max {
        let field = FieldSpec::new(p, kappa)?;
        let roots: Vec<Fe> =
            if obstruction.is_zero() { field.elements().collect() } else { obstruction.roots_in(&field) };
        for a in roots {
            if in_proper_subfield(&field, a) {
                continue;
            }
            let f = pf.specialize(a, &field)?;
            if !is_squarefree_binary(&f)? {
                if out.rejected.len() < MAX_REJECTED {
                    out.rejected.push(RejectedRoot {
                        a: field.format(a),
                        field: field.to_string(),
                        reason: format!("{f} is not reduced"),
                    });
                }
                continue;
            }
            let r = fpt_binary_exact(&f)?;
            let Some(v) = r.exact().cloned() else {
                return Err(Error::Anomaly(format!("no exact threshold for reduced {f}")));
            };
            out.found = Some(Witness::new(Some(field.format(a)), f, v));
            return Ok(out);
        }
    }
    Ok(out)
}

fn random_coeffs(q: u64, d: u32, rng: &mut ChaCha8Rng) -> Vec<Fe> {
    loop {
        let c: Vec<Fe> = (0..=d).map(|_| rng.gen_range(0..q)).collect();
        if c.iter().any(|&x| x != 0) {
            return c;
        }
    }
}

/// Threshold of a reduced binary form given by coefficients.
fn reduced_value(field: &FieldSpec, c: &[Fe], cfg: &EngineConfig) -> Result<Option<(Rat, Method)>> {
    let d = c.len() - 1;
    let r = if d >= 3 { reduced_dispatch(field, c, cfg)? } else { binary_dispatch(field, c, cfg)? };
    Ok(match r.value {
        FptValue::Exact(v) => Some((v, r.method)),
        FptValue::Interval { .. } => None,
    })
}

/// Random reduced forms over `F_{p^k}` until one has threshold `target`.
pub fn sample_reduced_witness(d: u32, p: u64, k: u32, target: &Rat, trials: usize, seed: u64) -> Result<Option<Witness>> {
    let field = FieldSpec::new(p, k)?;
    let cfg = EngineConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let c = random_coeffs(field.q(), d, &mut rng);
        if !binary_reduced(&field, &c) {
            continue;
        }
        if let Some((v, _)) = reduced_value(&field, &c, &cfg)? {
            if v == *target {
                return Ok(Some(Witness::new(None, HomForm::from_binary_coeffs(&field, &c)?, v)));
            }
        }
    }
    Ok(None)
}

/// A reduced form of degree `d` over `F_{p^k}`, `k ≤ k_max`, whose threshold
/// is an admissible truncation `⟨2/d⟩_L` (not `2/d` itself). `None` if the
/// table admits no truncation or none was found.
pub fn realize_truncation(d: u32, p: u64, k_max: u32, trials: usize, seed: u64) -> Result<Option<Witness>> {
    let table = candidates(d, p)?;
    let lam = Rat::new(2, d);
    let targets: Vec<Rat> = table.admissible.iter().filter(|v| **v != lam).cloned().collect();
    if targets.is_empty() {
        return Ok(None);
    }
    for f in named_forms(d, p)? {
        if let Some(v) = fpt_binary_exact(&f)?.exact() {
            if targets.contains(v) {
                return Ok(Some(Witness::new(None, f.clone(), v.clone())));
            }
        }
    }
    for t in &targets {
        for fam in trinomial_families(d) {
            let out = trinomial_witness_search(p, d, t, fam, k_max)?;
            if let Some(w) = out.found {
                if targets.contains(&w.fpt) {
                    return Ok(Some(w));
                }
            }
        }
    }
    let cfg = EngineConfig::default();
    for k in 1..=k_max {
        let field = FieldSpec::new(p, k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ k as u64);
        for _ in 0..trials {
            let c = random_coeffs(field.q(), d, &mut rng);
            if !binary_reduced(&field, &c) {
                continue;
            }
            if let Some((v, _)) = reduced_value(&field, &c, &cfg)? {
                if targets.contains(&v) {
                    return Ok(Some(Witness::new(None, HomForm::from_binary_coeffs(&field, &c)?, v)));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBoundWitness {
    pub p: u64,
    pub e: u32,
    pub d: u32,
    pub witness: Witness,
}

/// A reduced form of degree `d` with threshold exactly `1/p^e`, for
/// `p^e + 1 ≤ d ≤ 2p^e`.
///
/// Candidates are `x^q A + y^q B` with `q = p^e`: they lie in `m^[q]`, so
/// their threshold is at most `1/q`, while every reduced form of such a
/// degree has threshold at least `1/q`. Random `A, B` are drawn over `F_p`
/// and then `F_{p^2}` until the form is reduced.
pub fn lower_bound_witness(p: u64, e: u32, d: u32, trials: usize, seed: u64) -> Result<Option<LowerBoundWitness>> {
    let q = pow_u128(p, e).filter(|&q| q < u32::MAX as u128).ok_or(Error::Overflow { p, e })? as u32;
    if d < q + 1 || d > 2 * q {
        return invalid(format!("need {} ≤ d ≤ {}", q + 1, 2 * q));
    }
    let target = Rat::new(1, q);
    for k in 1..=2 {
        let field = FieldSpec::new(p, k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let cfg = EngineConfig::default();
        for _ in 0..trials {
            let mut c = vec![0; d as usize + 1];
            for j in 0..=(d - q) as usize {
                c[j] = field.add(c[j], rng.gen_range(0..field.q()));
                c[j + q as usize] = field.add(c[j + q as usize], rng.gen_range(0..field.q()));
            }
            if c.iter().all(|&x| x == 0) || !binary_reduced(&field, &c) {
                continue;
            }
            if let Some((v, _)) = reduced_value(&field, &c, &cfg)? {
                if v == target {
                    let w = Witness::new(None, HomForm::from_binary_coeffs(&field, &c)?, v);
                    return Ok(Some(LowerBoundWitness { p, e, d, witness: w }));
                }
                return Err(Error::Anomaly(format!("reduced form in m^[{q}] of degree {d} has threshold {v}")));
            }
        }
    }
    Ok(None)
}
