//! Which values the threshold of a reduced binary form can take, and
//! machinery to find forms realizing them.
//!
//! A reduced form of degree `d` has threshold `2/d` or some truncation
//! `⟨2/d⟩_L`. Writing `2/d = a/b` in lowest terms, a truncation can only
//! occur if
//!
//! * (I) `L ≤ ord_b(p)` when `p ∤ b`,
//! * (II) `a < (a·p^{e'} mod b)` for `1 ≤ e' < L` when `p > b`,
//! * (III) `1 ≤ (a·p^L mod b) ≤ b − a`,
//!
//! and its value avoids the interval `(1/p, 1/(p−1))`, where no threshold
//! lies. None of this is sufficient in general.

mod census;
mod tables;
mod witness;

pub use census::{census, CensusOptions, CensusReport, ValueRecord};
pub use tables::{reference_values, verify_paper, VerifyOptions, VerifyReport, VerifyRow};
pub use witness::{
    lower_bound_witness, named_forms, realize_truncation, sample_reduced_witness, trinomial_families, trinomial_witness_search,
    Family, LowerBoundWitness, RejectedRoot, Witness, WitnessOutcome,
};

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::forms::{in_frobenius_power, HomForm};
use crate::genericfpt::generic_fpt_binary;
use crate::ratbase::{bms_excluded, check_prime, mod_pow, mult_order, truncate, trunc, Expansion, Rat};

/// Cap on `L` when `p` divides `b` and condition (I) gives no bound.
pub const DEFAULT_CANDIDATE_CAP: u32 = 8;

fn two_over(d: u32) -> Result<(Rat, u64, u64)> {
    if d < 2 {
        return invalid("degree must be at least 2");
    }
    let lam = Rat::new(2, d);
    let a = lam.numer().to_u64().unwrap();
    let b = lam.denom().to_u64().unwrap();
    Ok((lam, a, b))
}

/// Conditions (I), (II), (III) for the place `L`.
pub fn hnwz_flags(d: u32, p: u64, l: u32) -> Result<(bool, bool, bool)> {
    check_prime(p)?;
    if l == 0 {
        return invalid("truncation place must be at least 1");
    }
    let (_, a, b) = two_over(d)?;
    let (a128, b128, p128) = (a as u128, b as u128, p as u128);
    let cond_i = if p.gcd(&b) == 1 { l as u64 <= mult_order(p, b)? } else { true };
    let cond_ii = p <= b || (1..l).all(|e| a128 < a128 * mod_pow(p128, e as u128, b128) % b128);
    let r = a128 * mod_pow(p128, l as u128, b128) % b128;
    let cond_iii = 1 <= r && r <= b128 - a128;
    Ok((cond_i, cond_ii, cond_iii))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Admissible,
    Inadmissible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateEntry {
    #[serde(rename = "L")]
    pub l: u32,
    /// `⟨2/d⟩_L`.
    pub value: Rat,
    #[serde(rename = "cond_I")]
    pub cond_i: bool,
    #[serde(rename = "cond_II")]
    pub cond_ii: bool,
    #[serde(rename = "cond_III")]
    pub cond_iii: bool,
    pub bms_excluded: bool,
    /// Larger than the generic value, which is the largest threshold.
    pub above_generic: bool,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateTable {
    pub schema_version: u32,
    pub d: u32,
    pub p: u64,
    pub a: u64,
    pub b: u64,
    pub l_bound: u32,
    pub generic: Rat,
    pub entries: Vec<CandidateEntry>,
    /// Distinct values a reduced form may take, ascending; includes `2/d`
    /// exactly when it is the generic value.
    pub admissible: Vec<Rat>,
}

impl CandidateTable {
    pub fn admits(&self, v: &Rat) -> bool {
        self.admissible.binary_search(v).is_ok()
    }

    /// The table as CSV, one row per place.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["L", "value", "cond_I", "cond_II", "cond_III", "bms_excluded", "above_generic", "verdict"])
            .map_err(csv_err)?;
        for e in &self.entries {
            let verdict = match e.verdict {
                Verdict::Admissible => "admissible",
                Verdict::Inadmissible => "inadmissible",
            };
            w.write_record([
                e.l.to_string(),
                e.value.to_string(),
                e.cond_i.to_string(),
                e.cond_ii.to_string(),
                e.cond_iii.to_string(),
                e.bms_excluded.to_string(),
                e.above_generic.to_string(),
                verdict.to_string(),
            ])
            .map_err(csv_err)?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| crate::Error::Invalid(e.to_string()))?).unwrap())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> crate::Error {
    crate::Error::Invalid(format!("csv: {e}"))
}

pub fn candidates(d: u32, p: u64) -> Result<CandidateTable> {
    candidates_with(d, p, DEFAULT_CANDIDATE_CAP)
}

/// Candidate table with `cap` bounding `L` when `p | b`.
pub fn candidates_with(d: u32, p: u64, cap: u32) -> Result<CandidateTable> {
    check_prime(p)?;
    let (lam, a, b) = two_over(d)?;
    let l_bound = if p.gcd(&b) == 1 { mult_order(p, b)? as u32 } else { cap };
    let generic = generic_fpt_binary(d as u64, p)?;
    let mut entries = Vec::new();
    for l in 1..=l_bound {
        let (cond_i, cond_ii, cond_iii) = hnwz_flags(d, p, l)?;
        let value = trunc(&lam, p, l)?.value();
        let bms = bms_excluded(&value, p);
        let above = value > generic;
        let ok = cond_i && cond_ii && cond_iii && !bms && !above && value.is_positive();
        entries.push(CandidateEntry {
            l,
            value,
            cond_i,
            cond_ii,
            cond_iii,
            bms_excluded: bms,
            above_generic: above,
            verdict: if ok { Verdict::Admissible } else { Verdict::Inadmissible },
        });
    }
    let mut admissible: Vec<Rat> =
        entries.iter().filter(|e| e.verdict == Verdict::Admissible).map(|e| e.value.clone()).collect();
    if generic == lam {
        admissible.push(lam);
    }
    admissible.sort();
    admissible.dedup();
    Ok(CandidateTable { schema_version: crate::SCHEMA_VERSION, d, p, a, b, l_bound, generic, entries, admissible })
}

/// First nonzero truncation `[2/d]_e = ⌊2p^e/d⌋/p^e`, a lower bound for the
/// threshold of every reduced form of degree `d`.
pub fn lower_bound_reduced(d: u32, p: u64) -> Result<Rat> {
    check_prime(p)?;
    let (lam, _, _) = two_over(d)?;
    let mut e = 1;
    loop {
        let t = truncate(&lam, p, e, Expansion::Terminating)?;
        if t.numer > 0u32.into() {
            return Ok(t.value());
        }
        e += 1;
    }
}

/// Checks that `x^i y^j g ∉ m^[p]` to the power `N`, where `2p = dN + r`.
///
/// The hypotheses are `3 ≤ r ≤ d − 1`, `iN < p`, `jN < p`, `g` coprime to
/// `xy`, and `i + j ∈ {d − 2, d − 1}` so that `g` is linear or quadratic.
/// Violations are returned as errors.
pub fn verify_gen_l1(p: u64, d: u32, i: u32, j: u32, g: &HomForm) -> Result<bool> {
    check_prime(p)?;
    if d < 2 {
        return invalid("degree must be at least 2");
    }
    let two_p = 2 * p;
    let n = two_p / d as u64;
    let r = two_p - d as u64 * n;
    if n == 0 || r < 3 || r > d as u64 - 1 {
        return invalid(format!("2p = {d}·{n} + {r} needs 3 ≤ r ≤ d − 1"));
    }
    if i as u64 * n >= p || j as u64 * n >= p {
        return invalid("exponents must satisfy i, j < p/N");
    }
    if i + j != d - 1 && i + j + 2 != d {
        return invalid("need i + j ∈ {d − 2, d − 1}");
    }
    if g.nvars() != 2 || g.field().p() != p || g.degree() + i + j != d {
        return invalid("g must be a binary form over characteristic p of degree d − i − j");
    }
    let c = g.binary_coeffs().unwrap();
    if c[0] == 0 || c[c.len() - 1] == 0 {
        return invalid("g must not be divisible by x or y");
    }
    let f = HomForm::monomial(g.field(), vec![i, j], 1)?.mul(g);
    Ok(!in_frobenius_power(&f, n as u128, 1)?)
}
