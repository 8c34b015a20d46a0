//! Known threshold sets of reduced binary forms of degree 3 to 8, and a
//! driver comparing them with computed strata.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::ratbase::{check_prime, Rat};

use super::census::census_size;
use super::witness::named_forms;
use super::{census, sample_reduced_witness, trinomial_families, trinomial_witness_search, CensusOptions};
use crate::fptengine::fpt_binary_exact;

fn q(a: i128, b: i128) -> Rat {
    Rat::new(a, b)
}

/// Values taken by reduced binary forms of degree `d ∈ 3..=8` over the
/// closure of `F_p`, ascending. The largest is the generic value.
pub fn reference_values(d: u32, p: u64) -> Option<Vec<Rat>> {
    let pi = p as i128;
    let m = p % d as u64;
    let mut v = match d {
        3 if p % 3 == 2 => vec![q(2 * pi - 1, 3 * pi)],
        3 => vec![q(2, 3)],
        4 if p == 2 => vec![q(1, 2)],
        4 => vec![q(1, 2), q(pi - 1, 2 * pi)],
        5 if p == 5 => vec![q(2, 5)],
        5 if p == 2 => vec![q(1, 4), q(3, 8)],
        5 => match m {
            1 => vec![q(2, 5), q(2 * pi - 2, 5 * pi)],
            2 => vec![q(2 * pi * pi - 3, 5 * pi * pi), q(2 * pi.pow(3) - 1, 5 * pi.pow(3))],
            3 => vec![q(2 * pi - 1, 5 * pi)],
            _ => vec![q(2, 5), q(2 * pi - 3, 5 * pi), q(2 * pi * pi - 2, 5 * pi * pi)],
        },
        6 if p == 2 => vec![q(1, 3), q(1, 4)],
        6 if p == 3 => vec![q(1, 3)],
        6 if p % 3 == 1 => vec![q(1, 3), q(pi - 1, 3 * pi)],
        6 => vec![q(1, 3), q(pi - 2, 3 * pi), q(pi * pi - 1, 3 * pi * pi)],
        7 if p == 7 => vec![q(2, 7)],
        7 if p == 2 => vec![q(1, 4)],
        7 if p == 3 => vec![q(2, 9), q(7, 27), q(23, 81)],
        7 => match m {
            1 => vec![q(2, 7), q(2 * pi - 2, 7 * pi)],
            2 => vec![q(2 * pi - 4, 7 * pi), q(2 * pi * pi - 1, 7 * pi * pi)],
            3 => vec![
                q(2 * pi * pi - 4, 7 * pi * pi),
                q(2 * pi.pow(3) - 5, 7 * pi.pow(3)),
                q(2 * pi.pow(4) - 1, 7 * pi.pow(4)),
            ],
            4 => vec![q(2 * pi - 1, 7 * pi)],
            5 => vec![q(2 * pi - 3, 7 * pi), q(2 * pi * pi - 1, 7 * pi * pi)],
            _ => vec![q(2, 7), q(2 * pi - 5, 7 * pi), q(2 * pi * pi - 2, 7 * pi * pi)],
        },
        8 if p == 2 => vec![q(1, 4)],
        8 if p == 3 => vec![q(1, 4), q(2, 9)],
        8 if p % 4 == 1 => vec![q(1, 4), q(pi - 1, 4 * pi)],
        8 => vec![q(1, 4), q(pi - 3, 4 * pi), q(pi * pi - 1, 4 * pi * pi)],
        _ => return None,
    };
    v.sort();
    v.dedup();
    Some(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Largest census over `F_p` run exhaustively; above it forms are sampled.
    pub budget: u128,
    /// Extension cap for the trinomial searches.
    pub k_max: u32,
    /// Random forms drawn when sampling.
    pub samples: usize,
    pub seed: u64,
    pub e_cap: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { budget: 10_000_000, k_max: 3, samples: 4000, seed: 0, e_cap: 3 }
    }
}

/// Where a computed value came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValueSource {
    pub value: Rat,
    pub source: String,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyRow {
    pub d: u32,
    pub p: u64,
    pub expected: Vec<Rat>,
    pub computed: Vec<Rat>,
    pub missing: Vec<Rat>,
    pub unexpected: Vec<Rat>,
    /// The census over `F_p` covered every form.
    pub exhaustive: bool,
    pub sources: Vec<ValueSource>,
    pub anomalies: Vec<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub rows: Vec<VerifyRow>,
    pub pass: bool,
}

impl VerifyReport {
    /// One line per `(d, p)`, followed by the differences on failure.
    pub fn matrix(&self) -> String {
        let list = |v: &[Rat]| v.iter().map(Rat::to_string).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        for r in &self.rows {
            let tag = if r.pass { "PASS" } else { "FAIL" };
            out += &format!("{tag} d={} p={}: expected {{{}}} computed {{{}}}\n", r.d, r.p, list(&r.expected), list(&r.computed));
            if !r.missing.is_empty() {
                out += &format!("  missing {{{}}}\n", list(&r.missing));
            }
            if !r.unexpected.is_empty() {
                out += &format!("  unexpected {{{}}}\n", list(&r.unexpected));
            }
            for a in &r.anomalies {
                out += &format!("  anomaly {a}\n");
            }
        }
        out
    }
}

fn verify_row(d: u32, p: u64, opts: &VerifyOptions) -> Result<VerifyRow> {
    let expected = reference_values(d, p).unwrap();
    let mut sources: Vec<ValueSource> = Vec::new();
    let mut anomalies = Vec::new();
    let exhaustive = census_size(p, d) <= opts.budget;
    if exhaustive {
        let copts = CensusOptions { reduced_only: true, e_cap: opts.e_cap, budget: opts.budget };
        let rep = census(d, p, 1, &copts)?;
        anomalies.extend(rep.anomalies.iter().cloned());
        for v in rep.values.iter().filter(|v| v.count_reduced > 0) {
            sources.push(ValueSource {
                value: v.value.clone(),
                source: format!("census {}", rep.field),
                witness: v.reduced_witness.clone().unwrap_or_default(),
            });
        }
    } else {
        for (i, v) in expected.iter().enumerate() {
            if let Some(w) = sample_reduced_witness(d, p, 1, v, opts.samples, opts.seed + i as u64)? {
                sources.push(ValueSource { value: v.clone(), source: format!("sample {}", w.field), witness: w.form });
            }
        }
    }
    let have = |s: &[ValueSource], v: &Rat| s.iter().any(|x| x.value == *v);
    for (i, v) in expected.iter().enumerate() {
        if have(&sources, v) {
            continue;
        }
        let mut found = None;
        for f in named_forms(d, p)? {
            if fpt_binary_exact(&f)?.exact() == Some(v) {
                found = Some(ValueSource { value: v.clone(), source: "named form".into(), witness: f.to_string() });
                break;
            }
        }
        for fam in trinomial_families(d).into_iter().filter(|_| found.is_none()) {
            let Ok(out) = trinomial_witness_search(p, d, v, fam, opts.k_max) else { continue };
            if let Some(w) = out.found.filter(|w| w.fpt == *v) {
                found = Some(ValueSource { value: v.clone(), source: format!("trinomial {fam}, {w}"), witness: w.form });
                break;
            }
        }
        if found.is_none() {
            if let Some(w) = sample_reduced_witness(d, p, 2, v, opts.samples, opts.seed + 1000 + i as u64)? {
                found = Some(ValueSource { value: v.clone(), source: format!("sample {}", w.field), witness: w.form });
            }
        }
        sources.extend(found);
    }
    sources.sort_by(|a, b| a.value.cmp(&b.value));
    let computed: Vec<Rat> = sources.iter().map(|s| s.value.clone()).collect();
    let missing: Vec<Rat> = expected.iter().filter(|v| !computed.contains(v)).cloned().collect();
    let unexpected: Vec<Rat> = computed.iter().filter(|v| !expected.contains(v)).cloned().collect();
    let pass = missing.is_empty() && unexpected.is_empty() && anomalies.is_empty();
    Ok(VerifyRow { d, p, expected, computed, missing, unexpected, exhaustive, sources, anomalies, pass })
}

/// Compares computed reduced strata with [`reference_values`] for every
/// `(d, p)` pair.
pub fn verify_paper(ds: &[u32], primes: &[u64], opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut rows = Vec::new();
    for &d in ds {
        if !(3..=8).contains(&d) {
            return invalid(format!("degree {d} is outside 3..=8"));
        }
        for &p in primes {
            check_prime(p)?;
            rows.push(verify_row(d, p, opts)?);
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(VerifyReport { schema_version: crate::SCHEMA_VERSION, rows, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genericfpt::generic_fpt_binary;
    use crate::strata::candidates;

    #[test]
    fn tables_top_out_at_the_generic_value() {
        for d in 3..=8u32 {
            for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
                let v = reference_values(d, p).unwrap();
                assert_eq!(v.last().unwrap(), &generic_fpt_binary(d as u64, p).unwrap(), "d={d} p={p}");
            }
        }
    }

    #[test]
    fn tables_only_list_candidates() {
        for d in 3..=8u32 {
            for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
                let t = candidates(d, p).unwrap();
                for v in reference_values(d, p).unwrap() {
                    assert!(t.admits(&v), "d={d} p={p} {v}");
                }
            }
        }
    }

    #[test]
    fn small_rows() {
        let rep = verify_paper(&[4], &[2, 3], &VerifyOptions::default()).unwrap();
        assert!(rep.pass, "{}", rep.matrix());
        assert!(rep.matrix().starts_with("PASS d=4 p=2: expected {1/2} computed {1/2}"));
    }
}
