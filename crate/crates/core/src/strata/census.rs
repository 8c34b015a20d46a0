//! Exhaustive enumeration of binary forms of one degree over `F_q` by
//! threshold.
//!
//! One form is taken per projective point, scaled so that its first nonzero
//! coefficient is 1. Index order is lexicographic order of the coefficient
//! tuple `(c_0, …, c_d)`; the witness kept for each value is the
//! one with the smallest index. Ranges of indices are processed in
//! parallel and merged, and the merge is associative, so the report does
//! not depend on the thread count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fptengine::{binary_dispatch, check_range, reduced_dispatch, EngineConfig, FptValue};
use crate::forms::{binary_reduced, HomForm};
use crate::gfpoly::{Fe, FieldSpec};
use crate::ratbase::Rat;

use super::{candidates_with, csv_err, DEFAULT_CANDIDATE_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CensusOptions {
    /// Skip non-reduced forms instead of computing their thresholds.
    pub reduced_only: bool,
    /// Depth for interval fallbacks.
    pub e_cap: u32,
    /// Largest number of forms this call may enumerate.
    pub budget: u128,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions { reduced_only: false, e_cap: 3, budget: 100_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValueRecord {
    pub value: Rat,
    pub count_reduced: u64,
    pub count_nonreduced: u64,
    /// Lexicographically first form with this value.
    pub witness: String,
    /// Lexicographically first reduced form with this value.
    pub reduced_witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub schema_version: u32,
    pub d: u32,
    pub p: u64,
    pub k: u32,
    pub field: String,
    pub reduced_only: bool,
    pub e_cap: u32,
    /// Forms enumerated.
    pub total: u64,
    pub reduced: u64,
    /// Non-reduced forms skipped under `reduced_only`.
    pub skipped: u64,
    /// Forms for which only an interval was certified.
    pub unresolved: u64,
    pub unresolved_reduced: u64,
    /// Ascending by value.
    pub values: Vec<ValueRecord>,
    pub anomalies: Vec<String>,
}

impl CensusReport {
    /// Distinct values taken by reduced forms, ascending.
    pub fn reduced_values(&self) -> Vec<Rat> {
        self.values.iter().filter(|v| v.count_reduced > 0).map(|v| v.value.clone()).collect()
    }

    pub fn record(&self, v: &Rat) -> Option<&ValueRecord> {
        self.values.iter().find(|r| r.value == *v)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["value", "count_reduced", "count_nonreduced", "witness", "reduced_witness"])
            .map_err(csv_err)?;
        for r in &self.values {
            w.write_record([
                r.value.to_string(),
                r.count_reduced.to_string(),
                r.count_nonreduced.to_string(),
                r.witness.clone(),
                r.reduced_witness.clone().unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?).unwrap())
    }
}

/// Number of projective representatives, `(q^{d+1} − 1)/(q − 1)`.
pub(crate) fn census_size(q: u64, d: u32) -> u128 {
    let q = q as u128;
    let mut total: u128 = 0;
    let mut pw: u128 = 1;
    for _ in 0..=d {
        total = total.saturating_add(pw);
        pw = pw.saturating_mul(q);
    }
    total
}

/// Coefficients of the form with index `idx`.
///
/// Block `i` (for `i = d` down to 0) holds the `q^{d−i}` forms whose first
/// nonzero coefficient is `c_i = 1`; inside a block the tail
/// `c_{i+1}, …, c_d` counts in base `q` with `c_{i+1}` most significant.
pub(crate) fn decode(idx: u64, q: u64, d: u32) -> Vec<Fe> {
    let mut idx = idx;
    let mut block: u64 = 1;
    let mut i = d as usize;
    while idx >= block {
        idx -= block;
        block *= q;
        i -= 1;
    }
    let mut c = vec![0; d as usize + 1];
    c[i] = 1;
    for slot in c[i + 1..].iter_mut().rev() {
        *slot = idx % q;
        idx /= q;
    }
    c
}

#[derive(Clone, Debug, Default)]
struct Rec {
    reduced: u64,
    nonreduced: u64,
    witness: u64,
    reduced_witness: Option<u64>,
}

#[derive(Clone, Debug, Default)]
struct Acc {
    values: BTreeMap<Rat, Rec>,
    total: u64,
    reduced: u64,
    skipped: u64,
    unresolved: u64,
    unresolved_reduced: u64,
    anomalies: Vec<(u64, String)>,
}

const MAX_ANOMALIES: usize = 50;

fn min_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Acc {
    fn merge(mut self, o: Acc) -> Acc {
        for (v, r) in o.values {
            let e = self.values.entry(v).or_insert(Rec { witness: u64::MAX, ..Rec::default() });
            e.reduced += r.reduced;
            e.nonreduced += r.nonreduced;
            e.witness = e.witness.min(r.witness);
            e.reduced_witness = min_opt(e.reduced_witness, r.reduced_witness);
        }
        self.total += o.total;
        self.reduced += o.reduced;
        self.skipped += o.skipped;
        self.unresolved += o.unresolved;
        self.unresolved_reduced += o.unresolved_reduced;
        self.anomalies.extend(o.anomalies);
        self.anomalies.sort_by_key(|a| a.0);
        self.anomalies.truncate(MAX_ANOMALIES);
        self
    }

    fn add(&mut self, idx: u64, v: Rat, reduced: bool) {
        let e = self.values.entry(v).or_insert(Rec { witness: idx, ..Rec::default() });
        e.witness = e.witness.min(idx);
        if reduced {
            e.reduced += 1;
            e.reduced_witness = min_opt(e.reduced_witness, Some(idx));
        } else {
            e.nonreduced += 1;
        }
    }
}

const CHUNK: u64 = 4096;

/// Thresholds of all binary forms of degree `d` over `F_{p^k}`, one per
/// projective point.
pub fn census(d: u32, p: u64, k: u32, opts: &CensusOptions) -> Result<CensusReport> {
    if d < 2 {
        return invalid("census needs degree at least 2");
    }
    if opts.budget == 0 {
        return invalid("budget must be positive");
    }
    let field = FieldSpec::new(p, k)?;
    let q = field.q();
    let required = census_size(q, d);
    if required > opts.budget || required > u64::MAX as u128 {
        return Err(Error::Budget { required, budget: opts.budget });
    }
    let total = required as u64;
    let cfg = EngineConfig { e_max: opts.e_cap };
    let table = candidates_with(d, p, DEFAULT_CANDIDATE_CAP.max(opts.e_cap))?;
    let chunks = total.div_ceil(CHUNK);
    let acc = (0..chunks)
        .into_par_iter()
        .map(|ch| {
            let mut acc = Acc::default();
            for idx in ch * CHUNK..((ch + 1) * CHUNK).min(total) {
                let c = decode(idx, q, d);
                let reduced = binary_reduced(&field, &c);
                acc.total += 1;
                if reduced {
                    acc.reduced += 1;
                } else if opts.reduced_only {
                    acc.skipped += 1;
                    continue;
                }
                let res = if reduced && d >= 3 { reduced_dispatch(&field, &c, &cfg) } else { binary_dispatch(&field, &c, &cfg) };
                let res = res.and_then(|r| check_range(&r, 2, d).map(|_| r));
                match res {
                    Ok(r) => match r.value {
                        FptValue::Exact(v) => {
                            if reduced && !table.admits(&v) {
                                acc.anomalies.push((idx, format!("reduced value {v} is not an admissible candidate")));
                            }
                            acc.add(idx, v, reduced);
                        }
                        FptValue::Interval { .. } => {
                            acc.unresolved += 1;
                            acc.unresolved_reduced += reduced as u64;
                        }
                    },
                    Err(Error::Anomaly(m)) => acc.anomalies.push((idx, m)),
                    Err(e) => return Err(e),
                }
                acc.anomalies.truncate(MAX_ANOMALIES);
            }
            Ok(acc)
        })
        .try_reduce(Acc::default, |a, b| Ok(a.merge(b)))?;
    let show = |idx: u64| HomForm::from_binary_coeffs(&field, &decode(idx, q, d)).unwrap().to_string();
    let values = acc
        .values
        .iter()
        .map(|(v, r)| ValueRecord {
            value: v.clone(),
            count_reduced: r.reduced,
            count_nonreduced: r.nonreduced,
            witness: show(r.witness),
            reduced_witness: r.reduced_witness.map(show),
        })
        .collect();
    let anomalies = acc.anomalies.iter().map(|(idx, m)| format!("{}: {m}", show(*idx))).collect();
    Ok(CensusReport {
        schema_version: crate::SCHEMA_VERSION,
        d,
        p,
        k,
        field: field.to_string(),
        reduced_only: opts.reduced_only,
        e_cap: opts.e_cap,
        total: acc.total,
        reduced: acc.reduced,
        skipped: acc.skipped,
        unresolved: acc.unresolved,
        unresolved_reduced: acc.unresolved_reduced,
        values,
        anomalies,
    })
}
