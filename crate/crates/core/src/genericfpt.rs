//! The generic (largest) F-pure threshold of degree-`d` forms in `n`
//! variables, and a sampler that checks it empirically.
//!
//! For `n < d` the generic value is `⟨n/d⟩_L` for the least `L` with
//! `0 < (n·p^L mod d) < n`; the remainder is zero exactly when `p^L·n/d` is
//! an integer, so both conditions are read off one orbit of
//! multiplication by `p` modulo `d`. A repeat in the orbit certifies that no
//! such `L` exists, and then the value is `n/d`.

use std::fmt;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::fptengine::{binary_dispatch, fpt_general, EngineConfig, FptValue};
use crate::forms::HomForm;
use crate::gfpoly::{Fe, FieldSpec};
use crate::ratbase::{check_prime, min_e_two_p_pow, orbit_search, trunc, Rat};

fn big_as_str<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// One tested place `L` of the generic formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "N_L", serialize_with = "big_as_str")]
    pub n_l: BigUint,
    /// `n·p^L mod d`.
    pub remainder: u64,
    /// `p^L·n/d` is not an integer.
    pub cond_a: bool,
    /// The remainder is below `n`.
    pub cond_b: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericFptReport {
    pub schema_version: u32,
    pub n: u64,
    pub d: u64,
    pub p: u64,
    pub value: Rat,
    #[serde(rename = "L")]
    pub place: Option<u32>,
    pub inequality_trace: Vec<TraceRow>,
}

impl fmt::Display for GenericFptReport {
    /// `23/81, L=4`, `1/3, L=absent`, or `1` when `n ≥ d`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.place {
            _ if self.n >= self.d => write!(f, "{}", self.value),
            Some(l) => write!(f, "{}, L={l}", self.value),
            None => write!(f, "{}, L=absent", self.value),
        }
    }
}

/// Generic F-pure threshold of degree-`d` forms in `n` variables over a
/// field of characteristic `p`.
pub fn generic_fpt(n: u64, d: u64, p: u64) -> Result<GenericFptReport> {
    if n == 0 || d == 0 {
        return invalid("n and d must be positive");
    }
    check_prime(p)?;
    let mut report = GenericFptReport {
        schema_version: crate::SCHEMA_VERSION,
        n,
        d,
        p,
        value: Rat::one(),
        place: None,
        inequality_trace: Vec::new(),
    };
    if n >= d {
        return Ok(report);
    }
    let lam = Rat::new(n, d);
    let mut trace = Vec::new();
    let mut failed = None;
    let hit = orbit_search(n, p, d, |l, r| {
        let row = match trunc(&lam, p, l) {
            Ok(t) => TraceRow { l, n_l: t.numer, remainder: r, cond_a: r != 0, cond_b: r < n },
            Err(e) => {
                failed = Some(e);
                return true;
            }
        };
        let ok = row.cond_a && row.cond_b;
        trace.push(row);
        ok
    });
    if let Some(e) = failed {
        return Err(e);
    }
    report.value = match hit {
        Some(l) => trunc(&lam, p, l)?.value(),
        None => lam,
    };
    report.place = hit;
    report.inequality_trace = trace;
    Ok(report)
}

/// Generic threshold of binary forms of degree `d`: `⟨2/d⟩_e` for the
/// least `e` with `2p^e ≡ 1 (mod d)`, else `2/d`.
pub fn generic_fpt_binary(d: u64, p: u64) -> Result<Rat> {
    if d < 2 {
        return invalid("degree must be at least 2");
    }
    check_prime(p)?;
    match min_e_two_p_pow(d, p, 1) {
        Some(e) => Ok(trunc(&Rat::new(2, d), p, e)?.value()),
        None => Ok(Rat::new(2, d)),
    }
}

/// `d·N_j ≤ n·p^j − n` for every `1 ≤ j ≤ L`, with `N_j` the numerator of
/// `⟨n/d⟩_j`.
pub fn check_keylemma_condition(n: u64, d: u64, p: u64, l: u32) -> Result<bool> {
    if n == 0 || d < n {
        return invalid("need 1 ≤ n ≤ d");
    }
    check_prime(p)?;
    let lam = Rat::new(n, d);
    for j in 1..=l {
        let nj = trunc(&lam, p, j)?.numer;
        let q = BigUint::from(p).pow(j);
        if BigUint::from(d) * nj + BigUint::from(n) > BigUint::from(n) * q {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All exponent vectors of degree `d` in `n` variables.
pub(crate) fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for a in (0..=d).rev() {
        for mut rest in monomials(n - 1, d - a) {
            rest.insert(0, a);
            out.push(rest);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleReport {
    pub schema_version: u32,
    pub n: usize,
    pub d: u32,
    pub p: u64,
    pub k: u32,
    pub trials: usize,
    pub seed: u64,
    /// Largest certified value seen: the exact threshold when known, else
    /// the lower end of the interval.
    pub max: Rat,
    pub attained: usize,
    pub exact: usize,
}

fn random_form(field: &FieldSpec, monos: &[Vec<u32>], n: usize, rng: &mut ChaCha8Rng) -> HomForm {
    loop {
        let terms = monos.iter().map(|v| (v.clone(), rng.gen_range(0..field.q()))).collect::<Vec<_>>();
        let f = HomForm::new(field, n, terms).unwrap();
        if !f.is_zero() {
            return f;
        }
    }
}

/// Thresholds of `trials` uniformly random degree-`d` forms over `F_{p^k}`.
/// Trial `i` draws from ChaCha stream `i` of `seed`, so the result does not
/// depend on the thread count.
pub fn sample_max_fpt(n: usize, d: u32, p: u64, k: u32, trials: usize, e_cap: u32, seed: u64) -> Result<SampleReport> {
    if trials == 0 {
        return invalid("need at least one trial");
    }
    if n == 0 || d == 0 {
        return invalid("n and d must be positive");
    }
    let field = FieldSpec::new(p, k)?;
    let monos = monomials(n, d);
    let cfg = EngineConfig { e_max: e_cap };
    let values: Vec<(Rat, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let f = random_form(&field, &monos, n, &mut rng);
            let r = if n == 2 {
                let c: Vec<Fe> = f.binary_coeffs().unwrap();
                binary_dispatch(&field, &c, &cfg)?
            } else {
                fpt_general(&f, e_cap)?
            };
            Ok(match r.value {
                FptValue::Exact(v) => (v, true),
                FptValue::Interval { lo, .. } => (lo, false),
            })
        })
        .collect::<Result<_>>()?;
    let max = values.iter().map(|(v, _)| v).max().unwrap().clone();
    let attained = values.iter().filter(|(v, _)| *v == max).count();
    let exact = values.iter().filter(|(_, e)| *e).count();
    Ok(SampleReport { schema_version: crate::SCHEMA_VERSION, n, d, p, k, trials, seed, max, attained, exact })
}
