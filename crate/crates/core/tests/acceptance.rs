//! Acceptance run: one PASS/FAIL line per criterion, with the runtime limit
//! of each criterion pinned below.

mod common;

use std::time::{Duration, Instant};

use common::{oracle_digits, oracle_member, oracle_nu, random_binary, random_gl2, random_squarefree, rat, SMALL_PRIMES};
use fpure::fptengine::{fpt_binary_exact, nu, FptResult, FptValue};
use fpure::forms::{is_squarefree_binary, naive_pow_mod_frobenius, parse_form, pow_mod_frobenius, HomForm};
use fpure::genericfpt::generic_fpt_binary;
use fpure::gfpoly::FieldSpec;
use fpure::ratbase::{is_prime, lucas_binom, trunc, Rat};
use fpure::strata::{candidates, census, lower_bound_witness, reference_values, trinomial_witness_search, CensusOptions, Family};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Criteria whose stated expectation is known to be wrong, with the reason.
/// They still print FAIL; an unexpected PASS is reported as an error.
const KNOWN_FAILURES: &[(&str, &str)] = &[(
    "6a",
    "over F_3, x^6+x^3y^3+y^6 = (x-y)^6, so the form is x(x-y)^6 with threshold 1/6",
)];

struct Run {
    failures: Vec<String>,
    known: Vec<String>,
}

impl Run {
    fn check(&mut self, id: &str, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) {
        let t = Instant::now();
        let out = f();
        let el = t.elapsed();
        let out = match out {
            Ok(m) if el > limit => Err(format!("{m}; took {el:.2?}, limit {limit:?}")),
            o => o,
        };
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        match (&out, known) {
            (Ok(m), None) => println!("PASS {id:<3} {name}: {m} ({el:.2?}, limit {limit:?})"),
            (Ok(m), Some(_)) => {
                println!("PASS {id:<3} {name}: {m} (listed as a known failure)");
                self.failures.push(format!("{id} passed unexpectedly"));
            }
            (Err(m), None) => {
                println!("FAIL {id:<3} {name}: {m} ({el:.2?}, limit {limit:?})");
                self.failures.push(id.to_string());
            }
            (Err(m), Some((_, why))) => {
                println!("FAIL {id:<3} {name}: {m} (known: {why})");
                self.known.push(id.to_string());
            }
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn form(s: &str, p: u64) -> HomForm {
    parse_form(s, &FieldSpec::prime(p).unwrap(), Some(2)).unwrap()
}

fn show(v: &[Rat]) -> String {
    format!("{{{}}}", v.iter().map(Rat::to_string).collect::<Vec<_>>().join(", "))
}

fn exact_of(r: &FptResult) -> Result<Rat, String> {
    r.exact().cloned().ok_or_else(|| format!("not exact: {}", r.summary()))
}

fn crit1() -> Outcome {
    let r = fpt_binary_exact(&form("x^5+y^5", 7)).map_err(|e| e.to_string())?;
    let v = exact_of(&r)?;
    ensure(v == rat(19, 49), || format!("got {v}"))?;
    Ok(r.summary())
}

fn crit2() -> Outcome {
    let primes: Vec<u64> = (2..=31).filter(|&p| is_prime(p)).collect();
    let mut n = 0;
    for d in 3..=8u32 {
        for &p in &primes {
            let want = reference_values(d, p).unwrap().pop().unwrap();
            let got = generic_fpt_binary(d as u64, p).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("d={d} p={p}: {got} ≠ {want}"))?;
            n += 1;
        }
    }
    for (d, p, want) in [(7, 3, rat(23, 81)), (5, 7, rat(137, 343)), (8, 2, rat(1, 4))] {
        let got = generic_fpt_binary(d, p).unwrap();
        ensure(got == want, || format!("d={d} p={p}: {got} ≠ {want}"))?;
    }
    for &p in &primes {
        ensure(generic_fpt_binary(4, p).unwrap() == rat(1, 2), || format!("d=4 p={p}"))?;
    }
    Ok(format!("{n} (d, p) pairs match"))
}

fn reduced_census(d: u32, p: u64, k: u32) -> Result<fpure::strata::CensusReport, String> {
    let opts = CensusOptions { reduced_only: true, ..CensusOptions::default() };
    let rep = census(d, p, k, &opts).map_err(|e| e.to_string())?;
    ensure(rep.anomalies.is_empty(), || format!("anomalies: {:?}", rep.anomalies))?;
    ensure(rep.unresolved_reduced == 0, || format!("{} reduced forms unresolved", rep.unresolved_reduced))?;
    Ok(rep)
}

fn crit3() -> Outcome {
    let mut notes = Vec::new();
    for (p, k) in [(2, 1), (2, 2)] {
        let rep = reduced_census(4, p, k)?;
        ensure(rep.reduced_values() == vec![rat(1, 2)], || format!("{}: {}", rep.field, show(&rep.reduced_values())))?;
        notes.push(format!("{} {{1/2}}", rep.field));
    }
    for p in [3u64, 5] {
        let want = vec![rat(p as i64 - 1, 2 * p as i64), rat(1, 2)];
        let mut reps = vec![reduced_census(4, p, 1)?];
        if reps[0].reduced_values().len() < 2 {
            // the truncation stratum may only have points over F_{p^2}
            reps.push(reduced_census(4, p, 2)?);
        }
        let mut got: Vec<Rat> = reps.iter().flat_map(|r| r.reduced_values()).collect();
        got.sort();
        got.dedup();
        ensure(got == want, || format!("F_{p}: {} ≠ {}", show(&got), show(&want)))?;
        for v in &want {
            let (rep, w) = reps
                .iter()
                .find_map(|r| r.record(v).and_then(|x| x.reduced_witness.clone()).map(|w| (r, w)))
                .ok_or_else(|| format!("no witness for {v}"))?;
            let k = FieldSpec::new(p, rep.k).unwrap();
            let f = parse_form(&w, &k, Some(2)).unwrap();
            let r = fpt_binary_exact(&f).map_err(|e| e.to_string())?;
            ensure(is_squarefree_binary(&f).unwrap() && r.exact() == Some(v), || format!("witness {w} for {v}"))?;
        }
        let fields: Vec<&str> = reps.iter().map(|r| r.field.as_str()).collect();
        notes.push(format!("F_{p} {} via {}", show(&got), fields.join(", ")));
    }
    Ok(notes.join("; "))
}

fn crit4() -> Outcome {
    let rep = census(5, 7, 1, &CensusOptions::default()).map_err(|e| e.to_string())?;
    ensure(rep.anomalies.is_empty(), || format!("anomalies: {:?}", rep.anomalies))?;
    let got = rep.reduced_values();
    ensure(got == vec![rat(19, 49), rat(137, 343)], || format!("reduced values {}", show(&got)))?;
    let fifth = rep.record(&rat(1, 5)).ok_or("no form with threshold 1/5")?;
    ensure(fifth.count_nonreduced > 0 && fifth.count_reduced == 0, || "1/5 counts".into())?;
    let x5 = fpt_binary_exact(&form("x^5", 7)).unwrap();
    ensure(x5.exact() == Some(&rat(1, 5)), || x5.summary())?;
    for (s, want) in [("(x^5+y^5)^2", rat(19, 98)), ("(x*y)^2", rat(1, 2)), ("(x*y*(x+y))^3", rat(2, 9))] {
        let r = fpt_binary_exact(&form(s, 7)).unwrap();
        ensure(r.exact() == Some(&want), || format!("{s}: {}", r.summary()))?;
    }
    Ok(format!("{} forms, reduced {}, x^5 → 1/5, powers exact", rep.total, show(&got)))
}

fn crit5() -> Outcome {
    let a = reduced_census(9, 3, 1)?;
    ensure(a.reduced_values() == vec![rat(2, 9)], || format!("d=9: {}", show(&a.reduced_values())))?;
    let b = reduced_census(6, 3, 1)?;
    ensure(b.reduced_values() == vec![rat(1, 3)], || format!("d=6: {}", show(&b.reduced_values())))?;
    Ok(format!("{} reduced nonics all 2/9, {} reduced sextics all 1/3", a.reduced, b.reduced))
}

fn crit6a() -> Outcome {
    let f = form("x*(x^6+x^3*y^3+y^6)", 3);
    let r = fpt_binary_exact(&f).map_err(|e| e.to_string())?;
    let v = exact_of(&r)?;
    ensure(v == rat(2, 9), || format!("got {}", r.summary()))?;
    Ok(r.summary())
}

fn crit6b() -> Outcome {
    let out =
        trinomial_witness_search(5, 6, &rat(1, 5), Family { i: 0, j: 0, m: 3 }, 2).map_err(|e| e.to_string())?;
    let w = out.found.ok_or("no witness up to F_25")?;
    ensure(is_squarefree_binary(&w.poly).unwrap(), || format!("{} not reduced", w.form))?;
    // f ∈ m^[5] gives fpt ≤ 1/5 independently of the engine
    ensure(oracle_member(&w.poly, 1, 5), || "f ∉ m^[5]".into())?;
    let r = fpt_binary_exact(&w.poly).unwrap();
    ensure(r.exact() == Some(&rat(1, 5)), || r.summary())?;
    Ok(format!("{w}: {}", w.form))
}

fn crit7() -> Outcome {
    let t = candidates(19, 11).map_err(|e| e.to_string())?;
    let e = t.entries.iter().find(|e| e.l == 2).ok_or("no L=2 entry")?;
    ensure(e.cond_i && e.cond_ii && e.cond_iii, || "conditions".into())?;
    ensure(e.bms_excluded, || "not excluded".into())?;
    ensure(!t.admissible.contains(&e.value), || "listed as admissible".into())?;
    Ok(format!("L=2 value {} passes (I)(II)(III), excluded", e.value))
}

fn suite_truncation(rng: &mut ChaCha8Rng) -> Outcome {
    let primes = [2u64, 3, 5, 7, 11, 13];
    for _ in 0..10_000 {
        let b = rng.gen_range(1..=500u64);
        let a = rng.gen_range(1..=b);
        let p = primes[rng.gen_range(0..primes.len())];
        let e = rng.gen_range(1..=8u32);
        let lam = Rat::new(a, b);
        let ds = oracle_digits(a, b, p, e + 1);
        let ns: Vec<BigUint> = (1..=e + 1).map(|j| trunc(&lam, p, j).unwrap().numer).collect();
        let mut acc = BigUint::from(0u32);
        for j in 0..=e as usize {
            acc = acc * p + ds[j];
            // digits agree with the oracle
            ensure(ns[j] == acc, || format!("{lam} base {p} place {}", j + 1))?;
        }
        for j in 1..=e {
            let t = trunc(&lam, p, j).unwrap().value();
            let step_size = Rat::from_p_adic(&BigUint::from(1u32), p, j);
            // (1), (3)
            ensure(t < lam && &lam - &t <= step_size, || format!("(1)/(3) {lam} {p} {j}"))?;
            // (2)
            ensure(t <= trunc(&lam, p, j + 1).unwrap().value(), || format!("(2) {lam} {p} {j}"))?;
            // (4)
            let (nj, nj1) = (&ns[j as usize - 1], &ns[j as usize]);
            let step = nj1 - nj * p;
            ensure(step < BigUint::from(p), || format!("(4) {lam} {p} {j}"))?;
            // (5)
            let ne = &ns[e as usize - 1];
            ensure(ne / BigUint::from(p).pow(e - j) == *nj, || format!("(5) {lam} {p} {j}"))?;
        }
    }
    Ok("10^4 cases".into())
}

fn suite_bracketing(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..1000 {
        let p = SMALL_PRIMES[rng.gen_range(0..4)];
        let d = rng.gen_range(1..=7u32);
        let k = FieldSpec::prime(p).unwrap();
        let f = random_binary(&k, d, rng);
        if f.degree() == 0 {
            continue;
        }
        let mut prev = None;
        for e in 1..=3 {
            let v = nu(&f, e).map_err(|x| x.to_string())?;
            let o = oracle_nu(&f, e) as u128;
            ensure(v == o, || format!("ν({f}, {e}) = {v}, oracle {o}"))?;
            if let Some(w) = prev {
                let pp = p as u128;
                ensure(pp * w <= v && v < pp * w + pp, || format!("bracket {f} at {e}"))?;
            }
            prev = Some(v);
        }
    }
    Ok("10^3 forms, e ≤ 3, ν checked against bisection".into())
}

fn same_value(a: &FptResult, b: &FptResult) -> bool {
    a.value == b.value
}

fn suite_invariance(rng: &mut ChaCha8Rng) -> Outcome {
    let mut exact = 0;
    for _ in 0..1000 {
        let p = SMALL_PRIMES[rng.gen_range(0..4)];
        let d = rng.gen_range(2..=7u32);
        let k = FieldSpec::prime(p).unwrap();
        let f = random_binary(&k, d, rng);
        let r = fpt_binary_exact(&f).map_err(|e| e.to_string())?;
        let g = f.substitute_linear(&random_gl2(&k, rng)).unwrap().scale(rng.gen_range(1..p));
        let s = fpt_binary_exact(&g).map_err(|e| e.to_string())?;
        ensure(same_value(&r, &s), || format!("{f} → {}, {g} → {}", r.summary(), s.summary()))?;
        exact += r.is_exact() as usize;
    }
    Ok(format!("10^3 forms ({exact} exact)"))
}

fn suite_power(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..200 {
        let p = SMALL_PRIMES[rng.gen_range(0..4)];
        let d = rng.gen_range(2..=6u32);
        let k = FieldSpec::prime(p).unwrap();
        let f = random_squarefree(&k, d, rng);
        let r = fpt_binary_exact(&f).unwrap();
        for m in [2u32, 3] {
            let s = fpt_binary_exact(&f.pow(m)).unwrap();
            let ok = match (&r.value, &s.value) {
                (FptValue::Exact(a), FptValue::Exact(b)) => a.div_int(m as u64) == *b,
                (FptValue::Interval { lo, hi }, FptValue::Interval { lo: l2, hi: h2 }) => {
                    lo.div_int(m as u64) == *l2 && hi.div_int(m as u64) == *h2
                }
                _ => false,
            };
            ensure(ok, || format!("{f}: {} vs ^{m}: {}", r.summary(), s.summary()))?;
        }
    }
    Ok("200 forms, r ∈ {2, 3}".into())
}

fn suite_extension(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..200 {
        let p = SMALL_PRIMES[rng.gen_range(0..4)];
        let d = rng.gen_range(2..=6u32);
        let k = FieldSpec::prime(p).unwrap();
        let k2 = FieldSpec::new(p, 2).unwrap();
        let f = random_binary(&k, d, rng);
        let a = fpt_binary_exact(&f).unwrap();
        let b = fpt_binary_exact(&f.extend_to(&k2).unwrap()).unwrap();
        ensure(same_value(&a, &b), || format!("{f}: {} vs {}", a.summary(), b.summary()))?;
    }
    Ok("200 forms, F_p vs F_p^2".into())
}

fn suite_oracle(rng: &mut ChaCha8Rng) -> Outcome {
    let mut n_cases = 0;
    for p in [2u64, 3, 5] {
        let k = FieldSpec::prime(p).unwrap();
        for d in 1..=6u32 {
            let f = random_binary(&k, d, rng);
            for n in 0..=30u32 {
                for e in 1..=2 {
                    let a = pow_mod_frobenius(&f, n as u128, e).unwrap();
                    let b = naive_pow_mod_frobenius(&f, n, e);
                    ensure(a.terms == b.terms, || format!("{f}^{n} mod m^[{p}^{e}]"))?;
                    n_cases += 1;
                }
            }
        }
        let t = parse_form("x^2+y*z+2*x*z", &k, None).unwrap();
        for n in 0..=12u32 {
            let a = pow_mod_frobenius(&t, n as u128, 1).unwrap();
            ensure(a.terms == naive_pow_mod_frobenius(&t, n, 1).terms, || format!("ternary {n}"))?;
        }
    }
    Ok(format!("{n_cases} binary cases plus ternary"))
}

fn suite_lucas() -> Outcome {
    let mut row = vec![BigUint::from(1u32)];
    for m in 0..=300u32 {
        for p in [2u64, 3, 5, 7, 11, 13] {
            for (kk, c) in row.iter().enumerate() {
                let want = u64::try_from(c % p).unwrap();
                ensure(lucas_binom(m as u128, kk as u128, p) == want, || format!("C({m},{kk}) mod {p}"))?;
            }
        }
        let mut next = vec![BigUint::from(1u32)];
        for w in row.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(BigUint::from(1u32));
        row = next;
    }
    Ok("m ≤ 300, six primes".into())
}

fn crit9() -> Outcome {
    let mut n = 0;
    for p in [2u64, 3, 5] {
        for e in 1..=2u32 {
            let q = p.pow(e) as u32;
            for d in q + 1..=2 * q {
                let w = lower_bound_witness(p, e, d, 2000, 11)
                    .map_err(|x| x.to_string())?
                    .ok_or_else(|| format!("none for p={p} e={e} d={d}"))?;
                let f = &w.witness.poly;
                ensure(is_squarefree_binary(f).unwrap() && f.degree() == d, || w.witness.form.clone())?;
                ensure(w.witness.fpt == Rat::new(1, q), || format!("p={p} e={e} d={d}: {}", w.witness.fpt))?;
                // f ∈ m^[q] gives fpt ≤ 1/q independently of the engine
                ensure(oracle_member(f, 1, q as u64), || "f ∉ m^[q]".into())?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} (p, e, d) triples witnessed"))
}

fn main() {
    let mut run = Run { failures: Vec::new(), known: Vec::new() };
    let s = Duration::from_secs;
    run.check("1", "diagonal quintic over F_7", s(1), crit1);
    run.check("2", "generic formula table", s(1), crit2);
    run.check("3", "quartic census", s(120), crit3);
    run.check("4", "quintic census over F_7", s(600), crit4);
    run.check("5", "prime-power degrees", s(300), crit5);
    run.check("6a", "x(x^6+x^3y^3+y^6) over F_3 is 2/9", s(60), crit6a);
    run.check("6b", "sextic trinomial witness for 1/5", s(60), crit6b);
    run.check("7", "non-sufficiency for d=19, p=11", s(1), crit7);
    let t8 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    run.check("8a", "truncation identities", s(300), || suite_truncation(&mut rng));
    run.check("8b", "ν bracketing", s(300), || suite_bracketing(&mut rng));
    run.check("8c", "GL2 and scalar invariance", s(300), || suite_invariance(&mut rng));
    run.check("8d", "power rule", s(300), || suite_power(&mut rng));
    run.check("8e", "field-extension invariance", s(300), || suite_extension(&mut rng));
    run.check("8f", "windowed engine vs naive expansion", s(300), || suite_oracle(&mut rng));
    run.check("8g", "Lucas vs big-integer binomials", s(300), suite_lucas);
    let el = t8.elapsed();
    run.check("8", "property suites total", s(300), || Ok(format!("{el:.2?}")));
    run.check("9", "lower-bound sharpness", s(300), crit9);
    println!(
        "{} unexpected failure(s), {} known failure(s)",
        run.failures.len(),
        run.known.len()
    );
    if !run.failures.is_empty() {
        std::process::exit(1);
    }
}
