mod common;

use common::rat;
use fpure::fptengine::fpt_binary_exact;
use fpure::forms::is_squarefree_binary;
use fpure::genericfpt::generic_fpt_binary;
use fpure::strata::{
    candidates, census, lower_bound_reduced, realize_truncation, trinomial_witness_search, verify_paper, CensusOptions,
    Family, VerifyOptions,
};

#[test]
fn reference_tables_reproduce() {
    let rep = verify_paper(&[3, 4, 5, 6, 7, 8], &[2, 3, 5, 7, 11, 13], &VerifyOptions::default()).unwrap();
    println!("{}", rep.matrix());
    assert!(rep.pass, "{}", rep.matrix());
}

#[test]
fn census_values_are_candidates_and_respect_the_lower_bound() {
    for (d, p) in [(3, 2), (3, 7), (4, 7), (5, 3), (5, 7), (6, 5), (6, 7), (7, 3), (7, 5), (8, 3), (8, 5), (10, 3)] {
        let rep = census(d, p, 1, &CensusOptions { reduced_only: true, ..CensusOptions::default() }).unwrap();
        assert!(rep.anomalies.is_empty(), "{d} {p}: {:?}", rep.anomalies);
        let table = candidates(d, p).unwrap();
        let vals = rep.reduced_values();
        for v in &vals {
            assert!(table.admits(v), "d={d} p={p}: {v}");
        }
        let lb = lower_bound_reduced(d, p).unwrap();
        let floor = if table.admits(&lb) { lb } else { table.admissible[0].clone() };
        assert!(vals[0] >= floor, "d={d} p={p}: {} < {floor}", vals[0]);
    }
}

#[test]
fn census_maximum_is_generic_over_large_fields() {
    for (d, p, k) in [(3, 5, 2), (4, 5, 2), (3, 3, 3), (5, 2, 5)] {
        let rep = census(d, p, k, &CensusOptions::default()).unwrap();
        let top = rep.values.last().unwrap();
        assert_eq!(top.value, generic_fpt_binary(d as u64, p).unwrap(), "d={d} over {}", rep.field);
    }
}

#[test]
fn every_coprime_degree_realizes_a_truncation() {
    let mut missing = Vec::new();
    for d in 4..=12u32 {
        for p in [2u64, 3, 5, 7, 11, 13] {
            if d as u64 % p == 0 {
                continue;
            }
            let t = candidates(d, p).unwrap();
            if t.admissible.iter().all(|v| *v == rat(2, d as i64)) {
                continue;
            }
            match realize_truncation(d, p, 2, 3000, 5).unwrap() {
                Some(w) => {
                    assert!(is_squarefree_binary(&w.poly).unwrap());
                    assert!(t.admits(&w.fpt) && w.fpt != rat(2, d as i64));
                }
                None => missing.push((d, p)),
            }
        }
    }
    assert!(missing.is_empty(), "no truncation witness for {missing:?}");
}

#[test]
fn witness_values_never_exceed_the_target() {
    for (p, d, target, fam) in [
        (3u64, 4u32, rat(1, 3), Family { i: 1, j: 1, m: 1 }),
        (5, 6, rat(1, 5), Family { i: 0, j: 0, m: 3 }),
        (7, 6, rat(2, 7), Family { i: 0, j: 0, m: 3 }),
        (7, 8, rat(3, 14), Family { i: 1, j: 1, m: 3 }),
        (11, 8, rat(2, 11), Family { i: 0, j: 0, m: 4 }),
    ] {
        let Ok(out) = trinomial_witness_search(p, d, &target, fam, 2) else { continue };
        if let Some(w) = out.found {
            let v = fpt_binary_exact(&w.poly).unwrap().exact().cloned().unwrap();
            assert!(v <= target, "p={p} d={d}: {v} > {target}");
            let first = candidates(d, p).unwrap().admissible[0].clone();
            if target == first {
                assert_eq!(v, target);
            }
        }
    }
}
