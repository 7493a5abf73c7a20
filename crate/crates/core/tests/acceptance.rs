//! Acceptance run: one PASS/FAIL line per criterion.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;
use planecode::iso::factorial;
use planecode::{
    are_isomorphic, automorphism_count, binomial, bounded_weight_census, build_hall9, build_pappus_config,
    build_pattern, build_pg2, code_from_system, count_copies, count_copies_direct, count_monomorphisms,
    count_pappus, digit_bound_check, dual, free_plane_stages, full_census, lemma39_verify, merge,
    plane_membership, random_partial_linear_space, theorem42_count, AjStrategy, BoundedOptions, CensusKind,
    CensusStatus, FpVector, PappusOptions, Pattern, PipelineOptions, ShardSpec, WeightType, WordFilter,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn big(n: u128) -> BigUint {
    BigUint::from(n)
}

fn dimensions() -> Outcome {
    for (q, dim) in [(2u32, 4usize), (3, 7), (5, 16), (11, 67)] {
        let plane = build_pg2(q).map_err(|e| e.to_string())?;
        let code = code_from_system(plane.system(), q).map_err(|e| e.to_string())?;
        let d = code.dual();
        check(code.dimension() == dim, format!("dim C_{q} = {}", code.dimension()))?;
        check(d.dimension() == dim - 1, format!("dual dim {}", d.dimension()))?;
        check(code.hull().same_space(&d), format!("hull differs from dual at q = {q}"))?;
    }
    Ok("dims 4,7,16,67; duals 3,6,15,66; hull = dual".into())
}

fn full_censuses() -> Outcome {
    let fano = build_pg2(2).unwrap();
    let code = code_from_system(fano.system(), 2).unwrap();
    let h = full_census(&code, CensusKind::Hamming, ShardSpec::WHOLE, u64::MAX).map_err(|e| e.to_string())?;
    let table: Vec<(usize, BigUint)> = h.support_weights().into_iter().map(|w| (w, h.get_weight(w))).collect();
    check(
        table == vec![(0, big(1)), (3, big(7)), (4, big(7)), (7, big(1))],
        format!("Fano table {table:?}"),
    )?;

    let pg3 = build_pg2(3).unwrap();
    let code = code_from_system(pg3.system(), 3).unwrap();
    let c = full_census(&code, CensusKind::Complete, ShardSpec::WHOLE, u64::MAX).map_err(|e| e.to_string())?;
    check(c.total() == big(2187), format!("total {}", c.total()))?;
    check(c.get_weight(4) == big(26), format!("weight 4: {}", c.get_weight(4)))?;
    let h = full_census(&code, CensusKind::Hamming, ShardSpec::WHOLE, u64::MAX).unwrap();
    check(c.to_hamming().to_cwe() == h.to_cwe(), "Hamming specialization differs")?;
    Ok(format!("Fano {{0:1,3:7,4:7,7:1}}; PG(2,3) {} types over 2187 words, A_4 = 26", c.entries.len()))
}

fn minimum_weights() -> Outcome {
    let plane = build_pg2(5).unwrap();
    let code = code_from_system(plane.system(), 5).unwrap();
    let census = bounded_weight_census(&code, &BoundedOptions::new(12)).map_err(|e| e.to_string())?;
    check(census.status == CensusStatus::Proven, "census not proven complete")?;
    let support = census.hamming.support_weights();
    check(support == vec![0, 6, 10, 11, 12], format!("weights {support:?}"))?;
    let counts: Vec<BigUint> = [6, 10, 11].iter().map(|&w| census.hamming.get_weight(w)).collect();
    check(counts == vec![big(124), big(1860), big(5580)], format!("counts {counts:?}"))?;
    Ok(format!("PROVEN; A_6 = 124, A_10 = 1860, A_11 = 5580, A_12 = {}", census.hamming.get_weight(12)))
}

fn dual_weight_twelve() -> Outcome {
    let plane = build_pg2(5).unwrap();
    let code = code_from_system(plane.system(), 5).unwrap().dual();
    let census = bounded_weight_census(&code, &BoundedOptions::new(12)).map_err(|e| e.to_string())?;
    check(census.status == CensusStatus::Proven, "census not proven complete")?;
    let count = census.hamming.get_weight(12);
    let predicted = big(25 * 124 * binomial(6, 3));
    let verdict = if count == predicted { "match" } else { "mismatch" };
    Ok(format!("PROVEN; dual A_12 = {count}, predicted {predicted}: {verdict}"))
}

fn dual_minimum_words() -> Outcome {
    let plane = build_pg2(3).unwrap();
    let code = code_from_system(plane.system(), 3).unwrap().dual();
    let mut opts = BoundedOptions::new(6);
    opts.words = WordFilter::Weight(6);
    let census = bounded_weight_census(&code, &opts).map_err(|e| e.to_string())?;
    check(census.status == CensusStatus::Proven, "census not proven complete")?;
    check(census.min_nonzero_weight() == Some(6), format!("min weight {:?}", census.min_nonzero_weight()))?;
    check(census.words.len() == 156, format!("{} words", census.words.len()))?;
    let n = plane.num_points();
    let mut forms = HashSet::new();
    for a in 0..plane.num_lines() {
        for b in 0..plane.num_lines() {
            if a == b {
                continue;
            }
            let la = FpVector::indicator(3, n, plane.line(a)).unwrap();
            let lb = FpVector::indicator(3, n, plane.line(b)).unwrap();
            let diff = la.add_scaled(&lb, 2).unwrap();
            for c in 1..3 {
                forms.insert(diff.scaled(c).coords().to_vec());
            }
        }
    }
    let all = census.words.iter().all(|w| forms.contains(w.coords()));
    check(all, "a minimum weight word is not a multiple of a line difference")?;
    Ok("min weight 6, 156 words, all c(l1 - l2)".into())
}

fn reconstruction() -> Outcome {
    let plane = build_pg2(5).unwrap();
    let report = lemma39_verify(&plane, 2, &PipelineOptions::default()).map_err(|e| e.to_string())?;
    let target = WeightType(vec![20, 5, 5, 1, 0]);
    let row = report.rows.iter().find(|r| r.weight_type == target).ok_or("type (20,5,5,1,0) missing")?;
    check(row.a_j == big(930), format!("a_j = {}", row.a_j))?;
    check(row.reconstructed == 930 && row.all_genuine, format!("{} reconstructed", row.reconstructed))?;
    check(report.passed, "some type failed")?;
    Ok(format!("930 words of type {target}, 930 ordered line pairs reconstructed"))
}

fn inclusion_numbers() -> Outcome {
    let pg5 = build_pg2(5).unwrap();
    let x = build_pattern(Pattern::TwoFullLines(5)).unwrap();
    let r = theorem42_count(&x, &pg5, &PipelineOptions::default()).map_err(|e| e.to_string())?;
    check(r.total == big(465) && r.matches, format!("TwoFullLines: {} vs {}", r.total, r.direct))?;
    for row in &r.rows {
        let j_fact: BigUint = row.weight_type.counts().iter().map(|&c| factorial(c as usize)).product();
        check(
            j_fact * &row.a_j == &row.automorphisms * &row.class_copies,
            format!("identity fails for class {}", row.class),
        )?;
    }

    let pg11 = build_pg2(11).unwrap();
    let tri = build_pattern(Pattern::Triangle).unwrap();
    let opts = PipelineOptions { strategy: AjStrategy::LineTuples, ..PipelineOptions::default() };
    let r = theorem42_count(&tri, &pg11, &opts).map_err(|e| e.to_string())?;
    let closed = binomial(133, 3) - 133 * binomial(12, 3);
    check(closed == 354_046, format!("closed form {closed}"))?;
    check(r.total == big(closed) && r.direct == big(closed), format!("Triangle: {} vs {}", r.total, r.direct))?;
    let mono = count_copies(&tri, pg11.system()).map_err(|e| e.to_string())?;
    check(mono == big(closed), format!("backtracking count {mono}"))?;
    Ok("TwoFullLines(5) in PG(2,5) = 465; Triangle in PG(2,11) = 354046".into())
}

fn pappus_counts() -> Outcome {
    let opts = PappusOptions::default();
    let mut parts = Vec::new();
    for (q, bound) in [(2u32, 0u128), (3, 52), (4, 2240), (5, 31000)] {
        let r = count_pappus(&build_pg2(q).unwrap(), &opts).map_err(|e| e.to_string())?;
        check(r.bound == big(bound) && r.copies == big(bound), format!("q = {q}: {} of {}", r.copies, r.bound))?;
        check(r.witnesses.is_multiple_of(&big(18)), format!("q = {q}: witnesses {}", r.witnesses))?;
        parts.push(r.copies.to_string());
    }
    let hall = count_pappus(&build_hall9().unwrap(), &opts).map_err(|e| e.to_string())?;
    check(hall.bound == big(19_262_880), format!("Hall bound {}", hall.bound))?;
    check(hall.copies < hall.bound && !hall.is_pappian, format!("Hall copies {}", hall.copies))?;
    check(hall.witnesses.is_multiple_of(&big(18)), "Hall witnesses not divisible by 18")?;
    let oracle = count_copies(&build_pappus_config().unwrap(), build_pg2(3).unwrap().system())
        .map_err(|e| e.to_string())?;
    check(oracle == big(52), format!("iso-search count {oracle}"))?;
    Ok(format!(
        "PG(2,q) q=2..5: {}; Hall(9): {} < 19262880 ({:.1}s)",
        parts.join(", "),
        hall.copies,
        hall.runtime_seconds
    ))
}

fn free_plane() -> Outcome {
    let stages = free_plane_stages(6, 1000).map_err(|e| e.to_string())?;
    let sizes: Vec<usize> = stages.iter().map(|s| s.num_points()).collect();
    check(sizes == vec![4, 6, 7, 9, 13, 33], format!("sizes {sizes:?}"))?;
    for (n, x) in stages.iter().enumerate().take(5) {
        let d = dual(x).map_err(|e| e.to_string())?;
        check(are_isomorphic(x, &d).unwrap(), format!("X_{} not self-dual", n + 1))?;
    }
    for pair in stages.windows(2) {
        let v = pair[0].num_points();
        let traces: HashSet<Vec<usize>> =
            pair[1].lines().iter().map(|l| l.iter().copied().filter(|&x| x < v).collect()).collect();
        check(pair[0].lines().iter().all(|l| traces.contains(l)), "stage is not a subsystem of the next")?;
    }
    Ok("4,6,7,9,13,33; X_1..X_5 self-dual; nested".into())
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut duals = 0;
    for i in 0..100 {
        let v = 4 + i % 9;
        let sys = random_partial_linear_space(v, 3 * v, 4, rng.gen()).unwrap();
        let Ok(d) = dual(&sys) else { continue };
        duals += 1;
        for p in [2u32, 3, 5] {
            let a = code_from_system(&sys, p).unwrap().dimension();
            let b = code_from_system(&d, p).unwrap().dimension();
            check(a == b, format!("rank duality fails on system {i} at p = {p}"))?;
        }
    }

    for q in [5u32, 11] {
        let plane = build_pg2(q).unwrap();
        let p = q as usize;
        for k in 1..=8usize {
            for _ in 0..50 {
                let chosen = rand::seq::index::sample(&mut rng, plane.num_lines(), k);
                let union: HashSet<usize> = chosen.iter().flat_map(|j| plane.line(j).iter().copied()).collect();
                let low = (p + 1) * k - k * (k - 1) / 2;
                check(low <= union.len() && union.len() <= p * k + 1, format!("union bound q = {q}, k = {k}"))?;
            }
        }
    }

    check((0..=12).all(|k| digit_bound_check(k).holds), "digit bound")?;

    for q in [3u32, 5] {
        let plane = build_pg2(q).unwrap();
        let code = code_from_system(plane.system(), q).unwrap();
        for i in 0..10_000 {
            let w = if i % 2 == 0 {
                FpVector::new(q, (0..plane.num_points()).map(|_| rng.gen_range(0..q))).unwrap()
            } else {
                let mut w = FpVector::zeros(q, plane.num_points()).unwrap();
                for r in 0..code.dimension() {
                    w = w.add_scaled(&code.row_vector(r), rng.gen_range(0..q)).unwrap();
                }
                w
            };
            check(
                plane_membership(&plane, q, &w).unwrap() == code.contains(&w).unwrap(),
                format!("membership differs at q = {q}"),
            )?;
        }
    }

    let pg3 = build_pg2(3).unwrap();
    let code = code_from_system(pg3.system(), 3).unwrap();
    let whole = full_census(&code, CensusKind::Complete, ShardSpec::WHOLE, u64::MAX).unwrap().to_cwe();
    for s in [1u64, 2, 4, 8] {
        let parts: Vec<_> = (0..s)
            .map(|i| full_census(&code, CensusKind::Complete, ShardSpec::new(i, s).unwrap(), u64::MAX).unwrap())
            .collect();
        check(merge(&parts).unwrap().to_cwe() == whole, format!("shard merge S = {s}"))?;
    }

    let hosts = [build_pg2(2).unwrap(), build_pg2(3).unwrap()];
    let mut monos = 0;
    for i in 0..60 {
        let y = random_partial_linear_space(3 + i % 4, 8, 3, rng.gen()).unwrap();
        let aut = automorphism_count(&y).unwrap();
        for host in &hosts {
            let m = count_monomorphisms(&y, host.system()).unwrap();
            check(m.is_multiple_of(&aut), format!("{m} monomorphisms, #Aut = {aut}"))?;
            let direct = count_copies_direct(&y, host.system(), u64::MAX).unwrap();
            check(m / &aut == direct, "copy count differs from direct enumeration")?;
            monos += 1;
        }
    }
    Ok(format!("rank duality on {duals} duals x 3 primes, union bounds, digit bound, 2x10^4 memberships, shards, {monos} divisibility checks"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("code dimensions", dimensions),
        ("full censuses", full_censuses),
        ("minimum weights at p = 5", minimum_weights),
        ("dual weight 12 at p = 5", dual_weight_twelve),
        ("dual minimum weight words at p = 3", dual_minimum_words),
        ("line reconstruction at p = 5, k = 2", reconstruction),
        ("inclusion numbers", inclusion_numbers),
        ("Pappus counts", pappus_counts),
        ("free plane stages", free_plane),
        ("property suites", property_suites),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
