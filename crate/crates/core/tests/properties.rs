use std::collections::HashSet;

use num_bigint::BigUint;
use num_integer::Integer;
use planecode::iso::factorial;
use planecode::{
    are_isomorphic, automorphism_count, build_desargues_config, build_pappus_config, build_pg2, canonical_form,
    code_from_system, count_copies, count_copies_direct, count_monomorphisms, digit_bound_check, dual,
    flag_deletion, free_plane_stages, full_census, merge, plane_membership, random_partial_linear_space,
    CensusKind, FpVector, IncidenceSystem, ShardSpec,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn permute(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k == perm.len() {
        return f(perm);
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        if permute(perm, k + 1, f) {
            perm.swap(k, i);
            return true;
        }
        perm.swap(k, i);
    }
    false
}

fn line_set(sys: &IncidenceSystem) -> HashSet<Vec<usize>> {
    sys.lines().iter().cloned().collect()
}

fn maps_onto(a: &IncidenceSystem, b: &HashSet<Vec<usize>>, perm: &[usize]) -> bool {
    a.lines().iter().all(|l| {
        let mut img: Vec<usize> = l.iter().map(|&x| perm[x]).collect();
        img.sort_unstable();
        b.contains(&img)
    })
}

fn brute_isomorphic(a: &IncidenceSystem, b: &IncidenceSystem) -> bool {
    if a.num_points() != b.num_points() || a.num_lines() != b.num_lines() {
        return false;
    }
    let target = line_set(b);
    let mut perm: Vec<usize> = (0..a.num_points()).collect();
    permute(&mut perm, 0, &mut |p| maps_onto(a, &target, p))
}

fn brute_automorphisms(a: &IncidenceSystem) -> u64 {
    let lines = line_set(a);
    let mut perm: Vec<usize> = (0..a.num_points()).collect();
    let mut count = 0;
    permute(&mut perm, 0, &mut |p| {
        if maps_onto(a, &lines, p) {
            count += 1;
        }
        false
    });
    count
}

fn shuffled(sys: &IncidenceSystem, rng: &mut ChaCha8Rng) -> IncidenceSystem {
    let mut perm: Vec<usize> = (0..sys.num_points()).collect();
    perm.shuffle(rng);
    sys.relabel(&perm).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rank_duality(v in 4usize..13, seed in any::<u64>()) {
        let sys = random_partial_linear_space(v, 3 * v, 4, seed).unwrap();
        if let Ok(d) = dual(&sys) {
            for p in [2u32, 3, 5] {
                let a = code_from_system(&sys, p).unwrap().dimension();
                let b = code_from_system(&d, p).unwrap().dimension();
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn union_of_lines(q in prop::sample::select(vec![5u32, 11]), k in 1usize..=8, seed in any::<u64>()) {
        let plane = build_pg2(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chosen = rand::seq::index::sample(&mut rng, plane.num_lines(), k).into_vec();
        let union: HashSet<usize> = chosen.iter().flat_map(|&j| plane.line(j).iter().copied()).collect();
        let (p, k) = (q as usize, k);
        prop_assert!((p + 1) * k - k * (k - 1) / 2 <= union.len());
        prop_assert!(union.len() <= p * k + 1);
    }

    #[test]
    fn canonical_form_ignores_labels(which in 0usize..4, seed in any::<u64>()) {
        let sys = match which {
            0 => build_pappus_config().unwrap(),
            1 => build_desargues_config().unwrap(),
            2 => build_pg2(3).unwrap().system().clone(),
            _ => free_plane_stages(5, 100).unwrap().pop().unwrap(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let other = shuffled(&sys, &mut rng);
        prop_assert_eq!(canonical_form(&sys).unwrap().bytes, canonical_form(&other).unwrap().bytes);
    }

    #[test]
    fn isomorphism_agrees_with_exhaustive_search(v in 3usize..8, seed in any::<u64>(), relabel in any::<bool>()) {
        let a = random_partial_linear_space(v, 2 * v, 3, seed).unwrap();
        let b = if relabel {
            shuffled(&a, &mut ChaCha8Rng::seed_from_u64(seed ^ 1))
        } else {
            random_partial_linear_space(v, 2 * v, 3, seed.wrapping_add(1)).unwrap()
        };
        prop_assert_eq!(are_isomorphic(&a, &b).unwrap(), brute_isomorphic(&a, &b));
    }

    #[test]
    fn copies_are_exact_quotients(v in 3usize..7, seed in any::<u64>()) {
        let y = random_partial_linear_space(v, 2 * v, 3, seed).unwrap();
        let x = build_pg2(3).unwrap().system().clone();
        let monos = count_monomorphisms(&y, &x).unwrap();
        let aut = automorphism_count(&y).unwrap();
        prop_assert!(monos.is_multiple_of(&aut));
        prop_assert_eq!(count_copies(&y, &x).unwrap(), count_copies_direct(&y, &x, u64::MAX).unwrap());
    }
}

#[test]
fn digit_bound_up_to_twelve() {
    for k in 0..=12 {
        assert!(digit_bound_check(k).holds, "k = {k}");
    }
}

#[test]
fn membership_matches_gaussian_elimination() {
    for q in [3u32, 5] {
        let plane = build_pg2(q).unwrap();
        let code = code_from_system(plane.system(), q).unwrap();
        let n = plane.num_points();
        let mut rng = ChaCha8Rng::seed_from_u64(q as u64);
        let mut members = 0;
        for i in 0..10_000 {
            let w = if i % 2 == 0 {
                FpVector::new(q, (0..n).map(|_| rng.gen_range(0..q))).unwrap()
            } else {
                let mut w = FpVector::zeros(q, n).unwrap();
                for r in 0..code.dimension() {
                    w = w.add_scaled(&code.row_vector(r), rng.gen_range(0..q)).unwrap();
                }
                w
            };
            let inside = code.contains(&w).unwrap();
            members += usize::from(inside);
            assert_eq!(plane_membership(&plane, q, &w).unwrap(), inside);
        }
        assert!(members >= 5_000);
    }
}

#[test]
fn shards_merge_deterministically() {
    let plane = build_pg2(3).unwrap();
    let code = code_from_system(plane.system(), 3).unwrap();
    let whole = full_census(&code, CensusKind::Complete, ShardSpec::WHOLE, u64::MAX).unwrap();
    for s in [1u64, 2, 4, 8] {
        let parts: Vec<_> = (0..s)
            .map(|i| full_census(&code, CensusKind::Complete, ShardSpec::new(i, s).unwrap(), u64::MAX).unwrap())
            .collect();
        let mut reversed = parts.clone();
        reversed.reverse();
        assert_eq!(merge(&parts).unwrap().to_cwe(), whole.to_cwe());
        assert_eq!(merge(&reversed).unwrap().to_cwe(), whole.to_cwe());
    }
}

#[test]
fn every_flag_deletion_of_pg3_is_pappus() {
    let plane = build_pg2(3).unwrap();
    let pappus = build_pappus_config().unwrap();
    let mut flags = 0;
    for x in 0..plane.num_points() {
        for &l in plane.lines_through(x) {
            assert!(are_isomorphic(&flag_deletion(&plane, x, l).unwrap(), &pappus).unwrap());
            flags += 1;
        }
    }
    assert_eq!(flags, 52);
}

#[test]
fn automorphism_groups_by_exhaustion() {
    let pappus = build_pappus_config().unwrap();
    let desargues = build_desargues_config().unwrap();
    assert_eq!(brute_automorphisms(&pappus), 108);
    assert_eq!(brute_automorphisms(&desargues), 120);
    assert_eq!(automorphism_count(&pappus).unwrap(), BigUint::from(108u32));
    assert_eq!(automorphism_count(&desargues).unwrap(), BigUint::from(120u32));
    let fano = build_pg2(2).unwrap().system().clone();
    assert_eq!(automorphism_count(&fano).unwrap(), BigUint::from(brute_automorphisms(&fano)));
    let empty = IncidenceSystem::new(4, vec![]).unwrap();
    assert_eq!(automorphism_count(&empty).unwrap(), factorial(4));
}

#[test]
fn free_plane_stages_nest_and_are_self_dual() {
    let stages = free_plane_stages(6, 100).unwrap();
    let sizes: Vec<usize> = stages.iter().map(IncidenceSystem::num_points).collect();
    assert_eq!(sizes, vec![4, 6, 7, 9, 13, 33]);
    for (n, x) in stages.iter().enumerate().take(5) {
        assert!(are_isomorphic(x, &dual(x).unwrap()).unwrap(), "X_{}", n + 1);
    }
    for pair in stages.windows(2) {
        let (small, big) = (&pair[0], &pair[1]);
        let v = small.num_points();
        let mut traces: Vec<Vec<usize>> = big
            .lines()
            .iter()
            .map(|l| l.iter().copied().filter(|&x| x < v).collect::<Vec<_>>())
            .filter(|t| t.len() >= 2)
            .collect();
        traces.sort();
        assert!(small.lines().iter().all(|l| traces.binary_search(l).is_ok()));
    }
}
