mod common;

use std::collections::BTreeSet;

use hurwitz::enumerate::{enumerate_range, random_filtered, tuple_space};
use hurwitz::{count_systems, enumerate_systems, random_system, BlockPartition, Filter, HurwitzSystem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn keys(d: usize, h: usize, w: usize, f: Filter) -> BTreeSet<String> {
    enumerate_systems(d, h, w, f).unwrap().map(|s| s.to_string()).collect()
}

#[test]
fn enumeration_matches_brute_force() {
    for (d, h, w) in [
        (2, 0, 2),
        (2, 1, 2),
        (2, 1, 4),
        (2, 2, 2),
        (3, 0, 4),
        (3, 1, 2),
        (3, 1, 4),
        (4, 0, 4),
        (3, 2, 0),
    ] {
        let naive = common::naive_systems(d, h, w);
        assert_eq!(keys(d, h, w, Filter::All), naive, "(d,h,w) = ({d},{h},{w})");
        assert_eq!(count_systems(d, h, w).unwrap(), naive.len().into());
    }
}

#[test]
fn filters_partition_the_enumeration() {
    for (d, h, w) in [(3, 0, 4), (3, 1, 4), (4, 0, 4)] {
        let all = keys(d, h, w, Filter::All);
        let transitive = keys(d, h, w, Filter::Transitive);
        let intransitive = keys(d, h, w, Filter::Intransitive);
        assert!(transitive.is_disjoint(&intransitive));
        assert_eq!(transitive.len() + intransitive.len(), all.len());
        let full = keys(d, h, w, Filter::FullMonodromy);
        assert!(full.is_subset(&transitive));
        for k in &full {
            assert!(k.parse::<HurwitzSystem>().unwrap().is_full_monodromy());
        }
    }
    let young = Filter::Young(BlockPartition::new(3, vec![vec![1, 2], vec![3]]).unwrap());
    assert_eq!(keys(3, 0, 4, young).len(), 1);
    assert_eq!(keys(3, 0, 4, Filter::FullMonodromy).len(), 24);
}

#[test]
fn ranges_split_the_enumeration() {
    let (d, h, w) = (3, 1, 4);
    let space = tuple_space(d, w);
    let mut joined = BTreeSet::new();
    let mut total = 0;
    for k in 0..5 {
        for s in enumerate_range(d, h, w, Filter::All, space * k / 5..space * (k + 1) / 5).unwrap() {
            joined.insert(s.to_string());
            total += 1;
        }
    }
    assert_eq!(total, joined.len());
    assert_eq!(joined, keys(d, h, w, Filter::All));
}

#[test]
fn odd_branch_counts_and_guard() {
    assert_eq!(enumerate_systems(3, 1, 3, Filter::All).unwrap().count(), 0);
    assert_eq!(count_systems(3, 1, 3).unwrap(), 0u32.into());
    assert!(hurwitz::enumerate::enumerate_systems_with_guard(4, 2, 8, Filter::All, 1e6).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_systems_are_valid(seed in any::<u64>(), d in 2usize..6, h in 0usize..3, half in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_system(d, h, 2 * half, &mut rng).unwrap();
        prop_assert!(s.is_valid());
        prop_assert_eq!(s.params(), (d, h, 2 * half));
        prop_assert_eq!(s.to_string().parse::<HurwitzSystem>().unwrap(), s.clone());
        prop_assert_eq!(HurwitzSystem::unpack(d, h, 2 * half, &s.pack()).unwrap(), s.clone());
        let hw = 2 * half as i64;
        prop_assert_eq!(s.genus(), 1 + d as i64 * (h as i64 - 1) + hw / 2);
        if let Ok(f) = random_filtered(d, h, 2 * half, &Filter::FullMonodromy, &mut rng, 2000) {
            prop_assert!(f.is_full_monodromy());
        }
    }
}
