mod common;

use hurwitz::perm::transposition_blocks;
use hurwitz::{GroupHandle, Permutation};
use proptest::prelude::*;

fn arb_perm(d: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=d).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(&v).unwrap())
}

fn arb_sized(max_d: usize, n: usize) -> impl Strategy<Value = (usize, Vec<Permutation>)> {
    (1..=max_d).prop_flat_map(move |d| (Just(d), prop::collection::vec(arb_perm(d), n)))
}

proptest! {
    #[test]
    fn composition_is_left_to_right((d, ps) in arb_sized(8, 3)) {
        let (p, q, r) = (ps[0], ps[1], ps[2]);
        for x in 1..=d {
            prop_assert_eq!(p.then(&q).image(x), q.image(p.image(x)));
        }
        prop_assert_eq!(p.then(&q).then(&r), p.then(&q.then(&r)));
        prop_assert!(p.then(&p.inverse()).is_identity());
        prop_assert_eq!(p.conjugate_by(&q), q.inverse().then(&p).then(&q));
    }

    #[test]
    fn cycles_partition_the_points((d, ps) in arb_sized(9, 1)) {
        let p = ps[0];
        let cycles = p.cycles();
        let mut seen: Vec<usize> = cycles.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (1..=d).collect::<Vec<_>>());
        for c in &cycles {
            prop_assert_eq!(c[0], *c.iter().min().unwrap());
            for k in 0..c.len() {
                prop_assert_eq!(p.image(c[k]), c[(k + 1) % c.len()]);
            }
        }
        let weight: usize = cycles.iter().map(|c| c.len() - 1).sum();
        prop_assert_eq!(p.cycle_type().weight(), weight);
        prop_assert_eq!(p.is_even(), weight % 2 == 0);
        prop_assert_eq!(p.conjugate_by(&ps[0]).cycle_type(), p.cycle_type());
    }

    #[test]
    fn display_round_trips((_d, ps) in arb_sized(12, 1)) {
        let p = ps[0];
        prop_assert_eq!(p.to_string().parse::<Permutation>().unwrap(), p);
    }

    #[test]
    fn group_order_matches_closure((d, gens) in arb_sized(6, 2)) {
        let g = GroupHandle::generated(d, &gens);
        prop_assert_eq!(g.order() as usize, common::closure_order(d, &gens));
        for p in &gens {
            prop_assert!(g.contains(p));
        }
        let orbits = g.orbits();
        for p in &gens {
            for x in 1..=d {
                prop_assert_eq!(orbits.block_of(x), orbits.block_of(p.image(x)));
            }
        }
    }

    #[test]
    fn transposition_blocks_are_orbits(d in 2usize..8, picks in prop::collection::vec((1usize..8, 1usize..8), 0..6)) {
        let ts: Vec<Permutation> = picks
            .into_iter()
            .filter(|(p, q)| p != q && *p <= d && *q <= d)
            .map(|(p, q)| Permutation::transposition(d, p, q).unwrap())
            .collect();
        let blocks = transposition_blocks(d, &ts).unwrap();
        prop_assert_eq!(blocks, GroupHandle::generated(d, &ts).orbits());
    }
}

#[test]
fn symmetric_groups_have_factorial_order() {
    for d in 1..=10u128 {
        let expected: u128 = (1..=d).product();
        assert_eq!(GroupHandle::symmetric(d as usize).order(), expected);
    }
    let t = |p, q| Permutation::transposition(4, p, q).unwrap();
    let klein = GroupHandle::generated(4, &[t(1, 2).then(&t(3, 4)), t(1, 3).then(&t(2, 4))]);
    assert_eq!(klein.order(), 4);
    assert!(klein.is_transitive());
    assert!(!klein.is_symmetric());
}
