//! Brute-force oracles shared by the integration tests. They avoid the
//! library's group, enumeration and orbit machinery on purpose.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use hurwitz::moves::apply_move;
use hurwitz::{HurwitzSystem, Move, Permutation};
use itertools::Itertools;

pub fn perm(images: &[usize]) -> Permutation {
    Permutation::from_images(images).unwrap()
}

/// Every permutation of `1..=d` as an image vector.
pub fn all_images(d: usize) -> Vec<Vec<usize>> {
    (1..=d).permutations(d).collect()
}

pub fn all_perms(d: usize) -> Vec<Permutation> {
    all_images(d).iter().map(|v| perm(v)).collect()
}

pub fn transpositions(d: usize) -> Vec<Permutation> {
    all_perms(d).into_iter().filter(|p| p.is_transposition()).collect()
}

/// Left-to-right product computed from raw image vectors.
pub fn naive_product(d: usize, ps: &[Permutation]) -> Vec<usize> {
    let mut img: Vec<usize> = (1..=d).collect();
    for p in ps {
        img = img.iter().map(|&x| p.image(x)).collect();
    }
    img
}

/// Closure of the generators under multiplication.
pub fn closure_order(d: usize, gens: &[Permutation]) -> usize {
    let id = Permutation::identity(d);
    let mut seen: HashSet<Permutation> = HashSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.then(g);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}

fn commutator(a: &Permutation, b: &Permutation) -> Permutation {
    a.then(b).then(&a.inverse()).then(&b.inverse())
}

/// All valid systems by scanning every tuple.
pub fn naive_systems(d: usize, h: usize, w: usize) -> BTreeSet<String> {
    let ts = transpositions(d);
    let ps = all_perms(d);
    let mut out = BTreeSet::new();
    for tuple in std::iter::repeat(ts.iter()).take(w).multi_cartesian_product().chain(
        // multi_cartesian_product yields nothing for an empty product
        std::iter::once(Vec::new()).filter(|_| w == 0),
    ) {
        let tvec: Vec<Permutation> = tuple.into_iter().copied().collect();
        let head = naive_product(d, &tvec);
        for hs in std::iter::repeat(ps.iter())
            .take(2 * h)
            .multi_cartesian_product()
            .chain(std::iter::once(Vec::new()).filter(|_| h == 0))
        {
            let mut acc = perm(&head);
            for pair in hs.chunks(2) {
                acc = acc.then(&commutator(pair[0], pair[1]));
            }
            if acc.is_identity() {
                let handles = hs.chunks(2).map(|p| (*p[0], *p[1])).collect();
                out.insert(HurwitzSystem::new(d, tvec.clone(), handles).unwrap().to_string());
            }
        }
    }
    out
}

/// Orbit of `seed` under `gens` by plain breadth-first search.
pub fn naive_orbit(seed: &HurwitzSystem, gens: &[Move]) -> BTreeSet<String> {
    let mut seen = BTreeSet::from([seed.to_string()]);
    let mut queue = VecDeque::from([seed.clone()]);
    while let Some(s) = queue.pop_front() {
        for m in gens {
            let t = apply_move(&s, m).unwrap();
            if seen.insert(t.to_string()) {
                queue.push_back(t);
            }
        }
    }
    seen
}

pub fn braid_generators(w: usize) -> Vec<Move> {
    use hurwitz::moves::Direction;
    (1..w)
        .flat_map(|j| [Direction::Forward, Direction::Back].map(|dir| Move::Braid { j, dir }))
        .collect()
}
