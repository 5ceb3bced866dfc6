//! Subgroups of `S_d` given by generators, backed by a Sims table.
//!
//! The table uses the fixed base `1, 2, .., d`: level `k` stores coset
//! representatives of the pointwise stabilizer of `1..k` inside the
//! stabilizer of `1..k-1`. The table is filled with Knuth's variant of the
//! Schreier-Sims algorithm, which is exact and fast enough for `d <= 16`.

use crate::perm::{orbit_partition, BlockPartition, Permutation, MAX_DEGREE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransitivityClass {
    Intransitive,
    Transitive,
    DoublyTransitive,
}

#[derive(Clone, Debug)]
pub struct GroupHandle {
    d: usize,
    gens: Vec<Permutation>,
    // reps[k][j] maps point k to point j and fixes 0..k-1.
    reps: Vec<[Option<Permutation>; MAX_DEGREE]>,
}

struct SimsBuilder {
    d: usize,
    reps: Vec<[Option<Permutation>; MAX_DEGREE]>,
    strong: Vec<Vec<Permutation>>,
}

impl SimsBuilder {
    fn new(d: usize) -> Self {
        let mut reps = vec![[None; MAX_DEGREE]; d];
        for (k, level) in reps.iter_mut().enumerate() {
            level[k] = Some(Permutation::identity(d));
        }
        SimsBuilder {
            d,
            reps,
            strong: vec![Vec::new(); d],
        }
    }

    fn contains_from(&self, k: usize, mut p: Permutation) -> bool {
        for level in k..self.d {
            let j = p.raw(level);
            match &self.reps[level][j] {
                Some(r) => p = p.then(&r.inverse()),
                None => return false,
            }
        }
        true
    }

    fn add(&mut self, k: usize, p: Permutation) {
        if k >= self.d || self.contains_from(k, p) {
            return;
        }
        self.strong[k].push(p);
        let snapshot: Vec<Permutation> = self.reps[k].iter().flatten().copied().collect();
        for r in snapshot {
            self.extend(k, r.then(&p));
        }
    }

    fn extend(&mut self, k: usize, p: Permutation) {
        let j = p.raw(k);
        match self.reps[k][j] {
            Some(r) => self.add(k + 1, p.then(&r.inverse())),
            None => {
                self.reps[k][j] = Some(p);
                let gens = self.strong[k].clone();
                for s in gens {
                    self.extend(k, p.then(&s));
                }
            }
        }
    }
}

impl GroupHandle {
    /// The subgroup generated by `gens`, all of degree `d`.
    pub fn generated(d: usize, gens: &[Permutation]) -> GroupHandle {
        assert!(gens.iter().all(|g| g.degree() == d), "degree mismatch");
        let mut b = SimsBuilder::new(d);
        for g in gens {
            if !g.is_identity() {
                b.add(0, *g);
            }
        }
        GroupHandle {
            d,
            gens: gens.to_vec(),
            reps: b.reps,
        }
    }

    pub fn symmetric(d: usize) -> GroupHandle {
        let gens: Vec<Permutation> = (1..d)
            .map(|i| Permutation::transposition(d, i, i + 1).expect("valid transposition"))
            .collect();
        GroupHandle::generated(d, &gens)
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.gens
    }

    fn level_size(&self, k: usize) -> usize {
        self.reps[k].iter().filter(|r| r.is_some()).count()
    }

    pub fn order(&self) -> u128 {
        (0..self.d).map(|k| self.level_size(k) as u128).product()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        if p.degree() != self.d {
            return false;
        }
        let mut p = *p;
        for k in 0..self.d {
            match &self.reps[k][p.raw(k)] {
                Some(r) => p = p.then(&r.inverse()),
                None => return false,
            }
        }
        true
    }

    pub fn orbits(&self) -> BlockPartition {
        orbit_partition(self.d, &self.gens)
    }

    pub fn is_transitive(&self) -> bool {
        self.d <= 1 || self.level_size(0) == self.d
    }

    pub fn transitivity_class(&self) -> TransitivityClass {
        if !self.is_transitive() {
            return TransitivityClass::Intransitive;
        }
        // Level 1 holds the orbit of point 2 under the stabilizer of point 1.
        if self.d >= 2 && self.level_size(1) == self.d - 1 {
            TransitivityClass::DoublyTransitive
        } else {
            TransitivityClass::Transitive
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.order() == (1..=self.d as u128).product::<u128>()
    }

    /// Equality as subgroups of `S_d` (not up to conjugacy).
    pub fn same_subgroup(&self, other: &GroupHandle) -> bool {
        self.d == other.d && self.order() == other.order() && other.gens.iter().all(|g| self.contains(g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn t(d: usize, p: usize, q: usize) -> Permutation {
        Permutation::transposition(d, p, q).unwrap()
    }

    /// Brute-force closure under right multiplication by generators.
    fn naive_closure(d: usize, gens: &[Permutation]) -> HashSet<Permutation> {
        let mut seen = HashSet::new();
        let mut stack = vec![Permutation::identity(d)];
        seen.insert(Permutation::identity(d));
        while let Some(x) = stack.pop() {
            for g in gens {
                let y = x.then(g);
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    #[test]
    fn small_groups_match_naive_closure() {
        let cases: Vec<(usize, Vec<Permutation>)> = vec![
            (2, vec![t(2, 1, 2)]),
            (3, vec![t(3, 1, 2), t(3, 2, 3)]),
            (4, vec![t(4, 1, 2), t(4, 3, 4)]),
            (
                4,
                vec![
                    Permutation::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap(),
                    Permutation::from_cycles(4, &[&[1, 3], &[2, 4]]).unwrap(),
                ],
            ),
            (
                5,
                vec![Permutation::from_cycles(5, &[&[1, 2, 3, 4, 5]]).unwrap(), t(5, 1, 2)],
            ),
            (
                6,
                vec![
                    Permutation::from_cycles(6, &[&[1, 2, 3]]).unwrap(),
                    Permutation::from_cycles(6, &[&[4, 5, 6]]).unwrap(),
                    Permutation::from_cycles(6, &[&[1, 4], &[2, 5], &[3, 6]]).unwrap(),
                ],
            ),
        ];
        for (d, gens) in cases {
            let g = GroupHandle::generated(d, &gens);
            let closure = naive_closure(d, &gens);
            assert_eq!(g.order(), closure.len() as u128, "order for {gens:?}");
            for p in itertools::Itertools::permutations(0..d as u8, d) {
                let p = Permutation::from_zero_based(&p).unwrap();
                assert_eq!(g.contains(&p), closure.contains(&p));
            }
        }
    }

    #[test]
    fn stated_examples() {
        let s2 = GroupHandle::generated(2, &[t(2, 1, 2)]);
        assert_eq!(s2.order(), 2);
        assert!(s2.is_symmetric());

        let s3 = GroupHandle::generated(3, &[t(3, 1, 2), t(3, 2, 3)]);
        assert_eq!(s3.order(), 6);
        assert!(s3.is_transitive());

        let v = GroupHandle::generated(4, &[t(4, 1, 2), t(4, 3, 4)]);
        assert_eq!(v.order(), 4);
        assert_eq!(v.orbits().blocks(), &[vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn transitivity_classes() {
        for d in 2..=7 {
            assert_eq!(
                GroupHandle::symmetric(d).transitivity_class(),
                TransitivityClass::DoublyTransitive
            );
        }
        let klein = GroupHandle::generated(
            4,
            &[
                Permutation::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap(),
                Permutation::from_cycles(4, &[&[1, 3], &[2, 4]]).unwrap(),
            ],
        );
        assert_eq!(klein.order(), 4);
        assert_eq!(klein.transitivity_class(), TransitivityClass::Transitive);
        let g = GroupHandle::generated(3, &[t(3, 1, 2)]);
        assert_eq!(g.transitivity_class(), TransitivityClass::Intransitive);
        // The point stabilizer in A_4 is cyclic of order 3 and permutes the
        // remaining three points transitively.
        let a4 = GroupHandle::generated(
            4,
            &[
                Permutation::from_cycles(4, &[&[1, 2, 3]]).unwrap(),
                Permutation::from_cycles(4, &[&[2, 3, 4]]).unwrap(),
            ],
        );
        assert_eq!(a4.order(), 12);
        assert_eq!(a4.transitivity_class(), TransitivityClass::DoublyTransitive);
    }

    #[test]
    fn degree_sixteen_symmetric_group() {
        let g = GroupHandle::generated(
            16,
            &[
                Permutation::from_cycles(16, &[&(1..=16).collect::<Vec<_>>()]).unwrap(),
                t(16, 1, 2),
            ],
        );
        assert_eq!(g.order(), (1..=16u128).product::<u128>());
        assert!(g.is_symmetric());
    }

    #[test]
    fn subgroup_equality_is_exact() {
        let a = GroupHandle::generated(3, &[t(3, 1, 2)]);
        let b = GroupHandle::generated(3, &[t(3, 2, 3)]);
        assert!(!a.same_subgroup(&b));
        let c = GroupHandle::generated(3, &[t(3, 1, 2), t(3, 1, 2)]);
        assert!(a.same_subgroup(&c));
    }
}
