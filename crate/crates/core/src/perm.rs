//! Permutations of `{1..d}` for `d <= 16`, stored inline.
//!
//! Products are read left to right: `p.then(&q)` applies `p` first and `q`
//! second. Every tuple product in the crate follows this convention, so a
//! Hurwitz relator reads in display order.
//!
//! Point labels exposed through the public API are 1-based. The packed image
//! array is 0-based and only surfaces through [`Permutation::as_slice`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported degree.
pub const MAX_DEGREE: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    d: u8,
    // Entries at index >= d are kept as the identity so derived Eq/Hash/Ord
    // only depend on the meaningful prefix.
    images: [u8; MAX_DEGREE],
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        assert!(d <= MAX_DEGREE, "degree {d} exceeds {MAX_DEGREE}");
        let mut images = [0u8; MAX_DEGREE];
        for (i, x) in images.iter_mut().enumerate() {
            *x = i as u8;
        }
        Permutation { d: d as u8, images }
    }

    /// Builds a permutation from 0-based images.
    pub fn from_zero_based(images: &[u8]) -> Result<Self> {
        let d = images.len();
        if d > MAX_DEGREE {
            return Err(Error::usage(format!("degree {d} exceeds {MAX_DEGREE}")));
        }
        let mut p = Permutation::identity(d);
        let mut seen = [false; MAX_DEGREE];
        for (i, &x) in images.iter().enumerate() {
            let x = x as usize;
            if x >= d || seen[x] {
                return Err(Error::usage(format!("images {images:?} are not a bijection")));
            }
            seen[x] = true;
            p.images[i] = x as u8;
        }
        Ok(p)
    }

    /// Builds a permutation from 1-based one-line images, e.g. `[2, 1, 3]`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let zero: Vec<u8> = images
            .iter()
            .map(|&x| {
                if x == 0 || x > MAX_DEGREE {
                    Err(Error::usage(format!("point {x} out of range")))
                } else {
                    Ok((x - 1) as u8)
                }
            })
            .collect::<Result<_>>()?;
        Permutation::from_zero_based(&zero)
    }

    /// Builds a permutation from disjoint cycles given with 1-based points.
    pub fn from_cycles(d: usize, cycles: &[&[usize]]) -> Result<Self> {
        if d > MAX_DEGREE {
            return Err(Error::usage(format!("degree {d} exceeds {MAX_DEGREE}")));
        }
        let mut p = Permutation::identity(d);
        let mut used = [false; MAX_DEGREE];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x == 0 || x > d || used[x - 1] {
                    return Err(Error::usage(format!("bad cycle point {x} in degree {d}")));
                }
                used[x - 1] = true;
                let next = cycle[(k + 1) % cycle.len()];
                if next == 0 || next > d {
                    return Err(Error::usage(format!("bad cycle point {next} in degree {d}")));
                }
                p.images[x - 1] = (next - 1) as u8;
            }
        }
        Ok(p)
    }

    /// The transposition swapping 1-based points `p` and `q`.
    pub fn transposition(d: usize, p: usize, q: usize) -> Result<Self> {
        if p == q {
            return Err(Error::usage(format!(
                "transposition needs distinct points, got ({p} {q})"
            )));
        }
        Permutation::from_cycles(d, &[&[p, q]])
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.d as usize
    }

    /// Image of a 1-based point.
    #[inline]
    pub fn image(&self, point: usize) -> usize {
        self.images[point - 1] as usize + 1
    }

    /// 0-based image table of length `d`.
    #[inline]
    pub fn as_slice(&self) -> &[u8] {
        &self.images[..self.d as usize]
    }

    #[inline]
    pub(crate) fn raw(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.as_slice().iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// Left-to-right product: apply `self`, then `other`.
    ///
    /// Degrees are assumed equal; [`compose`] is the checked variant.
    #[inline]
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.d, other.d);
        let mut out = *self;
        for i in 0..self.d as usize {
            out.images[i] = other.images[self.images[i] as usize];
        }
        out
    }

    #[inline]
    pub fn inverse(&self) -> Permutation {
        let mut out = *self;
        for i in 0..self.d as usize {
            out.images[self.images[i] as usize] = i as u8;
        }
        out
    }

    /// `s^-1 t s` in the left-to-right convention: relabels `self` by `s`.
    #[inline]
    pub fn conjugate_by(&self, s: &Permutation) -> Permutation {
        debug_assert_eq!(self.d, s.d);
        let mut out = *self;
        for i in 0..self.d as usize {
            out.images[s.images[i] as usize] = s.images[self.images[i] as usize];
        }
        out
    }

    /// Disjoint cycles with 1-based points, each starting at its smallest
    /// point, ordered by that point. Fixed points are included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = [false; MAX_DEGREE];
        let mut out = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.images[x] as usize;
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut parts: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { parts }
    }

    pub fn moved_points(&self) -> usize {
        self.as_slice()
            .iter()
            .enumerate()
            .filter(|(i, &x)| *i != x as usize)
            .count()
    }

    pub fn is_transposition(&self) -> bool {
        self.moved_points() == 2
    }

    /// The two 1-based points swapped by a transposition, smaller first.
    pub fn transposition_points(&self) -> Option<(usize, usize)> {
        if !self.is_transposition() {
            return None;
        }
        let mut it = (0..self.degree()).filter(|&i| self.images[i] as usize != i);
        let p = it.next()?;
        let q = it.next()?;
        Some((p + 1, q + 1))
    }

    /// `true` for even permutations.
    pub fn is_even(&self) -> bool {
        self.cycle_type().weight() % 2 == 0
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &x) in self.as_slice().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", x as usize + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "id[{}]", self.d);
        }
        for c in cycles {
            let s: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parses the comma-separated one-line form, e.g. `"2,1,3"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut images = Vec::new();
        let mut offset = 0;
        for tok in s.split(',') {
            let t = tok.trim();
            let lead = tok.len() - tok.trim_start().len();
            let v: usize = t
                .parse()
                .map_err(|_| Error::parse(offset + lead, format!("expected a point label, found {t:?}")))?;
            images.push(v);
            offset += tok.len() + 1;
        }
        Permutation::from_images(&images).map_err(|e| Error::parse(0, e.to_string()))
    }
}

/// Checked left-to-right product.
pub fn compose(p: &Permutation, q: &Permutation) -> Result<Permutation> {
    if p.degree() != q.degree() {
        return Err(Error::usage(format!(
            "degree mismatch: {} vs {}",
            p.degree(),
            q.degree()
        )));
    }
    Ok(p.then(q))
}

/// Checked `s^-1 t s`.
pub fn conjugate(t: &Permutation, s: &Permutation) -> Result<Permutation> {
    if t.degree() != s.degree() {
        return Err(Error::usage(format!(
            "degree mismatch: {} vs {}",
            t.degree(),
            s.degree()
        )));
    }
    Ok(t.conjugate_by(s))
}

/// Left-to-right product of a sequence; `None` for an empty sequence of
/// unknown degree is avoided by passing `d`.
pub fn product<'a>(d: usize, perms: impl IntoIterator<Item = &'a Permutation>) -> Permutation {
    perms.into_iter().fold(Permutation::identity(d), |acc, p| acc.then(p))
}

/// Weakly decreasing cycle lengths, fixed points included.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    pub parts: Vec<usize>,
}

impl CycleType {
    pub fn degree(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `sum (part - 1)`, i.e. degree minus the number of cycles.
    pub fn weight(&self) -> usize {
        self.degree() - self.parts.len()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// A partition of `{1..d}` into nonempty blocks; blocks are sorted and
/// ordered by their smallest point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockPartition {
    blocks: Vec<Vec<usize>>,
}

impl BlockPartition {
    pub fn new(d: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; d + 1];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::usage("empty block"));
            }
            for &x in b {
                if x == 0 || x > d || seen[x] {
                    return Err(Error::usage(format!("point {x} repeated or out of range")));
                }
                seen[x] = true;
            }
        }
        if seen[1..].iter().any(|s| !s) {
            return Err(Error::usage("blocks do not cover all points"));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(BlockPartition { blocks })
    }

    pub fn singletons(d: usize) -> Self {
        BlockPartition {
            blocks: (1..=d).map(|x| vec![x]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Index of the block containing a 1-based point.
    pub fn block_of(&self, point: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&point).is_ok())
            .expect("point outside partition")
    }

    /// `prod (#A_m)!`, the order of the Young subgroup of the partition.
    pub fn young_order(&self) -> u128 {
        self.blocks
            .iter()
            .map(|b| (1..=b.len() as u128).product::<u128>())
            .product()
    }
}

impl fmt::Display for BlockPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let s: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                format!("{{{}}}", s.join(","))
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Orbit partition of the points of `{1..d}` under a set of permutations.
pub(crate) fn orbit_partition(d: usize, gens: &[Permutation]) -> BlockPartition {
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut x = x;
        while parent[x] != r {
            let next = parent[x];
            parent[x] = r;
            x = next;
        }
        r
    }
    for g in gens {
        for i in 0..d {
            let a = find(&mut parent, i);
            let b = find(&mut parent, g.raw(i));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_block = vec![usize::MAX; d];
    for i in 0..d {
        let r = find(&mut parent, i);
        if root_block[r] == usize::MAX {
            root_block[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[root_block[r]].push(i + 1);
    }
    BlockPartition { blocks }
}

/// Orbit partition of a set of transpositions. The generated group is the
/// Young subgroup of the returned partition.
pub fn transposition_blocks(d: usize, ts: &[Permutation]) -> Result<BlockPartition> {
    for t in ts {
        if t.degree() != d {
            return Err(Error::usage(format!("degree mismatch: {} vs {d}", t.degree())));
        }
        if !t.is_transposition() {
            return Err(Error::usage(format!("{t:?} is not a transposition")));
        }
    }
    Ok(orbit_partition(d, ts))
}
