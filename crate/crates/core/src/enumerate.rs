//! Exhaustive and random generation of Hurwitz systems.
//!
//! Transposition tuples are walked in lexicographic order of their
//! transposition indices. For each tuple the handle images are drawn from a
//! table mapping every commutator value `c` to the pairs `(a, b)` with
//! `[a,b] = c`, so that only solutions of the relator are ever produced.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{GroupHandle, TransitivityClass};
use crate::perm::{product, BlockPartition, Permutation};
use crate::system::{commutator, HurwitzSystem};

/// Default ceiling on the estimated enumeration work.
pub const ENUMERATION_GUARD: f64 = 1e9;

/// Largest degree for which handle tables (of size `(d!)^2`) are built.
pub const MAX_HANDLE_DEGREE: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Filter {
    All,
    FullMonodromy,
    Transitive,
    Intransitive,
    /// Monodromy equal to the Young subgroup of the partition.
    Young(BlockPartition),
}

impl Filter {
    pub fn matches(&self, sys: &HurwitzSystem) -> bool {
        match self {
            Filter::All => true,
            Filter::FullMonodromy => sys.is_full_monodromy(),
            Filter::Transitive => sys.connected_cover(),
            Filter::Intransitive => !sys.connected_cover(),
            Filter::Young(blocks) => {
                let g = sys.monodromy();
                g.orbits() == *blocks && g.order() == blocks.young_order()
            }
        }
    }

    pub fn matches_group(&self, g: &GroupHandle) -> bool {
        match self {
            Filter::All => true,
            Filter::FullMonodromy => g.is_symmetric(),
            Filter::Transitive => g.transitivity_class() != TransitivityClass::Intransitive,
            Filter::Intransitive => g.transitivity_class() == TransitivityClass::Intransitive,
            Filter::Young(blocks) => g.orbits() == *blocks && g.order() == blocks.young_order(),
        }
    }

    /// Checks the filter makes sense at degree `d`.
    pub fn check_degree(&self, d: usize) -> Result<()> {
        match self {
            Filter::Young(b) if b.blocks().iter().map(Vec::len).sum::<usize>() != d => {
                Err(Error::usage(format!("group filter {b} is not a partition of 1..{d}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filter::All => f.write_str("all"),
            Filter::FullMonodromy => f.write_str("full-monodromy"),
            Filter::Transitive => f.write_str("transitive"),
            Filter::Intransitive => f.write_str("intransitive"),
            Filter::Young(b) => {
                let parts: Vec<String> = b
                    .blocks()
                    .iter()
                    .map(|blk| format!("{{{}}}", blk.iter().join(",")))
                    .collect();
                write!(f, "group={}", parts.join(""))
            }
        }
    }
}

impl FromStr for Filter {
    type Err = Error;

    /// `all`, `full-monodromy`, `transitive`, `intransitive`, or
    /// `group=S2xS1` (consecutive blocks) / `group={1,3}{2}`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => return Ok(Filter::All),
            "full-monodromy" | "full" => return Ok(Filter::FullMonodromy),
            "transitive" => return Ok(Filter::Transitive),
            "intransitive" => return Ok(Filter::Intransitive),
            _ => {}
        }
        let text = s
            .strip_prefix("group=")
            .ok_or_else(|| Error::parse(0, format!("unknown filter {s:?}")))?;
        let base = "group=".len();
        let blocks = if text.starts_with('{') {
            parse_brace_blocks(text, base)?
        } else {
            let mut next = 1;
            let mut blocks = Vec::new();
            let mut off = base;
            for part in text.split(['x', 'X']) {
                let n: usize = part
                    .strip_prefix('S')
                    .and_then(|n| n.parse().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| Error::parse(off, format!("expected S<n>, found {part:?}")))?;
                blocks.push((next..next + n).collect());
                next += n;
                off += part.len() + 1;
            }
            blocks
        };
        let d = blocks.iter().map(Vec::len).sum();
        let partition = BlockPartition::new(d, blocks).map_err(|e| Error::parse(base, e.to_string()))?;
        Ok(Filter::Young(partition))
    }
}

fn parse_brace_blocks(text: &str, base: usize) -> Result<Vec<Vec<usize>>> {
    let mut blocks = Vec::new();
    let mut rest = text;
    let mut off = base;
    while !rest.is_empty() {
        let body_end = rest
            .find('}')
            .filter(|_| rest.starts_with('{'))
            .ok_or_else(|| Error::parse(off, "expected {..} block"))?;
        let body = &rest[1..body_end];
        let block = body
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::parse(off + 1, format!("bad block {body:?}")))?;
        blocks.push(block);
        off += body_end + 1;
        rest = &rest[body_end + 1..];
    }
    Ok(blocks)
}

/// All elements of `S_d` in lexicographic order of their image lists.
pub fn all_permutations(d: usize) -> Vec<Permutation> {
    (0..d as u8)
        .permutations(d)
        .map(|p| Permutation::from_zero_based(&p).expect("valid permutation"))
        .collect()
}

/// All transpositions of `S_d`, ordered `(1 2), (1 3), .., (d-1 d)`.
pub fn all_transpositions(d: usize) -> Vec<Permutation> {
    (1..=d)
        .tuple_combinations()
        .map(|(p, q)| Permutation::transposition(d, p, q).expect("valid transposition"))
        .collect()
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|x| x as f64).product()
}

/// Estimated work of an exhaustive enumeration: transposition tuples times
/// the handle pairs scanned per tuple.
pub fn enumeration_estimate(d: usize, h: usize, w: usize) -> f64 {
    let ts = (d * (d.saturating_sub(1)) / 2).max(1) as f64;
    let tuples = ts.powi(w as i32);
    let pairs = factorial(d).powi(2);
    match h {
        0 => tuples,
        _ => tuples * pairs.powi(h as i32 - 1) * factorial(d),
    }
}

/// Pairs `(a, b)` of `S_d` grouped by commutator value.
#[derive(Debug)]
pub struct CommutatorTable {
    pairs: Vec<(Permutation, Permutation)>,
    by_value: HashMap<Permutation, Vec<(Permutation, Permutation)>>,
}

impl CommutatorTable {
    pub fn new(d: usize) -> Self {
        let elems = all_permutations(d);
        let mut pairs = Vec::with_capacity(elems.len() * elems.len());
        let mut by_value: HashMap<Permutation, Vec<(Permutation, Permutation)>> = HashMap::new();
        for a in &elems {
            for b in &elems {
                pairs.push((*a, *b));
                by_value.entry(commutator(a, b)).or_default().push((*a, *b));
            }
        }
        CommutatorTable { pairs, by_value }
    }

    pub fn solutions(&self, c: &Permutation) -> &[(Permutation, Permutation)] {
        self.by_value.get(c).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All handle tuples with `[a1,b1] .. [ah,bh] = c`, in a fixed order.
    pub fn handle_solutions(&self, h: usize, c: &Permutation, out: &mut Vec<Vec<(Permutation, Permutation)>>) {
        let mut prefix = Vec::with_capacity(h);
        self.collect(h, *c, &mut prefix, out);
    }

    fn collect(
        &self,
        h: usize,
        c: Permutation,
        prefix: &mut Vec<(Permutation, Permutation)>,
        out: &mut Vec<Vec<(Permutation, Permutation)>>,
    ) {
        match h {
            0 => {
                if c.is_identity() {
                    out.push(prefix.clone());
                }
            }
            1 => {
                for &pair in self.solutions(&c) {
                    prefix.push(pair);
                    out.push(prefix.clone());
                    prefix.pop();
                }
            }
            _ => {
                for &(a, b) in &self.pairs {
                    let rest = commutator(&a, &b).inverse().then(&c);
                    prefix.push((a, b));
                    self.collect(h - 1, rest, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
}

/// Lazily enumerates every valid system of the given shape that passes the
/// filter, exactly once.
pub struct SystemStream {
    d: usize,
    h: usize,
    w: usize,
    filter: Filter,
    transpositions: Vec<Permutation>,
    odometer: Vec<usize>,
    end: u64,
    position: u64,
    table: Option<Arc<CommutatorTable>>,
    pending: Vec<Vec<(Permutation, Permutation)>>,
    current: Vec<Permutation>,
    done: bool,
}

impl SystemStream {
    fn new(d: usize, h: usize, w: usize, filter: Filter, range: std::ops::Range<u64>) -> Result<Self> {
        filter.check_degree(d)?;
        if d == 0 || d > crate::perm::MAX_DEGREE {
            return Err(Error::usage(format!(
                "degree {d} outside 1..={}",
                crate::perm::MAX_DEGREE
            )));
        }
        if h > 0 && d > MAX_HANDLE_DEGREE {
            return Err(Error::Unsupported(format!(
                "handle enumeration needs d <= {MAX_HANDLE_DEGREE}"
            )));
        }
        let transpositions = all_transpositions(d);
        let space = tuple_space(d, w);
        let end = range.end.min(space);
        let start = range.start.min(end);
        let table = (h > 0).then(|| shared_table(d));
        let done = w % 2 == 1 || (w > 0 && transpositions.is_empty()) || start >= end;
        let mut stream = SystemStream {
            d,
            h,
            w,
            filter,
            odometer: digits(start, transpositions.len().max(1), w),
            transpositions,
            end,
            position: start,
            table,
            pending: Vec::new(),
            current: Vec::new(),
            done,
        };
        if !stream.done {
            stream.load_current();
        }
        Ok(stream)
    }

    fn load_current(&mut self) {
        self.current = self.odometer.iter().map(|&i| self.transpositions[i]).collect();
        let required = product(self.d, &self.current).inverse();
        self.pending.clear();
        match &self.table {
            Some(table) => table.handle_solutions(self.h, &required, &mut self.pending),
            None => {
                if required.is_identity() {
                    self.pending.push(Vec::new());
                }
            }
        }
        self.pending.reverse();
    }

    fn advance(&mut self) -> bool {
        self.position += 1;
        if self.position >= self.end {
            return false;
        }
        let base = self.transpositions.len();
        for k in (0..self.w).rev() {
            self.odometer[k] += 1;
            if self.odometer[k] < base {
                return true;
            }
            self.odometer[k] = 0;
        }
        false
    }
}

fn digits(mut n: u64, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = (n % base as u64) as usize;
        n /= base as u64;
    }
    out
}

/// Number of transposition tuples of length `w` in `S_d`.
pub fn tuple_space(d: usize, w: usize) -> u64 {
    let n = (d * d.saturating_sub(1) / 2) as u64;
    if w == 0 {
        1
    } else {
        n.checked_pow(w as u32).unwrap_or(u64::MAX)
    }
}

fn shared_table(d: usize) -> Arc<CommutatorTable> {
    use std::sync::{Mutex, OnceLock};
    static TABLES: OnceLock<Mutex<HashMap<usize, Arc<CommutatorTable>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = tables.lock().expect("table cache poisoned");
    guard
        .entry(d)
        .or_insert_with(|| Arc::new(CommutatorTable::new(d)))
        .clone()
}

impl Iterator for SystemStream {
    type Item = HurwitzSystem;

    fn next(&mut self) -> Option<HurwitzSystem> {
        while !self.done {
            if let Some(handles) = self.pending.pop() {
                let mut slots = self.current.clone();
                for (a, b) in handles {
                    slots.push(a);
                    slots.push(b);
                }
                let sys = HurwitzSystem::from_slots_unchecked(self.d, self.h, self.w, slots);
                if self.filter.matches(&sys) {
                    return Some(sys);
                }
                continue;
            }
            if self.advance() {
                self.load_current();
            } else {
                self.done = true;
            }
        }
        None
    }
}

/// Every valid system with parameters `(d, h, w)` passing `filter`.
///
/// Refuses when the estimated work exceeds `guard`.
pub fn enumerate_systems_with_guard(d: usize, h: usize, w: usize, filter: Filter, guard: f64) -> Result<SystemStream> {
    let estimate = enumeration_estimate(d, h, w);
    if estimate > guard {
        return Err(Error::Budget(format!(
            "enumeration of d={d} h={h} w={w} estimated at {estimate:.3e} steps, above {guard:.0e}"
        )));
    }
    SystemStream::new(d, h, w, filter, 0..u64::MAX)
}

pub fn enumerate_systems(d: usize, h: usize, w: usize, filter: Filter) -> Result<SystemStream> {
    enumerate_systems_with_guard(d, h, w, filter, ENUMERATION_GUARD)
}

/// The systems whose transposition tuple has lexicographic index in `range`.
/// Disjoint ranges give disjoint streams whose union is the full enumeration.
pub fn enumerate_range(
    d: usize,
    h: usize,
    w: usize,
    filter: Filter,
    range: std::ops::Range<u64>,
) -> Result<SystemStream> {
    SystemStream::new(d, h, w, filter, range)
}

/// A uniformly random valid system, by rejection on the last transposition.
pub fn random_system<R: Rng + ?Sized>(d: usize, h: usize, w: usize, rng: &mut R) -> Result<HurwitzSystem> {
    if w % 2 == 1 {
        return Err(Error::usage(format!("no valid systems with odd w = {w}")));
    }
    if w > 0 && d < 2 {
        return Err(Error::usage("transpositions need d >= 2"));
    }
    if d == 0 || d > crate::perm::MAX_DEGREE {
        return Err(Error::usage(format!(
            "degree {d} outside 1..={}",
            crate::perm::MAX_DEGREE
        )));
    }
    let ts = all_transpositions(d);
    let mut points: Vec<u8> = (0..d as u8).collect();
    loop {
        let mut slots: Vec<Permutation> = (0..w.saturating_sub(1))
            .map(|_| *ts.choose(rng).expect("nonempty"))
            .collect();
        let mut handles = Vec::with_capacity(h);
        for _ in 0..h {
            points.shuffle(rng);
            let a = Permutation::from_zero_based(&points)?;
            points.shuffle(rng);
            let b = Permutation::from_zero_based(&points)?;
            handles.push((a, b));
        }
        let mut rest = Permutation::identity(d);
        for (a, b) in &handles {
            rest = rest.then(&commutator(a, b));
        }
        let head = product(d, &slots);
        let last = head.inverse().then(&rest.inverse());
        if w == 0 {
            if !last.is_identity() {
                continue;
            }
        } else if last.is_transposition() {
            slots.push(last);
        } else {
            continue;
        }
        return HurwitzSystem::new(d, slots, handles);
    }
}

/// A uniformly random system passing `filter`, by rejection.
pub fn random_filtered<R: Rng + ?Sized>(
    d: usize,
    h: usize,
    w: usize,
    filter: &Filter,
    rng: &mut R,
    max_tries: usize,
) -> Result<HurwitzSystem> {
    for _ in 0..max_tries {
        let sys = random_system(d, h, w, rng)?;
        if filter.matches(&sys) {
            return Ok(sys);
        }
    }
    Err(Error::Budget(format!(
        "no system passing {filter} in {max_tries} draws"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn stated_counts() {
        assert_eq!(enumerate_systems(2, 0, 4, Filter::All).unwrap().count(), 1);
        assert_eq!(enumerate_systems(3, 0, 4, Filter::All).unwrap().count(), 27);
        assert_eq!(enumerate_systems(3, 0, 4, Filter::FullMonodromy).unwrap().count(), 24);
        assert_eq!(enumerate_systems(2, 1, 4, Filter::All).unwrap().count(), 4);
        assert_eq!(enumerate_systems(2, 0, 2, Filter::All).unwrap().count(), 1);
        assert_eq!(enumerate_systems(2, 0, 3, Filter::All).unwrap().count(), 0);
        assert_eq!(enumerate_systems(1, 2, 0, Filter::All).unwrap().count(), 1);
    }

    #[test]
    fn ranges_partition_the_stream() {
        let full: Vec<_> = enumerate_systems(3, 1, 4, Filter::All).unwrap().collect();
        let space = tuple_space(3, 4);
        let mut parts = Vec::new();
        for k in 0..5 {
            let r = space * k / 5..space * (k + 1) / 5;
            parts.extend(enumerate_range(3, 1, 4, Filter::All, r).unwrap());
        }
        assert_eq!(parts, full);
    }

    #[test]
    fn guard_refuses_large_cases() {
        assert!(matches!(
            enumerate_systems_with_guard(4, 2, 8, Filter::All, 1e6),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn filters_parse_and_match() {
        let f: Filter = "group=S2xS1".parse().unwrap();
        assert_eq!(f.to_string(), "group={1,2}{3}");
        assert_eq!("group={1,2}{3}".parse::<Filter>().unwrap(), f);
        let young: Vec<_> = enumerate_systems(3, 0, 4, f).unwrap().collect();
        assert_eq!(young.len(), 1);
        assert_eq!(enumerate_systems(3, 0, 4, Filter::Intransitive).unwrap().count(), 3);
        assert!("group=T2".parse::<Filter>().is_err());
    }

    #[test]
    fn random_systems_are_valid_and_cover_small_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..400 {
            let s = random_system(2, 1, 4, &mut rng).unwrap();
            assert!(s.is_valid());
            seen.insert(s);
        }
        assert_eq!(seen.len(), 4);
        for _ in 0..50 {
            assert!(random_system(4, 2, 6, &mut rng).unwrap().is_valid());
        }
    }
}
