//! Orbits of the move action: seeded breadth-first exploration with a
//! predecessor log, exhaustive censuses by union-find, and path queries.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{enumerate_systems_with_guard, Filter, ENUMERATION_GUARD};
use crate::error::{Error, Result};
use crate::moves::canonical::Mode;
use crate::moves::{Catalog, Move, MoveSelector, MoveTable, MoveWord};
use crate::perm::Permutation;
use crate::search::{bidirectional, SearchOutcome};
use crate::system::HurwitzSystem;

/// Flat storage of packed states with a fixed stride.
fn unpack_slots(d: usize, bytes: &[u8], out: &mut Vec<Permutation>) {
    out.clear();
    out.extend(
        bytes
            .chunks_exact(d)
            .map(|c| Permutation::from_zero_based(c).expect("packed states hold permutations")),
    );
}

fn pack_slots(slots: &[Permutation], out: &mut Vec<u8>) {
    out.clear();
    for p in slots {
        out.extend_from_slice(p.as_slice());
    }
}

/// Result of a seeded exploration.
#[derive(Clone, Debug)]
pub struct OrbitExploration {
    /// Members in discovery order; the seed comes first.
    pub log: PredecessorLog,
    /// `false` when the state budget stopped the search early.
    pub exhaustive: bool,
}

impl OrbitExploration {
    pub fn len(&self) -> usize {
        self.log.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log.records.is_empty()
    }

    pub fn members(&self) -> Result<Vec<HurwitzSystem>> {
        (0..self.len()).map(|k| self.log.system(k)).collect()
    }
}

/// One discovered state and how it was reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogRecord {
    pub state: Vec<u8>,
    pub parent: Option<u32>,
    pub via: Option<Move>,
}

/// Breadth-first predecessor log.
///
/// Binary layout, little endian: magic `HPLG`, version `u16 = 1`, then
/// `d`, `h`, `w` as `u16`, the record count as `u64`, then per record the
/// packed state (`d * (w + 2h)` bytes of 0-based images), the parent index
/// as `u32` (`u32::MAX` for the seed), and the move token as a `u8` length
/// followed by its UTF-8 bytes (length 0 for the seed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredecessorLog {
    pub d: usize,
    pub h: usize,
    pub w: usize,
    pub records: Vec<LogRecord>,
}

const LOG_MAGIC: &[u8; 4] = b"HPLG";
const LOG_VERSION: u16 = 1;

impl PredecessorLog {
    pub fn system(&self, k: usize) -> Result<HurwitzSystem> {
        HurwitzSystem::unpack(self.d, self.h, self.w, &self.records[k].state)
    }

    /// Moves from the seed to record `k`.
    pub fn path_to(&self, mut k: usize) -> MoveWord {
        let mut moves = Vec::new();
        while let Some(p) = self.records[k].parent {
            moves.push(self.records[k].via.expect("non-seed records carry a move"));
            k = p as usize;
        }
        moves.reverse();
        MoveWord::from_moves(moves)
    }

    pub fn write_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        out.write_all(LOG_MAGIC)?;
        out.write_all(&LOG_VERSION.to_le_bytes())?;
        for x in [self.d, self.h, self.w] {
            out.write_all(&(x as u16).to_le_bytes())?;
        }
        out.write_all(&(self.records.len() as u64).to_le_bytes())?;
        for r in &self.records {
            out.write_all(&r.state)?;
            out.write_all(&r.parent.unwrap_or(u32::MAX).to_le_bytes())?;
            let token = r.via.map(|m| m.to_string()).unwrap_or_default();
            out.write_all(&[token.len() as u8])?;
            out.write_all(token.as_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(input: &mut impl Read) -> Result<PredecessorLog> {
        let io = |e: std::io::Error| Error::parse(0, format!("predecessor log: {e}"));
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic).map_err(io)?;
        if &magic != LOG_MAGIC {
            return Err(Error::parse(0, "not a predecessor log"));
        }
        let mut u16b = [0u8; 2];
        let mut read_u16 = |input: &mut dyn Read| -> Result<usize> {
            input.read_exact(&mut u16b).map_err(io)?;
            Ok(u16::from_le_bytes(u16b) as usize)
        };
        let version = read_u16(input)?;
        if version != LOG_VERSION as usize {
            return Err(Error::parse(4, format!("unsupported log version {version}")));
        }
        let (d, h, w) = (read_u16(input)?, read_u16(input)?, read_u16(input)?);
        let mut u64b = [0u8; 8];
        input.read_exact(&mut u64b).map_err(io)?;
        let count = u64::from_le_bytes(u64b) as usize;
        let stride = d * (w + 2 * h);
        let mut records = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            let mut state = vec![0u8; stride];
            input.read_exact(&mut state).map_err(io)?;
            let mut u32b = [0u8; 4];
            input.read_exact(&mut u32b).map_err(io)?;
            let parent = u32::from_le_bytes(u32b);
            let mut len = [0u8; 1];
            input.read_exact(&mut len).map_err(io)?;
            let mut token = vec![0u8; len[0] as usize];
            input.read_exact(&mut token).map_err(io)?;
            let via = if token.is_empty() {
                None
            } else {
                let s = String::from_utf8(token).map_err(|_| Error::parse(0, "move token is not UTF-8"))?;
                Some(s.parse::<Move>()?)
            };
            records.push(LogRecord {
                state,
                parent: (parent != u32::MAX).then_some(parent),
                via,
            });
        }
        Ok(PredecessorLog { d, h, w, records })
    }

    /// Checks that every record is its parent with the logged move applied.
    pub fn verify(&self) -> Result<()> {
        for (k, r) in self.records.iter().enumerate() {
            match (r.parent, r.via) {
                (None, None) if k == 0 => {}
                (Some(p), Some(m)) if (p as usize) < k => {
                    let next = crate::moves::apply_move(&self.system(p as usize)?, &m)?;
                    if next.pack() != r.state {
                        return Err(Error::Replay(format!("record {k}: {m} from record {p} does not match")));
                    }
                }
                _ => return Err(Error::Replay(format!("record {k} has a malformed predecessor"))),
            }
        }
        Ok(())
    }
}

/// All systems reachable from `seed`, explored level by level. Each level
/// is sorted and expanded in parallel; insertion is sequential, so the log
/// does not depend on scheduling.
pub fn orbit_bfs(seed: &HurwitzSystem, moves: MoveSelector, limit: usize) -> Result<OrbitExploration> {
    if let Some(v) = seed.validate().violation {
        return Err(Error::usage(format!("invalid seed: {v}")));
    }
    let (d, h, w) = seed.params();
    let table = MoveTable::shared(h, w)?;
    let gens = table.generators(moves);
    let mut index: std::collections::HashMap<Vec<u8>, u32> = std::collections::HashMap::new();
    let mut records = vec![LogRecord {
        state: seed.pack(),
        parent: None,
        via: None,
    }];
    index.insert(seed.pack(), 0);
    let mut frontier: Vec<u32> = vec![0];
    let mut exhaustive = true;
    while !frontier.is_empty() {
        frontier.sort_by(|&a, &b| records[a as usize].state.cmp(&records[b as usize].state));
        let expansions: Vec<Vec<(Move, Vec<u8>)>> = frontier
            .par_iter()
            .map(|&k| {
                let mut src = Vec::new();
                let mut dst = Vec::new();
                let mut packed = Vec::new();
                unpack_slots(d, &records[k as usize].state, &mut src);
                gens.iter()
                    .map(|m| {
                        table.apply_slots(m, d, &src, &mut dst).expect("generator applies");
                        pack_slots(&dst, &mut packed);
                        (*m, packed.clone())
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        'levels: for (&k, nbrs) in frontier.iter().zip(expansions) {
            for (m, state) in nbrs {
                if index.contains_key(&state) {
                    continue;
                }
                if records.len() >= limit {
                    exhaustive = false;
                    break 'levels;
                }
                let id = records.len() as u32;
                index.insert(state.clone(), id);
                records.push(LogRecord {
                    state,
                    parent: Some(k),
                    via: Some(m),
                });
                next.push(id);
            }
        }
        if !exhaustive {
            break;
        }
        frontier = next;
    }
    Ok(OrbitExploration {
        log: PredecessorLog { d, h, w, records },
        exhaustive,
    })
}

/// Outcome of a path query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Connection {
    Connected(MoveWord),
    Disconnected,
    Inconclusive,
}

/// Bidirectional search for an elementary move word from `source` to
/// `target`.
pub fn connect(
    source: &HurwitzSystem,
    target: &HurwitzSystem,
    moves: MoveSelector,
    budget: usize,
) -> Result<Connection> {
    if source.params() != target.params() {
        return Err(Error::usage(format!(
            "parameters differ: {:?} vs {:?}",
            source.params(),
            target.params()
        )));
    }
    for s in [source, target] {
        if let Some(v) = s.validate().violation {
            return Err(Error::usage(format!("invalid system {s}: {v}")));
        }
    }
    let (d, h, w) = source.params();
    let table = MoveTable::shared(h, w)?;
    let gens = table.generators(moves);
    let mut src_slots = Vec::new();
    let mut dst_slots = Vec::new();
    let expand = |state: &Vec<u8>, out: &mut Vec<(Move, Vec<u8>)>| {
        unpack_slots(d, state, &mut src_slots);
        for m in &gens {
            table
                .apply_slots(m, d, &src_slots, &mut dst_slots)
                .expect("generator applies");
            let mut packed = Vec::with_capacity(state.len());
            pack_slots(&dst_slots, &mut packed);
            out.push((*m, packed));
        }
    };
    let outcome = bidirectional(
        source.pack(),
        target.pack(),
        expand,
        |m| m.inverse().expect("elementary moves invert"),
        budget,
    );
    Ok(match outcome {
        SearchOutcome::Found(path) => Connection::Connected(MoveWord::from_moves(path)),
        SearchOutcome::Exhausted => Connection::Disconnected,
        SearchOutcome::Budget => Connection::Inconclusive,
    })
}

/// Run parameters recorded with every census line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusParams {
    pub d: usize,
    pub h: usize,
    pub w: usize,
    pub moves: String,
    pub filter: String,
    pub mode: String,
}

/// One orbit of a census, serialized as one JSON line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub rep: String,
    pub size: usize,
    pub full_monodromy: bool,
    pub genus: i64,
    /// Branching blocks of the representative over all branch points.
    pub blocks: String,
    /// Least member keys, at most three.
    pub samples: Vec<String>,
    pub moves: String,
    pub params: CensusParams,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitCensus {
    pub params: CensusParams,
    pub catalog_hash: String,
    pub total: usize,
    pub orbits: Vec<OrbitRecord>,
}

impl OrbitCensus {
    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for o in &self.orbits {
            out.push_str(&serde_json::to_string(o).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut r = x;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut x = x;
        while self.parent[x as usize] != r {
            let next = self.parent[x as usize];
            self.parent[x as usize] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb) as usize] = ra.min(rb);
        }
    }
}

/// Partition of all filtered systems into orbits.
///
/// States are enumerated, packed and sorted; move edges are computed in
/// parallel and merged by union-find. Everything downstream of the sort is
/// independent of the number of worker threads.
pub fn census(d: usize, h: usize, w: usize, moves: MoveSelector, filter: &Filter, mode: Mode) -> Result<OrbitCensus> {
    census_with_guard(d, h, w, moves, filter, mode, ENUMERATION_GUARD)
}

pub fn census_with_guard(
    d: usize,
    h: usize,
    w: usize,
    moves: MoveSelector,
    filter: &Filter,
    mode: Mode,
    guard: f64,
) -> Result<OrbitCensus> {
    let stride = d * (w + 2 * h);
    let mut flat: Vec<u8> = Vec::new();
    let mut n = 0;
    for sys in enumerate_systems_with_guard(d, h, w, filter.clone(), guard)? {
        flat.extend_from_slice(&sys.pack());
        n += 1;
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    let state = |flat: &[u8], k: u32| -> Vec<u8> { flat[k as usize * stride..(k as usize + 1) * stride].to_vec() };
    order.par_sort_by(|&a, &b| state(&flat, a).cmp(&state(&flat, b)));
    let mut sorted: Vec<u8> = Vec::with_capacity(flat.len());
    for &k in &order {
        sorted.extend_from_slice(&flat[k as usize * stride..(k as usize + 1) * stride]);
    }
    drop(flat);
    let get = |k: usize| &sorted[k * stride..(k + 1) * stride];
    let find_state = |s: &[u8]| -> Option<usize> {
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match get(mid).cmp(s) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    };

    let table = MoveTable::shared(h, w)?;
    let gens = table.generators(moves);
    let mut uf = UnionFind::new(n);
    const CHUNK: usize = 1 << 16;
    for chunk_start in (0..n).step_by(CHUNK) {
        let chunk_end = (chunk_start + CHUNK).min(n);
        let edges: Vec<Result<Vec<(u32, u32)>>> = (chunk_start..chunk_end)
            .into_par_iter()
            .map(|k| {
                let mut src = Vec::new();
                let mut dst = Vec::new();
                let mut packed = Vec::new();
                unpack_slots(d, get(k), &mut src);
                let mut out = Vec::with_capacity(gens.len());
                for m in &gens {
                    table.apply_slots(m, d, &src, &mut dst)?;
                    pack_slots(&dst, &mut packed);
                    let j = find_state(&packed)
                        .ok_or_else(|| Error::precondition(format!("filter {filter} is not invariant under {m}")))?;
                    if j != k {
                        out.push((k as u32, j as u32));
                    }
                }
                Ok(out)
            })
            .collect();
        for e in edges {
            for (a, b) in e? {
                uf.union(a, b);
            }
        }
    }

    // Group members by root; roots are the smallest packed index of each
    // orbit, so the grouping order is deterministic.
    let mut members: std::collections::BTreeMap<u32, Vec<u32>> = std::collections::BTreeMap::new();
    for k in 0..n as u32 {
        let r = uf.find(k);
        members.entry(r).or_default().push(k);
    }
    let hash = Catalog::shipped().hash();
    let params = CensusParams {
        d,
        h,
        w,
        moves: moves.to_string(),
        filter: filter.to_string(),
        mode: mode.to_string(),
    };
    let groups: Vec<Vec<u32>> = members.into_values().collect();
    let mut orbits: Vec<OrbitRecord> = groups
        .par_iter()
        .map(|group| -> Result<OrbitRecord> {
            let mut keys: Vec<String> = group
                .iter()
                .map(|&k| HurwitzSystem::unpack(d, h, w, get(k as usize)).map(|s| s.to_string()))
                .collect::<Result<_>>()?;
            keys.sort_unstable();
            let rep_sys: HurwitzSystem = keys[0].parse()?;
            Ok(OrbitRecord {
                rep: keys[0].clone(),
                size: group.len(),
                full_monodromy: rep_sys.is_full_monodromy(),
                genus: rep_sys.genus(),
                blocks: rep_sys.branching_blocks(1..=w)?.to_string(),
                samples: keys.iter().take(3).cloned().collect(),
                moves: hash.clone(),
                params: params.clone(),
            })
        })
        .collect::<Result<_>>()?;
    orbits.sort_by(|a, b| a.rep.cmp(&b.rep));
    Ok(OrbitCensus {
        params,
        catalog_hash: hash,
        total: n,
        orbits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    fn t(d: usize, p: usize, q: usize) -> Permutation {
        Permutation::transposition(d, p, q).unwrap()
    }

    fn d2_seed() -> HurwitzSystem {
        let id = Permutation::identity(2);
        HurwitzSystem::new(2, vec![t(2, 1, 2); 4], vec![(id, id)]).unwrap()
    }

    #[test]
    fn bfs_examples() {
        let braid_only = orbit_bfs(&d2_seed(), MoveSelector::Braid, 1000).unwrap();
        assert_eq!(braid_only.len(), 1);
        assert!(braid_only.exhaustive);
        let full = orbit_bfs(&d2_seed(), MoveSelector::Full, 1000).unwrap();
        assert_eq!(full.len(), 4);
        let s3 = HurwitzSystem::new(3, vec![t(3, 1, 2), t(3, 2, 3), t(3, 2, 3), t(3, 1, 2)], vec![]).unwrap();
        let orbit = orbit_bfs(&s3, MoveSelector::Braid, 1000).unwrap();
        assert_eq!(orbit.len(), 24);
        for k in 0..orbit.len() {
            assert_eq!(orbit.log.path_to(k).apply(&s3).unwrap(), orbit.log.system(k).unwrap());
        }
        let partial = orbit_bfs(&s3, MoveSelector::Braid, 5).unwrap();
        assert!(!partial.exhaustive);
        assert_eq!(partial.len(), 5);
    }

    #[test]
    fn log_round_trip() {
        let orbit = orbit_bfs(&d2_seed(), MoveSelector::Full, 1000).unwrap();
        let mut bytes = Vec::new();
        orbit.log.write_to(&mut bytes).unwrap();
        assert_eq!(&bytes[..4], b"HPLG");
        let back = PredecessorLog::read_from(&mut bytes.as_slice()).unwrap();
        assert_eq!(back, orbit.log);
        back.verify().unwrap();
        let mut tampered = back.clone();
        tampered.records[1].state = tampered.records[2].state.clone();
        assert!(tampered.verify().is_err());
    }

    #[test]
    fn census_examples() {
        let c = census(2, 1, 4, MoveSelector::Full, &Filter::FullMonodromy, Mode::Fast).unwrap();
        assert_eq!(c.orbit_count(), 1);
        assert_eq!(c.orbits[0].size, 4);
        let b = census(2, 1, 4, MoveSelector::Braid, &Filter::All, Mode::Fast).unwrap();
        assert_eq!(b.orbit_count(), 4);
        let c3 = census(3, 0, 4, MoveSelector::Braid, &Filter::FullMonodromy, Mode::Fast).unwrap();
        assert_eq!((c3.orbit_count(), c3.orbits[0].size), (1, 24));
        let intr = census(3, 0, 4, MoveSelector::Braid, &Filter::Intransitive, Mode::Fast).unwrap();
        assert_eq!(intr.orbit_count(), 3);
        assert!(intr.orbits.iter().all(|o| o.size == 1));
        assert_eq!(intr.total, 3);
        let trivial = census(1, 0, 0, MoveSelector::Full, &Filter::All, Mode::Fast).unwrap();
        assert_eq!((trivial.total, trivial.orbit_count()), (1, 1));
    }

    #[test]
    fn connect_examples() {
        let s = d2_seed();
        assert_eq!(
            connect(&s, &s, MoveSelector::Full, 100).unwrap(),
            Connection::Connected(MoveWord::new())
        );
        let x = t(2, 1, 2);
        let other = HurwitzSystem::new(2, vec![x; 4], vec![(x, x)]).unwrap();
        match connect(&s, &other, MoveSelector::Full, 1000).unwrap() {
            Connection::Connected(w) => {
                assert!(!w.is_empty());
                assert_eq!(w.apply(&s).unwrap(), other);
            }
            c => panic!("{c:?}"),
        }
        assert_eq!(
            connect(&s, &other, MoveSelector::Braid, 1000).unwrap(),
            Connection::Disconnected
        );
        let s3 = HurwitzSystem::new(3, vec![t(3, 1, 2); 4], vec![]).unwrap();
        assert!(matches!(connect(&s, &s3, MoveSelector::Full, 10), Err(Error::Usage(_))));
    }
}
