//! Rearranging the transpositions of a window: sorting into standard
//! position, the split normal form of a block, and exact braid searches
//! between tuples of one braid orbit.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use crate::enumerate::all_transpositions;
use crate::error::{Error, Result};
use crate::perm::{product, transposition_blocks, Permutation};
use crate::search::{bidirectional, SearchOutcome};
use crate::system::HurwitzSystem;

use super::{braid, Direction, Move, MoveWord};

/// Default state budget of one braid search.
pub const REALIZE_BUDGET: usize = 8_000_000;

/// Stable sort of the window's transpositions by branching block, using
/// braids of adjacent disjoint pairs only. Blocks are ordered by their
/// smallest point.
pub fn sort_standard_position(sys: &HurwitzSystem, range: RangeInclusive<usize>) -> Result<(HurwitzSystem, MoveWord)> {
    let blocks = sys.branching_blocks(range.clone())?;
    let mut word = MoveWord::new();
    if range.is_empty() {
        return Ok((sys.clone(), word));
    }
    let (s, e) = (*range.start(), *range.end());
    let block_of = |p: &Permutation| {
        let (x, _) = p.transposition_points().expect("window holds transpositions");
        blocks.block_of(x)
    };
    let mut cur = sys.clone();
    for k in s + 1..=e {
        let mut j = k;
        while j > s && block_of(cur.t(j - 1)) > block_of(cur.t(j)) {
            let mv = Move::Braid {
                j: j - 1,
                dir: Direction::Forward,
            };
            cur = braid(&cur, j - 1, Direction::Forward)?;
            word.push(mv);
            j -= 1;
        }
    }
    Ok((cur, word))
}

/// Cycles of `g` on `block`, longest first, ties by smallest point, each
/// starting at its smallest point.
fn block_cycles(block: &[usize], g: &Permutation) -> Vec<Vec<usize>> {
    let mut cycles: Vec<Vec<usize>> = g
        .cycles()
        .into_iter()
        .filter(|c| block.binary_search(&c[0]).is_ok())
        .collect();
    cycles.sort_by(|a, b| b.len().cmp(&a.len()));
    cycles
}

/// `#A + s - 2` where `s` counts the cycles of `g` on `A`, fixed points
/// included.
pub fn split_length(block: &[usize], g: &Permutation) -> usize {
    block.len() + block_cycles(block, g).len() - 2
}

/// The split normal form of a block: chains realizing each cycle of `g`,
/// doubled connectors joining consecutive cycles, then `tau` repeated.
/// The result has length `w_m`, product `g`, generates `S_A`, and ends in
/// `tau, tau`.
pub fn prop_split_normal_form(
    block: &[usize],
    g: &Permutation,
    w_m: usize,
    tau: &Permutation,
) -> Result<Vec<Permutation>> {
    let d = g.degree();
    let mut block = block.to_vec();
    block.sort_unstable();
    block.dedup();
    if block.len() < 2 {
        return Err(Error::precondition("block needs at least two points"));
    }
    if block.iter().any(|&x| x == 0 || x > d) {
        return Err(Error::usage(format!("block {block:?} outside 1..={d}")));
    }
    if (1..=d).any(|x| block.binary_search(&x).is_err() && g.image(x) != x) {
        return Err(Error::precondition(format!("{g:?} moves points outside {block:?}")));
    }
    match tau.transposition_points() {
        Some((p, q)) if tau.degree() == d && block.binary_search(&p).is_ok() && block.binary_search(&q).is_ok() => {}
        _ => {
            return Err(Error::precondition(format!(
                "{tau:?} is not a transposition of the block"
            )))
        }
    }
    if w_m < 2 * block.len() {
        return Err(Error::precondition(format!(
            "w_m = {w_m} is below twice the block size {}",
            block.len()
        )));
    }
    if g.is_even() != (w_m % 2 == 0) {
        return Err(Error::precondition(format!("sign of {g:?} does not match w_m = {w_m}")));
    }
    let cycles = block_cycles(&block, g);
    let l = block.len() + cycles.len() - 2;
    let t = |p: usize, q: usize| Permutation::transposition(d, p, q).expect("distinct block points");
    let mut out = Vec::with_capacity(w_m);
    for c in &cycles {
        for k in (0..c.len().saturating_sub(1)).rev() {
            out.push(t(c[k], c[k + 1]));
        }
    }
    for pair in cycles.windows(2) {
        let link = t(pair[0][0], pair[1][0]);
        out.push(link);
        out.push(link);
    }
    debug_assert_eq!(out.len(), l);
    let pad = w_m - l;
    if pad < 2 || pad % 2 != 0 {
        return Err(Error::precondition(format!(
            "padding length {pad} is not even and at least 2"
        )));
    }
    out.extend(std::iter::repeat(*tau).take(pad));
    Ok(out)
}

/// Transpositions of `S_d` indexed densely, with a conjugation table.
struct TranspositionIndex {
    index: HashMap<Permutation, u8>,
    /// `conj[a][b]` is the index of `b a b`.
    conj: Vec<Vec<u8>>,
}

impl TranspositionIndex {
    fn new(d: usize) -> Self {
        let list = all_transpositions(d);
        let index: HashMap<Permutation, u8> = list.iter().enumerate().map(|(k, p)| (*p, k as u8)).collect();
        let conj = list
            .iter()
            .map(|a| list.iter().map(|b| index[&a.conjugate_by(b)]).collect())
            .collect();
        TranspositionIndex { index, conj }
    }
}

/// A braid word supported in `range` turning the window's transpositions
/// into `target`, found by exact bidirectional search.
pub fn realize_block_rewrite(
    sys: &HurwitzSystem,
    range: RangeInclusive<usize>,
    target: &[Permutation],
    budget: usize,
) -> Result<MoveWord> {
    let d = sys.degree();
    let window = sys.window(&range)?;
    if window.len() != target.len() {
        return Err(Error::usage(format!(
            "target has {} entries, window has {}",
            target.len(),
            window.len()
        )));
    }
    if window == target {
        return Ok(MoveWord::new());
    }
    if window.len() > 16 {
        return Err(Error::Unsupported("braid search over windows longer than 16".into()));
    }
    let src_blocks = transposition_blocks(d, window)?;
    let dst_blocks = transposition_blocks(d, target)
        .map_err(|e| Error::precondition(format!("target is not a transposition tuple: {e}")))?;
    let big: Vec<&Vec<usize>> = src_blocks.blocks().iter().filter(|b| b.len() > 1).collect();
    if big.len() != 1 || src_blocks != dst_blocks {
        return Err(Error::precondition(format!(
            "window blocks {src_blocks} and target blocks {dst_blocks} are not one common block"
        )));
    }
    if product(d, window) != product(d, target) {
        return Err(Error::precondition("window and target have different products"));
    }
    let ti = TranspositionIndex::new(d);
    let n = window.len();
    let encode = |ts: &[Permutation]| -> u128 {
        ts.iter()
            .enumerate()
            .fold(0u128, |acc, (k, p)| acc | (ti.index[p] as u128) << (8 * k))
    };
    let get = |s: u128, k: usize| ((s >> (8 * k)) & 0xff) as u8;
    let set = |s: u128, k: usize, v: u8| (s & !(0xffu128 << (8 * k))) | (v as u128) << (8 * k);
    let expand = |s: &u128, out: &mut Vec<(u8, u128)>| {
        for k in 0..n - 1 {
            let (x, y) = (get(*s, k), get(*s, k + 1));
            if x == y {
                continue;
            }
            let fwd = set(set(*s, k, y), k + 1, ti.conj[x as usize][y as usize]);
            out.push(((k as u8) << 1, fwd));
            let back = set(set(*s, k, ti.conj[y as usize][x as usize]), k + 1, x);
            out.push(((k as u8) << 1 | 1, back));
        }
    };
    let start = *range.start();
    match bidirectional(encode(window), encode(target), expand, |m| m ^ 1, budget) {
        SearchOutcome::Found(path) => Ok(MoveWord::from_moves(
            path.into_iter()
                .map(|m| Move::Braid {
                    j: start + (m >> 1) as usize,
                    dir: if m & 1 == 0 {
                        Direction::Forward
                    } else {
                        Direction::Back
                    },
                })
                .collect(),
        )),
        SearchOutcome::Exhausted => Err(Error::OrbitMismatch(format!(
            "braid orbit of {:?} does not contain {:?}",
            window, target
        ))),
        SearchOutcome::Budget => Err(Error::Budget(format!("braid search exceeded {budget} states"))),
    }
}
