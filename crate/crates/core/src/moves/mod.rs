//! Moves on Hurwitz systems.
//!
//! Elementary moves act by precomposition with a catalog automorphism: the
//! new image of a generator `x` is the old representation evaluated on the
//! word `e(x)`. Braids exchange adjacent branch points; pushes drag the last
//! branch point around a handle loop. Macro moves (`R`, `X`, `S`) retype,
//! cancel and insert an adjacent equal pair of transpositions.
//!
//! Text form: `B3` / `B3'` (braid at strand 3, forward / back), `Pa1`,
//! `Pb2'` (pushes), `R3:1-2` (retype the pair at 3 to `(1 2)`), `X3`
//! (cancel the pair at 3), `S3:1-2` (insert `(1 2),(1 2)` at 3).

pub mod canonical;
pub mod catalog;
pub mod normal_form;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::free_group::{EndoMap, Gen};
use crate::group::GroupHandle;
use crate::perm::Permutation;
use crate::system::HurwitzSystem;

pub use catalog::{Catalog, Side, CATALOG_HANDLES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Back,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Back,
            Direction::Back => Direction::Forward,
        }
    }

    fn mark(self) -> &'static str {
        match self {
            Direction::Forward => "",
            Direction::Back => "'",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Braid { j: usize, dir: Direction },
    Push { i: usize, side: Side, dir: Direction },
    Retype { j: usize, p: usize, q: usize },
    Cancel { j: usize },
    Insert { j: usize, p: usize, q: usize },
}

impl Move {
    pub fn is_elementary(&self) -> bool {
        matches!(self, Move::Braid { .. } | Move::Push { .. })
    }

    /// Inverse of an elementary move; macros have none in isolation.
    pub fn inverse(&self) -> Option<Move> {
        match *self {
            Move::Braid { j, dir } => Some(Move::Braid { j, dir: dir.flip() }),
            Move::Push { i, side, dir } => Some(Move::Push {
                i,
                side,
                dir: dir.flip(),
            }),
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Move::Braid { j, dir } => write!(f, "B{j}{}", dir.mark()),
            Move::Push { i, side, dir } => write!(f, "P{}{i}{}", side.letter(), dir.mark()),
            Move::Retype { j, p, q } => write!(f, "R{j}:{p}-{q}"),
            Move::Cancel { j } => write!(f, "X{j}"),
            Move::Insert { j, p, q } => write!(f, "S{j}:{p}-{q}"),
        }
    }
}

fn parse_index(s: &str, offset: usize, what: &str) -> Result<usize> {
    s.parse::<usize>()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::parse(offset, format!("bad {what} {s:?}")))
}

fn parse_pair(s: &str, offset: usize) -> Result<(usize, usize)> {
    let (p, q) = s
        .split_once('-')
        .ok_or_else(|| Error::parse(offset, format!("expected p-q, found {s:?}")))?;
    Ok((parse_index(p, offset, "point")?, parse_index(q, offset, "point")?))
}

impl Move {
    fn parse_at(tok: &str, offset: usize) -> Result<Move> {
        let (body, dir) = match tok.strip_suffix('\'') {
            Some(b) => (b, Direction::Back),
            None => (tok, Direction::Forward),
        };
        let bad = || Error::parse(offset, format!("unknown move token {tok:?}"));
        let mut chars = body.chars();
        let kind = chars.next().ok_or_else(bad)?;
        let rest = chars.as_str();
        let macro_dir_ok = dir == Direction::Forward;
        match kind {
            'B' => Ok(Move::Braid {
                j: parse_index(rest, offset + 1, "strand")?,
                dir,
            }),
            'P' => {
                let side = match rest.chars().next() {
                    Some('a') => Side::A,
                    Some('b') => Side::B,
                    _ => return Err(bad()),
                };
                Ok(Move::Push {
                    i: parse_index(&rest[1..], offset + 2, "handle")?,
                    side,
                    dir,
                })
            }
            'X' if macro_dir_ok => Ok(Move::Cancel {
                j: parse_index(rest, offset + 1, "position")?,
            }),
            'R' | 'S' if macro_dir_ok => {
                let (j, pq) = rest.split_once(':').ok_or_else(bad)?;
                let j = parse_index(j, offset + 1, "position")?;
                let (p, q) = parse_pair(pq, offset + 2 + j.to_string().len())?;
                Ok(if kind == 'R' {
                    Move::Retype { j, p, q }
                } else {
                    Move::Insert { j, p, q }
                })
            }
            _ => Err(bad()),
        }
    }
}

impl FromStr for Move {
    type Err = Error;

    fn from_str(s: &str) -> Result<Move> {
        Move::parse_at(s.trim(), 0)
    }
}

/// A sequence of moves, applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MoveWord {
    moves: Vec<Move>,
}

impl MoveWord {
    pub fn new() -> Self {
        MoveWord::default()
    }

    pub fn from_moves(moves: Vec<Move>) -> Self {
        MoveWord { moves }
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn push(&mut self, m: Move) {
        self.moves.push(m);
    }

    pub fn extend(&mut self, other: &MoveWord) {
        self.moves.extend_from_slice(&other.moves);
    }

    pub fn is_elementary(&self) -> bool {
        self.moves.iter().all(Move::is_elementary)
    }

    /// Reversed word of inverses, for elementary words.
    pub fn inverse(&self) -> Option<MoveWord> {
        self.moves
            .iter()
            .rev()
            .map(Move::inverse)
            .collect::<Option<Vec<_>>>()
            .map(MoveWord::from_moves)
    }

    pub fn apply(&self, sys: &HurwitzSystem) -> Result<HurwitzSystem> {
        let mut cur = sys.clone();
        for m in &self.moves {
            cur = apply_move(&cur, m)?;
        }
        Ok(cur)
    }
}

impl fmt::Display for MoveWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, m) in self.moves.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for MoveWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<MoveWord> {
        let moves = crate::free_group::tokens(s)
            .map(|(off, tok)| Move::parse_at(tok, off))
            .collect::<Result<Vec<_>>>()?;
        Ok(MoveWord { moves })
    }
}

/// Which elementary moves generate the orbit relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MoveSelector {
    Braid,
    Full,
}

impl fmt::Display for MoveSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MoveSelector::Braid => "braid",
            MoveSelector::Full => "full",
        })
    }
}

impl FromStr for MoveSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "braid" => Ok(MoveSelector::Braid),
            "full" => Ok(MoveSelector::Full),
            _ => Err(Error::parse(0, format!("unknown move set {s:?}"))),
        }
    }
}

/// One generator image as a product of old slot values.
#[derive(Clone, Debug)]
struct SlotProgram {
    target: usize,
    letters: Vec<(usize, bool)>,
}

fn compile(e: &EndoMap) -> Vec<SlotProgram> {
    let w = e.punctures();
    e.moved_generators()
        .into_iter()
        .map(|g| SlotProgram {
            target: g.slot(w),
            letters: e
                .image(g)
                .letters()
                .iter()
                .map(|l| (l.gen.slot(w), l.inverse))
                .collect(),
        })
        .collect()
}

fn run(programs: &[SlotProgram], d: usize, src: &[Permutation], dst: &mut [Permutation]) {
    for prog in programs {
        let mut acc = Permutation::identity(d);
        for &(slot, inv) in &prog.letters {
            acc = if inv {
                acc.then(&src[slot].inverse())
            } else {
                acc.then(&src[slot])
            };
        }
        dst[prog.target] = acc;
    }
}

/// Compiled elementary moves for one surface shape `(h, w)`.
#[derive(Debug)]
pub struct MoveTable {
    h: usize,
    w: usize,
    /// Indexed by `(i - 1) * 4 + side * 2 + dir`.
    pushes: Vec<Vec<SlotProgram>>,
}

impl MoveTable {
    pub fn new(cat: &Catalog, h: usize, w: usize) -> Result<MoveTable> {
        let mut pushes = Vec::new();
        if w >= 1 {
            for i in 1..=h.min(CATALOG_HANDLES) {
                for side in [Side::A, Side::B] {
                    let e = cat.instantiate(&catalog::push_name(i, side), h, w, 0)?;
                    let inv = e
                        .inverse()
                        .ok_or_else(|| Error::Catalog(format!("{} has no inverse", catalog::push_name(i, side))))?;
                    pushes.push(compile(&e));
                    pushes.push(compile(inv));
                }
            }
        }
        Ok(MoveTable { h, w, pushes })
    }

    /// The table for the shipped catalog, cached per shape.
    pub fn shared(h: usize, w: usize) -> Result<Arc<MoveTable>> {
        static TABLES: OnceLock<Mutex<HashMap<(usize, usize), Arc<MoveTable>>>> = OnceLock::new();
        let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = tables.lock().expect("move table cache poisoned");
        if let Some(t) = guard.get(&(h, w)) {
            return Ok(t.clone());
        }
        let t = Arc::new(MoveTable::new(Catalog::shipped(), h, w)?);
        guard.insert((h, w), t.clone());
        Ok(t)
    }

    /// Elementary moves of the selection, each followed by its inverse.
    pub fn generators(&self, sel: MoveSelector) -> Vec<Move> {
        let mut out = Vec::new();
        for j in 1..self.w {
            out.push(Move::Braid {
                j,
                dir: Direction::Forward,
            });
            out.push(Move::Braid {
                j,
                dir: Direction::Back,
            });
        }
        if sel == MoveSelector::Full && self.w >= 1 {
            for i in 1..=self.h.min(CATALOG_HANDLES) {
                for side in [Side::A, Side::B] {
                    for dir in [Direction::Forward, Direction::Back] {
                        out.push(Move::Push { i, side, dir });
                    }
                }
            }
        }
        out
    }

    /// Applies an elementary move to the slots of a degree-`d` system.
    pub fn apply_slots(&self, mv: &Move, d: usize, src: &[Permutation], dst: &mut Vec<Permutation>) -> Result<()> {
        dst.clear();
        dst.extend_from_slice(src);
        match *mv {
            Move::Braid { j, dir } => {
                if j == 0 || j >= self.w {
                    return Err(Error::usage(format!("braid strand {j} outside 1..{}", self.w)));
                }
                let (p, q) = (src[j - 1], src[j]);
                let (x, y) = match dir {
                    Direction::Forward => (q, p.conjugate_by(&q)),
                    Direction::Back => (q.conjugate_by(&p.inverse()), p),
                };
                dst[j - 1] = x;
                dst[j] = y;
                Ok(())
            }
            Move::Push { i, side, dir } => {
                if self.h == 0 {
                    return Err(Error::Unsupported("handle push on a genus-0 base".into()));
                }
                if self.w == 0 {
                    return Err(Error::Unsupported("handle push without a branch point".into()));
                }
                if i == 0 || i > self.h {
                    return Err(Error::usage(format!("handle {i} outside 1..={}", self.h)));
                }
                if i > CATALOG_HANDLES {
                    return Err(Error::Unsupported(format!(
                        "catalog covers handles up to {CATALOG_HANDLES}"
                    )));
                }
                let idx = (i - 1) * 4
                    + match side {
                        Side::A => 0,
                        Side::B => 2,
                    }
                    + match dir {
                        Direction::Forward => 0,
                        Direction::Back => 1,
                    };
                run(&self.pushes[idx], d, src, dst);
                Ok(())
            }
            _ => Err(Error::usage(format!("{mv} is not an elementary move"))),
        }
    }
}

pub fn braid(sys: &HurwitzSystem, j: usize, dir: Direction) -> Result<HurwitzSystem> {
    apply_move(sys, &Move::Braid { j, dir })
}

pub fn handle_push(sys: &HurwitzSystem, i: usize, side: Side, dir: Direction) -> Result<HurwitzSystem> {
    apply_move(sys, &Move::Push { i, side, dir })
}

pub fn apply_move(sys: &HurwitzSystem, mv: &Move) -> Result<HurwitzSystem> {
    let (d, h, w) = sys.params();
    match *mv {
        Move::Braid { .. } => apply_with(
            &MoveTable {
                h,
                w,
                pushes: Vec::new(),
            },
            sys,
            mv,
        ),
        Move::Push { .. } => apply_with(&*MoveTable::shared(h, w)?, sys, mv),
        Move::Retype { j, p, q } => pair_retype(sys, j, &Permutation::transposition(d, p, q)?),
        Move::Cancel { j } => pair_cancel(sys, j),
        Move::Insert { j, p, q } => pair_insert(sys, j, &Permutation::transposition(d, p, q)?),
    }
}

fn apply_with(table: &MoveTable, sys: &HurwitzSystem, mv: &Move) -> Result<HurwitzSystem> {
    let (d, h, w) = sys.params();
    let mut out = Vec::with_capacity(sys.slots().len());
    table.apply_slots(mv, d, sys.slots(), &mut out)?;
    Ok(HurwitzSystem::from_slots_unchecked(d, h, w, out))
}

fn check_pair(sys: &HurwitzSystem, j: usize) -> Result<()> {
    let w = sys.branch_count();
    if j == 0 || j + 1 > w {
        return Err(Error::usage(format!("pair position {j} outside 1..{w}")));
    }
    if sys.t(j) != sys.t(j + 1) {
        return Err(Error::precondition(format!(
            "t{j} = {:?} and t{} = {:?} are not an equal pair",
            sys.t(j),
            j + 1,
            sys.t(j + 1)
        )));
    }
    let residual: Vec<Permutation> = sys
        .slots()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k + 1 != j && k + 1 != j + 1)
        .map(|(_, p)| *p)
        .collect();
    if !GroupHandle::generated(sys.degree(), &residual).is_symmetric() {
        return Err(Error::precondition(format!(
            "monodromy without the pair at {j} is a proper subgroup"
        )));
    }
    Ok(())
}

/// Replaces the equal pair `(tj, tj+1)` by `(t, t)`.
pub fn pair_retype(sys: &HurwitzSystem, j: usize, new_t: &Permutation) -> Result<HurwitzSystem> {
    check_pair(sys, j)?;
    if !new_t.is_transposition() || new_t.degree() != sys.degree() {
        return Err(Error::usage(format!(
            "{new_t:?} is not a transposition of degree {}",
            sys.degree()
        )));
    }
    let mut slots = sys.slots().to_vec();
    slots[j - 1] = *new_t;
    slots[j] = *new_t;
    let (d, h, w) = sys.params();
    Ok(HurwitzSystem::from_slots_unchecked(d, h, w, slots))
}

/// Deletes the equal pair at `j`, lowering `w` by two.
pub fn pair_cancel(sys: &HurwitzSystem, j: usize) -> Result<HurwitzSystem> {
    check_pair(sys, j)?;
    let mut slots = sys.slots().to_vec();
    slots.drain(j - 1..j + 1);
    let (d, h, w) = sys.params();
    Ok(HurwitzSystem::from_slots_unchecked(d, h, w - 2, slots))
}

/// Inserts `(t, t)` before position `j`, raising `w` by two.
pub fn pair_insert(sys: &HurwitzSystem, j: usize, t: &Permutation) -> Result<HurwitzSystem> {
    let (d, h, w) = sys.params();
    if j == 0 || j > w + 1 {
        return Err(Error::usage(format!("insert position {j} outside 1..={}", w + 1)));
    }
    if !t.is_transposition() || t.degree() != d {
        return Err(Error::usage(format!("{t:?} is not a transposition of degree {d}")));
    }
    let mut slots = sys.slots().to_vec();
    slots.splice(j - 1..j - 1, [*t, *t]);
    Ok(HurwitzSystem::from_slots_unchecked(d, h, w + 2, slots))
}

/// The automorphism of an elementary move, as listed in the catalog.
pub fn move_automorphism(cat: &Catalog, mv: &Move, h: usize, w: usize) -> Result<EndoMap> {
    let (e, dir) = match *mv {
        Move::Braid { j, dir } => (cat.instantiate("B", h, w, j)?, dir),
        Move::Push { i, side, dir } => (cat.instantiate(&catalog::push_name(i, side), h, w, 0)?, dir),
        _ => return Err(Error::usage(format!("{mv} has no automorphism"))),
    };
    match dir {
        Direction::Forward => Ok(e),
        Direction::Back => {
            let inv = e
                .inverse()
                .cloned()
                .ok_or_else(|| Error::Catalog(format!("{mv}: missing inverse")))?;
            Ok(inv.with_inverse(e))
        }
    }
}

/// Evaluates a system on an automorphism by substituting generator images:
/// the independent, table-free path used for replay.
pub fn precompose(sys: &HurwitzSystem, e: &EndoMap) -> Result<HurwitzSystem> {
    let (d, h, w) = sys.params();
    if e.genus() != h || e.punctures() != w {
        return Err(Error::usage("automorphism shape does not match the system"));
    }
    let slots = (0..w + 2 * h)
        .map(|s| {
            e.image(Gen::from_slot(s, w)).evaluate(
                Permutation::identity(d),
                |g| sys.slots()[g.slot(w)],
                |p| p.inverse(),
                |a, b| a.then(b),
            )
        })
        .collect();
    HurwitzSystem::from_slots(d, h, w, slots)
}
