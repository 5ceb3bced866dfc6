//! Normalization of full-monodromy systems with `w >= 2d`: merge the
//! branching blocks, trivialize the handle images one handle at a time,
//! then bring the transpositions to a fixed canonical tuple by braids.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::enumerate::all_transpositions;
use crate::error::{Error, Result};
use crate::perm::{product, Permutation};
use crate::system::HurwitzSystem;

use super::normal_form::{prop_split_normal_form, realize_block_rewrite, sort_standard_position, REALIZE_BUDGET};
use super::{apply_move, handle_push, Direction, Move, MoveSelector, MoveWord, Side};

/// Whether macro moves may appear in returned certificates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    #[default]
    Fast,
    /// Every macro move is replaced by an elementary-move path found by
    /// search, so the certificate uses catalog automorphisms only.
    Validate,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Fast => "fast",
            Mode::Validate => "validate",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Mode::Fast),
            "validate" => Ok(Mode::Validate),
            _ => Err(Error::parse(0, format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct NormalizeOptions {
    pub mode: Mode,
    /// State budget of each individual search.
    pub budget: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            mode: Mode::Fast,
            budget: REALIZE_BUDGET,
        }
    }
}

/// Result of a normalization step: the reached system, a certificate from
/// the input, and the handle metric `|lambda| + |mu|` before each push and
/// at the end.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub system: HurwitzSystem,
    pub word: MoveWord,
    pub metric_trace: Vec<usize>,
}

/// `((1 2)^(2+s), (1 3)^2, .., (1 d)^2)` with `s = w - 2(d-1)` surplus.
pub fn canonical_tuple(d: usize, w: usize) -> Result<Vec<Permutation>> {
    if d < 2 || w < 2 * (d - 1) || w % 2 == 1 {
        return Err(Error::precondition(format!("no canonical tuple for d={d} w={w}")));
    }
    let mut out = vec![Permutation::transposition(d, 1, 2)?; w - 2 * (d - 2)];
    for k in 3..=d {
        let t = Permutation::transposition(d, 1, k)?;
        out.push(t);
        out.push(t);
    }
    Ok(out)
}

/// The canonical system: canonical tuple, all handle images trivial.
pub fn canonical_form(d: usize, h: usize, w: usize) -> Result<HurwitzSystem> {
    let id = Permutation::identity(d);
    HurwitzSystem::new(d, canonical_tuple(d, w)?, vec![(id, id); h])
}

fn handle_metric(sys: &HurwitzSystem, i: usize) -> usize {
    let (a, b) = sys.handle(i);
    a.cycle_type().weight() + b.cycle_type().weight()
}

fn check_hypotheses(sys: &HurwitzSystem) -> Result<()> {
    let (d, _, w) = sys.params();
    if let Some(v) = sys.validate().violation {
        return Err(Error::precondition(format!("invalid system: {v}")));
    }
    if w < 2 * d {
        return Err(Error::precondition(format!("w = {w} is below 2d = {}", 2 * d)));
    }
    if !sys.is_full_monodromy() {
        return Err(Error::precondition("monodromy is not the full symmetric group"));
    }
    Ok(())
}

struct Runner {
    sys: HurwitzSystem,
    word: MoveWord,
    trace: Vec<usize>,
    opts: NormalizeOptions,
}

impl Runner {
    fn new(sys: &HurwitzSystem, opts: NormalizeOptions) -> Self {
        Runner {
            sys: sys.clone(),
            word: MoveWord::new(),
            trace: Vec::new(),
            opts,
        }
    }

    fn apply(&mut self, word: &MoveWord) -> Result<()> {
        self.sys = word.apply(&self.sys)?;
        self.word.extend(word);
        Ok(())
    }

    fn step(&mut self, mv: Move) -> Result<()> {
        self.sys = apply_move(&self.sys, &mv)?;
        self.word.push(mv);
        Ok(())
    }

    fn realize(&mut self, range: RangeInclusive<usize>, target: &[Permutation]) -> Result<()> {
        let word = realize_block_rewrite(&self.sys, range, target, self.opts.budget)?;
        self.apply(&word)
    }

    /// Merges the branching blocks of the whole window into one.
    fn repair(&mut self) -> Result<()> {
        let (d, _, w) = self.sys.params();
        loop {
            let blocks = self.sys.branching_blocks(1..=w)?;
            if blocks.len() == 1 {
                return Ok(());
            }
            let (_, sort) = sort_standard_position(&self.sys, 1..=w)?;
            self.apply(&sort)?;
            // Blocks now occupy consecutive windows in block order.
            let mut start = 1;
            let mut chosen = None;
            for block in blocks.blocks() {
                let len = self.sys.transpositions()[start - 1..]
                    .iter()
                    .take_while(|t| block.contains(&t.transposition_points().expect("transposition").0))
                    .count();
                if block.len() >= 2 && len >= 2 * block.len() {
                    chosen = Some((block.clone(), start, len));
                    break;
                }
                start += len;
            }
            let (block, start, len) = chosen
                .ok_or_else(|| Error::precondition(format!("no block with enough branch points among {blocks}")))?;
            let end = start + len - 1;
            let g = product(d, &self.sys.transpositions()[start - 1..end]);
            let tau = Permutation::transposition(d, block[0], block[1])?;
            let target = prop_split_normal_form(&block, &g, len, &tau)?;
            self.realize(start..=end, &target)?;
            let outside = (1..=d).find(|x| !block.contains(x)).expect("more than one block");
            self.step(Move::Retype {
                j: end - 1,
                p: block[0],
                q: outside,
            })?;
        }
    }

    fn trivialize(&mut self, i: usize) -> Result<()> {
        let (d, _, w) = self.sys.params();
        let everything: Vec<usize> = (1..=d).collect();
        let candidates = all_transpositions(d);
        loop {
            let metric = handle_metric(&self.sys, i);
            self.trace.push(metric);
            if metric == 0 {
                return Ok(());
            }
            self.repair()?;
            let (a, _) = self.sys.handle(i);
            let side = if a.cycle_type().weight() > 0 { Side::B } else { Side::A };
            let g = product(d, self.sys.transpositions());
            let mut plan = None;
            'search: for tau in &candidates {
                let staged_ts = prop_split_normal_form(&everything, &g, w, tau)?;
                let mut slots = staged_ts.clone();
                slots.extend_from_slice(&self.sys.slots()[w..]);
                let staged = HurwitzSystem::from_slots(d, self.sys.base_genus(), w, slots)?;
                for dir in [Direction::Forward, Direction::Back] {
                    if handle_metric(&handle_push(&staged, i, side, dir)?, i) < metric {
                        plan = Some((staged_ts, dir));
                        break 'search;
                    }
                }
            }
            let (target, dir) = plan.ok_or_else(|| {
                Error::OrbitMismatch(format!(
                    "no staged push lowers the metric of handle {i} on {}",
                    self.sys
                ))
            })?;
            self.realize(1..=w, &target)?;
            self.step(Move::Push { i, side, dir })?;
            if handle_metric(&self.sys, i) >= metric {
                return Err(Error::OrbitMismatch(format!(
                    "push did not lower the metric on {}",
                    self.sys
                )));
            }
        }
    }

    fn finish(mut self, source: &HurwitzSystem) -> Result<Normalized> {
        if self.opts.mode == Mode::Validate {
            self.word = elementary_rewrite(source, &self.word, self.opts.budget)?;
        }
        Ok(Normalized {
            system: self.sys,
            word: self.word,
            metric_trace: self.trace,
        })
    }
}

/// Replaces every macro move by an elementary path between the same states.
pub fn elementary_rewrite(source: &HurwitzSystem, word: &MoveWord, budget: usize) -> Result<MoveWord> {
    let mut out = MoveWord::new();
    let mut cur = source.clone();
    for mv in word.moves() {
        let next = apply_move(&cur, mv)?;
        if mv.is_elementary() {
            out.push(*mv);
        } else {
            if next.params() != cur.params() {
                return Err(Error::Unsupported(format!("{mv} changes the branch count")));
            }
            match crate::orbit::connect(&cur, &next, MoveSelector::Full, budget)? {
                crate::orbit::Connection::Connected(path) => out.extend(&path),
                crate::orbit::Connection::Disconnected => {
                    return Err(Error::OrbitMismatch(format!(
                        "{mv} joins states in different elementary orbits: {cur} and {next}"
                    )))
                }
                crate::orbit::Connection::Inconclusive => {
                    return Err(Error::Budget(format!(
                        "elementary path for {mv} exceeded {budget} states"
                    )))
                }
            }
        }
        cur = next;
    }
    Ok(out)
}

/// Rearranges the branch points so the whole window has one branching
/// block. Only the whole window is supported.
pub fn repair_branching_monodromy(
    sys: &HurwitzSystem,
    range: RangeInclusive<usize>,
    opts: NormalizeOptions,
) -> Result<Normalized> {
    let w = sys.branch_count();
    if range != (1..=w) {
        return Err(Error::usage(format!("repair needs the whole window 1..={w}")));
    }
    check_hypotheses(sys)?;
    let mut r = Runner::new(sys, opts);
    r.repair()?;
    r.finish(sys)
}

/// Makes both images of handle `i` trivial.
pub fn trivialize_handle(sys: &HurwitzSystem, i: usize, opts: NormalizeOptions) -> Result<Normalized> {
    if i == 0 || i > sys.base_genus() {
        return Err(Error::usage(format!("handle {i} outside 1..={}", sys.base_genus())));
    }
    check_hypotheses(sys)?;
    let mut r = Runner::new(sys, opts);
    r.trivialize(i)?;
    r.finish(sys)
}

pub fn b1_trivialize(sys: &HurwitzSystem, opts: NormalizeOptions) -> Result<Normalized> {
    trivialize_handle(sys, 1, opts)
}

/// Brings a system to [`canonical_form`] of its shape.
pub fn canonicalize(sys: &HurwitzSystem, opts: NormalizeOptions) -> Result<Normalized> {
    check_hypotheses(sys)?;
    let (d, h, w) = sys.params();
    let mut r = Runner::new(sys, opts);
    for i in (1..=h).rev() {
        r.trivialize(i)?;
    }
    r.realize(1..=w, &canonical_tuple(d, w)?)?;
    if r.sys != canonical_form(d, h, w)? {
        return Err(Error::OrbitMismatch(format!("canonicalization ended at {}", r.sys)));
    }
    r.finish(sys)
}
