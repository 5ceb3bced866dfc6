//! Bidirectional breadth-first search over an implicit, symmetric move
//! graph. Expansion order is fixed, so results do not depend on hashing.

use std::collections::HashMap;
use std::hash::Hash;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<M> {
    /// Moves leading from the source to the target.
    Found(Vec<M>),
    /// One side ran out of states: source and target are disconnected.
    Exhausted,
    /// The state budget ran out first.
    Budget,
}

struct Side<S, M> {
    nodes: Vec<(S, usize, Option<M>)>,
    index: HashMap<S, usize>,
    frontier: std::ops::Range<usize>,
}

impl<S: Hash + Eq + Clone, M: Clone> Side<S, M> {
    fn new(root: S) -> Self {
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        Side {
            nodes: vec![(root, usize::MAX, None)],
            index,
            frontier: 0..1,
        }
    }

    /// Moves from the root to node `k`.
    fn path(&self, mut k: usize) -> Vec<M> {
        let mut out = Vec::new();
        while let (_, parent, Some(m)) = &self.nodes[k] {
            out.push(m.clone());
            k = *parent;
        }
        out.reverse();
        out
    }
}

/// Searches for a move sequence from `src` to `dst`. `expand` lists the
/// neighbours of a state with the move reaching each; `invert` gives the
/// inverse move, which must undo it.
pub fn bidirectional<S, M>(
    src: S,
    dst: S,
    mut expand: impl FnMut(&S, &mut Vec<(M, S)>),
    invert: impl Fn(&M) -> M,
    budget: usize,
) -> SearchOutcome<M>
where
    S: Hash + Eq + Clone,
    M: Clone,
{
    if src == dst {
        return SearchOutcome::Found(Vec::new());
    }
    let mut sides = [Side::new(src), Side::new(dst)];
    let mut buf = Vec::new();
    loop {
        let s = if sides[0].frontier.len() <= sides[1].frontier.len() {
            0
        } else {
            1
        };
        if sides[s].frontier.is_empty() {
            return SearchOutcome::Exhausted;
        }
        let level = sides[s].frontier.clone();
        let start = sides[s].nodes.len();
        for k in level {
            let state = sides[s].nodes[k].0.clone();
            buf.clear();
            expand(&state, &mut buf);
            for (m, next) in buf.drain(..) {
                if sides[s].index.contains_key(&next) {
                    continue;
                }
                if let Some(&other) = sides[1 - s].index.get(&next) {
                    let mut mine = sides[s].path(k);
                    mine.push(m);
                    let theirs = sides[1 - s].path(other);
                    let (fwd, back) = if s == 0 { (mine, theirs) } else { (theirs, mine) };
                    let mut out = fwd;
                    out.extend(back.iter().rev().map(&invert));
                    return SearchOutcome::Found(out);
                }
                let id = sides[s].nodes.len();
                sides[s].index.insert(next.clone(), id);
                sides[s].nodes.push((next, k, Some(m)));
            }
            if sides[0].nodes.len() + sides[1].nodes.len() > budget {
                return SearchOutcome::Budget;
            }
        }
        let end = sides[s].nodes.len();
        sides[s].frontier = start..end;
    }
}
