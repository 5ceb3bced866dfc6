//! Connectivity certificates and their independent replay.
//!
//! Replay never touches the compiled move tables: elementary moves are
//! evaluated by substituting generator images of the catalog
//! automorphisms, and macro moves by their direct definitions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::moves::catalog::Catalog;
use crate::moves::{move_automorphism, pair_cancel, pair_insert, pair_retype, precompose, Move, MoveWord};
use crate::perm::Permutation;
use crate::system::HurwitzSystem;

/// A move word with the endpoints it connects.
///
/// Text form, one field per line:
///
/// ```text
/// source: d=2 h=1 w=4 | t: 2,1 ; 2,1 ; 2,1 ; 2,1 | ab: 1,2 , 1,2
/// target: d=2 h=1 w=4 | t: 2,1 ; 2,1 ; 2,1 ; 2,1 | ab: 2,1 , 2,1
/// moves: Pa1 B2'
/// catalog: <sha256 of the move catalog>
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub source: HurwitzSystem,
    pub target: HurwitzSystem,
    pub word: MoveWord,
    pub catalog: String,
}

impl Certificate {
    pub fn new(source: HurwitzSystem, target: HurwitzSystem, word: MoveWord) -> Self {
        Certificate {
            source,
            target,
            word,
            catalog: Catalog::shipped().hash(),
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "source: {}", self.source)?;
        writeln!(f, "target: {}", self.target)?;
        writeln!(f, "moves: {}", self.word)?;
        writeln!(f, "catalog: {}", self.catalog)
    }
}

impl FromStr for Certificate {
    type Err = Error;

    fn from_str(text: &str) -> Result<Certificate> {
        let mut fields: [Option<(usize, &str)>; 4] = [None; 4];
        let names = ["source", "target", "moves", "catalog"];
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let body = line.trim_end();
            let start = offset;
            offset += line.len();
            if body.trim().is_empty() || body.trim_start().starts_with('#') {
                continue;
            }
            let (key, value) = body
                .split_once(':')
                .ok_or_else(|| Error::parse(start, format!("expected `field: value`, found {body:?}")))?;
            let k = names
                .iter()
                .position(|n| *n == key.trim())
                .ok_or_else(|| Error::parse(start, format!("unknown field {:?}", key.trim())))?;
            if fields[k].is_some() {
                return Err(Error::parse(start, format!("duplicate field {}", names[k])));
            }
            fields[k] = Some((start + key.len() + 1, value.trim()));
        }
        let get = |k: usize| fields[k].ok_or_else(|| Error::parse(text.len(), format!("missing field {}", names[k])));
        let shift = |off: usize| {
            move |e: Error| match e {
                Error::Parse { offset, message } => Error::Parse {
                    offset: offset + off,
                    message,
                },
                other => other,
            }
        };
        let (so, s) = get(0)?;
        let (to, t) = get(1)?;
        let (mo, m) = get(2)?;
        let (_, c) = get(3)?;
        Ok(Certificate {
            source: s.parse().map_err(shift(so))?,
            target: t.parse().map_err(shift(to))?,
            word: m.parse().map_err(shift(mo))?,
            catalog: c.to_string(),
        })
    }
}

/// Applies one move without the compiled tables.
pub fn replay_move(cat: &Catalog, sys: &HurwitzSystem, mv: &Move) -> Result<HurwitzSystem> {
    let (d, h, w) = sys.params();
    match *mv {
        Move::Braid { .. } | Move::Push { .. } => precompose(sys, &move_automorphism(cat, mv, h, w)?),
        Move::Retype { j, p, q } => pair_retype(sys, j, &Permutation::transposition(d, p, q)?),
        Move::Cancel { j } => pair_cancel(sys, j),
        Move::Insert { j, p, q } => pair_insert(sys, j, &Permutation::transposition(d, p, q)?),
    }
}

/// Replays `word` from `source` and returns every intermediate system,
/// the source first.
pub fn replay_trace(cat: &Catalog, source: &HurwitzSystem, word: &MoveWord) -> Result<Vec<HurwitzSystem>> {
    let mut out = vec![source.clone()];
    for (k, mv) in word.moves().iter().enumerate() {
        let next = replay_move(cat, out.last().expect("nonempty"), mv)
            .map_err(|e| Error::Replay(format!("move {} ({mv}): {e}", k + 1)))?;
        out.push(next);
    }
    Ok(out)
}

/// Checks a certificate against `cat`: the catalog hash must match, every
/// intermediate system must be valid, and the last one must equal the
/// target byte for byte.
pub fn replay(cat: &Catalog, cert: &Certificate) -> Result<()> {
    if cert.catalog != cat.hash() {
        return Err(Error::Replay(format!(
            "certificate was made with catalog {}, replaying with {}",
            cert.catalog,
            cat.hash()
        )));
    }
    if let Some(v) = cert.source.validate().violation {
        return Err(Error::Replay(format!("source is invalid: {v}")));
    }
    let trace = replay_trace(cat, &cert.source, &cert.word)?;
    for (k, s) in trace.iter().enumerate().skip(1) {
        if let Some(v) = s.validate().violation {
            return Err(Error::Replay(format!("state after move {k} is invalid: {v}")));
        }
    }
    let end = trace.last().expect("nonempty");
    if end.key() != cert.target.key() {
        return Err(Error::Replay(format!("replay ends at {end}, not at {}", cert.target)));
    }
    Ok(())
}
