//! Hurwitz systems: the permutation images of all generators of the
//! punctured surface group, satisfying the surface relator.
//!
//! A system of degree `d` over a genus-`h` base with `w` branch points is
//! the tuple `(t1, .., tw; a1, b1, .., ah, bh)` where every `tj` is a
//! transposition and `t1 .. tw [a1,b1] .. [ah,bh] = 1`. Tuples are not
//! identified up to conjugation: the labeling of the base fiber is part of
//! the data.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::group::GroupHandle;
use crate::perm::{product, transposition_blocks, BlockPartition, Permutation, MAX_DEGREE};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HurwitzSystem {
    d: usize,
    h: usize,
    w: usize,
    /// `t1..tw` followed by `a1, b1, .., ah, bh`.
    slots: Vec<Permutation>,
}

/// First failed check of [`HurwitzSystem::validate`], if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub violation: Option<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

/// Injective text serialization of a system; equal keys iff equal systems.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SystemKey(Vec<u8>);

impl SystemKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("keys are UTF-8")
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        SystemKey(bytes)
    }
}

impl fmt::Display for SystemKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl HurwitzSystem {
    pub fn new(d: usize, transpositions: Vec<Permutation>, handles: Vec<(Permutation, Permutation)>) -> Result<Self> {
        let h = handles.len();
        let w = transpositions.len();
        let mut slots = transpositions;
        for (a, b) in handles {
            slots.push(a);
            slots.push(b);
        }
        HurwitzSystem::from_slots(d, h, w, slots)
    }

    pub fn from_slots(d: usize, h: usize, w: usize, slots: Vec<Permutation>) -> Result<Self> {
        if d == 0 || d > MAX_DEGREE {
            return Err(Error::usage(format!("degree {d} outside 1..={MAX_DEGREE}")));
        }
        if slots.len() != w + 2 * h {
            return Err(Error::usage(format!(
                "expected {} permutations, got {}",
                w + 2 * h,
                slots.len()
            )));
        }
        if let Some(p) = slots.iter().find(|p| p.degree() != d) {
            return Err(Error::usage(format!(
                "permutation {p} has degree {}, expected {d}",
                p.degree()
            )));
        }
        Ok(HurwitzSystem { d, h, w, slots })
    }

    pub(crate) fn from_slots_unchecked(d: usize, h: usize, w: usize, slots: Vec<Permutation>) -> Self {
        debug_assert_eq!(slots.len(), w + 2 * h);
        HurwitzSystem { d, h, w, slots }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn base_genus(&self) -> usize {
        self.h
    }

    pub fn branch_count(&self) -> usize {
        self.w
    }

    pub fn params(&self) -> (usize, usize, usize) {
        (self.d, self.h, self.w)
    }

    pub fn slots(&self) -> &[Permutation] {
        &self.slots
    }

    pub fn transpositions(&self) -> &[Permutation] {
        &self.slots[..self.w]
    }

    /// The 1-based `j`-th transposition.
    pub fn t(&self, j: usize) -> &Permutation {
        &self.slots[j - 1]
    }

    /// Images `(ai, bi)` of the 1-based `i`-th handle.
    pub fn handle(&self, i: usize) -> (Permutation, Permutation) {
        let s = self.w + 2 * (i - 1);
        (self.slots[s], self.slots[s + 1])
    }

    pub fn handles(&self) -> Vec<(Permutation, Permutation)> {
        (1..=self.h).map(|i| self.handle(i)).collect()
    }

    /// `t1 .. tw [a1,b1] .. [ah,bh]`.
    pub fn relator_product(&self) -> Permutation {
        let mut p = product(self.d, self.transpositions());
        for (a, b) in self.handles() {
            p = p.then(&commutator(&a, &b));
        }
        p
    }

    pub fn validate(&self) -> ValidationReport {
        let violation = if let Some((j, t)) = self
            .transpositions()
            .iter()
            .enumerate()
            .find(|(_, t)| !t.is_transposition())
        {
            Some(format!("t{} = {t:?} is not a transposition", j + 1))
        } else if self.w % 2 == 1 {
            Some(format!("w = {} is odd, so the relator cannot hold", self.w))
        } else if !self.relator_product().is_identity() {
            Some(format!("relator evaluates to {:?}", self.relator_product()))
        } else {
            None
        };
        ValidationReport { violation }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    /// Genus of the cover, `d(h-1) + w/2 + 1`. Negative values occur only for
    /// disconnected covers.
    pub fn genus(&self) -> i64 {
        cover_genus(self.d, self.h, self.w)
    }

    pub fn monodromy(&self) -> GroupHandle {
        GroupHandle::generated(self.d, &self.slots)
    }

    pub fn is_full_monodromy(&self) -> bool {
        if self.d == 1 {
            return true;
        }
        // A transitive group generated partly by transpositions whose
        // transposition graph is already connected is the full group.
        if transposition_blocks(self.d, self.transpositions())
            .map(|b| b.len() == 1)
            .unwrap_or(false)
        {
            return true;
        }
        self.monodromy().is_symmetric()
    }

    /// The cover is connected iff the monodromy group is transitive.
    pub fn connected_cover(&self) -> bool {
        self.monodromy().orbits().len() == 1
    }

    /// Orbit partition of the transpositions with indices in the 1-based
    /// window `range`. An empty range yields all singletons.
    pub fn branching_blocks(&self, range: RangeInclusive<usize>) -> Result<BlockPartition> {
        let ts = self.window(&range)?;
        transposition_blocks(self.d, ts)
    }

    pub(crate) fn window(&self, range: &RangeInclusive<usize>) -> Result<&[Permutation]> {
        if range.is_empty() {
            return Ok(&[]);
        }
        let (s, e) = (*range.start(), *range.end());
        if s == 0 || e > self.w {
            return Err(Error::usage(format!("window {s}..={e} outside 1..={}", self.w)));
        }
        Ok(&self.slots[s - 1..e])
    }

    pub fn key(&self) -> SystemKey {
        SystemKey(self.to_string().into_bytes())
    }

    pub fn from_key(key: &SystemKey) -> Result<Self> {
        let s = std::str::from_utf8(key.as_bytes()).map_err(|e| Error::parse(e.valid_up_to(), "key is not UTF-8"))?;
        s.parse()
    }

    /// Compact 0-based image bytes of all slots, for visited sets.
    pub fn pack(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.slots.len() * self.d);
        for p in &self.slots {
            out.extend_from_slice(p.as_slice());
        }
        out
    }

    pub fn unpack(d: usize, h: usize, w: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != d * (w + 2 * h) {
            return Err(Error::usage("packed state has the wrong length"));
        }
        let slots = bytes
            .chunks_exact(d)
            .map(Permutation::from_zero_based)
            .collect::<Result<Vec<_>>>()?;
        Ok(HurwitzSystem { d, h, w, slots })
    }
}

pub fn cover_genus(d: usize, h: usize, w: usize) -> i64 {
    d as i64 * (h as i64 - 1) + (w / 2) as i64 + 1
}

/// `[a,b] = a b a^-1 b^-1`, left to right.
pub fn commutator(a: &Permutation, b: &Permutation) -> Permutation {
    a.then(b).then(&a.inverse()).then(&b.inverse())
}

impl fmt::Display for HurwitzSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} h={} w={} | t:", self.d, self.h, self.w)?;
        for (j, t) in self.transpositions().iter().enumerate() {
            f.write_str(if j == 0 { " " } else { " ; " })?;
            write!(f, "{t}")?;
        }
        f.write_str(" | ab:")?;
        for (i, (a, b)) in self.handles().iter().enumerate() {
            f.write_str(if i == 0 { " " } else { " ; " })?;
            write!(f, "{a} , {b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for HurwitzSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_param(tok: &str, name: &str, offset: usize) -> Result<usize> {
    tok.strip_prefix(name)
        .and_then(|v| v.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::parse(offset, format!("expected {name}=<n>, found {tok:?}")))
}

fn parse_perm_list(section: &str, base: usize, sep: &str) -> Result<Vec<Permutation>> {
    if section.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut off = base;
    for part in section.split(sep) {
        let lead = part.len() - part.trim_start().len();
        let p: Permutation = part.trim().parse().map_err(|e| match e {
            Error::Parse { offset, message } => Error::parse(off + lead + offset, message),
            other => other,
        })?;
        out.push(p);
        off += part.len() + sep.len();
    }
    Ok(out)
}

impl FromStr for HurwitzSystem {
    type Err = Error;

    /// Parses the line form
    /// `d=3 h=1 w=4 | t: 2,1,3 ; 1,3,2 ; 1,3,2 ; 2,1,3 | ab: 2,3,1 , 2,1,3`.
    fn from_str(line: &str) -> Result<Self> {
        let line = line.trim_end_matches(['\n', '\r']);
        let sections: Vec<&str> = line.split('|').collect();
        if sections.len() != 3 {
            return Err(Error::parse(0, "expected three '|'-separated sections"));
        }
        let head = sections[0];
        let mut it = crate::free_group::tokens(head);
        let mut next = |name: &str| -> Result<usize> {
            let (off, tok) = it
                .next()
                .ok_or_else(|| Error::parse(head.len(), format!("missing {name}=")))?;
            parse_param(tok, name, off)
        };
        let d = next("d")?;
        let h = next("h")?;
        let w = next("w")?;

        let t_off = sections[0].len() + 1;
        let t_sec = sections[1];
        let t_body = t_sec
            .trim_start()
            .strip_prefix("t:")
            .ok_or_else(|| Error::parse(t_off, "expected 't:'"))?;
        let t_base = t_off + (t_sec.len() - t_body.len());
        let ts = parse_perm_list(t_body, t_base, ";")?;

        let ab_off = t_off + t_sec.len() + 1;
        let ab_sec = sections[2];
        let ab_body = ab_sec
            .trim_start()
            .strip_prefix("ab:")
            .ok_or_else(|| Error::parse(ab_off, "expected 'ab:'"))?;
        let ab_base = ab_off + (ab_sec.len() - ab_body.len());
        let mut handles = Vec::new();
        if !ab_body.trim().is_empty() {
            let mut off = ab_base;
            for pair in ab_body.split(';') {
                let pair_perms = regroup_pair(pair, off, d)?;
                handles.push(pair_perms);
                off += pair.len() + 1;
            }
        }
        if ts.len() != w {
            return Err(Error::parse(
                t_base,
                format!("w={w} but {} transpositions listed", ts.len()),
            ));
        }
        if handles.len() != h {
            return Err(Error::parse(
                ab_base,
                format!("h={h} but {} handle pairs listed", handles.len()),
            ));
        }
        HurwitzSystem::new(d, ts, handles).map_err(|e| Error::parse(0, e.to_string()))
    }
}

/// A handle pair is written `a , b` where both sides are comma-separated
/// images; the pair separator is the token `,` standing alone.
fn regroup_pair(pair: &str, base: usize, d: usize) -> Result<(Permutation, Permutation)> {
    let Some(idx) = pair.find(" , ") else {
        return Err(Error::parse(base, "handle pair must be written 'a , b'"));
    };
    let (a, b) = (&pair[..idx], &pair[idx + 3..]);
    let pa = parse_perm_list(a, base, ";")?;
    let pb = parse_perm_list(b, base + idx + 3, ";")?;
    match (pa.as_slice(), pb.as_slice()) {
        ([a], [b]) if a.degree() == d && b.degree() == d => Ok((*a, *b)),
        _ => Err(Error::parse(
            base,
            format!("handle pair {pair:?} is not two degree-{d} permutations"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(d: usize, p: usize, q: usize) -> Permutation {
        Permutation::transposition(d, p, q).unwrap()
    }

    fn d2_system(a: Permutation, b: Permutation) -> HurwitzSystem {
        HurwitzSystem::new(2, vec![t(2, 1, 2); 4], vec![(a, b)]).unwrap()
    }

    #[test]
    fn validation_examples() {
        let id = Permutation::identity(2);
        assert!(d2_system(id, id).is_valid());
        let bad = HurwitzSystem::new(2, vec![t(2, 1, 2); 3], vec![(id, id)]).unwrap();
        assert!(!bad.is_valid());
        let c3 = Permutation::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        let with_cycle = HurwitzSystem::new(3, vec![c3, c3, c3], vec![]).unwrap();
        let report = with_cycle.validate();
        assert!(report.violation.unwrap().contains("not a transposition"));
    }

    #[test]
    fn genus_examples() {
        assert_eq!(cover_genus(3, 1, 6), 4);
        assert_eq!(cover_genus(2, 0, 2), 0);
        for h in 0..5 {
            assert_eq!(cover_genus(1, h, 0), h as i64);
        }
    }

    #[test]
    fn monodromy_examples() {
        let id = Permutation::identity(2);
        let s = d2_system(id, id);
        assert!(s.monodromy().is_symmetric());
        assert!(s.is_full_monodromy());
        assert!(s.connected_cover());

        let s3 = HurwitzSystem::new(3, vec![t(3, 1, 2), t(3, 2, 3), t(3, 2, 3), t(3, 1, 2)], vec![]).unwrap();
        assert!(s3.is_valid());
        assert_eq!(s3.monodromy().order(), 6);
        assert!(s3.is_full_monodromy());

        let s4 = HurwitzSystem::new(4, vec![t(4, 1, 2), t(4, 1, 2), t(4, 3, 4), t(4, 3, 4)], vec![]).unwrap();
        assert!(s4.is_valid());
        assert_eq!(s4.monodromy().order(), 4);
        assert!(!s4.is_full_monodromy());
        assert!(!s4.connected_cover());
        assert_eq!(s4.monodromy().orbits().blocks(), &[vec![1, 2], vec![3, 4]]);

        let trivial =
            HurwitzSystem::new(1, vec![], vec![(Permutation::identity(1), Permutation::identity(1))]).unwrap();
        assert!(trivial.is_valid());
        assert!(trivial.connected_cover());
        assert!(trivial.is_full_monodromy());
    }

    #[test]
    fn branching_block_examples() {
        let s3 = HurwitzSystem::new(3, vec![t(3, 1, 2), t(3, 2, 3), t(3, 2, 3), t(3, 1, 2)], vec![]).unwrap();
        assert_eq!(s3.branching_blocks(1..=4).unwrap().blocks(), &[vec![1, 2, 3]]);
        let s = HurwitzSystem::new(3, vec![t(3, 1, 2), t(3, 1, 2), t(3, 2, 3), t(3, 2, 3)], vec![]).unwrap();
        assert_eq!(s.branching_blocks(1..=2).unwrap().blocks(), &[vec![1, 2], vec![3]]);
        #[allow(clippy::reversed_empty_ranges)]
        let empty = s.branching_blocks(3..=2).unwrap();
        assert_eq!(empty, BlockPartition::singletons(3));
        assert!(s.branching_blocks(0..=2).is_err());
        assert!(s.branching_blocks(1..=5).is_err());
    }

    #[test]
    fn line_format() {
        let line = "d=3 h=1 w=4 | t: 2,1,3 ; 1,3,2 ; 1,3,2 ; 2,1,3 | ab: 2,3,1 , 2,1,3";
        let s: HurwitzSystem = line.parse().unwrap();
        assert_eq!(s.to_string(), line);
        assert_eq!(s.handle(1).0, Permutation::from_cycles(3, &[&[1, 2, 3]]).unwrap());
        let h0: HurwitzSystem = "d=2 h=0 w=2 | t: 2,1 ; 2,1 | ab:".parse().unwrap();
        assert_eq!(h0.to_string(), "d=2 h=0 w=2 | t: 2,1 ; 2,1 | ab:");
        let h2 = HurwitzSystem::new(
            2,
            vec![],
            vec![(Permutation::identity(2), t(2, 1, 2)), (t(2, 1, 2), t(2, 1, 2))],
        )
        .unwrap();
        assert_eq!(h2.to_string(), "d=2 h=2 w=0 | t: | ab: 1,2 , 2,1 ; 2,1 , 2,1");
        assert_eq!(h2.to_string().parse::<HurwitzSystem>().unwrap(), h2);
    }

    #[test]
    fn key_round_trip_and_injectivity() {
        let id = Permutation::identity(2);
        let s = d2_system(id, id);
        let key = s.key();
        let back = HurwitzSystem::from_key(&key).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.key(), key);
        let other = d2_system(id, t(2, 1, 2));
        assert_ne!(other.key(), key);
        assert_eq!(HurwitzSystem::unpack(2, 1, 4, &s.pack()).unwrap(), s);
    }

    #[test]
    fn malformed_keys_report_offsets() {
        let err = "d=3 h=1 w=4 | t: 2,1,3 ; 1,3,x ; 1,3,2 ; 2,1,3 | ab: 2,3,1 , 2,1,3"
            .parse::<HurwitzSystem>()
            .unwrap_err();
        match err {
            Error::Parse { offset, .. } => assert_eq!(offset, 29),
            other => panic!("unexpected {other:?}"),
        }
        assert!("d=3 h=1 w=4 | t: 2,1,3".parse::<HurwitzSystem>().is_err());
        assert!("d=3 h=1 w=3 | t: 2,1,3 | ab: 1,2,3 , 1,2,3"
            .parse::<HurwitzSystem>()
            .is_err());
    }
}
