//! Free group on handle generators `a1, b1, .., ah, bh` and puncture
//! generators `g1, .., gw`, with endomorphisms given by generator images.
//!
//! This is the soundness layer for moves: a move is admissible when its
//! endomorphism is invertible, permutes the puncture classes up to
//! conjugacy, and sends the surface relator
//! `R = g1 g2 .. gw [a1,b1] .. [ah,bh]` to a conjugate of itself.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A generator of the free group. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    G(u16),
    A(u16),
    B(u16),
}

impl Gen {
    /// Position of the generator in the slot order `g1..gw, a1, b1, a2, b2, ..`.
    pub fn slot(self, w: usize) -> usize {
        match self {
            Gen::G(j) => j as usize - 1,
            Gen::A(i) => w + 2 * (i as usize - 1),
            Gen::B(i) => w + 2 * (i as usize - 1) + 1,
        }
    }

    pub fn from_slot(slot: usize, w: usize) -> Gen {
        if slot < w {
            Gen::G(slot as u16 + 1)
        } else {
            let k = slot - w;
            if k % 2 == 0 {
                Gen::A((k / 2) as u16 + 1)
            } else {
                Gen::B((k / 2) as u16 + 1)
            }
        }
    }

    pub fn in_range(self, h: usize, w: usize) -> bool {
        match self {
            Gen::G(j) => j >= 1 && j as usize <= w,
            Gen::A(i) | Gen::B(i) => i >= 1 && i as usize <= h,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::G(j) => write!(f, "g{j}"),
            Gen::A(i) => write!(f, "a{i}"),
            Gen::B(i) => write!(f, "b{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: Gen,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: Gen) -> Self {
        Letter { gen, inverse: false }
    }

    pub fn inv(self) -> Self {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.gen)
        } else {
            write!(f, "{}", self.gen)
        }
    }
}

/// A freely reduced word. Every constructor and mutator keeps it reduced.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn gen(g: Gen) -> Self {
        Word {
            letters: vec![Letter::new(g)],
        }
    }

    /// Reduces an arbitrary letter sequence.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Word::empty();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn push(&mut self, l: Letter) {
        match self.letters.last() {
            Some(&last) if last.cancels(l) => {
                self.letters.pop();
            }
            _ => self.letters.push(l),
        }
    }

    pub fn append(&mut self, other: &Word) {
        for &l in &other.letters {
            self.push(l);
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.append(other);
        out
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// `self^-1 x self`.
    pub fn conjugate_of(&self, x: &Word) -> Word {
        self.inverse().concat(x).concat(self)
    }

    /// Cyclically reduced core.
    pub fn cyclic_reduction(&self) -> Word {
        let l = &self.letters;
        let (mut i, mut j) = (0, l.len());
        while j - i >= 2 && l[i].cancels(l[j - 1]) {
            i += 1;
            j -= 1;
        }
        Word {
            letters: l[i..j].to_vec(),
        }
    }

    pub fn mentions(&self, g: Gen) -> bool {
        self.letters.iter().any(|l| l.gen == g)
    }

    /// Evaluates the word with a per-generator valuation and a group law.
    pub fn evaluate<T: Clone>(
        &self,
        identity: T,
        value: impl Fn(Gen) -> T,
        inverse: impl Fn(&T) -> T,
        mul: impl Fn(&T, &T) -> T,
    ) -> T {
        self.letters.iter().fold(identity, |acc, l| {
            let v = value(l.gen);
            let v = if l.inverse { inverse(&v) } else { v };
            mul(&acc, &v)
        })
    }
}

/// Free reduction of an arbitrary letter sequence.
pub fn reduce(letters: &[Letter]) -> Word {
    Word::from_letters(letters.iter().copied())
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

pub(crate) fn parse_gen(tok: &str, offset: usize) -> Result<Gen> {
    let (kind, idx) = tok.split_at(1.min(tok.len()));
    let idx: u16 = idx
        .parse()
        .ok()
        .filter(|&i| i >= 1)
        .ok_or_else(|| Error::parse(offset, format!("bad generator {tok:?}")))?;
    match kind {
        "g" => Ok(Gen::G(idx)),
        "a" => Ok(Gen::A(idx)),
        "b" => Ok(Gen::B(idx)),
        _ => Err(Error::parse(offset, format!("bad generator {tok:?}"))),
    }
}

/// Splits a token into its body and an optional `^-1` / `^1` exponent.
pub(crate) fn split_exponent(tok: &str, offset: usize) -> Result<(&str, bool)> {
    match tok.split_once('^') {
        None => Ok((tok, false)),
        Some((body, "-1")) => Ok((body, true)),
        Some((body, "1")) => Ok((body, false)),
        Some(_) => Err(Error::parse(offset, format!("bad exponent in {tok:?}"))),
    }
}

/// Iterates whitespace-separated tokens with their byte offsets.
pub(crate) fn tokens(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.split_ascii_whitespace()
        .map(move |t| (t.as_ptr() as usize - s.as_ptr() as usize, t))
}

impl FromStr for Word {
    type Err = Error;

    /// Parses the juxtaposed form `"a1 b1^-1 g3"`; `"1"` is the empty word.
    fn from_str(s: &str) -> Result<Word> {
        let mut w = Word::empty();
        for (off, tok) in tokens(s) {
            if tok == "1" {
                continue;
            }
            let (body, inverse) = split_exponent(tok, off)?;
            let gen = parse_gen(body, off)?;
            w.push(Letter { gen, inverse });
        }
        Ok(w)
    }
}

/// `true` iff the cyclic reductions agree up to rotation.
pub fn is_conjugate(u: &Word, v: &Word) -> bool {
    let cu = u.cyclic_reduction();
    let cv = v.cyclic_reduction();
    if cu.len() != cv.len() {
        return false;
    }
    if cu.is_empty() {
        return true;
    }
    let n = cu.len();
    (0..n).any(|r| (0..n).all(|k| cu.letters[(k + r) % n] == cv.letters[k]))
}

/// `R = g1 .. gw [a1,b1] .. [ah,bh]` with `[a,b] = a b a^-1 b^-1`.
pub fn relator(h: usize, w: usize) -> Word {
    let mut r = Word::empty();
    for j in 1..=w {
        r.push(Letter::new(Gen::G(j as u16)));
    }
    for i in 1..=h {
        r.append(&commutator(i));
    }
    r
}

/// `[ai, bi]`.
pub fn commutator(i: usize) -> Word {
    let a = Letter::new(Gen::A(i as u16));
    let b = Letter::new(Gen::B(i as u16));
    Word::from_letters([a, b, a.inv(), b.inv()])
}

/// An endomorphism of the free group of rank `2h + w`, stored as the image
/// of every generator in slot order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoMap {
    h: usize,
    w: usize,
    images: Vec<Word>,
    inverse: Option<Box<EndoMap>>,
}

impl EndoMap {
    pub fn identity(h: usize, w: usize) -> Self {
        EndoMap {
            h,
            w,
            images: (0..2 * h + w).map(|s| Word::gen(Gen::from_slot(s, w))).collect(),
            inverse: None,
        }
    }

    /// Identity except for the listed generator images.
    pub fn with_images(h: usize, w: usize, images: impl IntoIterator<Item = (Gen, Word)>) -> Result<Self> {
        let mut e = EndoMap::identity(h, w);
        for (g, img) in images {
            e.set_image(g, img)?;
        }
        Ok(e)
    }

    pub fn set_image(&mut self, g: Gen, img: Word) -> Result<()> {
        if !g.in_range(self.h, self.w) {
            return Err(Error::usage(format!("generator {g} outside h={} w={}", self.h, self.w)));
        }
        if let Some(l) = img.letters().iter().find(|l| !l.gen.in_range(self.h, self.w)) {
            return Err(Error::usage(format!(
                "image mentions {} outside h={} w={}",
                l.gen, self.h, self.w
            )));
        }
        self.images[g.slot(self.w)] = img;
        Ok(())
    }

    pub fn with_inverse(mut self, inverse: EndoMap) -> Self {
        self.inverse = Some(Box::new(inverse));
        self
    }

    pub fn genus(&self) -> usize {
        self.h
    }

    pub fn punctures(&self) -> usize {
        self.w
    }

    pub fn image(&self, g: Gen) -> &Word {
        &self.images[g.slot(self.w)]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse(&self) -> Option<&EndoMap> {
        self.inverse.as_deref()
    }

    /// Generators whose image differs from themselves.
    pub fn moved_generators(&self) -> Vec<Gen> {
        (0..self.images.len())
            .map(|s| Gen::from_slot(s, self.w))
            .filter(|&g| *self.image(g) != Word::gen(g))
            .collect()
    }

    pub fn apply(&self, wd: &Word) -> Word {
        let mut out = Word::empty();
        for l in wd.letters() {
            let img = self.image(l.gen);
            if l.inverse {
                out.append(&img.inverse());
            } else {
                out.append(img);
            }
        }
        out
    }

    /// `x -> self(other(x))`, i.e. apply `other`'s images then substitute.
    pub fn after(&self, other: &EndoMap) -> EndoMap {
        EndoMap {
            h: self.h,
            w: self.w,
            images: other.images.iter().map(|img| self.apply(img)).collect(),
            inverse: None,
        }
    }

    fn fixes_every_generator(&self) -> bool {
        (0..self.images.len()).all(|s| self.images[s] == Word::gen(Gen::from_slot(s, self.w)))
    }

    /// Inverse by greedy Nielsen reduction of the image tuple.
    ///
    /// Returns `None` when greedy length reduction stalls before reaching
    /// the standard basis; the result is checked to be a two-sided inverse.
    pub fn nielsen_inverse(&self) -> Option<EndoMap> {
        let n = self.images.len();
        let mut cur: Vec<Word> = self.images.clone();
        // track[k] is a word in the generators whose image under self is cur[k].
        let mut track: Vec<Word> = (0..n).map(|s| Word::gen(Gen::from_slot(s, self.w))).collect();
        loop {
            let mut best: Option<(usize, usize, usize, bool, bool)> = None;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    for &right in &[true, false] {
                        for &inv in &[false, true] {
                            let y = if inv { cur[j].inverse() } else { cur[j].clone() };
                            let cand = if right { cur[i].concat(&y) } else { y.concat(&cur[i]) };
                            if cand.len() < cur[i].len() {
                                let gain = cur[i].len() - cand.len();
                                if best.map_or(true, |b| gain > b.0) {
                                    best = Some((gain, i, j, right, inv));
                                }
                            }
                        }
                    }
                }
            }
            let Some((_, i, j, right, inv)) = best else { break };
            let (y, ty) = if inv {
                (cur[j].inverse(), track[j].inverse())
            } else {
                (cur[j].clone(), track[j].clone())
            };
            if right {
                cur[i] = cur[i].concat(&y);
                track[i] = track[i].concat(&ty);
            } else {
                cur[i] = y.concat(&cur[i]);
                track[i] = ty.concat(&track[i]);
            }
        }
        let mut inv = EndoMap::identity(self.h, self.w);
        let mut hit = vec![false; n];
        for k in 0..n {
            if cur[k].len() != 1 {
                return None;
            }
            let l = cur[k].letters()[0];
            let s = l.gen.slot(self.w);
            if hit[s] {
                return None;
            }
            hit[s] = true;
            inv.images[s] = if l.inverse {
                track[k].inverse()
            } else {
                track[k].clone()
            };
        }
        if self.after(&inv).fixes_every_generator() && inv.after(self).fixes_every_generator() {
            Some(inv)
        } else {
            None
        }
    }
}

impl fmt::Display for EndoMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let moved = self.moved_generators();
        if moved.is_empty() {
            return f.write_str("id");
        }
        let parts: Vec<String> = moved.iter().map(|&g| format!("{g} -> {}", self.image(g))).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Outcome of [`validate_peripheral`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeripheralReport {
    pub inverse_ok: bool,
    /// `puncture_perm[j-1] = k` when `e(gj)` is conjugate to `gk`.
    pub puncture_perm: Option<Vec<usize>>,
    pub relator_preserved: bool,
    pub failures: Vec<String>,
}

impl PeripheralReport {
    pub fn is_valid(&self) -> bool {
        self.inverse_ok && self.puncture_perm.is_some() && self.relator_preserved
    }
}

/// Checks that `e` is an automorphism preserving the peripheral structure
/// and the orientation of the surface relator. Requires a stored inverse.
pub fn validate_peripheral(e: &EndoMap, h: usize, w: usize) -> Result<PeripheralReport> {
    if e.h != h || e.w != w {
        return Err(Error::usage(format!(
            "map is defined for h={} w={}, asked for h={h} w={w}",
            e.h, e.w
        )));
    }
    let inv = e
        .inverse()
        .ok_or_else(|| Error::usage("endomorphism carries no stored inverse"))?;
    let mut failures = Vec::new();

    let inverse_ok = e.after(inv).fixes_every_generator() && inv.after(e).fixes_every_generator();
    if !inverse_ok {
        failures.push("stored inverse does not compose to the identity".to_string());
    }

    let mut perm = Vec::with_capacity(w);
    let mut used = vec![false; w + 1];
    let mut perm_ok = true;
    for j in 1..=w {
        let img = e.image(Gen::G(j as u16));
        let hits: Vec<usize> = (1..=w)
            .filter(|&k| is_conjugate(img, &Word::gen(Gen::G(k as u16))))
            .collect();
        match hits.as_slice() {
            [k] if !used[*k] => {
                used[*k] = true;
                perm.push(*k);
            }
            _ => {
                perm_ok = false;
                failures.push(format!(
                    "image of g{j} ({img}) is not conjugate to a fresh puncture generator"
                ));
            }
        }
    }

    let r = relator(h, w);
    let relator_preserved = is_conjugate(&e.apply(&r), &r);
    if !relator_preserved {
        if is_conjugate(&e.apply(&r), &r.inverse()) {
            failures.push("relator sent to a conjugate of its inverse (orientation reversed)".to_string());
        } else {
            failures.push("relator not preserved up to conjugacy".to_string());
        }
    }

    Ok(PeripheralReport {
        inverse_ok,
        puncture_perm: perm_ok.then_some(perm),
        relator_preserved,
        failures,
    })
}
