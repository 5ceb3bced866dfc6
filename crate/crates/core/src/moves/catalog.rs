//! The move catalog: generator images of every elementary move, frozen in a
//! checked-in text file.
//!
//! ```text
//! move B
//! image g{j} : g{j+1}
//! image g{j+1} : g{j+1}^-1 g{j} g{j+1}
//! inverse g{j} : g{j} g{j+1} g{j}^-1
//! inverse g{j+1} : g{j}
//! end
//! ```
//!
//! Generators not listed are fixed. `{j}` and `{j+1}` are the strands of a
//! braid, `{w}` is the last puncture. Handle letters are concrete (`a2`).
//! The handle-push entries are produced by [`generate`], a bounded search
//! over conjugator words, and the shipped file must match its output.

use std::fmt::Write as _;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::free_group::{is_conjugate, validate_peripheral, EndoMap, Gen, Letter, Word};

const SHIPPED: &str = include_str!("../../catalog/moves.cat");

/// Longest conjugator word tried by the push search.
pub const SEARCH_LENGTH: usize = 6;

/// Handles covered by the shipped catalog.
pub const CATALOG_HANDLES: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    /// `(generator template, image template)`.
    pub images: Vec<(String, String)>,
    pub inverse: Vec<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct Catalog {
    text: String,
    entries: Vec<CatalogEntry>,
}

/// Which handle generator a push modifies: `A` pushes around the a-loop and
/// changes the b-image, `B` pushes around the b-loop and changes the a-image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn letter(self) -> char {
        match self {
            Side::A => 'a',
            Side::B => 'b',
        }
    }

    /// The handle generator whose image the push changes.
    pub fn changed(self, i: usize) -> Gen {
        match self {
            Side::A => Gen::B(i as u16),
            Side::B => Gen::A(i as u16),
        }
    }
}

pub fn push_name(i: usize, side: Side) -> String {
    format!("P{}{i}", side.letter())
}

impl Catalog {
    pub fn shipped() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| Catalog::parse(SHIPPED).expect("shipped catalog parses"))
    }

    pub fn parse(text: &str) -> Result<Catalog> {
        let mut entries = Vec::new();
        let mut current: Option<CatalogEntry> = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = n + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (kw, rest) = line.split_once(' ').unwrap_or((line, ""));
            match (kw, current.as_mut()) {
                ("move", None) => {
                    if rest.trim().is_empty() {
                        return Err(Error::Catalog(format!("line {lineno}: move without a name")));
                    }
                    current = Some(CatalogEntry {
                        name: rest.trim().to_string(),
                        images: Vec::new(),
                        inverse: Vec::new(),
                    });
                }
                ("image" | "inverse", Some(entry)) => {
                    let (g, img) = rest
                        .split_once(':')
                        .ok_or_else(|| Error::Catalog(format!("line {lineno}: expected 'GEN : WORD'")))?;
                    let pair = (g.trim().to_string(), img.trim().to_string());
                    if kw == "image" {
                        entry.images.push(pair);
                    } else {
                        entry.inverse.push(pair);
                    }
                }
                ("end", Some(_)) => entries.push(current.take().expect("open entry")),
                _ => return Err(Error::Catalog(format!("line {lineno}: unexpected {line:?}"))),
            }
        }
        if let Some(e) = current {
            return Err(Error::Catalog(format!("entry {} is not closed", e.name)));
        }
        Ok(Catalog {
            text: text.to_string(),
            entries,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn entry(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// SHA-256 of the catalog text, hex encoded.
    pub fn hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.text.as_bytes()))
    }

    /// Concrete automorphism of the entry for a surface with `h` handles and
    /// `w` punctures; `strand` fills `{j}` for braids.
    pub fn instantiate(&self, name: &str, h: usize, w: usize, strand: usize) -> Result<EndoMap> {
        let entry = self
            .entry(name)
            .ok_or_else(|| Error::Catalog(format!("no catalog entry {name}")))?;
        let build = |pairs: &[(String, String)]| -> Result<EndoMap> {
            let mut e = EndoMap::identity(h, w);
            for (g, img) in pairs {
                let g: Word = fill(g, strand, w)
                    .parse()
                    .map_err(|err| Error::Catalog(format!("{name}: {err}")))?;
                let gen = match g.letters() {
                    [l] if !l.inverse => l.gen,
                    _ => return Err(Error::Catalog(format!("{name}: {g} is not a generator"))),
                };
                let img: Word = fill(img, strand, w)
                    .parse()
                    .map_err(|err| Error::Catalog(format!("{name}: {err}")))?;
                e.set_image(gen, img)
                    .map_err(|err| Error::Catalog(format!("{name} at h={h} w={w}: {err}")))?;
            }
            Ok(e)
        };
        let fwd = build(&entry.images)?;
        if entry.inverse.is_empty() {
            return Ok(fwd);
        }
        Ok(fwd.with_inverse(build(&entry.inverse)?))
    }
}

fn fill(template: &str, strand: usize, w: usize) -> String {
    template
        .replace("{j+1}", &(strand + 1).to_string())
        .replace("{j}", &strand.to_string())
        .replace("{w}", &w.to_string())
}

fn render(word: &Word, pushed: Option<u16>) -> String {
    if word.is_empty() {
        return "1".to_string();
    }
    word.letters()
        .iter()
        .map(|l| {
            let g = match l.gen {
                Gen::G(j) if Some(j) == pushed => "g{w}".to_string(),
                g => g.to_string(),
            };
            if l.inverse {
                format!("{g}^-1")
            } else {
                g
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn substitute(word: &Word, f: &impl Fn(Gen) -> Word) -> Word {
    let mut out = Word::empty();
    for l in word.letters() {
        let img = f(l.gen);
        out.append(&if l.inverse { img.inverse() } else { img });
    }
    out
}

fn letter(g: Gen) -> Letter {
    Letter::new(g)
}

/// Reduced words of length `<= max_len` over the given generators, shortest
/// first and in a fixed order within each length.
fn reduced_words(gens: &[Gen], max_len: usize) -> Vec<Word> {
    let alphabet: Vec<Letter> = gens.iter().flat_map(|&g| [letter(g), letter(g).inv()]).collect();
    let mut layer = vec![Word::empty()];
    let mut out = layer.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for wd in &layer {
            for &l in &alphabet {
                if wd.letters().last().is_some_and(|&last| last == l.inv()) {
                    continue;
                }
                let mut x = wd.clone();
                x.push(l);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// A handle push found by the search, at one handle and one puncture.
#[derive(Clone, Debug)]
pub struct PushSolution {
    pub side: Side,
    /// Conjugator of the pushed puncture.
    pub conjugator: Word,
    /// Conjugator of the factor appended to the changed handle generator.
    pub factor_conjugator: Word,
    pub exponent: i8,
    pub map: EndoMap,
}

/// All ansatz pushes around handle 1 with one puncture and conjugators of
/// length `<= max_len`, in search order.
///
/// The ansatz fixes every generator except the puncture `g` and one handle
/// generator `x`: `x -> x (C' g^e C'^-1)` and `g -> C g C^-1`. Requiring the
/// boundary word `g [a,b]` to be fixed determines `C` from `C'`.
pub fn search_pushes(side: Side, max_len: usize) -> Vec<PushSolution> {
    let (h, w) = (1, 1);
    let g = Word::gen(Gen::G(1));
    let x = side.changed(1);
    let k = crate::free_group::commutator(1);
    let mut out = Vec::new();
    for c2 in reduced_words(&[Gen::A(1), Gen::B(1)], max_len) {
        for exponent in [1i8, -1] {
            let ge = if exponent == 1 { g.clone() } else { g.inverse() };
            let x_img = Word::gen(x).concat(&c2).concat(&ge).concat(&c2.inverse());
            let partial = EndoMap::with_images(h, w, [(x, x_img.clone())]).expect("in range");
            let need = g.concat(&k).concat(&partial.apply(&k).inverse());
            let Some(c1) = conjugator_of(&need, Gen::G(1)) else {
                continue;
            };
            if c1.len() > max_len || c1.mentions(Gen::G(1)) {
                continue;
            }
            let map = EndoMap::with_images(h, w, [(x, x_img), (Gen::G(1), need)]).expect("in range");
            let Some(inv) = map.nielsen_inverse() else { continue };
            let map = map.with_inverse(inv);
            if !validate_peripheral(&map, h, w).map(|r| r.is_valid()).unwrap_or(false) {
                continue;
            }
            out.push(PushSolution {
                side,
                conjugator: c1,
                factor_conjugator: c2.clone(),
                exponent,
                map,
            });
        }
    }
    out
}

/// `C` with `word = C g C^-1` as reduced words, if any.
fn conjugator_of(word: &Word, g: Gen) -> Option<Word> {
    let n = word.len();
    if n % 2 == 0 {
        return None;
    }
    let mid = n / 2;
    let l = word.letters();
    if l[mid] != letter(g) {
        return None;
    }
    let c = Word::from_letters(l[..mid].iter().copied());
    (c.concat(&Word::gen(g)).concat(&c.inverse()) == *word).then_some(c)
}

/// Moves a handle-1 push (at `w = 1`) to handle `i` of a genus-`i` surface.
///
/// With `M = [a1,b1] .. [a(i-1),b(i-1)]` and the substitution
/// `g -> M^-1 g M`, `a1 -> ai`, `b1 -> bi`, the transported map sends
/// `g -> M s(E(g)) M^-1` and `x_i -> s(E(x_1))`.
pub fn transport(base: &EndoMap, i: usize) -> EndoMap {
    let m = (1..i).fold(Word::empty(), |acc, k| acc.concat(&crate::free_group::commutator(k)));
    let g = Word::gen(Gen::G(1));
    let sigma = |gen: Gen| match gen {
        Gen::G(_) => m.inverse().concat(&g).concat(&m),
        Gen::A(_) => Word::gen(Gen::A(i as u16)),
        Gen::B(_) => Word::gen(Gen::B(i as u16)),
    };
    let move_one = |e: &EndoMap| {
        let mut out = EndoMap::identity(i, 1);
        let gi = m.concat(&substitute(e.image(Gen::G(1)), &sigma)).concat(&m.inverse());
        out.set_image(Gen::G(1), gi).expect("in range");
        for (src, dst) in [(Gen::A(1), Gen::A(i as u16)), (Gen::B(1), Gen::B(i as u16))] {
            out.set_image(dst, substitute(e.image(src), &sigma)).expect("in range");
        }
        out
    };
    let fwd = move_one(base);
    match base.inverse() {
        Some(inv) => fwd.with_inverse(move_one(inv)),
        None => fwd,
    }
}

fn write_entry(out: &mut String, name: &str, e: &EndoMap, pushed: Option<u16>) {
    let _ = writeln!(out, "move {name}");
    let inv = e.inverse().expect("catalog maps carry inverses");
    for (kw, map) in [("image", e), ("inverse", inv)] {
        for g in map.moved_generators() {
            let _ = writeln!(
                out,
                "{kw} {} : {}",
                render(&Word::gen(g), pushed),
                render(map.image(g), pushed)
            );
        }
    }
    out.push_str("end\n");
}

/// Regenerates the catalog text: the braid template, then pushes around
/// both loops of handles `1..=max_handle` found by [`search_pushes`] and
/// [`transport`].
pub fn generate(max_len: usize, max_handle: usize) -> Result<String> {
    let mut out = String::new();
    out.push_str("# Elementary moves acting by precomposition on generator images.\n");
    out.push_str("# Regenerate with `hurwitz generate-catalog`; do not edit by hand.\n");
    out.push_str("move B\n");
    out.push_str("image g{j} : g{j+1}\n");
    out.push_str("image g{j+1} : g{j+1}^-1 g{j} g{j+1}\n");
    out.push_str("inverse g{j} : g{j} g{j+1} g{j}^-1\n");
    out.push_str("inverse g{j+1} : g{j}\n");
    out.push_str("end\n");
    for side in [Side::A, Side::B] {
        let found = search_pushes(side, max_len);
        let base = found
            .first()
            .ok_or_else(|| Error::Catalog(format!("no push around side {} within length {max_len}", side.letter())))?;
        for i in 1..=max_handle {
            let e = transport(&base.map, i);
            let report = validate_peripheral(&e, i, 1)?;
            if !report.is_valid() {
                return Err(Error::Catalog(format!(
                    "transported push {} fails validation: {:?}",
                    push_name(i, side),
                    report.failures
                )));
            }
            write_entry(&mut out, &push_name(i, side), &e, Some(1));
        }
    }
    Ok(out)
}

/// Outcome of checking one catalog entry at one surface shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryCheck {
    pub name: String,
    pub h: usize,
    pub w: usize,
    pub failures: Vec<String>,
}

impl EntryCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Symbolic checks of every entry at a few surface shapes: peripheral
/// validity, braid relations, and the push effect contract.
pub fn check_catalog(cat: &Catalog) -> Vec<EntryCheck> {
    let mut out = Vec::new();
    let shapes: Vec<(usize, usize)> = vec![(0, 4), (1, 2), (1, 4), (2, 4)];
    for entry in cat.entries() {
        let pushes = entry.name.starts_with('P');
        let handle: usize = entry.name.get(2..).and_then(|s| s.parse().ok()).unwrap_or(0);
        for &(h0, w) in &shapes {
            let h = if pushes { h0.max(handle) } else { h0 };
            if pushes && h0 == 0 {
                continue;
            }
            let strands: Vec<usize> = if pushes { vec![0] } else { (1..w).collect() };
            for strand in strands {
                let mut failures = Vec::new();
                match cat.instantiate(&entry.name, h, w, strand) {
                    Err(e) => failures.push(e.to_string()),
                    Ok(e) => {
                        if e.inverse().is_none() {
                            failures.push("missing inverse".to_string());
                        } else {
                            match validate_peripheral(&e, h, w) {
                                Ok(r) => failures.extend(r.failures),
                                Err(err) => failures.push(err.to_string()),
                            }
                        }
                        if pushes {
                            failures.extend(push_contract(&e, &entry.name, handle, w));
                        }
                    }
                }
                out.push(EntryCheck {
                    name: entry.name.clone(),
                    h,
                    w,
                    failures,
                });
            }
        }
        if entry.name == "B" {
            out.push(EntryCheck {
                name: "B".to_string(),
                h: 1,
                w: 5,
                failures: braid_relation_failures(cat, 1, 5),
            });
        }
    }
    out
}

fn push_contract(e: &EndoMap, name: &str, i: usize, w: usize) -> Vec<String> {
    let mut failures = Vec::new();
    let side = match name.as_bytes().get(1) {
        Some(b'a') => Side::A,
        Some(b'b') => Side::B,
        _ => return vec![format!("{name} is not a push name")],
    };
    let gw = Word::gen(Gen::G(w as u16));
    let changed = side.changed(i);
    for g in e.moved_generators() {
        if g != changed && g != Gen::G(w as u16) {
            failures.push(format!("{name} moves {g}"));
        }
    }
    if !is_conjugate(e.image(Gen::G(w as u16)), &gw) {
        failures.push(format!("{name} does not send g{w} to a conjugate"));
    }
    let factor = Word::gen(changed).inverse().concat(e.image(changed));
    if !(is_conjugate(&factor, &gw) || is_conjugate(&factor, &gw.inverse())) {
        failures.push(format!("{name} changes {changed} by {factor}, not a conjugate of g{w}"));
    }
    failures
}

/// `B_j B_(j+1) B_j = B_(j+1) B_j B_(j+1)` and distant braids commute, as
/// automorphisms.
pub fn braid_relation_failures(cat: &Catalog, h: usize, w: usize) -> Vec<String> {
    let mut failures = Vec::new();
    let b = |j: usize| cat.instantiate("B", h, w, j);
    for j in 1..w.saturating_sub(1) {
        let (Ok(x), Ok(y)) = (b(j), b(j + 1)) else {
            failures.push("braid entry does not instantiate".to_string());
            return failures;
        };
        if x.after(&y).after(&x).images() != y.after(&x).after(&y).images() {
            failures.push(format!("braid relation fails at j={j}"));
        }
    }
    for j in 1..w {
        for k in j + 2..w {
            let (Ok(x), Ok(y)) = (b(j), b(k)) else { continue };
            if x.after(&y).images() != y.after(&x).images() {
                failures.push(format!("braids {j} and {k} do not commute"));
            }
        }
    }
    failures
}
