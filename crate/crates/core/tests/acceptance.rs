//! Acceptance suite: one PASS or FAIL line per criterion, with timings.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::time::Instant;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hurwitz::enumerate::{all_transpositions, enumerate_range, enumeration_estimate, random_filtered, tuple_space};
use hurwitz::moves::canonical::canonical_form;
use hurwitz::moves::catalog::{check_catalog, Catalog};
use hurwitz::moves::normal_form::{prop_split_normal_form, realize_block_rewrite, split_length, REALIZE_BUDGET};
use hurwitz::moves::{apply_move, braid, Direction, MoveTable};
use hurwitz::orbit::{census, connect, Connection};
use hurwitz::replay::{replay, Certificate};
use hurwitz::{
    canonicalize, count_systems, random_system, Filter, GroupHandle, HurwitzSystem, Mode, MoveSelector,
    NormalizeOptions, Permutation,
};

/// Enumeration work accepted by the counting cross-check.
const COUNT_BUDGET: f64 = 5e8;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn single_orbit_matrix() -> Check {
    let mut notes = Vec::new();
    for (d, h, w) in [(2, 1, 4), (2, 1, 6), (2, 2, 4), (3, 1, 6), (3, 2, 6)] {
        let t = Instant::now();
        let c = census(d, h, w, MoveSelector::Full, &Filter::FullMonodromy, Mode::Fast).map_err(err)?;
        ensure(c.orbit_count() == 1, || {
            format!("({d},{h},{w}): {} full-monodromy orbits", c.orbit_count())
        })?;
        notes.push(format!("({d},{h},{w}) 1 orbit of {} in {:.1?}", c.total, t.elapsed()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (d, h, w) in [(3, 1, 8), (4, 1, 8)] {
        let t = Instant::now();
        let target = canonical_form(d, h, w).map_err(err)?;
        let seeds: Vec<HurwitzSystem> = (0..200)
            .map(|_| random_filtered(d, h, w, &Filter::FullMonodromy, &mut rng, 100_000))
            .collect::<hurwitz::Result<_>>()
            .map_err(err)?;
        let forms: Vec<hurwitz::Result<HurwitzSystem>> = seeds
            .par_iter()
            .map(|s| canonicalize(s, NormalizeOptions::default()).map(|n| n.system))
            .collect();
        for (s, f) in seeds.iter().zip(forms) {
            let f = f.map_err(|e| format!("{s}: {e}"))?;
            ensure(f == target, || format!("{s} reached {f}"))?;
        }
        notes.push(format!("({d},{h},{w}) 200 samples, one form, {:.1?}", t.elapsed()));
    }
    Ok(notes.join("; "))
}

fn genus_zero_baseline() -> Check {
    let mut notes = Vec::new();
    for (d, w) in [(3, 4), (3, 6), (4, 6), (4, 8)] {
        let c = census(d, 0, w, MoveSelector::Braid, &Filter::FullMonodromy, Mode::Fast).map_err(err)?;
        ensure(c.orbit_count() == 1, || {
            format!("(d,w)=({d},{w}): {} orbits", c.orbit_count())
        })?;
        notes.push(format!("({d},{w}) size {}", c.orbits[0].size));
    }
    let full = census(3, 0, 4, MoveSelector::Braid, &Filter::FullMonodromy, Mode::Fast).map_err(err)?;
    ensure(full.orbits[0].size == 24, || {
        format!("(3,4) orbit size {}", full.orbits[0].size)
    })?;
    let all = census(3, 0, 4, MoveSelector::Braid, &Filter::All, Mode::Fast).map_err(err)?;
    let intransitive = census(3, 0, 4, MoveSelector::Braid, &Filter::Intransitive, Mode::Fast).map_err(err)?;
    ensure(all.total == 27 && intransitive.total == 3, || {
        format!("{} tuples, {} intransitive", all.total, intransitive.total)
    })?;
    Ok(notes.join("; ") + "; 27 tuples, 3 intransitive")
}

fn handle_moves_needed() -> Check {
    let braid_only = census(2, 1, 4, MoveSelector::Braid, &Filter::All, Mode::Fast).map_err(err)?;
    let full = census(2, 1, 4, MoveSelector::Full, &Filter::All, Mode::Fast).map_err(err)?;
    ensure(braid_only.orbit_count() == 4 && full.orbit_count() == 1, || {
        format!(
            "braid-only {} orbits, full {}",
            braid_only.orbit_count(),
            full.orbit_count()
        )
    })?;
    Ok("braid-only 4 orbits, full 1".into())
}

fn enumeration_count(d: usize, h: usize, w: usize) -> hurwitz::Result<u64> {
    let space = tuple_space(d, w);
    let chunks = 64u64.min(space.max(1));
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            Ok(enumerate_range(d, h, w, Filter::All, space * k / chunks..space * (k + 1) / chunks)?.count() as u64)
        })
        .sum()
}

fn counting_cross_check() -> Check {
    let mut checked = 0;
    let mut skipped = Vec::new();
    for d in 1..=4 {
        for h in 0..=2 {
            for w in 0..=8 {
                if d == 1 && w > 0 {
                    ensure(count_systems(d, h, w).map_err(err)? == 0u32.into(), || {
                        format!("d=1 w={w}")
                    })?;
                    checked += 1;
                    continue;
                }
                if enumeration_estimate(d, h, w) > COUNT_BUDGET {
                    skipped.push(format!("({d},{h},{w})"));
                    continue;
                }
                let formula = count_systems(d, h, w).map_err(err)?;
                let enumerated = enumeration_count(d, h, w).map_err(err)?;
                ensure(formula == enumerated.into(), || {
                    format!("({d},{h},{w}): character sum {formula}, enumeration {enumerated}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} cases equal; beyond budget: {}", skipped.join(" ")))
}

fn move_soundness() -> Check {
    let cat = Catalog::shipped();
    let checks = check_catalog(cat);
    if let Some(bad) = checks.iter().find(|c| !c.passed()) {
        return Err(format!("{} h={} w={}: {:?}", bad.name, bad.h, bad.w, bad.failures));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut moves_checked = 0;
    let samples = 1000;
    for _ in 0..samples {
        let d = rng.gen_range(2..=5);
        let h = rng.gen_range(0..=3);
        let w = 2 * rng.gen_range(1..=4);
        let sys = random_system(d, h, w, &mut rng).map_err(err)?;
        let f = |s: &HurwitzSystem, j| braid(s, j, Direction::Forward).map_err(err);
        for j in 1..w.saturating_sub(1) {
            ensure(
                f(&f(&f(&sys, j)?, j + 1)?, j)? == f(&f(&f(&sys, j + 1)?, j)?, j + 1)?,
                || format!("braid relation at {j} on {sys}"),
            )?;
        }
        for j in 1..w {
            for k in j + 2..w {
                ensure(f(&f(&sys, j)?, k)? == f(&f(&sys, k)?, j)?, || {
                    format!("far braids {j},{k} on {sys}")
                })?;
            }
        }
        let group = GroupHandle::generated(d, sys.slots());
        for m in MoveTable::shared(h, w).map_err(err)?.generators(MoveSelector::Full) {
            let next = apply_move(&sys, &m).map_err(err)?;
            ensure(next.is_valid() && next.genus() == sys.genus(), || {
                format!("{m} on {sys}")
            })?;
            ensure(GroupHandle::generated(d, next.slots()).same_subgroup(&group), || {
                format!("{m} changes the monodromy of {sys}")
            })?;
            ensure(
                apply_move(&next, &m.inverse().expect("elementary")).map_err(err)? == sys,
                || format!("{m} on {sys} is not inverted"),
            )?;
            moves_checked += 1;
        }
    }
    Ok(format!(
        "{} catalog checks; {samples} random systems, {moves_checked} move applications",
        checks.len()
    ))
}

fn certificate_integrity() -> Check {
    let cat = Catalog::shipped();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let cases = [(2, 1, 4), (2, 2, 4), (3, 0, 6), (3, 1, 6), (4, 0, 8)];
    let mut total_len = 0;
    for q in 0..100 {
        let (d, h, w) = cases[q % cases.len()];
        let s = random_filtered(d, h, w, &Filter::FullMonodromy, &mut rng, 100_000).map_err(err)?;
        let g = random_filtered(d, h, w, &Filter::FullMonodromy, &mut rng, 100_000).map_err(err)?;
        let sel = if h == 0 {
            MoveSelector::Braid
        } else {
            MoveSelector::Full
        };
        let word = match connect(&s, &g, sel, REALIZE_BUDGET).map_err(err)? {
            Connection::Connected(word) => word,
            other => return Err(format!("{s} to {g}: {other:?}")),
        };
        total_len += word.len();
        replay(cat, &Certificate::new(s.clone(), g.clone(), word)).map_err(|e| format!("{s} to {g}: {e}"))?;
    }
    let mut canon = 0;
    for (d, h, w) in [(2, 1, 4), (3, 1, 6), (3, 2, 6), (4, 1, 8), (4, 2, 8)] {
        for _ in 0..4 {
            let s = random_filtered(d, h, w, &Filter::FullMonodromy, &mut rng, 100_000).map_err(err)?;
            let n = canonicalize(&s, NormalizeOptions::default()).map_err(|e| format!("{s}: {e}"))?;
            replay(cat, &Certificate::new(s.clone(), n.system.clone(), n.word)).map_err(|e| format!("{s}: {e}"))?;
            let again = canonicalize(&n.system, NormalizeOptions::default()).map_err(err)?;
            ensure(again.system == n.system && again.word.is_empty(), || {
                format!("canonicalize is not idempotent on {}", n.system)
            })?;
            canon += 1;
        }
    }
    Ok(format!(
        "100 connect certificates replayed (mean length {:.1}); {canon} canonicalizations idempotent and replayed",
        total_len as f64 / 100.0
    ))
}

/// Image vector of a left-to-right product.
fn naive_product(d: usize, ps: &[Permutation]) -> Vec<usize> {
    let mut img: Vec<usize> = (1..=d).collect();
    for p in ps {
        img = img.iter().map(|&x| p.image(x)).collect();
    }
    img
}

fn closure_order(d: usize, gens: &[Permutation]) -> usize {
    let id = Permutation::identity(d);
    let mut seen = HashSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.then(g);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}

/// A random tuple of transpositions of `block` with product `g` generating
/// the symmetric group of the block, by rejection.
fn random_tuple(d: usize, block: &[usize], g: &Permutation, w_m: usize, rng: &mut ChaCha8Rng) -> Vec<Permutation> {
    let ts: Vec<Permutation> = all_transpositions(d)
        .into_iter()
        .filter(|t| {
            let (p, q) = t.transposition_points().unwrap();
            block.contains(&p) && block.contains(&q)
        })
        .collect();
    let full: usize = (1..=block.len()).product();
    loop {
        let tuple: Vec<Permutation> = (0..w_m).map(|_| *ts.choose(rng).unwrap()).collect();
        if naive_product(d, &tuple) == naive_product(d, &[*g]) && closure_order(d, &tuple) == full {
            return tuple;
        }
    }
}

fn split_construction() -> Check {
    let d = 5;
    let mut outputs = 0;
    let mut realized = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for size in 2..=5 {
        for block in (1..=d).combinations(size) {
            for images in block.iter().copied().permutations(size) {
                let mut full: Vec<usize> = (1..=d).collect();
                for (x, y) in block.iter().zip(&images) {
                    full[x - 1] = *y;
                }
                let g = Permutation::from_images(&full).map_err(err)?;
                let l = split_length(&block, &g);
                let parity = usize::from(!g.is_even());
                for w_m in (2 * size..=2 * size + 4).filter(|w| w % 2 == parity) {
                    for tau in block
                        .iter()
                        .tuple_combinations()
                        .map(|(&p, &q)| Permutation::transposition(d, p, q).unwrap())
                    {
                        let out = prop_split_normal_form(&block, &g, w_m, &tau).map_err(err)?;
                        let ctx = || format!("A={block:?} g={g} w_m={w_m} tau={tau}");
                        ensure(out.len() == w_m, || format!("{}: length {}", ctx(), out.len()))?;
                        ensure(naive_product(d, &out) == full, || format!("{}: wrong product", ctx()))?;
                        let orbits = GroupHandle::generated(d, &out).orbits();
                        ensure(
                            closure_order(d, &out) == (1..=size).product::<usize>() && orbits.blocks().contains(&block),
                            || format!("{}: group is not the symmetric group of A", ctx()),
                        )?;
                        ensure(out[w_m - 1] == out[w_m - 2], || format!("{}: last pair differs", ctx()))?;
                        ensure((w_m - l) % 2 == 0, || format!("{}: odd padding", ctx()))?;
                        outputs += 1;
                    }
                    if size <= 4 && w_m <= 8 && block[0] == 1 && block.windows(2).all(|p| p[1] == p[0] + 1) {
                        let tau = Permutation::transposition(d, block[0], block[1]).unwrap();
                        let target = prop_split_normal_form(&block, &g, w_m, &tau).map_err(err)?;
                        for _ in 0..2 {
                            let src = HurwitzSystem::new(d, random_tuple(d, &block, &g, w_m, &mut rng), vec![])
                                .map_err(err)?;
                            let word = realize_block_rewrite(&src, 1..=w_m, &target, REALIZE_BUDGET)
                                .map_err(|e| format!("realize {src} to A={block:?} g={g}: {e}"))?;
                            let reached = word.apply(&src).map_err(err)?;
                            ensure(reached.transpositions() == &target[..], || {
                                format!("realize missed for {src}")
                            })?;
                            realized += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{outputs} normal forms checked; {realized} braid rewrites found"
    ))
}

fn determinism() -> Check {
    let mut lines = 0;
    for (d, h, w, sel, filter) in [
        (3, 1, 6, MoveSelector::Full, Filter::All),
        (3, 1, 4, MoveSelector::Full, Filter::All),
        (4, 0, 6, MoveSelector::Braid, Filter::All),
    ] {
        let outputs: BTreeSet<String> = [1, 4, 8]
            .into_iter()
            .map(|n| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .unwrap()
                    .install(|| census(d, h, w, sel, &filter, Mode::Fast).map(|c| c.to_jsonl()))
            })
            .collect::<hurwitz::Result<_>>()
            .map_err(err)?;
        ensure(outputs.len() == 1, || {
            format!("({d},{h},{w}) census differs across thread counts")
        })?;
        lines += outputs.iter().next().unwrap().lines().count();
    }
    Ok(format!(
        "3 censuses ({lines} orbit lines) byte-identical with 1, 4 and 8 workers"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        (
            "full-monodromy systems with w >= 2d form one orbit",
            single_orbit_matrix,
        ),
        ("genus-zero braid orbits of full-monodromy tuples", genus_zero_baseline),
        ("handle moves are necessary at (2,1,4)", handle_moves_needed),
        ("enumeration count equals the character sum", counting_cross_check),
        ("move soundness", move_soundness),
        ("certificate integrity", certificate_integrity),
        (
            "split normal form construction and braid realization",
            split_construction,
        ),
        ("census determinism across worker counts", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name} [{secs:.1}s]: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name} [{secs:.1}s]: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
