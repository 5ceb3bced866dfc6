use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hurwitz::enumerate::{
    enumerate_range, enumeration_estimate, random_filtered, random_system, tuple_space, MAX_HANDLE_DEGREE,
};
use hurwitz::frobenius::count_systems;
use hurwitz::moves::canonical::{canonical_form, canonicalize, NormalizeOptions};
use hurwitz::moves::catalog::{check_catalog, generate, Catalog, CATALOG_HANDLES, SEARCH_LENGTH};
use hurwitz::moves::{move_automorphism, precompose, MoveTable};
use hurwitz::orbit::{census_with_guard, connect, orbit_bfs, Connection, OrbitCensus, PredecessorLog};
use hurwitz::replay::{replay, Certificate};
use hurwitz::{Error, Filter, GroupHandle, HurwitzSystem, MoveSelector};

use crate::config::RunConfig;

/// Result of a command, mapped onto the process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Pass,
    Inconclusive,
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 3,
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn header(cfg: &RunConfig) -> String {
    format!(
        "# catalog {} seed {} budget {} guard {:e}\n",
        Catalog::shipped().hash(),
        cfg.seed,
        cfg.budget,
        cfg.guard
    )
}

/// Reads the first system line of a file, skipping blanks and `#` comments.
pub fn read_system(path: &Path) -> anyhow::Result<HurwitzSystem> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .with_context(|| format!("{} holds no system", path.display()))?;
    line.parse::<HurwitzSystem>()
        .map_err(anyhow::Error::from)
        .with_context(|| format!("parsing {}", path.display()))
}

fn census_feasible(cfg: &RunConfig, d: usize, h: usize, w: usize) -> bool {
    (h == 0 || d <= MAX_HANDLE_DEGREE) && enumeration_estimate(d, h, w) <= cfg.guard
}

#[derive(Clone, Debug)]
struct VerifyRow {
    d: usize,
    h: usize,
    w: usize,
    method: &'static str,
    systems: usize,
    orbits: Option<usize>,
    result: &'static str,
    note: String,
}

fn verify_case(cfg: &RunConfig, d: usize, h: usize, w: usize) -> anyhow::Result<(VerifyRow, Option<Outcome>)> {
    let mut row = VerifyRow {
        d,
        h,
        w,
        method: "-",
        systems: 0,
        orbits: None,
        result: "SKIP",
        note: String::new(),
    };
    if w % 2 == 1 || w < 2 * d || d < 2 {
        row.note = format!(
            "outside the hypotheses: need even w >= 2d, d >= 2 (w={w}, 2d={})",
            2 * d
        );
        return Ok((row, None));
    }
    if h > CATALOG_HANDLES {
        row.note = format!("catalog covers genus <= {CATALOG_HANDLES}");
        return Ok((row, None));
    }
    let states = count_systems(d, h, w).ok().and_then(|n| u64::try_from(n).ok());
    if census_feasible(cfg, d, h, w) && states.is_some_and(|n| n <= cfg.budget as u64) {
        row.method = "census";
        let c = census_with_guard(d, h, w, MoveSelector::Full, &Filter::FullMonodromy, cfg.mode, cfg.guard)?;
        row.systems = c.total;
        row.orbits = Some(c.orbit_count());
        let ok = c.orbit_count() == 1;
        row.result = if ok { "PASS" } else { "FAIL" };
        if !ok {
            row.note = format!("{} full-monodromy orbits", c.orbit_count());
        }
        return Ok((row, Some(if ok { Outcome::Pass } else { Outcome::Fail })));
    }
    row.method = "random";
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seeds: Vec<HurwitzSystem> = (0..cfg.samples)
        .map(|_| random_filtered(d, h, w, &Filter::FullMonodromy, &mut rng, 100_000))
        .collect::<hurwitz::Result<_>>()?;
    let opts = NormalizeOptions {
        mode: cfg.mode,
        budget: cfg.budget,
    };
    let results: Vec<hurwitz::Result<HurwitzSystem>> = seeds
        .par_iter()
        .map(|s| canonicalize(s, opts).map(|n| n.system))
        .collect();
    row.systems = seeds.len();
    let target = canonical_form(d, h, w)?;
    let mut outcome = Outcome::Pass;
    for (s, r) in seeds.iter().zip(results) {
        match r {
            Ok(c) if c == target => {}
            Ok(c) => {
                outcome = Outcome::Fail;
                row.note = format!("{s} reached {c}");
            }
            Err(Error::Budget(m)) => {
                outcome = outcome.max(Outcome::Inconclusive);
                if row.note.is_empty() {
                    row.note = m;
                }
            }
            Err(e) => {
                outcome = Outcome::Fail;
                row.note = format!("{s}: {e}");
            }
        }
    }
    row.orbits = (outcome == Outcome::Pass).then_some(1);
    row.result = match outcome {
        Outcome::Pass => "PASS",
        Outcome::Fail => "FAIL",
        Outcome::Inconclusive => "INCONCLUSIVE",
    };
    Ok((row, Some(outcome)))
}

pub fn verify(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let mut text = header(cfg);
    let mut csv = String::from("d,h,w,method,systems,orbits,result,note\n");
    writeln!(
        text,
        "{:>3} {:>3} {:>3}  {:<7} {:>10} {:>7}  {:<12} note",
        "d", "h", "w", "method", "systems", "orbits", "result"
    )?;
    let mut worst = None::<Outcome>;
    for (d, h, w) in cfg.cases()? {
        let (row, outcome) = verify_case(cfg, d, h, w)?;
        let orbits = row.orbits.map(|o| o.to_string()).unwrap_or_else(|| "-".into());
        writeln!(
            text,
            "{:>3} {:>3} {:>3}  {:<7} {:>10} {:>7}  {:<12} {}",
            row.d, row.h, row.w, row.method, row.systems, orbits, row.result, row.note
        )?;
        writeln!(
            csv,
            "{},{},{},{},{},{},{},\"{}\"",
            row.d,
            row.h,
            row.w,
            row.method,
            row.systems,
            orbits,
            row.result,
            row.note.replace('"', "\"\"")
        )?;
        if let Some(o) = outcome {
            worst = Some(worst.map_or(o, |x| x.max(o)));
        }
    }
    print!("{text}");
    if let Some(path) = &cfg.out {
        emit(Some(path), &csv)?;
    }
    match worst {
        Some(o) => Ok(o),
        None => Err(Error::Usage("every case lies outside the hypotheses".into()).into()),
    }
}

fn run_census(cfg: &RunConfig, d: usize, h: usize, w: usize, default_filter: Filter) -> anyhow::Result<OrbitCensus> {
    if w % 2 == 1 {
        return Err(Error::Usage(format!("no systems with odd w = {w}")).into());
    }
    let filter = cfg.filter.clone().unwrap_or(default_filter);
    Ok(census_with_guard(d, h, w, cfg.moves, &filter, cfg.mode, cfg.guard)?)
}

pub fn explore(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let mut text = header(cfg);
    let mut jsonl = String::new();
    for (d, h, w) in cfg.cases()? {
        let c = run_census(cfg, d, h, w, Filter::All)?;
        writeln!(
            text,
            "d={d} h={h} w={w} moves={} filter={}: {} systems, {} orbits",
            c.params.moves,
            c.params.filter,
            c.total,
            c.orbit_count()
        )?;
        writeln!(
            text,
            "{:>10}  {:<5} {:>5}  {:<16} rep",
            "size", "full", "genus", "blocks"
        )?;
        for o in &c.orbits {
            writeln!(
                text,
                "{:>10}  {:<5} {:>5}  {:<16} {}",
                o.size, o.full_monodromy, o.genus, o.blocks, o.rep
            )?;
        }
        jsonl.push_str(&c.to_jsonl());
    }
    print!("{text}");
    if let Some(path) = &cfg.out {
        emit(Some(path), &jsonl)?;
    }
    Ok(Outcome::Pass)
}

pub fn census(cfg: &RunConfig, from: Option<&Path>, log: Option<&Path>) -> anyhow::Result<Outcome> {
    if let Some(seed_path) = from {
        let seed = read_system(seed_path)?;
        let orbit = orbit_bfs(&seed, cfg.moves, cfg.budget)?;
        if let Some(path) = log {
            let mut file = std::io::BufWriter::new(
                std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
            );
            orbit.log.write_to(&mut file)?;
        }
        let mut keys: Vec<String> = orbit.members()?.iter().map(|s| s.to_string()).collect();
        keys.sort_unstable();
        let line = serde_json::json!({
            "rep": keys[0],
            "size": orbit.len(),
            "exhaustive": orbit.exhaustive,
            "full_monodromy": seed.is_full_monodromy(),
            "moves": Catalog::shipped().hash(),
            "params": {
                "d": seed.degree(),
                "h": seed.base_genus(),
                "w": seed.branch_count(),
                "moves": cfg.moves.to_string(),
                "seed": seed.to_string(),
                "budget": cfg.budget,
            },
        });
        emit(cfg.out.as_deref(), &format!("{line}\n"))?;
        return Ok(if orbit.exhaustive {
            Outcome::Pass
        } else {
            Outcome::Inconclusive
        });
    }
    if log.is_some() {
        bail!(Error::Usage("--log needs --from".into()));
    }
    let mut jsonl = String::new();
    for (d, h, w) in cfg.cases()? {
        jsonl.push_str(&run_census(cfg, d, h, w, Filter::FullMonodromy)?.to_jsonl());
    }
    emit(cfg.out.as_deref(), &jsonl)?;
    Ok(Outcome::Pass)
}

fn orbit_summary(cfg: &RunConfig, sys: &HurwitzSystem) -> anyhow::Result<String> {
    let orbit = orbit_bfs(sys, cfg.moves, cfg.budget)?;
    let least = orbit
        .members()?
        .iter()
        .map(|s| s.to_string())
        .min()
        .expect("seed is a member");
    Ok(format!(
        "size {}{}, full monodromy {}, least member {least}",
        orbit.len(),
        if orbit.exhaustive { "" } else { "+ (budget)" },
        sys.is_full_monodromy()
    ))
}

pub fn connect_files(cfg: &RunConfig, source: &Path, target: &Path) -> anyhow::Result<Outcome> {
    let (s, t) = (read_system(source)?, read_system(target)?);
    if s.params() != t.params() {
        bail!(Error::Usage(format!(
            "source has (d,h,w) = {:?}, target has {:?}",
            s.params(),
            t.params()
        )));
    }
    match connect(&s, &t, cfg.moves, cfg.budget)? {
        Connection::Connected(word) => {
            eprintln!("connected by {} moves", word.len());
            emit(cfg.out.as_deref(), &Certificate::new(s, t, word).to_string())?;
            Ok(Outcome::Pass)
        }
        Connection::Disconnected => {
            println!("disconnected");
            println!("source orbit: {}", orbit_summary(cfg, &s)?);
            println!("target orbit: {}", orbit_summary(cfg, &t)?);
            Ok(Outcome::Fail)
        }
        Connection::Inconclusive => {
            println!("inconclusive: search exceeded {} states", cfg.budget);
            Ok(Outcome::Inconclusive)
        }
    }
}

fn load_catalog(path: Option<&Path>) -> anyhow::Result<Catalog> {
    match path {
        None => Ok(Catalog::shipped().clone()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(Catalog::parse(&text)?)
        }
    }
}

pub fn replay_file(path: &Path, catalog: Option<&Path>) -> anyhow::Result<Outcome> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let result = if bytes.starts_with(b"HPLG") {
        PredecessorLog::read_from(&mut bytes.as_slice()).and_then(|log| {
            log.verify()?;
            Ok(format!("{} log records", log.records.len()))
        })
    } else {
        let cat = load_catalog(catalog)?;
        let text = String::from_utf8(bytes).context("certificate is not UTF-8")?;
        text.parse::<Certificate>()
            .and_then(|cert| replay(&cat, &cert).map(|_| format!("{} moves", cert.word.len())))
    };
    match result {
        Ok(summary) => {
            println!("PASS {summary}");
            Ok(Outcome::Pass)
        }
        Err(e @ Error::Parse { .. }) => Err(e.into()),
        Err(e) => {
            println!("FAIL {e}");
            Ok(Outcome::Fail)
        }
    }
}

/// Enumeration count, split over tuple ranges and summed in parallel.
fn enumeration_count(d: usize, h: usize, w: usize) -> anyhow::Result<u64> {
    let space = tuple_space(d, w);
    let chunks = 256u64.min(space.max(1));
    let counts: Vec<hurwitz::Result<u64>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let range = space * k / chunks..space * (k + 1) / chunks;
            Ok(enumerate_range(d, h, w, Filter::All, range)?.count() as u64)
        })
        .collect();
    let mut total = 0;
    for c in counts {
        total += c?;
    }
    Ok(total)
}

pub fn count(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let mut text = header(cfg);
    writeln!(
        text,
        "{:>3} {:>3} {:>3}  {:>24} {:>24}  result",
        "d", "h", "w", "character sum", "enumerated"
    )?;
    let mut worst = Outcome::Pass;
    for (d, h, w) in cfg.cases()? {
        let formula = match count_systems(d, h, w) {
            Ok(n) => n.to_string(),
            Err(Error::Unsupported(m)) => format!("unsupported: {m}"),
            Err(e) => return Err(e.into()),
        };
        let enumerated = if w % 2 == 0 && census_feasible(cfg, d, h, w) && !(d < 2 && w > 0) {
            Some(enumeration_count(d, h, w)?.to_string())
        } else {
            None
        };
        let result = match &enumerated {
            Some(e) if *e == formula => "PASS",
            Some(_) => {
                worst = Outcome::Fail;
                "FAIL"
            }
            None => "-",
        };
        writeln!(
            text,
            "{d:>3} {h:>3} {w:>3}  {formula:>24} {:>24}  {result}",
            enumerated.as_deref().unwrap_or("skipped")
        )?;
    }
    emit(cfg.out.as_deref(), &text)?;
    Ok(worst)
}

/// Compiled moves against catalog substitution, and preservation of
/// validity, genus and monodromy group, on random systems.
fn random_soundness(cat: &Catalog, cfg: &RunConfig) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut failures = Vec::new();
    for _ in 0..cfg.samples {
        let d = rng.gen_range(2..=4);
        let h = rng.gen_range(0..=2);
        let w = 2 * rng.gen_range(1..=4);
        let sys = match random_system(d, h, w, &mut rng) {
            Ok(s) => s,
            Err(e) => {
                failures.push(e.to_string());
                continue;
            }
        };
        let table = match MoveTable::new(cat, h, w) {
            Ok(t) => t,
            Err(e) => {
                failures.push(format!("h={h} w={w}: {e}"));
                continue;
            }
        };
        let group = GroupHandle::generated(d, sys.slots());
        for mv in table.generators(MoveSelector::Full) {
            let mut slots = Vec::new();
            if let Err(e) = table.apply_slots(&mv, d, sys.slots(), &mut slots) {
                failures.push(format!("{mv} on {sys}: {e}"));
                continue;
            }
            let compiled = HurwitzSystem::from_slots(d, h, w, slots);
            let substituted = move_automorphism(cat, &mv, h, w).and_then(|e| precompose(&sys, &e));
            match (compiled, substituted) {
                (Ok(a), Ok(b)) if a == b => {
                    if !a.is_valid() || a.genus() != sys.genus() {
                        failures.push(format!("{mv} on {sys} breaks validity or genus"));
                    }
                    if !GroupHandle::generated(d, a.slots()).same_subgroup(&group) {
                        failures.push(format!("{mv} on {sys} changes the monodromy group"));
                    }
                    let mut back = Vec::new();
                    let undone = table
                        .apply_slots(&mv.inverse().expect("elementary"), d, a.slots(), &mut back)
                        .is_ok_and(|_| back == sys.slots());
                    if !undone {
                        failures.push(format!("{mv} on {sys} is not undone by its inverse"));
                    }
                }
                (Ok(a), Ok(b)) => failures.push(format!("{mv} on {sys}: table gives {a}, catalog gives {b}")),
                (Err(e), _) | (_, Err(e)) => failures.push(format!("{mv} on {sys}: {e}")),
            }
        }
    }
    failures
}

pub fn validate_moves(cfg: &RunConfig, catalog: Option<&Path>) -> anyhow::Result<Outcome> {
    let cat = match load_catalog(catalog) {
        Ok(c) => c,
        Err(e) => {
            println!("FAIL catalog: {e:#}");
            return Ok(Outcome::Fail);
        }
    };
    println!("# catalog {} seed {} samples {}", cat.hash(), cfg.seed, cfg.samples);
    let checks = check_catalog(&cat);
    let mut failed = 0;
    for c in &checks {
        if !c.passed() {
            failed += 1;
            for f in &c.failures {
                println!("FAIL {} h={} w={}: {f}", c.name, c.h, c.w);
            }
        }
    }
    println!(
        "{} symbolic checks: {}",
        checks.len(),
        if failed == 0 { "PASS" } else { "FAIL" }
    );
    let random = random_soundness(&cat, cfg);
    for f in random.iter().take(20) {
        println!("FAIL {f}");
    }
    println!(
        "{} random systems: {}",
        cfg.samples,
        if random.is_empty() { "PASS" } else { "FAIL" }
    );
    Ok(if failed == 0 && random.is_empty() {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

pub fn canonicalize_file(cfg: &RunConfig, input: &Path) -> anyhow::Result<Outcome> {
    let sys = read_system(input)?;
    let opts = NormalizeOptions {
        mode: cfg.mode,
        budget: cfg.budget,
    };
    match canonicalize(&sys, opts) {
        Ok(n) => {
            eprintln!("metric trace {:?}, {} moves", n.metric_trace, n.word.len());
            emit(cfg.out.as_deref(), &Certificate::new(sys, n.system, n.word).to_string())?;
            Ok(Outcome::Pass)
        }
        Err(Error::OrbitMismatch(m)) => {
            println!("FAIL counterexample candidate: {m}");
            Ok(Outcome::Fail)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn generate_catalog(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let text = generate(SEARCH_LENGTH, CATALOG_HANDLES)?;
    emit(cfg.out.as_deref(), &text)?;
    Ok(Outcome::Pass)
}
