//! Run configuration: command-line flags merged over an optional TOML file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::Args;
use serde::Deserialize;

use hurwitz::moves::normal_form::REALIZE_BUDGET;
use hurwitz::{Filter, Mode, MoveSelector};

/// Inclusive integer range written `a..b`, `a..=b` or `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl Span {
    pub fn single(x: usize) -> Self {
        Span { lo: x, hi: x }
    }

    pub fn values(self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

impl FromStr for Span {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Span> {
        let s = s.trim();
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
            None => (s, s),
        };
        let lo: usize = lo.trim().parse().with_context(|| format!("bad range {s:?}"))?;
        let hi: usize = hi.trim().parse().with_context(|| format!("bad range {s:?}"))?;
        if lo > hi {
            bail!("empty range {s:?}");
        }
        Ok(Span { lo, hi })
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

impl<'de> Deserialize<'de> for Span {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(usize),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Int(x) => Ok(Span::single(x)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Flags shared by every command. Every field is optional so a config
/// file can fill the gaps.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CommonArgs {
    /// Degree range, e.g. `2..4`
    #[arg(long, global = true)]
    pub d: Option<Span>,
    /// Base genus range
    #[arg(long, global = true)]
    pub h: Option<Span>,
    /// Branch point count range
    #[arg(long, global = true)]
    pub w: Option<Span>,
    /// Move set: braid or full
    #[arg(long, global = true)]
    pub moves: Option<String>,
    /// all, full-monodromy, transitive, intransitive or group=<blocks>
    #[arg(long, global = true)]
    pub filter: Option<String>,
    /// fast or validate
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// State budget of each search
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Work budget of exhaustive enumeration
    #[arg(long, global = true)]
    pub guard: Option<f64>,
    /// RNG seed for randomized checks
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Random samples for randomized checks
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Output file (CSV, JSONL or certificate)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker thread cap
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML file with defaults for these flags
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl CommonArgs {
    /// Fills every unset flag from `file`.
    pub fn merge(self, file: CommonArgs) -> CommonArgs {
        CommonArgs {
            d: self.d.or(file.d),
            h: self.h.or(file.h),
            w: self.w.or(file.w),
            moves: self.moves.or(file.moves),
            filter: self.filter.or(file.filter),
            mode: self.mode.or(file.mode),
            budget: self.budget.or(file.budget),
            guard: self.guard.or(file.guard),
            seed: self.seed.or(file.seed),
            samples: self.samples.or(file.samples),
            out: self.out.or(file.out),
            threads: self.threads.or(file.threads),
            config: self.config,
        }
    }
}

pub fn load_file(path: &Path) -> anyhow::Result<CommonArgs> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Resolved settings of one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub d: Option<Span>,
    pub h: Span,
    pub w: Option<Span>,
    pub moves: MoveSelector,
    pub filter: Option<Filter>,
    pub mode: Mode,
    pub budget: usize,
    pub guard: f64,
    pub seed: u64,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

pub const DEFAULT_GUARD: f64 = 5e8;
pub const DEFAULT_SAMPLES: usize = 200;

impl RunConfig {
    pub fn resolve(args: CommonArgs) -> anyhow::Result<RunConfig> {
        let args = match &args.config {
            Some(path) => {
                let file = load_file(path)?;
                args.merge(file)
            }
            None => args,
        };
        let budget = args.budget.unwrap_or(REALIZE_BUDGET);
        if budget == 0 {
            bail!("budget must be positive");
        }
        let guard = args.guard.unwrap_or(DEFAULT_GUARD);
        if guard.is_nan() || guard <= 0.0 {
            bail!("guard must be positive");
        }
        let samples = args.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            bail!("samples must be positive");
        }
        if args.threads == Some(0) {
            bail!("threads must be positive");
        }
        Ok(RunConfig {
            d: args.d,
            h: args.h.unwrap_or(Span::single(0)),
            w: args.w,
            moves: args.moves.as_deref().unwrap_or("full").parse()?,
            filter: args.filter.as_deref().map(str::parse).transpose()?,
            mode: args.mode.as_deref().unwrap_or("fast").parse()?,
            budget,
            guard,
            seed: args.seed.unwrap_or(0),
            samples,
            out: args.out,
            threads: args.threads,
        })
    }

    pub fn degrees(&self) -> anyhow::Result<Span> {
        self.d.context("--d is required")
    }

    pub fn branch_counts(&self) -> anyhow::Result<Span> {
        self.w.context("--w is required")
    }

    /// Every `(d, h, w)` of the ranges, in lexicographic order.
    pub fn cases(&self) -> anyhow::Result<Vec<(usize, usize, usize)>> {
        let (ds, ws) = (self.degrees()?, self.branch_counts()?);
        let mut out = Vec::new();
        for d in ds.values() {
            for h in self.h.values() {
                for w in ws.values() {
                    out.push((d, h, w));
                }
            }
        }
        Ok(out)
    }
}
